//! Metastability of the Ising model on the two-cluster graph G(2,n).
//!
//! Single-flip Metropolis dynamics on two complete clusters of `n` vertices
//! joined by a perfect matching of twin vertices, with intra-cluster coupling
//! 1, cross coupling `ε ∈ [−1, 1]` and external field `h ∈ [0, 1]`.
//!
//! - [`model`]: graph, configurations, Hamiltonian.
//! - [`classes`]: the (p1, p2, a) classes and the exact lumped chain.
//! - [`landscape`]: closed-form predictions per (ε, h) regime.
//! - [`oracle`]: brute force over all 2^{2n} configurations.
//! - [`dynamics`]: simulation, hitting times, spectral gap, mixing.
//! - [`cli`]: configuration and commands behind the binary.

pub mod chain;
pub mod classes;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod landscape;
pub mod model;
pub mod oracle;
pub mod params;

pub use error::{Error, Result};
pub use exact::{parse_rational, rat, Affine, Rational};
pub use params::Params;
