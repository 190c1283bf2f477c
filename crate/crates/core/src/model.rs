//! The clustered graph G(k,n), spin configurations and the Hamiltonian
//!
//! H(σ) = −Σ_internal σᵢσⱼ − ε Σ_cross σᵢσⱼ − h Σ σᵢ.
//!
//! Vertex `c·n + i` is the `i`-th vertex of cluster `c` (both 0-based); its
//! twins are the vertices `c'·n + i` of the other clusters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Affine;
use crate::params::Params;

/// The graph G(k,n): `k` complete clusters of `n` vertices, each vertex joined
/// to its twin in every other cluster.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteredGraph {
    n: usize,
    k: usize,
    internal: Vec<(usize, usize)>,
    cross: Vec<(usize, usize)>,
}

impl ClusteredGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.k * self.n
    }

    pub fn internal_edges(&self) -> &[(usize, usize)] {
        &self.internal
    }

    pub fn cross_edges(&self) -> &[(usize, usize)] {
        &self.cross
    }

    pub fn edge_count(&self) -> usize {
        self.internal.len() + self.cross.len()
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        v / self.n
    }

    /// Neighbours inside the cluster of `v`.
    pub fn internal_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let base = self.cluster_of(v) * self.n;
        (base..base + self.n).filter(move |&u| u != v)
    }

    /// Twins of `v` in the other clusters.
    pub fn twins(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (c, i) = (self.cluster_of(v), v % self.n);
        (0..self.k).filter(move |&d| d != c).map(move |d| d * self.n + i)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.internal_neighbors(v).count() + self.twins(v).count()
    }
}

/// Builds G(k,n) for the given parameters.
pub fn build_graph(params: &Params) -> ClusteredGraph {
    let (n, k) = (params.n(), params.k());
    let mut internal = Vec::with_capacity(k * n * (n - 1) / 2);
    for c in 0..k {
        for i in 0..n {
            for j in i + 1..n {
                internal.push((c * n + i, c * n + j));
            }
        }
    }
    let mut cross = Vec::with_capacity(n * k * (k - 1) / 2);
    for c in 0..k {
        for d in c + 1..k {
            for i in 0..n {
                cross.push((c * n + i, d * n + i));
            }
        }
    }
    ClusteredGraph { n, k, internal, cross }
}

/// A ±1 spin assignment stored as a packed bit array (bit set = `+1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig {
    len: usize,
    words: Vec<u64>,
}

impl SpinConfig {
    pub fn all_minus(len: usize) -> Self {
        SpinConfig { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn all_plus(len: usize) -> Self {
        let mut s = Self::all_minus(len);
        for v in 0..len {
            s.set(v, true);
        }
        s
    }

    /// Configuration whose bit `v` is bit `v` of `code`. Requires `len ≤ 64`.
    pub fn from_code(code: u64, len: usize) -> Self {
        assert!(len <= 64, "from_code supports at most 64 vertices");
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        SpinConfig { len, words: vec![code & mask; len.div_ceil(64)] }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut s = Self::all_minus(signs.len());
        for (v, &x) in signs.iter().enumerate() {
            match x {
                1 => s.set(v, true),
                -1 => {}
                _ => return Err(Error::Domain(format!("spin {x} at vertex {v} is not ±1"))),
            }
        }
        Ok(s)
    }

    /// Packed code, available when `len ≤ 64`.
    pub fn code(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.words.first().copied().unwrap_or(0))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_plus(&self, v: usize) -> bool {
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    /// Spin value `±1` at `v`.
    pub fn spin(&self, v: usize) -> i64 {
        if self.is_plus(v) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, v: usize, plus: bool) {
        let bit = 1u64 << (v % 64);
        if plus {
            self.words[v / 64] |= bit;
        } else {
            self.words[v / 64] &= !bit;
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len).map(|v| self.spin(v) as i8).collect()
    }

    pub fn plus_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Global spin flip `−σ`.
    pub fn negated(&self) -> Self {
        let mut s = self.clone();
        for v in 0..self.len {
            s.set(v, !self.is_plus(v));
        }
        s
    }

    pub fn hamming(&self, other: &SpinConfig) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }
}

fn check_len(g: &ClusteredGraph, sigma: &SpinConfig) -> Result<()> {
    if sigma.len() != g.vertex_count() {
        return Err(Error::Dimension { expected: g.vertex_count(), got: sigma.len() });
    }
    Ok(())
}

fn check_vertex(sigma: &SpinConfig, v: usize) -> Result<()> {
    if v >= sigma.len() {
        return Err(Error::VertexOutOfRange { vertex: v, len: sigma.len() });
    }
    Ok(())
}

/// Exact energy of `sigma` as integer coefficients of (1, ε, h), by direct
/// summation over every edge.
pub fn hamiltonian_exact(g: &ClusteredGraph, sigma: &SpinConfig) -> Result<Affine> {
    check_len(g, sigma)?;
    let internal: i64 = g.internal.iter().map(|&(i, j)| sigma.spin(i) * sigma.spin(j)).sum();
    let cross: i64 = g.cross.iter().map(|&(i, j)| sigma.spin(i) * sigma.spin(j)).sum();
    let magnetization: i64 = (0..sigma.len()).map(|v| sigma.spin(v)).sum();
    Ok(Affine::new(-internal, -cross, -magnetization))
}

/// Energy of `sigma` in double precision.
pub fn hamiltonian(g: &ClusteredGraph, sigma: &SpinConfig, params: &Params) -> Result<f64> {
    Ok(hamiltonian_exact(g, sigma)?.eval_f64(params.epsilon_f64(), params.h_f64()))
}

/// `σ^(v)`: `sigma` with the spin at `v` reversed.
pub fn flip(sigma: &SpinConfig, v: usize) -> Result<SpinConfig> {
    check_vertex(sigma, v)?;
    let mut s = sigma.clone();
    s.set(v, !sigma.is_plus(v));
    Ok(s)
}

/// Exact `H(σ^(v)) − H(σ)` from the neighbourhood of `v`.
pub fn flip_delta_exact(g: &ClusteredGraph, sigma: &SpinConfig, v: usize) -> Result<Affine> {
    check_len(g, sigma)?;
    check_vertex(sigma, v)?;
    let s = sigma.spin(v);
    let internal: i64 = g.internal_neighbors(v).map(|u| sigma.spin(u)).sum();
    let cross: i64 = g.twins(v).map(|u| sigma.spin(u)).sum();
    Ok(Affine::new(2 * s * internal, 2 * s * cross, 2 * s))
}

/// `H(σ^(v)) − H(σ)` in double precision.
pub fn flip_delta(g: &ClusteredGraph, sigma: &SpinConfig, v: usize, params: &Params) -> Result<f64> {
    Ok(flip_delta_exact(g, sigma, v)?.eval_f64(params.epsilon_f64(), params.h_f64()))
}
