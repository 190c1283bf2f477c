use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),
    #[error("dimension mismatch: expected {expected} spins, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("vertex {vertex} out of range for {len} vertices")]
    VertexOutOfRange { vertex: usize, len: usize },
    #[error("operation requires k = 2, got k = {0}")]
    NeedsTwoClusters(usize),
    #[error("invalid class ({p1}, {p2}, {a}) for n = {n}")]
    InvalidClass { n: usize, p1: usize, p2: usize, a: usize },
    #[error("move {0} has zero multiplicity in this class")]
    ZeroMultiplicity(String),
    #[error("class size overflows 128 bits at n = {0}")]
    SizeOverflow(usize),
    #[error("instance too large: {0}")]
    Capacity(String),
    #[error("{0}")]
    KindMismatch(String),
    #[error("target set is empty")]
    EmptyTargets,
    #[error("target unreachable from start")]
    Unreachable,
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
