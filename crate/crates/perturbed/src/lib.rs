//! Spanning structures in randomly perturbed sparse graphs.
//!
//! A dense-ish deterministic graph with minimum degree `alpha * n` is unioned
//! with a sparse binomial random graph `G(n, beta/n)`. The library builds long
//! paths, near-perfect matchings and almost-spanning trees inside the random
//! part, then finishes them into Hamilton cycles, perfect matchings and
//! spanning trees using switching structures supported on the dense part.
//! A Monte Carlo harness estimates where each construction starts succeeding.

pub mod absorber;
pub mod graph;
pub mod harness;
pub mod random;
pub mod span;
pub mod tree;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge endpoint {endpoint} out of range for {n} vertices")]
    VertexOutOfRange { endpoint: usize, n: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("edge list is not a tree (must be connected and acyclic)")]
    NotATree,

    #[error("edge {u}-{v} violates the declared bipartition")]
    BipartitionViolated { u: usize, v: usize },

    #[error("no cycle found within the rotation budget")]
    NoCycleFound,

    #[error("embedding budget exhausted after placing {placed} of {total} vertices")]
    EmbeddingBudget { placed: usize, total: usize },

    #[error("embedding pattern has {pattern} vertices but host has only {host}")]
    PatternTooLarge { pattern: usize, host: usize },

    #[error("{stage} absorber exhausted: {observed} candidates, needs at least {required:.1}")]
    AbsorberExhausted {
        stage: &'static str,
        observed: usize,
        required: f64,
    },

    #[error("no closing edge between the two endpoint absorber sets")]
    NoClosingEdge,

    #[error("trim target below one vertex (eps too large)")]
    TrimTooAggressive,

    #[error("independent interior set too small: {got} < {bound:.1}")]
    InteriorSetTooSmall { got: usize, bound: f64 },

    #[error("operation requires a complete-bipartite dense part")]
    NotBipartiteKind,

    #[error("success probability never reached {target} on (0, {hi:.3}]")]
    BracketNotFound { target: f64, hi: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
