use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Greedy decomposition hit a negative coefficient: the character is not a
    /// non-negative combination of tilting characters.
    #[error("character is not tilting: weight {weight} went negative during decomposition")]
    NonTilting { weight: usize },

    /// A double-precision evaluation cannot deliver the requested accuracy.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// Two poles of a partial-fraction expansion are numerically indistinguishable.
    #[error("degenerate root near {root}")]
    DegenerateRoot { root: f64 },

    #[error("derivative order {0} is not supported (maximum 6)")]
    UnsupportedOrder(u32),

    /// Grid spacing too coarse for the finest density scale in use.
    #[error("grid spacing {h} does not resolve level {level} (need h <= {limit})")]
    UnderResolved { h: f64, level: i32, limit: f64 },

    #[error("grid mismatch: spacing {left} vs {right}")]
    GridMismatch { left: f64, right: f64 },

    #[error("domain [0, {domain}] does not cover the evaluation window (need {needed})")]
    DomainTooSmall { domain: f64, needed: f64 },

    /// Cauchy diagnostic of the limit density exceeds the configured tolerance.
    #[error("psi approximation not converged: Cauchy difference {diff:e} exceeds {tol:e}")]
    NotConverged { diff: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
