use thiserror::Error;

pub type Result<T, E = BseError> = std::result::Result<T, E>;

/// Which Cholesky factorization failed inside a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorTarget {
    /// The real embedding `M` of the complex operator.
    Embedding,
    /// `A + B` in the real solver.
    APlusB,
    /// `A - B` in the real solver.
    AMinusB,
    /// `Ω = [[A, B], [conj B, conj A]]` in the oracle.
    Omega,
    /// A bare matrix handed to the kernel directly.
    Input,
}

impl std::fmt::Display for FactorTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FactorTarget::Embedding => "M (real embedding of [[A, B], [conj B, conj A]])",
            FactorTarget::APlusB => "A + B",
            FactorTarget::AMinusB => "A - B",
            FactorTarget::Omega => "[[A, B], [conj B, conj A]]",
            FactorTarget::Input => "input matrix",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum BseError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("structure violation: {0}")]
    Structure(String),

    /// `index` is zero-based; the failing leading minor has order `index + 1`.
    #[error("{target} is not positive definite: pivot {pivot_value:e} at leading minor of order {}", index + 1)]
    NotPositiveDefinite {
        target: FactorTarget,
        index: usize,
        pivot_value: f64,
    },

    #[error("inverse iteration did not converge for eigenvalue #{index} ({value:e})")]
    InverseIterationFailed { index: usize, value: f64 },

    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BseError {
    pub(crate) fn retarget(self, target: FactorTarget) -> Self {
        match self {
            BseError::NotPositiveDefinite {
                index, pivot_value, ..
            } => BseError::NotPositiveDefinite {
                target,
                index,
                pivot_value,
            },
            other => other,
        }
    }
}
