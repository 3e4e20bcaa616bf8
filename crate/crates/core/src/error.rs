use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: relative defect {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary: ‖U*U − I‖_F = {defect:.3e}")]
    NotUnitary { defect: f64 },

    #[error("matrix is not an isometry: ‖W*W − I‖_F = {defect:.3e}")]
    NotIsometry { defect: f64 },

    #[error("not a contraction: largest singular value {norm:.6}")]
    NotContraction { norm: f64 },

    #[error("not an isometric column: ‖Σ Zᵢ*Zᵢ − I‖_F = {defect:.3e}")]
    NotIsometricColumn { defect: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("function `{name}` is undefined at eigenvalue {at}")]
    Domain { name: String, at: f64 },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("invalid function parameters: {0}")]
    InvalidParams(String),

    #[error("contraction construction requires f(0) ≤ 0, but f(0) = {value}")]
    PositiveAtZero { value: f64 },

    #[error("function `{name}` is not monotone on the spectral hull [{lo}, {hi}]")]
    NotMonotone { name: String, lo: f64, hi: f64 },

    #[error("function `{0}` has the wrong convexity for this operation")]
    WrongKind(String),

    #[error("rank-deficient random draw after {0} attempts")]
    RankDeficient(usize),

    #[error("constructed pair fails its own certificate (relative margin {margin:.3e}): {diagnostic}")]
    CertificateFailed { margin: f64, diagnostic: String },
}

impl Error {
    /// Errors caused by violated mathematical preconditions of the input, as
    /// opposed to malformed data or internal failures.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotContraction { .. }
                | Error::PositiveAtZero { .. }
                | Error::NotMonotone { .. }
                | Error::WrongKind(_)
                | Error::Domain { .. }
                | Error::NotHermitian { .. }
                | Error::NotUnitary { .. }
                | Error::NotIsometry { .. }
                | Error::NotIsometricColumn { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
