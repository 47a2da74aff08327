use serde_json::{json, Value};
use thiserror::Error;

/// Every failure a library operation can report.
///
/// Each variant carries enough context to be rendered as a machine-readable
/// record through [`Error::code`] and [`Error::context`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unitary: max |UU^dagger - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not symplectic: max |S beta S^T - beta| = {deviation:.3e}")]
    NotSymplectic { deviation: f64 },
    #[error("matrix is not orthogonal: max |O O^T - I| = {deviation:.3e}")]
    NotOrthogonal { deviation: f64 },
    #[error("matrix is not symmetric: max |A - A^T| = {deviation:.3e}")]
    NotSymmetric { deviation: f64 },
    #[error("complex matrix is not symmetric: max |G - G^T| = {deviation:.3e}")]
    NotSymmetricComplex { deviation: f64 },
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("matrix is not positive definite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("covariance violates the Heisenberg inequality: min eig(cov + i beta) = {min_eigenvalue:.3e}")]
    NotPhysical { min_eigenvalue: f64 },
    #[error("covariance is singular: min eigenvalue {min_eigenvalue:.3e}")]
    SingularCovariance { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("mode functions live on different grids")]
    GridMismatch,
    #[error("vector is zero (norm {norm:.3e})")]
    ZeroVector { norm: f64 },
    #[error("vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },
    #[error("invalid pump ratio r = {r}; need 0 <= r < 1")]
    InvalidPumpRatio { r: f64 },
    #[error("invalid gain P = {gain}; need P > 0")]
    InvalidGain { gain: f64 },
    #[error("invalid squeezing {sigma}; cluster inputs need sigma > 1")]
    InvalidSqueezing { sigma: f64 },
    #[error("mode index {index} out of range for {n_modes} modes")]
    IndexOutOfRange { index: usize, n_modes: usize },
    #[error("coherency matrix has zero trace")]
    ZeroTrace,
    #[error("homodyne local oscillator mode is zero")]
    ZeroLO,
    #[error("measurement oracle failed for {setting}: {reason}")]
    OracleFailure { setting: String, reason: String },
    #[error("overlap modulus {modulus} exceeds 1")]
    OverlapOutOfRange { modulus: f64 },
    #[error("weights do not form a probability vector (sum {sum})")]
    NotAProbability { sum: f64 },
    #[error("cannot subtract a photon from vacuum in this mode (Tr[(G-1)P_g] = {denominator:.3e})")]
    VacuumSubtraction { denominator: f64 },
    #[error("state has nonzero mean (max |mean| = {max_abs:.3e}); photon operations need a centered state")]
    NonzeroMean { max_abs: f64 },
    #[error("phase-space integration supports 1 or 2 modes, got {n_modes}")]
    TooManyModes { n_modes: usize },
    #[error("integration grid too coarse or too small: estimated tail mass {tail_mass:.3e}")]
    GridTooCoarse { tail_mass: f64 },
    #[error("Fock cutoff {cutoff} too small: {reason}")]
    CutoffTooSmall { cutoff: usize, reason: String },
    #[error("parameterized field has zero derivative at a = 0")]
    FlatModel,
    #[error("finite-difference step too large: halving h moved u_det by {change:.3e}")]
    StepTooLarge { change: f64 },
    #[error("bad sweep range: {reason}")]
    BadRange { reason: String },
    #[error("decomposition failed to converge: {reason}")]
    NoConvergence { reason: String },
}

impl Error {
    /// Stable machine-readable identifier of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::NotSymplectic { .. } => "NotSymplectic",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotSymmetricComplex { .. } => "NotSymmetricComplex",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositiveSemidefinite { .. } => "NotPositiveSemidefinite",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NotPhysical { .. } => "NotPhysical",
            Error::SingularCovariance { .. } => "SingularCovariance",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::GridMismatch => "GridMismatch",
            Error::ZeroVector { .. } => "ZeroVector",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::InvalidParam { .. } => "InvalidParam",
            Error::InvalidPumpRatio { .. } => "InvalidPumpRatio",
            Error::InvalidGain { .. } => "InvalidGain",
            Error::InvalidSqueezing { .. } => "InvalidSqueezing",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ZeroTrace => "ZeroTrace",
            Error::ZeroLO => "ZeroLO",
            Error::OracleFailure { .. } => "OracleFailure",
            Error::OverlapOutOfRange { .. } => "OverlapOutOfRange",
            Error::NotAProbability { .. } => "NotAProbability",
            Error::VacuumSubtraction { .. } => "VacuumSubtraction",
            Error::NonzeroMean { .. } => "NonzeroMean",
            Error::TooManyModes { .. } => "TooManyModes",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::FlatModel => "FlatModel",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::BadRange { .. } => "BadRange",
            Error::NoConvergence { .. } => "NoConvergence",
        }
    }

    /// Structured fields of the variant as a JSON object.
    pub fn context(&self) -> Value {
        match self {
            Error::NotSquare { rows, cols } => json!({ "rows": rows, "cols": cols }),
            Error::NotUnitary { deviation }
            | Error::NotSymplectic { deviation }
            | Error::NotOrthogonal { deviation }
            | Error::NotSymmetric { deviation }
            | Error::NotSymmetricComplex { deviation }
            | Error::NotHermitian { deviation } => json!({ "deviation": deviation }),
            Error::NotPositiveSemidefinite { min_eigenvalue }
            | Error::NotPositiveDefinite { min_eigenvalue }
            | Error::NotPhysical { min_eigenvalue }
            | Error::SingularCovariance { min_eigenvalue } => {
                json!({ "min_eigenvalue": min_eigenvalue })
            }
            Error::DimensionMismatch { expected, found } => {
                json!({ "expected": expected, "found": found })
            }
            Error::ZeroVector { norm } | Error::NotNormalized { norm } => json!({ "norm": norm }),
            Error::InvalidParam { name, reason } => json!({ "name": name, "reason": reason }),
            Error::InvalidPumpRatio { r } => json!({ "r": r }),
            Error::InvalidGain { gain } => json!({ "gain": gain }),
            Error::InvalidSqueezing { sigma } => json!({ "sigma": sigma }),
            Error::IndexOutOfRange { index, n_modes } => {
                json!({ "index": index, "n_modes": n_modes })
            }
            Error::OracleFailure { setting, reason } => {
                json!({ "setting": setting, "reason": reason })
            }
            Error::OverlapOutOfRange { modulus } => json!({ "modulus": modulus }),
            Error::NotAProbability { sum } => json!({ "sum": sum }),
            Error::VacuumSubtraction { denominator } => json!({ "denominator": denominator }),
            Error::NonzeroMean { max_abs } => json!({ "max_abs": max_abs }),
            Error::TooManyModes { n_modes } => json!({ "n_modes": n_modes }),
            Error::GridTooCoarse { tail_mass } => json!({ "tail_mass": tail_mass }),
            Error::CutoffTooSmall { cutoff, reason } => {
                json!({ "cutoff": cutoff, "reason": reason })
            }
            Error::StepTooLarge { change } => json!({ "change": change }),
            Error::BadRange { reason } | Error::NoConvergence { reason } => {
                json!({ "reason": reason })
            }
            Error::GridMismatch | Error::ZeroTrace | Error::ZeroLO | Error::FlatModel => json!({}),
        }
    }

    /// The `{code, message, context}` record emitted by the command-line tool.
    pub fn to_json(&self) -> Value {
        json!({ "code": self.code(), "message": self.to_string(), "context": self.context() })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
