use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space form parameter must be -1, 0 or +1, got {0}")]
    InvalidSpaceForm(i64),
    #[error("matrix does not decompose in the Pauli basis (defect {defect:.3e})")]
    RealizationMismatch { defect: f64 },
    #[error("pairing is not a multiple of the identity (defect {defect:.3e})")]
    NotScalar { defect: f64 },
    #[error(
        "point leaves the model manifold (constraint residual {residual:.3e} at sample {index})"
    )]
    OffManifold { index: usize, residual: f64 },
    #[error(
        "torsion undefined where curvature falls below {kappa_min:.1e} (first at sample {index})"
    )]
    UndefinedTorsion { index: usize, kappa_min: f64 },
    #[error("negative curvature {value} at sample {index}")]
    NegativeCurvature { index: usize, value: f64 },
    #[error("perturbation not tangent to the spin field: |<lambda, U>| = {defect:.3e} at sample {index}")]
    TangencyViolation { index: usize, defect: f64 },
    #[error("time step {dt:.3e} violates the stability bound {bound:.3e}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("unstable step: node norm drifted to {norm} before renormalization at t = {t}")]
    StepUnstable { t: f64, norm: f64 },
    #[error("at least 3 time slices are required, got {0}")]
    InsufficientSlices(usize),
    #[error("adaptive integrator failed near s = {s} (step size {h:.3e})")]
    StepFailure { s: f64, h: f64 },
    #[error("degenerate reduction sphere: J = {0:.3e}")]
    DegenerateSphere(f64),
    #[error("no real initial state on the level H = epsilon matches the targets: {0}")]
    InfeasibleLevel(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("configuration error at {path}: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
