use thiserror::Error;

/// Errors raised by the field, evolution and diagnostic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("wavenumber {k} is not commensurate with the periodic domain (k L / 2pi = {cycles})")]
    NonCommensurateWavenumber { k: f64, cycles: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field norm vanishes")]
    ZeroField,
    #[error("margin {margin} is below the minimum {min} for this grid")]
    MarginTooSmall { margin: f64, min: f64 },
    #[error("CFL number {cfl} exceeds the limit 0.5")]
    CflViolation { cfl: f64 },
    #[error("no sample reaches the density threshold")]
    AllMasked,
    #[error("time slices are incompatible: {0}")]
    TimeSliceMismatch(String),
    #[error("density drifts by {drift} between slices; field is not stationary")]
    NotStationary { drift: f64 },
    #[error("field is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("polarization components differ by {deviation} (relative); not a single-phase state")]
    NotSinglePhase { deviation: f64 },
    #[error("wave vector is not null (k.k = {k_dot_k})")]
    NonNullWavevector { k_dot_k: f64 },
    #[error("tensor is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
}

pub type Result<T> = std::result::Result<T, LabError>;
