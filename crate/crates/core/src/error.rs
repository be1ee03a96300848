use thiserror::Error;

use crate::hamiltonian::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("mode {mode} out of range for a {n_modes}-mode system")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("unsupported number of modes {0} (expected 1..={max})", max = crate::fermion::MAX_MODES)]
    UnsupportedModeCount(usize),

    #[error("invalid Fock state: {0}")]
    InvalidState(String),

    #[error("matrix has more than one nonzero entry in some row or column")]
    NotMonomial,

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("parameter `{0}` is referenced but not bound")]
    UnboundParameter(String),

    #[error("hamiltonian is not Hermitian (max |H - H†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("density of mode {mode} at t = {time} is {value}, outside [0, 1]")]
    DensityOutOfRange { mode: usize, time: f64, value: f64 },

    #[error("invalid simulation plan: {0}")]
    InvalidPlan(String),

    #[error("integration step too large: Hermiticity drift {drift:e} at t = {time}")]
    StepTooLarge { drift: f64, time: f64 },

    #[error("unknown closed-form case `{0}`")]
    UnknownCase(String),
}
