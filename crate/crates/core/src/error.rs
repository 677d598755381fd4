use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced while assembling or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coefficient table does not cover omega = {omega} (max {omega_max})")]
    CoefficientRange { omega: i64, omega_max: i64 },

    #[error("negative dissipator weight {value:.3e} at omega = {omega}; bath coefficients must be nonnegative")]
    NegativeWeight { omega: i64, value: f64 },

    #[error("superoperator size guard: n_max = {n_max} exceeds limit {limit}")]
    SizeGuard { n_max: usize, limit: usize },

    #[error("state became non-finite at t = {t:.6}; last good state recorded at t = {t_last:.6}")]
    NonFinite { t: f64, t_last: f64 },

    #[error("population went negative ({value:.3e}) at t = {t:.6}; rate matrix is inconsistent")]
    NegativePopulation { t: f64, value: f64 },

    #[error("adaptive integrator failed: step size underflow at t = {t:.6}")]
    StepUnderflow { t: f64 },

    #[error("phase-space grid too coarse: spacing ({dx:.4e}, {dp:.4e}) exceeds sqrt(epsilon)/2 = {limit:.4e}")]
    GridTooCoarse { dx: f64, dp: f64, limit: f64 },

    #[error("grid does not cover the required support: {0}")]
    GridTooSmall(String),

    #[error("CFL violation: dt = {dt:.4e} exceeds stable limit {dt_max:.4e}")]
    CflViolation { dt: f64, dt_max: f64 },

    #[error("phase-space mass drifted by {drift:.3e} at t = {t:.6} (limit {limit:.1e})")]
    MassDrift { t: f64, drift: f64, limit: f64 },

    #[error("rate integral did not converge: {0}")]
    NonConvergent(String),

    #[error("rate field assembly produced negative values below tolerance: min = {min:.3e}")]
    NegativeRateField { min: f64 },

    #[error("{0}")]
    Config(String),
}
