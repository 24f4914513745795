use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },

    #[error("overdamped oscillator: need 4k > c0^2, got 4k = {four_k}, c0^2 = {c0_sq}")]
    OverdampedParam { four_k: f64, c0_sq: f64 },

    #[error("state outside the elastic band: |z| = {z_abs} > Y = {bound}")]
    InvalidState { z_abs: f64, bound: f64 },

    #[error("time step {dt} too large for Y = {bound}: velocity scale * dt must stay below Y/10")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("linear solve did not reach tolerance: {0}")]
    SolverDiverged(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("denominator {value:e} below {floor:e} at corner {corner}")]
    DegenerateDenominator {
        corner: &'static str,
        value: f64,
        floor: f64,
    },

    #[error("no long cycle completed within {limit} time units")]
    CycleTimeout { limit: f64 },
}
