use crate::error::{Error, Result};

/// Physical constants of the oscillator: viscous damping `c0`, stiffness `k`
/// and the elasto-plastic bound `Y` on the elastic component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    c0: f64,
    k: f64,
    bound: f64,
    omega: f64,
}

impl OscillatorParams {
    pub fn new(c0: f64, k: f64, bound: f64) -> Result<Self> {
        for (name, value) in [("c0", c0), ("k", k), ("Y", bound)] {
            // NaN fails this comparison too.
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParam { name, value });
            }
        }
        let four_k = 4.0 * k;
        let c0_sq = c0 * c0;
        if four_k <= c0_sq {
            return Err(Error::OverdampedParam { four_k, c0_sq });
        }
        Ok(Self {
            c0,
            k,
            bound,
            omega: (four_k - c0_sq).sqrt() / 2.0,
        })
    }

    #[inline]
    pub fn c0(&self) -> f64 {
        self.c0
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Elasto-plastic bound `Y`.
    #[inline]
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Damped natural frequency `sqrt(4k - c0^2) / 2`.
    #[inline]
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Six standard deviations of the velocity for the `-c0 y` drift with unit noise.
    pub fn velocity_scale(&self) -> f64 {
        6.0 / (2.0 * self.c0).sqrt()
    }
}

/// Builds [`OscillatorParams`], rejecting non-positive and overdamped inputs.
pub fn validate_params(c0: f64, k: f64, bound: f64) -> Result<OscillatorParams> {
    OscillatorParams::new(c0, k, bound)
}
