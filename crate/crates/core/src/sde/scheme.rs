//! Explicit projection scheme for the velocity / elastic-component pair.
//!
//! One step of size `dt` with Wiener increment `dW`:
//!
//! ```text
//! y' = y - (c0 y + k z) dt + dW
//! z' = clamp(z + y dt, -Y, Y)
//! ```
//!
//! Both updates read the pre-step state. The part of `z + y dt` removed by the
//! clamp is the plastic increment, so `x = z + Delta` holds step by step.

use super::noise::NoisePath;
use super::params::OscillatorParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Elastic,
    PlasticPlus,
    PlasticMinus,
}

impl Regime {
    pub fn of(z: f64, bound: f64) -> Self {
        if z >= bound {
            Regime::PlasticPlus
        } else if z <= -bound {
            Regime::PlasticMinus
        } else {
            Regime::Elastic
        }
    }

    pub fn is_plastic(self) -> bool {
        !matches!(self, Regime::Elastic)
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::Elastic => "elastic",
            Regime::PlasticPlus => "plastic+",
            Regime::PlasticMinus => "plastic-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub y: f64,
    pub z: f64,
    pub regime: Regime,
}

impl State {
    /// State at `(y, z)`, labelled from `z`. Fails if `|z| > Y`.
    pub fn new(params: &OscillatorParams, t: f64, y: f64, z: f64) -> Result<Self> {
        let bound = params.bound();
        if !(z.abs() <= bound) {
            return Err(Error::InvalidState {
                z_abs: z.abs(),
                bound,
            });
        }
        Ok(Self {
            t,
            y,
            z,
            regime: Regime::of(z, bound),
        })
    }

    /// The rest state `x(0) = 0, x'(0) = 0`.
    pub fn origin() -> Self {
        Self {
            t: 0.0,
            y: 0.0,
            z: 0.0,
            regime: Regime::Elastic,
        }
    }

    /// Boundary rest state `(0, side * Y)`.
    pub fn boundary_rest(params: &OscillatorParams, side: f64) -> Self {
        let z = side.signum() * params.bound();
        Self {
            t: 0.0,
            y: 0.0,
            z,
            regime: Regime::of(z, params.bound()),
        }
    }

    pub fn negated(&self) -> Self {
        let regime = match self.regime {
            Regime::Elastic => Regime::Elastic,
            Regime::PlasticPlus => Regime::PlasticMinus,
            Regime::PlasticMinus => Regime::PlasticPlus,
        };
        Self {
            t: self.t,
            y: -self.y,
            z: -self.z,
            regime,
        }
    }
}

/// Outcome of one unchecked step: the new state plus the clamp excess.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step {
    pub state: State,
    pub plastic_increment: f64,
}

#[inline]
pub(crate) fn step_unchecked(p: &OscillatorParams, s: &State, dw: f64, dt: f64) -> Step {
    let bound = p.bound();
    let y = s.y - (p.c0() * s.y + p.k() * s.z) * dt + dw;
    let z_pred = s.z + s.y * dt;
    let z = z_pred.clamp(-bound, bound);
    Step {
        state: State {
            t: s.t + dt,
            y,
            z,
            regime: Regime::of(z, bound),
        },
        plastic_increment: z_pred - z,
    }
}

/// One step of the projection scheme.
pub fn euler_step(params: &OscillatorParams, state: &State, dw: f64, dt: f64) -> Result<State> {
    if !(state.z.abs() <= params.bound()) {
        return Err(Error::InvalidState {
            z_abs: state.z.abs(),
            bound: params.bound(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    Ok(step_unchecked(params, state, dw, dt).state)
}

/// Closed-form flow of the unconstrained linear oscillator started at
/// `(y0, z0)`, evaluated at `t`. The stochastic convolutions are left-point
/// sums over `noise`; `t` is rounded to the nearest multiple of `noise.dt`.
/// Only meaningful while the constrained path stays inside `|z| < Y`.
pub fn elastic_flow_exact(
    params: &OscillatorParams,
    y0: f64,
    z0: f64,
    t: f64,
    noise: &NoisePath,
) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t must be non-negative, got {t}"
        )));
    }
    let n = (t / noise.dt).round() as usize;
    if n > noise.len() {
        return Err(Error::InvalidArgument(format!(
            "noise path has {} increments, {n} needed",
            noise.len()
        )));
    }
    let half_c0 = params.c0() / 2.0;
    let omega = params.omega();
    let decay = (-half_c0 * t).exp();
    let (sin_t, cos_t) = (omega * t).sin_cos();
    let lead = y0 + half_c0 * z0;

    let mut conv_sin = 0.0;
    let mut conv_cos = 0.0;
    for (m, dw) in noise.increments[..n].iter().enumerate() {
        let lag = t - m as f64 * noise.dt;
        let damp = (-half_c0 * lag).exp();
        let (s, c) = (omega * lag).sin_cos();
        conv_sin += damp * s * dw;
        conv_cos += damp * c * dw;
    }

    let z = decay * (z0 * cos_t + lead / omega * sin_t) + conv_sin / omega;
    let y = -half_c0 * z + decay * (-omega * z0 * sin_t + lead * cos_t) + conv_cos;
    Ok((y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table_params() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn interior_step() {
        let p = table_params();
        let s = State::new(&p, 0.0, 1.0, 0.0).unwrap();
        let next = euler_step(&p, &s, 0.0, 0.1).unwrap();
        assert_relative_eq!(next.y, 0.9, epsilon = 1e-15);
        assert_relative_eq!(next.z, 0.1, epsilon = 1e-15);
        assert_eq!(next.regime, Regime::Elastic);
    }

    #[test]
    fn clamped_step_enters_plastic_phase() {
        let p = table_params();
        let s = State::new(&p, 0.0, 1.0, 0.48).unwrap();
        let next = euler_step(&p, &s, 0.0, 0.1).unwrap();
        assert_relative_eq!(next.y, 0.852, epsilon = 1e-15);
        assert_eq!(next.z, 0.5);
        assert_eq!(next.regime, Regime::PlasticPlus);
    }

    #[test]
    fn origin_is_a_fixed_point() {
        let p = table_params();
        let next = euler_step(&p, &State::origin(), 0.0, 0.1).unwrap();
        assert_eq!((next.y, next.z, next.regime), (0.0, 0.0, Regime::Elastic));
    }

    #[test]
    fn pinned_state_stays_pinned_while_pushing_outward() {
        let p = table_params();
        let s = State::new(&p, 0.0, 0.3, 0.5).unwrap();
        let step = step_unchecked(&p, &s, 0.0, 0.01);
        assert_eq!(step.state.z, 0.5);
        assert_relative_eq!(step.plastic_increment, 0.003, epsilon = 1e-15);
    }

    #[test]
    fn out_of_band_state_is_rejected() {
        let p = table_params();
        let bad = State {
            t: 0.0,
            y: 0.0,
            z: 0.6,
            regime: Regime::PlasticPlus,
        };
        assert!(matches!(
            euler_step(&p, &bad, 0.0, 0.1),
            Err(Error::InvalidState { .. })
        ));
        assert!(State::new(&p, 0.0, 0.0, -0.51).is_err());
    }

    #[test]
    fn exact_flow_at_rest_stays_at_rest() {
        let p = table_params();
        let noise = NoisePath::silent(0.01, 500);
        assert_eq!(
            elastic_flow_exact(&p, 0.0, 0.0, 3.7, &noise).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn exact_flow_half_period() {
        // At t = pi / omega the free oscillation has flipped sign and decayed
        // by exp(-c0 pi / (2 omega)).
        let p = table_params();
        let t = std::f64::consts::PI / p.omega();
        let dt = t / 1000.0;
        let noise = NoisePath::silent(dt, 1000);
        let (_, z) = elastic_flow_exact(&p, 0.0, 0.05, t, &noise).unwrap();
        let expected = -0.05 * (-std::f64::consts::PI / 3f64.sqrt()).exp();
        assert_relative_eq!(z, expected, max_relative = 1e-12);
        assert_relative_eq!(z, -0.008_151_7, epsilon = 1e-7);
    }

    #[test]
    fn exact_flow_solves_the_free_oscillator() {
        // Central differences of the closed form reproduce z' = y and
        // y' = -(c0 y + k z).
        let p = OscillatorParams::new(0.7, 2.0, 10.0).unwrap();
        let h = 1e-5;
        let noise = NoisePath::silent(h, 400_000);
        let at = |t: f64| elastic_flow_exact(&p, 0.4, -0.3, t, &noise).unwrap();
        let t = 1.3;
        let (y, z) = at(t);
        let (y_p, z_p) = at(t + h);
        let (y_m, z_m) = at(t - h);
        assert_relative_eq!((z_p - z_m) / (2.0 * h), y, max_relative = 1e-6);
        assert_relative_eq!(
            (y_p - y_m) / (2.0 * h),
            -(p.c0() * y + p.k() * z),
            max_relative = 1e-6
        );
    }
}
