use std::io::{self, Write};

use super::noise::{NoisePath, NoiseStream, StreamKey};
use super::params::OscillatorParams;
use super::scheme::{step_unchecked, Regime, State};
use crate::error::{Error, Result};

/// Streaming integrator: current state, plastic deformation `Delta` and total
/// displacement `x` (rectangle rule), without storing the path.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: OscillatorParams,
    dt: f64,
    state: State,
    steps: usize,
    t0: f64,
    delta: f64,
    displacement: f64,
}

impl Simulator {
    pub fn new(params: OscillatorParams, initial: State, dt: f64) -> Result<Self> {
        check_step(&params, dt)?;
        let initial = State::new(&params, initial.t, initial.y, initial.z)?;
        Ok(Self {
            params,
            dt,
            state: initial,
            steps: 0,
            t0: initial.t,
            delta: 0.0,
            displacement: initial.z,
        })
    }

    #[inline]
    pub fn advance(&mut self, dw: f64) -> &State {
        let y_prev = self.state.y;
        let mut step = step_unchecked(&self.params, &self.state, dw, self.dt);
        self.steps += 1;
        // Multiplying avoids drift from repeated `t += dt`.
        step.state.t = self.t0 + self.steps as f64 * self.dt;
        self.delta += step.plastic_increment;
        self.displacement += y_prev * self.dt;
        self.state = step.state;
        &self.state
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &OscillatorParams {
        &self.params
    }

    /// Accumulated plastic deformation `Delta`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Total displacement `x = x(0) + sum y dt`.
    pub fn displacement(&self) -> f64 {
        self.displacement
    }
}

/// Rejects steps for which one update could sweep a tenth of the band.
pub fn check_step(params: &OscillatorParams, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if params.velocity_scale() * dt >= params.bound() / 10.0 {
        return Err(Error::StepTooLarge {
            dt,
            bound: params.bound(),
        });
    }
    Ok(())
}

/// Number of grid steps covering `[0, horizon]`, rounding up.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok((horizon / dt - 1e-9).ceil() as usize)
}

/// A materialized sample path on the uniform grid `t_n = t_0 + n dt`.
///
/// `states[0]` is the initial state, so a run of `N` steps stores `N + 1`
/// states; `delta[n]` is the plastic deformation accumulated up to `t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: OscillatorParams,
    pub dt: f64,
    pub key: Option<StreamKey>,
    pub states: Vec<State>,
    pub delta: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `x(t_n)` by the rectangle rule, starting from `z(t_0)`.
    pub fn displacement(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.states.len());
        let mut acc = self.states.first().map_or(0.0, |s| s.z);
        for n in 0..self.states.len() {
            if n > 0 {
                acc += self.states[n - 1].y * self.dt;
            }
            x.push(acc);
        }
        x
    }

    /// `sum_n y(t_n) dt` over the whole path (left-point rule).
    pub fn velocity_integral(&self) -> f64 {
        let n = self.states.len().saturating_sub(1);
        self.states[..n].iter().map(|s| s.y).sum::<f64>() * self.dt
    }

    pub fn negated(&self) -> Trajectory {
        Trajectory {
            params: self.params,
            dt: self.dt,
            key: self.key,
            states: self.states.iter().map(State::negated).collect(),
            delta: self.delta.iter().map(|d| -d).collect(),
        }
    }

    /// Writes `t,y,z,delta,regime`, keeping every `stride`-th sample.
    pub fn write_csv<W: Write>(&self, mut out: W, stride: usize) -> io::Result<()> {
        let stride = stride.max(1);
        writeln!(out, "t,y,z,delta,regime")?;
        for (s, d) in self.states.iter().zip(&self.delta).step_by(stride) {
            writeln!(out, "{},{},{},{},{}", s.t, s.y, s.z, d, s.regime.label())?;
        }
        Ok(())
    }
}

/// Drives the scheme with an explicit block of increments.
pub fn simulate_with_noise(
    params: &OscillatorParams,
    initial: State,
    noise: &NoisePath,
) -> Result<Trajectory> {
    let mut sim = Simulator::new(*params, initial, noise.dt)?;
    record(
        &mut sim,
        noise.increments.iter().copied(),
        noise.len(),
        Some(noise.key),
    )
}

/// Simulates `[0, horizon]` from `initial` with the substream `key`.
pub fn simulate_trajectory_from(
    params: &OscillatorParams,
    initial: State,
    horizon: f64,
    dt: f64,
    key: StreamKey,
) -> Result<Trajectory> {
    let n = step_count(horizon, dt)?;
    let mut sim = Simulator::new(*params, initial, dt)?;
    record(&mut sim, NoiseStream::new(key, dt), n, Some(key))
}

/// Simulates `[0, horizon]` from the rest state `(0, 0)`.
pub fn simulate_trajectory(
    params: &OscillatorParams,
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<Trajectory> {
    simulate_trajectory_from(
        params,
        State::origin(),
        horizon,
        dt,
        StreamKey::from_seed(seed),
    )
}

fn record(
    sim: &mut Simulator,
    noise: impl Iterator<Item = f64>,
    n: usize,
    key: Option<StreamKey>,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(n + 1);
    let mut delta = Vec::with_capacity(n + 1);
    states.push(*sim.state());
    delta.push(sim.delta());
    for dw in noise.take(n) {
        states.push(*sim.advance(dw));
        delta.push(sim.delta());
    }
    Ok(Trajectory {
        params: *sim.params(),
        dt: sim.dt(),
        key,
        states,
        delta,
    })
}

/// True if any stored state is plastic.
pub fn enters_plastic_regime(traj: &Trajectory) -> bool {
    traj.states.iter().any(|s| s.regime != Regime::Elastic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn silent_run_stays_at_rest() {
        let p = params();
        let noise = NoisePath::silent(1e-3, 5000);
        let traj = simulate_with_noise(&p, State::origin(), &noise).unwrap();
        assert_eq!(traj.len(), 5001);
        assert!(traj.states.iter().all(|s| s.y == 0.0 && s.z == 0.0));
        assert!(traj.delta.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn displacement_splits_into_elastic_and_plastic_parts() {
        let p = params();
        let traj = simulate_trajectory(&p, 50.0, 1e-3, 11).unwrap();
        assert!(enters_plastic_regime(&traj));
        let x = traj.displacement();
        for ((s, d), x) in traj.states.iter().zip(&traj.delta).zip(&x) {
            assert!(s.z.abs() <= p.bound());
            assert!(
                (x - (s.z + d)).abs() <= 1e-12 * (1.0 + x.abs()),
                "{x} vs {}",
                s.z + d
            );
        }
    }

    #[test]
    fn streaming_and_materialized_runs_agree() {
        let p = params();
        let key = StreamKey::new(4, 2, 9);
        let traj = simulate_trajectory_from(&p, State::origin(), 5.0, 1e-3, key).unwrap();
        let mut sim = Simulator::new(p, State::origin(), 1e-3).unwrap();
        for dw in NoiseStream::new(key, 1e-3).take(5000) {
            sim.advance(dw);
        }
        assert_eq!(sim.state(), traj.states.last().unwrap());
        assert_eq!(sim.delta(), *traj.delta.last().unwrap());
    }

    #[test]
    fn step_guard() {
        let p = params();
        assert!(matches!(
            Simulator::new(p, State::origin(), 0.05),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(Simulator::new(p, State::origin(), 1e-3).is_ok());
        assert!(Simulator::new(p, State::origin(), 0.0).is_err());
    }

    #[test]
    fn step_count_rounds_up() {
        assert_eq!(step_count(1.0, 0.1).unwrap(), 10);
        assert_eq!(step_count(1.05, 0.1).unwrap(), 11);
        assert_eq!(step_count(500.0, 1e-4).unwrap(), 5_000_000);
        assert!(step_count(0.0, 0.1).is_err());
    }

    #[test]
    fn csv_dump_is_decimated() {
        let p = params();
        let traj = simulate_trajectory(&p, 1.0, 1e-3, 1).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, 100).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,y,z,delta,regime");
        assert_eq!(lines.len(), 1 + 11);
        assert!(lines[1].starts_with("0,0,0,0,elastic"));
    }
}
