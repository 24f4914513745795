//! Long-cycle decomposition.
//!
//! A boundary rest event is the end of a plastic phase: the velocity returns
//! to zero while `z` is pinned at `±Y`. The first event fixes the orientation
//! `s`; a long cycle runs from an `s`-side event, through the first later
//! event on the `-s` side, to the first `s`-side event after that.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::sde::{
    check_step, NoiseStream, OscillatorParams, Regime, Simulator, State, StreamKey, Trajectory,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    pub fn of_regime(regime: Regime) -> Option<Side> {
        match regime {
            Regime::PlasticPlus => Some(Side::Plus),
            Regime::PlasticMinus => Some(Side::Minus),
            Regime::Elastic => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRestEvent {
    pub t: f64,
    pub side: Side,
    pub index: usize,
}

/// Online detector of boundary rest events.
///
/// An event fires at the first pinned step whose velocity no longer points
/// outward (`y <= 0` at `+Y`, `y >= 0` at `-Y`). After firing, the same side
/// stays silent until the path has visited the interior.
#[derive(Debug, Clone)]
pub struct EventDetector {
    armed_plus: bool,
    armed_minus: bool,
}

impl Default for EventDetector {
    fn default() -> Self {
        Self::new()
    }
}

impl EventDetector {
    pub fn new() -> Self {
        Self {
            armed_plus: true,
            armed_minus: true,
        }
    }

    #[inline]
    pub fn observe(&mut self, index: usize, state: &State) -> Option<BoundaryRestEvent> {
        match state.regime {
            Regime::Elastic => {
                self.armed_plus = true;
                self.armed_minus = true;
                None
            }
            Regime::PlasticPlus if self.armed_plus && state.y <= 0.0 => {
                self.armed_plus = false;
                Some(BoundaryRestEvent {
                    t: state.t,
                    side: Side::Plus,
                    index,
                })
            }
            Regime::PlasticMinus if self.armed_minus && state.y >= 0.0 => {
                self.armed_minus = false;
                Some(BoundaryRestEvent {
                    t: state.t,
                    side: Side::Minus,
                    index,
                })
            }
            _ => None,
        }
    }
}

pub fn detect_boundary_rest_events(traj: &Trajectory) -> Vec<BoundaryRestEvent> {
    let mut detector = EventDetector::new();
    traj.states
        .iter()
        .enumerate()
        .filter_map(|(n, s)| detector.observe(n, s))
        .collect()
}

/// One long cycle `[tau_n, tau_{n+1})` with its midpoint `theta_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub s: Side,
    pub t_start: f64,
    pub t_mid: f64,
    pub t_end: f64,
    pub duration: f64,
    /// `int y dt` over `[tau_n, theta_{n+1})`.
    pub half_integral: f64,
    /// `int y dt` over `[tau_n, tau_{n+1})`.
    pub full_integral: f64,
}

impl CycleRecord {
    pub fn half_duration(&self) -> f64 {
        self.t_mid - self.t_start
    }

    /// Half-cycle integral seen from a `+Y` start.
    pub fn aligned_half_integral(&self) -> f64 {
        self.s.sign() * self.half_integral
    }
}

#[derive(Debug, Clone, Copy)]
struct Mark {
    t: f64,
    integral: f64,
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    Unstarted,
    Outbound { side: Side, start: Mark },
    Returning { side: Side, start: Mark, mid: Mark },
}

/// Assembles cycles from a time-ordered event stream. `integral` is the
/// running `sum y dt` at the event's grid index.
#[derive(Debug, Clone)]
pub struct CycleBuilder {
    phase: Phase,
}

impl Default for CycleBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl CycleBuilder {
    pub fn new() -> Self {
        Self {
            phase: Phase::Unstarted,
        }
    }

    /// Orientation fixed by the first event, once seen.
    pub fn orientation(&self) -> Option<Side> {
        match self.phase {
            Phase::Unstarted => None,
            Phase::Outbound { side, .. } | Phase::Returning { side, .. } => Some(side),
        }
    }

    pub fn push(&mut self, event: &BoundaryRestEvent, integral: f64) -> Option<CycleRecord> {
        let mark = Mark {
            t: event.t,
            integral,
        };
        match self.phase {
            Phase::Unstarted => {
                self.phase = Phase::Outbound {
                    side: event.side,
                    start: mark,
                };
                None
            }
            Phase::Outbound { side, start } => {
                if event.side != side {
                    self.phase = Phase::Returning {
                        side,
                        start,
                        mid: mark,
                    };
                }
                None
            }
            Phase::Returning { side, start, mid } => {
                if event.side != side {
                    return None;
                }
                self.phase = Phase::Outbound { side, start: mark };
                Some(CycleRecord {
                    s: side,
                    t_start: start.t,
                    t_mid: mid.t,
                    t_end: mark.t,
                    duration: mark.t - start.t,
                    half_integral: mid.integral - start.integral,
                    full_integral: mark.integral - start.integral,
                })
            }
        }
    }
}

/// Cycles of a stored path. The transient before the first event and an
/// unfinished final cycle are dropped.
pub fn extract_cycles(events: &[BoundaryRestEvent], traj: &Trajectory) -> Vec<CycleRecord> {
    let x = traj.displacement();
    let mut builder = CycleBuilder::new();
    events
        .iter()
        .filter_map(|e| builder.push(e, x[e.index]))
        .collect()
}

/// Recomputes `Delta(t_n)` from the stored states: on each step that ends
/// pinned, the part of `z + y dt` cut off by the bound.
pub fn accumulate_plastic(traj: &Trajectory) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.states.len());
    let mut delta = 0.0;
    for (n, s) in traj.states.iter().enumerate() {
        if n > 0 && s.regime.is_plastic() {
            let prev = &traj.states[n - 1];
            delta += prev.z + prev.y * traj.dt - s.z;
        }
        out.push(delta);
    }
    out
}

pub fn write_cycles_csv<W: Write>(cycles: &[CycleRecord], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "s,t_start,t_mid,t_end,duration,half_integral,full_integral"
    )?;
    for c in cycles {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.s.sign() as i32,
            c.t_start,
            c.t_mid,
            c.t_end,
            c.duration,
            c.half_integral,
            c.full_integral
        )?;
    }
    Ok(())
}

/// How a single-cycle sample is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleStart {
    /// From `(0, 0)`; the cycle begins at the first boundary rest event.
    BurnIn,
    /// Directly at `(0, ±Y)`. Even trajectory indices start at `+Y`, odd at `-Y`.
    Exact,
}

/// Streaming combination of the simulator, detector and builder.
#[derive(Debug, Clone)]
pub struct CycleTracker {
    detector: EventDetector,
    builder: CycleBuilder,
}

impl Default for CycleTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl CycleTracker {
    pub fn new() -> Self {
        Self {
            detector: EventDetector::new(),
            builder: CycleBuilder::new(),
        }
    }

    #[inline]
    pub fn observe(&mut self, sim: &Simulator) -> Option<CycleRecord> {
        let event = self.detector.observe(sim.steps(), sim.state())?;
        self.builder.push(&event, sim.displacement())
    }
}

/// Per-path output of a streamed run.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSummary {
    /// `sum_n y(t_n) dt` over the horizon.
    pub velocity_integral: f64,
    /// Every complete long cycle inside the horizon.
    pub cycles: Vec<CycleRecord>,
}

/// Runs `[0, horizon]` from `(0, 0)` without storing the path.
pub fn run_path(
    params: &OscillatorParams,
    horizon: f64,
    dt: f64,
    key: StreamKey,
    keep_cycles: bool,
) -> Result<PathSummary> {
    let n = crate::sde::step_count(horizon, dt)?;
    let mut sim = Simulator::new(*params, State::origin(), dt)?;
    let mut tracker = CycleTracker::new();
    let mut cycles = Vec::new();
    let mut noise = NoiseStream::new(key, dt);
    for _ in 0..n {
        sim.advance(noise.next_increment());
        if keep_cycles {
            if let Some(c) = tracker.observe(&sim) {
                cycles.push(c);
            }
        }
    }
    Ok(PathSummary {
        velocity_integral: sim.displacement(),
        cycles,
    })
}

/// Simulates until one complete long cycle is recorded.
pub fn sample_cycle(
    params: &OscillatorParams,
    dt: f64,
    key: StreamKey,
    start: CycleStart,
    time_limit: f64,
) -> Result<CycleRecord> {
    check_step(params, dt)?;
    let initial = match start {
        CycleStart::BurnIn => State::origin(),
        CycleStart::Exact => {
            let side = if key.trajectory.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            State::boundary_rest(params, side)
        }
    };
    let mut sim = Simulator::new(*params, initial, dt)?;
    let mut tracker = CycleTracker::new();
    if let Some(c) = tracker.observe(&sim) {
        return Ok(c);
    }
    let max_steps = (time_limit / dt).ceil() as usize;
    let mut noise = NoiseStream::new(key, dt);
    for _ in 0..max_steps {
        sim.advance(noise.next_increment());
        if let Some(c) = tracker.observe(&sim) {
            return Ok(c);
        }
    }
    Err(Error::CycleTimeout { limit: time_limit })
}
