//! Simulation of the constrained velocity / elastic-component dynamics.

mod noise;
mod params;
mod scheme;
mod trajectory;

pub use noise::{gaussian_increments, NoisePath, NoiseStream, StreamKey};
pub use params::{validate_params, OscillatorParams};
pub use scheme::{elastic_flow_exact, euler_step, Regime, State};
pub use trajectory::{
    check_step, enters_plastic_regime, simulate_trajectory, simulate_trajectory_from,
    simulate_with_noise, step_count, Simulator, Trajectory,
};
