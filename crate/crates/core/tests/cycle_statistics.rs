use epp_core::cycles::{run_path, sample_cycle, CycleStart};
use epp_core::estimators::{cycle_drift_estimator, mean_zero_check};
use epp_core::sde::StreamKey;
use epp_core::OscillatorParams;

fn params() -> OscillatorParams {
    OscillatorParams::new(1.0, 1.0, 0.5).unwrap()
}

fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Outbound and return halves of a cycle start from mirror-image rest
/// states, so their durations share one law.
#[test]
fn half_cycle_durations_pass_two_sample_ks() {
    let p = params();
    let cycles: Vec<_> = (0..600)
        .map(|n| sample_cycle(&p, 1e-3, StreamKey::new(11, 0, n), CycleStart::BurnIn, 1e4).unwrap())
        .collect();
    let first: Vec<f64> = cycles
        .iter()
        .step_by(2)
        .map(|c| c.half_duration())
        .collect();
    let second: Vec<f64> = cycles
        .iter()
        .skip(1)
        .step_by(2)
        .map(|c| c.duration - c.half_duration())
        .collect();
    let d = ks_statistic(&first, &second);
    let (n, m) = (first.len() as f64, second.len() as f64);
    let critical = 1.628 * ((n + m) / (n * m)).sqrt();
    assert!(d < critical, "D = {d}, critical {critical}");
}

#[test]
fn cycle_integrals_close_against_plastic_increments() {
    let p = params();
    let dt = 1e-3;
    let traj = epp_core::sde::simulate_trajectory(&p, 300.0, dt, 5).unwrap();
    let events = epp_core::cycles::detect_boundary_rest_events(&traj);
    let cycles = epp_core::cycles::extract_cycles(&events, &traj);
    assert!(cycles.len() > 5);
    let max_y = traj.states.iter().map(|s| s.y.abs()).fold(0.0, f64::max);
    let step = |t: f64| (t / dt).round() as usize;
    for c in &cycles {
        let dd = traj.delta[step(c.t_end)] - traj.delta[step(c.t_start)];
        assert!((c.full_integral - dd).abs() <= 10.0 * dt * max_y);
    }
}

#[test]
fn velocity_integrals_have_zero_mean() {
    let p = params();
    let integrals: Vec<f64> = (0..200)
        .map(|n| {
            run_path(&p, 50.0, 1e-3, StreamKey::new(3, 0, n), false)
                .unwrap()
                .velocity_integral
        })
        .collect();
    assert!(mean_zero_check(&integrals).unwrap().contains(0.0));
}

#[test]
fn consecutive_half_cycle_integrals_are_uncorrelated() {
    let p = params();
    let pairs: Vec<(f64, f64)> = (0..800)
        .map(|n| {
            let c =
                sample_cycle(&p, 1e-3, StreamKey::new(13, 0, n), CycleStart::Exact, 1e4).unwrap();
            let s = c.s.sign();
            (s * c.half_integral, s * (c.full_integral - c.half_integral))
        })
        .collect();
    let n = pairs.len() as f64;
    let (ma, mb) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let cov: f64 = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / n;
    let va: f64 = pairs.iter().map(|p| (p.0 - ma).powi(2)).sum::<f64>() / n;
    let vb: f64 = pairs.iter().map(|p| (p.1 - mb).powi(2)).sum::<f64>() / n;
    let r = cov / (va * vb).sqrt();
    assert!(r.abs() < 2.58 / n.sqrt(), "r = {r}");
}

#[test]
fn estimators_are_invariant_under_global_sign_flip() {
    let p = params();
    let cycles: Vec<_> = (0..100)
        .map(|n| sample_cycle(&p, 1e-3, StreamKey::new(17, 0, n), CycleStart::Exact, 1e4).unwrap())
        .collect();
    let flipped: Vec<_> = cycles
        .iter()
        .map(|c| {
            let mut f = *c;
            f.s = f.s.opposite();
            f.half_integral = -f.half_integral;
            f.full_integral = -f.full_integral;
            f
        })
        .collect();
    let a = cycle_drift_estimator(&cycles).unwrap();
    let b = cycle_drift_estimator(&flipped).unwrap();
    assert_eq!(a.ratio.value, b.ratio.value);
}
