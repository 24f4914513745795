//! Monte Carlo estimators of the drift coefficient `lim Var x(t) / t`, each
//! with a 95% normal-theory confidence interval.
//!
//! Standard deviations use the population form `sqrt(m2 - m1^2)`. All sums are
//! compensated so that aggregates do not depend on how samples were batched.

use crate::cycles::{CycleRecord, Side};
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub value: f64,
    pub sample_std: f64,
    pub n: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimateWithCI {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    pub fn overlaps(&self, other: &EstimateWithCI) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

fn require(n: usize, needed: usize) -> Result<()> {
    if n < needed {
        Err(Error::InsufficientSamples { needed, got: n })
    } else {
        Ok(())
    }
}

/// Mean with `mean ± 1.96 std / sqrt(n)`.
pub fn ci_95(samples: &[f64]) -> Result<EstimateWithCI> {
    require(samples.len(), 2)?;
    let n = samples.len() as f64;
    let m1 = samples.iter().copied().collect::<CompensatedSum>().value() / n;
    let m2 = samples
        .iter()
        .map(|x| x * x)
        .collect::<CompensatedSum>()
        .value()
        / n;
    let std = (m2 - m1 * m1).max(0.0).sqrt();
    let hw = Z_95 * std / n.sqrt();
    Ok(EstimateWithCI {
        value: m1,
        sample_std: std,
        n: samples.len(),
        ci_low: m1 - hw,
        ci_high: m1 + hw,
    })
}

/// `X_MC = (1/T) mean_i (int_0^T y_i dt)^2` from the per-path integrals.
pub fn direct_variance_estimator(integrals: &[f64], horizon: f64) -> Result<EstimateWithCI> {
    require(integrals.len(), 2)?;
    let scaled: Vec<f64> = integrals.iter().map(|i| i * i / horizon).collect();
    ci_95(&scaled)
}

/// Cycle-ratio estimate `delta_MC / tau_MC` and the mean cycle duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleDrift {
    pub ratio: EstimateWithCI,
    pub tau: EstimateWithCI,
    pub delta: EstimateWithCI,
}

/// Ratio of the mean squared cycle integral to the mean cycle duration.
///
/// The interval divides the extreme numerator bounds by the opposite
/// denominator bounds; if the duration interval reaches zero the upper end is
/// infinite. `sample_std` of the ratio is the linearized (delta-method) spread.
pub fn cycle_drift_estimator(cycles: &[CycleRecord]) -> Result<CycleDrift> {
    require(cycles.len(), 2)?;
    let squares: Vec<f64> = cycles
        .iter()
        .map(|c| c.full_integral * c.full_integral)
        .collect();
    let durations: Vec<f64> = cycles.iter().map(|c| c.duration).collect();
    let delta = ci_95(&squares)?;
    let tau = ci_95(&durations)?;
    let value = delta.value / tau.value;
    let high = if tau.ci_low > 0.0 {
        delta.ci_high / tau.ci_low
    } else {
        f64::INFINITY
    };
    let low = delta.ci_low / tau.ci_high;
    let influence: Vec<f64> = squares
        .iter()
        .zip(&durations)
        .map(|(d, t)| (d - value * t) / tau.value)
        .collect();
    let spread = ci_95(&influence)?.sample_std;
    Ok(CycleDrift {
        ratio: EstimateWithCI {
            value,
            sample_std: spread,
            n: cycles.len(),
            ci_low: low,
            ci_high: high,
        },
        tau,
        delta,
    })
}

/// Components of the half-cycle formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfCycleDrift {
    pub estimate: EstimateWithCI,
    /// `E (int_0^theta y dt)^2`, aligned to a `+Y` start.
    pub second_moment: EstimateWithCI,
    /// `E int_0^theta y dt`, aligned to a `+Y` start.
    pub first_moment: EstimateWithCI,
    /// `E theta`.
    pub half_duration: EstimateWithCI,
}

/// `[E h^2 - (E h)^2] / E theta` over orientation-aligned half cycles, with an
/// interval from worst-case interval arithmetic on the three components.
pub fn half_cycle_estimator(cycles: &[CycleRecord]) -> Result<HalfCycleDrift> {
    require(cycles.len(), 2)?;
    let h: Vec<f64> = cycles
        .iter()
        .map(CycleRecord::aligned_half_integral)
        .collect();
    let h2: Vec<f64> = h.iter().map(|x| x * x).collect();
    let theta: Vec<f64> = cycles.iter().map(CycleRecord::half_duration).collect();
    let m1 = ci_95(&h)?;
    let m2 = ci_95(&h2)?;
    let d = ci_95(&theta)?;

    let value = (m2.value - m1.value * m1.value) / d.value;

    let (sq_low, sq_high) = square_interval(m1.ci_low, m1.ci_high);
    let num_low = m2.ci_low - sq_high;
    let num_high = m2.ci_high - sq_low;
    let (low, high) = divide_interval(num_low, num_high, d.ci_low, d.ci_high);

    // Linearized per-sample contribution, for reporting only.
    let influence: Vec<f64> = h
        .iter()
        .zip(&theta)
        .map(|(&x, &t)| ((x - m1.value).powi(2) - value * t) / d.value)
        .collect();
    let spread = ci_95(&influence)?.sample_std;

    Ok(HalfCycleDrift {
        estimate: EstimateWithCI {
            value,
            sample_std: spread,
            n: cycles.len(),
            ci_low: low.min(value),
            ci_high: high.max(value),
        },
        second_moment: m2,
        first_moment: m1,
        half_duration: d,
    })
}

fn square_interval(lo: f64, hi: f64) -> (f64, f64) {
    let (a, b) = (lo * lo, hi * hi);
    if lo <= 0.0 && hi >= 0.0 {
        (0.0, a.max(b))
    } else {
        (a.min(b), a.max(b))
    }
}

fn divide_interval(num_lo: f64, num_hi: f64, den_lo: f64, den_hi: f64) -> (f64, f64) {
    if den_lo <= 0.0 {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let q = [
        num_lo / den_lo,
        num_lo / den_hi,
        num_hi / den_lo,
        num_hi / den_hi,
    ];
    (
        q.iter().copied().fold(f64::INFINITY, f64::min),
        q.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Mean of `int_0^T y dt` across paths; by symmetry the interval should hold 0.
pub fn mean_zero_check(integrals: &[f64]) -> Result<EstimateWithCI> {
    ci_95(integrals)
}

/// Mean aligned half-cycle integral split by orientation: `(s = +1, s = -1)`,
/// each without alignment. Used to check `v+(0,Y;y) = -v-(0,-Y;y)`.
pub fn half_integrals_by_orientation(
    cycles: &[CycleRecord],
) -> Result<(EstimateWithCI, EstimateWithCI)> {
    let split = |side: Side| -> Vec<f64> {
        cycles
            .iter()
            .filter(|c| c.s == side)
            .map(|c| c.half_integral)
            .collect()
    };
    Ok((ci_95(&split(Side::Plus))?, ci_95(&split(Side::Minus))?))
}

/// Both Monte Carlo routes plus the half-cycle form, for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriftReport {
    pub lhs: Option<EstimateWithCI>,
    pub rhs: Option<EstimateWithCI>,
    pub simplified: Option<EstimateWithCI>,
    pub tau_mean: Option<EstimateWithCI>,
}

impl DriftReport {
    /// `100 |lhs - rhs| / rhs`, when both sides exist.
    pub fn relative_error_pct(&self) -> Option<f64> {
        match (self.lhs, self.rhs) {
            (Some(l), Some(r)) => Some(100.0 * (l.value - r.value).abs() / r.value.abs()),
            _ => None,
        }
    }
}
