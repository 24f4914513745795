//! Expected additive functional over one plastic phase.
//!
//! On `z = Y` with `y > 0` the velocity follows
//! `dy = -(c0 y + kY) dt + dw` until it returns to zero, and
//! `phi+(y; f) = E int f(y(t), Y) dt` over that excursion solves
//!
//! ```text
//! -1/2 phi'' + (c0 y + kY) phi' = f(y, Y),   y > 0,   phi(0) = 0,
//! ```
//!
//! with at most linear growth. Its bounded-derivative solution is
//!
//! ```text
//! phi+(y) = 2 int_0^inf exp(-(c0 xi^2 + 2kY xi))
//!             int_xi^{xi+y} f(zeta, Y) exp(-2 c0 xi (zeta - xi)) dzeta dxi.
//! ```
//!
//! The `-Y` line is the mirror image: `phi-(y; f) = phi+(-y; f~)` with
//! `f~(u) = f(-u, -Y)`.

use super::banded::solve_tridiagonal;
use super::grid::Grid;
use super::operator::line_stencil;
use crate::cycles::Side;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::sde::OscillatorParams;

/// Quadrature tolerance for the outer integral.
pub const PHI_REL_TOL: f64 = 1e-8;

fn phi_plus_quadrature<F: Fn(f64) -> f64>(c0: f64, ky: f64, f: &F, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(0.0);
    }
    let inner_tol = Tolerance {
        abs: 1e-16,
        rel: 1e-11,
        max_intervals: 500,
    };
    let outer_tol = Tolerance {
        abs: 1e-15,
        rel: PHI_REL_TOL * 0.1,
        max_intervals: 2000,
    };
    let failure = std::cell::Cell::new(None);
    let outer = integrate_to_infinity(
        |xi| {
            let weight = (-(c0 * xi * xi + 2.0 * ky * xi)).exp();
            if weight == 0.0 {
                return 0.0;
            }
            let inner = integrate(
                |zeta| f(zeta) * (-2.0 * c0 * xi * (zeta - xi)).exp(),
                xi,
                xi + y,
                inner_tol,
            );
            match inner {
                Ok(r) => weight * r.value,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        0.0,
        outer_tol,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(2.0 * outer.value)
}

/// `phi±(y; f)` by nested adaptive quadrature. `f` is the source along the
/// line, a function of `y` only. `y` must lie on the line's half-axis
/// (`y >= 0` for `Plus`, `y <= 0` for `Minus`).
pub fn phi_quadrature<F: Fn(f64) -> f64>(
    params: &OscillatorParams,
    side: Side,
    f: F,
    y: f64,
) -> Result<f64> {
    let ky = params.k() * params.bound();
    match side {
        Side::Plus => {
            if y < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "phi+ needs y >= 0, got {y}"
                )));
            }
            phi_plus_quadrature(params.c0(), ky, &f, y)
        }
        Side::Minus => {
            if y > 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "phi- needs y <= 0, got {y}"
                )));
            }
            phi_plus_quadrature(params.c0(), ky, &|u: f64| f(-u), -y)
        }
    }
}

/// Finite-difference reference for `phi+`: centred differences on
/// `[0, y_max]` with `n` intervals and the asymptotic slope
/// `phi'(y_max) = f(y_max) / (c0 y_max + kY)`. Returns `(y_m, phi_m)`.
pub fn phi_plus_ode_reference<F: Fn(f64) -> f64>(
    params: &OscillatorParams,
    f: F,
    y_max: f64,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 || !(y_max > 0.0) {
        return Err(Error::InvalidArgument(
            "reference grid needs n >= 2 and y_max > 0".into(),
        ));
    }
    let h = y_max / n as f64;
    let ky = params.k() * params.bound();
    let drift = |y: f64| params.c0() * y + ky;
    let slope = f(y_max) / drift(y_max);
    // unknowns phi_1 ..= phi_n
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let d2 = 0.5 / (h * h);
    for m in 1..n {
        let y = m as f64 * h;
        let b = drift(y);
        let r = m - 1;
        sub[r] = -d2 - b / (2.0 * h);
        diag[r] = 2.0 * d2;
        sup[r] = -d2 + b / (2.0 * h);
        rhs[r] = f(y);
    }
    // ghost node phi_{n+1} = phi_{n-1} + 2 h slope
    let r = n - 1;
    sub[r] = -2.0 * d2;
    diag[r] = 2.0 * d2;
    sup[r] = 0.0;
    rhs[r] = f(y_max) - drift(y_max) * slope + slope / h;
    sub[0] = 0.0;
    let sol = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    let ys = (0..=n).map(|m| m as f64 * h).collect();
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(sol);
    Ok((ys, values))
}

/// `phi±` from the grid's own line operator with a zero terminal at `y = 0`.
/// The result has one entry per grid column; entries off the half-line are 0.
pub fn phi_on_grid(
    grid: &Grid,
    params: &OscillatorParams,
    side: Side,
    source: &[f64],
) -> Result<Vec<f64>> {
    let c = grid.center();
    let (columns, j): (Vec<usize>, usize) = match side {
        Side::Plus => ((c + 1..grid.ny()).collect(), grid.top()),
        Side::Minus => ((0..c).collect(), 0),
    };
    let n = columns.len();
    let first = columns[0];
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for (m, &i) in columns.iter().enumerate() {
        let s = line_stencil(grid, params, i, false);
        diag[m] = s.diag;
        rhs[m] = source[grid.index(i, j)];
        for &(q, w) in s.neighbours() {
            let col = q / grid.nz() - first;
            if col + 1 == m {
                sub[m] = -w;
            } else if col == m + 1 {
                sup[m] = -w;
            } else {
                unreachable!("line stencil leaves its line");
            }
        }
    }
    let sol = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    let mut out = vec![0.0; grid.ny()];
    for (m, &i) in columns.iter().enumerate() {
        out[i] = sol[m];
    }
    Ok(out)
}
