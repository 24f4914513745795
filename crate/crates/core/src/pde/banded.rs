//! Sparse assembly rows and an unpivoted banded LU.
//!
//! The discrete operators are M-matrices (non-positive off-diagonals, weakly
//! diagonally dominant, nonsingular), for which elimination without pivoting
//! is stable.

use crate::error::{Error, Result};

/// Row-wise sparse matrix used for assembly and residual evaluation.
#[derive(Debug, Clone)]
pub struct SparseRows {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    pub fn new(n: usize) -> Self {
        Self {
            rows: vec![Vec::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        if value == 0.0 {
            return;
        }
        let r = &mut self.rows[row];
        if let Some(entry) = r.iter_mut().find(|(c, _)| *c == col) {
            entry.1 += value;
        } else {
            r.push((col, value));
        }
    }

    pub fn row(&self, row: usize) -> &[(usize, f64)] {
        &self.rows[row]
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(c, a)| a * x[c]).sum())
            .collect()
    }

    /// `(lower, upper)` bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, _) in r {
                if c < i {
                    lower = lower.max(i - c);
                } else {
                    upper = upper.max(c - i);
                }
            }
        }
        (lower, upper)
    }

    fn norm_inf(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(_, a)| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// LU factors stored in band form.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedLu {
    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.lower - r)
    }

    pub fn factor(a: &SparseRows) -> Result<Self> {
        let n = a.dim();
        let (lower, upper) = a.bandwidths();
        let width = lower + upper + 1;
        let mut lu = Self {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
        };
        for r in 0..n {
            for &(c, v) in a.row(r) {
                let k = lu.at(r, c);
                lu.data[k] += v;
            }
        }
        for k in 0..n {
            let pivot = lu.data[lu.at(k, k)];
            if !(pivot.abs() > 1e-300) {
                return Err(Error::SolverDiverged(format!("zero pivot at row {k}")));
            }
            let last_row = (k + lower).min(n - 1);
            let last_col = (k + upper).min(n - 1);
            let pivot_row = lu.at(k, k);
            for r in k + 1..=last_row {
                let rk = lu.at(r, k);
                if lu.data[rk] == 0.0 {
                    continue;
                }
                let l = lu.data[rk] / pivot;
                lu.data[rk] = l;
                let base = lu.at(r, k);
                for off in 1..=(last_col - k) {
                    let u = lu.data[pivot_row + off];
                    if u != 0.0 {
                        lu.data[base + off] -= l * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for r in 0..n {
            let first = r.saturating_sub(self.lower);
            let mut acc = b[r];
            for c in first..r {
                acc -= self.data[self.at(r, c)] * b[c];
            }
            b[r] = acc;
        }
        for r in (0..n).rev() {
            let last = (r + self.upper).min(n - 1);
            let mut acc = b[r];
            for c in r + 1..=last {
                acc -= self.data[self.at(r, c)] * b[c];
            }
            b[r] = acc / self.data[self.at(r, r)];
        }
    }
}

/// A factored system that solves with residual-checked iterative refinement.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    matrix: SparseRows,
    lu: BandedLu,
    norm: f64,
}

/// Relative residual required of every solve.
pub const RESIDUAL_TOL: f64 = 1e-8;

impl LinearSystem {
    pub fn new(matrix: SparseRows) -> Result<Self> {
        let lu = BandedLu::factor(&matrix)?;
        let norm = matrix.norm_inf();
        Ok(Self { matrix, lu, norm })
    }

    pub fn matrix(&self) -> &SparseRows {
        &self.matrix
    }

    /// Relative residual `|b - A x| / (|A| |x| + |b|)` in the max norm.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.matrix.mul(x);
        let r = ax
            .iter()
            .zip(b)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = self.norm * max_abs(x) + max_abs(b);
        if scale == 0.0 {
            0.0
        } else {
            r / scale
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.lu.solve_in_place(&mut x);
        for _ in 0..3 {
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::SolverDiverged("non-finite solution".into()));
            }
            let res = self.relative_residual(&x, b);
            if res <= 1e-13 {
                break;
            }
            let ax = self.matrix.mul(&x);
            let mut d: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            self.lu.solve_in_place(&mut d);
            for (x, d) in x.iter_mut().zip(&d) {
                *x += d;
            }
        }
        let res = self.relative_residual(&x, b);
        if !(res <= RESIDUAL_TOL) {
            return Err(Error::SolverDiverged(format!("relative residual {res:e}")));
        }
        Ok(x)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Thomas algorithm for `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::SolverDiverged(
            "zero pivot in tridiagonal solve".into(),
        ));
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::SolverDiverged(
                "zero pivot in tridiagonal solve".into(),
            ));
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}
