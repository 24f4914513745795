//! Monotone discretization of
//!
//! ```text
//! A u  = -1/2 u_yy + (c0 y + k z) u_y - y u_z      (interior)
//! B± u = -1/2 u_yy + (c0 y ± k Y) u_y              (plastic lines z = ±Y)
//! ```
//!
//! `u_yy` is centred; `u_y` is centred while the cell Peclet number
//! `|drift| hy` stays at most 1 and upwinded otherwise; `u_z` is upwinded by
//! the sign of `y`. Every row reads `diag u_p - sum w_q u_q` with `w_q >= 0`
//! and `diag >= sum w_q`, i.e. the generator of a Markov chain on the nodes.
//!
//! At `y = ±L` the far-field nodes copy the boundary-line node at the same
//! `y` (the path exits at once), and the lines themselves drop the diffusion
//! term there.

use super::banded::SparseRows;
use super::grid::{Grid, NodeKind};
use crate::sde::OscillatorParams;

/// Boundary treatment that selects the discrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// Values on both lines are data; only the interior is unknown.
    Dirichlet,
    /// Lines carry `B±`; the `+Y` line hands back to the interior at `(0, Y)`
    /// and the `-Y` line is absorbed at `(0-, -Y)`.
    NonlocalPlus,
    /// Mirror of [`Closure::NonlocalPlus`].
    NonlocalMinus,
}

/// Off-diagonal weights of the `u_y` and `u_yy` terms for drift `b`.
#[inline]
fn y_weights(b: f64, hy: f64) -> (f64, f64) {
    let diff = 0.5 / (hy * hy);
    if b.abs() * hy <= 1.0 {
        (diff + b / (2.0 * hy), diff - b / (2.0 * hy))
    } else if b > 0.0 {
        (diff + b / hy, diff)
    } else {
        (diff, diff - b / hy)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub diag: f64,
    pub len: usize,
    pub nbrs: [(usize, f64); 3],
}

impl Stencil {
    fn new() -> Self {
        Self {
            diag: 0.0,
            len: 0,
            nbrs: [(0, 0.0); 3],
        }
    }

    fn push(&mut self, node: usize, w: f64) {
        if w != 0.0 {
            self.nbrs[self.len] = (node, w);
            self.len += 1;
        }
        self.diag += w;
    }

    /// Adds the weight to the diagonal only: the neighbour is a zero terminal.
    fn push_terminal(&mut self, w: f64) {
        self.diag += w;
    }

    pub fn neighbours(&self) -> &[(usize, f64)] {
        &self.nbrs[..self.len]
    }
}

pub(crate) fn interior_stencil(g: &Grid, p: &OscillatorParams, i: usize, j: usize) -> Stencil {
    let y = g.y(i);
    let z = g.z(j);
    let (w_west, w_east) = y_weights(p.c0() * y + p.k() * z, g.hy());
    let mut s = Stencil::new();
    s.push(g.index(i - 1, j), w_west);
    s.push(g.index(i + 1, j), w_east);
    if y > 0.0 {
        s.push(g.index(i, j + 1), y / g.hz());
    } else if y < 0.0 {
        s.push(g.index(i, j - 1), -y / g.hz());
    }
    s
}

/// `B±` along a line. `handback` says whether the line's end at `y = 0`
/// continues into the junction node (true) or is a zero terminal.
pub(crate) fn line_stencil(g: &Grid, p: &OscillatorParams, i: usize, handback: bool) -> Stencil {
    let c = g.center();
    let plus = i > c;
    let j = if plus { g.top() } else { 0 };
    let y = g.y(i);
    let b = if plus {
        p.c0() * y + p.k() * p.bound()
    } else {
        p.c0() * y - p.k() * p.bound()
    };
    let mut s = Stencil::new();
    let far_end = if plus { i == g.ny() - 1 } else { i == 0 };
    if far_end {
        // u_yy = 0 closure: first-order transport back toward y = 0.
        let w = b.abs() / g.hy();
        let inner = if plus { i - 1 } else { i + 1 };
        s.push(g.index(inner, j), w);
        return s;
    }
    let (w_west, w_east) = y_weights(b, g.hy());
    let (toward_zero, away, inner) = if plus {
        (w_west, w_east, i - 1)
    } else {
        (w_east, w_west, i + 1)
    };
    let outer = if plus { i + 1 } else { i - 1 };
    s.push(g.index(outer, j), away);
    if inner == c && !handback {
        s.push_terminal(toward_zero);
    } else {
        s.push(g.index(inner, j), toward_zero);
    }
    s
}

/// The full system matrix for one closure.
pub(crate) fn assemble(g: &Grid, p: &OscillatorParams, closure: Closure) -> SparseRows {
    let mut a = SparseRows::new(g.len());
    let put = |a: &mut SparseRows, row: usize, s: &Stencil| {
        a.add(row, row, s.diag);
        for &(q, w) in s.neighbours() {
            a.add(row, q, -w);
        }
    };
    for i in 0..g.ny() {
        for j in 0..g.nz() {
            let row = g.index(i, j);
            match g.kind(i, j) {
                NodeKind::Interior => put(&mut a, row, &interior_stencil(g, p, i, j)),
                NodeKind::PlusLine => match closure {
                    Closure::Dirichlet => a.add(row, row, 1.0),
                    Closure::NonlocalPlus => put(&mut a, row, &line_stencil(g, p, i, true)),
                    Closure::NonlocalMinus => put(&mut a, row, &line_stencil(g, p, i, false)),
                },
                NodeKind::MinusLine => match closure {
                    Closure::Dirichlet => a.add(row, row, 1.0),
                    Closure::NonlocalPlus => put(&mut a, row, &line_stencil(g, p, i, false)),
                    Closure::NonlocalMinus => put(&mut a, row, &line_stencil(g, p, i, true)),
                },
                NodeKind::FarPlus => {
                    a.add(row, row, 1.0);
                    a.add(row, g.index(i, g.top()), -1.0);
                }
                NodeKind::FarMinus => {
                    a.add(row, row, 1.0);
                    a.add(row, g.index(i, 0), -1.0);
                }
            }
        }
    }
    a
}
