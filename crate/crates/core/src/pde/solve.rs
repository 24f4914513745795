//! Dirichlet building blocks, their assembly into `v±`, the monolithic
//! nonlocal solve used to cross-check it, and the drift coefficient.

use std::cell::OnceCell;
use std::io::{self, Write};

use super::banded::LinearSystem;
use super::grid::{FieldTag, Grid, GridField, NodeKind};
use super::operator::{assemble, Closure};
use super::phi::phi_on_grid;
use crate::cycles::Side;
use crate::error::{Error, Result};
use crate::sde::OscillatorParams;

/// Smallest admissible `pi∓` at the junction used as a denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-10;

/// Factored operators for one parameter set and grid.
pub struct PdeProblem {
    params: OscillatorParams,
    grid: Grid,
    dirichlet: LinearSystem,
    nonlocal_plus: OnceCell<LinearSystem>,
    nonlocal_minus: OnceCell<LinearSystem>,
}

/// The pieces of one `v±` assembly.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub eta: GridField,
    pub psi_plus: GridField,
    pub psi_minus: GridField,
    pub v_plus: GridField,
    pub v_minus: GridField,
    /// Multiplier of `pi+` in `v+`.
    pub c_plus: f64,
    /// Multiplier of `pi-` in `v-`.
    pub c_minus: f64,
}

impl Decomposition {
    /// `v+(0, Y; f)`.
    pub fn v_plus_corner(&self) -> f64 {
        self.v_plus.at_plus_corner()
    }

    /// `v-(0, -Y; f)`.
    pub fn v_minus_corner(&self) -> f64 {
        self.v_minus.at_minus_corner()
    }
}

impl PdeProblem {
    pub fn new(params: &OscillatorParams, grid: &Grid) -> Result<Self> {
        let dirichlet = LinearSystem::new(assemble(grid, params, Closure::Dirichlet))?;
        Ok(Self {
            params: *params,
            grid: grid.clone(),
            dirichlet,
            nonlocal_plus: OnceCell::new(),
            nonlocal_minus: OnceCell::new(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &OscillatorParams {
        &self.params
    }

    /// Samples `f(y, z)` at every node.
    pub fn source<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        let g = &self.grid;
        let mut out = vec![0.0; g.len()];
        for i in 0..g.ny() {
            for j in 0..g.nz() {
                out[g.index(i, j)] = f(g.y(i), g.z(j));
            }
        }
        out
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.grid.len() {
            return Err(Error::InvalidArgument(format!(
                "source has {} entries, grid has {}",
                v.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    fn field(&self, tag: FieldTag, values: Vec<f64>, plus: f64, minus: f64) -> GridField {
        GridField {
            grid: self.grid.clone(),
            tag,
            values,
            plus_line_limit: plus,
            minus_line_limit: minus,
        }
    }

    /// Right-hand side of the Dirichlet system: `interior` on interior
    /// nodes, `plus`/`minus` (indexed by column) on the lines.
    fn dirichlet_solve(
        &self,
        interior: Option<&[f64]>,
        plus: &dyn Fn(usize) -> f64,
        minus: &dyn Fn(usize) -> f64,
    ) -> Result<Vec<f64>> {
        let g = &self.grid;
        let mut rhs = vec![0.0; g.len()];
        for i in 0..g.ny() {
            for j in 0..g.nz() {
                let n = g.index(i, j);
                rhs[n] = match g.kind(i, j) {
                    NodeKind::Interior => interior.map_or(0.0, |f| f[n]),
                    NodeKind::PlusLine => plus(i),
                    NodeKind::MinusLine => minus(i),
                    NodeKind::FarPlus | NodeKind::FarMinus => 0.0,
                };
            }
        }
        self.dirichlet.solve(&rhs)
    }

    /// `pi+` (hit `D+` before `D-`) and `pi- = 1 - pi+`.
    pub fn solve_pi(&self) -> Result<(GridField, GridField)> {
        let plus = self.dirichlet_solve(None, &|_| 1.0, &|_| 0.0)?;
        let minus = plus.iter().map(|p| 1.0 - p).collect();
        Ok((
            self.field(FieldTag::PiPlus, plus, 1.0, 0.0),
            self.field(FieldTag::PiMinus, minus, 0.0, 1.0),
        ))
    }

    /// `A eta = f` with zero data on both lines.
    pub fn solve_eta(&self, source: &[f64]) -> Result<GridField> {
        self.check_len(source)?;
        let v = self.dirichlet_solve(Some(source), &|_| 0.0, &|_| 0.0)?;
        Ok(self.field(FieldTag::Eta, v, 0.0, 0.0))
    }

    /// `phi±` on the grid's line for the line values of `source`.
    pub fn phi_line(&self, side: Side, source: &[f64]) -> Result<Vec<f64>> {
        self.check_len(source)?;
        phi_on_grid(&self.grid, &self.params, side, source)
    }

    /// `A psi = 0` with `phi` (indexed by column) on the `side` line and zero
    /// on the other.
    pub fn solve_psi(&self, side: Side, phi: &[f64]) -> Result<GridField> {
        if phi.len() != self.grid.ny() {
            return Err(Error::InvalidArgument(
                "phi needs one value per column".into(),
            ));
        }
        let data = |i: usize| phi[i];
        let zero = |_: usize| 0.0;
        let (v, tag) = match side {
            Side::Plus => (self.dirichlet_solve(None, &data, &zero)?, FieldTag::PsiPlus),
            Side::Minus => (
                self.dirichlet_solve(None, &zero, &data)?,
                FieldTag::PsiMinus,
            ),
        };
        Ok(self.field(tag, v, 0.0, 0.0))
    }

    /// Full decomposition of `v±` for the source `f`.
    pub fn solve_v(&self, source: &[f64]) -> Result<Decomposition> {
        self.check_len(source)?;
        let (pi_plus, pi_minus) = self.solve_pi()?;
        self.solve_v_with_pi(source, &pi_plus, &pi_minus)
    }

    fn solve_v_with_pi(
        &self,
        source: &[f64],
        pi_plus: &GridField,
        pi_minus: &GridField,
    ) -> Result<Decomposition> {
        let eta = self.solve_eta(source)?;
        let psi_plus = self.solve_psi(Side::Plus, &self.phi_line(Side::Plus, source)?)?;
        let psi_minus = self.solve_psi(Side::Minus, &self.phi_line(Side::Minus, source)?)?;
        assemble_v(pi_plus, pi_minus, eta, psi_plus, psi_minus)
    }

    fn nonlocal_system(&self, side: Side) -> Result<&LinearSystem> {
        let (cell, closure) = match side {
            Side::Plus => (&self.nonlocal_plus, Closure::NonlocalPlus),
            Side::Minus => (&self.nonlocal_minus, Closure::NonlocalMinus),
        };
        if let Some(s) = cell.get() {
            return Ok(s);
        }
        let s = LinearSystem::new(assemble(&self.grid, &self.params, closure))?;
        Ok(cell.get_or_init(|| s))
    }

    fn nonlocal_rhs(&self, source: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let mut rhs = source.to_vec();
        for i in [0, g.ny() - 1] {
            for j in 0..g.nz() {
                if matches!(g.kind(i, j), NodeKind::FarPlus | NodeKind::FarMinus) {
                    rhs[g.index(i, j)] = 0.0;
                }
            }
        }
        rhs
    }

    /// `v+` (or `v-`) in one solve with the nonlocal line closures.
    pub fn solve_nonlocal(&self, side: Side, source: &[f64]) -> Result<GridField> {
        self.check_len(source)?;
        let v = self
            .nonlocal_system(side)?
            .solve(&self.nonlocal_rhs(source))?;
        let g = &self.grid;
        Ok(match side {
            Side::Plus => {
                let lim = v[g.plus_junction()];
                self.field(FieldTag::VPlus, v, lim, 0.0)
            }
            Side::Minus => {
                let lim = v[g.minus_junction()];
                self.field(FieldTag::VMinus, v, 0.0, lim)
            }
        })
    }

    /// Relative residual of `field` in the nonlocal problem of `side`.
    pub fn nonlocal_residual(&self, side: Side, field: &GridField, source: &[f64]) -> Result<f64> {
        self.check_len(source)?;
        let s = self.nonlocal_system(side)?;
        Ok(s.relative_residual(&field.values, &self.nonlocal_rhs(source)))
    }

    /// Second moment of `int_0^theta y dt` from `v+(.; y)`.
    pub fn solve_second_moment(&self, v_plus_y: &GridField) -> Result<GridField> {
        if v_plus_y.grid != self.grid {
            return Err(Error::InvalidArgument(
                "first-moment field is on another grid".into(),
            ));
        }
        let g = &self.grid;
        let source: Vec<f64> = (0..g.len())
            .map(|n| 2.0 * g.y(n / g.nz()) * v_plus_y.values[n])
            .collect();
        let mut m2 = self.solve_v(&source)?.v_plus;
        m2.tag = FieldTag::SecondMoment;
        Ok(m2)
    }

    /// Drift coefficient and the quantities it is built from.
    pub fn drift(&self) -> Result<PdeSummary> {
        let (pi_plus, pi_minus) = self.solve_pi()?;
        let one = self.source(|_, _| 1.0);
        let vel = self.source(|y, _| y);
        let v1 = self.solve_v_with_pi(&one, &pi_plus, &pi_minus)?;
        let vy = self.solve_v_with_pi(&vel, &pi_plus, &pi_minus)?;
        let m2 = self.solve_second_moment(&vy.v_plus)?;
        let v_plus_one = v1.v_plus_corner();
        let v_plus_y = vy.v_plus_corner();
        let m2_corner = m2.at_plus_corner();
        let g = &self.grid;
        Ok(PdeSummary {
            e_tau1: v_plus_one + v1.v_minus_corner(),
            v_plus_one,
            v_minus_one: v1.v_minus_corner(),
            v_plus_y,
            v_minus_y: vy.v_minus_corner(),
            m2: m2_corner,
            sigma2: (m2_corner - v_plus_y * v_plus_y) / v_plus_one,
            half_width: g.half_width(),
            ny: g.ny(),
            nz: g.nz(),
        })
    }
}

/// Combines the Dirichlet pieces into `v±`.
///
/// With `w = eta + psi+ + psi-`:
/// `v+ = w + w(0-, Y) / pi-(0-, Y) * pi+` and
/// `v- = w + w(0+, -Y) / pi+(0+, -Y) * pi-`.
pub fn assemble_v(
    pi_plus: &GridField,
    pi_minus: &GridField,
    eta: GridField,
    psi_plus: GridField,
    psi_minus: GridField,
) -> Result<Decomposition> {
    let g = &eta.grid;
    let same = [
        &pi_plus.grid,
        &pi_minus.grid,
        &psi_plus.grid,
        &psi_minus.grid,
    ]
    .iter()
    .all(|o| *o == g);
    if !same {
        return Err(Error::InvalidArgument(
            "fields live on different grids".into(),
        ));
    }
    let w: Vec<f64> = (0..g.len())
        .map(|n| eta.values[n] + psi_plus.values[n] + psi_minus.values[n])
        .collect();
    let (pj, mj) = (g.plus_junction(), g.minus_junction());
    let den_plus = pi_minus.values[pj];
    if !(den_plus >= DENOMINATOR_FLOOR) {
        return Err(Error::DegenerateDenominator {
            corner: "pi-(0-, Y)",
            value: den_plus,
            floor: DENOMINATOR_FLOOR,
        });
    }
    let den_minus = pi_plus.values[mj];
    if !(den_minus >= DENOMINATOR_FLOOR) {
        return Err(Error::DegenerateDenominator {
            corner: "pi+(0+, -Y)",
            value: den_minus,
            floor: DENOMINATOR_FLOOR,
        });
    }
    let c_plus = w[pj] / den_plus;
    let c_minus = w[mj] / den_minus;
    let combine = |pi: &GridField, c: f64| -> Vec<f64> {
        w.iter().zip(&pi.values).map(|(a, b)| a + c * b).collect()
    };
    let v_plus = GridField {
        grid: g.clone(),
        tag: FieldTag::VPlus,
        values: combine(pi_plus, c_plus),
        plus_line_limit: c_plus,
        minus_line_limit: 0.0,
    };
    let v_minus = GridField {
        grid: g.clone(),
        tag: FieldTag::VMinus,
        values: combine(pi_minus, c_minus),
        plus_line_limit: 0.0,
        minus_line_limit: c_minus,
    };
    Ok(Decomposition {
        eta,
        psi_plus,
        psi_minus,
        v_plus,
        v_minus,
        c_plus,
        c_minus,
    })
}

/// Scalar results of one PDE drift computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeSummary {
    /// `E tau_1 = v+(0, Y; 1) + v-(0, -Y; 1)`.
    pub e_tau1: f64,
    pub v_plus_one: f64,
    pub v_minus_one: f64,
    pub v_plus_y: f64,
    pub v_minus_y: f64,
    /// `E (int_0^theta y dt)^2` from `(0, Y)`.
    pub m2: f64,
    pub sigma2: f64,
    pub half_width: f64,
    pub ny: usize,
    pub nz: usize,
}

impl PdeSummary {
    /// Key-value dump in JSON syntax.
    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{{")?;
        writeln!(out, "  \"E_tau1\": {:e},", self.e_tau1)?;
        writeln!(out, "  \"v_plus_one\": {:e},", self.v_plus_one)?;
        writeln!(out, "  \"v_plus_y\": {:e},", self.v_plus_y)?;
        writeln!(out, "  \"v_minus_y\": {:e},", self.v_minus_y)?;
        writeln!(out, "  \"m2\": {:e},", self.m2)?;
        writeln!(out, "  \"sigma2_pde\": {:e},", self.sigma2)?;
        writeln!(out, "  \"L\": {:e},", self.half_width)?;
        writeln!(out, "  \"ny\": {},", self.ny)?;
        writeln!(out, "  \"nz\": {}", self.nz)?;
        writeln!(out, "}}")
    }
}

pub fn solve_pi(params: &OscillatorParams, grid: &Grid) -> Result<(GridField, GridField)> {
    PdeProblem::new(params, grid)?.solve_pi()
}

pub fn solve_eta<F: Fn(f64, f64) -> f64>(
    params: &OscillatorParams,
    grid: &Grid,
    f: F,
) -> Result<GridField> {
    let p = PdeProblem::new(params, grid)?;
    let s = p.source(f);
    p.solve_eta(&s)
}

pub fn solve_psi<F: Fn(f64, f64) -> f64>(
    params: &OscillatorParams,
    grid: &Grid,
    side: Side,
    f: F,
) -> Result<GridField> {
    let p = PdeProblem::new(params, grid)?;
    let s = p.source(f);
    p.solve_psi(side, &p.phi_line(side, &s)?)
}

/// Returns the field and its value at `(0, Y)`.
pub fn solve_second_moment(
    params: &OscillatorParams,
    grid: &Grid,
    v_plus_y: &GridField,
) -> Result<(GridField, f64)> {
    let m2 = PdeProblem::new(params, grid)?.solve_second_moment(v_plus_y)?;
    let corner = m2.at_plus_corner();
    Ok((m2, corner))
}

pub fn drift_from_pde(params: &OscillatorParams, grid: &Grid) -> Result<PdeSummary> {
    PdeProblem::new(params, grid)?.drift()
}
