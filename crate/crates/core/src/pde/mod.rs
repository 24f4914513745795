//! Nonlocal boundary-value problems for the expected cycle functionals.
//!
//! The state space `R x [-Y, Y]` is truncated to `[-L, L] x [-Y, Y]` and
//! discretized with a monotone finite-difference scheme. Every solution is a
//! combination of Dirichlet problems (`pi±`, `eta`, `psi±`) plus two scalar
//! unknowns fixed by continuity at the junctions `(0, ±Y)`; the same
//! problems can also be solved in one piece with nonlocal line closures.

mod banded;
mod grid;
mod operator;
mod phi;
mod solve;

pub use banded::{solve_tridiagonal, BandedLu, LinearSystem, SparseRows, RESIDUAL_TOL};
pub use grid::{FieldTag, Grid, GridField, NodeKind};
pub use operator::Closure;
pub use phi::{phi_on_grid, phi_plus_ode_reference, phi_quadrature, PHI_REL_TOL};
pub use solve::{
    assemble_v, drift_from_pde, solve_eta, solve_pi, solve_psi, solve_second_moment, Decomposition,
    PdeProblem, PdeSummary, DENOMINATOR_FLOOR,
};
