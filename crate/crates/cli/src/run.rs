//! Sweep execution.
//!
//! Trajectory `i` of row `r` draws its noise from the substream
//! `(master_seed, r, i)`; single-cycle samples use trajectory indices with
//! the top bit set so they never share a stream with a direct-estimator path.
//! Results are collected in index order before any reduction, so the numbers
//! do not depend on the number of worker threads.

use std::time::Instant;

use epp_core::cycles::{run_path, sample_cycle, CycleRecord, CycleStart};
use epp_core::estimators::{
    cycle_drift_estimator, direct_variance_estimator, half_cycle_estimator, DriftReport,
    HalfCycleDrift,
};
use epp_core::pde::{Grid, GridField, PdeProblem, PdeSummary};
use epp_core::sde::StreamKey;
use log::info;
use rayon::prelude::*;

use crate::config::{CycleSampling, ExperimentConfig, Row, StartRule};
use crate::error::CliError;

const CYCLE_STREAM: u64 = 1 << 63;

/// Everything computed for one parameter set.
#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: Row,
    pub drift: DriftReport,
    pub half_cycle: Option<HalfCycleDrift>,
    pub cycles: Vec<CycleRecord>,
    pub pde: Option<PdeOutcome>,
    pub mc_seconds: f64,
    pub pde_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct PdeOutcome {
    pub summary: PdeSummary,
    /// `(name, field)` pairs, present when field dumps were requested.
    pub fields: Vec<(&'static str, GridField)>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<RowResult>,
}

fn row_error(row: &Row, source: epp_core::Error) -> CliError {
    CliError::Row {
        row: row.index,
        c0: row.params.c0(),
        k: row.params.k(),
        bound: row.params.bound(),
        source,
    }
}

fn monte_carlo(config: &ExperimentConfig, row: &Row, out: &mut RowResult) -> Result<(), CliError> {
    let mode = config.run.mode;
    let mc = &config.mc;
    let p = &row.params;
    let master = mc.master_seed;
    let r = row.index as u64;
    let harvest = mode.cycles() && mc.cycles == CycleSampling::Harvest;

    if mode.direct() || harvest {
        let paths = (0..mc.paths as u64)
            .into_par_iter()
            .map(|i| run_path(p, mc.horizon, mc.dt, StreamKey::new(master, r, i), harvest))
            .collect::<epp_core::Result<Vec<_>>>()
            .map_err(|e| row_error(row, e))?;
        if mode.direct() {
            let integrals: Vec<f64> = paths.iter().map(|s| s.velocity_integral).collect();
            out.drift.lhs = Some(
                direct_variance_estimator(&integrals, mc.horizon).map_err(|e| row_error(row, e))?,
            );
        }
        if harvest {
            out.cycles = paths.into_iter().flat_map(|s| s.cycles).collect();
        }
    }

    if mode.cycles() {
        if mc.cycles == CycleSampling::Single {
            let start = match mc.cycle_start {
                StartRule::BurnIn => CycleStart::BurnIn,
                StartRule::Exact => CycleStart::Exact,
            };
            out.cycles = (0..mc.paths as u64)
                .into_par_iter()
                .map(|i| {
                    let key = StreamKey::new(master, r, CYCLE_STREAM | i);
                    sample_cycle(p, mc.dt, key, start, mc.time_limit)
                })
                .collect::<epp_core::Result<Vec<_>>>()
                .map_err(|e| row_error(row, e))?;
        }
        let drift = cycle_drift_estimator(&out.cycles).map_err(|e| row_error(row, e))?;
        let half = half_cycle_estimator(&out.cycles).map_err(|e| row_error(row, e))?;
        out.drift.rhs = Some(drift.ratio);
        out.drift.tau_mean = Some(drift.tau);
        out.drift.simplified = Some(half.estimate);
        out.half_cycle = Some(half);
    }
    Ok(())
}

fn pde(config: &ExperimentConfig, row: &Row) -> Result<PdeOutcome, CliError> {
    let p = &row.params;
    let g = &config.pde;
    let grid = match g.half_width {
        Some(l) => Grid::new(p, l, g.ny, g.nz),
        None => Grid::with_default_truncation(p, g.ny, g.nz),
    }
    .map_err(|e| row_error(row, e))?;
    let problem = PdeProblem::new(p, &grid).map_err(|e| row_error(row, e))?;
    let summary = problem.drift().map_err(|e| row_error(row, e))?;
    let mut fields = Vec::new();
    if config.output.fields {
        let solve = || -> epp_core::Result<Vec<(&'static str, GridField)>> {
            let (pi_plus, _) = problem.solve_pi()?;
            let v = problem.solve_v(&problem.source(|y, _| y))?;
            let m2 = problem.solve_second_moment(&v.v_plus)?;
            Ok(vec![
                ("pi_plus", pi_plus),
                ("v_plus_y", v.v_plus),
                ("m2", m2),
            ])
        };
        fields = solve().map_err(|e| row_error(row, e))?;
    }
    Ok(PdeOutcome { summary, fields })
}

fn execute(config: &ExperimentConfig, rows: Vec<Row>) -> Result<Vec<RowResult>, CliError> {
    let mode = config.run.mode;
    let mut results: Vec<RowResult> = rows
        .into_iter()
        .map(|row| RowResult {
            row,
            drift: DriftReport::default(),
            half_cycle: None,
            cycles: Vec::new(),
            pde: None,
            mc_seconds: 0.0,
            pde_seconds: 0.0,
        })
        .collect();
    if mode.direct() || mode.cycles() {
        for res in results.iter_mut() {
            let started = Instant::now();
            let row = res.row;
            monte_carlo(config, &row, res)?;
            res.mc_seconds = started.elapsed().as_secs_f64();
            info!(
                "row {} (Y = {}): Monte Carlo {:.2} s",
                row.index,
                row.params.bound(),
                res.mc_seconds
            );
        }
    }
    if mode.pde() {
        let solved = results
            .par_iter()
            .map(|res| {
                let started = Instant::now();
                let outcome = pde(config, &res.row)?;
                Ok((outcome, started.elapsed().as_secs_f64()))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        for (res, (outcome, secs)) in results.iter_mut().zip(solved) {
            info!(
                "row {} (Y = {}): PDE {:.2} s",
                res.row.index,
                res.row.params.bound(),
                secs
            );
            res.pde = Some(outcome);
            res.pde_seconds = secs;
        }
    }
    Ok(results)
}

/// Validates `config` and runs the whole sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, CliError> {
    let rows = config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.threads)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let started = Instant::now();
    let results = pool.install(|| execute(config, rows))?;
    info!(
        "{} rows in {:.2} s on {} threads",
        results.len(),
        started.elapsed().as_secs_f64(),
        pool.current_num_threads()
    );
    Ok(Report {
        config: config.clone(),
        rows: results,
    })
}
