//! Report files. Missing values are left blank; `*_ci` columns hold the
//! half-width of the 95% interval.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use epp_core::cycles::write_cycles_csv;
use epp_core::estimators::EstimateWithCI;

use crate::error::CliError;
use crate::run::Report;

pub const REPORT_HEADER: &str =
    "Y,c0,k,T,dt,MC,lhs,lhs_ci,rhs,rhs_ci,tau_mean,tau_ci,simplified,rel_err_pct";

pub const PDE_HEADER: &str = "Y,c0,k,L,ny,nz,E_tau1,v_plus_y,m2,sigma2_pde,\
tau_mc,v_plus_y_mc,m2_mc,rhs_mc,tau_gap_pct,sigma2_gap_pct";

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn gap_pct(a: f64, b: Option<f64>) -> Option<f64> {
    b.map(|b| 100.0 * (a - b).abs() / b.abs())
}

fn write_echo<W: Write>(out: &mut W, report: &Report) -> std::io::Result<()> {
    for line in report.config.echo().lines() {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

fn write_main<W: Write>(out: &mut W, report: &Report) -> std::io::Result<()> {
    write_echo(out, report)?;
    writeln!(out, "{REPORT_HEADER}")?;
    let mc = &report.config.mc;
    for r in &report.rows {
        let p = &r.row.params;
        let d = &r.drift;
        let v = |e: Option<EstimateWithCI>| opt(e.map(|e| e.value));
        let hw = |e: Option<EstimateWithCI>| opt(e.map(|e| e.half_width()));
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.bound(),
            p.c0(),
            p.k(),
            mc.horizon,
            mc.dt,
            mc.paths,
            v(d.lhs),
            hw(d.lhs),
            v(d.rhs),
            hw(d.rhs),
            v(d.tau_mean),
            hw(d.tau_mean),
            v(d.simplified),
            opt(d.relative_error_pct()),
        )?;
    }
    Ok(())
}

fn write_pde<W: Write>(out: &mut W, report: &Report) -> std::io::Result<()> {
    write_echo(out, report)?;
    writeln!(out, "{PDE_HEADER}")?;
    for r in &report.rows {
        let Some(pde) = &r.pde else { continue };
        let s = &pde.summary;
        let p = &r.row.params;
        let tau = r.drift.tau_mean.map(|e| e.value);
        let rhs = r.drift.rhs.map(|e| e.value);
        let h = r.half_cycle.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.bound(),
            p.c0(),
            p.k(),
            s.half_width,
            s.ny,
            s.nz,
            s.e_tau1,
            s.v_plus_y,
            s.m2,
            s.sigma2,
            opt(tau),
            opt(h.map(|h| h.first_moment.value)),
            opt(h.map(|h| h.second_moment.value)),
            opt(rhs),
            opt(gap_pct(s.e_tau1, tau)),
            opt(gap_pct(s.sigma2, rhs)),
        )?;
    }
    Ok(())
}

/// Writes the report, the PDE table and any requested dumps into `dir`.
/// Returns the paths written.
pub fn write_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let path = dir.join("report.csv");
    let mut f = create(&path)?;
    write_main(&mut f, report)
        .and_then(|_| f.flush())
        .map_err(io_err(&path))?;
    written.push(path);

    if report.config.run.mode.pde() {
        let path = dir.join("pde_report.csv");
        let mut f = create(&path)?;
        write_pde(&mut f, report)
            .and_then(|_| f.flush())
            .map_err(io_err(&path))?;
        written.push(path);
        for r in &report.rows {
            let Some(pde) = &r.pde else { continue };
            let path = dir.join(format!("pde_summary_row{}.json", r.row.index));
            let mut f = create(&path)?;
            pde.summary
                .write_json(&mut f)
                .and_then(|_| f.flush())
                .map_err(io_err(&path))?;
            written.push(path);
            for (name, field) in &pde.fields {
                let path = dir.join(format!("field_{name}_row{}.csv", r.row.index));
                let mut f = create(&path)?;
                field
                    .write_csv(&mut f)
                    .and_then(|_| f.flush())
                    .map_err(io_err(&path))?;
                written.push(path);
            }
        }
    }

    if report.config.output.cycles {
        for r in report.rows.iter().filter(|r| !r.cycles.is_empty()) {
            let path = dir.join(format!("cycles_row{}.csv", r.row.index));
            let mut f = create(&path)?;
            write_cycles_csv(&r.cycles, &mut f)
                .and_then(|_| f.flush())
                .map_err(io_err(&path))?;
            written.push(path);
        }
    }

    if !report.rows.is_empty() {
        written.extend(emit_plot_data(report, dir)?);
    }
    Ok(written)
}

/// One text file per available series (`lhs`, `rhs`, `tau`), one line per
/// row: `Y value ci_low ci_high c0 k`.
pub fn emit_plot_data(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if report.rows.is_empty() {
        return Err(CliError::Runtime("no rows to plot".into()));
    }
    type Series = fn(&crate::run::RowResult) -> Option<EstimateWithCI>;
    let series: [(&str, Series); 3] = [
        ("lhs", |r| r.drift.lhs),
        ("rhs", |r| r.drift.rhs),
        ("tau", |r| r.drift.tau_mean),
    ];
    let mut written = Vec::new();
    for (name, get) in series {
        let points: Vec<_> = report
            .rows
            .iter()
            .filter_map(|r| get(r).map(|e| (r.row.params, e)))
            .collect();
        if points.is_empty() {
            continue;
        }
        let path = dir.join(format!("plot_{name}.dat"));
        let mut f = create(&path)?;
        let mut body = || -> std::io::Result<()> {
            writeln!(f, "# Y {name} ci_low ci_high c0 k")?;
            for (p, e) in &points {
                writeln!(
                    f,
                    "{} {} {} {} {} {}",
                    p.bound(),
                    e.value,
                    e.ci_low,
                    e.ci_high,
                    p.c0(),
                    p.k()
                )?;
            }
            f.flush()
        };
        body().map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
