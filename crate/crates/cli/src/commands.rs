use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use cssball_core::driver::{
    build_ansatz, reduced_scan, scan_interval, solve, sweep, AnsatzSpec, NodePolicy, ScanConfig,
    ScanResult, SolveOptions, SolveReport, SweepCell, SweepSpec,
};
use cssball_core::io;
use cssball_core::limit::{solve_k, threshold_table, LimitRoots, RootKind};
use cssball_core::linearized::{assemble_l, coercivity_constant};
use cssball_core::soliton::{compute_m, soliton_integrals, SolitonConstants, SolitonIntegrals};
use cssball_core::{LineGrid, Params, Quadrature, RadialGrid, Soliton, Spectrum};

use crate::config::{Branch, Command, Format, RunConfig};
use crate::error::CliError;
use crate::svg::{line_plot, Series};

const LINE_NODES: usize = 2000;
const SPECTRUM_COUNT: usize = 8;
const THRESHOLD_SAMPLES: usize = 50;

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(io::write_file(path, bytes)?),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("<stdout>: {e}"))),
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<f64>]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    io::write_csv(&mut buf, header, rows)?;
    Ok(buf)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    Ok(io::to_json(value)?.into_bytes())
}

/// `run.json` -> `run.<suffix>`
fn companion(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn single(values: &[f64]) -> f64 {
    values[0]
}

struct Limit {
    params: Params,
    constants: SolitonConstants,
    roots: LimitRoots,
}

fn limit(p: f64, omega: f64) -> Result<Limit, CliError> {
    let params = Params::new(p, omega)?;
    let constants = compute_m(p, &Quadrature::default())?;
    let roots = solve_k(params, constants.m);
    Ok(Limit {
        params,
        constants,
        roots,
    })
}

/// Frequency and decay rate picked by `--branch`.
fn branch_point(cfg: &RunConfig) -> Result<(Limit, f64), CliError> {
    let p = single(&cfg.ps);
    match cfg.branch {
        Branch::K0 => {
            let probe = limit(p, cfg.omegas.first().copied().unwrap_or(1e-3))?;
            let omega1 = probe.roots.omega1;
            if let Some(&omega) = cfg.omegas.first() {
                if !matches!(probe.roots.kind, RootKind::Tangent { .. }) {
                    return Err(CliError::Usage(format!(
                        "branch k0 exists only at omega1 = {omega1}, got omega = {omega}"
                    )));
                }
            }
            let at = limit(p, omega1)?;
            let k0 = at.roots.critical_k;
            Ok((at, k0))
        }
        Branch::K1 | Branch::K2 => {
            let l = limit(p, single(&cfg.omegas))?;
            let k = if cfg.branch == Branch::K1 {
                l.roots.k1()
            } else {
                l.roots.k2()
            };
            let k = k.ok_or_else(|| {
                CliError::Usage(format!(
                    "omega = {} exceeds omega1 = {}: no limit soliton",
                    l.params.omega, l.roots.omega1
                ))
            })?;
            Ok((l, k))
        }
    }
}

/// Everything the boundary-layer commands need, checked per cell.
fn check_cell(p: f64, omega: f64, radius: f64, cfg: &RunConfig) -> Result<RadialGrid, CliError> {
    let l = limit(p, omega)?;
    let k2 = l.roots.k2().ok_or(cssball_core::Error::NoLimitSolution {
        omega,
        omega1: l.roots.omega1,
    })?;
    let grid = match cfg.nodes {
        Some(n) => RadialGrid::new(radius, n)?,
        None => RadialGrid::with_default_nodes(radius)?,
    };
    let (da, db) = cssball_core::driver::default_exponents(p);
    let (alpha, beta) = (cfg.alpha.unwrap_or(da), cfg.beta.unwrap_or(db));
    let (lo, _) = scan_interval(radius, k2, alpha, beta);
    AnsatzSpec::new(p, radius, k2, lo, alpha, beta)?;
    Ok(grid)
}

/// Domain checks for the whole run; nothing expensive happens before this passes.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let positive = |name: &str, v: Option<f64>| match v {
        Some(x) if !(x > 0.0) => Err(CliError::Usage(format!("{name} = {x} outside (0, inf)"))),
        _ => Ok(()),
    };
    positive("tol", cfg.tol)?;
    if cfg.max_iter == Some(0) {
        return Err(CliError::Usage("max-iter = 0 outside [1, inf)".into()));
    }
    match cfg.command {
        Command::Thresholds => {
            for (name, p) in [("p-min", cfg.p_min), ("p-max", cfg.p_max)] {
                if !(p > 1.0 && p < 3.0) {
                    return Err(CliError::Usage(format!("{name} = {p} outside (1,3)")));
                }
            }
            if cfg.p_max < cfg.p_min {
                return Err(CliError::Usage("p-max is below p-min".into()));
            }
            if cfg.samples == Some(0) {
                return Err(CliError::Usage("samples = 0 outside [1, inf)".into()));
            }
        }
        Command::Roots => {
            Params::new(single(&cfg.ps), single(&cfg.omegas))?;
        }
        Command::Soliton | Command::Spectrum => {
            if let Some(n) = cfg.nodes {
                if n < 3 {
                    return Err(CliError::Usage(format!("nodes = {n} outside [3, inf)")));
                }
            }
            branch_point(cfg)?;
        }
        Command::Scan | Command::Solve | Command::Sweep => {
            if let Some(s) = cfg.samples {
                if s < 3 {
                    return Err(CliError::Usage(format!("samples = {s} outside [3, inf)")));
                }
            }
            for &p in &cfg.ps {
                for &omega in &cfg.omegas {
                    for &radius in &cfg.radii {
                        check_cell(p, omega, radius, cfg)?;
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    validate(cfg)?;
    match cfg.command {
        Command::Thresholds => thresholds(cfg),
        Command::Roots => roots(cfg),
        Command::Soliton => soliton(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Scan => scan(cfg),
        Command::Solve => solve_cmd(cfg),
        Command::Sweep => sweep_cmd(cfg),
    }
}

fn thresholds(cfg: &RunConfig) -> Result<(), CliError> {
    let samples = cfg.samples.unwrap_or(THRESHOLD_SAMPLES);
    let rows = threshold_table(cfg.p_min, cfg.p_max, samples, &Quadrature::default())?;
    let bytes = match cfg.format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_thresholds_csv(&mut buf, &rows)?;
            buf
        }
        Format::Json => json_bytes(&rows)?,
    };
    emit(cfg.out.as_deref(), &bytes)?;
    if let Some(path) = &cfg.svg {
        let p: Vec<f64> = rows.iter().map(|r| r.p).collect();
        let w0: Vec<f64> = rows.iter().map(|r| r.omega0).collect();
        let w1: Vec<f64> = rows.iter().map(|r| r.omega1).collect();
        let svg = line_plot(
            "thresholds",
            "p",
            &p,
            &[
                Series {
                    label: "omega0",
                    y: &w0,
                },
                Series {
                    label: "omega1",
                    y: &w1,
                },
            ],
        );
        io::write_file(path, svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RootsOut {
    p: f64,
    omega: f64,
    m: f64,
    #[serde(flatten)]
    roots: LimitRoots,
}

fn roots(cfg: &RunConfig) -> Result<(), CliError> {
    let l = limit(single(&cfg.ps), single(&cfg.omegas))?;
    let out = RootsOut {
        p: l.params.p,
        omega: l.params.omega,
        m: l.constants.m,
        roots: l.roots,
    };
    emit(cfg.out.as_deref(), &json_bytes(&out)?)
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::K1 => "k1",
        Branch::K2 => "k2",
        Branch::K0 => "k0",
    }
}

#[derive(Serialize)]
struct SolitonOut {
    p: f64,
    omega: f64,
    branch: &'static str,
    k: f64,
    constants: SolitonConstants,
    peak: f64,
    integrals: SolitonIntegrals,
}

fn soliton(cfg: &RunConfig) -> Result<(), CliError> {
    let (l, k) = branch_point(cfg)?;
    let w = Soliton::new(l.params.p, k)?;
    let bytes = match cfg.format {
        Format::Json => json_bytes(&SolitonOut {
            p: l.params.p,
            omega: l.params.omega,
            branch: branch_name(cfg.branch),
            k,
            constants: l.constants,
            peak: w.peak(),
            integrals: soliton_integrals(k, &l.constants)?,
        })?,
        Format::Csv => {
            let grid = LineGrid::new(40.0 / k.sqrt(), cfg.nodes.unwrap_or(LINE_NODES))?;
            let rows: Vec<Vec<f64>> = grid
                .nodes()
                .into_iter()
                .map(|x| vec![x, w.value(x), w.derivative(x)])
                .collect();
            csv_bytes(&["x", "w", "dw"], &rows)?
        }
    };
    emit(cfg.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct SpectrumOut {
    p: f64,
    omega: f64,
    branch: &'static str,
    k: f64,
    nodes: usize,
    half_width: f64,
    #[serde(flatten)]
    spectrum: Spectrum,
}

fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let (l, k) = branch_point(cfg)?;
    let grid = LineGrid::new(40.0 / k.sqrt(), cfg.nodes.unwrap_or(LINE_NODES))?;
    let op = assemble_l(l.params.p, l.params.omega, k, grid)?;
    let spectrum = coercivity_constant(&op, SPECTRUM_COUNT)?;
    let out = SpectrumOut {
        p: l.params.p,
        omega: l.params.omega,
        branch: branch_name(cfg.branch),
        k,
        nodes: grid.n,
        half_width: grid.half_width,
        spectrum,
    };
    emit(cfg.out.as_deref(), &json_bytes(&out)?)
}

fn scan_config(cfg: &RunConfig) -> ScanConfig {
    ScanConfig {
        samples: cfg.samples.unwrap_or(ScanConfig::default().samples),
        alpha: cfg.alpha,
        beta: cfg.beta,
        ..Default::default()
    }
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    let d = SolveOptions::default();
    SolveOptions {
        tol: cfg.tol.unwrap_or(d.tol),
        max_iter: cfg.max_iter.unwrap_or(d.max_iter),
        ..d
    }
}

#[derive(Serialize)]
struct ScanSummary {
    p: f64,
    omega: f64,
    radius: f64,
    nodes: usize,
    k2: f64,
    j_value: f64,
    alpha: f64,
    beta: f64,
    interval: [f64; 2],
    rho_star: f64,
    phi_star: f64,
    boundary: bool,
    model_rho_star: Option<f64>,
    amplitude_model_rho_star: Option<f64>,
    /// `R - log R / (2 sqrt k2)`
    log_prediction: f64,
    model_deviation: f64,
}

impl From<&ScanResult> for ScanSummary {
    fn from(s: &ScanResult) -> Self {
        Self {
            p: s.p,
            omega: s.omega,
            radius: s.radius,
            nodes: s.nodes,
            k2: s.k2,
            j_value: s.j_value,
            alpha: s.alpha,
            beta: s.beta,
            interval: s.interval,
            rho_star: s.rho_star,
            phi_star: s.phi_star,
            boundary: s.boundary,
            model_rho_star: s.model_rho_star,
            amplitude_model_rho_star: s.amplitude_model_rho_star,
            log_prediction: s.radius - s.radius.ln() / (2.0 * s.k2.sqrt()),
            model_deviation: s.model_deviation(),
        }
    }
}

fn scan_one(cfg: &RunConfig) -> Result<(Params, RadialGrid, ScanResult), CliError> {
    let (p, omega, radius) = (single(&cfg.ps), single(&cfg.omegas), single(&cfg.radii));
    let grid = check_cell(p, omega, radius, cfg)?;
    let params = Params::new(p, omega)?;
    let result = reduced_scan(&params, &grid, &scan_config(cfg))?;
    Ok((params, grid, result))
}

fn scan(cfg: &RunConfig) -> Result<(), CliError> {
    let (_, _, result) = scan_one(cfg)?;
    let summary = ScanSummary::from(&result);
    match cfg.format {
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_scan_csv(&mut buf, &result)?;
            emit(cfg.out.as_deref(), &buf)?;
            if let Some(out) = &cfg.out {
                io::write_file(&companion(out, "json"), &json_bytes(&summary)?)?;
            }
        }
        Format::Json => emit(cfg.out.as_deref(), &json_bytes(&summary)?)?,
    }
    if let Some(path) = &cfg.svg {
        let svg = line_plot(
            "reduced energy",
            "rho",
            &result.rho_grid,
            &[
                Series {
                    label: "phi",
                    y: &result.phi,
                },
                Series {
                    label: "model",
                    y: &result.model_phi,
                },
            ],
        );
        io::write_file(path, svg.as_bytes())?;
    }
    Ok(())
}

fn not_converged(report: &SolveReport) -> CliError {
    CliError::Numerical(format!(
        "{:?} after {} iterations, gradient norm {:e}",
        report.status, report.iterations, report.grad_norm
    ))
}

fn solve_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let (params, grid, result) = scan_one(cfg)?;
    let spec = AnsatzSpec::new(
        params.p,
        grid.radius,
        result.k2,
        result.rho_star,
        result.alpha,
        result.beta,
    )?;
    let init = build_ansatz(&params, &grid, &spec)?;
    let options = SolveOptions {
        k2: Some(result.k2),
        ..solve_options(cfg)
    };
    let report = solve(&params, init, &options)?;
    emit(cfg.out.as_deref(), &json_bytes(&report)?)?;
    if let Some(out) = &cfg.out {
        let mut buf = Vec::new();
        io::write_field_csv(&mut buf, report.field())?;
        io::write_file(&companion(out, "field.csv"), &buf)?;
    }
    if report.converged {
        Ok(())
    } else {
        Err(not_converged(&report))
    }
}

const SWEEP_HEADER: [&str; 14] = [
    "p",
    "omega",
    "radius",
    "nodes",
    "ok",
    "rho_star",
    "phi_star",
    "boundary",
    "log_prediction",
    "converged",
    "rho_fit",
    "profile_error",
    "energy",
    "grad_norm",
];

fn sweep_row(cell: &SweepCell) -> Vec<f64> {
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let nan = f64::NAN;
    let scan = cell.scan.as_ref();
    let solved = cell.solve.as_ref();
    vec![
        cell.p,
        cell.omega,
        cell.radius,
        cell.nodes as f64,
        flag(cell.error.is_none()),
        scan.map_or(nan, |s| s.rho_star),
        scan.map_or(nan, |s| s.phi_star),
        scan.map_or(nan, |s| flag(s.boundary)),
        scan.map_or(nan, |s| s.radius - s.radius.ln() / (2.0 * s.k2.sqrt())),
        solved.map_or(nan, |r| flag(r.converged)),
        solved.map_or(nan, |r| r.rho_fit),
        solved.map_or(nan, |r| r.profile_error),
        solved.map_or(nan, |r| r.energy.total),
        solved.map_or(nan, |r| r.grad_norm),
    ]
}

#[derive(Serialize)]
struct SweepOut<'a> {
    p: f64,
    omega: f64,
    radius: f64,
    nodes: usize,
    error: Option<&'a str>,
    scan: Option<ScanSummary>,
    solve: Option<&'a SolveReport>,
}

fn sweep_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = SweepSpec {
        ps: cfg.ps.clone(),
        omegas: cfg.omegas.clone(),
        radii: cfg.radii.clone(),
        nodes: cfg.nodes.map_or(NodePolicy::Default, NodePolicy::Fixed),
        scan: scan_config(cfg),
        solve: Some(solve_options(cfg)),
    };
    let cells = sweep(&spec)?;
    let bytes = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<f64>> = cells.iter().map(sweep_row).collect();
            csv_bytes(&SWEEP_HEADER, &rows)?
        }
        Format::Json => {
            let out: Vec<SweepOut> = cells
                .iter()
                .map(|c| SweepOut {
                    p: c.p,
                    omega: c.omega,
                    radius: c.radius,
                    nodes: c.nodes,
                    error: c.error.as_deref(),
                    scan: c.scan.as_ref().map(ScanSummary::from),
                    solve: c.solve.as_ref(),
                })
                .collect();
            json_bytes(&out)?
        }
    };
    emit(cfg.out.as_deref(), &bytes)?;
    let failed: Vec<String> = cells
        .iter()
        .filter(|c| c.error.is_some() || c.solve.as_ref().is_some_and(|r| !r.converged))
        .map(|c| format!("(p={}, omega={}, R={})", c.p, c.omega, c.radius))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{} cell(s) failed: {}",
            failed.len(),
            failed.join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_paths() {
        assert_eq!(
            companion(Path::new("a/run.json"), "field.csv"),
            Path::new("a/run.field.csv")
        );
        assert_eq!(
            companion(Path::new("scan.csv"), "json"),
            Path::new("scan.json")
        );
    }
}
