use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ansatz::{build_ansatz, AnsatzSpec};
use super::scan::{reduced_scan, ScanConfig, ScanResult};
use super::solver::{solve, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::radial::{default_nodes, RadialGrid};
use crate::soliton::Params;

/// Caps the worker threads used by [`sweep`].
pub const THREADS_ENV: &str = "CSSBALL_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodePolicy {
    /// `ceil(40 R)`
    Default,
    Fixed(usize),
}

impl NodePolicy {
    pub fn nodes(&self, radius: f64) -> usize {
        match *self {
            NodePolicy::Default => default_nodes(radius),
            NodePolicy::Fixed(n) => n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub ps: Vec<f64>,
    pub omegas: Vec<f64>,
    pub radii: Vec<f64>,
    pub nodes: NodePolicy,
    pub scan: ScanConfig,
    /// Also minimize from `z_{rho*}` when set.
    pub solve: Option<SolveOptions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: f64,
    pub omega: f64,
    pub radius: f64,
    pub nodes: usize,
    pub scan: Option<ScanResult>,
    pub solve: Option<SolveReport>,
    pub error: Option<String>,
}

/// Value of [`THREADS_ENV`], if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Parse(format!(
                "{THREADS_ENV} = {raw:?} is not a positive integer"
            ))),
        },
    }
}

fn run_cell(p: f64, omega: f64, radius: f64, spec: &SweepSpec) -> SweepCell {
    let nodes = spec.nodes.nodes(radius);
    let mut cell = SweepCell {
        p,
        omega,
        radius,
        nodes,
        scan: None,
        solve: None,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let params = Params::new(p, omega)?;
        let grid = RadialGrid::new(radius, nodes)?;
        let scan = reduced_scan(&params, &grid, &spec.scan)?;
        if let Some(options) = &spec.solve {
            let ansatz = AnsatzSpec::new(p, radius, scan.k2, scan.rho_star, scan.alpha, scan.beta)?;
            let init = build_ansatz(&params, &grid, &ansatz)?;
            let options = SolveOptions {
                k2: Some(scan.k2),
                ..options.clone()
            };
            cell.solve = Some(solve(&params, init, &options)?);
        }
        cell.scan = Some(scan);
        Ok(())
    })();
    if let Err(e) = outcome {
        cell.error = Some(e.to_string());
    }
    cell
}

/// Runs every `(p, omega, R)` cell; failures are recorded per cell. Cells come
/// back ordered by `p`, then `omega`, then `R`.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    let cells: Vec<(f64, f64, f64)> = spec
        .ps
        .iter()
        .flat_map(|&p| {
            spec.omegas
                .iter()
                .flat_map(move |&w| spec.radii.iter().map(move |&r| (p, w, r)))
        })
        .collect();
    let run = || {
        cells
            .par_iter()
            .map(|&(p, w, r)| run_cell(p, w, r, spec))
            .collect::<Vec<_>>()
    };
    match thread_cap()? {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Solver {
                    iterations: 0,
                    reason: format!("thread pool: {e}"),
                })?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}
