use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ansatz::{ansatz_values, default_exponents, scan_interval, AnsatzSpec};
use crate::error::{Error, Result};
use crate::limit::{j_closed, solve_k, LimitRoots};
use crate::quadrature::Quadrature;
use crate::radial::{energy, RadialField, RadialGrid};
use crate::soliton::{compute_m, Params, SolitonConstants};

/// Limit-problem data the ball construction is built on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitContext {
    pub constants: SolitonConstants,
    pub roots: LimitRoots,
    pub k2: f64,
    /// `J(w_{k2})`
    pub j_value: f64,
}

pub fn limit_context(params: &Params, quad: &Quadrature) -> Result<LimitContext> {
    let params = Params::new(params.p, params.omega)?;
    let constants = compute_m(params.p, quad)?;
    let roots = solve_k(params, constants.m);
    let k2 = roots.k2().ok_or(Error::NoLimitSolution {
        omega: params.omega,
        omega1: roots.omega1,
    })?;
    Ok(LimitContext {
        constants,
        roots,
        k2,
        j_value: j_closed(params.omega, k2, &constants)?,
    })
}

/// `2 pi J rho + 2 pi sqrt(k2) rho e^(-2 sqrt(k2) (R - rho))`
pub fn model_phi(j_value: f64, k2: f64, radius: f64, rho: f64) -> f64 {
    let sk = k2.sqrt();
    2.0 * PI * (j_value * rho + sk * rho * (-2.0 * sk * (radius - rho)).exp())
}

/// Minimizer of [`model_phi`] over `(0, R)`, from the sign change of its
/// derivative. `None` when `J >= 0` (the model is then increasing).
pub fn model_argmin(j_value: f64, k2: f64, radius: f64) -> Option<f64> {
    stationary_point(j_value, k2, radius, 1.0)
}

/// `A` in `w_k(x) ~ A e^(-sqrt(k) |x|)`: `(2 (p+1) k)^(1/(p-1))`.
pub fn tail_amplitude(p: f64, k: f64) -> f64 {
    (2.0 * (p + 1.0) * k).powf(1.0 / (p - 1.0))
}

/// Minimizer of the model with the boundary term scaled by `A^2`.
pub fn amplitude_model_argmin(p: f64, j_value: f64, k2: f64, radius: f64) -> Option<f64> {
    stationary_point(j_value, k2, radius, tail_amplitude(p, k2).powi(2))
}

fn stationary_point(j_value: f64, k2: f64, radius: f64, coeff: f64) -> Option<f64> {
    if j_value >= 0.0 {
        return None;
    }
    let sk = k2.sqrt();
    let slope = |rho: f64| {
        j_value + coeff * sk * (-2.0 * sk * (radius - rho)).exp() * (1.0 + 2.0 * sk * rho)
    };
    let (mut lo, mut hi) = (0.0, radius);
    if slope(hi) <= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * radius {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub samples: usize,
    /// Golden-section stopping width in `rho`.
    pub rho_tol: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub quadrature: Quadrature,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            samples: 64,
            rho_tol: 1e-3,
            alpha: None,
            beta: None,
            quadrature: Quadrature::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub p: f64,
    pub omega: f64,
    pub radius: f64,
    pub nodes: usize,
    pub k2: f64,
    pub j_value: f64,
    pub alpha: f64,
    pub beta: f64,
    pub interval: [f64; 2],
    pub rho_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub model_phi: Vec<f64>,
    pub rho_star: f64,
    pub phi_star: f64,
    /// Minimizer of the two-term model, if it has one.
    pub model_rho_star: Option<f64>,
    /// Same with the boundary term weighted by the squared tail amplitude.
    pub amplitude_model_rho_star: Option<f64>,
    /// Discrete argmin at an end of the interval.
    pub boundary: bool,
}

impl ScanResult {
    /// `max |Phi - model| / |model|` over the sampled interval.
    pub fn model_deviation(&self) -> f64 {
        self.phi
            .iter()
            .zip(&self.model_phi)
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max)
    }

    pub fn interior(&self) -> bool {
        !self.boundary
    }
}

fn phi_at(params: &Params, grid: &RadialGrid, k2: f64, rho: f64) -> Result<f64> {
    let field = RadialField::new(*grid, ansatz_values(params.p, k2, grid, rho)?)?;
    Ok(energy(params, &field)?.total)
}

fn golden_section<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Samples `Phi(rho) = energy(z_rho)` over `I_R` and refines its minimum.
pub fn reduced_scan(params: &Params, grid: &RadialGrid, config: &ScanConfig) -> Result<ScanResult> {
    if config.samples < 3 {
        return Err(Error::domain("samples", config.samples as f64, "[3, inf)"));
    }
    if !(config.rho_tol > 0.0) {
        return Err(Error::domain("rho_tol", config.rho_tol, "(0, inf)"));
    }
    let ctx = limit_context(params, &config.quadrature)?;
    let (da, db) = default_exponents(params.p);
    let alpha = config.alpha.unwrap_or(da);
    let beta = config.beta.unwrap_or(db);
    let (lo, hi) = scan_interval(grid.radius, ctx.k2, alpha, beta);
    // window validation for both ends
    AnsatzSpec::new(params.p, grid.radius, ctx.k2, lo, alpha, beta)?;

    let count = config.samples;
    let rho_grid: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    let phi = rho_grid
        .iter()
        .map(|&rho| phi_at(params, grid, ctx.k2, rho))
        .collect::<Result<Vec<f64>>>()?;
    let model: Vec<f64> = rho_grid
        .iter()
        .map(|&rho| model_phi(ctx.j_value, ctx.k2, grid.radius, rho))
        .collect();
    let best = phi
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let boundary = best == 0 || best == count - 1;
    let (rho_star, phi_star) = if boundary {
        (rho_grid[best], phi[best])
    } else {
        golden_section(
            |rho| phi_at(params, grid, ctx.k2, rho),
            rho_grid[best - 1],
            rho_grid[best + 1],
            config.rho_tol,
        )?
    };
    Ok(ScanResult {
        p: params.p,
        omega: params.omega,
        radius: grid.radius,
        nodes: grid.n,
        k2: ctx.k2,
        j_value: ctx.j_value,
        alpha,
        beta,
        interval: [lo, hi],
        rho_grid,
        phi,
        model_phi: model,
        rho_star,
        phi_star,
        model_rho_star: model_argmin(ctx.j_value, ctx.k2, grid.radius),
        amplitude_model_rho_star: amplitude_model_argmin(
            params.p,
            ctx.j_value,
            ctx.k2,
            grid.radius,
        ),
        boundary,
    })
}
