use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ansatz::tangent_values;
use super::scan::limit_context;
use crate::error::{Error, Result};
use crate::quadrature::Quadrature;
use crate::radial::{energy, gradient, hessian_apply, EnergyReport, RadialField, RadialGrid};
use crate::soliton::{Params, Soliton};
use crate::tridiag::SymTridiagonal;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop when the r-weighted dual gradient norm drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub newton: bool,
    /// Gradient norm below which Newton steps replace gradient steps.
    pub newton_switch: f64,
    /// Gradient steps allowed before Newton is tried regardless.
    pub gradient_budget: usize,
    pub cg_max_iter: usize,
    pub armijo: f64,
    pub max_backtracks: usize,
    /// `k2` of the limit profile; computed from the parameters when absent.
    pub k2: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            newton: true,
            newton_switch: 1e-3,
            gradient_budget: 2000,
            cg_max_iter: 500,
            armijo: 1e-4,
            max_backtracks: 60,
            k2: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub converged: bool,
    pub p: f64,
    pub omega: f64,
    pub radius: f64,
    pub nodes: usize,
    pub k2: f64,
    pub energy: EnergyReport,
    pub grad_norm: f64,
    pub iterations: usize,
    pub newton_steps: usize,
    pub cg_iterations: usize,
    /// `min u >= -1e-10 max |u|` and `max u > 0`
    pub positive: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub rho_fit: f64,
    pub profile_error: f64,
    /// Energy after every accepted step, starting with the initial field.
    pub energy_trace: Vec<f64>,
    #[serde(skip)]
    pub field: Option<RadialField>,
}

impl SolveReport {
    pub fn field(&self) -> &RadialField {
        self.field.as_ref().expect("solve always stores the field")
    }
}

/// Location of the maximum of `u` (parabolic refinement) and the sup-distance
/// to `w_{k2}(r - rho_fit)` on `[R/2, R]`.
pub fn profile_fit(p: f64, k2: f64, field: &RadialField) -> Result<(f64, f64)> {
    let grid = field.grid();
    let u = field.values();
    let (i, _) = u
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Field("empty field".into()))?;
    let h = grid.spacing();
    let mut rho = grid.r(i);
    if i > 0 && i < grid.n {
        let (a, b, c) = (u[i - 1], u[i], u[i + 1]);
        let curv = a - 2.0 * b + c;
        if curv < 0.0 {
            rho += 0.5 * (a - c) / curv * h;
        }
    }
    let soliton = Soliton::new(p, k2)?;
    let half = 0.5 * grid.radius;
    let err = (0..=grid.n + 1)
        .filter(|&j| grid.r(j) >= half)
        .map(|j| (field.value(j) - soliton.value(grid.r(j) - rho)).abs())
        .fold(0.0, f64::max);
    Ok((rho, err))
}

/// `2 pi (stiffness + (omega + H^2/r^2 + Tail) mass)`: SPD part of the Hessian.
fn preconditioner(params: &Params, field: &RadialField) -> SymTridiagonal {
    let grid = field.grid();
    let n = grid.n;
    let h = grid.spacing();
    let scale = 2.0 * PI;
    let diag = (0..=n)
        .map(|k| {
            let r = grid.r(k);
            let stiff = if k == 0 {
                0.5
            } else {
                (r + 0.5 * h + r - 0.5 * h) / h
            };
            let potential = if k == 0 {
                params.omega
            } else {
                params.omega + (field.gauge()[k] / r).powi(2) + field.tail()[k]
            };
            scale * (stiff + grid.lumped_mass(k) * potential)
        })
        .collect();
    let off = (0..n).map(|k| -scale * (grid.r(k) + 0.5 * h) / h).collect();
    SymTridiagonal::new(diag, off)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct NewtonDirection {
    step: Vec<f64>,
    cg_iterations: usize,
}

/// Solves `H d = -g` by preconditioned CG, deflated against `z` when the
/// Hessian is positive along it. Stops early at negative curvature.
fn newton_direction(
    params: &Params,
    field: &RadialField,
    g: &[f64],
    z: Option<&[f64]>,
    precond: &SymTridiagonal,
    rel_tol: f64,
    max_iter: usize,
) -> Result<NewtonDirection> {
    let b: Vec<f64> = g.iter().map(|x| -x).collect();
    let apply = |v: &[f64]| hessian_apply(params, field, v);

    let deflation = match z {
        Some(z) => {
            let az = apply(z)?;
            let e = dot(z, &az);
            (e > 0.0).then(|| (z.to_vec(), az, e))
        }
        None => None,
    };
    let project = |y: &mut Vec<f64>| {
        if let Some((z, az, e)) = &deflation {
            let c = dot(az, y) / e;
            y.iter_mut().zip(z).for_each(|(yi, zi)| *yi -= c * zi);
        }
    };

    let mut x = vec![0.0; b.len()];
    let mut r = b.clone();
    if let Some((z, az, e)) = &deflation {
        let c = dot(z, &b) / e;
        x.iter_mut().zip(z).for_each(|(xi, zi)| *xi = c * zi);
        r.iter_mut().zip(az).for_each(|(ri, ai)| *ri -= c * ai);
    }
    let b_norm = dot(&b, &precond.solve_spd(&b)).sqrt();
    let mut y = precond.solve_spd(&r);
    let mut rs = dot(&r, &y);
    let mut dir = y.clone();
    project(&mut dir);
    let mut iterations = 0;
    while iterations < max_iter && rs.max(0.0).sqrt() > rel_tol * b_norm {
        let w = apply(&dir)?;
        let curvature = dot(&dir, &w);
        if curvature <= 0.0 {
            break;
        }
        iterations += 1;
        let a = rs / curvature;
        x.iter_mut().zip(&dir).for_each(|(xi, di)| *xi += a * di);
        r.iter_mut().zip(&w).for_each(|(ri, wi)| *ri -= a * wi);
        y = precond.solve_spd(&r);
        let rs_next = dot(&r, &y);
        let beta = rs_next / rs;
        rs = rs_next;
        project(&mut y);
        dir.iter_mut()
            .zip(&y)
            .for_each(|(di, yi)| *di = yi + beta * *di);
    }
    Ok(NewtonDirection {
        step: x,
        cg_iterations: iterations,
    })
}

struct State {
    field: RadialField,
    energy: EnergyReport,
    grad: Vec<f64>,
    grad_norm: f64,
}

fn evaluate(params: &Params, field: RadialField) -> Result<State> {
    let energy = energy(params, &field)?;
    let grad = gradient(params, &field)?;
    let grad_norm = field.grid().dual_norm(&grad);
    Ok(State {
        field,
        energy,
        grad,
        grad_norm,
    })
}

/// Round-off floor of an energy difference.
fn energy_noise(e: &EnergyReport) -> f64 {
    64.0 * f64::EPSILON * (e.kinetic.abs() + e.mass.abs() + e.nonlocal.abs() + e.potential.abs())
}

/// Backtracking along `d`; `None` when no acceptable step is found.
fn line_search(
    params: &Params,
    state: &State,
    d: &[f64],
    options: &SolveOptions,
    first: f64,
) -> Result<Option<(State, f64)>> {
    let slope = dot(&state.grad, d);
    if !(slope < 0.0) {
        return Ok(None);
    }
    let grid = *state.field.grid();
    let noise = energy_noise(&state.energy);
    let mut t = first;
    for _ in 0..=options.max_backtracks {
        let moved: Vec<f64> = state
            .field
            .values()
            .iter()
            .zip(d)
            .map(|(u, di)| u + t * di)
            .collect();
        if moved.iter().all(|v| v.is_finite()) {
            let trial = evaluate(params, RadialField::new(grid, moved)?)?;
            let decrease = state.energy.total + options.armijo * t * slope;
            if trial.energy.total <= decrease {
                return Ok(Some((trial, t)));
            }
            // predicted change below round-off: judge by the gradient instead
            if (options.armijo * t * slope).abs() < noise
                && trial.energy.total <= state.energy.total + noise
                && trial.grad_norm < state.grad_norm
            {
                return Ok(Some((trial, t)));
            }
        }
        t *= 0.5;
    }
    Ok(None)
}

/// Minimizes the energy from `init`: preconditioned Barzilai–Borwein steps,
/// then Newton steps with deflated CG inner solves.
pub fn solve(params: &Params, init: RadialField, options: &SolveOptions) -> Result<SolveReport> {
    let params = Params::new(params.p, params.omega)?;
    if !(options.tol > 0.0) {
        return Err(Error::domain("tol", options.tol, "(0, inf)"));
    }
    let k2 = match options.k2 {
        Some(k) => k,
        None => limit_context(&params, &Quadrature::default())?.k2,
    };
    Soliton::new(params.p, k2)?;
    let grid: RadialGrid = *init.grid();

    let mut state = evaluate(&params, init)?;
    let mut trace = vec![state.energy.total];
    let mut iterations = 0;
    let mut newton_steps = 0;
    let mut cg_iterations = 0;
    let mut gradient_steps = 0;
    let mut bb_step = 1.0;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut status = SolveStatus::MaxIterations;

    loop {
        if state.grad_norm < options.tol {
            status = SolveStatus::Converged;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        iterations += 1;
        let precond = preconditioner(&params, &state.field);
        let use_newton = options.newton
            && (state.grad_norm < options.newton_switch
                || gradient_steps >= options.gradient_budget);

        let mut accepted = None;
        if use_newton {
            let (rho, _) = profile_fit(params.p, k2, &state.field)?;
            let tangent = if rho > 0.5 * grid.radius && rho < grid.radius {
                Some(tangent_values(params.p, k2, &grid, rho)?)
            } else {
                None
            };
            let forcing = 0.1f64.min(state.grad_norm.sqrt());
            let dir = newton_direction(
                &params,
                &state.field,
                &state.grad,
                tangent.as_deref(),
                &precond,
                forcing,
                options.cg_max_iter,
            )?;
            cg_iterations += dir.cg_iterations;
            if let Some(found) = line_search(&params, &state, &dir.step, options, 1.0)? {
                newton_steps += 1;
                accepted = Some((found.0, dir.step, found.1));
            }
        }
        if accepted.is_none() {
            let d: Vec<f64> = precond.solve_spd(&state.grad).iter().map(|x| -x).collect();
            if let Some((s, y)) = &previous {
                let sy = dot(s, y);
                if sy > 0.0 {
                    let yy = dot(y, &precond.solve_spd(y));
                    bb_step = (sy / yy).clamp(1e-6, 1e3);
                }
            }
            if let Some(found) = line_search(&params, &state, &d, options, bb_step)? {
                gradient_steps += 1;
                accepted = Some((found.0, d, found.1));
            }
        }
        let Some((next, d, t)) = accepted else {
            status = SolveStatus::LineSearchFailed;
            break;
        };
        let s: Vec<f64> = d.iter().map(|x| t * x).collect();
        let y: Vec<f64> = next
            .grad
            .iter()
            .zip(&state.grad)
            .map(|(a, b)| a - b)
            .collect();
        previous = Some((s, y));
        state = next;
        trace.push(state.energy.total);
    }

    let (rho_fit, profile_error) = profile_fit(params.p, k2, &state.field)?;
    let u = state.field.values();
    let min_value = u.iter().copied().fold(f64::INFINITY, f64::min);
    let max_value = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(SolveReport {
        status,
        converged: status == SolveStatus::Converged,
        p: params.p,
        omega: params.omega,
        radius: grid.radius,
        nodes: grid.n,
        k2,
        energy: state.energy,
        grad_norm: state.grad_norm,
        iterations,
        newton_steps,
        cg_iterations,
        positive: max_value > 0.0 && min_value >= -1e-10 * scale,
        min_value,
        max_value,
        rho_fit,
        profile_error,
        energy_trace: trace,
        field: Some(state.field),
    })
}
