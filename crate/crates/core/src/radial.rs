//! Radial discretization of the ball problem.
//!
//! Nodes `r_i = i h`, `i = 0..=n+1`, `h = R/(n+1)`. The unknowns are the node
//! values at `i = 0..=n`: node `0` carries regularity (no boundary condition),
//! node `n+1 = R` is the structural Dirichlet zero.
//!
//! The discrete energy (everything divided by `2 pi`) is
//!
//! ```text
//! E = 1/2 sum_i ((u_{i+1}-u_i)/h)^2 r_{i+1/2} h            kinetic
//!   + omega/2 sum_i w_i r_i u_i^2                          mass
//!   + 1/2 sum_i w_i u_i^2 H_i^2 / r_i                      nonlocal
//!   - 1/(p+1) sum_i w_i r_i |u_i|^(p+1)                    potential
//! ```
//!
//! with trapezoid weights `w_i` and `H_i = h(r_i)` the trapezoid prefix of
//! `s u^2 / 2`. The gradient and Hessian below are exact derivatives of this
//! sum. Dividing the gradient by the lumped mass `h r_i` reproduces the
//! second-order strong form of the Euler–Lagrange equation node by node.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::soliton::Params;

pub const MIN_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub radius: f64,
    /// interior node count
    pub n: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain("radius", radius, "(0, inf)"));
        }
        if n < MIN_NODES {
            return Err(Error::domain("nodes", n as f64, "[16, inf)"));
        }
        Ok(Self { radius, n })
    }

    /// `n = ceil(40 R)`, i.e. `h` close to 0.025.
    pub fn with_default_nodes(radius: f64) -> Result<Self> {
        Self::new(radius, default_nodes(radius))
    }

    pub fn spacing(&self) -> f64 {
        self.radius / (self.n as f64 + 1.0)
    }

    /// `i h`, and exactly `R` at the Dirichlet node `n + 1`.
    pub fn r(&self, i: usize) -> f64 {
        if i == self.n + 1 {
            self.radius
        } else {
            i as f64 * self.spacing()
        }
    }

    /// Number of stored values (`n + 1`, nodes `0..=n`).
    pub fn unknowns(&self) -> usize {
        self.n + 1
    }

    /// Radii of the stored nodes.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.unknowns()).map(|i| self.r(i)).collect()
    }

    /// Control-volume area over `2 pi`: `h^2/8` at the centre, `h r_i` elsewhere.
    pub fn lumped_mass(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 {
            h * h / 8.0
        } else {
            h * self.r(i)
        }
    }

    /// `2 pi sum m_i a_i b_i`: the r-weighted `L^2` product on the disk.
    pub fn dot_r(&self, a: &[f64], b: &[f64]) -> f64 {
        2.0 * PI
            * a.iter()
                .zip(b)
                .enumerate()
                .map(|(i, (x, y))| self.lumped_mass(i) * x * y)
                .sum::<f64>()
    }

    /// Radial `H^1` product `2 pi \int (a'b' + ab) r dr` with the energy's stencils.
    pub fn dot_h1(&self, a: &[f64], b: &[f64]) -> f64 {
        let h = self.spacing();
        let at = |v: &[f64], i: usize| if i < v.len() { v[i] } else { 0.0 };
        let grad: f64 = (0..self.unknowns())
            .map(|i| {
                let da = at(a, i + 1) - a[i];
                let db = at(b, i + 1) - b[i];
                da * db / h * (self.r(i) + 0.5 * h)
            })
            .sum();
        2.0 * PI * grad + self.dot_r(a, b)
    }

    /// Dual norm of a gradient vector with respect to [`RadialGrid::dot_r`].
    pub fn dual_norm(&self, g: &[f64]) -> f64 {
        (g.iter()
            .enumerate()
            .map(|(i, x)| x * x / (2.0 * PI * self.lumped_mass(i)))
            .sum::<f64>())
        .sqrt()
    }
}

pub fn default_nodes(radius: f64) -> usize {
    ((40.0 * radius).ceil() as usize).max(MIN_NODES)
}

/// Node values plus the cached prefix `H` and suffix `Tail` integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    u: Vec<f64>,
    gauge: Vec<f64>,
    tail: Vec<f64>,
}

impl RadialField {
    /// `u` holds the values at nodes `0..=n`.
    pub fn new(grid: RadialGrid, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.unknowns() {
            return Err(Error::Field(format!(
                "expected {} node values, got {}",
                grid.unknowns(),
                u.len()
            )));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::Field(format!("non-finite value at node {i}")));
        }
        let (gauge, tail) = caches(&grid, &u);
        Ok(Self {
            grid,
            u,
            gauge,
            tail,
        })
    }

    /// All `n + 2` node values including `r = R`, which must be zero.
    pub fn from_all_nodes(grid: RadialGrid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n + 2 {
            return Err(Error::Field(format!(
                "expected {} node values, got {}",
                grid.n + 2,
                values.len()
            )));
        }
        let last = values.pop().unwrap_or(0.0);
        if last != 0.0 {
            return Err(Error::Field(format!(
                "u(R) = {last}, Dirichlet value must be 0"
            )));
        }
        Self::new(grid, values)
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self::new(grid, vec![0.0; grid.unknowns()]).expect("zero field")
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: RadialGrid, f: F) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    /// Value at node `i` in `0..=n+1`.
    pub fn value(&self, i: usize) -> f64 {
        self.u.get(i).copied().unwrap_or(0.0)
    }

    /// `H_i ~ 1/2 \int_0^{r_i} s u^2 ds` at nodes `0..=n+1`.
    pub fn gauge(&self) -> &[f64] {
        &self.gauge
    }

    /// `Tail_i ~ \int_{r_i}^R (H(s)/s) u^2 ds` at nodes `0..=n+1`.
    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    pub fn into_values(self) -> Vec<f64> {
        self.u
    }

    pub fn negative_nodes(&self) -> usize {
        self.u.iter().filter(|&&v| v < 0.0).count()
    }
}

fn caches(grid: &RadialGrid, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n;
    let h = grid.spacing();
    let at = |i: usize| if i <= n { u[i] } else { 0.0 };
    let mut gauge = vec![0.0; n + 2];
    for i in 1..=n + 1 {
        let a0 = grid.r(i - 1) * at(i - 1).powi(2);
        let a1 = grid.r(i) * at(i).powi(2);
        gauge[i] = gauge[i - 1] + 0.25 * h * (a0 + a1);
    }
    let q = |i: usize| {
        if i == 0 {
            0.0
        } else {
            gauge[i] * at(i).powi(2) / grid.r(i)
        }
    };
    let mut tail = vec![0.0; n + 2];
    for i in (0..=n).rev() {
        tail[i] = tail[i + 1] + 0.5 * h * (q(i) + q(i + 1));
    }
    (gauge, tail)
}

/// `I_R` and its four summands, all including the `2 pi` factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    pub kinetic: f64,
    pub mass: f64,
    pub nonlocal: f64,
    pub potential: f64,
    #[serde(skip)]
    pub negative_nodes: usize,
}

fn check_params(params: &Params) -> Result<()> {
    Params::new(params.p, params.omega).map(|_| ())
}

fn trapezoid_weight(grid: &RadialGrid, i: usize) -> f64 {
    let h = grid.spacing();
    if i == 0 || i == grid.n + 1 {
        0.5 * h
    } else {
        h
    }
}

pub fn energy(params: &Params, field: &RadialField) -> Result<EnergyReport> {
    check_params(params)?;
    let grid = field.grid;
    let h = grid.spacing();
    let p = params.p;
    let u = &field.u;
    let mut kinetic = 0.0;
    let mut mass = 0.0;
    let mut nonlocal = 0.0;
    let mut potential = 0.0;
    #[allow(clippy::needless_range_loop)]
    for i in 0..=grid.n {
        let du = field.value(i + 1) - u[i];
        kinetic += du * du / h * (grid.r(i) + 0.5 * h);
        let r = grid.r(i);
        let w = trapezoid_weight(&grid, i);
        let u2 = u[i] * u[i];
        mass += w * r * u2;
        potential += w * r * u[i].abs().powf(p + 1.0);
        if i > 0 {
            nonlocal += w * u2 * field.gauge[i].powi(2) / r;
        }
    }
    let scale = 2.0 * PI;
    let kinetic = scale * 0.5 * kinetic;
    let mass = scale * 0.5 * params.omega * mass;
    let nonlocal = scale * 0.5 * nonlocal;
    let potential = scale * potential / (p + 1.0);
    Ok(EnergyReport {
        total: kinetic + mass + nonlocal - potential,
        kinetic,
        mass,
        nonlocal,
        potential,
        negative_nodes: field.negative_nodes(),
    })
}

/// Stiffness part: derivative of the kinetic sum, without the `2 pi`.
fn kinetic_apply(grid: &RadialGrid, v: &[f64]) -> Vec<f64> {
    let h = grid.spacing();
    let n = grid.n;
    let at = |i: usize| if i <= n { v[i] } else { 0.0 };
    (0..=n)
        .map(|k| {
            let right = (at(k + 1) - v[k]) * (grid.r(k) + 0.5 * h);
            let left = if k > 0 {
                (v[k] - v[k - 1]) * (grid.r(k) - 0.5 * h)
            } else {
                0.0
            };
            (left - right) / h
        })
        .collect()
}

/// Exact gradient of the discrete energy, `O(n)` through the cached suffix `Tail`.
pub fn gradient(params: &Params, field: &RadialField) -> Result<Vec<f64>> {
    check_params(params)?;
    let grid = field.grid;
    let h = grid.spacing();
    let p = params.p;
    let mut g = kinetic_apply(&grid, &field.u);
    for (k, gk) in g.iter_mut().enumerate().skip(1) {
        let u = field.u[k];
        let r = grid.r(k);
        let m = h * r;
        let hk = field.gauge[k];
        *gk += m
            * (params.omega * u + u * hk * hk / (r * r) + u * field.tail[k]
                - u.abs().powf(p - 1.0) * u);
    }
    g.iter_mut().for_each(|x| *x *= 2.0 * PI);
    Ok(g)
}

/// The same gradient assembled from the prefix form: for every outer node the
/// derivative of its inner prefix integral is accumulated directly. `O(n^2)`;
/// kept as an independent assembly of the nonlocal term.
pub fn gradient_prefix_form(params: &Params, field: &RadialField) -> Result<Vec<f64>> {
    check_params(params)?;
    let grid = field.grid;
    let n = grid.n;
    let h = grid.spacing();
    let p = params.p;
    let u = &field.u;
    let mut g = kinetic_apply(&grid, u);
    // G_i = 2 H_i; N = 1/8 sum_i w_i u_i^2 G_i^2 / r_i
    for k in 1..=n {
        let r = grid.r(k);
        let w = trapezoid_weight(&grid, k);
        let gk = 2.0 * field.gauge[k];
        let mut d = 0.25 * w * u[k] * gk * gk / r;
        // dG_i/du_k = h c_ik 2 r_k u_k for every outer i >= k
        for i in k..=n {
            let ri = grid.r(i);
            let wi = trapezoid_weight(&grid, i);
            let gi = 2.0 * field.gauge[i];
            let c = if i == k { 0.5 } else { 1.0 };
            d += 0.125 * wi * u[i] * u[i] / ri * 2.0 * gi * h * c * 2.0 * r * u[k];
        }
        g[k] += d + w * r * (params.omega * u[k] - u[k].abs().powf(p - 1.0) * u[k]);
    }
    g.iter_mut().for_each(|x| *x *= 2.0 * PI);
    Ok(g)
}

/// Exact Hessian-vector product of the discrete energy, `O(n)`.
pub fn hessian_apply(params: &Params, field: &RadialField, v: &[f64]) -> Result<Vec<f64>> {
    check_params(params)?;
    let grid = field.grid;
    let n = grid.n;
    if v.len() != grid.unknowns() {
        return Err(Error::Field(format!(
            "direction has {} values, expected {}",
            v.len(),
            grid.unknowns()
        )));
    }
    let h = grid.spacing();
    let p = params.p;
    let u = &field.u;
    let gauge = &field.gauge;
    let at = |x: &[f64], i: usize| if i <= n { x[i] } else { 0.0 };

    // dH_i: trapezoid prefix of r u v
    let mut d_gauge = vec![0.0; n + 2];
    for i in 1..=n + 1 {
        let a0 = grid.r(i - 1) * at(u, i - 1) * at(v, i - 1);
        let a1 = grid.r(i) * at(u, i) * at(v, i);
        d_gauge[i] = d_gauge[i - 1] + 0.5 * h * (a0 + a1);
    }
    // dq_i = (dH_i u_i^2 + 2 H_i u_i v_i) / r_i, suffix-summed into dTail
    let dq = |i: usize| {
        if i == 0 || i > n {
            0.0
        } else {
            (d_gauge[i] * u[i] * u[i] + 2.0 * gauge[i] * u[i] * v[i]) / grid.r(i)
        }
    };
    let mut d_tail = vec![0.0; n + 2];
    for i in (0..=n).rev() {
        d_tail[i] = d_tail[i + 1] + 0.5 * h * (dq(i) + dq(i + 1));
    }

    let mut out = kinetic_apply(&grid, v);
    for (k, ok) in out.iter_mut().enumerate().skip(1) {
        let r = grid.r(k);
        let m = h * r;
        let hk = gauge[k];
        *ok += m
            * (params.omega * v[k] - p * u[k].abs().powf(p - 1.0) * v[k]
                + (v[k] * hk * hk + 2.0 * u[k] * hk * d_gauge[k]) / (r * r)
                + v[k] * field.tail[k]
                + u[k] * d_tail[k]);
    }
    out.iter_mut().for_each(|x| *x *= 2.0 * PI);
    Ok(out)
}

/// Strong-form residual of the Euler–Lagrange equation at nodes `0..=n`:
/// `-(u'' + u'/r) + (omega + H^2/r^2 + Tail) u - |u|^(p-1) u`, with the
/// regularized Laplacian `2 u''(0)` at the centre.
pub fn el_residual(params: &Params, field: &RadialField) -> Result<Vec<f64>> {
    check_params(params)?;
    let grid = field.grid;
    let h = grid.spacing();
    let p = params.p;
    let u = &field.u;
    Ok((0..=grid.n)
        .map(|k| {
            let laplacian = if k == 0 {
                4.0 * (field.value(1) - u[0]) / (h * h)
            } else {
                let r = grid.r(k);
                let up = field.value(k + 1);
                (up - 2.0 * u[k] + u[k - 1]) / (h * h) + (up - u[k - 1]) / (2.0 * h * r)
            };
            let centrifugal = if k == 0 {
                0.0
            } else {
                (field.gauge[k] / grid.r(k)).powi(2)
            };
            -laplacian + (params.omega + centrifugal + field.tail[k]) * u[k]
                - u[k].abs().powf(p - 1.0) * u[k]
        })
        .collect())
}

/// `|grad|` in the dual of the r-weighted `L^2` product.
pub fn gradient_norm(grid: &RadialGrid, g: &[f64]) -> f64 {
    grid.dual_norm(g)
}
