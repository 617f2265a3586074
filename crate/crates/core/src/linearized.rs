//! Linearization of the limit equation around a soliton `u = w_k`:
//!
//! `T[phi] = -phi'' + (omega + M^2/4 - p u^(p-1)) phi`,
//! `K[phi] = M (\int u phi) u`, `L = T + K`, with `M = \int u^2`.
//!
//! On a truncated Dirichlet mesh `L` is a symmetric tridiagonal matrix plus a
//! rank-one term, so its low spectrum comes from the inertia bisection in
//! [`crate::tridiag`]. The translation mode `w_k'` always lies (up to `O(h^2)`)
//! in the kernel; it is identified among the lowest eigenvectors by overlap and
//! excluded before the coercivity constant is read off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::line::{LineGrid, Profile1d};
use crate::soliton::Soliton;
use crate::tridiag::{SymTridiagonal, TridiagRankOne};

/// Relative translation-mode residual above which the mesh is reported as too coarse.
pub const COARSE_GRID_TOL: f64 = 1e-2;
/// Degeneracy threshold, multiplied by the operator norm bound.
pub const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub p: f64,
    pub omega: f64,
    pub k: f64,
    pub grid: LineGrid,
    /// `w_k` on the mesh
    pub profile: Vec<f64>,
    /// `M = \int u^2` by the mesh quadrature
    pub mass: f64,
    pub matrix: TridiagRankOne,
    /// `|L[w_k']| / |w_k'|`
    pub translation_residual: f64,
    pub coarse: bool,
}

pub fn assemble_l(p: f64, omega: f64, k: f64, grid: LineGrid) -> Result<LinearizedOperator> {
    let w = Soliton::new(p, k)?;
    let u: Vec<f64> = grid.nodes().iter().map(|&x| w.value(x)).collect();
    let h = grid.spacing();
    let mass = grid.dot(&u, &u);
    let shift = omega + 0.25 * mass * mass;
    let inv_h2 = 1.0 / (h * h);
    let diag: Vec<f64> = u
        .iter()
        .map(|&ui| 2.0 * inv_h2 + shift - p * ui.powf(p - 1.0))
        .collect();
    let off = vec![-inv_h2; grid.n - 1];
    // K[phi]_i = M h sum_j u_j phi_j u_i
    let matrix = TridiagRankOne::new(SymTridiagonal::new(diag, off), mass * h, u.clone());

    let translation: Vec<f64> = grid.nodes().iter().map(|&x| w.derivative(x)).collect();
    let lt = matrix.apply(&translation);
    let translation_residual = grid.norm(&lt) / grid.norm(&translation);
    Ok(LinearizedOperator {
        p,
        omega,
        k,
        grid,
        profile: u,
        mass,
        matrix,
        translation_residual,
        coarse: translation_residual > COARSE_GRID_TOL,
    })
}

impl LinearizedOperator {
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        self.matrix.apply(phi)
    }

    /// `T` alone (the rank-one part dropped).
    pub fn apply_local(&self, phi: &[f64]) -> Vec<f64> {
        self.matrix.tridiag.apply(phi)
    }

    pub fn translation_mode(&self) -> Vec<f64> {
        let w = Soliton::new(self.p, self.k).expect("validated at assembly");
        self.grid.nodes().iter().map(|&x| w.derivative(x)).collect()
    }

    pub fn norm_bound(&self) -> f64 {
        self.matrix.norm_bound()
    }
}

/// `(2/(p-1)) w_k + r w_k'`: the second kernel element at tangency.
pub fn degenerate_direction(p: f64, k: f64, grid: LineGrid) -> Result<Profile1d> {
    let w = Soliton::new(p, k)?;
    Ok(grid.sample(|x| 2.0 / (p - 1.0) * w.value(x) + x * w.derivative(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Lowest eigenvalues of the discrete `L`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Position of the translation mode in `eigenvalues`.
    pub translation_index: usize,
    /// Mesh cosine between that eigenvector and `w_k'`.
    pub translation_overlap: f64,
    /// Smallest eigenvalue on the complement of the translation mode.
    pub coercivity: f64,
    /// `|coercivity| < DEGENERACY_TOL * |L|`
    pub degenerate: bool,
    pub degeneracy_threshold: f64,
    /// Eigenvector belonging to `coercivity`, unit in the mesh norm.
    #[serde(skip)]
    pub coercivity_vector: Vec<f64>,
}

/// Low spectrum of `L` with the translation mode deflated.
pub fn coercivity_constant(op: &LinearizedOperator, count: usize) -> Result<Spectrum> {
    let count = count.clamp(2, op.grid.n);
    let translation = op.translation_mode();
    let grid = op.grid;
    let t_norm = grid.norm(&translation);

    let mut eigenvalues = Vec::with_capacity(count);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for i in 0..count {
        let lambda = op.matrix.eigenvalue(i);
        // project out earlier vectors only inside a near-degenerate cluster
        let width = 1e-6 * op.norm_bound().max(1.0);
        let cluster: Vec<Vec<f64>> = eigenvalues
            .iter()
            .zip(&vectors)
            .filter(|pair: &(&f64, &Vec<f64>)| (lambda - *pair.0).abs() < width)
            .map(|(_, v)| v.clone())
            .collect();
        let mut v = op.matrix.eigenvector(lambda, &cluster);
        let nrm = grid.norm(&v);
        v.iter_mut().for_each(|x| *x /= nrm);
        eigenvalues.push(lambda);
        vectors.push(v);
    }

    let overlaps: Vec<f64> = vectors
        .iter()
        .map(|v| (grid.dot(v, &translation) / t_norm).abs())
        .collect();
    let (translation_index, &translation_overlap) = overlaps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Solver {
            iterations: 0,
            reason: "empty spectrum".into(),
        })?;
    let coercive_index = if translation_index == 0 { 1 } else { 0 };
    let coercivity = eigenvalues[coercive_index];
    let threshold = DEGENERACY_TOL * op.norm_bound();
    Ok(Spectrum {
        coercivity,
        degenerate: coercivity.abs() < threshold,
        degeneracy_threshold: threshold,
        coercivity_vector: vectors.swap_remove(coercive_index),
        eigenvalues,
        translation_index,
        translation_overlap,
    })
}
