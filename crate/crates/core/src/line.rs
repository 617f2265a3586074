//! Truncated uniform mesh on `[-X, X]` with homogeneous Dirichlet ends, used for
//! the one-dimensional limit problem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub half_width: f64,
    /// interior node count
    pub n: usize,
}

impl LineGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::domain("half_width", half_width, "(0, inf)"));
        }
        if n < 3 {
            return Err(Error::domain("n", n as f64, "[3, inf)"));
        }
        Ok(Self { half_width, n })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n as f64 + 1.0)
    }

    /// Coordinate of interior node `i` (0-based), symmetric about the origin.
    pub fn x(&self, i: usize) -> f64 {
        let h = self.spacing();
        // written so that x(i) == -x(n-1-i) bit for bit
        (i as f64 - 0.5 * (self.n as f64 - 1.0)) * h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Profile1d {
        Profile1d {
            grid: *self,
            values: (0..self.n).map(|i| f(self.x(i))).collect(),
        }
    }

    /// Mesh inner product `h * sum(a_i b_i)` (trapezoid with zero ends).
    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.spacing() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.dot(a, a).sqrt()
    }
}

/// Node values of a function on a [`LineGrid`]; zero beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1d {
    pub grid: LineGrid,
    pub values: Vec<f64>,
}

impl Profile1d {
    pub fn new(grid: LineGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Field(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn integral<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.grid.spacing() * self.values.iter().map(|&v| f(v)).sum::<f64>()
    }

    /// Sixth-order central differences with zero padding outside the mesh.
    pub fn derivative(&self) -> Vec<f64> {
        const C: [f64; 3] = [45.0, -9.0, 1.0];
        let n = self.values.len() as isize;
        let at = |i: isize| {
            if (0..n).contains(&i) {
                self.values[i as usize]
            } else {
                0.0
            }
        };
        let h = self.grid.spacing();
        (0..n)
            .map(|i| {
                C.iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let s = j as isize + 1;
                        c * (at(i + s) - at(i - s))
                    })
                    .sum::<f64>()
                    / (60.0 * h)
            })
            .collect()
    }

    pub fn edge_magnitude(&self) -> f64 {
        let first = self.values.first().copied().unwrap_or(0.0).abs();
        let last = self.values.last().copied().unwrap_or(0.0).abs();
        first.max(last)
    }
}
