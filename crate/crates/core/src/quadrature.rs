//! Composite Gauss–Legendre quadrature with a panel-doubling convergence check.

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots are symmetric; Newton from the Chebyshev-like initial guess.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over [a, b] with a single panel.
    pub fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Integrates `f` over [a, b] with `panels` equal panels.
    pub fn composite<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, panels: usize) -> f64 {
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|j| {
                let lo = a + j as f64 * width;
                self.panel(f, lo, lo + width)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive composite rule: panel counts double until two successive
/// estimates agree to `tol` (absolute, or relative for large values).
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub tol: f64,
    pub order: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            order: 16,
            initial_panels: 16,
            max_panels: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureValue {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadratureValue> {
        let rule = GaussLegendre::new(self.order);
        let mut panels = self.initial_panels.max(1);
        let mut coarse = rule.composite(&f, a, b, panels);
        let mut achieved = f64::INFINITY;
        while panels * 2 <= self.max_panels {
            panels *= 2;
            let fine = rule.composite(&f, a, b, panels);
            achieved = (fine - coarse).abs();
            if achieved <= self.tol * fine.abs().max(1.0) {
                return Ok(QuadratureValue {
                    value: fine,
                    error_estimate: achieved,
                    panels,
                });
            }
            coarse = fine;
        }
        Err(Error::Quadrature {
            achieved,
            requested: self.tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 points
        let v = rule.panel(&|x: f64| x.powi(14) + 3.0 * x.powi(3), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_gaussian() {
        let q = Quadrature::default();
        let v = q.integrate(|x: f64| (-x * x).exp(), -10.0, 10.0).unwrap();
        assert!((v.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence() {
        let q = Quadrature {
            max_panels: 32,
            tol: 1e-14,
            ..Quadrature::default()
        };
        let err = q.integrate(|x: f64| x.abs().sqrt() * (50.0 * x).sin(), -1.0, 1.3);
        assert!(matches!(err, Err(Error::Quadrature { .. })));
    }
}
