use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{RadialField, RadialGrid};
use crate::soliton::{check_exponent, Params, Soliton};

/// `phi_R`: 0 below `R/4`, 1 above `R/2`, quintic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn for_radius(radius: f64) -> Self {
        Self {
            inner: 0.25 * radius,
            outer: 0.5 * radius,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        if r <= self.inner {
            return 0.0;
        }
        if r >= self.outer {
            return 1.0;
        }
        let t = (r - self.inner) / (self.outer - self.inner);
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r <= self.inner || r >= self.outer {
            return 0.0;
        }
        let width = self.outer - self.inner;
        let t = (r - self.inner) / width;
        30.0 * t * t * (1.0 - t) * (1.0 - t) / width
    }
}

/// Admissible `alpha` window `(max(1/2, 1/p), 1)`.
fn alpha_window(p: f64) -> (f64, f64) {
    (0.5f64.max(1.0 / p), 1.0)
}

/// Admissible `beta` window `(1, min(2, p) alpha)`.
fn beta_window(p: f64, alpha: f64) -> (f64, f64) {
    (1.0, p.min(2.0) * alpha)
}

/// Default exponents, placed at 95% of the way across each admissible window.
pub fn default_exponents(p: f64) -> (f64, f64) {
    let (lo, hi) = alpha_window(p);
    let alpha = lo + 0.95 * (hi - lo);
    let (blo, bhi) = beta_window(p, alpha);
    (alpha, blo + 0.95 * (bhi - blo))
}

/// `I_R = [R - beta log R / (2 sqrt k2), R - alpha log R / (2 sqrt k2)]`.
pub fn scan_interval(radius: f64, k2: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let scale = radius.ln() / (2.0 * k2.sqrt());
    (radius - beta * scale, radius - alpha * scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub p: f64,
    pub radius: f64,
    pub rho: f64,
    pub k2: f64,
    pub cutoff: Cutoff,
    pub alpha: f64,
    pub beta: f64,
}

impl AnsatzSpec {
    pub fn new(p: f64, radius: f64, k2: f64, rho: f64, alpha: f64, beta: f64) -> Result<Self> {
        let spec = Self {
            p,
            radius,
            rho,
            k2,
            cutoff: Cutoff::for_radius(radius),
            alpha,
            beta,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Spec with the default exponents.
    pub fn with_defaults(p: f64, radius: f64, k2: f64, rho: f64) -> Result<Self> {
        check_exponent(p)?;
        let (alpha, beta) = default_exponents(p);
        Self::new(p, radius, k2, rho, alpha, beta)
    }

    pub fn interval(&self) -> (f64, f64) {
        scan_interval(self.radius, self.k2, self.alpha, self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent(self.p)?;
        if !(self.k2 > 0.0) || !self.k2.is_finite() {
            return Err(Error::domain("k2", self.k2, "(0, inf)"));
        }
        if !(self.radius > 1.0) || !self.radius.is_finite() {
            return Err(Error::domain("radius", self.radius, "(1, inf)"));
        }
        let (alo, ahi) = alpha_window(self.p);
        if !(self.alpha > alo && self.alpha < ahi) {
            return Err(Error::Ansatz(format!(
                "alpha = {} outside ({alo}, {ahi})",
                self.alpha
            )));
        }
        let (blo, bhi) = beta_window(self.p, self.alpha);
        if !(self.beta > blo && self.beta < bhi) {
            return Err(Error::Ansatz(format!(
                "beta = {} outside ({blo}, {bhi})",
                self.beta
            )));
        }
        let (lo, hi) = self.interval();
        if !(self.rho >= lo && self.rho <= hi) {
            return Err(Error::Ansatz(format!(
                "rho = {} outside [{lo}, {hi}]",
                self.rho
            )));
        }
        Ok(())
    }
}

fn check_grid(params: &Params, grid: &RadialGrid, spec: &AnsatzSpec) -> Result<()> {
    spec.validate()?;
    Params::new(params.p, params.omega)?;
    if params.p != spec.p {
        return Err(Error::Ansatz(format!(
            "ansatz exponent {} differs from p = {}",
            spec.p, params.p
        )));
    }
    if grid.radius != spec.radius {
        return Err(Error::Ansatz(format!(
            "ansatz radius {} differs from grid radius {}",
            spec.radius, grid.radius
        )));
    }
    Ok(())
}

/// `phi_R (U(r - rho) - U(R - rho) e^(sqrt(k2) (r - R)))` at the grid nodes,
/// without the window checks.
pub(crate) fn ansatz_values(p: f64, k2: f64, grid: &RadialGrid, rho: f64) -> Result<Vec<f64>> {
    let u = Soliton::new(p, k2)?;
    let cutoff = Cutoff::for_radius(grid.radius);
    let sk = k2.sqrt();
    let edge = u.value(grid.radius - rho);
    Ok(grid
        .nodes()
        .into_iter()
        .map(|r| {
            let phi = cutoff.value(r);
            if phi == 0.0 {
                return 0.0;
            }
            phi * (u.value(r - rho) - edge * (sk * (r - grid.radius)).exp())
        })
        .collect())
}

/// `d/d rho` of [`ansatz_values`], without the window checks.
pub(crate) fn tangent_values(p: f64, k2: f64, grid: &RadialGrid, rho: f64) -> Result<Vec<f64>> {
    let u = Soliton::new(p, k2)?;
    let cutoff = Cutoff::for_radius(grid.radius);
    let sk = k2.sqrt();
    let edge = u.derivative(grid.radius - rho);
    Ok(grid
        .nodes()
        .into_iter()
        .map(|r| {
            let phi = cutoff.value(r);
            if phi == 0.0 {
                return 0.0;
            }
            phi * (-u.derivative(r - rho) + edge * (sk * (r - grid.radius)).exp())
        })
        .collect())
}

pub fn build_ansatz(params: &Params, grid: &RadialGrid, spec: &AnsatzSpec) -> Result<RadialField> {
    check_grid(params, grid, spec)?;
    RadialField::new(*grid, ansatz_values(spec.p, spec.k2, grid, spec.rho)?)
}

pub fn tangent_direction(
    params: &Params,
    grid: &RadialGrid,
    spec: &AnsatzSpec,
) -> Result<RadialField> {
    check_grid(params, grid, spec)?;
    RadialField::new(*grid, tangent_values(spec.p, spec.k2, grid, spec.rho)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::solve_k;

    fn k2() -> f64 {
        solve_k(Params::new(2.0, 0.05).unwrap(), 6.0).k2().unwrap()
    }

    fn setup(radius: f64) -> (Params, RadialGrid, AnsatzSpec) {
        let params = Params::new(2.0, 0.05).unwrap();
        let grid = RadialGrid::with_default_nodes(radius).unwrap();
        let (alpha, beta) = default_exponents(2.0);
        let (lo, hi) = scan_interval(radius, k2(), alpha, beta);
        let spec = AnsatzSpec::new(2.0, radius, k2(), 0.5 * (lo + hi), alpha, beta).unwrap();
        (params, grid, spec)
    }

    #[test]
    fn cutoff_shape() {
        let c = Cutoff::for_radius(40.0);
        assert_eq!(c.value(10.0), 0.0);
        assert_eq!(c.value(20.0), 1.0);
        assert_eq!(c.value(15.0), 0.5);
        let mut prev = 0.0;
        for i in 0..=200 {
            let r = 10.0 + 0.05 * i as f64;
            let v = c.value(r);
            assert!(v >= prev);
            prev = v;
            // |phi'| <= 15/8 / (R/4)
            assert!(c.derivative(r) <= 1.875 / 10.0 + 1e-15);
        }
        let fd = (c.value(13.0 + 1e-6) - c.value(13.0 - 1e-6)) / 2e-6;
        assert!((fd - c.derivative(13.0)).abs() < 1e-8);
    }

    #[test]
    fn default_exponents_lie_in_windows() {
        for p in [1.1, 1.5, 1.9, 2.0, 2.5, 2.95] {
            let (a, b) = default_exponents(p);
            let (alo, ahi) = alpha_window(p);
            let (blo, bhi) = beta_window(p, a);
            assert!(a > alo && a < ahi && b > blo && b < bhi, "p = {p}");
        }
    }

    #[test]
    fn spec_window_errors() {
        let k = k2();
        let (lo, hi) = scan_interval(80.0, k, 0.9, 1.5);
        assert!(AnsatzSpec::new(2.0, 80.0, k, 0.5 * (lo + hi), 0.9, 1.5).is_ok());
        assert!(AnsatzSpec::new(2.0, 80.0, k, hi + 0.1, 0.9, 1.5).is_err());
        assert!(AnsatzSpec::new(2.0, 80.0, k, lo - 0.1, 0.9, 1.5).is_err());
        // alpha below 1/2, beta above 2 alpha, beta below 1
        assert!(AnsatzSpec::new(2.0, 80.0, k, 75.0, 0.4, 1.5).is_err());
        assert!(AnsatzSpec::new(2.0, 80.0, k, 75.0, 0.6, 1.3).is_err());
        assert!(AnsatzSpec::new(2.0, 80.0, k, 75.0, 0.9, 0.95).is_err());
        // alpha floor is 1/p for p < 2
        assert!(AnsatzSpec::new(1.5, 80.0, k, 75.0, 0.6, 1.1).is_err());
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let (params, _, spec) = setup(80.0);
        let other = RadialGrid::new(60.0, 2400).unwrap();
        assert!(build_ansatz(&params, &other, &spec).is_err());
        let wrong_p = Params::new(2.5, 0.05).unwrap();
        assert!(build_ansatz(
            &wrong_p,
            &RadialGrid::with_default_nodes(80.0).unwrap(),
            &spec
        )
        .is_err());
    }

    #[test]
    fn ansatz_support_and_boundary() {
        let (params, grid, spec) = setup(80.0);
        let z = build_ansatz(&params, &grid, &spec).unwrap();
        assert_eq!(z.value(grid.n + 1), 0.0);
        for (i, &v) in z.values().iter().enumerate() {
            if grid.r(i) <= 20.0 {
                assert_eq!(v, 0.0);
            }
        }
        // the formula itself vanishes at r = R
        let u = Soliton::new(2.0, spec.k2).unwrap();
        let edge = u.value(80.0 - spec.rho);
        assert_eq!(u.value(80.0 - spec.rho) - edge * (0.0f64).exp(), 0.0);
    }

    #[test]
    fn ansatz_peak_matches_soliton() {
        let radius = 100.0;
        let (params, _, spec) = setup(radius);
        // a grid with a node exactly at rho
        let h = 0.025;
        let grid = RadialGrid::new(radius, (radius / h).round() as usize - 1).unwrap();
        let rho = (spec.rho / h).round() * h;
        let spec = AnsatzSpec { rho, ..spec };
        let z = build_ansatz(&params, &grid, &spec).unwrap();
        let i = (rho / grid.spacing()).round() as usize;
        let u = Soliton::new(2.0, spec.k2).unwrap();
        let peak = u.peak();
        let boundary_term = u.value(radius - rho) * (-spec.k2.sqrt() * (radius - rho)).exp();
        assert!((z.values()[i] - (peak - boundary_term)).abs() < 1e-14);
        assert!(boundary_term < 1e-2 * peak);
        assert!((peak - 1.5 * spec.k2).abs() < 1e-15);
    }

    #[test]
    fn tangent_matches_difference_quotient() {
        let (params, grid, spec) = setup(40.0);
        let t = tangent_direction(&params, &grid, &spec).unwrap();
        let errs: Vec<f64> = [1e-3, 5e-4]
            .iter()
            .map(|&eps| {
                let moved = AnsatzSpec {
                    rho: spec.rho + eps,
                    ..spec
                };
                let a = build_ansatz(&params, &grid, &moved).unwrap();
                let b = build_ansatz(&params, &grid, &spec).unwrap();
                a.values()
                    .iter()
                    .zip(b.values())
                    .zip(t.values())
                    .map(|((x, y), d)| ((x - y) / eps - d).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[0] < 1e-2);
        // first order in eps
        assert!((errs[0] / errs[1] - 2.0).abs() < 0.1, "{errs:?}");
        for (i, &v) in t.values().iter().enumerate() {
            if grid.r(i) <= 10.0 {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn profile_and_translation_decouple_at_large_radius() {
        let ratio = |radius: f64| {
            let (params, grid, spec) = setup(radius);
            let z = build_ansatz(&params, &grid, &spec).unwrap();
            let t = tangent_direction(&params, &grid, &spec).unwrap();
            let inner = grid.dot_h1(t.values(), z.values()).abs();
            let scale = grid.dot_h1(t.values(), t.values()).sqrt()
                * grid.dot_h1(z.values(), z.values()).sqrt();
            (inner, scale, inner / scale)
        };
        let (i40, s40, r40) = ratio(40.0);
        let (i80, s80, r80) = ratio(80.0);
        assert!(i80 < 2.0 * i40, "inner product stays O(1): {i40} {i80}");
        assert!(s80 > 1.7 * s40, "norm product grows like R: {s40} {s80}");
        assert!(r80 < r40);
    }
}
