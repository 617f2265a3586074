//! Closed-form one-dimensional solitons of `-w'' + k w = w^p`.
//!
//! `w_1(r) = ((2/(p+1)) cosh^2((p-1) r / 2))^(1/(1-p))` and
//! `w_k(r) = k^(1/(p-1)) w_1(sqrt(k) r)`. Evaluation goes through logarithms so
//! that large `|r|` underflows cleanly instead of overflowing `cosh`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// The exponent/frequency pair of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub omega: f64,
}

impl Params {
    pub fn new(p: f64, omega: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain("omega", omega, "(0, inf)"));
        }
        Ok(Self { p, omega })
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p < 3.0 {
        Ok(())
    } else {
        Err(Error::domain("p", p, "(1,3)"))
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("k", k, "(0, inf)"))
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// A soliton `w_k` with the exponent and spectral parameter already validated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Soliton {
    p: f64,
    k: f64,
    sqrt_k: f64,
    ln_amplitude: f64,
}

impl Soliton {
    pub fn new(p: f64, k: f64) -> Result<Self> {
        check_exponent(p)?;
        check_k(k)?;
        Ok(Self::unchecked(p, k))
    }

    fn unchecked(p: f64, k: f64) -> Self {
        Self {
            p,
            k,
            sqrt_k: k.sqrt(),
            ln_amplitude: k.ln() / (p - 1.0),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Peak value `w_k(0) = k^(1/(p-1)) ((p+1)/2)^(1/(p-1))`.
    pub fn peak(&self) -> f64 {
        self.value(0.0)
    }

    pub fn value(&self, r: f64) -> f64 {
        let p = self.p;
        let x = 0.5 * (p - 1.0) * self.sqrt_k * r;
        let ln_w1 = ((2.0 / (p + 1.0)).ln() + 2.0 * ln_cosh(x)) / (1.0 - p);
        (self.ln_amplitude + ln_w1).exp()
    }

    /// `w_k'(r) = -sqrt(k) tanh((p-1) sqrt(k) r / 2) w_k(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        let x = 0.5 * (self.p - 1.0) * self.sqrt_k * r;
        -self.sqrt_k * x.tanh() * self.value(r)
    }

    /// Second derivative from the equation itself: `w'' = k w - w^p`.
    pub fn second_derivative(&self, r: f64) -> f64 {
        let w = self.value(r);
        self.k * w - w.powf(self.p)
    }

    /// `-w'^2/2 + k w^2/2 - w^(p+1)/(p+1)`, identically zero along the orbit.
    pub fn hamiltonian(&self, r: f64) -> f64 {
        let w = self.value(r);
        let dw = self.derivative(r);
        -0.5 * dw * dw + 0.5 * self.k * w * w - w.powf(self.p + 1.0) / (self.p + 1.0)
    }

    /// Half-width beyond which `w_k^2` drops below `eps` relative to the core.
    pub fn truncation(&self, eps: f64) -> f64 {
        truncation_length(self.p, self.k, eps)
    }
}

/// `T = 2/((p-1) sqrt(k)) ln(1/eps) + 10`.
pub fn truncation_length(p: f64, k: f64, eps: f64) -> f64 {
    2.0 / ((p - 1.0) * k.sqrt()) * (1.0 / eps).ln() + 10.0
}

pub fn w1(p: f64, r: f64) -> Result<f64> {
    Ok(Soliton::new(p, 1.0)?.value(r))
}

pub fn wk(p: f64, k: f64, r: f64) -> Result<f64> {
    Ok(Soliton::new(p, k)?.value(r))
}

/// `m = \int w_1^2` together with the two ratios linking it to the kinetic and
/// potential integrals of `w_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonConstants {
    pub p: f64,
    pub m: f64,
    /// `\int w_1'^2 / m = (p-1)/(p+3)`
    pub kinetic_ratio: f64,
    /// `\int w_1^(p+1) / m = 2(p+1)/(p+3)`
    pub potential_ratio: f64,
}

impl SolitonConstants {
    pub fn kinetic(&self) -> f64 {
        self.kinetic_ratio * self.m
    }

    pub fn potential(&self) -> f64 {
        self.potential_ratio * self.m
    }
}

pub fn kinetic_ratio(p: f64) -> f64 {
    (p - 1.0) / (p + 3.0)
}

pub fn potential_ratio(p: f64) -> f64 {
    2.0 * (p + 1.0) / (p + 3.0)
}

/// Integrates `f` over the real line for an even integrand, on `[0, T]` doubled.
fn even_integral<F: Fn(f64) -> f64>(f: F, half_width: f64, quad: &Quadrature) -> Result<f64> {
    Ok(2.0 * quad.integrate(f, 0.0, half_width)?.value)
}

pub fn compute_m(p: f64, quad: &Quadrature) -> Result<SolitonConstants> {
    let w = Soliton::new(p, 1.0)?;
    let t = w.truncation(quad.tol);
    let m = even_integral(
        |r| {
            let v = w.value(r);
            v * v
        },
        t,
        quad,
    )?;
    Ok(SolitonConstants {
        p,
        m,
        kinetic_ratio: kinetic_ratio(p),
        potential_ratio: potential_ratio(p),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonIntegrals {
    /// `\int w_k^2`
    pub mass: f64,
    /// `\int w_k'^2`
    pub kinetic: f64,
    /// `\int w_k^(p+1)`
    pub potential: f64,
}

/// The three integrals of `w_k` from the scaling laws applied to `consts`.
pub fn soliton_integrals(k: f64, consts: &SolitonConstants) -> Result<SolitonIntegrals> {
    let p = consts.p;
    check_exponent(p)?;
    check_k(k)?;
    let mass_exp = (5.0 - p) / (2.0 * (p - 1.0));
    let grad_exp = (p + 3.0) / (2.0 * (p - 1.0));
    Ok(SolitonIntegrals {
        mass: k.powf(mass_exp) * consts.m,
        kinetic: k.powf(grad_exp) * consts.kinetic(),
        potential: k.powf(grad_exp) * consts.potential(),
    })
}

/// The same three integrals by direct quadrature of `w_k`.
pub fn soliton_integrals_by_quadrature(
    p: f64,
    k: f64,
    quad: &Quadrature,
) -> Result<SolitonIntegrals> {
    let w = Soliton::new(p, k)?;
    let t = w.truncation(quad.tol);
    Ok(SolitonIntegrals {
        mass: even_integral(|r| w.value(r).powi(2), t, quad)?,
        kinetic: even_integral(|r| w.derivative(r).powi(2), t, quad)?,
        potential: even_integral(|r| w.value(r).powf(p + 1.0), t, quad)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn w1_closed_form_at_p2() {
        assert_relative_eq!(w1(2.0, 0.0).unwrap(), 1.5, epsilon = 1e-15);
        for r in [0.5, 1.0, 2.0] {
            let expected = 1.5 * sech(r / 2.0).powi(2);
            assert_relative_eq!(w1(2.0, r).unwrap(), expected, max_relative = 1e-14);
        }
        // exponential tail: w_1(1.5, 10) = (0.8 cosh^2 2.5)^-2
        assert!((w1(1.5, 10.0).unwrap() - 1.104_916_437_450_937e-3).abs() < 1e-15);
        assert!(w1(1.5, 12.0).unwrap() < 1e-3);
    }

    #[test]
    fn peak_matches_closed_form() {
        for p in [1.3f64, 2.0, 2.7] {
            let expected = ((p + 1.0) / 2.0).powf(1.0 / (p - 1.0));
            assert_relative_eq!(w1(p, 0.0).unwrap(), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(w1(1.0, 0.0).is_err());
        assert!(w1(3.0, 0.0).is_err());
        assert!(wk(2.0, 0.0, 0.0).is_err());
        assert!(wk(2.0, -1.0, 0.0).is_err());
        assert!(Params::new(2.0, 0.0).is_err());
        assert!(Params::new(4.0, 0.1).is_err());
    }

    #[test]
    fn wk_scaling() {
        assert_relative_eq!(wk(2.0, 4.0, 0.0).unwrap(), 6.0, epsilon = 1e-14);
        for r in [-3.0, 0.0, 0.4, 2.5] {
            assert_eq!(wk(2.0, 1.0, r).unwrap(), w1(2.0, r).unwrap());
            let k: f64 = 0.37;
            let lhs = wk(1.7, k, r).unwrap();
            let rhs = k.powf(1.0 / 0.7) * w1(1.7, k.sqrt() * r).unwrap();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_vanishes() {
        for p in [1.2, 2.0, 2.8] {
            for k in [0.3, 1.0, 4.0] {
                let w = Soliton::new(p, k).unwrap();
                for r in [0.0, 0.7, 3.0] {
                    let scale = 0.5 * k * w.value(r).powi(2);
                    assert!(
                        w.hamiltonian(r).abs() < 1e-10 * scale.max(1.0),
                        "p={p} k={k} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn far_tail_underflows_without_nan() {
        let w = Soliton::new(2.0, 1.0).unwrap();
        assert_eq!(w.value(2000.0), 0.0);
        assert_eq!(w.derivative(-2000.0), 0.0);
    }

    #[test]
    fn ode_residual_is_second_order() {
        let w = Soliton::new(2.3, 0.8).unwrap();
        let residual = |h: f64| {
            (-40..=40)
                .map(|i| {
                    let r = i as f64 * 0.1;
                    let d2 = (w.value(r + h) - 2.0 * w.value(r) + w.value(r - h)) / (h * h);
                    (-d2 + w.k() * w.value(r) - w.value(r).powf(w.p())).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = residual(0.02) / residual(0.01);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn m_at_p2_is_six() {
        let c = compute_m(2.0, &Quadrature::default()).unwrap();
        assert!((c.m - 6.0).abs() < 1e-10);
        assert!((c.kinetic() - 1.2).abs() < 1e-10);
        assert!((c.potential() - 7.2).abs() < 1e-10);
    }

    #[test]
    fn m_near_cubic_exponent() {
        // w_1 = sqrt(2) sech(r) at p = 3, whose square integrates to 4.
        let quad = Quadrature::default();
        let at_three = 2.0
            * quad
                .integrate(|r: f64| 2.0 * sech(r).powi(2), 0.0, 60.0)
                .unwrap()
                .value;
        assert!((at_three - 4.0).abs() < 1e-12);
        // m(p) - 4 ~ 1.16 (3 - p); reference values from an independent adaptive quadrature
        let c = compute_m(2.999, &quad).unwrap();
        assert!((c.m - 4.001_159_360_669_9).abs() < 1e-9);
        let c = compute_m(2.9999, &quad).unwrap();
        assert!((c.m - at_three).abs() < 1e-3);
    }

    #[test]
    fn half_line_doubling_matches_full_line() {
        let quad = Quadrature::default();
        let w = Soliton::new(1.6, 1.0).unwrap();
        let t = w.truncation(quad.tol);
        let full = quad.integrate(|r| w.value(r).powi(2), -t, t).unwrap().value;
        let c = compute_m(1.6, &quad).unwrap();
        assert!((full - c.m).abs() < 1e-9);
    }

    #[test]
    fn scaled_integrals_match_quadrature() {
        let quad = Quadrature::default();
        let c = compute_m(2.0, &quad).unwrap();
        let i1 = soliton_integrals(1.0, &c).unwrap();
        assert!((i1.mass - 6.0).abs() < 1e-10);
        assert!((i1.kinetic - 1.2).abs() < 1e-10);
        let i4 = soliton_integrals(4.0, &c).unwrap();
        assert!((i4.mass - 48.0).abs() < 1e-8);
        let direct = soliton_integrals_by_quadrature(2.0, 4.0, &quad).unwrap();
        assert!((direct.mass - 48.0).abs() < 1e-8);

        for p in [1.25, 1.8, 2.6] {
            let c = compute_m(p, &quad).unwrap();
            for k in [0.2, 1.7] {
                let a = soliton_integrals(k, &c).unwrap();
                let b = soliton_integrals_by_quadrature(p, k, &quad).unwrap();
                assert_relative_eq!(a.mass, b.mass, max_relative = 1e-9);
                assert_relative_eq!(a.kinetic, b.kinetic, max_relative = 1e-9);
                assert_relative_eq!(a.potential, b.potential, max_relative = 1e-9);
            }
        }
    }
}
