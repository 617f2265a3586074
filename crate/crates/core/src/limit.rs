//! The one-dimensional limit functional
//!
//! `J(u) = 1/2 \int (u'^2 + omega u^2) + (1/24) (\int u^2)^3 - 1/(p+1) \int |u|^(p+1)`,
//!
//! the scalar equation `k = omega + m^2 k^((5-p)/(p-1)) / 4` selecting its
//! soliton critical points, and the thresholds `omega0 < omega1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::line::Profile1d;
use crate::quadrature::Quadrature;
use crate::soliton::{check_exponent, compute_m, soliton_integrals, Params, SolitonConstants};

/// Width of the tangent window around `omega1`.
pub const TANGENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub omega0: f64,
    pub omega1: f64,
}

pub fn thresholds(p: f64, m: f64) -> Result<Thresholds> {
    check_exponent(p)?;
    if !(m > 0.0) {
        return Err(Error::domain("m", m, "(0, inf)"));
    }
    let m2 = m * m;
    let omega0 = (3.0 - p) / (3.0 + p)
        * 3f64.powf((p - 1.0) / (2.0 * (3.0 - p)))
        * 2f64.powf(2.0 / (3.0 - p))
        * (m2 * (3.0 + p) / (p - 1.0)).powf(-(p - 1.0) / (2.0 * (3.0 - p)));
    let base = (5.0 - p) * m2 / (4.0 * (p - 1.0));
    let omega1 = base.powf(-(p - 1.0) / (2.0 * (3.0 - p)))
        - m2 / 4.0 * base.powf(-(5.0 - p) / (2.0 * (3.0 - p)));
    Ok(Thresholds { omega0, omega1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootKind {
    None,
    Tangent { k0: f64 },
    Pair { k1: f64, k2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRoots {
    #[serde(flatten)]
    pub kind: RootKind,
    /// Minimizer of `f(k) = m^2 k^e / 4 - k + omega`; separates the two roots.
    pub critical_k: f64,
    /// `omega1` as `-min f + omega`.
    pub omega1: f64,
    /// Largest `|f|` over the returned roots.
    pub residual: f64,
}

impl LimitRoots {
    pub fn k1(&self) -> Option<f64> {
        match self.kind {
            RootKind::Pair { k1, .. } => Some(k1),
            RootKind::Tangent { k0 } => Some(k0),
            RootKind::None => None,
        }
    }

    pub fn k2(&self) -> Option<f64> {
        match self.kind {
            RootKind::Pair { k2, .. } => Some(k2),
            RootKind::Tangent { k0 } => Some(k0),
            RootKind::None => None,
        }
    }
}

fn growth_exponent(p: f64) -> f64 {
    (5.0 - p) / (p - 1.0)
}

/// `f(k) = m^2 k^((5-p)/(p-1)) / 4 - k + omega`; roots are the admissible `k`.
pub fn eq_k_residual(p: f64, m: f64, omega: f64, k: f64) -> f64 {
    0.25 * m * m * k.powf(growth_exponent(p)) - k + omega
}

fn eq_k_slope(p: f64, m: f64, k: f64) -> f64 {
    let e = growth_exponent(p);
    0.25 * m * m * e * k.powf(e - 1.0) - 1.0
}

/// Safeguarded Newton inside a sign-changing bracket.
fn bracketed_root<F, D>(f: F, df: D, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    debug_assert!(f_lo * f(hi) <= 0.0);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (f_lo > 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}

pub fn solve_k(params: Params, m: f64) -> LimitRoots {
    let Params { p, omega } = params;
    let e = growth_exponent(p);
    // f'(k*) = 0
    let critical_k = (4.0 / (m * m * e)).powf(1.0 / (e - 1.0));
    let omega1 = critical_k - 0.25 * m * m * critical_k.powf(e);
    let f = |k: f64| eq_k_residual(p, m, omega, k);
    let df = |k: f64| eq_k_slope(p, m, k);

    if (omega - omega1).abs() < TANGENCY_TOL {
        return LimitRoots {
            kind: RootKind::Tangent { k0: critical_k },
            critical_k,
            omega1,
            residual: f(critical_k).abs(),
        };
    }
    if omega > omega1 {
        return LimitRoots {
            kind: RootKind::None,
            critical_k,
            omega1,
            residual: 0.0,
        };
    }
    // f(k_max) = omega > 0 at k_max = k* e^(1/(e-1)).
    let k_max = critical_k * e.powf(1.0 / (e - 1.0));
    let k1 = bracketed_root(f, df, 0.0, critical_k);
    let k2 = bracketed_root(f, df, critical_k, k_max);
    LimitRoots {
        kind: RootKind::Pair { k1, k2 },
        critical_k,
        omega1,
        residual: f(k1).abs().max(f(k2).abs()),
    }
}

/// `J(w_k)` assembled from the scaled soliton integrals.
pub fn j_closed(omega: f64, k: f64, consts: &SolitonConstants) -> Result<f64> {
    let s = soliton_integrals(k, consts)?;
    let p = consts.p;
    Ok(0.5 * (s.kinetic + omega * s.mass) + s.mass.powi(3) / 24.0 - s.potential / (p + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JValue {
    pub value: f64,
    /// Largest end value; large values mean the truncation is too short.
    pub edge: f64,
    pub truncated: bool,
}

/// Edge magnitude above which [`j_eval`] marks the result as truncated.
pub const EDGE_TOL: f64 = 1e-8;

pub fn j_eval(p: f64, omega: f64, u: &Profile1d) -> Result<JValue> {
    check_exponent(p)?;
    let du = u.derivative();
    let h = u.grid.spacing();
    let kinetic = h * du.iter().map(|d| d * d).sum::<f64>();
    let mass = u.integral(|v| v * v);
    let potential = u.integral(|v| v.abs().powf(p + 1.0));
    let value = 0.5 * (kinetic + omega * mass) + mass.powi(3) / 24.0 - potential / (p + 1.0);
    let edge = u.edge_magnitude();
    Ok(JValue {
        value,
        edge,
        truncated: edge > EDGE_TOL,
    })
}

/// `omega0` located as the sign change of `omega -> J(w_{k2(omega)})`.
pub fn omega0_by_sign_change(consts: &SolitonConstants) -> Result<f64> {
    let p = consts.p;
    let m = consts.m;
    let omega1 = thresholds(p, m)?.omega1;
    let j_of = |omega: f64| -> Result<f64> {
        let roots = solve_k(Params::new(p, omega)?, m);
        let k2 = roots.k2().ok_or(Error::NoLimitSolution { omega, omega1 })?;
        j_closed(omega, k2, consts)
    };
    let mut lo = 1e-6 * omega1;
    let mut hi = omega1 - 10.0 * TANGENCY_TOL;
    let j_lo = j_of(lo)?;
    let j_hi = j_of(hi)?;
    if !(j_lo < 0.0 && j_hi > 0.0) {
        return Err(Error::Solver {
            iterations: 0,
            reason: format!("J(w_k2) does not change sign: {j_lo} at {lo}, {j_hi} at {hi}"),
        });
    }
    while hi - lo > 1e-15 * omega1 {
        let mid = 0.5 * (lo + hi);
        if j_of(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of the `(p, m, omega0, omega1)` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub p: f64,
    pub m: f64,
    pub omega0: f64,
    pub omega1: f64,
}

/// Samples the thresholds on `samples` evenly spaced exponents in `[p_min, p_max]`.
pub fn threshold_table(
    p_min: f64,
    p_max: f64,
    samples: usize,
    quad: &Quadrature,
) -> Result<Vec<ThresholdRow>> {
    check_exponent(p_min)?;
    check_exponent(p_max)?;
    if p_max < p_min {
        return Err(Error::domain("p_max", p_max, "[p_min, 3)"));
    }
    (0..samples)
        .map(|i| {
            let p = if samples == 1 {
                p_min
            } else {
                p_min + (p_max - p_min) * i as f64 / (samples - 1) as f64
            };
            let c = compute_m(p, quad)?;
            let t = thresholds(p, c.m)?;
            Ok(ThresholdRow {
                p,
                m: c.m,
                omega0: t.omega0,
                omega1: t.omega1,
            })
        })
        .collect()
}
