//! Symmetric tridiagonal matrices and their symmetric rank-one updates
//! `A = T + c v v^T`.
//!
//! Eigenvalues are isolated by bisection on the inertia of `A - lambda`. For
//! the rank-one part the count comes from the Schur complement of the bordered
//! matrix `[[T - lambda, v], [v^T, -1/c]]`:
//! `neg(A - lambda) = neg(T - lambda) - [1 + c v^T (T - lambda)^-1 v < 0]` for `c > 0`
//! (and the mirrored rule for `c < 0`). Everything is `O(n)` per shift.

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// LDL^T pivots of `T - shift`, with exact zeros nudged off zero.
    fn pivots(&self, shift: f64) -> Vec<f64> {
        let n = self.len();
        let mut d = Vec::with_capacity(n);
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..n {
            let mut di = self.diag[i] - shift;
            if i > 0 {
                di -= self.off[i - 1] * self.off[i - 1] / d[i - 1];
            }
            if di == 0.0 {
                di = -tiny;
            }
            d.push(di);
        }
        d
    }

    /// Number of eigenvalues strictly below `shift` (Sturm count).
    pub fn count_below(&self, shift: f64) -> usize {
        self.pivots(shift).iter().filter(|&&d| d < 0.0).count()
    }

    /// Solves `(T - shift) x = b` by Gaussian elimination with partial pivoting.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        // Row i holds (sub, diag, sup, sup2) after elimination; sup2 fills in on swaps.
        let mut sub: Vec<f64> = (0..n)
            .map(|i| if i > 0 { self.off[i - 1] } else { 0.0 })
            .collect();
        let mut dia: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut sup: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { self.off[i] } else { 0.0 })
            .collect();
        let mut sup2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        for i in 0..n.saturating_sub(1) {
            if sub[i + 1].abs() > dia[i].abs() {
                // swap rows i and i+1
                std::mem::swap(&mut dia[i], &mut sub[i + 1]);
                std::mem::swap(&mut sup[i], &mut dia[i + 1]);
                std::mem::swap(&mut sup2[i], &mut sup[i + 1]);
                rhs.swap(i, i + 1);
            }
            if dia[i] == 0.0 {
                dia[i] = tiny;
            }
            let f = sub[i + 1] / dia[i];
            sub[i + 1] = 0.0;
            dia[i + 1] -= f * sup[i];
            sup[i + 1] -= f * sup2[i];
            rhs[i + 1] -= f * rhs[i];
        }
        if dia[n - 1] == 0.0 {
            dia[n - 1] = tiny;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= sup[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= sup2[i] * x[i + 2];
            }
            x[i] = s / dia[i];
        }
        x
    }

    /// Solves `T x = b` for a diagonally dominant `T` (Thomas algorithm).
    pub fn solve_spd(&self, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let sub = if i > 0 { self.off[i - 1] } else { 0.0 };
            let denom = self.diag[i] - if i > 0 { sub * c[i - 1] } else { 0.0 };
            if i + 1 < n {
                c[i] = self.off[i] / denom;
            }
            d[i] = (b[i] - if i > 0 { sub * d[i - 1] } else { 0.0 }) / denom;
        }
        let mut x = d;
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }
}

/// `A = T + coeff * v v^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagRankOne {
    pub tridiag: SymTridiagonal,
    pub coeff: f64,
    pub vector: Vec<f64>,
}

impl TridiagRankOne {
    pub fn new(tridiag: SymTridiagonal, coeff: f64, vector: Vec<f64>) -> Self {
        assert_eq!(tridiag.len(), vector.len());
        Self {
            tridiag,
            coeff,
            vector,
        }
    }

    pub fn len(&self) -> usize {
        self.tridiag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tridiag.is_empty()
    }

    fn vv(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.tridiag.apply(x);
        let s = self.coeff * self.vector.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        for (yi, vi) in y.iter_mut().zip(&self.vector) {
            *yi += s * vi;
        }
        y
    }

    pub fn spectral_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.tridiag.gershgorin();
        let r = self.coeff * self.vv();
        if r >= 0.0 {
            (lo, hi + r)
        } else {
            (lo + r, hi)
        }
    }

    /// Upper bound on `|A|` in the 2-norm.
    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.spectral_bounds();
        lo.abs().max(hi.abs())
    }

    pub fn count_below(&self, shift: f64) -> usize {
        let t = &self.tridiag;
        let d = t.pivots(shift);
        let neg = d.iter().filter(|&&x| x < 0.0).count();
        if self.coeff == 0.0 {
            return neg;
        }
        // s = v^T (T - shift)^-1 v through the same LDL^T factors.
        let mut y_prev = 0.0;
        let mut s = 0.0;
        for i in 0..d.len() {
            let mut y = self.vector[i];
            if i > 0 {
                y -= t.off[i - 1] / d[i - 1] * y_prev;
            }
            s += y * y / d[i];
            y_prev = y;
        }
        let secular = 1.0 + self.coeff * s;
        if self.coeff > 0.0 {
            neg - usize::from(secular < 0.0)
        } else {
            neg + usize::from(secular < 0.0)
        }
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.len());
        let (mut lo, mut hi) = self.spectral_bounds();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * scale;
        hi += 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * scale {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(A - shift) x = b` via Sherman–Morrison on the tridiagonal part.
    pub fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let y = self.tridiag.solve_shifted(shift, b);
        if self.coeff == 0.0 {
            return y;
        }
        let z = self.tridiag.solve_shifted(shift, &self.vector);
        let vy: f64 = self.vector.iter().zip(&y).map(|(a, b)| a * b).sum();
        let vz: f64 = self.vector.iter().zip(&z).map(|(a, b)| a * b).sum();
        let factor = self.coeff * vy / (1.0 + self.coeff * vz);
        y.iter().zip(&z).map(|(yi, zi)| yi - factor * zi).collect()
    }

    /// Unit eigenvector for an eigenvalue estimate, by inverse iteration.
    /// `against` lists already-found vectors of a cluster to project out.
    pub fn eigenvector(&self, eigenvalue: f64, against: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let normalize = |x: &mut Vec<f64>| {
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if nrm > 0.0 {
                x.iter_mut().for_each(|v| *v /= nrm);
            }
        };
        let orthogonalize = |x: &mut Vec<f64>| {
            for q in against {
                let d: f64 = q.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= d * qi);
            }
        };
        // deterministic start with components in every mode
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_75).fract() - 0.5))
            .collect();
        orthogonalize(&mut x);
        normalize(&mut x);
        let scale = self.norm_bound().max(1.0);
        let shift = eigenvalue + 1e-13 * scale;
        for _ in 0..4 {
            let mut y = self.solve_shifted(shift, &x);
            orthogonalize(&mut y);
            normalize(&mut y);
            x = y;
        }
        x
    }
}
