//! Tridiagonal kernels: Sturm-sequence bisection, inverse iteration and a
//! pivoted linear solve.

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`.
#[derive(Debug, Clone)]
pub(crate) struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    /// Number of eigenvalues strictly below `x`, from the LDLᵀ pivots of `T - xI`.
    #[must_use]
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.e.iter().fold(1.0f64, |m, v| m.max(v * v));
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.d.len() {
            q = if i == 0 {
                self.d[0] - x
            } else {
                self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q
            };
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    #[must_use]
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.e[i - 1].abs();
            }
            if i + 1 < n {
                r += self.e[i].abs();
            }
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    #[must_use]
    pub fn eigenvalue(&self, k: usize, bounds: (f64, f64)) -> f64 {
        let (mut lo, mut hi) = bounds;
        let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for the eigenvalue estimate `mu` by inverse iteration.
    pub fn eigenvector(&self, mu: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self.d.iter().chain(&self.e).fold(1.0f64, |m, v| m.max(v.abs()));
        let floor = f64::EPSILON * scale;
        let diag: Vec<f64> = self.d.iter().map(|v| v - mu).collect();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i as f64) * 0.7).sin()).collect();
        for _ in 0..4 {
            let (y, _) = solve_tridiagonal(&self.e, &diag, &self.e, &x, floor);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = y.into_iter().map(|v| v / norm).collect();
        }
        x
    }
}

/// Solve a general tridiagonal system by Gaussian elimination with partial pivoting.
///
/// `sub[i]` is entry `(i+1, i)`, `sup[i]` is entry `(i, i+1)`. Pivots smaller than
/// `floor` in magnitude are replaced by `±floor`. Returns the solution and the
/// smallest pivot magnitude met before flooring.
pub(crate) fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
    floor: f64,
) -> (Vec<f64>, f64) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    let mut min_pivot = f64::INFINITY;
    let fix = |p: f64| {
        if p.abs() < floor {
            if p < 0.0 {
                -floor
            } else {
                floor
            }
        } else {
            p
        }
    };
    for i in 0..n.saturating_sub(1) {
        let l = sub[i];
        if d[i].abs() >= l.abs() {
            min_pivot = min_pivot.min(d[i].abs());
            d[i] = fix(d[i]);
            let f = l / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
        } else {
            min_pivot = min_pivot.min(l.abs());
            let f = d[i] / l;
            d[i] = l;
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
    }
    min_pivot = min_pivot.min(d[n - 1].abs());
    d[n - 1] = fix(d[n - 1]);
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    (x, min_pivot)
}
