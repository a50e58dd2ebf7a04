use super::{Problem, SpectralError};
use crate::norms::Profile;
use crate::tridiag::solve_tridiagonal;

/// Solve `(p x')' - q x = 0` with `g0 x(0) + v0 x'(0) = mu0`, `g1 x(1) + v1 x'(1) = mu1`
/// on the problem grid.
pub fn solve_equilibrium_bvp(prob: &Problem, mu0: f64, mu1: f64) -> Result<Profile, SpectralError> {
    let n = prob.grid_n();
    let h = 1.0 / n as f64;
    let [p, q, _] = prob.half_samples(n)?;
    let half = |i: usize| p[2 * i + 1];
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n + 1];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n + 1];
    for i in 1..n {
        sub[i - 1] = -half(i - 1) / h;
        diag[i] = (half(i - 1) + half(i)) / h + h * q[2 * i];
        sup[i] = -half(i) / h;
    }
    if prob.dirichlet_left() {
        diag[0] = 1.0;
        rhs[0] = mu0 / prob.g0();
    } else {
        diag[0] = half(0) / h - p[0] * prob.g0() / prob.v0() + 0.5 * h * q[0];
        sup[0] = -half(0) / h;
        rhs[0] = -p[0] * mu0 / prob.v0();
    }
    if prob.dirichlet_right() {
        diag[n] = 1.0;
        sub[n - 1] = 0.0;
        rhs[n] = mu1 / prob.g1();
    } else {
        diag[n] = half(n - 1) / h + p[2 * n] * prob.g1() / prob.v1() + 0.5 * h * q[2 * n];
        sub[n - 1] = -half(n - 1) / h;
        rhs[n] = p[2 * n] * mu1 / prob.v1();
    }
    let scale = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (x, min_pivot) = solve_tridiagonal(&sub, &diag, &sup, &rhs, 1e-300);
    if !(min_pivot > 1e-12 * scale) || x.iter().any(|v| !v.is_finite()) {
        return Err(SpectralError::Singular(min_pivot));
    }
    Ok(Profile::new(prob.grid(), x)?)
}
