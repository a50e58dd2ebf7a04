use super::{Problem, SpectralError};
use crate::expr::{Expr, Var};
use crate::norms::{Grid, Profile};

/// Number of equispaced initial slopes tried by [`find_eta`].
pub const SLOPE_SAMPLES: usize = 2001;

/// A positive solution of `(p η')' - q η = -σ r η` with strict boundary margins.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaFunction {
    pub sigma: f64,
    pub eta: Profile,
    /// `η'` at every node, used for Hermite resampling.
    pub d_eta: Vec<f64>,
    pub d_eta0: f64,
    pub d_eta1: f64,
    pub boundary_margin0: f64,
    pub boundary_margin1: f64,
}

impl EtaFunction {
    fn build(
        prob: &Problem,
        sigma: f64,
        eta: Vec<f64>,
        d_eta: Vec<f64>,
        grid: Grid,
    ) -> Result<EtaFunction, SpectralError> {
        let n = grid.intervals();
        if let Some(i) = eta.iter().position(|v| !(*v > 0.0)) {
            return Err(SpectralError::EtaInvalid(format!(
                "eta is not positive at z = {} ({})",
                grid.z(i),
                eta[i]
            )));
        }
        let m0 = -(prob.g0() * eta[0] + prob.v0() * d_eta[0]);
        let m1 = prob.g1() * eta[n] + prob.v1() * d_eta[n];
        if !(m0 > 0.0 && m1 > 0.0) {
            return Err(SpectralError::EtaInvalid(format!(
                "boundary margins must be positive, got {m0} and {m1}"
            )));
        }
        Ok(EtaFunction {
            sigma,
            d_eta0: d_eta[0],
            d_eta1: d_eta[n],
            eta: Profile::new(grid, eta)?,
            d_eta,
            boundary_margin0: m0,
            boundary_margin1: m1,
        })
    }

    /// Use an explicit `η(z)`. The ODE residual is checked with symbolic derivatives.
    pub fn from_expr(
        prob: &Problem,
        eta: &Expr,
        sigma: f64,
        grid: Grid,
    ) -> Result<EtaFunction, SpectralError> {
        if !(sigma > 0.0) {
            return Err(SpectralError::NonPositiveSigma(sigma));
        }
        let d1 = eta.differentiate(Var::Z)?;
        let d2 = d1.differentiate(Var::Z)?;
        let mut values = Vec::with_capacity(grid.nodes());
        let mut slopes = Vec::with_capacity(grid.nodes());
        let mut worst = 0.0f64;
        for z in grid.points() {
            let (e, de, dde) = (eta.eval_z(z)?, d1.eval_z(z)?, d2.eval_z(z)?);
            let p = prob.eval(prob.p(), z)?;
            let pp = prob.eval(prob.p_prime(), z)?;
            let q = prob.eval(prob.q(), z)?;
            let r = prob.eval(prob.r(), z)?;
            let terms = [p * dde, pp * de, -q * e, sigma * r * e];
            let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
            worst = worst.max(terms.iter().sum::<f64>().abs() / scale);
            values.push(e);
            slopes.push(de);
        }
        if worst > 1e-6 {
            return Err(SpectralError::EtaInvalid(format!(
                "eta does not solve (p eta')' - q eta = -sigma r eta (relative residual {worst:e})"
            )));
        }
        EtaFunction::build(prob, sigma, values, slopes, grid)
    }

    pub fn grid(&self) -> Grid {
        self.eta.grid()
    }

    /// `η` on another grid by cubic Hermite interpolation.
    pub fn sample_on(&self, grid: Grid) -> Profile {
        let src = self.grid();
        if src == grid {
            return self.eta.clone();
        }
        let n = src.intervals();
        let h = src.h();
        let v = self.eta.values();
        let values = grid
            .points()
            .map(|z| {
                let i = ((z * n as f64).floor() as usize).min(n - 1);
                let s = (z - src.z(i)) / h;
                let (s2, s3) = (s * s, s * s * s);
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                h00 * v[i] + h10 * h * self.d_eta[i] + h01 * v[i + 1] + h11 * h * self.d_eta[i + 1]
            })
            .collect();
        Profile::new(grid, values).expect("interpolated eta is finite")
    }
}

type Fundamental = (Vec<f64>, Vec<f64>);

/// RK4 for `η' = w/p`, `w' = (q - σ r) η` with `w = p η'`, from `(η, w)(0) = start`.
fn integrate(
    samples: &[Vec<f64>; 3],
    sigma: f64,
    n: usize,
    start: (f64, f64),
) -> Result<Fundamental, SpectralError> {
    let [p, q, r] = samples;
    let h = 1.0 / n as f64;
    let rhs = |k: usize, y: f64, w: f64| (w / p[k], (q[k] - sigma * r[k]) * y);
    let mut eta = Vec::with_capacity(n + 1);
    let mut flux = Vec::with_capacity(n + 1);
    let (mut y, mut w) = start;
    eta.push(y);
    flux.push(w);
    for i in 0..n {
        let (a0, a1, a2) = (2 * i, 2 * i + 1, 2 * i + 2);
        let k1 = rhs(a0, y, w);
        let k2 = rhs(a1, y + 0.5 * h * k1.0, w + 0.5 * h * k1.1);
        let k3 = rhs(a1, y + 0.5 * h * k2.0, w + 0.5 * h * k2.1);
        let k4 = rhs(a2, y + h * k3.0, w + h * k3.1);
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        w += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !(y.is_finite() && w.is_finite()) || y.abs() > 1e150 {
            return Err(SpectralError::IntegrationBlowUp((i + 1) as f64 * h));
        }
        eta.push(y);
        flux.push(w);
    }
    Ok((eta, flux))
}

/// Search an admissible `η` by shooting from `η(0) = 1` over a scan of initial slopes.
///
/// The ODE is linear, so every trial is the superposition `A + s B` of the two
/// fundamental solutions with `(η, η')(0) = (1, 0)` and `(0, 1)`. Among admissible
/// slopes the one maximizing `min(margin0, margin1) / max η` is kept and then
/// refined by golden-section search.
pub fn find_eta(prob: &Problem, sigma: f64) -> Result<EtaFunction, SpectralError> {
    if !(sigma > 0.0) {
        return Err(SpectralError::NonPositiveSigma(sigma));
    }
    let n = prob.grid_n();
    let grid = prob.grid();
    let samples = prob.half_samples(n)?;
    let p0 = samples[0][0];
    let pn = samples[0][2 * n];
    let (a_eta, a_flux) = integrate(&samples, sigma, n, (1.0, 0.0))?;
    let (b_eta, b_flux) = integrate(&samples, sigma, n, (0.0, p0))?;
    let (g0, v0, g1, v1) = (prob.g0(), prob.v0(), prob.g1(), prob.v1());

    let score = |s: f64| -> Option<f64> {
        let mut max = 0.0f64;
        for i in 0..=n {
            let e = a_eta[i] + s * b_eta[i];
            if !(e > 0.0) {
                return None;
            }
            max = max.max(e);
        }
        let m0 = -(g0 + v0 * s);
        let m1 = g1 * (a_eta[n] + s * b_eta[n]) + v1 * (a_flux[n] + s * b_flux[n]) / pn;
        (m0 > 0.0 && m1 > 0.0).then(|| m0.min(m1) / max)
    };

    let span = 10.0;
    let step = 2.0 * span / (SLOPE_SAMPLES - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..SLOPE_SAMPLES {
        let s = -span + step * k as f64;
        if let Some(v) = score(s) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((s, v));
            }
        }
    }
    let Some((mut s_best, mut v_best)) = best else {
        return Err(SpectralError::NoAdmissibleSlope { sigma, lo: -span, hi: span });
    };

    let f = |s: f64| score(s).unwrap_or(f64::NEG_INFINITY);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (s_best - step, s_best + step);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    for (s, v) in [(x1, f1), (x2, f2)] {
        if v > v_best {
            s_best = s;
            v_best = v;
        }
    }

    let eta: Vec<f64> = (0..=n).map(|i| a_eta[i] + s_best * b_eta[i]).collect();
    let d_eta: Vec<f64> = (0..=n)
        .map(|i| (a_flux[i] + s_best * b_flux[i]) / samples[0][2 * i])
        .collect();
    EtaFunction::build(prob, sigma, eta, d_eta, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::PI;

    #[test]
    fn recovers_sine_family_for_heat() {
        let prob = Problem::heat(1.0);
        let phi = PI / 2.0;
        let eta = find_eta(&prob, phi * phi).unwrap();
        let e = eta.eta.values();
        let theta = (phi / eta.d_eta0).atan();
        let g = eta.grid();
        for (i, v) in e.iter().enumerate() {
            let model = (theta + g.z(i) * phi).sin() / theta.sin();
            assert!((v - model).abs() < 1e-8, "node {i}: {v} vs {model}");
        }
        assert!((theta - PI / 4.0).abs() < 1e-3, "theta = {theta}");
    }

    #[test]
    fn fails_at_first_eigenvalue() {
        let prob = Problem::heat(1.0);
        assert!(matches!(find_eta(&prob, PI * PI), Err(SpectralError::NoAdmissibleSlope { .. })));
    }

    #[test]
    fn small_sigma_is_nearly_affine() {
        let prob = Problem::heat(1.0);
        let eta = find_eta(&prob, 1e-6).unwrap();
        let g = eta.grid();
        let e = eta.eta.values();
        let slope = e[g.intervals()] - e[0];
        for (i, v) in e.iter().enumerate() {
            assert!((v - (e[0] + slope * g.z(i))).abs() < 1e-5);
        }
        assert!((eta.boundary_margin0 - e[0]).abs() < 1e-12);
    }

    #[test]
    fn explicit_eta_checks_the_ode() {
        let prob = Problem::heat(1.0);
        let g = Grid::new(200).unwrap();
        let ok = EtaFunction::from_expr(&prob, &parse("sin(pi/4+pi*z/2)").unwrap(), PI * PI / 4.0, g);
        let ok = ok.unwrap();
        assert!((ok.boundary_margin0 - (PI / 4.0).sin()).abs() < 1e-15);
        let wrong = EtaFunction::from_expr(&prob, &parse("sin(pi/4+pi*z/2)").unwrap(), 1.0, g);
        assert!(matches!(wrong, Err(SpectralError::EtaInvalid(_))));
    }

    #[test]
    fn hermite_resampling() {
        let prob = Problem::heat(1.0);
        let eta = find_eta(&prob, 2.0).unwrap();
        let coarse = eta.sample_on(Grid::new(7).unwrap());
        let w = (2.0f64).sqrt();
        for (i, v) in coarse.values().iter().enumerate() {
            let z = i as f64 / 7.0;
            let exact = (w * z).cos() + eta.d_eta0 / w * (w * z).sin();
            assert!((v - exact).abs() < 1e-9);
        }
    }
}
