//! Heat equation `x_t = a x_zz` with the nonlocal boundary conditions
//! `x(t,0) = ∫ g0 x`, `x(t,1) = ∫ g1 x`: small-gain tests and simulation.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};
use crate::fd_simulator::{cfl_lambda_max, FdError, Trajectory};
use crate::norms::{Grid, NormError, Profile};
use crate::spectral::Problem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Fd(#[from] FdError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("kernel {name} may not depend on t")]
    TimeDependent { name: &'static str },
    #[error("kernel {name} is not finite at z = {z}")]
    NonFinite { name: &'static str, z: f64 },
    #[error("kernel {name} does not vanish at z = {z} (value {value})")]
    EndpointNonzero { name: &'static str, z: f64, value: f64 },
    #[error("endpoint system is singular (det = {0}); the kernel endpoint mass is too large for the grid")]
    SingularEndpoints(f64),
    #[error("diffusion coefficient must be positive, got {0}")]
    Diffusion(f64),
    #[error("initial data cannot be made compatible (det = {0})")]
    Incompatible(f64),
    #[error("trajectory norm is zero at t = 0")]
    ZeroInitialNorm,
    #[error("fit window holds fewer than two samples")]
    ShortWindow,
}

/// Subintervals of the composite Simpson rule used for kernel integrals.
pub const KERNEL_QUADRATURE: usize = 4000;

/// Pair of kernels `g0`, `g1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalKernel {
    g0: Expr,
    g1: Expr,
}

fn simpson(f: impl Fn(f64) -> f64) -> f64 {
    let n = KERNEL_QUADRATURE;
    let h = 1.0 / n as f64;
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

impl NonlocalKernel {
    pub fn new(g0: Expr, g1: Expr) -> Result<NonlocalKernel, ThermoError> {
        for (name, g) in [("g0", &g0), ("g1", &g1)] {
            if g.depends_on(Var::T) {
                return Err(ThermoError::TimeDependent { name });
            }
            for i in 0..=KERNEL_QUADRATURE {
                let z = i as f64 / KERNEL_QUADRATURE as f64;
                if !g.eval_z(z)?.is_finite() {
                    return Err(ThermoError::NonFinite { name, z });
                }
            }
        }
        Ok(NonlocalKernel { g0, g1 })
    }

    pub fn from_strs(g0: &str, g1: &str) -> Result<NonlocalKernel, ThermoError> {
        NonlocalKernel::new(crate::expr::parse(g0)?, crate::expr::parse(g1)?)
    }

    pub fn g0(&self) -> &Expr {
        &self.g0
    }

    pub fn g1(&self) -> &Expr {
        &self.g1
    }

    fn eval(g: &Expr, z: f64) -> f64 {
        g.eval_z(z).expect("kernel validated at construction")
    }

    /// `∫ f(g(z), z) dz` for each kernel.
    fn integrals(&self, f: impl Fn(f64, f64) -> f64) -> [f64; 2] {
        [&self.g0, &self.g1].map(|g| simpson(|z| f(NonlocalKernel::eval(g, z), z)))
    }

    pub fn sample(&self, grid: Grid) -> [Profile; 2] {
        [&self.g0, &self.g1].map(|g| {
            Profile::from_fn(grid, |z| NonlocalKernel::eval(g, z)).expect("kernel validated at construction")
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Weighted sup small-gain pair with a witness `(θ, φ)`.
    Sup,
    /// `‖g0‖₂ + ‖g1‖₂ < √3`.
    L2,
    /// `sup |g0|/sin(πz) + sup |g1|/sin(πz) < π`.
    L1w,
    /// `∫|g0| < 1` and `∫|g1| < 1`.
    Day,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Sup => "SUP",
            Condition::L2 => "L2",
            Condition::L1w => "L1W",
            Condition::Day => "DAY",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallGainVerdict {
    pub condition: Condition,
    pub holds: bool,
    pub margin: f64,
    /// `(θ, φ)` for the sup condition.
    pub witness: Option<(f64, f64)>,
}

impl SmallGainVerdict {
    fn new(condition: Condition, margin: f64, witness: Option<(f64, f64)>) -> SmallGainVerdict {
        SmallGainVerdict { condition, holds: margin > 0.0, margin, witness }
    }
}

/// CSV `condition,holds,margin,theta,phi`.
pub fn write_verdicts<W: Write>(w: &mut W, verdicts: &[SmallGainVerdict], comment: Option<&str>) -> io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "condition,holds,margin,theta,phi")?;
    for v in verdicts {
        let (th, ph) = match v.witness {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(w, "{},{},{},{},{}", v.condition, v.holds, v.margin, th, ph)?;
    }
    Ok(())
}

/// Lattice size per axis for the sup condition search.
pub const SUP_LATTICE: usize = 200;
/// Distance kept from the boundary of the `(θ, φ)` domain.
pub const SUP_BORDER: f64 = 1e-3;
const REFINE: usize = 41;

/// `∫|g| cos(zφ)` and `∫|g| sin(zφ)` for both kernels, so that
/// `∫|g| sin(θ + zφ) = sin θ · A + cos θ · B`.
struct Moments {
    a: [f64; 2],
    b: [f64; 2],
}

/// `|g0|`, `|g1|` times the Simpson weights.
struct AbsKernel {
    z: Vec<f64>,
    wg: [Vec<f64>; 2],
}

impl AbsKernel {
    fn new(k: &NonlocalKernel) -> AbsKernel {
        let n = KERNEL_QUADRATURE;
        let h = 1.0 / n as f64;
        let z: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let weight = |i: usize| {
            h / 3.0
                * if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                }
        };
        let wg = [&k.g0, &k.g1].map(|g| {
            z.iter().enumerate().map(|(i, &z)| weight(i) * NonlocalKernel::eval(g, z).abs()).collect()
        });
        AbsKernel { z, wg }
    }

    fn moments(&self, phi: f64) -> Moments {
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        for (i, z) in self.z.iter().enumerate() {
            let (s, c) = (z * phi).sin_cos();
            for side in 0..2 {
                a[side] += self.wg[side][i] * c;
                b[side] += self.wg[side][i] * s;
            }
        }
        Moments { a, b }
    }
}

impl Moments {
    fn margin(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let m0 = s - (s * self.a[0] + c * self.b[0]);
        let m1 = (theta + phi).sin() - (s * self.a[1] + c * self.b[1]);
        m0.min(m1)
    }
}

fn lattice(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Search the `(θ, φ)` lattice, then refine once around the best point.
pub fn check_smallgain_sup(k: &NonlocalKernel) -> SmallGainVerdict {
    let phi_lo = SUP_BORDER;
    let phi_hi = PI - SUP_BORDER;
    let dphi = (phi_hi - phi_lo) / (SUP_LATTICE - 1) as f64;
    let abs = AbsKernel::new(k);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let search = |best: &mut (f64, f64, f64), phis: &mut dyn Iterator<Item = f64>, theta_range: &dyn Fn(f64) -> (f64, f64, usize)| {
        for phi in phis {
            let m = abs.moments(phi);
            let (lo, hi, n) = theta_range(phi);
            if hi <= lo {
                continue;
            }
            for theta in lattice(lo, hi, n) {
                let v = m.margin(theta, phi);
                if v > best.0 {
                    *best = (v, theta, phi);
                }
            }
        }
    };
    search(&mut best, &mut lattice(phi_lo, phi_hi, SUP_LATTICE), &|phi| {
        (SUP_BORDER, PI - phi - SUP_BORDER, SUP_LATTICE)
    });
    let (_, theta0, phi0) = best;
    let dtheta = (PI - phi0 - 2.0 * SUP_BORDER) / (SUP_LATTICE - 1) as f64;
    let plo = (phi0 - dphi).max(phi_lo);
    let phi_top = (phi0 + dphi).min(phi_hi);
    search(&mut best, &mut lattice(plo, phi_top, REFINE), &|phi| {
        let lo = (theta0 - dtheta).max(SUP_BORDER);
        let hi = (theta0 + dtheta).min(PI - phi - SUP_BORDER);
        (lo, hi, REFINE)
    });
    SmallGainVerdict::new(Condition::Sup, best.0, Some((best.1, best.2)))
}

pub fn check_smallgain_l2(k: &NonlocalKernel) -> SmallGainVerdict {
    let [a, b] = k.integrals(|g, _| g * g);
    SmallGainVerdict::new(Condition::L2, 3f64.sqrt() - (a.sqrt() + b.sqrt()), None)
}

/// Nodes used for the `|g|/sin(πz)` suprema.
pub const L1W_NODES: usize = 4000;

pub fn check_smallgain_l1w(k: &NonlocalKernel) -> Result<SmallGainVerdict, ThermoError> {
    let mut sum = 0.0;
    for (name, g) in [("g0", &k.g0), ("g1", &k.g1)] {
        for z in [0.0, 1.0] {
            let value = g.eval_z(z)?;
            if value.abs() > 1e-12 {
                return Err(ThermoError::EndpointNonzero { name, z, value });
            }
        }
        let dg = g.differentiate(Var::Z)?;
        let mut sup = (dg.eval_z(0.0)?.abs() / PI).max(dg.eval_z(1.0)?.abs() / PI);
        for i in 1..L1W_NODES {
            let z = i as f64 / L1W_NODES as f64;
            sup = sup.max(g.eval_z(z)?.abs() / (PI * z).sin());
        }
        sum += sup;
    }
    Ok(SmallGainVerdict::new(Condition::L1w, PI - sum, None))
}

pub fn check_day(k: &NonlocalKernel) -> SmallGainVerdict {
    let [a, b] = k.integrals(|g, _| g.abs());
    SmallGainVerdict::new(Condition::Day, 1.0 - a.max(b), None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalConfig {
    pub kernel: NonlocalKernel,
    pub a: f64,
    pub x0: Expr,
    pub grid: Grid,
    pub lambda_fraction: f64,
    pub t_final: f64,
    pub record_every: usize,
}

impl NonlocalConfig {
    pub fn new(kernel: NonlocalKernel, a: f64, x0: Expr, grid: Grid) -> NonlocalConfig {
        NonlocalConfig { kernel, a, x0, grid, lambda_fraction: 0.9, t_final: 1.0, record_every: 1 }
    }

    /// Time step `δ = λ h²` used by [`simulate_nonlocal`].
    pub fn delta(&self) -> Result<f64, ThermoError> {
        if !(self.a > 0.0) {
            return Err(ThermoError::Diffusion(self.a));
        }
        if !(self.lambda_fraction > 0.0 && self.lambda_fraction < 1.0) {
            return Err(FdError::LambdaFraction(self.lambda_fraction).into());
        }
        let h = self.grid.h();
        Ok(self.lambda_fraction * cfl_lambda_max(&Problem::heat(self.a), self.grid)? * h * h)
    }
}

/// Trapezoid weights on the interior nodes and the `2×2` endpoint system.
struct Closure {
    g: [Vec<f64>; 2],
    w: f64,
    inv: [[f64; 2]; 2],
}

impl Closure {
    fn new(k: &NonlocalKernel, grid: Grid) -> Result<Closure, ThermoError> {
        let [g0, g1] = k.sample(grid);
        let n = grid.intervals();
        let w = 0.5 * grid.h();
        let m = [
            [1.0 - w * g0.values()[0], -w * g0.values()[n]],
            [-w * g1.values()[0], 1.0 - w * g1.values()[n]],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return Err(ThermoError::SingularEndpoints(det));
        }
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        Ok(Closure { g: [g0.into_values(), g1.into_values()], w, inv })
    }

    fn interior(&self, side: usize, x: &[f64]) -> f64 {
        let n = x.len() - 1;
        2.0 * self.w * (1..n).map(|i| self.g[side][i] * x[i]).sum::<f64>()
    }

    fn close(&self, x: &mut [f64]) {
        let q = [self.interior(0, x), self.interior(1, x)];
        let n = x.len() - 1;
        x[0] = self.inv[0][0] * q[0] + self.inv[0][1] * q[1];
        x[n] = self.inv[1][0] * q[0] + self.inv[1][1] * q[1];
    }

    /// `x(side) − ∫ g_side x` with the trapezoid rule.
    fn residual(&self, side: usize, x: &[f64]) -> f64 {
        let n = x.len() - 1;
        let end = if side == 0 { x[0] } else { x[n] };
        end - self.interior(side, x) - self.w * (self.g[side][0] * x[0] + self.g[side][n] * x[n])
    }
}

/// Explicit scheme with the endpoint values re-solved after every interior update.
/// Boundary values are stored in `Trajectory::d0`/`d1`.
pub fn simulate_nonlocal(cfg: &NonlocalConfig) -> Result<Trajectory, ThermoError> {
    let delta = cfg.delta()?;
    if !(cfg.t_final > 0.0 && cfg.t_final.is_finite()) {
        return Err(FdError::Horizon(cfg.t_final).into());
    }
    if cfg.record_every == 0 {
        return Err(FdError::Stride.into());
    }
    if cfg.x0.depends_on(Var::T) {
        return Err(FdError::InputVariable { name: "x0", var: Var::T }.into());
    }
    let grid = cfg.grid;
    let h = grid.h();
    let n = grid.intervals();
    let lambda = delta / (h * h);
    let closure = Closure::new(&cfg.kernel, grid)?;
    let mut x = Profile::from_expr(grid, &cfg.x0)?.into_values();
    let mut warnings = Vec::new();
    let e = [closure.residual(0, &x), closure.residual(1, &x)];
    if e[0].abs() > 1e-6 || e[1].abs() > 1e-6 {
        // Shift by α + βz so that both residuals vanish.
        let one = vec![1.0; n + 1];
        let zs: Vec<f64> = grid.points().collect();
        let m = [
            [closure.residual(0, &one), closure.residual(0, &zs)],
            [closure.residual(1, &one), closure.residual(1, &zs)],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return Err(ThermoError::Incompatible(det));
        }
        let alpha = (-e[0] * m[1][1] + e[1] * m[0][1]) / det;
        let beta = (-e[1] * m[0][0] + e[0] * m[1][0]) / det;
        for (v, z) in x.iter_mut().zip(&zs) {
            *v += alpha + beta * z;
        }
        warnings.push(format!(
            "x0 violates the nonlocal conditions (residuals {}, {}); shifted by {alpha} + {beta} z",
            e[0], e[1]
        ));
    }
    let steps = ((cfg.t_final / delta) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut traj = Trajectory {
        grid,
        delta,
        lambda,
        steps,
        times: Vec::new(),
        profiles: Vec::new(),
        d0: Vec::new(),
        d1: Vec::new(),
        forcing: None,
        config: None,
        warnings,
    };
    let record = |traj: &mut Trajectory, t: f64, x: &[f64]| -> Result<(), ThermoError> {
        traj.times.push(t);
        traj.d0.push(x[0]);
        traj.d1.push(x[n]);
        traj.profiles.push(Profile::new(grid, x.to_vec())?);
        Ok(())
    };
    record(&mut traj, 0.0, &x)?;
    let mut next = x.clone();
    for j in 1..=steps {
        let t = (j - 1) as f64 * delta;
        let dt = if j == steps { cfg.t_final - t } else { delta };
        let mu = cfg.a * dt / (h * h);
        for i in 1..n {
            next[i] = x[i] + mu * (x[i + 1] - 2.0 * x[i] + x[i - 1]);
        }
        closure.close(&mut next);
        std::mem::swap(&mut x, &mut next);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FdError::Diverged(j).into());
        }
        if j % cfg.record_every == 0 || j == steps {
            let tj = if j == steps { cfg.t_final } else { j as f64 * delta };
            record(&mut traj, tj, &x)?;
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayNorm {
    Sup,
    L2,
    /// `∫ sin(πz)|x|`.
    L1Sin,
}

impl DecayNorm {
    pub fn eval(self, x: &Profile) -> f64 {
        let g = x.grid();
        match self {
            DecayNorm::Sup => x.max_abs(),
            DecayNorm::L2 => crate::norms::norm_l2(x),
            DecayNorm::L1Sin => {
                let f: Vec<f64> = x.values().iter().enumerate().map(|(i, v)| v.abs() * (PI * g.z(i)).sin()).collect();
                g.trapezoid(&f)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub m: f64,
    /// `f64::INFINITY` when the norm reached zero inside the fit window.
    pub delta: f64,
    pub reached_zero: bool,
}

/// Least-squares slope of `ln‖x[t]‖` over the second half of the horizon.
pub fn fit_decay(traj: &Trajectory, norm: DecayNorm) -> Result<DecayFit, ThermoError> {
    let values: Vec<f64> = traj.profiles.iter().map(|p| norm.eval(p)).collect();
    let n0 = values[0];
    if !(n0 > 0.0) {
        return Err(ThermoError::ZeroInitialNorm);
    }
    let t_end = *traj.times.last().expect("trajectory has samples");
    let window: Vec<usize> = (0..values.len()).filter(|&i| traj.times[i] >= 0.5 * t_end).collect();
    if window.iter().any(|&i| values[i] == 0.0) {
        return Ok(DecayFit { m: 1.0, delta: f64::INFINITY, reached_zero: true });
    }
    if window.len() < 2 {
        return Err(ThermoError::ShortWindow);
    }
    let k = window.len() as f64;
    let tm = window.iter().map(|&i| traj.times[i]).sum::<f64>() / k;
    let ym = window.iter().map(|&i| values[i].ln()).sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &i in &window {
        let dt = traj.times[i] - tm;
        sxy += dt * (values[i].ln() - ym);
        sxx += dt * dt;
    }
    let delta = -sxy / sxx;
    let m = traj
        .times
        .iter()
        .zip(&values)
        .map(|(t, v)| v * (delta * t).exp() / n0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayFit { m, delta, reached_zero: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn k(g0: &str, g1: &str) -> NonlocalKernel {
        NonlocalKernel::from_strs(g0, g1).unwrap()
    }

    #[test]
    fn l2_condition() {
        let v = check_smallgain_l2(&k("0.8", "0.8"));
        assert!(v.holds && (v.margin - (3f64.sqrt() - 1.6)).abs() < 1e-9);
        assert!((check_smallgain_l2(&k("0", "0")).margin - 3f64.sqrt()).abs() < 1e-15);
        let v = check_smallgain_l2(&k("1.5*sin(pi*z)", "1.5*sin(pi*z)"));
        assert!(!v.holds && (v.margin - (3f64.sqrt() - 3.0 * 0.5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn l1w_condition() {
        let v = check_smallgain_l1w(&k("1.5*sin(pi*z)", "1.5*sin(pi*z)")).unwrap();
        assert!(v.holds && (v.margin - (PI - 3.0)).abs() < 1e-9);
        assert!(!check_smallgain_l1w(&k("2*sin(pi*z)", "1.5*sin(pi*z)")).unwrap().holds);
        assert_eq!(check_smallgain_l1w(&k("0", "0")).unwrap().margin, PI);
        assert!(matches!(check_smallgain_l1w(&k("0.8", "0")), Err(ThermoError::EndpointNonzero { .. })));
        // z²(1−z)/sin(πz) increases towards its limit 1/π at z = 1
        let v = check_smallgain_l1w(&k("z*z*(1-z)", "0")).unwrap();
        assert!((PI - v.margin - 1.0 / PI).abs() < 1e-12);
        let v = check_smallgain_l1w(&k("z*(1-z)*(1-z)*(1-z)", "0")).unwrap();
        let dense = (1..100_000)
            .map(|i| i as f64 / 100_000.0)
            .map(|z| z * (1.0 - z).powi(3) / (PI * z).sin())
            .fold(1.0 / PI, f64::max);
        assert!((PI - v.margin - dense).abs() < 1e-6);
    }

    #[test]
    fn sup_condition() {
        let v = check_smallgain_sup(&k("0.8", "0.8"));
        assert!(v.holds);
        let (th, ph) = v.witness.unwrap();
        assert!(th > 0.0 && ph > 0.0 && th < PI - ph);
        let zero = check_smallgain_sup(&k("0", "0"));
        let (th, ph) = zero.witness.unwrap();
        assert!((zero.margin - th.sin().min((th + ph).sin())).abs() < 1e-12);
        assert!(!check_smallgain_sup(&k("1.2", "1.2")).holds);
    }

    #[test]
    fn day_condition() {
        assert!(check_day(&k("0.8", "0.8")).holds);
        assert!(!check_day(&k("1.01", "0")).holds);
        assert!((check_day(&k("z", "0.25")).margin - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_kernel_is_dirichlet_heat() {
        let mut cfg = NonlocalConfig::new(k("0", "0"), 1.0, parse("sin(pi*z)").unwrap(), Grid::new(40).unwrap());
        cfg.t_final = 0.2;
        cfg.record_every = 100;
        let tr = simulate_nonlocal(&cfg).unwrap();
        assert!(tr.warnings.is_empty());
        let mid = tr.last().values()[20];
        assert!((mid - (-PI * PI * 0.2f64).exp()).abs() < 2e-3);
        let fit = fit_decay(&tr, DecayNorm::L2).unwrap();
        assert!((fit.delta / (PI * PI) - 1.0).abs() < 0.02);
    }

    #[test]
    fn compatibility_projection() {
        let mut cfg = NonlocalConfig::new(k("0.8", "0.8"), 1.0, parse("sin(pi*z)+0.3").unwrap(), Grid::new(40).unwrap());
        cfg.t_final = 0.01;
        let tr = simulate_nonlocal(&cfg).unwrap();
        assert_eq!(tr.warnings.len(), 1);
        let c = Closure::new(&cfg.kernel, cfg.grid).unwrap();
        for p in [tr.initial(), tr.last()] {
            assert!(c.residual(0, p.values()).abs() < 1e-12);
            assert!(c.residual(1, p.values()).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_endpoint_system() {
        let cfg = NonlocalConfig::new(k("8", "0"), 1.0, parse("0").unwrap(), Grid::new(4).unwrap());
        assert!(matches!(simulate_nonlocal(&cfg), Err(ThermoError::SingularEndpoints(_))));
    }

    #[test]
    fn verdict_csv() {
        let mut out = Vec::new();
        write_verdicts(&mut out, &[check_day(&k("0.5", "0.5"))], None).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s, "condition,holds,margin,theta,phi\nDAY,true,0.5,,\n");
    }
}
