//! Both sides of the ISS estimates evaluated along simulated trajectories.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::fd_simulator::{run_to_steady_state, simulate_observed, FdError, Sample, SimulationConfig, Trajectory};
use crate::gains::{gains_l1, gains_l2_bvp, GainError, GainSet, L1Gains, LinfGains};
use crate::norms::{Grid, NormError};
use crate::expr::Expr;
use crate::spectral::{EtaFunction, Problem, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error(transparent)]
    Fd(#[from] FdError),
    #[error(transparent)]
    Gain(#[from] GainError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("grid mismatch: estimate built for {expected} intervals, trajectory has {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error("empty (epsilon, omega) grid")]
    EmptyGrid,
    #[error("{0} requires Dirichlet conditions at both ends")]
    NotDirichlet(&'static str),
    #[error("{0} requires constant coefficients with b = 0 and c = 0")]
    NotHeat(&'static str),
    #[error("{0} does not account for a distributed input")]
    UnsupportedForcing(&'static str),
    #[error("theta = {0} outside (0, pi/2]")]
    ThetaRange(f64),
    #[error("lambda1 = {0} is not positive")]
    NonPositiveLambda(f64),
    #[error("trajectory is empty")]
    EmptyTrajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateId {
    /// Weighted sup norm with an `η` from the Sturm-Liouville problem.
    InfEta,
    /// `‖·‖₂,ᵣ`.
    L2R,
    /// `‖·‖₁,w` with `w = exp(bz/2a) sin(πz)`.
    L1W,
    HeatL1,
    HeatL2,
    /// Heat sup estimate with weight `sin(θ + zφ)`.
    HeatSup,
    /// Weight `sin(θ + z(π − 2θ))`, rate `a(π − 2θ)²`.
    HeatMaxPrinciple,
    /// `θ = π/4` case: factor `√2`, rate `aπ²/4`.
    HeatSqrt2,
}

impl EstimateId {
    pub fn name(self) -> &'static str {
        match self {
            EstimateId::InfEta => "INF_ETA",
            EstimateId::L2R => "L2_R",
            EstimateId::L1W => "L1_W",
            EstimateId::HeatL1 => "HEAT_L1",
            EstimateId::HeatL2 => "HEAT_L2",
            EstimateId::HeatSup => "HEAT_SUP",
            EstimateId::HeatMaxPrinciple => "HEAT_MAXPRINCIPLE",
            EstimateId::HeatSqrt2 => "HEAT_SQRT2",
        }
    }

    pub fn from_name(s: &str) -> Option<EstimateId> {
        EstimateId::ALL.into_iter().find(|id| id.name().eq_ignore_ascii_case(s))
    }

    pub const ALL: [EstimateId; 8] = [
        EstimateId::InfEta,
        EstimateId::L2R,
        EstimateId::L1W,
        EstimateId::HeatL1,
        EstimateId::HeatL2,
        EstimateId::HeatSup,
        EstimateId::HeatMaxPrinciple,
        EstimateId::HeatSqrt2,
    ];
}

impl fmt::Display for EstimateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the right-hand side combines the initial-state and input terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Max,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `1e-9 + 10·h·max_t lhs`.
    Auto,
    Absolute(f64),
}

impl Tolerance {
    fn resolve(self, h: f64, lhs: &[f64]) -> f64 {
        match self {
            Tolerance::Auto => 1e-9 + 10.0 * h * lhs.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Tolerance::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub id: EstimateId,
    pub form: Form,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub margin: Vec<f64>,
    pub worst_margin: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CertificateReport {
    /// CSV `t,lhs,rhs,margin` followed by a commented summary.
    pub fn write_csv<W: Write>(&self, w: &mut W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "t,lhs,rhs,margin")?;
        for i in 0..self.times.len() {
            writeln!(w, "{},{},{},{}", self.times[i], self.lhs[i], self.rhs[i], self.margin[i])?;
        }
        writeln!(w, "# {}", self.summary())
    }

    pub fn summary(&self) -> String {
        format!(
            "estimate={} form={:?} worstMargin={:e} tol={:e} verdict={}",
            self.id,
            self.form,
            self.worst_margin,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Lhs {
    /// `max_i |x_i| · s_i`.
    Sup(Vec<f64>),
    /// `Σ_i c_i |x_i|`.
    Abs(Vec<f64>),
    /// `(Σ_i c_i x_i²)^{1/2}`.
    Square(Vec<f64>),
}

impl Lhs {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Lhs::Sup(s) => x.iter().zip(s).fold(0.0f64, |m, (x, s)| m.max(x.abs() * s)),
            Lhs::Abs(c) => x.iter().zip(c).map(|(x, c)| c * x.abs()).sum(),
            Lhs::Square(c) => x.iter().zip(c).map(|(x, c)| c * x * x).sum::<f64>().sqrt(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Lhs::Sup(v) | Lhs::Abs(v) | Lhs::Square(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Decay {
    Exp(f64),
    /// `√(e^{-λt} / (2 − e^{-λt}))`.
    Ratio(f64),
}

impl Decay {
    fn at(self, t: f64) -> f64 {
        match self {
            Decay::Exp(rate) => (-rate * t).exp(),
            Decay::Ratio(l) => {
                let e = (-l * t).exp();
                (e / (2.0 - e)).sqrt()
            }
        }
    }
}

/// One estimate ready to be evaluated on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    id: EstimateId,
    form: Form,
    intervals: usize,
    lhs: Lhs,
    decay: Decay,
    outer: f64,
    /// Candidate `(γ0, γ1, γu)`; the right-hand side is minimized over them.
    gains: Vec<[f64; 3]>,
    /// Boundary statistic is `|d_i| · boundary_scale[i]`.
    boundary_scale: [f64; 2],
    /// Distributed statistic is `max_z |u| · forcing_weight`; `None` if `u` is not admitted.
    forcing_weight: Option<Vec<f64>>,
}

fn trapezoid_weights(grid: Grid, w: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = grid.intervals();
    let h = grid.h();
    (0..=n).map(|i| if i == 0 || i == n { 0.5 * h * w(i) } else { h * w(i) }).collect()
}

fn heat_constant(prob: &Problem, what: &'static str) -> Result<f64, CertificateError> {
    if !(prob.dirichlet_left() && prob.dirichlet_right()) {
        return Err(CertificateError::NotDirichlet(what));
    }
    match prob.constant_coefficients()? {
        Some((a, b, c)) if b == 0.0 && c == 0.0 => Ok(a),
        _ => Err(CertificateError::NotHeat(what)),
    }
}

impl Estimate {
    pub fn id(&self) -> EstimateId {
        self.id
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// Weighted sup estimate with `η` and the gains derived from it.
    pub fn linf(grid: Grid, eta: &EtaFunction, gains: &LinfGains) -> Estimate {
        let e = eta.sample_on(grid);
        let inv: Vec<f64> = e.values().iter().map(|v| 1.0 / v).collect();
        Estimate {
            id: EstimateId::InfEta,
            form: Form::Max,
            intervals: grid.intervals(),
            lhs: Lhs::Sup(inv.clone()),
            decay: Decay::Exp(gains.sigma),
            outer: 1.0,
            gains: vec![[gains.gamma0, gains.gamma1, gains.gamma_u]],
            boundary_scale: [1.0, 1.0],
            forcing_weight: Some(inv),
        }
    }

    /// `‖·‖₂,ᵣ` estimate, minimized over the supplied `(ε, ω)` pairs.
    pub fn l2(
        grid: Grid,
        prob: &Problem,
        gains: &GainSet,
        eps_omega: &[(f64, f64)],
    ) -> Result<Estimate, CertificateError> {
        if eps_omega.is_empty() {
            return Err(CertificateError::EmptyGrid);
        }
        if !(gains.lambda1 > 0.0) {
            return Err(CertificateError::NonPositiveLambda(gains.lambda1));
        }
        let r = prob.r_profile(grid)?;
        let c = trapezoid_weights(grid, |i| r.values()[i]);
        let candidates = eps_omega
            .iter()
            .map(|&(e, w)| {
                [
                    gains.c0 * ((1.0 + 1.0 / e) * (1.0 + w)).sqrt(),
                    gains.c1 * ((1.0 + e) * (1.0 + w)).sqrt(),
                    gains.c_tilde * (1.0 + 1.0 / w).sqrt(),
                ]
            })
            .collect();
        Ok(Estimate {
            id: EstimateId::L2R,
            form: Form::Sum,
            intervals: grid.intervals(),
            lhs: Lhs::Square(c),
            decay: Decay::Ratio(gains.lambda1),
            outer: 1.0,
            gains: candidates,
            boundary_scale: [1.0, 1.0],
            forcing_weight: Some(vec![1.0; grid.nodes()]),
        })
    }

    /// `‖·‖₁,w` estimate for Dirichlet problems with constant `a`, `b`, `k`.
    pub fn l1(grid: Grid, prob: &Problem, gains: &L1Gains) -> Result<Estimate, CertificateError> {
        if !(prob.dirichlet_left() && prob.dirichlet_right()) {
            return Err(CertificateError::NotDirichlet("L1_W"));
        }
        let w: Vec<f64> = grid
            .points()
            .map(|z| (gains.b * z / (2.0 * gains.a)).exp() * (PI * z).sin())
            .collect();
        Ok(Estimate {
            id: EstimateId::L1W,
            form: Form::Sum,
            intervals: grid.intervals(),
            lhs: Lhs::Abs(trapezoid_weights(grid, |i| w[i])),
            decay: Decay::Exp(gains.rate),
            outer: 1.0,
            gains: vec![[gains.boundary0, gains.boundary1, gains.distributed]],
            boundary_scale: [1.0 / prob.g0().abs(), 1.0 / prob.g1().abs()],
            forcing_weight: Some(w),
        })
    }

    /// The five heat estimates: `L¹` with `sin(πz)`, `L²`, the sup estimate with
    /// `φ = π/2` at `θ`, the maximum-principle refinement at `θ`, and its `θ = π/4` case.
    pub fn heat_suite(grid: Grid, prob: &Problem, theta: f64) -> Result<Vec<Estimate>, CertificateError> {
        let a = heat_constant(prob, "heat suite")?;
        if !(theta > 0.0 && theta <= PI / 2.0) {
            return Err(CertificateError::ThetaRange(theta));
        }
        let bs = [1.0 / prob.g0().abs(), 1.0 / prob.g1().abs()];
        let z: Vec<f64> = grid.points().collect();
        let base = |id, form, lhs, decay, outer, gains: [f64; 3]| Estimate {
            id,
            form,
            intervals: grid.intervals(),
            lhs,
            decay,
            outer,
            gains: vec![gains],
            boundary_scale: bs,
            forcing_weight: None,
        };
        let rate = a * PI * PI;
        let sin_pi = |i: usize| (PI * z[i]).sin();
        let mut out = vec![
            base(
                EstimateId::HeatL1,
                Form::Sum,
                Lhs::Abs(trapezoid_weights(grid, sin_pi)),
                Decay::Exp(rate),
                1.0,
                [1.0 / PI, 1.0 / PI, 0.0],
            ),
            base(
                EstimateId::HeatL2,
                Form::Sum,
                Lhs::Square(trapezoid_weights(grid, |_| 1.0)),
                Decay::Ratio(rate),
                1.0,
                [1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), 0.0],
            ),
        ];
        if theta < PI / 2.0 {
            let phi = PI / 2.0;
            let s = (theta + phi).sin();
            out.push(base(
                EstimateId::HeatSup,
                Form::Max,
                Lhs::Sup(z.iter().map(|z| s / (theta + z * phi).sin()).collect()),
                Decay::Exp(a * phi * phi),
                1.0,
                [s / theta.sin(), 1.0, 0.0],
            ));
        }
        let span = PI - 2.0 * theta;
        out.push(base(
            EstimateId::HeatMaxPrinciple,
            Form::Max,
            Lhs::Sup(z.iter().map(|z| 1.0 / (theta + z * span).sin()).collect()),
            Decay::Exp(a * span * span),
            1.0,
            [1.0 / theta.sin(), 1.0 / theta.sin(), 0.0],
        ));
        out.push(base(
            EstimateId::HeatSqrt2,
            Form::Max,
            Lhs::Sup(vec![1.0; grid.nodes()]),
            Decay::Exp(rate / 4.0),
            2f64.sqrt(),
            [1.0, 1.0, 0.0],
        ));
        Ok(out)
    }

    /// Right-hand side from the initial norm and the running input statistics.
    fn rhs(&self, t: f64, lhs0: f64, b0: f64, b1: f64, u: f64) -> f64 {
        let init = self.decay.at(t) * lhs0;
        let terms = self.gains.iter().map(|g| match self.form {
            Form::Max => self.outer * init.max(g[0] * b0).max(g[1] * b1) + g[2] * u,
            Form::Sum => self.outer * (init + g[0] * b0 + g[1] * b1) + g[2] * u,
        });
        terms.fold(f64::INFINITY, f64::min)
    }

    #[cfg(test)]
    fn lhs_of(&self, x: &[f64]) -> f64 {
        self.lhs.eval(x)
    }
}

/// Accumulates one report per estimate from a stream of samples.
#[derive(Debug, Clone)]
pub struct Certifier {
    estimates: Vec<Estimate>,
    h: f64,
    lhs0: Vec<f64>,
    running: Vec<[f64; 3]>,
    times: Vec<f64>,
    lhs: Vec<Vec<f64>>,
    rhs: Vec<Vec<f64>>,
}

impl Certifier {
    pub fn new(grid: Grid, estimates: Vec<Estimate>) -> Result<Certifier, CertificateError> {
        for e in &estimates {
            if e.intervals != grid.intervals() || e.lhs.len() != grid.nodes() {
                return Err(CertificateError::GridMismatch { expected: e.intervals, found: grid.intervals() });
            }
        }
        let k = estimates.len();
        Ok(Certifier {
            estimates,
            h: grid.h(),
            lhs0: Vec::new(),
            running: vec![[0.0; 3]; k],
            times: Vec::new(),
            lhs: vec![Vec::new(); k],
            rhs: vec![Vec::new(); k],
        })
    }

    pub fn observe(&mut self, t: f64, x: &[f64], d0: f64, d1: f64, u: Option<&[f64]>) -> Result<(), CertificateError> {
        let first = self.times.is_empty();
        self.times.push(t);
        for (k, e) in self.estimates.iter().enumerate() {
            let ustat = match (u, &e.forcing_weight) {
                (None, _) => 0.0,
                (Some(u), Some(w)) => u.iter().zip(w).fold(0.0f64, |m, (u, w)| m.max(u.abs() * w)),
                (Some(_), None) => return Err(CertificateError::UnsupportedForcing(e.id.name())),
            };
            let run = &mut self.running[k];
            run[0] = run[0].max(d0.abs() * e.boundary_scale[0]);
            run[1] = run[1].max(d1.abs() * e.boundary_scale[1]);
            run[2] = run[2].max(ustat);
            let l = e.lhs.eval(x);
            if first {
                self.lhs0.push(l);
            }
            let r = e.rhs(t, self.lhs0[k], run[0], run[1], run[2]);
            self.lhs[k].push(l);
            self.rhs[k].push(r);
        }
        Ok(())
    }

    pub fn finish(self, tol: Tolerance) -> Vec<CertificateReport> {
        let h = self.h;
        let times = self.times;
        self.estimates
            .iter()
            .zip(self.lhs)
            .zip(self.rhs)
            .map(|((e, lhs), rhs)| {
                let margin: Vec<f64> = rhs.iter().zip(&lhs).map(|(r, l)| r - l).collect();
                let worst = margin.iter().copied().fold(f64::INFINITY, f64::min);
                let tol = tol.resolve(h, &lhs);
                CertificateReport {
                    id: e.id,
                    form: e.form,
                    times: times.clone(),
                    lhs,
                    rhs,
                    margin,
                    worst_margin: worst,
                    tol,
                    pass: worst >= -tol,
                }
            })
            .collect()
    }
}

/// Evaluate estimates on every recorded sample of a trajectory.
pub fn certify_trajectory(
    traj: &Trajectory,
    estimates: Vec<Estimate>,
    tol: Tolerance,
) -> Result<Vec<CertificateReport>, CertificateError> {
    if traj.times.is_empty() {
        return Err(CertificateError::EmptyTrajectory);
    }
    let mut c = Certifier::new(traj.grid, estimates)?;
    for i in 0..traj.times.len() {
        let u = traj.forcing.as_ref().map(|f| f[i].values());
        c.observe(traj.times[i], traj.profiles[i].values(), traj.d0[i], traj.d1[i], u)?;
    }
    Ok(c.finish(tol))
}

/// Simulate and certify every time step without storing the trajectory.
pub fn certify_streaming(
    config: &SimulationConfig,
    estimates: Vec<Estimate>,
    tol: Tolerance,
) -> Result<Vec<CertificateReport>, CertificateError> {
    let mut c = Certifier::new(config.grid, estimates)?;
    let mut failure = None;
    simulate_observed(config, |s: Sample<'_>| {
        if let Err(e) = c.observe(s.t, s.x, s.d0, s.d1, s.u) {
            failure = Some(e);
            return Err(FdError::Diverged(s.step));
        }
        Ok(())
    })
    .map_err(|e| failure.take().unwrap_or(CertificateError::Fd(e)))?;
    Ok(c.finish(tol))
}

fn single(traj: &Trajectory, e: Estimate, tol: Tolerance) -> Result<CertificateReport, CertificateError> {
    Ok(certify_trajectory(traj, vec![e], tol)?.remove(0))
}

pub fn certify_linf(
    traj: &Trajectory,
    eta: &EtaFunction,
    gains: &LinfGains,
    tol: Tolerance,
) -> Result<CertificateReport, CertificateError> {
    single(traj, Estimate::linf(traj.grid, eta, gains), tol)
}

/// Default `(ε, ω)` grid: `{0.1, 0.5, 1, 2, 10}²`.
pub fn default_eps_omega() -> Vec<(f64, f64)> {
    let v = [0.1, 0.5, 1.0, 2.0, 10.0];
    v.iter().flat_map(|&e| v.iter().map(move |&w| (e, w))).collect()
}

pub fn certify_l2(
    traj: &Trajectory,
    prob: &Problem,
    gains: &GainSet,
    eps_omega: &[(f64, f64)],
    tol: Tolerance,
) -> Result<CertificateReport, CertificateError> {
    single(traj, Estimate::l2(traj.grid, prob, gains, eps_omega)?, tol)
}

pub fn certify_l1(
    traj: &Trajectory,
    prob: &Problem,
    gains: &L1Gains,
    tol: Tolerance,
) -> Result<CertificateReport, CertificateError> {
    single(traj, Estimate::l1(traj.grid, prob, gains)?, tol)
}

pub fn certify_heat_suite(
    traj: &Trajectory,
    prob: &Problem,
    theta: f64,
    tol: Tolerance,
) -> Result<Vec<CertificateReport>, CertificateError> {
    certify_trajectory(traj, Estimate::heat_suite(traj.grid, prob, theta)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `‖·‖₁,w`, gain from the closed-form constants (Dirichlet, constant coefficients).
    L1W,
    /// `‖·‖₂,ᵣ`, gain `C0` or `C1` from the equilibrium problem.
    L2R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

type NormFn = Box<dyn Fn(&[f64]) -> f64>;

/// Drive the problem to steady state with the constant disturbance `amplitude` on one
/// side, and return `gain − ‖steady state‖`.
pub fn sharpness_gap(
    prob: &Problem,
    kind: NormKind,
    side: Side,
    amplitude: f64,
    grid: Grid,
) -> Result<f64, CertificateError> {
    let mut cfg = SimulationConfig::new(prob.clone(), grid);
    match side {
        Side::Left => cfg.d0 = Expr::Num(amplitude),
        Side::Right => cfg.d1 = Expr::Num(amplitude),
    }
    let (gain, norm): (f64, NormFn) = match kind {
        NormKind::L1W => {
            let (a, b, k) = prob.constant_coefficients()?.ok_or(CertificateError::NotHeat("L1_W sharpness"))?;
            let g = gains_l1(a, b, k)?;
            let est = Estimate::l1(grid, prob, &g)?;
            let gain = match side {
                Side::Left => g.boundary0 / prob.g0().abs(),
                Side::Right => g.boundary1 / prob.g1().abs(),
            };
            (gain, Box::new(move |x| est.lhs.eval(x)))
        }
        NormKind::L2R => {
            let (c0, c1) = gains_l2_bvp(prob)?;
            let r = prob.r_profile(grid)?;
            let lhs = Lhs::Square(trapezoid_weights(grid, |i| r.values()[i]));
            (if side == Side::Left { c0 } else { c1 }, Box::new(move |x| lhs.eval(x)))
        }
    };
    if amplitude == 0.0 {
        return Ok(gain);
    }
    let t_max = 200.0 / gains_lambda_hint(prob)?;
    let (steady, _) = run_to_steady_state(&cfg, 1e-8, 0.01, t_max)?;
    Ok(gain - norm(steady.values()) / amplitude.abs())
}

fn gains_lambda_hint(prob: &Problem) -> Result<f64, CertificateError> {
    let coarse = prob.clone().with_grid_n(prob.grid_n().min(200))?;
    let l = crate::spectral::compute_eigenpairs(&coarse, 1)?[0].lambda;
    if !(l > 0.0) {
        return Err(CertificateError::NonPositiveLambda(l));
    }
    Ok(l.min(1e6))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::spectral::find_eta;

    fn heat_cfg(n: usize, t: f64) -> SimulationConfig {
        SimulationConfig { t_final: t, ..SimulationConfig::new(Problem::heat(1.0), Grid::new(n).unwrap()) }
    }

    #[test]
    fn zero_everything_is_tight() {
        let cfg = heat_cfg(40, 0.05);
        let traj = crate::fd_simulator::simulate(&cfg).unwrap();
        let eta = find_eta(&Problem::heat(1.0), PI * PI / 4.0).unwrap();
        let g = crate::gains::gains_linf(&eta).unwrap();
        let r = certify_linf(&traj, &eta, &g, Tolerance::Auto).unwrap();
        assert!(r.pass);
        assert!(r.lhs.iter().chain(&r.rhs).all(|v| *v == 0.0));
    }

    #[test]
    fn decaying_mode_heat_suite() {
        let cfg = SimulationConfig { x0: parse("sin(pi*z)").unwrap(), record_every: 50, ..heat_cfg(50, 0.5) };
        let traj = crate::fd_simulator::simulate(&cfg).unwrap();
        let reports = certify_heat_suite(&traj, &Problem::heat(1.0), PI / 4.0, Tolerance::Absolute(0.0)).unwrap();
        assert_eq!(reports.len(), 5);
        for r in &reports {
            assert!(r.pass, "{}", r.summary());
        }
        // heat L1 at x0 = sin(πz): lhs(0) = 1/2
        assert!((reports[0].lhs[0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn max_principle_at_half_pi() {
        let g = Grid::new(20).unwrap();
        let suite = Estimate::heat_suite(g, &Problem::heat(1.0), PI / 2.0).unwrap();
        let mp = suite.iter().find(|e| e.id == EstimateId::HeatMaxPrinciple).unwrap();
        let x: Vec<f64> = g.points().map(|z| z - 0.3).collect();
        assert_eq!(mp.lhs_of(&x), 0.7);
        for t in [0.0, 1.0, 100.0] {
            assert_eq!(mp.rhs_simple(t, 0.7, 0.2, 0.9), 0.9);
            assert_eq!(mp.rhs_simple(t, 0.7, 0.2, 0.1), 0.7);
        }
        assert!(suite.iter().all(|e| e.id != EstimateId::HeatSup));
    }

    impl Estimate {
        fn rhs_simple(&self, t: f64, l0: f64, b0: f64, b1: f64) -> f64 {
            self.rhs(t, l0, b0, b1, 0.0)
        }
    }

    #[test]
    fn rhs_is_monotone_in_disturbances() {
        let g = Grid::new(20).unwrap();
        for e in Estimate::heat_suite(g, &Problem::heat(1.0), PI / 3.0).unwrap() {
            let lo = e.rhs_simple(0.3, 1.0, 0.5, 0.5);
            assert!(e.rhs_simple(0.3, 1.0, 0.6, 0.5) >= lo);
            assert!(e.rhs_simple(0.3, 1.0, 0.5, 0.6) >= lo);
        }
    }

    #[test]
    fn theta_range() {
        let g = Grid::new(20).unwrap();
        assert!(matches!(
            Estimate::heat_suite(g, &Problem::heat(1.0), 0.0),
            Err(CertificateError::ThetaRange(_))
        ));
        let robin = Problem::from_strs("1", "1", "0", (-1.0, 1.0), (1.0, 0.0)).unwrap();
        assert!(matches!(Estimate::heat_suite(g, &robin, 0.5), Err(CertificateError::NotDirichlet(_))));
    }

    #[test]
    fn zero_disturbance_gap_is_gain() {
        let g = Grid::new(50).unwrap();
        let gap = sharpness_gap(&Problem::heat(1.0), NormKind::L1W, Side::Left, 0.0, g).unwrap();
        assert_eq!(gap, 1.0 / PI);
    }
}
