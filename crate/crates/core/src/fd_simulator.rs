//! Explicit finite-difference scheme for
//! `x_t = a x_zz + b x_z + c x + u` with second-order Robin boundary elimination.

use std::io::{self, Write};

use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};
use crate::norms::{Grid, NormError, Profile};
use crate::spectral::{PdeCoefficients, Problem, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("lambda fraction must lie in (0, 1), got {0}")]
    LambdaFraction(f64),
    #[error("horizon must be positive and finite, got {0}")]
    Horizon(f64),
    #[error("record stride must be at least 1")]
    Stride,
    #[error("input {name} may not depend on {var}")]
    InputVariable { name: &'static str, var: Var },
    #[error("boundary denominator at z = {side} is {value}; the grid is too coarse for the boundary constants")]
    BoundaryDenominator { side: u8, value: f64 },
    #[error("update coefficient {coefficient} at node {index} is negative; refine the grid")]
    NonMonotone { index: usize, coefficient: f64 },
    #[error("state became non-finite at step {0}")]
    Diverged(usize),
    #[error("no steady state within t = {0}")]
    NoSteadyState(f64),
}

/// Everything needed for one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub problem: Problem,
    pub grid: Grid,
    /// `λ` as a fraction of [`cfl_lambda_max`].
    pub lambda_fraction: f64,
    pub t_final: f64,
    pub d0: Expr,
    pub d1: Expr,
    pub u: Expr,
    pub x0: Expr,
    pub record_every: usize,
}

impl SimulationConfig {
    /// Zero inputs, zero initial data, `λ = 0.9 λ_max`, horizon 1.
    pub fn new(problem: Problem, grid: Grid) -> SimulationConfig {
        SimulationConfig {
            problem,
            grid,
            lambda_fraction: 0.9,
            t_final: 1.0,
            d0: Expr::Num(0.0),
            d1: Expr::Num(0.0),
            u: Expr::Num(0.0),
            x0: Expr::Num(0.0),
            record_every: 1,
        }
    }

    pub fn lambda(&self) -> Result<f64, FdError> {
        if !(self.lambda_fraction > 0.0 && self.lambda_fraction < 1.0) {
            return Err(FdError::LambdaFraction(self.lambda_fraction));
        }
        Ok(self.lambda_fraction * cfl_lambda_max(&self.problem, self.grid)?)
    }

    /// Time step `δ = λ h²`.
    pub fn delta(&self) -> Result<f64, FdError> {
        let h = self.grid.h();
        Ok(self.lambda()? * h * h)
    }

    fn validate(&self) -> Result<(), FdError> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(FdError::Horizon(self.t_final));
        }
        if self.record_every == 0 {
            return Err(FdError::Stride);
        }
        for (name, e) in [("d0", &self.d0), ("d1", &self.d1)] {
            if e.depends_on(Var::Z) {
                return Err(FdError::InputVariable { name, var: Var::Z });
            }
        }
        if self.x0.depends_on(Var::T) {
            return Err(FdError::InputVariable { name: "x0", var: Var::T });
        }
        Ok(())
    }
}

/// Recorded solution samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    /// Time step used by the scheme.
    pub delta: f64,
    pub lambda: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub profiles: Vec<Profile>,
    /// Boundary inputs at the recorded times.
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    /// Distributed input at the recorded times; `None` when identically zero.
    pub forcing: Option<Vec<Profile>>,
    pub config: Option<SimulationConfig>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn initial(&self) -> &Profile {
        &self.profiles[0]
    }

    pub fn last(&self) -> &Profile {
        self.profiles.last().expect("trajectory has at least one profile")
    }

    /// CSV with header `t,z0,...,zN`, one row per recorded time.
    pub fn write_csv<W: Write>(&self, w: &mut W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        write!(w, "t")?;
        for i in 0..self.grid.nodes() {
            write!(w, ",z{i}")?;
        }
        writeln!(w)?;
        for (t, x) in self.times.iter().zip(&self.profiles) {
            write!(w, "{t}")?;
            for v in x.values() {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `1 / (1 + 2 max a + max |c|)` over the grid nodes.
pub fn cfl_lambda_max(prob: &Problem, grid: Grid) -> Result<f64, FdError> {
    let co = prob.pde_coefficients(grid)?;
    let amax = co.a.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let cmax = co.c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(1.0 / (1.0 + 2.0 * amax + cmax))
}

/// Boundary node values from the interior nodes and the boundary inputs.
///
/// Uses the one-sided second-order derivative `(-3x0 + 4x1 - x2)/(2h)`, or the
/// Dirichlet value `d/g` when the corresponding `v` is zero.
pub fn apply_boundary(
    x: &[f64],
    d0: f64,
    d1: f64,
    prob: &Problem,
    h: f64,
) -> Result<(f64, f64), FdError> {
    let n = x.len() - 1;
    let left = if prob.dirichlet_left() {
        d0 / prob.g0()
    } else {
        let den = 3.0 * prob.v0() - 2.0 * h * prob.g0();
        if !(den > 0.0) {
            return Err(FdError::BoundaryDenominator { side: 0, value: den });
        }
        (-2.0 * h * d0 + 4.0 * prob.v0() * x[1] - prob.v0() * x[2]) / den
    };
    let right = if prob.dirichlet_right() {
        d1 / prob.g1()
    } else {
        let den = 3.0 * prob.v1() + 2.0 * h * prob.g1();
        if !(den > 0.0) {
            return Err(FdError::BoundaryDenominator { side: 1, value: den });
        }
        (2.0 * h * d1 + 4.0 * prob.v1() * x[n - 1] - prob.v1() * x[n - 2]) / den
    };
    Ok((left, right))
}

enum Forcing {
    Zero,
    Fixed(Vec<f64>),
    Time(Expr),
    Full(Expr),
}

impl Forcing {
    fn new(u: &Expr, grid: Grid) -> Result<Forcing, FdError> {
        Ok(if u.as_literal() == Some(0.0) {
            Forcing::Zero
        } else if !u.depends_on(Var::T) {
            Forcing::Fixed(grid.points().map(|z| u.eval_z(z)).collect::<Result<_, _>>()?)
        } else if !u.depends_on(Var::Z) {
            Forcing::Time(u.clone())
        } else {
            Forcing::Full(u.clone())
        })
    }

    fn sample(&self, t: f64, grid: Grid, out: &mut Vec<f64>) -> Result<(), FdError> {
        out.clear();
        match self {
            Forcing::Zero => out.resize(grid.nodes(), 0.0),
            Forcing::Fixed(v) => out.extend_from_slice(v),
            Forcing::Time(e) => {
                let v = e.eval_t(t)?;
                out.resize(grid.nodes(), v);
            }
            Forcing::Full(e) => {
                for z in grid.points() {
                    out.push(e.eval_tz(t, z)?);
                }
            }
        }
        Ok(())
    }
}

/// Precomputed update weights for one step size.
struct Weights {
    diag: Vec<f64>,
    up: Vec<f64>,
    down: Vec<f64>,
    dt: f64,
}

impl Weights {
    fn new(co: &PdeCoefficients, h: f64, dt: f64) -> Weights {
        let lam = dt / (h * h);
        let n = co.a.len() - 1;
        let mut w = Weights { diag: vec![0.0; n + 1], up: vec![0.0; n + 1], down: vec![0.0; n + 1], dt };
        for i in 1..n {
            w.diag[i] = 1.0 - 2.0 * lam * co.a[i] + lam * h * h * co.c[i];
            w.up[i] = lam * (co.a[i] + 0.5 * h * co.b[i]);
            w.down[i] = lam * (co.a[i] - 0.5 * h * co.b[i]);
        }
        w
    }

    /// All weights of the interior update, including the boundary-eliminated ones,
    /// must be nonnegative.
    fn check(&self, prob: &Problem, h: f64) -> Result<(), FdError> {
        let n = self.diag.len() - 1;
        for i in 1..n {
            for c in [self.diag[i], self.up[i], self.down[i]] {
                if c < 0.0 {
                    return Err(FdError::NonMonotone { index: i, coefficient: c });
                }
            }
        }
        if !prob.dirichlet_left() {
            let den = 3.0 * prob.v0() - 2.0 * h * prob.g0();
            if !(den > 0.0) {
                return Err(FdError::BoundaryDenominator { side: 0, value: den });
            }
            let c = self.up[1] - self.down[1] * prob.v0() / den;
            if c < 0.0 {
                return Err(FdError::NonMonotone { index: 1, coefficient: c });
            }
        }
        if !prob.dirichlet_right() {
            let den = 3.0 * prob.v1() + 2.0 * h * prob.g1();
            if !(den > 0.0) {
                return Err(FdError::BoundaryDenominator { side: 1, value: den });
            }
            let c = self.down[n - 1] - self.up[n - 1] * prob.v1() / den;
            if c < 0.0 {
                return Err(FdError::NonMonotone { index: n - 1, coefficient: c });
            }
        }
        Ok(())
    }

    fn interior(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        let n = x.len() - 1;
        for i in 1..n {
            out[i] = self.diag[i] * x[i] + self.up[i] * x[i + 1] + self.down[i] * x[i - 1] + self.dt * u[i];
        }
    }
}

/// Shared stepping machinery for [`step`] and [`simulate`].
pub(crate) struct Stepper<'a> {
    cfg: &'a SimulationConfig,
    co: PdeCoefficients,
    weights: Weights,
    forcing: Forcing,
    u: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(cfg: &'a SimulationConfig) -> Result<Stepper<'a>, FdError> {
        cfg.validate()?;
        let co = cfg.problem.pde_coefficients(cfg.grid)?;
        let h = cfg.grid.h();
        let weights = Weights::new(&co, h, cfg.delta()?);
        weights.check(&cfg.problem, h)?;
        Ok(Stepper {
            cfg,
            co,
            weights,
            forcing: Forcing::new(&cfg.u, cfg.grid)?,
            u: Vec::with_capacity(cfg.grid.nodes()),
            next: vec![0.0; cfg.grid.nodes()],
        })
    }

    fn advance(&mut self, x: &mut Vec<f64>, t: f64, dt: f64) -> Result<(), FdError> {
        let h = self.cfg.grid.h();
        if dt != self.weights.dt {
            self.weights = Weights::new(&self.co, h, dt);
        }
        self.forcing.sample(t, self.cfg.grid, &mut self.u)?;
        self.weights.interior(x, &self.u, &mut self.next);
        let t1 = t + dt;
        let (l, r) = apply_boundary(
            &self.next,
            self.cfg.d0.eval_t(t1)?,
            self.cfg.d1.eval_t(t1)?,
            &self.cfg.problem,
            h,
        )?;
        let n = x.len() - 1;
        self.next[0] = l;
        self.next[n] = r;
        std::mem::swap(x, &mut self.next);
        Ok(())
    }
}

/// One step of length `δ` from time `t`.
pub fn step(state: &Profile, t: f64, config: &SimulationConfig) -> Result<Profile, FdError> {
    let mut s = Stepper::new(config)?;
    let mut x = state.values().to_vec();
    let dt = s.weights.dt;
    s.advance(&mut x, t, dt)?;
    Profile::new(config.grid, x).map_err(|_| FdError::Diverged(1))
}

fn initial_state(cfg: &SimulationConfig) -> Result<(Vec<f64>, Vec<String>), FdError> {
    let x0 = Profile::from_expr(cfg.grid, &cfg.x0)?.into_values();
    let prob = &cfg.problem;
    let mut warnings = Vec::new();
    let slope = |v: f64, z: f64| -> Result<f64, ExprError> {
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(v * cfg.x0.differentiate(Var::Z)?.eval_z(z)?)
    };
    let left = prob.g0() * cfg.x0.eval_z(0.0)? + slope(prob.v0(), 0.0)?;
    let right = prob.g1() * cfg.x0.eval_z(1.0)? + slope(prob.v1(), 1.0)?;
    let (d0, d1) = (cfg.d0.eval_t(0.0)?, cfg.d1.eval_t(0.0)?);
    if (left - d0).abs() > 1e-6 {
        warnings.push(format!("x0 incompatible with the left boundary input at t = 0 ({left} vs {d0})"));
    }
    if (right - d1).abs() > 1e-6 {
        warnings.push(format!("x0 incompatible with the right boundary input at t = 0 ({right} vs {d1})"));
    }
    Ok((x0, warnings))
}

/// One sample handed to a [`simulate_observed`] callback.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'s> {
    pub step: usize,
    pub last: bool,
    pub t: f64,
    pub x: &'s [f64],
    pub d0: f64,
    pub d1: f64,
    /// `None` when the distributed input is identically zero.
    pub u: Option<&'s [f64]>,
}

/// Run the scheme over `⌈T/δ⌉` steps, calling `observe` at `t = 0` and after every
/// step; the last step is shortened to end at `T`. Returns `(δ, steps, warnings)`.
pub fn simulate_observed<F>(config: &SimulationConfig, mut observe: F) -> Result<(f64, usize, Vec<String>), FdError>
where
    F: FnMut(Sample<'_>) -> Result<(), FdError>,
{
    let mut stepper = Stepper::new(config)?;
    let grid = config.grid;
    let delta = stepper.weights.dt;
    let steps = ((config.t_final / delta) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let (mut x, warnings) = initial_state(config)?;
    let keep_forcing = !matches!(stepper.forcing, Forcing::Zero);
    let mut emit = |j: usize, t: f64, x: &[f64], s: &mut Stepper| -> Result<(), FdError> {
        let last = j == steps;
        if keep_forcing {
            s.forcing.sample(t, grid, &mut s.u)?;
        }
        observe(Sample {
            step: j,
            last,
            t,
            x,
            d0: config.d0.eval_t(t)?,
            d1: config.d1.eval_t(t)?,
            u: keep_forcing.then_some(&s.u[..]),
        })
    };
    emit(0, 0.0, &x, &mut stepper)?;
    for j in 1..=steps {
        let t = (j - 1) as f64 * delta;
        let dt = if j == steps { config.t_final - t } else { delta };
        stepper.advance(&mut x, t, dt)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FdError::Diverged(j));
        }
        let tj = if j == steps { config.t_final } else { j as f64 * delta };
        emit(j, tj, &x, &mut stepper)?;
    }
    Ok((delta, steps, warnings))
}

/// Run the scheme and keep every `record_every`-th step plus the final time.
pub fn simulate(config: &SimulationConfig) -> Result<Trajectory, FdError> {
    let grid = config.grid;
    let mut times = Vec::new();
    let mut profiles = Vec::new();
    let mut d0 = Vec::new();
    let mut d1 = Vec::new();
    let mut forcing: Option<Vec<Profile>> = None;
    let (delta, steps, warnings) = simulate_observed(config, |s| {
        if s.step % config.record_every == 0 || s.last {
            times.push(s.t);
            profiles.push(Profile::new(grid, s.x.to_vec())?);
            d0.push(s.d0);
            d1.push(s.d1);
            if let Some(u) = s.u {
                forcing.get_or_insert_with(Vec::new).push(Profile::new(grid, u.to_vec())?);
            }
        }
        Ok(())
    })?;
    Ok(Trajectory {
        grid,
        delta,
        lambda: delta / (grid.h() * grid.h()),
        steps,
        times,
        profiles,
        d0,
        d1,
        forcing,
        config: Some(config.clone()),
        warnings,
    })
}

/// Step until `max |x(t+Δ) - x(t)| ≤ tol` with `Δ = check_interval`, or fail at `t_max`.
/// Returns the final profile and the time reached.
pub fn run_to_steady_state(
    config: &SimulationConfig,
    tol: f64,
    check_interval: f64,
    t_max: f64,
) -> Result<(Profile, f64), FdError> {
    let mut stepper = Stepper::new(config)?;
    let delta = stepper.weights.dt;
    let stride = ((check_interval / delta).ceil() as usize).max(1);
    let (mut x, _) = initial_state(config)?;
    let mut last = x.clone();
    let mut j = 0usize;
    loop {
        let t = j as f64 * delta;
        if t > t_max {
            return Err(FdError::NoSteadyState(t_max));
        }
        stepper.advance(&mut x, t, delta)?;
        j += 1;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(FdError::Diverged(j));
        }
        if j.is_multiple_of(stride) {
            let change = x.iter().zip(&last).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if change <= tol {
                return Ok((Profile::new(config.grid, x)?, j as f64 * delta));
            }
            last.copy_from_slice(&x);
        }
    }
}
