//! Sturm-Liouville machinery for `A f = -(1/r)(p f')' + (q/r) f` with separated
//! boundary conditions `g0 f(0) + v0 f'(0) = 0`, `g1 f(1) + v1 f'(1) = 0`.

mod bvp;
mod eigen;
mod eta;

use thiserror::Error;

use crate::expr::{parse, Expr, ExprError, Var};
use crate::norms::{Grid, NormError, Profile};

pub use bvp::solve_equilibrium_bvp;
pub use eigen::{check_hypotheses, compute_eigenpairs, EigenPair, HypothesisReport};
pub use eta::{find_eta, EtaFunction, SLOPE_SAMPLES};

pub const DEFAULT_GRID_N: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("coefficient {0} must depend on z only")]
    TimeDependent(&'static str),
    #[error("coefficient {name} must be positive, found {value} at z = {z}")]
    NotPositive { name: &'static str, z: f64, value: f64 },
    #[error("boundary condition at z = {0} has g = v = 0")]
    DegenerateBoundary(u8),
    #[error("gridN = {grid_n} too small for {count} eigenpairs (need at least {required})")]
    GridTooSmall { grid_n: usize, count: usize, required: usize },
    #[error("requested {count} eigenpairs but the discretization has dimension {dim}")]
    TooManyEigenpairs { count: usize, dim: usize },
    #[error("eigen-solver failed: {0}")]
    NotConverged(String),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("eta integration blew up near z = {0}")]
    IntegrationBlowUp(f64),
    #[error("no admissible eta for sigma = {sigma}: scanned slopes in [{lo}, {hi}]")]
    NoAdmissibleSlope { sigma: f64, lo: f64, hi: f64 },
    #[error("eta rejected: {0}")]
    EtaInvalid(String),
    #[error("equilibrium system is singular (smallest pivot {0:e}); zero may be an eigenvalue")]
    Singular(f64),
}

/// Coefficients and boundary constants of the Sturm-Liouville problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    p: Expr,
    r: Expr,
    q: Expr,
    p_prime: Expr,
    g0: f64,
    v0: f64,
    g1: f64,
    v1: f64,
    grid_n: usize,
}

/// `a = p/r`, `b = p'/r`, `c = -q/r` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl Problem {
    pub fn new(
        p: Expr,
        r: Expr,
        q: Expr,
        (g0, v0): (f64, f64),
        (g1, v1): (f64, f64),
    ) -> Result<Problem, SpectralError> {
        for (name, e) in [("p", &p), ("r", &r), ("q", &q)] {
            if e.depends_on(Var::T) {
                return Err(SpectralError::TimeDependent(name));
            }
        }
        if g0 == 0.0 && v0 == 0.0 {
            return Err(SpectralError::DegenerateBoundary(0));
        }
        if g1 == 0.0 && v1 == 0.0 {
            return Err(SpectralError::DegenerateBoundary(1));
        }
        let p_prime = p.differentiate(Var::Z)?;
        let prob = Problem { p, r, q, p_prime, g0, v0, g1, v1, grid_n: DEFAULT_GRID_N };
        prob.validate()?;
        Ok(prob)
    }

    /// Parse the three coefficient strings and build a problem.
    pub fn from_strs(
        p: &str,
        r: &str,
        q: &str,
        left: (f64, f64),
        right: (f64, f64),
    ) -> Result<Problem, SpectralError> {
        Problem::new(parse(p)?, parse(r)?, parse(q)?, left, right)
    }

    /// `x_t = a x_zz` with Dirichlet data written as `-x(t,0) = d0`, `x(t,1) = d1`.
    pub fn heat(a: f64) -> Problem {
        Problem::new(Expr::Num(a), Expr::Num(1.0), Expr::Num(0.0), (-1.0, 0.0), (1.0, 0.0))
            .expect("heat problem with a > 0")
    }

    pub fn with_grid_n(mut self, grid_n: usize) -> Result<Problem, SpectralError> {
        Grid::new(grid_n)?;
        self.grid_n = grid_n;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), SpectralError> {
        let n = self.grid_n;
        for k in 0..=2 * n {
            let z = k as f64 / (2 * n) as f64;
            for (name, e) in [("p", &self.p), ("r", &self.r)] {
                let v = e.eval_z(z)?;
                if v <= 0.0 {
                    return Err(SpectralError::NotPositive { name, z, value: v });
                }
            }
            self.q.eval_z(z)?;
            self.p_prime.eval_z(z)?;
        }
        Ok(())
    }

    pub fn p(&self) -> &Expr {
        &self.p
    }
    pub fn r(&self) -> &Expr {
        &self.r
    }
    pub fn q(&self) -> &Expr {
        &self.q
    }
    pub fn p_prime(&self) -> &Expr {
        &self.p_prime
    }
    pub fn g0(&self) -> f64 {
        self.g0
    }
    pub fn v0(&self) -> f64 {
        self.v0
    }
    pub fn g1(&self) -> f64 {
        self.g1
    }
    pub fn v1(&self) -> f64 {
        self.v1
    }
    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.grid_n).expect("grid_n validated")
    }

    /// (H1): `v0 > 0`, or `v0 = 0` and `g0 < 0`.
    pub fn h1(&self) -> bool {
        self.v0 > 0.0 || (self.v0 == 0.0 && self.g0 < 0.0)
    }

    /// (H2): `v1 > 0`, or `v1 = 0` and `g1 > 0`.
    pub fn h2(&self) -> bool {
        self.v1 > 0.0 || (self.v1 == 0.0 && self.g1 > 0.0)
    }

    pub fn dirichlet_left(&self) -> bool {
        self.v0 == 0.0
    }

    pub fn dirichlet_right(&self) -> bool {
        self.v1 == 0.0
    }

    pub(crate) fn eval(&self, e: &Expr, z: f64) -> Result<f64, SpectralError> {
        Ok(e.eval_z(z)?)
    }

    /// Samples of `p`, `q`, `r` at `k/(2N)`, `k = 0..=2N`.
    pub(crate) fn half_samples(&self, n: usize) -> Result<[Vec<f64>; 3], SpectralError> {
        let mut out = [Vec::new(), Vec::new(), Vec::new()];
        for k in 0..=2 * n {
            let z = k as f64 / (2 * n) as f64;
            out[0].push(self.eval(&self.p, z)?);
            out[1].push(self.eval(&self.q, z)?);
            out[2].push(self.eval(&self.r, z)?);
        }
        Ok(out)
    }

    pub fn r_profile(&self, grid: Grid) -> Result<Profile, SpectralError> {
        Ok(Profile::from_expr(grid, &self.r)?)
    }

    pub fn pde_coefficients(&self, grid: Grid) -> Result<PdeCoefficients, SpectralError> {
        let mut a = Vec::with_capacity(grid.nodes());
        let mut b = Vec::with_capacity(grid.nodes());
        let mut c = Vec::with_capacity(grid.nodes());
        for z in grid.points() {
            let r = self.eval(&self.r, z)?;
            a.push(self.eval(&self.p, z)? / r);
            b.push(self.eval(&self.p_prime, z)? / r);
            c.push(-self.eval(&self.q, z)? / r);
        }
        Ok(PdeCoefficients { a, b, c })
    }

    /// `(a, b, k)` when `a`, `b`, `c` are constant on the grid (within 1e-12 relative).
    pub fn constant_coefficients(&self) -> Result<Option<(f64, f64, f64)>, SpectralError> {
        let co = self.pde_coefficients(self.grid())?;
        let same = |v: &[f64]| {
            let s = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
            v.iter().all(|x| (x - v[0]).abs() <= 1e-12 * s)
        };
        if same(&co.a) && same(&co.b) && same(&co.c) {
            Ok(Some((co.a[0], co.b[0], co.c[0])))
        } else {
            Ok(None)
        }
    }
}
