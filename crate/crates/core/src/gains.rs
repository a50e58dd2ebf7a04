//! ISS gains and decay rates: eigen-series, equilibrium BVP and closed forms.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::norms::{norm_l2_weighted, NormError};
use crate::spectral::{
    compute_eigenpairs, solve_equilibrium_bvp, EigenPair, EtaFunction, Problem, SpectralError,
};

pub const DEFAULT_SERIES_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GainError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("series gains need at least 50 eigenpairs, got {0}")]
    TooFewEigenpairs(usize),
    #[error("eigenvalue lambda_{n} = {lambda} is not positive")]
    NonPositiveEigenvalue { n: usize, lambda: f64 },
    #[error("eta boundary margin {0} is not positive")]
    ZeroMargin(f64),
    #[error("a must be positive, got {0}")]
    NonPositiveDiffusion(f64),
    #[error("k = {k} must be below a*pi^2 + b^2/(4a) = {threshold}")]
    L1Threshold { k: f64, threshold: f64 },
}

/// Truncated eigen-series for `C0`, `C1`, `C̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Series {
    pub c0: f64,
    pub c1: f64,
    pub c_tilde: f64,
    pub terms: usize,
    /// Last summand of each squared series `(C0², C1², C̃²)`.
    pub last_increment: [f64; 3],
}

/// Partial sums of the series without any minimum on the number of terms.
pub fn l2_series_sums(eigs: &[EigenPair], prob: &Problem) -> Result<L2Series, GainError> {
    let (g0, v0, g1, v1) = (prob.g0(), prob.v0(), prob.g1(), prob.v1());
    let r = prob.r_profile(eigs.first().map_or(prob.grid(), |e| e.phi.grid()))?;
    let mut sums = [0.0; 3];
    let mut last = [0.0; 3];
    for e in eigs {
        if !(e.lambda > 0.0) {
            return Err(GainError::NonPositiveEigenvalue { n: e.n, lambda: e.lambda });
        }
        let inv2 = 1.0 / (e.lambda * e.lambda);
        let b0 = g0 * e.dphi0 - v0 * e.phi0;
        let b1 = v1 * e.phi1 - g1 * e.dphi1;
        let weighted: Vec<f64> =
            e.phi.values().iter().zip(r.values()).map(|(f, r)| r * f.abs()).collect();
        let m = e.phi.grid().trapezoid(&weighted);
        last = [inv2 * b0 * b0, inv2 * b1 * b1, inv2 * m * m];
        for k in 0..3 {
            sums[k] += last[k];
        }
    }
    let p0 = prob.eval(prob.p(), 0.0)?;
    let p1 = prob.eval(prob.p(), 1.0)?;
    Ok(L2Series {
        c0: p0 / (g0 * g0 + v0 * v0) * sums[0].sqrt(),
        c1: p1 / (g1 * g1 + v1 * v1) * sums[1].sqrt(),
        c_tilde: sums[2].sqrt(),
        terms: eigs.len(),
        last_increment: last,
    })
}

/// `C0`, `C1`, `C̃` from at least 50 eigenpairs.
pub fn gains_l2_series(eigs: &[EigenPair], prob: &Problem) -> Result<L2Series, GainError> {
    if eigs.len() < 50 {
        return Err(GainError::TooFewEigenpairs(eigs.len()));
    }
    l2_series_sums(eigs, prob)
}

/// `C0 = ‖x̃‖₂,r / √(g0²+v0²)` and `C1` likewise, from the equilibrium problems.
pub fn gains_l2_bvp(prob: &Problem) -> Result<(f64, f64), GainError> {
    let n0 = prob.g0().hypot(prob.v0());
    let n1 = prob.g1().hypot(prob.v1());
    let r = prob.r_profile(prob.grid())?;
    let left = solve_equilibrium_bvp(prob, n0, 0.0)?;
    let right = solve_equilibrium_bvp(prob, 0.0, n1)?;
    Ok((norm_l2_weighted(&left, &r)? / n0, norm_l2_weighted(&right, &r)? / n1))
}

/// Sup-norm gains for a given `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinfGains {
    pub sigma: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma_u: f64,
}

pub fn gains_linf(eta: &EtaFunction) -> Result<LinfGains, GainError> {
    for m in [eta.boundary_margin0, eta.boundary_margin1] {
        if !(m > 0.0) {
            return Err(GainError::ZeroMargin(m));
        }
    }
    Ok(LinfGains {
        sigma: eta.sigma,
        gamma0: 1.0 / eta.boundary_margin0,
        gamma1: 1.0 / eta.boundary_margin1,
        gamma_u: 1.0 / eta.sigma,
    })
}

/// Closed-form constants of the `L¹` estimate for `x_t = a x_zz + b x_z + k x + v`
/// with Dirichlet data. Boundary gains act on the boundary values `x(t,0)`, `x(t,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Gains {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub rate: f64,
    pub boundary0: f64,
    pub boundary1: f64,
    pub distributed: f64,
}

pub fn gains_l1(a: f64, b: f64, k: f64) -> Result<L1Gains, GainError> {
    if !(a > 0.0) {
        return Err(GainError::NonPositiveDiffusion(a));
    }
    let threshold = a * PI * PI + b * b / (4.0 * a);
    if !(k < threshold) {
        return Err(GainError::L1Threshold { k, threshold });
    }
    let den = 4.0 * a * a * PI * PI + b * b - 4.0 * a * k;
    let boundary0 = 4.0 * a * a * PI / den;
    Ok(L1Gains {
        a,
        b,
        k,
        rate: a * PI * PI - k + b * b / (4.0 * a),
        boundary0,
        boundary1: boundary0 * (b / (2.0 * a)).exp(),
        distributed: 4.0 * a / den,
    })
}

/// Every gain available for a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub lambda1: f64,
    /// `C0`, `C1` by the equilibrium BVP.
    pub c0: f64,
    pub c1: f64,
    pub c0_series: f64,
    pub c1_series: f64,
    pub c_tilde: f64,
    pub series_terms: usize,
    pub series_last_increment: [f64; 3],
    pub linf: Option<LinfGains>,
    /// Present for Dirichlet problems with constant `a`, `b`, `c`.
    pub l1: Option<L1Gains>,
}

impl GainSet {
    /// Gains from `series_terms` eigenpairs (the eigen grid is refined to `20·terms`
    /// when needed) and, if given, an `η`.
    pub fn compute(
        prob: &Problem,
        series_terms: usize,
        eta: Option<&EtaFunction>,
    ) -> Result<GainSet, GainError> {
        let fine = if prob.grid_n() < 20 * series_terms {
            prob.clone().with_grid_n(20 * series_terms)?
        } else {
            prob.clone()
        };
        let eigs = compute_eigenpairs(&fine, series_terms)?;
        let series = gains_l2_series(&eigs, &fine)?;
        let (c0, c1) = gains_l2_bvp(prob)?;
        let l1 = match prob.constant_coefficients()? {
            Some((a, b, c)) if prob.dirichlet_left() && prob.dirichlet_right() => {
                Some(gains_l1(a, b, c)?)
            }
            _ => None,
        };
        Ok(GainSet {
            lambda1: eigs[0].lambda,
            c0,
            c1,
            c0_series: series.c0,
            c1_series: series.c1,
            c_tilde: series.c_tilde,
            series_terms: series.terms,
            series_last_increment: series.last_increment,
            linf: eta.map(gains_linf).transpose()?,
            l1,
        })
    }

    /// Flat `key = value` block.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: f64| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("lambda1", self.lambda1);
        kv("c0", self.c0);
        kv("c1", self.c1);
        kv("c0_series", self.c0_series);
        kv("c1_series", self.c1_series);
        kv("c_tilde", self.c_tilde);
        kv("series_terms", self.series_terms as f64);
        kv("series_last_increment_c0", self.series_last_increment[0]);
        kv("series_last_increment_c1", self.series_last_increment[1]);
        kv("series_last_increment_c_tilde", self.series_last_increment[2]);
        if let Some(g) = &self.linf {
            kv("linf_sigma", g.sigma);
            kv("linf_gamma0", g.gamma0);
            kv("linf_gamma1", g.gamma1);
            kv("linf_distributed", g.gamma_u);
        }
        if let Some(g) = &self.l1 {
            kv("l1_rate", g.rate);
            kv("l1_boundary0", g.boundary0);
            kv("l1_boundary1", g.boundary1);
            kv("l1_distributed", g.distributed);
        }
        s
    }
}
