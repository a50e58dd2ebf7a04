use super::{Problem, SpectralError};
use crate::norms::Profile;
use crate::tridiag::SymTridiag;

/// Eigenvalue `λ_n` and eigenfunction `φ_n`, normalized so that `∫ r φ_n² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub n: usize,
    pub lambda: f64,
    pub phi: Profile,
    pub phi0: f64,
    pub dphi0: f64,
    pub phi1: f64,
    pub dphi1: f64,
}

/// Discrete operator on the unknown nodes `first..=last`: stiffness `K` (symmetric
/// tridiagonal) and lumped mass `m`, so that `K f = λ diag(m) f`.
struct Discretization {
    first: usize,
    last: usize,
    k_diag: Vec<f64>,
    k_off: Vec<f64>,
    mass: Vec<f64>,
}

fn discretize(prob: &Problem) -> Result<(Discretization, [Vec<f64>; 3]), SpectralError> {
    let n = prob.grid_n();
    let h = 1.0 / n as f64;
    let samples = prob.half_samples(n)?;
    let [p, q, r] = &samples;
    let node = |v: &Vec<f64>, i: usize| v[2 * i];
    let half = |i: usize| p[2 * i + 1];
    let first = usize::from(prob.dirichlet_left());
    let last = if prob.dirichlet_right() { n - 1 } else { n };
    let mut k_diag = Vec::with_capacity(last - first + 1);
    let mut mass = Vec::with_capacity(last - first + 1);
    for i in first..=last {
        let (kd, m) = if i == 0 {
            (
                half(0) / h - node(p, 0) * prob.g0() / prob.v0() + 0.5 * h * node(q, 0),
                0.5 * h * node(r, 0),
            )
        } else if i == n {
            (
                half(n - 1) / h + node(p, n) * prob.g1() / prob.v1() + 0.5 * h * node(q, n),
                0.5 * h * node(r, n),
            )
        } else {
            ((half(i - 1) + half(i)) / h + h * node(q, i), h * node(r, i))
        };
        k_diag.push(kd);
        mass.push(m);
    }
    let k_off = (first..last).map(|i| -half(i) / h).collect();
    Ok((Discretization { first, last, k_diag, k_off, mass }, samples))
}

/// The `count` smallest eigenpairs, by Sturm bisection on the symmetric
/// three-point discretization with second-order boundary rows.
pub fn compute_eigenpairs(prob: &Problem, count: usize) -> Result<Vec<EigenPair>, SpectralError> {
    if count == 0 {
        return Err(SpectralError::NotConverged("no eigenpairs requested".into()));
    }
    let n = prob.grid_n();
    if n < 20 * count {
        return Err(SpectralError::GridTooSmall { grid_n: n, count, required: 20 * count });
    }
    let h = 1.0 / n as f64;
    let (disc, [p, q, r]) = discretize(prob)?;
    let dim = disc.last - disc.first + 1;
    if count > dim {
        return Err(SpectralError::TooManyEigenpairs { count, dim });
    }
    let s: Vec<f64> = disc.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let t = SymTridiag {
        d: disc.k_diag.iter().zip(&s).map(|(k, s)| k * s * s).collect(),
        e: disc.k_off.iter().enumerate().map(|(j, k)| k * s[j] * s[j + 1]).collect(),
    };
    let bounds = t.gershgorin();
    let grid = prob.grid();
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(count);
    for k in 0..count {
        let lambda = t.eigenvalue(k, bounds);
        if !lambda.is_finite() {
            return Err(SpectralError::NotConverged(format!("eigenvalue {} not finite", k + 1)));
        }
        if let Some(prev) = pairs.last() {
            if lambda <= prev.lambda {
                return Err(SpectralError::NotConverged(format!(
                    "eigenvalues {} and {} not separated",
                    k,
                    k + 1
                )));
            }
        }
        let y = t.eigenvector(lambda);
        let mut f = vec![0.0; n + 1];
        for (j, yj) in y.iter().enumerate() {
            f[disc.first + j] = yj * s[j];
        }
        let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(lead) = f.iter().find(|v| v.abs() > 1e-8 * fmax) {
            if *lead < 0.0 {
                f.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let (phi0, dphi0) = if prob.dirichlet_left() {
            let flux = p[1] * (f[1] - f[0]) / h - (q[0] - lambda * r[0]) * h * (3.0 * f[0] + f[1]) / 8.0;
            (0.0, flux / p[0])
        } else {
            (f[0], -prob.g0() / prob.v0() * f[0])
        };
        let (phi1, dphi1) = if prob.dirichlet_right() {
            let flux = p[2 * n - 1] * (f[n] - f[n - 1]) / h
                + (q[2 * n] - lambda * r[2 * n]) * h * (3.0 * f[n] + f[n - 1]) / 8.0;
            (0.0, flux / p[2 * n])
        } else {
            (f[n], -prob.g1() / prob.v1() * f[n])
        };
        if f.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NotConverged(format!("eigenvector {} not finite", k + 1)));
        }
        pairs.push(EigenPair {
            n: k + 1,
            lambda,
            phi: Profile::new(grid, f)?,
            phi0,
            dphi0,
            phi1,
            dphi1,
        });
    }
    Ok(pairs)
}

/// Sign tests for (H1)/(H2), `λ1 > 0`, and partial sums of `Σ λ_n⁻¹ max|φ_n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub h1: bool,
    pub h2: bool,
    pub lambda1: f64,
    pub h3_lambda1_positive: bool,
    pub h3_series_partial_sums: Vec<f64>,
    pub truncation: usize,
    pub series_monotone: bool,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.h1 && self.h2 && self.h3_lambda1_positive && self.series_monotone
    }
}

pub fn check_hypotheses(prob: &Problem, n_eigs: usize) -> Result<HypothesisReport, SpectralError> {
    if n_eigs < 10 {
        return Err(SpectralError::NotConverged(format!("need at least 10 eigenpairs, got {n_eigs}")));
    }
    let pairs = compute_eigenpairs(prob, n_eigs)?;
    let mut notes = Vec::new();
    let h1 = prob.h1();
    let h2 = prob.h2();
    if !h1 {
        notes.push(format!("(H1) fails: g0 = {}, v0 = {}", prob.g0(), prob.v0()));
    }
    if !h2 {
        notes.push(format!("(H2) fails: g1 = {}, v1 = {}", prob.g1(), prob.v1()));
    }
    let lambda1 = pairs[0].lambda;
    let positive = lambda1 > 0.0;
    if !positive {
        notes.push(format!("lambda1 = {lambda1} is not positive"));
    }
    let terms: Vec<f64> = pairs.iter().map(|e| e.phi.max_abs() / e.lambda).collect();
    let mut sums = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        sums.push(acc);
    }
    let increasing = terms.iter().all(|t| *t > 0.0);
    let weighted = |k: usize| terms[k] * ((k + 1) as f64).powi(2);
    let half = terms.len() / 2;
    let head = (0..half).map(weighted).fold(0.0, f64::max);
    let tail = (half..terms.len()).map(weighted).fold(0.0, f64::max);
    let decaying = tail <= 4.0 * head;
    if increasing && !decaying {
        notes.push("series increments decay slower than n^-2".into());
    }
    Ok(HypothesisReport {
        h1,
        h2,
        lambda1,
        h3_lambda1_positive: positive,
        h3_series_partial_sums: sums,
        truncation: terms.len(),
        series_monotone: increasing && decaying,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn heat_dirichlet_spectrum() {
        let pairs = compute_eigenpairs(&Problem::heat(1.0), 3).unwrap();
        for e in &pairs {
            let exact = (e.n as f64 * PI).powi(2);
            assert!((e.lambda - exact).abs() / exact < 1e-4, "{} vs {exact}", e.lambda);
            let g = e.phi.grid();
            for (i, v) in e.phi.values().iter().enumerate() {
                let z = g.z(i);
                assert!((v - 2f64.sqrt() * (e.n as f64 * PI * z).sin()).abs() < 1e-4);
            }
            let d_exact = 2f64.sqrt() * e.n as f64 * PI;
            assert!((e.dphi0 - d_exact).abs() / d_exact < 1e-5);
            assert!((e.dphi1 - d_exact * (e.n as f64 * PI).cos()).abs() / d_exact < 1e-5);
        }
    }

    #[test]
    fn grid_requirement() {
        let prob = Problem::heat(1.0).with_grid_n(100).unwrap();
        assert!(matches!(compute_eigenpairs(&prob, 6), Err(SpectralError::GridTooSmall { .. })));
    }

    #[test]
    fn hypotheses_report() {
        let r = check_hypotheses(&Problem::heat(1.0), 10).unwrap();
        assert!(r.all_hold());
        assert!((r.lambda1 - PI * PI).abs() < 1e-3);
        let shifted = Problem::from_strs("1", "1", "-20", (-1.0, 0.0), (1.0, 0.0)).unwrap();
        let r = check_hypotheses(&shifted, 10).unwrap();
        assert!(!r.h3_lambda1_positive);
        assert!((r.lambda1 - (PI * PI - 20.0)).abs() < 1e-3);
        let bad = Problem::from_strs("1", "1", "0", (1.0, 0.0), (1.0, 0.0)).unwrap();
        assert!(!check_hypotheses(&bad, 10).unwrap().h1);
    }
}
