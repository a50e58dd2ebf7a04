//! Discrete ISS recursion bound, fading-memory small-gain constants, and
//! brute-force checks of both.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LemmaError {
    #[error("parameter {name} = {value} out of range ({range})")]
    Range { name: &'static str, value: f64, range: &'static str },
    #[error("index {j} beyond the sequence (length {len})")]
    Index { j: usize, len: usize },
}

fn check(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<(), LemmaError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(LemmaError::Range { name, value, range })
    }
}

/// Parameters of the recursion `φ(j+1) ≤ aφ(j) + g` if `y(j) < Kφ(j)`, `φ(j+1) ≤ βy(j) + g` if `y(j) > Kφ(j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionParams {
    pub k: f64,
    pub a: f64,
    pub beta: f64,
    pub g: f64,
}

impl RecursionParams {
    pub fn validate(&self) -> Result<(), LemmaError> {
        check("K", self.k, self.k > 0.0, "> 0")?;
        check("a", self.a, self.a > 0.0 && self.a < 1.0, "(0, 1)")?;
        check("beta", self.beta, self.beta > 0.0, "> 0")?;
        check("g", self.g, self.g > 0.0, "> 0")
    }

    /// Largest `φ(j+1)` allowed given `φ(j)` and `y(j)`.
    pub fn next_max(&self, phi: f64, y: f64) -> f64 {
        let p1 = self.a * phi + self.g;
        let p2 = self.beta * y + self.g;
        if y < self.k * phi {
            p1
        } else if y > self.k * phi {
            p2
        } else {
            p1.min(p2)
        }
    }
}

/// `max(max(K⁻¹, β) max_{s≤j} y(s), aʲ φ(0)) + g/(1−a)`.
pub fn lemma41_bound(y: &[f64], phi0: f64, p: &RecursionParams, j: usize) -> Result<f64, LemmaError> {
    p.validate()?;
    if j >= y.len() {
        return Err(LemmaError::Index { j, len: y.len() });
    }
    check("phi0", phi0, phi0 >= 0.0, ">= 0")?;
    let ymax = y[..=j].iter().fold(0.0f64, |m, v| m.max(*v));
    let c = (1.0 / p.k).max(p.beta);
    Ok((c * ymax).max(p.a.powi(j as i32) * phi0) + p.g / (1.0 - p.a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingMemoryConstants {
    pub sigma: f64,
    pub m: f64,
    pub eps: f64,
    pub t: f64,
    pub omega: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Present for the sum form only.
    pub mu: Option<f64>,
}

fn check_fading(sigma: f64, m: f64, eps: f64) -> Result<(), LemmaError> {
    check("sigma", sigma, sigma > 0.0, "> 0")?;
    check("M", m, m >= 1.0, ">= 1")?;
    check("eps", eps, eps > 0.0, "> 0")
}

/// Sum-form constants with `μ = √(1+ε)`, `λ = 1/μ − 1/(1+ε)`, so that `μ/(1−λμ) = 1+ε`.
pub fn lemma42_constants(sigma: f64, m: f64, eps: f64) -> Result<FadingMemoryConstants, LemmaError> {
    check_fading(sigma, m, eps)?;
    let mu = (1.0 + eps).sqrt();
    let lambda = 1.0 / mu - 1.0 / (1.0 + eps);
    let t = (m / lambda).ln() / sigma;
    Ok(FadingMemoryConstants {
        sigma,
        m,
        eps,
        t,
        omega: sigma - m.ln() / t,
        delta: mu.ln() / t,
        lambda,
        mu: Some(mu),
    })
}

/// Max-form constants with `λ = 1/2`.
pub fn lemma43_constants(sigma: f64, m: f64, eps: f64) -> Result<FadingMemoryConstants, LemmaError> {
    lemma43_constants_with(sigma, m, eps, 0.5)
}

/// Max-form constants for a chosen `λ ∈ (0, 1)`.
pub fn lemma43_constants_with(sigma: f64, m: f64, eps: f64, lambda: f64) -> Result<FadingMemoryConstants, LemmaError> {
    check_fading(sigma, m, eps)?;
    check("lambda", lambda, lambda > 0.0 && lambda < 1.0, "(0, 1)")?;
    let t = (m / lambda).ln() / sigma;
    let omega = sigma - m.ln() / t;
    Ok(FadingMemoryConstants {
        sigma,
        m,
        eps,
        t,
        omega,
        delta: ((1.0 + eps).ln() / t).min(omega),
        lambda,
        mu: None,
    })
}

/// Mesh points used by the continuous-time harnesses.
pub const MESH_POINTS: usize = 2000;
/// Absolute slack of the pointwise verifiers.
pub const VERIFY_TOL: f64 = 1e-8;

/// Outcome of a randomized harness.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessReport {
    pub instances: usize,
    pub violations: usize,
    /// Largest `lhs − bound` seen (negative when every instance holds strictly).
    pub worst_excess: f64,
    /// Smallest `|bound − lhs|` seen over all checked points.
    pub tightest_gap: f64,
}

impl HarnessReport {
    fn new() -> HarnessReport {
        HarnessReport { instances: 0, violations: 0, worst_excess: f64::NEG_INFINITY, tightest_gap: f64::INFINITY }
    }

    fn record(&mut self, lhs: f64, bound: f64, tol: f64) -> bool {
        let excess = lhs - bound;
        self.worst_excess = self.worst_excess.max(excess);
        self.tightest_gap = self.tightest_gap.min(excess.abs());
        excess > tol
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// One generated instance of the discrete recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionInstance {
    pub params: RecursionParams,
    pub y: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Random parameters and inputs; `φ` follows the maximal admissible recursion,
/// occasionally scaled down.
pub fn random_recursion(rng: &mut impl Rng) -> RecursionInstance {
    let params = RecursionParams {
        k: 10f64.powf(rng.gen_range(-1.0..1.0)),
        a: rng.gen_range(0.01..0.99),
        beta: 10f64.powf(rng.gen_range(-1.0..1.0)),
        g: 10f64.powf(rng.gen_range(-4.0..0.0)),
    };
    let m = rng.gen_range(1..=60);
    let mut y = Vec::with_capacity(m + 1);
    while y.len() <= m {
        let v = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..3.0) };
        let run = rng.gen_range(1..=8);
        y.extend(std::iter::repeat_n(v, run));
    }
    y.truncate(m + 1);
    let mut phi = vec![rng.gen_range(0.0..3.0)];
    for j in 0..m {
        let top = params.next_max(phi[j], y[j]);
        phi.push(if rng.gen_bool(0.8) { top } else { top * rng.gen::<f64>() });
    }
    RecursionInstance { params, y, phi }
}

/// Constant `y` kept below `Kφ` and below the decaying term, with tiny `g`: only
/// the contraction branch applies and the bound exceeds `φ(j)` by `g aʲ/(1−a)`.
pub fn tight_recursion(rng: &mut impl Rng) -> RecursionInstance {
    let params = RecursionParams {
        k: rng.gen_range(0.5..2.0),
        a: rng.gen_range(0.5..0.9),
        beta: rng.gen_range(0.5..2.0),
        g: 1e-12,
    };
    let m = rng.gen_range(2..=10);
    let c = 0.5 * params.a.powi(m as i32) / (1.0 / params.k).max(params.beta);
    let y = vec![c; m + 1];
    let mut phi = vec![1.0];
    for j in 0..m {
        phi.push(params.next_max(phi[j], y[j]));
    }
    RecursionInstance { params, y, phi }
}

pub fn check_recursion(inst: &RecursionInstance, report: &mut HarnessReport) -> Result<(), LemmaError> {
    report.instances += 1;
    let mut bad = false;
    for j in 0..inst.phi.len() {
        let bound = lemma41_bound(&inst.y, inst.phi[0], &inst.params, j)?;
        bad |= report.record(inst.phi[j], bound, 1e-12 * bound.max(1.0));
    }
    if bad {
        report.violations += 1;
    }
    Ok(())
}

/// `count` random recursion instances from `seed`.
pub fn lemma41_harness(seed: u64, count: usize) -> Result<HarnessReport, LemmaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HarnessReport::new();
    for _ in 0..count {
        check_recursion(&random_recursion(&mut rng), &mut report)?;
    }
    Ok(report)
}

/// Smallest `bound − φ(m)` over `count` tight instances.
pub fn lemma41_tightness(seed: u64, count: usize) -> Result<f64, LemmaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..count {
        let inst = tight_recursion(&mut rng);
        let j = inst.phi.len() - 1;
        best = best.min(lemma41_bound(&inst.y, inst.phi[0], &inst.params, j)? - inst.phi[j]);
    }
    Ok(best)
}

/// A mesh `t_k = kΔ` with `Δ = T/q`, so that shifts by `T` stay on the mesh.
fn aligned_mesh(c: &FadingMemoryConstants) -> (f64, usize) {
    let horizon = 20.0 / c.sigma;
    let q = ((MESH_POINTS - 1) as f64 * c.t / horizon).round().max(1.0);
    (c.t / q, MESH_POINTS)
}

fn random_input(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut y = Vec::with_capacity(n);
    while y.len() < n {
        let v = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..2.0) };
        let run = rng.gen_range(1..=n / 10);
        y.extend(std::iter::repeat_n(v, run));
    }
    y.truncate(n);
    y
}

/// Which fading-memory lemma a harness instance exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingForm {
    /// `φ(t) ≤ M e^{−σ(t−t₀)} φ(t₀) + γ sup y`.
    Sum,
    /// `q(t) ≤ max(M e^{−σ(t−t₀)} q(t₀), γ sup y)`.
    Max,
}

/// Largest mesh function satisfying the hypothesis for every pair of mesh points,
/// randomly scaled down at some points.
fn maximal_state(rng: &mut impl Rng, form: FadingForm, c: &FadingMemoryConstants, gamma: f64, y: &[f64], dt: f64) -> Vec<f64> {
    let n = y.len();
    let sum = form == FadingForm::Sum;
    let decay: Vec<f64> = (0..n).map(|k| c.m * (-c.sigma * dt * k as f64).exp()).collect();
    let mut phi = Vec::with_capacity(n);
    phi.push(rng.gen_range(0.0..2.0));
    for k in 1..n {
        let mut ymax = y[k];
        let mut best = f64::INFINITY;
        for j in (0..k).rev() {
            if y[j] > ymax {
                ymax = y[j];
            }
            let free = decay[k - j] * phi[j];
            let forced = gamma * ymax;
            let v = if sum { free + forced } else if free > forced { free } else { forced };
            if v < best {
                best = v;
            }
        }
        phi.push(if rng.gen_bool(0.9) { best } else { best * rng.gen::<f64>() });
    }
    phi
}

/// Check the conclusion at every mesh point.
fn check_conclusion(form: FadingForm, c: &FadingMemoryConstants, gamma: f64, y: &[f64], phi: &[f64], dt: f64, report: &mut HarnessReport) {
    let fade = (-c.delta * dt).exp();
    let mut s = 0.0f64;
    let mut bad = false;
    for k in 0..y.len() {
        s = (s * fade).max(y[k]);
        let free = c.m * (-c.delta * dt * k as f64).exp() * phi[0];
        let forced = gamma * (1.0 + c.eps) * s;
        let bound = match form {
            FadingForm::Sum => free + forced,
            FadingForm::Max => free.max(forced),
        };
        bad |= report.record(phi[k], bound, VERIFY_TOL);
    }
    report.instances += 1;
    if bad {
        report.violations += 1;
    }
}

/// Random `(σ, M, ε, γ)` and inputs; constants from the matching lemma.
pub fn fading_harness(form: FadingForm, seed: u64, count: usize) -> Result<HarnessReport, LemmaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HarnessReport::new();
    for _ in 0..count {
        let sigma = 10f64.powf(rng.gen_range(-1.0..1.0));
        let m = rng.gen_range(1.0..5.0);
        let eps = 10f64.powf(rng.gen_range(-1.5..0.5));
        let gamma = rng.gen_range(0.0..2.0);
        let c = match form {
            FadingForm::Sum => lemma42_constants(sigma, m, eps)?,
            FadingForm::Max => lemma43_constants(sigma, m, eps)?,
        };
        let (dt, n) = aligned_mesh(&c);
        let y = random_input(&mut rng, n);
        let phi = maximal_state(&mut rng, form, &c, gamma, &y, dt);
        check_conclusion(form, &c, gamma, &y, &phi, dt, &mut report);
    }
    Ok(report)
}
