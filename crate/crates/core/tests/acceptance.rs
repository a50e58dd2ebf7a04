//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{check_derivative, random_expr, DerivativeCheck};
use parabolic_iss::certificates::{
    certify_streaming, certify_trajectory, sharpness_gap, Estimate, EstimateId, NormKind, Side, Tolerance,
};
use parabolic_iss::discrete_lemmas::{fading_harness, lemma41_harness, lemma41_tightness, FadingForm};
use parabolic_iss::fd_simulator::{simulate, SimulationConfig};
use parabolic_iss::gains::{gains_l1, gains_l2_bvp, gains_l2_series, gains_linf, GainSet};
use parabolic_iss::spectral::{compute_eigenpairs, find_eta};
use parabolic_iss::thermoelasticity::{
    check_day, check_smallgain_l1w, check_smallgain_l2, check_smallgain_sup, fit_decay, simulate_nonlocal,
    DecayNorm, NonlocalConfig, NonlocalKernel,
};
use parabolic_iss::{parse, Expr, Grid, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.2}s/{}s", e.as_secs_f64(), limit.as_secs()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn eigen_accuracy() -> Outcome {
    let start = Instant::now();
    let prob = Problem::heat(1.0);
    let pairs = compute_eigenpairs(&prob, 10).unwrap();
    let worst_rel = pairs.iter().map(|e| rel(e.lambda, (e.n as f64 * PI).powi(2))).fold(0.0, f64::max);
    let grid = prob.grid();
    let mut ortho = 0.0f64;
    for a in &pairs {
        for b in &pairs {
            let f: Vec<f64> = a.phi.values().iter().zip(b.phi.values()).map(|(x, y)| x * y).collect();
            ortho = ortho.max((grid.trapezoid(&f) - f64::from(u8::from(a.n == b.n))).abs());
        }
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    outcome(
        worst_rel <= 1e-3 && ortho <= 1e-6 && fast,
        format!("max rel eigenvalue error {worst_rel:.2e}, orthonormality residual {ortho:.2e}, {time}"),
    )
}

fn gain_reproduction() -> Outcome {
    let g = gains_l1(1.0, 0.0, 0.0).unwrap();
    let exact = rel(g.rate, PI * PI) < 1e-15
        && rel(g.boundary0, 1.0 / PI) < 1e-15
        && rel(g.boundary1, 1.0 / PI) < 1e-15
        && rel(g.distributed, 1.0 / (PI * PI)) < 1e-15;
    let prob = Problem::heat(1.0);
    let target = 1.0 / 3f64.sqrt();
    let fine = prob.clone().with_grid_n(4000).unwrap();
    let series = gains_l2_series(&compute_eigenpairs(&fine, 200).unwrap(), &fine).unwrap();
    let (c0, c1) = gains_l2_bvp(&prob).unwrap();
    let errs = [series.c0 - target, series.c1 - target, c0 - target, c1 - target].map(f64::abs);
    let agree = (series.c0 - c0).abs().max((series.c1 - c1).abs());
    let worst = errs.iter().copied().fold(0.0, f64::max);
    outcome(
        exact && worst <= 2e-3 && agree <= 2e-3,
        format!(
            "l1 closed forms exact: {exact}; series C0,C1 = {:.6}, {:.6}; bvp C0,C1 = {c0:.6}, {c1:.6}; max error {worst:.2e}, routes differ by {agree:.2e}",
            series.c0, series.c1
        ),
    )
}

fn sharpness() -> Outcome {
    let start = Instant::now();
    let prob = Problem::heat(1.0);
    let grid = Grid::new(200).unwrap();
    let h = grid.h();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (kind, exact, label) in [(NormKind::L1W, 1.0 / PI, "l1w"), (NormKind::L2R, 1.0 / 3f64.sqrt(), "l2")] {
        for side in [Side::Left, Side::Right] {
            let gain = sharpness_gap(&prob, kind, side, 0.0, grid).unwrap();
            let steady = gain - sharpness_gap(&prob, kind, side, 1.0, grid).unwrap();
            let err = (steady - exact).abs();
            worst = worst.max(err);
            parts.push(format!("{label}/{side:?} {steady:.6}"));
        }
    }
    let (fast, time) = within(start, Duration::from_secs(30));
    outcome(worst <= 5.0 * h && fast, format!("{}; max deviation {worst:.2e} vs 5h = {:.0e}, {time}", parts.join(", "), 5.0 * h))
}

struct SuiteCase {
    name: &'static str,
    x0: &'static str,
    d0: &'static str,
    d1: &'static str,
    u: &'static str,
}

const SUITE: [SuiteCase; 5] = [
    SuiteCase { name: "decaying mode", x0: "sin(pi*z)", d0: "0", d1: "0", u: "0" },
    SuiteCase { name: "constant d0", x0: "0", d0: "1", d1: "0", u: "0" },
    SuiteCase { name: "constant d1", x0: "0", d0: "0", d1: "1", u: "0" },
    SuiteCase { name: "sinusoidal d0", x0: "sin(pi*z)", d0: "0.5*sin(3*t)", d1: "0", u: "0" },
    SuiteCase { name: "distributed u", x0: "0", d0: "0", d1: "0", u: "sin(pi*z)" },
];

fn suite_config(c: &SuiteCase, grid: Grid) -> SimulationConfig {
    SimulationConfig {
        t_final: 2.0,
        x0: parse(c.x0).unwrap(),
        d0: parse(c.d0).unwrap(),
        d1: parse(c.d1).unwrap(),
        u: parse(c.u).unwrap(),
        ..SimulationConfig::new(Problem::heat(1.0), grid)
    }
}

fn certificate_suite() -> (Outcome, Vec<(String, f64, f64)>) {
    let start = Instant::now();
    let prob = Problem::heat(1.0);
    let grid = Grid::new(200).unwrap();
    let eta = find_eta(&prob, PI * PI / 4.0).unwrap();
    let linf = gains_linf(&eta).unwrap();
    let set = GainSet::compute(&prob, 200, None).unwrap();
    let l1 = set.l1.unwrap();
    let mut failures = Vec::new();
    let mut sqrt2 = Vec::new();
    let mut count = 0;
    for c in &SUITE {
        let mut list = vec![
            Estimate::linf(grid, &eta, &linf),
            Estimate::l2(grid, &prob, &set, &parabolic_iss::certificates::default_eps_omega()).unwrap(),
            Estimate::l1(grid, &prob, &l1).unwrap(),
        ];
        if c.u == "0" {
            list.extend(Estimate::heat_suite(grid, &prob, PI / 4.0).unwrap());
        }
        for r in certify_streaming(&suite_config(c, grid), list, Tolerance::Auto).unwrap() {
            count += 1;
            if !r.pass {
                failures.push(format!("{} {} worst {:.2e} tol {:.2e}", c.name, r.id, r.worst_margin, r.tol));
            }
            if r.id == EstimateId::HeatSqrt2 {
                sqrt2.push((c.name.to_string(), r.worst_margin, r.tol));
            }
        }
    }
    let (fast, time) = within(start, Duration::from_secs(120));
    let detail = if failures.is_empty() {
        format!("{count} certificates over 5 scenarios all within tolerance, {time}")
    } else {
        format!("failures: {}; {time}", failures.join("; "))
    };
    (outcome(failures.is_empty() && fast, detail), sqrt2)
}

fn maximum_principle(sqrt2: &[(String, f64, f64)]) -> Outcome {
    let holds = sqrt2.len() == 4 && sqrt2.iter().all(|(_, w, tol)| *w >= -tol);
    let grid = Grid::new(100).unwrap();
    let prob = Problem::heat(1.0);
    let mut worst = 0.0f64;
    for c in &SUITE[..4] {
        let cfg = SimulationConfig { t_final: 0.5, ..suite_config(c, grid) };
        let traj = simulate(&cfg).unwrap();
        let est: Vec<Estimate> = Estimate::heat_suite(grid, &prob, PI / 2.0)
            .unwrap()
            .into_iter()
            .filter(|e| e.id() == EstimateId::HeatMaxPrinciple)
            .collect();
        let r = certify_trajectory(&traj, est, Tolerance::Absolute(0.0)).unwrap().remove(0);
        let x0 = traj.profiles[0].max_abs();
        let (mut b0, mut b1) = (0.0f64, 0.0f64);
        for k in 0..traj.times.len() {
            b0 = b0.max(traj.d0[k].abs());
            b1 = b1.max(traj.d1[k].abs());
            let classical = x0.max(b0).max(b1);
            worst = worst.max((r.rhs[k] - classical).abs()).max((r.lhs[k] - traj.profiles[k].max_abs()).abs());
        }
    }
    let detail: Vec<String> = sqrt2.iter().map(|(n, w, _)| format!("{n} {w:.2e}")).collect();
    outcome(
        holds && worst <= 4.0 * f64::EPSILON,
        format!("sqrt2 estimate worst margins [{}]; theta = pi/2 rhs vs classical bound max diff {worst:.1e}", detail.join(", ")),
    )
}

fn fd_order() -> Outcome {
    let err = |n: usize| {
        let cfg = SimulationConfig {
            t_final: 0.1,
            x0: parse("sin(pi*z)").unwrap(),
            ..SimulationConfig::new(Problem::heat(1.0), Grid::new(n).unwrap())
        };
        let traj = simulate(&cfg).unwrap();
        let g = traj.grid;
        let decay = (-PI * PI * 0.1f64).exp();
        (0..g.nodes()).map(|i| (traj.last().values()[i] - decay * (PI * g.z(i)).sin()).abs()).fold(0.0, f64::max)
    };
    let e = [err(50), err(100), err(200)];
    let ratios = [e[0] / e[1], e[1] / e[2]];
    outcome(
        ratios.iter().all(|r| (3.5..=4.5).contains(r)),
        format!("errors {:.3e}, {:.3e}, {:.3e}; ratios {:.3}, {:.3}", e[0], e[1], e[2], ratios[0], ratios[1]),
    )
}

/// `∫₀¹ |f|` by composite Simpson on 20000 intervals.
fn abs_integral(e: &Expr) -> f64 {
    let n = 20000;
    let f = |i: usize| e.eval_z(i as f64 / n as f64).unwrap().abs();
    let mut s = f(0) + f(n);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    s / (3.0 * n as f64)
}

fn random_kernel(rng: &mut impl Rng) -> Expr {
    let base = match rng.gen_range(0..4) {
        0 => format!("{} + {}*z + {}*z^2", rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        1 => format!("sin({}*pi*z + {})", rng.gen_range(1..6), rng.gen_range(0.0..PI)),
        2 => format!("exp({}*z)", rng.gen_range(-3.0..3.0)),
        _ => format!("cos({}*z)*z*(1 - z)", rng.gen_range(0.0..10.0)),
    };
    let raw = parse(&base).unwrap();
    let mass: f64 = rng.gen_range(0.01..0.99);
    parse(&format!("{}*({base})", mass / abs_integral(&raw))).unwrap()
}

fn small_gain() -> Outcome {
    let flat = NonlocalKernel::from_strs("0.8", "0.8").unwrap();
    let l2 = check_smallgain_l2(&flat);
    let l2_ok = l2.holds && (l2.margin - (3f64.sqrt() - 1.6)).abs() <= 1e-9;
    let sine = NonlocalKernel::from_strs("1.5*sin(pi*z)", "1.5*sin(pi*z)").unwrap();
    let l1w = check_smallgain_l1w(&sine).unwrap();
    let l1w_ok = l1w.holds && (l1w.margin - (PI - 3.0)).abs() <= 1e-9;
    let l2_sine = check_smallgain_l2(&sine);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut counterexamples = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..100 {
        let k = NonlocalKernel::new(random_kernel(&mut rng), random_kernel(&mut rng)).unwrap();
        let day = check_day(&k);
        let sup = check_smallgain_sup(&k);
        if !day.holds || !sup.holds {
            counterexamples += 1;
        }
        min_margin = min_margin.min(sup.margin);
    }
    outcome(
        l2_ok && l1w_ok && !l2_sine.holds && counterexamples == 0,
        format!(
            "L2 margin {:.12} (sqrt3-1.6 = {:.12}); L1W margin {:.12} (pi-3); sine kernel L2 margin {:.4}; Day=>sup counterexamples {counterexamples}/100, min sup margin {min_margin:.2e}",
            l2.margin,
            3f64.sqrt() - 1.6,
            l1w.margin,
            l2_sine.margin
        ),
    )
}

fn thermo_decay() -> Outcome {
    let grid = Grid::new(200).unwrap();
    let run = |g: &str, t: f64, x0: &str| {
        let cfg = NonlocalConfig {
            t_final: t,
            ..NonlocalConfig::new(NonlocalKernel::from_strs(g, g).unwrap(), 1.0, parse(x0).unwrap(), grid)
        };
        let delta = cfg.delta().unwrap();
        let cfg = NonlocalConfig { record_every: ((t / delta) / 2000.0).ceil() as usize, ..cfg };
        simulate_nonlocal(&cfg).unwrap()
    };
    let traj = run("0.8", 5.0, "1 + sin(pi*z)");
    let l2 = fit_decay(&traj, DecayNorm::L2).unwrap().delta;
    let sup = fit_decay(&traj, DecayNorm::Sup).unwrap().delta;
    let zero = run("0", 1.0, "sin(pi*z)");
    let d0 = fit_decay(&zero, DecayNorm::L2).unwrap().delta;
    let err = rel(d0, PI * PI);
    outcome(
        l2 > 0.0 && sup > 0.0 && err <= 0.02,
        format!("kernel 0.8: delta L2 {l2:.4}, sup {sup:.4}; zero kernel delta {d0:.4} vs pi^2 (rel {err:.1e})"),
    )
}

fn lemma_harnesses() -> Outcome {
    let r41 = lemma41_harness(41, 10_000).unwrap();
    let sum = fading_harness(FadingForm::Sum, 42, 1000).unwrap();
    let max = fading_harness(FadingForm::Max, 43, 1000).unwrap();
    let tight = lemma41_tightness(44, 100).unwrap();
    outcome(
        r41.passed() && r41.instances == 10_000 && sum.passed() && max.passed() && tight.abs() <= 1e-9,
        format!(
            "recursion {}/{} violations, sum form {}/{}, max form {}/{}; tightest recursion gap {tight:.1e}",
            r41.violations, r41.instances, sum.violations, sum.instances, max.violations, max.instances
        ),
    )
}

fn parser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut round_trips = 0;
    let mut derivatives = 0;
    let mut skipped = 0;
    let mut failures = 0;
    while derivatives < 1000 && derivatives + skipped < 10_000 {
        let e = random_expr(&mut rng, 4);
        if parse(&e.to_string()).ok().as_ref() == Some(&e) {
            round_trips += 1;
        } else {
            failures += 1;
        }
        match check_derivative(&e, rng.gen_range(0.05..0.95)) {
            DerivativeCheck::Pass => derivatives += 1,
            DerivativeCheck::Skipped => skipped += 1,
            DerivativeCheck::Fail { .. } => {
                derivatives += 1;
                failures += 1
            }
        }
    }
    outcome(
        failures == 0 && derivatives == 1000 && round_trips >= 1000,
        format!("{round_trips} round trips, {derivatives} derivative checks ({skipped} points skipped near singularities), {failures} failures"),
    )
}

fn main() {
    let (c4, sqrt2) = certificate_suite();
    let results = [
        ("eigen accuracy", eigen_accuracy()),
        ("gain reproduction", gain_reproduction()),
        ("sharpness", sharpness()),
        ("certificate suite", c4),
        ("maximum principle", maximum_principle(&sqrt2)),
        ("fd convergence order", fd_order()),
        ("small-gain verdicts", small_gain()),
        ("thermoelastic decay", thermo_decay()),
        ("lemma harnesses", lemma_harnesses()),
        ("parser", parser()),
    ];
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.pass;
        println!("criterion {:>2} {:<22} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
