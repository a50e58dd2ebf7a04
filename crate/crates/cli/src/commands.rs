use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use parabolic_iss::certificates::{certify_streaming, CertificateReport, Estimate, EstimateId, Tolerance};
use parabolic_iss::discrete_lemmas::{lemma42_constants, lemma43_constants, lemma43_constants_with, FadingMemoryConstants};
use parabolic_iss::fd_simulator::{simulate, SimulationConfig};
use parabolic_iss::gains::{gains_l1, gains_linf, GainSet};
use parabolic_iss::spectral::{check_hypotheses, compute_eigenpairs, find_eta, EtaFunction};
use parabolic_iss::thermoelasticity::{
    check_day, check_smallgain_l1w, check_smallgain_l2, check_smallgain_sup, fit_decay, simulate_nonlocal,
    write_verdicts, DecayNorm, NonlocalConfig, NonlocalKernel, ThermoError,
};
use parabolic_iss::{Expr, Grid, Problem};

use crate::config::{Scenario, AUTO_RECORDS};
use crate::errors::{Failure, EXIT_CERTIFICATE, EXIT_HYPOTHESIS, EXIT_OK};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Eig,
    Gains,
    Simulate,
    Certify,
    Thermo,
    Lemmas,
    Report,
}

/// Output directory, scenario and the `# ...` line heading every file.
struct Ctx<'a> {
    scenario: &'a Scenario,
    out: &'a Path,
}

impl Ctx<'_> {
    fn header(&self, n: Option<usize>, lambda: Option<f64>, delta: Option<f64>) -> String {
        let show = |v: Option<f64>| v.map_or("na".to_string(), |v| v.to_string());
        format!(
            "scenario={} N={} lambda={} delta={} version={}",
            self.scenario.path,
            n.map_or("na".to_string(), |n| n.to_string()),
            show(lambda),
            show(delta),
            VERSION
        )
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, Failure> {
        let path: PathBuf = self.out.join(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| Failure::config(format!("cannot create {}: {e}", path.display())))
    }

    fn write_text(&self, name: &str, header: &str, body: &str) -> Result<(), Failure> {
        let mut w = self.create(name)?;
        writeln!(w, "# {header}")?;
        w.write_all(body.as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

/// Run one command and return its exit code. Detail goes to stderr, a short summary to stdout.
pub fn run(command: Command, scenario: &Scenario, out: &Path) -> i32 {
    if let Err(e) = std::fs::create_dir_all(out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return crate::errors::EXIT_CONFIG;
    }
    let ctx = Ctx { scenario, out };
    let result = match command {
        Command::Eig => eig(&ctx),
        Command::Gains => gains(&ctx),
        Command::Simulate => simulate_cmd(&ctx),
        Command::Certify => certify(&ctx),
        Command::Thermo => thermo(&ctx),
        Command::Lemmas => lemmas(&ctx),
        Command::Report => report(&ctx),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}

fn problem(s: &Scenario) -> Result<Problem, Failure> {
    let p = s.problem()?;
    Ok(Problem::new(p.p.clone(), p.r.clone(), p.q.clone(), (p.g0, p.v0), (p.g1, p.v1))?.with_grid_n(p.grid_n)?)
}

fn stride(explicit: Option<usize>, t_final: f64, delta: f64) -> usize {
    explicit.unwrap_or_else(|| {
        let steps = (t_final / delta).ceil().max(1.0) as usize;
        steps.div_ceil(AUTO_RECORDS).max(1)
    })
}

fn sim_config(s: &Scenario, prob: &Problem) -> Result<SimulationConfig, Failure> {
    let sim = &s.simulation;
    let mut cfg = SimulationConfig {
        lambda_fraction: sim.lambda_fraction,
        t_final: sim.t_final,
        d0: s.inputs.d0.clone(),
        d1: s.inputs.d1.clone(),
        u: s.inputs.u.clone(),
        x0: s.inputs.x0.clone(),
        ..SimulationConfig::new(prob.clone(), Grid::new(sim.n)?)
    };
    let delta = cfg.delta()?;
    cfg.record_every = stride(sim.record_every, sim.t_final, delta);
    Ok(cfg)
}

fn eta_function(s: &Scenario, prob: &Problem) -> Result<Option<EtaFunction>, Failure> {
    let Some(e) = &s.eta else { return Ok(None) };
    Ok(Some(match &e.eta {
        None => find_eta(prob, e.sigma)?,
        Some(expr) => EtaFunction::from_expr(prob, expr, e.sigma, prob.grid())?,
    }))
}

fn eig(ctx: &Ctx) -> Result<i32, Failure> {
    let prob = problem(ctx.scenario)?;
    let count = ctx.scenario.problem()?.eigs;
    let header = ctx.header(Some(prob.grid_n()), None, None);
    let mut text = String::new();
    let report = match check_hypotheses(&prob, count) {
        Ok(r) => r,
        Err(e) if !(prob.h1() && prob.h2()) => {
            let _ = writeln!(text, "h1 = {}\nh2 = {}\nall_hold = false\n# note: {e}", prob.h1(), prob.h2());
            ctx.write_text("hypotheses.txt", &header, &text)?;
            eprintln!("hypotheses fail: {e}");
            return Ok(EXIT_HYPOTHESIS);
        }
        Err(e) => return Err(e.into()),
    };
    let _ = writeln!(text, "h1 = {}", report.h1);
    let _ = writeln!(text, "h2 = {}", report.h2);
    let _ = writeln!(text, "lambda1 = {}", report.lambda1);
    let _ = writeln!(text, "lambda1_positive = {}", report.h3_lambda1_positive);
    let _ = writeln!(text, "series_truncation = {}", report.truncation);
    let _ = writeln!(text, "series_monotone = {}", report.series_monotone);
    let _ = writeln!(text, "all_hold = {}", report.all_hold());
    for n in &report.notes {
        let _ = writeln!(text, "# note: {n}");
    }
    ctx.write_text("hypotheses.txt", &header, &text)?;

    let pairs = compute_eigenpairs(&prob, count)?;
    let mut w = ctx.create("eigenvalues.csv")?;
    writeln!(w, "# {header}")?;
    writeln!(w, "n,lambda,phi0,dphi0,phi1,dphi1,max_abs_phi,series_partial_sum")?;
    for (e, s) in pairs.iter().zip(&report.h3_series_partial_sums) {
        writeln!(w, "{},{},{},{},{},{},{},{}", e.n, e.lambda, e.phi0, e.dphi0, e.phi1, e.dphi1, e.phi.max_abs(), s)?;
    }
    w.flush()?;
    let mut w = ctx.create("eigenfunctions.csv")?;
    writeln!(w, "# {header}")?;
    write!(w, "z")?;
    for e in &pairs {
        write!(w, ",phi{}", e.n)?;
    }
    writeln!(w)?;
    let grid = prob.grid();
    for i in 0..grid.nodes() {
        write!(w, "{}", grid.z(i))?;
        for e in &pairs {
            write!(w, ",{}", e.phi.values()[i])?;
        }
        writeln!(w)?;
    }
    w.flush()?;

    println!("eig: lambda1 = {} all_hold = {}", report.lambda1, report.all_hold());
    if report.all_hold() {
        Ok(EXIT_OK)
    } else {
        for n in &report.notes {
            eprintln!("hypothesis: {n}");
        }
        Ok(EXIT_HYPOTHESIS)
    }
}

fn gains(ctx: &Ctx) -> Result<i32, Failure> {
    let prob = problem(ctx.scenario)?;
    let eta = eta_function(ctx.scenario, &prob)?;
    let set = GainSet::compute(&prob, ctx.scenario.problem()?.series_terms, eta.as_ref())?;
    let header = ctx.header(Some(prob.grid_n()), None, None);
    ctx.write_text("gains.txt", &header, &set.to_text())?;
    if let Some(e) = &eta {
        let mut w = ctx.create("eta.csv")?;
        writeln!(w, "# {header}")?;
        writeln!(w, "z,eta,d_eta")?;
        let g = e.grid();
        for i in 0..g.nodes() {
            writeln!(w, "{},{},{}", g.z(i), e.eta.values()[i], e.d_eta[i])?;
        }
        w.flush()?;
    }
    println!("gains: lambda1 = {} c0 = {} c1 = {}", set.lambda1, set.c0, set.c1);
    Ok(EXIT_OK)
}

fn simulate_cmd(ctx: &Ctx) -> Result<i32, Failure> {
    let prob = problem(ctx.scenario)?;
    let cfg = sim_config(ctx.scenario, &prob)?;
    let traj = simulate(&cfg)?;
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }
    let header = ctx.header(Some(cfg.grid.intervals()), Some(traj.lambda), Some(traj.delta));
    let mut w = ctx.create("trajectory.csv")?;
    traj.write_csv(&mut w, Some(&header))?;
    w.flush()?;
    println!("simulate: {} steps, {} records, max|x(T)| = {}", traj.steps, traj.times.len(), traj.last().max_abs());
    Ok(EXIT_OK)
}

/// Estimates for the scenario; with no explicit list, those that do not apply are skipped.
fn estimates(s: &Scenario, prob: &Problem, grid: Grid) -> Result<Vec<Estimate>, Failure> {
    let c = s.certify.clone().unwrap_or_else(|| crate::config::CertifySection {
        estimates: Vec::new(),
        tolerance: Tolerance::Auto,
        eps_omega: parabolic_iss::certificates::default_eps_omega(),
        theta: std::f64::consts::FRAC_PI_4,
    });
    let auto = c.estimates.is_empty();
    let wanted = |id: EstimateId| auto || c.estimates.contains(&id);
    let mut out = Vec::new();

    if wanted(EstimateId::InfEta) {
        match eta_function(s, prob)? {
            Some(eta) => out.push(Estimate::linf(grid, &eta, &gains_linf(&eta)?)),
            None if !auto => return Err(Failure::config("INF_ETA needs an [eta] section")),
            None => {}
        }
    }
    if wanted(EstimateId::L2R) {
        let set = GainSet::compute(prob, s.problem()?.series_terms, None)?;
        out.push(Estimate::l2(grid, prob, &set, &c.eps_omega)?);
    }
    if wanted(EstimateId::L1W) {
        match prob.constant_coefficients()? {
            Some((a, b, k)) if prob.dirichlet_left() && prob.dirichlet_right() => {
                out.push(Estimate::l1(grid, prob, &gains_l1(a, b, k)?)?)
            }
            _ if !auto => return Err(Failure::config("L1_W needs Dirichlet conditions and constant coefficients")),
            _ => {}
        }
    }
    let heat_ids = [
        EstimateId::HeatL1,
        EstimateId::HeatL2,
        EstimateId::HeatSup,
        EstimateId::HeatMaxPrinciple,
        EstimateId::HeatSqrt2,
    ];
    if heat_ids.iter().any(|&id| wanted(id)) {
        let forced = s.inputs.u.as_literal() != Some(0.0);
        match Estimate::heat_suite(grid, prob, c.theta) {
            Ok(_) if forced && !auto => {
                return Err(Failure::config("heat estimates do not admit a distributed input u"))
            }
            Ok(suite) if !forced => out.extend(suite.into_iter().filter(|e| wanted(e.id()))),
            Err(e) if !auto => return Err(e.into()),
            _ => {}
        }
        if !auto && c.estimates.contains(&EstimateId::HeatSup) && !out.iter().any(|e| e.id() == EstimateId::HeatSup) {
            return Err(Failure::config("HEAT_SUP needs theta < pi/2"));
        }
    }
    if out.is_empty() {
        return Err(Failure::config("no applicable estimates for this scenario"));
    }
    Ok(out)
}

fn thin(r: &CertificateReport, stride: usize) -> CertificateReport {
    let n = r.times.len();
    let keep: Vec<usize> = (0..n).filter(|&i| i % stride == 0 || i + 1 == n).collect();
    let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect();
    CertificateReport {
        times: pick(&r.times),
        lhs: pick(&r.lhs),
        rhs: pick(&r.rhs),
        margin: pick(&r.margin),
        ..r.clone()
    }
}

fn certify(ctx: &Ctx) -> Result<i32, Failure> {
    let s = ctx.scenario;
    let prob = problem(s)?;
    let cfg = sim_config(s, &prob)?;
    let list = estimates(s, &prob, cfg.grid)?;
    let tol = s.certify.as_ref().map_or(Tolerance::Auto, |c| c.tolerance);
    let reports = certify_streaming(&cfg, list, tol)?;
    let header = ctx.header(Some(cfg.grid.intervals()), Some(cfg.lambda()?), Some(cfg.delta()?));
    let mut summary = String::new();
    for r in &reports {
        let mut w = ctx.create(&format!("certificate_{}.csv", r.id))?;
        thin(r, cfg.record_every).write_csv(&mut w, Some(&header))?;
        w.flush()?;
        let _ = writeln!(summary, "{}", r.summary());
        println!("certify: {}", r.summary());
    }
    let pass = reports.iter().all(|r| r.pass);
    let _ = writeln!(summary, "overall = {}", if pass { "PASS" } else { "FAIL" });
    ctx.write_text("certify_summary.txt", &header, &summary)?;
    Ok(if pass { EXIT_OK } else { EXIT_CERTIFICATE })
}

fn thermo(ctx: &Ctx) -> Result<i32, Failure> {
    let s = ctx.scenario;
    let th = s.thermo.as_ref().ok_or(crate::config::ConfigError::MissingSection("thermo"))?;
    let kernel = NonlocalKernel::new(th.g0.clone(), th.g1.clone())?;
    let mut verdicts = vec![check_smallgain_sup(&kernel), check_smallgain_l2(&kernel)];
    match check_smallgain_l1w(&kernel) {
        Ok(v) => verdicts.push(v),
        Err(e @ ThermoError::EndpointNonzero { .. }) => eprintln!("note: L1W condition skipped: {e}"),
        Err(e) => return Err(e.into()),
    }
    verdicts.push(check_day(&kernel));

    let x0: Expr = th.x0.clone().unwrap_or_else(|| s.inputs.x0.clone());
    let sim = &s.simulation;
    let mut cfg = NonlocalConfig {
        lambda_fraction: sim.lambda_fraction,
        t_final: sim.t_final,
        ..NonlocalConfig::new(kernel, th.a, x0, Grid::new(sim.n)?)
    };
    let delta = cfg.delta()?;
    cfg.record_every = stride(sim.record_every, sim.t_final, delta);
    let traj = simulate_nonlocal(&cfg)?;
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }
    let header = ctx.header(Some(sim.n), Some(traj.lambda), Some(traj.delta));

    let mut w = ctx.create("verdicts.csv")?;
    write_verdicts(&mut w, &verdicts, Some(&header))?;
    w.flush()?;
    let mut w = ctx.create("nonlocal_trajectory.csv")?;
    traj.write_csv(&mut w, Some(&header))?;
    w.flush()?;

    let mut text = String::new();
    for (name, norm) in [("sup", DecayNorm::Sup), ("l2", DecayNorm::L2), ("l1_sin", DecayNorm::L1Sin)] {
        let fit = fit_decay(&traj, norm)?;
        let _ = writeln!(text, "{name}_m = {}", fit.m);
        let _ = writeln!(text, "{name}_delta = {}", fit.delta);
        let _ = writeln!(text, "{name}_reached_zero = {}", fit.reached_zero);
        println!("thermo: {name} delta = {}", fit.delta);
    }
    ctx.write_text("decay.txt", &header, &text)?;
    for v in &verdicts {
        println!("thermo: {} holds = {} margin = {}", v.condition, v.holds, v.margin);
    }
    Ok(EXIT_OK)
}

fn constants_text(text: &mut String, prefix: &str, c: &FadingMemoryConstants) {
    let _ = writeln!(text, "{prefix}_t = {}", c.t);
    let _ = writeln!(text, "{prefix}_omega = {}", c.omega);
    let _ = writeln!(text, "{prefix}_delta = {}", c.delta);
    let _ = writeln!(text, "{prefix}_lambda = {}", c.lambda);
    if let Some(mu) = c.mu {
        let _ = writeln!(text, "{prefix}_mu = {mu}");
    }
}

fn lemmas(ctx: &Ctx) -> Result<i32, Failure> {
    let l = ctx.scenario.lemmas.as_ref().ok_or(crate::config::ConfigError::MissingSection("lemmas"))?;
    let sum = lemma42_constants(l.sigma, l.m, l.eps)?;
    let max = match l.lambda {
        Some(lambda) => lemma43_constants_with(l.sigma, l.m, l.eps, lambda)?,
        None => lemma43_constants(l.sigma, l.m, l.eps)?,
    };
    let mut text = String::new();
    let _ = writeln!(text, "sigma = {}\nM = {}\neps = {}", l.sigma, l.m, l.eps);
    constants_text(&mut text, "sum", &sum);
    constants_text(&mut text, "max", &max);
    ctx.write_text("lemmas.txt", &ctx.header(None, None, None), &text)?;
    println!("lemmas: sum delta = {} max delta = {}", sum.delta, max.delta);
    Ok(EXIT_OK)
}

type Step = fn(&Ctx) -> Result<i32, Failure>;

/// Every command whose sections are present, in a fixed order; the first nonzero code wins.
fn report(ctx: &Ctx) -> Result<i32, Failure> {
    let s = ctx.scenario;
    let mut steps: Vec<(&str, Step)> = Vec::new();
    if s.problem.is_some() {
        steps.push(("eig", eig));
        steps.push(("gains", gains));
        steps.push(("simulate", simulate_cmd));
        steps.push(("certify", certify));
    }
    if s.thermo.is_some() {
        steps.push(("thermo", thermo));
    }
    if s.lemmas.is_some() {
        steps.push(("lemmas", lemmas));
    }
    if steps.is_empty() {
        return Err(Failure::config("scenario has no [problem], [thermo] or [lemmas] section"));
    }
    let mut code = EXIT_OK;
    for (name, f) in steps {
        let c = f(ctx).unwrap_or_else(|e| {
            eprintln!("error: {name}: {e}");
            e.code
        });
        if code == EXIT_OK {
            code = c;
        }
    }
    Ok(code)
}
