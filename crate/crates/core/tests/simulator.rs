use std::f64::consts::PI;

use parabolic_iss::fd_simulator::{simulate, step, SimulationConfig};
use parabolic_iss::{parse, Grid, Problem, Profile};

fn config(prob: Problem, n: usize, t: f64) -> SimulationConfig {
    SimulationConfig { t_final: t, ..SimulationConfig::new(prob, Grid::new(n).unwrap()) }
}

#[test]
fn solution_is_linear_in_data() {
    let prob = Problem::from_strs("1 + z", "2 - z", "0.5", (-1.0, 0.5), (1.0, 1.0)).unwrap();
    let mut a = config(prob.clone(), 40, 0.1);
    a.x0 = parse("sin(pi*z)").unwrap();
    a.d0 = parse("cos(t)").unwrap();
    let mut b = config(prob.clone(), 40, 0.1);
    b.x0 = parse("z^2").unwrap();
    b.u = parse("t*z").unwrap();
    b.d1 = parse("0.3").unwrap();
    let mut sum = config(prob, 40, 0.1);
    sum.x0 = parse("2*sin(pi*z) - 3*z^2").unwrap();
    sum.d0 = parse("2*cos(t)").unwrap();
    sum.d1 = parse("-0.9").unwrap();
    sum.u = parse("-3*t*z").unwrap();
    let (ta, tb, ts) = (simulate(&a).unwrap(), simulate(&b).unwrap(), simulate(&sum).unwrap());
    assert_eq!(ta.times, ts.times);
    for k in 0..ts.times.len() {
        for i in 0..ts.grid.nodes() {
            let lin = 2.0 * ta.profiles[k].values()[i] - 3.0 * tb.profiles[k].values()[i];
            assert!((ts.profiles[k].values()[i] - lin).abs() < 1e-11);
        }
    }
}

#[test]
fn maximum_principle_without_inputs() {
    let prob = Problem::from_strs("1 + 0.5*sin(3*z)", "1", "0", (-1.0, 0.0), (1.0, 0.0)).unwrap();
    let mut cfg = config(prob, 50, 0.5);
    cfg.x0 = parse("abs(sin(3*pi*z)) + 0.2*sin(pi*z)").unwrap();
    let traj = simulate(&cfg).unwrap();
    let mut prev = traj.initial().max_abs();
    for p in &traj.profiles {
        assert!(p.max_abs() <= prev + 1e-14);
        assert!(p.values().iter().all(|v| *v >= -1e-15));
        prev = p.max_abs();
    }
}

#[test]
fn single_step_matches_trajectory() {
    let mut cfg = config(Problem::heat(1.0), 30, 0.01);
    cfg.x0 = parse("sin(pi*z)").unwrap();
    let traj = simulate(&cfg).unwrap();
    let one = step(traj.initial(), 0.0, &cfg).unwrap();
    assert_eq!(one.values(), traj.profiles[1].values());
}

#[test]
fn decaying_mode_rate() {
    let mut cfg = config(Problem::heat(1.0), 100, 0.2);
    cfg.x0 = parse("sin(pi*z)").unwrap();
    let traj = simulate(&cfg).unwrap();
    let exact = Profile::from_fn(traj.grid, |z| (-PI * PI * 0.2).exp() * (PI * z).sin()).unwrap();
    let err = traj.last().values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 3e-5, "{err}");
}

#[test]
fn records_every_stride_and_final_time() {
    let mut cfg = config(Problem::heat(1.0), 20, 0.05);
    cfg.record_every = 7;
    let traj = simulate(&cfg).unwrap();
    assert_eq!(*traj.times.last().unwrap(), 0.05);
    assert_eq!(traj.times.len(), 1 + traj.steps / 7 + usize::from(!traj.steps.is_multiple_of(7)));
}
