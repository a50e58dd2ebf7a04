//! Scenario-driven front end for `parabolic-iss`.

pub mod commands;
pub mod config;
pub mod errors;

use std::path::Path;

use parabolic_iss::certificates::{default_eps_omega, Tolerance};

pub use commands::{run, Command, VERSION};
pub use config::{load_scenario, parse_scenario, ConfigError, Scenario};
pub use errors::Failure;

/// Command-line values that take precedence over the scenario file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(n) = self.grid {
            s.simulation.n = n;
        }
        if let Some(t) = self.tol {
            let c = s.certify.get_or_insert_with(|| config::CertifySection {
                estimates: Vec::new(),
                tolerance: Tolerance::Auto,
                eps_omega: default_eps_omega(),
                theta: std::f64::consts::FRAC_PI_4,
            });
            c.tolerance = Tolerance::Absolute(t);
        }
    }
}

/// Load, apply overrides and run; returns the process exit code.
pub fn run_file(command: Command, scenario: &Path, out: &Path, overrides: Overrides) -> i32 {
    match load_scenario(scenario) {
        Ok(mut s) => {
            overrides.apply(&mut s);
            run(command, &s, out)
        }
        Err(e) => {
            eprintln!("error: {e}");
            errors::EXIT_CONFIG
        }
    }
}
