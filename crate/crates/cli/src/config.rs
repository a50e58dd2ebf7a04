//! Scenario files: `[section]` headers with `key = value` lines, expressions as
//! quoted strings, `#` comments.

use std::f64::consts::PI;
use std::path::Path;

use parabolic_iss::certificates::{default_eps_omega, EstimateId, Tolerance};
use parabolic_iss::{parse, Expr};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("[{section}] missing key `{key}`")]
    MissingKey { section: String, key: &'static str },
    #[error("line {line}: [{section}] {key}: {message}")]
    Value { section: String, key: String, line: usize, message: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("line {line}: [{section}] unknown key `{key}`")]
    UnknownKey { section: String, key: String, line: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSection {
    pub p: Expr,
    pub r: Expr,
    pub q: Expr,
    pub g0: f64,
    pub v0: f64,
    pub g1: f64,
    pub v1: f64,
    pub grid_n: usize,
    pub eigs: usize,
    pub series_terms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSection {
    pub n: usize,
    pub lambda_fraction: f64,
    pub t_final: f64,
    /// `None` picks a stride giving about [`AUTO_RECORDS`] rows.
    pub record_every: Option<usize>,
}

/// Rows kept by the automatic record stride.
pub const AUTO_RECORDS: usize = 1000;

impl Default for SimulationSection {
    fn default() -> SimulationSection {
        SimulationSection { n: 200, lambda_fraction: 0.9, t_final: 1.0, record_every: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputsSection {
    pub d0: Expr,
    pub d1: Expr,
    pub u: Expr,
    pub x0: Expr,
}

impl Default for InputsSection {
    fn default() -> InputsSection {
        InputsSection { d0: Expr::Num(0.0), d1: Expr::Num(0.0), u: Expr::Num(0.0), x0: Expr::Num(0.0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaSection {
    /// `None` for `eta = "auto"`.
    pub eta: Option<Expr>,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoSection {
    pub g0: Expr,
    pub g1: Expr,
    pub a: f64,
    pub x0: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifySection {
    /// Empty means every estimate that applies to the scenario.
    pub estimates: Vec<EstimateId>,
    pub tolerance: Tolerance,
    pub eps_omega: Vec<(f64, f64)>,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmasSection {
    pub sigma: f64,
    pub m: f64,
    pub eps: f64,
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub path: String,
    pub problem: Option<ProblemSection>,
    pub simulation: SimulationSection,
    pub inputs: InputsSection,
    pub eta: Option<EtaSection>,
    pub thermo: Option<ThermoSection>,
    pub certify: Option<CertifySection>,
    pub lemmas: Option<LemmasSection>,
}

impl Scenario {
    pub fn problem(&self) -> Result<&ProblemSection, ConfigError> {
        self.problem.as_ref().ok_or(ConfigError::MissingSection("problem"))
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key = ...` inside `[section]`, or 0 if not found.
fn line_of(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
        } else if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    0
}

struct Section<'a> {
    name: &'static str,
    table: Table,
    text: &'a str,
}

impl<'a> Section<'a> {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Value {
            section: self.name.to_string(),
            key: key.to_string(),
            line: line_of(self.text, self.name, key),
            message: message.into(),
        }
    }

    fn take(&mut self, key: &'static str) -> Option<Value> {
        self.table.remove(key)
    }

    fn require(&mut self, key: &'static str) -> Result<Value, ConfigError> {
        self.take(key).ok_or(ConfigError::MissingKey { section: self.name.to_string(), key })
    }

    fn to_expr(&self, key: &str, v: Value) -> Result<Expr, ConfigError> {
        match v {
            Value::String(s) => parse(&s).map_err(|e| self.err(key, format!("{e} in \"{s}\""))),
            Value::Integer(i) => Ok(Expr::Num(i as f64)),
            Value::Float(f) if f.is_finite() => Ok(Expr::Num(f)),
            other => Err(self.err(key, format!("expected an expression string, found {}", other.type_str()))),
        }
    }

    fn to_num(&self, key: &str, v: &Value) -> Result<f64, ConfigError> {
        match v {
            Value::Integer(i) => Ok(*i as f64),
            Value::Float(f) if f.is_finite() => Ok(*f),
            other => Err(self.err(key, format!("expected a number, found {}", other.type_str()))),
        }
    }

    fn expr(&mut self, key: &'static str) -> Result<Expr, ConfigError> {
        let v = self.require(key)?;
        self.to_expr(key, v)
    }

    fn expr_opt(&mut self, key: &'static str) -> Result<Option<Expr>, ConfigError> {
        self.take(key).map(|v| self.to_expr(key, v)).transpose()
    }

    fn num(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.require(key)?;
        self.to_num(key, &v)
    }

    fn num_opt(&mut self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        self.take(key).map(|v| self.to_num(key, &v)).transpose()
    }

    fn count_opt(&mut self, key: &'static str) -> Result<Option<usize>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i > 0 => Ok(Some(i as usize)),
            Some(other) => Err(self.err(key, format!("expected a positive integer, found {other}"))),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.table.keys().next() {
            Some(k) => Err(ConfigError::UnknownKey {
                section: self.name.to_string(),
                key: k.clone(),
                line: line_of(self.text, self.name, k),
            }),
            None => Ok(()),
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
    parse_scenario(&text, &path.display().to_string())
}

pub fn parse_scenario(text: &str, path: &str) -> Result<Scenario, ConfigError> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
        line: e.span().map_or(0, |s| line_at(text, s.start)),
        message: e.message().to_string(),
    })?;
    let mut section = |name: &'static str| -> Result<Option<Section<'_>>, ConfigError> {
        match root.remove(name) {
            None => Ok(None),
            Some(Value::Table(table)) => Ok(Some(Section { name, table, text })),
            Some(_) => Err(ConfigError::Syntax { line: line_of(text, "", name), message: format!("`{name}` must be a section") }),
        }
    };

    let problem = match section("problem")? {
        None => None,
        Some(mut s) => {
            let p = ProblemSection {
                p: s.expr("p")?,
                r: s.expr("r")?,
                q: s.expr("q")?,
                g0: s.num("g0")?,
                v0: s.num("v0")?,
                g1: s.num("g1")?,
                v1: s.num("v1")?,
                grid_n: s.count_opt("gridN")?.unwrap_or(1000),
                eigs: s.count_opt("eigs")?.unwrap_or(10),
                series_terms: s.count_opt("seriesTerms")?.unwrap_or(200),
            };
            if p.eigs < 10 {
                return Err(s.err("eigs", "at least 10 eigenpairs are needed for the hypothesis report"));
            }
            s.finish()?;
            Some(p)
        }
    };

    let simulation = match section("simulation")? {
        None => SimulationSection::default(),
        Some(mut s) => {
            let d = SimulationSection::default();
            let sim = SimulationSection {
                n: s.count_opt("N")?.unwrap_or(d.n),
                lambda_fraction: s.num_opt("lambdaFraction")?.unwrap_or(d.lambda_fraction),
                t_final: s.num_opt("tFinal")?.unwrap_or(d.t_final),
                record_every: s.count_opt("recordEvery")?,
            };
            s.finish()?;
            sim
        }
    };

    let inputs = match section("inputs")? {
        None => InputsSection::default(),
        Some(mut s) => {
            let d = InputsSection::default();
            let i = InputsSection {
                d0: s.expr_opt("d0")?.unwrap_or(d.d0),
                d1: s.expr_opt("d1")?.unwrap_or(d.d1),
                u: s.expr_opt("u")?.unwrap_or(d.u),
                x0: s.expr_opt("x0")?.unwrap_or(d.x0),
            };
            s.finish()?;
            i
        }
    };

    let eta = match section("eta")? {
        None => None,
        Some(mut s) => {
            let sigma = s.num("sigma")?;
            let eta = match s.require("eta")? {
                Value::String(v) if v.trim() == "auto" => None,
                other => Some(s.to_expr("eta", other)?),
            };
            s.finish()?;
            Some(EtaSection { eta, sigma })
        }
    };

    let thermo = match section("thermo")? {
        None => None,
        Some(mut s) => {
            let t = ThermoSection {
                g0: s.expr("g0Kernel")?,
                g1: s.expr("g1Kernel")?,
                a: s.num_opt("a")?.unwrap_or(1.0),
                x0: s.expr_opt("x0")?,
            };
            s.finish()?;
            Some(t)
        }
    };

    let certify = match section("certify")? {
        None => None,
        Some(mut s) => {
            let estimates = match s.take("estimates") {
                None => Vec::new(),
                Some(v) => {
                    let names: Vec<String> = match v {
                        Value::String(list) => list.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
                        Value::Array(items) => items
                            .into_iter()
                            .map(|i| match i {
                                Value::String(x) => Ok(x),
                                other => Err(s.err("estimates", format!("expected a name, found {other}"))),
                            })
                            .collect::<Result<_, _>>()?,
                        other => return Err(s.err("estimates", format!("expected a list, found {}", other.type_str()))),
                    };
                    if names.len() == 1 && names[0].eq_ignore_ascii_case("all") {
                        Vec::new()
                    } else {
                        names
                            .iter()
                            .map(|n| EstimateId::from_name(n).ok_or_else(|| s.err("estimates", format!("unknown estimate `{n}`"))))
                            .collect::<Result<_, _>>()?
                    }
                }
            };
            let tolerance = match s.take("tolerance") {
                None => Tolerance::Auto,
                Some(Value::String(v)) if v.trim() == "auto" => Tolerance::Auto,
                Some(v) => {
                    let t = s.to_num("tolerance", &v)?;
                    if t < 0.0 {
                        return Err(s.err("tolerance", "must be nonnegative"));
                    }
                    Tolerance::Absolute(t)
                }
            };
            let eps_omega = match s.take("epsOmega") {
                None => default_eps_omega(),
                Some(Value::Array(items)) => {
                    let mut singles = Vec::new();
                    let mut pairs = Vec::new();
                    for item in &items {
                        match item {
                            Value::Array(p) if p.len() == 2 => {
                                pairs.push((s.to_num("epsOmega", &p[0])?, s.to_num("epsOmega", &p[1])?))
                            }
                            v => singles.push(s.to_num("epsOmega", v)?),
                        }
                    }
                    if !singles.is_empty() && !pairs.is_empty() {
                        return Err(s.err("epsOmega", "mix of numbers and pairs"));
                    }
                    let grid: Vec<(f64, f64)> = if pairs.is_empty() {
                        singles.iter().flat_map(|&e| singles.iter().map(move |&w| (e, w))).collect()
                    } else {
                        pairs
                    };
                    if grid.is_empty() || grid.iter().any(|(e, w)| !(*e > 0.0 && *w > 0.0)) {
                        return Err(s.err("epsOmega", "values must be positive and the grid nonempty"));
                    }
                    grid
                }
                Some(other) => return Err(s.err("epsOmega", format!("expected an array, found {}", other.type_str()))),
            };
            let theta = s.num_opt("theta")?.unwrap_or(PI / 4.0);
            s.finish()?;
            Some(CertifySection { estimates, tolerance, eps_omega, theta })
        }
    };

    let lemmas = match section("lemmas")? {
        None => None,
        Some(mut s) => {
            let l = LemmasSection {
                sigma: s.num("sigma")?,
                m: s.num("M")?,
                eps: s.num("eps")?,
                lambda: s.num_opt("lambda")?,
            };
            s.finish()?;
            Some(l)
        }
    };

    if let Some(name) = root.keys().next() {
        return Err(ConfigError::UnknownSection(name.clone()));
    }
    Ok(Scenario { path: path.to_string(), problem, simulation, inputs, eta, thermo, certify, lemmas })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAT: &str = r#"
# decaying mode
[problem]
p = "1"
r = "1"
q = "0"
g0 = -1
v0 = 0
g1 = 1
v1 = 0

[inputs]
x0 = "sin(pi*z)"
"#;

    #[test]
    fn minimal_heat() {
        let s = parse_scenario(HEAT, "heat.toml").unwrap();
        let p = s.problem().unwrap();
        assert_eq!(p.g0, -1.0);
        assert_eq!(p.grid_n, 1000);
        assert_eq!(s.inputs.x0, parse("sin(pi*z)").unwrap());
        assert_eq!(s.simulation, SimulationSection::default());
        assert!(s.certify.is_none());
    }

    #[test]
    fn malformed_expression_has_line() {
        let text = HEAT.replace("x0 = \"sin(pi*z)\"", "x0 = \"sin(\"");
        match parse_scenario(&text, "x").unwrap_err() {
            ConfigError::Value { line, key, .. } => {
                assert_eq!(line, 13);
                assert_eq!(key, "x0");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse_scenario("[problem]\np = \"1\"\nq = = 2\n", "x").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = HEAT.replace("q = \"0\"\n", "");
        let err = parse_scenario(&text, "x").unwrap_err();
        assert_eq!(err.to_string(), "[problem] missing key `q`");
    }

    #[test]
    fn unknown_key_and_section() {
        let err = parse_scenario("[inputs]\nd2 = \"1\"\n", "x").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 2, .. }));
        assert!(matches!(parse_scenario("[extra]\n", "x").unwrap_err(), ConfigError::UnknownSection(_)));
    }

    #[test]
    fn certify_section() {
        let s = parse_scenario(
            "[certify]\nestimates = \"HEAT_L1, l2_r\"\ntolerance = 1e-3\nepsOmega = [1, 2]\n",
            "x",
        )
        .unwrap();
        let c = s.certify.unwrap();
        assert_eq!(c.estimates, vec![EstimateId::HeatL1, EstimateId::L2R]);
        assert_eq!(c.tolerance, Tolerance::Absolute(1e-3));
        assert_eq!(c.eps_omega, vec![(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)]);
        let s = parse_scenario("[certify]\nestimates = [\"all\"]\n", "x").unwrap();
        assert!(s.certify.unwrap().estimates.is_empty());
        assert!(parse_scenario("[certify]\nestimates = \"NOPE\"\n", "x").is_err());
    }

    #[test]
    fn eta_auto() {
        let s = parse_scenario("[eta]\neta = \"auto\"\nsigma = 2\n", "x").unwrap();
        assert_eq!(s.eta, Some(EtaSection { eta: None, sigma: 2.0 }));
        let s = parse_scenario("[eta]\neta = \"sin(pi/4 + z*pi/2)\"\nsigma = 2.4674\n", "x").unwrap();
        assert!(s.eta.unwrap().eta.is_some());
    }
}
