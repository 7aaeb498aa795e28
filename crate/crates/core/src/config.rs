//! Plain-text run configuration: one `key = value` per line, `#` starts a
//! comment, absent keys take defaults, unknown keys are rejected.

use std::fmt;
use std::str::FromStr;

use crate::constitutive::ModelParams;
use crate::error::{Error, Result};
use crate::postprocess::ProbeSide;
use crate::solver::{LinearSolverKind, SolverConfig};
use crate::tensor2d::ElasticOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fiber {
    #[default]
    None,
    X,
    Y,
}

impl Fiber {
    pub fn direction(self) -> Option<[f64; 2]> {
        match self {
            Fiber::None => None,
            Fiber::X => Some([1.0, 0.0]),
            Fiber::Y => Some([0.0, 1.0]),
        }
    }
}

impl FromStr for Fiber {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(Fiber::None),
            "x" => Ok(Fiber::X),
            "y" => Ok(Fiber::Y),
            other => Err(format!("fiber must be one of none, x, y (got '{other}')")),
        }
    }
}

impl fmt::Display for Fiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fiber::None => "none",
            Fiber::X => "x",
            Fiber::Y => "y",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub fiber: Fiber,
    pub load_c: f64,
    pub n_div: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    pub quad_order: usize,
    pub cracked: bool,
    pub output_prefix: String,
    pub linear_solver: LinearSolverKind,
    pub adaptive_relaxation: bool,
    pub probe_side: ProbeSide,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 2.0,
            beta: 0.5,
            mu: 1.0,
            lambda: 1.0,
            gamma: 1.0,
            fiber: Fiber::None,
            load_c: 0.1,
            n_div: 64,
            tol: 1e-4,
            max_iter: 200,
            relaxation: 1.0,
            quad_order: 2,
            cracked: true,
            output_prefix: "run".to_string(),
            linear_solver: LinearSolverKind::Direct,
            adaptive_relaxation: false,
            probe_side: ProbeSide::Lower,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "alpha",
    "beta",
    "mu",
    "lambda",
    "gamma",
    "fiber",
    "load_c",
    "n_div",
    "tol",
    "max_iter",
    "relaxation",
    "quad_order",
    "cracked",
    "output_prefix",
    "linear_solver",
    "adaptive_relaxation",
    "probe_side",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("malformed value '{value}' for {key}"))
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("malformed value '{value}' for {key}; expected true or false")),
    }
}

impl RunConfig {
    /// Sets one key from its textual value, validating the key's own constraint.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "alpha" => self.alpha = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "mu" => self.mu = parse_num(key, value)?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "fiber" => self.fiber = value.parse()?,
            "load_c" => self.load_c = parse_num(key, value)?,
            "n_div" => self.n_div = parse_num(key, value)?,
            "tol" => self.tol = parse_num(key, value)?,
            "max_iter" => self.max_iter = parse_num(key, value)?,
            "relaxation" => self.relaxation = parse_num(key, value)?,
            "quad_order" => self.quad_order = parse_num(key, value)?,
            "cracked" => self.cracked = parse_bool(key, value)?,
            "output_prefix" => {
                if value.is_empty() {
                    return Err("output_prefix must not be empty".to_string());
                }
                self.output_prefix = value.to_string()
            }
            "linear_solver" => {
                self.linear_solver = match value {
                    "direct" => LinearSolverKind::Direct,
                    "cg" => LinearSolverKind::Cg,
                    _ => return Err(format!("linear_solver must be direct or cg (got '{value}')")),
                }
            }
            "adaptive_relaxation" => self.adaptive_relaxation = parse_bool(key, value)?,
            "probe_side" => {
                self.probe_side = match value {
                    "lower" => ProbeSide::Lower,
                    "upper" => ProbeSide::Upper,
                    _ => return Err(format!("probe_side must be lower or upper (got '{value}')")),
                }
            }
            _ => return Err(format!("unknown key '{key}'")),
        }
        self.check_key(key)
    }

    fn check_key(&self, key: &str) -> std::result::Result<(), String> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(format!("{what} must be > 0 (got {v})"))
            }
        };
        let non_negative = |v: f64, what: &str| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(format!("{what} must be >= 0 (got {v})"))
            }
        };
        match key {
            "alpha" => positive(self.alpha, "alpha"),
            "beta" => non_negative(self.beta, "beta"),
            "mu" => positive(self.mu, "mu"),
            "lambda" => positive(self.lambda, "lambda"),
            "gamma" => non_negative(self.gamma, "gamma"),
            "load_c" => non_negative(self.load_c, "load_c"),
            "tol" => positive(self.tol, "tol"),
            "max_iter" if self.max_iter < 1 => Err("max_iter must be >= 1".to_string()),
            "relaxation" if !(self.relaxation > 0.0 && self.relaxation <= 1.0) => {
                Err(format!("relaxation must be in (0, 1] (got {})", self.relaxation))
            }
            "quad_order" if !matches!(self.quad_order, 2 | 3) => {
                Err(format!("quad_order must be 2 or 3 (got {})", self.quad_order))
            }
            "n_div" if self.n_div < 1 => Err("n_div must be >= 1".to_string()),
            _ => Ok(()),
        }
    }

    /// Cross-key checks that only make sense once every key is known.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for key in KEYS {
            self.check_key(key)?;
        }
        if self.cracked && (self.n_div < 4 || !self.n_div.is_multiple_of(2)) {
            return Err(format!("n_div must be even and >= 4 for a cracked mesh (got {})", self.n_div));
        }
        Ok(())
    }

    pub fn operator(&self) -> Result<ElasticOperator> {
        ElasticOperator::new(self.mu, self.lambda, self.gamma, self.fiber.direction())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.alpha, self.beta)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            relaxation: self.relaxation,
            quad_order: self.quad_order,
            linear_solver: self.linear_solver,
            adaptive_relaxation: self.adaptive_relaxation,
            ..SolverConfig::default()
        }
    }

    /// Textual value of a key, as it would appear in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "alpha" => self.alpha.to_string(),
            "beta" => self.beta.to_string(),
            "mu" => self.mu.to_string(),
            "lambda" => self.lambda.to_string(),
            "gamma" => self.gamma.to_string(),
            "fiber" => self.fiber.to_string(),
            "load_c" => self.load_c.to_string(),
            "n_div" => self.n_div.to_string(),
            "tol" => self.tol.to_string(),
            "max_iter" => self.max_iter.to_string(),
            "relaxation" => self.relaxation.to_string(),
            "quad_order" => self.quad_order.to_string(),
            "cracked" => self.cracked.to_string(),
            "output_prefix" => self.output_prefix.clone(),
            "linear_solver" => match self.linear_solver {
                LinearSolverKind::Direct => "direct".to_string(),
                LinearSolverKind::Cg => "cg".to_string(),
            },
            "adaptive_relaxation" => self.adaptive_relaxation.to_string(),
            "probe_side" => match self.probe_side {
                ProbeSide::Lower => "lower".to_string(),
                ProbeSide::Upper => "upper".to_string(),
            },
            _ => return None,
        })
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Config { line, msg: format!("expected 'key = value', got '{content}'") })?;
        cfg.set(key.trim(), value.trim()).map_err(|msg| Error::Config { line, msg })?;
    }
    cfg.validate().map_err(|msg| Error::Config { line: last_line.max(1), msg })?;
    Ok(cfg)
}
