//! Experiment configuration and its three layers: defaults, a flat
//! `key = value` file, and command-line flags (highest precedence).

use std::path::{Path, PathBuf};

use enhanced_cs::integrator::{Method, MethodSpec};
use enhanced_cs::quadrature::QuadratureRule;
use enhanced_cs::systems::{self, PoissonSystem, SYSTEM_NAMES};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub method: Method,
    pub m: usize,
    pub quad_sigma: usize,
    pub quad_varsigma: usize,
    pub h: f64,
    pub steps: usize,
    pub tol: f64,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: "euler".to_string(),
            method: Method::Enhanced,
            m: 2,
            quad_sigma: 2,
            quad_varsigma: 2,
            h: 0.1,
            steps: 10_000,
            tol: enhanced_cs::integrator::DEFAULT_SOLVER_TOL,
            output_path: PathBuf::from("run.csv"),
        }
    }
}

impl ExperimentConfig {
    /// Rejects unknown problems and non-positive numeric fields.
    pub fn validate(&self) -> Result<()> {
        if !SYSTEM_NAMES.contains(&self.problem.as_str()) {
            return Err(unknown_problem(&self.problem));
        }
        if self.m == 0 || self.quad_sigma == 0 || self.quad_varsigma == 0 || self.steps == 0 {
            return Err(HarnessError::Usage(
                "m, quad_sigma, quad_varsigma and steps must be positive".into(),
            ));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(HarnessError::Usage(format!("step size must be positive, got {}", self.h)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(HarnessError::Usage(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn system(&self) -> Result<PoissonSystem> {
        systems::by_name(&self.problem).ok_or_else(|| unknown_problem(&self.problem))
    }

    /// Builds the method spec from Gauss rules of the configured sizes.
    ///
    /// The Cohen–Hairer scheme has no `m`; it only reads the σ-rule, so the
    /// spec is built with `m = 1`.
    pub fn method_spec(&self) -> Result<MethodSpec> {
        let rule = |s: usize| QuadratureRule::gauss(s).map_err(|e| HarnessError::Usage(e.to_string()));
        let m = match self.method {
            Method::Enhanced => self.m,
            Method::CohenHairer => 1,
        };
        let spec = MethodSpec::new(m, rule(self.quad_sigma)?, rule(self.quad_varsigma)?)
            .map_err(|e| HarnessError::Usage(e.to_string()))?;
        Ok(spec.with_solver_tol(self.tol))
    }

    pub fn apply(&mut self, overrides: &ConfigOverrides) {
        let o = overrides.clone();
        if let Some(v) = o.problem {
            self.problem = v;
        }
        if let Some(v) = o.method {
            self.method = v;
        }
        if let Some(v) = o.m {
            self.m = v;
        }
        if let Some(v) = o.quad_sigma {
            self.quad_sigma = v;
        }
        if let Some(v) = o.quad_varsigma {
            self.quad_varsigma = v;
        }
        if let Some(v) = o.h {
            self.h = v;
        }
        if let Some(v) = o.steps {
            self.steps = v;
        }
        if let Some(v) = o.tol {
            self.tol = v;
        }
        if let Some(v) = o.output_path {
            self.output_path = v;
        }
    }

    /// Defaults, then the optional file, then `cli`; the result is validated.
    pub fn resolve(file: Option<&Path>, cli: &ConfigOverrides) -> Result<Self> {
        let mut config = Self::default();
        if let Some(path) = file {
            config.apply(&ConfigOverrides::from_file(path)?);
        }
        config.apply(cli);
        config.validate()?;
        Ok(config)
    }
}

/// A partial configuration; `None` leaves the lower layer untouched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub problem: Option<String>,
    pub method: Option<Method>,
    pub m: Option<usize>,
    pub quad_sigma: Option<usize>,
    pub quad_varsigma: Option<usize>,
    pub h: Option<f64>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub output_path: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text).map_err(|(line, message)| HarnessError::ConfigSyntax {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// keys may use `_` or `-`. Errors carry the 1-based line number.
    pub fn parse(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut out = Self::default();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| (line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let bad = |what: &str| (line_no, format!("invalid {what} `{value}`"));
            match key.as_str() {
                "problem" => out.problem = Some(value.to_string()),
                "method" => out.method = Some(value.parse().map_err(|e: String| (line_no, e))?),
                "m" => out.m = Some(value.parse().map_err(|_| bad("integer"))?),
                "quad_sigma" => out.quad_sigma = Some(value.parse().map_err(|_| bad("integer"))?),
                "quad_varsigma" => out.quad_varsigma = Some(value.parse().map_err(|_| bad("integer"))?),
                "h" => out.h = Some(value.parse().map_err(|_| bad("number"))?),
                "steps" => out.steps = Some(value.parse().map_err(|_| bad("integer"))?),
                "tol" => out.tol = Some(value.parse().map_err(|_| bad("number"))?),
                "out" | "output_path" => out.output_path = Some(PathBuf::from(value)),
                other => return Err((line_no, format!("unknown key `{other}`"))),
            }
        }
        Ok(out)
    }
}

pub(crate) fn unknown_problem(name: &str) -> HarnessError {
    HarnessError::Usage(format!(
        "unknown problem `{name}` (expected one of {})",
        SYSTEM_NAMES.join(", ")
    ))
}
