//! Single experiment runs and their CSV record.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use enhanced_cs::integrator::{integrate, RunRecord};
use enhanced_cs::systems::reference_by_name;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Integrates the configured problem from its default initial state.
pub fn simulate(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let sys = config.system()?;
    let spec = config.method_spec()?;
    let reference = reference_by_name(&config.problem);
    integrate(
        &sys,
        config.method,
        &spec,
        sys.initial_state(),
        config.h,
        config.steps,
        reference.as_ref(),
    )
    .map_err(HarnessError::from_core)
}

/// [`simulate`], then writes the record to `config.output_path`.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    let record = simulate(config)?;
    write_csv_file(&record, &config.output_path)?;
    Ok(record)
}

pub fn csv_header(record: &RunRecord) -> String {
    let dim = record.states.first().map_or(0, Vec::len);
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=dim).map(|i| format!("y{i}")));
    columns.push("energy_err".into());
    columns.extend(record.casimir_errors.iter().map(|(name, _)| format!("casimir_{name}_err")));
    columns.push("global_err".into());
    columns.push("iters".into());
    columns.join(",")
}

/// Header plus one row per recorded step; reals carry 17 significant digits.
pub fn write_csv<W: Write>(record: &RunRecord, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", csv_header(record))?;
    for row in 0..record.len() {
        write!(out, "{:.16e}", record.times[row])?;
        for v in &record.states[row] {
            write!(out, ",{v:.16e}")?;
        }
        write!(out, ",{:.16e}", record.energy_error[row])?;
        for (_, errors) in &record.casimir_errors {
            write!(out, ",{:.16e}", errors[row])?;
        }
        match &record.global_error {
            Some(errors) => write!(out, ",{:.16e}", errors[row])?,
            None => write!(out, ",")?,
        }
        writeln!(out, ",{}", record.iterations[row])?;
    }
    out.flush()
}

pub fn write_csv_file(record: &RunRecord, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_csv(record, BufWriter::new(file)).map_err(|e| HarnessError::io(path, e))
}

/// Headline numbers of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub max_energy_error: f64,
    pub max_casimir_errors: Vec<(String, f64)>,
    pub final_global_error: Option<f64>,
    pub mean_iterations: f64,
}

impl RunSummary {
    pub fn of(record: &RunRecord) -> Self {
        Self {
            steps: record.len().saturating_sub(1),
            max_energy_error: record.max_energy_error(),
            max_casimir_errors: record
                .casimir_errors
                .iter()
                .enumerate()
                .map(|(i, (name, _))| (name.clone(), record.max_casimir_error(i)))
                .collect(),
            final_global_error: record.final_global_error(),
            mean_iterations: record.mean_iterations(),
        }
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "steps                 {}", self.steps)?;
        writeln!(f, "max |H - H0|          {:.3e}", self.max_energy_error)?;
        for (name, err) in &self.max_casimir_errors {
            writeln!(f, "max |C - C0| ({name})  {err:.3e}")?;
        }
        match self.final_global_error {
            Some(err) => writeln!(f, "final global error    {err:.3e}")?,
            None => writeln!(f, "final global error    n/a (no reference)")?,
        }
        write!(f, "mean iterations/step  {:.2}", self.mean_iterations)
    }
}
