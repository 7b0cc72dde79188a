//! Named batches of experiments, run in parallel with one CSV each.

use std::path::{Path, PathBuf};
use std::thread;

use enhanced_cs::integrator::{Method, RunRecord};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::run::run;

pub const SUITE_NAMES: [&str; 1] = ["paper"];

/// Steps for the Lotka–Volterra runs: desk scale and the full-length runs.
pub const DESK_STEPS: usize = 10_000;
pub const FULL_STEPS: usize = 100_000;

/// The rigid body at `h = 0.1` with 2-point Gauss, the 2-D Lotka–Volterra
/// system with 4-point Gauss and the 3-D one with 6-point Gauss (both at
/// `h = 0.01`), each for `m = 1, 2`. `full` lengthens the Lotka–Volterra runs.
pub fn paper_suite(out_dir: &Path, full: bool) -> Vec<ExperimentConfig> {
    let lv_steps = if full { FULL_STEPS } else { DESK_STEPS };
    let mut configs = Vec::new();
    for (problem, quad, h, steps) in [
        ("euler", 2, 0.1, DESK_STEPS),
        ("lv2", 4, 0.01, lv_steps),
        ("lv3", 6, 0.01, lv_steps),
    ] {
        for m in [1, 2] {
            configs.push(ExperimentConfig {
                problem: problem.to_string(),
                method: Method::Enhanced,
                m,
                quad_sigma: quad,
                quad_varsigma: quad,
                h,
                steps,
                output_path: out_dir.join(format!("{problem}_m{m}.csv")),
                ..Default::default()
            });
        }
    }
    configs
}

pub fn suite_by_name(name: &str, out_dir: &Path, full: bool) -> Result<Vec<ExperimentConfig>> {
    match name {
        "paper" => Ok(paper_suite(out_dir, full)),
        other => Err(HarnessError::Usage(format!(
            "unknown suite `{other}` (expected one of {})",
            SUITE_NAMES.join(", ")
        ))),
    }
}

pub struct SuiteOutcome {
    pub config: ExperimentConfig,
    pub result: Result<RunRecord>,
}

impl SuiteOutcome {
    pub fn output_path(&self) -> &PathBuf {
        &self.config.output_path
    }
}

/// Runs every config on its own thread; outcomes keep the input order.
pub fn run_suite(configs: Vec<ExperimentConfig>) -> Vec<SuiteOutcome> {
    thread::scope(|scope| {
        let handles: Vec<_> = configs
            .into_iter()
            .map(|config| scope.spawn(move || SuiteOutcome { result: run(&config), config }))
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("experiment thread panicked"))
            .collect()
    })
}
