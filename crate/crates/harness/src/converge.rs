//! Observed order of accuracy from a ladder of step sizes.

use std::fmt;
use std::io::Write;

use enhanced_cs::integrator::integrate;
use enhanced_cs::oracle::rk4_reference;
use enhanced_cs::systems::reference_by_name;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Step sizes used by the default study.
pub const DEFAULT_H_LIST: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub steps: usize,
    /// `‖y_N − y(t_end)‖_max`
    pub error: f64,
    /// `log(e_prev / e) / log(h_prev / h)`; absent on the first row.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    /// CSV with columns `h,steps,global_err,order`; the first order is empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "h,steps,global_err,order")?;
        for row in &self.rows {
            write!(out, "{:.16e},{},{:.16e},", row.h, row.steps, row.error)?;
            if let Some(order) = row.order {
                write!(out, "{order:.16e}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>10}  {:>8}  {:>12}  {:>6}", "h", "steps", "error", "order")?;
        for row in &self.rows {
            let order = row.order.map_or_else(|| "-".to_string(), |p| format!("{p:.3}"));
            writeln!(f, "{:>10}  {:>8}  {:>12.4e}  {:>6}", row.h, row.steps, row.error, order)?;
        }
        Ok(())
    }
}

/// Integrates `template`'s problem and method to `t_end` once per step size.
///
/// The exact state comes from the analytic solution when one is registered
/// and from the refined RK4 oracle otherwise. Every `h` must divide `t_end`
/// into a whole number of steps.
pub fn convergence_study(template: &ExperimentConfig, h_list: &[f64], t_end: f64) -> Result<ConvergenceTable> {
    if h_list.is_empty() {
        return Err(HarnessError::Usage("empty step-size list".into()));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(HarnessError::Usage(format!("t_end must be positive, got {t_end}")));
    }
    let sys = template.system()?;
    let spec = template.method_spec()?;
    let y0 = sys.initial_state();
    let exact = match reference_by_name(&template.problem) {
        Some(reference) => reference.eval(t_end),
        None => rk4_reference(&sys, y0, t_end).map_err(HarnessError::from_core)?,
    };

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(h_list.len());
    for &h in h_list {
        if !(h.is_finite() && h > 0.0) {
            return Err(HarnessError::Usage(format!("step size must be positive, got {h}")));
        }
        let steps = (t_end / h).round() as usize;
        if steps == 0 || (steps as f64 * h - t_end).abs() > 1e-9 * t_end {
            return Err(HarnessError::Usage(format!("h = {h} does not divide t_end = {t_end}")));
        }
        let record = integrate(&sys, template.method, &spec, y0, h, steps, None).map_err(HarnessError::from_core)?;
        let last = record.states.last().expect("record holds the initial row");
        let error = last.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let order = rows.last().map(|prev| (prev.error / error).ln() / (prev.h / h).ln());
        rows.push(ConvergenceRow { h, steps, error, order });
    }
    Ok(ConvergenceTable { rows })
}
