//! Fixed-step integrators for Poisson systems.
//!
//! [`step_enhanced_cs`] discretizes the enhanced continuous-stage method with
//! one quadrature rule in `ς` (where `S` is sampled) and one in `σ` (where
//! `∇H` is sampled). The stage is the degree-`m` polynomial
//!
//! ```text
//! Y_τ = y₀ + h Σ_{i<m} Ĩ_i(τ) w_i
//! ```
//!
//! and the unknowns are the `m` vectors `w_i`, found by Picard iteration of
//!
//! ```text
//! G_j = Σ_l b^σ_l P_j(d_l) ∇H(Y_{d_l})
//! w_i = Σ_k b^ς_k P_i(c_k) S(Y_{c_k}) Σ_{j<m} P_j(c_k) G_j
//! ```
//!
//! Since `Ĩ_i(1) = δ_{i0}`, the step result is `y₁ = y₀ + h w_0`.

use crate::error::{Error, Result};
use crate::legendre::{antiderivative_all, eval_all};
use crate::quadrature::QuadratureRule;
use crate::systems::{PoissonSystem, ReferenceSolution};

pub const DEFAULT_SOLVER_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_ITERS: usize = 200;
/// Iterations without a new best residual before giving up.
pub const STALL_LIMIT: usize = 25;

/// Basis values at the nodes of one rule.
#[derive(Debug, Clone, PartialEq)]
struct NodeTable {
    /// `legendre[k][i] = P_i(c_k)`
    legendre: Vec<Vec<f64>>,
    /// `integrals[k][i] = Ĩ_i(c_k)`
    integrals: Vec<Vec<f64>>,
}

impl NodeTable {
    fn new(rule: &QuadratureRule, m: usize) -> Self {
        let mut legendre = Vec::with_capacity(rule.len());
        let mut integrals = Vec::with_capacity(rule.len());
        for &c in rule.nodes() {
            let mut p = vec![0.0; m];
            let mut ip = vec![0.0; m];
            eval_all(c, &mut p);
            antiderivative_all(c, &mut ip);
            legendre.push(p);
            integrals.push(ip);
        }
        Self { legendre, integrals }
    }
}

/// Order parameter, quadrature rules and solver settings of the method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    m: usize,
    sigma_rule: QuadratureRule,
    varsigma_rule: QuadratureRule,
    solver_tol: f64,
    max_iters: usize,
    sigma_table: NodeTable,
    varsigma_table: NodeTable,
}

impl MethodSpec {
    pub fn new(m: usize, sigma_rule: QuadratureRule, varsigma_rule: QuadratureRule) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder);
        }
        if sigma_rule.len() < m {
            return Err(Error::SigmaRuleTooSmall {
                nodes: sigma_rule.len(),
                m,
            });
        }
        Ok(Self {
            m,
            sigma_table: NodeTable::new(&sigma_rule, m),
            varsigma_table: NodeTable::new(&varsigma_rule, m),
            sigma_rule,
            varsigma_rule,
            solver_tol: DEFAULT_SOLVER_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    /// Same `s`-point Gauss rule in both integrals.
    pub fn gauss(m: usize, s: usize) -> Result<Self> {
        let rule = QuadratureRule::gauss(s)?;
        Self::new(m, rule.clone(), rule)
    }

    pub fn with_solver_tol(mut self, tol: f64) -> Self {
        self.solver_tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters.max(1);
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sigma_rule(&self) -> &QuadratureRule {
        &self.sigma_rule
    }

    pub fn varsigma_rule(&self) -> &QuadratureRule {
        &self.varsigma_rule
    }

    pub fn solver_tol(&self) -> f64 {
        self.solver_tol
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }
}

/// Spectral stage coefficients of one enhanced step.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSolution {
    pub coefficients: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

impl StageSolution {
    /// `Y_τ = y₀ + h Σ_i Ĩ_i(τ) w_i`.
    pub fn stage(&self, y0: &[f64], h: f64, tau: f64) -> Vec<f64> {
        let mut ip = vec![0.0; self.coefficients.len()];
        antiderivative_all(tau, &mut ip);
        stage_value(y0, h, &ip, &self.coefficients)
    }
}

fn stage_value(y0: &[f64], h: f64, weights: &[f64], w: &[Vec<f64>]) -> Vec<f64> {
    let mut y = y0.to_vec();
    for (wi, coeff) in w.iter().zip(weights) {
        for (yk, wik) in y.iter_mut().zip(wi) {
            *yk += h * coeff * wik;
        }
    }
    y
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn validate(sys: &PoissonSystem, y0: &[f64], h: f64) -> Result<()> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    sys.check_state(y0)
}

/// Tracks the fixed-point residual and decides when to stop.
struct ConvergenceMonitor {
    threshold: f64,
    max_iters: usize,
    best: f64,
    since_best: usize,
}

enum Verdict {
    Converged,
    Continue,
    Failed,
}

impl ConvergenceMonitor {
    fn new(spec_tol: f64, max_iters: usize, y0: &[f64]) -> Self {
        Self {
            threshold: spec_tol * (1.0 + max_norm(y0)),
            max_iters,
            best: f64::INFINITY,
            since_best: 0,
        }
    }

    fn observe(&mut self, iteration: usize, residual: f64) -> Verdict {
        if residual <= self.threshold {
            return Verdict::Converged;
        }
        if !residual.is_finite() || iteration >= self.max_iters {
            return Verdict::Failed;
        }
        if residual < self.best {
            self.best = residual;
            self.since_best = 0;
        } else {
            self.since_best += 1;
            if self.since_best >= STALL_LIMIT {
                return Verdict::Failed;
            }
        }
        Verdict::Continue
    }
}

/// Default starting guess: `w_0 = S(y₀)∇H(y₀)`, higher coefficients zero.
pub fn initial_guess(sys: &PoissonSystem, m: usize, y0: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut w = vec![vec![0.0; y0.len()]; m];
    w[0] = sys.vector_field(y0)?;
    Ok(w)
}

/// One step of the enhanced continuous-stage method from the default guess.
pub fn step_enhanced_cs(
    sys: &PoissonSystem,
    spec: &MethodSpec,
    y0: &[f64],
    h: f64,
) -> Result<(Vec<f64>, StageSolution)> {
    let guess = initial_guess(sys, spec.m, y0)?;
    step_enhanced_cs_from(sys, spec, y0, h, guess)
}

/// One enhanced step starting the Picard iteration at `guess`.
pub fn step_enhanced_cs_from(
    sys: &PoissonSystem,
    spec: &MethodSpec,
    y0: &[f64],
    h: f64,
    guess: Vec<Vec<f64>>,
) -> Result<(Vec<f64>, StageSolution)> {
    validate(sys, y0, h)?;
    let m = spec.m;
    let n = y0.len();
    if guess.len() != m || guess.iter().any(|w| w.len() != n) {
        return Err(Error::Dimension {
            expected: m * n,
            got: guess.iter().map(Vec::len).sum(),
        });
    }

    let mut w = guess;
    let mut monitor = ConvergenceMonitor::new(spec.solver_tol, spec.max_iters, y0);
    let mut g_proj = vec![vec![0.0; n]; m];
    let mut next = vec![vec![0.0; n]; m];
    let mut mixed = vec![0.0; n];
    let mut rotated = vec![0.0; n];

    for iteration in 1.. {
        // G_j = Σ_l b_l P_j(d_l) ∇H(Y_{d_l})
        g_proj.iter_mut().for_each(|g| g.fill(0.0));
        for (l, (_, b)) in spec.sigma_rule.iter().enumerate() {
            let y = stage_value(y0, h, &spec.sigma_table.integrals[l], &w);
            let grad = sys.gradient(&y)?;
            for (j, gj) in g_proj.iter_mut().enumerate() {
                let weight = b * spec.sigma_table.legendre[l][j];
                for (a, g) in gj.iter_mut().zip(&grad) {
                    *a += weight * g;
                }
            }
        }

        // w_i = Σ_k b_k P_i(c_k) S(Y_{c_k}) Σ_j P_j(c_k) G_j
        next.iter_mut().for_each(|v| v.fill(0.0));
        for (k, (_, b)) in spec.varsigma_rule.iter().enumerate() {
            let p = &spec.varsigma_table.legendre[k];
            let y = stage_value(y0, h, &spec.varsigma_table.integrals[k], &w);
            let s = sys.structure(&y)?;
            mixed.fill(0.0);
            for (j, gj) in g_proj.iter().enumerate() {
                for (a, g) in mixed.iter_mut().zip(gj) {
                    *a += p[j] * g;
                }
            }
            s.mul_vec_into(&mixed, &mut rotated);
            for (i, wi) in next.iter_mut().enumerate() {
                let weight = b * p[i];
                for (a, r) in wi.iter_mut().zip(&rotated) {
                    *a += weight * r;
                }
            }
        }

        let residual = next
            .iter()
            .zip(&w)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        std::mem::swap(&mut w, &mut next);

        match monitor.observe(iteration, residual) {
            Verdict::Converged => {
                let y1 = stage_value(y0, h, &[1.0], &w[..1]);
                sys.check_state(&y1)?;
                return Ok((
                    y1,
                    StageSolution {
                        coefficients: w,
                        iterations: iteration,
                        converged: true,
                    },
                ));
            }
            Verdict::Failed => {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual,
                })
            }
            Verdict::Continue => {}
        }
    }
    unreachable!("the monitor stops the loop")
}

/// Result of one Cohen–Hairer step.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineStep {
    pub y1: Vec<f64>,
    /// `(y₁ − y₀)/h`, reusable as the next starting guess.
    pub increment: Vec<f64>,
    pub iterations: usize,
}

/// `y₁ = y₀ + h S((y₀+y₁)/2) Σ_l b_l ∇H(y₀ + d_l(y₁ − y₀))`.
pub fn step_cohen_hairer(sys: &PoissonSystem, sigma_rule: &QuadratureRule, y0: &[f64], h: f64) -> Result<Vec<f64>> {
    let guess = sys.vector_field(y0)?;
    step_cohen_hairer_from(sys, sigma_rule, y0, h, guess, DEFAULT_SOLVER_TOL, DEFAULT_MAX_ITERS).map(|s| s.y1)
}

/// Cohen–Hairer step iterating on the increment `(y₁ − y₀)/h` from `guess`.
pub fn step_cohen_hairer_from(
    sys: &PoissonSystem,
    sigma_rule: &QuadratureRule,
    y0: &[f64],
    h: f64,
    guess: Vec<f64>,
    solver_tol: f64,
    max_iters: usize,
) -> Result<BaselineStep> {
    validate(sys, y0, h)?;
    let n = y0.len();
    if guess.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: guess.len(),
        });
    }
    let mut increment = guess;
    let mut monitor = ConvergenceMonitor::new(solver_tol, max_iters, y0);
    let mut averaged = vec![0.0; n];

    for iteration in 1.. {
        let midpoint: Vec<f64> = y0.iter().zip(&increment).map(|(y, w)| y + 0.5 * h * w).collect();
        let s = sys.structure(&midpoint)?;
        averaged.fill(0.0);
        for (d, b) in sigma_rule.iter() {
            let y: Vec<f64> = y0.iter().zip(&increment).map(|(y, w)| y + d * h * w).collect();
            let grad = sys.gradient(&y)?;
            for (a, g) in averaged.iter_mut().zip(&grad) {
                *a += b * g;
            }
        }
        let next = s.mul_vec(&averaged);
        let residual = next
            .iter()
            .zip(&increment)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        increment = next;

        match monitor.observe(iteration, residual) {
            Verdict::Converged => {
                let y1: Vec<f64> = y0.iter().zip(&increment).map(|(y, w)| y + h * w).collect();
                sys.check_state(&y1)?;
                return Ok(BaselineStep {
                    y1,
                    increment,
                    iterations: iteration,
                });
            }
            Verdict::Failed => {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual,
                })
            }
            Verdict::Continue => {}
        }
    }
    unreachable!("the monitor stops the loop")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Enhanced continuous-stage method of order `2m`.
    Enhanced,
    /// Order-2 Cohen–Hairer scheme; reads only [`MethodSpec::sigma_rule`].
    CohenHairer,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Enhanced => "enhanced",
            Method::CohenHairer => "cohen-hairer",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "enhanced" => Ok(Method::Enhanced),
            "cohen-hairer" => Ok(Method::CohenHairer),
            other => Err(format!("unknown method `{other}` (expected enhanced or cohen-hairer)")),
        }
    }
}

/// Per-step trajectory data. Index 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `H(y_n) − H(y₀)`
    pub energy_error: Vec<f64>,
    /// `(name, C(y_n) − C(y₀))` per Casimir.
    pub casimir_errors: Vec<(String, Vec<f64>)>,
    /// `‖y_n − y_ref(t_n)‖_max` when a reference was supplied.
    pub global_error: Option<Vec<f64>>,
    /// Fixed-point iterations per step (0 for the initial row).
    pub iterations: Vec<usize>,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_error(&self) -> f64 {
        max_norm(&self.energy_error)
    }

    pub fn max_casimir_error(&self, index: usize) -> f64 {
        max_norm(&self.casimir_errors[index].1)
    }

    pub fn final_global_error(&self) -> Option<f64> {
        self.global_error.as_ref().and_then(|g| g.last().copied())
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.iterations.len() <= 1 {
            return 0.0;
        }
        let total: usize = self.iterations[1..].iter().sum();
        total as f64 / (self.iterations.len() - 1) as f64
    }

    fn push(&mut self, ctx: &RecordContext<'_>, t: f64, y: Vec<f64>, iterations: usize) -> Result<()> {
        let sys = ctx.sys;
        self.energy_error.push(sys.hamiltonian(&y)? - ctx.h0);
        for (index, (_, errors)) in self.casimir_errors.iter_mut().enumerate() {
            errors.push(sys.casimir(index, &y)? - ctx.c0[index]);
        }
        if let (Some(errors), Some(reference)) = (self.global_error.as_mut(), ctx.reference) {
            let exact = reference.eval(t);
            let err = y.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            errors.push(err);
        }
        self.times.push(t);
        self.states.push(y);
        self.iterations.push(iterations);
        Ok(())
    }
}

/// Invariant values at the initial state, shared by every recorded row.
struct RecordContext<'a> {
    sys: &'a PoissonSystem,
    h0: f64,
    c0: Vec<f64>,
    reference: Option<&'a ReferenceSolution>,
}

/// Takes `n_steps` fixed steps of size `h` from `y0`, recording invariant
/// errors and, with a reference, the global error at every step.
///
/// Each step's Picard iteration starts from the previous step's solution.
pub fn integrate(
    sys: &PoissonSystem,
    method: Method,
    spec: &MethodSpec,
    y0: &[f64],
    h: f64,
    n_steps: usize,
    reference: Option<&ReferenceSolution>,
) -> Result<RunRecord> {
    validate(sys, y0, h)?;
    if n_steps == 0 {
        return Err(Error::InvalidStep(0.0));
    }
    let t0 = reference.map_or(0.0, ReferenceSolution::t0);
    let h0 = sys.hamiltonian(y0)?;
    let c0 = (0..sys.casimirs().len())
        .map(|i| sys.casimir(i, y0))
        .collect::<Result<Vec<_>>>()?;

    let mut record = RunRecord {
        times: Vec::with_capacity(n_steps + 1),
        states: Vec::with_capacity(n_steps + 1),
        energy_error: Vec::with_capacity(n_steps + 1),
        casimir_errors: sys
            .casimirs()
            .iter()
            .map(|c| (c.name().to_string(), Vec::with_capacity(n_steps + 1)))
            .collect(),
        global_error: reference.map(|_| Vec::with_capacity(n_steps + 1)),
        iterations: Vec::with_capacity(n_steps + 1),
    };
    let ctx = RecordContext { sys, h0, c0, reference };
    record.push(&ctx, t0, y0.to_vec(), 0)?;

    let wrap = |step: usize| move |e: Error| Error::StepFailed { step, source: Box::new(e) };
    let mut y = y0.to_vec();
    match method {
        Method::Enhanced => {
            let mut guess = initial_guess(sys, spec.m, &y).map_err(wrap(1))?;
            for step in 1..=n_steps {
                let (y1, stage) = step_enhanced_cs_from(sys, spec, &y, h, guess).map_err(wrap(step))?;
                guess = stage.coefficients;
                y = y1;
                record.push(&ctx, t0 + step as f64 * h, y.clone(), stage.iterations)?;
            }
        }
        Method::CohenHairer => {
            let mut guess = sys.vector_field(&y).map_err(wrap(1))?;
            for step in 1..=n_steps {
                let out = step_cohen_hairer_from(sys, &spec.sigma_rule, &y, h, guess, spec.solver_tol, spec.max_iters)
                    .map_err(wrap(step))?;
                guess = out.increment;
                y = out.y1;
                record.push(&ctx, t0 + step as f64 * h, y.clone(), out.iterations)?;
            }
        }
    }
    Ok(record)
}

/// `‖Φ_{−h}(Φ_h(y₀)) − y₀‖_max` for the enhanced method.
pub fn adjoint_roundtrip(sys: &PoissonSystem, spec: &MethodSpec, y0: &[f64], h: f64) -> Result<f64> {
    let (forward, _) = step_enhanced_cs(sys, spec, y0, h)?;
    let (back, _) = step_enhanced_cs(sys, spec, &forward, -h)?;
    Ok(back.iter().zip(y0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{euler_rigid_body, lotka_volterra_2d};

    #[test]
    fn spec_validation() {
        assert_eq!(MethodSpec::gauss(0, 2).unwrap_err(), Error::InvalidOrder);
        assert_eq!(
            MethodSpec::gauss(3, 2).unwrap_err(),
            Error::SigmaRuleTooSmall { nodes: 2, m: 3 }
        );
        let spec = MethodSpec::gauss(2, 2).unwrap();
        assert_eq!(spec.solver_tol(), 1e-14);
        assert_eq!(spec.max_iters(), 200);
    }

    #[test]
    fn zero_step_is_rejected() {
        let sys = euler_rigid_body();
        let spec = MethodSpec::gauss(1, 2).unwrap();
        assert_eq!(
            step_enhanced_cs(&sys, &spec, &[0.0, 1.0, 1.0], 0.0).unwrap_err(),
            Error::InvalidStep(0.0)
        );
    }

    #[test]
    fn stage_endpoints() {
        let sys = euler_rigid_body();
        let spec = MethodSpec::gauss(2, 2).unwrap();
        let y0 = [0.0, 1.0, 1.0];
        let (y1, stage) = step_enhanced_cs(&sys, &spec, &y0, 0.1).unwrap();
        assert!(stage.converged);
        assert_eq!(stage.stage(&y0, 0.1, 0.0), y0.to_vec());
        let end = stage.stage(&y0, 0.1, 1.0);
        for (a, b) in end.iter().zip(&y1) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn domain_violation_reports_domain_error() {
        let sys = lotka_volterra_2d();
        let spec = MethodSpec::gauss(1, 4).unwrap();
        // A huge step drives a stage node out of the positive quadrant.
        let err = step_enhanced_cs(&sys, &spec, &[1.0, 1.0], 5.0).unwrap_err();
        assert!(
            matches!(err, Error::Domain { .. } | Error::NoConvergence { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let sys = euler_rigid_body();
        let spec = MethodSpec::gauss(2, 2).unwrap().with_max_iters(2);
        let err = step_enhanced_cs(&sys, &spec, &[0.0, 1.0, 1.0], 0.1).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 2, .. }), "{err:?}");
    }

    #[test]
    fn integrate_wraps_step_index() {
        let sys = euler_rigid_body();
        let spec = MethodSpec::gauss(1, 2).unwrap().with_max_iters(1);
        let err = integrate(&sys, Method::Enhanced, &spec, &[0.0, 1.0, 1.0], 0.1, 5, None).unwrap_err();
        assert!(matches!(err, Error::StepFailed { step: 1, .. }), "{err:?}");
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Enhanced, Method::CohenHairer] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("rk4".parse::<Method>().is_err());
    }
}
