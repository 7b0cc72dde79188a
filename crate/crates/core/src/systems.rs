//! Poisson systems `ẏ = S(y)∇H(y)` and the reference test problems.

use std::fmt;
use std::sync::Arc;

use crate::elliptic::jacobi_sn_cn_dn;
use crate::error::{Error, Result};

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// # Panics
    /// If the rows are not all of length `rows.len()`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.as_ref().len(), n, "matrix must be square");
            data.extend_from_slice(row.as_ref());
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `max |S + Sᵀ|`.
    pub fn skew_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        worst
    }
}

type StructureFn = dyn Fn(&[f64]) -> Matrix + Send + Sync;
type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type GuardFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A named invariant `C(y)` with `∇C(y)ᵀ S(y) = 0`.
#[derive(Clone)]
pub struct Casimir {
    name: String,
    function: Arc<ScalarFn>,
}

impl Casimir {
    pub fn new(name: impl Into<String>, function: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            function: Arc::new(function),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn raw(&self, y: &[f64]) -> f64 {
        (self.function)(y)
    }
}

impl fmt::Debug for Casimir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Casimir").field("name", &self.name).finish()
    }
}

/// `ẏ = S(y)∇H(y)` with skew-symmetric `S`.
///
/// All evaluators check the optional domain guard first and return
/// [`Error::Domain`] instead of evaluating outside it.
#[derive(Clone)]
pub struct PoissonSystem {
    name: String,
    dim: usize,
    structure: Arc<StructureFn>,
    hamiltonian: Arc<ScalarFn>,
    gradient: Arc<GradientFn>,
    casimirs: Vec<Casimir>,
    domain_guard: Option<Arc<GuardFn>>,
    initial_state: Vec<f64>,
}

impl fmt::Debug for PoissonSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonSystem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("casimirs", &self.casimirs)
            .field("initial_state", &self.initial_state)
            .finish_non_exhaustive()
    }
}

impl PoissonSystem {
    pub fn new(
        name: impl Into<String>,
        initial_state: Vec<f64>,
        structure: impl Fn(&[f64]) -> Matrix + Send + Sync + 'static,
        hamiltonian: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim: initial_state.len(),
            structure: Arc::new(structure),
            hamiltonian: Arc::new(hamiltonian),
            gradient: Arc::new(gradient),
            casimirs: Vec::new(),
            domain_guard: None,
            initial_state,
        }
    }

    pub fn with_casimir(mut self, casimir: Casimir) -> Self {
        self.casimirs.push(casimir);
        self
    }

    pub fn with_domain_guard(mut self, guard: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain_guard = Some(Arc::new(guard));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn initial_state(&self) -> &[f64] {
        &self.initial_state
    }

    pub fn casimirs(&self) -> &[Casimir] {
        &self.casimirs
    }

    pub fn in_domain(&self, y: &[f64]) -> bool {
        y.len() == self.dim
            && y.iter().all(|v| v.is_finite())
            && self.domain_guard.as_ref().is_none_or(|guard| guard(y))
    }

    pub fn check_state(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: y.len(),
            });
        }
        if !self.in_domain(y) {
            return Err(Error::Domain {
                system: self.name.clone(),
                state: y.to_vec(),
            });
        }
        Ok(())
    }

    pub fn structure(&self, y: &[f64]) -> Result<Matrix> {
        self.check_state(y)?;
        Ok((self.structure)(y))
    }

    pub fn hamiltonian(&self, y: &[f64]) -> Result<f64> {
        self.check_state(y)?;
        Ok((self.hamiltonian)(y))
    }

    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_state(y)?;
        Ok((self.gradient)(y))
    }

    pub fn casimir(&self, index: usize, y: &[f64]) -> Result<f64> {
        self.check_state(y)?;
        Ok(self.casimirs[index].raw(y))
    }

    /// `S(y)∇H(y)`.
    pub fn vector_field(&self, y: &[f64]) -> Result<Vec<f64>> {
        let s = self.structure(y)?;
        let g = (self.gradient)(y);
        Ok(s.mul_vec(&g))
    }
}

/// Parameters `α = 1 + 1/√1.51`, `β = 1 − 0.51/√1.51` of the rigid body.
pub fn euler_parameters() -> (f64, f64) {
    let r = 1.51f64.sqrt();
    (1.0 + 1.0 / r, 1.0 - 0.51 / r)
}

/// Free rigid body (Euler's equations) with quadratic `H` and quadratic Casimir.
pub fn euler_rigid_body() -> PoissonSystem {
    let (alpha, beta) = euler_parameters();
    PoissonSystem::new(
        "euler",
        vec![0.0, 1.0, 1.0],
        move |y| {
            Matrix::from_rows(&[
                [0.0, alpha * y[2], -beta * y[1]],
                [-alpha * y[2], 0.0, y[0]],
                [beta * y[1], -y[0], 0.0],
            ])
        },
        |y| 0.5 * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]),
        |y| y.to_vec(),
    )
    .with_casimir(Casimir::new("quadratic", move |y| {
        0.5 * (y[0] * y[0] + beta * y[1] * y[1] + alpha * y[2] * y[2])
    }))
}

/// `u̇ = u(v − 2)`, `v̇ = v(1 − u)` on the positive quadrant.
pub fn lotka_volterra_2d() -> PoissonSystem {
    PoissonSystem::new(
        "lv2",
        vec![1.0, 1.0],
        |y| {
            let uv = y[0] * y[1];
            Matrix::from_rows(&[[0.0, -uv], [uv, 0.0]])
        },
        |y| y[0].ln() - y[0] + 2.0 * y[1].ln() - y[1],
        |y| vec![1.0 / y[0] - 1.0, 2.0 / y[1] - 1.0],
    )
    .with_domain_guard(|y| y.iter().all(|&v| v > 0.0))
}

/// Three-species Lotka–Volterra system with a logarithmic Casimir.
pub fn lotka_volterra_3d() -> PoissonSystem {
    PoissonSystem::new(
        "lv3",
        vec![1.0, 1.9, 0.5],
        |y| {
            let (a, b, c) = (0.5 * y[0] * y[1], 0.5 * y[0] * y[2], y[1] * y[2]);
            Matrix::from_rows(&[[0.0, -a, b], [a, 0.0, -c], [-b, c, 0.0]])
        },
        |y| 2.0 * y[0] + y[1] + 2.0 * y[2] + y[1].ln() - 2.0 * y[2].ln(),
        |y| vec![2.0, 1.0 + 1.0 / y[1], 2.0 - 2.0 / y[2]],
    )
    .with_casimir(Casimir::new("logarithmic", |y| 2.0 * y[0].ln() + y[1].ln() + y[2].ln()))
    .with_domain_guard(|y| y.iter().all(|&v| v > 0.0))
}

/// Harmonic oscillator in canonical form, `S = [[0, 1], [−1, 0]]`,
/// `H = (q² + p²)/2`, starting from `(1, 0)`.
pub fn canonical_oscillator() -> PoissonSystem {
    PoissonSystem::new(
        "canonical-oscillator",
        vec![1.0, 0.0],
        |_| Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]),
        |y| 0.5 * (y[0] * y[0] + y[1] * y[1]),
        |y| y.to_vec(),
    )
}

/// Looks up a registered system by its CLI name.
pub fn by_name(name: &str) -> Option<PoissonSystem> {
    match name {
        "euler" => Some(euler_rigid_body()),
        "lv2" => Some(lotka_volterra_2d()),
        "lv3" => Some(lotka_volterra_3d()),
        "canonical-oscillator" => Some(canonical_oscillator()),
        _ => None,
    }
}

pub const SYSTEM_NAMES: [&str; 4] = ["euler", "lv2", "lv3", "canonical-oscillator"];

/// Exact solution `t ↦ y(t)` of a system from its default initial state.
#[derive(Clone)]
pub struct ReferenceSolution {
    t0: f64,
    accuracy: f64,
    evaluator: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl fmt::Debug for ReferenceSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReferenceSolution")
            .field("t0", &self.t0)
            .field("accuracy", &self.accuracy)
            .finish_non_exhaustive()
    }
}

impl ReferenceSolution {
    pub fn new(t0: f64, accuracy: f64, evaluator: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self {
            t0,
            accuracy,
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Guaranteed max-norm error bound of [`ReferenceSolution::eval`].
    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        (self.evaluator)(t)
    }
}

/// `y(t) = (√1.51 sn(t), cn(t), dn(t))` with parameter `m = 0.51`.
pub fn reference_solution_euler() -> ReferenceSolution {
    let scale = 1.51f64.sqrt();
    ReferenceSolution::new(0.0, 1e-12, move |t| {
        let (sn, cn, dn) = jacobi_sn_cn_dn(t, 0.51);
        vec![scale * sn, cn, dn]
    })
}

/// `(q, p) = (cos t, −sin t)`.
pub fn reference_solution_oscillator() -> ReferenceSolution {
    ReferenceSolution::new(0.0, 1e-15, |t| vec![t.cos(), -t.sin()])
}

/// Analytic reference for a registered system, when one is known.
pub fn reference_by_name(name: &str) -> Option<ReferenceSolution> {
    match name {
        "euler" => Some(reference_solution_euler()),
        "canonical-oscillator" => Some(reference_solution_oscillator()),
        _ => None,
    }
}

/// Worst residuals of the structural identities of a [`PoissonSystem`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SystemDiagnostics {
    /// `max ‖S(y) + S(y)ᵀ‖_max`.
    pub skew: f64,
    /// Max relative mismatch between `∇H` and central differences of `H`.
    pub gradient: f64,
    /// `max |∇C(y)ᵀ S(y)|` over all Casimirs, `∇C` by five-point differences.
    pub casimir: f64,
    /// `max |∇H(y)ᵀ S(y) ∇H(y)|`.
    pub energy_rate: f64,
}

impl SystemDiagnostics {
    /// Gradient mismatch within 1e−6 relative, every other identity within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.gradient <= 1e-6 && self.skew <= tol && self.casimir <= tol && self.energy_rate <= tol
    }
}

const FD_STEP: f64 = 1e-6;
const FD_STEP_FIVE_POINT: f64 = 1e-4;

fn central_gradient(y: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = y.to_vec();
    (0..y.len())
        .map(|i| {
            let mut at = |offset: f64| {
                probe[i] = y[i] + offset;
                let v = f(&probe);
                probe[i] = y[i];
                v
            };
            (at(FD_STEP) - at(-FD_STEP)) / (2.0 * FD_STEP)
        })
        .collect()
}

/// Fourth-order five-point stencil; accurate enough to resolve `∇CᵀS` at 1e−10.
fn five_point_gradient(y: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let h = FD_STEP_FIVE_POINT;
    let mut probe = y.to_vec();
    (0..y.len())
        .map(|i| {
            let mut at = |offset: f64| {
                probe[i] = y[i] + offset;
                let v = f(&probe);
                probe[i] = y[i];
                v
            };
            (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
        })
        .collect()
}

/// Evaluates the structural identities of `sys` at each sample state.
pub fn check_system(sys: &PoissonSystem, samples: &[Vec<f64>]) -> Result<SystemDiagnostics> {
    let mut report = SystemDiagnostics::default();
    for y in samples {
        let s = sys.structure(y)?;
        let grad = sys.gradient(y)?;
        report.skew = report.skew.max(s.skew_defect());

        let fd = central_gradient(y, |x| (sys.hamiltonian)(x));
        for (g, f) in grad.iter().zip(&fd) {
            report.gradient = report.gradient.max((g - f).abs() / g.abs().max(1.0));
        }

        let flow = s.mul_vec(&grad);
        let rate: f64 = grad.iter().zip(&flow).map(|(a, b)| a * b).sum();
        report.energy_rate = report.energy_rate.max(rate.abs());

        for casimir in &sys.casimirs {
            let dc = five_point_gradient(y, |x| casimir.raw(x));
            // (∇Cᵀ S)_j = Σ_i ∂_i C · S_ij
            for j in 0..sys.dim {
                let v: f64 = (0..sys.dim).map(|i| dc[i] * s.get(i, j)).sum();
                report.casimir = report.casimir.max(v.abs());
            }
        }
    }
    Ok(report)
}
