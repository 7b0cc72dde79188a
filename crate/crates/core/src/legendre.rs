//! Shifted, L²-normalized Legendre polynomials on `[0, 1]`.
//!
//! `P_j(x) = √(2j+1) · L_j(2x − 1)` where `L_j` is the classical Legendre
//! polynomial on `[−1, 1]`. The family is orthonormal on `[0, 1]` and obeys
//!
//! ```text
//! ∫₀^τ P_j(x) dx = ξ_{j+1} P_{j+1}(τ) − ξ_j P_{j−1+δ_{j0}}(τ)
//! ```
//!
//! which is how [`PolynomialBasis::antiderivative`] is evaluated.

use crate::error::{Error, Result};

/// Default highest degree supported by [`PolynomialBasis::default`].
pub const DEFAULT_MAX_DEGREE: usize = 16;

/// Evaluator for `P_0, …, P_max_degree` and their running integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolynomialBasis {
    max_degree: usize,
}

impl Default for PolynomialBasis {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_DEGREE)
    }
}

impl PolynomialBasis {
    pub fn new(max_degree: usize) -> Self {
        Self { max_degree }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check(&self, j: usize) -> Result<()> {
        if j > self.max_degree {
            return Err(Error::DegreeOutOfRange {
                degree: j,
                max: self.max_degree,
            });
        }
        Ok(())
    }

    /// `P_j(x)`.
    pub fn eval(&self, j: usize, x: f64) -> Result<f64> {
        self.check(j)?;
        Ok(eval_unchecked(j, x))
    }

    /// `Ĩ_j(τ) = ∫₀^τ P_j(x) dx`.
    pub fn antiderivative(&self, j: usize, tau: f64) -> Result<f64> {
        // Needs P_{j+1}, so the range check is on j itself; j+1 is evaluated
        // internally without exposing it.
        self.check(j)?;
        Ok(antiderivative_unchecked(j, tau))
    }
}

/// `ξ_j`: `−1/2` for `j = 0`, otherwise `1 / (2√(4j² − 1))`.
pub fn xi(j: usize) -> f64 {
    if j == 0 {
        -0.5
    } else {
        let j = j as f64;
        1.0 / (2.0 * (4.0 * j * j - 1.0).sqrt())
    }
}

/// Fills `out[k] = P_k(x)` for `k = 0..out.len()` by the three-term recurrence.
pub fn eval_all(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let t = 2.0 * x - 1.0;
    // Classical (unnormalized) Legendre values in the recurrence.
    let mut prev = 1.0;
    let mut cur = t;
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 3f64.sqrt() * t;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        out[k + 1] = (2.0 * kf + 3.0).sqrt() * next;
    }
}

pub(crate) fn eval_unchecked(j: usize, x: f64) -> f64 {
    let (value, _) = classical_with_previous(j, 2.0 * x - 1.0);
    (2.0 * j as f64 + 1.0).sqrt() * value
}

pub(crate) fn antiderivative_unchecked(j: usize, tau: f64) -> f64 {
    if let Some(exact) = antiderivative_at_endpoint(j, tau) {
        return exact;
    }
    let lower = if j == 0 { 0 } else { j - 1 };
    xi(j + 1) * eval_unchecked(j + 1, tau) - xi(j) * eval_unchecked(lower, tau)
}

/// `Ĩ_j(0) = 0` and `Ĩ_j(1) = δ_{j0}`, returned exactly.
fn antiderivative_at_endpoint(j: usize, tau: f64) -> Option<f64> {
    if tau == 0.0 {
        Some(0.0)
    } else if tau == 1.0 {
        Some(if j == 0 { 1.0 } else { 0.0 })
    } else {
        None
    }
}

/// Fills `out[k] = Ĩ_k(τ)` for `k = 0..out.len()`.
pub fn antiderivative_all(tau: f64, out: &mut [f64]) {
    let mut p = vec![0.0; out.len() + 1];
    eval_all(tau, &mut p);
    for (k, slot) in out.iter_mut().enumerate() {
        if let Some(exact) = antiderivative_at_endpoint(k, tau) {
            *slot = exact;
            continue;
        }
        let lower = if k == 0 { 0 } else { k - 1 };
        *slot = xi(k + 1) * p[k + 1] - xi(k) * p[lower];
    }
}

/// Classical `L_n(t)` together with `L_{n−1}(t)` (zero for `n = 0`).
pub(crate) fn classical_with_previous(n: usize, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = t;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}
