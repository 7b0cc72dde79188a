//! Continuous Butcher coefficients of the order-`2m` energy-preserving family
//! and numerical verifiers for the algebraic conditions they must satisfy.
//!
//! The family is
//!
//! ```text
//! B(ς, σ)    = Σ_{j<m} P_j(ς) P_j(σ)
//! Ã(τ, ς)    = Σ_{i<m} P_i(ς) Ĩ_i(τ)
//! A(τ, ς, σ) = Σ_{i<m} Σ_{j<m} P_i(ς) P_j(ς) Ĩ_i(τ) P_j(σ) = Ã(τ, ς) · B(ς, σ)
//! ```
//!
//! with `P_j` the shifted Legendre polynomials and `Ĩ_i(τ) = ∫₀^τ P_i`.
//!
//! The checkers take any [`ContinuousCoefficients`], so perturbed or
//! hand-written coefficient functions can be verified the same way.

use crate::error::{Error, Result};
use crate::legendre::{antiderivative_all, eval_all, PolynomialBasis};
use crate::quadrature::QuadratureRule;

/// Residual threshold used when deciding whether a simplifying assumption holds.
pub const SIMPLIFYING_TOL: f64 = 1e-11;

/// Continuous coefficient functions `A(τ, ς, σ)` and `B(ς, σ)` of an
/// enhanced continuous-stage method, with the closed-form `∂A/∂τ`.
pub trait ContinuousCoefficients {
    fn a(&self, tau: f64, vs: f64, sigma: f64) -> f64;
    fn b(&self, vs: f64, sigma: f64) -> f64;
    fn da_dtau(&self, tau: f64, vs: f64, sigma: f64) -> f64;
}

/// The Legendre-expansion family with order parameter `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodCoefficients {
    m: usize,
    basis: PolynomialBasis,
}

impl MethodCoefficients {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder);
        }
        Ok(Self {
            m,
            basis: PolynomialBasis::new(m.max(crate::legendre::DEFAULT_MAX_DEGREE)),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn basis(&self) -> &PolynomialBasis {
        &self.basis
    }

    fn legendre(&self, x: f64) -> Vec<f64> {
        let mut p = vec![0.0; self.m];
        eval_all(x, &mut p);
        p
    }

    fn running_integrals(&self, tau: f64) -> Vec<f64> {
        let mut ip = vec![0.0; self.m];
        antiderivative_all(tau, &mut ip);
        ip
    }

    /// `B(ς, σ) = Σ_{j<m} P_j(ς) P_j(σ)`.
    pub fn coeff_b(&self, vs: f64, sigma: f64) -> f64 {
        let pv = self.legendre(vs);
        let ps = self.legendre(sigma);
        pv.iter().zip(&ps).map(|(a, b)| a * b).sum()
    }

    /// `Ã(τ, ς) = Σ_{i<m} P_i(ς) Ĩ_i(τ)`.
    pub fn coeff_a_tilde(&self, tau: f64, vs: f64) -> f64 {
        let pv = self.legendre(vs);
        let ip = self.running_integrals(tau);
        pv.iter().zip(&ip).map(|(a, b)| a * b).sum()
    }

    /// `A(τ, ς, σ)`, evaluated as the double sum.
    pub fn coeff_a(&self, tau: f64, vs: f64, sigma: f64) -> f64 {
        let pv = self.legendre(vs);
        let ps = self.legendre(sigma);
        let ip = self.running_integrals(tau);
        let mut total = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                total += pv[i] * pv[j] * ip[i] * ps[j];
            }
        }
        total
    }

    /// `∂A/∂τ = Σ_{i,j} P_i(ς) P_j(ς) P_i(τ) P_j(σ)`.
    pub fn coeff_da_dtau(&self, tau: f64, vs: f64, sigma: f64) -> f64 {
        let pv = self.legendre(vs);
        let ps = self.legendre(sigma);
        let pt = self.legendre(tau);
        let left: f64 = (0..self.m).map(|i| pv[i] * pt[i]).sum();
        let right: f64 = (0..self.m).map(|j| pv[j] * ps[j]).sum();
        left * right
    }
}

impl ContinuousCoefficients for MethodCoefficients {
    fn a(&self, tau: f64, vs: f64, sigma: f64) -> f64 {
        self.coeff_a(tau, vs, sigma)
    }

    fn b(&self, vs: f64, sigma: f64) -> f64 {
        self.coeff_b(vs, sigma)
    }

    fn da_dtau(&self, tau: f64, vs: f64, sigma: f64) -> f64 {
        self.coeff_da_dtau(tau, vs, sigma)
    }
}

/// Uniform sample points per axis, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    points: Vec<f64>,
}

impl SampleGrid {
    /// Default density: 11 points per axis.
    pub const DEFAULT_POINTS: usize = 11;

    pub fn uniform(points_per_axis: usize) -> Self {
        let n = points_per_axis.max(2);
        let points = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        Self { points }
    }

    pub fn from_points(points: Vec<f64>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .flat_map(move |&x| self.points.iter().map(move |&y| (x, y)))
    }

    fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.pairs()
            .flat_map(move |(x, y)| self.points.iter().map(move |&z| (x, y, z)))
    }
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self::uniform(Self::DEFAULT_POINTS)
    }
}

/// Energy-preservation condition residual: the sum of
/// `max |∂_τA(τ,ς,σ) − ∂_σA(σ,ς,τ)|`, `max |A(0,ς,σ)|` and
/// `max |A(1,ς,σ) − B(ς,σ)|` over the grid.
pub fn check_energy_condition<C: ContinuousCoefficients + ?Sized>(coeffs: &C, grid: &SampleGrid) -> f64 {
    let derivative = grid
        .triples()
        .map(|(t, v, s)| (coeffs.da_dtau(t, v, s) - coeffs.da_dtau(s, v, t)).abs())
        .fold(0.0, f64::max);
    let start = grid
        .pairs()
        .map(|(v, s)| coeffs.a(0.0, v, s).abs())
        .fold(0.0, f64::max);
    let end = grid
        .pairs()
        .map(|(v, s)| (coeffs.a(1.0, v, s) - coeffs.b(v, s)).abs())
        .fold(0.0, f64::max);
    derivative + start + end
}

/// Symmetry condition residual: `max |A(τ,ς,σ) + A(1−τ,1−ς,1−σ) − B(ς,σ)|`.
pub fn check_symmetry_condition<C: ContinuousCoefficients + ?Sized>(coeffs: &C, grid: &SampleGrid) -> f64 {
    grid.triples()
        .map(|(t, v, s)| (coeffs.a(t, v, s) + coeffs.a(1.0 - t, 1.0 - v, 1.0 - s) - coeffs.b(v, s)).abs())
        .fold(0.0, f64::max)
}

/// Residual of the continuous quadratic-Casimir condition
/// `B(ρ,τ)A(ρ,ς,σ) + B(ς,σ)A(ς,ρ,τ) − B(ρ,τ)B(ς,σ)` over the grid⁴.
pub fn casimir_condition_residual<C: ContinuousCoefficients + ?Sized>(coeffs: &C, grid: &SampleGrid) -> f64 {
    let mut worst = 0.0f64;
    for (rho, tau) in grid.pairs() {
        for (vs, sigma) in grid.pairs() {
            let b_rt = coeffs.b(rho, tau);
            let b_vs = coeffs.b(vs, sigma);
            let r = b_rt * coeffs.a(rho, vs, sigma) + b_vs * coeffs.a(vs, rho, tau) - b_rt * b_vs;
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// `max_{i,j} |Ã(c_i, c_j) + Ã(c_j, c_i) − 1|` over the rule's nodes.
pub fn check_casimir_condition_nodes(coeffs: &MethodCoefficients, rule: &QuadratureRule) -> f64 {
    let mut worst = 0.0f64;
    for &ci in rule.nodes() {
        for &cj in rule.nodes() {
            let r = coeffs.coeff_a_tilde(ci, cj) + coeffs.coeff_a_tilde(cj, ci) - 1.0;
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Largest orders for which the simplifying assumptions `B(ξ)`, `C(η)` and
/// `D(ζ)` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplifyingReport {
    pub xi_b: usize,
    pub eta_c: usize,
    pub zeta_d: usize,
}

/// Verifies the simplifying assumptions for the Legendre family of order `m`.
///
/// All integrands are polynomials of bounded degree, so a Gauss rule with
/// `2m + 4` points integrates them exactly. Each assumption is probed up to
/// two orders beyond the value the family is expected to reach.
pub fn check_simplifying_assumptions(coeffs: &MethodCoefficients) -> SimplifyingReport {
    let m = coeffs.m();
    let rule = QuadratureRule::gauss(2 * m + 4).expect("rule size within range");
    simplifying_assumptions_with(coeffs, &rule, 2 * m + 2, m + 2, m + 1)
}

/// As [`check_simplifying_assumptions`], for arbitrary coefficients, with an
/// explicit rule and search caps for `ξ`, `η`, `ζ`.
pub fn simplifying_assumptions_with<C: ContinuousCoefficients + ?Sized>(
    coeffs: &C,
    rule: &QuadratureRule,
    xi_cap: usize,
    eta_cap: usize,
    zeta_cap: usize,
) -> SimplifyingReport {
    let tau_samples = SampleGrid::uniform(11);
    let plane = SampleGrid::uniform(11);

    let xi_b = largest_order(xi_cap, |order| b_residual(coeffs, rule, order));
    let eta_c = largest_order(eta_cap, |order| c_residual(coeffs, rule, &tau_samples, order));
    let zeta_d = largest_order(zeta_cap, |order| d_residual(coeffs, rule, &plane, order));
    SimplifyingReport { xi_b, eta_c, zeta_d }
}

/// Largest `n ≤ cap` such that the residual at every order `1..=n` is within
/// tolerance (0 if order 1 already fails).
fn largest_order(cap: usize, mut residual_at: impl FnMut(usize) -> f64) -> usize {
    (1..=cap)
        .take_while(|&order| residual_at(order) <= SIMPLIFYING_TOL)
        .last()
        .unwrap_or(0)
}

/// `B(ξ)` at exactly `k + l = order`:
/// `∫∫ B(ρ,τ) τ^{k−1} ρ^l dρ dτ = 1/(k+l)`.
fn b_residual<C: ContinuousCoefficients + ?Sized>(coeffs: &C, rule: &QuadratureRule, order: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 1..=order {
        let l = order - k;
        let mut integral = 0.0;
        for (rho, wr) in rule.iter() {
            for (tau, wt) in rule.iter() {
                integral += wr * wt * coeffs.b(rho, tau) * tau.powi(k as i32 - 1) * rho.powi(l as i32);
            }
        }
        worst = worst.max((integral - 1.0 / order as f64).abs());
    }
    worst
}

/// `C(η)` at `k + l = order`, sampled in `τ`:
/// `∫∫ A(τ,ς,σ) σ^{k−1} ς^l dς dσ = τ^{k+l}/(k+l)`.
fn c_residual<C: ContinuousCoefficients + ?Sized>(
    coeffs: &C,
    rule: &QuadratureRule,
    taus: &SampleGrid,
    order: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for &tau in taus.points() {
        let expected = tau.powi(order as i32) / order as f64;
        for k in 1..=order {
            let l = order - k;
            let mut integral = 0.0;
            for (vs, wv) in rule.iter() {
                for (sigma, ws) in rule.iter() {
                    integral +=
                        wv * ws * coeffs.a(tau, vs, sigma) * sigma.powi(k as i32 - 1) * vs.powi(l as i32);
                }
            }
            worst = worst.max((integral - expected).abs());
        }
    }
    worst
}

/// `D(ζ)` at `k + l = order` (the condition depends on `k + l` only):
/// `∫∫ B(ρ,τ) τ^{k+l−1} A(τ,ς,σ) dρ dτ = B(ς,σ)(1 − ς^{k+l})/(k+l)`.
fn d_residual<C: ContinuousCoefficients + ?Sized>(
    coeffs: &C,
    rule: &QuadratureRule,
    plane: &SampleGrid,
    order: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for (vs, sigma) in plane.pairs() {
        let mut integral = 0.0;
        for (rho, wr) in rule.iter() {
            for (tau, wt) in rule.iter() {
                integral += wr * wt * coeffs.b(rho, tau) * tau.powi(order as i32 - 1) * coeffs.a(tau, vs, sigma);
            }
        }
        let expected = coeffs.b(vs, sigma) * (1.0 - vs.powi(order as i32)) / order as f64;
        worst = worst.max((integral - expected).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn b_examples() {
        let m1 = MethodCoefficients::new(1).unwrap();
        for (v, s) in [(0.0, 0.3), (0.7, 1.0), (0.2, 0.9)] {
            assert_abs_diff_eq!(m1.coeff_b(v, s), 1.0, epsilon = 1e-15);
        }
        let m2 = MethodCoefficients::new(2).unwrap();
        assert_abs_diff_eq!(m2.coeff_b(0.5, 0.5), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m2.coeff_b(0.0, 0.0), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn a_examples() {
        let m1 = MethodCoefficients::new(1).unwrap();
        for tau in [0.0, 0.2, 0.6, 1.0] {
            assert_abs_diff_eq!(m1.coeff_a(tau, 0.3, 0.8), tau, epsilon = 1e-15);
        }
        for m in 1..=4 {
            let c = MethodCoefficients::new(m).unwrap();
            assert_abs_diff_eq!(c.coeff_a(0.0, 0.4, 0.9), 0.0, epsilon = 1e-14);
        }
        let m2 = MethodCoefficients::new(2).unwrap();
        assert_abs_diff_eq!(m2.coeff_a(1.0, 0.2, 0.7), m2.coeff_b(0.2, 0.7), epsilon = 1e-14);
    }

    #[test]
    fn a_tilde_examples() {
        for m in 1..=4 {
            let c = MethodCoefficients::new(m).unwrap();
            for vs in [0.0, 0.33, 1.0] {
                assert_abs_diff_eq!(c.coeff_a_tilde(0.0, vs), 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(c.coeff_a_tilde(1.0, vs), 1.0, epsilon = 1e-14);
            }
        }
        let m2 = MethodCoefficients::new(2).unwrap();
        assert_abs_diff_eq!(m2.coeff_a_tilde(0.5, 0.25), 0.875, epsilon = 1e-15);
    }

    #[test]
    fn zero_order_rejected() {
        assert_eq!(MethodCoefficients::new(0), Err(Error::InvalidOrder));
    }

    #[test]
    fn simplifying_assumptions_small_m() {
        for m in 1..=3 {
            let report = check_simplifying_assumptions(&MethodCoefficients::new(m).unwrap());
            assert_eq!(
                report,
                SimplifyingReport {
                    xi_b: 2 * m,
                    eta_c: m,
                    zeta_d: m - 1
                },
                "m = {m}"
            );
        }
    }

    #[test]
    fn casimir_nodes() {
        let m2 = MethodCoefficients::new(2).unwrap();
        let gauss2 = QuadratureRule::gauss(2).unwrap();
        assert!(check_casimir_condition_nodes(&m2, &gauss2) <= 1e-13);

        let m1 = MethodCoefficients::new(1).unwrap();
        let gauss1 = QuadratureRule::gauss(1).unwrap();
        assert!(check_casimir_condition_nodes(&m1, &gauss1) <= 1e-13);

        let skewed = QuadratureRule::interpolatory(&[0.1, 0.3]).unwrap();
        assert!(check_casimir_condition_nodes(&m2, &skewed) > 1e-3);
    }

    #[test]
    fn largest_order_stops_at_first_failure() {
        assert_eq!(largest_order(5, |o| if o == 3 { 1.0 } else { 0.0 }), 2);
        assert_eq!(largest_order(5, |_| 1.0), 0);
        assert_eq!(largest_order(5, |_| 0.0), 5);
    }
}
