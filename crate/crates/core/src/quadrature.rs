//! Interpolatory quadrature rules on `[0, 1]`.

use crate::error::{Error, Result};
use crate::legendre::{classical_with_previous, eval_all};

/// Largest Gauss rule that [`QuadratureRule::gauss`] will build.
pub const MAX_GAUSS_NODES: usize = 32;
/// Largest node count accepted by [`QuadratureRule::interpolatory`].
pub const MAX_INTERPOLATORY_NODES: usize = 12;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITERS: usize = 100;

/// Nodes `c_i` (strictly increasing, in `[0, 1]`) and weights `b_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// The `s`-point Gauss–Legendre rule mapped to `[0, 1]`.
    ///
    /// Nodes are the roots of `P_s`, found by Newton's method on the Legendre
    /// recurrence from Chebyshev-angle starting guesses. Only the left half is
    /// solved for; the right half is mirrored so that `c_i + c_{s+1−i} = 1`.
    pub fn gauss(s: usize) -> Result<Self> {
        if s == 0 || s > MAX_GAUSS_NODES {
            return Err(Error::RuleSize(s));
        }
        let mut nodes = vec![0.0; s];
        let mut weights = vec![0.0; s];
        let sf = s as f64;
        for i in 0..s.div_ceil(2) {
            // Roots on [-1, 1] in decreasing order; i-th largest.
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (sf + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..NEWTON_MAX_ITERS {
                let (value, prev) = classical_with_previous(s, t);
                derivative = sf * (t * value - prev) / (t * t - 1.0);
                let delta = value / derivative;
                t -= delta;
                if delta.abs() <= NEWTON_TOL {
                    let (value, prev) = classical_with_previous(s, t);
                    derivative = sf * (t * value - prev) / (t * t - 1.0);
                    break;
                }
            }
            let w = 1.0 / ((1.0 - t * t) * derivative * derivative);
            // Map t ∈ [-1, 1] to x = (1 + t)/2; weights scale by 1/2.
            let right = s - 1 - i;
            nodes[right] = 0.5 * (1.0 + t);
            nodes[i] = 0.5 * (1.0 - t);
            weights[right] = w;
            weights[i] = w;
        }
        if s % 2 == 1 {
            nodes[s / 2] = 0.5;
        }
        Ok(Self { nodes, weights })
    }

    /// Interpolatory rule on the given nodes: `b_i = ∫₀¹ ℓ_i(x) dx`.
    ///
    /// Weights solve the moment equations `Σ_i b_i P_k(c_i) = ∫₀¹ P_k = δ_{k0}`,
    /// `k < s`, in the shifted Legendre basis; this is equivalent to
    /// integrating the Lagrange cardinal polynomials and much better
    /// conditioned than monomial moments. Nodes are sorted; at most 12 are
    /// accepted.
    pub fn interpolatory(nodes: &[f64]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyRule);
        }
        if nodes.len() > MAX_INTERPOLATORY_NODES {
            return Err(Error::TooManyNodes(nodes.len()));
        }
        if let Some(&bad) = nodes.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::NodeOutOfRange(bad));
        }
        let mut sorted = nodes.to_vec();
        sorted.sort_by(f64::total_cmp);
        if let Some(pair) = sorted.windows(2).find(|w| (w[1] - w[0]).abs() <= 1e-12) {
            return Err(Error::DuplicateNodes(pair[0]));
        }

        let s = sorted.len();
        // V b = e_0 with V[k][i] = P_k(c_i).
        let mut matrix = vec![vec![0.0; s + 1]; s];
        let mut column = vec![0.0; s];
        for (i, &c) in sorted.iter().enumerate() {
            eval_all(c, &mut column);
            for (row, p) in matrix.iter_mut().zip(&column) {
                row[i] = *p;
            }
        }
        matrix[0][s] = 1.0;
        let weights = solve_dense(matrix);
        Ok(Self {
            nodes: sorted,
            weights,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ_i b_i f(c_i)`, componentwise.
    pub fn integrate<F>(&self, mut f: F) -> Vec<f64>
    where
        F: FnMut(f64) -> Vec<f64>,
    {
        let mut acc: Vec<f64> = Vec::new();
        for (c, b) in self.iter() {
            let value = f(c);
            if acc.is_empty() {
                acc = vec![0.0; value.len()];
            }
            for (a, v) in acc.iter_mut().zip(&value) {
                *a += b * v;
            }
        }
        acc
    }

    pub fn integrate_scalar<F>(&self, mut f: F) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        self.iter().map(|(c, b)| b * f(c)).sum()
    }
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)` matrix.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &q| a[r][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let factor = row[col] / pivot_row[col];
            if factor == 0.0 {
                continue;
            }
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][n] - tail) / a[row][row];
    }
    x
}
