//! Condition-checker suite over a list of orders.

use std::fmt;

use enhanced_cs::quadrature::QuadratureRule;
use enhanced_cs::tableau::{
    check_casimir_condition_nodes, check_energy_condition, check_simplifying_assumptions, check_symmetry_condition,
    MethodCoefficients, SampleGrid,
};

use crate::error::{HarnessError, Result};

/// Bound on the energy and symmetry residuals over the sampling grid.
pub const CONDITION_TOL: f64 = 1e-11;
/// Bound on the Casimir node identity at Gauss nodes.
pub const CASIMIR_NODE_TOL: f64 = 1e-13;
/// Nodes on which the Casimir node identity must visibly fail.
pub const NEGATIVE_CONTROL_NODES: [f64; 2] = [0.1, 0.3];

#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    pub m: usize,
    pub energy: f64,
    pub symmetry: f64,
    /// Achieved `(ξ, η, ζ)`.
    pub simplifying: (usize, usize, usize),
}

impl OrderReport {
    pub fn expected_simplifying(&self) -> (usize, usize, usize) {
        (2 * self.m, self.m, self.m - 1)
    }

    pub fn passed(&self) -> bool {
        self.energy <= CONDITION_TOL && self.symmetry <= CONDITION_TOL && self.simplifying == self.expected_simplifying()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeCheck {
    pub m: usize,
    pub nodes: Vec<f64>,
    pub residual: f64,
    /// `true` when the identity is supposed to fail on these nodes.
    pub expect_violation: bool,
}

impl NodeCheck {
    pub fn passed(&self) -> bool {
        if self.expect_violation {
            self.residual > CASIMIR_NODE_TOL
        } else {
            self.residual <= CASIMIR_NODE_TOL
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub orders: Vec<OrderReport>,
    pub node_checks: Vec<NodeCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.orders.iter().all(OrderReport::passed) && self.node_checks.iter().all(NodeCheck::passed)
    }

    /// `Ok` when every check passed, otherwise a condition failure naming them.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let mut failed: Vec<String> = self
            .orders
            .iter()
            .filter(|o| !o.passed())
            .map(|o| format!("m = {}", o.m))
            .collect();
        failed.extend(
            self.node_checks
                .iter()
                .filter(|c| !c.passed())
                .map(|c| format!("Casimir nodes {:?} (m = {})", c.nodes, c.m)),
        );
        Err(HarnessError::Conditions(failed.join("; ")))
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>3}  {:>10}  {:>10}  {:>14}  {:>14}  result", "m", "energy", "symmetry", "(xi,eta,zeta)", "expected")?;
        for o in &self.orders {
            let (x, e, z) = o.simplifying;
            let (ex, ee, ez) = o.expected_simplifying();
            writeln!(
                f,
                "{:>3}  {:>10.2e}  {:>10.2e}  {:>14}  {:>14}  {}",
                o.m,
                o.energy,
                o.symmetry,
                format!("({x},{e},{z})"),
                format!("({ex},{ee},{ez})"),
                verdict(o.passed())
            )?;
        }
        for c in &self.node_checks {
            let kind = if c.expect_violation { "expected violation" } else { "expected identity" };
            writeln!(
                f,
                "Casimir nodes m = {} at {:?}: residual {:.2e} ({kind}) {}",
                c.m,
                c.nodes,
                c.residual,
                verdict(c.passed())
            )?;
        }
        Ok(())
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Energy and symmetry residuals on the default 11-point grid and the
/// simplifying assumptions for each `m`. Also checks the Casimir node
/// identity on `m`-point Gauss nodes, plus the skewed-node control at `m = 2`.
pub fn verify_conditions(m_list: &[usize]) -> Result<VerifyReport> {
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(HarnessError::Usage("orders must be a non-empty list of positive integers".into()));
    }
    let grid = SampleGrid::default();
    let mut orders = Vec::with_capacity(m_list.len());
    let mut node_checks = Vec::with_capacity(m_list.len() + 1);
    for &m in m_list {
        let coeffs = MethodCoefficients::new(m)?;
        let report = check_simplifying_assumptions(&coeffs);
        orders.push(OrderReport {
            m,
            energy: check_energy_condition(&coeffs, &grid),
            symmetry: check_symmetry_condition(&coeffs, &grid),
            simplifying: (report.xi_b, report.eta_c, report.zeta_d),
        });
        let rule = QuadratureRule::gauss(m)?;
        node_checks.push(NodeCheck {
            m,
            nodes: rule.nodes().to_vec(),
            residual: check_casimir_condition_nodes(&coeffs, &rule),
            expect_violation: false,
        });
    }
    let coeffs = MethodCoefficients::new(2)?;
    let skewed = QuadratureRule::interpolatory(&NEGATIVE_CONTROL_NODES)?;
    node_checks.push(NodeCheck {
        m: 2,
        nodes: NEGATIVE_CONTROL_NODES.to_vec(),
        residual: check_casimir_condition_nodes(&coeffs, &skewed),
        expect_violation: true,
    });
    Ok(VerifyReport { orders, node_checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_three_orders_pass() {
        let report = verify_conditions(&[1, 2, 3]).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.orders[1].simplifying, (4, 2, 1));
        let control = report.node_checks.last().unwrap();
        assert!(control.expect_violation && control.residual > 1e-3);
    }

    #[test]
    fn failing_check_maps_to_condition_error() {
        let mut report = verify_conditions(&[1]).unwrap();
        report.orders[0].simplifying = (1, 1, 0);
        let err = report.into_result().unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn empty_order_list_is_usage_error() {
        assert_eq!(verify_conditions(&[]).unwrap_err().exit_code(), 1);
        assert_eq!(verify_conditions(&[0]).unwrap_err().exit_code(), 1);
    }
}
