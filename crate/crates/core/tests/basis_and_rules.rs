use approx::assert_abs_diff_eq;
use enhanced_cs::legendre::PolynomialBasis;
use enhanced_cs::quadrature::QuadratureRule;
use proptest::prelude::*;

#[test]
fn legendre_orthonormal_under_gauss8() {
    let basis = PolynomialBasis::default();
    let rule = QuadratureRule::gauss(8).unwrap();
    for j in 0..=6 {
        for k in 0..=6 {
            let integral = rule.integrate_scalar(|x| basis.eval(j, x).unwrap() * basis.eval(k, x).unwrap());
            let expected = if j == k { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(integral, expected, epsilon = 1e-13);
        }
    }
}

#[test]
fn gauss_nodes_are_roots_of_legendre() {
    let basis = PolynomialBasis::default();
    for s in 1..=16 {
        let rule = QuadratureRule::gauss(s).unwrap();
        for &c in rule.nodes() {
            assert!(basis.eval(s, c).unwrap().abs() < 1e-12, "s = {s}, c = {c}");
        }
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn gauss_exact_to_degree_2s_minus_1() {
    for s in 1..=12 {
        let rule = QuadratureRule::gauss(s).unwrap();
        for k in 0..2 * s {
            let integral = rule.integrate_scalar(|x| x.powi(k as i32));
            assert_abs_diff_eq!(integral, 1.0 / (k as f64 + 1.0), epsilon = 1e-13);
        }
    }
}

#[test]
fn gauss_node_symmetry_up_to_32() {
    for s in 1..=32 {
        let rule = QuadratureRule::gauss(s).unwrap();
        let c = rule.nodes();
        for i in 0..s {
            assert_abs_diff_eq!(c[i] + c[s - 1 - i], 1.0, epsilon = 1e-13);
        }
    }
}

#[test]
fn interpolatory_weights_reproduce_gauss() {
    for s in 1..=12 {
        let gauss = QuadratureRule::gauss(s).unwrap();
        let rebuilt = QuadratureRule::interpolatory(gauss.nodes()).unwrap();
        for (a, b) in gauss.weights().iter().zip(rebuilt.weights()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }
}

proptest! {
    #[test]
    fn legendre_reflection(x in 0.0f64..=1.0, j in 0usize..=8) {
        let basis = PolynomialBasis::default();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = basis.eval(j, 1.0 - x).unwrap();
        let rhs = sign * basis.eval(j, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13);
    }

    #[test]
    fn antiderivative_is_running_integral(tau in 0.0f64..=1.0, j in 0usize..=6) {
        // Gauss with 6 points on [0, τ] is exact for P_j, j ≤ 11.
        let basis = PolynomialBasis::default();
        let rule = QuadratureRule::gauss(6).unwrap();
        let direct = tau * rule.integrate_scalar(|x| basis.eval(j, tau * x).unwrap());
        prop_assert!((direct - basis.antiderivative(j, tau).unwrap()).abs() <= 1e-13);
    }

    #[test]
    fn interpolatory_rules_integrate_their_degree(
        mut nodes in proptest::collection::vec(0.0f64..=1.0, 1..6)
    ) {
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        let rule = QuadratureRule::interpolatory(&nodes).unwrap();
        let total: f64 = rule.weights().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        for k in 0..nodes.len() {
            let integral = rule.integrate_scalar(|x| x.powi(k as i32));
            prop_assert!((integral - 1.0 / (k as f64 + 1.0)).abs() <= 1e-9);
        }
    }
}
