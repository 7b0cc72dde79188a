use approx::assert_abs_diff_eq;
use enhanced_cs::integrator::*;
use enhanced_cs::oracle::{explicit_euler_step, rk4_reference};
use enhanced_cs::quadrature::QuadratureRule;
use enhanced_cs::systems::*;
use enhanced_cs::Error;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Rotation `(aI + bS)² / (a² + b²)` for `S = [[0,1],[−1,0]]`: the closed form
/// of `(aI − bS)⁻¹(aI + bS)`, using `S² = −I`.
fn rotation_step(y: &[f64], a: f64, b: f64) -> Vec<f64> {
    let apply = |v: &[f64]| vec![a * v[0] + b * v[1], a * v[1] - b * v[0]];
    let twice = apply(&apply(y));
    let scale = a * a + b * b;
    vec![twice[0] / scale, twice[1] / scale]
}

#[test]
fn energy_exact_per_step_on_euler() {
    let sys = euler_rigid_body();
    for m in [1, 2] {
        let spec = MethodSpec::gauss(m, 2).unwrap();
        let mut y = sys.initial_state().to_vec();
        for _ in 0..50 {
            let h0 = sys.hamiltonian(&y).unwrap();
            let (y1, _) = step_enhanced_cs(&sys, &spec, &y, 0.1).unwrap();
            assert!((sys.hamiltonian(&y1).unwrap() - h0).abs() <= 1e-12);
            y = y1;
        }
    }
}

#[test]
fn first_step_examples() {
    let sys = euler_rigid_body();
    let y0 = sys.initial_state();
    let h0 = sys.hamiltonian(y0).unwrap();
    let (y1, stage) = step_enhanced_cs(&sys, &MethodSpec::gauss(1, 2).unwrap(), y0, 0.1).unwrap();
    assert!(stage.converged);
    assert!((sys.hamiltonian(&y1).unwrap() - h0).abs() <= 1e-13);

    let baseline = step_cohen_hairer(&sys, &QuadratureRule::gauss(2).unwrap(), y0, 0.1).unwrap();
    assert!((sys.hamiltonian(&baseline).unwrap() - h0).abs() <= 1e-13);
}

#[test]
fn varsigma_rule_does_not_affect_energy() {
    let sys = euler_rigid_body();
    let sigma = QuadratureRule::gauss(2).unwrap();
    let coarse = MethodSpec::new(2, sigma.clone(), QuadratureRule::gauss(1).unwrap()).unwrap();
    let fine = MethodSpec::new(2, sigma, QuadratureRule::gauss(6).unwrap()).unwrap();
    let y0 = [0.3, 0.8, -0.5];
    let h0 = sys.hamiltonian(&y0).unwrap();
    let (a, _) = step_enhanced_cs(&sys, &coarse, &y0, 0.1).unwrap();
    let (b, _) = step_enhanced_cs(&sys, &fine, &y0, 0.1).unwrap();
    assert!(max_diff(&a, &b) > 1e-8, "rules should change the step");
    assert!((sys.hamiltonian(&a).unwrap() - h0).abs() <= 1e-12);
    assert!((sys.hamiltonian(&b).unwrap() - h0).abs() <= 1e-12);
}

#[test]
fn consistency_with_the_vector_field() {
    let sys = lotka_volterra_3d();
    let spec = MethodSpec::gauss(2, 3).unwrap();
    let y0 = sys.initial_state();
    let f = sys.vector_field(y0).unwrap();
    let defect = |h: f64| {
        let (y1, _) = step_enhanced_cs(&sys, &spec, y0, h).unwrap();
        let euler: Vec<f64> = y0.iter().zip(&f).map(|(y, f)| y + h * f).collect();
        max_diff(&y1, &euler)
    };
    let ratio = defect(1e-2) / defect(5e-3);
    assert!((3.5..4.5).contains(&ratio), "O(h²) defect expected, ratio {ratio}");
}

#[test]
fn constant_structure_reduces_to_avf_and_collocation() {
    let sys = canonical_oscillator();
    let h = 0.1;

    // m = 1: average vector field = implicit midpoint for quadratic H (Cayley).
    let spec1 = MethodSpec::gauss(1, 2).unwrap();
    // m = 2: order-4 energy-preserving collocation, the (2,2) Padé map for linear flows.
    let spec2 = MethodSpec::gauss(2, 2).unwrap();
    let mut y = sys.initial_state().to_vec();
    for _ in 0..100 {
        let (enhanced, _) = step_enhanced_cs(&sys, &spec1, &y, h).unwrap();
        let baseline = step_cohen_hairer(&sys, spec1.sigma_rule(), &y, h).unwrap();
        let avf = rotation_step(&y, 1.0, 0.5 * h);
        assert!(max_diff(&enhanced, &avf) <= 1e-13);
        assert!(max_diff(&enhanced, &baseline) <= 1e-13);

        let (order4, _) = step_enhanced_cs(&sys, &spec2, &y, h).unwrap();
        let pade = rotation_step(&y, 1.0 - h * h / 12.0, 0.5 * h);
        assert!(max_diff(&order4, &pade) <= 1e-13);
        y = enhanced;
    }
}

#[test]
fn cohen_hairer_matches_m1_for_constant_structure_lv_like() {
    // Constant skew S with a non-quadratic H.
    let sys = PoissonSystem::new(
        "constant-s",
        vec![0.4, -0.3, 0.9],
        |_| Matrix::from_rows(&[[0.0, 1.0, -0.5], [-1.0, 0.0, 2.0], [0.5, -2.0, 0.0]]),
        |y| y[0].powi(4) / 4.0 + y[1].cosh() + y[2] * y[2] * y[0],
        |y| vec![y[0].powi(3) + y[2] * y[2], y[1].sinh(), 2.0 * y[2] * y[0]],
    );
    let rule = QuadratureRule::gauss(3).unwrap();
    let spec = MethodSpec::new(1, rule.clone(), QuadratureRule::gauss(2).unwrap()).unwrap();
    let y0 = sys.initial_state();
    let (a, _) = step_enhanced_cs(&sys, &spec, y0, 0.05).unwrap();
    let b = step_cohen_hairer(&sys, &rule, y0, 0.05).unwrap();
    assert!(max_diff(&a, &b) <= 1e-13);
}

#[test]
fn symmetric_round_trips() {
    let sys = euler_rigid_body();
    let y0 = sys.initial_state();
    for m in [1, 2] {
        let spec = MethodSpec::gauss(m, 2).unwrap();
        let residual = adjoint_roundtrip(&sys, &spec, y0, 0.1).unwrap();
        assert!(residual <= 10.0 * spec.solver_tol(), "m = {m}: {residual:e}");
    }
    let rule = QuadratureRule::gauss(2).unwrap();
    let forward = step_cohen_hairer(&sys, &rule, y0, 0.1).unwrap();
    let back = step_cohen_hairer(&sys, &rule, &forward, -0.1).unwrap();
    assert!(max_diff(&back, y0) <= 1e-13);

    let lv3 = lotka_volterra_3d();
    let residual = adjoint_roundtrip(&lv3, &MethodSpec::gauss(2, 6).unwrap(), lv3.initial_state(), 0.05).unwrap();
    assert!(residual <= 1e-12);

    let forward = explicit_euler_step(&sys, y0, 0.1).unwrap();
    let back = explicit_euler_step(&sys, &forward, -0.1).unwrap();
    assert!(max_diff(&back, y0) > 1e-4);
}

#[test]
fn quadratic_casimir_preserved_with_gauss_nodes() {
    let sys = euler_rigid_body();
    for m in 1..=3 {
        for s in [m - 1, m].into_iter().filter(|&s| s >= 1) {
            // The σ-rule must keep m nodes; only the ς-rule is varied here.
            let spec = MethodSpec::new(m, QuadratureRule::gauss(m.max(2)).unwrap(), QuadratureRule::gauss(s).unwrap())
                .unwrap();
            let mut y = sys.initial_state().to_vec();
            for _ in 0..20 {
                let c0 = sys.casimir(0, &y).unwrap();
                let (y1, _) = step_enhanced_cs(&sys, &spec, &y, 0.1).unwrap();
                assert!((sys.casimir(0, &y1).unwrap() - c0).abs() <= 1e-12, "m = {m}, s = {s}");
                y = y1;
            }
        }
    }
}

#[test]
fn observed_convergence_orders_on_euler() {
    let sys = euler_rigid_body();
    let reference = reference_solution_euler();
    let cases = [
        (Method::Enhanced, 1, 1.8..=2.2),
        (Method::Enhanced, 2, 3.8..=4.2),
        (Method::CohenHairer, 1, 1.8..=2.2),
    ];
    for (method, m, window) in cases {
        let spec = MethodSpec::gauss(m, 2).unwrap();
        let errors: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&h| {
                let n = (1.0f64 / h).round() as usize;
                let run = integrate(&sys, method, &spec, sys.initial_state(), h, n, Some(&reference)).unwrap();
                run.final_global_error().unwrap()
            })
            .collect();
        for pair in errors.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!(window.contains(&order), "{method:?} m = {m}: order {order}");
        }
    }
}

#[test]
fn order_four_against_rk4_oracle() {
    let sys = euler_rigid_body();
    let spec = MethodSpec::gauss(2, 2).unwrap();
    let exact = rk4_reference(&sys, sys.initial_state(), 1.0).unwrap();
    let err = |h: f64| {
        let n = (1.0f64 / h).round() as usize;
        let run = integrate(&sys, Method::Enhanced, &spec, sys.initial_state(), h, n, None).unwrap();
        max_diff(run.states.last().unwrap(), &exact)
    };
    let (coarse, fine) = (err(0.1), err(0.05));
    // Richardson constant from the two runs bounds the coarse error.
    let c = (coarse - fine) / (0.1f64.powi(4) - 0.05f64.powi(4));
    assert!(coarse <= 1.1 * c * 0.1f64.powi(4));
    assert!((12.0..=20.0).contains(&(coarse / fine)));
}

#[test]
fn run_record_shapes_and_first_row() {
    let sys = lotka_volterra_3d();
    let spec = MethodSpec::gauss(2, 6).unwrap();
    let run = integrate(&sys, Method::Enhanced, &spec, sys.initial_state(), 0.01, 25, None).unwrap();
    assert_eq!(run.len(), 26);
    assert_eq!(run.states.len(), 26);
    assert_eq!(run.energy_error.len(), 26);
    assert_eq!(run.casimir_errors[0].0, "logarithmic");
    assert_eq!(run.casimir_errors[0].1.len(), 26);
    assert_eq!(run.iterations[0], 0);
    assert!(run.global_error.is_none());
    assert_eq!(run.energy_error[0], 0.0);
    assert_abs_diff_eq!(run.times[25], 0.25, epsilon = 1e-15);
    assert!(run.mean_iterations() >= 1.0);
}

#[test]
fn long_run_invariants_on_euler() {
    let sys = euler_rigid_body();
    let reference = reference_solution_euler();
    for m in [1, 2] {
        let spec = MethodSpec::gauss(m, 2).unwrap();
        let run = integrate(&sys, Method::Enhanced, &spec, sys.initial_state(), 0.1, 10_000, Some(&reference)).unwrap();
        assert!(run.max_energy_error() <= 1e-10);
        assert!(run.max_casimir_error(0) <= 1e-10);

        // Linear growth of the global-error envelope over [0, 1000].
        let mut envelope = Vec::with_capacity(run.len());
        let mut worst = 0.0f64;
        for e in run.global_error.as_ref().unwrap() {
            worst = worst.max(*e);
            envelope.push(worst);
        }
        let (slope, r2) = linear_fit(&run.times, &envelope);
        assert!(slope > 0.0 && r2 >= 0.9, "m = {m}: slope {slope:e}, R² {r2}");
    }
}

#[test]
fn lv3_casimir_drifts_linearly() {
    let sys = lotka_volterra_3d();
    let spec = MethodSpec::gauss(2, 6).unwrap();
    let run = integrate(&sys, Method::Enhanced, &spec, sys.initial_state(), 0.01, 10_000, None).unwrap();
    assert!(run.max_energy_error() <= 1e-9);
    let (slope, r2) = linear_fit(&run.times, &run.casimir_errors[0].1);
    assert!(slope.abs() > 0.0 && r2 >= 0.9, "slope {slope:e}, R² {r2}");
}

#[test]
fn step_errors_surface_through_integrate() {
    let sys = lotka_volterra_2d();
    let spec = MethodSpec::gauss(1, 4).unwrap();
    let err = integrate(&sys, Method::Enhanced, &spec, &[1.0, 1.0], 4.0, 10, None).unwrap_err();
    match err {
        Error::StepFailed { step, source } => {
            assert!(step >= 1);
            assert!(matches!(*source, Error::Domain { .. } | Error::NoConvergence { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        integrate(&sys, Method::Enhanced, &spec, &[-1.0, 1.0], 0.01, 10, None),
        Err(Error::Domain { .. })
    ));
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}
