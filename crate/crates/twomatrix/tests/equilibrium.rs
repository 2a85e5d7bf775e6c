use std::f64::consts::PI;
use std::sync::OnceLock;
use twomatrix::equilibrium::*;
use twomatrix::potential::{energy_functional, ConstraintSigma, EvenPoly};

/// Closed-form support data for V = x²/2, τ = 1 from the genus-zero
/// parametrization z = w + u/w + u(u − 1)/(3w³) with 3u² − 7u + 3 = 0.
fn closed_form() -> (f64, f64, f64) {
    let u = (7.0 + 13f64.sqrt()) / 6.0;
    let s2 = 0.5 * (u + (5.0 * u * u - 4.0 * u).sqrt());
    let t2 = s2 - u;
    let (s, t) = (s2.sqrt(), t2.sqrt());
    let a = 2.0 * s - 2.0 * t2 / (3.0 * s);
    let c = 2.0 * s2 / (3.0 * t) - 2.0 * t;
    // ρ₁(0) = |Im ξ(w)|/π at the root w = iβ of w⁴ + uw² + u(u − 1)/3 with |β| > 1.
    let beta = (0.5 * (u + (u * u - 4.0 * u * (u - 1.0) / 3.0).sqrt())).sqrt();
    let rho0 = (beta - (u - 1.0) / beta) / PI;
    (a, c, rho0)
}

fn solution() -> &'static EquilibriumSolution {
    static SOL: OnceLock<EquilibriumSolution> = OnceLock::new();
    SOL.get_or_init(|| {
        let v = EvenPoly::new(vec![0.0, 0.5]).unwrap();
        solve_vector_equilibrium(&v, 1.0, &EquilibriumOptions::default()).unwrap()
    })
}

#[test]
fn chebyshev_field_solver_agrees_with_projected_gradient() {
    // Field x⁴/4 + x²/2: compare the two independent solvers.
    let cheb = solve_field_equilibrium(|x| x * x * x + x, 1.0, None, &FieldOptions::default()).unwrap();
    let pg = projected_gradient_equilibrium(|x| x.powi(4) / 4.0 + x * x / 2.0, 1.0, 2.5, 250, 4000);
    assert!((pg.endpoint - cheb.a).abs() < 0.02 * cheb.a, "pg {} vs chebyshev {}", pg.endpoint, cheb.a);
    let h = pg.centers[1] - pg.centers[0];
    let mid = pg.centers.len() / 2;
    let pg_density = 0.5 * (pg.masses[mid - 1] + pg.masses[mid]) / h;
    assert!((pg_density - cheb.density(0.0)).abs() < 0.02 * cheb.density(0.0));
    // Semicircle check of the spectral solver: field x² has support [−√2, √2].
    let semi = solve_field_equilibrium(|x| 2.0 * x, 1.0, None, &FieldOptions::default()).unwrap();
    assert!((semi.a - 2f64.sqrt()).abs() < 1e-12);
    assert!((semi.measure.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn stronger_field_shrinks_the_support() {
    let one = solve_field_equilibrium(|x| x * x * x, 1.0, None, &FieldOptions::default()).unwrap();
    let two = solve_field_equilibrium(|x| 2.0 * x * x * x, 1.0, None, &FieldOptions::default()).unwrap();
    assert!(two.a < one.a);
    // Quartic homogeneity: a scales as (field strength)^{−1/4}.
    assert!((two.a / one.a - 2f64.powf(-0.25)).abs() < 1e-10);
}

#[test]
fn one_cut_convexity_test() {
    assert!(check_one_cut_convexity(&EvenPoly::new(vec![0.0, 1.0, 1.0]).unwrap()));
    assert!(check_one_cut_convexity(&EvenPoly::new(vec![0.0, 0.5]).unwrap()));
    // x ↦ x³ − 5x has second derivative 6x > 0.
    assert!(check_one_cut_convexity(&EvenPoly::new(vec![0.0, -5.0, 0.0, 1.0]).unwrap()));
    // x ↦ x³ − 3x² is concave on (0, 1).
    assert!(!check_one_cut_convexity(&EvenPoly::new(vec![0.0, 0.0, -3.0, 1.0]).unwrap()));
}

#[test]
fn quadratic_potential_matches_closed_form() {
    let sol = solution();
    let (a, c, rho0) = closed_form();
    assert!((sol.a - a).abs() < 1e-8, "a = {} vs {a}", sol.a);
    assert!((sol.c - c).abs() < 1e-8, "c = {} vs {c}", sol.c);
    assert!((sol.field.density(0.0) - rho0).abs() < 1e-8);
}

#[test]
fn masses_and_variational_residuals() {
    let sol = solution();
    for (m, want) in [(&sol.mu1, 1.0), (&sol.mu2, 2.0 / 3.0), (&sol.mu3, 1.0 / 3.0)] {
        assert!((m.total_mass() - want).abs() < 1e-6, "mass {} vs {want}", m.total_mass());
    }
    let r = sol.residual_report;
    assert!(r.max_residual() <= 1e-4, "{r:?}");
    assert!(r.ineq2_margin > 0.0);
    assert!(sol.one_cut_regular);
    assert_eq!(classify_regularity(sol), Regularity::OneCutRegular);
}

#[test]
fn second_measure_saturates_the_constraint_on_the_window() {
    let sol = solution();
    let sigma = ConstraintSigma::new(1.0).unwrap();
    let mut inside = 0;
    for i in 0..sol.mu2.len() {
        let y = sol.mu2.nodes[i];
        if y.abs() < sol.c {
            inside += 1;
            assert!((sol.mu2.density[i] - sigma.density(y)).abs() <= 1e-14 * sigma.density(y).max(1e-300));
        } else {
            assert!(sol.mu2.density[i] <= sigma.density(y));
        }
    }
    assert!(inside > 20);
}

#[test]
fn square_root_edges() {
    let (ea, ec) = edge_exponents(solution());
    assert!((0.45..=0.55).contains(&ea), "exponent at a: {ea}");
    assert!((0.45..=0.55).contains(&ec), "exponent at ic: {ec}");
}

#[test]
fn energy_decreases_and_saturation_sequence_is_monotone() {
    let sol = solution();
    assert!(sol.energy_trace.len() >= 2);
    assert!(sol.energy_trace.windows(2).all(|w| w[1] < w[0]));
    assert!(sol.c_trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    let e = energy_functional(&sol.mu1, &sol.mu2, &sol.mu3, &sol.v, sol.tau).unwrap();
    assert!((e.direct - e.rewritten).abs() < 1e-8 * e.direct.abs().max(1.0));
}
