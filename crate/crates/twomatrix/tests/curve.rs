use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;
use twomatrix::curve::*;
use twomatrix::equilibrium::{solve_vector_equilibrium, EquilibriumOptions, EquilibriumSolution};
use twomatrix::potential::{ConstraintSigma, EvenPoly};

/// u = s² − t² for V = x²/2, τ = 1: the root of 3u² − 7u + 3 = 0 above 1.
fn u_exact() -> f64 {
    (7.0 + 13f64.sqrt()) / 6.0
}

/// α for V = x²/2, τ = 1 from the series of ξ(w) = w + (u − 1)/w on the
/// second sheet (coefficient of z^{−5/3}), k = u − 1.
const ALPHA_EXACT: f64 = 0.406_618_312_228_591_7;

fn solution() -> &'static EquilibriumSolution {
    static SOL: OnceLock<EquilibriumSolution> = OnceLock::new();
    SOL.get_or_init(|| {
        let v = EvenPoly::new(vec![0.0, 0.5]).unwrap();
        solve_vector_equilibrium(&v, 1.0, &EquilibriumOptions::default()).unwrap()
    })
}

fn spectral() -> &'static SpectralCurve<'static> {
    static CURVE: OnceLock<SpectralCurve<'static>> = OnceLock::new();
    CURVE.get_or_init(|| SpectralCurve::new(solution()).unwrap())
}

fn random_points(n: usize, scale: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::from_polar(scale * rng.gen_range(0.1..3.0), rng.gen_range(0.05..(PI / 2.0 - 0.05)) + (rng.gen_range(0..4) as f64) * PI / 2.0))
        .collect()
}

#[test]
fn st_equations_against_bisection() {
    let (s, t) = solve_st(2.0, 1.0).unwrap();
    let (sb, tb) = solve_st_bisection(2.0, 1.0).unwrap();
    assert!((s - sb).abs() < 1e-12 && (t - tb).abs() < 1e-12);
    assert!((2.0 * s - 2.0 * t * t / (3.0 * s) - 2.0).abs() < 1e-12);
    assert!((2.0 * t - 2.0 * s * s / (3.0 * t) + 1.0).abs() < 1e-12);
    assert!(s * s > 3.0 * t * t);
    // c → 0: t = s/√3 and a = 16s/9.
    let (s0, t0) = solve_st(1.0, 1e-9).unwrap();
    assert!((s0 - 9.0 / 16.0).abs() < 1e-8 && (t0 - 3.0 * 3f64.sqrt() / 16.0).abs() < 1e-8, "{s0} {t0}");
    // Homogeneity of degree one.
    let (sl, tl) = solve_st(7.0, 3.5).unwrap();
    assert!((sl - 3.5 * s).abs() < 1e-11 && (tl - 3.5 * t).abs() < 1e-11);
}

#[test]
fn sheet_maps_satisfy_vieta_and_asymptotics() {
    let curve = RationalCurve::new(2.0, 1.0).unwrap();
    for z in random_points(50, 2.0, 11) {
        let w = curve.sheet_maps(&EvalPoint::off_axis(z).unwrap()).unwrap();
        let (sum, prod) = vieta_residuals(&curve, z, &w);
        assert!(sum < 1e-10 && prod < 1e-10, "{z}: {sum} {prod}");
    }
    // Branch point z = a ↔ double root w = s.
    assert!((curve.z_of_w(Complex64::new(curve.s, 0.0)) - 2.0).norm() < 1e-12);
    assert!(curve.dz_dw(Complex64::new(curve.s, 0.0)).norm() < 1e-12);
    assert!(curve.sheet_maps(&EvalPoint::boundary(Complex64::new(2.0, 0.0), Side::Plus).unwrap()).is_err());
    let near = curve.sheet_maps(&EvalPoint::boundary(Complex64::new(2.0 + 1e-6, 0.0), Side::Plus).unwrap()).unwrap();
    assert!(near.iter().filter(|w| (*w - curve.s).norm() < 1e-2).count() == 2);
    // w₁(x) − x → 0 along the real axis.
    let big = curve.sheet_maps(&EvalPoint::boundary(Complex64::new(1e4, 0.0), Side::Plus).unwrap()).unwrap();
    assert!((big[0] - 1e4).norm() < 1e-3);
}

#[test]
fn outer_parametrix_model_problem() {
    let curve = RationalCurve::new(2.0, 1.0).unwrap();
    let par = build_outer_parametrix(&curve).unwrap();
    let rep = par.verify(50, 20, &[10.0, 20.0, 40.0], 3).unwrap();
    assert!(rep.det_error < 1e-8, "{rep:?}");
    assert!(rep.jump_error < 1e-8, "{rep:?}");
    let e: Vec<f64> = rep.asymptotic.iter().map(|p| p.1).collect();
    assert!(e[1] < e[0] && e[2] < e[1]);
    for (r, err) in &rep.asymptotic {
        assert!(r * err <= 1.1 * 10.0 * e[0], "{:?}", rep.asymptotic);
    }
}

#[test]
fn xi_agrees_with_the_rational_parametrization() {
    // For V = x²/2 the meromorphic function is ξ(w) = w + (u − 1)/w.
    let sc = spectral();
    let k = u_exact() - 1.0;
    for z in random_points(12, 1.5, 5) {
        let p = EvalPoint::off_axis(z).unwrap();
        let w = sc.sheet_maps(&p).unwrap();
        for j in 0..4 {
            let exact = w[j] + k / w[j];
            let num = sc.xi(j + 1, &p).unwrap();
            assert!((num - exact).norm() < 1e-6 * (1.0 + exact.norm()), "sheet {} at {z}: {num} vs {exact}", j + 1);
        }
    }
}

#[test]
fn sheet_sum_and_large_z() {
    let sc = spectral();
    for z in random_points(20, 2.0, 9) {
        let sum: Complex64 = (1..=4).map(|j| sc.xi_at(j, z).unwrap()).sum();
        assert!((sum - sc.sol.v.deriv_complex(z)).norm() < 1e-10);
    }
    let z = Complex64::from_polar(50.0, 0.3);
    let xi1 = sc.xi_at(1, z).unwrap();
    assert!((xi1 - (z - 1.0 / z)).norm() < 1e-4);
    // Cauchy transform of μ₁: 1/z leading term and Schwarz reflection.
    let f = cauchy_transform(&sc.sol.mu1, z).unwrap();
    assert!((f - 1.0 / z).norm() < 1e-4);
    let fc = cauchy_transform(&sc.sol.mu1, z.conj()).unwrap();
    assert!((fc - f.conj()).norm() < 1e-14);
    assert!(cauchy_transform(&sc.sol.mu1, Complex64::new(0.5, 0.0)).is_err());
}

#[test]
fn xi_is_continuous_across_the_first_support() {
    let sc = spectral();
    for k in 1..20 {
        let x = sc.sol.a * (-0.95 + 1.9 * k as f64 / 20.0);
        if x == 0.0 {
            continue;
        }
        let up = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Plus).unwrap();
        let dn = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Minus).unwrap();
        let d1 = (sc.xi(1, &up).unwrap() - sc.xi(2, &dn).unwrap()).norm();
        let d2 = (sc.xi(1, &dn).unwrap() - sc.xi(2, &up).unwrap()).norm();
        assert!(d1 < 1e-3 && d2 < 1e-3, "x = {x}: {d1} {d2}");
    }
}

#[test]
fn densities_from_xi_jumps() {
    let sc = spectral();
    let sol = sc.sol;
    for x in [0.1, 0.7, 1.5, 2.5] {
        let r = sc.density_from_xi(1, x).unwrap();
        assert!((r - sol.mu1.density_at(x)).abs() < 1e-6, "μ₁ at {x}: {r} vs {}", sol.mu1.density_at(x));
        assert!((sc.density_from_xi(1, -x).unwrap() - r).abs() < 1e-8);
    }
    let sigma = ConstraintSigma::new(1.0).unwrap();
    for y in [0.1, 0.3, 0.5] {
        let r = sc.density_from_xi(2, y).unwrap();
        assert!((r - sigma.density(y)).abs() < 1e-6, "window {y}: {r}");
    }
    for y in [0.8, 1.5, 4.0] {
        let r = sc.density_from_xi(2, y).unwrap();
        assert!((r - sol.mu2.density_at(y)).abs() < 1e-6, "μ₂ at {y}: {r} vs {}", sol.mu2.density_at(y));
    }
    for x in [0.2, 1.0, 3.0, 6.0] {
        let r = sc.density_from_xi(3, x).unwrap();
        assert!((r - sol.mu3.density_at(x)).abs() < 1e-6, "μ₃ at {x}: {r} vs {}", sol.mu3.density_at(x));
        assert!((sc.density_from_xi(3, -x).unwrap() - r).abs() < 1e-8);
    }
    assert!(sc.density_from_xi(1, 3.0).is_err());
}

#[test]
fn alpha_fits() {
    let est = spectral().alpha_estimate;
    assert!((est.alpha - ALPHA_EXACT).abs() < 1e-4 * ALPHA_EXACT, "{est:?}");
    assert!(est.consistent && est.discrepancy < 0.05, "{est:?}");
    assert!(est.alpha_imag.abs() < 1e-4 * est.alpha.abs(), "{est:?}");
}

#[test]
fn g_function_identities() {
    let sc = spectral();
    let sol = sc.sol;
    // g₁ − log z decays like |z|⁻² (the first correction is −m₂/(2z²)).
    let err = |r: f64| {
        let z = Complex64::from_polar(r, 0.7);
        (sc.g_function(1, &EvalPoint::off_axis(z).unwrap()).unwrap() - z.ln()).norm()
    };
    let (e100, e200) = (err(100.0), err(200.0));
    assert!(e100 < 1e-3, "{e100}");
    assert!((e100 / e200 - 4.0).abs() < 0.1, "{e100} {e200}");
    let k = sol.tau.powf(4.0 / 3.0);
    for x in [-2.0, -0.6, 0.4, 1.9] {
        let up = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Plus).unwrap();
        let dn = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Minus).unwrap();
        let lhs = sc.g_function(1, &up).unwrap() + sc.g_function(1, &dn).unwrap() - sc.g_function(2, &up).unwrap()
            - sol.v.eval(x)
            + 0.75 * k * x.abs().powf(4.0 / 3.0)
            + sol.ell;
        let want = if x > 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, -2.0 * PI / 3.0) };
        assert!((lhs - want).norm() < 1e-6, "x = {x}: {lhs}");
        // g₃ identity on ℝ.
        let lhs3 = sc.g_function(3, &up).unwrap() + sc.g_function(3, &dn).unwrap() - sc.g_function(2, &up).unwrap();
        assert!((lhs3 - want).norm() < 1e-6, "x = {x}: {lhs3}");
    }
    for y in [-3.0, -1.2, 0.9, 2.0] {
        let l = EvalPoint::boundary(Complex64::new(0.0, y), Side::Plus).unwrap();
        let r = EvalPoint::boundary(Complex64::new(0.0, y), Side::Minus).unwrap();
        let lhs = sc.g_function(2, &l).unwrap() + sc.g_function(2, &r).unwrap() - sc.g_function(1, &l).unwrap()
            - sc.g_function(3, &l).unwrap();
        let want = if y > 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, 4.0 * PI / 3.0) };
        assert!((lhs - want).norm() < 1e-6, "y = {y}: {lhs}");
    }
}

#[test]
fn phi_functions() {
    let sc = spectral();
    let a = sc.sol.a;
    let base = EvalPoint::boundary(Complex64::new(a, 0.0), Side::Plus).unwrap();
    assert!(sc.phi_function(1, &base).unwrap().norm() < 1e-14);
    for x in [0.5, 1.5, -1.0] {
        let p = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Plus).unwrap();
        let phi = sc.phi_function(1, &p).unwrap();
        assert!(phi.re.abs() < 1e-6, "Re φ₁₊({x}) = {}", phi.re);
        // φ₁₊(x) = −πi ∫_a^x dμ₁ = πi μ₁([x, a]).
        let mass = sc.sol.mu1.partial_mass(x, a);
        assert!((phi.im - PI * mass).abs() < 1e-6, "{phi} vs {}", PI * mass);
        // Re φ₁ > 0 just off the support.
        let off = sc.phi_function(1, &EvalPoint::off_axis(Complex64::new(x, 0.05)).unwrap()).unwrap();
        assert!(off.re > 0.0);
    }
    // Re φ₃ > 0 off ℝ near ℝ.
    for x in [0.5, 3.0, -2.0] {
        let phi3 = sc.phi_function(3, &EvalPoint::off_axis(Complex64::new(x, 0.05)).unwrap()).unwrap();
        assert!(phi3.re > 0.0, "Re φ₃ at {x} + 0.05i = {}", phi3.re);
    }
}
