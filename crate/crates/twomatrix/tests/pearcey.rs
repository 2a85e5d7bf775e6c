use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use twomatrix::pearcey::*;
use twomatrix::potential::EvenPoly;

const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;
const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_6;

fn random_z(count: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Complex64::from_polar(rng.gen_range(0.0..radius), rng.gen_range(-PI..PI))).collect()
}

/// Trapezoid on [−L, L] of e^{−n(y⁴/4 − τxy)} y^m: the integrand is entire
/// and decays like e^{−ny⁴/4}, so the rule converges geometrically.
fn direct_moment(n: usize, tau: f64, x: f64, m: i32) -> f64 {
    let nf = n as f64;
    let (l, cells) = (12.0, 24000);
    let h = 2.0 * l / cells as f64;
    (0..=cells)
        .map(|i| {
            let y = -l + i as f64 * h;
            y.powi(m) * (-nf * (y.powi(4) / 4.0 - tau * x * y)).exp()
        })
        .sum::<f64>()
        * h
}

#[test]
fn p0_at_origin() {
    let ev = PearceyEvaluator::default();
    let v = ev.pearcey(0, Complex64::new(0.0, 0.0), 0).unwrap();
    assert!((v - GAMMA_QUARTER / 2f64.sqrt()).norm() < 1e-10 * v.norm());
}

#[test]
fn linear_relation_between_contours() {
    let ev = PearceyEvaluator::default();
    for z in random_z(20, 4.0, 1) {
        let p5 = ev.pearcey(5, z, 0).unwrap();
        let rhs = ev.pearcey(4, z, 0).unwrap() - ev.pearcey(1, z, 0).unwrap();
        assert!((p5 - rhs).norm() <= 1e-10 * p5.norm().max(rhs.norm()), "z = {z}: {p5} vs {rhs}");
    }
}

#[test]
fn all_six_solve_the_third_order_equation() {
    let ev = PearceyEvaluator::default();
    let h = 1e-3;
    for j in 0..6 {
        for z in random_z(4, 2.5, 10 + j as u64) {
            let d2 = |w: Complex64| ev.pearcey(j, w, 2).unwrap();
            let d3 = (d2(z - 2.0 * h) - d2(z + 2.0 * h) + (d2(z + h) - d2(z - h)) * 8.0) / (12.0 * h);
            let p = ev.pearcey(j, z, 0).unwrap();
            let res = (d3 - z * p).norm() / (z * p).norm().max(d3.norm()).max(1e-300);
            assert!(res <= 1e-6, "p_{j} at {z}: residual {res}");
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let ev = PearceyEvaluator::default();
    let z = Complex64::new(0.8, -0.6);
    let h = 1e-4;
    let f = |w: Complex64| ev.pearcey(2, w, 0).unwrap();
    let fd = (f(z + h) - f(z - h)) / (2.0 * h);
    let d1 = ev.pearcey(2, z, 1).unwrap();
    assert!((fd - d1).norm() < 1e-7 * d1.norm());
}

#[test]
fn steepest_descent_asymptotics() {
    let ev = PearceyEvaluator::default();
    for theta in [0.0, 0.3, PI, -2.9] {
        let rep = pearcey_asymptotic_check(&ev, &[10.0, 20.0, 40.0], theta).unwrap();
        assert!(rep.errors[1] < rep.errors[0] && rep.errors[2] < rep.errors[1], "{rep:?}");
        assert!((rep.slope + 4.0 / 3.0).abs() <= 0.2, "{rep:?}");
    }
}

#[test]
fn domain_errors() {
    let ev = PearceyEvaluator::default();
    assert!(ev.pearcey(6, Complex64::new(0.0, 0.0), 0).is_err());
    assert!(ev.pearcey(0, Complex64::new(0.0, 0.0), 3).is_err());
    assert!(ev.pearcey(0, Complex64::new(60.0, 0.0), 0).is_err());
    assert!(WeightSystem::new(4, 1.0, EvenPoly::new(vec![0.0, 0.5]).unwrap()).is_err());
}

#[test]
fn weights_origin_parity_and_direct_quadrature() {
    let v = EvenPoly::new(vec![0.3, 0.5, 0.1]).unwrap();
    for (n, tau) in [(3, 1.0), (6, 0.8), (12, 1.3)] {
        let ws = WeightSystem::new(n, tau, v.clone()).unwrap();
        let nf = n as f64;
        let w0 = ws.weight_w(0, 0.0).unwrap();
        let want = nf.powf(-0.25) * (-nf * v.eval(0.0)).exp() * GAMMA_QUARTER / 2f64.sqrt();
        assert!((w0 - want).abs() < 1e-12 * want);
        for x in [0.3, 1.0, 1.7] {
            for j in 0..3u32 {
                let (a, b) = (ws.weight_w(j, x).unwrap(), ws.weight_w(j, -x).unwrap());
                let sign = if j == 1 { -1.0 } else { 1.0 };
                assert!((b - sign * a).abs() <= 1e-13 * a.abs(), "j={j} x={x}");
            }
        }
        for x in [0.3, 1.0] {
            for j in 0..3 {
                let direct = (-nf * v.eval(x)).exp() * direct_moment(n, tau, x, j);
                let w = ws.weight_w(j as u32, x).unwrap();
                assert!((w - direct).abs() <= 1e-9 * direct.abs(), "n={n} j={j} x={x}: {w} vs {direct}");
            }
        }
    }
}

#[test]
fn moment_function_identities() {
    let ws = WeightSystem::new(6, 1.2, EvenPoly::new(vec![0.0, 0.5]).unwrap()).unwrap();
    let i = ws.moment_functions(0.0, 4).unwrap();
    assert!(i[1].abs() < 1e-15);
    let want = (4.0f64 / 6.0).powf(0.75) * GAMMA_THREE_QUARTERS / 2.0;
    assert!((i[2] - want).abs() < 1e-13 * want);
    for x in [-0.9, 0.5, 1.4] {
        let i = ws.moment_functions(x, 3).unwrap();
        assert!((i[3] - 1.2 * x * i[0]).abs() < 1e-13 * i[3].abs());
    }
}

#[test]
fn recurrence_agrees_with_quadrature_up_to_m40() {
    let ws = WeightSystem::new(12, 1.0, EvenPoly::new(vec![0.0, 0.5]).unwrap()).unwrap();
    for x in [0.2, 0.9, 1.6] {
        let rec = ws.moment_functions(x, 40).unwrap();
        for m in [0, 5, 12, 25, 40] {
            let direct = direct_moment(12, 1.0, x, m);
            assert!((rec[m as usize] - direct).abs() <= 1e-6 * direct.abs(), "x={x} m={m}: {} vs {direct}", rec[m as usize]);
        }
    }
}
