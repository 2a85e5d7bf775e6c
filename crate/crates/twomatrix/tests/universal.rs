use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use twomatrix::universal::*;

const AI0: f64 = 0.355_028_053_887_817_2; // 3^{−2/3}/Γ(2/3)
const AIP0: f64 = -0.258_819_403_792_806_8; // −3^{−1/3}/Γ(1/3)

/// Classical RK4 for y″ = s·y from (s0, y, y′) to s1.
fn rk4(s0: f64, y: f64, dy: f64, s1: f64, steps: usize) -> (f64, f64) {
    let h = (s1 - s0) / steps as f64;
    let f = |s: f64, y: f64, dy: f64| (dy, s * y);
    let (mut s, mut y, mut dy) = (s0, y, dy);
    for _ in 0..steps {
        let k1 = f(s, y, dy);
        let k2 = f(s + h / 2.0, y + h / 2.0 * k1.0, dy + h / 2.0 * k1.1);
        let k3 = f(s + h / 2.0, y + h / 2.0 * k2.0, dy + h / 2.0 * k2.1);
        let k4 = f(s + h, y + h * k3.0, dy + h * k3.1);
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        dy += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        s += h;
    }
    (y, dy)
}

fn random_s(count: usize, r: (f64, f64), seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Complex64::from_polar(rng.gen_range(r.0..r.1), rng.gen_range(-PI..PI))).collect()
}

#[test]
fn airy_at_zero_and_against_the_ode() {
    let (a, d) = airy(0.0);
    assert!((a - AI0).abs() < 1e-15 && (d - AIP0).abs() < 1e-15);
    // Oscillatory side: integrate forward from 0 (stable).
    let (y, dy) = rk4(0.0, AI0, AIP0, -5.0, 20000);
    let (a, d) = airy(-5.0);
    assert!((y - a).abs() < 1e-10 && (dy - d).abs() < 1e-10, "{y} {a}");
    // Decaying side: integrate from 5 back to 0, where Ai is the growing solution.
    let (a5, d5) = airy(5.0);
    let (y, dy) = rk4(5.0, a5, d5, 0.0, 20000);
    assert!((y - AI0).abs() < 1e-10 && (dy - AIP0).abs() < 1e-10, "{y} {dy}");
}

#[test]
fn kernel_symmetry_and_positivity() {
    for (u, v) in [(0.1, 0.7), (-1.5, 2.0), (-3.0, -0.2)] {
        assert_eq!(sine_kernel(u, v), sine_kernel(v, u));
        assert!((airy_kernel(u, v) - airy_kernel(v, u)).abs() < 1e-15);
    }
    assert_eq!(sine_kernel(0.3, 0.3), 1.0);
    assert!(sine_kernel(0.0, 1.0).abs() < 1e-16);
    assert!((airy_kernel(0.0, 0.0) - AIP0 * AIP0).abs() < 1e-15);
    for pts in [vec![0.0], vec![-1.0, 0.5], vec![-2.0, -0.5, 1.0], vec![-3.0, -2.2, -1.1, 0.4]] {
        assert!(correlation_det(airy_kernel, &pts).unwrap() >= 0.0);
        assert!(correlation_det(sine_kernel, &pts).unwrap() >= 0.0);
    }
}

#[test]
fn correlation_determinants() {
    assert_eq!(correlation_det(sine_kernel, &[0.7]).unwrap(), 1.0);
    assert!((correlation_det(airy_kernel, &[0.7]).unwrap() - airy_kernel(0.7, 0.7)).abs() < 1e-16);
    let v = correlation_det(sine_kernel, &[0.0, 0.5]).unwrap();
    assert!((v - (1.0 - (2.0 / PI).powi(2))).abs() < 1e-14);
    let a = correlation_det(airy_kernel, &[-1.0, 0.3, -2.0]).unwrap();
    let b = correlation_det(airy_kernel, &[0.3, -2.0, -1.0]).unwrap();
    assert!((a - b).abs() < 1e-15);
    assert!(correlation_det(sine_kernel, &[]).is_err());
}

#[test]
fn three_airy_solutions_sum_to_zero() {
    for s in random_s(20, (0.0, 10.0), 3) {
        let (y, d) = airy_triple(s);
        let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((y[0] + y[1] + y[2]).norm() <= 1e-12 * scale, "s = {s}");
        let dscale = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((d[0] + d[1] + d[2]).norm() <= 1e-12 * dscale);
    }
}

#[test]
fn psi_jumps_on_the_four_rays() {
    // (ray angle, jump index, sector on the + side, sector on the − side);
    // + is the left side of the oriented ray.
    let rays = [(0.0, 0, 1, 4), (2.0 * PI / 3.0, 1, 1, 2), (PI, 2, 2, 3), (-2.0 * PI / 3.0, 3, 3, 4)];
    for (theta, idx, plus, minus) in rays {
        for k in 1..=5 {
            let s = Complex64::from_polar(0.8 * k as f64, theta);
            let lhs = airy_model_psi_in_sector(s, plus);
            let rhs = mat2_mul(&airy_model_psi_in_sector(s, minus), &airy_model_jump(idx));
            let scale = lhs.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((lhs[i][j] - rhs[i][j]).norm() <= 1e-10 * scale, "ray {theta}, s = {s}");
                }
            }
        }
    }
    assert!(airy_model_psi(Complex64::new(2.0, 0.0)).is_err());
    assert!(airy_model_psi(Complex64::new(-2.0, 0.0)).is_err());
}

#[test]
fn psi_determinant_is_constant() {
    let mut by_sector: [Vec<Complex64>; 4] = Default::default();
    for s in random_s(40, (0.2, 6.0), 4) {
        let sector = psi_sector(s).unwrap();
        by_sector[sector - 1].push(mat2_det(&airy_model_psi(s).unwrap()));
    }
    for dets in by_sector {
        for d in &dets {
            assert!((d - dets[0]).norm() < 1e-10, "{d} vs {}", dets[0]);
        }
    }
}

#[test]
fn psi_asymptotics_decay_like_s_to_minus_three_halves() {
    for theta in [PI / 3.0, 5.0 * PI / 6.0, -5.0 * PI / 6.0, -PI / 3.0] {
        let e: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&r| airy_model_asymptotic_error(Complex64::from_polar(r, theta)).unwrap())
            .collect();
        assert!(e[1] < e[0] && e[2] < e[1], "{theta}: {e:?}");
        let slope = (e[2] / e[0]).ln() / 4f64.ln();
        assert!((slope + 1.5).abs() < 0.15, "{theta}: slope {slope}");
    }
}
