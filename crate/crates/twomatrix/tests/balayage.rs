use num_complex::Complex64;
use twomatrix::balayage::{balayage_measure, balayage_point, cp_constant, standard_integral, Target};
use twomatrix::potential::{Axis, GridMeasure, Layout};

fn target_points(target: Target) -> Vec<f64> {
    let base: Vec<f64> = (0..10).map(|k| 0.13 + 0.61 * k as f64).collect();
    let mut out = Vec::new();
    for b in base {
        match target {
            Target::Kc(c) => {
                out.push(c * (1.0 + 0.05 + b));
                out.push(-c * (1.0 + 0.02 + 1.3 * b));
            }
            _ => {
                out.push(b);
                out.push(-0.7 * b - 0.05);
            }
        }
    }
    out
}

fn check_point(source: Complex64, target: Target) {
    let m = balayage_point(source, target, None).unwrap();
    let mass = m.total_mass();
    assert!((mass - 1.0).abs() < 1e-10, "{source} → {target:?}: mass {mass}");
    for t in target_points(target) {
        let z = target.axis().point(t);
        let direct = -(z - source).norm().ln();
        let swept = m.log_potential(z);
        assert!((direct - swept).abs() < 1e-6, "{source} → {target:?} at {t}: {direct} vs {swept}");
    }
}

#[test]
fn point_sources_preserve_mass_and_potential() {
    check_point(Complex64::new(0.0, 1.0), Target::Real);
    check_point(Complex64::new(0.0, 0.5), Target::Kc(1.0));
    check_point(Complex64::new(0.7, 0.0), Target::Kc(1.0));
    check_point(Complex64::new(0.7, 0.0), Target::Imaginary);
}

#[test]
fn semicircle_swept_onto_imaginary_axis() {
    let semi = GridMeasure::from_density(Axis::Real, Layout::cos_interval(2.0, 8, 16), |x| {
        (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
    })
    .unwrap();
    let bal = balayage_measure(&semi, Target::Imaginary, None).unwrap();
    // The swept density has a logarithmic singularity at the origin.
    assert!((bal.total_mass() - 1.0).abs() < 1e-7, "mass {}", bal.total_mass());
    for y in [0.1, 0.5, 1.0, 3.0, -2.0] {
        let z = Complex64::new(0.0, y);
        assert!((semi.log_potential(z) - bal.log_potential(z)).abs() < 1e-6);
    }
}

#[test]
fn window_measure_swept_onto_kc() {
    let c = 0.6;
    let src = GridMeasure::from_density(Axis::Imaginary, Layout::cos_interval(0.5, 6, 16), |y| {
        (0.25 - y * y).max(0.0).sqrt() * 8.0 / std::f64::consts::PI
    })
    .unwrap();
    let bal = balayage_measure(&src, Target::Kc(c), None).unwrap();
    assert!((bal.total_mass() - src.total_mass()).abs() < 1e-9);
    let z = Complex64::new(0.0, 1.7);
    assert!((src.log_potential(z) - bal.log_potential(z)).abs() < 1e-7);
}

#[test]
fn cp_sign_change_between_one_point_six_and_one_point_seven() {
    assert!((cp_constant(1.5).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(cp_constant(1.6).unwrap() < 1.0);
    assert!(cp_constant(1.7).unwrap() > 1.0);
    assert!((standard_integral(1.0 / 3.0).unwrap() - std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-8);
}
