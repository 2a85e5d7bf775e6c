//! Sweeps point masses and a semicircle onto ℝ, iℝ and K_c, and prints the
//! conserved mass and the potential mismatch on the target; then the
//! constants C_p of the power-law balayage.
use num_complex::Complex64;
use twomatrix::balayage::{balayage_measure, balayage_point, cp_constant, standard_integral, Target};
use twomatrix::potential::{Axis, GridMeasure, Layout};

fn main() -> twomatrix::Result<()> {
    let cases = [
        (Complex64::new(0.0, 1.0), Target::Real),
        (Complex64::new(0.0, 0.5), Target::Kc(1.0)),
        (Complex64::new(0.7, 0.0), Target::Kc(1.0)),
        (Complex64::new(0.7, 0.0), Target::Imaginary),
    ];
    for (source, target) in cases {
        let m = balayage_point(source, target, None)?;
        let mismatch = [0.2, 1.3, 4.0, -2.5]
            .iter()
            .map(|&t: &f64| {
                let t = if let Target::Kc(c) = target { t.signum() * (c + t.abs()) } else { t };
                let z = target.axis().point(t);
                (m.log_potential(z) + (z - source).norm().ln()).abs()
            })
            .fold(0.0, f64::max);
        println!("δ at {source} → {target:?}: mass {:.12}, max |U^bal − U^δ| on target {mismatch:.2e}", m.total_mass());
    }

    let semi = GridMeasure::from_density(Axis::Real, Layout::cos_interval(2.0, 8, 16), |x| {
        (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
    })?;
    let bal = balayage_measure(&semi, Target::Imaginary, None)?;
    println!("semicircle → iℝ: mass {:.9}, density at i·1 {:.9}", bal.total_mass(), bal.density_at(1.0));

    for p in [1.5, 1.6, 1.7] {
        println!("C_{p} = {:.15}", cp_constant(p)?);
    }
    println!("∫₀^∞ s^(1/3)/(1+s²) ds = {:.15}  (π/√3 = {:.15})", standard_integral(1.0 / 3.0)?, std::f64::consts::PI / 3f64.sqrt());
    Ok(())
}
