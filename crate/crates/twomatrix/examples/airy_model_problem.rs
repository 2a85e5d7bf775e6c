//! The Airy function, the sine and Airy kernels, and the 2×2 Airy model
//! problem Ψ: the three-term relation, jumps on the four rays and the
//! large-s asymptotics.
use num_complex::Complex64;
use std::f64::consts::PI;
use twomatrix::universal::*;

fn main() -> twomatrix::Result<()> {
    for s in [-5.0, 0.0, 2.0] {
        let (a, d) = airy(s);
        println!("Ai({s}) = {a:.15}, Ai′({s}) = {d:.15}");
    }
    println!("K_sine(0, 0.5) = {:.12}, K_Airy(0, 0) = {:.12}", sine_kernel(0.0, 0.5), airy_kernel(0.0, 0.0));
    println!("det[K_Airy] at (−1, 0.3, −2) = {:.12}", correlation_det(airy_kernel, &[-1.0, 0.3, -2.0])?);

    let s = Complex64::from_polar(3.0, 1.0);
    let (y, _) = airy_triple(s);
    println!("|y₀ + y₁ + y₂| at {s:.3} = {:.2e}", (y[0] + y[1] + y[2]).norm());
    // (angle, jump index, sector on the left, sector on the right)
    for (theta, idx, plus, minus) in [(0.0, 0, 1, 4), (2.0 * PI / 3.0, 1, 1, 2), (PI, 2, 2, 3), (-2.0 * PI / 3.0, 3, 3, 4)] {
        let s = Complex64::from_polar(2.0, theta);
        let lhs = airy_model_psi_in_sector(s, plus);
        let rhs = mat2_mul(&airy_model_psi_in_sector(s, minus), &airy_model_jump(idx));
        let err = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (lhs[i][j] - rhs[i][j]).norm()).fold(0.0, f64::max);
        println!("ray {theta:+.4}: jump residual {err:.2e}");
    }
    for r in [5.0, 10.0, 20.0] {
        let e = airy_model_asymptotic_error(Complex64::from_polar(r, PI / 3.0))?;
        println!("|s| = {r:>4}: asymptotic error {e:.4e}  (|s|^{{3/2}}·err = {:.4})", e * r.powf(1.5));
    }
    Ok(())
}
