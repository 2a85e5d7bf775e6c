//! Limit objects of random-matrix universality: the Airy function, the sine
//! and Airy kernels, k-point correlation determinants, and the 2×2 Airy model
//! Riemann–Hilbert solution Ψ.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;
use std::f64::consts::PI;

/// The primitive cube root of unity e^{2πi/3}.
pub fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Below this modulus the Maclaurin series is used (in extended precision);
/// above it the asymptotic expansion is used.
pub const AIRY_SERIES_RADIUS: f64 = 12.0;

/// Complex number with multiprecision parts; only what the series needs.
struct MpComplex {
    re: Float,
    im: Float,
}

impl MpComplex {
    fn from_c64(prec: u32, z: Complex64) -> Self {
        MpComplex { re: Float::with_val(prec, z.re), im: Float::with_val(prec, z.im) }
    }
    fn mul(&self, other: &MpComplex, prec: u32) -> MpComplex {
        let re = Float::with_val(prec, &self.re * &other.re) - Float::with_val(prec, &self.im * &other.im);
        let im = Float::with_val(prec, &self.re * &other.im) + Float::with_val(prec, &self.im * &other.re);
        MpComplex { re, im }
    }
    fn scale_div(&mut self, d: u64) {
        self.re /= d;
        self.im /= d;
    }
    fn add_assign(&mut self, other: &MpComplex) {
        self.re += &other.re;
        self.im += &other.im;
    }
    fn magnitude(&self) -> f64 {
        self.re.to_f64().abs() + self.im.to_f64().abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Maclaurin series of (Ai, Ai′), summed with enough guard bits to absorb the
/// cancellation between exponentially large terms.
fn airy_series(s: Complex64) -> (Complex64, Complex64) {
    let r = s.norm();
    let guard = ((4.0 / 3.0) * r.powf(1.5) / std::f64::consts::LN_2).ceil() as u32;
    let prec = 80 + guard;
    let third = Float::with_val(prec, 1) / 3u32;
    let two_thirds = Float::with_val(prec, 2) / 3u32;
    let three = Float::with_val(prec, 3);
    // Ai(0) = 3^{−2/3}/Γ(2/3), −Ai′(0) = 3^{−1/3}/Γ(1/3).
    let c1 = Float::with_val(prec, three.clone().pow(-two_thirds.clone())) / two_thirds.clone().gamma();
    let c2 = Float::with_val(prec, three.pow(-third.clone())) / third.gamma();

    let z = MpComplex::from_c64(prec, s);
    let z2 = z.mul(&z, prec);
    let z3 = z2.mul(&z, prec);
    let one = MpComplex::from_c64(prec, Complex64::new(1.0, 0.0));

    let mut f = MpComplex::from_c64(prec, Complex64::new(0.0, 0.0));
    let mut fp = MpComplex::from_c64(prec, Complex64::new(0.0, 0.0));
    let mut g = MpComplex::from_c64(prec, Complex64::new(0.0, 0.0));
    let mut gp = MpComplex::from_c64(prec, Complex64::new(0.0, 0.0));

    let mut t = MpComplex { re: one.re.clone(), im: one.im.clone() };
    let mut u = MpComplex { re: z.re.clone(), im: z.im.clone() };
    let mut e = MpComplex { re: one.re.clone(), im: one.im.clone() };
    let mut d = z2;
    d.scale_div(2);
    let tiny = 2f64.powi(-(prec as i32) + 8);
    let mut peak: f64 = 1.0;
    let mut k: u64 = 0;
    loop {
        f.add_assign(&t);
        g.add_assign(&u);
        gp.add_assign(&e);
        if k >= 1 {
            fp.add_assign(&d);
        }
        let mag = t.magnitude() + u.magnitude() + e.magnitude() + if k >= 1 { d.magnitude() } else { 0.0 };
        peak = peak.max(mag);
        if k > 2 && mag < tiny * peak {
            break;
        }
        t = t.mul(&z3, prec);
        t.scale_div((3 * k + 2) * (3 * k + 3));
        u = u.mul(&z3, prec);
        u.scale_div((3 * k + 3) * (3 * k + 4));
        e = e.mul(&z3, prec);
        e.scale_div((3 * k + 1) * (3 * k + 3));
        if k >= 1 {
            d = d.mul(&z3, prec);
            d.scale_div((3 * k) * (3 * k + 2));
        }
        k += 1;
        if k > 4000 {
            break;
        }
    }
    let ai = MpComplex {
        re: Float::with_val(prec, &c1 * &f.re) - Float::with_val(prec, &c2 * &g.re),
        im: Float::with_val(prec, &c1 * &f.im) - Float::with_val(prec, &c2 * &g.im),
    };
    let aip = MpComplex {
        re: Float::with_val(prec, &c1 * &fp.re) - Float::with_val(prec, &c2 * &gp.re),
        im: Float::with_val(prec, &c1 * &fp.im) - Float::with_val(prec, &c2 * &gp.im),
    };
    (ai.to_c64(), aip.to_c64())
}

/// Asymptotic expansion of (Ai, Ai′), valid for |arg s| ≤ 2π/3 and large |s|.
fn airy_asymptotic_principal(s: Complex64) -> (Complex64, Complex64) {
    let zeta = s.powf(1.5) * (2.0 / 3.0);
    let inv = 1.0 / zeta;
    let mut uk = 1.0f64;
    let mut sum_u = Complex64::new(1.0, 0.0);
    let mut sum_v = Complex64::new(1.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let vk = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk;
        pw *= -inv;
        let tu = pw * uk;
        let tv = pw * vk;
        let mag = tu.norm().max(tv.norm());
        if mag > last {
            break;
        }
        sum_u += tu;
        sum_v += tv;
        last = mag;
        if mag < 1e-18 {
            break;
        }
    }
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = s.powf(0.25);
    (pre / q * sum_u, -pre * q * sum_v)
}

/// Airy function and its derivative at a complex argument.
pub fn airy_complex(s: Complex64) -> (Complex64, Complex64) {
    if s.norm() <= AIRY_SERIES_RADIUS {
        return airy_series(s);
    }
    let arg = s.arg();
    if arg.abs() <= 2.0 * PI / 3.0 {
        return airy_asymptotic_principal(s);
    }
    // Ai(s) = −ω Ai(ωs) − ω² Ai(ω²s), both rotated arguments in the principal sector.
    let w = omega();
    let w2 = w * w;
    let (a1, d1) = airy_asymptotic_principal(w * s);
    let (a2, d2) = airy_asymptotic_principal(w2 * s);
    (-w * a1 - w2 * a2, -w2 * d1 - w * d2)
}

/// Airy function and its derivative at a real argument.
pub fn airy(s: f64) -> (f64, f64) {
    let (a, d) = airy_complex(Complex64::new(s, 0.0));
    (a.re, d.re)
}

/// Sine kernel sin π(u−v) / (π(u−v)), with value 1 on the diagonal.
pub fn sine_kernel(u: f64, v: f64) -> f64 {
    let d = u - v;
    if d == 0.0 {
        return 1.0;
    }
    (PI * d).sin() / (PI * d)
}

/// Airy kernel (Ai(u)Ai′(v) − Ai′(u)Ai(v)) / (u − v); the diagonal uses the
/// analytic limit Ai′(u)² − u·Ai(u)².
pub fn airy_kernel(u: f64, v: f64) -> f64 {
    let (au, du) = airy(u);
    if u == v {
        return du * du - u * au * au;
    }
    let (av, dv) = airy(v);
    (au * dv - du * av) / (u - v)
}

/// Determinant of the k×k matrix `kernel(points[i], points[j])`, k ≤ 8.
pub fn correlation_det<K: Fn(f64, f64) -> f64>(kernel: K, points: &[f64]) -> Result<f64> {
    let k = points.len();
    if k == 0 || k > 8 {
        return Err(Error::Domain(format!("correlation determinant needs 1..=8 points, got {k}")));
    }
    let m = nalgebra::DMatrix::from_fn(k, k, |i, j| kernel(points[i], points[j]));
    Ok(m.determinant())
}

/// 2×2 complex matrix stored row-major.
pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat2_det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// The three Airy solutions y₀(s) = Ai(s), y₁(s) = ωAi(ωs), y₂(s) = ω²Ai(ω²s)
/// together with their derivatives.
pub fn airy_triple(s: Complex64) -> ([Complex64; 3], [Complex64; 3]) {
    let w = omega();
    let w2 = w * w;
    let (a0, d0) = airy_complex(s);
    let (a1, d1) = airy_complex(w * s);
    let (a2, d2) = airy_complex(w2 * s);
    // d/ds [ω Ai(ωs)] = ω² Ai′(ωs);  d/ds [ω² Ai(ω²s)] = ω⁴ Ai′(ω²s) = ω Ai′(ω²s).
    ([a0, w * a1, w2 * a2], [d0, w2 * d1, w * d2])
}

/// Sector of the Airy model problem: 1 = (0, 2π/3), 2 = (2π/3, π),
/// 3 = (−π, −2π/3), 4 = (−2π/3, 0).
pub fn psi_sector(s: Complex64) -> Result<usize> {
    let arg = s.arg();
    let eps = 1e-14;
    for ray in [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0, PI, -PI] {
        if (arg - ray).abs() < eps || s.norm() == 0.0 {
            return Err(Error::Domain(format!("s = {s} lies on a jump ray of Ψ")));
        }
    }
    Ok(if arg > 0.0 && arg < 2.0 * PI / 3.0 {
        1
    } else if arg > 0.0 {
        2
    } else if arg < -2.0 * PI / 3.0 {
        3
    } else {
        4
    })
}

/// Evaluates the sector-`sector` formula of Ψ at `s` (the formulas are entire,
/// so this may be used on a ray to obtain boundary values).
pub fn airy_model_psi_in_sector(s: Complex64, sector: usize) -> Mat2 {
    let (y, d) = airy_triple(s);
    match sector {
        1 => [[y[0], -y[2]], [d[0], -d[2]]],
        2 => [[-y[1], -y[2]], [-d[1], -d[2]]],
        3 => [[-y[2], y[1]], [-d[2], d[1]]],
        _ => [[y[0], y[1]], [d[0], d[1]]],
    }
}

/// The Airy model RH solution Ψ(s), defined off the rays arg s ∈ {0, ±2π/3, π}.
pub fn airy_model_psi(s: Complex64) -> Result<Mat2> {
    let sector = psi_sector(s)?;
    Ok(airy_model_psi_in_sector(s, sector))
}

/// Jump matrices of Ψ: rays are oriented left to right (arg 0 outward, the
/// other three towards the origin) and Ψ₊ = Ψ₋·J with + the left side.
pub fn airy_model_jump(ray: usize) -> Mat2 {
    let c = |x: f64| Complex64::new(x, 0.0);
    match ray {
        0 => [[c(1.0), c(1.0)], [c(0.0), c(1.0)]],
        2 => [[c(0.0), c(1.0)], [c(-1.0), c(0.0)]],
        _ => [[c(1.0), c(0.0)], [c(1.0), c(1.0)]],
    }
}

/// ‖E(s)⁻¹ Ψ(s) e^{(2/3)s^{3/2}σ₃} − I‖_max where
/// E(s) = (2√π)⁻¹ diag(s^{−1/4}, s^{1/4}) [[1, i], [−1, i]].
pub fn airy_model_asymptotic_error(s: Complex64) -> Result<f64> {
    let psi = airy_model_psi(s)?;
    let i = Complex64::i();
    let q = s.powf(0.25);
    let k = 1.0 / (2.0 * PI.sqrt());
    // E = k·diag(1/q, q)·[[1, i], [−1, i]];  E⁻¹ = (1/k)·[[1, i],[−1, i]]⁻¹·diag(q, 1/q).
    let b: Mat2 = [[Complex64::new(1.0, 0.0), i], [Complex64::new(-1.0, 0.0), i]];
    let det_b = mat2_det(&b);
    let b_inv: Mat2 = [[b[1][1] / det_b, -b[0][1] / det_b], [-b[1][0] / det_b, b[0][0] / det_b]];
    let dq: Mat2 = [[q / k, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), 1.0 / (q * k)]];
    let e_inv = mat2_mul(&b_inv, &dq);
    let zeta = s.powf(1.5) * (2.0 / 3.0);
    let ex: Mat2 = [[zeta.exp(), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), (-zeta).exp()]];
    let r = mat2_mul(&mat2_mul(&e_inv, &psi), &ex);
    let mut err: f64 = 0.0;
    for a in 0..2 {
        for bb in 0..2 {
            let target = if a == bb { 1.0 } else { 0.0 };
            err = err.max((r[a][bb] - target).norm());
        }
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_at_zero() {
        let (a, d) = airy(0.0);
        assert!((a - 0.355_028_053_887_817_2).abs() < 1e-15);
        assert!((d + 0.258_819_403_792_806_8).abs() < 1e-15);
    }

    #[test]
    fn airy_known_values() {
        // Reference values of Ai at ±5 and ±20.
        let (a, _) = airy(5.0);
        assert!((a / 1.083_444_281_360_744e-4 - 1.0).abs() < 1e-12);
        let (a, _) = airy(-5.0);
        assert!((a / 0.350_761_009_024_114_3 - 1.0).abs() < 1e-12);
        let (a, _) = airy(20.0);
        assert!((a / 1.691_672_868_670_73e-27 - 1.0).abs() < 1e-11);
    }

    #[test]
    fn series_and_asymptotics_agree_at_switchover() {
        for arg in [0.3, 1.5, 2.5, -2.9] {
            let s = Complex64::from_polar(12.5, arg);
            let (a1, d1) = airy_series(s);
            let (a2, d2) = airy_complex(s);
            assert!((a1 - a2).norm() <= 1e-11 * a1.norm(), "arg {arg}");
            assert!((d1 - d2).norm() <= 1e-11 * d1.norm(), "arg {arg}");
        }
    }

    #[test]
    fn kernels_on_diagonal() {
        assert_eq!(sine_kernel(0.4, 0.4), 1.0);
        assert!(sine_kernel(0.0, 1.0).abs() < 1e-16);
        let (_, d) = airy(0.0);
        assert!((airy_kernel(0.0, 0.0) - d * d).abs() < 1e-15);
    }

    #[test]
    fn sine_two_point_determinant() {
        let v = correlation_det(sine_kernel, &[0.0, 0.5]).unwrap();
        assert!((v - (1.0 - 4.0 / (PI * PI))).abs() < 1e-14);
    }
}
