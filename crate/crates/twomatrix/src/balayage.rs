//! Balayage (sweeping) of measures onto ℝ, iℝ and K_c = {iy : |y| ≥ c}.
//!
//! Point kernels are closed-form Poisson-type densities; a measure is swept by
//! integrating the point kernel against it with the near-singular machinery of
//! [`GridMeasure::integrate_kernel`]. All four targets have a vanishing
//! potential constant, so U^ν = U^{Bal(ν)} holds on the target.

use crate::error::{Error, Result};
use crate::potential::{Axis, GridMeasure, Layout};
use crate::quad::tanh_sinh;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Target set of a balayage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Real,
    Imaginary,
    /// K_c with c > 0.
    Kc(f64),
}

impl Target {
    pub fn axis(&self) -> Axis {
        match *self {
            Target::Real => Axis::Real,
            Target::Imaginary => Axis::Imaginary,
            Target::Kc(c) => Axis::Kc(c),
        }
    }
}

/// Density of Bal(δ_source, target) at the target coordinate `at`
/// (x for ℝ, y for the point iy on iℝ or K_c). The source must lie on ℝ or iℝ
/// and off the target.
pub fn balayage_point_density(source: Complex64, target: Target, at: f64) -> Result<f64> {
    let on_real = source.im == 0.0;
    let on_imag = source.re == 0.0;
    if !on_real && !on_imag {
        return Err(Error::Domain(format!("source {source} is not on ℝ or iℝ")));
    }
    match target {
        Target::Real => {
            if on_real {
                return Err(Error::Domain("source lies on the target ℝ".into()));
            }
            let y = source.im;
            Ok(y.abs() / (PI * (at * at + y * y)))
        }
        Target::Imaginary => {
            if on_imag {
                return Err(Error::Domain("source lies on the target iℝ".into()));
            }
            let x = source.re;
            Ok(x.abs() / (PI * (at * at + x * x)))
        }
        Target::Kc(c) => {
            if !(c > 0.0) {
                return Err(Error::Domain(format!("K_c needs c > 0, got {c}")));
            }
            if at.abs() <= c {
                return Err(Error::Domain(format!("|{at}| ≤ c = {c}: point not on K_c")));
            }
            let root = (at * at - c * c).sqrt();
            if on_imag {
                let y = source.im;
                if y.abs() >= c {
                    return Err(Error::Domain("source lies on the target K_c".into()));
                }
                Ok((c * c - y * y).sqrt() / (PI * (at - y).abs() * root))
            } else {
                let x = source.re;
                Ok(at.abs() * (c * c + x * x).sqrt() / (PI * (at * at + x * x) * root))
            }
        }
    }
}

/// Default layout for a balayage target with structure at length `scale`:
/// smooth at the origin with a |t|^{−2} tail on ℝ/iℝ, inverse-square-root
/// endpoints and a |t|^{−2} tail on K_c.
pub fn default_target_layout(target: Target, scale: f64) -> Layout {
    match target {
        Target::Real | Target::Imaginary => Layout::line_smooth(scale, 2.0, 16),
        Target::Kc(c) => Layout::half_lines(c, 2.0, 2.0, 16),
    }
}

/// Bal(δ_source, target) sampled on `layout` (default layout when `None`).
pub fn balayage_point(source: Complex64, target: Target, layout: Option<Layout>) -> Result<GridMeasure> {
    balayage_point_density(source, target, if let Target::Kc(c) = target { 2.0 * c } else { 1.0 })?;
    let layout = layout.unwrap_or_else(|| default_target_layout(target, source.norm().max(1e-3)));
    GridMeasure::from_density(target.axis(), layout, |t| {
        balayage_point_density(source, target, t).unwrap_or(0.0)
    })
}

/// Mass-weighted median of |t| over a measure; used as a length scale.
pub fn typical_scale(m: &GridMeasure) -> f64 {
    let mut pairs: Vec<(f64, f64)> = (0..m.len()).map(|i| (m.nodes[i].abs(), m.weights[i] * m.density[i])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut acc = 0.0;
    for (t, w) in pairs {
        acc += w;
        if acc >= 0.5 * total {
            return t.max(1e-6);
        }
    }
    1.0
}

/// Density of Bal(m, target) at the target coordinate `at`.
pub fn balayage_density_at(m: &GridMeasure, target: Target, at: f64) -> f64 {
    let z = target.axis().point(at);
    match (m.axis, target) {
        (Axis::Real, Target::Imaginary) => m.integrate_kernel(z, |x, _| x.abs() / (PI * (at * at + x * x))),
        (Axis::Real, Target::Kc(c)) => {
            let root = (at * at - c * c).sqrt();
            m.integrate_kernel(z, |x, _| at.abs() * (c * c + x * x).sqrt() / (PI * (at * at + x * x) * root))
        }
        (_, Target::Real) => m.integrate_kernel(z, |y, _| y.abs() / (PI * (at * at + y * y))),
        (_, Target::Kc(c)) => {
            let root = (at * at - c * c).sqrt();
            m.integrate_kernel(z, |y, _| {
                if y.abs() >= c {
                    0.0
                } else {
                    (c * c - y * y).sqrt() / (PI * (at - y).abs() * root)
                }
            })
        }
        _ => f64::NAN,
    }
}

/// Bal(m, target) sampled on `layout` (default layout when `None`). The
/// source support must avoid the target where the kernel is singular.
pub fn balayage_measure(m: &GridMeasure, target: Target, layout: Option<Layout>) -> Result<GridMeasure> {
    match (m.axis, target) {
        (Axis::Real, Target::Real) => return Err(Error::Domain("cannot sweep a measure on ℝ onto ℝ".into())),
        (Axis::Imaginary | Axis::Kc(_), Target::Imaginary) => {
            return Err(Error::Domain("cannot sweep a measure on iℝ onto iℝ".into()))
        }
        (Axis::Kc(_), Target::Kc(_)) => return Err(Error::Domain("source lies on K_c".into())),
        (Axis::Imaginary, Target::Kc(c)) => {
            // Only the part inside the window may be swept.
            if m.partial_mass(f64::NEG_INFINITY, -c) + m.partial_mass(c, f64::INFINITY) > 1e-14 {
                return Err(Error::Domain("source has mass on K_c".into()));
            }
        }
        _ => {}
    }
    // A source touching the target at the origin produces a logarithmic
    // singularity there, so measures are swept onto an origin-graded layout.
    let layout = layout.unwrap_or_else(|| match target {
        Target::Kc(_) => default_target_layout(target, typical_scale(m)),
        _ => Layout::line_with_cusp(typical_scale(m), 2.0, 16),
    });
    GridMeasure::from_density(target.axis(), layout, |t| balayage_density_at(m, target, t).max(0.0))
}

/// C_p = 1/(2 sin(pπ/2)) for 1 ≤ p < 2 (p = 1 returns the limiting value ½).
/// It is the constant in ½Bal(σ_p, ℝ) = C_p|x|^{−p} for dσ_p = |z|^{−p}|dz|.
pub fn cp_constant(p: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::Domain(format!("C_p requires 1 < p < 2, got {p}")));
    }
    Ok(1.0 / (2.0 * (p * PI / 2.0).sin()))
}

/// ∫₀^∞ s^p/(1+s²) ds = π/(2cos(pπ/2)) for |p| < 1; the closed form is
/// returned after checking it against tanh-sinh quadrature to 1e−8.
pub fn standard_integral(p: f64) -> Result<f64> {
    if !(p > -1.0 && p < 1.0) {
        return Err(Error::Domain(format!("∫ s^p/(1+s²) diverges for p = {p}")));
    }
    let closed = PI / (2.0 * (p * PI / 2.0).cos());
    let q = standard_integral_quadrature(p);
    if (q - closed).abs() > 1e-8 * closed {
        return Err(Error::Accuracy(format!("standard integral quadrature {q} vs closed form {closed}")));
    }
    Ok(closed)
}

/// Quadrature of ∫₀^∞ s^p/(1+s²) ds: [0,1] directly and [1,∞) via s = 1/u.
pub fn standard_integral_quadrature(p: f64) -> f64 {
    let (a, _) = tanh_sinh(0.0, 1.0, 1e-15, |s, dl, _| dl.powf(p) / (1.0 + s * s));
    let (b, _) = tanh_sinh(0.0, 1.0, 1e-15, |u, dl, _| dl.powf(-p) / (1.0 + u * u));
    a + b
}
