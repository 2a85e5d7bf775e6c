//! Pearcey integrals p₀…p₅, the weight functions w_{j,n} and the
//! moment-function family I_m(x) = ∫ y^m e^{−n(y⁴/4 − τxy)} dy.
//!
//! The integrals are evaluated along their defining rays (0 → ∞·e^{iθ} for
//! θ ∈ {0, ±π/2, π}) by adaptive Gauss–Kronrod quadrature, truncated where
//! s⁴/4 − |s||z| reaches 46. An arbitrary-precision path for I_m evaluates a
//! positive power series and is used by the finite-n module.

use crate::error::{Error, Result};
use crate::potential::EvenPoly;
use crate::quad::adaptive_gk;
use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;
use std::f64::consts::{FRAC_PI_2, PI};

/// Exponent of the neglected tail e^{−46} beyond the truncation radius.
pub const TAIL_EXPONENT: f64 = 46.0;

/// Evaluator for the Pearcey integrals.
#[derive(Debug, Clone)]
pub struct PearceyEvaluator {
    /// Largest |z| accepted.
    pub max_abs_z: f64,
    /// Relative tolerance of the adaptive ray quadrature.
    pub rel_tol: f64,
    /// Interval budget of the adaptive ray quadrature.
    pub max_intervals: usize,
    /// Mantissa bits for the arbitrary-precision moment functions.
    pub precision: u32,
}

impl Default for PearceyEvaluator {
    fn default() -> Self {
        PearceyEvaluator { max_abs_z: 50.0, rel_tol: 1e-15, max_intervals: 4000, precision: 256 }
    }
}

/// Radius where s⁴/4 − s|z| = `tail` (Newton on the quartic from a safe start).
pub fn truncation_radius(abs_z: f64, tail: f64) -> f64 {
    let mut r = (4.0 * tail).powf(0.25) + abs_z.powf(1.0 / 3.0) + 1.0;
    for _ in 0..100 {
        let f = r.powi(4) / 4.0 - r * abs_z - tail;
        let d = r.powi(3) - abs_z;
        let step = f / d;
        r -= step;
        if step.abs() < 1e-14 * r {
            break;
        }
    }
    r
}

impl PearceyEvaluator {
    /// ∫₀^∞ (re^{iθ})^k exp(−r⁴/4 + re^{iθ}z − shift) e^{iθ} dr, θ a multiple of π/2.
    fn ray(&self, theta: f64, z: Complex64, order: u32, shift: f64) -> Complex64 {
        let dir = Complex64::from_polar(1.0, theta);
        let big_r = truncation_radius(z.norm(), TAIL_EXPONENT + 2.0 * order as f64);
        let f = |r: f64| {
            let s = dir * r;
            let e = (-r.powi(4) / 4.0 + s * z - shift).exp();
            s.powu(order) * e * dir
        };
        // Scale estimate for an absolute floor: the integrand magnitude peaks
        // where r³ ≈ Re(dir·z).
        let grow = (dir * z).re.max(0.0);
        let r_peak = grow.cbrt();
        let peak_log = -r_peak.powi(4) / 4.0 + r_peak * grow - shift;
        let scale = peak_log.exp() * (1.0 + big_r.powi(order as i32));
        let n_split = 8 + (big_r * (1.0 + z.norm()) / 2.0).ceil() as usize;
        let h = big_r / n_split as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n_split {
            let (v, _) = adaptive_gk(
                i as f64 * h,
                (i + 1) as f64 * h,
                1e-18 * scale / n_split as f64,
                self.rel_tol,
                self.max_intervals,
                f,
            );
            acc += v;
        }
        acc
    }

    fn check(&self, j: usize, z: Complex64, order: u32) -> Result<()> {
        if j > 5 {
            return Err(Error::Domain(format!("Pearcey index {j} not in 0..=5")));
        }
        if order > 2 {
            return Err(Error::Domain(format!("derivative order {order} not in 0..=2")));
        }
        if !(z.norm() <= self.max_abs_z) {
            return Err(Error::Domain(format!("|z| = {} exceeds configured maximum {}", z.norm(), self.max_abs_z)));
        }
        Ok(())
    }

    /// p_j^{(order)}(z)·e^{−shift}.
    pub fn pearcey_scaled(&self, j: usize, z: Complex64, order: u32, shift: f64) -> Result<Complex64> {
        self.check(j, z, order)?;
        let r = |t: f64| self.ray(t, z, order, shift);
        Ok(match j {
            0 => r(0.0) - r(PI),
            1 => r(0.0) - r(FRAC_PI_2),
            2 => r(PI) - r(FRAC_PI_2),
            3 => r(PI) - r(-FRAC_PI_2),
            4 => r(0.0) - r(-FRAC_PI_2),
            _ => self.imaginary_axis(z, order, shift),
        })
    }

    /// p_j(z), p_j′(z) or p_j″(z).
    pub fn pearcey(&self, j: usize, z: Complex64, order: u32) -> Result<Complex64> {
        self.pearcey_scaled(j, z, order, 0.0)
    }

    /// p₅ as a single integral along the whole imaginary axis.
    fn imaginary_axis(&self, z: Complex64, order: u32, shift: f64) -> Complex64 {
        let big_r = truncation_radius(z.norm(), TAIL_EXPONENT + 2.0 * order as f64);
        let i = Complex64::i();
        let f = |t: f64| {
            let s = i * t;
            s.powu(order) * (-t.powi(4) / 4.0 + s * z - shift).exp() * i
        };
        let grow = z.im.abs();
        let r_peak = grow.cbrt();
        let scale = (-r_peak.powi(4) / 4.0 + r_peak * grow - shift).exp() * (1.0 + big_r.powi(order as i32));
        let n_split = 16 + (big_r * (1.0 + z.norm())).ceil() as usize;
        let h = 2.0 * big_r / n_split as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n_split {
            let a = -big_r + k as f64 * h;
            let (v, _) = adaptive_gk(a, a + h, 1e-18 * scale / n_split as f64, self.rel_tol, self.max_intervals, f);
            acc += v;
        }
        acc
    }

    /// Real-argument p₀^{(order)}(x) returned as (log|value|, sign), robust
    /// against overflow for large |x|.
    pub fn p0_real_log(&self, x: f64, order: u32) -> Result<(f64, f64)> {
        let shift = 0.75 * x.abs().powf(4.0 / 3.0);
        let v = self.pearcey_scaled(0, Complex64::new(x, 0.0), order, shift)?.re;
        if v == 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        Ok((v.abs().ln() + shift, v.signum()))
    }

    /// Ratio p₀(z) / (√(2π/3) z^{−1/3} e^{(3/4)z^{4/3}}) for Re z > 0, or the
    /// analogous ratio with −z for Re z < 0.
    pub fn asymptotic_ratio(&self, z: Complex64) -> Result<Complex64> {
        let zz = if z.re >= 0.0 { z } else { -z };
        let phase = zz.powf(4.0 / 3.0) * 0.75;
        let scaled = self.pearcey_scaled(0, z, 0, phase.re)?;
        let lead = (2.0 * PI / 3.0).sqrt() * zz.powf(-1.0 / 3.0) * Complex64::new(0.0, phase.im).exp();
        Ok(scaled / lead)
    }
}

/// |ratio − 1| of the leading steepest-descent asymptotics along a ray,
/// with the least-squares log-log slope of the error against |z|.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AsymptoticReport {
    pub radii: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Evaluates [`PearceyEvaluator::asymptotic_ratio`] at z = r·e^{iθ} for each r.
pub fn pearcey_asymptotic_check(ev: &PearceyEvaluator, radii: &[f64], theta: f64) -> Result<AsymptoticReport> {
    if radii.len() < 2 {
        return Err(Error::Domain("the slope fit needs at least two radii".into()));
    }
    let errors = radii
        .iter()
        .map(|&r| Ok((ev.asymptotic_ratio(Complex64::from_polar(r, theta))? - 1.0).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(AsymptoticReport { radii: radii.to_vec(), errors, slope: sxy / sxx })
}

/// Log-magnitude/sign pair used for overflow-safe weight values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub log_abs: f64,
    pub sign: f64,
}

impl LogValue {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

/// Weight system of the two-matrix model at size n.
#[derive(Debug, Clone)]
pub struct WeightSystem {
    pub n: usize,
    pub tau: f64,
    pub v: EvenPoly,
    pub evaluator: PearceyEvaluator,
}

impl WeightSystem {
    pub fn new(n: usize, tau: f64, v: EvenPoly) -> Result<Self> {
        if n == 0 || n % 3 != 0 {
            return Err(Error::Domain(format!("n = {n} must be a positive multiple of 3")));
        }
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau = {tau} must be positive")));
        }
        let evaluator = PearceyEvaluator { max_abs_z: f64::INFINITY, ..Default::default() };
        Ok(WeightSystem { n, tau, v, evaluator })
    }

    /// w_{j,n}(x) = n^{−(j+1)/4} e^{−nV(x)} p₀^{(j)}(n^{3/4}τx) in log/sign form.
    pub fn weight_w_log(&self, j: u32, x: f64) -> Result<LogValue> {
        if j > 2 {
            return Err(Error::Domain(format!("weight index {j} not in 0..=2")));
        }
        let nf = self.n as f64;
        let (lp, sign) = self.evaluator.p0_real_log(nf.powf(0.75) * self.tau * x, j)?;
        Ok(LogValue { log_abs: lp - nf * self.v.eval(x) - (j as f64 + 1.0) / 4.0 * nf.ln(), sign })
    }

    /// w_{j,n}(x) as a plain float.
    pub fn weight_w(&self, j: u32, x: f64) -> Result<f64> {
        Ok(self.weight_w_log(j, x)?.value())
    }

    /// I₀(x)…I_{m_max}(x) in double precision: the first three from p₀ and its
    /// derivatives, the rest by the three-term recurrence
    /// I_m = τx·I_{m−3} + ((m−3)/n)·I_{m−4}.
    pub fn moment_functions(&self, x: f64, m_max: usize) -> Result<Vec<f64>> {
        let nf = self.n as f64;
        let arg = nf.powf(0.75) * self.tau * x;
        let mut out = Vec::with_capacity(m_max + 1);
        for j in 0..=m_max.min(2) {
            let p = self.evaluator.pearcey(0, Complex64::new(arg, 0.0), j as u32)?.re;
            out.push(nf.powf(-(j as f64 + 1.0) / 4.0) * p);
        }
        for m in 3..=m_max {
            let mut v = self.tau * x * out[m - 3];
            if m >= 4 {
                v += (m as f64 - 3.0) / nf * out[m - 4];
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// ∫ y^j e^{−n y⁴/4} dy over ℝ: zero for odd j, ½(4/n)^{(j+1)/4}Γ((j+1)/4) otherwise.
pub fn quartic_moment_mp(n: usize, j: usize, prec: u32) -> Float {
    if j % 2 == 1 {
        return Float::with_val(prec, 0);
    }
    let e = Float::with_val(prec, (j + 1) as u32) / 4u32;
    let base = Float::with_val(prec, 4u32) / n as u32;
    let pw = Float::with_val(prec, base.pow(&e));
    Float::with_val(prec, pw * e.gamma()) / 2u32
}

/// I_m(x) in arbitrary precision from the positive series
/// I_m(x) = Σ_k (nτx)^k/k! · M_{m+k}, with M_j the quartic moments; negative
/// x is handled by the parity I_m(−x) = (−1)^m I_m(x).
pub fn moment_series_mp(n: usize, tau: &Float, x: &Float, m: usize) -> Float {
    let prec = x.prec().max(tau.prec());
    let ax = Float::with_val(prec, x.abs_ref());
    let c = Float::with_val(prec, tau * &ax) * n as u32; // nτ|x|
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
    // Even quartic moments by M_{j+4} = (j+1)/n · M_j from M₀ and M₂.
    let mut moments: Vec<Float> = Vec::new();
    let mut moment = |j: usize| -> Float {
        while moments.len() <= j / 2 {
            let i = 2 * moments.len();
            let next = if i < 4 {
                quartic_moment_mp(n, i, prec)
            } else {
                Float::with_val(prec, &moments[i / 2 - 2] * (i - 3) as u32) / n as u32
            };
            moments.push(next);
        }
        moments[j / 2].clone()
    };
    let mut sum = Float::with_val(prec, 0);
    let mut coef = Float::with_val(prec, 1); // c^k / k!
    let mut k = 0usize;
    loop {
        let idx = m + k;
        if idx % 2 == 0 {
            let term = Float::with_val(prec, &coef * &moment(idx));
            sum += &term;
            // Terms are positive; stop once past the peak and negligible.
            if (k > 8 && term < Float::with_val(prec, &sum * &eps)) || (c == 0 && k > 2) {
                break;
            }
        }
        k += 1;
        coef *= &c;
        coef /= k as u32;
    }
    if x.is_sign_negative() && m % 2 == 1 {
        sum = -sum;
    }
    sum
}

/// I₀(x)…I_{m_max}(x) in arbitrary precision: the first three from
/// [`moment_series_mp`], the rest by the recurrence
/// I_m = τx·I_{m−3} + ((m−3)/n)·I_{m−4}, which adds positive terms for x ≥ 0
/// (negative x by parity) and is therefore stable.
pub fn moment_functions_mp(n: usize, tau: &Float, x: &Float, m_max: usize) -> Vec<Float> {
    let prec = x.prec().max(tau.prec());
    let ax = Float::with_val(prec, x.abs_ref());
    let tx = Float::with_val(prec, tau * &ax);
    let mut out: Vec<Float> = (0..=m_max.min(2)).map(|m| moment_series_mp(n, tau, &ax, m)).collect();
    for m in 3..=m_max {
        let mut v = Float::with_val(prec, &tx * &out[m - 3]);
        if m >= 4 {
            v += Float::with_val(prec, &out[m - 4] * (m - 3) as u32) / n as u32;
        }
        out.push(v);
    }
    if x.is_sign_negative() {
        for (m, v) in out.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -v.clone();
            }
        }
    }
    out
}
