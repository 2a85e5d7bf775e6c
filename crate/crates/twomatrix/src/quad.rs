//! Quadrature rules and scalar root finders.
//!
//! Everything in this crate that integrates or solves a scalar equation goes
//! through this module: Gauss–Legendre panels, double-exponential
//! (tanh-sinh / exp-sinh) rules for endpoint singularities, an adaptive
//! Gauss–Kronrod (7,15) rule, and Brent / bisection root finders.
//! The rules are generic over [`QuadValue`] so the same code integrates
//! real and complex integrands.

use num_complex::Complex64;
use std::collections::HashMap;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Values that quadrature rules can accumulate: `f64` and `Complex64`.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + AddAssign + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Barycentric interpolation weights for `nodes`.
    pub bary: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on the three-term
    /// recurrence, seeded with the Tricomi approximation.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let bary = barycentric_weights(&nodes);
        GaussLegendre { nodes, weights, bary }
    }

    /// Shared, lazily computed rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(&self, a: f64, b: f64, mut f: F) -> T {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(m + h * x) * (w * h);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Barycentric weights for Lagrange interpolation at arbitrary distinct nodes,
/// normalised so the largest has magnitude one.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] *= nodes[j] - nodes[k];
            }
        }
        w[j] = 1.0 / w[j];
    }
    let m = w.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    w.iter().map(|v| v / m).collect()
}

/// Evaluates the barycentric interpolant through `(nodes, values)` at `x`.
pub fn barycentric_eval(nodes: &[f64], bary: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..nodes.len() {
        let d = x - nodes[i];
        if d == 0.0 {
            return values[i];
        }
        let t = bary[i] / d;
        num += t * values[i];
        den += t;
    }
    num / den
}

/// Tanh-sinh quadrature over a finite interval [a, b].
///
/// The integrand receives `(x, x − a, b − x)` with the endpoint distances
/// computed without cancellation, so integrable endpoint singularities can be
/// evaluated accurately. Returns the estimate and an error estimate.
pub fn tanh_sinh<T: QuadValue, F: FnMut(f64, f64, f64) -> T>(
    a: f64,
    b: f64,
    tol: f64,
    mut f: F,
) -> (T, f64) {
    let half = 0.5 * (b - a);
    if half == 0.0 {
        return (T::zero(), 0.0);
    }
    let pi2 = std::f64::consts::FRAC_PI_2;
    let tmax = 4.5;
    let mut h = 1.0;
    // Level 0: nodes at k·h for |k·h| ≤ tmax.
    let eval = |t: f64, f: &mut F| -> T {
        let s = pi2 * t.sinh();
        let c = s.cosh();
        // 1 − tanh(s) = 2 / (1 + e^{2s}), computed without cancellation.
        let e = (2.0 * s).exp();
        let dist_hi = 2.0 / (1.0 + e); // (1 − x) on [−1,1]
        let dist_lo = 2.0 * e / (1.0 + e); // (1 + x) on [−1,1]
        let w = pi2 * t.cosh() / (c * c);
        if !w.is_finite() || w == 0.0 {
            return T::zero();
        }
        let dl = half * dist_lo;
        let dr = half * dist_hi;
        if dl <= 0.0 || dr <= 0.0 {
            return T::zero();
        }
        let x = if dl < dr { a + dl } else { b - dr };
        let v = f(x, dl, dr);
        // Points that collapse onto a singular endpoint in floating point carry
        // negligible weight; drop them instead of propagating inf/NaN.
        if !v.magnitude().is_finite() {
            return T::zero();
        }
        v * (w * half)
    };
    let mut sum = eval(0.0, &mut f);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t, &mut f);
        sum += eval(-t, &mut f);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut err = f64::INFINITY;
    for _level in 1..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            sum += eval(t, &mut f);
            sum += eval(-t, &mut f);
            k += 2;
        }
        let next = sum * h;
        err = (next - estimate).magnitude();
        estimate = next;
        if err <= tol * estimate.magnitude().max(1e-300) || err < 1e-300 {
            break;
        }
    }
    (estimate, err)
}

/// Exp-sinh quadrature over [a, ∞) for integrands decaying at infinity.
/// The integrand receives `(x, x − a)`.
pub fn exp_sinh<T: QuadValue, F: FnMut(f64, f64) -> T>(a: f64, tol: f64, mut f: F) -> (T, f64) {
    let pi2 = std::f64::consts::FRAC_PI_2;
    let tmin = -4.0;
    let tmax = 4.0;
    let eval = |t: f64, f: &mut F| -> T {
        let u = pi2 * t.sinh();
        let d = u.exp();
        let w = d * pi2 * t.cosh();
        if !d.is_finite() || !w.is_finite() || d == 0.0 {
            return T::zero();
        }
        f(a + d, d) * w
    };
    let mut h = 0.5;
    let mut sum = eval(0.0, &mut f);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t, &mut f);
        if -t >= tmin {
            sum += eval(-t, &mut f);
        }
        k += 1;
    }
    let mut estimate = sum * h;
    let mut err = f64::INFINITY;
    for _level in 1..11 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            sum += eval(t, &mut f);
            if -t >= tmin {
                sum += eval(-t, &mut f);
            }
            k += 2;
        }
        let next = sum * h;
        err = (next - estimate).magnitude();
        estimate = next;
        if err <= tol * estimate.magnitude().max(1e-300) || err < 1e-300 {
            break;
        }
    }
    (estimate, err)
}

const GK_XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: QuadValue, F: FnMut(f64) -> T>(a: f64, b: f64, f: &mut F) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_XK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        kron += (f1 + f2) * GK_WK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * GK_WG[j / 2];
        }
    }
    let err = ((kron - gauss) * h).magnitude();
    (kron * h, err)
}

/// Globally adaptive Gauss–Kronrod (7,15) quadrature on [a, b].
/// Returns the estimate and the accumulated error estimate.
pub fn adaptive_gk<T: QuadValue, F: FnMut(f64) -> T>(
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
    mut f: F,
) -> (T, f64) {
    let (v, e) = gk15(a, b, &mut f);
    let mut intervals: Vec<(f64, f64, T, f64)> = vec![(a, b, v, e)];
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, iv) in intervals.iter().enumerate() {
            total += iv.2;
            err += iv.3;
            if iv.3 > intervals[worst].3 {
                worst = i;
            }
        }
        if err <= abs_tol.max(rel_tol * total.magnitude()) || intervals.len() >= max_intervals {
            return (total, err);
        }
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval cannot be split further in floating point.
            let (v, _) = gk15(lo, hi, &mut f);
            intervals.push((lo, hi, v, 0.0));
            continue;
        }
        let (v1, e1) = gk15(lo, mid, &mut f);
        let (v2, e2) = gk15(mid, hi, &mut f);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Brent's method for a root of `f` bracketed by [a, b].
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Some(b)
}

/// Plain bisection on a sign change; returns the midpoint of the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return None;
    }
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(12);
        let v: f64 = gl.integrate(-1.0, 2.0, |x| x.powi(23));
        let exact = (2f64.powi(24) - 1.0) / 24.0;
        assert!((v - exact).abs() < 1e-9 * exact);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let (v, _) = tanh_sinh(0.0, 1.0, 1e-14, |_, dl, _| dl.ln());
        assert!((v + 1.0f64).abs() < 1e-12);
        let (v, _) = tanh_sinh(0.0, 1.0, 1e-14, |_, _, dr| 1.0 / dr.sqrt());
        assert!((v - 2.0f64).abs() < 1e-10);
    }

    #[test]
    fn exp_sinh_integrates_algebraic_tail() {
        let (v, _) = exp_sinh(0.0, 1e-13, |x, _| 1.0 / (1.0 + x * x));
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn gauss_kronrod_and_brent() {
        let (v, _) = adaptive_gk(0.0, std::f64::consts::PI, 1e-14, 1e-14, 200, |x: f64| x.sin());
        assert!((v - 2.0f64).abs() < 1e-13);
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let gl = GaussLegendre::new(9);
        let vals: Vec<f64> = gl.nodes.iter().map(|x| x.powi(7) - 3.0 * x).collect();
        let y = barycentric_eval(&gl.nodes, &gl.bary, &vals, 0.3141);
        assert!((y - (0.3141f64.powi(7) - 3.0 * 0.3141)).abs() < 1e-13);
    }
}
