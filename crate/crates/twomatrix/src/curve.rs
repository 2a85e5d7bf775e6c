//! The spectral curve of a one-cut regular solution.
//!
//! * Cauchy transforms F_j of the equilibrium measures, with boundary values
//!   on their supports.
//! * The four-sheeted function ξ built from F₁, F₂, F₃ and the branch terms
//!   τ^{4/3}z^{1/3}, and the densities recovered from its jumps.
//! * The genus-zero parametrization z = w + (s² − t²)/w + s²t²/(3w³), whose
//!   four inverse branches w_j(z) label the sheets.
//! * g-functions (log transforms) and φ-functions (contour integrals of ξ).
//! * The outer parametrix M = C⁻¹M̂ with M̂_{kj} = N_k(w_j(z)).
//!
//! Points on the coordinate axes carry the quadrant they are approached
//! from ([`EvalPoint`]); every multivalued quantity is continued inside a
//! closed quadrant, which contains no branch cut in its interior.

use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::potential::{ConstraintSigma, GridMeasure};
use crate::quad::{bisect, tanh_sinh};
use nalgebra::{DMatrix, DVector, Matrix3, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// ω = e^{2πi/3}.
pub fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Open quadrants, counted counter-clockwise from Re z > 0, Im z > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::I, Quadrant::II, Quadrant::III, Quadrant::IV];

    pub fn index(self) -> usize {
        match self {
            Quadrant::I => 0,
            Quadrant::II => 1,
            Quadrant::III => 2,
            Quadrant::IV => 3,
        }
    }

    pub fn upper(self) -> bool {
        matches!(self, Quadrant::I | Quadrant::II)
    }

    pub fn right(self) -> bool {
        matches!(self, Quadrant::I | Quadrant::IV)
    }

    /// Unit vector along the quadrant's bisector.
    pub fn bisector(self) -> Complex64 {
        let re = if self.right() { 1.0 } else { -1.0 };
        let im = if self.upper() { 1.0 } else { -1.0 };
        Complex64::new(re, im) / 2f64.sqrt()
    }

    fn of_signs(right: bool, upper: bool) -> Quadrant {
        match (right, upper) {
            (true, true) => Quadrant::I,
            (false, true) => Quadrant::II,
            (false, false) => Quadrant::III,
            (true, false) => Quadrant::IV,
        }
    }
}

/// Side of an axis: on ℝ, `Plus` is the upper side; on iℝ (oriented upward),
/// `Plus` is the left side Re z < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// A point of the closed quadrant `quadrant`; on an axis it denotes the
/// boundary value taken from inside that quadrant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub z: Complex64,
    pub quadrant: Quadrant,
}

impl EvalPoint {
    /// A point in the closed quadrant `q`.
    pub fn new(z: Complex64, q: Quadrant) -> Result<Self> {
        let ok_re = if q.right() { z.re >= 0.0 } else { z.re <= 0.0 };
        let ok_im = if q.upper() { z.im >= 0.0 } else { z.im <= 0.0 };
        if !(ok_re && ok_im) || z == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain(format!("{z} is not a nonzero point of quadrant {q:?}")));
        }
        Ok(EvalPoint { z, quadrant: q })
    }

    /// A point off both axes.
    pub fn off_axis(z: Complex64) -> Result<Self> {
        if z.re == 0.0 || z.im == 0.0 {
            return Err(Error::Domain(format!("{z} lies on an axis; give a side")));
        }
        Ok(EvalPoint { z, quadrant: Quadrant::of_signs(z.re > 0.0, z.im > 0.0) })
    }

    /// The boundary value at a nonzero point of ℝ or iℝ from the given side.
    pub fn boundary(z: Complex64, side: Side) -> Result<Self> {
        let plus = side == Side::Plus;
        if z.im == 0.0 && z.re != 0.0 {
            Ok(EvalPoint { z, quadrant: Quadrant::of_signs(z.re > 0.0, plus) })
        } else if z.re == 0.0 && z.im != 0.0 {
            Ok(EvalPoint { z, quadrant: Quadrant::of_signs(!plus, z.im > 0.0) })
        } else {
            Err(Error::Domain(format!("{z} is not a nonzero point of ℝ or iℝ")))
        }
    }

    /// arg z in the closed quadrant's range (±π on the negative axis).
    pub fn arg(&self) -> f64 {
        if self.z.im == 0.0 && self.z.re < 0.0 {
            if self.quadrant.upper() {
                PI
            } else {
                -PI
            }
        } else {
            self.z.arg()
        }
    }

    /// Limit of the principal z^{1/3} from inside the quadrant.
    pub fn cbrt(&self) -> Complex64 {
        Complex64::from_polar(self.z.norm().cbrt(), self.arg() / 3.0)
    }

    /// Limit of the principal (−z)^{1/3} from inside the quadrant.
    pub fn neg_cbrt(&self) -> Complex64 {
        let th = if self.quadrant.upper() { self.arg() - PI } else { self.arg() + PI };
        Complex64::from_polar(self.z.norm().cbrt(), th / 3.0)
    }
}

/// Solves 2s − 2t²/(3s) = a, 2t − 2s²/(3t) = −c for s, t > 0 by damped
/// Newton from the c → 0 solution (9a/16, 3√3a/16).
pub fn solve_st(a: f64, c: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!("need a, c > 0, got ({a}, {c})")));
    }
    let res = |s: f64, t: f64| (2.0 * s - 2.0 * t * t / (3.0 * s) - a, 2.0 * t - 2.0 * s * s / (3.0 * t) + c);
    let (mut s, mut t) = (9.0 * a / 16.0, 3.0 * 3f64.sqrt() * a / 16.0);
    let mut trace = Vec::new();
    for _ in 0..100 {
        let (f1, f2) = res(s, t);
        let norm = f1.hypot(f2);
        trace.push(norm);
        if norm <= 1e-13 * (a + c) {
            if s * s <= 3.0 * t * t {
                return Err(Error::numerical("solution violates s² > 3t²", trace));
            }
            return Ok((s, t));
        }
        let j11 = 2.0 + 2.0 * t * t / (3.0 * s * s);
        let j12 = -4.0 * t / (3.0 * s);
        let j21 = -4.0 * s / (3.0 * t);
        let j22 = 2.0 + 2.0 * s * s / (3.0 * t * t);
        let det = j11 * j22 - j12 * j21;
        let ds = (f1 * j22 - f2 * j12) / det;
        let dt = (j11 * f2 - j21 * f1) / det;
        // Halve the step until it stays positive and reduces the residual.
        let mut lam = 1.0;
        loop {
            let (sn, tn) = (s - lam * ds, t - lam * dt);
            if sn > 0.0 && tn > 0.0 {
                let (g1, g2) = res(sn, tn);
                if g1.hypot(g2) < norm || lam < 1e-3 {
                    s = sn;
                    t = tn;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-12 {
                return Err(Error::numerical("Newton for (s, t) left the positive quadrant", trace));
            }
        }
    }
    Err(Error::numerical("Newton for (s, t) did not converge", trace))
}

/// Independent solution of the (s, t) equations: t is eliminated through the
/// second equation and the first is solved by bisection in s.
pub fn solve_st_bisection(a: f64, c: f64) -> Result<(f64, f64)> {
    let t_of = |s: f64| (-3.0 * c + (9.0 * c * c + 48.0 * s * s).sqrt()) / 12.0;
    let f = |s: f64| {
        let t = t_of(s);
        2.0 * s - 2.0 * t * t / (3.0 * s) - a
    };
    let s = bisect(f, 1e-12 * a, a, 1e-15 * a).ok_or_else(|| Error::numerical("bisection for s failed", vec![a, c]))?;
    Ok((s, t_of(s)))
}

/// The genus-zero curve w⁴ − zw³ + (s² − t²)w² + s²t²/3 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalCurve {
    pub a: f64,
    pub c: f64,
    pub s: f64,
    pub t: f64,
}

/// A root w_j(z) together with the continued square root r_j of
/// (w² − s²)(w² + t²), i.e. R(w) = w²√(dz/dw).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetRoot {
    pub w: Complex64,
    pub r: Complex64,
}

impl RationalCurve {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        let (s, t) = solve_st(a, c)?;
        Ok(RationalCurve { a, c, s, t })
    }

    pub fn z_of_w(&self, w: Complex64) -> Complex64 {
        let (s2, t2) = (self.s * self.s, self.t * self.t);
        w + (s2 - t2) / w + s2 * t2 / (3.0 * w * w * w)
    }

    pub fn dz_dw(&self, w: Complex64) -> Complex64 {
        let (s2, t2) = (self.s * self.s, self.t * self.t);
        (w * w - s2) * (w * w + t2) / w.powi(4)
    }

    /// (w² − s²)(w² + t²).
    fn radicand(&self, w: Complex64) -> Complex64 {
        (w * w - self.s * self.s) * (w * w + self.t * self.t)
    }

    /// Product of the four roots, s²t²/3.
    pub fn root_product(&self) -> f64 {
        (self.s * self.t).powi(2) / 3.0
    }

    /// The branch points a, −a, ic, −ic.
    pub fn branch_points(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.a, 0.0),
            Complex64::new(-self.a, 0.0),
            Complex64::new(0.0, self.c),
            Complex64::new(0.0, -self.c),
        ]
    }

    fn quartic(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        let u = self.s * self.s - self.t * self.t;
        let k = self.root_product();
        let p = (((w - z) * w + u) * w) * w + k;
        let dp = ((4.0 * w - 3.0 * z) * w + 2.0 * u) * w;
        (p, dp)
    }

    fn newton(&self, z: Complex64, mut w: Complex64) -> Option<Complex64> {
        for _ in 0..60 {
            let (p, dp) = self.quartic(z, w);
            if dp == Complex64::new(0.0, 0.0) {
                return None;
            }
            let step = p / dp;
            w -= step;
            if step.norm() <= 1e-15 * w.norm().max(1e-300) {
                return Some(w);
            }
        }
        let (p, _) = self.quartic(z, w);
        (p.norm() <= 1e-12 * (1.0 + z.norm()).powi(4)).then_some(w)
    }

    /// All four roots by Aberth iteration from the given guesses.
    fn all_roots(&self, z: Complex64, guess: [Complex64; 4]) -> Result<[Complex64; 4]> {
        let mut w = guess;
        for _ in 0..500 {
            let mut worst: f64 = 0.0;
            for i in 0..4 {
                let (p, dp) = self.quartic(z, w[i]);
                let ratio = p / dp;
                let sum: Complex64 = (0..4).filter(|&j| j != i).map(|j| 1.0 / (w[i] - w[j])).sum();
                let step = ratio / (1.0 - ratio * sum);
                w[i] -= step;
                worst = worst.max(step.norm() / w[i].norm().max(1e-300));
            }
            if worst < 1e-15 {
                return Ok(w);
            }
        }
        Err(Error::numerical("Aberth iteration for the quartic did not converge", vec![z.re, z.im]))
    }

    fn reference_radius(&self) -> f64 {
        10.0 * self.a.max(self.c)
    }

    /// Sheet-ordered roots at the reference point of quadrant q. Sheet 1 is the
    /// root ~ z; sheets 2–4 are the small roots ~ κ/b_j(z) with κ³ = s²t²/3 and
    /// b₂ = z^{1/3} (Re z > 0) or −(−z)^{1/3} (Re z < 0), b₃ = −(−z)^{1/3}
    /// (Re z > 0) or z^{1/3} (Re z < 0), b₄ = e^{∓2πi/3}z^{1/3} (Im z ≷ 0).
    fn reference_roots(&self, q: Quadrant) -> Result<(Complex64, [SheetRoot; 4])> {
        let z = self.reference_radius() * q.bisector();
        let p = EvalPoint::off_axis(z)?;
        let kappa = self.root_product().cbrt();
        let (cb, ncb) = (p.cbrt(), p.neg_cbrt());
        let b2 = if q.right() { cb } else { -ncb };
        let b3 = if q.right() { -ncb } else { cb };
        let b4 = if q.upper() { omega().conj() * cb } else { omega() * cb };
        let u = self.s * self.s - self.t * self.t;
        let guess = [z - u / z, kappa / b2, kappa / b3, kappa / b4];
        let roots = self.all_roots(z, guess)?;
        // Match guesses to roots; the guesses are far apart at the reference.
        let mut out = [SheetRoot { w: Complex64::new(0.0, 0.0), r: Complex64::new(0.0, 0.0) }; 4];
        let mut used = [false; 4];
        for (j, g) in guess.iter().enumerate() {
            let k = (0..4)
                .filter(|&k| !used[k])
                .min_by(|&x, &y| (roots[x] - g).norm().total_cmp(&(roots[y] - g).norm()))
                .unwrap();
            used[k] = true;
            let w = roots[k];
            out[j] = SheetRoot { w, r: self.radicand(w).sqrt() };
        }
        Ok((z, out))
    }

    /// The roots w_j(z), j = 1..4, in sheet order, each with its square root
    /// R-factor continued from the quadrant's reference point.
    pub fn sheet_roots(&self, p: &EvalPoint) -> Result<[SheetRoot; 4]> {
        let scale = self.a.max(self.c);
        for b in self.branch_points() {
            if (p.z - b).norm() < 1e-8 * scale {
                return Err(Error::BranchPoint(format!("{} is a branch point", p.z)));
            }
        }
        let (z0, mut roots) = self.reference_roots(p.quadrant)?;
        let (r0, th0) = (z0.norm(), z0.arg());
        let (r1, th1) = (p.z.norm(), p.arg());
        // Radial leg (geometric in |z|) then an arc, both inside the quadrant.
        let path = |lam: f64| -> Complex64 {
            if lam <= 1.0 {
                Complex64::from_polar(r0 * (r1 / r0).powf(lam), th0)
            } else {
                Complex64::from_polar(r1, th0 + (lam - 1.0) * (th1 - th0))
            }
        };
        let mut lam = 0.0f64;
        let mut h = 0.05f64;
        while lam < 2.0 {
            let next = (lam + h).min(2.0);
            let z = if next == 2.0 { p.z } else { path(next) };
            match self.advance(z, &roots) {
                Some(r) => {
                    roots = r;
                    lam = next;
                    h = (h * 1.5).min(0.1);
                }
                None => {
                    h *= 0.5;
                    if h < 1e-12 {
                        return Err(Error::numerical("root continuation stalled", vec![p.z.re, p.z.im, lam]));
                    }
                }
            }
        }
        Ok(roots)
    }

    /// One continuation step; `None` when the step is too large to follow the
    /// roots (or the square roots) unambiguously.
    fn advance(&self, z: Complex64, old: &[SheetRoot; 4]) -> Option<[SheetRoot; 4]> {
        let sep = |v: &[Complex64; 4]| {
            let mut m = f64::INFINITY;
            for i in 0..4 {
                for j in i + 1..4 {
                    m = m.min((v[i] - v[j]).norm());
                }
            }
            m
        };
        let old_w = [old[0].w, old[1].w, old[2].w, old[3].w];
        let old_sep = sep(&old_w);
        let mut new = *old;
        for j in 0..4 {
            let w = self.newton(z, old[j].w)?;
            if (w - old[j].w).norm() > 0.25 * old_sep {
                return None;
            }
            let rad = self.radicand(w);
            let rad_old = old[j].r * old[j].r;
            if (rad - rad_old).norm() > 0.5 * rad_old.norm() {
                return None;
            }
            let mut r = rad.sqrt();
            if (r - old[j].r).norm() > (r + old[j].r).norm() {
                r = -r;
            }
            new[j] = SheetRoot { w, r };
        }
        let new_w = [new[0].w, new[1].w, new[2].w, new[3].w];
        (sep(&new_w) > 0.25 * old_sep.min(1.0) * 1e-6).then_some(new)
    }

    /// The four roots in sheet order.
    pub fn sheet_maps(&self, p: &EvalPoint) -> Result<[Complex64; 4]> {
        let r = self.sheet_roots(p)?;
        Ok([r[0].w, r[1].w, r[2].w, r[3].w])
    }
}

/// Cauchy transform F(z) = ∫ dμ(t)/(z − t) for z off the support.
pub fn cauchy_transform(m: &GridMeasure, z: Complex64) -> Result<Complex64> {
    m.cauchy_transform(z)
}

/// Cauchy transform with boundary values on the support: on ℝ,
/// F± = PV ∓ iπρ (+ from above); on iℝ, F± = −i·PV ∓ πρ (+ from the left).
pub fn cauchy_boundary(m: &GridMeasure, p: &EvalPoint) -> Result<Complex64> {
    if !m.on_support(p.z, 1e-13) {
        return m.cauchy_transform(p.z);
    }
    let t = m.axis.coordinate(p.z).re;
    let pv = m.cauchy_pv(t);
    let rho = m.density_at(t);
    Ok(match m.axis {
        crate::potential::Axis::Real => {
            let sign = if p.quadrant.upper() { -1.0 } else { 1.0 };
            Complex64::new(pv, sign * PI * rho)
        }
        _ => {
            let sign = if p.quadrant.right() { 1.0 } else { -1.0 };
            Complex64::new(sign * PI * rho, -pv)
        }
    })
}

/// Result of fitting the constant α in F₂ = 2/(3z) − αz^{−5/3} + … .
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    /// Fit of F₂ − F₁ on the positive real axis.
    pub alpha: f64,
    /// Imaginary part of a complex fit of F₂ − F₁ on the ray arg z = π/4.
    pub alpha_imag: f64,
    /// Fit of F₃ on the positive imaginary axis (coefficient pattern ω²α).
    pub alpha_from_f3: f64,
    /// |alpha_from_f3 − alpha|/|alpha|.
    pub discrepancy: f64,
    /// The two fits agree within 5%.
    pub consistent: bool,
}

const ALPHA_POWERS: [f64; 5] = [5.0, 7.0, 9.0, 11.0, 13.0];

/// Least squares for real coefficients of complex basis functions.
fn real_lsq(rows: &[(Vec<Complex64>, Complex64)]) -> Result<Vec<f64>> {
    let n = rows[0].0.len();
    let mut a = DMatrix::<f64>::zeros(2 * rows.len(), n);
    let mut b = DVector::<f64>::zeros(2 * rows.len());
    for (i, (basis, y)) in rows.iter().enumerate() {
        for k in 0..n {
            a[(2 * i, k)] = basis[k].re;
            a[(2 * i + 1, k)] = basis[k].im;
        }
        b[2 * i] = y.re;
        b[2 * i + 1] = y.im;
    }
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).map_err(|e| Error::numerical(format!("least squares failed: {e}"), vec![]))?;
    Ok(x.iter().copied().collect())
}

/// Fits α from F₂ − F₁ + 1/(3z) = −Σ c_j z^{−j/3} on [20, 2000] (Re z > 0)
/// and from F₃ − 1/(3z) = Σ c_j ω^{−2j} z^{−j/3} on i[20, 2000] (Im z > 0),
/// with j = 5, 7, 9, 11, 13 and α = c₅.
pub fn estimate_alpha(sol: &EquilibriumSolution) -> Result<AlphaEstimate> {
    let radii: Vec<f64> = (0..40).map(|k| 20.0 * 100f64.powf(k as f64 / 39.0)).collect();
    let pow = |z: Complex64, e: f64| (z.ln() * e).exp();
    // Rows are scaled by |z|^{5/3} so every radius carries similar weight.
    let mut rows2 = Vec::new();
    let mut rows3 = Vec::new();
    let mut rows_c = Vec::new();
    for &r in &radii {
        let w = r.powf(5.0 / 3.0);
        let z = Complex64::new(r, 0.0);
        let y = (sol.mu2.cauchy_transform(z)? - sol.mu1.cauchy_transform(z)? + 1.0 / (3.0 * z)) * w;
        rows2.push((ALPHA_POWERS.iter().map(|&j| -pow(z, -j / 3.0) * w).collect(), y));
        let z = Complex64::new(0.0, r);
        let y = (sol.mu3.cauchy_transform(z)? - 1.0 / (3.0 * z)) * w;
        rows3.push((ALPHA_POWERS.iter().map(|&j| omega().powf(-2.0 * j) * pow(z, -j / 3.0) * w).collect(), y));
        let z = Complex64::from_polar(r, PI / 4.0);
        let y = (sol.mu2.cauchy_transform(z)? - sol.mu1.cauchy_transform(z)? + 1.0 / (3.0 * z)) * w;
        // Complex coefficients: real and imaginary parts as separate unknowns.
        let basis: Vec<Complex64> = ALPHA_POWERS
            .iter()
            .flat_map(|&j| {
                let f = -pow(z, -j / 3.0) * w;
                [f, f * Complex64::new(0.0, 1.0)]
            })
            .collect();
        rows_c.push((basis, y));
    }
    let alpha = real_lsq(&rows2)?[0];
    let alpha_from_f3 = real_lsq(&rows3)?[0];
    let alpha_imag = real_lsq(&rows_c)?[1];
    let discrepancy = (alpha_from_f3 - alpha).abs() / alpha.abs().max(1e-300);
    Ok(AlphaEstimate { alpha, alpha_imag, alpha_from_f3, discrepancy, consistent: discrepancy <= 0.05 })
}

/// The spectral curve of a converged equilibrium solution.
pub struct SpectralCurve<'a> {
    pub sol: &'a EquilibriumSolution,
    pub curve: RationalCurve,
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
    pub alpha_estimate: AlphaEstimate,
    pub omega: Complex64,
}

impl<'a> SpectralCurve<'a> {
    pub fn new(sol: &'a EquilibriumSolution) -> Result<Self> {
        let curve = RationalCurve::new(sol.a, sol.c)?;
        let alpha_estimate = estimate_alpha(sol)?;
        Ok(SpectralCurve {
            sol,
            curve,
            s: curve.s,
            t: curve.t,
            alpha: alpha_estimate.alpha,
            alpha_estimate,
            omega: omega(),
        })
    }

    fn measure(&self, j: usize) -> Result<&GridMeasure> {
        match j {
            1 => Ok(&self.sol.mu1),
            2 => Ok(&self.sol.mu2),
            3 => Ok(&self.sol.mu3),
            _ => Err(Error::Domain(format!("measure index {j} ∉ {{1, 2, 3}}"))),
        }
    }

    /// F_j at p (boundary value from p's quadrant when p is on the support).
    pub fn cauchy(&self, j: usize, p: &EvalPoint) -> Result<Complex64> {
        cauchy_boundary(self.measure(j)?, p)
    }

    fn kappa(&self) -> f64 {
        self.sol.tau.powf(4.0 / 3.0)
    }

    /// ξ_j at p.
    pub fn xi(&self, sheet: usize, p: &EvalPoint) -> Result<Complex64> {
        let k = self.kappa();
        let q = p.quadrant;
        Ok(match sheet {
            1 => self.sol.v.deriv_complex(p.z) - self.cauchy(1, p)?,
            2 => {
                let base = self.cauchy(1, p)? - self.cauchy(2, p)?;
                if q.right() {
                    base + k * p.cbrt()
                } else {
                    base - k * p.neg_cbrt()
                }
            }
            3 => {
                let base = self.cauchy(2, p)? - self.cauchy(3, p)?;
                if q.right() {
                    base - k * p.neg_cbrt()
                } else {
                    base + k * p.cbrt()
                }
            }
            4 => {
                let rot = if q.upper() { omega().conj() } else { omega() };
                self.cauchy(3, p)? + rot * k * p.cbrt()
            }
            _ => return Err(Error::Domain(format!("sheet {sheet} ∉ {{1, 2, 3, 4}}"))),
        })
    }

    /// ξ_j at a point off both axes.
    pub fn xi_at(&self, sheet: usize, z: Complex64) -> Result<Complex64> {
        self.xi(sheet, &EvalPoint::off_axis(z)?)
    }

    /// The four roots w_j(z) in sheet order.
    pub fn sheet_maps(&self, p: &EvalPoint) -> Result<[Complex64; 4]> {
        self.curve.sheet_maps(p)
    }

    /// Density of μ_which at the support coordinate t, from the jump of ξ
    /// across the support. Boundary values are limits of ξ at distance δ off
    /// the axis, extrapolated (three-level Richardson) to δ = 0.
    pub fn density_from_xi(&self, which: usize, t: f64) -> Result<f64> {
        let (sheet, dist) = match which {
            1 => {
                if t.abs() >= self.sol.a {
                    return Err(Error::Domain(format!("{t} is outside the support of μ₁")));
                }
                (1, self.sol.a - t.abs())
            }
            2 => (2, t.abs().min((t.abs() - self.sol.c).abs())),
            3 => (3, t.abs()),
            _ => return Err(Error::Domain(format!("measure index {which} ∉ {{1, 2, 3}}"))),
        };
        if dist <= 0.0 {
            return Err(Error::Domain(format!("{t} is a singular point of μ_{which}")));
        }
        let jump = |d: f64| -> Result<Complex64> {
            let (zp, zm) = if which == 2 {
                (Complex64::new(-d, t), Complex64::new(d, t))
            } else {
                (Complex64::new(t, d), Complex64::new(t, -d))
            };
            Ok(self.xi_at(sheet, zp)? - self.xi_at(sheet, zm)?)
        };
        let d0 = 1e-3 * dist.min(1.0);
        let (j1, j2, j4) = (jump(d0)?, jump(0.5 * d0)?, jump(0.25 * d0)?);
        let r1 = j2 * 2.0 - j1;
        let r2 = j4 * 2.0 - j2;
        let j = (r2 * 4.0 - r1) / 3.0;
        let k = self.kappa();
        Ok(match which {
            1 => (j / Complex64::new(0.0, 2.0 * PI)).re,
            2 => j.re / (2.0 * PI) + ConstraintSigma { tau: self.sol.tau }.density(t),
            _ => (j / Complex64::new(0.0, 2.0 * PI)).re - 3f64.sqrt() / (2.0 * PI) * k * t.abs().cbrt(),
        })
    }

    /// g_j(z) = ∫ log(z − s) dμ_j(s): principal logarithm for j = 1, 3; for
    /// j = 2 the argument is taken in (−π/2, 3π/2).
    pub fn g_function(&self, j: usize, p: &EvalPoint) -> Result<Complex64> {
        let m = self.measure(j)?;
        let z = p.z;
        let upper = p.quadrant.upper();
        let left = !p.quadrant.right();
        let re = -m.log_potential(z);
        let im = if j == 2 {
            m.integrate_kernel(z, |_, pt| {
                let d = z - pt;
                if d.re == 0.0 && d.im < 0.0 {
                    if left {
                        1.5 * PI
                    } else {
                        -0.5 * PI
                    }
                } else {
                    let th = d.arg();
                    if th < -0.5 * PI {
                        th + 2.0 * PI
                    } else {
                        th
                    }
                }
            })
        } else {
            m.integrate_kernel(z, |_, pt| {
                let d = z - pt;
                if d.im == 0.0 && d.re < 0.0 {
                    if upper {
                        PI
                    } else {
                        -PI
                    }
                } else {
                    d.arg()
                }
            })
        };
        Ok(Complex64::new(re, im))
    }

    /// φ_j(z): −½∫(ξ_j − ξ_{j+1}) from the base point (a for j = 1, ±ic for
    /// j = 2 by the sign of Im z, 0 for j = 3 with the offset πi/6) along a
    /// two-segment path through the quadrant of z.
    pub fn phi_function(&self, j: usize, p: &EvalPoint) -> Result<Complex64> {
        let q = p.quadrant;
        let (base, offset) = match j {
            1 => (Complex64::new(self.sol.a, 0.0), Complex64::new(0.0, 0.0)),
            2 => (Complex64::new(0.0, if q.upper() { self.sol.c } else { -self.sol.c }), Complex64::new(0.0, 0.0)),
            3 => (Complex64::new(0.0, 0.0), Complex64::new(0.0, PI / 6.0)),
            _ => return Err(Error::Domain(format!("φ index {j} ∉ {{1, 2, 3}}"))),
        };
        if j == 2 && p.z.re == 0.0 && p.z.im.abs() >= self.sol.c {
            return Err(Error::Domain("φ₂ is not defined on K_c".into()));
        }
        if p.z == base {
            return Ok(offset);
        }
        // The waypoint lies in the open quadrant, within the window when the
        // first segment has to cross iℝ.
        let m = self.sol.a.min(self.sol.c);
        let waypoint = q.bisector() * (m / 2f64.sqrt());
        let integrand = |y: Complex64| -> Result<Complex64> {
            let pt = if y.re != 0.0 && y.im != 0.0 {
                EvalPoint::off_axis(y)?
            } else {
                EvalPoint::new(y, q)?
            };
            Ok((self.xi(j, &pt)? - self.xi(j + 1, &pt)?) * -0.5)
        };
        let mut total = offset;
        for (from, to) in [(base, waypoint), (waypoint, p.z)] {
            let dir = to - from;
            let mut failure = None;
            let (v, _) = tanh_sinh(0.0, 1.0, 1e-10, |_, dl, dr| {
                let y = if dl < dr { from + dir * dl } else { to - dir * dr };
                match integrand(y) {
                    Ok(f) => f * dir,
                    Err(e) => {
                        failure.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
            total += v;
        }
        Ok(total)
    }
}

/// The constant matrices of the model problem's asymptotics in each
/// quadrant (rows/columns 2–4), normalised to determinant 1 and to the jumps
/// of M on ℝ and iℝ.
pub fn a_matrices() -> [Matrix3<Complex64>; 4] {
    let w = omega();
    let w2 = w * w;
    let o = Complex64::new(1.0, 0.0);
    let pre = Complex64::new(0.0, 1.0 / 3f64.sqrt());
    let a1 = Matrix3::new(-o, w, w2, -o, o, o, -o, w2, w) * pre;
    let a2 = Matrix3::new(w, o, w2, o, o, o, w2, o, w) * pre;
    let a3 = Matrix3::new(w2, o, w, o, o, o, w, o, w2) * pre;
    let a4 = Matrix3::new(-o, w2, w, -o, o, o, -o, w, w2) * pre;
    let flip = Matrix3::from_diagonal(&nalgebra::Vector3::new(-o, -o, o));
    [-a1, -a2, a3 * flip, a4 * flip]
}

/// Expected asymptotic form diag(1, z^{1/3}, 1, z^{−1/3})·blockdiag(1, A_q).
pub fn a_asymptotic(p: &EvalPoint) -> Matrix4<Complex64> {
    let am = a_matrices()[p.quadrant.index()];
    let cb = p.cbrt();
    let mut out = Matrix4::<Complex64>::zeros();
    out[(0, 0)] = Complex64::new(1.0, 0.0);
    let scale = [cb, Complex64::new(1.0, 0.0), 1.0 / cb];
    for i in 0..3 {
        for k in 0..3 {
            out[(i + 1, k + 1)] = scale[i] * am[(i, k)];
        }
    }
    out
}

/// Jump matrix J of the model problem (M₊ = M₋J) at a nonzero point of ℝ or iℝ.
pub fn model_jump(z: Complex64, a: f64, c: f64) -> Result<Matrix4<Complex64>> {
    let o = Complex64::new(1.0, 0.0);
    let n = Complex64::new(0.0, 0.0);
    let mut j = Matrix4::<Complex64>::identity();
    if z.im == 0.0 && z.re != 0.0 {
        if z.re.abs() < a {
            j = Matrix4::new(n, o, n, n, -o, n, n, n, n, n, n, o, n, n, -o, n);
        } else {
            j[(2, 2)] = n;
            j[(3, 3)] = n;
            j[(2, 3)] = o;
            j[(3, 2)] = -o;
        }
    } else if z.re == 0.0 && z.im != 0.0 {
        if z.im.abs() > c {
            j[(1, 1)] = n;
            j[(2, 2)] = n;
            j[(1, 2)] = -o;
            j[(2, 1)] = o;
        }
    } else {
        return Err(Error::Domain(format!("{z} is not a nonzero point of ℝ or iℝ")));
    }
    Ok(j)
}

/// Spot checks of the outer parametrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametrixReport {
    /// max |det M − 1| over the sampled points.
    pub det_error: f64,
    /// max ‖M₊ − M₋J‖/‖M₊‖ over the sampled cut points.
    pub jump_error: f64,
    /// (|z|, max over sampled directions of ‖M A⁻¹ − I‖).
    pub asymptotic: Vec<(f64, f64)>,
}

/// The outer parametrix M(z) = C⁻¹M̂(z), M̂_{kj} = ε_{q,j} w_j^{k−1}/(w_j r_j).
#[derive(Debug, Clone)]
pub struct Parametrix {
    pub curve: RationalCurve,
    /// Column signs ε_{q,j} fixing the branch of the square root per quadrant.
    pub signs: [[f64; 4]; 4],
    /// Normalization C = lim M̂A⁻¹ at infinity.
    pub c_matrix: Matrix4<Complex64>,
    c_inv: Matrix4<Complex64>,
    /// The constant det M̂.
    pub det_hat: Complex64,
    pub report: ParametrixReport,
}

fn raw_columns(curve: &RationalCurve, p: &EvalPoint) -> Result<Matrix4<Complex64>> {
    let roots = curve.sheet_roots(p)?;
    let mut m = Matrix4::<Complex64>::zeros();
    for (j, sr) in roots.iter().enumerate() {
        let d = 1.0 / (sr.w * sr.r);
        let mut pw = Complex64::new(1.0, 0.0);
        for k in 0..4 {
            m[(k, j)] = pw * d;
            pw *= sr.w;
        }
    }
    Ok(m)
}

/// Builds M from the curve: sign choices from the jump relations on each
/// piece of ℝ ∪ iℝ, C by averaging M̂A⁻¹ over a circle enclosing all cuts.
pub fn build_outer_parametrix(curve: &RationalCurve) -> Result<Parametrix> {
    let (a, c) = (curve.a, curve.c);
    // Sample point on each piece: (z, relations (col₊, col₋, sign)).
    let jr = |z: Complex64| -> Result<Vec<(usize, usize, f64)>> {
        let j = model_jump(z, a, c)?;
        let mut rel = Vec::new();
        for col in 0..4 {
            let row = (0..4).find(|&r| j[(r, col)].norm() > 0.5).unwrap();
            rel.push((col, row, j[(row, col)].re));
        }
        Ok(rel)
    };
    let pieces = [
        Complex64::new(0.5 * a, 0.0),
        Complex64::new(2.0 * a, 0.0),
        Complex64::new(-0.5 * a, 0.0),
        Complex64::new(-2.0 * a, 0.0),
        Complex64::new(0.0, 0.5 * c),
        Complex64::new(0.0, 2.0 * c),
        Complex64::new(0.0, -0.5 * c),
        Complex64::new(0.0, -2.0 * c),
    ];
    // Edges (q₊, j₊, q₋, j₋, λ) with ε₊ = λ ε₋.
    let mut edges = Vec::new();
    for z in pieces {
        let pp = EvalPoint::boundary(z, Side::Plus)?;
        let pm = EvalPoint::boundary(z, Side::Minus)?;
        let (cp, cm) = (raw_columns(curve, &pp)?, raw_columns(curve, &pm)?);
        for (jp, jm, sign) in jr(z)? {
            let (u, v) = (cp.column(jp), cm.column(jm));
            let ratio = u.dot(&v.map(|x| x.conj())) / v.norm_squared();
            let resid = (u - v * ratio).norm() / u.norm();
            if resid > 1e-6 || (ratio.norm() - 1.0).abs() > 1e-6 || ratio.im.abs() > 1e-6 {
                return Err(Error::Numerical {
                    message: format!("columns {jp}/{jm} at {z} are not related by a sign: sheet ordering failed"),
                    trace: vec![resid, ratio.re, ratio.im],
                });
            }
            edges.push((pp.quadrant.index(), jp, pm.quadrant.index(), jm, ratio.re.signum() * sign));
        }
    }
    let mut signs = [[0.0f64; 4]; 4];
    signs[0][0] = 1.0;
    loop {
        let mut changed = false;
        for &(qp, jp, qm, jm, lam) in &edges {
            let (ep, em) = (signs[qp][jp], signs[qm][jm]);
            if ep == 0.0 && em != 0.0 {
                signs[qp][jp] = lam * em;
                changed = true;
            } else if em == 0.0 && ep != 0.0 {
                signs[qm][jm] = lam * ep;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if signs.iter().flatten().any(|&e| e == 0.0) {
        return Err(Error::numerical("sign assignment left columns undetermined", vec![]));
    }
    if let Some(e) = edges.iter().find(|e| signs[e.0][e.1] != e.4 * signs[e.2][e.3]) {
        return Err(Error::numerical("jump relations give inconsistent signs", vec![e.0 as f64, e.1 as f64]));
    }
    let mut par = Parametrix {
        curve: *curve,
        signs,
        c_matrix: Matrix4::identity(),
        c_inv: Matrix4::identity(),
        det_hat: Complex64::new(0.0, 0.0),
        report: ParametrixReport { det_error: 0.0, jump_error: 0.0, asymptotic: vec![] },
    };
    // M̂A⁻¹ is analytic and single valued outside the cuts' disc, so its
    // circle mean is the constant term C.
    let radius = 4.0 * a.max(c);
    let n = 64;
    let mut acc = Matrix4::<Complex64>::zeros();
    let mut dets = Vec::with_capacity(n);
    for k in 0..n {
        let z = Complex64::from_polar(radius, (k as f64 + 0.5) * 2.0 * PI / n as f64);
        let p = EvalPoint::off_axis(z)?;
        let mh = par.m_hat(&p)?;
        dets.push(mh.determinant());
        let ainv = a_asymptotic(&p)
            .try_inverse()
            .ok_or_else(|| Error::numerical("A(z) is singular", vec![z.re, z.im]))?;
        acc += mh * ainv;
    }
    let c_matrix = acc / Complex64::new(n as f64, 0.0);
    let det_hat = dets.iter().sum::<Complex64>() / n as f64;
    let spread = dets.iter().map(|d| (d - det_hat).norm()).fold(0.0, f64::max) / det_hat.norm();
    if spread > 1e-8 {
        return Err(Error::numerical("det M̂ is not constant: sheet ordering failed", vec![spread]));
    }
    let c_inv = c_matrix
        .try_inverse()
        .filter(|_| c_matrix.determinant().norm() > 1e-12 * det_hat.norm())
        .ok_or_else(|| Error::numerical("normalization matrix C is singular: sheet ordering failed", vec![]))?;
    par.c_matrix = c_matrix;
    par.c_inv = c_inv;
    par.det_hat = det_hat;
    par.report = par.verify(50, 20, &[10.0, 20.0, 40.0], 7)?;
    Ok(par)
}

impl Parametrix {
    /// M̂(z) with the sign-corrected columns.
    pub fn m_hat(&self, p: &EvalPoint) -> Result<Matrix4<Complex64>> {
        let mut m = raw_columns(&self.curve, p)?;
        let q = p.quadrant.index();
        for j in 0..4 {
            let e = self.signs[q][j];
            for k in 0..4 {
                m[(k, j)] *= e;
            }
        }
        Ok(m)
    }

    /// M(z) = C⁻¹M̂(z).
    pub fn m(&self, p: &EvalPoint) -> Result<Matrix4<Complex64>> {
        Ok(self.c_inv * self.m_hat(p)?)
    }

    /// Checks det M = 1 at `n_det` random points, M₊ = M₋J at `n_jump` random
    /// cut points, and ‖MA⁻¹ − I‖ on the given radii.
    pub fn verify(&self, n_det: usize, n_jump: usize, radii: &[f64], seed: u64) -> Result<ParametrixReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, c) = (self.curve.a, self.curve.c);
        let scale = a.max(c);
        let mut det_error: f64 = 0.0;
        for _ in 0..n_det {
            let r = scale * (0.05 + 4.0 * rng.gen::<f64>());
            let th = 2.0 * PI * rng.gen::<f64>();
            let z = Complex64::from_polar(r, th);
            let Ok(p) = EvalPoint::off_axis(z) else { continue };
            det_error = det_error.max((self.m(&p)?.determinant() - 1.0).norm());
        }
        let mut jump_error: f64 = 0.0;
        for k in 0..n_jump {
            let u: f64 = rng.gen_range(0.02..0.98);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            // Cycle through the four kinds of cut piece.
            let z = match k % 4 {
                0 => Complex64::new(sign * a * u, 0.0),
                1 => Complex64::new(sign * a * (1.0 + 3.0 * u), 0.0),
                2 => Complex64::new(0.0, sign * c * (1.0 + 3.0 * u)),
                _ => Complex64::new(0.0, sign * c * u),
            };
            let mp = self.m(&EvalPoint::boundary(z, Side::Plus)?)?;
            let mm = self.m(&EvalPoint::boundary(z, Side::Minus)?)?;
            let err = (mp - mm * model_jump(z, a, c)?).norm() / mp.norm();
            jump_error = jump_error.max(err);
        }
        let mut asymptotic = Vec::new();
        for &r in radii {
            let mut worst: f64 = 0.0;
            for k in 0..16 {
                let z = Complex64::from_polar(r, (k as f64 + 0.5) * 2.0 * PI / 16.0);
                let p = EvalPoint::off_axis(z)?;
                let ainv = a_asymptotic(&p).try_inverse().unwrap();
                worst = worst.max((self.m(&p)? * ainv - Matrix4::identity()).norm());
            }
            asymptotic.push((r, worst));
        }
        Ok(ParametrixReport { det_error, jump_error, asymptotic })
    }
}

/// Vieta residuals of sheet-ordered roots: |Σw − z| and |Πw − s²t²/3|.
pub fn vieta_residuals(curve: &RationalCurve, z: Complex64, w: &[Complex64; 4]) -> (f64, f64) {
    let sum: Complex64 = w.iter().sum();
    let prod: Complex64 = w.iter().product();
    ((sum - z).norm(), (prod - curve.root_product()).norm())
}

/// Invariant checks of a spectral curve, as emitted by the `curve` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub a: f64,
    pub c: f64,
    pub s: f64,
    pub t: f64,
    /// max residual of the two (s, t) equations.
    pub st_residual: f64,
    pub alpha: AlphaEstimate,
    /// max |Σw_j − z| over the random sample.
    pub vieta_sum_error: f64,
    /// max |Πw_j − s²t²/3| over the random sample.
    pub vieta_product_error: f64,
    pub parametrix: ParametrixReport,
    /// max |Σξ_j − V′| over the random sample.
    pub sheet_sum_error: f64,
    /// max |ξ₁₊ − ξ₂₋| on the first support.
    pub xi_continuity_error: f64,
    /// max deviation of the g₁ and g₃ jump identities on ℝ.
    pub g_real_error: f64,
    /// max deviation of the g₂ jump identity on iℝ.
    pub g_imag_error: f64,
    /// max |Re φ₁₊| on the first support.
    pub phi1_real_error: f64,
}

impl CurveReport {
    /// One-row summary CSV with a schema header.
    pub fn to_csv(&self) -> String {
        let header = "s,t,alpha,alpha_from_f3,alpha_discrepancy,st_residual,vieta_sum,vieta_product,det_m,jump_m,\
                      sheet_sum,xi_continuity,g_real,g_imag,phi1_real";
        let vals = [
            self.s,
            self.t,
            self.alpha.alpha,
            self.alpha.alpha_from_f3,
            self.alpha.discrepancy,
            self.st_residual,
            self.vieta_sum_error,
            self.vieta_product_error,
            self.parametrix.det_error,
            self.parametrix.jump_error,
            self.sheet_sum_error,
            self.xi_continuity_error,
            self.g_real_error,
            self.g_imag_error,
            self.phi1_real_error,
        ];
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.17e}")).collect();
        format!("# {} curve-summary\n{header}\n{}\n", crate::potential::CSV_SCHEMA_VERSION, row.join(","))
    }
}

/// Random off-axis points with moduli in scale·[0.1, 3] and arguments kept
/// away from the coordinate axes.
fn off_axis_sample(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = scale * rng.gen_range(0.1..3.0);
            let th = rng.gen_range(0.05..(PI / 2.0 - 0.05)) + rng.gen_range(0..4) as f64 * PI / 2.0;
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// Runs every invariant check of the curve and its parametrix with a fixed
/// seed: Vieta at 50 points, det M at 50 points, jumps at 20 cut samples,
/// ‖MA⁻¹ − I‖ at |z| = 10, 20, 40, and the ξ, g and φ identities.
pub fn curve_report(sc: &SpectralCurve, seed: u64) -> Result<CurveReport> {
    let sol = sc.sol;
    let (a, c, s, t) = (sol.a, sol.c, sc.s, sc.t);
    let st_residual = (2.0 * s - 2.0 * t * t / (3.0 * s) - a).abs().max((2.0 * t - 2.0 * s * s / (3.0 * t) + c).abs());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = a.max(c);
    let (mut vieta_sum_error, mut vieta_product_error): (f64, f64) = (0.0, 0.0);
    for z in off_axis_sample(50, scale, &mut rng) {
        let w = sc.curve.sheet_maps(&EvalPoint::off_axis(z)?)?;
        let (e1, e2) = vieta_residuals(&sc.curve, z, &w);
        vieta_sum_error = vieta_sum_error.max(e1);
        vieta_product_error = vieta_product_error.max(e2);
    }
    let parametrix = build_outer_parametrix(&sc.curve)?.verify(50, 20, &[10.0, 20.0, 40.0], seed)?;
    let mut sheet_sum_error: f64 = 0.0;
    for z in off_axis_sample(20, scale, &mut rng) {
        let sum: Complex64 = (1..=4).map(|j| sc.xi_at(j, z)).sum::<Result<Complex64>>()?;
        sheet_sum_error = sheet_sum_error.max((sum - sol.v.deriv_complex(z)).norm());
    }
    let kappa = sol.tau.powf(4.0 / 3.0);
    let (mut xi_continuity_error, mut g_real_error, mut phi1_real_error): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 1..20 {
        let x = a * (-0.95 + 1.9 * k as f64 / 20.0);
        if x == 0.0 {
            continue;
        }
        let up = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Plus)?;
        let dn = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Minus)?;
        let d1 = (sc.xi(1, &up)? - sc.xi(2, &dn)?).norm();
        let d2 = (sc.xi(1, &dn)? - sc.xi(2, &up)?).norm();
        xi_continuity_error = xi_continuity_error.max(d1).max(d2);
        phi1_real_error = phi1_real_error.max(sc.phi_function(1, &up)?.re.abs());
    }
    for k in 0..8 {
        // Points on and off the first support, both signs.
        let x = 2.0 * a * (-1.0 + (2 * k + 1) as f64 / 8.0);
        let up = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Plus)?;
        let dn = EvalPoint::boundary(Complex64::new(x, 0.0), Side::Minus)?;
        let want = if x > 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, -2.0 * PI / 3.0) };
        let g2 = sc.g_function(2, &up)?;
        if x.abs() < a {
            let lhs = sc.g_function(1, &up)? + sc.g_function(1, &dn)? - g2 - sol.v.eval(x) + 0.75 * kappa * x.abs().powf(4.0 / 3.0) + sol.ell;
            g_real_error = g_real_error.max((lhs - want).norm());
        }
        let lhs3 = sc.g_function(3, &up)? + sc.g_function(3, &dn)? - g2;
        g_real_error = g_real_error.max((lhs3 - want).norm());
    }
    let mut g_imag_error: f64 = 0.0;
    for k in 0..8 {
        let y = 2.0 * c * (-2.0 + (2 * k + 1) as f64 / 4.0);
        if y.abs() <= c {
            continue;
        }
        let l = EvalPoint::boundary(Complex64::new(0.0, y), Side::Plus)?;
        let r = EvalPoint::boundary(Complex64::new(0.0, y), Side::Minus)?;
        let lhs = sc.g_function(2, &l)? + sc.g_function(2, &r)? - sc.g_function(1, &l)? - sc.g_function(3, &l)?;
        let want = if y > 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, 4.0 * PI / 3.0) };
        g_imag_error = g_imag_error.max((lhs - want).norm());
    }
    Ok(CurveReport {
        a,
        c,
        s,
        t,
        st_residual,
        alpha: sc.alpha_estimate,
        vieta_sum_error,
        vieta_product_error,
        parametrix,
        sheet_sum_error,
        xi_continuity_error,
        g_real_error,
        g_imag_error,
        phi1_real_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn st_limits_and_homogeneity() {
        let (s, t) = solve_st(2.0, 1e-9).unwrap();
        assert!((s - 9.0 * 2.0 / 16.0).abs() < 1e-8 && (t - 3.0 * 3f64.sqrt() * 2.0 / 16.0).abs() < 1e-8);
        let (s1, t1) = solve_st(2.0, 1.0).unwrap();
        let (s3, t3) = solve_st(6.0, 3.0).unwrap();
        assert!((s3 - 3.0 * s1).abs() < 1e-12 && (t3 - 3.0 * t1).abs() < 1e-12);
        assert!(solve_st(-1.0, 1.0).is_err());
    }

    #[test]
    fn branch_functions_follow_the_quadrant() {
        let x = Complex64::new(-8.0, 0.0);
        let up = EvalPoint::boundary(x, Side::Plus).unwrap();
        let dn = EvalPoint::boundary(x, Side::Minus).unwrap();
        assert!((up.cbrt() - Complex64::from_polar(2.0, PI / 3.0)).norm() < 1e-15);
        assert!((dn.cbrt() - Complex64::from_polar(2.0, -PI / 3.0)).norm() < 1e-15);
        let y = EvalPoint::boundary(Complex64::new(8.0, 0.0), Side::Plus).unwrap();
        assert!((y.neg_cbrt() - Complex64::from_polar(2.0, -PI / 3.0)).norm() < 1e-15);
        assert!(EvalPoint::off_axis(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn a_matrices_are_unimodular() {
        for m in a_matrices() {
            assert!((m.determinant() - 1.0).norm() < 1e-14);
        }
    }
}
