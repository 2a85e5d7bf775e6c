//! The constrained vector equilibrium problem (μ₁, μ₂, μ₃).
//!
//! μ₁ lives on ℝ with mass 1, μ₂ on iℝ with mass 2/3 below the constraint σ,
//! and μ₃ on ℝ with mass 1/3. The minimizer of the energy functional is found
//! by exact block-coordinate descent:
//!
//! 1. μ₃ ← ½Bal(μ₂, ℝ);
//! 2. μ₁ ← equilibrium measure in the field V − ¾τ^{4/3}|x|^{4/3} − U^{μ₂},
//!    solved by a Chebyshev expansion on the one-cut support [−a, a];
//! 3. μ₂ ← σ on the saturation window (−ic, ic) plus
//!    ½Bal(μ₁ + μ₃, K_c) − Bal(σ|window, K_c) on K_c, with c located by the
//!    iterated-balayage sequence and polished so that σ − μ₂ vanishes like a
//!    square root at ±ic.
//!
//! Each step minimizes the energy exactly in its block, so the energy trace is
//! non-increasing.

use crate::balayage::{balayage_density_at, Target};
use crate::error::{Error, Result};
use crate::potential::{energy_functional, Axis, ConstraintSigma, EvenPoly, GridMeasure, Layout, MeasureRecord, PanelMap};
use crate::quad::{brent, tanh_sinh};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tail exponent of μ₂ and μ₃: densities decay like |t|^{−5/3}.
pub const TAIL_EXPONENT: f64 = 5.0 / 3.0;

/// Options of the Chebyshev field solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldOptions {
    /// Number of Chebyshev points for the field derivative on [−a, a].
    pub chebyshev_points: usize,
    /// Panels of the output layout on [−a, a].
    pub panels: usize,
    /// Gauss–Legendre order per panel.
    pub order: usize,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions { chebyshev_points: 256, panels: 25, order: 16 }
    }
}

/// One-cut equilibrium measure of an even external field.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    /// Support endpoint: the support is [−a, a].
    pub a: f64,
    pub mass: f64,
    /// Density coefficients b_k: ρ(a cos θ) = Σ b_k sin kθ.
    pub sine_coeffs: Vec<f64>,
    /// Limit of ρ(x)/√(a² − x²) at the endpoints.
    pub edge_coefficient: f64,
    pub measure: GridMeasure,
}

impl FieldSolution {
    /// Density at x (0 outside [−a, a]).
    pub fn density(&self, x: f64) -> f64 {
        if x.abs() >= self.a {
            return 0.0;
        }
        sine_series(&self.sine_coeffs, (x / self.a).acos())
    }

    /// ρ(x)/√(a² − x²) on (−a, a).
    pub fn h(&self, x: f64) -> f64 {
        let theta = (x / self.a).clamp(-1.0, 1.0).acos();
        let s = theta.sin();
        if s < 1e-12 {
            return self.edge_coefficient;
        }
        sine_series(&self.sine_coeffs, theta) / (self.a * s)
    }
}

fn sine_series(b: &[f64], theta: f64) -> f64 {
    b.iter().enumerate().skip(1).map(|(k, bk)| bk * (k as f64 * theta).sin()).sum()
}

/// Chebyshev coefficients q_k of f on [−a, a] from its values at the
/// Chebyshev points a·cos((j + ½)π/N).
pub fn chebyshev_coefficients<F: Fn(f64) -> f64>(f: F, a: f64, n: usize) -> Vec<f64> {
    let thetas: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * PI / n as f64).collect();
    let vals: Vec<f64> = thetas.iter().map(|t| f(a * t.cos())).collect();
    (0..n)
        .map(|k| {
            let s: f64 = thetas.iter().zip(&vals).map(|(t, v)| v * (k as f64 * t).cos()).sum();
            if k == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect()
}

/// Solves min I(ν) + ∫Q dν over measures of mass `mass` on ℝ for an even
/// field Q whose derivative is `dfield`, assuming a one-interval support
/// [−a, a]. `bracket` optionally encloses a.
///
/// On the support the Euler–Lagrange equation reads PV∫dν(t)/(x − t) = Q′(x)/2;
/// with Q′(a cos θ) = Σ q_k T_k the soft-edge solution is
/// ρ(a cos θ) = Σ (q_k/2π) sin kθ, and a is fixed by the mass a·q₁/4.
pub fn solve_field_equilibrium<F: Fn(f64) -> f64>(
    dfield: F,
    mass: f64,
    bracket: Option<(f64, f64)>,
    opts: &FieldOptions,
) -> Result<FieldSolution> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass {mass} must be positive")));
    }
    let n = opts.chebyshev_points;
    let g = |a: f64| a * chebyshev_coefficients(&dfield, a, n)[1] / 4.0 - mass;
    let (mut lo, mut hi) = bracket.unwrap_or((0.5, 1.0));
    let mut guard = 0;
    while g(lo) > 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 60 {
            return Err(Error::numerical("no lower bracket for the support endpoint", vec![lo]));
        }
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 120 {
            return Err(Error::numerical("field too weak: support endpoint unbounded", vec![hi]));
        }
    }
    let a = brent(g, lo, hi, 1e-15 * hi, 200)
        .ok_or_else(|| Error::numerical("support endpoint bisection failed", vec![lo, hi]))?;
    let q = chebyshev_coefficients(&dfield, a, n);
    let b: Vec<f64> = q.iter().map(|qk| qk / (2.0 * PI)).collect();
    let edge = b.iter().enumerate().map(|(k, bk)| k as f64 * bk).sum::<f64>() / a;
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    // One-cut check: the density must stay non-negative inside the support.
    for i in 1..2000 {
        let theta = PI * i as f64 / 2000.0;
        let r = sine_series(&b, theta) / theta.sin();
        if r < -1e-10 * scale {
            return Err(Error::MultiCut(format!(
                "density of the field problem is negative at x = {:.6}: support is not one interval",
                a * theta.cos()
            )));
        }
    }
    if edge <= 0.0 {
        return Err(Error::MultiCut(format!("endpoint coefficient {edge:e} ≤ 0: the edge is not a soft edge")));
    }
    let layout = Layout::cos_interval(a, opts.panels, opts.order);
    let measure = GridMeasure::from_density(Axis::Real, layout, |t| {
        if t.abs() >= a {
            0.0
        } else {
            sine_series(&b, (t / a).acos()).max(0.0)
        }
    })?;
    Ok(FieldSolution { a, mass, sine_coeffs: b, edge_coefficient: edge, measure })
}

/// Discrete equilibrium measure from projected-gradient descent; used as an
/// independent oracle for the Chebyshev field solver.
#[derive(Debug, Clone)]
pub struct DiscreteEquilibrium {
    /// Cell centres on [−X, X].
    pub centers: Vec<f64>,
    /// Cell masses.
    pub masses: Vec<f64>,
    /// Support endpoint estimated by a square-root fit of the edge cells.
    pub endpoint: f64,
}

/// Projection onto {m ≥ 0, Σm = mass}.
fn project_simplex(v: &mut [f64], mass: f64) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        acc += uj;
        let t = (acc - mass) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Minimizes Σ m_i m_j K_ij + Σ m_i Q(x_i) over cell masses on a uniform grid
/// of `cells` cells on [−half_width, half_width] (K: cell-averaged log kernel)
/// with accelerated projected gradient steps.
pub fn projected_gradient_equilibrium<F: Fn(f64) -> f64>(
    field: F,
    mass: f64,
    half_width: f64,
    cells: usize,
    iterations: usize,
) -> DiscreteEquilibrium {
    let h = 2.0 * half_width / cells as f64;
    let centers: Vec<f64> = (0..cells).map(|i| -half_width + (i as f64 + 0.5) * h).collect();
    // ∫∫ over two cells at offset d of log|s − t| = F(d+h) − 2F(d) + F(d−h).
    let prim = |u: f64| if u == 0.0 { 0.0 } else { 0.5 * u * u * u.abs().ln() - 0.75 * u * u };
    let kern: Vec<f64> = (0..cells)
        .map(|k| {
            let d = k as f64 * h;
            -(prim(d + h) - 2.0 * prim(d) + prim(d - h)) / (h * h)
        })
        .collect();
    let q: Vec<f64> = centers.iter().map(|&x| field(x)).collect();
    let matvec = |m: &[f64]| -> Vec<f64> {
        (0..cells).map(|i| (0..cells).map(|j| kern[i.abs_diff(j)] * m[j]).sum()).collect()
    };
    // Lipschitz constant of the gradient 2Km + Q by power iteration.
    let mut v = vec![1.0; cells];
    let mut lam = 1.0;
    for _ in 0..60 {
        let w = matvec(&v);
        lam = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
        v = w.iter().map(|x| x / lam).collect();
    }
    let step = 1.0 / (2.0 * lam);
    let mut m = vec![mass / cells as f64; cells];
    let mut y = m.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        let ky = matvec(&y);
        let mut next: Vec<f64> = (0..cells).map(|i| y[i] - step * (2.0 * ky[i] + q[i])).collect();
        project_simplex(&mut next, mass);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = (0..cells).map(|i| next[i] + beta * (next[i] - m[i])).collect();
        m = next;
        t = t_next;
    }
    // Endpoint: the squared edge masses are linear in the distance to a.
    let last = (0..cells).rev().find(|&i| m[i] > 1e-6 * mass).unwrap_or(cells - 1);
    let pts: Vec<(f64, f64)> = (last.saturating_sub(6)..last.saturating_sub(1)).map(|i| (centers[i], m[i] * m[i])).collect();
    let endpoint = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        let (mx, my) = (sx / n, sy / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let slope = sxy / sxx;
        mx - my / slope
    } else {
        centers[last] + 0.5 * h
    };
    DiscreteEquilibrium { centers, masses: m, endpoint }
}

/// Options of the vector equilibrium solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumOptions {
    pub field: FieldOptions,
    /// Gauss–Legendre order of the μ₂ and μ₃ layouts.
    pub order: usize,
    /// Stop when the support parameters a and c move less than this.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Iterated-balayage steps before polishing c.
    pub max_balayage_steps: usize,
    /// Acceptance threshold of the variational residuals.
    pub residual_tol: f64,
    /// Nodes excluded at each edge when measuring residuals.
    pub edge_exclusion: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions {
            field: FieldOptions::default(),
            order: 16,
            outer_tol: 1e-11,
            max_outer: 80,
            max_balayage_steps: 40,
            residual_tol: 1e-4,
            edge_exclusion: 2,
        }
    }
}

/// The measure μ₂ for given (μ₁, μ₃): the pieces that depend on c.
pub struct SecondMeasureProblem<'a> {
    pub nu1: &'a GridMeasure,
    pub nu3: &'a GridMeasure,
    pub sigma: ConstraintSigma,
    /// (|start|, coefficient, exponent) of the power-law tails of ν₁ + ν₃.
    tails: Vec<(f64, f64, f64)>,
}

impl<'a> SecondMeasureProblem<'a> {
    pub fn new(nu1: &'a GridMeasure, nu3: &'a GridMeasure, sigma: ConstraintSigma) -> Self {
        let tails = [nu1, nu3]
            .iter()
            .flat_map(|m| m.tails().iter().map(|t| (t.start.abs(), t.coefficient, t.exponent)))
            .collect();
        SecondMeasureProblem { nu1, nu3, sigma, tails }
    }

    /// Density of ½Bal(ν₁ + ν₃, iℝ) at iy.
    pub fn initial_density(&self, y: f64) -> f64 {
        0.5 * (balayage_density_at(self.nu1, Target::Imaginary, y) + balayage_density_at(self.nu3, Target::Imaginary, y))
    }

    /// P(y; c) = (1/2π)∫√(c² + x²)/(y² + x²) d(ν₁ + ν₃)(x).
    pub fn p_term(&self, y: f64, c: f64) -> f64 {
        let z = Complex64::new(0.0, y);
        let k = |x: f64, _| (c * c + x * x).sqrt() / (y * y + x * x);
        if self.tails.iter().any(|t| t.0 < 1e3 * (y.abs() + c)) {
            return (self.nu1.integrate_kernel(z, k) + self.nu3.integrate_kernel(z, k)) / (2.0 * PI);
        }
        let mut acc: f64 = self.nu1.integrate_panels(z, &k) + self.nu3.integrate_panels(z, &k);
        // Beyond the tail start the kernel is 1/x + (c²/2 − y²)/x³ + O(x⁻⁵).
        for &(t, coef, p) in &self.tails {
            acc += coef * (t.powf(-p) / p + (0.5 * c * c - y * y) * t.powf(-p - 2.0) / (p + 2.0));
        }
        acc / (2.0 * PI)
    }

    /// S(y; c) = (2/π)∫₀^{π/2} c²cos²θ σ(c sin θ)/(y² − c² sin²θ) dθ.
    pub fn s_term(&self, y: f64, c: f64) -> f64 {
        let gap = (y - c) * (y + c);
        let (v, _) = tanh_sinh(0.0, 0.5 * PI, 1e-14, |theta, _, dr| {
            let cos2 = dr.sin().powi(2);
            let num = c * c * cos2;
            let ratio = if gap == 0.0 { 1.0 } else { num / (gap + num) };
            ratio * self.sigma.density(c * theta.sin())
        });
        2.0 / PI * v
    }

    /// B(y; c) = P − S; the K_c density is |y|B/√(y² − c²).
    pub fn b_term(&self, y: f64, c: f64) -> f64 {
        self.p_term(y, c) - self.s_term(y, c)
    }

    /// Density on K_c of ½Bal(ν₁ + ν₃, K_c) − Bal(σ|(−ic,ic), K_c) at iy, |y| > c.
    pub fn outer_density(&self, y: f64, c: f64) -> f64 {
        let y = y.abs();
        y * self.b_term(y, c) / ((y - c) * (y + c)).sqrt()
    }

    /// First crossing of ½Bal(ν₁ + ν₃, iℝ) below σ, from 0 outward.
    pub fn initial_saturation_point(&self, scale: f64) -> Result<f64> {
        let f = |y: f64| self.initial_density(y) - self.sigma.density(y);
        let mut prev = 1e-6 * scale;
        if f(prev) <= 0.0 {
            return Err(Error::numerical("initial second measure is below σ at the origin", vec![prev]));
        }
        for k in 1..400 {
            let y = 1e-6 * scale * 10f64.powf(0.05 * k as f64);
            if f(y) < 0.0 {
                return brent(f, prev, y, 1e-14 * y, 200)
                    .ok_or_else(|| Error::numerical("saturation point bisection failed", vec![prev, y]));
            }
            prev = y;
        }
        Err(Error::numerical("½Bal(ν₁+ν₃, iℝ) never drops below σ", vec![prev]))
    }

    /// One iterated-balayage step: given the window (−ic, ic), the first point
    /// beyond c where the swept measure drops below σ; `None` once the swept
    /// density no longer exceeds σ near ic.
    pub fn balayage_step(&self, c: f64) -> Result<Option<f64>> {
        if self.b_term(c, c) <= 0.0 {
            return Ok(None);
        }
        let f = |y: f64| self.outer_density(y, c) - self.sigma.density(y);
        let mut prev = c * (1.0 + 1e-10);
        for k in 1..300 {
            let y = c * (1.0 + 1e-10 * 10f64.powf(0.05 * k as f64));
            if f(y) < 0.0 {
                return Ok(Some(
                    brent(f, prev, y, 1e-14 * y, 200)
                        .ok_or_else(|| Error::numerical("balayage step bisection failed", vec![c, prev, y]))?,
                ));
            }
            prev = y;
        }
        Err(Error::numerical("swept measure never drops below σ", vec![c]))
    }

    /// The saturation point: iterated balayage from the initial crossing, then
    /// a root polish of B(c; c) = 0. Returns c and the sequence (c_k).
    pub fn saturation_point(&self, scale: f64, max_steps: usize) -> Result<(f64, Vec<f64>)> {
        let mut trace = vec![self.initial_saturation_point(scale)?];
        for _ in 0..max_steps {
            let c = *trace.last().unwrap();
            match self.balayage_step(c)? {
                Some(next) => {
                    trace.push(next);
                    if next - c < 1e-6 * c {
                        break;
                    }
                }
                None => break,
            }
        }
        let c_last = *trace.last().unwrap();
        let fb = |c: f64| self.b_term(c, c);
        // B(c; c) is decreasing in c; bracket its root around the last iterate.
        let (mut lo, mut hi) = (c_last, c_last);
        if fb(c_last) > 0.0 {
            let mut step = 1e-4 * c_last;
            hi = c_last + step;
            while fb(hi) > 0.0 {
                lo = hi;
                step *= 2.0;
                hi += step;
                if step > 1e3 * c_last {
                    return Err(Error::numerical("no root of the endpoint condition", trace));
                }
            }
        } else {
            let mut step = 1e-4 * c_last;
            lo = c_last - step;
            while fb(lo) <= 0.0 {
                hi = lo;
                step *= 2.0;
                lo = (lo - step).max(0.5 * lo);
            }
        }
        let c = brent(fb, lo, hi, 1e-15 * hi, 200).ok_or_else(|| Error::numerical("endpoint polish failed", trace.clone()))?;
        let tol = 1e-9 * c;
        if trace.windows(2).any(|w| w[1] < w[0] - tol) || c < c_last - 1e-6 * c_last {
            let mut t = trace.clone();
            t.push(c);
            return Err(Error::numerical("saturation sequence is not monotone", t));
        }
        trace.push(c);
        Ok((c, trace))
    }

    /// μ₂ on its layout for the saturation point c.
    pub fn measure(&self, c: f64, order: usize) -> Result<GridMeasure> {
        let layout = Layout::constrained_imaginary(c, TAIL_EXPONENT, order);
        GridMeasure::from_density(Axis::Imaginary, layout, |t| {
            if t.abs() < c {
                self.sigma.density(t)
            } else {
                self.outer_density(t, c).clamp(0.0, self.sigma.density(t))
            }
        })
    }
}

/// Solves for μ₂ given ν₁ and ν₃ (masses 1 and 1/3) by iterated balayage.
/// Returns μ₂, the saturation point c and the sequence (c_k).
pub fn solve_nu2_constrained(
    nu1: &GridMeasure,
    nu3: &GridMeasure,
    tau: f64,
    opts: &EquilibriumOptions,
) -> Result<(GridMeasure, f64, Vec<f64>)> {
    for (m, want) in [(nu1, 1.0), (nu3, 1.0 / 3.0)] {
        if (m.total_mass() - want).abs() > 1e-6 {
            return Err(Error::Precondition(format!("measure mass {} differs from {want}", m.total_mass())));
        }
    }
    let prob = SecondMeasureProblem::new(nu1, nu3, ConstraintSigma::new(tau)?);
    let scale = nu1.nodes.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-3);
    let (c, trace) = prob.saturation_point(scale, opts.max_balayage_steps)?;
    Ok((prob.measure(c, opts.order)?, c, trace))
}

/// ν₃ = ½Bal(ν₂, ℝ) on a layout resolving the cusp at the origin.
pub fn third_measure(nu2: &GridMeasure, c: f64, order: usize) -> Result<GridMeasure> {
    let layout = Layout::line_with_cusp(c, TAIL_EXPONENT, order);
    GridMeasure::from_density(Axis::Real, layout, |x| 0.5 * balayage_density_at(nu2, Target::Real, x).max(0.0))
}

/// Derivative of the field V − ¾τ^{4/3}|x|^{4/3} − U^{μ₂} acting on μ₁:
/// V′(x) − 2x∫_c^∞ (σ − ρ₂)(y)/(x² + y²) dy.
pub struct FirstField<'a> {
    pub v: &'a EvenPoly,
    /// (y_i, w_i·(σ − ρ₂)(y_i)) on y > c.
    nodes: Vec<(f64, f64)>,
    tail: Option<(f64, f64, f64)>,
    sigma: ConstraintSigma,
}

impl<'a> FirstField<'a> {
    pub fn new(v: &'a EvenPoly, nu2: &GridMeasure, c: f64, sigma: ConstraintSigma) -> Self {
        let nodes = (0..nu2.len())
            .filter(|&i| nu2.nodes[i] > c)
            .map(|i| {
                let y = nu2.nodes[i];
                (y, nu2.weights[i] * (sigma.density(y) - nu2.density[i]))
            })
            .collect();
        let tail = nu2.tails().iter().find(|t| t.start > 0.0).map(|t| (t.start, t.coefficient, t.exponent));
        FirstField { v, nodes, tail, sigma }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let x2 = x * x;
        let mut s: f64 = self.nodes.iter().map(|(y, w)| w / (x2 + y * y)).sum();
        if let Some((start, coef, p)) = self.tail {
            // The tail starts far beyond x: expand 1/(x² + y²) in x²/y² and
            // integrate the power laws termwise.
            let kp = self.sigma.prefactor();
            let mut term = 1.0;
            for k in 0..4 {
                let e = 2.0 * k as f64;
                let a = kp * start.powf(1.0 / 3.0 - 1.0 - e) / (e + 2.0 / 3.0);
                let b = coef * start.powf(-p - 1.0 - e) / (p + 1.0 + e);
                s += term * (a - b);
                term *= -x2;
            }
        }
        self.v.deriv(x) - 2.0 * x * s
    }
}

/// Sup-norm residuals of the variational conditions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// |2U^{μ₁} − U^{μ₂} + V − ¾τ^{4/3}|x|^{4/3} − ℓ| on [−a, a].
    pub eq1: f64,
    /// Violation of the inequality ≥ ℓ off [−a, a].
    pub ineq1: f64,
    /// |2U^{μ₂} − U^{μ₁} − U^{μ₃}| on K_c.
    pub eq2: f64,
    /// Violation of 2U^{μ₂} − U^{μ₁} − U^{μ₃} ≤ 0 on (−ic, ic).
    pub ineq2: f64,
    /// min over the window of −(2U^{μ₂} − U^{μ₁} − U^{μ₃}): positive when strict.
    pub ineq2_margin: f64,
    /// |2U^{μ₃} − U^{μ₂}| on ℝ.
    pub eq3: f64,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.eq1.max(self.ineq1).max(self.eq2).max(self.ineq2).max(self.eq3)
    }
}

/// The converged vector equilibrium problem.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub mu1: GridMeasure,
    pub mu2: GridMeasure,
    pub mu3: GridMeasure,
    pub a: f64,
    pub c: f64,
    pub ell: f64,
    pub tau: f64,
    pub v: EvenPoly,
    pub residual_report: ResidualReport,
    pub one_cut_regular: bool,
    /// Energy after each outer iteration.
    pub energy_trace: Vec<f64>,
    /// Saturation sequence (c_k) of the last μ₂ solve.
    pub c_trace: Vec<f64>,
    pub iterations: usize,
    /// Chebyshev solution of the last μ₁ step.
    pub field: FieldSolution,
    /// Options of the run, used by the residual evaluation.
    pub options: EquilibriumOptions,
}

fn kappa(tau: f64) -> f64 {
    tau.powf(4.0 / 3.0)
}

/// Solves the vector equilibrium problem for even V and τ > 0.
pub fn solve_vector_equilibrium(v: &EvenPoly, tau: f64, opts: &EquilibriumOptions) -> Result<EquilibriumSolution> {
    let sigma = ConstraintSigma::new(tau)?;
    if v.coeffs.len() < 2 {
        return Err(Error::Domain("V must have positive degree".into()));
    }
    // Start from the plain field V for μ₁ and a scaled copy for μ₃.
    let mut field = solve_field_equilibrium(|x| v.deriv(x), 1.0, None, &opts.field)?;
    let mut nu1 = field.measure.clone();
    let mut nu3 = nu1.with_density(|x| field.density(x) / 3.0)?;
    let (mut nu2, mut c, mut c_trace) = solve_nu2_constrained(&nu1, &nu3, tau, opts)?;
    let mut a = field.a;
    let mut energy_trace: Vec<f64> = Vec::new();
    let mut iterations = 0;
    for it in 0..opts.max_outer {
        let nu3_new = third_measure(&nu2, c, opts.order)?;
        let ff = FirstField::new(v, &nu2, c, sigma);
        let field_new = solve_field_equilibrium(|x| ff.derivative(x), 1.0, Some((0.9 * a, 1.1 * a)), &opts.field)?;
        let nu1_new = field_new.measure.clone();
        let (nu2_new, c_new, trace_new) = solve_nu2_constrained(&nu1_new, &nu3_new, tau, opts)?;
        let e = energy_functional(&nu1_new, &nu2_new, &nu3_new, v, tau)?.direct;
        if let Some(&last) = energy_trace.last() {
            if e >= last {
                // No further decrease: the previous iterate is the fixed point.
                break;
            }
        }
        let moved = (field_new.a - a).abs() + (c_new - c).abs();
        energy_trace.push(e);
        nu1 = nu1_new;
        nu2 = nu2_new;
        nu3 = nu3_new;
        field = field_new;
        a = field.a;
        c = c_new;
        c_trace = trace_new;
        iterations = it + 1;
        if moved < opts.outer_tol && it > 0 {
            break;
        }
    }
    if iterations == opts.max_outer {
        return Err(Error::numerical("outer iteration did not converge", energy_trace));
    }
    // Final μ₃ consistent with the final μ₂.
    let nu3 = if iterations > 0 { nu3 } else { third_measure(&nu2, c, opts.order)? };
    let ell = 2.0 * nu1.log_potential(Complex64::new(0.0, 0.0)) - nu2.log_potential(Complex64::new(0.0, 0.0)) + v.eval(0.0);
    let mut sol = EquilibriumSolution {
        mu1: nu1,
        mu2: nu2,
        mu3: nu3,
        a,
        c,
        ell,
        tau,
        v: v.clone(),
        residual_report: ResidualReport::default(),
        one_cut_regular: false,
        energy_trace,
        c_trace,
        iterations,
        field,
        options: *opts,
    };
    sol.residual_report = variational_residuals(&sol);
    sol.one_cut_regular = matches!(classify_regularity(&sol), Regularity::OneCutRegular);
    Ok(sol)
}

/// Indices of `m`'s nodes with coordinate in [lo, hi] on non-tail panels,
/// minus the `exclude` nodes nearest to each of `edges`.
fn residual_nodes(m: &GridMeasure, lo: f64, hi: f64, edges: &[f64], exclude: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m.len())
        .filter(|&i| {
            let t = m.nodes[i];
            t >= lo && t <= hi && t.abs() <= 1e5 * (1.0 + lo.abs().min(hi.abs()))
        })
        .collect();
    let tail_free: Vec<bool> = {
        let mut flags = vec![true; m.len()];
        let mut k = 0;
        for p in &m.layout.panels {
            let tail = matches!(p.map, PanelMap::Tail { .. });
            for _ in 0..p.order {
                flags[k] = !tail;
                k += 1;
            }
        }
        flags
    };
    idx.retain(|&i| tail_free[i]);
    for &e in edges {
        let mut by_dist = idx.clone();
        by_dist.sort_by(|&i, &j| (m.nodes[i] - e).abs().total_cmp(&(m.nodes[j] - e).abs()));
        let drop: Vec<usize> = by_dist.into_iter().take(exclude).collect();
        idx.retain(|i| !drop.contains(i));
    }
    idx
}

/// Left side of the first condition, 2U^{μ₁} − U^{μ₂} + V − ¾τ^{4/3}|x|^{4/3}, at real x.
pub fn first_condition(sol: &EquilibriumSolution, x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    2.0 * sol.mu1.log_potential(z) - sol.mu2.log_potential(z) + sol.v.eval(x) - 0.75 * kappa(sol.tau) * x.abs().powf(4.0 / 3.0)
}

/// 2U^{μ₂} − U^{μ₁} − U^{μ₃} at iy.
pub fn second_condition(sol: &EquilibriumSolution, y: f64) -> f64 {
    let z = Complex64::new(0.0, y);
    2.0 * sol.mu2.log_potential(z) - sol.mu1.log_potential(z) - sol.mu3.log_potential(z)
}

/// 2U^{μ₃} − U^{μ₂} at real x.
pub fn third_condition(sol: &EquilibriumSolution, x: f64) -> f64 {
    let z = Complex64::new(x, 0.0);
    2.0 * sol.mu3.log_potential(z) - sol.mu2.log_potential(z)
}

/// Sup-norm residuals over the grid nodes (edge nodes excluded).
pub fn variational_residuals(sol: &EquilibriumSolution) -> ResidualReport {
    let ex = sol.options.edge_exclusion;
    let (a, c) = (sol.a, sol.c);
    let sup = |vals: Vec<f64>| vals.into_iter().fold(0.0f64, |m, v| m.max(v));
    let i1 = residual_nodes(&sol.mu1, -a, a, &[-a, a], ex);
    let eq1 = sup(i1.iter().map(|&i| (first_condition(sol, sol.mu1.nodes[i]) - sol.ell).abs()).collect());
    let outside: Vec<f64> = (1..=40).flat_map(|k| {
        let x = a * (1.0 + 0.05 * k as f64);
        [x, -x]
    }).collect();
    let ineq1 = sup(outside.iter().map(|&x| (sol.ell - first_condition(sol, x)).max(0.0)).collect());
    let i2 = residual_nodes(&sol.mu2, -f64::INFINITY, f64::INFINITY, &[-c, c], ex);
    let (mut eq2, mut ineq2, mut margin) = (0.0f64, 0.0f64, f64::INFINITY);
    for &i in &i2 {
        let y = sol.mu2.nodes[i];
        let r = second_condition(sol, y);
        if y.abs() > c {
            eq2 = eq2.max(r.abs());
        } else {
            ineq2 = ineq2.max(r);
            margin = margin.min(-r);
        }
    }
    let i3 = residual_nodes(&sol.mu3, -f64::INFINITY, f64::INFINITY, &[], 0);
    let eq3 = sup(i3.iter().map(|&i| third_condition(sol, sol.mu3.nodes[i]).abs()).collect());
    ResidualReport { eq1, ineq1, eq2, ineq2, ineq2_margin: margin, eq3 }
}

/// Kind of a singular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularKind {
    /// The density vanishes faster than a square root at ±a.
    Endpoint,
    /// The density vanishes inside the support.
    Interior,
    /// The exterior inequality becomes an equality.
    Exterior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Regularity {
    OneCutRegular,
    Singular(Vec<(f64, SingularKind)>),
}

/// Classifies from samples of h(x) = ρ(x)/√(a² − x²) on [−a, a] (including
/// the endpoint limits) and of the exterior slack (left side minus ℓ) for
/// |x| > a. Thresholds are relative to the largest h.
pub fn classify_from_samples(h: &[(f64, f64)], slack: &[(f64, f64)], a: f64) -> Regularity {
    let hmax = h.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let thr = 1e-3 * hmax.max(1e-300);
    let mut out: Vec<(f64, SingularKind)> = Vec::new();
    for &(x, v) in h {
        if v <= thr {
            let kind = if (x.abs() - a).abs() < 1e-12 * a { SingularKind::Endpoint } else { SingularKind::Interior };
            if !out.iter().any(|(y, k)| *k == kind && (y - x).abs() < 0.05 * a) {
                out.push((x, kind));
            }
        }
    }
    for &(x, s) in slack {
        if x.abs() > a * (1.0 + 1e-3) && s <= 1e-9 {
            if !out.iter().any(|(y, k)| *k == SingularKind::Exterior && (y - x).abs() < 0.05 * a) {
                out.push((x, SingularKind::Exterior));
            }
        }
    }
    if out.is_empty() {
        Regularity::OneCutRegular
    } else {
        Regularity::Singular(out)
    }
}

/// One-cut regularity test of a converged solution.
pub fn classify_regularity(sol: &EquilibriumSolution) -> Regularity {
    let a = sol.a;
    let mut h: Vec<(f64, f64)> = (0..=200).map(|k| {
        let x = -a + 2.0 * a * k as f64 / 200.0;
        (x, sol.field.h(x))
    }).collect();
    h[0] = (-a, sol.field.edge_coefficient);
    h[200] = (a, sol.field.edge_coefficient);
    let slack: Vec<(f64, f64)> = (1..=30).map(|k| {
        let x = a * (1.0 + 0.1 * k as f64);
        (x, first_condition(sol, x) - sol.ell)
    }).collect();
    classify_from_samples(&h, &slack, a)
}

/// True iff x ↦ V(√x) is convex on (0, ∞), which guarantees a one-interval
/// support for μ₁.
pub fn check_one_cut_convexity(v: &EvenPoly) -> bool {
    v.sqrt_convex()
}

/// Least-squares slope of log f against log d.
pub fn loglog_slope(pairs: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = pairs.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0 / n, s.1 + p.1 / n));
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Local power-law exponents of the μ₁ density at a and of σ − μ₂ at ic.
pub fn edge_exponents(sol: &EquilibriumSolution) -> (f64, f64) {
    let a = sol.a;
    let at_a: Vec<(f64, f64)> = (0..8).map(|k| {
        let d = a * 1e-4 * 2f64.powi(k);
        (d, sol.field.density(a - d))
    }).collect();
    let sigma = ConstraintSigma { tau: sol.tau };
    let c = sol.c;
    let at_c: Vec<(f64, f64)> = (0..sol.mu2.len())
        .filter(|&i| sol.mu2.nodes[i] > c && sol.mu2.nodes[i] < c * 1.01)
        .map(|i| {
            let y = sol.mu2.nodes[i];
            (y - c, sigma.density(y) - sol.mu2.density[i])
        })
        .collect();
    (loglog_slope(&at_a), loglog_slope(&at_c))
}

/// Serializable form of an [`EquilibriumSolution`]; reloading it rebuilds
/// every measure bit-for-bit from its layout and node densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBundle {
    pub v: EvenPoly,
    pub tau: f64,
    pub a: f64,
    pub c: f64,
    pub ell: f64,
    pub mu1: MeasureRecord,
    pub mu2: MeasureRecord,
    pub mu3: MeasureRecord,
    pub residual_report: ResidualReport,
    pub one_cut_regular: bool,
    pub energy_trace: Vec<f64>,
    pub c_trace: Vec<f64>,
    pub iterations: usize,
    pub field_mass: f64,
    pub field_sine_coeffs: Vec<f64>,
    pub field_edge_coefficient: f64,
    pub options: EquilibriumOptions,
}

impl From<&EquilibriumSolution> for SolutionBundle {
    fn from(sol: &EquilibriumSolution) -> Self {
        SolutionBundle {
            v: sol.v.clone(),
            tau: sol.tau,
            a: sol.a,
            c: sol.c,
            ell: sol.ell,
            mu1: sol.mu1.record(),
            mu2: sol.mu2.record(),
            mu3: sol.mu3.record(),
            residual_report: sol.residual_report,
            one_cut_regular: sol.one_cut_regular,
            energy_trace: sol.energy_trace.clone(),
            c_trace: sol.c_trace.clone(),
            iterations: sol.iterations,
            field_mass: sol.field.mass,
            field_sine_coeffs: sol.field.sine_coeffs.clone(),
            field_edge_coefficient: sol.field.edge_coefficient,
            options: sol.options,
        }
    }
}

impl SolutionBundle {
    /// Rebuilds the solution. The field measure coincides with μ₁.
    pub fn to_solution(&self) -> Result<EquilibriumSolution> {
        let mu1 = self.mu1.to_measure()?;
        let field = FieldSolution {
            a: self.a,
            mass: self.field_mass,
            sine_coeffs: self.field_sine_coeffs.clone(),
            edge_coefficient: self.field_edge_coefficient,
            measure: mu1.clone(),
        };
        Ok(EquilibriumSolution {
            mu1,
            mu2: self.mu2.to_measure()?,
            mu3: self.mu3.to_measure()?,
            a: self.a,
            c: self.c,
            ell: self.ell,
            tau: self.tau,
            v: self.v.clone(),
            residual_report: self.residual_report,
            one_cut_regular: self.one_cut_regular,
            energy_trace: self.energy_trace.clone(),
            c_trace: self.c_trace.clone(),
            iterations: self.iterations,
            field,
            options: self.options,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_field_gives_semicircle() {
        // Field x² with mass 1: density (1/π)√(2 − x²) on [−√2, √2].
        let s = solve_field_equilibrium(|x| 2.0 * x, 1.0, None, &FieldOptions::default()).unwrap();
        assert!((s.a - 2f64.sqrt()).abs() < 1e-13, "{}", s.a);
        assert!((s.density(0.3) - (2.0f64 - 0.09).sqrt() / PI).abs() < 1e-13);
        assert!((s.measure.total_mass() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn simplex_projection() {
        let mut v = vec![0.5, -0.2, 1.4];
        project_simplex(&mut v, 1.0);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn classification_fixtures() {
        let a = 1.0;
        let h: Vec<(f64, f64)> = (0..=20).map(|k| {
            let x = -1.0 + 0.1 * k as f64;
            (x, 1.0 + x * x)
        }).collect();
        assert_eq!(classify_from_samples(&h, &[(1.5, 0.2)], a), Regularity::OneCutRegular);
        let hq: Vec<(f64, f64)> = h.iter().map(|&(x, _)| (x, x * x)).collect();
        match classify_from_samples(&hq, &[], a) {
            Regularity::Singular(v) => assert!(v.iter().any(|(x, k)| *k == SingularKind::Interior && x.abs() < 1e-12)),
            r => panic!("{r:?}"),
        }
        match classify_from_samples(&h, &[(1.5, 0.0)], a) {
            Regularity::Singular(v) => assert_eq!(v, vec![(1.5, SingularKind::Exterior)]),
            r => panic!("{r:?}"),
        }
    }
}
