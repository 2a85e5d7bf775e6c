//! Finite-n biorthogonal polynomials and the correlation kernel K₁₁ in
//! arbitrary precision.
//!
//! The bimoment matrix B_{kl} = ∫ x^k I_l(x) e^{−nV(x)} dx is integrated by
//! the trapezoidal rule on a uniform grid, which converges geometrically for
//! these entire, super-exponentially decaying integrands; the step is halved
//! until two successive refinements change the sums by less than half the
//! working precision. Entries with
//! k + l odd vanish by parity and are set to exact zeros, the remaining
//! integrands are non-negative, so no cancellation occurs. An LDU
//! factorization B = L·D·U gives the monic p_k (rows of L⁻¹), the monic q_k
//! (columns of U⁻¹) and h_k² = D_k. Checks use an independent rule, the same
//! trapezoid shifted by half a step.

use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::pearcey::moment_functions_mp;
use crate::potential::EvenPoly;
use crate::universal::{airy_kernel, correlation_det, sine_kernel};
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;
use std::sync::OnceLock;

/// Largest working precision tried by the automatic escalation.
pub const MAX_PRECISION: u32 = 4096;

fn fl(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

fn v_mp(v: &EvenPoly, x: &Float) -> Float {
    let prec = x.prec();
    let x2 = Float::with_val(prec, x * x);
    v.coeffs.iter().rev().fold(fl(prec, 0.0), |acc, c| acc * &x2 + c)
}

/// Uniform-grid quadrature data on x ≥ 0 (the integrands are even or odd).
#[derive(Debug, Clone)]
struct HalfGrid {
    /// Nodes x_i ≥ 0.
    nodes: Vec<Float>,
    /// Trapezoid weight times e^{−nV(x_i)}; the node x = 0 carries weight ½.
    weights: Vec<Float>,
    /// I₀(x_i)…I_{m_max}(x_i).
    moments: Vec<Vec<Float>>,
}

impl HalfGrid {
    fn build(n: usize, tau: &Float, v: &EvenPoly, h: &Float, offset: f64, x_max: f64, m_max: usize) -> HalfGrid {
        let prec = h.prec();
        let h64 = h.to_f64();
        let count = (x_max / h64).ceil() as usize + 1;
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut moments = Vec::with_capacity(count);
        for i in 0..count {
            let x = Float::with_val(prec, h * (i as f64 + offset));
            let e = Float::with_val(prec, -v_mp(v, &x) * n as u32).exp();
            let mut w = Float::with_val(prec, &e * h);
            if offset == 0.0 && i == 0 {
                w /= 2u32;
            }
            moments.push(moment_functions_mp(n, tau, &x, m_max));
            nodes.push(x);
            weights.push(w);
        }
        HalfGrid { nodes, weights, moments }
    }

    /// ∫_ℝ x^k I_l(x) e^{−nV} dx for k, l < size (twice the half-line sum
    /// when k + l is even, exact zero otherwise).
    fn entries(&self, size: usize) -> Vec<Vec<Float>> {
        let prec = self.weights[0].prec();
        let mut out = vec![vec![fl(prec, 0.0); size]; size];
        for i in 0..self.nodes.len() {
            let mut xk = self.weights[i].clone();
            for row in out.iter_mut() {
                for (l, e) in row.iter_mut().enumerate() {
                    *e += Float::with_val(prec, &xk * &self.moments[i][l]);
                }
                xk *= &self.nodes[i];
            }
        }
        for (k, row) in out.iter_mut().enumerate() {
            for (l, e) in row.iter_mut().enumerate() {
                if (k + l) % 2 == 1 {
                    *e = fl(prec, 0.0);
                } else {
                    *e *= 2u32;
                }
            }
        }
        out
    }

    /// Merges the nodes of a grid shifted by half a step (halving h).
    fn refine(&mut self, other: HalfGrid) {
        let mut nodes = Vec::with_capacity(self.nodes.len() + other.nodes.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut moments = Vec::with_capacity(nodes.capacity());
        let mut a = std::mem::take(&mut self.nodes).into_iter().zip(std::mem::take(&mut self.weights)).zip(std::mem::take(&mut self.moments));
        let mut b = other.nodes.into_iter().zip(other.weights).zip(other.moments);
        loop {
            let mut any = false;
            if let Some(((x, w), m)) = a.next() {
                nodes.push(x);
                weights.push(w / 2u32);
                moments.push(m);
                any = true;
            }
            if let Some(((x, w), m)) = b.next() {
                nodes.push(x);
                weights.push(w / 2u32);
                moments.push(m);
                any = true;
            }
            if !any {
                break;
            }
        }
        // Nodes beyond the shorter grid interleave out of order only at the
        // far end, where the integrand is negligible; keep them sorted anyway.
        let mut idx: Vec<usize> = (0..nodes.len()).collect();
        idx.sort_by(|&i, &j| nodes[i].partial_cmp(&nodes[j]).unwrap());
        let pick = |v: &Vec<Float>| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        self.nodes = pick(&nodes);
        self.weights = pick(&weights);
        self.moments = idx.iter().map(|&i| moments[i].clone()).collect();
    }
}

/// f64 estimate of log|x^k I_l(x) e^{−nV(x)}| for the largest k, l in use.
fn log_integrand_bound(n: usize, tau: f64, v: &EvenPoly, size: usize, x: f64) -> f64 {
    let nf = n as f64;
    -nf * v.eval(x) + 0.75 * nf * (tau * x).powf(4.0 / 3.0) + 2.0 * size as f64 * (1.0 + x).ln()
}

/// Half-width of the integration range: beyond it the integrand bound lies
/// 2^{−prec}·e^{−40} below its maximum.
fn integration_range(n: usize, tau: f64, v: &EvenPoly, size: usize, prec: u32) -> Result<f64> {
    let f = |x: f64| log_integrand_bound(n, tau, v, size, x);
    let peak = (0..=2000).map(|i| f(i as f64 * 0.01)).fold(f64::NEG_INFINITY, f64::max);
    let drop = prec as f64 * std::f64::consts::LN_2 + 40.0;
    let mut x = 0.01;
    while f(x) > peak - drop || x < 1.0 {
        x *= 1.02;
        if x > 1e4 {
            return Err(Error::Domain("weight e^{−nV} does not dominate the coupling growth".into()));
        }
    }
    Ok(x)
}

/// Bimoment matrix of size `size`, with the quadrature grid that produced it.
#[derive(Debug, Clone)]
pub struct BimomentMatrix {
    pub n: usize,
    pub size: usize,
    pub tau: f64,
    pub v: EvenPoly,
    pub precision: u32,
    /// Row k, column l: ∫∫ x^k y^l e^{−n(V(x) + y⁴/4 − τxy)} dx dy.
    pub entries: Vec<Vec<Float>>,
    /// Final trapezoid step.
    pub step: f64,
    /// Half-width of the integration range.
    pub range: f64,
    /// Trapezoid refinements performed.
    pub refinements: usize,
}

/// Computes the bimoment matrix B_{kl}, 0 ≤ k, l < size, at `precision` bits.
pub fn bimoment_matrix(n: usize, v: &EvenPoly, tau: f64, size: usize, precision: u32) -> Result<BimomentMatrix> {
    if n == 0 || n % 3 != 0 {
        return Err(Error::Domain(format!("n = {n} must be a positive multiple of 3")));
    }
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau = {tau} must be positive")));
    }
    if size == 0 {
        return Err(Error::Domain("bimoment matrix size must be positive".into()));
    }
    let prec = precision;
    let tau_mp = fl(prec, tau);
    let range = integration_range(n, tau, v, size, prec)?;
    // Starting step of the order of the weight's width.
    let mut h = fl(prec, 0.5 / (n as f64).sqrt());
    let mut grid = HalfGrid::build(n, &tau_mp, v, &h, 0.0, range, size - 1);
    let entries_of = |g: &HalfGrid| g.entries(size);
    let mut current = entries_of(&grid);
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    let mut refinements = 0;
    let mut previous = fl(53, f64::INFINITY);
    loop {
        let mid = HalfGrid::build(n, &tau_mp, v, &h, 0.5, range, size - 1);
        grid.refine(mid);
        h /= 2u32;
        refinements += 1;
        let next = entries_of(&grid);
        let mut worst = fl(53, 0.0);
        for k in 0..size {
            for l in 0..size {
                if (k + l) % 2 == 0 {
                    let d = Float::with_val(prec, &next[k][l] - &current[k][l]).abs() / &next[k][l];
                    if d > worst {
                        worst = Float::with_val(53, d);
                    }
                }
            }
        }
        current = next;
        // Two consecutive small changes: a single one can be a coincidental
        // near-zero of the oscillating error term.
        if worst <= tol && previous <= tol {
            break;
        }
        previous = worst.clone();
        if refinements > 12 {
            return Err(Error::Accuracy(format!("trapezoid rule did not converge (relative change {worst})")));
        }
    }
    Ok(BimomentMatrix {
        n,
        size,
        tau,
        v: v.clone(),
        precision: prec,
        entries: current,
        step: h.to_f64(),
        range,
        refinements,
    })
}

/// Biorthogonal system {p_k, q_k, h_k²} for k < size of a bimoment matrix.
#[derive(Debug, Clone)]
pub struct BiorthoSystem {
    pub bimoment: BimomentMatrix,
    /// Unit lower factor L.
    pub lower: Vec<Vec<Float>>,
    /// Pivots h_k² = D_k.
    pub norms: Vec<Float>,
    /// Unit upper factor U.
    pub upper: Vec<Vec<Float>>,
    /// Monomial coefficients of p_k (row k of L⁻¹), lowest degree first.
    pub p_coeffs: Vec<Vec<Float>>,
    /// Monomial coefficients of q_k (column k of U⁻¹), lowest degree first.
    pub q_coeffs: Vec<Vec<Float>>,
    check: OnceLock<HalfGrid>,
}

fn unit_lower_inverse(l: &[Vec<Float>], prec: u32) -> Vec<Vec<Float>> {
    let m = l.len();
    let mut inv = vec![vec![fl(prec, 0.0); m]; m];
    for i in 0..m {
        inv[i][i] = fl(prec, 1.0);
        for j in 0..i {
            let mut s = fl(prec, 0.0);
            for k in j..i {
                s += Float::with_val(prec, &l[i][k] * &inv[k][j]);
            }
            inv[i][j] = -s;
        }
    }
    inv
}

/// LDU factorization without pivoting. Fails with the precision that would
/// be needed when a relative pivot D_k/B_kk falls below 2^{−bits/2}.
pub fn biortho_polynomials(b: BimomentMatrix) -> Result<BiorthoSystem> {
    let m = b.size;
    let prec = b.precision;
    let mut a = b.entries.clone();
    let mut lower = vec![vec![fl(prec, 0.0); m]; m];
    let mut upper = vec![vec![fl(prec, 0.0); m]; m];
    let mut norms = Vec::with_capacity(m);
    let floor = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    for k in 0..m {
        let d = a[k][k].clone();
        let rel = Float::with_val(prec, &d / &b.entries[k][k]);
        if !(rel > floor) {
            return Err(Error::InsufficientPrecision { required_bits: 2 * prec });
        }
        lower[k][k] = fl(prec, 1.0);
        upper[k][k] = fl(prec, 1.0);
        for i in k + 1..m {
            lower[i][k] = Float::with_val(prec, &a[i][k] / &d);
            upper[k][i] = Float::with_val(prec, &a[k][i] / &d);
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let t = Float::with_val(prec, &lower[i][k] * &a[k][j]);
                a[i][j] -= t;
            }
        }
        norms.push(d);
    }
    let p_coeffs = unit_lower_inverse(&lower, prec);
    // U⁻¹ columns = rows of (Uᵀ)⁻¹, and Uᵀ is unit lower.
    let ut: Vec<Vec<Float>> = (0..m).map(|i| (0..m).map(|j| upper[j][i].clone()).collect()).collect();
    let q_coeffs = unit_lower_inverse(&ut, prec);
    Ok(BiorthoSystem { bimoment: b, lower, norms, upper, p_coeffs, q_coeffs, check: OnceLock::new() })
}

/// Builds the system for p_k, q_k with k ≤ n (size n + 1) at `precision`
/// bits, doubling the precision while pivots are too small.
pub fn biortho_system(n: usize, v: &EvenPoly, tau: f64, precision: u32) -> Result<BiorthoSystem> {
    let mut prec = precision;
    loop {
        let b = bimoment_matrix(n, v, tau, n + 1, prec)?;
        match biortho_polynomials(b) {
            Err(Error::InsufficientPrecision { required_bits }) if required_bits <= MAX_PRECISION => prec = required_bits,
            other => return other,
        }
    }
}

impl BiorthoSystem {
    pub fn n(&self) -> usize {
        self.bimoment.n
    }

    pub fn precision(&self) -> u32 {
        self.bimoment.precision
    }

    fn tau_mp(&self) -> Float {
        fl(self.precision(), self.bimoment.tau)
    }

    fn poly(coeffs: &[Float], x: &Float) -> Float {
        let prec = x.prec();
        coeffs.iter().rev().fold(fl(prec, 0.0), |acc, c| acc * x + c)
    }

    /// p_k(x).
    pub fn p_mp(&self, k: usize, x: &Float) -> Float {
        Self::poly(&self.p_coeffs[k][..=k], x)
    }

    /// e^{−nV(x)} and I₀(x)…I_{m}(x).
    fn weight_and_moments(&self, x: &Float, m: usize) -> (Float, Vec<Float>) {
        let n = self.n();
        let e = Float::with_val(self.precision(), -v_mp(&self.bimoment.v, x) * n as u32).exp();
        (e, moment_functions_mp(n, &self.tau_mp(), x, m))
    }

    fn q_from_moments(&self, k: usize, e: &Float, moments: &[Float]) -> Float {
        let prec = self.precision();
        let mut s = fl(prec, 0.0);
        for (c, i) in self.q_coeffs[k][..=k].iter().zip(moments) {
            s += Float::with_val(prec, c * i);
        }
        s * e
    }

    /// Q_k(x) = e^{−nV(x)} Σ_m q_{k,m} I_m(x).
    pub fn transformed_q_mp(&self, k: usize, x: &Float) -> Float {
        let (e, m) = self.weight_and_moments(x, k);
        self.q_from_moments(k, &e, &m)
    }

    pub fn transformed_q(&self, k: usize, x: f64) -> f64 {
        self.transformed_q_mp(k, &fl(self.precision(), x)).to_f64()
    }

    /// K₁₁(x, y) = Σ_{k<n} p_k(x) Q_k(y) / h_k².
    pub fn kernel_k11_mp(&self, x: &Float, y: &Float) -> Float {
        let n = self.n();
        let prec = self.precision();
        let (e, m) = self.weight_and_moments(y, n - 1);
        let mut s = fl(prec, 0.0);
        for k in 0..n {
            let t = Float::with_val(prec, self.p_mp(k, x) * self.q_from_moments(k, &e, &m));
            s += t / &self.norms[k];
        }
        s
    }

    pub fn kernel_k11(&self, x: f64, y: f64) -> f64 {
        let prec = self.precision();
        self.kernel_k11_mp(&fl(prec, x), &fl(prec, y)).to_f64()
    }

    /// ρ_n(x) = K₁₁(x, x)/n.
    pub fn mean_density(&self, x: f64) -> f64 {
        self.kernel_k11(x, x) / self.n() as f64
    }

    /// Independent check rule: the trapezoid shifted by half the final step,
    /// with I₀…I_{size−1} at its nodes.
    fn check_grid(&self) -> &HalfGrid {
        self.check.get_or_init(|| {
            let b = &self.bimoment;
            let h = fl(self.precision(), b.step);
            HalfGrid::build(b.n, &self.tau_mp(), &b.v, &h, 0.5, b.range, b.size - 1)
        })
    }

    /// p_k(x_i) and Q_k(x_i) for k < size at the nodes of the check rule; Q
    /// includes the quadrature weight.
    fn check_values(&self, size: usize) -> (Vec<Vec<Float>>, Vec<Vec<Float>>) {
        let g = self.check_grid();
        let p = g.nodes.iter().map(|x| (0..size).map(|k| self.p_mp(k, x)).collect()).collect();
        let q = (0..g.nodes.len())
            .map(|i| (0..size).map(|k| self.q_from_moments(k, &g.weights[i], &g.moments[i])).collect())
            .collect();
        (p, q)
    }

    /// max_{k,l} |∫p_k Q_l dx − δ_{kl}h_k²| / (h_k h_l) over k, l < size,
    /// integrated with the independent shifted rule.
    pub fn biorthogonality_residual(&self) -> f64 {
        let size = self.bimoment.size;
        let prec = self.precision();
        let (pv, qv) = self.check_values(size);
        let mut worst = 0.0f64;
        for k in 0..size {
            for l in 0..size {
                if (k + l) % 2 == 1 {
                    continue; // odd integrand: zero by symmetry
                }
                let mut s = fl(prec, 0.0);
                for (p, q) in pv.iter().zip(&qv) {
                    s += Float::with_val(prec, &p[k] * &q[l]);
                }
                s *= 2u32;
                if k == l {
                    s -= &self.norms[k];
                }
                let scale = Float::with_val(prec, &self.norms[k] * &self.norms[l]).sqrt();
                worst = worst.max((s / scale).abs().to_f64());
            }
        }
        worst
    }

    /// max_{j ≤ 2, l < n/3} |∫ p_n x^l w_{j,n} dx| relative to ∫ |p_n x^l| w_{j,n} dx
    /// (requires size n + 1).
    pub fn multiple_orthogonality_residual(&self) -> Result<f64> {
        let n = self.n();
        if self.bimoment.size <= n {
            return Err(Error::Precondition("multiple orthogonality needs p_n (size n + 1)".into()));
        }
        let prec = self.precision();
        let g = self.check_grid();
        let mut worst = 0.0f64;
        for j in 0..3 {
            for l in 0..n / 3 {
                if (n + l + j) % 2 == 1 {
                    continue;
                }
                let (mut s, mut a) = (fl(prec, 0.0), fl(prec, 0.0));
                for i in 0..g.nodes.len() {
                    let x = &g.nodes[i];
                    let t = self.p_mp(n, x) * Float::with_val(prec, x.pow(l as u32)) * &g.moments[i][j] * &g.weights[i];
                    a += Float::with_val(prec, t.abs_ref());
                    s += t;
                }
                worst = worst.max((s / a).abs().to_f64());
            }
        }
        Ok(worst)
    }

    /// ∫ K₁₁(x, x) dx with the independent shifted rule.
    pub fn kernel_trace(&self) -> f64 {
        let n = self.n();
        let prec = self.precision();
        let (pv, qv) = self.check_values(n);
        let mut s = fl(prec, 0.0);
        for (p, q) in pv.iter().zip(&qv) {
            for k in 0..n {
                s += Float::with_val(prec, &p[k] * &q[k]) / &self.norms[k];
            }
        }
        (s * 2u32).to_f64()
    }

    /// Real zeros of p_k located by sign changes on a fine grid over the
    /// integration range and refined by bisection. k distinct zeros found
    /// means all zeros are real and simple.
    pub fn real_zeros(&self, k: usize) -> Vec<f64> {
        let prec = self.precision();
        let r = self.bimoment.range;
        let cells = 4000;
        let f = |x: f64| self.p_mp(k, &fl(prec, x));
        let mut zeros = Vec::new();
        let mut x0 = -r;
        let mut f0 = f(x0);
        for i in 1..=cells {
            let x1 = -r + 2.0 * r * i as f64 / cells as f64;
            let f1 = f(x1);
            if f1.is_zero() {
                zeros.push(x1);
            } else if !f0.is_zero() && f0.is_sign_negative() != f1.is_sign_negative() {
                let (mut lo, mut hi, flo_neg) = (x0, x1, f0.is_sign_negative());
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid).is_sign_negative() == flo_neg {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                zeros.push(0.5 * (lo + hi));
            }
            x0 = x1;
            f0 = f1;
        }
        zeros
    }
}

/// Edge constant ρ of dμ₁/dx ≈ (ρ/π)(a − x)^{1/2}: least squares over the
/// last 10% of the support.
pub fn edge_constant(sol: &EquilibriumSolution) -> f64 {
    let a = sol.a;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..=200 {
        let x = a - 0.1 * a * i as f64 / 200.0;
        let s = (a - x).sqrt();
        num += sol.mu1.density_at(x) * s;
        den += s * s;
    }
    std::f64::consts::PI * num / den
}

/// (1/(ρn))·K₁₁(x* + u/(ρn), x* + v/(ρn)).
pub fn rescaled_bulk_kernel(sys: &BiorthoSystem, x_star: f64, rho: f64, u: f64, v: f64) -> f64 {
    let s = rho * sys.n() as f64;
    sys.kernel_k11(x_star + u / s, x_star + v / s) / s
}

/// (1/(ρn)^{2/3})·K₁₁(a + u/(ρn)^{2/3}, a + v/(ρn)^{2/3}).
pub fn rescaled_edge_kernel(sys: &BiorthoSystem, a: f64, rho: f64, u: f64, v: f64) -> f64 {
    let s = (rho * sys.n() as f64).powf(2.0 / 3.0);
    sys.kernel_k11(a + u / s, a + v / s) / s
}

/// Scaling regime of a kernel comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Sine-kernel limit at x* = 0.
    Bulk,
    /// Airy-kernel limit at the right endpoint a.
    Edge,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bulk" => Ok(Mode::Bulk),
            "edge" => Ok(Mode::Edge),
            _ => Err(Error::Config(format!("mode must be bulk or edge, got {s:?}"))),
        }
    }
}

/// The fixed comparison grid u ∈ {−2, −1.5, …, 2}.
pub fn comparison_grid() -> Vec<f64> {
    (0..9).map(|i| -2.0 + 0.5 * i as f64).collect()
}

/// Point sets of the k-point comparisons on the grid: singletons, all pairs,
/// and consecutive triples.
pub fn comparison_sets(len: usize) -> [Vec<Vec<usize>>; 3] {
    let ones = (0..len).map(|i| vec![i]).collect();
    let pairs = (0..len).flat_map(|i| (i + 1..len).map(move |j| vec![i, j])).collect();
    let triples = (0..len.saturating_sub(2)).map(|i| vec![i, i + 1, i + 2]).collect();
    [ones, pairs, triples]
}

/// k-point determinants of the rescaled kernel against the limit kernel on
/// the comparison grid.
#[derive(Debug, Clone, Serialize)]
pub struct DeterminantComparison {
    pub mode: Mode,
    pub grid: Vec<f64>,
    /// Rescaled finite-n kernel on grid × grid.
    pub kernel: Vec<Vec<f64>>,
    /// Limit kernel on grid × grid.
    pub reference: Vec<Vec<f64>>,
    /// sup-error of the k-point determinants, k = 1, 2, 3.
    pub sup_errors: [f64; 3],
}

fn sub_det(m: &[Vec<f64>], set: &[usize]) -> Result<f64> {
    let pts: Vec<f64> = (0..set.len()).map(|i| i as f64).collect();
    correlation_det(|u, v| m[set[u as usize]][set[v as usize]], &pts)
}

/// Compares the rescaled K₁₁ with the sine kernel (bulk, x* = 0, density
/// ρ = dμ₁/dx(0)) or the Airy kernel (edge, constant from [`edge_constant`]).
pub fn compare_determinants(sys: &BiorthoSystem, sol: &EquilibriumSolution, mode: Mode) -> Result<DeterminantComparison> {
    let grid = comparison_grid();
    let (kernel, reference): (Vec<Vec<f64>>, Vec<Vec<f64>>) = match mode {
        Mode::Bulk => {
            let rho = sol.mu1.density_at(0.0);
            (
                grid.iter().map(|&u| grid.iter().map(|&v| rescaled_bulk_kernel(sys, 0.0, rho, u, v)).collect()).collect(),
                grid.iter().map(|&u| grid.iter().map(|&v| sine_kernel(u, v)).collect()).collect(),
            )
        }
        Mode::Edge => {
            let rho = edge_constant(sol);
            (
                grid.iter().map(|&u| grid.iter().map(|&v| rescaled_edge_kernel(sys, sol.a, rho, u, v)).collect()).collect(),
                grid.iter().map(|&u| grid.iter().map(|&v| airy_kernel(u, v)).collect()).collect(),
            )
        }
    };
    let mut sup_errors = [0.0f64; 3];
    for (k, sets) in comparison_sets(grid.len()).iter().enumerate() {
        for set in sets {
            let e = (sub_det(&kernel, set)? - sub_det(&reference, set)?).abs();
            sup_errors[k] = sup_errors[k].max(e);
        }
    }
    Ok(DeterminantComparison { mode, grid, kernel, reference, sup_errors })
}

/// Comparison of one finite-n system against the equilibrium density and
/// the sine / Airy limits.
#[derive(Debug, Clone, Serialize)]
pub struct UniversalityRow {
    pub n: usize,
    pub precision: u32,
    /// sup over the sample grid of |ρ_n − dμ₁/dx|.
    pub density_sup_error: f64,
    /// Bulk k-point determinant sup-errors on the comparison grid, k = 1, 2, 3.
    pub bulk_errors: [f64; 3],
    /// Edge k-point determinant sup-errors on the comparison grid, k = 1, 2, 3.
    pub edge_errors: [f64; 3],
    /// Rescaled edge diagonal at u = 0 (limit Ai′(0)²).
    pub edge_diagonal: f64,
    pub biorthogonality_residual: f64,
    pub kernel_trace: f64,
}

/// Evaluation points of the density comparison: 241 points on [−1.2a, 1.2a].
pub fn density_sample_points(a: f64) -> Vec<f64> {
    (0..=240).map(|i| -1.2 * a + 2.4 * a * i as f64 / 240.0).collect()
}

/// Builds the system at size n and compares it against `sol`.
pub fn universality_row(sol: &EquilibriumSolution, n: usize, precision: u32) -> Result<(BiorthoSystem, UniversalityRow)> {
    let sys = biortho_system(n, &sol.v, sol.tau, precision)?;
    let density_sup_error = density_sample_points(sol.a)
        .into_iter()
        .map(|x| (sys.mean_density(x) - sol.mu1.density_at(x)).abs())
        .fold(0.0, f64::max);
    let bulk = compare_determinants(&sys, sol, Mode::Bulk)?;
    let edge = compare_determinants(&sys, sol, Mode::Edge)?;
    let row = UniversalityRow {
        n,
        precision: sys.precision(),
        density_sup_error,
        bulk_errors: bulk.sup_errors,
        edge_errors: edge.sup_errors,
        edge_diagonal: edge.kernel[4][4],
        biorthogonality_residual: sys.biorthogonality_residual(),
        kernel_trace: sys.kernel_trace(),
    };
    Ok((sys, row))
}

/// True iff the sequence is strictly decreasing.
pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
