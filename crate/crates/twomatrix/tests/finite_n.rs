use rug::ops::Pow;
use rug::Float;
use std::sync::OnceLock;
use twomatrix::equilibrium::{solve_vector_equilibrium, EquilibriumOptions, EquilibriumSolution};
use twomatrix::finite_n::*;
use twomatrix::potential::EvenPoly;
use twomatrix::Error;

const PREC: u32 = 256;

fn gaussian() -> EvenPoly {
    EvenPoly::new(vec![0.0, 0.5]).unwrap()
}

fn system(n: usize) -> &'static BiorthoSystem {
    static SYSTEMS: OnceLock<Vec<BiorthoSystem>> = OnceLock::new();
    let all = SYSTEMS.get_or_init(|| [6, 12, 24].iter().map(|&n| biortho_system(n, &gaussian(), 1.0, PREC).unwrap()).collect());
    all.iter().find(|s| s.n() == n).unwrap()
}

fn solution() -> &'static EquilibriumSolution {
    static SOL: OnceLock<EquilibriumSolution> = OnceLock::new();
    SOL.get_or_init(|| solve_vector_equilibrium(&gaussian(), 1.0, &EquilibriumOptions::default()).unwrap())
}

/// y-first evaluation for V = x²/2: the x-integral is a shifted Gaussian
/// moment, leaving ∫ y^j e^{−ny⁴/4 + nτ²y²/2} dy as a positive power series
/// in nτ²/2 over the quartic moments ½(4/n)^{(i+1)/4}Γ((i+1)/4).
fn bimoment_series(n: usize, tau: f64, k: usize, l: usize) -> Float {
    let p = PREC;
    if (k + l) % 2 == 1 {
        return Float::with_val(p, 0);
    }
    let nf = Float::with_val(p, n);
    let quartic = |i: usize| -> Float {
        let e = Float::with_val(p, i + 1) / 4u32;
        let base = Float::with_val(p, 4u32) / &nf;
        Float::with_val(p, base.pow(&e)) * e.gamma() / 2u32
    };
    let b = Float::with_val(p, tau).square() * &nf / 2u32;
    let y_moment = |j: usize| -> Float {
        let mut sum = Float::with_val(p, 0);
        let mut coef = Float::with_val(p, 1);
        for r in 0..4000usize {
            let term = Float::with_val(p, &coef * quartic(j + 2 * r));
            sum += &term;
            if r > 10 && term < Float::with_val(p, &sum * Float::with_val(p, Float::i_exp(1, -300))) {
                break;
            }
            coef *= &b;
            coef /= (r + 1) as u32;
        }
        sum
    };
    let mut total = Float::with_val(p, 0);
    let mut binom = Float::with_val(p, 1); // C(k, i)
    let mut dfact = Float::with_val(p, 1); // (i − 1)!!
    for i in 0..=k {
        if i > 0 {
            binom *= (k - i + 1) as u32;
            binom /= i as u32;
        }
        if i % 2 == 0 {
            if i >= 2 {
                dfact *= (i - 1) as u32;
            }
            let t = Float::with_val(p, &binom * &dfact) / Float::with_val(p, nf.clone().pow(i as u32)).sqrt()
                * Float::with_val(p, tau).pow((k - i) as u32)
                * y_moment(l + k - i);
            total += t;
        }
    }
    let pi = Float::with_val(p, rug::float::Constant::Pi);
    total * (pi * 2u32 / nf).sqrt()
}

#[test]
fn bimoment_entries_agree_with_the_y_first_series() {
    for (n, tau) in [(3, 1.0), (6, 1.0), (6, 0.7)] {
        let b = bimoment_matrix(n, &gaussian(), tau, 8, PREC).unwrap();
        for k in 0..8 {
            for l in 0..8 {
                let want = bimoment_series(n, tau, k, l);
                if (k + l) % 2 == 1 {
                    assert!(b.entries[k][l].is_zero());
                    continue;
                }
                let rel = Float::with_val(PREC, &b.entries[k][l] - &want).abs() / &want;
                assert!(rel.to_f64() < 1e-60, "n={n} τ={tau} B[{k}][{l}]: {rel}");
            }
        }
    }
}

#[test]
fn b00_against_direct_double_quadrature() {
    // Tensor trapezoid over (x, y) ∈ [−7, 7]² of e^{−3(x²/2 + y⁴/4 − xy)}.
    let b = bimoment_matrix(3, &gaussian(), 1.0, 1, PREC).unwrap();
    let m = 1400;
    let h = 14.0 / m as f64;
    let mut s = 0.0;
    for i in 0..=m {
        let x = -7.0 + i as f64 * h;
        for j in 0..=m {
            let y = -7.0 + j as f64 * h;
            s += (-3.0 * (x * x / 2.0 + y.powi(4) / 4.0 - x * y)).exp();
        }
    }
    s *= h * h;
    let b00 = b.entries[0][0].to_f64();
    assert!((s - b00).abs() < 1e-12 * b00, "{s} vs {b00}");
}

#[test]
fn degree_zero_and_parity() {
    let sys = system(6);
    assert_eq!(sys.p_coeffs[0][0].to_f64(), 1.0);
    assert_eq!(sys.q_coeffs[0][0].to_f64(), 1.0);
    assert_eq!(sys.norms[0], sys.bimoment.entries[0][0]);
    for k in 0..=6 {
        assert_eq!(sys.p_coeffs[k][k].to_f64(), 1.0);
        assert_eq!(sys.q_coeffs[k][k].to_f64(), 1.0);
        for j in 0..k {
            if (k + j) % 2 == 1 {
                assert!(sys.p_coeffs[k][j].is_zero() && sys.q_coeffs[k][j].is_zero(), "k={k} j={j}");
            }
        }
        assert!(sys.norms[k] > 0);
    }
    for k in 0..6 {
        for x in [0.3, 1.1, 2.0] {
            let (q, qm) = (sys.transformed_q(k, x), sys.transformed_q(k, -x));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((qm - sign * q).abs() <= 1e-14 * q.abs().max(1e-300));
        }
    }
}

#[test]
fn zeros_are_real_and_simple() {
    let sys = system(6);
    let z = sys.real_zeros(6);
    assert_eq!(z.len(), 6, "{z:?}");
    assert!(z.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn biorthogonality_and_multiple_orthogonality() {
    for n in [6, 12, 24] {
        let sys = system(n);
        let r = sys.biorthogonality_residual();
        assert!(r < 1e-20, "n={n}: {r:e}");
        let m = sys.multiple_orthogonality_residual().unwrap();
        assert!(m < 1e-20, "n={n}: {m:e}");
    }
}

#[test]
fn kernel_trace_parity_and_positivity() {
    for n in [6, 12, 24] {
        let sys = system(n);
        assert!((sys.kernel_trace() - n as f64).abs() < 1e-6 * n as f64);
        for (x, y) in [(0.2, 0.9), (-1.3, 0.4), (2.5, -2.0)] {
            let (k, km) = (sys.kernel_k11(x, y), sys.kernel_k11(-x, -y));
            assert!((k - km).abs() <= 1e-12 * k.abs().max(1e-12));
        }
        for i in -40..=40 {
            let x = 0.1 * i as f64;
            assert!(sys.kernel_k11(x, x) >= 0.0);
            assert!((sys.mean_density(x) - sys.mean_density(-x)).abs() < 1e-14);
        }
    }
    // ∫ρ₆ = 1 with an independent composite Simpson rule in double precision.
    let sys = system(6);
    let (lo, hi, m) = (-6.0, 6.0, 1200);
    let h = (hi - lo) / m as f64;
    let s: f64 = (0..=m)
        .map(|i| {
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * sys.mean_density(lo + i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    assert!((s - 1.0).abs() < 1e-6, "{s}");
}

#[test]
fn precision_escalation_and_sufficiency() {
    let b = bimoment_matrix(24, &gaussian(), 1.0, 25, 64).unwrap();
    match biortho_polynomials(b) {
        Err(Error::InsufficientPrecision { required_bits }) => assert_eq!(required_bits, 128),
        other => panic!("expected a precision error, got {:?}", other.map(|s| s.precision())),
    }
    let escalated = biortho_system(24, &gaussian(), 1.0, 64).unwrap();
    assert!(escalated.precision() >= 128);
    let fine = biortho_system(24, &gaussian(), 1.0, 512).unwrap();
    let coarse = system(24);
    for (x, y) in [(0.0, 0.0), (0.4, -0.2), (2.7, 2.8)] {
        let (a, b) = (coarse.kernel_k11(x, y), fine.kernel_k11(x, y));
        assert!((a - b).abs() < 1e-10, "({x}, {y}): {a} vs {b}");
    }
}

#[test]
fn invalid_sizes_are_rejected() {
    assert!(bimoment_matrix(5, &gaussian(), 1.0, 3, PREC).is_err());
    assert!(bimoment_matrix(6, &gaussian(), -1.0, 3, PREC).is_err());
}

#[test]
fn convergence_to_equilibrium_and_universal_limits() {
    let sol = solution();
    let rows: Vec<UniversalityRow> = [6, 12, 24].iter().map(|&n| universality_row(sol, n, PREC).unwrap().1).collect();
    let col = |f: &dyn Fn(&UniversalityRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let dens = col(&|r| r.density_sup_error);
    assert!(strictly_decreasing(&dens), "{dens:?}");
    let b1 = col(&|r| r.bulk_errors[0]);
    let b2 = col(&|r| r.bulk_errors[1]);
    assert!(strictly_decreasing(&b1) && strictly_decreasing(&b2), "{b1:?} {b2:?}");
    let ai0 = 0.258_819_403_792_806_8_f64; // −Ai′(0) = 3^{−1/3}/Γ(1/3)
    let edge = col(&|r| (r.edge_diagonal - ai0 * ai0).abs());
    assert!(strictly_decreasing(&edge), "{edge:?}");
}
