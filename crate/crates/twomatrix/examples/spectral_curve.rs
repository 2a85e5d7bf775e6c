//! Builds the spectral curve of the V = x²/2, τ = 1 solution: the (s, t)
//! parameters, the ξ-sheets, α and the full invariant report.
use num_complex::Complex64;
use twomatrix::curve::{curve_report, EvalPoint, SpectralCurve};
use twomatrix::equilibrium::{solve_vector_equilibrium, EquilibriumOptions};
use twomatrix::potential::EvenPoly;

fn main() -> twomatrix::Result<()> {
    let v = EvenPoly::new(vec![0.0, 0.5])?;
    let sol = solve_vector_equilibrium(&v, 1.0, &EquilibriumOptions::default())?;
    let sc = SpectralCurve::new(&sol)?;
    println!("a = {:.12}, c = {:.12} → s = {:.12}, t = {:.12}", sol.a, sol.c, sc.s, sc.t);
    let z = Complex64::new(1.2, 0.8);
    let p = EvalPoint::off_axis(z)?;
    let w = sc.sheet_maps(&p)?;
    for j in 1..=4 {
        println!("sheet {j}: w = {:.10}, ξ = {:.10}", w[j - 1], sc.xi(j, &p)?);
    }
    println!("α = {:.10} (from F₃: {:.10})", sc.alpha, sc.alpha_estimate.alpha_from_f3);
    let report = curve_report(&sc, 1)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}
