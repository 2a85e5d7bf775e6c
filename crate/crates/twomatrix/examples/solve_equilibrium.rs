//! Solves the vector equilibrium problem for V = x²/2, τ = 1 and prints the
//! support parameters, energies and residuals.
use twomatrix::equilibrium::{edge_exponents, solve_vector_equilibrium, EquilibriumOptions};
use twomatrix::potential::EvenPoly;

fn main() -> twomatrix::Result<()> {
    let v = EvenPoly::new(vec![0.0, 0.5])?;
    let t = std::time::Instant::now();
    let sol = solve_vector_equilibrium(&v, 1.0, &EquilibriumOptions::default())?;
    println!("a = {:.12}, c = {:.12}, ell = {:.12}", sol.a, sol.c, sol.ell);
    println!("masses: {:.12} {:.12} {:.12}", sol.mu1.total_mass(), sol.mu2.total_mass(), sol.mu3.total_mass());
    println!("density of mu1 at 0: {:.12}", sol.field.density(0.0));
    println!("iterations {}, energy trace {:?}", sol.iterations, sol.energy_trace);
    println!("c trace {:?}", sol.c_trace);
    println!("residuals {:?}", sol.residual_report);
    println!("edge exponents {:?}", edge_exponents(&sol));
    println!("one-cut regular: {}", sol.one_cut_regular);
    println!("elapsed {:?}", t.elapsed());
    Ok(())
}
