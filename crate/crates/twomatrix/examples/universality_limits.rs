//! Compares the rescaled finite-n kernel with the sine kernel in the bulk
//! and the Airy kernel at the edge, for n = 6, 12, 24.
use twomatrix::equilibrium::{solve_vector_equilibrium, EquilibriumOptions};
use twomatrix::finite_n::universality_row;
use twomatrix::potential::EvenPoly;
use twomatrix::universal::airy;

fn main() -> twomatrix::Result<()> {
    let v = EvenPoly::new(vec![0.0, 0.5])?;
    let sol = solve_vector_equilibrium(&v, 1.0, &EquilibriumOptions::default())?;
    let aip0 = airy(0.0).1;
    println!(" n  sup|ρ_n − dμ₁/dx|  bulk k=1,2,3                 edge k=1,2,3                 edge K(0,0)");
    for n in [6, 12, 24] {
        let (_, r) = universality_row(&sol, n, 256)?;
        println!(
            "{:>2}  {:.4e}         {:.3e} {:.3e} {:.3e}  {:.3e} {:.3e} {:.3e}  {:.5}",
            n,
            r.density_sup_error,
            r.bulk_errors[0],
            r.bulk_errors[1],
            r.bulk_errors[2],
            r.edge_errors[0],
            r.edge_errors[1],
            r.edge_errors[2],
            r.edge_diagonal
        );
    }
    println!("Ai′(0)² = {:.5}", aip0 * aip0);
    Ok(())
}
