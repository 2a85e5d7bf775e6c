//! Builds the biorthogonal system for V = x²/2, τ = 1 at n = 6, 12, 24 in
//! 256-bit arithmetic and prints the checks and the mean density ρ_n.
use twomatrix::finite_n::biortho_system;
use twomatrix::potential::EvenPoly;

fn main() -> twomatrix::Result<()> {
    let v = EvenPoly::new(vec![0.0, 0.5])?;
    for n in [6, 12, 24] {
        let sys = biortho_system(n, &v, 1.0, 256)?;
        println!(
            "n = {n:>2} ({} bits): biorthogonality {:.1e}, multiple orthogonality {:.1e}, ∫K₁₁ = {:.12}",
            sys.precision(),
            sys.biorthogonality_residual(),
            sys.multiple_orthogonality_residual()?,
            sys.kernel_trace()
        );
        let zeros = sys.real_zeros(n);
        println!("  p_n has {} real zeros in [{:.4}, {:.4}]", zeros.len(), zeros[0], zeros[zeros.len() - 1]);
        let rho: Vec<String> = [0.0, 1.0, 2.0, 3.0].iter().map(|&x| format!("ρ_n({x}) = {:.6}", sys.mean_density(x))).collect();
        println!("  {}", rho.join(", "));
    }
    Ok(())
}
