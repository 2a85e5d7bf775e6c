//! Evaluates the six Pearcey integrals, their linear relation and ODE, the
//! steepest-descent asymptotics, and the weights w_{j,n}.
use num_complex::Complex64;
use twomatrix::pearcey::{pearcey_asymptotic_check, PearceyEvaluator, WeightSystem};
use twomatrix::potential::EvenPoly;

fn main() -> twomatrix::Result<()> {
    let ev = PearceyEvaluator::default();
    let z = Complex64::new(0.9, -0.4);
    for j in 0..6 {
        println!("p_{j}({z}) = {:.12}", ev.pearcey(j, z, 0)?);
    }
    let p5 = ev.pearcey(5, z, 0)?;
    let rel = ev.pearcey(4, z, 0)? - ev.pearcey(1, z, 0)?;
    println!("|p₅ − (p₄ − p₁)| = {:.2e}", (p5 - rel).norm());
    // p‴ = z·p, with p‴ from a central difference of the exact p″.
    let h = 1e-3;
    let p3 = (ev.pearcey(0, z + h, 2)? - ev.pearcey(0, z - h, 2)?) / (2.0 * h);
    println!("|p₀‴ − z p₀| = {:.2e} (difference step {h})", (p3 - z * ev.pearcey(0, z, 0)?).norm());
    for theta in [0.0, std::f64::consts::PI] {
        let rep = pearcey_asymptotic_check(&ev, &[10.0, 20.0, 40.0], theta)?;
        println!("ray θ = {theta:.3}: errors {:?}, log-log slope {:.3}", rep.errors, rep.slope);
    }
    let ws = WeightSystem::new(12, 1.0, EvenPoly::new(vec![0.0, 0.5])?)?;
    for x in [0.0, 0.5, 1.5] {
        let w: Vec<f64> = (0..3).map(|j| ws.weight_w(j, x)).collect::<twomatrix::Result<_>>()?;
        println!("n = 12, x = {x}: w₀, w₁, w₂ = {:.6e}, {:.6e}, {:.6e}", w[0], w[1], w[2]);
    }
    Ok(())
}
