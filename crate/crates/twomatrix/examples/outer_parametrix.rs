//! Constructs the outer parametrix M for given endpoints (a, c) and checks
//! det M = 1, the jump relations and the normalization at infinity.
use twomatrix::curve::{build_outer_parametrix, RationalCurve};

fn main() -> twomatrix::Result<()> {
    let curve = RationalCurve::new(2.0, 1.0)?;
    println!("s = {:.12}, t = {:.12}", curve.s, curve.t);
    for (k, b) in curve.branch_points().iter().enumerate() {
        println!("branch point {k}: {b:.10}");
    }
    let par = build_outer_parametrix(&curve)?;
    let rep = par.verify(50, 20, &[10.0, 20.0, 40.0], 7)?;
    println!("max |det M − 1| = {:.2e}", rep.det_error);
    println!("max jump residual = {:.2e}", rep.jump_error);
    for (r, e) in &rep.asymptotic {
        println!("|z| = {r:>4}: ‖MA⁻¹ − I‖ = {e:.4e}  (|z|·err = {:.4})", r * e);
    }
    Ok(())
}
