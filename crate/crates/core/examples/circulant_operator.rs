// The expectation operator `A`: its spectrum, fast products and the norm
// bounds on its inverse.

use dp_profile::circulant::{spectral_floor, CirculantOperator};
use dp_profile::{Norm, Result};

pub fn run_example() -> Result<()> {
    let (n, b, epsilon) = (40, 5, 1.0);
    let op = CirculantOperator::new(n, b, epsilon)?;
    println!("m = {}, P_norm = {:.6}", op.m(), op.p_norm());

    let smallest = op.eigenvalues().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    println!("smallest |eigenvalue| = {smallest:.4} (floor {:.4})", spectral_floor(epsilon, b));

    let x: Vec<f64> = (0..op.m()).map(|i| (i as f64 * 0.3).sin()).collect();
    let back = op.apply_inverse(&op.apply(&x)?)?;
    let err = Norm::Linf.distance(&x, &back);
    println!("round trip error {err:.2e}");
    assert!(err < 1e-10);

    let bounds = op.norm_bounds()?;
    println!(
        "‖A⁻¹‖₁ = ‖A⁻¹‖∞ <= {:.4}, ‖A⁻¹‖₂ <= {:.4}",
        bounds.bound_1_inf, bounds.bound_2
    );
    Ok(())
}

fn main() {
    run_example().expect("circulant_operator");
}
