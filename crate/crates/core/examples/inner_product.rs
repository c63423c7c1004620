// Two parties estimate the inner product of their ±1 vectors from one
// private sketch.

use dp_profile::twoparty::{
    alice_message, bob_estimate, protocol_config, run_protocol, sensitivity_bound, PartyVector,
};
use dp_profile::{build_operator, seeded_rng, Result};

pub fn run_example() -> Result<()> {
    let (d, epsilon) = (20_000, 1.0);
    let mut rng = seeded_rng(5);
    let x = PartyVector::random(d, &mut rng);
    let y = PartyVector::random(d, &mut rng);

    let delta = sensitivity_bound(&build_operator(&protocol_config(d, epsilon)?)?, d)?;
    let message = alice_message(&x, epsilon, &mut rng)?;
    let estimate = bob_estimate(&message, &y, epsilon, delta, &mut rng)?;
    println!("<x, y> = {}, Bob publishes {estimate:.1} (Δ = {delta:.2e})", x.dot(&y));

    let results = run_protocol(d, epsilon, 20, 9)?;
    let mean = results.iter().map(|r| r.abs_error).sum::<f64>() / results.len() as f64;
    println!("mean |error| over {} runs: {mean:.1} (√d = {:.1})", results.len(), (d as f64).sqrt());
    Ok(())
}

fn main() {
    run_example().expect("inner_product");
}
