// Privatize a histogram with and without clipping, then unfold the clipped
// sketch so it can be used like an unclipped one.

use dp_profile::mechanism::{privatize, unfold, Histogram};
use dp_profile::{seeded_rng, Result};

pub fn run_example() -> Result<()> {
    let h = Histogram::new(vec![0, 0, 1, 3, 8, 8, 2, 0], 8)?;
    let mut rng = seeded_rng(7);

    let raw = privatize(&h, 1.0, false, &mut rng)?;
    println!("true counts:     {:?}", h.counts());
    println!("noisy counts:    {:?}", raw.counts);

    let clipped = privatize(&h, 1.0, true, &mut rng)?;
    println!("clipped counts:  {:?}", clipped.counts);
    assert!(clipped.counts.iter().all(|&c| (0..=8).contains(&c)));

    // boundary values get pushed back out with fresh geometric noise
    let unfolded = unfold(&clipped, &mut rng)?;
    println!("unfolded counts: {:?}", unfolded.counts);
    for (c, u) in clipped.counts.iter().zip(&unfolded.counts) {
        match *c {
            0 => assert!(*u <= 0),
            8 => assert!(*u >= 8),
            _ => assert_eq!(c, u),
        }
    }
    Ok(())
}

fn main() {
    run_example().expect("privatize_and_unfold");
}
