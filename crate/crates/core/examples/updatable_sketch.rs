// An unclipped sketch can absorb later changes to the histogram without
// drawing new noise.

use dp_profile::mechanism::{privatize, update, Histogram};
use dp_profile::{seeded_rng, Error, Result};

pub fn run_example() -> Result<()> {
    let h = Histogram::new(vec![2, 0, 4, 1, 3], 10)?;
    let mut rng = seeded_rng(1);
    let sketch = privatize(&h, 0.5, false, &mut rng)?;

    let delta = [1, 3, -2, 0, 5];
    let updated = update(&sketch, &delta)?;
    println!("before: {:?}", sketch.counts);
    println!("after:  {:?}", updated.counts);

    let undo: Vec<i64> = delta.iter().map(|v| -v).collect();
    assert_eq!(update(&updated, &undo)?, sketch);

    let clipped = privatize(&h, 0.5, true, &mut rng)?;
    match update(&clipped, &delta) {
        Err(Error::ClippedSketch) => println!("clipped sketches cannot be updated"),
        other => panic!("expected a clipped-sketch error, got {other:?}"),
    }
    Ok(())
}

fn main() {
    run_example().expect("updatable_sketch");
}
