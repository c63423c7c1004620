// End to end: synthesize a heavy-tailed histogram, privatize it and
// reconstruct its profile under each norm.

use dp_profile::eval::{synth_histogram, true_profile, Distribution, SynthSpec};
use dp_profile::{privatize, reconstruct_profile, seeded_rng, Norm, ReconstructionConfig, Result};

pub fn run_example() -> Result<()> {
    let spec = SynthSpec {
        distribution: Distribution::Zipf(0.5),
        d: 50_000,
        n: 24,
        seed: 4,
    };
    let h = synth_histogram(&spec)?;
    let f = true_profile(&h);
    let mut rng = seeded_rng(4);
    let sketch = privatize(&h, 1.0, true, &mut rng)?;

    for p in Norm::ALL {
        let cfg = ReconstructionConfig::new(1.0, 0.05, spec.n, spec.d, p)?;
        let r = reconstruct_profile(&sketch, &cfg, &mut rng)?;
        println!("{p:>4}: B = {}, error {:.5}", cfg.b(), p.distance(r.values(), f.values()));
    }

    let cfg = ReconstructionConfig::new(1.0, 0.05, spec.n, spec.d, Norm::L2)?;
    let r = reconstruct_profile(&sketch, &cfg, &mut rng)?;
    println!(" t   true      estimate");
    for t in 0..6 {
        println!("{t:>2}   {:.5}   {:.5}", f.values()[t], r.values()[t]);
    }
    Ok(())
}

fn main() {
    run_example().expect("reconstruct_profile");
}
