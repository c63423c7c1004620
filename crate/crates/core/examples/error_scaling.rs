// Compare measured errors against the analytic bounds and fit the
// error-versus-d power law.

use dp_profile::eval::{fit_scaling, sweep, Distribution, SynthSpec};
use dp_profile::{Norm, ReconstructionConfig, Result};

pub fn run_example() -> Result<()> {
    let n = 20;
    let grid = [1_000, 4_000, 16_000]
        .into_iter()
        .map(|d| {
            let spec = SynthSpec {
                distribution: Distribution::UniformCounts,
                d,
                n,
                seed: 2,
            };
            Ok((spec, ReconstructionConfig::new(1.0, 0.05, n, d, Norm::L2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = sweep(&grid, 20, 42)?;

    for p in Norm::ALL {
        let covered = rows.iter().filter(|r| r.p == p && r.err <= r.bound).count();
        let total = rows.iter().filter(|r| r.p == p).count();
        println!("{p:>4}: {covered}/{total} within bound, slope {:.3}", fit_scaling(&rows, p)?);
    }
    Ok(())
}

fn main() {
    run_example().expect("error_scaling");
}
