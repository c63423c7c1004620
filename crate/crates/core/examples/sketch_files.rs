// Round trip through the on-disk formats used by the command-line tool.

use dp_profile::io::{parse_histogram, profile_csv, read_sketch, sketch_to_json, write_atomic};
use dp_profile::{privatize, reconstruct_profile, seeded_rng, Histogram, Norm, ReconstructionConfig, Result};

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let text = "# one count per line\n3\n0\n5\n5\n1\n";
    let h = Histogram::new(parse_histogram(text)?, 20)?;

    let sketch = privatize(&h, 2.0, false, &mut seeded_rng(0))?;
    let path = dir.path().join("sketch.json");
    write_atomic(&path, sketch_to_json(&sketch).as_bytes())?;
    print!("{}", std::fs::read_to_string(&path)?);
    assert_eq!(read_sketch(&path)?, sketch);

    let cfg = ReconstructionConfig::new(2.0, 0.05, 20, h.d(), Norm::L1)?;
    let r = reconstruct_profile(&sketch, &cfg, &mut seeded_rng(0))?;
    print!("{}", profile_csv(&r));
    Ok(())
}

fn main() {
    run_example().expect("sketch_files");
}
