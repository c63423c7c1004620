//! File formats: histogram text, sketch JSON and the CSV outputs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::ErrorReport;
use crate::mechanism::PrivateSketch;
use crate::reconstruct::Profile;
use crate::twoparty::ProtocolResult;

pub const SKETCH_VERSION: u32 = 1;

/// Parses one integer per line. Blank lines and lines starting with `#` are skipped.
pub fn parse_counts(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = line.parse::<i64>().map_err(|_| Error::Parse {
            location: format!("line {}", idx + 1),
            reason: format!("`{line}` is not an integer"),
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Parses a histogram file: non-negative counts, at least one item.
pub fn parse_histogram(text: &str) -> Result<Vec<u64>> {
    let values = parse_counts(text)?;
    if values.is_empty() {
        return Err(Error::Parse {
            location: "input".into(),
            reason: "histogram has no counts".into(),
        });
    }
    // re-scan to report the offending line number
    if values.iter().any(|&v| v < 0) {
        for (idx, line) in text.lines().enumerate() {
            if line.trim().parse::<i64>().is_ok_and(|v| v < 0) {
                return Err(Error::Parse {
                    location: format!("line {}", idx + 1),
                    reason: format!("count {} is negative", line.trim()),
                });
            }
        }
    }
    Ok(values.into_iter().map(|v| v as u64).collect())
}

pub fn read_histogram(path: &Path) -> Result<Vec<u64>> {
    parse_histogram(&fs::read_to_string(path)?)
}

pub fn read_counts(path: &Path) -> Result<Vec<i64>> {
    parse_counts(&fs::read_to_string(path)?)
}

#[derive(Serialize, Deserialize)]
struct SketchFile {
    version: u32,
    epsilon: f64,
    n: u64,
    d: usize,
    clipped: bool,
    counts: Vec<i64>,
}

pub fn sketch_to_json(s: &PrivateSketch) -> String {
    let file = SketchFile {
        version: SKETCH_VERSION,
        epsilon: s.epsilon,
        n: s.n,
        d: s.d(),
        clipped: s.clipped,
        counts: s.counts.clone(),
    };
    let mut text = serde_json::to_string(&file).expect("sketch serializes");
    text.push('\n');
    text
}

pub fn sketch_from_json(text: &str) -> Result<PrivateSketch> {
    let file: SketchFile = serde_json::from_str(text)?;
    if file.version != SKETCH_VERSION {
        return Err(Error::Parse {
            location: "version".into(),
            reason: format!("unsupported sketch version {}", file.version),
        });
    }
    if file.d != file.counts.len() {
        return Err(Error::Parse {
            location: "d".into(),
            reason: format!("d = {} but {} counts are present", file.d, file.counts.len()),
        });
    }
    if !(file.epsilon.is_finite() && file.epsilon > 0.0) {
        return Err(Error::Parse {
            location: "epsilon".into(),
            reason: format!("epsilon must be positive, got {}", file.epsilon),
        });
    }
    Ok(PrivateSketch {
        counts: file.counts,
        epsilon: file.epsilon,
        n: file.n,
        clipped: file.clipped,
    })
}

pub fn read_sketch(path: &Path) -> Result<PrivateSketch> {
    sketch_from_json(&fs::read_to_string(path)?)
}

pub fn profile_csv(r: &Profile) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in r.values().iter().enumerate() {
        writeln!(out, "{t},{v}").unwrap();
    }
    out
}

/// Eval CSV. `seconds` is written as 0 unless `timing` is set, so reruns are byte-identical.
pub fn eval_csv(rows: &[ErrorReport], timing: bool) -> String {
    let mut out = String::from("d,n,epsilon,eta,trial,p,err,bound,seconds\n");
    for r in rows {
        let seconds = if timing { r.seconds } else { 0.0 };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.d, r.n, r.epsilon, r.eta, r.trial, r.p, r.err, r.bound, seconds
        )
        .unwrap();
    }
    out
}

pub fn protocol_csv(rows: &[ProtocolResult]) -> String {
    let mut out = String::from("d,trial,true_ip,m_b,abs_error,delta\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.d, r.trial, r.true_ip, r.m_b, r.abs_error, r.delta_used).unwrap();
    }
    out
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
