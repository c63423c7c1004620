use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// The ℓp norm a reconstruction optimizes and an error is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::Linf];

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }

    /// Norm of `v`.
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
        }
    }

    /// Norm of `a - b`. Panics on length mismatch.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len(), "distance between vectors of different length");
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.of(&diff)
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" => Ok(Norm::Linf),
            other => Err(Error::invalid("norm", format!("expected l1, l2 or linf, got `{other}`"))),
        }
    }
}
