use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The k values of the meta-learning settings.
pub const STANDARD_KS: [usize; 5] = [1, 4, 8, 10, 19];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Full space, no validity check.
    Baseline,
    /// Full space with the validity check.
    Avatar,
    /// Structure fixed to the bootstrap run's best pipeline, hyperparameters
    /// restarted from their defaults.
    R30,
    /// Top k of the global leaderboard.
    Global(usize),
    /// Top k of the prior dataset matched by relative landmarking.
    Landmarked(usize),
    /// Top k of the dataset's own prior ranking.
    Oracle(usize),
}

impl Mode {
    pub fn k(self) -> Option<usize> {
        match self {
            Mode::Global(k) | Mode::Landmarked(k) | Mode::Oracle(k) => Some(k),
            _ => None,
        }
    }

    pub fn validity_check(self) -> bool {
        self != Mode::Baseline
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Baseline => f.write_str("baseline"),
            Mode::Avatar => f.write_str("avatar"),
            Mode::R30 => f.write_str("r30"),
            Mode::Global(k) => write!(f, "M-k{k}"),
            Mode::Landmarked(k) => write!(f, "L-k{k}"),
            Mode::Oracle(k) => write!(f, "O-k{k}"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = |rest: &str| -> Result<usize> {
            match rest.parse() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(Error::Config(format!("bad k in scenario `{s}`"))),
            }
        };
        match s {
            "baseline" => Ok(Mode::Baseline),
            "avatar" => Ok(Mode::Avatar),
            "r30" => Ok(Mode::R30),
            _ => {
                if let Some(r) = s.strip_prefix("M-k") {
                    Ok(Mode::Global(k(r)?))
                } else if let Some(r) = s.strip_prefix("L-k") {
                    Ok(Mode::Landmarked(k(r)?))
                } else if let Some(r) = s.strip_prefix("O-k") {
                    Ok(Mode::Oracle(k(r)?))
                } else {
                    Err(Error::Config(format!("unknown scenario `{s}`")))
                }
            }
        }
    }
}

/// A named experimental setting. Configuration files write it as its name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScenarioSpec {
    pub name: String,
    pub mode: Mode,
}

impl ScenarioSpec {
    pub fn new(mode: Mode) -> Self {
        Self {
            name: mode.to_string(),
            mode,
        }
    }

    pub fn k(&self) -> Option<usize> {
        self.mode.k()
    }

    pub fn validity_check(&self) -> bool {
        self.mode.validity_check()
    }

    /// Baseline, r30, avatar and the M/L/O settings for every k.
    pub fn standard_set(ks: &[usize]) -> Vec<ScenarioSpec> {
        let mut out = vec![Mode::Baseline, Mode::R30, Mode::Avatar];
        for make in [Mode::Global as fn(usize) -> Mode, Mode::Landmarked, Mode::Oracle] {
            out.extend(ks.iter().map(|&k| make(k)));
        }
        out.into_iter().map(ScenarioSpec::new).collect()
    }
}

impl FromStr for ScenarioSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(ScenarioSpec::new)
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for ScenarioSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

impl<'de> Deserialize<'de> for ScenarioSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
