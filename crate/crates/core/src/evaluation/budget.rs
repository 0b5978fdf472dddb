use std::fmt;

use serde::{Deserialize, Serialize};

/// Converts seconds to whole microseconds, rounding to nearest.
pub fn seconds_to_us(seconds: f64) -> u64 {
    if seconds.is_finite() && seconds > 0.0 {
        (seconds * 1e6).round() as u64
    } else {
        0
    }
}

pub fn us_to_seconds(us: u64) -> f64 {
    us as f64 / 1e6
}

/// A time budget kept in integer microseconds so that charges add up exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    total_us: u64,
    consumed_us: u64,
}

impl Budget {
    pub fn from_seconds(total: f64) -> Self {
        Self::from_us(seconds_to_us(total))
    }

    pub fn from_us(total_us: u64) -> Self {
        Self { total_us, consumed_us: 0 }
    }

    pub fn total(&self) -> f64 {
        us_to_seconds(self.total_us)
    }

    pub fn consumed(&self) -> f64 {
        us_to_seconds(self.consumed_us)
    }

    pub fn remaining(&self) -> f64 {
        us_to_seconds(self.remaining_us())
    }

    pub fn total_us(&self) -> u64 {
        self.total_us
    }

    pub fn consumed_us(&self) -> u64 {
        self.consumed_us
    }

    pub fn remaining_us(&self) -> u64 {
        self.total_us - self.consumed_us
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed_us >= self.total_us
    }

    /// Charges `us`. Returns `false` and clamps at the total if the charge
    /// does not fit.
    pub fn charge_us(&mut self, us: u64) -> bool {
        match self.consumed_us.checked_add(us) {
            Some(c) if c <= self.total_us => {
                self.consumed_us = c;
                true
            }
            _ => {
                self.consumed_us = self.total_us;
                false
            }
        }
    }

    /// A fresh budget holding what is left of this one.
    pub fn remainder(&self) -> Budget {
        Budget::from_us(self.remaining_us())
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}s of {:.6}s used", self.consumed(), self.total())
    }
}

/// How evaluation time is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clock {
    /// Deterministic cost model: training instances times per-component cost factors.
    #[default]
    Virtual,
    /// Measured elapsed time.
    Wall,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charges_clamp_at_total() {
        let mut b = Budget::from_seconds(1.0);
        assert!(b.charge_us(400_000));
        assert!(!b.charge_us(700_000));
        assert!(b.is_exhausted());
        assert_eq!(b.consumed_us(), b.total_us());
    }

    #[test]
    fn microsecond_round_trip() {
        for us in [0u64, 1, 7, 999_999, 123_456_789] {
            assert_eq!(seconds_to_us(us_to_seconds(us)), us);
        }
    }
}
