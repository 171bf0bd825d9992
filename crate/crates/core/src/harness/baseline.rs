//! Calibrated thresholds for regression checks whose constants are not known
//! in closed form. A check without a threshold here is reported as `recorded`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../../baseline.toml");

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
pub struct Baseline {
    #[serde(default)]
    thresholds: BTreeMap<String, f64>,
}

impl Baseline {
    /// The thresholds checked in next to the crate.
    pub fn shipped() -> Self {
        Self::from_toml_str(SHIPPED).expect("shipped baseline parses")
    }

    /// No thresholds: every regression check is `recorded`.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("baseline: {e}")))
    }

    pub fn threshold(&self, name: &str) -> Option<f64> {
        self.thresholds.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.thresholds.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_thresholds_parse() {
        let b = Baseline::shipped();
        assert_eq!(b.threshold("conjugate_sum_discrepancy"), Some(100.0));
        assert_eq!(b.threshold("theorem_envelope_ratio"), Some(10.0));
        assert!(Baseline::empty().threshold("theorem_envelope_ratio").is_none());
        assert!(Baseline::from_toml_str("[thresholds]\nx = \"a\"").is_err());
    }
}
