//! Serializable run configuration shared with the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{GfError, Result};
use crate::markov::{MapKind, MarkovSystem};
use crate::thermo::GibbsSpec;

/// JSON shape: `{map, alphabet: [lo, hi], s, n, epsilon, budget}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub map: MapKind,
    /// Inclusive digit range `[lo, hi]`.
    pub alphabet: [u32; 2],
    pub s: f64,
    pub n: usize,
    pub epsilon: f64,
    pub budget: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.alphabet;
        if lo == 0 || hi < lo {
            return Err(GfError::Domain(format!(
                "alphabet [{lo}, {hi}] must satisfy 1 <= lo <= hi"
            )));
        }
        if !(self.s > 0.0 && self.s <= 1.0) && self.s != 0.0 {
            return Err(GfError::Domain(format!(
                "exponent s = {} outside [0, 1]",
                self.s
            )));
        }
        if self.n == 0 {
            return Err(GfError::Domain("depth n must be >= 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(GfError::Domain("epsilon must be > 0".into()));
        }
        if self.budget == 0 {
            return Err(GfError::Domain("budget must be > 0".into()));
        }
        Ok(())
    }

    pub fn system(&self) -> Result<MarkovSystem> {
        MarkovSystem::new(self.map, self.alphabet[1])
    }

    pub fn to_spec(&self) -> Result<GibbsSpec> {
        self.validate()?;
        GibbsSpec::new(
            self.system()?,
            (self.alphabet[0], self.alphabet[1]),
            self.s,
            self.n,
            self.epsilon,
            self.budget,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig {
            map: MapKind::Gauss,
            alphabet: [1, 2],
            s: 0.5344,
            n: 8,
            epsilon: 0.15,
            budget: 1 << 24,
        };
        let js = serde_json::to_string(&cfg).unwrap();
        assert!(js.contains("\"map\":\"gauss\""));
        let back: RunConfig = serde_json::from_str(&js).unwrap();
        assert_eq!(back.alphabet, [1, 2]);
        back.validate().unwrap();
    }

    #[test]
    fn rejects_empty_alphabet() {
        let cfg = RunConfig {
            map: MapKind::Gauss,
            alphabet: [0, 0],
            s: 0.5,
            n: 4,
            epsilon: 0.1,
            budget: 1000,
        };
        assert!(cfg.validate().is_err());
    }
}
