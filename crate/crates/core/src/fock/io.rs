//! JSON state files: `{"l", "n", "amplitudes": [{"modes", "re", "im"}]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ModeSet, StateVector};
use crate::error::{invalid, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub l: usize,
    pub n: usize,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub modes: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

impl StateFile {
    /// Nonzero amplitudes of `v`, in basis order.
    pub fn from_state(v: &StateVector) -> Self {
        let amplitudes = v
            .iter()
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
            .map(|(s, a)| AmplitudeEntry { modes: s.to_vec(), re: a.re, im: a.im })
            .collect();
        StateFile { l: v.l(), n: v.n(), amplitudes }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let mut v = StateVector::zeros(self.l, self.n)?;
        let mut seen = std::collections::HashSet::new();
        for e in &self.amplitudes {
            if e.modes.windows(2).any(|w| w[0] >= w[1]) {
                return invalid(format!("modes {:?} are not strictly ascending", e.modes));
            }
            if e.modes.len() != self.n {
                return invalid(format!("modes {:?} do not have n = {} entries", e.modes, self.n));
            }
            let s = ModeSet::from_modes(&e.modes)?;
            if !s.fits(self.l) {
                return invalid(format!("modes {:?} exceed l = {}", e.modes, self.l));
            }
            if !seen.insert(s) {
                return invalid(format!("duplicate entry for modes {:?}", e.modes));
            }
            if !e.re.is_finite() || !e.im.is_finite() {
                return invalid(format!("non-finite amplitude for modes {:?}", e.modes));
            }
            v.set(s, Complex64::new(e.re, e.im))?;
        }
        Ok(v)
    }
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    let file: StateFile = serde_json::from_str(text)?;
    file.to_state()
}

pub fn state_to_json(v: &StateVector) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(v)).expect("state serializes")
}

pub fn load_state(path: impl AsRef<Path>) -> Result<StateVector> {
    state_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_state(v: &StateVector, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, state_to_json(v))?;
    Ok(())
}
