//! Initial-state files: a JSON list of `{site, spin, amp: [re, im]}`.

use std::collections::BTreeMap;
use std::path::Path;

use qrw_core::cmv::Lattice;
use qrw_core::coin::{amplitude_index, Spin};
use qrw_core::C64;
use serde::Deserialize;

use crate::error::CliError;

/// Renormalization larger than this is reported on stderr.
pub const RENORM_WARN: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SpinName {
    Up,
    Down,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    site: i64,
    spin: SpinName,
    amp: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedState {
    /// Normalized amplitudes keyed by CMV index.
    pub amplitudes: BTreeMap<u64, C64>,
    /// `‖ψ‖` before normalization.
    pub input_norm: f64,
}

impl LoadedState {
    pub fn renormalized(&self) -> bool {
        (self.input_norm - 1.0).abs() > RENORM_WARN
    }
}

pub fn parse_state(text: &str, lattice: Lattice) -> Result<LoadedState, CliError> {
    let entries: Vec<Entry> = serde_json::from_str(text).map_err(|e| {
        CliError::Parse(format!(
            "state file line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if entries.is_empty() {
        return Err(CliError::Parse("state file lists no amplitudes".into()));
    }
    let mut raw = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        let spin = match e.spin {
            SpinName::Up => Spin::Up,
            SpinName::Down => Spin::Down,
        };
        let idx = amplitude_index(lattice, e.site, spin)
            .map_err(|err| CliError::Parse(format!("state entry {i}: {err}")))?;
        if raw.insert(idx, C64::new(e.amp[0], e.amp[1])).is_some() {
            return Err(CliError::Parse(format!(
                "state entry {i}: site {} spin {:?} listed twice",
                e.site, e.spin
            )));
        }
    }
    let norm = raw.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::Parse(format!("state norm is {norm}")));
    }
    let amplitudes = raw.into_iter().map(|(k, a)| (k, a / norm)).collect();
    Ok(LoadedState {
        amplitudes,
        input_norm: norm,
    })
}

pub fn load_state(path: &Path, lattice: Lattice) -> Result<LoadedState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read state file {}: {e}", path.display())))?;
    let state = parse_state(&text, lattice)?;
    if state.renormalized() {
        eprintln!(
            "warning: state in {} had norm {}; renormalized",
            path.display(),
            state.input_norm
        );
    }
    Ok(state)
}
