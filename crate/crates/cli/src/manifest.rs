//! Run manifest written next to every run's CSV outputs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use kickfid_core::classical::rotation_frequency;
use kickfid_core::spectral::WidthFrequency;
use kickfid_core::{BandOutcome, Error as CoreError, LeakWarning, PeakReport};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

pub const FORMAT_VERSION: u32 = 1;

/// File name used for manifests; CSV comment lines refer to it relative to the CSV.
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub omega1: f64,
    pub omega2: f64,
    pub delta_omega: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
}

impl Derived {
    pub fn from_config(cfg: &ExperimentConfig) -> Option<Self> {
        let omega1 = rotation_frequency(cfg.k1).ok()?;
        let omega2 = rotation_frequency(cfg.k2).ok()?;
        Some(Self {
            omega1,
            omega2,
            delta_omega: omega1 - omega2,
            sigma_x: (cfg.tau / (2.0 * cfg.omega0)).sqrt(),
            sigma_p: (cfg.omega0 * cfg.tau / 2.0).sqrt(),
        })
    }
}

/// Result of one band search as stored in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum BandEntry {
    Peak(PeakReport),
    NoPeak,
    Error { message: String },
}

impl BandEntry {
    pub fn from_result(result: Result<BandOutcome, CoreError>) -> Self {
        match result {
            Ok(BandOutcome::Peak(p)) => BandEntry::Peak(p),
            Ok(BandOutcome::NoPeak { .. }) => BandEntry::NoPeak,
            Err(e) => BandEntry::Error {
                message: e.to_string(),
            },
        }
    }

    pub fn peak(&self) -> Option<&PeakReport> {
        match self {
            BandEntry::Peak(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakRecord {
    pub state: String,
    pub kick: usize,
    pub amplitude: f64,
}

impl LeakRecord {
    pub fn from_warnings(state: &str, leaks: &[LeakWarning]) -> Vec<Self> {
        leaks
            .iter()
            .map(|l| Self {
                state: state.to_string(),
                kick: l.kick,
                amplitude: l.amplitude,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub derived: Option<Derived>,
    pub peaks: BTreeMap<String, BandEntry>,
    pub width: BTreeMap<String, WidthFrequency>,
    /// Named scalar results; only finite values are kept.
    pub values: BTreeMap<String, f64>,
    pub leaks: Vec<LeakRecord>,
    pub outputs: Vec<String>,
    pub errors: Vec<String>,
    pub elapsed_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            config: config.clone(),
            derived: Derived::from_config(config),
            peaks: BTreeMap::new(),
            width: BTreeMap::new(),
            values: BTreeMap::new(),
            leaks: Vec::new(),
            outputs: Vec::new(),
            errors: Vec::new(),
            elapsed_seconds: 0.0,
        }
    }

    pub fn set_value(&mut self, key: impl Into<String>, value: f64) {
        if value.is_finite() {
            self.values.insert(key.into(), value);
        }
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn add_output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    pub fn record_error(&mut self, context: &str, err: impl std::fmt::Display) {
        self.errors.push(format!("{context}: {err}"));
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let cfg = ExperimentConfig::resolve("fig2", &[]).unwrap();
        let mut m = RunManifest::new("fidelity", &cfg);
        m.peaks.insert(
            "T1".into(),
            BandEntry::Peak(PeakReport {
                band: "high".into(),
                nu: 0.327_123_456_789_012_3,
                period: 1.0 / 0.327_123_456_789_012_3,
                amplitude: 123.456,
                interpolated: true,
            }),
        );
        m.peaks.insert("T2".into(), BandEntry::NoPeak);
        m.peaks.insert(
            "T3".into(),
            BandEntry::Error {
                message: "resolution".into(),
            },
        );
        m.set_value("ratio", 0.1 + 0.2);
        m.set_value("skipped", f64::INFINITY);
        m.leaks.push(LeakRecord {
            state: "first".into(),
            kick: 7,
            amplitude: 3.3e-6,
        });
        m.add_output("fidelity.csv");
        m.elapsed_seconds = 1.234_567_890_123;
        let dir = tempfile::tempdir().unwrap();
        m.write(dir.path()).unwrap();
        let back = RunManifest::read(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(back, m);
        assert!(back.value("skipped").is_none());
    }
}
