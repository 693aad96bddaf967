use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};
use crate::mimo::SnrConvention;
use crate::qaoa::{FlatParams, Variant, VariantConfig};
use crate::sim::NoiseParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Ser,
    Landscape,
    Single,
}

/// A detector run on every trial of an SER experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Detector {
    Ml,
    Zf,
    Mmse,
    /// Quantised Burer–Monteiro relaxation.
    Bcd,
    Qaoa(Variant),
}

impl Detector {
    pub fn name(self) -> &'static str {
        match self {
            Detector::Ml => "ML",
            Detector::Zf => "ZF",
            Detector::Mmse => "MMSE",
            Detector::Bcd => "BCD",
            Detector::Qaoa(v) => v.name(),
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Detector::Ml => "ml",
            Detector::Zf => "zf",
            Detector::Mmse => "mmse",
            Detector::Bcd => "bcd",
            Detector::Qaoa(v) => v.key(),
        }
    }

    /// Stable identifier used to derive the detector's random stream, so a
    /// detector's draws do not depend on which other detectors are enabled.
    pub fn stream_id(self) -> u64 {
        match self {
            Detector::Ml => 0,
            Detector::Zf => 1,
            Detector::Mmse => 2,
            Detector::Bcd => 3,
            Detector::Qaoa(v) => 16 + Variant::ALL.iter().position(|&x| x == v).unwrap_or(0) as u64,
        }
    }

    pub fn all() -> Vec<Detector> {
        let mut v = vec![Detector::Ml, Detector::Zf, Detector::Mmse, Detector::Bcd];
        v.extend(Variant::ALL.into_iter().map(Detector::Qaoa));
        v
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = s.trim().to_ascii_lowercase();
        Detector::all()
            .into_iter()
            .find(|d| d.key() == k || d.name().to_ascii_lowercase() == k)
            .ok_or_else(|| Error::Config(format!("unknown detector {s:?}")))
    }
}

impl From<Detector> for String {
    fn from(d: Detector) -> Self {
        d.key().to_string()
    }
}

impl TryFrom<String> for Detector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QaoaSettings {
    pub p: usize,
    pub shots: usize,
    pub deltas: Vec<f64>,
    pub temperature: f64,
    /// Flat variants search a `flat_grid × flat_grid` grid over
    /// `[0, flat_max]²` unless `flat_fixed` is set.
    pub flat_grid: usize,
    pub flat_max: f64,
    pub flat_fixed: Option<[f64; 2]>,
}

impl Default for QaoaSettings {
    fn default() -> Self {
        Self {
            p: 5,
            shots: 1024,
            deltas: vec![0.25, 0.75],
            temperature: 0.2,
            flat_grid: 9,
            flat_max: 3.0,
            flat_fixed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct NoiseSettings {
    pub enabled: bool,
    pub params: NoiseParams,
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LandscapeSettings {
    pub grid: usize,
    pub max: f64,
    /// Stream id of the landscape instance under `seed`.
    pub instance_stream: u64,
}

impl Default for LandscapeSettings {
    fn default() -> Self {
        Self { grid: 25, max: 3.0, instance_stream: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub nt: usize,
    pub nr: usize,
    pub modulation: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub detectors: Vec<Detector>,
    pub seed: u64,
    pub snr_convention: SnrConvention,
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
    /// Trials per scheduling chunk; interrupts are honoured between chunks.
    pub chunk_size: usize,
    pub qaoa: QaoaSettings,
    pub noise: NoiseSettings,
    pub landscape: LandscapeSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::Ser,
            nt: 2,
            nr: 2,
            modulation: 16,
            snr_db: vec![-8.0, -3.0, 2.0, 7.0, 12.0, 17.0],
            trials: 10_000,
            detectors: vec![Detector::Ml, Detector::Zf, Detector::Mmse, Detector::Qaoa(Variant::WslrW)],
            seed: 42,
            snr_convention: SnrConvention::default(),
            threads: None,
            chunk_size: 256,
            qaoa: QaoaSettings::default(),
            noise: NoiseSettings::default(),
            landscape: LandscapeSettings::default(),
        }
    }
}

impl ExperimentConfig {
    /// Desk-scale trial count: 10 000 for 2×2, 2 000 for larger systems.
    pub fn desk_trials(nt: usize) -> usize {
        if nt <= 2 {
            10_000
        } else {
            2_000
        }
    }

    pub fn spec(&self) -> Result<ConstellationSpec> {
        ConstellationSpec::new(self.modulation)
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.spec()?;
        if self.nt == 0 || self.nr < self.nt {
            return Err(Error::Config(format!("need Nt >= 1 and Nr >= Nt, got {}x{}", self.nt, self.nr)));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR list is empty".into()));
        }
        if let Some(v) = self.snr_db.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("SNR {v} dB is not finite")));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::Config("chunk_size must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.kind == ExperimentKind::Ser && self.detectors.is_empty() {
            return Err(Error::Config("detector list is empty".into()));
        }
        if self.kind == ExperimentKind::Landscape && self.landscape.grid < 2 {
            return Err(Error::Config(format!("landscape grid {} must be at least 2", self.landscape.grid)));
        }
        let n_qubits = 2 * self.nt * spec.bits_per_dim();
        let uses_qaoa = self.kind != ExperimentKind::Ser
            || self.detectors.iter().any(|d| matches!(d, Detector::Qaoa(_)));
        if uses_qaoa && n_qubits > crate::sim::MAX_STATE_QUBITS {
            return Err(Error::QubitRange { n: n_qubits, max: crate::sim::MAX_STATE_QUBITS });
        }
        if self.noise.enabled && uses_qaoa && n_qubits > crate::sim::MAX_DENSITY_QUBITS {
            return Err(Error::QubitRange { n: n_qubits, max: crate::sim::MAX_DENSITY_QUBITS });
        }
        for v in Variant::ALL {
            self.variant_config(v).validate()?;
        }
        Ok(())
    }

    pub fn variant_config(&self, variant: Variant) -> VariantConfig {
        let q = &self.qaoa;
        VariantConfig {
            variant,
            p: q.p,
            shots: q.shots,
            deltas: q.deltas.clone(),
            temperature: q.temperature,
            flat: match q.flat_fixed {
                Some([gamma, beta]) => FlatParams::Fixed { gamma, beta },
                None => FlatParams::Grid { resolution: q.flat_grid, max: q.flat_max },
            },
            noise: self.noise.enabled.then_some(self.noise.params),
            record_histograms: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_snr_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let bad = || Error::Config(format!("cannot parse SNR list {text:?}"));
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    } else {
        text.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()
            .and_then(|v| if v.is_empty() { Err(bad()) } else { Ok(v) })
    }
}

pub fn parse_detector_list(text: &str) -> Result<Vec<Detector>> {
    let list = text
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Detector>>>()?;
    if list.is_empty() {
        return Err(Error::Config("detector list is empty".into()));
    }
    Ok(list)
}

/// Output directory: the explicit value, then `QMIMO_OUT_DIR`, then `results`.
pub fn resolve_out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("QMIMO_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}
