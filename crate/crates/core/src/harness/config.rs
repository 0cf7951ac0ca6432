use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::FilterSpec;
use crate::error::{Error, Result};
use crate::lexicon::KeyboardLayout;
use crate::synth::SynthConfig;

pub const DEFAULT_CALIBRATION_CHARS: [usize; 3] = [0, 10, 20];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ZeroCalibration,
    Calibrated,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ZeroCalibration => "zero_calibration",
            Mode::Calibrated => "calibrated",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero_calibration" | "zero-calibration" => Ok(Mode::ZeroCalibration),
            "calibrated" => Ok(Mode::Calibrated),
            other => Err(Error::ConfigInvalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// Which dictionary words take part in candidate filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthPolicy {
    /// Only words of the experiment's word length.
    Exact,
    /// Any word sharing the observed prefix.
    AnyLength,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub layout: KeyboardLayout,
    pub synth: SynthConfig,
    /// Band-pass applied to every epoch before averaging; `None` skips it.
    pub filter: Option<FilterSpec>,
    /// Repetition counts to sweep.
    pub repetitions_list: Vec<usize>,
    pub trials: usize,
    pub word_length: usize,
    pub length_policy: LengthPolicy,
    /// Word list; the bundled list when `None`.
    pub dictionary_path: Option<PathBuf>,
    pub mode: Mode,
    pub calibration_chars: Vec<usize>,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Default keyboard, codebook, kernel and 1-15 Hz band-pass; 100
    /// three-letter trials per repetition count in {2, 4, 8, 12}.
    pub fn with_defaults(noise_sigma: f64, master_seed: u64) -> Result<Self> {
        let synth = SynthConfig::with_defaults(noise_sigma, master_seed)?;
        let filter = FilterSpec::default_band(synth.sampling_rate())?;
        Ok(Self {
            layout: KeyboardLayout::with_default_keys(synth.lag_spacing()),
            synth,
            filter: Some(filter),
            repetitions_list: vec![2, 4, 8, 12],
            trials: 100,
            word_length: 3,
            length_policy: LengthPolicy::Exact,
            dictionary_path: None,
            mode: Mode::ZeroCalibration,
            calibration_chars: DEFAULT_CALIBRATION_CHARS.to_vec(),
            master_seed,
        })
    }

    pub fn num_chars(&self) -> usize {
        self.layout.len()
    }

    pub fn lag_spacing(&self) -> usize {
        self.layout.lag_spacing()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::ConfigInvalid(msg));
        self.synth.validate()?;
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if self.repetitions_list.is_empty() || self.repetitions_list.contains(&0) {
            return invalid(format!(
                "repetitions must be a non-empty list of positive counts, got {:?}",
                self.repetitions_list
            ));
        }
        if self.word_length < 2 {
            return invalid(format!("word length must be at least 2, got {}", self.word_length));
        }
        if self.layout.len() != self.synth.num_chars() {
            return invalid(format!(
                "keyboard has {} keys but the codebook has {} codes",
                self.layout.len(),
                self.synth.num_chars()
            ));
        }
        if self.layout.lag_spacing() != self.synth.lag_spacing() {
            return invalid(format!(
                "keyboard lag spacing {} differs from the codebook's {} samples",
                self.layout.lag_spacing(),
                self.synth.lag_spacing()
            ));
        }
        if let Some(spec) = &self.filter {
            spec.validate()?;
            if (spec.sampling_rate - self.synth.sampling_rate()).abs() > 1e-9 {
                return invalid(format!(
                    "filter designed for {} Hz but epochs are sampled at {} Hz",
                    spec.sampling_rate,
                    self.synth.sampling_rate()
                ));
            }
        }
        if self.mode == Mode::Calibrated {
            if self.calibration_chars.is_empty() {
                return invalid("calibrated mode needs calibration characters".into());
            }
            if let Some(&p) = self.calibration_chars.iter().find(|&&p| p >= self.layout.len()) {
                return invalid(format!("calibration character {p} is not on the keyboard"));
            }
        }
        Ok(())
    }
}
