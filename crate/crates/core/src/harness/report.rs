use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::config::{ExperimentConfig, LengthPolicy, Mode};
use super::trial::{Outcome, TrialResult};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "mode,N,trials,lag_accuracy,word_accuracy,mean_letters,seed";

/// Aggregate of one (mode, repetitions) sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportCell {
    pub mode: Mode,
    pub repetitions: usize,
    pub trials: usize,
    pub lag_accuracy: f64,
    pub word_accuracy: f64,
    pub mean_letters: f64,
    pub correct_words: usize,
    /// Several words left: a property of the dictionary.
    pub unresolved: usize,
    /// No word left: a lag was misdetected.
    pub empty: usize,
    /// Committed to a word other than the target.
    pub wrong_word: usize,
    pub signal_errors: usize,
    #[serde(skip)]
    pub results: Vec<TrialResult>,
}

impl ReportCell {
    pub fn from_trials(mode: Mode, repetitions: usize, results: Vec<TrialResult>) -> Self {
        let trials = results.len();
        let count = |f: &dyn Fn(&TrialResult) -> bool| results.iter().filter(|r| f(r)).count();
        let fraction = |k: usize| if trials == 0 { 0.0 } else { k as f64 / trials as f64 };
        let correct_words = count(&|r| r.word_correct);
        let letters: usize = results.iter().map(|r| r.letters_consumed).sum();
        Self {
            mode,
            repetitions,
            trials,
            lag_accuracy: fraction(count(&|r| r.lags_all_correct)),
            word_accuracy: fraction(correct_words),
            mean_letters: fraction(letters),
            correct_words,
            unresolved: count(&|r| r.outcome == Outcome::Unresolved),
            empty: count(&|r| r.outcome == Outcome::Empty),
            wrong_word: count(&|r| matches!(r.outcome, Outcome::Resolved(_)) && !r.word_correct),
            signal_errors: count(&|r| matches!(r.outcome, Outcome::SignalError(_))),
            results,
        }
    }
}

/// Configuration summary carried in the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub code_order: usize,
    pub taps: Vec<usize>,
    pub code_length: usize,
    pub num_chars: usize,
    pub bits_per_shift: usize,
    pub samples_per_bit: usize,
    pub sampling_rate: f64,
    pub lag_spacing: usize,
    pub channels: usize,
    pub noise_sigma: f64,
    pub filter: Option<(f64, f64, usize)>,
    pub repetitions: Vec<usize>,
    pub trials: usize,
    pub word_length: usize,
    pub length_policy: LengthPolicy,
    pub calibration_chars: Vec<usize>,
    pub dictionary: Option<PathBuf>,
    /// Words are re-drawn independently for every repetition count.
    pub word_sampling: &'static str,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(c: &ExperimentConfig) -> Self {
        let code = &c.synth.codebook;
        Self {
            mode: c.mode,
            code_order: code.base().order(),
            taps: code.base().taps().to_vec(),
            code_length: code.code_len(),
            num_chars: code.num_chars(),
            bits_per_shift: code.bits_per_shift(),
            samples_per_bit: c.synth.samples_per_bit,
            sampling_rate: c.synth.sampling_rate(),
            lag_spacing: c.lag_spacing(),
            channels: c.synth.channels,
            noise_sigma: c.synth.noise_sigma,
            filter: c.filter.map(|f| (f.low_cut, f.high_cut, f.order)),
            repetitions: c.repetitions_list.clone(),
            trials: c.trials,
            word_length: c.word_length,
            length_policy: c.length_policy,
            calibration_chars: match c.mode {
                Mode::Calibrated => c.calibration_chars.clone(),
                Mode::ZeroCalibration => Vec::new(),
            },
            dictionary: c.dictionary_path.clone(),
            word_sampling: "uniform with replacement, independent per repetition count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub cells: Vec<ReportCell>,
    pub config: ConfigEcho,
    pub dictionary_words: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParameter(format!("unknown report format {other:?}"))),
        }
    }
}

/// Shortest round-trip decimal, padded to at least four decimals.
fn decimal(v: f64) -> String {
    let mut s = format!("{v}");
    let decimals = match s.find('.') {
        Some(dot) => s.len() - dot - 1,
        None => {
            s.push('.');
            0
        }
    };
    for _ in decimals..4 {
        s.push('0');
    }
    s
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.mode,
                c.repetitions,
                c.trials,
                decimal(c.lag_accuracy),
                decimal(c.word_accuracy),
                decimal(c.mean_letters),
                self.seed
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => Ok(self.to_csv()),
            ReportFormat::Json => self.to_json(),
        }
    }
}

pub fn write_report(report: &Report, path: &Path, format: ReportFormat) -> Result<()> {
    fs::write(path, report.render(format)?)?;
    Ok(())
}
