use serde::Serialize;

use super::config::Mode;
use super::experiment::Experiment;
use super::mix_seed;
use crate::dsp::{average_repetitions, bandpass_filter, AveragedResponse};
use crate::error::{Error, Result};
use crate::lagdec::{
    build_calibration_template, decode_absolute, estimate_relative_lag, promote_to_absolute,
    AbsoluteTemplate,
};
use crate::lexicon::{filter_candidates, signature_of_word, CandidateSet, LagSignature, Resolution};
use crate::synth::synth_epoch;

/// Seed streams `0..word_length` belong to the letters.
const CALIBRATION_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The decoder committed to a word (possibly the wrong one).
    Resolved(String),
    /// Several dictionary words share the observed signature.
    Unresolved,
    /// No dictionary word matches: a lag was misdetected.
    Empty,
    /// Synthesis or preprocessing failed.
    SignalError(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub mode: Mode,
    pub repetitions: usize,
    pub target_word: String,
    /// Relative lags of letters 2..k in zero-calibration mode, absolute
    /// positions of every letter in calibrated mode.
    pub true_lags: Vec<usize>,
    pub estimated_lags: Vec<usize>,
    pub lags_all_correct: bool,
    pub outcome: Outcome,
    pub word_correct: bool,
    /// Letters spent until the outcome was settled.
    pub letters_consumed: usize,
    /// Best correlation of every decoded letter.
    pub scores: Vec<f64>,
    /// Character committed while each letter was being spelled.
    pub emitted: Vec<Option<char>>,
    /// Word beginnings shown after each letter.
    pub feedback: Vec<Vec<String>>,
}

impl TrialResult {
    fn new(mode: Mode, repetitions: usize, target_word: &str, true_lags: Vec<usize>) -> Self {
        let k = target_word.chars().count();
        Self {
            mode,
            repetitions,
            target_word: target_word.to_owned(),
            true_lags,
            estimated_lags: Vec::new(),
            lags_all_correct: false,
            outcome: Outcome::Unresolved,
            word_correct: false,
            letters_consumed: k,
            scores: Vec::new(),
            emitted: vec![None; k],
            feedback: vec![Vec::new(); k],
        }
    }

    fn finish(mut self) -> Self {
        self.lags_all_correct = self.estimated_lags == self.true_lags;
        self.word_correct = matches!(&self.outcome, Outcome::Resolved(w) if *w == self.target_word);
        self
    }

    fn failed(mut self, err: Error) -> Self {
        self.outcome = Outcome::SignalError(err.to_string());
        self.lags_all_correct = false;
        self.word_correct = false;
        self
    }
}

impl Experiment {
    fn check_target(&self, word: &str) -> Result<Vec<usize>> {
        if !self.dictionary().contains(word) {
            return Err(Error::WordNotInDictionary(word.to_owned()));
        }
        self.config().layout.positions_of(word)
    }

    /// Synthesized, filtered and averaged response to one character.
    fn response(&self, position: usize, repetitions: usize, seed: u64) -> Result<AveragedResponse> {
        let config = self.config();
        let epoch = synth_epoch(&config.synth, position, repetitions, seed)?;
        let epoch = match &config.filter {
            Some(spec) => bandpass_filter(&epoch, spec)?,
            None => epoch,
        };
        Ok(average_repetitions(&epoch))
    }

    /// Spells `target_word` without calibration.
    ///
    /// The first letter's average becomes the reference; every later letter
    /// yields a lag relative to it and narrows the candidate words. Once a
    /// single word remains, the reference is re-based to absolute position 0
    /// and the remaining letters are decoded absolutely.
    pub fn run_trial_zero_calibration(
        &self,
        target_word: &str,
        repetitions: usize,
        trial_seed: u64,
    ) -> Result<TrialResult> {
        let positions = self.check_target(target_word)?;
        let signature = signature_of_word(target_word, &self.config().layout)?;
        let mut result = TrialResult::new(Mode::ZeroCalibration, repetitions, target_word, signature.0);
        match self.spell_zero_calibration(&positions, repetitions, trial_seed, &mut result) {
            Ok(()) => Ok(result.finish()),
            Err(err) => Ok(result.failed(err)),
        }
    }

    fn spell_zero_calibration(
        &self,
        positions: &[usize],
        repetitions: usize,
        trial_seed: u64,
        result: &mut TrialResult,
    ) -> Result<()> {
        let config = self.config();
        let layout = &config.layout;
        let (num_chars, spacing) = (config.num_chars(), config.lag_spacing());
        let letter = |i: usize| self.response(positions[i], repetitions, mix_seed(trial_seed, i as u64));

        let x_ref = letter(0)?;
        let mut candidates: Option<CandidateSet> = None;
        // first position of the resolved word and its template
        let mut absolute: Option<(usize, AbsoluteTemplate)> = None;
        let mut settled = false;

        for i in 1..positions.len() {
            let x = letter(i)?;
            if let Some((first, template)) = &absolute {
                let est = decode_absolute(template, &x, num_chars, spacing)?;
                result.estimated_lags.push((est.lag + num_chars - first) % num_chars);
                result.scores.push(est.best_score);
                result.emitted[i] = Some(layout.character(est.lag)?);
                continue;
            }

            let est = estimate_relative_lag(&x_ref, &x, num_chars, spacing)?;
            result.estimated_lags.push(est.lag);
            result.scores.push(est.best_score);
            if settled {
                // candidates already ran out; keep measuring lags for scoring
                continue;
            }
            let next = match candidates.take() {
                None => filter_candidates(self.dictionary(), layout, &LagSignature(vec![est.lag])),
                Some(c) => c.refine(layout, est.lag),
            };
            result.feedback[i] = next.display_prefixes();
            log::debug!(
                "{}: letter {} lag {} -> {:?}",
                result.target_word,
                i + 1,
                est.lag,
                result.feedback[i]
            );
            match next.resolution() {
                Resolution::Unique(word) => {
                    let first = layout.position(word.chars().next().expect("non-empty word"))?;
                    absolute = Some((first, promote_to_absolute(&x_ref, first, num_chars, spacing)?));
                    result.emitted[i] = word.chars().nth(i);
                    result.letters_consumed = i + 1;
                    result.outcome = Outcome::Resolved(word);
                    settled = true;
                }
                Resolution::Empty => {
                    result.letters_consumed = i + 1;
                    result.outcome = Outcome::Empty;
                    settled = true;
                }
                Resolution::Unresolved => result.outcome = Outcome::Unresolved,
            }
            candidates = Some(next);
        }
        Ok(())
    }

    /// Spells `target_word` against a template built from known calibration
    /// characters. No dictionary constraint is applied.
    pub fn run_trial_calibrated(
        &self,
        target_word: &str,
        repetitions: usize,
        trial_seed: u64,
    ) -> Result<TrialResult> {
        let positions = self.check_target(target_word)?;
        let mut result = TrialResult::new(Mode::Calibrated, repetitions, target_word, positions.clone());
        match self.spell_calibrated(&positions, repetitions, trial_seed, &mut result) {
            Ok(()) => Ok(result.finish()),
            Err(err) => Ok(result.failed(err)),
        }
    }

    fn spell_calibrated(
        &self,
        positions: &[usize],
        repetitions: usize,
        trial_seed: u64,
        result: &mut TrialResult,
    ) -> Result<()> {
        let config = self.config();
        let (num_chars, spacing) = (config.num_chars(), config.lag_spacing());
        let calibration = config
            .calibration_chars
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let seed = mix_seed(trial_seed, CALIBRATION_STREAM + j as u64);
                Ok((self.response(p, repetitions, seed)?, p))
            })
            .collect::<Result<Vec<_>>>()?;
        let template = build_calibration_template(&calibration, spacing)?;
        let mut decoded = String::with_capacity(positions.len());
        for (i, &p) in positions.iter().enumerate() {
            let x = self.response(p, repetitions, mix_seed(trial_seed, i as u64))?;
            let est = decode_absolute(&template, &x, num_chars, spacing)?;
            let c = config.layout.character(est.lag)?;
            result.estimated_lags.push(est.lag);
            result.scores.push(est.best_score);
            result.emitted[i] = Some(c);
            decoded.push(c);
        }
        result.outcome = Outcome::Resolved(decoded);
        Ok(())
    }

    pub fn run_trial(&self, target_word: &str, repetitions: usize, trial_seed: u64) -> Result<TrialResult> {
        match self.config().mode {
            Mode::ZeroCalibration => self.run_trial_zero_calibration(target_word, repetitions, trial_seed),
            Mode::Calibrated => self.run_trial_calibrated(target_word, repetitions, trial_seed),
        }
    }
}
