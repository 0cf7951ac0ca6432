use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, LengthPolicy};
use super::io::{load_dictionary, LoadedDictionary, BUNDLED_WORDS};
use super::mix_seed;
use super::report::{ConfigEcho, Report, ReportCell};
use super::trial::TrialResult;
use crate::error::{Error, Result};
use crate::lexicon::Dictionary;

/// A validated configuration bound to its dictionary.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    dictionary: Dictionary,
}

impl Experiment {
    /// Validates `config` and applies its length policy to `dictionary`.
    pub fn new(config: ExperimentConfig, dictionary: Dictionary) -> Result<Self> {
        config.validate()?;
        if dictionary.is_empty() {
            return Err(Error::DictionaryEmpty);
        }
        let dictionary = match config.length_policy {
            LengthPolicy::Exact => dictionary.restrict_to_length(config.word_length)?,
            LengthPolicy::AnyLength => dictionary,
        };
        Ok(Self { config, dictionary })
    }

    /// Loads the dictionary named by the config, or the bundled list.
    pub fn from_config(config: ExperimentConfig) -> Result<Self> {
        let LoadedDictionary { dictionary, .. } = match &config.dictionary_path {
            Some(path) => load_dictionary(path, &config.layout)?,
            None => LoadedDictionary::parse(BUNDLED_WORDS, &config.layout)?,
        };
        Self::new(config, dictionary)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Dictionary after the length policy.
    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    /// Words eligible as targets: those of the configured length.
    fn targets(&self) -> Vec<&str> {
        let k = self.config.word_length;
        self.dictionary
            .words()
            .filter(|w| w.chars().count() == k)
            .collect()
    }

    /// Seed of trial `index` in the sweep cell with `repetitions`.
    pub fn trial_seed(&self, repetitions: usize, index: usize) -> u64 {
        mix_seed(mix_seed(self.config.master_seed, repetitions as u64), index as u64)
    }

    /// Runs `trials` words for one repetition count. Words are drawn
    /// uniformly with replacement; each trial's seed depends only on the
    /// master seed, the repetition count and the trial index.
    pub fn run_cell(&self, repetitions: usize) -> Result<Vec<TrialResult>> {
        let targets = self.targets();
        if targets.is_empty() {
            return Err(Error::DictionaryEmpty);
        }
        (0..self.config.trials)
            .into_par_iter()
            .map(|index| {
                let seed = self.trial_seed(repetitions, index);
                let mut picker = ChaCha20Rng::seed_from_u64(seed);
                let word = targets[picker.random_range(0..targets.len())];
                self.run_trial(word, repetitions, seed)
            })
            .collect()
    }

    pub fn run(&self) -> Result<Report> {
        let cells = self
            .config
            .repetitions_list
            .iter()
            .map(|&n| {
                let results = self.run_cell(n)?;
                Ok(ReportCell::from_trials(self.config.mode, n, results))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Report {
            cells,
            config: ConfigEcho::from(&self.config),
            dictionary_words: self.dictionary.len(),
            seed: self.config.master_seed,
        })
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    Experiment::from_config(config.clone())?.run()
}
