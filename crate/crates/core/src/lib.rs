//! Zero-calibration c-VEP speller.
//!
//! Every key of the keyboard flashes the same m-sequence at a different
//! circular delay. Instead of matching responses against a calibrated
//! template, the decoder measures the lag of each new letter relative to
//! the first one and lets a dictionary pick the word. Once the word is
//! known, the first letter's response becomes an absolute template.
//!
//! Modules, bottom-up: [`code`] builds the codebook, [`dsp`] filters,
//! averages and correlates, [`synth`] renders synthetic epochs, [`lagdec`]
//! estimates lags, [`lexicon`] filters candidate words and [`harness`]
//! runs trials and experiments.

pub mod code;
pub mod dsp;
pub mod error;
pub mod harness;
pub mod lagdec;
pub mod lexicon;
pub mod synth;

pub use error::{Error, Result};
