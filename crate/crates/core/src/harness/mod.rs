//! Spelling trials, the experiment sweep, file formats and reports.

mod config;
mod experiment;
mod io;
mod report;
mod trial;

pub use config::{ExperimentConfig, LengthPolicy, Mode, DEFAULT_CALIBRATION_CHARS};
pub use experiment::{run_experiment, Experiment};
pub use io::{
    format_epochs, load_dictionary, load_epochs, parse_epochs, write_epochs, LoadedDictionary,
    BUNDLED_WORDS,
};
pub use report::{write_report, ConfigEcho, Report, ReportCell, ReportFormat};
pub use trial::{Outcome, TrialResult};

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a stream index.
pub fn mix_seed(parent: u64, stream: u64) -> u64 {
    splitmix64(parent ^ splitmix64(stream))
}
