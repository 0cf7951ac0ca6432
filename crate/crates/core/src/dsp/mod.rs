//! Signal primitives: band-pass preprocessing, repetition averaging,
//! circular sample shifts and Pearson correlation.

mod epoch;
mod filter;

pub use epoch::{
    average_repetitions, circular_shift_samples, pearson_correlation, AveragedResponse, Epoch,
};
pub use filter::{
    bandpass_filter, Biquad, Butterworth, FilterSpec, DEFAULT_FILTER_ORDER, DEFAULT_HIGH_CUT,
    DEFAULT_LOW_CUT,
};
