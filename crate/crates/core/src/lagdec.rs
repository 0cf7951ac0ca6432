//! Lag estimation between averaged responses.
//!
//! Relative mode compares a new letter against the first letter's average
//! and reports the position difference modulo the keyboard size. Absolute
//! mode compares against a template aligned to position 0 and reports the
//! position itself.
//!
//! Keyboard positions do not wrap with the code: with 32 keys two bits
//! apart on a 63-bit code, key 31 sits one bit before key 0, not two. A
//! relative lag `l` therefore stands for two physical position differences,
//! `l` and `l - L`, and the relative scan scores both and keeps the larger.
//! Absolute decoding only scores `l`, the delays the keyboard actually uses.

use crate::dsp::{circular_shift_samples, pearson_correlation, AveragedResponse};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LagEstimate {
    /// Index of the best score, smallest index on ties.
    pub lag: usize,
    pub best_score: f64,
    /// One Pearson coefficient per candidate lag.
    pub scores: Vec<f64>,
}

impl LagEstimate {
    fn from_scores(scores: Vec<f64>) -> Self {
        let mut lag = 0;
        for (l, &s) in scores.iter().enumerate() {
            if s > scores[lag] {
                lag = l;
            }
        }
        Self {
            lag,
            best_score: scores[lag],
            scores,
        }
    }
}

/// Response re-based to keyboard position 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsoluteTemplate {
    pub data: AveragedResponse,
    pub source_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scan {
    Relative,
    Absolute,
}

/// Position differences scored for candidate lag `l`.
fn differences(l: usize, num_chars: usize, scan: Scan) -> impl Iterator<Item = i64> {
    let direct = l as i64;
    let wrapped = (scan == Scan::Relative && l > 0).then_some(l as i64 - num_chars as i64);
    std::iter::once(direct).chain(wrapped)
}

fn check_geometry(period: usize, num_chars: usize, spacing: usize, scan: Scan) -> Result<()> {
    if num_chars == 0 || spacing == 0 {
        return Err(Error::InvalidParameter(format!(
            "lag search needs L >= 1 and spacing >= 1 (got L={num_chars}, s={spacing})"
        )));
    }
    let mut owner: Vec<Option<usize>> = vec![None; period];
    for l in 0..num_chars {
        for d in differences(l, num_chars, scan) {
            let shift = (d * spacing as i64).rem_euclid(period as i64) as usize;
            match owner[shift] {
                Some(other) if other != l => {
                    return Err(Error::InvalidParameter(format!(
                        "lags {other} and {l} alias to the same {shift}-sample shift (period {period}, s={spacing})"
                    )))
                }
                _ => owner[shift] = Some(l),
            }
        }
    }
    Ok(())
}

fn scan(
    reference: &AveragedResponse,
    candidate: &AveragedResponse,
    num_chars: usize,
    spacing: usize,
    mode: Scan,
) -> Result<LagEstimate> {
    if !reference.same_shape(candidate) {
        return Err(Error::ShapeMismatch(format!(
            "reference {}x{} vs response {}x{}",
            reference.channels(),
            reference.period_samples(),
            candidate.channels(),
            candidate.period_samples()
        )));
    }
    check_geometry(reference.period_samples(), num_chars, spacing, mode)?;
    let mut scores = Vec::with_capacity(num_chars);
    for l in 0..num_chars {
        let mut best = f64::NEG_INFINITY;
        for d in differences(l, num_chars, mode) {
            let advanced = circular_shift_samples(candidate, -d * spacing as i64);
            best = best.max(pearson_correlation(reference, &advanced)?);
        }
        scores.push(best);
    }
    Ok(LagEstimate::from_scores(scores))
}

/// Lag of `x_new` relative to `x_ref`, in keyboard positions modulo `num_chars`.
///
/// Noise-free responses for positions `p1` (reference) and `p2` give
/// `(p2 - p1) mod num_chars`.
pub fn estimate_relative_lag(
    x_ref: &AveragedResponse,
    x_new: &AveragedResponse,
    num_chars: usize,
    spacing: usize,
) -> Result<LagEstimate> {
    scan(x_ref, x_new, num_chars, spacing, Scan::Relative)
}

/// Keyboard position of `x` given a template aligned to position 0.
pub fn decode_absolute(
    template: &AbsoluteTemplate,
    x: &AveragedResponse,
    num_chars: usize,
    spacing: usize,
) -> Result<LagEstimate> {
    scan(&template.data, x, num_chars, spacing, Scan::Absolute)
}

/// Aligns responses of known positions to position 0 and averages them.
pub fn build_calibration_template(
    responses: &[(AveragedResponse, usize)],
    spacing: usize,
) -> Result<AbsoluteTemplate> {
    let (first, _) = responses.first().ok_or(Error::EmptyInput)?;
    if let Some((bad, _)) = responses.iter().find(|(r, _)| !r.same_shape(first)) {
        return Err(Error::ShapeMismatch(format!(
            "calibration responses differ in shape: {}x{} vs {}x{}",
            first.channels(),
            first.period_samples(),
            bad.channels(),
            bad.period_samples()
        )));
    }
    let mut mean = vec![vec![0.0; first.period_samples()]; first.channels()];
    for (k, (response, position)) in responses.iter().enumerate() {
        let aligned = circular_shift_samples(response, -((position * spacing) as i64));
        let weight = 1.0 / (k + 1) as f64;
        for (acc, ch) in mean.iter_mut().zip(aligned.data()) {
            for (m, v) in acc.iter_mut().zip(ch) {
                *m += (v - *m) * weight;
            }
        }
    }
    Ok(AbsoluteTemplate {
        data: AveragedResponse::new(mean)?,
        source_count: responses.len(),
    })
}

/// Re-bases the first letter's average once its position is known.
pub fn promote_to_absolute(
    x_ref: &AveragedResponse,
    resolved_first_position: usize,
    num_chars: usize,
    spacing: usize,
) -> Result<AbsoluteTemplate> {
    if resolved_first_position >= num_chars {
        return Err(Error::PositionOutOfRange {
            position: resolved_first_position,
            count: num_chars,
        });
    }
    Ok(AbsoluteTemplate {
        data: circular_shift_samples(x_ref, -((resolved_first_position * spacing) as i64)),
        source_count: 1,
    })
}
