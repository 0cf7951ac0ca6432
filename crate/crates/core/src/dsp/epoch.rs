use serde::{Deserialize, Serialize};

use crate::code::rotate;
use crate::error::{Error, Result};

/// Raw multi-repetition recording window: `channels x (repetitions * period_samples)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    data: Vec<Vec<f64>>,
    sampling_rate: f64,
    period_samples: usize,
    repetitions: usize,
}

impl Epoch {
    pub fn new(
        data: Vec<Vec<f64>>,
        sampling_rate: f64,
        period_samples: usize,
        repetitions: usize,
    ) -> Result<Self> {
        if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling rate must be positive, got {sampling_rate}"
            )));
        }
        if period_samples == 0 || repetitions == 0 {
            return Err(Error::ShapeMismatch(format!(
                "period ({period_samples}) and repetitions ({repetitions}) must be nonzero"
            )));
        }
        if data.is_empty() {
            return Err(Error::ShapeMismatch("epoch has no channels".into()));
        }
        let expected = period_samples * repetitions;
        if let Some((c, ch)) = data.iter().enumerate().find(|(_, ch)| ch.len() != expected) {
            return Err(Error::ShapeMismatch(format!(
                "channel {c} has {} samples, expected {repetitions} x {period_samples} = {expected}",
                ch.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self {
            data,
            sampling_rate,
            period_samples,
            repetitions,
        })
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Vec<f64>> {
        self.data
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn period_samples(&self) -> usize {
        self.period_samples
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions
    }

    pub fn channels(&self) -> usize {
        self.data.len()
    }

    pub fn samples(&self) -> usize {
        self.period_samples * self.repetitions
    }
}

/// One code period of (averaged) response, `channels x period_samples`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedResponse {
    data: Vec<Vec<f64>>,
}

impl AveragedResponse {
    pub fn new(data: Vec<Vec<f64>>) -> Result<Self> {
        let period = data
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::ShapeMismatch("response has no channels".into()))?;
        if period == 0 {
            return Err(Error::ShapeMismatch("response has no samples".into()));
        }
        if data.iter().any(|ch| ch.len() != period) {
            return Err(Error::ShapeMismatch("channels differ in length".into()));
        }
        check_finite(&data)?;
        Ok(Self { data })
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn channels(&self) -> usize {
        self.data.len()
    }

    pub fn period_samples(&self) -> usize {
        self.data[0].len()
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.channels() == other.channels() && self.period_samples() == other.period_samples()
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.data
                .iter()
                .map(|ch| ch.iter().map(|&v| f(v)).collect())
                .collect(),
        )
    }
}

fn check_finite(data: &[Vec<f64>]) -> Result<()> {
    if data.iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Per-channel mean over the repetitions of an epoch.
pub fn average_repetitions(epoch: &Epoch) -> AveragedResponse {
    let period = epoch.period_samples;
    let data = epoch
        .data
        .iter()
        .map(|ch| {
            // running mean: identical repetitions reproduce the period bit-for-bit
            let mut mean = vec![0.0; period];
            for (r, rep) in ch.chunks_exact(period).enumerate() {
                let weight = 1.0 / (r + 1) as f64;
                for (m, v) in mean.iter_mut().zip(rep) {
                    *m += (v - *m) * weight;
                }
            }
            mean
        })
        .collect();
    AveragedResponse { data }
}

/// Rotates every channel by `k` samples; positive `k` delays.
pub fn circular_shift_samples(resp: &AveragedResponse, k: i64) -> AveragedResponse {
    AveragedResponse {
        data: resp.data.iter().map(|ch| rotate(ch, k)).collect(),
    }
}

/// Pearson coefficient of the two responses, channels concatenated.
pub fn pearson_correlation(x: &AveragedResponse, y: &AveragedResponse) -> Result<f64> {
    if !x.same_shape(y) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            x.channels(),
            x.period_samples(),
            y.channels(),
            y.period_samples()
        )));
    }
    let n = x.channels() * x.period_samples();
    if n < 2 {
        return Err(Error::ShapeMismatch("correlation needs at least 2 samples".into()));
    }
    let xs = || x.data.iter().flatten().copied();
    let ys = || y.data.iter().flatten().copied();
    let mx = xs().sum::<f64>() / n as f64;
    let my = ys().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in xs().zip(ys()) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(ch: &[f64]) -> AveragedResponse {
        AveragedResponse::new(vec![ch.to_vec()]).unwrap()
    }

    #[test]
    fn epoch_shape_is_enforced() {
        assert!(Epoch::new(vec![vec![0.0; 5]], 240.0, 3, 2).is_err());
        assert!(Epoch::new(vec![vec![0.0; 6], vec![0.0; 5]], 240.0, 3, 2).is_err());
        assert!(Epoch::new(vec![], 240.0, 3, 2).is_err());
        assert!(Epoch::new(vec![vec![0.0; 6]], 240.0, 3, 2).is_ok());
    }

    #[test]
    fn epoch_rejects_non_finite() {
        let err = Epoch::new(vec![vec![0.0, f64::NAN, 1.0]], 240.0, 3, 1).unwrap_err();
        assert!(matches!(err, Error::NonFinite));
        assert!(matches!(
            AveragedResponse::new(vec![vec![f64::INFINITY]]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn average_of_two_repetitions() {
        let e = Epoch::new(vec![vec![0.0, 2.0, 4.0, 2.0, 4.0, 6.0]], 240.0, 3, 2).unwrap();
        assert_eq!(average_repetitions(&e).data(), &[vec![1.0, 3.0, 5.0]]);
    }

    #[test]
    fn single_repetition_is_verbatim() {
        let period = vec![0.3, -1.7, 2.25, 9.0];
        let e = Epoch::new(vec![period.clone()], 100.0, 4, 1).unwrap();
        assert_eq!(average_repetitions(&e).data()[0], period);
    }

    #[test]
    fn identical_repetitions_average_exactly() {
        let period = vec![0.1, 0.7, -0.3];
        let tiled: Vec<f64> = period.iter().cycle().take(15).copied().collect();
        let e = Epoch::new(vec![tiled], 100.0, 3, 5).unwrap();
        let avg = average_repetitions(&e);
        assert_eq!(avg.data()[0], period);
    }

    #[test]
    fn shift_is_delay() {
        let x = resp(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(circular_shift_samples(&x, 1).data()[0], vec![4.0, 1.0, 2.0, 3.0]);
        assert_eq!(circular_shift_samples(&x, 4), x);
        assert_eq!(circular_shift_samples(&x, 0), x);
    }

    #[test]
    fn correlation_basics() {
        let x = resp(&[1.0, 3.0, -2.0, 0.5, 4.0]);
        assert!((pearson_correlation(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let neg = x.map(|v| -2.0 * v + 7.0).unwrap();
        assert!((pearson_correlation(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        let pos = x.map(|v| 0.1 * v - 3.0).unwrap();
        assert!((pearson_correlation(&x, &pos).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn correlation_errors() {
        let x = resp(&[1.0, 2.0, 3.0]);
        let flat = resp(&[2.0, 2.0, 2.0]);
        assert!(matches!(pearson_correlation(&x, &flat), Err(Error::ZeroVariance)));
        let y = resp(&[1.0, 2.0]);
        assert!(matches!(pearson_correlation(&x, &y), Err(Error::ShapeMismatch(_))));
        let one = resp(&[1.0]);
        assert!(matches!(pearson_correlation(&one, &one), Err(Error::ShapeMismatch(_))));
    }
}
