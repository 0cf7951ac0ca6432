//! Butterworth band-pass as cascaded biquads, applied forward and backward.
//!
//! Design goes through the analog low-pass prototype, the low-pass to
//! band-pass transform and the bilinear transform with pre-warped band
//! edges. `order` counts band-pass poles, so order 4 is two sections.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::epoch::Epoch;
use crate::error::{Error, Result};

pub const DEFAULT_LOW_CUT: f64 = 1.0;
pub const DEFAULT_HIGH_CUT: f64 = 15.0;
pub const DEFAULT_FILTER_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub low_cut: f64,
    pub high_cut: f64,
    pub order: usize,
    pub sampling_rate: f64,
}

impl FilterSpec {
    pub fn new(low_cut: f64, high_cut: f64, order: usize, sampling_rate: f64) -> Result<Self> {
        let spec = Self {
            low_cut,
            high_cut,
            order,
            sampling_rate,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// 1-15 Hz, order 4.
    pub fn default_band(sampling_rate: f64) -> Result<Self> {
        Self::new(DEFAULT_LOW_CUT, DEFAULT_HIGH_CUT, DEFAULT_FILTER_ORDER, sampling_rate)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.sampling_rate.is_finite()
            && self.low_cut > 0.0
            && self.low_cut < self.high_cut
            && self.high_cut < self.sampling_rate / 2.0
            && self.order >= 2
            && self.order.is_multiple_of(2);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBand {
                low_cut: self.low_cut,
                high_cut: self.high_cut,
                order: self.order,
                sampling_rate: self.sampling_rate,
            })
        }
    }

    pub fn design(&self) -> Result<Butterworth> {
        self.validate()?;
        Ok(Butterworth::bandpass(self))
    }
}

/// Second-order section with `a[0] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b[0] + z_inv * self.b[1] + z2 * self.b[2])
            / (self.a[0] + z_inv * self.a[1] + z2 * self.a[2])
    }

    fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    /// Transposed direct-form II state that holds a constant input `u` in steady state.
    fn steady_state(&self, u: f64) -> [f64; 2] {
        let y = self.dc_gain() * u;
        let z2 = self.b[2] * u - self.a[2] * y;
        let z1 = self.b[1] * u - self.a[1] * y + z2;
        [z1, z2]
    }

    fn run(&self, signal: &mut [f64], mut state: [f64; 2]) {
        for x in signal.iter_mut() {
            let input = *x;
            let y = self.b[0] * input + state[0];
            state[0] = self.b[1] * input - self.a[1] * y + state[1];
            state[1] = self.b[2] * input - self.a[2] * y;
            *x = y;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Butterworth {
    sections: Vec<Biquad>,
    sampling_rate: f64,
}

impl Butterworth {
    fn bandpass(spec: &FilterSpec) -> Self {
        let fs = spec.sampling_rate;
        let n = spec.order / 2;
        let fs2 = 2.0 * fs;
        let w_low = fs2 * (PI * spec.low_cut / fs).tan();
        let w_high = fs2 * (PI * spec.high_cut / fs).tan();
        let bandwidth = w_high - w_low;
        let center_sq = w_low * w_high;

        let mut poles = Vec::with_capacity(2 * n);
        for k in 0..n {
            let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
            let lowpass = Complex64::from_polar(1.0, theta) * (bandwidth / 2.0);
            let disc = (lowpass * lowpass - center_sq).sqrt();
            for s in [lowpass + disc, lowpass - disc] {
                poles.push((fs2 + s) / (fs2 - s));
            }
        }

        let mut sections = Vec::with_capacity(n);
        let (mut real, complex): (Vec<Complex64>, Vec<Complex64>) =
            poles.into_iter().partition(|p| p.im.abs() < 1e-12);
        for p in complex.iter().filter(|p| p.im > 0.0) {
            sections.push(Biquad {
                b: [1.0, 0.0, -1.0],
                a: [1.0, -2.0 * p.re, p.norm_sqr()],
            });
        }
        real.sort_by(|a, b| a.re.total_cmp(&b.re));
        for pair in real.chunks(2) {
            let (p, q) = (pair[0].re, pair[1].re);
            sections.push(Biquad {
                b: [1.0, 0.0, -1.0],
                a: [1.0, -(p + q), p * q],
            });
        }

        let mut filter = Self {
            sections,
            sampling_rate: fs,
        };
        // unit gain at the pre-warped geometric band center
        let center_hz = fs / PI * (center_sq.sqrt() / fs2).atan();
        let gain = filter.response(center_hz).norm();
        for b in filter.sections[0].b.iter_mut() {
            *b /= gain;
        }
        filter
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Complex response of one pass at `freq_hz`.
    pub fn response(&self, freq_hz: f64) -> Complex64 {
        let omega = 2.0 * PI * freq_hz / self.sampling_rate;
        let z_inv = Complex64::from_polar(1.0, -omega);
        self.sections
            .iter()
            .map(|s| s.response(z_inv))
            .product()
    }

    /// Magnitude of the forward-backward cascade, i.e. `|H|^2`.
    pub fn zero_phase_gain(&self, freq_hz: f64) -> f64 {
        self.response(freq_hz).norm_sqr()
    }

    /// Minimum signal length accepted by [`Butterworth::filtfilt`].
    pub fn warmup_len(&self) -> usize {
        3 * (2 * self.sections.len() + 1)
    }

    /// One causal pass, every section started in the steady state of `signal[0]`.
    pub fn filter_in_place(&self, signal: &mut [f64]) {
        let Some(&first) = signal.first() else {
            return;
        };
        let mut level = first;
        for section in &self.sections {
            section.run(signal, section.steady_state(level));
            level *= section.dc_gain();
        }
    }

    /// Zero-phase filtering: forward pass, then a pass over the reversed output.
    pub fn filtfilt(&self, signal: &[f64]) -> Result<Vec<f64>> {
        let required = self.warmup_len();
        if signal.len() < required {
            return Err(Error::SignalTooShort {
                samples: signal.len(),
                required,
            });
        }
        let mut out = signal.to_vec();
        self.filter_in_place(&mut out);
        out.reverse();
        self.filter_in_place(&mut out);
        out.reverse();
        Ok(out)
    }
}

/// Filters each channel of `signal` independently with a zero-phase band-pass.
pub fn bandpass_filter(signal: &Epoch, spec: &FilterSpec) -> Result<Epoch> {
    let filter = spec.design()?;
    if (spec.sampling_rate - signal.sampling_rate()).abs() > 1e-9 * spec.sampling_rate {
        return Err(Error::RateMismatch {
            filter: spec.sampling_rate,
            signal: signal.sampling_rate(),
        });
    }
    let data = signal
        .data()
        .iter()
        .map(|ch| filter.filtfilt(ch))
        .collect::<Result<Vec<_>>>()?;
    Epoch::new(
        data,
        signal.sampling_rate(),
        signal.period_samples(),
        signal.repetitions(),
    )
}
