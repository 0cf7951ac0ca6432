//! Synthetic c-VEP epochs with known ground truth.
//!
//! A template is the bipolar code of a character, held for
//! `samples_per_bit` samples per bit and circularly convolved with a
//! VEP-like impulse response. Epochs tile the template and add white
//! Gaussian noise.
//!
//! Noise is drawn from ChaCha20 seeded with the 32 bytes
//! `rng_seed (LE u64) | trial_seed (LE u64) | char_position (LE u64) | 0u64`,
//! one standard normal per sample, channel-major. The stream is the same
//! on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::code::{bipolar, Codebook};
use crate::dsp::{AveragedResponse, Epoch};
use crate::error::{Error, Result};

/// Code presentation rate of the default geometry (bits per second).
pub const DEFAULT_BIT_RATE: f64 = 60.0;
pub const DEFAULT_SAMPLES_PER_BIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VepKernel {
    impulse_response: Vec<f64>,
    sampling_rate: f64,
}

impl VepKernel {
    pub fn new(impulse_response: Vec<f64>, sampling_rate: f64) -> Result<Self> {
        if impulse_response.is_empty() || !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(Error::InvalidParameter(
                "kernel needs samples and a positive sampling rate".into(),
            ));
        }
        if impulse_response.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if impulse_response.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidParameter("kernel has zero energy".into()));
        }
        Ok(Self {
            impulse_response,
            sampling_rate,
        })
    }

    /// `exp(-t / decay) * sin(2 pi freq t)` sampled on `[0, duration)`.
    pub fn damped_sine(sampling_rate: f64, decay_s: f64, freq_hz: f64, duration_s: f64) -> Result<Self> {
        let len = (duration_s * sampling_rate).floor() as usize;
        let h = (0..len)
            .map(|i| {
                let t = i as f64 / sampling_rate;
                (-t / decay_s).exp() * (2.0 * std::f64::consts::PI * freq_hz * t).sin()
            })
            .collect();
        Self::new(h, sampling_rate)
    }

    /// 7 Hz damped sine, 80 ms decay, truncated at 250 ms.
    pub fn default_for(sampling_rate: f64) -> Result<Self> {
        Self::damped_sine(sampling_rate, 0.08, 7.0, 0.25)
    }

    pub fn unit_impulse(sampling_rate: f64) -> Result<Self> {
        Self::new(vec![1.0], sampling_rate)
    }

    pub fn impulse_response(&self) -> &[f64] {
        &self.impulse_response
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn duration(&self) -> f64 {
        self.impulse_response.len() as f64 / self.sampling_rate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub codebook: Codebook,
    pub samples_per_bit: usize,
    pub channels: usize,
    pub kernel: VepKernel,
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

impl SynthConfig {
    pub fn new(
        codebook: Codebook,
        samples_per_bit: usize,
        channels: usize,
        kernel: VepKernel,
        noise_sigma: f64,
        rng_seed: u64,
    ) -> Result<Self> {
        let config = Self {
            codebook,
            samples_per_bit,
            channels,
            kernel,
            noise_sigma,
            rng_seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// Default codebook and kernel at 4 samples per bit (240 Hz).
    pub fn with_defaults(noise_sigma: f64, rng_seed: u64) -> Result<Self> {
        let fs = DEFAULT_BIT_RATE * DEFAULT_SAMPLES_PER_BIT as f64;
        Self::new(
            Codebook::default(),
            DEFAULT_SAMPLES_PER_BIT,
            1,
            VepKernel::default_for(fs)?,
            noise_sigma,
            rng_seed,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_bit == 0 || self.channels == 0 {
            return Err(Error::InvalidParameter(
                "samples_per_bit and channels must be at least 1".into(),
            ));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be finite and non-negative, got {}",
                self.noise_sigma
            )));
        }
        if self.kernel.impulse_response.len() > self.period_samples() {
            return Err(Error::InvalidParameter(format!(
                "kernel of {} samples is longer than the {}-sample code period",
                self.kernel.impulse_response.len(),
                self.period_samples()
            )));
        }
        Ok(())
    }

    pub fn period_samples(&self) -> usize {
        self.codebook.code_len() * self.samples_per_bit
    }

    pub fn sampling_rate(&self) -> f64 {
        self.kernel.sampling_rate
    }

    /// Samples between adjacent keyboard positions.
    pub fn lag_spacing(&self) -> usize {
        self.codebook.bits_per_shift() * self.samples_per_bit
    }

    pub fn num_chars(&self) -> usize {
        self.codebook.num_chars()
    }
}

/// Noise-free one-period response to character `char_position`.
pub fn render_template(config: &SynthConfig, char_position: usize) -> Result<AveragedResponse> {
    let code = config.codebook.code(char_position)?;
    let held: Vec<f64> = bipolar(code)
        .into_iter()
        .flat_map(|v| std::iter::repeat_n(v, config.samples_per_bit))
        .collect();
    let n = held.len();
    let kernel = &config.kernel.impulse_response;
    let response: Vec<f64> = (0..n)
        .map(|t| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, h)| h * held[(t + n - j % n) % n])
                .sum()
        })
        .collect();
    AveragedResponse::new(vec![response; config.channels])
}

pub(crate) fn noise_rng(rng_seed: u64, trial_seed: u64, char_position: usize) -> ChaCha20Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&rng_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial_seed.to_le_bytes());
    seed[16..24].copy_from_slice(&(char_position as u64).to_le_bytes());
    ChaCha20Rng::from_seed(seed)
}

/// `repetitions` copies of the template plus white Gaussian noise.
pub fn synth_epoch(
    config: &SynthConfig,
    char_position: usize,
    repetitions: usize,
    trial_seed: u64,
) -> Result<Epoch> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
    }
    let template = render_template(config, char_position)?;
    let mut rng = noise_rng(config.rng_seed, trial_seed, char_position);
    let sigma = config.noise_sigma;
    let data = template
        .data()
        .iter()
        .map(|period| {
            let mut channel: Vec<f64> = period
                .iter()
                .cycle()
                .take(period.len() * repetitions)
                .copied()
                .collect();
            if sigma > 0.0 {
                for v in channel.iter_mut() {
                    *v += sigma * rng.sample::<f64, _>(StandardNormal);
                }
            }
            channel
        })
        .collect();
    Epoch::new(data, config.sampling_rate(), config.period_samples(), repetitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::DEFAULT_NUM_CHARS;
    use crate::dsp::{average_repetitions, circular_shift_samples};

    fn impulse_config(samples_per_bit: usize) -> SynthConfig {
        let fs = DEFAULT_BIT_RATE * samples_per_bit as f64;
        SynthConfig::new(
            Codebook::default(),
            samples_per_bit,
            1,
            VepKernel::unit_impulse(fs).unwrap(),
            0.0,
            1,
        )
        .unwrap()
    }

    #[test]
    fn default_geometry() {
        let c = SynthConfig::with_defaults(0.0, 0).unwrap();
        assert_eq!(c.period_samples(), 252);
        assert_eq!(c.sampling_rate(), 240.0);
        assert_eq!(c.lag_spacing(), 8);
        assert_eq!(c.kernel.impulse_response().len(), 60);
        assert!((c.kernel.duration() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kernel_validation() {
        assert!(VepKernel::new(vec![], 240.0).is_err());
        assert!(VepKernel::new(vec![0.0, 0.0], 240.0).is_err());
        assert!(matches!(VepKernel::new(vec![f64::NAN], 240.0), Err(Error::NonFinite)));
        let long = VepKernel::new(vec![1.0; 300], 240.0).unwrap();
        let err = SynthConfig::new(Codebook::default(), 4, 1, long, 0.0, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn config_validation() {
        let k = VepKernel::unit_impulse(240.0).unwrap();
        assert!(SynthConfig::new(Codebook::default(), 0, 1, k.clone(), 0.0, 0).is_err());
        assert!(SynthConfig::new(Codebook::default(), 4, 0, k.clone(), 0.0, 0).is_err());
        assert!(SynthConfig::new(Codebook::default(), 4, 1, k, -1.0, 0).is_err());
    }

    #[test]
    fn unit_impulse_gives_held_code() {
        let c = impulse_config(4);
        let t = render_template(&c, 3).unwrap();
        let code = c.codebook.code(3).unwrap();
        for (i, v) in t.data()[0].iter().enumerate() {
            let want = if code[i / 4] == 1 { 1.0 } else { -1.0 };
            assert_eq!(*v, want);
        }
    }

    #[test]
    fn templates_are_shifts_of_each_other() {
        let c = SynthConfig::with_defaults(0.0, 0).unwrap();
        let base = render_template(&c, 0).unwrap();
        for p in [1, 5, 17, 31] {
            let shifted = circular_shift_samples(&base, (p * c.lag_spacing()) as i64);
            assert_eq!(render_template(&c, p).unwrap(), shifted);
        }
    }

    #[test]
    fn position_out_of_range() {
        let c = SynthConfig::with_defaults(0.0, 0).unwrap();
        assert!(matches!(
            render_template(&c, DEFAULT_NUM_CHARS),
            Err(Error::PositionOutOfRange { position: 32, count: 32 })
        ));
        assert!(synth_epoch(&c, 40, 2, 0).is_err());
    }

    #[test]
    fn noiseless_epoch_tiles_template() {
        let c = SynthConfig::with_defaults(0.0, 9).unwrap();
        let t = render_template(&c, 6).unwrap();
        let e = synth_epoch(&c, 6, 3, 11).unwrap();
        assert_eq!(e.repetitions(), 3);
        for rep in e.data()[0].chunks(c.period_samples()) {
            assert_eq!(rep, t.data()[0].as_slice());
        }
        assert_eq!(average_repetitions(&e), t);
    }

    #[test]
    fn noise_is_seeded() {
        let c = SynthConfig::with_defaults(1.0, 5).unwrap();
        let a = synth_epoch(&c, 2, 2, 100).unwrap();
        let b = synth_epoch(&c, 2, 2, 100).unwrap();
        let d = synth_epoch(&c, 2, 2, 101).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn channels_share_template_with_independent_noise() {
        let mut c = SynthConfig::with_defaults(0.0, 5).unwrap();
        c.channels = 3;
        let t = render_template(&c, 4).unwrap();
        assert_eq!(t.channels(), 3);
        assert!(t.data().iter().all(|ch| ch == &t.data()[0]));
        c.noise_sigma = 1.0;
        let e = synth_epoch(&c, 4, 1, 0).unwrap();
        assert_ne!(e.data()[0], e.data()[1]);
    }
}
