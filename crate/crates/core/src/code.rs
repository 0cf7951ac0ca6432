//! Maximal-length binary codes and the per-character shifted codebook.
//!
//! Every keyboard character flashes the same m-sequence, delayed by a
//! character-specific number of code bits. Position `p` is delayed by
//! `p * bits_per_shift` bits, reduced modulo the code length.

use crate::error::{Error, Result};

/// Feedback taps for the default order-6 code, `x^6 + x^5 + 1`.
pub const DEFAULT_TAPS: [usize; 2] = [6, 5];
pub const DEFAULT_ORDER: usize = 6;
pub const DEFAULT_NUM_CHARS: usize = 32;
pub const DEFAULT_BITS_PER_SHIFT: usize = 2;

const MAX_ORDER: usize = 24;

/// Output of a Fibonacci LFSR over one full period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MSequence {
    bits: Vec<u8>,
    order: usize,
    taps: Vec<usize>,
    seed: u32,
}

impl MSequence {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    /// Bits mapped to the antipodal alphabet, 0 -> -1 and 1 -> +1.
    pub fn bipolar(&self) -> Vec<f64> {
        bipolar(&self.bits)
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn to_bit_string(&self) -> String {
        bit_string(&self.bits)
    }
}

impl Default for MSequence {
    fn default() -> Self {
        generate_msequence(DEFAULT_ORDER, &DEFAULT_TAPS, all_ones(DEFAULT_ORDER))
            .expect("default taps are primitive")
    }
}

/// Register state with every stage set.
pub fn all_ones(order: usize) -> u32 {
    ((1u64 << order) - 1) as u32
}

pub(crate) fn bipolar(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b == 0 { -1.0 } else { 1.0 })
        .collect()
}

pub(crate) fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Runs a Fibonacci LFSR for one period.
///
/// Stage `i` (1-based) lives in bit `i - 1` of the register. Each step
/// outputs the last stage, XORs the tapped stages into a feedback bit and
/// shifts it in at stage 1. `taps` lists 1-based stage numbers; `x^6 + x^5 + 1`
/// is `[6, 5]`.
///
/// The period is validated by walking the register: it must return to
/// `seed` after exactly `2^order - 1` steps and not before.
pub fn generate_msequence(order: usize, taps: &[usize], seed: u32) -> Result<MSequence> {
    if !(2..=MAX_ORDER).contains(&order)
        || taps.is_empty()
        || taps.iter().any(|&t| t == 0 || t > order)
    {
        return Err(Error::InvalidTaps {
            taps: taps.to_vec(),
            order,
        });
    }
    let mask = all_ones(order);
    if seed & !mask != 0 {
        return Err(Error::InvalidSeed { seed, order });
    }
    if seed == 0 {
        return Err(Error::ZeroSeed);
    }

    let tap_mask = taps.iter().fold(0u32, |m, &t| m | (1 << (t - 1)));
    let length = mask as usize;
    let mut bits = Vec::with_capacity(length);
    let mut state = seed;
    for step in 1..=length {
        bits.push(((state >> (order - 1)) & 1) as u8);
        let feedback = (state & tap_mask).count_ones() & 1;
        state = ((state << 1) | feedback) & mask;
        if state == seed && step < length {
            return Err(Error::NonMaximalPeriod {
                taps: taps.to_vec(),
                period: step,
                expected: length,
            });
        }
    }
    if state != seed {
        // the orbit never closes through the seed (non-invertible feedback)
        return Err(Error::NonMaximalPeriod {
            taps: taps.to_vec(),
            period: 0,
            expected: length,
        });
    }

    Ok(MSequence {
        bits,
        order,
        taps: taps.to_vec(),
        seed,
    })
}

/// Circular rotation with positive `k` as a delay: `out[i] = xs[(i - k) mod n]`.
pub(crate) fn rotate<T: Copy>(xs: &[T], k: i64) -> Vec<T> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    let k = k.rem_euclid(n as i64) as usize;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&xs[n - k..]);
    out.extend_from_slice(&xs[..n - k]);
    out
}

pub fn circular_shift_bits(seq: &[u8], k: i64) -> Vec<u8> {
    rotate(seq, k)
}

/// `sum_i m(i) * m(i + lag)` over the bipolar mapping of the bits.
pub fn circular_autocorrelation(seq: &MSequence, lag: usize) -> Result<i64> {
    let n = seq.len();
    if lag >= n {
        return Err(Error::LagOutOfRange { lag, length: n });
    }
    let sign = |b: u8| if b == 0 { -1i64 } else { 1 };
    Ok((0..n)
        .map(|i| sign(seq.bits[i]) * sign(seq.bits[(i + lag) % n]))
        .sum())
}

/// One code per keyboard position, each a delayed copy of the base sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    base: MSequence,
    bits_per_shift: usize,
    codes: Vec<Vec<u8>>,
}

impl Codebook {
    pub fn base(&self) -> &MSequence {
        &self.base
    }

    pub fn num_chars(&self) -> usize {
        self.codes.len()
    }

    pub fn bits_per_shift(&self) -> usize {
        self.bits_per_shift
    }

    pub fn code_len(&self) -> usize {
        self.base.len()
    }

    pub fn codes(&self) -> &[Vec<u8>] {
        &self.codes
    }

    pub fn code(&self, position: usize) -> Result<&[u8]> {
        self.codes
            .get(position)
            .map(Vec::as_slice)
            .ok_or(Error::PositionOutOfRange {
                position,
                count: self.codes.len(),
            })
    }

    /// Delay of `position` in code bits, modulo the code length.
    pub fn lag_bits(&self, position: usize) -> usize {
        (position * self.bits_per_shift) % self.base.len()
    }
}

impl Default for Codebook {
    fn default() -> Self {
        build_codebook(MSequence::default(), DEFAULT_NUM_CHARS, DEFAULT_BITS_PER_SHIFT)
            .expect("default codebook has distinct lags")
    }
}

pub fn build_codebook(mseq: MSequence, num_chars: usize, bits_per_shift: usize) -> Result<Codebook> {
    if num_chars == 0 || bits_per_shift == 0 {
        return Err(Error::InvalidParameter(format!(
            "codebook needs at least one character and a nonzero shift (got L={num_chars}, shift={bits_per_shift})"
        )));
    }
    let n = mseq.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for p in 0..num_chars {
        let lag = (p * bits_per_shift) % n;
        if let Some(first) = owner[lag] {
            return Err(Error::LagCollision {
                first,
                second: p,
                lag_bits: lag,
            });
        }
        owner[lag] = Some(p);
    }
    let codes = (0..num_chars)
        .map(|p| circular_shift_bits(&mseq.bits, (p * bits_per_shift) as i64))
        .collect();
    Ok(Codebook {
        base: mseq,
        bits_per_shift,
        codes,
    })
}
