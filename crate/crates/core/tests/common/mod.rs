//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use cvep::dsp::AveragedResponse;
use cvep::lexicon::{Dictionary, KeyboardLayout};

/// Pearson correlation of `a[t]` with `b[(t + offset) mod P]` over all channels.
pub fn naive_corr(a: &[Vec<f64>], b: &[Vec<f64>], offset: i64) -> f64 {
    let p = a[0].len() as i64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (ca, cb) in a.iter().zip(b) {
        for t in 0..p {
            xs.push(ca[t as usize]);
            ys.push(cb[(t + offset).rem_euclid(p) as usize]);
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Relative-lag scores: lag `l` covers position differences `l` and `l - L`.
pub fn naive_relative_scores(
    x_ref: &AveragedResponse,
    x: &AveragedResponse,
    num_chars: usize,
    spacing: usize,
) -> Vec<f64> {
    (0..num_chars)
        .map(|l| {
            let direct = naive_corr(x_ref.data(), x.data(), (l * spacing) as i64);
            if l == 0 {
                direct
            } else {
                let back = (l as i64 - num_chars as i64) * spacing as i64;
                direct.max(naive_corr(x_ref.data(), x.data(), back))
            }
        })
        .collect()
}

/// Every word whose first `sig.len() + 1` letters produce `sig`.
pub fn scan_candidates(dict: &Dictionary, layout: &KeyboardLayout, sig: &[usize]) -> Vec<String> {
    let n = layout.len();
    dict.words()
        .filter(|w| {
            let pos: Vec<usize> = w.chars().map(|c| layout.position(c).unwrap()).collect();
            pos.len() > sig.len()
                && sig
                    .iter()
                    .enumerate()
                    .all(|(i, &l)| (pos[i + 1] + n - pos[0]) % n == l)
        })
        .map(str::to_owned)
        .collect()
}

/// Two-sided 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: usize, n: usize) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (centre - half, centre + half)
}
