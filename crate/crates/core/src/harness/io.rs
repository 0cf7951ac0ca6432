//! Dictionary and epoch files.
//!
//! Epoch files are line-oriented text. Each epoch starts with
//!
//! ```text
//! #cvep-epoch v1 fs=<Hz> period=<samples> reps=<count> channels=<count>
//! ```
//!
//! followed by one line per channel holding `reps * period` comma-separated
//! decimals. Values are written in shortest round-trip form, so a write
//! followed by a load reproduces every sample bit-for-bit.

use std::fmt::Write as _;
use std::fs;
use std::io::ErrorKind;
use std::path::Path;

use crate::dsp::Epoch;
use crate::error::{Error, Result};
use crate::lexicon::{Dictionary, KeyboardLayout};

/// Three-letter words shipped with the crate.
pub const BUNDLED_WORDS: &str = include_str!("../../data/words3.txt");

const EPOCH_MAGIC: &str = "#cvep-epoch";
const EPOCH_VERSION: &str = "v1";

#[derive(Debug, Clone)]
pub struct LoadedDictionary {
    pub dictionary: Dictionary,
    /// Entries dropped because they contain characters outside the word alphabet.
    pub rejected: Vec<String>,
}

impl LoadedDictionary {
    pub fn parse(text: &str, layout: &KeyboardLayout) -> Result<Self> {
        let (dictionary, rejected) = Dictionary::parse(text, layout)?;
        if !rejected.is_empty() {
            log::warn!("rejected {} dictionary entries: {}", rejected.len(), rejected.join(", "));
        }
        Ok(Self {
            dictionary,
            rejected,
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => Error::FileNotFound {
            path: path.to_path_buf(),
        },
        _ => Error::Io(e),
    })
}

pub fn load_dictionary(path: &Path, layout: &KeyboardLayout) -> Result<LoadedDictionary> {
    LoadedDictionary::parse(&read(path)?, layout)
}

pub fn format_epochs(epochs: &[Epoch]) -> String {
    let mut out = String::new();
    for e in epochs {
        let _ = writeln!(
            out,
            "{EPOCH_MAGIC} {EPOCH_VERSION} fs={} period={} reps={} channels={}",
            e.sampling_rate(),
            e.period_samples(),
            e.repetitions(),
            e.channels()
        );
        for ch in e.data() {
            let mut first = true;
            for v in ch {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn write_epochs(path: &Path, epochs: &[Epoch]) -> Result<()> {
    fs::write(path, format_epochs(epochs))?;
    Ok(())
}

struct Header {
    sampling_rate: f64,
    period: usize,
    reps: usize,
    channels: usize,
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let mut fields = line.split_whitespace();
    if fields.next() != Some(EPOCH_MAGIC) {
        return Err(format_err(line_no, format!("expected `{EPOCH_MAGIC}` header")));
    }
    match fields.next() {
        Some(EPOCH_VERSION) => {}
        other => {
            return Err(format_err(
                line_no,
                format!("unsupported epoch format version {other:?}"),
            ))
        }
    }
    let (mut fs, mut period, mut reps, mut channels) = (None, None, None, None);
    for field in fields {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| format_err(line_no, format!("malformed header field {field:?}")))?;
        let bad = |_| format_err(line_no, format!("invalid value in {field:?}"));
        match key {
            "fs" => fs = Some(value.parse::<f64>().map_err(|_| bad(()))?),
            "period" => period = Some(value.parse::<usize>().map_err(|_| bad(()))?),
            "reps" => reps = Some(value.parse::<usize>().map_err(|_| bad(()))?),
            "channels" => channels = Some(value.parse::<usize>().map_err(|_| bad(()))?),
            _ => return Err(format_err(line_no, format!("unknown header field {key:?}"))),
        }
    }
    let missing = |name: &str| format_err(line_no, format!("header is missing `{name}`"));
    let header = Header {
        sampling_rate: fs.ok_or_else(|| missing("fs"))?,
        period: period.ok_or_else(|| missing("period"))?,
        reps: reps.ok_or_else(|| missing("reps"))?,
        channels: channels.ok_or_else(|| missing("channels"))?,
    };
    if !(header.sampling_rate.is_finite() && header.sampling_rate > 0.0)
        || header.period == 0
        || header.reps == 0
        || header.channels == 0
    {
        return Err(format_err(line_no, "header values must be positive"));
    }
    Ok(header)
}

fn parse_channel(line_no: usize, line: &str, expected: usize) -> Result<Vec<f64>> {
    let values = line
        .split(',')
        .enumerate()
        .map(|(i, tok)| {
            let v: f64 = tok.trim().parse().map_err(|_| {
                format_err(line_no, format!("sample {} is not a number: {tok:?}", i + 1))
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format_err(line_no, format!("sample {} is not finite", i + 1)))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != expected {
        return Err(format_err(
            line_no,
            format!(
                "channel has {} samples, header requires reps x period = {expected}",
                values.len()
            ),
        ));
    }
    Ok(values)
}

pub fn parse_epochs(text: &str) -> Result<Vec<Epoch>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut epochs = Vec::new();
    while let Some((line_no, line)) = lines.next() {
        let header = parse_header(line_no, line)?;
        let expected = header.period * header.reps;
        let mut data = Vec::with_capacity(header.channels);
        for c in 0..header.channels {
            let (ch_line, ch) = lines.next().ok_or_else(|| {
                format_err(
                    text.lines().count() + 1,
                    format!(
                        "file ends after {c} of {} channels of the epoch starting at line {line_no}",
                        header.channels
                    ),
                )
            })?;
            if ch.starts_with('#') {
                return Err(format_err(
                    ch_line,
                    format!("expected channel {} data, found a header", c + 1),
                ));
            }
            data.push(parse_channel(ch_line, ch, expected)?);
        }
        let epoch = Epoch::new(data, header.sampling_rate, header.period, header.reps)
            .map_err(|e| format_err(line_no, e.to_string()))?;
        epochs.push(epoch);
    }
    if epochs.is_empty() {
        return Err(format_err(1, "no epochs in file"));
    }
    Ok(epochs)
}

pub fn load_epochs(path: &Path) -> Result<Vec<Epoch>> {
    parse_epochs(&read(path)?)
}
