//! Keyboard layout, dictionary and lag-signature candidate filtering.
//!
//! A word's lag signature is the position of each letter relative to the
//! first, modulo the keyboard size. The zero-calibration decoder only ever
//! sees signatures, so the dictionary has to disambiguate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 26 letters followed by six non-letter keys.
pub const DEFAULT_KEYS: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ_.,?!<";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyboardLayout {
    characters: Vec<char>,
    positions: HashMap<char, usize>,
    lag_spacing: usize,
}

impl KeyboardLayout {
    pub fn new(characters: impl IntoIterator<Item = char>, lag_spacing: usize) -> Result<Self> {
        let characters: Vec<char> = characters.into_iter().collect();
        if characters.is_empty() {
            return Err(Error::InvalidParameter("keyboard has no characters".into()));
        }
        let mut positions = HashMap::with_capacity(characters.len());
        for (p, &c) in characters.iter().enumerate() {
            if positions.insert(c, p).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "character {c:?} appears twice on the keyboard"
                )));
            }
        }
        Ok(Self {
            characters,
            positions,
            lag_spacing,
        })
    }

    pub fn with_default_keys(lag_spacing: usize) -> Self {
        Self::new(DEFAULT_KEYS.chars(), lag_spacing).expect("default keys are distinct")
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn characters(&self) -> &[char] {
        &self.characters
    }

    /// Samples between adjacent positions.
    pub fn lag_spacing(&self) -> usize {
        self.lag_spacing
    }

    pub fn position(&self, c: char) -> Result<usize> {
        self.positions
            .get(&c)
            .copied()
            .ok_or(Error::UnknownCharacter(c))
    }

    pub fn character(&self, position: usize) -> Result<char> {
        self.characters
            .get(position)
            .copied()
            .ok_or(Error::PositionOutOfRange {
                position,
                count: self.len(),
            })
    }

    /// Uppercase ASCII letters on the keyboard may appear in words.
    pub fn is_word_letter(&self, c: char) -> bool {
        c.is_ascii_uppercase() && self.positions.contains_key(&c)
    }

    fn word_letters(&self) -> impl Iterator<Item = (usize, char)> + '_ {
        self.characters
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| self.is_word_letter(c))
    }

    pub fn positions_of(&self, word: &str) -> Result<Vec<usize>> {
        word.chars().map(|c| self.position(c)).collect()
    }
}

/// Relative lags of letters 2..k with respect to letter 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct LagSignature(pub Vec<usize>);

impl LagSignature {
    pub fn lags(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn extended(&self, next_lag: usize) -> Self {
        let mut lags = self.0.clone();
        lags.push(next_lag);
        Self(lags)
    }
}

impl fmt::Display for LagSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

pub fn signature_of_word(word: &str, layout: &KeyboardLayout) -> Result<LagSignature> {
    let positions = layout.positions_of(word)?;
    let (&first, rest) = positions.split_first().ok_or(Error::EmptyInput)?;
    let n = layout.len();
    Ok(LagSignature(
        rest.iter().map(|&p| (p + n - first) % n).collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    words: BTreeSet<String>,
}

impl Dictionary {
    /// Uppercases every entry and keeps those spelled with word letters of
    /// `layout`. Returns the dictionary and the rejected entries.
    pub fn from_words<I, S>(words: I, layout: &KeyboardLayout) -> Result<(Self, Vec<String>)>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut kept = BTreeSet::new();
        let mut rejected = Vec::new();
        for raw in words {
            let raw = raw.as_ref().trim();
            if raw.is_empty() {
                continue;
            }
            let word = raw.to_uppercase();
            if word.chars().all(|c| layout.is_word_letter(c)) {
                kept.insert(word);
            } else {
                rejected.push(raw.to_string());
            }
        }
        if kept.is_empty() {
            return Err(Error::DictionaryEmpty);
        }
        Ok((Self { words: kept }, rejected))
    }

    /// Parses one word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, layout: &KeyboardLayout) -> Result<(Self, Vec<String>)> {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
            layout,
        )
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn has_prefix(&self, prefix: &str) -> bool {
        self.with_prefix(prefix).next().is_some()
    }

    /// Words starting with `prefix`, in order.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.words
            .range::<str, _>((Bound::Included(prefix), Bound::Unbounded))
            .take_while(move |w| w.starts_with(prefix))
            .map(String::as_str)
    }

    /// Keeps only words of exactly `len` letters.
    pub fn restrict_to_length(&self, len: usize) -> Result<Self> {
        let words: BTreeSet<String> = self
            .words
            .iter()
            .filter(|w| w.chars().count() == len)
            .cloned()
            .collect();
        if words.is_empty() {
            return Err(Error::DictionaryEmpty);
        }
        Ok(Self { words })
    }
}

/// Dictionary words whose first `k` letters match an observed signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    signature: LagSignature,
    words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    Unresolved,
    Unique(String),
    Empty,
}

impl CandidateSet {
    /// Letters observed so far, `signature.len() + 1`.
    pub fn observed_length(&self) -> usize {
        self.signature.len() + 1
    }

    pub fn signature(&self) -> &LagSignature {
        &self.signature
    }

    /// Sorted candidate words.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Narrows to words whose next letter sits `next_lag` after the first.
    pub fn refine(&self, layout: &KeyboardLayout, next_lag: usize) -> CandidateSet {
        let k = self.observed_length();
        let n = layout.len();
        let words = self
            .words
            .iter()
            .filter(|w| {
                let mut chars = w.chars();
                let first = chars.next();
                let next = chars.nth(k - 1);
                match (first, next) {
                    (Some(a), Some(b)) => match (layout.position(a), layout.position(b)) {
                        (Ok(pa), Ok(pb)) => (pb + n - pa) % n == next_lag,
                        _ => false,
                    },
                    _ => false,
                }
            })
            .cloned()
            .collect();
        CandidateSet {
            signature: self.signature.extended(next_lag),
            words,
        }
    }

    pub fn resolution(&self) -> Resolution {
        match self.words.as_slice() {
            [] => Resolution::Empty,
            [only] => Resolution::Unique(only.clone()),
            _ => Resolution::Unresolved,
        }
    }

    /// Sorted distinct `k`-letter prefixes, the feedback shown to the user.
    pub fn display_prefixes(&self) -> Vec<String> {
        let k = self.observed_length();
        let prefixes: BTreeSet<String> = self
            .words
            .iter()
            .map(|w| w.chars().take(k).collect())
            .collect();
        prefixes.into_iter().collect()
    }
}

/// Words consistent with `signature`, found by trying every first letter
/// and walking the prefix it implies.
pub fn filter_candidates(
    dict: &Dictionary,
    layout: &KeyboardLayout,
    signature: &LagSignature,
) -> CandidateSet {
    let n = layout.len();
    let mut words = Vec::new();
    for (first_pos, first) in layout.word_letters() {
        let mut prefix = String::with_capacity(signature.len() + 1);
        prefix.push(first);
        let spelled = signature.lags().iter().all(|&l| {
            match layout.character((first_pos + l) % n) {
                Ok(c) if layout.is_word_letter(c) => {
                    prefix.push(c);
                    true
                }
                _ => false,
            }
        });
        if spelled {
            words.extend(dict.with_prefix(&prefix).map(str::to_owned));
        }
    }
    words.sort();
    CandidateSet {
        signature: signature.clone(),
        words,
    }
}
