//! Alphabetic tokenization and frequency counting.
//!
//! A token is a maximal run of Unicode letters, lower-cased. Everything
//! else (digits, punctuation, whitespace, symbols) acts as a separator.
//! This is deliberately naive: it matches what large web indexes of the
//! era did, and it is the convention every other module builds on.

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A single alphabetic, case-folded token.
///
/// Invariants, enforced on construction:
/// - non-empty
/// - every code point has the Unicode letter property
/// - already case-folded (folding it again changes nothing)
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenError {
    #[error("empty token")]
    Empty,
    #[error("token {0:?} contains non-letter character {1:?}")]
    NonLetter(String, char),
    #[error("token {0:?} is not case-folded (folds to {1:?})")]
    NotCaseFolded(String, String),
}

impl Token {
    /// Validates `word` against the token invariants.
    pub fn new(word: impl Into<String>) -> Result<Self, TokenError> {
        let word = word.into();
        if word.is_empty() {
            return Err(TokenError::Empty);
        }
        if let Some(bad) = word.chars().find(|c| !c.is_alphabetic()) {
            return Err(TokenError::NonLetter(word, bad));
        }
        let folded = fold_letters(&word);
        if folded != word {
            return Err(TokenError::NotCaseFolded(word, folded));
        }
        Ok(Token(word))
    }

    /// Wraps a string the tokenizer itself produced; skips re-validation.
    fn from_folded_run(run: String) -> Self {
        debug_assert!(Token::new(run.clone()).is_ok());
        Token(run)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Token {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Token {
    type Err = TokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Token::new(s)
    }
}

impl TryFrom<&str> for Token {
    type Error = TokenError;

    fn try_from(s: &str) -> Result<Self, Self::Error> {
        Token::new(s)
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Token::new(s).map_err(serde::de::Error::custom)
    }
}

/// Lower-cases a run of letters, dropping any non-letter code points the
/// mapping introduces (e.g. the combining dot that `İ` folds to).
fn fold_letters(run: &str) -> String {
    run.chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphabetic())
        .collect()
}

/// Splits `text` into case-folded alphabetic tokens, in order.
///
/// Non-letter characters separate tokens and are discarded; empty input
/// yields an empty sequence.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut run = String::new();
    for ch in text.chars() {
        if ch.is_alphabetic() {
            for low in ch.to_lowercase() {
                if low.is_alphabetic() {
                    run.push(low);
                }
            }
        } else if !run.is_empty() {
            tokens.push(Token::from_folded_run(std::mem::take(&mut run)));
        }
    }
    if !run.is_empty() {
        tokens.push(Token::from_folded_run(run));
    }
    tokens
}

/// Token occurrence counts for one text source.
///
/// `total_tokens` counts every alphabetic token seen, not just distinct
/// ones, and always equals the sum of the individual counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<Token, u64>,
    total_tokens: u64,
}

impl FrequencyTable {
    pub fn count(&self, token: &Token) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Looks a token up by its string form.
    pub fn count_str(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn counts(&self) -> &HashMap<Token, u64> {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.total_tokens == 0
    }

    pub fn distinct_tokens(&self) -> usize {
        self.counts.len()
    }

    /// All (token, count) pairs sorted by token, for deterministic output.
    pub fn iter_sorted(&self) -> Vec<(&Token, u64)> {
        let mut entries: Vec<_> = self.counts.iter().map(|(t, c)| (t, *c)).collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        entries
    }

    fn add(&mut self, token: Token, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(token).or_insert(0) += count;
        self.total_tokens += count;
    }
}

/// Counts token multiplicities; `total_tokens` is the sequence length.
pub fn count_frequencies<I>(tokens: I) -> FrequencyTable
where
    I: IntoIterator<Item = Token>,
{
    let mut table = FrequencyTable::default();
    for token in tokens {
        table.add(token, 1);
    }
    table
}

/// Tokenizes and counts in one pass.
pub fn count_text(text: &str) -> FrequencyTable {
    count_frequencies(tokenize(text))
}

/// Pointwise sum of the given tables.
pub fn merge<'a, I>(tables: I) -> FrequencyTable
where
    I: IntoIterator<Item = &'a FrequencyTable>,
{
    let mut merged = FrequencyTable::default();
    for table in tables {
        for (token, count) in &table.counts {
            merged.add(token.clone(), *count);
        }
    }
    merged
}
