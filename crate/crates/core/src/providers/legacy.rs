//! The legacy single-line word-count response format:
//!
//! ```text
//! word count: daß: 7990333; durch: 8250898; einer: 9315833
//! ```
//!
//! A fixed `word count: ` prefix, then `term: count` pairs joined by
//! `; `. Parsing is whitespace-tolerant; serialization is canonical.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::tokenizer::Token;

pub const LEGACY_PREFIX: &str = "word count:";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LegacyParseError {
    #[error("missing {LEGACY_PREFIX:?} prefix at character offset 0")]
    MissingPrefix,
    #[error("empty term at character offset {offset}")]
    EmptyTerm { offset: usize },
    #[error("invalid term {term:?} at character offset {offset}: {reason}")]
    InvalidTerm {
        term: String,
        offset: usize,
        reason: String,
    },
    #[error("missing \":\" separator in {pair:?} at character offset {offset}")]
    MissingSeparator { pair: String, offset: usize },
    #[error("non-numeric count {count:?} at character offset {offset}")]
    InvalidCount { count: String, offset: usize },
    #[error("duplicate term {term:?} at character offset {offset}")]
    DuplicateTerm { term: String, offset: usize },
}

fn char_offset(line: &str, byte_offset: usize) -> usize {
    line[..byte_offset].chars().count()
}

/// Parses one legacy response line into a term → count map.
///
/// `"word count: "` alone is a valid empty payload. Offsets in errors are
/// character offsets into the full line.
pub fn parse_legacy_wordcount(line: &str) -> Result<BTreeMap<Token, u64>, LegacyParseError> {
    let rest = line
        .strip_prefix(LEGACY_PREFIX)
        .ok_or(LegacyParseError::MissingPrefix)?;
    let mut counts = BTreeMap::new();
    let payload_start = LEGACY_PREFIX.len();
    let mut cursor = payload_start;
    for piece in rest.split(';') {
        let piece_start = cursor;
        cursor += piece.len() + 1; // +1 for the consumed ';'
        if piece.trim().is_empty() {
            continue;
        }
        let Some(colon) = piece.find(':') else {
            return Err(LegacyParseError::MissingSeparator {
                pair: piece.trim().to_string(),
                offset: char_offset(line, piece_start),
            });
        };
        let raw_term = &piece[..colon];
        let raw_count = &piece[colon + 1..];

        let term_text = raw_term.trim();
        let term_offset = piece_start + leading_ws(raw_term);
        if term_text.is_empty() {
            return Err(LegacyParseError::EmptyTerm {
                offset: char_offset(line, term_offset),
            });
        }
        let term = Token::new(term_text).map_err(|e| LegacyParseError::InvalidTerm {
            term: term_text.to_string(),
            offset: char_offset(line, term_offset),
            reason: e.to_string(),
        })?;

        let count_text = raw_count.trim();
        let count_offset = piece_start + colon + 1 + leading_ws(raw_count);
        let count: u64 = count_text
            .parse()
            .map_err(|_| LegacyParseError::InvalidCount {
                count: count_text.to_string(),
                offset: char_offset(line, count_offset),
            })?;

        if counts.insert(term, count).is_some() {
            return Err(LegacyParseError::DuplicateTerm {
                term: term_text.to_string(),
                offset: char_offset(line, term_offset),
            });
        }
    }
    Ok(counts)
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

/// Canonical serialization: prefix, then pairs sorted by ascending count
/// (ties by term), joined with `"; "`.
pub fn format_legacy_wordcount(counts: &BTreeMap<Token, u64>) -> String {
    let mut pairs: Vec<(&Token, u64)> = counts.iter().map(|(t, c)| (t, *c)).collect();
    pairs.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let body = pairs
        .iter()
        .map(|(t, c)| format!("{}: {}", t.as_str(), c))
        .collect::<Vec<_>>()
        .join("; ");
    format!("{LEGACY_PREFIX} {body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(w: &str) -> Token {
        Token::new(w).unwrap()
    }

    #[test]
    fn parses_two_pairs() {
        let map = parse_legacy_wordcount("word count: daß: 7990333; durch: 8250898").unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map[&tok("daß")], 7_990_333);
        assert_eq!(map[&tok("durch")], 8_250_898);
    }

    #[test]
    fn empty_payload_is_empty_map() {
        assert!(parse_legacy_wordcount("word count: ").unwrap().is_empty());
        assert!(parse_legacy_wordcount("word count:").unwrap().is_empty());
    }

    #[test]
    fn tolerates_irregular_whitespace() {
        let map = parse_legacy_wordcount("word count:  und :  101250806 ;von:39927301").unwrap();
        assert_eq!(map[&tok("und")], 101_250_806);
        assert_eq!(map[&tok("von")], 39_927_301);
    }

    #[test]
    fn missing_prefix_is_an_error() {
        assert_eq!(
            parse_legacy_wordcount("counts: und: 1"),
            Err(LegacyParseError::MissingPrefix)
        );
    }

    #[test]
    fn non_numeric_count_reports_offset() {
        let line = "word count: und: x1";
        let err = parse_legacy_wordcount(line).unwrap_err();
        assert_eq!(
            err,
            LegacyParseError::InvalidCount {
                count: "x1".into(),
                offset: 17
            }
        );
        assert_eq!(&line[17..], "x1");
    }

    #[test]
    fn empty_term_reports_offset() {
        let err = parse_legacy_wordcount("word count: und: 1; : 2").unwrap_err();
        assert!(matches!(err, LegacyParseError::EmptyTerm { .. }), "{err:?}");
    }

    #[test]
    fn offsets_are_character_based_not_byte_based() {
        // "daß" takes 4 bytes but 3 characters
        let line = "word count: daß: 1; durch: oops";
        let err = parse_legacy_wordcount(line).unwrap_err();
        let LegacyParseError::InvalidCount { count, offset } = err else {
            panic!("unexpected {err:?}");
        };
        assert_eq!(count, "oops");
        assert_eq!(line.chars().skip(offset).collect::<String>(), "oops");
    }

    #[test]
    fn duplicate_terms_are_rejected() {
        let err = parse_legacy_wordcount("word count: und: 1; und: 2").unwrap_err();
        assert!(matches!(err, LegacyParseError::DuplicateTerm { .. }));
    }

    #[test]
    fn formats_sorted_by_ascending_count() {
        let mut counts = BTreeMap::new();
        counts.insert(tok("und"), 101_250_806u64);
        counts.insert(tok("daß"), 7_990_333);
        counts.insert(tok("durch"), 8_250_898);
        assert_eq!(
            format_legacy_wordcount(&counts),
            "word count: daß: 7990333; durch: 8250898; und: 101250806"
        );
    }

    #[test]
    fn empty_map_formats_to_bare_prefix() {
        let line = format_legacy_wordcount(&BTreeMap::new());
        assert_eq!(parse_legacy_wordcount(&line).unwrap(), BTreeMap::new());
    }
}
