//! The term-count table file format: one `term<TAB>count` line per term,
//! sorted by term, with `#` header lines carrying provenance.
//!
//! ```text
//! # source_id: portal-feb2000
//! # as_of: 2000-02-28T00:00:00Z
//! # total_tokens: 1234567
//! daß	7990333
//! und	101250806
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use super::{CountQuery, CountResult, CountSource, ProviderError};
use crate::tokenizer::Token;

/// An archived set of term counts, the replayable form of an index scan.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountTable {
    pub counts: BTreeMap<Token, u64>,
    pub total_tokens: Option<u64>,
    pub source_id: Option<String>,
    pub as_of: Option<String>,
}

pub fn read_table(path: &Path) -> Result<CountTable, ProviderError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProviderError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text, &path.display().to_string())
}

/// Parses table text; `origin` names the source in errors (path or URL).
pub fn parse_table(text: &str, origin: &str) -> Result<CountTable, ProviderError> {
    let err = |line: usize, message: String| ProviderError::TableParse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut table = CountTable::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("source_id:") {
                table.source_id = Some(v.trim().to_string());
            } else if let Some(v) = comment.strip_prefix("as_of:") {
                table.as_of = Some(v.trim().to_string());
            } else if let Some(v) = comment.strip_prefix("total_tokens:") {
                let total: u64 = v.trim().parse().map_err(|_| {
                    err(line_no, format!("invalid total_tokens {:?}", v.trim()))
                })?;
                table.total_tokens = Some(total);
            }
            // other comments are tolerated and ignored
            continue;
        }
        let (term, count) = line
            .split_once('\t')
            .ok_or_else(|| err(line_no, format!("expected term<TAB>count, got {line:?}")))?;
        let term = Token::new(term).map_err(|e| err(line_no, e.to_string()))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| err(line_no, format!("invalid count {count:?}")))?;
        if table.counts.insert(term, count).is_some() {
            return Err(err(line_no, format!("duplicate term in table: {line:?}")));
        }
    }
    Ok(table)
}

/// Canonical serialization: provenance headers, then terms sorted ascending.
pub fn write_table(table: &CountTable) -> String {
    let mut out = String::new();
    if let Some(source_id) = &table.source_id {
        out.push_str(&format!("# source_id: {source_id}\n"));
    }
    if let Some(as_of) = &table.as_of {
        out.push_str(&format!("# as_of: {as_of}\n"));
    }
    if let Some(total) = table.total_tokens {
        out.push_str(&format!("# total_tokens: {total}\n"));
    }
    for (term, count) in &table.counts {
        out.push_str(&format!("{}\t{}\n", term.as_str(), count));
    }
    out
}

pub fn write_table_to(path: &Path, table: &CountTable) -> Result<(), ProviderError> {
    std::fs::write(path, write_table(table)).map_err(|source| ProviderError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A count source answering from an archived table. Terms absent from the
/// table count as zero and are flagged `unlisted`.
pub struct TableSource {
    table: CountTable,
    source_id: String,
}

impl TableSource {
    pub fn open(path: &Path) -> Result<Self, ProviderError> {
        let table = read_table(path)?;
        let source_id = table
            .source_id
            .clone()
            .unwrap_or_else(|| format!("table:{}", path.display()));
        Ok(TableSource { table, source_id })
    }

    pub fn from_table(table: CountTable, fallback_source_id: impl Into<String>) -> Self {
        let source_id = table
            .source_id
            .clone()
            .unwrap_or_else(|| fallback_source_id.into());
        TableSource { table, source_id }
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }
}

impl CountSource for TableSource {
    fn get_counts(&self, query: &CountQuery) -> Result<CountResult, ProviderError> {
        let mut counts = BTreeMap::new();
        let mut unlisted = std::collections::BTreeSet::new();
        for term in query.terms() {
            match self.table.counts.get(term) {
                Some(count) => {
                    counts.insert(term.clone(), *count);
                }
                None => {
                    counts.insert(term.clone(), 0);
                    unlisted.insert(term.clone());
                }
            }
        }
        Ok(CountResult {
            counts,
            total_tokens: self.table.total_tokens,
            source_id: self.source_id.clone(),
            as_of: self.table.as_of.clone(),
            unlisted,
        })
    }

    fn source_id(&self) -> String {
        self.source_id.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tok(w: &str) -> Token {
        Token::new(w).unwrap()
    }

    #[test]
    fn answers_from_the_table() {
        let table = parse_table("und\t101250806\n", "test").unwrap();
        let source = TableSource::from_table(table, "t");
        let result = source
            .get_counts(&CountQuery::parse(&["und"]).unwrap())
            .unwrap();
        assert_eq!(result.count(&tok("und")), 101_250_806);
        assert!(result.unlisted.is_empty());
    }

    #[test]
    fn absent_terms_are_zero_and_flagged() {
        let table = parse_table("und\t5\n", "test").unwrap();
        let source = TableSource::from_table(table, "t");
        let result = source
            .get_counts(&CountQuery::parse(&["und", "oder"]).unwrap())
            .unwrap();
        assert_eq!(result.count(&tok("oder")), 0);
        assert!(result.unlisted.contains(&tok("oder")));
        assert!(!result.unlisted.contains(&tok("und")));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = parse_table("und\t1\noder 2\n", "somewhere").unwrap_err();
        let ProviderError::TableParse { path, line, .. } = &err else {
            panic!("unexpected {err:?}");
        };
        assert_eq!(path, "somewhere");
        assert_eq!(*line, 2);

        let err = parse_table("und\tx\n", "t").unwrap_err();
        assert!(matches!(err, ProviderError::TableParse { line: 1, .. }));
    }

    #[test]
    fn duplicate_terms_are_rejected() {
        let err = parse_table("und\t1\nund\t2\n", "t").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn headers_round_trip() {
        let text = "# source_id: portal\n# as_of: 2000-02-28T00:00:00Z\n# total_tokens: 42\nund\t7\n";
        let table = parse_table(text, "t").unwrap();
        assert_eq!(table.source_id.as_deref(), Some("portal"));
        assert_eq!(table.as_of.as_deref(), Some("2000-02-28T00:00:00Z"));
        assert_eq!(table.total_tokens, Some(42));
        assert_eq!(write_table(&table), text);
    }

    proptest! {
        #[test]
        fn serialization_round_trips(
            entries in proptest::collection::btree_map("[a-zßüöä]{1,8}", 0u64..u64::MAX, 0..50),
            total in proptest::option::of(0u64..u64::MAX),
        ) {
            let table = CountTable {
                counts: entries.iter().map(|(w, c)| (tok(w), *c)).collect(),
                total_tokens: total,
                source_id: Some("prop".into()),
                as_of: None,
            };
            let text = write_table(&table);
            let reread = parse_table(&text, "prop").unwrap();
            prop_assert_eq!(&reread, &table);
            // writing the parsed form is a fixpoint (canonical form)
            prop_assert_eq!(write_table(&reread), text);
        }
    }
}
