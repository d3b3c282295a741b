//! Counting over local files and directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{CountQuery, CountResult, CountSource, CountTable, ProviderError};
use crate::ingest::{read_text_file, DecodeStats, TextEncoding};
use crate::tokenizer::{count_text, merge, FrequencyTable};

/// Expands each path (file or directory, recursively) into a sorted file
/// list, then tokenizes and counts everything once.
///
/// Unreadable paths are collected and reported together.
pub fn scan_paths(
    paths: &[PathBuf],
    encoding: TextEncoding,
) -> Result<(FrequencyTable, DecodeStats), ProviderError> {
    let mut files = Vec::new();
    let mut bad = Vec::new();
    for path in paths {
        match expand_path(path) {
            Ok(mut found) => files.append(&mut found),
            Err(e) => bad.push((path.clone(), e)),
        }
    }
    if !bad.is_empty() {
        return Err(ProviderError::UnreadablePaths(bad));
    }
    files.sort();

    let scans: Vec<Result<(FrequencyTable, DecodeStats), (PathBuf, std::io::Error)>> = files
        .par_iter()
        .map(|file| {
            read_text_file(file, encoding)
                .map(|(text, stats)| (count_text(&text), stats))
                .map_err(|e| (file.clone(), e))
        })
        .collect();

    let mut tables = Vec::new();
    let mut stats = DecodeStats::default();
    let mut bad = Vec::new();
    for scan in scans {
        match scan {
            Ok((table, s)) => {
                tables.push(table);
                stats.absorb(s);
            }
            Err(e) => bad.push(e),
        }
    }
    if !bad.is_empty() {
        return Err(ProviderError::UnreadablePaths(bad));
    }
    Ok((merge(tables.iter()), stats))
}

/// Reads and decodes every file reachable from `paths` (sorted order),
/// joined with newlines so file boundaries always separate tokens.
pub fn read_corpus(
    paths: &[PathBuf],
    encoding: TextEncoding,
) -> Result<(String, DecodeStats), ProviderError> {
    let mut files = Vec::new();
    let mut bad = Vec::new();
    for path in paths {
        match expand_path(path) {
            Ok(mut found) => files.append(&mut found),
            Err(e) => bad.push((path.clone(), e)),
        }
    }
    if !bad.is_empty() {
        return Err(ProviderError::UnreadablePaths(bad));
    }
    files.sort();
    let mut text = String::new();
    let mut stats = DecodeStats::default();
    for file in files {
        match read_text_file(&file, encoding) {
            Ok((chunk, s)) => {
                if !text.is_empty() {
                    text.push('\n');
                }
                text.push_str(&chunk);
                stats.absorb(s);
            }
            Err(e) => return Err(ProviderError::UnreadablePaths(vec![(file, e)])),
        }
    }
    Ok((text, stats))
}

fn expand_path(path: &Path) -> Result<Vec<PathBuf>, std::io::Error> {
    let meta = std::fs::metadata(path)?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(path) {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

/// A count source backed by a one-time scan of local text.
///
/// The whole corpus is tokenized and counted at construction; queries are
/// answered from the cached table, so identical queries always return
/// identical results.
#[derive(Debug)]
pub struct LocalSource {
    table: FrequencyTable,
    source_id: String,
    as_of: Option<String>,
    decode_stats: DecodeStats,
}

impl LocalSource {
    pub fn new(paths: &[PathBuf], encoding: TextEncoding) -> Result<Self, ProviderError> {
        let (table, decode_stats) = scan_paths(paths, encoding)?;
        let source_id = format!(
            "local:{}",
            paths
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(LocalSource {
            table,
            source_id,
            as_of: Some(chrono::Utc::now().to_rfc3339()),
            decode_stats,
        })
    }

    /// Builds a source from an already-counted table (used by tests and
    /// by the harness, which scans corpora itself).
    pub fn from_table(table: FrequencyTable, source_id: impl Into<String>) -> Self {
        LocalSource {
            table,
            source_id: source_id.into(),
            as_of: None,
            decode_stats: DecodeStats::default(),
        }
    }

    pub fn table(&self) -> &FrequencyTable {
        &self.table
    }

    pub fn decode_stats(&self) -> DecodeStats {
        self.decode_stats
    }

    /// Dumps the full count table, e.g. to archive a scan as a table file.
    pub fn dump(&self) -> CountTable {
        let counts: BTreeMap<_, _> = self
            .table
            .counts()
            .iter()
            .map(|(t, c)| (t.clone(), *c))
            .collect();
        CountTable {
            counts,
            total_tokens: Some(self.table.total_tokens()),
            source_id: Some(self.source_id.clone()),
            as_of: self.as_of.clone(),
        }
    }
}

impl CountSource for LocalSource {
    fn get_counts(&self, query: &CountQuery) -> Result<CountResult, ProviderError> {
        let counts: BTreeMap<_, _> = query
            .terms()
            .iter()
            .map(|t| (t.clone(), self.table.count(t)))
            .collect();
        Ok(CountResult {
            counts,
            total_tokens: Some(self.table.total_tokens()),
            source_id: self.source_id.clone(),
            as_of: self.as_of.clone(),
            unlisted: Default::default(),
        })
    }

    fn source_id(&self) -> String {
        self.source_id.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::Token;

    fn tok(w: &str) -> Token {
        Token::new(w).unwrap()
    }

    #[test]
    fn counts_with_explicit_zeros() {
        let source = LocalSource::from_table(count_text("a b a"), "test");
        let query = CountQuery::parse(&["a", "c"]).unwrap();
        let result = source.get_counts(&query).unwrap();
        assert_eq!(result.count(&tok("a")), 2);
        assert_eq!(result.count(&tok("c")), 0);
        assert_eq!(result.counts.len(), 2);
        assert_eq!(result.total_tokens, Some(3));
    }

    #[test]
    fn repeated_queries_are_identical() {
        let source = LocalSource::from_table(count_text("x y z x"), "test");
        let query = CountQuery::parse(&["x", "y", "q"]).unwrap();
        let first = source.get_counts(&query).unwrap();
        let second = source.get_counts(&query).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn scans_files_and_directories() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("one.txt"), "alpha beta alpha").unwrap();
        let sub = dir.path().join("sub");
        std::fs::create_dir(&sub).unwrap();
        std::fs::write(sub.join("two.txt"), "beta gamma").unwrap();
        let source = LocalSource::new(&[dir.path().to_path_buf()], TextEncoding::Utf8).unwrap();
        assert_eq!(source.table().count_str("alpha"), 2);
        assert_eq!(source.table().count_str("beta"), 2);
        assert_eq!(source.table().count_str("gamma"), 1);
        assert_eq!(source.table().total_tokens(), 5);
    }

    #[test]
    fn unreadable_paths_are_listed() {
        let err = LocalSource::new(
            &[PathBuf::from("/no/such/dir"), PathBuf::from("/also/missing")],
            TextEncoding::Latin1,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("/no/such/dir"), "{msg}");
        assert!(msg.contains("/also/missing"), "{msg}");
    }

    #[test]
    fn empty_directory_is_a_valid_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let source = LocalSource::new(&[dir.path().to_path_buf()], TextEncoding::Latin1).unwrap();
        assert_eq!(source.table().total_tokens(), 0);
    }
}
