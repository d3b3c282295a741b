//! Count acquisition: local corpus scans, precomputed count tables, a
//! remote count service client, and the matching server.
//!
//! Every source answers the same question through [`CountSource`]: how
//! often does each queried term occur, and how many tokens does the
//! source hold in total (when known). Results always cover exactly the
//! queried terms; a term the source has never seen comes back as an
//! explicit zero with an `unlisted` diagnostic flag, never as a missing key.

mod legacy;
mod local;
mod remote;
mod server;
mod table;

pub use legacy::{format_legacy_wordcount, parse_legacy_wordcount, LegacyParseError, LEGACY_PREFIX};
pub use local::{read_corpus, scan_paths, LocalSource};
pub use remote::{RemoteConfig, RemoteSource, ResponseFormat};
pub use server::{serve_counts, CountServer};
pub use table::{parse_table, read_table, write_table, write_table_to, CountTable, TableSource};

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::Token;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("count query contains no terms")]
    EmptyQuery,
    #[error("count query contains duplicate term {0:?}")]
    DuplicateTerm(String),
    #[error("invalid query term: {0}")]
    InvalidTerm(#[from] crate::tokenizer::TokenError),
    #[error("unreadable corpus paths: {}", format_path_errors(.0))]
    UnreadablePaths(Vec<(PathBuf, std::io::Error)>),
    #[error("{path}:{line}: {message}")]
    TableParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    LegacyParse(#[from] LegacyParseError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid endpoint {0:?}: expected http://host:port")]
    InvalidEndpoint(String),
    #[error("request to {url} failed after {attempts} attempts: {last_error}")]
    Network {
        url: String,
        attempts: u32,
        last_error: String,
    },
    #[error("{url} returned HTTP {status}: {body}")]
    HttpStatus {
        url: String,
        status: u16,
        body: String,
    },
    #[error("malformed response from {url}: {message}")]
    MalformedResponse { url: String, message: String },
    #[error("failed to bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
}

fn format_path_errors(errors: &[(PathBuf, std::io::Error)]) -> String {
    errors
        .iter()
        .map(|(p, e)| format!("{} ({e})", p.display()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A batch of distinct terms to count, typically all predictors of one
/// language in a single request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountQuery {
    terms: Vec<Token>,
}

impl CountQuery {
    pub fn new(terms: Vec<Token>) -> Result<Self, ProviderError> {
        if terms.is_empty() {
            return Err(ProviderError::EmptyQuery);
        }
        let mut seen = BTreeSet::new();
        for term in &terms {
            if !seen.insert(term) {
                return Err(ProviderError::DuplicateTerm(term.as_str().to_string()));
            }
        }
        Ok(CountQuery { terms })
    }

    pub fn parse(terms: &[&str]) -> Result<Self, ProviderError> {
        let tokens = terms
            .iter()
            .map(|t| Token::new(*t))
            .collect::<Result<Vec<_>, _>>()?;
        CountQuery::new(tokens)
    }

    pub fn terms(&self) -> &[Token] {
        &self.terms
    }
}

/// Counts for exactly the queried terms, zeros explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub counts: BTreeMap<Token, u64>,
    /// Total alphabetic tokens in the source, when the source knows it.
    pub total_tokens: Option<u64>,
    pub source_id: String,
    /// RFC 3339 timestamp of the underlying data, when known.
    pub as_of: Option<String>,
    /// Terms the source had no entry for (their count is reported as 0).
    pub unlisted: BTreeSet<Token>,
}

impl CountResult {
    /// Payload equality: same counts and same total, ignoring provenance.
    pub fn same_counts(&self, other: &CountResult) -> bool {
        self.counts == other.counts && self.total_tokens == other.total_tokens
    }

    pub fn count(&self, term: &Token) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }
}

/// Anything that can answer term-count queries.
///
/// Implementations are immutable once constructed: repeated identical
/// queries against an unchanged source return identical results.
pub trait CountSource: Send + Sync {
    fn get_counts(&self, query: &CountQuery) -> Result<CountResult, ProviderError>;

    /// Stable identifier for reports and diagnostics.
    fn source_id(&self) -> String;
}
