//! Client for a remote count service speaking the wire protocol of
//! [`super::serve_counts`], with retries and a per-request timeout.

use std::collections::BTreeMap;
use std::time::Duration;

use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};

use super::server::WireCounts;
use super::{parse_legacy_wordcount, CountQuery, CountResult, CountSource, ProviderError};
use crate::tokenizer::Token;

#[derive(Debug, Clone, Copy)]
pub struct RemoteConfig {
    /// Per-request timeout.
    pub timeout: Duration,
    /// Total attempts per query (first try included).
    pub attempts: u32,
    /// Base delay before the second attempt; doubles each retry.
    pub backoff: Duration,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            timeout: Duration::from_secs(10),
            attempts: 3,
            backoff: Duration::from_millis(100),
        }
    }
}

/// Which response codec to request from the server.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseFormat {
    #[default]
    Structured,
    /// The `word count: term: N; …` line. Carries no total-token count.
    Legacy,
}

pub struct RemoteSource {
    base: String,
    format: ResponseFormat,
    config: RemoteConfig,
    client: reqwest::blocking::Client,
}

impl RemoteSource {
    pub fn new(endpoint: &str) -> Result<Self, ProviderError> {
        Self::with_config(endpoint, RemoteConfig::default(), ResponseFormat::default())
    }

    pub fn with_config(
        endpoint: &str,
        config: RemoteConfig,
        format: ResponseFormat,
    ) -> Result<Self, ProviderError> {
        if !endpoint.starts_with("http://") && !endpoint.starts_with("https://") {
            return Err(ProviderError::InvalidEndpoint(endpoint.to_string()));
        }
        let base = endpoint.trim_end_matches('/').to_string();
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ProviderError::Network {
                url: base.clone(),
                attempts: 0,
                last_error: e.to_string(),
            })?;
        Ok(RemoteSource {
            base,
            format,
            config,
            client,
        })
    }

    fn query_url(&self, query: &CountQuery) -> String {
        let terms = query
            .terms()
            .iter()
            .map(|t| utf8_percent_encode(t.as_str(), NON_ALPHANUMERIC).to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut url = format!("{}/v1/counts?terms={terms}", self.base);
        if self.format == ResponseFormat::Legacy {
            url.push_str("&format=legacy");
        }
        url
    }

    /// One GET with retries; returns the response body on HTTP 200.
    fn fetch(&self, url: &str) -> Result<String, ProviderError> {
        let mut attempt_log: Vec<String> = Vec::new();
        for attempt in 0..self.config.attempts {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff * 2u32.pow(attempt - 1));
            }
            match self.client.get(url).send() {
                Ok(response) => {
                    let status = response.status();
                    let body = response.text().unwrap_or_default();
                    if status.is_success() {
                        return Ok(body);
                    }
                    if status.is_client_error() {
                        // definitive protocol error; retrying cannot help
                        return Err(ProviderError::HttpStatus {
                            url: url.to_string(),
                            status: status.as_u16(),
                            body,
                        });
                    }
                    attempt_log.push(format!("attempt {}: HTTP {status}", attempt + 1));
                }
                Err(e) => {
                    attempt_log.push(format!("attempt {}: {e}", attempt + 1));
                }
            }
        }
        Err(ProviderError::Network {
            url: url.to_string(),
            attempts: self.config.attempts,
            last_error: attempt_log.join("; "),
        })
    }

    fn result_from_counts(
        &self,
        query: &CountQuery,
        mut raw: BTreeMap<Token, u64>,
        total_tokens: Option<u64>,
        source_id: String,
        url: &str,
    ) -> Result<CountResult, ProviderError> {
        let mut counts = BTreeMap::new();
        let mut unlisted = std::collections::BTreeSet::new();
        for term in query.terms() {
            match raw.remove(term) {
                Some(count) => {
                    counts.insert(term.clone(), count);
                }
                None => {
                    counts.insert(term.clone(), 0);
                    unlisted.insert(term.clone());
                }
            }
        }
        if let Some((extra, _)) = raw.into_iter().next() {
            return Err(ProviderError::MalformedResponse {
                url: url.to_string(),
                message: format!("response contains unqueried term {:?}", extra.as_str()),
            });
        }
        Ok(CountResult {
            counts,
            total_tokens,
            source_id,
            as_of: None,
            unlisted,
        })
    }
}

impl CountSource for RemoteSource {
    fn get_counts(&self, query: &CountQuery) -> Result<CountResult, ProviderError> {
        let url = self.query_url(query);
        let body = self.fetch(&url)?;
        match self.format {
            ResponseFormat::Structured => {
                let wire: WireCounts =
                    serde_json::from_str(&body).map_err(|e| ProviderError::MalformedResponse {
                        url: url.clone(),
                        message: format!("{e} in body {body:?}"),
                    })?;
                let mut raw = BTreeMap::new();
                for (term, count) in wire.counts {
                    let token =
                        Token::new(term.as_str()).map_err(|e| ProviderError::MalformedResponse {
                            url: url.clone(),
                            message: e.to_string(),
                        })?;
                    raw.insert(token, count);
                }
                self.result_from_counts(query, raw, wire.total_tokens, wire.source_id, &url)
            }
            ResponseFormat::Legacy => {
                let raw = parse_legacy_wordcount(body.trim_end_matches(['\r', '\n']))?;
                let source_id = format!("remote:{}", self.base);
                self.result_from_counts(query, raw, None, source_id, &url)
            }
        }
    }

    fn source_id(&self) -> String {
        format!("remote:{}", self.base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_http_endpoints() {
        assert!(matches!(
            RemoteSource::new("ftp://example"),
            Err(ProviderError::InvalidEndpoint(_))
        ));
    }

    #[test]
    fn url_percent_encodes_non_ascii_terms() {
        let source = RemoteSource::new("http://localhost:1/").unwrap();
        let query = CountQuery::parse(&["daß", "und"]).unwrap();
        assert_eq!(
            source.query_url(&query),
            "http://localhost:1/v1/counts?terms=da%C3%9F,und"
        );
    }

    #[test]
    fn unreachable_endpoint_fails_after_all_attempts() {
        // port 1 is essentially never listening
        let config = RemoteConfig {
            timeout: Duration::from_millis(250),
            attempts: 3,
            backoff: Duration::from_millis(1),
        };
        let source =
            RemoteSource::with_config("http://127.0.0.1:1", config, ResponseFormat::Structured)
                .unwrap();
        let err = source
            .get_counts(&CountQuery::parse(&["und"]).unwrap())
            .unwrap_err();
        let ProviderError::Network {
            attempts,
            last_error,
            ..
        } = &err
        else {
            panic!("unexpected {err:?}");
        };
        assert_eq!(*attempts, 3);
        assert!(last_error.contains("attempt 3"), "{last_error}");
    }
}
