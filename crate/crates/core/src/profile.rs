//! Per-language predictor profiles: training, cross-language
//! deduplication, and a versioned on-disk format.
//!
//! A profile is the artifact the estimator consumes: an ordered list of
//! high-frequency words with their relative frequencies in a training
//! corpus. Profiles trained together form a [`ProfileSet`] whose predictor
//! words are made mutually exclusive, so that each word identifies exactly
//! one language of the set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::{FrequencyTable, Token};

pub const DEFAULT_POOL_SIZE: usize = 100;
pub const DEFAULT_RETAINED_SIZE: usize = 20;
pub const PROFILE_FORMAT_VERSION: u32 = 1;
/// Below this many surviving predictors a profile is flagged: trimming two
/// from each end of the prediction list needs at least 2*trim + 1 entries.
pub const MIN_HEALTHY_PREDICTORS: usize = 5;

/// The set manifest file inside a profile directory.
pub const SET_MANIFEST_FILE: &str = "profileset.manifest";

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("empty training corpus")]
    EmptyTrainingCorpus,
    #[error("no predictors survived for language {0:?}")]
    NoSurvivingPredictors(String),
    #[error("pool size must be at least 1")]
    ZeroPoolSize,
    #[error("retained size must be at least 1")]
    ZeroRetainedSize,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: unknown profile format version {version}")]
    UnknownFormatVersion { path: PathBuf, version: u32 },
    #[error("profile for {language:?} is invalid: {message}")]
    Invalid { language: String, message: String },
}

/// One predictor word with its relative frequency in the training corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictor {
    pub word: Token,
    pub relative_frequency: f64,
}

/// A trained predictor list for one language, plus training metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub language: String,
    /// Sorted by descending relative frequency, ties by ascending word.
    pub predictors: Vec<Predictor>,
    pub training_total_tokens: u64,
    pub candidate_pool_size: usize,
    pub retained_size: usize,
    pub casefold: bool,
    pub format_version: u32,
}

impl LanguageProfile {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.predictors.iter().map(|p| &p.word)
    }

    pub fn frequency_of(&self, word: &Token) -> Option<f64> {
        self.predictors
            .iter()
            .find(|p| &p.word == word)
            .map(|p| p.relative_frequency)
    }

    /// Re-checks every structural invariant. Used by the loader and by
    /// anything that received a profile from outside.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let invalid = |message: String| ProfileError::Invalid {
            language: self.language.clone(),
            message,
        };
        if self.language.is_empty() {
            return Err(invalid("empty language tag".into()));
        }
        if self.predictors.is_empty() {
            return Err(ProfileError::NoSurvivingPredictors(self.language.clone()));
        }
        if self.training_total_tokens == 0 {
            return Err(invalid("training_total_tokens must be positive".into()));
        }
        if self.candidate_pool_size == 0 {
            return Err(ProfileError::ZeroPoolSize);
        }
        if self.retained_size == 0 {
            return Err(ProfileError::ZeroRetainedSize);
        }
        let mut sum = 0.0;
        for p in &self.predictors {
            if !(p.relative_frequency > 0.0 && p.relative_frequency <= 1.0) {
                return Err(invalid(format!(
                    "predictor {:?} has relative frequency {} outside (0, 1]",
                    p.word.as_str(),
                    p.relative_frequency
                )));
            }
            sum += p.relative_frequency;
        }
        if sum >= 1.0 {
            return Err(invalid(format!(
                "predictor frequencies sum to {sum}, expected < 1"
            )));
        }
        let mut seen = BTreeSet::new();
        for p in &self.predictors {
            if !seen.insert(&p.word) {
                return Err(invalid(format!("duplicate predictor word {:?}", p.word.as_str())));
            }
        }
        for pair in self.predictors.windows(2) {
            if !predictor_order_ok(&pair[0], &pair[1]) {
                return Err(invalid(format!(
                    "predictors out of order: {:?} ({}) before {:?} ({})",
                    pair[0].word.as_str(),
                    pair[0].relative_frequency,
                    pair[1].word.as_str(),
                    pair[1].relative_frequency
                )));
            }
        }
        Ok(())
    }
}

fn predictor_order_ok(a: &Predictor, b: &Predictor) -> bool {
    a.relative_frequency > b.relative_frequency
        || (a.relative_frequency == b.relative_frequency && a.word < b.word)
}

fn sort_predictors(predictors: &mut [Predictor]) {
    predictors.sort_by(|a, b| {
        b.relative_frequency
            .partial_cmp(&a.relative_frequency)
            .expect("relative frequencies are finite")
            .then_with(|| a.word.cmp(&b.word))
    });
}

/// A family of profiles trained together. When `dedup_applied` is set, no
/// word appears in the predictor list of more than one member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub profiles: BTreeMap<String, LanguageProfile>,
    pub dedup_applied: bool,
}

impl ProfileSet {
    pub fn get(&self, language: &str) -> Option<&LanguageProfile> {
        self.profiles.get(language)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.profiles.keys().map(String::as_str)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        for (tag, profile) in &self.profiles {
            profile.validate()?;
            if tag != &profile.language {
                return Err(ProfileError::Invalid {
                    language: profile.language.clone(),
                    message: format!("registered under mismatching tag {tag:?}"),
                });
            }
        }
        if self.dedup_applied {
            let mut owner: BTreeMap<&Token, &str> = BTreeMap::new();
            for (tag, profile) in &self.profiles {
                for p in &profile.predictors {
                    if let Some(other) = owner.insert(&p.word, tag) {
                        return Err(ProfileError::Invalid {
                            language: tag.clone(),
                            message: format!(
                                "word {:?} also appears in profile {other:?} although dedup_applied is set",
                                p.word.as_str()
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Non-fatal findings produced while training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrainingWarning {
    /// The corpus had fewer distinct tokens than the requested pool size.
    CandidateShortfall {
        language: String,
        available: usize,
        requested: usize,
    },
    /// Fewer predictors survived than the estimator needs for healthy trimming.
    FewPredictors { language: String, surviving: usize },
}

impl fmt::Display for TrainingWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainingWarning::CandidateShortfall {
                language,
                available,
                requested,
            } => write!(
                f,
                "{language}: only {available} distinct tokens for a candidate pool of {requested}"
            ),
            TrainingWarning::FewPredictors {
                language,
                surviving,
            } => write!(
                f,
                "{language}: only {surviving} predictors survived; estimates need at least {MIN_HEALTHY_PREDICTORS} for full trimming"
            ),
        }
    }
}

/// The candidate pool for one language: the most frequent tokens with
/// their relative frequencies, before cross-language deduplication.
#[derive(Debug, Clone)]
pub struct CandidateList {
    pub predictors: Vec<Predictor>,
    /// Set when fewer distinct tokens existed than were requested.
    pub shortfall: bool,
}

/// Extracts the `pool_size` most frequent tokens with relative frequency
/// `count / total_tokens`, sorted by descending frequency (ties by word).
pub fn train_candidates(
    table: &FrequencyTable,
    pool_size: usize,
) -> Result<CandidateList, ProfileError> {
    if pool_size == 0 {
        return Err(ProfileError::ZeroPoolSize);
    }
    if table.total_tokens() == 0 {
        return Err(ProfileError::EmptyTrainingCorpus);
    }
    let total = table.total_tokens() as f64;
    let mut predictors: Vec<Predictor> = table
        .counts()
        .iter()
        .map(|(token, count)| Predictor {
            word: token.clone(),
            relative_frequency: *count as f64 / total,
        })
        .collect();
    sort_predictors(&mut predictors);
    let shortfall = predictors.len() < pool_size;
    predictors.truncate(pool_size);
    Ok(CandidateList {
        predictors,
        shortfall,
    })
}

/// Removes every word that appears in more than one candidate list from
/// all lists it appears in. Frequencies and the relative order of the
/// survivors are untouched.
pub fn deduplicate(
    candidate_lists: &BTreeMap<String, Vec<Predictor>>,
) -> BTreeMap<String, Vec<Predictor>> {
    let mut occurrences: BTreeMap<&Token, usize> = BTreeMap::new();
    for list in candidate_lists.values() {
        for p in list {
            *occurrences.entry(&p.word).or_insert(0) += 1;
        }
    }
    candidate_lists
        .iter()
        .map(|(language, list)| {
            let kept: Vec<Predictor> = list
                .iter()
                .filter(|p| occurrences[&p.word] == 1)
                .cloned()
                .collect();
            (language.clone(), kept)
        })
        .collect()
}

/// Training metadata carried into the finished profile.
#[derive(Debug, Clone, Copy)]
pub struct TrainingMetadata {
    pub training_total_tokens: u64,
    pub candidate_pool_size: usize,
}

/// Truncates a deduplicated candidate list to `retained_size` predictors
/// and stamps the metadata. Warns when too few predictors survive.
pub fn finalize_profile(
    language: &str,
    deduped: Vec<Predictor>,
    retained_size: usize,
    meta: TrainingMetadata,
) -> Result<(LanguageProfile, Vec<TrainingWarning>), ProfileError> {
    if retained_size == 0 {
        return Err(ProfileError::ZeroRetainedSize);
    }
    if deduped.is_empty() {
        return Err(ProfileError::NoSurvivingPredictors(language.to_string()));
    }
    let mut predictors = deduped;
    predictors.truncate(retained_size);
    let mut warnings = Vec::new();
    if predictors.len() < MIN_HEALTHY_PREDICTORS {
        warnings.push(TrainingWarning::FewPredictors {
            language: language.to_string(),
            surviving: predictors.len(),
        });
    }
    let profile = LanguageProfile {
        language: language.to_string(),
        predictors,
        training_total_tokens: meta.training_total_tokens,
        candidate_pool_size: meta.candidate_pool_size,
        retained_size,
        casefold: true,
        format_version: PROFILE_FORMAT_VERSION,
    };
    profile.validate()?;
    Ok((profile, warnings))
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub pool_size: usize,
    pub retained_size: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            pool_size: DEFAULT_POOL_SIZE,
            retained_size: DEFAULT_RETAINED_SIZE,
        }
    }
}

/// The whole training pipeline for a family of languages: candidate pools,
/// joint deduplication, then per-language retention.
pub fn train_profile_set(
    tables: &BTreeMap<String, FrequencyTable>,
    options: &TrainOptions,
) -> Result<(ProfileSet, Vec<TrainingWarning>), ProfileError> {
    let mut warnings = Vec::new();
    let mut candidates = BTreeMap::new();
    for (language, table) in tables {
        let list = train_candidates(table, options.pool_size).map_err(|e| match e {
            ProfileError::EmptyTrainingCorpus => {
                ProfileError::NoSurvivingPredictors(language.clone())
            }
            other => other,
        })?;
        if list.shortfall {
            warnings.push(TrainingWarning::CandidateShortfall {
                language: language.clone(),
                available: list.predictors.len(),
                requested: options.pool_size,
            });
        }
        candidates.insert(language.clone(), list.predictors);
    }
    let deduped = deduplicate(&candidates);
    let mut profiles = BTreeMap::new();
    for (language, list) in deduped {
        let meta = TrainingMetadata {
            training_total_tokens: tables[&language].total_tokens(),
            candidate_pool_size: options.pool_size,
        };
        let (profile, mut w) = finalize_profile(&language, list, options.retained_size, meta)?;
        warnings.append(&mut w);
        profiles.insert(language, profile);
    }
    Ok((
        ProfileSet {
            profiles,
            dedup_applied: true,
        },
        warnings,
    ))
}

// ---------------------------------------------------------------------------
// On-disk format
//
// A profile file is line-oriented UTF-8: six tab-separated header lines in
// fixed order, then one `word<TAB>frequency` line per predictor.
//
//     version      1
//     language     de
//     total_tokens 1000000
//     casefold     true
//     pool         100
//     retain       20
//     und          0.0289237000
//     ...
//
// Frequencies are written with at least ten significant digits and always
// re-parse to the exact same f64.
// ---------------------------------------------------------------------------

/// Formats a relative frequency as a plain decimal that round-trips
/// exactly and carries at least ten significant digits.
pub fn format_frequency(value: f64) -> String {
    let shortest = format!("{value}");
    if significant_digits(&shortest) >= 10 || shortest.contains(['e', 'E']) {
        return shortest;
    }
    let mut s = shortest;
    if !s.contains('.') {
        s.push('.');
    }
    while significant_digits(&s) < 10 {
        s.push('0');
    }
    s
}

fn significant_digits(decimal: &str) -> usize {
    let digits: String = decimal.chars().filter(|c| c.is_ascii_digit()).collect();
    let stripped = digits.trim_start_matches('0');
    stripped.len()
}

pub fn save_profile(profile: &LanguageProfile, path: &Path) -> Result<(), ProfileError> {
    profile.validate()?;
    let mut out = String::new();
    out.push_str(&format!("version\t{}\n", profile.format_version));
    out.push_str(&format!("language\t{}\n", profile.language));
    out.push_str(&format!("total_tokens\t{}\n", profile.training_total_tokens));
    out.push_str(&format!("casefold\t{}\n", profile.casefold));
    out.push_str(&format!("pool\t{}\n", profile.candidate_pool_size));
    out.push_str(&format!("retain\t{}\n", profile.retained_size));
    for p in &profile.predictors {
        out.push_str(&format!(
            "{}\t{}\n",
            p.word.as_str(),
            format_frequency(p.relative_frequency)
        ));
    }
    write_atomically(path, out.as_bytes())
}

pub fn load_profile(path: &Path) -> Result<LanguageProfile, ProfileError> {
    let text = fs::read_to_string(path).map_err(|source| ProfileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_profile(&text, path)
}

fn parse_profile(text: &str, path: &Path) -> Result<LanguageProfile, ProfileError> {
    let err = |line: usize, message: String| ProfileError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let mut header = |key: &'static str| -> Result<(usize, String), ProfileError> {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing {key:?} header line")))?;
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| err(idx + 1, format!("expected {key:?} header, got {line:?}")))?;
        if k != key {
            return Err(err(idx + 1, format!("expected {key:?} header, got {k:?}")));
        }
        Ok((idx + 1, v.trim().to_string()))
    };

    let (line_no, version) = header("version")?;
    let version: u32 = version
        .parse()
        .map_err(|_| err(line_no, format!("invalid version {version:?}")))?;
    if version != PROFILE_FORMAT_VERSION {
        return Err(ProfileError::UnknownFormatVersion {
            path: path.to_path_buf(),
            version,
        });
    }
    let (_, language) = header("language")?;
    let (line_no, total) = header("total_tokens")?;
    let training_total_tokens: u64 = total
        .parse()
        .map_err(|_| err(line_no, format!("invalid total_tokens {total:?}")))?;
    let (line_no, casefold) = header("casefold")?;
    let casefold: bool = casefold
        .parse()
        .map_err(|_| err(line_no, format!("invalid casefold flag {casefold:?}")))?;
    let (line_no, pool) = header("pool")?;
    let candidate_pool_size: usize = pool
        .parse()
        .map_err(|_| err(line_no, format!("invalid pool size {pool:?}")))?;
    let (line_no, retain) = header("retain")?;
    let retained_size: usize = retain
        .parse()
        .map_err(|_| err(line_no, format!("invalid retained size {retain:?}")))?;

    let mut predictors = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (word, freq) = line
            .split_once('\t')
            .ok_or_else(|| err(idx + 1, format!("expected word<TAB>frequency, got {line:?}")))?;
        let word = Token::new(word).map_err(|e| err(idx + 1, e.to_string()))?;
        let relative_frequency: f64 = freq
            .trim()
            .parse()
            .map_err(|_| err(idx + 1, format!("invalid frequency {freq:?}")))?;
        predictors.push(Predictor {
            word,
            relative_frequency,
        });
    }

    let profile = LanguageProfile {
        language,
        predictors,
        training_total_tokens,
        candidate_pool_size,
        retained_size,
        casefold,
        format_version: version,
    };
    profile.validate()?;
    Ok(profile)
}

/// Saves every profile of the set into `dir` (one `<language>.profile`
/// file each) plus a manifest recording `dedup_applied`.
pub fn save_profile_set(set: &ProfileSet, dir: &Path) -> Result<(), ProfileError> {
    set.validate()?;
    fs::create_dir_all(dir).map_err(|source| ProfileError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut manifest = String::new();
    manifest.push_str(&format!("version\t{PROFILE_FORMAT_VERSION}\n"));
    manifest.push_str(&format!("dedup_applied\t{}\n", set.dedup_applied));
    for (language, profile) in &set.profiles {
        let file_name = format!("{language}.profile");
        save_profile(profile, &dir.join(&file_name))?;
        manifest.push_str(&format!("profile\t{language}\t{file_name}\n"));
    }
    write_atomically(&dir.join(SET_MANIFEST_FILE), manifest.as_bytes())
}

/// Loads a profile directory written by [`save_profile_set`] and
/// re-validates the whole set, including dedup disjointness.
pub fn load_profile_set(dir: &Path) -> Result<ProfileSet, ProfileError> {
    let manifest_path = dir.join(SET_MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|source| ProfileError::Io {
        path: manifest_path.clone(),
        source,
    })?;
    let err = |line: usize, message: String| ProfileError::Parse {
        path: manifest_path.clone(),
        line,
        message,
    };

    let mut version: Option<u32> = None;
    let mut dedup_applied: Option<bool> = None;
    let mut profiles = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            ["version", v] => {
                let v: u32 = v
                    .parse()
                    .map_err(|_| err(idx + 1, format!("invalid version {v:?}")))?;
                if v != PROFILE_FORMAT_VERSION {
                    return Err(ProfileError::UnknownFormatVersion {
                        path: manifest_path.clone(),
                        version: v,
                    });
                }
                version = Some(v);
            }
            ["dedup_applied", v] => {
                dedup_applied = Some(
                    v.parse()
                        .map_err(|_| err(idx + 1, format!("invalid dedup_applied flag {v:?}")))?,
                );
            }
            ["profile", language, file_name] => {
                let profile = load_profile(&dir.join(file_name))?;
                if &profile.language != language {
                    return Err(err(
                        idx + 1,
                        format!(
                            "manifest says {language:?} but {file_name} declares {:?}",
                            profile.language
                        ),
                    ));
                }
                profiles.insert(language.to_string(), profile);
            }
            _ => return Err(err(idx + 1, format!("unrecognized manifest line {line:?}"))),
        }
    }
    if version.is_none() {
        return Err(err(0, "missing version line".into()));
    }
    let set = ProfileSet {
        profiles,
        dedup_applied: dedup_applied
            .ok_or_else(|| err(0, "missing dedup_applied line".into()))?,
    };
    set.validate()?;
    Ok(set)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), ProfileError> {
    let io_err = |source: std::io::Error| ProfileError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(bytes).map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::{count_frequencies, count_text};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn tok(w: &str) -> Token {
        Token::new(w).unwrap()
    }

    fn table_from_counts(counts: &[(&str, u64)]) -> FrequencyTable {
        let mut tokens = Vec::new();
        for (word, count) in counts {
            for _ in 0..*count {
                tokens.push(tok(word));
            }
        }
        count_frequencies(tokens)
    }

    #[test]
    fn candidates_are_direct_ratios() {
        let table = table_from_counts(&[("a", 6), ("b", 3), ("c", 1)]);
        let list = train_candidates(&table, 2).unwrap();
        assert!(!list.shortfall);
        assert_eq!(list.predictors.len(), 2);
        assert_eq!(list.predictors[0].word, tok("a"));
        assert_eq!(list.predictors[0].relative_frequency, 0.6);
        assert_eq!(list.predictors[1].word, tok("b"));
        assert_eq!(list.predictors[1].relative_frequency, 0.3);
    }

    #[test]
    fn eight_per_thousand_is_point_zero_zero_eight() {
        let mut pairs = vec![("että", 8u64)];
        // pad distinct three-letter filler words to reach 1000 tokens total
        let fillers: Vec<String> = (0..992)
            .map(|i: u32| {
                let (a, b, c) = (i / 676, (i / 26) % 26, i % 26);
                [a, b, c]
                    .iter()
                    .map(|d| char::from(b'a' + *d as u8))
                    .collect()
            })
            .collect();
        let filler_refs: Vec<(&str, u64)> = fillers.iter().map(|w| (w.as_str(), 1)).collect();
        pairs.extend(filler_refs);
        let table = table_from_counts(&pairs);
        assert_eq!(table.total_tokens(), 1000);
        let list = train_candidates(&table, 5).unwrap();
        assert_eq!(list.predictors[0].word, tok("että"));
        assert_eq!(list.predictors[0].relative_frequency, 0.008);
    }

    #[test]
    fn empty_table_is_an_error() {
        let err = train_candidates(&FrequencyTable::default(), 10).unwrap_err();
        assert!(matches!(err, ProfileError::EmptyTrainingCorpus));
    }

    #[test]
    fn shortfall_flag_when_vocabulary_is_small() {
        let table = table_from_counts(&[("a", 2), ("b", 1)]);
        let list = train_candidates(&table, 10).unwrap();
        assert!(list.shortfall);
        assert_eq!(list.predictors.len(), 2);
    }

    // Independent selection oracle: repeatedly extract the maximum by
    // (count desc, word asc) instead of sorting.
    fn selection_oracle(table: &FrequencyTable, pool: usize) -> Vec<(Token, f64)> {
        let mut remaining: HashMap<Token, u64> = table.counts().clone();
        let total = table.total_tokens() as f64;
        let mut out = Vec::new();
        while out.len() < pool && !remaining.is_empty() {
            let best = remaining
                .iter()
                .max_by(|(wa, ca), (wb, cb)| ca.cmp(cb).then_with(|| wb.cmp(wa)))
                .map(|(w, _)| w.clone())
                .unwrap();
            let count = remaining.remove(&best).unwrap();
            out.push((best, count as f64 / total));
        }
        out
    }

    proptest! {
        #[test]
        fn candidates_match_selection_oracle(
            words in proptest::collection::btree_map("[a-z]{1,6}", 1u64..50, 1..40),
            pool in 1usize..30,
        ) {
            let pairs: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c)).collect();
            let table = table_from_counts(&pairs);
            let list = train_candidates(&table, pool).unwrap();
            let oracle = selection_oracle(&table, pool);
            let got: Vec<(Token, f64)> = list
                .predictors
                .iter()
                .map(|p| (p.word.clone(), p.relative_frequency))
                .collect();
            prop_assert_eq!(got, oracle);
        }

        #[test]
        fn relative_frequencies_are_scale_free(
            words in proptest::collection::btree_map("[a-z]{1,6}", 1u64..30, 1..20),
            scale in 2u64..9,
        ) {
            let pairs: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c)).collect();
            let scaled: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c * scale)).collect();
            let a = train_candidates(&table_from_counts(&pairs), 10).unwrap();
            let b = train_candidates(&table_from_counts(&scaled), 10).unwrap();
            for (pa, pb) in a.predictors.iter().zip(&b.predictors) {
                prop_assert_eq!(&pa.word, &pb.word);
                prop_assert_eq!(pa.relative_frequency, pb.relative_frequency);
            }
        }

        #[test]
        fn candidate_frequencies_sum_below_one(
            words in proptest::collection::btree_map("[a-z]{1,6}", 1u64..30, 2..30),
        ) {
            let pairs: Vec<(&str, u64)> = words.iter().map(|(w, c)| (w.as_str(), *c)).collect();
            let table = table_from_counts(&pairs);
            let list = train_candidates(&table, words.len().saturating_sub(1).max(1)).unwrap();
            let sum: f64 = list.predictors.iter().map(|p| p.relative_frequency).sum();
            prop_assert!(sum <= 1.0 + 1e-12);
        }
    }

    fn plist(pairs: &[(&str, f64)]) -> Vec<Predictor> {
        pairs
            .iter()
            .map(|(w, f)| Predictor {
                word: tok(w),
                relative_frequency: *f,
            })
            .collect()
    }

    #[test]
    fn shared_words_are_removed_from_every_list() {
        let mut lists = BTreeMap::new();
        lists.insert("fr".to_string(), plist(&[("que", 0.009), ("pour", 0.009)]));
        lists.insert("es".to_string(), plist(&[("que", 0.01), ("los", 0.008)]));
        let deduped = deduplicate(&lists);
        assert_eq!(deduped["fr"], plist(&[("pour", 0.009)]));
        assert_eq!(deduped["es"], plist(&[("los", 0.008)]));
    }

    #[test]
    fn disjoint_lists_pass_through() {
        let mut lists = BTreeMap::new();
        lists.insert("a".to_string(), plist(&[("uno", 0.02), ("dos", 0.01)]));
        lists.insert("b".to_string(), plist(&[("eins", 0.02), ("zwei", 0.01)]));
        let deduped = deduplicate(&lists);
        assert_eq!(deduped, lists);
    }

    proptest! {
        #[test]
        fn dedup_matches_pairwise_intersection_oracle(
            raw in proptest::collection::btree_map(
                "[a-c]",
                proptest::collection::btree_set("[a-z]{1,3}", 1..12),
                2..4,
            ),
        ) {
            let lists: BTreeMap<String, Vec<Predictor>> = raw
                .iter()
                .map(|(lang, words)| {
                    let mut preds = plist(
                        &words.iter().enumerate()
                            .map(|(i, w)| (w.as_str(), 0.5 / (i + 1) as f64))
                            .collect::<Vec<_>>(),
                    );
                    sort_predictors(&mut preds);
                    (lang.clone(), preds)
                })
                .collect();

            // oracle: a word survives in its list iff it is in no other list
            let deduped = deduplicate(&lists);
            for (lang, list) in &lists {
                let mut expected = Vec::new();
                for p in list {
                    let shared = lists.iter().any(|(other, olist)| {
                        other != lang && olist.iter().any(|op| op.word == p.word)
                    });
                    if !shared {
                        expected.push(p.clone());
                    }
                }
                prop_assert_eq!(&deduped[lang], &expected);
            }

            // pairwise disjointness of survivors
            let langs: Vec<&String> = deduped.keys().collect();
            for i in 0..langs.len() {
                for j in (i + 1)..langs.len() {
                    let a: BTreeSet<&Token> = deduped[langs[i]].iter().map(|p| &p.word).collect();
                    let b: BTreeSet<&Token> = deduped[langs[j]].iter().map(|p| &p.word).collect();
                    prop_assert!(a.is_disjoint(&b));
                }
            }
        }
    }

    fn meta() -> TrainingMetadata {
        TrainingMetadata {
            training_total_tokens: 10_000,
            candidate_pool_size: 100,
        }
    }

    #[test]
    fn finalize_truncates_to_retained_size() {
        let survivors: Vec<Predictor> = (0..30)
            .map(|i| Predictor {
                word: tok(&format!(
                    "{}{}",
                    char::from(b'a' + (i / 26) as u8),
                    char::from(b'a' + (i % 26) as u8)
                )),
                relative_frequency: 0.03 - i as f64 * 0.0001,
            })
            .collect();
        let (profile, warnings) = finalize_profile("xx", survivors.clone(), 20, meta()).unwrap();
        assert_eq!(profile.predictors.len(), 20);
        assert_eq!(profile.predictors[..], survivors[..20]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn finalize_keeps_short_lists_with_warning() {
        let survivors = plist(&[("alpha", 0.02), ("beta", 0.01), ("gamma", 0.005)]);
        let (profile, warnings) = finalize_profile("xx", survivors, 20, meta()).unwrap();
        assert_eq!(profile.predictors.len(), 3);
        assert_eq!(
            warnings,
            vec![TrainingWarning::FewPredictors {
                language: "xx".into(),
                surviving: 3
            }]
        );
    }

    #[test]
    fn finalize_rejects_empty_survivor_list() {
        let err = finalize_profile("xx", Vec::new(), 20, meta()).unwrap_err();
        assert!(matches!(err, ProfileError::NoSurvivingPredictors(l) if l == "xx"));
    }

    fn sample_profile() -> LanguageProfile {
        LanguageProfile {
            language: "xx".into(),
            predictors: plist(&[("alpha", 0.021), ("beta", 0.013), ("gamma", 0.0071)]),
            training_total_tokens: 123_456,
            candidate_pool_size: 100,
            retained_size: 20,
            casefold: true,
            format_version: PROFILE_FORMAT_VERSION,
        }
    }

    #[test]
    fn profile_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("xx.profile");
        let profile = sample_profile();
        save_profile(&profile, &path).unwrap();
        let loaded = load_profile(&path).unwrap();
        assert_eq!(loaded, profile);
    }

    #[test]
    fn zero_frequency_fails_to_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.profile");
        std::fs::write(
            &path,
            "version\t1\nlanguage\txx\ntotal_tokens\t10\ncasefold\ttrue\npool\t100\nretain\t20\nalpha\t0\n",
        )
        .unwrap();
        let err = load_profile(&path).unwrap_err();
        assert!(matches!(err, ProfileError::Invalid { .. }), "{err}");
    }

    #[test]
    fn unsorted_profile_names_the_offending_pair() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.profile");
        let profile = sample_profile();
        save_profile(&profile, &path).unwrap();
        // swap two predictor lines
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.swap(6, 7);
        std::fs::write(&path, lines.join("\n")).unwrap();
        let err = load_profile(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("out of order"), "{msg}");
        assert!(msg.contains("beta") && msg.contains("alpha"), "{msg}");
    }

    #[test]
    fn unknown_version_is_a_distinct_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v9.profile");
        std::fs::write(
            &path,
            "version\t9\nlanguage\txx\ntotal_tokens\t10\ncasefold\ttrue\npool\t100\nretain\t20\nalpha\t0.5\n",
        )
        .unwrap();
        let err = load_profile(&path).unwrap_err();
        assert!(matches!(err, ProfileError::UnknownFormatVersion { version: 9, .. }));
    }

    #[test]
    fn malformed_header_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.profile");
        std::fs::write(&path, "version\t1\nnot-a-header\n").unwrap();
        let err = load_profile(&path).unwrap_err();
        assert!(matches!(err, ProfileError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn profile_set_round_trips_with_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut tables = BTreeMap::new();
        tables.insert("aa".to_string(), count_text("uno dos uno tres uno dos cuatro"));
        tables.insert("bb".to_string(), count_text("eins zwei eins drei eins zwei vier"));
        let (set, warnings) = train_profile_set(
            &tables,
            &TrainOptions {
                pool_size: 10,
                retained_size: 4,
            },
        )
        .unwrap();
        assert!(!warnings.is_empty()); // short lists warn
        save_profile_set(&set, dir.path()).unwrap();
        let loaded = load_profile_set(dir.path()).unwrap();
        assert_eq!(loaded, set);
    }

    #[test]
    fn trained_set_is_deduplicated_and_disjoint() {
        let mut tables = BTreeMap::new();
        // "que" is frequent in both; it must vanish from both profiles
        tables.insert("fr".to_string(), count_text("que pour que dans que pour avec"));
        tables.insert("es".to_string(), count_text("que los que las que los por"));
        let (set, _) = train_profile_set(
            &tables,
            &TrainOptions {
                pool_size: 10,
                retained_size: 5,
            },
        )
        .unwrap();
        assert!(set.dedup_applied);
        assert!(set.profiles["fr"].frequency_of(&tok("que")).is_none());
        assert!(set.profiles["es"].frequency_of(&tok("que")).is_none());
        set.validate().unwrap();
    }

    #[test]
    fn frequency_formatting_round_trips_and_pads() {
        for &f in &[0.0056118, 0.02892370, 0.1, 1.0, 0.333333333333, 1e-7] {
            let s = format_frequency(f);
            assert_eq!(s.parse::<f64>().unwrap(), f, "{s}");
        }
        assert_eq!(format_frequency(0.0056118), "0.005611800000");
        assert!(significant_digits(&format_frequency(0.1)) >= 10);
    }

    proptest! {
        #[test]
        fn formatted_frequencies_reparse_exactly(raw in 1u64..u64::MAX / 2, total in 1u64..u64::MAX / 2) {
            let f = (raw % total.max(1)).max(1) as f64 / total.max(1) as f64;
            if f > 0.0 && f <= 1.0 {
                let s = format_frequency(f);
                prop_assert_eq!(s.parse::<f64>().unwrap(), f);
            }
        }
    }
}
