//! Evaluation harness: runs the estimation pipeline against corpora with
//! known token counts and reports signed errors per language.
//!
//! Ground truth for "true size in words" is this crate's own tokenizer
//! applied to the test material; any other definition would make the
//! errors unmeasurable.

mod census;
mod report;

pub use census::{
    census_from_reports, census_growth, census_report, render_growth, CensusRow, CensusTable,
    GrowthRow,
};
pub use report::{
    group_thousands, signed_error_percent, DomainReport, DomainRow, ExperimentReport, ReportRow,
};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::estimator::{estimate, EstimateError, EstimateReport, DEFAULT_TRIM};
use crate::ingest::TextEncoding;
use crate::profile::{
    finalize_profile, train_candidates, train_profile_set, LanguageProfile, ProfileError,
    ProfileSet, TrainOptions, TrainingMetadata,
};
use crate::providers::{read_corpus, ProviderError};
use crate::tokenizer::{count_text, merge, FrequencyTable, Token};

/// Desk-scale guidance thresholds; smaller corpora work but get a warning.
pub const MIN_TRAIN_BYTES: usize = 500_000;
pub const MIN_TEST_BYTES: usize = 200_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("testbed declares no languages")]
    NoLanguages,
    #[error("duplicate language tag {0:?}")]
    DuplicateTag(String),
    #[error("language {0:?}: training and test paths overlap")]
    OverlappingTrainTest(String),
    #[error("sizes_kb must be non-empty and strictly ascending")]
    BadSizes,
    #[error("size sweep needs both sweep_language and sizes_kb in the spec")]
    MissingSweepConfig,
    #[error("sweep language {0:?} is not part of the testbed")]
    UnknownSweepLanguage(String),
    #[error("noise experiment needs noise paths in the spec")]
    MissingNoise,
    #[error("domain experiment needs a [domain] section in the spec")]
    MissingDomainSection,
    #[error("reference language {0:?} missing from census input")]
    ReferenceMissing(String),
}

/// One language of the testbed: where to train and where to test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSpec {
    pub tag: String,
    pub train: Vec<PathBuf>,
    pub test: Vec<PathBuf>,
}

/// The two-corpus comparison for domain-specific predictors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSpec {
    pub language: String,
    pub train_general: Vec<PathBuf>,
    pub train_narrow: Vec<PathBuf>,
    pub test_general: Vec<PathBuf>,
    pub test_narrow: Vec<PathBuf>,
}

/// A declarative testbed: languages, noise material, sweep configuration
/// and estimation options.
#[derive(Debug, Clone, PartialEq)]
pub struct TestbedSpec {
    pub languages: Vec<LanguageSpec>,
    pub noise: Vec<PathBuf>,
    pub sizes_kb: Vec<u64>,
    pub sweep_language: Option<String>,
    pub domain: Option<DomainSpec>,
    pub encoding: TextEncoding,
    pub trim: usize,
    pub pool: usize,
    pub retain: usize,
}

impl Default for TestbedSpec {
    fn default() -> Self {
        TestbedSpec {
            languages: Vec::new(),
            noise: Vec::new(),
            sizes_kb: Vec::new(),
            sweep_language: None,
            domain: None,
            encoding: TextEncoding::default(),
            trim: DEFAULT_TRIM,
            pool: TrainOptions::default().pool_size,
            retain: TrainOptions::default().retained_size,
        }
    }
}

// serde shape of the TOML manifest
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    version: u32,
    #[serde(default)]
    encoding: Option<String>,
    #[serde(default)]
    trim: Option<usize>,
    #[serde(default)]
    pool: Option<usize>,
    #[serde(default)]
    retain: Option<usize>,
    #[serde(default)]
    noise: Vec<String>,
    #[serde(default)]
    sizes_kb: Vec<u64>,
    #[serde(default)]
    sweep_language: Option<String>,
    #[serde(default)]
    language: Vec<RawLanguage>,
    #[serde(default)]
    domain: Option<RawDomain>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLanguage {
    tag: String,
    train: Vec<String>,
    test: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    language: String,
    train_general: Vec<String>,
    train_narrow: Vec<String>,
    test_general: Vec<String>,
    test_narrow: Vec<String>,
}

impl TestbedSpec {
    /// Loads and validates a TOML manifest; relative paths resolve against
    /// the manifest's directory.
    pub fn from_toml_file(path: &Path) -> Result<TestbedSpec, HarnessError> {
        let manifest_err = |message: String| HarnessError::Manifest {
            path: path.to_path_buf(),
            message,
        };
        let text =
            std::fs::read_to_string(path).map_err(|e| manifest_err(e.to_string()))?;
        let raw: RawManifest = toml::from_str(&text).map_err(|e| manifest_err(e.to_string()))?;
        if raw.version != 1 {
            return Err(manifest_err(format!("unsupported version {}", raw.version)));
        }
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &String| -> PathBuf {
            let pb = PathBuf::from(p);
            if pb.is_absolute() {
                pb
            } else {
                base.join(pb)
            }
        };
        let encoding = match &raw.encoding {
            Some(name) => name.parse::<TextEncoding>().map_err(manifest_err)?,
            None => TextEncoding::default(),
        };
        let defaults = TestbedSpec::default();
        let spec = TestbedSpec {
            languages: raw
                .language
                .iter()
                .map(|l| LanguageSpec {
                    tag: l.tag.clone(),
                    train: l.train.iter().map(resolve).collect(),
                    test: l.test.iter().map(resolve).collect(),
                })
                .collect(),
            noise: raw.noise.iter().map(resolve).collect(),
            sizes_kb: raw.sizes_kb,
            sweep_language: raw.sweep_language,
            domain: raw.domain.as_ref().map(|d| DomainSpec {
                language: d.language.clone(),
                train_general: d.train_general.iter().map(resolve).collect(),
                train_narrow: d.train_narrow.iter().map(resolve).collect(),
                test_general: d.test_general.iter().map(resolve).collect(),
                test_narrow: d.test_narrow.iter().map(resolve).collect(),
            }),
            encoding,
            trim: raw.trim.unwrap_or(defaults.trim),
            pool: raw.pool.unwrap_or(defaults.pool),
            retain: raw.retain.unwrap_or(defaults.retain),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.languages.is_empty() {
            return Err(HarnessError::NoLanguages);
        }
        let mut tags = std::collections::BTreeSet::new();
        for language in &self.languages {
            if !tags.insert(&language.tag) {
                return Err(HarnessError::DuplicateTag(language.tag.clone()));
            }
            let train: std::collections::BTreeSet<&PathBuf> = language.train.iter().collect();
            if language.test.iter().any(|p| train.contains(p)) {
                return Err(HarnessError::OverlappingTrainTest(language.tag.clone()));
            }
        }
        if !self.sizes_kb.is_empty() && !self.sizes_kb.windows(2).all(|w| w[0] < w[1]) {
            return Err(HarnessError::BadSizes);
        }
        if let Some(sweep) = &self.sweep_language {
            if !self.languages.iter().any(|l| &l.tag == sweep) {
                return Err(HarnessError::UnknownSweepLanguage(sweep.clone()));
            }
        }
        Ok(())
    }
}

struct TestMaterial {
    text: String,
    table: FrequencyTable,
}

/// A trained testbed, ready to run experiments. Training corpora are
/// scanned once at construction; test material is cached.
pub struct Harness {
    spec: TestbedSpec,
    profiles: ProfileSet,
    warnings: Vec<String>,
    tests: BTreeMap<String, Result<TestMaterial, String>>,
}

impl Harness {
    pub fn new(spec: TestbedSpec) -> Result<Harness, HarnessError> {
        spec.validate()?;
        let encoding = spec.encoding;

        // train: fatal on failure (experiments need the profiles)
        let train_scans: Vec<(String, Result<(String, usize), ProviderError>)> = spec
            .languages
            .par_iter()
            .map(|language| {
                let scan = read_corpus(&language.train, encoding).map(|(text, _)| {
                    let bytes = text.len();
                    (text, bytes)
                });
                (language.tag.clone(), scan)
            })
            .collect();

        let mut warnings = Vec::new();
        let mut train_tables = BTreeMap::new();
        for (tag, scan) in train_scans {
            let (text, bytes) = scan.map_err(HarnessError::Provider)?;
            if bytes < MIN_TRAIN_BYTES {
                warnings.push(format!(
                    "{tag}: training material is {bytes} bytes, below the recommended {MIN_TRAIN_BYTES}"
                ));
            }
            train_tables.insert(tag, count_text(&text));
        }

        let options = TrainOptions {
            pool_size: spec.pool,
            retained_size: spec.retain,
        };
        let (profiles, training_warnings) = train_profile_set(&train_tables, &options)?;
        warnings.extend(training_warnings.iter().map(|w| w.to_string()));

        // test: per-language failures become error rows later
        let test_scans: Vec<(String, Result<TestMaterial, String>)> = spec
            .languages
            .par_iter()
            .map(|language| {
                let scan = read_corpus(&language.test, encoding)
                    .map(|(text, _)| TestMaterial {
                        table: count_text(&text),
                        text,
                    })
                    .map_err(|e| e.to_string());
                (language.tag.clone(), scan)
            })
            .collect();
        let mut tests = BTreeMap::new();
        for (tag, scan) in test_scans {
            if let Ok(material) = &scan {
                if material.text.len() < MIN_TEST_BYTES {
                    warnings.push(format!(
                        "{tag}: test material is {} bytes, below the recommended {MIN_TEST_BYTES}",
                        material.text.len()
                    ));
                }
            }
            tests.insert(tag, scan);
        }

        Ok(Harness {
            spec,
            profiles,
            warnings,
            tests,
        })
    }

    pub fn profiles(&self) -> &ProfileSet {
        &self.profiles
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn spec(&self) -> &TestbedSpec {
        &self.spec
    }

    fn estimate_against(
        &self,
        profile: &LanguageProfile,
        table: &FrequencyTable,
    ) -> Result<EstimateReport, EstimateError> {
        let counts: BTreeMap<Token, u64> = profile
            .words()
            .map(|w| (w.clone(), table.count(w)))
            .collect();
        estimate(profile, &counts, self.spec.trim)
    }

    fn row_for(
        &self,
        tag: &str,
        table_for_truth: &FrequencyTable,
        mixture: &FrequencyTable,
    ) -> ReportRow {
        let profile = &self.profiles.profiles[tag];
        match self.estimate_against(profile, mixture) {
            Ok(report) => ReportRow::measured(
                tag,
                table_for_truth.total_tokens(),
                report.estimate,
                report.estimate_rounded,
            ),
            Err(e) => ReportRow::failed(tag, e.to_string()),
        }
    }

    /// Experiment 1: each language estimated against its own held-out
    /// material.
    pub fn experiment_monolingual(&self) -> ExperimentReport {
        let mut rows = Vec::new();
        for tag in self.profiles.profiles.keys() {
            match &self.tests[tag] {
                Ok(material) => rows.push(self.row_for(tag, &material.table, &material.table)),
                Err(e) => rows.push(ReportRow::failed(tag, e.clone())),
            }
        }
        ExperimentReport::new("monolingual", rows)
    }

    fn mixed_table(&self) -> FrequencyTable {
        merge(
            self.tests
                .values()
                .filter_map(|t| t.as_ref().ok())
                .map(|m| &m.table),
        )
    }

    /// Experiment 2: all test material concatenated; each language's true
    /// count is still its own material's token count.
    pub fn experiment_mixed(&self) -> ExperimentReport {
        let mixture = self.mixed_table();
        let rows = self.rows_against_mixture(&mixture);
        ExperimentReport::new("mixed", rows)
    }

    fn rows_against_mixture(&self, mixture: &FrequencyTable) -> Vec<ReportRow> {
        self.profiles
            .profiles
            .keys()
            .map(|tag| match &self.tests[tag] {
                Ok(material) => self.row_for(tag, &material.table, mixture),
                Err(e) => ReportRow::failed(tag, e.clone()),
            })
            .collect()
    }

    /// Experiment 3: the mixed corpus plus out-of-family noise material.
    /// Each row carries its error shift against the plain mixed run.
    pub fn experiment_noise(&self) -> Result<ExperimentReport, HarnessError> {
        if self.spec.noise.is_empty() {
            return Err(HarnessError::MissingNoise);
        }
        let (noise_text, _) = read_corpus(&self.spec.noise, self.spec.encoding)?;
        let noise_table = count_text(&noise_text);
        let mixture = merge([&self.mixed_table(), &noise_table]);

        let mixed = self.experiment_mixed();
        let mut rows = self.rows_against_mixture(&mixture);
        for row in &mut rows {
            let baseline = mixed
                .row(&row.language)
                .and_then(|r| r.signed_error_percent);
            row.delta_vs_mixed_percent = match (row.signed_error_percent, baseline) {
                (Some(now), Some(before)) => Some(now - before),
                _ => None,
            };
        }
        Ok(ExperimentReport::new("noise", rows))
    }

    /// The size sweep: the sweep language's test material truncated to each
    /// configured size, mixed into the other languages' material.
    pub fn experiment_size_sweep(&self) -> Result<Vec<ExperimentReport>, HarnessError> {
        let target = self
            .spec
            .sweep_language
            .as_ref()
            .ok_or(HarnessError::MissingSweepConfig)?;
        if self.spec.sizes_kb.is_empty() {
            return Err(HarnessError::MissingSweepConfig);
        }
        let material = match &self.tests[target] {
            Ok(m) => m,
            Err(e) => {
                return Err(HarnessError::Provider(ProviderError::Io {
                    path: PathBuf::from(target),
                    source: std::io::Error::other(e.clone()),
                }))
            }
        };
        let background = merge(
            self.tests
                .iter()
                .filter(|(tag, _)| tag != &target)
                .filter_map(|(_, t)| t.as_ref().ok())
                .map(|m| &m.table),
        );

        let mut reports = Vec::new();
        for &size_kb in &self.spec.sizes_kb {
            let requested = size_kb as usize * 1024;
            let truncated_text = truncate_at_token_boundary(&material.text, requested);
            let truncated = count_text(truncated_text);
            let mixture = merge([&background, &truncated]);
            let mut row = self.row_for(target, &truncated, &mixture);
            row.size_kb = Some(size_kb);
            if requested > material.text.len() {
                row.flag = Some(format!(
                    "requested {size_kb} KB but only {} KB available",
                    material.text.len() / 1024
                ));
            }
            reports.push(ExperimentReport::new(
                format!("size-sweep {target} {size_kb} KB"),
                vec![row],
            ));
        }
        Ok(reports)
    }

    /// Domain comparison: predictors from two training corpora of the same
    /// language, each evaluated on both test genres.
    pub fn experiment_domain(&self) -> Result<DomainReport, HarnessError> {
        let domain = self
            .spec
            .domain
            .as_ref()
            .ok_or(HarnessError::MissingDomainSection)?;
        let options = TrainOptions {
            pool_size: self.spec.pool,
            retained_size: self.spec.retain,
        };
        let general = self.train_single(&domain.language, &domain.train_general, &options)?;
        let narrow = self.train_single(&domain.language, &domain.train_narrow, &options)?;
        let (test_general_text, _) = read_corpus(&domain.test_general, self.spec.encoding)?;
        let (test_narrow_text, _) = read_corpus(&domain.test_narrow, self.spec.encoding)?;
        let tests = [
            ("general", count_text(&test_general_text)),
            ("narrow", count_text(&test_narrow_text)),
        ];

        let mut rows = Vec::new();
        for (profile_name, profile) in [("general", &general), ("narrow", &narrow)] {
            for (test_name, table) in &tests {
                let report = self.estimate_against(profile, table)?;
                rows.push(DomainRow {
                    predictors_from: profile_name.to_string(),
                    evaluated_on: test_name.to_string(),
                    true_word_count: table.total_tokens(),
                    estimate: report.estimate,
                    signed_error_percent: signed_error_percent(
                        report.estimate,
                        table.total_tokens(),
                    ),
                });
            }
        }
        Ok(DomainReport {
            language: domain.language.clone(),
            rows,
        })
    }

    fn train_single(
        &self,
        language: &str,
        paths: &[PathBuf],
        options: &TrainOptions,
    ) -> Result<LanguageProfile, HarnessError> {
        let (text, _) = read_corpus(paths, self.spec.encoding)?;
        let table = count_text(&text);
        let candidates = train_candidates(&table, options.pool_size)?;
        let meta = TrainingMetadata {
            training_total_tokens: table.total_tokens(),
            candidate_pool_size: options.pool_size,
        };
        let (profile, _) =
            finalize_profile(language, candidates.predictors, options.retained_size, meta)?;
        Ok(profile)
    }
}

/// Longest prefix of `text` not exceeding `max_bytes` that ends on a token
/// boundary (a token is never split; a partially included trailing token
/// is dropped).
pub fn truncate_at_token_boundary(text: &str, max_bytes: usize) -> &str {
    if max_bytes >= text.len() {
        return text;
    }
    let mut cut = max_bytes;
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    let splits_token = text[cut..]
        .chars()
        .next()
        .is_some_and(|c| c.is_alphabetic());
    if splits_token {
        while cut > 0 {
            let prev = text[..cut].chars().next_back().expect("cut > 0");
            if prev.is_alphabetic() {
                cut -= prev.len_utf8();
            } else {
                break;
            }
        }
    }
    &text[..cut]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::tokenize;

    #[test]
    fn truncation_never_splits_tokens() {
        let text = "alpha beta gamma delta";
        for max in 0..=text.len() + 2 {
            let prefix = truncate_at_token_boundary(text, max);
            assert!(prefix.len() <= max.max(0) || prefix == text);
            let full: Vec<_> = tokenize(text);
            let cut: Vec<_> = tokenize(prefix);
            assert!(cut.len() <= full.len());
            // every truncated token must be a complete token of the original
            for (a, b) in cut.iter().zip(&full) {
                assert_eq!(a, b, "max={max}");
            }
        }
    }

    #[test]
    fn truncation_keeps_complete_trailing_token() {
        // cut lands exactly on the space after "beta": keep both words
        let text = "alpha beta gamma";
        let prefix = truncate_at_token_boundary(text, 10);
        assert_eq!(prefix, "alpha beta");
    }

    #[test]
    fn truncation_handles_multibyte_letters() {
        let text = "daß für über alle";
        for max in 0..=text.len() {
            let prefix = truncate_at_token_boundary(text, max);
            assert!(text.is_char_boundary(prefix.len()));
            assert!(prefix.len() <= max || prefix == text);
        }
    }

    #[test]
    fn manifest_validation_rejects_overlap_and_bad_sizes() {
        let mut spec = TestbedSpec {
            languages: vec![LanguageSpec {
                tag: "aa".into(),
                train: vec![PathBuf::from("x.txt")],
                test: vec![PathBuf::from("x.txt")],
            }],
            ..TestbedSpec::default()
        };
        assert!(matches!(
            spec.validate(),
            Err(HarnessError::OverlappingTrainTest(_))
        ));
        spec.languages[0].test = vec![PathBuf::from("y.txt")];
        spec.sizes_kb = vec![100, 100];
        assert!(matches!(spec.validate(), Err(HarnessError::BadSizes)));
        spec.sizes_kb = vec![50, 100];
        spec.sweep_language = Some("zz".into());
        assert!(matches!(
            spec.validate(),
            Err(HarnessError::UnknownSweepLanguage(_))
        ));
        spec.sweep_language = Some("aa".into());
        spec.validate().unwrap();
    }

    #[test]
    fn manifest_toml_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("testbed.toml");
        std::fs::write(
            &manifest,
            r#"
version = 1
encoding = "utf8"
trim = 2
sizes_kb = [50, 100]
sweep_language = "aa"
noise = ["noise.txt"]

[[language]]
tag = "aa"
train = ["train/aa"]
test = ["test/aa.txt"]

[[language]]
tag = "bb"
train = ["train/bb"]
test = ["test/bb.txt"]

[domain]
language = "aa"
train_general = ["gen"]
train_narrow = ["narrow"]
test_general = ["tg.txt"]
test_narrow = ["tn.txt"]
"#,
        )
        .unwrap();
        let spec = TestbedSpec::from_toml_file(&manifest).unwrap();
        assert_eq!(spec.languages.len(), 2);
        assert_eq!(spec.encoding, TextEncoding::Utf8);
        assert_eq!(spec.languages[0].train[0], dir.path().join("train/aa"));
        assert_eq!(spec.noise[0], dir.path().join("noise.txt"));
        assert!(spec.domain.is_some());
        assert_eq!(spec.sweep_language.as_deref(), Some("aa"));
    }

    #[test]
    fn malformed_manifest_is_a_manifest_error() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("bad.toml");
        std::fs::write(&manifest, "version = 2\n").unwrap();
        assert!(matches!(
            TestbedSpec::from_toml_file(&manifest),
            Err(HarnessError::Manifest { .. })
        ));
        std::fs::write(&manifest, "not toml at all [[[").unwrap();
        assert!(matches!(
            TestbedSpec::from_toml_file(&manifest),
            Err(HarnessError::Manifest { .. })
        ));
    }
}
