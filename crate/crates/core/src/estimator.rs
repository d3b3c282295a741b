//! Trimmed-mean word-count estimation.
//!
//! Each predictor word makes its own prediction of the corpus size:
//! its observed count divided by its relative frequency in the training
//! corpus. The highest and lowest predictions are discarded and the rest
//! averaged. Outliers — contaminated words, words shared with other
//! material, words whose usage shifted — land in the trimmed tails, which
//! is what makes the estimate robust.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{LanguageProfile, ProfileSet};
use crate::tokenizer::Token;

pub const DEFAULT_TRIM: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("profile {0:?} has no predictors")]
    EmptyPredictorList(String),
    #[error("predictor {word:?} has non-positive relative frequency {value}")]
    NonPositiveFrequency { word: String, value: f64 },
    #[error("counts missing for predictor words: {}", .0.join(", "))]
    MissingCounts(Vec<String>),
}

/// One predictor's contribution to an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorObservation {
    pub word: Token,
    pub relative_frequency: f64,
    pub observed_count: u64,
    /// `observed_count / relative_frequency`.
    pub prediction: f64,
}

/// The full outcome of estimating one (language, source) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub language: String,
    /// In profile order (descending relative frequency).
    pub observations: Vec<PredictorObservation>,
    pub requested_trim: usize,
    /// Predictions discarded from the low end. May be smaller than
    /// `requested_trim` when the predictor list is short.
    pub trimmed_low: usize,
    /// Predictions discarded from the high end.
    pub trimmed_high: usize,
    /// The predictions actually averaged, ascending.
    pub retained: Vec<f64>,
    pub estimate: f64,
    /// `estimate` rounded half away from zero.
    pub estimate_rounded: u64,
    /// Relative spread of the retained predictions, `(max - min) / median`.
    /// `None` when the median is zero but the spread is not.
    pub dispersion: Option<f64>,
}

impl EstimateReport {
    /// Observations ranked by (prediction, word) with their retained flag,
    /// the same ordering the trim step used.
    pub fn ranked(&self) -> Vec<(&PredictorObservation, bool)> {
        let order = rank_order(&self.observations);
        let n = order.len();
        order
            .into_iter()
            .enumerate()
            .map(|(pos, idx)| {
                let retained = pos >= self.trimmed_low && pos < n - self.trimmed_high;
                (&self.observations[idx], retained)
            })
            .collect()
    }

    /// Plain-text rendering: one predictor per line in ranked order, then
    /// the trim counts and the estimate.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("language: {}\n", self.language));
        let word_width = self
            .observations
            .iter()
            .map(|o| o.word.as_str().chars().count())
            .max()
            .unwrap_or(4)
            .max(4);
        out.push_str(&format!(
            "{:<word_width$}  {:>14}  {:>14}  {:>18}  retained\n",
            "word", "rel_frequency", "observed", "prediction"
        ));
        for (obs, retained) in self.ranked() {
            out.push_str(&format!(
                "{:<word_width$}  {:>14.10}  {:>14}  {:>18.1}  {}\n",
                obs.word.as_str(),
                obs.relative_frequency,
                obs.observed_count,
                obs.prediction,
                if retained { "yes" } else { "no" }
            ));
        }
        out.push_str(&format!(
            "trimmed: {} low, {} high (requested {})\n",
            self.trimmed_low, self.trimmed_high, self.requested_trim
        ));
        match self.dispersion {
            Some(d) => out.push_str(&format!("dispersion: {d:.4}\n")),
            None => out.push_str("dispersion: undefined\n"),
        }
        out.push_str(&format!(
            "estimate: {:.1} (rounded {})\n",
            self.estimate, self.estimate_rounded
        ));
        out
    }
}

/// Indices of `observations` sorted by (prediction, word) ascending;
/// the word tie-break makes trimming deterministic.
fn rank_order(observations: &[PredictorObservation]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..observations.len()).collect();
    order.sort_by(|&a, &b| {
        let oa = &observations[a];
        let ob = &observations[b];
        oa.prediction
            .partial_cmp(&ob.prediction)
            .expect("predictions are finite")
            .then_with(|| oa.word.cmp(&ob.word))
    });
    order
}

/// Scales one observed count into a corpus-size prediction.
pub fn predict_single(observed_count: u64, relative_frequency: f64) -> Result<f64, EstimateError> {
    if !(relative_frequency > 0.0) {
        return Err(EstimateError::NonPositiveFrequency {
            word: String::new(),
            value: relative_frequency,
        });
    }
    Ok(observed_count as f64 / relative_frequency)
}

/// Runs the full trimmed-mean estimate for one language.
///
/// `counts` must contain every predictor word of the profile; sources fill
/// zeros explicitly, so a missing key is a wiring error, not an absent word.
/// The requested `trim` shrinks when the list is too short, so at least one
/// prediction is always retained.
pub fn estimate(
    profile: &LanguageProfile,
    counts: &BTreeMap<Token, u64>,
    trim: usize,
) -> Result<EstimateReport, EstimateError> {
    if profile.predictors.is_empty() {
        return Err(EstimateError::EmptyPredictorList(profile.language.clone()));
    }
    let missing: Vec<String> = profile
        .predictors
        .iter()
        .filter(|p| !counts.contains_key(&p.word))
        .map(|p| p.word.as_str().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(EstimateError::MissingCounts(missing));
    }

    let mut observations = Vec::with_capacity(profile.predictors.len());
    for p in &profile.predictors {
        if !(p.relative_frequency > 0.0) {
            return Err(EstimateError::NonPositiveFrequency {
                word: p.word.as_str().to_string(),
                value: p.relative_frequency,
            });
        }
        let observed_count = counts[&p.word];
        observations.push(PredictorObservation {
            word: p.word.clone(),
            relative_frequency: p.relative_frequency,
            observed_count,
            prediction: observed_count as f64 / p.relative_frequency,
        });
    }

    let order = rank_order(&observations);
    let n = order.len();
    let effective_trim = trim.min((n - 1) / 2);
    let retained: Vec<f64> = order[effective_trim..n - effective_trim]
        .iter()
        .map(|&i| observations[i].prediction)
        .collect();
    debug_assert!(!retained.is_empty());

    let estimate = retained.iter().sum::<f64>() / retained.len() as f64;
    let min = retained[0];
    let max = retained[retained.len() - 1];
    let median = if retained.len() % 2 == 1 {
        retained[retained.len() / 2]
    } else {
        (retained[retained.len() / 2 - 1] + retained[retained.len() / 2]) / 2.0
    };
    let dispersion = if max == min {
        Some(0.0)
    } else if median > 0.0 {
        Some((max - min) / median)
    } else {
        None
    };

    Ok(EstimateReport {
        language: profile.language.clone(),
        observations,
        requested_trim: trim,
        trimmed_low: effective_trim,
        trimmed_high: effective_trim,
        retained,
        estimate,
        estimate_rounded: round_half_away(estimate),
        dispersion,
    })
}

fn round_half_away(value: f64) -> u64 {
    // f64::round rounds half away from zero; the as-cast saturates at 0
    // for negatives, which cannot occur for non-negative predictions.
    value.round() as u64
}

/// Estimates every language of the set independently against one shared
/// count map covering the union of all predictor words. Per-language
/// failures are carried in the map instead of aborting the rest.
pub fn estimate_all(
    set: &ProfileSet,
    counts: &BTreeMap<Token, u64>,
    trim: usize,
) -> BTreeMap<String, Result<EstimateReport, EstimateError>> {
    set.profiles
        .iter()
        .map(|(language, profile)| (language.clone(), estimate(profile, counts, trim)))
        .collect()
}
