//! wordcensus: estimate how many words of a language a text source holds,
//! from nothing but the observed counts of ~20 high-frequency predictor
//! words per language.
//!
//! The pipeline:
//!
//! 1. [`tokenizer`] — split text into alphabetic, case-folded tokens and
//!    count them.
//! 2. [`profile`] — train per-language predictor lists (top of the
//!    frequency distribution, deduplicated across languages so every
//!    predictor identifies exactly one language).
//! 3. [`providers`] — obtain term counts from a local scan, an archived
//!    count table, or a remote count service; or serve counts yourself.
//! 4. [`estimator`] — scale each observed predictor count by its training
//!    frequency and average the predictions after trimming the extremes.
//! 5. [`harness`] — evaluation experiments with known ground truth, plus
//!    census tables (per-language volumes, ratios and growth).

pub mod estimator;
pub mod harness;
pub mod ingest;
pub mod profile;
pub mod providers;
pub mod synth;
pub mod tokenizer;

pub use estimator::{estimate, estimate_all, predict_single, EstimateReport, PredictorObservation};
pub use profile::{LanguageProfile, Predictor, ProfileSet};
pub use providers::{CountQuery, CountResult, CountSource};
pub use tokenizer::{count_frequencies, count_text, merge, tokenize, FrequencyTable, Token};
