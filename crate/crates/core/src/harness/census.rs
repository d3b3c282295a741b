//! Census tables: per-language volume estimates with ratios to a
//! reference language, and growth factors between dated censuses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::report::group_thousands;
use super::HarnessError;
use crate::estimator::EstimateReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub language: String,
    pub estimate: f64,
    pub ratio_to_reference: f64,
}

/// Estimates sorted ascending, each with its ratio to the reference
/// language's estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusTable {
    pub reference: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub as_of: Option<String>,
    pub rows: Vec<CensusRow>,
}

impl CensusTable {
    pub fn row(&self, language: &str) -> Option<&CensusRow> {
        self.rows.iter().find(|r| r.language == language)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match &self.as_of {
            Some(date) => out.push_str(&format!("census (as of {date}), reference {}\n", self.reference)),
            None => out.push_str(&format!("census, reference {}\n", self.reference)),
        }
        out.push_str(&format!("{:<16}{:>20}{:>10}\n", "language", "estimate", "ratio"));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<16}{:>20}{:>10.3}\n",
                row.language,
                group_thousands(row.estimate.round() as u64),
                row.ratio_to_reference
            ));
        }
        out
    }
}

/// Builds the census from per-language estimates. Rows are sorted by
/// ascending estimate (ties by language tag).
pub fn census_report(
    estimates: &BTreeMap<String, f64>,
    reference: &str,
) -> Result<CensusTable, HarnessError> {
    let reference_estimate = *estimates
        .get(reference)
        .ok_or_else(|| HarnessError::ReferenceMissing(reference.to_string()))?;
    let mut rows: Vec<CensusRow> = estimates
        .iter()
        .map(|(language, estimate)| CensusRow {
            language: language.clone(),
            estimate: *estimate,
            ratio_to_reference: if reference_estimate == 0.0 {
                if *estimate == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                estimate / reference_estimate
            },
        })
        .collect();
    rows.sort_by(|a, b| {
        a.estimate
            .partial_cmp(&b.estimate)
            .expect("estimates are finite")
            .then_with(|| a.language.cmp(&b.language))
    });
    Ok(CensusTable {
        reference: reference.to_string(),
        as_of: None,
        rows,
    })
}

/// Builds the census from full estimate reports.
pub fn census_from_reports(
    reports: &BTreeMap<String, EstimateReport>,
    reference: &str,
) -> Result<CensusTable, HarnessError> {
    let estimates = reports
        .iter()
        .map(|(language, report)| (language.clone(), report.estimate))
        .collect();
    census_report(&estimates, reference)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub language: String,
    pub from_estimate: f64,
    pub to_estimate: f64,
    /// `to / from`.
    pub growth_factor: f64,
}

/// Per-language growth factors between two dated censuses, for the
/// languages present in both. Sorted by language tag.
pub fn census_growth(older: &CensusTable, newer: &CensusTable) -> Vec<GrowthRow> {
    let mut rows = Vec::new();
    for old_row in &older.rows {
        let Some(new_row) = newer.row(&old_row.language) else {
            continue;
        };
        if old_row.estimate <= 0.0 {
            continue;
        }
        rows.push(GrowthRow {
            language: old_row.language.clone(),
            from_estimate: old_row.estimate,
            to_estimate: new_row.estimate,
            growth_factor: new_row.estimate / old_row.estimate,
        });
    }
    rows.sort_by(|a, b| a.language.cmp(&b.language));
    rows
}

pub fn render_growth(rows: &[GrowthRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16}{:>20}{:>20}{:>10}\n",
        "language", "from", "to", "growth"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<16}{:>20}{:>20}{:>9.2}x\n",
            row.language,
            group_thousands(row.from_estimate.round() as u64),
            group_thousands(row.to_estimate.round() as u64),
            row.growth_factor
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn estimates(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(l, e)| (l.to_string(), *e)).collect()
    }

    #[test]
    fn reference_ratio_is_one() {
        let table = census_report(&estimates(&[("en", 100.0), ("de", 25.0)]), "en").unwrap();
        assert_eq!(table.row("en").unwrap().ratio_to_reference, 1.0);
        assert_eq!(table.row("de").unwrap().ratio_to_reference, 0.25);
    }

    #[test]
    fn single_language_census_self_ratio() {
        let table = census_report(&estimates(&[("en", 42.0)]), "en").unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].ratio_to_reference, 1.0);
    }

    #[test]
    fn rows_sorted_ascending_by_estimate() {
        let table = census_report(
            &estimates(&[("en", 100.0), ("de", 25.0), ("fr", 50.0)]),
            "en",
        )
        .unwrap();
        let order: Vec<&str> = table.rows.iter().map(|r| r.language.as_str()).collect();
        assert_eq!(order, vec!["de", "fr", "en"]);
    }

    #[test]
    fn missing_reference_is_an_error() {
        let err = census_report(&estimates(&[("de", 1.0)]), "en").unwrap_err();
        assert!(matches!(err, HarnessError::ReferenceMissing(l) if l == "en"));
    }

    #[test]
    fn ratios_invariant_under_common_scaling() {
        let base = estimates(&[("en", 100.0), ("de", 25.0), ("fr", 50.0)]);
        let scaled: BTreeMap<String, f64> =
            base.iter().map(|(l, e)| (l.clone(), e * 7.0)).collect();
        let a = census_report(&base, "en").unwrap();
        let b = census_report(&scaled, "en").unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.language, rb.language);
            assert!((ra.ratio_to_reference - rb.ratio_to_reference).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_factors_between_censuses() {
        let older = census_report(&estimates(&[("en", 100.0), ("de", 10.0)]), "en").unwrap();
        let newer = census_report(&estimates(&[("en", 800.0), ("de", 150.0)]), "en").unwrap();
        let growth = census_growth(&older, &newer);
        assert_eq!(growth.len(), 2);
        assert_eq!(growth[0].language, "de");
        assert_eq!(growth[0].growth_factor, 15.0);
        assert_eq!(growth[1].growth_factor, 8.0);
    }
}
