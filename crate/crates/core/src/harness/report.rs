//! Experiment report types and their plain-text rendering.

use serde::{Deserialize, Serialize};

/// One language's outcome within an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub language: String,
    pub true_word_count: u64,
    pub estimate: f64,
    pub estimate_rounded: u64,
    /// `(estimate - true) / true * 100`; `None` when the true count is zero.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signed_error_percent: Option<f64>,
    /// Noise experiment only: error shift versus the mixed experiment,
    /// in percentage points.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_vs_mixed_percent: Option<f64>,
    /// Size sweep only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub size_kb: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flag: Option<String>,
    /// Set when this language failed; the other fields are then zero.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl ReportRow {
    pub fn failed(language: &str, error: String) -> ReportRow {
        ReportRow {
            language: language.to_string(),
            true_word_count: 0,
            estimate: 0.0,
            estimate_rounded: 0,
            signed_error_percent: None,
            delta_vs_mixed_percent: None,
            size_kb: None,
            flag: None,
            error: Some(error),
        }
    }

    pub fn measured(language: &str, true_word_count: u64, estimate: f64, rounded: u64) -> ReportRow {
        ReportRow {
            language: language.to_string(),
            true_word_count,
            estimate,
            estimate_rounded: rounded,
            signed_error_percent: signed_error_percent(estimate, true_word_count),
            delta_vs_mixed_percent: None,
            size_kb: None,
            flag: None,
            error: None,
        }
    }
}

pub fn signed_error_percent(estimate: f64, true_count: u64) -> Option<f64> {
    if true_count == 0 {
        return None;
    }
    Some((estimate - true_count as f64) / true_count as f64 * 100.0)
}

/// Per-language rows plus the aggregate error for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub rows: Vec<ReportRow>,
    /// Mean of |signed error| over rows that have one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_abs_error_percent: Option<f64>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, rows: Vec<ReportRow>) -> ExperimentReport {
        let errors: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.signed_error_percent)
            .map(f64::abs)
            .collect();
        let mean_abs_error_percent = if errors.is_empty() {
            None
        } else {
            Some(errors.iter().sum::<f64>() / errors.len() as f64)
        };
        ExperimentReport {
            experiment: experiment.into(),
            rows,
            mean_abs_error_percent,
        }
    }

    pub fn row(&self, language: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.language == language)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment: {}\n", self.experiment));
        let has_size = self.rows.iter().any(|r| r.size_kb.is_some());
        let has_delta = self.rows.iter().any(|r| r.delta_vs_mixed_percent.is_some());
        out.push_str(&format!("{:<12}", "language"));
        if has_size {
            out.push_str(&format!("{:>9}", "size_kb"));
        }
        out.push_str(&format!("{:>14}{:>18}{:>10}", "true_words", "estimate", "error"));
        if has_delta {
            out.push_str(&format!("{:>10}", "delta"));
        }
        out.push('\n');
        for row in &self.rows {
            if let Some(error) = &row.error {
                out.push_str(&format!("{:<12}error: {error}\n", row.language));
                continue;
            }
            out.push_str(&format!("{:<12}", row.language));
            if has_size {
                match row.size_kb {
                    Some(kb) => out.push_str(&format!("{kb:>9}")),
                    None => out.push_str(&format!("{:>9}", "-")),
                }
            }
            out.push_str(&format!(
                "{:>14}{:>18}",
                row.true_word_count,
                group_thousands(row.estimate_rounded)
            ));
            match row.signed_error_percent {
                Some(e) => out.push_str(&format!("{:>+9.1} %", e)),
                None => out.push_str(&format!("{:>10}", "-")),
            }
            if has_delta {
                match row.delta_vs_mixed_percent {
                    Some(d) => out.push_str(&format!("{d:>+9.1} ")),
                    None => out.push_str(&format!("{:>10}", "-")),
                }
            }
            if let Some(flag) = &row.flag {
                out.push_str(&format!("  [{flag}]"));
            }
            out.push('\n');
        }
        if let Some(mean) = self.mean_abs_error_percent {
            out.push_str(&format!("mean absolute error: {mean:.1} %\n"));
        }
        out
    }
}

/// The 2x2 grid of the domain-robustness comparison: two predictor sets
/// (general vs narrow training corpus) evaluated on two test genres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub language: String,
    pub rows: Vec<DomainRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRow {
    /// Which training corpus the predictors came from.
    pub predictors_from: String,
    /// Which test genre was estimated.
    pub evaluated_on: String,
    pub true_word_count: u64,
    pub estimate: f64,
    pub signed_error_percent: Option<f64>,
}

impl DomainReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment: domain ({})\n", self.language));
        out.push_str(&format!(
            "{:<24}{:<18}{:>14}{:>18}{:>10}\n",
            "predictors_from", "evaluated_on", "true_words", "estimate", "error"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<24}{:<18}{:>14}{:>18}",
                row.predictors_from,
                row.evaluated_on,
                row.true_word_count,
                group_thousands(row.estimate.round() as u64)
            ));
            match row.signed_error_percent {
                Some(e) => out.push_str(&format!("{e:>+9.1} %\n")),
                None => out.push_str(&format!("{:>10}\n", "-")),
            }
        }
        out
    }
}

/// 1234567 -> "1,234,567", the layout used in the census tables.
pub fn group_thousands(value: u64) -> String {
    let digits = value.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i != 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousands_grouping() {
        assert_eq!(group_thousands(0), "0");
        assert_eq!(group_thousands(999), "999");
        assert_eq!(group_thousands(1000), "1,000");
        assert_eq!(group_thousands(3068760356), "3,068,760,356");
        assert_eq!(group_thousands(47264700000), "47,264,700,000");
    }

    #[test]
    fn mean_skips_rows_without_errors() {
        let rows = vec![
            ReportRow::measured("aa", 100, 90.0, 90),
            ReportRow::measured("bb", 0, 0.0, 0),
            ReportRow::failed("cc", "missing".into()),
        ];
        let report = ExperimentReport::new("x", rows);
        assert_eq!(report.mean_abs_error_percent, Some(10.0));
    }

    #[test]
    fn rows_recompute_their_own_error() {
        let row = ReportRow::measured("aa", 200, 150.0, 150);
        let recomputed = signed_error_percent(row.estimate, row.true_word_count);
        assert_eq!(row.signed_error_percent, recomputed);
        assert_eq!(row.signed_error_percent, Some(-25.0));
    }

    #[test]
    fn json_round_trip() {
        let report = ExperimentReport::new(
            "mixed",
            vec![ReportRow::measured("de", 1000, 970.0, 970)],
        );
        let json = serde_json::to_string(&report).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
