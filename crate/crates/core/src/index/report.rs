//! Machine- and human-readable index reports.
//!
//! The machine format is canonical JSON (struct field order plus sorted maps),
//! so identical configuration and seed produce byte-identical documents.
//! Unbounded gap ratios are `null` — JSON has no infinity.

use serde::Serialize;

use crate::index::{IndexValue, RankPolicy, SuiteOutcome};
use crate::models::ModelMetadata;

pub const SCHEMA_VERSION: u32 = 1;

/// One label row of a report table.
#[derive(Debug, Clone, Serialize)]
pub struct LabelRow {
    pub label: String,
    pub kernel_multiplicity: usize,
    pub cokernel_multiplicity: usize,
    pub index: i64,
    pub kernel_gap: Option<f64>,
    pub cokernel_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub schema_version: u32,
    pub model: Option<ModelMetadata>,
    pub policy: RankPolicy,
    pub seed: Option<u64>,
    pub index: Option<IndexValue>,
    pub labels: Vec<LabelRow>,
    pub suites: Vec<SuiteOutcome>,
    pub diagnostics: Vec<String>,
}

impl IndexReport {
    pub fn new(policy: RankPolicy) -> Self {
        IndexReport {
            schema_version: SCHEMA_VERSION,
            model: None,
            policy,
            seed: None,
            index: None,
            labels: Vec::new(),
            suites: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn with_model(mut self, model: ModelMetadata) -> Self {
        self.model = Some(model);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_index(mut self, index: IndexValue) -> Self {
        self.index = Some(index);
        self
    }

    /// All suites passed and no label row was left indeterminate.
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn to_machine_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(m) = &self.model {
            out.push_str(&format!("model: {}\n", m.kind));
            for (k, v) in &m.params {
                out.push_str(&format!("  {k} = {v}\n"));
            }
            if let Some(o) = m.label_offset {
                out.push_str(&format!("  label offset = {o}\n"));
            }
        }
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        out.push_str(&format!(
            "policy: floor {:.1e}, relative {:.1e}, min gap {}\n",
            self.policy.absolute_floor, self.policy.relative_factor, self.policy.min_gap_ratio
        ));
        if let Some(ix) = &self.index {
            out.push_str(&format!("index: {ix}\n"));
        }
        if !self.labels.is_empty() {
            out.push_str(&format!(
                "{:>8} {:>6} {:>6} {:>6} {:>12} {:>12}\n",
                "label", "m+", "m-", "index", "gap+", "gap-"
            ));
            for row in &self.labels {
                out.push_str(&format!(
                    "{:>8} {:>6} {:>6} {:>6} {:>12} {:>12}\n",
                    row.label,
                    row.kernel_multiplicity,
                    row.cokernel_multiplicity,
                    row.index,
                    fmt_gap(row.kernel_gap),
                    fmt_gap(row.cokernel_gap),
                ));
            }
        }
        for s in &self.suites {
            out.push_str(&format!(
                "suite {}: {}\n",
                s.name,
                if s.passed { "pass" } else { "FAIL" }
            ));
            for c in &s.cases {
                out.push_str(&format!(
                    "  [{}] {} {}\n",
                    if c.passed { "ok" } else { "FAIL" },
                    c.label,
                    c.detail
                ));
            }
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        out
    }
}

fn fmt_gap(g: Option<f64>) -> String {
    match g {
        None => "unbounded".to_string(),
        Some(v) => format!("{v:.2e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_json_is_deterministic() {
        let mk = || {
            IndexReport::new(RankPolicy::default())
                .with_seed(7)
                .with_index(IndexValue::Integer(2))
        };
        assert_eq!(mk().to_machine_json(), mk().to_machine_json());
    }

    #[test]
    fn text_report_mentions_index() {
        let r = IndexReport::new(RankPolicy::default()).with_index(IndexValue::Integer(-3));
        assert!(r.to_text().contains("index: -3"));
    }
}
