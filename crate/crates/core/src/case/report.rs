//! Report documents: JSON for machines, aligned tables for people.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bmca::{ComputationMode, PlausibilityReport};
use crate::display::significant;

const DISPLAY_DIGITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format '{other}' (expected json or text)")),
        }
    }
}

/// The serialized report. Probabilities appear at full precision and again
/// as 3-significant-figure strings under `display`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub case: String,
    pub mode: String,
    pub stages: Vec<StageReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub mode: String,
    pub models: Vec<ModelReport>,
    pub averaged_guilt: Option<f64>,
    pub baseline: f64,
    pub notes: Vec<String>,
    pub display: StageDisplay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub party: String,
    pub plausibility: f64,
    pub weight: f64,
    pub guilt: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    pub display: ModelDisplay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageDisplay {
    pub averaged_guilt: Option<String>,
    pub baseline: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDisplay {
    pub plausibility: String,
    pub weight: String,
    pub guilt: Option<String>,
}

fn show(x: f64) -> String {
    significant(x, DISPLAY_DIGITS)
}

impl StageReport {
    pub fn model(&self, party: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.party == party)
    }
}

impl From<&PlausibilityReport> for StageReport {
    fn from(r: &PlausibilityReport) -> Self {
        StageReport {
            name: r.stage.clone(),
            mode: r.mode.as_str().to_string(),
            models: r
                .models
                .iter()
                .map(|m| ModelReport {
                    party: m.party.clone(),
                    plausibility: m.plausibility,
                    weight: m.weight,
                    guilt: m.guilt,
                    flags: m.flags.clone(),
                    display: ModelDisplay {
                        plausibility: show(m.plausibility),
                        weight: show(m.weight),
                        guilt: m.guilt.map(show),
                    },
                })
                .collect(),
            averaged_guilt: r.averaged_guilt,
            baseline: r.baseline,
            notes: r.notes.clone(),
            display: StageDisplay {
                averaged_guilt: r.averaged_guilt.map(show),
                baseline: show(r.baseline),
            },
        }
    }
}

impl ReportDocument {
    pub fn new(case: impl Into<String>, mode: ComputationMode, reports: &[PlausibilityReport]) -> Self {
        ReportDocument {
            case: case.into(),
            mode: mode.as_str().to_string(),
            stages: reports.iter().map(StageReport::from).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

pub fn emit_report(doc: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = doc.to_json();
            s.push('\n');
            s
        }
        ReportFormat::Text => text(doc),
    }
}

fn text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    writeln!(out, "case: {}", doc.case).unwrap();
    writeln!(out, "mode: {}", doc.mode).unwrap();
    for (i, stage) in doc.stages.iter().enumerate() {
        writeln!(out).unwrap();
        writeln!(out, "stage {}: {} (baseline {})", i + 1, stage.name, stage.display.baseline).unwrap();
        let width = stage
            .models
            .iter()
            .map(|m| m.party.len())
            .chain(std::iter::once(5))
            .max()
            .unwrap_or(5);
        writeln!(out, "  {:<width$}  {:>12}  {:>10}  {:>10}", "party", "plausibility", "weight", "guilt").unwrap();
        for m in &stage.models {
            let flags = if m.flags.is_empty() {
                String::new()
            } else {
                format!("  [{}]", m.flags.join(", "))
            };
            writeln!(
                out,
                "  {:<width$}  {:>12}  {:>10}  {:>10}{flags}",
                m.party,
                m.display.plausibility,
                m.display.weight,
                m.display.guilt.as_deref().unwrap_or("-"),
            )
            .unwrap();
        }
        writeln!(
            out,
            "  averaged guilt: {}",
            stage.display.averaged_guilt.as_deref().unwrap_or("undefined")
        )
        .unwrap();
        for note in &stage.notes {
            writeln!(out, "  note: {note}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmca::ModelScore;

    fn sample() -> PlausibilityReport {
        PlausibilityReport {
            stage: "opening".into(),
            mode: ComputationMode::Independent,
            models: vec![ModelScore {
                party: "p".into(),
                plausibility: 0.33,
                weight: 1.0,
                guilt: Some(0.999),
                flags: vec![],
            }],
            averaged_guilt: Some(0.999),
            baseline: 0.015625,
            notes: vec![],
        }
    }

    #[test]
    fn empty_document_is_valid_json() {
        let doc = ReportDocument::new("x", ComputationMode::Independent, &[]);
        let v: serde_json::Value = serde_json::from_str(&emit_report(&doc, ReportFormat::Json)).unwrap();
        assert_eq!(v["stages"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn json_round_trips_and_is_deterministic() {
        let doc = ReportDocument::new("x", ComputationMode::Independent, &[sample()]);
        let a = emit_report(&doc, ReportFormat::Json);
        assert_eq!(a, emit_report(&doc, ReportFormat::Json));
        let back: ReportDocument = serde_json::from_str(&a).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.stages[0].display.baseline, "0.0156");
    }

    #[test]
    fn text_has_table() {
        let doc = ReportDocument::new("x", ComputationMode::Independent, &[sample()]);
        let t = emit_report(&doc, ReportFormat::Text);
        assert!(t.contains("averaged guilt: 0.999"));
        assert!(t.contains("plausibility"));
    }
}
