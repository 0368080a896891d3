use std::collections::BTreeMap;

use crate::argument::{ArgumentError, ArgumentModel};
use crate::bn::BnError;
use crate::case::CaseFile;
use crate::display::significant;
use crate::Evidence;

use super::plausibility::{model_plausibility, FactPartition};
use super::shared::{shared_credibility_union, QualifiedNode};
use super::{averaged_verdict, posterior_weights, random_guess_baseline, BmcaError, ComputationMode};

pub const FLAG_ZERO_EVIDENCE: &str = "zero_evidence";
pub const FLAG_GUILT_UNDEFINED: &str = "guilt_undefined";
pub const FLAG_GIVEN_PLAUSIBILITY: &str = "given_plausibility";
pub const FLAG_GIVEN_GUILT: &str = "given_guilt";

/// Fact-finder supplied values that replace a model's computed ones.
#[derive(Debug, Clone, PartialEq)]
pub struct GivenInput {
    pub party: String,
    pub plausibility: Option<f64>,
    pub guilt: Option<f64>,
}

/// Everything needed to score one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageInput {
    pub name: String,
    pub models: Vec<ArgumentModel>,
    pub priors: Vec<f64>,
    pub weighting_factors: Vec<f64>,
    /// Aligned with `models`.
    pub facts: Vec<FactPartition>,
    pub shared_groups: Vec<Vec<QualifiedNode>>,
    pub given: Vec<GivenInput>,
    /// Number of distinct Boolean case facts, for the random-guess baseline.
    pub fact_count: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelScore {
    pub party: String,
    pub plausibility: f64,
    pub weight: f64,
    /// `None` when the facts are impossible under the model.
    pub guilt: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlausibilityReport {
    pub stage: String,
    pub mode: ComputationMode,
    pub models: Vec<ModelScore>,
    /// `None` when every model is implausible.
    pub averaged_guilt: Option<f64>,
    pub baseline: f64,
    pub notes: Vec<String>,
}

impl PlausibilityReport {
    pub fn model(&self, party: &str) -> Option<&ModelScore> {
        self.models.iter().find(|m| m.party == party)
    }

    /// Index of the highest-weight model (first on ties).
    pub fn best_model(&self) -> Option<&ModelScore> {
        self.models
            .iter()
            .fold(None, |best: Option<&ModelScore>, m| match best {
                Some(b) if b.weight >= m.weight => Some(b),
                _ => Some(m),
            })
    }
}

fn zero_to_none<T>(r: Result<T, BmcaError>) -> Result<Option<T>, BmcaError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_zero_evidence() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Scores every model in `input` and averages their verdicts.
///
/// Models the facts rule out stay in the report with weight 0 and a
/// `zero_evidence` flag.
pub fn evaluate_stage(input: &StageInput, mode: ComputationMode) -> Result<PlausibilityReport, BmcaError> {
    super::check_priors(&input.priors, input.models.len())?;
    if input.facts.len() != input.models.len() || input.weighting_factors.len() != input.models.len() {
        return Err(BmcaError::InvalidEnsemble("stage input is misaligned".into()));
    }
    let by_party: BTreeMap<String, Evidence> = input
        .models
        .iter()
        .zip(&input.facts)
        .map(|(m, f)| (m.party.clone(), f.all()))
        .collect();
    let shared = match mode {
        ComputationMode::SharedCredibility => Some(shared_credibility_union(&input.models, &input.shared_groups)?),
        _ => None,
    };

    let mut notes = input.notes.clone();
    let mut scores = Vec::with_capacity(input.models.len());
    for (am, facts) in input.models.iter().zip(&input.facts) {
        let mut flags = Vec::new();
        let context = shared.as_ref().map(|s| (s, &by_party));
        let plausibility = zero_to_none(model_plausibility(am, facts, mode, context))?;
        let guilt = match &shared {
            Some(s) => zero_to_none(s.guilt_posterior(&am.party, &by_party).map_err(BmcaError::from))?,
            None => zero_to_none(am.guilt_posterior(&facts.all()).map_err(BmcaError::from))?,
        };
        let mut plausibility = plausibility.unwrap_or_else(|| {
            flags.push(FLAG_ZERO_EVIDENCE.to_string());
            0.0
        });
        if guilt.is_none() {
            flags.push(FLAG_GUILT_UNDEFINED.to_string());
        }
        let mut guilt = guilt;

        if let Some(given) = input.given.iter().find(|g| g.party == am.party) {
            if let Some(p) = given.plausibility {
                notes.push(format!(
                    "{}: plausibility {} is a fact-finder input (model computes {})",
                    am.party,
                    significant(p, 3),
                    significant(plausibility, 4)
                ));
                plausibility = p;
                flags.push(FLAG_GIVEN_PLAUSIBILITY.to_string());
            }
            if let Some(g) = given.guilt {
                notes.push(format!(
                    "{}: guilt {} is a fact-finder input (model computes {})",
                    am.party,
                    significant(g, 3),
                    guilt.map(|x| significant(x, 4)).unwrap_or_else(|| "undefined".into())
                ));
                guilt = Some(g);
                flags.push(FLAG_GIVEN_GUILT.to_string());
            }
        }

        let ignored: Vec<String> = am
            .ignored_facts()
            .into_iter()
            .filter(|n| facts.all().contains(n))
            .map(|n| {
                let p = ignored_true_prior(am, n);
                format!("{n} (P(true)={})", significant(p, 3))
            })
            .collect();
        if !ignored.is_empty() {
            notes.push(format!(
                "{} leaves {} fact(s) unexplained: {}",
                am.party,
                ignored.len(),
                ignored.join(", ")
            ));
        }

        scores.push(ModelScore {
            party: am.party.clone(),
            plausibility,
            weight: 0.0,
            guilt,
            flags,
        });
    }

    let plausibilities: Vec<f64> = scores.iter().map(|s| s.plausibility).collect();
    let averaged_guilt = match posterior_weights(&input.priors, &input.weighting_factors, &plausibilities) {
        Ok(weights) => {
            for (s, w) in scores.iter_mut().zip(weights) {
                s.weight = w;
            }
            let (g, w): (Vec<f64>, Vec<f64>) = scores
                .iter()
                .filter(|s| s.weight > 0.0)
                .filter_map(|s| s.guilt.map(|g| (g, s.weight)))
                .unzip();
            for s in scores.iter().filter(|s| s.weight > 0.0 && s.guilt.is_none()) {
                notes.push(format!("{}: guilt undefined, excluded from the average", s.party));
            }
            averaged_verdict(&g, &w).ok()
        }
        Err(BmcaError::AllModelsImplausible) => {
            notes.push("every model assigns the facts probability zero".into());
            None
        }
        Err(e) => return Err(e),
    };

    Ok(PlausibilityReport {
        stage: input.name.clone(),
        mode,
        models: scores,
        averaged_guilt,
        baseline: random_guess_baseline(input.fact_count),
        notes,
    })
}

fn ignored_true_prior(am: &ArgumentModel, node: &str) -> f64 {
    let idx = am.true_state(node).unwrap_or(1);
    am.network
        .cpt(node)
        .filter(|c| c.parents.is_empty())
        .and_then(|c| c.rows.first())
        .and_then(|r| r.get(idx))
        .copied()
        .unwrap_or(f64::NAN)
}

/// One report per stage: stage n is scored against the facts of stages
/// 1..=n using the stage-n model versions. Fact-finder given inputs are used
/// when present.
pub fn staged_update(casefile: &CaseFile, mode: ComputationMode) -> Result<Vec<PlausibilityReport>, BmcaError> {
    staged_update_with(casefile, mode, true)
}

/// As [`staged_update`], optionally ignoring fact-finder given inputs.
pub fn staged_update_with(
    casefile: &CaseFile,
    mode: ComputationMode,
    use_given: bool,
) -> Result<Vec<PlausibilityReport>, BmcaError> {
    let mut reports = Vec::with_capacity(casefile.stages.len());
    for (idx, stage) in casefile.stages.iter().enumerate() {
        let wrap = |e: BmcaError| BmcaError::Stage {
            stage: stage.name.clone(),
            source: Box::new(e),
        };
        let mut input = casefile.stage_input(idx).map_err(wrap)?;
        if !use_given {
            input.given.clear();
        }
        let report = evaluate_stage(&input, mode).map_err(wrap)?;
        if report.averaged_guilt.is_none() {
            return Err(wrap(BmcaError::AllModelsImplausible));
        }
        reports.push(report);
    }
    Ok(reports)
}

impl From<ArgumentError> for Box<BmcaError> {
    fn from(e: ArgumentError) -> Self {
        Box::new(BmcaError::Argument(e))
    }
}

impl From<BnError> for Box<BmcaError> {
    fn from(e: BnError) -> Self {
        Box::new(BmcaError::from(e))
    }
}
