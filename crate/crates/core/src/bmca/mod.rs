//! Model comparison and averaging: plausibility of each argument against the
//! facts, posterior model weights, and the model-averaged verdict.

mod plausibility;
mod shared;
mod stage;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::argument::{ArgumentError, ArgumentModel};
use crate::bn::{BnError, ROW_SUM_TOLERANCE};
use crate::Distribution;

pub use plausibility::{model_plausibility, FactPartition};
pub use shared::{shared_credibility_union, QualifiedNode, SharedCredibilityNetwork};
pub use stage::{
    evaluate_stage, staged_update, staged_update_with, GivenInput, ModelScore, PlausibilityReport, StageInput,
    FLAG_GIVEN_GUILT, FLAG_GIVEN_PLAUSIBILITY, FLAG_GUILT_UNDEFINED, FLAG_ZERO_EVIDENCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ComputationMode {
    /// Each model scored on its own network.
    #[default]
    Independent,
    /// All models share one collection of credibility nodes.
    SharedCredibility,
    /// Primary facts scored after updating on later credibility evidence.
    TwoStage,
}

impl ComputationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ComputationMode::Independent => "independent",
            ComputationMode::SharedCredibility => "shared",
            ComputationMode::TwoStage => "two-stage",
        }
    }
}

impl fmt::Display for ComputationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ComputationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent" => Ok(ComputationMode::Independent),
            "shared" | "shared-credibility" => Ok(ComputationMode::SharedCredibility),
            "two-stage" | "two_stage" => Ok(ComputationMode::TwoStage),
            other => Err(format!(
                "unknown mode '{other}' (expected independent, shared or two-stage)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BmcaError {
    #[error(transparent)]
    Argument(#[from] ArgumentError),
    #[error("facts have probability zero under '{party}'")]
    ZeroEvidence { party: String },
    #[error("every model assigns the facts probability zero")]
    AllModelsImplausible,
    #[error("weights sum to zero")]
    ZeroWeightSum,
    #[error("distributions are over different state spaces")]
    StateSpaceMismatch,
    #[error("{0}")]
    InvalidEnsemble(String),
    #[error("model '{party}' has no node for case fact '{node}' and does not declare it ignored")]
    MissingFactCoverage { party: String, node: String },
    #[error("shared-credibility mode needs a shared network")]
    MissingSharedNetwork,
    #[error("shared credibility group {group}: {reason}")]
    PriorMismatch { group: String, reason: String },
    #[error("shared credibility group {group}: {reason}")]
    StateMismatch { group: String, reason: String },
    #[error("shared credibility group {group}: {reason}")]
    InvalidGroup { group: String, reason: String },
    #[error("stage '{stage}': {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<BmcaError>,
    },
}

impl From<BnError> for BmcaError {
    fn from(e: BnError) -> Self {
        BmcaError::Argument(ArgumentError::Bn(e))
    }
}

impl BmcaError {
    /// True for every flavour of "the facts are impossible".
    pub fn is_zero_evidence(&self) -> bool {
        match self {
            BmcaError::ZeroEvidence { .. }
            | BmcaError::AllModelsImplausible
            | BmcaError::Argument(ArgumentError::Bn(BnError::ZeroEvidence)) => true,
            BmcaError::Stage { source, .. } => source.is_zero_evidence(),
            _ => false,
        }
    }
}

/// Competing models with the fact-finder's meta-prior over them.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEnsemble {
    pub models: Vec<ArgumentModel>,
    pub priors: Vec<f64>,
    /// Per-model multiplier on plausibility x prior; 1 unless set.
    pub weighting_factors: Vec<f64>,
}

impl ModelEnsemble {
    pub fn new(models: Vec<ArgumentModel>, priors: Vec<f64>) -> Result<Self, BmcaError> {
        let factors = vec![1.0; models.len()];
        Self::with_weighting_factors(models, priors, factors)
    }

    pub fn with_weighting_factors(
        models: Vec<ArgumentModel>,
        priors: Vec<f64>,
        weighting_factors: Vec<f64>,
    ) -> Result<Self, BmcaError> {
        check_priors(&priors, models.len())?;
        if weighting_factors.len() != models.len() {
            return Err(BmcaError::InvalidEnsemble(format!(
                "{} weighting factors for {} models",
                weighting_factors.len(),
                models.len()
            )));
        }
        if let Some(f) = weighting_factors.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return Err(BmcaError::InvalidEnsemble(format!(
                "weighting factor {f} is not positive"
            )));
        }
        Ok(ModelEnsemble {
            models,
            priors,
            weighting_factors,
        })
    }

    pub fn parties(&self) -> Vec<&str> {
        self.models.iter().map(|m| m.party.as_str()).collect()
    }

    pub fn model(&self, party: &str) -> Option<&ArgumentModel> {
        self.models.iter().find(|m| m.party == party)
    }
}

pub(crate) fn check_priors(priors: &[f64], models: usize) -> Result<(), BmcaError> {
    if models == 0 {
        return Err(BmcaError::InvalidEnsemble("at least one model is required".into()));
    }
    if priors.len() != models {
        return Err(BmcaError::InvalidEnsemble(format!(
            "{} priors for {} models",
            priors.len(),
            models
        )));
    }
    if let Some(p) = priors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(BmcaError::InvalidEnsemble(format!("prior {p} outside [0, 1]")));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(BmcaError::InvalidEnsemble(format!("priors sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Probability of guessing `k` Boolean facts at random: 0.5^k.
pub fn random_guess_baseline(k: usize) -> f64 {
    0.5f64.powi(k as i32)
}

/// Posterior model weights: plausibility x factor x prior, normalized.
pub fn posterior_weights(priors: &[f64], factors: &[f64], plausibilities: &[f64]) -> Result<Vec<f64>, BmcaError> {
    if priors.len() != plausibilities.len() || factors.len() != plausibilities.len() {
        return Err(BmcaError::InvalidEnsemble(
            "priors, factors and plausibilities differ in length".into(),
        ));
    }
    let raw: Vec<f64> = plausibilities
        .iter()
        .zip(factors)
        .zip(priors)
        .map(|((p, f), m)| p * f * m)
        .collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(BmcaError::AllModelsImplausible);
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

pub fn posterior_model_probabilities(ensemble: &ModelEnsemble, plausibilities: &[f64]) -> Result<Vec<f64>, BmcaError> {
    posterior_weights(&ensemble.priors, &ensemble.weighting_factors, plausibilities)
}

/// Weight-normalized average of per-model guilt posteriors.
pub fn averaged_verdict(guilt: &[f64], weights: &[f64]) -> Result<f64, BmcaError> {
    if guilt.len() != weights.len() {
        return Err(BmcaError::InvalidEnsemble("guilt and weights differ in length".into()));
    }
    if weights.iter().any(|w| *w < 0.0) {
        return Err(BmcaError::InvalidEnsemble("negative weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(BmcaError::ZeroWeightSum);
    }
    Ok(guilt.iter().zip(weights).map(|(g, w)| g * w).sum::<f64>() / total)
}

/// Convex combination of per-model predictions for one shared variable.
pub fn averaged_query(distributions: &[Distribution], weights: &[f64]) -> Result<Distribution, BmcaError> {
    let first = distributions
        .first()
        .ok_or_else(|| BmcaError::InvalidEnsemble("no distributions".into()))?;
    if distributions.len() != weights.len() {
        return Err(BmcaError::InvalidEnsemble("distributions and weights differ in length".into()));
    }
    if distributions
        .iter()
        .any(|d| d.states != first.states || d.probabilities.len() != first.states.len())
    {
        return Err(BmcaError::StateSpaceMismatch);
    }
    if weights.iter().any(|w| *w < 0.0) {
        return Err(BmcaError::InvalidEnsemble("negative weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(BmcaError::ZeroWeightSum);
    }
    let probabilities = (0..first.states.len())
        .map(|i| {
            distributions
                .iter()
                .zip(weights)
                .map(|(d, w)| d.probabilities[i] * w)
                .sum::<f64>()
                / total
        })
        .collect();
    Ok(Distribution {
        variable: first.variable.clone(),
        states: first.states.clone(),
        probabilities,
    })
}
