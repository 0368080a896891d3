use std::collections::BTreeMap;

use crate::argument::ArgumentModel;
use crate::bn::{self, BnError};
use crate::Evidence;

use super::shared::SharedCredibilityNetwork;
use super::{BmcaError, ComputationMode};

/// A model's facts split by when they entered the case: `primary` facts
/// from the opening stage, `secondary` facts revealed later.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactPartition {
    pub primary: Evidence,
    pub secondary: Evidence,
}

impl FactPartition {
    pub fn all(&self) -> Evidence {
        self.primary
            .union(&self.secondary)
            .expect("partition halves are disjoint")
    }

    pub fn is_empty(&self) -> bool {
        self.primary.is_empty() && self.secondary.is_empty()
    }
}

/// P(facts | guilt = conditioning state) under one model.
///
/// * `Independent`: all facts, the model's own network.
/// * `TwoStage`: P(primary | secondary, guilt), i.e. the primary facts scored
///   after the credibility evidence has updated the model.
/// * `SharedCredibility`: evaluated in `shared`, whose credibility nodes are
///   also informed by the other models' facts (`facts_by_party`).
///
/// A zero result, or an impossible conditioning event, is `ZeroEvidence`.
pub fn model_plausibility(
    am: &ArgumentModel,
    facts: &FactPartition,
    mode: ComputationMode,
    shared: Option<(&SharedCredibilityNetwork, &BTreeMap<String, Evidence>)>,
) -> Result<f64, BmcaError> {
    am.ensure_valid()?;
    let all = facts.all();
    am.check_facts(&all)?;
    let vc = &am.verdict_conditioning;
    let value = match mode {
        ComputationMode::Independent => conditional(am, &all, &Evidence::new().with(&vc.node, &vc.state))?,
        ComputationMode::TwoStage => {
            let given = facts.secondary.clone().with(&vc.node, &vc.state);
            conditional(am, &facts.primary, &given)?
        }
        ComputationMode::SharedCredibility => {
            let (network, by_party) = shared.ok_or(BmcaError::MissingSharedNetwork)?;
            network.plausibility(&am.party, by_party)?
        }
    };
    match value {
        Some(p) if p > 0.0 => Ok(p),
        _ => Err(BmcaError::ZeroEvidence {
            party: am.party.clone(),
        }),
    }
}

/// P(target | given) in the model's network; `None` when P(given) = 0.
fn conditional(am: &ArgumentModel, target: &Evidence, given: &Evidence) -> Result<Option<f64>, BnError> {
    let joint = target.union(given)?;
    let denominator = bn::probability_of_evidence(&am.network, given)?;
    if denominator <= 0.0 {
        return Ok(None);
    }
    let numerator = bn::probability_of_evidence(&am.network, &joint)?;
    Ok(Some(numerator / denominator))
}
