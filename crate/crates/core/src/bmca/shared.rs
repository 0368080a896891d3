use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::argument::{ArgumentModel, NodeRole};
use crate::bn::{self, BnError};
use crate::{BayesianNetwork, Cpt, Evidence, Variable};

use super::BmcaError;

/// A node id scoped to one party's model, written `party/node`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedNode {
    pub party: String,
    pub node: String,
}

impl QualifiedNode {
    pub fn new(party: impl Into<String>, node: impl Into<String>) -> Self {
        QualifiedNode {
            party: party.into(),
            node: node.into(),
        }
    }
}

impl fmt::Display for QualifiedNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.party, self.node)
    }
}

impl FromStr for QualifiedNode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((party, node)) if !party.is_empty() && !node.is_empty() => {
                Ok(QualifiedNode::new(party, node))
            }
            _ => Err(format!("'{s}' is not of the form party/node")),
        }
    }
}

/// Disjoint union of all model networks in which each shared-credibility
/// group has been collapsed into a single node.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedCredibilityNetwork {
    pub network: BayesianNetwork,
    pub parties: Vec<String>,
    /// party -> model node id -> node id in `network`.
    pub node_map: BTreeMap<String, BTreeMap<String, String>>,
    /// party -> (guilt node in `network`, conditioning state, guilty state).
    pub verdicts: BTreeMap<String, (String, String, String)>,
}

impl SharedCredibilityNetwork {
    pub fn combined_id(&self, party: &str, node: &str) -> Option<&str> {
        self.node_map.get(party)?.get(node).map(String::as_str)
    }

    pub fn map_evidence(&self, party: &str, facts: &Evidence) -> Result<Evidence, BnError> {
        facts
            .iter()
            .map(|(node, state)| {
                self.combined_id(party, node)
                    .map(|id| (id.to_string(), state.to_string()))
                    .ok_or_else(|| BnError::UnknownVariable(format!("{party}/{node}")))
            })
            .collect()
    }

    fn split(&self, party: &str, by_party: &BTreeMap<String, Evidence>) -> Result<(Evidence, Evidence), BnError> {
        let mut own = Evidence::new();
        let mut others = Evidence::new();
        for (p, facts) in by_party {
            let mapped = self.map_evidence(p, facts)?;
            if p == party {
                own = own.union(&mapped)?;
            } else {
                others = others.union(&mapped)?;
            }
        }
        Ok((own, others))
    }

    /// P(own facts | own guilt = conditioning state, other models' facts).
    /// `None` when the conditioning event is impossible.
    pub fn plausibility(&self, party: &str, by_party: &BTreeMap<String, Evidence>) -> Result<Option<f64>, BnError> {
        let (guilt, state, _) = self
            .verdicts
            .get(party)
            .ok_or_else(|| BnError::UnknownVariable(party.to_string()))?;
        let (own, others) = self.split(party, by_party)?;
        let given = others.with(guilt.clone(), state.clone());
        let denominator = bn::probability_of_evidence(&self.network, &given)?;
        if denominator <= 0.0 {
            return Ok(None);
        }
        let numerator = bn::probability_of_evidence(&self.network, &own.union(&given)?)?;
        Ok(Some(numerator / denominator))
    }

    /// P(party's guilt node = guilty | every model's facts).
    pub fn guilt_posterior(&self, party: &str, by_party: &BTreeMap<String, Evidence>) -> Result<f64, BnError> {
        let (guilt, _, guilty) = self
            .verdicts
            .get(party)
            .ok_or_else(|| BnError::UnknownVariable(party.to_string()))?;
        let (own, others) = self.split(party, by_party)?;
        let all = own.union(&others)?;
        let dist = bn::posterior_marginal(&self.network, guilt, &all)?;
        dist.probability(guilty)
            .copied()
            .ok_or_else(|| BnError::UnknownState {
                variable: guilt.clone(),
                state: guilty.clone(),
            })
    }
}

/// Builds the shared-credibility union. Group members missing from a model
/// (e.g. nodes only added at a later stage) are skipped.
pub fn shared_credibility_union(
    models: &[ArgumentModel],
    groups: &[Vec<QualifiedNode>],
) -> Result<SharedCredibilityNetwork, BmcaError> {
    let by_party: BTreeMap<&str, &ArgumentModel> =
        models.iter().map(|m| (m.party.as_str(), m)).collect();

    // member -> canonical combined id
    let mut canonical: BTreeMap<QualifiedNode, String> = BTreeMap::new();
    for group in groups {
        let label = group
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let mut present: Vec<(&QualifiedNode, &ArgumentModel)> = Vec::new();
        for member in group {
            let model = by_party.get(member.party.as_str()).ok_or_else(|| BmcaError::InvalidGroup {
                group: label.clone(),
                reason: format!("unknown party '{}'", member.party),
            })?;
            if canonical.contains_key(member) {
                return Err(BmcaError::InvalidGroup {
                    group: label.clone(),
                    reason: format!("'{member}' belongs to more than one group"),
                });
            }
            if model.network.contains(&member.node) {
                present.push((member, model));
            }
        }
        let Some((first, first_model)) = present.first().copied() else {
            continue;
        };
        let reference_var = first_model.network.variable(&first.node).unwrap();
        let reference_cpt = first_model.network.cpt(&first.node);
        for (member, model) in &present {
            if model.role(&member.node) != Some(NodeRole::Credibility) {
                return Err(BmcaError::InvalidGroup {
                    group: label.clone(),
                    reason: format!("'{member}' is not a credibility node"),
                });
            }
            let var = model.network.variable(&member.node).unwrap();
            if var.states != reference_var.states {
                return Err(BmcaError::StateMismatch {
                    group: label.clone(),
                    reason: format!("'{member}' has states {:?}, expected {:?}", var.states, reference_var.states),
                });
            }
            let cpt = model.network.cpt(&member.node);
            let same_prior = match (cpt, reference_cpt) {
                (Some(a), Some(b)) => {
                    a.parents.is_empty()
                        && b.parents.is_empty()
                        && a.rows.len() == b.rows.len()
                        && a.rows.iter().flatten().zip(b.rows.iter().flatten()).all(|(x, y)| (x - y).abs() <= 1e-12)
                }
                _ => false,
            };
            if !same_prior {
                return Err(BmcaError::PriorMismatch {
                    group: label.clone(),
                    reason: format!("'{member}' does not share the prior of '{first}'"),
                });
            }
        }
        for (member, _) in present {
            canonical.insert(member.clone(), first.to_string());
        }
    }

    let mut network = BayesianNetwork::default();
    let mut node_map: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    for model in models {
        let map = node_map.entry(model.party.clone()).or_default();
        for var in model.network.variables() {
            let q = QualifiedNode::new(&model.party, &var.id);
            let id = canonical.get(&q).cloned().unwrap_or_else(|| q.to_string());
            map.insert(var.id.clone(), id);
        }
    }
    let mut emitted = std::collections::BTreeSet::new();
    for model in models {
        let map = &node_map[&model.party];
        for var in model.network.variables() {
            let id = &map[&var.id];
            if !emitted.insert(id.clone()) {
                continue;
            }
            let cpt = model
                .network
                .cpt(&var.id)
                .ok_or_else(|| BnError::InvalidNetwork(model.network.validate()))?;
            let renamed = Cpt {
                child: id.clone(),
                parents: cpt
                    .parents
                    .iter()
                    .map(|p| map.get(p).cloned().unwrap_or_else(|| p.clone()))
                    .collect(),
                rows: cpt.rows.clone(),
            };
            network.add_node(
                Variable {
                    id: id.clone(),
                    states: var.states.clone(),
                },
                renamed,
            );
        }
        let vc = &model.verdict_conditioning;
        let guilt = map
            .get(&vc.node)
            .cloned()
            .unwrap_or_else(|| QualifiedNode::new(&model.party, &vc.node).to_string());
        let guilty = model.guilty_state().unwrap_or(crate::argument::DEFAULT_TRUE_STATE).to_string();
        verdicts.insert(model.party.clone(), (guilt, vc.state.clone(), guilty));
    }

    let violations = network.validate();
    if !violations.is_empty() {
        return Err(BnError::InvalidNetwork(violations).into());
    }
    Ok(SharedCredibilityNetwork {
        network,
        parties: models.iter().map(|m| m.party.clone()).collect(),
        node_map,
        verdicts,
    })
}
