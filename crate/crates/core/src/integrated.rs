//! Merging competing argument models into one network: a `Models` node over
//! the parties, and one deterministic switch per node whose table differs
//! between parties.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::argument::DEFAULT_TRUE_STATE;
use crate::bmca::{ModelEnsemble, QualifiedNode};
use crate::bn::{self, BnError};
use crate::{BayesianNetwork, Cpt, Evidence, Variable};

pub const MODELS_NODE: &str = "Models";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratedError {
    #[error(transparent)]
    Bn(#[from] BnError),
    #[error("node '{0}' differs between models but is not covered by the divergence spec")]
    UncoveredDivergence(String),
    #[error("node '{node}' has different state lists across models")]
    IncompatibleStates { node: String },
    #[error("models disagree on the guilt node ({0})")]
    GuiltMismatch(String),
    #[error("divergence spec names '{0}', which no model contains")]
    UnknownDivergentNode(String),
    #[error("replacement table for '{node}' under '{party}' is invalid: {reason}")]
    InvalidReplacement { node: String, party: String, reason: String },
    #[error("node id '{0}' is reserved")]
    ReservedId(String),
}

/// A node whose table depends on the party, with the per-party tables to
/// install. Parties absent from `cpts` see a uniform distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergentNode {
    pub node: String,
    pub cpts: BTreeMap<String, Cpt>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DivergenceSpec {
    pub divergent: Vec<DivergentNode>,
    /// Nodes present in exactly one model.
    pub unique: Vec<QualifiedNode>,
}

impl DivergenceSpec {
    /// Compares same-named nodes across models: a node is divergent when its
    /// table (parents or rows) differs or some model lacks it.
    pub fn detect(ensemble: &ModelEnsemble) -> DivergenceSpec {
        let mut spec = DivergenceSpec::default();
        let parties = ensemble.parties();
        for node in node_order(ensemble) {
            let present: Vec<(&str, &Cpt)> = ensemble
                .models
                .iter()
                .filter_map(|m| m.network.cpt(&node).map(|c| (m.party.as_str(), c)))
                .collect();
            if present.len() == 1 {
                spec.unique.push(QualifiedNode::new(present[0].0, node.clone()));
                continue;
            }
            let same = present.len() == parties.len() && present.windows(2).all(|w| same_table(w[0].1, w[1].1));
            if !same {
                spec.divergent.push(DivergentNode {
                    node: node.clone(),
                    cpts: present.iter().map(|(p, c)| (p.to_string(), (*c).clone())).collect(),
                });
            }
        }
        spec
    }

    fn covers(&self, node: &str) -> bool {
        self.divergent.iter().any(|d| d.node == node) || self.unique.iter().any(|q| q.node == node)
    }
}

fn same_table(a: &Cpt, b: &Cpt) -> bool {
    a.parents == b.parents && a.rows == b.rows
}

/// Node ids in first-appearance order across the ensemble.
fn node_order(ensemble: &ModelEnsemble) -> Vec<String> {
    let mut seen = BTreeSet::new();
    ensemble
        .models
        .iter()
        .flat_map(|m| m.network.variables().iter().map(|v| v.id.clone()))
        .filter(|id| seen.insert(id.clone()))
        .collect()
}

pub fn switch_id(node: &str) -> String {
    format!("switch_{node}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedModel {
    pub network: BayesianNetwork,
    pub parties: Vec<String>,
    /// Divergent node -> its switch node.
    pub switches: BTreeMap<String, String>,
    pub guilt_node: String,
    pub guilty_state: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedQuery {
    /// P(Models = party | facts), in party order.
    pub models: Vec<(String, f64)>,
    pub guilt: f64,
}

pub fn merge_models(ensemble: &ModelEnsemble, div: &DivergenceSpec) -> Result<IntegratedModel, IntegratedError> {
    let parties: Vec<String> = ensemble.models.iter().map(|m| m.party.clone()).collect();
    let guilt_nodes: BTreeSet<&str> = ensemble.models.iter().filter_map(|m| m.guilt_node()).collect();
    if guilt_nodes.len() != 1 || ensemble.models.iter().any(|m| m.guilt_node().is_none()) {
        return Err(IntegratedError::GuiltMismatch(
            guilt_nodes.into_iter().collect::<Vec<_>>().join(", "),
        ));
    }
    let guilt_node = guilt_nodes.into_iter().next().unwrap().to_string();
    let guilty_state = ensemble.models[0]
        .guilty_state()
        .unwrap_or(DEFAULT_TRUE_STATE)
        .to_string();

    let order = node_order(ensemble);
    for d in &div.divergent {
        if !order.contains(&d.node) {
            return Err(IntegratedError::UnknownDivergentNode(d.node.clone()));
        }
    }

    let mut variables: BTreeMap<String, Variable> = BTreeMap::new();
    for node in &order {
        if node == MODELS_NODE || node.starts_with("switch_") {
            return Err(IntegratedError::ReservedId(node.clone()));
        }
        let mut states: Option<&Vec<String>> = None;
        for m in &ensemble.models {
            if let Some(v) = m.network.variable(node) {
                match states {
                    Some(s) if s != &v.states => {
                        return Err(IntegratedError::IncompatibleStates { node: node.clone() })
                    }
                    _ => states = Some(&v.states),
                }
            }
        }
        variables.insert(
            node.clone(),
            Variable {
                id: node.clone(),
                states: states.expect("node comes from some model").clone(),
            },
        );
    }

    let mut network = BayesianNetwork::default();
    network.add_node(
        Variable {
            id: MODELS_NODE.to_string(),
            states: parties.clone(),
        },
        Cpt::prior(MODELS_NODE, ensemble.priors.clone()),
    );

    let mut switches = BTreeMap::new();
    for node in &order {
        let tables: BTreeMap<&str, &Cpt> = match div.divergent.iter().find(|d| &d.node == node) {
            Some(d) => d.cpts.iter().map(|(p, c)| (p.as_str(), c)).collect(),
            None => ensemble
                .models
                .iter()
                .filter_map(|m| m.network.cpt(node).map(|c| (m.party.as_str(), c)))
                .collect(),
        };
        let shared = tables.len() == parties.len()
            && tables.values().collect::<Vec<_>>().windows(2).all(|w| same_table(w[0], w[1]));
        let var = variables[node].clone();
        if shared {
            network.add_node(var, (*tables.values().next().unwrap()).clone());
            continue;
        }
        if !div.covers(node) {
            return Err(IntegratedError::UncoveredDivergence(node.clone()));
        }
        let switch = switch_id(node);
        network.add_node(
            Variable {
                id: switch.clone(),
                states: parties.clone(),
            },
            Cpt {
                child: switch.clone(),
                parents: vec![MODELS_NODE.to_string()],
                rows: (0..parties.len())
                    .map(|i| (0..parties.len()).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            },
        );
        let cpt = gated_cpt(&var, &switch, &parties, &tables, &variables)?;
        network.add_node(var, cpt);
        switches.insert(node.clone(), switch);
    }

    let violations = network.validate();
    if !violations.is_empty() {
        return Err(BnError::InvalidNetwork(violations).into());
    }
    Ok(IntegratedModel {
        network,
        parties,
        switches,
        guilt_node,
        guilty_state,
    })
}

/// Table for `var` with parents (switch, union of party parents): under
/// switch state `p` the row is party p's row for the projected parent
/// states, or uniform if p has no table.
fn gated_cpt(
    var: &Variable,
    switch: &str,
    parties: &[String],
    tables: &BTreeMap<&str, &Cpt>,
    variables: &BTreeMap<String, Variable>,
) -> Result<Cpt, IntegratedError> {
    let mut parents: Vec<String> = Vec::new();
    for party in parties {
        if let Some(c) = tables.get(party.as_str()) {
            for p in &c.parents {
                if !parents.contains(p) {
                    parents.push(p.clone());
                }
            }
        }
    }
    let cards: Vec<usize> = parents
        .iter()
        .map(|p| {
            variables
                .get(p)
                .map(|v| v.cardinality())
                .ok_or_else(|| IntegratedError::Bn(BnError::UnknownVariable(p.clone())))
        })
        .collect::<Result<_, _>>()?;
    let combos: usize = cards.iter().product();
    let k = var.cardinality();
    let uniform = vec![1.0 / k as f64; k];

    let mut rows = Vec::with_capacity(parties.len() * combos);
    for party in parties {
        let table = tables.get(party.as_str());
        if let Some(c) = table {
            let expected: usize = c
                .parents
                .iter()
                .map(|p| variables.get(p).map_or(0, |v| v.cardinality()))
                .product();
            if c.rows.len() != expected || c.rows.iter().any(|r| r.len() != k) {
                return Err(IntegratedError::InvalidReplacement {
                    node: var.id.clone(),
                    party: party.clone(),
                    reason: format!("expected {expected} rows of {k} entries"),
                });
            }
        }
        let mut assignment = vec![0usize; parents.len()];
        for _ in 0..combos {
            let row = match table {
                None => uniform.clone(),
                Some(c) => {
                    let mut idx = 0;
                    for p in &c.parents {
                        let pos = parents.iter().position(|q| q == p).unwrap();
                        idx = idx * cards[pos] + assignment[pos];
                    }
                    c.rows[idx].clone()
                }
            };
            rows.push(row);
            for i in (0..assignment.len()).rev() {
                assignment[i] += 1;
                if assignment[i] < cards[i] {
                    break;
                }
                assignment[i] = 0;
            }
        }
    }
    let mut all_parents = vec![switch.to_string()];
    all_parents.extend(parents);
    Ok(Cpt {
        child: var.id.clone(),
        parents: all_parents,
        rows,
    })
}

/// P(Models | facts) and P(guilt = guilty | facts) in the merged network.
pub fn integrated_query(im: &IntegratedModel, facts: &Evidence) -> Result<IntegratedQuery, IntegratedError> {
    let models = bn::posterior_marginal(&im.network, MODELS_NODE, facts)?;
    let guilt = bn::posterior_marginal(&im.network, &im.guilt_node, facts)?;
    let guilty = guilt.probability(&im.guilty_state).copied().ok_or_else(|| BnError::UnknownState {
        variable: im.guilt_node.clone(),
        state: im.guilty_state.clone(),
    })?;
    Ok(IntegratedQuery {
        models: models.states.into_iter().zip(models.probabilities).collect(),
        guilt: guilty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argument::{ArgumentModel, FactStatus, NodeRole, VerdictConditioning};

    fn model(party: &str, g_prior: f64, f_given_g: [f64; 2], extra: bool) -> ArgumentModel {
        let mut net = BayesianNetwork::default();
        net.add_node(Variable::boolean("g"), Cpt::boolean("g", &[], &[g_prior]));
        net.add_node(Variable::boolean("f"), Cpt::boolean("f", &["g"], &f_given_g));
        let mut roles = BTreeMap::from([
            ("g".to_string(), NodeRole::Guilt),
            ("f".to_string(), NodeRole::Fact(FactStatus::Explained)),
        ]);
        if extra {
            net.add_node(Variable::boolean("c"), Cpt::boolean("c", &[], &[0.7]));
            roles.insert("c".into(), NodeRole::Credibility);
        }
        ArgumentModel::new(
            party,
            net,
            roles,
            VerdictConditioning {
                node: "g".into(),
                state: "True".into(),
            },
        )
    }

    #[test]
    fn detect_and_merge() {
        let ens = ModelEnsemble::new(
            vec![model("a", 0.3, [0.2, 0.9], true), model("b", 0.3, [0.5, 0.4], false)],
            vec![0.6, 0.4],
        )
        .unwrap();
        let div = DivergenceSpec::detect(&ens);
        assert_eq!(div.divergent.len(), 1);
        assert_eq!(div.divergent[0].node, "f");
        assert_eq!(div.unique, vec![QualifiedNode::new("a", "c")]);
        let im = merge_models(&ens, &div).unwrap();
        assert_eq!(im.switches.len(), 2);
        let q = integrated_query(&im, &Evidence::new()).unwrap();
        assert!((q.models[0].1 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn uncovered_divergence_is_an_error() {
        let ens = ModelEnsemble::new(
            vec![model("a", 0.3, [0.2, 0.9], false), model("b", 0.3, [0.5, 0.4], false)],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert_eq!(
            merge_models(&ens, &DivergenceSpec::default()),
            Err(IntegratedError::UncoveredDivergence("f".into()))
        );
    }

    #[test]
    fn incompatible_states_are_rejected() {
        let a = model("a", 0.3, [0.2, 0.9], false);
        let mut b = model("b", 0.3, [0.2, 0.9], false);
        let mut net = BayesianNetwork::default();
        net.add_node(Variable::new("g", &["no", "yes"]), Cpt::boolean("g", &[], &[0.3]));
        net.add_node(Variable::boolean("f"), Cpt::boolean("f", &["g"], &[0.2, 0.9]));
        b.network = net;
        let ens = ModelEnsemble::new(vec![a, b], vec![0.5, 0.5]).unwrap();
        let div = DivergenceSpec::detect(&ens);
        assert_eq!(
            merge_models(&ens, &div),
            Err(IntegratedError::IncompatibleStates { node: "g".into() })
        );
    }
}
