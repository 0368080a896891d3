//! A fact-finder's evolving view of one case: asserted facts, model and
//! credibility priors, mode and stage cursor. Every mutation recomputes the
//! report.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use verdict_core::argument::{ArgumentModel, NodeRole};
use verdict_core::bmca::{evaluate_stage, BmcaError, ComputationMode, FactPartition, QualifiedNode, StageInput};
use verdict_core::case::report::StageReport;
use verdict_core::case::{parse_case_file, CaseError, CaseFile, ALL_MODELS};
use verdict_core::{Cpt, Evidence};

const PRIOR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error("unknown party '{0}'")]
    UnknownParty(String),
    #[error("'{node}' is not a fact of {model} at the current stage")]
    UnknownFact { model: String, node: String },
    #[error("'{state}' is not a state of fact '{node}'")]
    UnknownState { node: String, state: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("no credibility node matches '{0}'")]
    UnknownCredibility(String),
    #[error("{0}")]
    UnknownMode(String),
    #[error("stage {0} does not exist")]
    UnknownStage(usize),
    #[error("asserted fact '{node}' is not a fact of {model} at stage {stage}")]
    FactsNotCovered { model: String, node: String, stage: usize },
    #[error(transparent)]
    Computation(#[from] BmcaError),
}

impl SessionError {
    /// JSON path of the offending request field, where there is one.
    pub fn path(&self) -> Option<&'static str> {
        match self {
            SessionError::Case(_) => None,
            SessionError::UnknownParty(_) => Some("model"),
            SessionError::UnknownFact { .. } => Some("node"),
            SessionError::UnknownState { .. } => Some("state"),
            SessionError::InvalidDistribution(_) => Some("models"),
            SessionError::UnknownCredibility(_) => Some("credibility"),
            SessionError::UnknownMode(_) => Some("mode"),
            SessionError::UnknownStage(_) | SessionError::FactsNotCovered { .. } => Some("stage"),
            SessionError::Computation(_) => None,
        }
    }
}

/// One recorded session mutation. Replaying the log of a session against
/// the same case file reproduces its report exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Mutation {
    Fact {
        model: String,
        node: String,
        #[serde(default)]
        state: Option<String>,
    },
    Priors {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        models: Option<BTreeMap<String, f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        credibility: Option<BTreeMap<String, Option<f64>>>,
    },
    Mode {
        mode: String,
    },
    Stage {
        stage: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertedFact {
    pub model: String,
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseFactEntry {
    pub stage: usize,
    pub model: String,
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCursor {
    /// 1-based.
    pub index: usize,
    pub name: String,
    pub count: usize,
}

/// What the service returns after every request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub case: String,
    pub mode: String,
    pub stage: StageCursor,
    pub facts: Vec<AssertedFact>,
    pub priors: BTreeMap<String, f64>,
    pub credibility: BTreeMap<String, f64>,
    /// The case's facts in narrative order, grouped by stage.
    pub case_facts: Vec<CaseFactEntry>,
    pub stages: Vec<StageReport>,
}

impl SessionReport {
    pub fn current(&self) -> &StageReport {
        &self.stages[0]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    case: CaseFile,
    stage: usize,
    facts: BTreeMap<(String, String), String>,
    priors: Vec<f64>,
    credibility: BTreeMap<String, f64>,
    mode: ComputationMode,
    log: Vec<Mutation>,
    report: SessionReport,
}

impl Session {
    pub fn create(case_text: &str) -> Result<Session, SessionError> {
        Self::from_case(parse_case_file(case_text)?)
    }

    pub fn from_case(case: CaseFile) -> Result<Session, SessionError> {
        let priors = case.priors();
        let mode = case.default_mode();
        let mut session = Session {
            case,
            stage: 0,
            facts: BTreeMap::new(),
            priors,
            credibility: BTreeMap::new(),
            mode,
            log: Vec::new(),
            report: placeholder_report(),
        };
        session.report = session.compute()?;
        Ok(session)
    }

    /// Builds a session and applies `log` in order.
    pub fn replay(case_text: &str, log: &[Mutation]) -> Result<Session, SessionError> {
        let mut s = Self::create(case_text)?;
        for m in log {
            s.apply(m.clone())?;
        }
        Ok(s)
    }

    pub fn report(&self) -> &SessionReport {
        &self.report
    }

    pub fn log(&self) -> &[Mutation] {
        &self.log
    }

    pub fn case(&self) -> &CaseFile {
        &self.case
    }

    /// Applies `m` atomically: on error the session is unchanged.
    pub fn apply(&mut self, m: Mutation) -> Result<&SessionReport, SessionError> {
        let mut next = self.clone();
        match &m {
            Mutation::Fact { model, node, state } => next.toggle_fact(model, node, state.as_deref())?,
            Mutation::Priors { models, credibility } => next.set_priors(models.as_ref(), credibility.as_ref())?,
            Mutation::Mode { mode } => next.mode = mode.parse().map_err(SessionError::UnknownMode)?,
            Mutation::Stage { stage } => next.set_stage(*stage)?,
        }
        next.report = next.compute()?;
        next.log.push(m);
        *self = next;
        Ok(&self.report)
    }

    fn models(&self) -> Result<Vec<ArgumentModel>, SessionError> {
        let models = self.case.models_at(self.stage).map_err(BmcaError::from)?;
        Ok(models.into_iter().map(|m| self.with_credibility(m)).collect())
    }

    fn toggle_fact(&mut self, model: &str, node: &str, state: Option<&str>) -> Result<(), SessionError> {
        if model != ALL_MODELS && !self.case.parties().contains(&model) {
            return Err(SessionError::UnknownParty(model.to_string()));
        }
        let key = (model.to_string(), node.to_string());
        let Some(state) = state else {
            self.facts.remove(&key);
            return Ok(());
        };
        let models = self.models()?;
        for m in models.iter().filter(|m| model == ALL_MODELS || m.party == model) {
            if !m.role(node).is_some_and(NodeRole::is_fact) {
                return Err(SessionError::UnknownFact {
                    model: model.to_string(),
                    node: node.to_string(),
                });
            }
            if m.network.variable(node).and_then(|v| v.state_index(state)).is_none() {
                return Err(SessionError::UnknownState {
                    node: node.to_string(),
                    state: state.to_string(),
                });
            }
        }
        self.facts.insert(key, state.to_string());
        Ok(())
    }

    fn set_priors(
        &mut self,
        models: Option<&BTreeMap<String, f64>>,
        credibility: Option<&BTreeMap<String, Option<f64>>>,
    ) -> Result<(), SessionError> {
        if let Some(update) = models {
            let parties = self.case.parties();
            let mut priors = self.priors.clone();
            for (party, p) in update {
                let idx = parties
                    .iter()
                    .position(|q| q == party)
                    .ok_or_else(|| SessionError::UnknownParty(party.clone()))?;
                priors[idx] = *p;
            }
            if let Some(p) = priors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(SessionError::InvalidDistribution(format!("prior {p} outside [0, 1]")));
            }
            let sum: f64 = priors.iter().sum();
            if (sum - 1.0).abs() > PRIOR_TOLERANCE {
                return Err(SessionError::InvalidDistribution(format!("model priors sum to {sum}")));
            }
            self.priors = priors;
        }
        if let Some(update) = credibility {
            for (key, value) in update {
                match value {
                    None => {
                        self.credibility.remove(key);
                    }
                    Some(p) => {
                        if !(0.0..=1.0).contains(p) {
                            return Err(SessionError::InvalidDistribution(format!(
                                "credibility prior {p} for '{key}' outside [0, 1]"
                            )));
                        }
                        let models = self.case.models_at(self.stage).map_err(BmcaError::from)?;
                        if !models.iter().any(|m| !self.credibility_targets(key, m).is_empty()) {
                            return Err(SessionError::UnknownCredibility(key.clone()));
                        }
                        self.credibility.insert(key.clone(), *p);
                    }
                }
            }
        }
        Ok(())
    }

    fn set_stage(&mut self, stage: usize) -> Result<(), SessionError> {
        if stage == 0 || stage > self.case.stages.len() {
            return Err(SessionError::UnknownStage(stage));
        }
        let models = self.case.models_at(stage - 1).map_err(BmcaError::from)?;
        for (model, node) in self.facts.keys() {
            for m in models.iter().filter(|m| model == ALL_MODELS || &m.party == model) {
                if !m.role(node).is_some_and(NodeRole::is_fact) {
                    return Err(SessionError::FactsNotCovered {
                        model: model.clone(),
                        node: node.clone(),
                        stage,
                    });
                }
            }
        }
        self.stage = stage - 1;
        Ok(())
    }

    /// Credibility nodes of `model` addressed by `key`: a bare node id
    /// matches that node in every model; `party/node` matches the node and
    /// every member of its shared-credibility group.
    fn credibility_targets(&self, key: &str, model: &ArgumentModel) -> Vec<String> {
        let is_cred = |n: &str| model.role(n) == Some(NodeRole::Credibility);
        match key.parse::<QualifiedNode>() {
            Ok(q) => {
                let mut members: BTreeSet<QualifiedNode> = BTreeSet::from([q.clone()]);
                for group in &self.case.shared_credibility {
                    if group.contains(&q) {
                        members.extend(group.iter().cloned());
                    }
                }
                members
                    .into_iter()
                    .filter(|m| m.party == model.party && is_cred(&m.node))
                    .map(|m| m.node)
                    .collect()
            }
            Err(_) if is_cred(key) => vec![key.to_string()],
            Err(_) => Vec::new(),
        }
    }

    fn with_credibility(&self, mut model: ArgumentModel) -> ArgumentModel {
        for (key, p) in &self.credibility {
            for node in self.credibility_targets(key, &model) {
                let Some(var) = model.network.variable(&node) else { continue };
                let Some(t) = model.true_state(&node) else { continue };
                let is_root = model.network.cpt(&node).is_some_and(|c| c.parents.is_empty());
                if var.cardinality() != 2 || !is_root {
                    continue;
                }
                let mut dist = vec![1.0 - p; 2];
                dist[t] = *p;
                model
                    .network
                    .replace_cpt(Cpt::prior(node.clone(), dist))
                    .expect("node exists");
            }
        }
        model
    }

    fn stage_input(&self) -> Result<StageInput, SessionError> {
        let models = self.models()?;
        let opening: BTreeSet<&str> = self
            .case
            .stages
            .first()
            .map(|s| s.facts.iter().map(|f| f.node.as_str()).collect())
            .unwrap_or_default();
        let facts = models
            .iter()
            .map(|m| {
                let mut part = FactPartition::default();
                for ((scope, node), state) in &self.facts {
                    if scope == ALL_MODELS || scope == &m.party {
                        let target = if opening.contains(node.as_str()) {
                            &mut part.primary
                        } else {
                            &mut part.secondary
                        };
                        target.insert(node.clone(), state.clone());
                    }
                }
                part
            })
            .collect();
        let stage = &self.case.stages.get(self.stage);
        let accumulated: BTreeMap<(String, String), String> = self
            .case
            .accumulated_facts(self.stage)
            .into_iter()
            .map(|f| {
                let scope = match &f.scope {
                    verdict_core::case::FactScope::All => ALL_MODELS.to_string(),
                    verdict_core::case::FactScope::Party(p) => p.clone(),
                };
                ((scope, f.node.clone()), f.state.clone())
            })
            .collect();
        let given_applies = self.credibility.is_empty() && accumulated == self.facts;
        let mut notes = self.case.notes.clone();
        if let Some(s) = stage {
            notes.extend(s.notes.iter().cloned());
        }
        Ok(StageInput {
            name: stage.map(|s| s.name.clone()).unwrap_or_default(),
            models,
            priors: self.priors.clone(),
            weighting_factors: self.case.models.iter().map(|m| m.weighting_factor).collect(),
            facts,
            shared_groups: self.case.shared_credibility.clone(),
            given: match stage {
                Some(s) if given_applies => s.given.clone(),
                _ => Vec::new(),
            },
            fact_count: self
                .facts
                .keys()
                .map(|(_, n)| n.as_str())
                .collect::<BTreeSet<_>>()
                .len(),
            notes,
        })
    }

    fn compute(&self) -> Result<SessionReport, SessionError> {
        let input = self.stage_input()?;
        let report = evaluate_stage(&input, self.mode)?;
        let parties = self.case.parties();
        Ok(SessionReport {
            case: self.case.name.clone(),
            mode: self.mode.as_str().to_string(),
            stage: StageCursor {
                index: self.stage + 1,
                name: input.name.clone(),
                count: self.case.stages.len(),
            },
            facts: self
                .facts
                .iter()
                .map(|((model, node), state)| AssertedFact {
                    model: model.clone(),
                    node: node.clone(),
                    state: state.clone(),
                })
                .collect(),
            priors: parties.iter().map(|p| p.to_string()).zip(self.priors.iter().copied()).collect(),
            credibility: self.credibility.clone(),
            case_facts: self
                .case
                .stages
                .iter()
                .enumerate()
                .flat_map(|(i, s)| {
                    s.facts.iter().map(move |f| CaseFactEntry {
                        stage: i + 1,
                        model: match &f.scope {
                            verdict_core::case::FactScope::All => ALL_MODELS.to_string(),
                            verdict_core::case::FactScope::Party(p) => p.clone(),
                        },
                        node: f.node.clone(),
                        state: f.state.clone(),
                    })
                })
                .collect(),
            stages: vec![StageReport::from(&report)],
        })
    }

    /// Facts currently asserted, as evidence for `party`.
    pub fn evidence_for(&self, party: &str) -> Evidence {
        self.facts
            .iter()
            .filter(|((scope, _), _)| scope == ALL_MODELS || scope == party)
            .map(|((_, node), state)| (node.clone(), state.clone()))
            .collect()
    }
}

fn placeholder_report() -> SessionReport {
    SessionReport {
        case: String::new(),
        mode: String::new(),
        stage: StageCursor {
            index: 0,
            name: String::new(),
            count: 0,
        },
        facts: Vec::new(),
        priors: BTreeMap::new(),
        credibility: BTreeMap::new(),
        case_facts: Vec::new(),
        stages: Vec::new(),
    }
}
