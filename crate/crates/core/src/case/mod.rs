//! Case files: the replayable trial. Parsing, validation, serialization and
//! per-stage model/fact assembly.

pub mod report;
pub mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::argument::{ArgumentError, ArgumentModel, FactStatus, NodeRole, VerdictConditioning, DEFAULT_TRUE_STATE};
use crate::bmca::{
    self, shared_credibility_union, BmcaError, ComputationMode, FactPartition, GivenInput, QualifiedNode,
    SharedCredibilityNetwork, StageInput,
};
use crate::bn::BnError;
use crate::{BayesianNetwork, Cpt, Evidence, Variable};

use schema::*;

pub use report::{emit_report, ReportDocument, ReportFormat};

/// Fact scope meaning "every model".
pub const ALL_MODELS: &str = "*";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub path: String,
    pub message: String,
}

impl ValidationIssue {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ValidationIssue {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid case file:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<ValidationIssue>),
}

impl CaseError {
    pub fn kind(&self) -> &'static str {
        match self {
            CaseError::Syntax { .. } => "syntax",
            CaseError::Schema { .. } => "schema",
            CaseError::Validation(_) => "validation",
        }
    }

    /// The error as located issues; syntax errors are located as `line:column`.
    pub fn issues(&self) -> Vec<ValidationIssue> {
        match self {
            CaseError::Syntax { line, column, message } => {
                vec![ValidationIssue::new(format!("{line}:{column}"), message)]
            }
            CaseError::Schema { path, message } => vec![ValidationIssue::new(path.clone(), message)],
            CaseError::Validation(issues) => issues.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseModel {
    pub prior: f64,
    pub weighting_factor: f64,
    pub model: ArgumentModel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactScope {
    All,
    Party(String),
}

impl FactScope {
    pub fn applies_to(&self, party: &str) -> bool {
        match self {
            FactScope::All => true,
            FactScope::Party(p) => p == party,
        }
    }

    fn as_str(&self) -> &str {
        match self {
            FactScope::All => ALL_MODELS,
            FactScope::Party(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseFact {
    pub scope: FactScope,
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAssignment {
    pub role: NodeRole,
    pub true_state: Option<String>,
}

/// A party's model change at a stage. Applied as: add nodes, replace
/// tables, set roles.
#[derive(Debug, Clone, PartialEq)]
pub struct Revision {
    pub party: String,
    pub add_nodes: Vec<(Variable, Cpt)>,
    pub replace_cpts: Vec<Cpt>,
    pub set_roles: BTreeMap<String, RoleAssignment>,
}

impl Revision {
    pub fn apply(&self, model: &ArgumentModel) -> Result<ArgumentModel, ArgumentError> {
        let mut out = model.clone();
        for (var, cpt) in &self.add_nodes {
            if out.network.contains(&var.id) {
                return Err(ArgumentError::DuplicateNodeId(var.id.clone()));
            }
            out.network.add_node(var.clone(), cpt.clone());
        }
        for cpt in &self.replace_cpts {
            out.network.replace_cpt(cpt.clone())?;
        }
        for (node, assignment) in &self.set_roles {
            if !out.network.contains(node) {
                return Err(ArgumentError::UnknownNode(node.clone()));
            }
            set_role(&mut out, node, assignment);
        }
        Ok(out)
    }
}

fn set_role(model: &mut ArgumentModel, node: &str, assignment: &RoleAssignment) {
    model.roles.insert(node.to_string(), assignment.role);
    match &assignment.true_state {
        Some(s) => model.true_states.insert(node.to_string(), s.clone()),
        None => model.true_states.remove(node),
    };
    if assignment.role != NodeRole::Fact(FactStatus::Ignored) {
        model.ignored_fact_distributions.remove(node);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStage {
    pub name: String,
    pub facts: Vec<CaseFact>,
    pub revisions: Vec<Revision>,
    pub given: Vec<GivenInput>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseFile {
    pub name: String,
    pub mode: Option<ComputationMode>,
    pub models: Vec<CaseModel>,
    pub shared_credibility: Vec<Vec<QualifiedNode>>,
    pub stages: Vec<CaseStage>,
    pub notes: Vec<String>,
    pub integrated_reference: Option<IntegratedReference>,
}

/// Externally obtained integrated-model results for side-by-side display.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedReference {
    /// P(Models = party | all facts).
    pub models: BTreeMap<String, f64>,
    /// P(guilty | all facts).
    pub guilt: f64,
    pub note: Option<String>,
}

impl CaseFile {
    pub fn parties(&self) -> Vec<&str> {
        self.models.iter().map(|m| m.model.party.as_str()).collect()
    }

    pub fn priors(&self) -> Vec<f64> {
        self.models.iter().map(|m| m.prior).collect()
    }

    pub fn default_mode(&self) -> ComputationMode {
        self.mode.unwrap_or_default()
    }

    pub fn initial_models(&self) -> Vec<ArgumentModel> {
        self.models.iter().map(|m| m.model.clone()).collect()
    }

    /// Model versions in force at stage `stage` (revisions of stages
    /// `0..=stage` applied in order).
    pub fn models_at(&self, stage: usize) -> Result<Vec<ArgumentModel>, ArgumentError> {
        let mut models = self.initial_models();
        for s in self.stages.iter().take(stage + 1) {
            for rev in &s.revisions {
                if let Some(m) = models.iter_mut().find(|m| m.party == rev.party) {
                    *m = rev.apply(m)?;
                }
            }
        }
        Ok(models)
    }

    /// Facts asserted up to and including `stage` that apply to `party`,
    /// split into opening-stage and later facts.
    pub fn facts_for(&self, party: &str, stage: usize) -> FactPartition {
        let mut out = FactPartition::default();
        for (idx, s) in self.stages.iter().enumerate().take(stage + 1) {
            let target = if idx == 0 { &mut out.primary } else { &mut out.secondary };
            for f in s.facts.iter().filter(|f| f.scope.applies_to(party)) {
                if !target.contains(&f.node) {
                    target.insert(f.node.clone(), f.state.clone());
                }
            }
        }
        let primary = out.primary.clone();
        out.secondary = out
            .secondary
            .iter()
            .filter(|(n, _)| !primary.contains(n))
            .collect();
        out
    }

    /// Every fact asserted up to and including `stage`, any scope.
    pub fn accumulated_facts(&self, stage: usize) -> Vec<&CaseFact> {
        self.stages
            .iter()
            .take(stage + 1)
            .flat_map(|s| s.facts.iter())
            .collect()
    }

    /// Number of distinct fact nodes asserted up to `stage`.
    pub fn fact_count(&self, stage: usize) -> usize {
        self.accumulated_facts(stage)
            .iter()
            .map(|f| f.node.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn stage_input(&self, stage: usize) -> Result<StageInput, BmcaError> {
        let s = self
            .stages
            .get(stage)
            .ok_or_else(|| BmcaError::InvalidEnsemble(format!("no stage {}", stage + 1)))?;
        let models = self.models_at(stage)?;
        let facts = models.iter().map(|m| self.facts_for(&m.party, stage)).collect();
        let mut notes = self.notes.clone();
        notes.extend(s.notes.iter().cloned());
        Ok(StageInput {
            name: s.name.clone(),
            models,
            priors: self.priors(),
            weighting_factors: self.models.iter().map(|m| m.weighting_factor).collect(),
            facts,
            shared_groups: self.shared_credibility.clone(),
            given: s.given.clone(),
            fact_count: self.fact_count(stage),
            notes,
        })
    }
}

/// Union of all model networks at `stage` with each shared-credibility
/// group collapsed to one node.
pub fn build_shared_credibility_network(cf: &CaseFile, stage: usize) -> Result<SharedCredibilityNetwork, BmcaError> {
    let models = if cf.stages.is_empty() {
        cf.initial_models()
    } else {
        cf.models_at(stage.min(cf.stages.len() - 1))?
    };
    shared_credibility_union(&models, &cf.shared_credibility)
}

/// Parses and validates a case file.
pub fn parse_case_file(text: &str) -> Result<CaseFile, CaseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawCase = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        json_error(e.into_inner(), Some(path))
    })?;
    de.end().map_err(|e| json_error(e, None))?;
    let cf = from_raw(raw)?;
    let issues = validate_case(&cf);
    if issues.is_empty() {
        Ok(cf)
    } else {
        Err(CaseError::Validation(issues))
    }
}

fn json_error(e: serde_json::Error, path: Option<String>) -> CaseError {
    match (e.classify(), path) {
        (serde_json::error::Category::Data, Some(path)) => CaseError::Schema {
            path,
            message: strip_location(&e.to_string()),
        },
        _ => CaseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_location(&e.to_string()),
        },
    }
}

fn strip_location(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn serialize_case_file(cf: &CaseFile) -> String {
    serde_json::to_string_pretty(&to_raw(cf)).expect("case files always serialize")
}

pub fn network_from_raw(raw: &RawNetwork) -> BayesianNetwork {
    BayesianNetwork::new(
        raw.variables
            .iter()
            .map(|v| Variable {
                id: v.id.clone(),
                states: v.states.clone(),
            })
            .collect(),
        raw.cpts.iter().map(cpt_from_raw).collect(),
    )
}

pub fn network_to_raw(net: &BayesianNetwork) -> RawNetwork {
    RawNetwork {
        variables: net
            .variables()
            .iter()
            .map(|v| RawVariable {
                id: v.id.clone(),
                states: v.states.clone(),
            })
            .collect(),
        cpts: net.cpts().iter().map(cpt_to_raw).collect(),
    }
}

fn cpt_from_raw(c: &RawCpt) -> Cpt {
    Cpt {
        child: c.child.clone(),
        parents: c.parents.clone(),
        rows: rows_from_raw(&c.rows),
    }
}

fn cpt_to_raw(c: &Cpt) -> RawCpt {
    RawCpt {
        child: c.child.clone(),
        parents: c.parents.clone(),
        rows: rows_to_raw(&c.rows),
    }
}

fn rows_from_raw(rows: &[Vec<Prob>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|p| p.0).collect()).collect()
}

fn rows_to_raw(rows: &[Vec<f64>]) -> Vec<Vec<Prob>> {
    rows.iter().map(|r| r.iter().map(|p| Prob(*p)).collect()).collect()
}

fn role_from_raw(raw: &RawRole, path: &str, issues: &mut Vec<ValidationIssue>) -> Option<RoleAssignment> {
    let (name, true_state) = match raw {
        RawRole::Name(n) => (n.as_str(), None),
        RawRole::Detailed(d) => (d.role.as_str(), d.true_state.clone()),
    };
    match NodeRole::parse(name) {
        Some(role) => Some(RoleAssignment { role, true_state }),
        None => {
            issues.push(ValidationIssue::new(path, format!("unknown role '{name}'")));
            None
        }
    }
}

fn role_to_raw(role: NodeRole, true_state: Option<&String>) -> RawRole {
    match true_state {
        Some(s) => RawRole::Detailed(RawRoleDetail {
            role: role.name().to_string(),
            true_state: Some(s.clone()),
        }),
        None => RawRole::Name(role.name().to_string()),
    }
}

fn from_raw(raw: RawCase) -> Result<CaseFile, CaseError> {
    let mut issues = Vec::new();
    let mode = match raw.mode.as_deref().map(str::parse::<ComputationMode>) {
        None => None,
        Some(Ok(m)) => Some(m),
        Some(Err(e)) => {
            issues.push(ValidationIssue::new("mode", e));
            None
        }
    };

    let mut models = Vec::with_capacity(raw.models.len());
    for (i, m) in raw.models.iter().enumerate() {
        let path = format!("models[{i}]");
        let mut am = ArgumentModel::new(
            m.party.clone(),
            network_from_raw(&m.network),
            BTreeMap::new(),
            VerdictConditioning {
                node: m.verdict_conditioning.node.clone(),
                state: m.verdict_conditioning.state.clone(),
            },
        );
        for (node, role) in &m.roles {
            if let Some(a) = role_from_raw(role, &format!("{path}.roles.{node}"), &mut issues) {
                set_role(&mut am, node, &a);
            }
        }
        for (j, ig) in m.ignored_facts.iter().enumerate() {
            let ipath = format!("{path}.ignored_facts[{j}]");
            let prior: Option<Vec<f64>> = ig.prior.as_ref().map(|p| p.iter().map(|x| x.0).collect());
            match am.role(&ig.node) {
                None | Some(NodeRole::Fact(FactStatus::Ignored)) => {}
                Some(r) => {
                    issues.push(ValidationIssue::new(
                        &ipath,
                        format!("'{}' is declared ignored but has role {}", ig.node, r.name()),
                    ));
                    continue;
                }
            }
            if !am.network.contains(&ig.node) {
                let var = Variable::boolean(ig.node.clone());
                let cpt = Cpt::uniform(ig.node.clone(), var.cardinality());
                am.network.add_node(var, cpt);
            }
            let result = match prior {
                Some(p) => am.set_ignored_fact(&ig.node, Some(p)),
                None => {
                    let mut out = am.clone();
                    out.roles
                        .insert(ig.node.clone(), NodeRole::Fact(FactStatus::Ignored));
                    Ok(out)
                }
            };
            match result {
                Ok(out) => am = out,
                Err(e) => issues.push(ValidationIssue::new(&ipath, e)),
            }
        }
        models.push(CaseModel {
            prior: m.prior.0,
            weighting_factor: m.weighting_factor.map_or(1.0, |w| w.0),
            model: am,
        });
    }

    let mut shared = Vec::with_capacity(raw.shared_credibility.len());
    for (g, group) in raw.shared_credibility.iter().enumerate() {
        let mut members = Vec::with_capacity(group.len());
        for (k, id) in group.iter().enumerate() {
            match id.parse::<QualifiedNode>() {
                Ok(q) => members.push(q),
                Err(e) => issues.push(ValidationIssue::new(format!("shared_credibility[{g}][{k}]"), e)),
            }
        }
        shared.push(members);
    }

    let mut stages = Vec::with_capacity(raw.stages.len());
    for (s, st) in raw.stages.iter().enumerate() {
        let path = format!("stages[{s}]");
        let facts = st
            .facts
            .iter()
            .map(|f| CaseFact {
                scope: if f.model == ALL_MODELS {
                    FactScope::All
                } else {
                    FactScope::Party(f.model.clone())
                },
                node: f.node.clone(),
                state: f.state.clone(),
            })
            .collect();
        let mut revisions = Vec::with_capacity(st.revisions.len());
        for (r, rev) in st.revisions.iter().enumerate() {
            let rpath = format!("{path}.revisions[{r}]");
            let mut set_roles = BTreeMap::new();
            for (node, role) in &rev.set_roles {
                if let Some(a) = role_from_raw(role, &format!("{rpath}.set_roles.{node}"), &mut issues) {
                    set_roles.insert(node.clone(), a);
                }
            }
            revisions.push(Revision {
                party: rev.party.clone(),
                add_nodes: rev
                    .add_nodes
                    .iter()
                    .map(|n| {
                        (
                            Variable {
                                id: n.id.clone(),
                                states: n.states.clone(),
                            },
                            Cpt {
                                child: n.id.clone(),
                                parents: n.parents.clone(),
                                rows: rows_from_raw(&n.rows),
                            },
                        )
                    })
                    .collect(),
                replace_cpts: rev.replace_cpts.iter().map(cpt_from_raw).collect(),
                set_roles,
            });
        }
        stages.push(CaseStage {
            name: st.name.clone(),
            facts,
            revisions,
            given: st
                .given
                .iter()
                .map(|g| GivenInput {
                    party: g.party.clone(),
                    plausibility: g.plausibility.map(|p| p.0),
                    guilt: g.guilt.map(|p| p.0),
                })
                .collect(),
            notes: st.notes.clone(),
        });
    }

    if !issues.is_empty() {
        return Err(CaseError::Validation(issues));
    }
    Ok(CaseFile {
        name: raw.case,
        mode,
        models,
        shared_credibility: shared,
        stages,
        notes: raw.notes,
        integrated_reference: raw.integrated_reference.map(|r| IntegratedReference {
            models: r.models.into_iter().map(|(k, p)| (k, p.0)).collect(),
            guilt: r.guilt.0,
            note: r.note,
        }),
    })
}

fn to_raw(cf: &CaseFile) -> RawCase {
    RawCase {
        case: cf.name.clone(),
        mode: cf.mode.map(|m| m.as_str().to_string()),
        models: cf
            .models
            .iter()
            .map(|cm| {
                let m = &cm.model;
                RawModel {
                    party: m.party.clone(),
                    prior: Prob(cm.prior),
                    weighting_factor: (cm.weighting_factor != 1.0).then_some(Prob(cm.weighting_factor)),
                    verdict_conditioning: RawConditioning {
                        node: m.verdict_conditioning.node.clone(),
                        state: m.verdict_conditioning.state.clone(),
                    },
                    network: network_to_raw(&m.network),
                    roles: m
                        .roles
                        .iter()
                        .map(|(n, r)| (n.clone(), role_to_raw(*r, m.true_states.get(n))))
                        .collect(),
                    ignored_facts: m
                        .ignored_facts()
                        .into_iter()
                        .map(|n| RawIgnoredFact {
                            node: n.to_string(),
                            prior: m
                                .ignored_fact_distributions
                                .get(n)
                                .map(|d| d.iter().map(|p| Prob(*p)).collect()),
                        })
                        .collect(),
                }
            })
            .collect(),
        shared_credibility: cf
            .shared_credibility
            .iter()
            .map(|g| g.iter().map(|q| q.to_string()).collect())
            .collect(),
        stages: cf
            .stages
            .iter()
            .map(|s| RawStage {
                name: s.name.clone(),
                facts: s
                    .facts
                    .iter()
                    .map(|f| RawFact {
                        model: f.scope.as_str().to_string(),
                        node: f.node.clone(),
                        state: f.state.clone(),
                    })
                    .collect(),
                revisions: s
                    .revisions
                    .iter()
                    .map(|r| RawRevision {
                        party: r.party.clone(),
                        add_nodes: r
                            .add_nodes
                            .iter()
                            .map(|(v, c)| RawNode {
                                id: v.id.clone(),
                                states: v.states.clone(),
                                parents: c.parents.clone(),
                                rows: rows_to_raw(&c.rows),
                            })
                            .collect(),
                        replace_cpts: r.replace_cpts.iter().map(cpt_to_raw).collect(),
                        set_roles: r
                            .set_roles
                            .iter()
                            .map(|(n, a)| (n.clone(), role_to_raw(a.role, a.true_state.as_ref())))
                            .collect(),
                    })
                    .collect(),
                given: s
                    .given
                    .iter()
                    .map(|g| RawGiven {
                        party: g.party.clone(),
                        plausibility: g.plausibility.map(Prob),
                        guilt: g.guilt.map(Prob),
                    })
                    .collect(),
                notes: s.notes.clone(),
            })
            .collect(),
        notes: cf.notes.clone(),
        integrated_reference: cf.integrated_reference.as_ref().map(|r| RawReference {
            models: r.models.iter().map(|(k, p)| (k.clone(), Prob(*p))).collect(),
            guilt: Prob(r.guilt),
            note: r.note.clone(),
        }),
    }
}

/// Every defect of a structurally well-formed case file.
pub fn validate_case(cf: &CaseFile) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut parties = BTreeSet::new();
    for (i, cm) in cf.models.iter().enumerate() {
        let path = format!("models[{i}]");
        let party = &cm.model.party;
        if party.is_empty() || party == ALL_MODELS || party.contains('/') {
            issues.push(ValidationIssue::new(
                format!("{path}.party"),
                format!("'{party}' is not a valid party label"),
            ));
        }
        if !parties.insert(party.as_str()) {
            issues.push(ValidationIssue::new(
                format!("{path}.party"),
                format!("duplicate party '{party}'"),
            ));
        }
        if !(cm.weighting_factor > 0.0 && cm.weighting_factor.is_finite()) {
            issues.push(ValidationIssue::new(
                format!("{path}.weighting_factor"),
                format!("{} is not positive", cm.weighting_factor),
            ));
        }
        for v in cm.model.validate() {
            issues.push(ValidationIssue::new(format!("{path}.network"), v));
        }
    }
    if let Err(e) = bmca::check_priors(&cf.priors(), cf.models.len()) {
        issues.push(ValidationIssue::new("models", e));
    }
    if let Some(r) = &cf.integrated_reference {
        for (party, p) in &r.models {
            if !parties.contains(party.as_str()) {
                issues.push(ValidationIssue::new(
                    format!("integrated_reference.models.{party}"),
                    format!("unknown party '{party}'"),
                ));
            }
            if !(0.0..=1.0).contains(p) {
                issues.push(ValidationIssue::new(
                    format!("integrated_reference.models.{party}"),
                    format!("{p} is outside [0, 1]"),
                ));
            }
        }
        if !(0.0..=1.0).contains(&r.guilt) {
            issues.push(ValidationIssue::new(
                "integrated_reference.guilt",
                format!("{} is outside [0, 1]", r.guilt),
            ));
        }
    }
    if !issues.is_empty() {
        return issues;
    }

    let mut seen_facts: BTreeMap<(String, String), String> = BTreeMap::new();
    for (s, stage) in cf.stages.iter().enumerate() {
        let path = format!("stages[{s}]");
        for (r, rev) in stage.revisions.iter().enumerate() {
            if !parties.contains(rev.party.as_str()) {
                issues.push(ValidationIssue::new(
                    format!("{path}.revisions[{r}].party"),
                    format!("unknown party '{}'", rev.party),
                ));
            }
        }
        let models = match cf.models_at(s) {
            Ok(m) => m,
            Err(e) => {
                issues.push(ValidationIssue::new(format!("{path}.revisions"), e));
                return issues;
            }
        };
        for m in &models {
            for v in m.validate() {
                issues.push(ValidationIssue::new(format!("{path}.revisions.{}", m.party), v));
            }
        }
        for (k, fact) in stage.facts.iter().enumerate() {
            let fpath = format!("{path}.facts[{k}]");
            if let FactScope::Party(p) = &fact.scope {
                if !parties.contains(p.as_str()) {
                    issues.push(ValidationIssue::new(format!("{fpath}.model"), format!("unknown party '{p}'")));
                    continue;
                }
            }
            for m in models.iter().filter(|m| fact.scope.applies_to(&m.party)) {
                let single = Evidence::new().with(fact.node.clone(), fact.state.clone());
                match m.check_facts(&single) {
                    Ok(()) => {}
                    Err(ArgumentError::UnknownNode(node)) => issues.push(ValidationIssue::new(
                        &fpath,
                        BmcaError::MissingFactCoverage {
                            party: m.party.clone(),
                            node,
                        },
                    )),
                    Err(e) => issues.push(ValidationIssue::new(&fpath, format!("{}: {e}", m.party))),
                }
                let key = (m.party.clone(), fact.node.clone());
                if let Some(prev) = seen_facts.insert(key, fact.state.clone()) {
                    if prev != fact.state {
                        issues.push(ValidationIssue::new(
                            &fpath,
                            BnError::ConflictingEvidence {
                                variable: fact.node.clone(),
                                first: prev,
                                second: fact.state.clone(),
                            },
                        ));
                    }
                }
            }
        }
        for (k, g) in stage.given.iter().enumerate() {
            let gpath = format!("{path}.given[{k}]");
            if !parties.contains(g.party.as_str()) {
                issues.push(ValidationIssue::new(
                    format!("{gpath}.party"),
                    format!("unknown party '{}'", g.party),
                ));
            }
            for (name, v) in [("plausibility", g.plausibility), ("guilt", g.guilt)] {
                if let Some(v) = v {
                    if !(0.0..=1.0).contains(&v) {
                        issues.push(ValidationIssue::new(format!("{gpath}.{name}"), format!("{v} outside [0, 1]")));
                    }
                }
            }
        }
        if let Err(e) = shared_credibility_union(&models, &cf.shared_credibility) {
            issues.push(ValidationIssue::new("shared_credibility", format!("{path}: {e}")));
        }
    }

    let mut versions = vec![cf.initial_models()];
    versions.extend((0..cf.stages.len()).filter_map(|s| cf.models_at(s).ok()));
    for (g, group) in cf.shared_credibility.iter().enumerate() {
        for (k, q) in group.iter().enumerate() {
            let found = versions
                .iter()
                .flatten()
                .any(|m| m.party == q.party && m.role(&q.node) == Some(NodeRole::Credibility));
            if !found {
                issues.push(ValidationIssue::new(
                    format!("shared_credibility[{g}][{k}]"),
                    format!("'{q}' is not a credibility node in any model version"),
                ));
            }
        }
    }
    if cf.stages.is_empty() {
        if let Err(e) = shared_credibility_union(&cf.initial_models(), &cf.shared_credibility) {
            issues.push(ValidationIssue::new("shared_credibility", e));
        }
    }
    issues
}

/// True-assertion state used when a fact is asserted without naming one.
pub fn default_true_state(model: &ArgumentModel, node: &str) -> String {
    model
        .true_states
        .get(node)
        .cloned()
        .unwrap_or_else(|| DEFAULT_TRUE_STATE.to_string())
}
