//! One party's argument: a network annotated with node roles, the verdict
//! it is scored under, and the facts it declines to explain.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bn::{self, BnError, Violation};
use crate::{BayesianNetwork, Cpt, Distribution, Evidence, Variable};

/// State name used as the true assertion when no override is declared.
pub const DEFAULT_TRUE_STATE: &str = "True";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactStatus {
    Explained,
    Ignored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeRole {
    Guilt,
    Hypothesis,
    Fact(FactStatus),
    Credibility,
    ScenarioSwitch,
}

impl NodeRole {
    pub fn is_fact(self) -> bool {
        matches!(self, NodeRole::Fact(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeRole::Guilt => "guilt",
            NodeRole::Hypothesis => "hypothesis",
            NodeRole::Fact(FactStatus::Explained) => "fact",
            NodeRole::Fact(FactStatus::Ignored) => "ignored_fact",
            NodeRole::Credibility => "credibility",
            NodeRole::ScenarioSwitch => "scenario_switch",
        }
    }

    pub fn parse(name: &str) -> Option<NodeRole> {
        Some(match name {
            "guilt" => NodeRole::Guilt,
            "hypothesis" => NodeRole::Hypothesis,
            "fact" => NodeRole::Fact(FactStatus::Explained),
            "ignored_fact" => NodeRole::Fact(FactStatus::Ignored),
            "credibility" => NodeRole::Credibility,
            "scenario_switch" => NodeRole::ScenarioSwitch,
            _ => return None,
        })
    }
}

/// The guilt-node state a model is conditioned on when scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictConditioning {
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentModel {
    pub party: String,
    pub network: BayesianNetwork,
    pub roles: BTreeMap<String, NodeRole>,
    pub verdict_conditioning: VerdictConditioning,
    /// Designated true-assertion state for fact, guilt and credibility nodes
    /// whose true state is not named [`DEFAULT_TRUE_STATE`].
    pub true_states: BTreeMap<String, String>,
    /// Fact-finder priors for ignored facts that replace the uniform default.
    pub ignored_fact_distributions: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArgumentError {
    #[error(transparent)]
    Bn(#[from] BnError),
    #[error("'{0}' is not a fact node and cannot be used as evidence")]
    NonFactEvidence(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("node id '{0}' already exists")]
    DuplicateNodeId(String),
    #[error("hypothesis node '{0}' does not exist")]
    MissingHypothesis(String),
    #[error("hypothesis node '{0}' must have exactly two states")]
    NonBooleanHypothesis(String),
    #[error("probability {value} for {what} is outside [0, 1]")]
    InvalidProbability { what: String, value: f64 },
    #[error("invalid distribution for '{node}': {reason}")]
    InvalidDistribution { node: String, reason: String },
    #[error("argument model '{party}' is invalid: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel {
        party: String,
        violations: Vec<ArgumentViolation>,
    },
}

/// A defect in an argument model. Network defects are wrapped so that an
/// empty model report implies an empty network report.
#[derive(Debug, Clone, PartialEq)]
pub enum ArgumentViolation {
    Network(Violation),
    GuiltCardinalityViolation { guilt_nodes: Vec<String> },
    NonBooleanGuilt { node: String, states: usize },
    MissingRole { node: String },
    RoleForUnknownNode { node: String },
    MissingTrueState { node: String, expected: String },
    IgnoredFactShapeViolation { node: String },
    ConditioningNotGuilt { node: String },
    ConditioningUnknownState { node: String, state: String },
    CredibilityInConditioning { node: String },
}

impl fmt::Display for ArgumentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgumentViolation::Network(v) => write!(f, "{v}"),
            ArgumentViolation::GuiltCardinalityViolation { guilt_nodes } => write!(
                f,
                "expected exactly one guilt node, found {} [{}]",
                guilt_nodes.len(),
                guilt_nodes.join(", ")
            ),
            ArgumentViolation::NonBooleanGuilt { node, states } => {
                write!(f, "guilt node '{node}' has {states} states, must be Boolean")
            }
            ArgumentViolation::MissingRole { node } => write!(f, "node '{node}' has no role"),
            ArgumentViolation::RoleForUnknownNode { node } => {
                write!(f, "role assigned to unknown node '{node}'")
            }
            ArgumentViolation::MissingTrueState { node, expected } => {
                write!(f, "node '{node}' has no true-assertion state '{expected}'")
            }
            ArgumentViolation::IgnoredFactShapeViolation { node } => write!(
                f,
                "ignored fact '{node}' has parents but no override distribution"
            ),
            ArgumentViolation::ConditioningNotGuilt { node } => {
                write!(f, "verdict conditioning node '{node}' is not the guilt node")
            }
            ArgumentViolation::ConditioningUnknownState { node, state } => {
                write!(f, "verdict conditioning state '{state}' is not a state of '{node}'")
            }
            ArgumentViolation::CredibilityInConditioning { node } => {
                write!(f, "credibility node '{node}' used as verdict conditioning")
            }
        }
    }
}

impl ArgumentModel {
    pub fn new(
        party: impl Into<String>,
        network: BayesianNetwork,
        roles: BTreeMap<String, NodeRole>,
        verdict_conditioning: VerdictConditioning,
    ) -> Self {
        ArgumentModel {
            party: party.into(),
            network,
            roles,
            verdict_conditioning,
            true_states: BTreeMap::new(),
            ignored_fact_distributions: BTreeMap::new(),
        }
    }

    pub fn role(&self, node: &str) -> Option<NodeRole> {
        self.roles.get(node).copied()
    }

    pub fn nodes_with_role(&self, pred: impl Fn(NodeRole) -> bool) -> Vec<&str> {
        self.roles
            .iter()
            .filter(|(_, r)| pred(**r))
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn guilt_node(&self) -> Option<&str> {
        self.nodes_with_role(|r| r == NodeRole::Guilt).first().copied()
    }

    pub fn credibility_nodes(&self) -> Vec<&str> {
        self.nodes_with_role(|r| r == NodeRole::Credibility)
    }

    pub fn fact_nodes(&self) -> Vec<&str> {
        self.nodes_with_role(NodeRole::is_fact)
    }

    pub fn ignored_facts(&self) -> Vec<&str> {
        self.nodes_with_role(|r| r == NodeRole::Fact(FactStatus::Ignored))
    }

    /// Name of the designated true state of `node`, whether or not the
    /// variable actually has it.
    pub fn true_state_name(&self, node: &str) -> &str {
        self.true_states
            .get(node)
            .map(String::as_str)
            .unwrap_or(DEFAULT_TRUE_STATE)
    }

    /// Index of the designated true state of `node`.
    pub fn true_state(&self, node: &str) -> Option<usize> {
        self.network
            .variable(node)?
            .state_index(self.true_state_name(node))
    }

    /// The guilt-node state read as "guilty".
    pub fn guilty_state(&self) -> Option<&str> {
        self.guilt_node().map(|g| self.true_state_name(g))
    }

    pub fn validate(&self) -> Vec<ArgumentViolation> {
        validate_argument_model(self)
    }

    /// Errors with the full violation list unless the model is valid.
    pub fn ensure_valid(&self) -> Result<(), ArgumentError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ArgumentError::InvalidModel {
                party: self.party.clone(),
                violations,
            })
        }
    }

    /// Fails with `NonFactEvidence` if `facts` touches a non-fact node.
    pub fn check_facts(&self, facts: &Evidence) -> Result<(), ArgumentError> {
        for node in facts.nodes() {
            match self.role(node) {
                Some(role) if role.is_fact() => {}
                Some(_) => return Err(ArgumentError::NonFactEvidence(node.to_string())),
                None if self.network.contains(node) => {
                    return Err(ArgumentError::NonFactEvidence(node.to_string()))
                }
                None => return Err(ArgumentError::UnknownNode(node.to_string())),
            }
        }
        facts.check(&self.network)?;
        Ok(())
    }

    /// P(guilt = guilty | facts), hypotheses and credibility marginalized.
    pub fn guilt_posterior(&self, facts: &Evidence) -> Result<f64, ArgumentError> {
        self.check_facts(facts)?;
        let guilt = self
            .guilt_node()
            .ok_or_else(|| self.invalid())?
            .to_string();
        let dist = bn::posterior_marginal(&self.network, &guilt, facts)?;
        let guilty = self.guilty_state().unwrap_or(DEFAULT_TRUE_STATE);
        dist.probability(guilty).copied().ok_or_else(|| {
            ArgumentError::Bn(BnError::UnknownState {
                variable: guilt.clone(),
                state: guilty.to_string(),
            })
        })
    }

    /// Posterior of each credibility node given the facts, in id order.
    pub fn credibility_posterior(&self, facts: &Evidence) -> Result<Vec<Distribution>, ArgumentError> {
        self.check_facts(facts)?;
        self.credibility_nodes()
            .into_iter()
            .map(|c| Ok(bn::posterior_marginal(&self.network, c, facts)?))
            .collect()
    }

    /// Marks `node` as an ignored fact. Without an override the node becomes
    /// parentless and uniform; with one, the override is installed as its
    /// prior.
    pub fn set_ignored_fact(&self, node: &str, dist: Option<Vec<f64>>) -> Result<ArgumentModel, ArgumentError> {
        let variable = self
            .network
            .variable(node)
            .ok_or_else(|| ArgumentError::UnknownNode(node.to_string()))?;
        let mut out = self.clone();
        let cpt = match &dist {
            Some(d) => {
                check_distribution(node, d, variable.cardinality())?;
                Cpt::prior(node, d.clone())
            }
            None => Cpt::uniform(node, variable.cardinality()),
        };
        out.network.replace_cpt(cpt)?;
        out.roles
            .insert(node.to_string(), NodeRole::Fact(FactStatus::Ignored));
        match dist {
            Some(d) => {
                out.ignored_fact_distributions.insert(node.to_string(), d);
            }
            None => {
                out.ignored_fact_distributions.remove(node);
            }
        }
        Ok(out)
    }

    /// Adds an evidence-accuracy fragment and tags its nodes: the credibility
    /// node as `Credibility`, the assertion as an explained fact.
    pub fn with_idiom(&self, spec: &IdiomSpec) -> Result<ArgumentModel, ArgumentError> {
        let mut out = self.clone();
        out.network = apply_evidence_accuracy_idiom(&self.network, spec)?;
        out.roles
            .insert(spec.credibility.clone(), NodeRole::Credibility);
        out.roles
            .insert(spec.assertion.clone(), NodeRole::Fact(FactStatus::Explained));
        Ok(out)
    }

    fn invalid(&self) -> ArgumentError {
        ArgumentError::InvalidModel {
            party: self.party.clone(),
            violations: self.validate(),
        }
    }
}

pub(crate) fn check_distribution(node: &str, dist: &[f64], cardinality: usize) -> Result<(), ArgumentError> {
    let bad = |reason: String| ArgumentError::InvalidDistribution {
        node: node.to_string(),
        reason,
    };
    if dist.len() != cardinality {
        return Err(bad(format!("{} entries for {} states", dist.len(), cardinality)));
    }
    if let Some(p) = dist.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(bad(format!("entry {p} outside [0, 1]")));
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > bn::ROW_SUM_TOLERANCE {
        return Err(bad(format!("entries sum to {sum}")));
    }
    Ok(())
}

pub fn validate_argument_model(am: &ArgumentModel) -> Vec<ArgumentViolation> {
    let mut out: Vec<ArgumentViolation> = am
        .network
        .validate()
        .into_iter()
        .map(ArgumentViolation::Network)
        .collect();

    for var in am.network.variables() {
        if !am.roles.contains_key(&var.id) {
            out.push(ArgumentViolation::MissingRole { node: var.id.clone() });
        }
    }
    for node in am.roles.keys() {
        if !am.network.contains(node) {
            out.push(ArgumentViolation::RoleForUnknownNode { node: node.clone() });
        }
    }

    let guilt_nodes: Vec<String> = am
        .nodes_with_role(|r| r == NodeRole::Guilt)
        .into_iter()
        .map(String::from)
        .collect();
    if guilt_nodes.len() != 1 {
        out.push(ArgumentViolation::GuiltCardinalityViolation {
            guilt_nodes: guilt_nodes.clone(),
        });
    }
    for g in &guilt_nodes {
        if let Some(var) = am.network.variable(g) {
            if var.cardinality() != 2 {
                out.push(ArgumentViolation::NonBooleanGuilt {
                    node: g.clone(),
                    states: var.cardinality(),
                });
            }
        }
    }

    for (node, role) in &am.roles {
        let needs_true_state = matches!(
            role,
            NodeRole::Fact(_) | NodeRole::Guilt | NodeRole::Credibility
        );
        if needs_true_state && am.network.contains(node) && am.true_state(node).is_none() {
            out.push(ArgumentViolation::MissingTrueState {
                node: node.clone(),
                expected: am.true_state_name(node).to_string(),
            });
        }
        if *role == NodeRole::Fact(FactStatus::Ignored) {
            let has_parents = am
                .network
                .cpt(node)
                .is_some_and(|c| !c.parents.is_empty());
            if has_parents && !am.ignored_fact_distributions.contains_key(node) {
                out.push(ArgumentViolation::IgnoredFactShapeViolation { node: node.clone() });
            }
        }
    }

    let vc = &am.verdict_conditioning;
    match am.role(&vc.node) {
        Some(NodeRole::Credibility) => {
            out.push(ArgumentViolation::CredibilityInConditioning { node: vc.node.clone() })
        }
        Some(NodeRole::Guilt) => {}
        _ => out.push(ArgumentViolation::ConditioningNotGuilt { node: vc.node.clone() }),
    }
    if let Some(var) = am.network.variable(&vc.node) {
        if var.state_index(&vc.state).is_none() {
            out.push(ArgumentViolation::ConditioningUnknownState {
                node: vc.node.clone(),
                state: vc.state.clone(),
            });
        }
    }
    out
}

/// Hypothesis -> assertion <- credibility, the evidence accuracy fragment.
#[derive(Debug, Clone, PartialEq)]
pub struct IdiomSpec {
    pub hypothesis: String,
    pub source: String,
    pub assertion: String,
    pub credibility: String,
    /// P(credibility = True).
    pub credibility_prior: f64,
    /// P(assertion = True | hypothesis state, credibility = True), indexed by
    /// the hypothesis's state order.
    pub when_credible: [f64; 2],
    /// P(assertion = True | hypothesis state, credibility = False).
    pub when_not_credible: [f64; 2],
}

pub fn apply_evidence_accuracy_idiom(
    net: &BayesianNetwork,
    spec: &IdiomSpec,
) -> Result<BayesianNetwork, ArgumentError> {
    let hypothesis = net
        .variable(&spec.hypothesis)
        .ok_or_else(|| ArgumentError::MissingHypothesis(spec.hypothesis.clone()))?;
    if hypothesis.cardinality() != 2 {
        return Err(ArgumentError::NonBooleanHypothesis(spec.hypothesis.clone()));
    }
    for id in [&spec.assertion, &spec.credibility] {
        if net.contains(id) {
            return Err(ArgumentError::DuplicateNodeId(id.clone()));
        }
    }
    if spec.assertion == spec.credibility {
        return Err(ArgumentError::DuplicateNodeId(spec.assertion.clone()));
    }
    let probabilities = [
        ("credibility prior", spec.credibility_prior),
        ("assertion | credible", spec.when_credible[0]),
        ("assertion | credible", spec.when_credible[1]),
        ("assertion | not credible", spec.when_not_credible[0]),
        ("assertion | not credible", spec.when_not_credible[1]),
    ];
    for (what, value) in probabilities {
        if !(0.0..=1.0).contains(&value) {
            return Err(ArgumentError::InvalidProbability {
                what: format!("{what} ({})", spec.source),
                value,
            });
        }
    }

    let mut out = net.clone();
    out.add_node(
        Variable::boolean(spec.credibility.clone()),
        Cpt::boolean(spec.credibility.clone(), &[], &[spec.credibility_prior]),
    );
    // Parents (hypothesis, credibility); credibility varies fastest.
    let p_true = [
        spec.when_not_credible[0],
        spec.when_credible[0],
        spec.when_not_credible[1],
        spec.when_credible[1],
    ];
    out.add_node(
        Variable::boolean(spec.assertion.clone()),
        Cpt::boolean(
            spec.assertion.clone(),
            &[spec.hypothesis.as_str(), spec.credibility.as_str()],
            &p_true,
        ),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::probability_of_evidence;

    fn killed_only() -> BayesianNetwork {
        BayesianNetwork::new(
            vec![Variable::boolean("motive"), Variable::boolean("killed")],
            vec![
                Cpt::boolean("motive", &[], &[0.5]),
                Cpt::boolean("killed", &["motive"], &[0.01, 0.7]),
            ],
        )
    }

    fn eye_witness() -> IdiomSpec {
        IdiomSpec {
            hypothesis: "killed".into(),
            source: "eye witness".into(),
            assertion: "eye_says".into(),
            credibility: "eye_cred".into(),
            credibility_prior: 0.9,
            when_credible: [0.01, 0.99],
            when_not_credible: [0.5, 0.5],
        }
    }

    fn simple_model() -> ArgumentModel {
        let mut roles = BTreeMap::new();
        roles.insert("motive".to_string(), NodeRole::Hypothesis);
        roles.insert("killed".to_string(), NodeRole::Guilt);
        ArgumentModel::new(
            "prosecution",
            killed_only(),
            roles,
            VerdictConditioning { node: "killed".into(), state: "True".into() },
        )
        .with_idiom(&eye_witness())
        .unwrap()
    }

    #[test]
    fn idiom_builds_expected_tables() {
        let net = apply_evidence_accuracy_idiom(&killed_only(), &eye_witness()).unwrap();
        assert!(net.validate().is_empty());
        let cpt = net.cpt("eye_says").unwrap();
        assert_eq!(cpt.parents, vec!["killed".to_string(), "eye_cred".to_string()]);
        let p_true: Vec<f64> = cpt.rows.iter().map(|r| r[1]).collect();
        assert_eq!(p_true, vec![0.5, 0.01, 0.5, 0.99]);
        assert_eq!(net.cpt("eye_cred").unwrap().rows, vec![vec![1.0 - 0.9, 0.9]]);
    }

    #[test]
    fn idiom_rejects_duplicates_and_missing_hypothesis() {
        let mut spec = eye_witness();
        spec.assertion = "motive".into();
        assert!(matches!(
            apply_evidence_accuracy_idiom(&killed_only(), &spec),
            Err(ArgumentError::DuplicateNodeId(_))
        ));
        let mut spec = eye_witness();
        spec.hypothesis = "nowhere".into();
        assert!(matches!(
            apply_evidence_accuracy_idiom(&killed_only(), &spec),
            Err(ArgumentError::MissingHypothesis(_))
        ));
        let mut spec = eye_witness();
        spec.credibility_prior = 1.5;
        assert!(matches!(
            apply_evidence_accuracy_idiom(&killed_only(), &spec),
            Err(ArgumentError::InvalidProbability { .. })
        ));
    }

    #[test]
    fn fully_credible_source_depends_only_on_hypothesis() {
        let mut spec = eye_witness();
        spec.credibility_prior = 1.0;
        spec.when_not_credible = [0.3, 0.3];
        spec.when_credible = [0.2, 0.8];
        let net = apply_evidence_accuracy_idiom(&killed_only(), &spec).unwrap();
        for (state, expect) in [("False", 0.2), ("True", 0.8)] {
            let d = bn::posterior_marginal(&net, "eye_says", &Evidence::new().with("killed", state)).unwrap();
            assert!((d.probabilities[1] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn discredited_source_is_uninformative() {
        let mut spec = eye_witness();
        spec.credibility_prior = 0.0;
        let net = apply_evidence_accuracy_idiom(&killed_only(), &spec).unwrap();
        for state in ["False", "True"] {
            let d = bn::posterior_marginal(&net, "eye_says", &Evidence::new().with("killed", state)).unwrap();
            assert!((d.probabilities[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn valid_model_has_empty_report() {
        assert_eq!(simple_model().validate(), vec![]);
    }

    #[test]
    fn two_guilt_nodes_violate_cardinality() {
        let mut am = simple_model();
        am.roles.insert("motive".into(), NodeRole::Guilt);
        assert!(am
            .validate()
            .iter()
            .any(|v| matches!(v, ArgumentViolation::GuiltCardinalityViolation { guilt_nodes } if guilt_nodes.len() == 2)));
    }

    #[test]
    fn ignored_fact_with_parent_and_no_override_is_a_shape_violation() {
        let mut am = simple_model();
        am.roles
            .insert("eye_says".into(), NodeRole::Fact(FactStatus::Ignored));
        assert_eq!(
            am.validate(),
            vec![ArgumentViolation::IgnoredFactShapeViolation { node: "eye_says".into() }]
        );
    }

    #[test]
    fn credibility_conditioning_is_reported() {
        let mut am = simple_model();
        am.verdict_conditioning = VerdictConditioning { node: "eye_cred".into(), state: "True".into() };
        assert!(am
            .validate()
            .contains(&ArgumentViolation::CredibilityInConditioning { node: "eye_cred".into() }));
    }

    #[test]
    fn set_ignored_fact_installs_uniform_or_override() {
        let am = simple_model().set_ignored_fact("eye_says", None).unwrap();
        let cpt = am.network.cpt("eye_says").unwrap();
        assert!(cpt.parents.is_empty());
        assert_eq!(cpt.rows, vec![vec![0.5, 0.5]]);
        assert!(am.validate().is_empty());

        let am = simple_model()
            .set_ignored_fact("eye_says", Some(vec![0.999, 0.001]))
            .unwrap();
        assert_eq!(am.network.cpt("eye_says").unwrap().rows, vec![vec![0.999, 0.001]]);
        let again = am.set_ignored_fact("eye_says", Some(vec![0.999, 0.001])).unwrap();
        assert_eq!(again, am);

        assert!(matches!(
            simple_model().set_ignored_fact("ghost", None),
            Err(ArgumentError::UnknownNode(_))
        ));
        assert!(matches!(
            simple_model().set_ignored_fact("eye_says", Some(vec![0.2, 0.2])),
            Err(ArgumentError::InvalidDistribution { .. })
        ));
    }

    #[test]
    fn guilt_posterior_rejects_non_fact_evidence() {
        let am = simple_model();
        let e = Evidence::new().with("eye_cred", "True");
        assert_eq!(
            am.guilt_posterior(&e),
            Err(ArgumentError::NonFactEvidence("eye_cred".into()))
        );
    }

    #[test]
    fn credibility_posterior_without_facts_is_prior() {
        let am = simple_model();
        let post = am.credibility_posterior(&Evidence::new()).unwrap();
        assert_eq!(post.len(), 1);
        assert_eq!(post[0].probabilities, vec![1.0 - 0.9, 0.9]);
    }

    #[test]
    fn credibility_update_from_parade_failure() {
        // P(cred | fail) = 0.9*0.01 / (0.9*0.01 + 0.1*0.99)
        let mut am = simple_model();
        am.network.add_node(
            Variable::boolean("parade_fail"),
            Cpt::boolean("parade_fail", &["eye_cred"], &[0.99, 0.01]),
        );
        am.roles
            .insert("parade_fail".into(), NodeRole::Fact(FactStatus::Explained));
        let post = am
            .credibility_posterior(&Evidence::new().with("parade_fail", "True"))
            .unwrap();
        let expect = 0.9 * 0.01 / (0.9 * 0.01 + 0.1 * 0.99);
        assert!((post[0].probabilities[1] - expect).abs() < 1e-12);
        assert!((expect - 0.0833).abs() < 5e-5);
    }

    #[test]
    fn ignored_parentless_fact_is_neutral_for_guilt() {
        let mut am = simple_model();
        am.network
            .add_node(Variable::boolean("silent"), Cpt::boolean("silent", &[], &[0.5]));
        am.roles
            .insert("silent".into(), NodeRole::Fact(FactStatus::Ignored));
        let base = Evidence::new().with("eye_says", "True");
        let with = base.clone().with("silent", "True");
        let g0 = am.guilt_posterior(&base).unwrap();
        let g1 = am.guilt_posterior(&with).unwrap();
        assert!((g0 - g1).abs() < 1e-12);
        let p0 = probability_of_evidence(&am.network, &base).unwrap();
        let p1 = probability_of_evidence(&am.network, &with).unwrap();
        assert!((p1 - 0.5 * p0).abs() < 1e-15);
    }
}
