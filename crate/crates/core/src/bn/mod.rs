//! Discrete Bayesian networks: representation, validation, and exact
//! inference by variable elimination, with a brute-force enumeration oracle.
//!
//! Everything here is generic over the probability scalar; see
//! [`crate::scalar::Probability`].

mod elimination;
mod enumerate;
mod factor;
mod network;
mod validate;

use thiserror::Error;

pub use elimination::{posterior_marginal, probability_of_evidence, probability_of_evidence_with_order};
pub use enumerate::{enumerate_joint_oracle, joint_probability, ORACLE_STATE_LIMIT};
pub use factor::Factor;
pub use network::{Cpt, Distribution, Evidence, Network, Variable};
pub use validate::{validate_network, Violation, ROW_SUM_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BnError {
    #[error("network is invalid ({} violation(s)): {}", .0.len(), first_violation(.0))]
    InvalidNetwork(Vec<Violation>),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("variable '{variable}' has no state '{state}'")]
    UnknownState { variable: String, state: String },
    #[error("conflicting evidence for '{variable}': '{first}' vs '{second}'")]
    ConflictingEvidence {
        variable: String,
        first: String,
        second: String,
    },
    #[error("assignment is missing variables: {}", .missing.join(", "))]
    IncompleteAssignment { missing: Vec<String> },
    #[error("query variable '{0}' is also observed")]
    QueryInEvidence(String),
    #[error("evidence has probability zero")]
    ZeroEvidence,
    #[error("joint state space {size} exceeds the enumeration limit {limit}")]
    StateSpaceTooLarge { size: u128, limit: u128 },
    #[error("elimination order must list every unobserved variable exactly once")]
    InvalidEliminationOrder,
}

fn first_violation(v: &[Violation]) -> String {
    v.first().map(|v| v.to_string()).unwrap_or_default()
}
