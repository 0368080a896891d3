//! Competing legal arguments as independent discrete Bayesian networks,
//! compared and averaged by model plausibility against the case facts.

pub mod argument;
pub mod bmca;
pub mod bn;
pub mod case;
pub mod display;
pub mod integrated;
pub mod scalar;

pub use scalar::Probability;

/// Network over `f64` probabilities: the production scalar.
pub type BayesianNetwork = bn::Network<f64>;
/// Network over exact rationals, for cross-checking floating-point results.
pub type ExactNetwork = bn::Network<num::BigRational>;
pub type Cpt = bn::Cpt<f64>;
pub type Distribution = bn::Distribution<f64>;
pub use bn::{BnError, Evidence, Variable};
