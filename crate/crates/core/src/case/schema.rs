//! Wire format of case files. Field names are part of the public contract.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A probability written either as a JSON number or a decimal string
/// (`"1.0E-6"` is accepted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob(pub f64);

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ProbVisitor;

        impl Visitor<'_> for ProbVisitor {
            type Value = Prob;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a probability as a number or decimal string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Prob, E> {
                Ok(Prob(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Prob, E> {
                Ok(Prob(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Prob, E> {
                Ok(Prob(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Prob, E> {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(Prob)
                    .ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }

        d.deserialize_any(ProbVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCase {
    pub case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub models: Vec<RawModel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shared_credibility: Vec<Vec<String>>,
    #[serde(default)]
    pub stages: Vec<RawStage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrated_reference: Option<RawReference>,
}

/// Integrated-model results obtained elsewhere, shown next to `merge` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawReference {
    pub models: BTreeMap<String, Prob>,
    pub guilt: Prob,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub party: String,
    pub prior: Prob,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighting_factor: Option<Prob>,
    pub verdict_conditioning: RawConditioning,
    pub network: RawNetwork,
    pub roles: BTreeMap<String, RawRole>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ignored_facts: Vec<RawIgnoredFact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConditioning {
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNetwork {
    pub variables: Vec<RawVariable>,
    pub cpts: Vec<RawCpt>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVariable {
    pub id: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCpt {
    pub child: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<Vec<Prob>>,
}

/// A role name, or `{"role", "true_state"}` when the true-assertion state is
/// not `"True"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawRole {
    Name(String),
    Detailed(RawRoleDetail),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRoleDetail {
    pub role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_state: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawIgnoredFact {
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<Prob>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStage {
    pub name: String,
    #[serde(default)]
    pub facts: Vec<RawFact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub revisions: Vec<RawRevision>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub given: Vec<RawGiven>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFact {
    /// A party, or `"*"` for a fact every model is scored against.
    pub model: String,
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRevision {
    pub party: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub add_nodes: Vec<RawNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub replace_cpts: Vec<RawCpt>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub set_roles: BTreeMap<String, RawRole>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNode {
    pub id: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<Vec<Prob>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGiven {
    pub party: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plausibility: Option<Prob>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guilt: Option<Prob>,
}
