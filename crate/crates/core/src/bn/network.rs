use std::collections::{BTreeMap, HashMap};

use crate::scalar::Probability;

use super::validate::{validate_network, Violation};
use super::BnError;

/// A discrete random variable with an ordered list of named states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub id: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new(id: impl Into<String>, states: &[&str]) -> Self {
        Variable {
            id: id.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Two-state variable with states `False`, `True` in that order.
    pub fn boolean(id: impl Into<String>) -> Self {
        Self::new(id, &["False", "True"])
    }

    pub fn state_index(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }
}

/// Conditional probability table for one child variable.
///
/// Rows enumerate parent-state combinations with the last listed parent
/// varying fastest; each row is a distribution over the child's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<T> {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<T>>,
}

impl<T: Probability> Cpt<T> {
    pub fn new(child: impl Into<String>, parents: &[&str], rows: Vec<Vec<T>>) -> Self {
        Cpt {
            child: child.into(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    /// Parentless table with a single row.
    pub fn prior(child: impl Into<String>, distribution: Vec<T>) -> Self {
        Cpt {
            child: child.into(),
            parents: Vec::new(),
            rows: vec![distribution],
        }
    }

    /// Parentless uniform table over `cardinality` states.
    pub fn uniform(child: impl Into<String>, cardinality: usize) -> Self {
        let n = T::from_usize(cardinality).expect("cardinality representable");
        let p = T::one() / n;
        Self::prior(child, vec![p; cardinality])
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Cpt<U> {
        Cpt {
            child: self.child.clone(),
            parents: self.parents.clone(),
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }
}

impl Cpt<f64> {
    /// Convenience constructor for Boolean children: `p_true[r]` is
    /// `P(child = True | row r)` and the row becomes `[1 - p, p]`.
    pub fn boolean(child: impl Into<String>, parents: &[&str], p_true: &[f64]) -> Self {
        let rows = p_true.iter().map(|&p| vec![1.0 - p, p]).collect();
        Cpt::new(child, parents, rows)
    }
}

/// A directed acyclic graph of discrete variables, one CPT per variable.
///
/// Construction is unchecked so that malformed networks can be described and
/// reported on; every inference entry point validates first.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    variables: Vec<Variable>,
    cpts: Vec<Cpt<T>>,
}

impl<T: Probability> Default for Network<T> {
    fn default() -> Self {
        Network {
            variables: Vec::new(),
            cpts: Vec::new(),
        }
    }
}

impl<T: Probability> Network<T> {
    pub fn new(variables: Vec<Variable>, cpts: Vec<Cpt<T>>) -> Self {
        Network { variables, cpts }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn cpts(&self) -> &[Cpt<T>] {
        &self.cpts
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variable(&self, id: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.variable(id).is_some()
    }

    pub fn cpt(&self, child: &str) -> Option<&Cpt<T>> {
        self.cpts.iter().find(|c| c.child == child)
    }

    /// Appends a variable and its table. Duplicates are not rejected here;
    /// `validate` reports them.
    pub fn add_node(&mut self, variable: Variable, cpt: Cpt<T>) {
        self.variables.push(variable);
        self.cpts.push(cpt);
    }

    /// Swaps in a new table for `cpt.child`, returning the old one.
    pub fn replace_cpt(&mut self, cpt: Cpt<T>) -> Result<Cpt<T>, BnError> {
        let slot = self
            .cpts
            .iter_mut()
            .find(|c| c.child == cpt.child)
            .ok_or_else(|| BnError::UnknownVariable(cpt.child.clone()))?;
        Ok(std::mem::replace(slot, cpt))
    }

    /// Ids of the variables listing `id` as a parent.
    pub fn children(&self, id: &str) -> Vec<&str> {
        self.cpts
            .iter()
            .filter(|c| c.parents.iter().any(|p| p == id))
            .map(|c| c.child.as_str())
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_network(self)
    }

    /// Converts every probability into another scalar type.
    pub fn convert<U: Probability>(&self) -> Network<U> {
        Network {
            variables: self.variables.clone(),
            cpts: self
                .cpts
                .iter()
                .map(|c| c.map(|p| U::from_f64_lossy(p.as_f64())))
                .collect(),
        }
    }

    /// Product of all state counts.
    pub fn state_space(&self) -> u128 {
        self.variables
            .iter()
            .map(|v| v.cardinality() as u128)
            .fold(1u128, |acc, c| acc.saturating_mul(c))
    }

    pub(crate) fn compile(&self) -> Result<Compiled<'_, T>, BnError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(BnError::InvalidNetwork(violations));
        }
        let index: HashMap<&str, usize> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let mut tables = vec![None; self.variables.len()];
        for cpt in &self.cpts {
            let child = index[cpt.child.as_str()];
            let parents = cpt.parents.iter().map(|p| index[p.as_str()]).collect();
            tables[child] = Some((parents, cpt));
        }
        let tables: Vec<(Vec<usize>, &Cpt<T>)> =
            tables.into_iter().map(|t| t.expect("validated")).collect();
        let order = topological_order(&tables);
        Ok(Compiled {
            network: self,
            index,
            tables,
            order,
        })
    }
}

/// Resolved, index-based view of a valid network.
pub(crate) struct Compiled<'a, T> {
    pub network: &'a Network<T>,
    pub index: HashMap<&'a str, usize>,
    /// Per variable: parent indices and its table.
    pub tables: Vec<(Vec<usize>, &'a Cpt<T>)>,
    /// Topological order, ties broken by declaration order.
    pub order: Vec<usize>,
}

impl<T: Probability> Compiled<'_, T> {
    pub fn cardinality(&self, var: usize) -> usize {
        self.network.variables[var].cardinality()
    }

    pub fn resolve(&self, evidence: &Evidence) -> Result<Vec<(usize, usize)>, BnError> {
        evidence
            .iter()
            .map(|(node, state)| {
                let var = *self
                    .index
                    .get(node)
                    .ok_or_else(|| BnError::UnknownVariable(node.to_string()))?;
                let s = self.network.variables[var]
                    .state_index(state)
                    .ok_or_else(|| BnError::UnknownState {
                        variable: node.to_string(),
                        state: state.to_string(),
                    })?;
                Ok((var, s))
            })
            .collect()
    }

    /// Row index into a CPT for the given parent states.
    pub fn row_index(&self, var: usize, assignment: &[usize]) -> usize {
        let (parents, _) = &self.tables[var];
        parents
            .iter()
            .fold(0, |acc, &p| acc * self.cardinality(p) + assignment[p])
    }
}

fn topological_order<T>(tables: &[(Vec<usize>, &Cpt<T>)]) -> Vec<usize> {
    let n = tables.len();
    let mut indegree: Vec<usize> = tables.iter().map(|(p, _)| p.len()).collect();
    let mut children = vec![Vec::new(); n];
    for (child, (parents, _)) in tables.iter().enumerate() {
        for &p in parents {
            children[p].push(child);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for &c in &children[next] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    order
}

/// Observed `(variable, state)` assertions, at most one state per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Evidence(BTreeMap<String, String>);

impl Evidence {
    pub fn new() -> Self {
        Evidence(BTreeMap::new())
    }

    pub fn with(mut self, node: impl Into<String>, state: impl Into<String>) -> Self {
        self.0.insert(node.into(), state.into());
        self
    }

    /// Inserts an assertion, returning the previous state for that node.
    pub fn insert(&mut self, node: impl Into<String>, state: impl Into<String>) -> Option<String> {
        self.0.insert(node.into(), state.into())
    }

    pub fn remove(&mut self, node: &str) -> Option<String> {
        self.0.remove(node)
    }

    pub fn get(&self, node: &str) -> Option<&str> {
        self.0.get(node).map(String::as_str)
    }

    pub fn contains(&self, node: &str) -> bool {
        self.0.contains_key(node)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Union of two evidence sets. Conflicting states for the same node are
    /// an error.
    pub fn union(&self, other: &Evidence) -> Result<Evidence, BnError> {
        let mut out = self.clone();
        for (node, state) in other.iter() {
            match out.get(node) {
                Some(existing) if existing != state => {
                    return Err(BnError::ConflictingEvidence {
                        variable: node.to_string(),
                        first: existing.to_string(),
                        second: state.to_string(),
                    })
                }
                _ => {
                    out.insert(node, state);
                }
            }
        }
        Ok(out)
    }

    /// Checks that every node exists in `network` and every state is legal.
    pub fn check<T: Probability>(&self, network: &Network<T>) -> Result<(), BnError> {
        for (node, state) in self.iter() {
            let var = network
                .variable(node)
                .ok_or_else(|| BnError::UnknownVariable(node.to_string()))?;
            if var.state_index(state).is_none() {
                return Err(BnError::UnknownState {
                    variable: node.to_string(),
                    state: state.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Evidence {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Evidence(
            iter.into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        )
    }
}

/// A distribution over one variable's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    pub variable: String,
    pub states: Vec<String>,
    pub probabilities: Vec<T>,
}

impl<T: Probability> Distribution<T> {
    pub fn probability(&self, state: &str) -> Option<&T> {
        self.states
            .iter()
            .position(|s| s == state)
            .map(|i| &self.probabilities[i])
    }

    pub fn total(&self) -> T {
        self.probabilities
            .iter()
            .cloned()
            .fold(T::zero(), |acc, p| acc + p)
    }
}
