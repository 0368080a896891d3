//! Exact inference by variable elimination.

use std::collections::BTreeSet;

use crate::scalar::Probability;

use super::factor::Factor;
use super::network::{Compiled, Distribution, Evidence, Network};
use super::BnError;

/// P(e): the sum of the joint over every completion of `evidence`.
pub fn probability_of_evidence<T: Probability>(
    net: &Network<T>,
    evidence: &Evidence,
) -> Result<T, BnError> {
    let compiled = net.compile()?;
    let observed = compiled.resolve(evidence)?;
    let factor = eliminate(&compiled, &observed, None, None)?;
    Ok(factor.scalar().cloned().expect("all variables eliminated"))
}

/// Like [`probability_of_evidence`] with a caller-chosen elimination order.
/// The order must list every unobserved variable exactly once.
pub fn probability_of_evidence_with_order<T: Probability>(
    net: &Network<T>,
    evidence: &Evidence,
    order: &[&str],
) -> Result<T, BnError> {
    let compiled = net.compile()?;
    let observed = compiled.resolve(evidence)?;
    let order = order
        .iter()
        .map(|id| {
            compiled
                .index
                .get(id)
                .copied()
                .ok_or_else(|| BnError::UnknownVariable(id.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let factor = eliminate(&compiled, &observed, None, Some(&order))?;
    Ok(factor.scalar().cloned().expect("all variables eliminated"))
}

/// P(query | e). Fails with `ZeroEvidence` when P(e) = 0.
pub fn posterior_marginal<T: Probability>(
    net: &Network<T>,
    query: &str,
    evidence: &Evidence,
) -> Result<Distribution<T>, BnError> {
    let compiled = net.compile()?;
    let target = *compiled
        .index
        .get(query)
        .ok_or_else(|| BnError::UnknownVariable(query.to_string()))?;
    if evidence.contains(query) {
        return Err(BnError::QueryInEvidence(query.to_string()));
    }
    let observed = compiled.resolve(evidence)?;
    let factor = eliminate(&compiled, &observed, Some(target), None)?;
    let z = factor
        .values()
        .iter()
        .cloned()
        .fold(T::zero(), |acc, v| acc + v);
    if z.is_zero() {
        return Err(BnError::ZeroEvidence);
    }
    let variable = &net.variables()[target];
    Ok(Distribution {
        variable: variable.id.clone(),
        states: variable.states.clone(),
        probabilities: factor.values().iter().map(|v| v.clone() / z.clone()).collect(),
    })
}

fn eliminate<T: Probability>(
    compiled: &Compiled<'_, T>,
    observed: &[(usize, usize)],
    keep: Option<usize>,
    order: Option<&[usize]>,
) -> Result<Factor<T>, BnError> {
    let n = compiled.tables.len();
    let mut factors: Vec<Factor<T>> = Vec::with_capacity(n);
    for (child, (parents, cpt)) in compiled.tables.iter().enumerate() {
        let mut vars = parents.clone();
        vars.push(child);
        let cards = vars.iter().map(|&v| compiled.cardinality(v)).collect();
        let values = cpt.rows.iter().flatten().cloned().collect();
        let mut factor = Factor::new(vars, cards, values);
        for &(var, state) in observed {
            if factor.contains(var) {
                factor = factor.reduce(var, state);
            }
        }
        factors.push(factor);
    }

    let is_observed = |v: usize| observed.iter().any(|&(o, _)| o == v);
    let hidden: BTreeSet<usize> = (0..n)
        .filter(|&v| !is_observed(v) && Some(v) != keep)
        .collect();

    let order: Vec<usize> = match order {
        Some(order) => {
            let given: BTreeSet<usize> = order.iter().copied().collect();
            if given != hidden || given.len() != order.len() {
                return Err(BnError::InvalidEliminationOrder);
            }
            order.to_vec()
        }
        None => min_degree_order(&factors, hidden),
    };

    for var in order {
        let (touching, rest): (Vec<_>, Vec<_>) =
            factors.into_iter().partition(|f| f.contains(var));
        factors = rest;
        let merged = touching
            .iter()
            .fold(Factor::unit(), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }

    Ok(factors
        .iter()
        .fold(Factor::unit(), |acc, f| acc.product(f)))
}

/// Greedy order: repeatedly eliminate the variable with the fewest
/// neighbours in the current interaction graph (ties by index).
fn min_degree_order<T: Probability>(factors: &[Factor<T>], mut hidden: BTreeSet<usize>) -> Vec<usize> {
    let mut scopes: Vec<BTreeSet<usize>> = factors
        .iter()
        .map(|f| f.vars().iter().copied().collect())
        .collect();
    let mut order = Vec::with_capacity(hidden.len());
    while !hidden.is_empty() {
        let neighbours = |v: usize, scopes: &[BTreeSet<usize>]| -> BTreeSet<usize> {
            scopes
                .iter()
                .filter(|s| s.contains(&v))
                .flat_map(|s| s.iter().copied())
                .filter(|&u| u != v)
                .collect()
        };
        let best = *hidden
            .iter()
            .min_by_key(|&&v| (neighbours(v, &scopes).len(), v))
            .unwrap();
        let merged = neighbours(best, &scopes);
        scopes.retain(|s| !s.contains(&best));
        scopes.push(merged);
        hidden.remove(&best);
        order.push(best);
    }
    order
}
