//! Brute-force enumeration: the chain-rule product and its exhaustive sum.
//! Kept deliberately naive so it can serve as an oracle for elimination.

use crate::scalar::Probability;

use super::network::{Evidence, Network};
use super::BnError;

/// Upper bound on the full joint state space accepted by the oracle.
pub const ORACLE_STATE_LIMIT: u128 = 1 << 24;

/// Product of the CPT entries selected by a full assignment.
pub fn joint_probability<T: Probability>(
    net: &Network<T>,
    assignment: &Evidence,
) -> Result<T, BnError> {
    let compiled = net.compile()?;
    let missing: Vec<String> = net
        .variables()
        .iter()
        .filter(|v| !assignment.contains(&v.id))
        .map(|v| v.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(BnError::IncompleteAssignment { missing });
    }
    let mut states = vec![0; net.len()];
    for (var, state) in compiled.resolve(assignment)? {
        states[var] = state;
    }
    let mut p = T::one();
    for &var in &compiled.order {
        let row = compiled.row_index(var, &states);
        p = p * compiled.tables[var].1.rows[row][states[var]].clone();
    }
    Ok(p)
}

/// Sum of the joint over all full assignments consistent with `evidence`.
///
/// Assignments are visited odometer-style over the topological order (first
/// variable slowest, states in declared order), and each joint term is a
/// product taken in that same order, so the result is bit-for-bit repeatable.
pub fn enumerate_joint_oracle<T: Probability>(
    net: &Network<T>,
    evidence: &Evidence,
) -> Result<T, BnError> {
    let size = net.state_space();
    if size > ORACLE_STATE_LIMIT {
        return Err(BnError::StateSpaceTooLarge {
            size,
            limit: ORACLE_STATE_LIMIT,
        });
    }
    let compiled = net.compile()?;
    let observed = compiled.resolve(evidence)?;
    let mut states = vec![0; net.len()];
    let mut fixed = vec![false; net.len()];
    for &(var, state) in &observed {
        states[var] = state;
        fixed[var] = true;
    }
    let free: Vec<usize> = compiled
        .order
        .iter()
        .copied()
        .filter(|&v| !fixed[v])
        .collect();

    let mut total = T::zero();
    loop {
        let mut p = T::one();
        for &var in &compiled.order {
            let row = compiled.row_index(var, &states);
            p = p * compiled.tables[var].1.rows[row][states[var]].clone();
        }
        total = total + p;

        let mut advanced = false;
        for &var in free.iter().rev() {
            states[var] += 1;
            if states[var] < compiled.cardinality(var) {
                advanced = true;
                break;
            }
            states[var] = 0;
        }
        if !advanced {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{Cpt, Variable};

    #[test]
    fn figure_one_uniform_joint_is_one_sixteenth() {
        let net: Network<f64> = Network::new(
            vec![
                Variable::boolean("A"),
                Variable::boolean("B"),
                Variable::boolean("C"),
                Variable::boolean("D"),
            ],
            vec![
                Cpt::prior("A", vec![0.5, 0.5]),
                Cpt::new("B", &["A", "C"], vec![vec![0.5, 0.5]; 4]),
                Cpt::prior("C", vec![0.5, 0.5]),
                Cpt::new("D", &["C"], vec![vec![0.5, 0.5]; 2]),
            ],
        );
        let full = Evidence::new()
            .with("A", "True")
            .with("B", "False")
            .with("C", "True")
            .with("D", "False");
        assert_eq!(joint_probability(&net, &full).unwrap(), 0.0625);
        let all = enumerate_joint_oracle(&net, &Evidence::new()).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_assignment_names_missing_variables() {
        let net = Network::new(
            vec![Variable::boolean("A"), Variable::boolean("B")],
            vec![Cpt::prior("A", vec![0.5, 0.5]), Cpt::prior("B", vec![0.5, 0.5])],
        );
        let err = joint_probability(&net, &Evidence::new().with("A", "True")).unwrap_err();
        match err {
            BnError::IncompleteAssignment { missing } => assert_eq!(missing, vec!["B".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oracle_guards_state_space() {
        let vars: Vec<Variable> = (0..25).map(|i| Variable::boolean(format!("v{i}"))).collect();
        let cpts = vars.iter().map(|v| Cpt::prior(v.id.clone(), vec![0.5, 0.5])).collect();
        let net = Network::new(vars, cpts);
        assert!(matches!(
            enumerate_joint_oracle(&net, &Evidence::new()),
            Err(BnError::StateSpaceTooLarge { .. })
        ));
    }
}
