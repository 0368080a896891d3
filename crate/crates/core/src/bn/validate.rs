use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::scalar::Probability;

use super::network::Network;

/// Maximum allowed deviation of a CPT row sum from 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// One structural or numerical defect in a network.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateVariable { variable: String },
    TooFewStates { variable: String, count: usize },
    DuplicateState { variable: String, state: String },
    MissingCpt { variable: String },
    DuplicateCpt { variable: String },
    OrphanCpt { variable: String },
    DanglingParent { variable: String, parent: String },
    DuplicateParent { variable: String, parent: String },
    CycleDetected { cycle: Vec<String> },
    WrongRowCount { variable: String, expected: usize, found: usize },
    WrongRowWidth { variable: String, row: usize, expected: usize, found: usize },
    OutOfRange { variable: String, row: usize, column: usize, value: f64 },
    RowSumViolation { variable: String, row: usize, sum: f64 },
}

impl Violation {
    /// Variable the violation is filed under; cycles file under their first
    /// (smallest) member.
    pub fn variable(&self) -> &str {
        match self {
            Violation::DuplicateVariable { variable }
            | Violation::TooFewStates { variable, .. }
            | Violation::DuplicateState { variable, .. }
            | Violation::MissingCpt { variable }
            | Violation::DuplicateCpt { variable }
            | Violation::OrphanCpt { variable }
            | Violation::DanglingParent { variable, .. }
            | Violation::DuplicateParent { variable, .. }
            | Violation::WrongRowCount { variable, .. }
            | Violation::WrongRowWidth { variable, .. }
            | Violation::OutOfRange { variable, .. }
            | Violation::RowSumViolation { variable, .. } => variable,
            Violation::CycleDetected { cycle } => cycle.first().map(String::as_str).unwrap_or(""),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Violation::DuplicateVariable { .. } => 0,
            Violation::TooFewStates { .. } => 1,
            Violation::DuplicateState { .. } => 2,
            Violation::MissingCpt { .. } => 3,
            Violation::DuplicateCpt { .. } => 4,
            Violation::OrphanCpt { .. } => 5,
            Violation::DanglingParent { .. } => 6,
            Violation::DuplicateParent { .. } => 7,
            Violation::CycleDetected { .. } => 8,
            Violation::WrongRowCount { .. } => 9,
            Violation::WrongRowWidth { .. } => 10,
            Violation::OutOfRange { .. } => 11,
            Violation::RowSumViolation { .. } => 12,
        }
    }

    fn row(&self) -> usize {
        match self {
            Violation::WrongRowWidth { row, .. }
            | Violation::OutOfRange { row, .. }
            | Violation::RowSumViolation { row, .. } => *row,
            _ => 0,
        }
    }

    /// Short machine-readable kind name.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::DuplicateVariable { .. } => "DuplicateVariable",
            Violation::TooFewStates { .. } => "TooFewStates",
            Violation::DuplicateState { .. } => "DuplicateState",
            Violation::MissingCpt { .. } => "MissingCpt",
            Violation::DuplicateCpt { .. } => "DuplicateCpt",
            Violation::OrphanCpt { .. } => "OrphanCpt",
            Violation::DanglingParent { .. } => "DanglingParent",
            Violation::DuplicateParent { .. } => "DuplicateParent",
            Violation::CycleDetected { .. } => "CycleDetected",
            Violation::WrongRowCount { .. } => "WrongRowCount",
            Violation::WrongRowWidth { .. } => "WrongRowWidth",
            Violation::OutOfRange { .. } => "OutOfRange",
            Violation::RowSumViolation { .. } => "RowSumViolation",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVariable { variable } => {
                write!(f, "variable '{variable}' is declared more than once")
            }
            Violation::TooFewStates { variable, count } => {
                write!(f, "variable '{variable}' has {count} state(s), need at least 2")
            }
            Violation::DuplicateState { variable, state } => {
                write!(f, "variable '{variable}' repeats state '{state}'")
            }
            Violation::MissingCpt { variable } => write!(f, "variable '{variable}' has no CPT"),
            Violation::DuplicateCpt { variable } => {
                write!(f, "variable '{variable}' has more than one CPT")
            }
            Violation::OrphanCpt { variable } => {
                write!(f, "CPT for '{variable}' names an undeclared variable")
            }
            Violation::DanglingParent { variable, parent } => {
                write!(f, "CPT for '{variable}' references unknown parent '{parent}'")
            }
            Violation::DuplicateParent { variable, parent } => {
                write!(f, "CPT for '{variable}' lists parent '{parent}' twice")
            }
            Violation::CycleDetected { cycle } => {
                write!(f, "cycle detected: {} -> {}", cycle.join(" -> "), cycle[0])
            }
            Violation::WrongRowCount { variable, expected, found } => write!(
                f,
                "CPT for '{variable}' has {found} row(s), expected {expected}"
            ),
            Violation::WrongRowWidth { variable, row, expected, found } => write!(
                f,
                "CPT for '{variable}' row {row} has {found} entries, expected {expected}"
            ),
            Violation::OutOfRange { variable, row, column, value } => write!(
                f,
                "CPT for '{variable}' row {row} column {column} is {value}, outside [0, 1]"
            ),
            Violation::RowSumViolation { variable, row, sum } => {
                write!(f, "CPT for '{variable}' row {row} sums to {sum}, expected 1")
            }
        }
    }
}

/// Reports every violation in `net`, ordered by variable id then kind.
pub fn validate_network<T: Probability>(net: &Network<T>) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut cards: HashMap<&str, usize> = HashMap::new();
    let mut seen = BTreeSet::new();
    for var in net.variables() {
        if !seen.insert(var.id.as_str()) {
            out.push(Violation::DuplicateVariable { variable: var.id.clone() });
            continue;
        }
        if var.states.len() < 2 {
            out.push(Violation::TooFewStates {
                variable: var.id.clone(),
                count: var.states.len(),
            });
        }
        let mut states = BTreeSet::new();
        for s in &var.states {
            if !states.insert(s.as_str()) {
                out.push(Violation::DuplicateState {
                    variable: var.id.clone(),
                    state: s.clone(),
                });
            }
        }
        cards.insert(var.id.as_str(), var.states.len());
    }

    let mut cpt_count: BTreeMap<&str, usize> = BTreeMap::new();
    for cpt in net.cpts() {
        *cpt_count.entry(cpt.child.as_str()).or_default() += 1;
    }
    for var in &seen {
        match cpt_count.get(var).copied().unwrap_or(0) {
            0 => out.push(Violation::MissingCpt { variable: var.to_string() }),
            1 => {}
            _ => out.push(Violation::DuplicateCpt { variable: var.to_string() }),
        }
    }

    let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut checked = BTreeSet::new();
    for cpt in net.cpts() {
        let child = cpt.child.as_str();
        let Some(&child_card) = cards.get(child) else {
            out.push(Violation::OrphanCpt { variable: cpt.child.clone() });
            continue;
        };
        if !checked.insert(child) {
            continue;
        }
        let mut dangling = false;
        let mut parent_seen = BTreeSet::new();
        let mut expected_rows: usize = 1;
        for parent in &cpt.parents {
            if !parent_seen.insert(parent.as_str()) {
                out.push(Violation::DuplicateParent {
                    variable: cpt.child.clone(),
                    parent: parent.clone(),
                });
            }
            match cards.get(parent.as_str()) {
                Some(&c) => {
                    expected_rows = expected_rows.saturating_mul(c);
                    edges.entry(parent.as_str()).or_default().push(child);
                }
                None => {
                    dangling = true;
                    out.push(Violation::DanglingParent {
                        variable: cpt.child.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        if !dangling && cpt.rows.len() != expected_rows {
            out.push(Violation::WrongRowCount {
                variable: cpt.child.clone(),
                expected: expected_rows,
                found: cpt.rows.len(),
            });
        }
        for (r, row) in cpt.rows.iter().enumerate() {
            if row.len() != child_card {
                out.push(Violation::WrongRowWidth {
                    variable: cpt.child.clone(),
                    row: r,
                    expected: child_card,
                    found: row.len(),
                });
                continue;
            }
            let mut sum = T::zero();
            let mut in_range = true;
            for (c, p) in row.iter().enumerate() {
                if *p < T::zero() || *p > T::one() || p.as_f64().is_nan() {
                    in_range = false;
                    out.push(Violation::OutOfRange {
                        variable: cpt.child.clone(),
                        row: r,
                        column: c,
                        value: p.as_f64(),
                    });
                }
                sum = sum + p.clone();
            }
            let sum = sum.as_f64();
            let off = (sum - 1.0).abs();
            if in_range && (off.is_nan() || off > ROW_SUM_TOLERANCE) {
                out.push(Violation::RowSumViolation {
                    variable: cpt.child.clone(),
                    row: r,
                    sum,
                });
            }
        }
    }

    for cycle in find_cycles(&seen, &edges) {
        out.push(Violation::CycleDetected { cycle });
    }

    out.sort_by(|a, b| {
        a.variable()
            .cmp(b.variable())
            .then(a.kind_rank().cmp(&b.kind_rank()))
            .then(a.row().cmp(&b.row()))
    });
    out
}

/// One cycle per non-trivial strongly connected component, rotated to start
/// at its smallest id.
fn find_cycles(nodes: &BTreeSet<&str>, edges: &BTreeMap<&str, Vec<&str>>) -> Vec<Vec<String>> {
    struct Tarjan<'a> {
        edges: &'a BTreeMap<&'a str, Vec<&'a str>>,
        index: HashMap<&'a str, usize>,
        low: HashMap<&'a str, usize>,
        on_stack: BTreeSet<&'a str>,
        stack: Vec<&'a str>,
        next: usize,
        components: Vec<Vec<&'a str>>,
    }

    impl<'a> Tarjan<'a> {
        fn visit(&mut self, v: &'a str) {
            self.index.insert(v, self.next);
            self.low.insert(v, self.next);
            self.next += 1;
            self.stack.push(v);
            self.on_stack.insert(v);
            let successors = self.edges.get(v).cloned().unwrap_or_default();
            for w in successors {
                if !self.index.contains_key(w) {
                    self.visit(w);
                    let lw = self.low[w];
                    let lv = self.low.get_mut(v).unwrap();
                    *lv = (*lv).min(lw);
                } else if self.on_stack.contains(w) {
                    let iw = self.index[w];
                    let lv = self.low.get_mut(v).unwrap();
                    *lv = (*lv).min(iw);
                }
            }
            if self.low[v] == self.index[v] {
                let mut component = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on_stack.remove(w);
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                self.components.push(component);
            }
        }
    }

    let mut t = Tarjan {
        edges,
        index: HashMap::new(),
        low: HashMap::new(),
        on_stack: BTreeSet::new(),
        stack: Vec::new(),
        next: 0,
        components: Vec::new(),
    };
    for &v in nodes {
        if !t.index.contains_key(v) {
            t.visit(v);
        }
    }

    let mut cycles = Vec::new();
    for component in t.components {
        let members: BTreeSet<&str> = component.iter().copied().collect();
        let start = *members.iter().next().unwrap();
        let self_loop = edges.get(start).is_some_and(|s| s.contains(&start));
        if members.len() == 1 && !self_loop {
            continue;
        }
        // Walk smallest in-component successors from the start until it repeats.
        let mut path = vec![start];
        let mut current = start;
        loop {
            let next = edges[current]
                .iter()
                .copied()
                .filter(|w| members.contains(w))
                .min()
                .unwrap();
            if let Some(pos) = path.iter().position(|&p| p == next) {
                path.drain(..pos);
                break;
            }
            path.push(next);
            current = next;
        }
        let min_pos = path
            .iter()
            .enumerate()
            .min_by_key(|(_, id)| **id)
            .map(|(i, _)| i)
            .unwrap();
        path.rotate_left(min_pos);
        cycles.push(path.into_iter().map(String::from).collect());
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{Cpt, Network, Variable};

    fn figure_one(uniform_b_row: Option<Vec<f64>>) -> Network<f64> {
        let mut b_rows = vec![vec![0.5, 0.5]; 4];
        if let Some(row) = uniform_b_row {
            b_rows[2] = row;
        }
        Network::new(
            vec![
                Variable::boolean("A"),
                Variable::boolean("B"),
                Variable::boolean("C"),
                Variable::boolean("D"),
            ],
            vec![
                Cpt::prior("A", vec![0.5, 0.5]),
                Cpt::new("B", &["A", "C"], b_rows),
                Cpt::prior("C", vec![0.5, 0.5]),
                Cpt::new("D", &["C"], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
            ],
        )
    }

    #[test]
    fn uniform_figure_one_is_valid() {
        assert!(figure_one(None).validate().is_empty());
    }

    #[test]
    fn short_row_is_one_row_sum_violation() {
        let report = figure_one(Some(vec![0.6, 0.3])).validate();
        assert_eq!(report.len(), 1);
        match &report[0] {
            Violation::RowSumViolation { variable, row, sum } => {
                assert_eq!(variable, "B");
                assert_eq!(*row, 2);
                assert!((sum - 0.9).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_cycle_is_reported_once() {
        let net: Network<f64> = Network::new(
            vec![Variable::boolean("A"), Variable::boolean("B")],
            vec![
                Cpt::new("A", &["B"], vec![vec![0.5, 0.5]; 2]),
                Cpt::new("B", &["A"], vec![vec![0.5, 0.5]; 2]),
            ],
        );
        let report = net.validate();
        assert_eq!(
            report,
            vec![Violation::CycleDetected { cycle: vec!["A".into(), "B".into()] }]
        );
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let net: Network<f64> = Network::new(
            vec![Variable::boolean("A")],
            vec![Cpt::new("A", &["A"], vec![vec![0.5, 0.5]; 2])],
        );
        let report = net.validate();
        assert!(report.iter().any(|v| matches!(v, Violation::CycleDetected { cycle } if cycle == &vec!["A".to_string()])));
    }

    #[test]
    fn dangling_parent_and_out_of_range_are_reported_in_order() {
        let net: Network<f64> = Network::new(
            vec![Variable::boolean("X"), Variable::boolean("Y")],
            vec![
                Cpt::new("X", &["Ghost"], vec![vec![0.5, 0.5]]),
                Cpt::prior("Y", vec![1.2, -0.2]),
            ],
        );
        let kinds: Vec<_> = net.validate().iter().map(|v| (v.variable().to_string(), v.kind())).collect();
        assert_eq!(
            kinds,
            vec![
                ("X".to_string(), "DanglingParent"),
                ("Y".to_string(), "OutOfRange"),
                ("Y".to_string(), "OutOfRange"),
            ]
        );
    }

    #[test]
    fn wrong_row_count_and_missing_cpt() {
        let net: Network<f64> = Network::new(
            vec![Variable::boolean("P"), Variable::new("Q", &["a", "b", "c"]), Variable::boolean("R")],
            vec![
                Cpt::prior("P", vec![0.5, 0.5]),
                Cpt::new("Q", &["P"], vec![vec![0.2, 0.3, 0.5]]),
            ],
        );
        let report = net.validate();
        assert_eq!(report.len(), 2);
        assert_eq!(report[0], Violation::WrongRowCount { variable: "Q".into(), expected: 2, found: 1 });
        assert_eq!(report[1], Violation::MissingCpt { variable: "R".into() });
    }

    #[test]
    fn tolerance_accepts_decimal_transcriptions() {
        let net: Network<f64> = Network::new(
            vec![Variable::boolean("P")],
            vec![Cpt::prior("P", vec![0.99999, 1.0e-5])],
        );
        assert!(net.validate().is_empty());
    }
}
