#![allow(dead_code)]

use num::{BigInt, BigRational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use verdict_core::bn::{Cpt, Network};
use verdict_core::{BayesianNetwork, Evidence, ExactNetwork, Variable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parent sets drawn from earlier nodes (at most three parents each).
pub fn random_structure(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|i| {
            let mut earlier: Vec<usize> = (0..i).collect();
            earlier.shuffle(rng);
            let k = rng.gen_range(0..=earlier.len().min(3));
            let mut ps = earlier[..k].to_vec();
            ps.sort();
            ps
        })
        .collect()
}

fn name(i: usize) -> String {
    format!("v{i}")
}

/// Binary network over `n` nodes declared in a shuffled order; some rows are
/// deterministic.
pub fn random_network(seed: u64, n: usize) -> BayesianNetwork {
    let mut rng = rng(seed);
    let parents = random_structure(&mut rng, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut net = BayesianNetwork::default();
    for i in order {
        let rows = (0..1usize << parents[i].len())
            .map(|_| {
                let p: f64 = match rng.gen_range(0..10) {
                    0 => 0.0,
                    1 => 1.0,
                    _ => rng.gen_range(0.01..0.99),
                };
                vec![1.0 - p, p]
            })
            .collect();
        let ps: Vec<String> = parents[i].iter().map(|&p| name(p)).collect();
        let ps: Vec<&str> = ps.iter().map(String::as_str).collect();
        net.add_node(Variable::boolean(name(i)), Cpt::new(name(i), &ps, rows));
    }
    net
}

/// Exact network with small-denominator rational entries.
pub fn random_exact_network(seed: u64, n: usize) -> ExactNetwork {
    let mut rng = rng(seed);
    let parents = random_structure(&mut rng, n);
    let mut net: ExactNetwork = Network::default();
    for (i, ps) in parents.iter().enumerate() {
        let rows = (0..1usize << ps.len())
            .map(|_| {
                let d: i64 = rng.gen_range(2..40);
                let k: i64 = rng.gen_range(0..=d);
                let p = BigRational::new(BigInt::from(k), BigInt::from(d));
                vec![BigRational::from_integer(1.into()) - p.clone(), p]
            })
            .collect();
        let names: Vec<String> = ps.iter().map(|&p| name(p)).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        net.add_node(Variable::boolean(name(i)), Cpt::new(name(i), &names, rows));
    }
    net
}

pub fn random_evidence<T: verdict_core::Probability>(seed: u64, net: &Network<T>) -> Evidence {
    let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut e = Evidence::new();
    for v in net.variables() {
        if rng.gen_bool(0.35) {
            e.insert(v.id.clone(), v.states[rng.gen_range(0..v.states.len())].clone());
        }
    }
    e
}
