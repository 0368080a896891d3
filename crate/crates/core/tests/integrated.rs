use std::collections::BTreeMap;
use std::path::PathBuf;

use verdict_core::argument::{ArgumentModel, FactStatus, NodeRole, VerdictConditioning};
use verdict_core::bmca::{averaged_verdict, model_plausibility, posterior_weights, ComputationMode, FactPartition, ModelEnsemble};
use verdict_core::bn::{posterior_marginal, probability_of_evidence};
use verdict_core::case::{parse_case_file, CaseFile};
use verdict_core::integrated::{integrated_query, merge_models, DivergenceSpec, IntegratedModel, MODELS_NODE};
use verdict_core::{BayesianNetwork, Cpt, Evidence, Variable};

fn load() -> CaseFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cases/paper_example.case.json");
    parse_case_file(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn merged(cf: &CaseFile, stage: usize) -> (ModelEnsemble, IntegratedModel) {
    let ens = ModelEnsemble::new(cf.models_at(stage).unwrap(), cf.priors()).unwrap();
    let im = merge_models(&ens, &DivergenceSpec::detect(&ens)).unwrap();
    (ens, im)
}

fn shared_nodes(ens: &ModelEnsemble) -> Vec<String> {
    let first = &ens.models[0];
    first
        .network
        .variables()
        .iter()
        .map(|v| v.id.clone())
        .filter(|id| ens.models.iter().all(|m| m.network.contains(id)))
        .collect()
}

/// Every subset of up to two shared fact nodes, asserted true or false.
fn battery(ens: &ModelEnsemble) -> Vec<Evidence> {
    let facts: Vec<String> = shared_nodes(ens)
        .into_iter()
        .filter(|n| ens.models.iter().all(|m| m.role(n).is_some_and(NodeRole::is_fact)))
        .collect();
    let mut out = vec![Evidence::new()];
    for (i, a) in facts.iter().enumerate() {
        for sa in ["False", "True"] {
            out.push(Evidence::new().with(a.clone(), sa));
            for b in &facts[i + 1..] {
                for sb in ["False", "True"] {
                    out.push(Evidence::new().with(a.clone(), sa).with(b.clone(), sb));
                }
            }
        }
    }
    out.push(
        facts
            .iter()
            .map(|f| (f.clone(), "True".to_string()))
            .collect(),
    );
    out
}

#[test]
fn mixture_consistency_on_bundled_models() {
    let cf = load();
    for stage in 0..cf.stages.len() {
        let (ens, im) = merged(&cf, stage);
        let nodes = shared_nodes(&ens);
        for e in battery(&ens) {
            for m in &ens.models {
                if probability_of_evidence(&m.network, &e).unwrap() == 0.0 {
                    continue;
                }
                let conditioned = e.clone().with(MODELS_NODE, m.party.clone());
                for x in nodes.iter().filter(|x| !e.contains(x)) {
                    let standalone = posterior_marginal(&m.network, x, &e).unwrap();
                    let integrated = posterior_marginal(&im.network, x, &conditioned).unwrap();
                    for (a, b) in standalone.probabilities.iter().zip(&integrated.probabilities) {
                        assert!((a - b).abs() <= 1e-9, "stage {stage} {} {x} | {e:?}: {a} vs {b}", m.party);
                    }
                }
            }
        }
    }
}

#[test]
fn switches_are_deterministic() {
    let cf = load();
    let (ens, im) = merged(&cf, 1);
    assert!(!im.switches.is_empty());
    for m in &ens.models {
        let e = Evidence::new().with(MODELS_NODE, m.party.clone());
        for switch in im.switches.values() {
            let d = posterior_marginal(&im.network, switch, &e).unwrap();
            assert_eq!(d.probability(&m.party), Some(&1.0));
        }
    }
}

#[test]
fn prior_is_the_meta_prior_and_marginals_mix() {
    let cf = load();
    let (ens, im) = merged(&cf, 0);
    let q = integrated_query(&im, &Evidence::new()).unwrap();
    assert!((q.models[0].1 - 0.8).abs() < 1e-12);
    assert!((q.models[1].1 - 0.2).abs() < 1e-12);
    for x in shared_nodes(&ens) {
        let mixed = posterior_marginal(&im.network, &x, &Evidence::new()).unwrap();
        for (s, p) in mixed.probabilities.iter().enumerate() {
            let expected: f64 = ens
                .models
                .iter()
                .zip(&ens.priors)
                .map(|(m, w)| w * posterior_marginal(&m.network, &x, &Evidence::new()).unwrap().probabilities[s])
                .sum();
            assert!((p - expected).abs() <= 1e-9, "{x}");
        }
    }
}

#[test]
fn conditioning_on_a_party_reproduces_its_guilt_posterior() {
    let cf = load();
    let (ens, im) = merged(&cf, 0);
    let facts = cf.facts_for("prosecution", 0).all();
    for m in &ens.models {
        let standalone = m.guilt_posterior(&facts).unwrap();
        let e = facts.clone().with(MODELS_NODE, m.party.clone());
        let d = posterior_marginal(&im.network, &im.guilt_node, &e).unwrap();
        assert!((d.probability("True").unwrap() - standalone).abs() <= 1e-9);
    }
}

fn pair_model(party: &str, f2_given_g: [f64; 2], conditioning: &str) -> ArgumentModel {
    let mut net = BayesianNetwork::default();
    net.add_node(Variable::boolean("h"), Cpt::boolean("h", &[], &[0.4]));
    net.add_node(Variable::boolean("g"), Cpt::boolean("g", &["h"], &[0.1, 0.6]));
    net.add_node(Variable::boolean("c"), Cpt::boolean("c", &[], &[0.8]));
    net.add_node(Variable::boolean("f1"), Cpt::boolean("f1", &["g", "c"], &[0.5, 0.1, 0.5, 0.9]));
    net.add_node(Variable::boolean("f2"), Cpt::boolean("f2", &["g"], &f2_given_g));
    let roles = BTreeMap::from([
        ("h".to_string(), NodeRole::Hypothesis),
        ("g".to_string(), NodeRole::Guilt),
        ("c".to_string(), NodeRole::Credibility),
        ("f1".to_string(), NodeRole::Fact(FactStatus::Explained)),
        ("f2".to_string(), NodeRole::Fact(FactStatus::Explained)),
    ]);
    ArgumentModel::new(
        party,
        net,
        roles,
        VerdictConditioning {
            node: "g".into(),
            state: conditioning.into(),
        },
    )
}

#[test]
fn integrated_verdict_matches_averaging_with_consistent_factors() {
    let models = vec![pair_model("p", [0.2, 0.85], "True"), pair_model("d", [0.7, 0.3], "False")];
    let priors = vec![0.65, 0.35];
    let facts = Evidence::new().with("f1", "True").with("f2", "True");
    let partition = FactPartition {
        primary: facts.clone(),
        secondary: Evidence::new(),
    };

    let mut plaus = Vec::new();
    let mut factors = Vec::new();
    let mut guilt = Vec::new();
    for m in &models {
        let p = model_plausibility(m, &partition, ComputationMode::Independent, None).unwrap();
        let marginal = probability_of_evidence(&m.network, &facts).unwrap();
        plaus.push(p);
        factors.push(marginal / p);
        guilt.push(m.guilt_posterior(&facts).unwrap());
    }
    let weights = posterior_weights(&priors, &factors, &plaus).unwrap();
    let averaged = averaged_verdict(&guilt, &weights).unwrap();

    let ens = ModelEnsemble::with_weighting_factors(models, priors, factors).unwrap();
    let div = DivergenceSpec::detect(&ens);
    assert_eq!(div.divergent.len(), 1);
    let im = merge_models(&ens, &div).unwrap();
    let q = integrated_query(&im, &facts).unwrap();
    assert!((q.guilt - averaged).abs() <= 1e-12, "{} vs {averaged}", q.guilt);
    for ((_, a), b) in q.models.iter().zip(&weights) {
        assert!((a - b).abs() <= 1e-12);
    }
}
