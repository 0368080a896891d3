use std::path::PathBuf;

use verdict_core::bmca::{staged_update, staged_update_with, ComputationMode};
use verdict_core::bn::{enumerate_joint_oracle, probability_of_evidence};
use verdict_core::case::{build_shared_credibility_network, parse_case_file, serialize_case_file, CaseFile};
use verdict_core::Evidence;

fn load(name: &str) -> CaseFile {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cases").join(name);
    parse_case_file(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn bundled_case_shape() {
    let cf = load("paper_example.case.json");
    assert_eq!(cf.models.len(), 2);
    assert_eq!(cf.stages.len(), 2);
    assert_eq!(cf.models[0].model.network.len(), 12);
    assert_eq!(cf.models[1].model.network.len(), 9);
    assert_eq!(cf.fact_count(0), 6);
    assert_eq!(cf.fact_count(1), 9);
}

#[test]
fn bundled_cases_round_trip() {
    for name in ["paper_example.case.json", "paper_example_strict.case.json"] {
        let cf = load(name);
        assert_eq!(parse_case_file(&serialize_case_file(&cf)).unwrap(), cf);
    }
}

#[test]
fn opening_stage_values() {
    let cf = load("paper_example.case.json");
    let r = &staged_update(&cf, ComputationMode::Independent).unwrap()[0];
    let p = r.model("prosecution").unwrap();
    let d = r.model("defence").unwrap();
    assert!(close(p.plausibility, 0.330, 0.002), "{}", p.plausibility);
    assert!(close(d.plausibility, 0.050, 0.001), "{}", d.plausibility);
    assert!(close(p.guilt.unwrap(), 0.999, 0.001));
    assert!(close(d.guilt.unwrap(), 0.0014, 0.0003));
    assert!(close(r.averaged_guilt.unwrap(), 0.962, 0.001), "{:?}", r.averaged_guilt);
    assert_eq!(r.baseline, 0.015625);
}

#[test]
fn strict_reading_halves_prosecution_plausibility() {
    let cf = load("paper_example_strict.case.json");
    let r = &staged_update(&cf, ComputationMode::Independent).unwrap()[0];
    let p = r.model("prosecution").unwrap();
    assert!(close(p.plausibility, 0.165, 0.002), "{}", p.plausibility);
    assert!(r.notes.iter().any(|n| n.contains("0.165")));
}

#[test]
fn revision_stage_given_and_computed() {
    let cf = load("paper_example.case.json");
    let given = &staged_update(&cf, ComputationMode::Independent).unwrap()[1];
    assert!(close(given.averaged_guilt.unwrap(), 0.000313, 1e-5));
    let computed = &staged_update_with(&cf, ComputationMode::Independent, false).unwrap()[1];
    let p = computed.model("prosecution").unwrap();
    assert!(close(p.guilt.unwrap(), 0.96362, 0.001), "{:?}", p.guilt);
    assert!(close(p.plausibility, 1.529e-6, 1e-9), "{}", p.plausibility);
    let d = computed.model("defence").unwrap();
    assert!(close(d.plausibility, 0.000994, 1e-5), "{}", d.plausibility);
}

#[test]
fn two_stage_defence_plausibility() {
    let cf = load("paper_example.case.json");
    let r = &staged_update_with(&cf, ComputationMode::TwoStage, false).unwrap()[1];
    let d = r.model("defence").unwrap();
    assert!(close(d.plausibility, 0.1066, 5e-4), "{}", d.plausibility);
    let opening = &staged_update_with(&cf, ComputationMode::TwoStage, false).unwrap()[0];
    let independent = &staged_update_with(&cf, ComputationMode::Independent, false).unwrap()[0];
    assert!(close(opening.models[1].plausibility, independent.models[1].plausibility, 1e-15));
}

#[test]
fn shared_credibility_network_collapses_groups() {
    let cf = load("paper_example.case.json");
    let opening = build_shared_credibility_network(&cf, 0).unwrap();
    assert_eq!(opening.network.len(), 12 + 9);
    let revised = build_shared_credibility_network(&cf, 1).unwrap();
    let models = cf.models_at(1).unwrap();
    let total: usize = models.iter().map(|m| m.network.len()).sum();
    assert_eq!(revised.network.len(), total - 3);
    assert_eq!(revised.combined_id("defence", "partner_cred"), Some("defence/partner_cred"));
    assert_eq!(
        revised.combined_id("defence", "eye_cred"),
        revised.combined_id("prosecution", "eye_cred")
    );
    for m in &models {
        for cpt in m.network.cpts() {
            let id = revised.combined_id(&m.party, &cpt.child).unwrap();
            assert_eq!(revised.network.cpt(id).unwrap().rows, cpt.rows);
        }
    }
    let shared = staged_update_with(&cf, ComputationMode::SharedCredibility, false).unwrap();
    let w: f64 = shared[1].models.iter().map(|m| m.weight).sum();
    assert!(close(w, 1.0, 1e-9));
}

#[test]
fn elimination_matches_enumeration_on_bundled_models() {
    let cf = load("paper_example.case.json");
    for stage in 0..cf.stages.len() {
        for m in cf.models_at(stage).unwrap() {
            let facts = cf.facts_for(&m.party, stage).all();
            let ve = probability_of_evidence(&m.network, &facts).unwrap();
            let oracle = enumerate_joint_oracle(&m.network, &facts).unwrap();
            assert!((ve - oracle).abs() <= 1e-10, "{} stage {stage}: {ve} vs {oracle}", m.party);
            let empty = probability_of_evidence(&m.network, &Evidence::new()).unwrap();
            assert!(close(empty, 1.0, 1e-12));
        }
    }
}

#[test]
fn credibility_posteriors_after_revision() {
    let cf = load("paper_example.case.json");
    let defence = cf.models_at(1).unwrap().remove(1);
    let parade = Evidence::new().with("parade_fail", "True");
    let post = defence.credibility_posterior(&parade).unwrap();
    let eye = post.iter().find(|d| d.variable == "eye_cred").unwrap();
    assert!(close(eye.probabilities[1], 0.0833, 1e-4));
    let cctv = Evidence::new().with("cctv", "True");
    let post = defence.credibility_posterior(&cctv).unwrap();
    let partner = post.iter().find(|d| d.variable == "partner_cred").unwrap();
    assert!(close(partner.probabilities[1], 0.99975, 1e-5));
}
