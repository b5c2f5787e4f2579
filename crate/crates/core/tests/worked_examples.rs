//! End-to-end examples on the generated packs, with values checked by
//! direct counting and then frozen.

use cancov::canonical::{minimal_canonical, MinimalCanonical, Provider};
use cancov::cover::{multiplicity, uniformity_verdict, Cover, Target};
use cancov::cylinder::{lower_bound_check, pullback_cover, resolution_relation, Embedding, LowerBoundVerdict};
use cancov::experiment::{run_experiment, ExperimentConfig};
use cancov::metric::{generate_pack, DiscretePack, PackKind, ScaleLadder};
use cancov::relation::{ball_cover, c0_modulus, controlled_e, LambdaSpec};

fn pipeline(tag: &str) -> (DiscretePack, ScaleLadder, MinimalCanonical) {
    let pack = generate_pack(&PackKind::from_tag(tag).unwrap()).unwrap();
    let ladder = ScaleLadder::default_for(&pack);
    let e = controlled_e(&pack, &ladder, &LambdaSpec::default(), 0.05).unwrap().relation;
    let gamma = ball_cover(&e, &pack.interior_set(), Target::Interior).unwrap();
    let provider = Provider::for_dim(pack.known_dim().unwrap()).unwrap();
    let out = minimal_canonical(&pack, Some(&ladder), &gamma, &provider, 0.05).unwrap();
    (pack, ladder, out)
}

/// Largest number of members through a point, counted directly.
fn count_multiplicity(pack: &DiscretePack, alpha: &Cover) -> usize {
    (0..pack.len())
        .map(|p| alpha.members().iter().filter(|u| u.contains(&p)).count())
        .max()
        .unwrap_or(0)
}

#[test]
fn finite_cylinder_pipeline_values() {
    let (pack, _, out) = pipeline("finite_cylinder");
    assert_eq!(count_multiplicity(&pack, &out.cover), 2);
    assert_eq!(out.report.multiplicity, 2);
    assert_eq!(out.cover.len(), 16);
    assert_eq!(out.report.subsequence, vec![0, 2, 9, 129, 2049, 32769, 524289, 2097153]);
}

#[test]
fn interval_cylinder_pipeline_values() {
    let (pack, ladder, out) = pipeline("interval_cylinder");
    assert_eq!(count_multiplicity(&pack, &out.cover), 3);
    assert_eq!(out.cover.len(), 46);
    assert_eq!(out.report.subsequence, vec![0, 9, 129, 2049, 32769, 524289, 2097153]);
    assert_eq!(out.report.naive_bound_2dim_plus_2, 4);
    let res = resolution_relation(&pack, &ladder, &LambdaSpec::default(), 0.05).unwrap();
    let cert = lower_bound_check(&pack, &ladder, &out.cover, &res, 0.05).unwrap();
    assert_eq!(cert.verdict, LowerBoundVerdict::Holds);
    assert_eq!(cert.mult_at_witness, 3);
}

#[test]
fn circle_pipeline_and_collar_pullback() {
    let (host, _, out) = pipeline("circle_in_disk");
    let m = count_multiplicity(&host, &out.cover);
    assert_eq!(m, out.report.multiplicity);
    assert!(m <= 3);
    let j = Embedding::collar(&host).unwrap();
    let beta = pullback_cover(&j, &out.cover).unwrap();
    let domain = j.domain().pack();
    assert!(beta.covers());
    assert!(multiplicity(&beta) <= m);
    let v = uniformity_verdict(domain, &ScaleLadder::default_for(domain), &beta, 0.05);
    assert!(v.accept, "{} > {}", v.modulus.value, v.modulus.threshold);
}

#[test]
fn countable_example_singletons_and_deep_balls() {
    let pack = generate_pack(&PackKind::CountableExample { y_points: 5 }).unwrap();
    let ladder = ScaleLadder::default_for(&pack);
    let singletons = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
    assert!(uniformity_verdict(&pack, &ladder, &singletons, 0.05).accept);
    assert_eq!(multiplicity(&singletons), 1);
    // h(t) stays near 1/2 on this sample, so φ at the floor exceeds the gaps
    // between the y points and every deep ball holds the whole deep level
    let lambda = LambdaSpec::Power { coef: 0.5, exponent: 2.0 };
    let e = controlled_e(&pack, &ladder, &lambda, 0.05).unwrap();
    let floor = pack.floor();
    let deep: Vec<usize> = pack.interior().iter().copied().filter(|&p| pack.boundary_distance(p) == floor).collect();
    assert_eq!(deep.len(), 5);
    let mut gap = f64::INFINITY;
    for &p in &deep {
        for &q in deep.iter().filter(|&&q| q != p) {
            gap = gap.min(pack.d(p, q));
        }
    }
    assert_eq!(gap, 0.125);
    assert!(e.phi.step_value(floor) > gap);
    for &p in &deep {
        assert!(deep.iter().all(|q| e.relation.ball(p).contains(q)));
    }
    // and the relation is still rejected: h does not decay on 5 points
    assert!(!c0_modulus(&pack, &ladder, &e.relation, 0.05).accept);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let config = ExperimentConfig::for_tag("finite_cylinder").unwrap();
    let a = serde_json::to_string_pretty(&run_experiment(&config).unwrap()).unwrap();
    let b = serde_json::to_string_pretty(&run_experiment(&config).unwrap()).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    for key in ["schema_version", "config", "stages", "summary"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["config"]["tolerances"]["uniformity"], 0.05);
    assert_eq!(v["stages"][0]["data"]["tolerances"]["c0"], 0.05);
}

#[test]
fn sweep_seed_changes_the_candidates() {
    let mut config = ExperimentConfig::for_tag("finite_cylinder").unwrap();
    config.sweep.candidates = 20;
    let a = run_experiment(&config).unwrap();
    config.sweep.seed = 1;
    let b = run_experiment(&config).unwrap();
    assert_ne!(a.stage("lower_bound").unwrap().data["sweep"], b.stage("lower_bound").unwrap().data["sweep"]);
}
