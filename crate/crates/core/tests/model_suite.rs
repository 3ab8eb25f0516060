//! Emitted models against the combinatorial oracles: cascade assignments
//! must be feasible with matching objectives, no enumerated point may beat
//! the brute-force optimum inside the model, and LP text must round-trip
//! byte-identically.

mod common;

use std::collections::HashMap;

use rand::Rng;

use collapse_core::bounds::lower_bound_m;
use collapse_core::cascade::Instance;
use collapse_core::cuts::CutPool;
use collapse_core::graph::NodeSet;
use collapse_core::lp::build_dual;
use collapse_core::lp_format::{parse_lp_text, write_lp_text};
use collapse_core::model::{
    cascade_to_assignment, emit_detection_lp, emit_nonlinear_dual, emit_sparse_master,
    emit_time_dependent, evaluate_model,
};
use collapse_core::simplex::simplex_solve;
use collapse_core::solver::{binomial, brute_force};

use common::{for_each_subset, gnp, load_data_graph, rng};

fn random_preprocessed(r: &mut rand_chacha::ChaCha8Rng, max_n: usize, max_b: usize) -> Option<Instance> {
    let n = r.random_range(5..=max_n);
    let p = r.random_range(0.25..0.6);
    let g = gnp(r, n, p);
    let k = r.random_range(2..=3);
    let base = Instance::new(g, k, 0).ok()?.preprocess().ok()?;
    let nn = base.graph.n();
    let b = r.random_range(1..=max_b);
    if nn < b + 2 || binomial(nn, b) > 3_000 {
        return None;
    }
    Instance::new(base.graph, k, b).ok()
}

#[test]
fn every_interdiction_is_feasible_and_none_beats_the_optimum() {
    let mut r = rng(91);
    let mut checked = 0;
    while checked < 15 {
        let Some(inst) = random_preprocessed(&mut r, 13, 2) else {
            continue;
        };
        checked += 1;
        let info = lower_bound_m(&inst).unwrap();
        let model = emit_time_dependent(&inst, false).unwrap();
        let optimum = brute_force(&inst).unwrap().best_value;
        let n = inst.graph.n();
        for_each_subset(n, inst.b, |w_nodes| {
            let w = NodeSet::from_iter(n, w_nodes.iter().copied());
            let value = collapse_core::cascade::collapse(&inst, &w).survivors.card();
            let assignment = cascade_to_assignment(&inst, &w, info.tightened_t).unwrap();
            let report = evaluate_model(&model, &assignment).unwrap();
            assert!(
                report.feasible,
                "cascade assignment infeasible at W={w_nodes:?}: {:?}",
                report.violations
            );
            assert_eq!(report.objective, value as f64, "objective mismatch at W={w_nodes:?}");
            assert!(
                report.objective >= optimum as f64,
                "model point undercuts the optimum"
            );
        });
    }
}

#[test]
fn cut_rows_keep_at_least_one_optimal_interdiction_feasible() {
    let mut r = rng(92);
    let mut checked = 0;
    while checked < 12 {
        let Some(inst) = random_preprocessed(&mut r, 12, 2) else {
            continue;
        };
        checked += 1;
        let info = lower_bound_m(&inst).unwrap();
        let model = emit_time_dependent(&inst, true).unwrap();
        let optimum = brute_force(&inst).unwrap().best_value;
        let n = inst.graph.n();
        let mut some_optimum_feasible = false;
        for_each_subset(n, inst.b, |w_nodes| {
            let w = NodeSet::from_iter(n, w_nodes.iter().copied());
            let value = collapse_core::cascade::collapse(&inst, &w).survivors.card();
            if value != optimum {
                return;
            }
            let assignment = cascade_to_assignment(&inst, &w, info.tightened_t).unwrap();
            if evaluate_model(&model, &assignment).unwrap().feasible {
                some_optimum_feasible = true;
            }
        });
        assert!(
            some_optimum_feasible,
            "the cut rows removed every optimal interdiction"
        );
    }
}

#[test]
fn emission_is_deterministic_and_round_trips() {
    let mut r = rng(93);
    let inst = loop {
        if let Some(inst) = random_preprocessed(&mut r, 12, 2) {
            break inst;
        }
    };
    let mut pool = CutPool::new();
    let table = collapse_core::cascade::followers_table(&inst).unwrap();
    for c in collapse_core::cuts::dominance_cuts(&table) {
        pool.add(c);
    }
    let full = NodeSet::full(inst.graph.n());
    let info = lower_bound_m(&inst).unwrap();
    if full.card() > info.m {
        pool.add(collapse_core::cuts::bigm_cut(&inst.graph, inst.k, &full, info.m).unwrap());
    }

    let models = vec![
        emit_time_dependent(&inst, true).unwrap(),
        emit_sparse_master(&inst, &pool).unwrap(),
        emit_nonlinear_dual(&inst, true).unwrap(),
        emit_detection_lp(&inst.graph, inst.k, None),
    ];
    for m in models {
        let a = write_lp_text(&m).unwrap();
        let b = write_lp_text(&m).unwrap();
        assert_eq!(a, b, "same model, different bytes");
        let parsed = parse_lp_text(&a).unwrap();
        assert_eq!(parsed, m, "IR round trip failed for {}", m.name);
        let c = write_lp_text(&parsed).unwrap();
        assert_eq!(a, c, "byte round trip failed for {}", m.name);
    }
}

#[test]
fn karate_time_dependent_emits_and_round_trips() {
    let karate = load_data_graph("karate.txt").expect("bundled karate dataset missing");
    let inst = Instance::new(karate, 2, 3).unwrap().preprocess().unwrap();
    let m = emit_time_dependent(&inst, true).unwrap();
    let text = write_lp_text(&m).unwrap();
    assert_eq!(parse_lp_text(&text).unwrap(), m);
    assert!(text.len() > 1000);
}

#[test]
fn strong_duality_assignment_satisfies_the_dual_model() {
    let mut r = rng(94);
    let mut checked = 0;
    while checked < 8 {
        let Some(inst) = random_preprocessed(&mut r, 10, 2) else {
            continue;
        };
        checked += 1;
        let n = inst.graph.n();
        let best = brute_force(&inst).unwrap();
        let w_vec: Vec<bool> = (0..n as u32).map(|v| best.best_w.contains(v)).collect();

        let dual_lp = build_dual(&inst.graph, inst.k, &w_vec);
        let dual_sol = simplex_solve(&dual_lp);
        let v = dual_sol.objective.round();
        assert!((dual_sol.objective - v).abs() < 1e-6);

        let model = emit_nonlinear_dual(&inst, true).unwrap();
        let mut assignment: HashMap<String, f64> = HashMap::new();
        assignment.insert("v".into(), v);
        for i in 0..n {
            assignment.insert(format!("w_{i}"), if w_vec[i] { 1.0 } else { 0.0 });
        }
        for (name, &value) in dual_lp.var_names.iter().zip(&dual_sol.primal) {
            assignment.insert(name.clone(), value);
        }
        for i in 0..n {
            let lambda = dual_sol.primal[dual_lp.var_index(&format!("lambda_{i}")).unwrap()];
            let p = if w_vec[i] { lambda } else { 0.0 };
            assignment.insert(format!("p_{i}"), p);
        }

        let report = evaluate_model(&model, &assignment).unwrap();
        assert!(
            report.feasible,
            "strong-duality assignment infeasible: {:?}",
            report.violations
        );
        // objective n - v equals the surviving core size
        assert!(
            (report.objective - best.best_value as f64).abs() < 1e-6,
            "n - v = {} but optimum is {}",
            report.objective,
            best.best_value
        );
    }
}

#[test]
fn bilinear_dual_dumps_json_but_refuses_lp_text() {
    let mut r = rng(95);
    let inst = loop {
        if let Some(inst) = random_preprocessed(&mut r, 10, 2) {
            break inst;
        }
    };
    let m = emit_nonlinear_dual(&inst, false).unwrap();
    assert!(!m.is_linear());
    assert!(write_lp_text(&m).is_err());
    let json = m.to_json();
    assert!(json["rows"].as_array().unwrap().len() > 0);
}
