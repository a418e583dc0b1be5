//! Cross-checks of the schedule machinery: greedy against the exhaustive
//! oracle, start invariance, the spanning-tree lower bound, and the
//! average-case accounting against the worst case.

mod common;

use common::{mst_weight, trial_field, uplink_sum};
use corrpoll_core::{
    average_case_complexity, brute_force_optimum, evaluate_schedule, greedy_schedule,
    CorrelationModel, NodeId, PatternSpec, Schedule,
};
use itertools::Itertools;

#[test]
fn greedy_matches_brute_force_on_seeded_fields() {
    for trial in 0..30 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let brute = brute_force_optimum(&model).unwrap();
        let greedy = greedy_schedule(&model, 1).unwrap();
        assert_eq!(
            greedy.best_cost, brute.best_cost,
            "trial {trial}: greedy {:?} vs brute {:?}",
            greedy.best_schedule, brute.best_schedule
        );
    }
}

#[test]
fn greedy_cost_is_start_invariant() {
    for trial in 0..20 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let costs: Vec<u64> = model
            .node_ids()
            .map(|start| greedy_schedule(&model, start).unwrap().best_cost)
            .collect();
        assert!(
            costs.windows(2).all(|w| w[0] == w[1]),
            "trial {trial}: per-start costs {costs:?}"
        );
    }
}

#[test]
fn every_schedule_dominates_the_spanning_tree_weight() {
    for trial in 0..15 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        if model.len() > 7 {
            continue; // the full permutation sweep runs in the acceptance suite
        }
        let w = mst_weight(&model);
        let ids: Vec<NodeId> = model.node_ids().collect();
        for order in ids.iter().copied().permutations(ids.len()) {
            assert!(uplink_sum(&model, &order) >= w, "trial {trial}: {order:?}");
        }
        let greedy = greedy_schedule(&model, 1).unwrap();
        assert_eq!(uplink_sum(&model, greedy.best_schedule.order()), w);
    }
}

#[test]
fn querying_never_hurts_when_steps_stay_within_the_word() {
    // whenever no step is flagged wasteful, the interactive cost is bounded
    // by what the nodes would send without any queries at all
    for trial in 0..40 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let eval = evaluate_schedule(&model, &Schedule::identity(model.len())).unwrap();
        if eval.wasteful_steps.is_empty() {
            let non_interactive = u64::from(model.word_length()) * (model.len() as u64 - 1);
            assert!(
                eval.cost.complexity_eq9 <= non_interactive,
                "trial {trial}: {} > {}",
                eval.cost.complexity_eq9,
                non_interactive
            );
        }
    }
}

#[test]
fn uniform_average_equals_worst_case_on_seeded_fields() {
    for trial in 0..20 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let schedule = greedy_schedule(&model, 1).unwrap().best_schedule;
        let avg = average_case_complexity(&model, &schedule, &PatternSpec::Uniform).unwrap();
        let worst = evaluate_schedule(&model, &schedule).unwrap().cost.complexity_eq9;
        assert_eq!(avg, worst as f64, "trial {trial}");
    }
}

#[test]
fn brute_force_reports_factorial_evaluations() {
    let field = trial_field(2); // 4 nodes
    let model = CorrelationModel::from_field(&field);
    assert_eq!(model.len(), 4);
    let result = brute_force_optimum(&model).unwrap();
    assert_eq!(result.evaluated_count, 24);
}
