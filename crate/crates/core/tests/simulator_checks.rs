//! Simulator-wide guarantees: exact reconstruction under every schedule on
//! constructively generated data, bit conservation, and determinism.

mod common;

use common::trial_field;
use corrpoll_core::{
    evaluate_schedule, generate_field_data, run_average_poll, run_poll, CorrelationModel,
    Direction, NodeId, PatternSpec, Schedule,
};
use itertools::Itertools;

#[test]
fn all_schedules_reconstruct_exactly_up_to_six_nodes() {
    for trial in [2u64, 3, 4, 9, 10, 11] {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        if model.len() > 6 {
            continue;
        }
        for seed in [1u64, 2] {
            let data = generate_field_data(&model, seed);
            assert!(data.consistency_ok);
            let ids: Vec<NodeId> = model.node_ids().collect();
            for order in ids.iter().copied().permutations(ids.len()) {
                let schedule = Schedule::new(order).unwrap();
                let report = run_poll(&model, &schedule, &data).unwrap();
                assert!(report.reconstruction_exact, "trial {trial}, seed {seed}");
                assert!(report.analytic_match);
            }
        }
    }
}

#[test]
fn transcript_lengths_sum_to_the_totals() {
    for trial in 0..10 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let data = generate_field_data(&model, trial);
        let schedule = Schedule::identity(model.len());
        let report = run_poll(&model, &schedule, &data).unwrap();
        let down: u64 = report
            .transcript
            .iter()
            .filter(|e| e.direction == Direction::Down)
            .map(|e| e.bit_length as u64)
            .sum();
        let up: u64 = report
            .transcript
            .iter()
            .filter(|e| e.direction == Direction::Up)
            .map(|e| e.bit_length as u64)
            .sum();
        assert_eq!(down, report.total_downlink);
        assert_eq!(up, report.total_uplink);
        assert_eq!(report.transcript.len(), 2 * model.len() - 1);
    }
}

#[test]
fn simulated_totals_equal_the_analytic_cost() {
    for trial in 0..25 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let data = generate_field_data(&model, 77 + trial);
        let schedule = Schedule::identity(model.len());
        let report = run_poll(&model, &schedule, &data).unwrap();
        let eq9 = evaluate_schedule(&model, &schedule).unwrap().cost.complexity_eq9;
        assert_eq!(
            report.total_bits(),
            eq9 + u64::from(model.word_length()),
            "trial {trial}"
        );
        assert!(report.analytic_match);
    }
}

#[test]
fn identical_seeds_give_identical_runs() {
    let field = trial_field(5);
    let model = CorrelationModel::from_field(&field);
    let a = generate_field_data(&model, 99);
    let b = generate_field_data(&model, 99);
    assert_eq!(a, b);
    let schedule = Schedule::identity(model.len());
    assert_eq!(
        run_poll(&model, &schedule, &a).unwrap(),
        run_poll(&model, &schedule, &b).unwrap()
    );
    let avg_a = run_average_poll(&model, &schedule, &PatternSpec::Uniform, 100, 5).unwrap();
    let avg_b = run_average_poll(&model, &schedule, &PatternSpec::Uniform, 100, 5).unwrap();
    assert_eq!(avg_a, avg_b);
}

#[test]
fn average_poll_tracks_the_analytic_value_on_seeded_fields() {
    for trial in 0..8 {
        let field = trial_field(trial);
        let model = CorrelationModel::from_field(&field);
        let schedule = Schedule::identity(model.len());
        let report =
            run_average_poll(&model, &schedule, &PatternSpec::Uniform, 500, trial).unwrap();
        // uniform patterns ride balanced codes: zero variance, exact match
        assert_eq!(report.mean_total_bits, report.analytic_total_bits, "trial {trial}");
        assert!(report.within_three_se);
    }
}
