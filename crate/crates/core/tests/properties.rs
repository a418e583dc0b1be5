//! Property tests for the model invariants, the prefix-code bounds, and
//! relabeling invariance of ambiguity.

use corrpoll_core::{
    ceil_log2, evaluate_schedule, query_cost, random_field, Codebook, CorrelationModel, NodeId,
    Schedule, SupportRelation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn seeded_model(seed: u64, n_nodes: usize, word_length: u32) -> CorrelationModel {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    CorrelationModel::from_field(&random_field(&mut rng, n_nodes, word_length))
}

proptest! {
    #[test]
    fn pairwise_bits_symmetric_and_in_range(
        seed in any::<u64>(),
        n_nodes in 2usize..8,
        word_length in 1u32..24,
    ) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let field = random_field(&mut rng, n_nodes, word_length);
        let model = CorrelationModel::from_field(&field);
        for i in model.node_ids() {
            for j in model.node_ids().filter(|&j| j != i) {
                let b = model.pairwise(i, j).unwrap();
                prop_assert_eq!(b, model.pairwise(j, i).unwrap());
                prop_assert!((1..=word_length).contains(&b));
                if field.distance(i, j).unwrap() > f64::from(word_length) {
                    prop_assert_eq!(b, word_length);
                }
            }
        }
    }

    #[test]
    fn conditional_bits_shrink_as_polled_grows(
        seed in any::<u64>(),
        n_nodes in 3usize..8,
        word_length in 1u32..24,
    ) {
        let model = seeded_model(seed, n_nodes, word_length);
        let target = n_nodes as NodeId;
        let others: Vec<NodeId> = (1..target).collect();
        let mut prev = u32::MAX;
        // grow the polled set one node at a time
        for k in 1..=others.len() {
            let b = model.conditional(target, &others[..k]).unwrap();
            prop_assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn query_cost_monotone_and_bounded(b in 1u32..1_000_000) {
        let q = query_cost(b).unwrap();
        prop_assert!(q <= b);
        if b > 1 {
            prop_assert!(query_cost(b - 1).unwrap() <= q);
            prop_assert_eq!(q, ceil_log2(u64::from(b)));
        }
    }

    #[test]
    fn cost_breakdown_internally_consistent(
        seed in any::<u64>(),
        n_nodes in 1usize..7,
        word_length in 1u32..24,
    ) {
        let model = seeded_model(seed, n_nodes, word_length);
        let eval = evaluate_schedule(&model, &Schedule::identity(n_nodes)).unwrap();
        let all_down: u64 = eval.cost.per_node.iter().map(|c| c.downlink_bits).sum();
        let all_up: u64 = eval.cost.per_node.iter().map(|c| c.uplink_bits).sum();
        let first_up = eval.cost.per_node[0].uplink_bits;
        prop_assert_eq!(eval.cost.complexity_eq9, all_down + all_up - first_up);
        prop_assert_eq!(
            eval.cost.total_with_first_node,
            eval.cost.complexity_eq9 + u64::from(word_length)
        );
    }

    #[test]
    fn huffman_never_beats_entropy_zero_but_never_exceeds_fixed_length(
        b in 1u32..7,
        raw in proptest::collection::vec(0.0f64..1.0, 2..128),
    ) {
        let len = 1usize << b;
        let mut probs = vec![0.0; len];
        let mut total = 0.0;
        for (i, w) in raw.iter().enumerate() {
            probs[i % len] += w;
            total += w;
        }
        prop_assume!(total > 0.0);
        for p in &mut probs {
            *p /= total;
        }
        let cb = Codebook::from_probs(&probs).unwrap();
        prop_assert!(cb.expected_length() <= f64::from(b) + 1e-9);
    }

    #[test]
    fn huffman_codes_round_trip(
        symbols in proptest::collection::vec(0usize..8, 1..40),
        weights in proptest::collection::vec(0.01f64..1.0, 8),
    ) {
        let cb = Codebook::from_probs(&weights).unwrap();
        let mut stream = String::new();
        for &s in &symbols {
            stream.push_str(cb.code(s).unwrap().as_str());
        }
        let mut cursor = 0;
        for &s in &symbols {
            prop_assert_eq!(cb.decode_prefix(&stream, &mut cursor).unwrap(), s);
        }
        prop_assert_eq!(cursor, stream.len());
    }

    #[test]
    fn max_ambiguity_invariant_under_relabeling(
        pairs in proptest::collection::btree_set((0u32..40, 0u32..40), 1..120),
    ) {
        let rel = SupportRelation::new("x", "y", pairs.clone()).unwrap();
        let base = rel.max_ambiguity();

        // order-preserving and order-reversing bijections on both coordinates
        let shifted = SupportRelation::new(
            "x",
            "y",
            pairs.iter().map(|&(x, y)| (x * 3 + 7, y * 5 + 1)),
        )
        .unwrap();
        prop_assert_eq!(shifted.max_ambiguity().max_ambiguity, base.max_ambiguity);

        let reversed = SupportRelation::new(
            "x",
            "y",
            pairs.iter().map(|&(x, y)| (1000 - x, 1000 - y)),
        )
        .unwrap();
        prop_assert_eq!(reversed.max_ambiguity().max_ambiguity, base.max_ambiguity);
        prop_assert_eq!(reversed.max_ambiguity().lower_bound_bits, base.lower_bound_bits);
    }

    #[test]
    fn ambiguity_sets_are_nonempty_and_bounded(
        pairs in proptest::collection::btree_set((0u32..20, 0u32..20), 1..80),
    ) {
        let rel = SupportRelation::new("x", "y", pairs).unwrap();
        let x_count = rel.x_support().len();
        for y in rel.y_support() {
            let set = rel.ambiguity_set(&y).unwrap();
            prop_assert!(!set.is_empty());
            prop_assert!(set.len() <= x_count);
        }
    }
}
