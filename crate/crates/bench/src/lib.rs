//! Shared setup for the criterion benches.

use corrpoll_core::{random_field, CorrelationModel};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic field-backed model for a benchmark case.
pub fn bench_model(seed: u64, n_nodes: usize, word_length: u32) -> CorrelationModel {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    CorrelationModel::from_field(&random_field(&mut rng, n_nodes, word_length))
}
