#![allow(dead_code)]

use corrpoll_core::{random_field, CorrelationModel, NodeId, SensorField};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Trial fields cycle through 2..=8 nodes and word lengths {3, 5, 8, 16},
/// positions uniform in [0, 2n]^2.
pub fn trial_field(trial: u64) -> SensorField {
    let n_nodes = 2 + (trial as usize % 7);
    let word_length = [3u32, 5, 8, 16][trial as usize % 4];
    let mut rng = ChaCha12Rng::seed_from_u64(0xF1E1D + trial);
    random_field(&mut rng, n_nodes, word_length)
}

/// Kruskal minimum spanning tree weight over pairwise conditional-bit edge
/// weights. Kept independent of the Prim-style greedy scheduler on purpose.
pub fn mst_weight(model: &CorrelationModel) -> u64 {
    let n = model.len();
    if n <= 1 {
        return 0;
    }
    let mut edges = Vec::new();
    for i in 1..=n as NodeId {
        for j in i + 1..=n as NodeId {
            edges.push((model.pairwise(i, j).unwrap(), i, j));
        }
    }
    edges.sort_unstable();

    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }

    let mut total = 0u64;
    let mut used = 0;
    for (w, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i as usize), find(&mut parent, j as usize));
        if ri != rj {
            parent[ri] = rj;
            total += u64::from(w);
            used += 1;
            if used == n - 1 {
                break;
            }
        }
    }
    total
}

/// Sum of conditional bit counts along a polling order (the uplink side of
/// the cost, without queries or the first node's word).
pub fn uplink_sum(model: &CorrelationModel, order: &[NodeId]) -> u64 {
    (1..order.len())
        .map(|k| u64::from(model.conditional(order[k], &order[..k]).unwrap()))
        .sum()
}
