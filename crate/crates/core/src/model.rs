//! Sensor field geometry, the distance-driven correlation model, polling
//! schedules, and the bit-cost bookkeeping shared by the scheduler and the
//! simulator.
//!
//! A field is a set of nodes at fixed positions, each holding an `n`-bit
//! reading. The number of bits node `i` must send once node `j` is known is
//! `ceil(d_ij)` capped at `n`; conditioning on a set of known nodes takes the
//! minimum over the set. Querying a node costs `ceil(log2 B)` downlink bits
//! (one bit when `B == 1`).

use crate::bits::ceil_log2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub type NodeId = u32;

/// Maximum word length supported by the simulator's 64-bit words.
pub const MAX_WORD_LENGTH: u32 = 63;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("duplicate node id {id}")]
    DuplicateNodeId { id: NodeId },
    #[error("nodes {first} and {second} share the same position")]
    DuplicatePosition { first: NodeId, second: NodeId },
    #[error("node ids must be contiguous 1..=N: expected {expected}, found {found}")]
    NonContiguousIds { expected: NodeId, found: NodeId },
    #[error("node {id} has a {found}-dimensional position, expected {expected}")]
    DimensionMismatch { id: NodeId, expected: usize, found: usize },
    #[error("position dimension must be 1..=3, got {dim}")]
    UnsupportedDimension { dim: usize },
    #[error("node {id} has a non-finite coordinate")]
    NonFiniteCoordinate { id: NodeId },
    #[error("word length must be in 1..={MAX_WORD_LENGTH}, got {n}")]
    InvalidWordLength { n: u32 },
    #[error("field must contain at least one node")]
    EmptyField,
    #[error("unknown node id {id}")]
    UnknownNode { id: NodeId },
    #[error("conditional bits of node {id} on itself are undefined")]
    SelfConditioning { id: NodeId },
    #[error("conditional bits require a nonempty set of already-polled nodes")]
    EmptyPolledSet,
    #[error("query cost is undefined for {b} bits")]
    InvalidQueryBits { b: u32 },
    #[error("order {order:?} is not a permutation of 1..={n}")]
    NotAPermutation { order: Vec<NodeId>, n: usize },
    #[error("pairwise bits matrix must be square, row {row} has length {len}")]
    RaggedMatrix { row: usize, len: usize },
    #[error("pairwise bits matrix is asymmetric at ({i},{j}): {a} != {b}")]
    AsymmetricMatrix { i: NodeId, j: NodeId, a: u32, b: u32 },
    #[error("pairwise bits {bits} at ({i},{j}) outside 1..={n}")]
    BitsOutOfRange { i: NodeId, j: NodeId, bits: u32, n: u32 },
}

/// Number of bits one node must send given that another, `d` away, is known:
/// `ceil(d)` when `d <= n`, otherwise `n`.
///
/// `d` must be strictly positive (coincident nodes are rejected at field
/// construction).
pub fn correlation_bits(d: f64, n: u32) -> u32 {
    assert!(d > 0.0, "internode distance must be strictly positive");
    if d > f64::from(n) {
        n
    } else {
        d.ceil() as u32
    }
}

/// Downlink cost of asking a node for `b` bits: one bit when `b == 1`,
/// otherwise `ceil(log2 b)`.
pub fn query_cost(b: u32) -> Result<u32, ModelError> {
    match b {
        0 => Err(ModelError::InvalidQueryBits { b }),
        1 => Ok(1),
        _ => Ok(ceil_log2(u64::from(b))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: Vec<f64>,
}

/// A validated set of sensor nodes plus the per-reading word length.
///
/// Ids are contiguous `1..=N`, positions are pairwise distinct (so every
/// pairwise distance is strictly positive), and all positions share one
/// dimension in 1..=3.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorField {
    nodes: Vec<Node>,
    word_length: u32,
}

impl SensorField {
    pub fn new(nodes: Vec<(NodeId, Vec<f64>)>, word_length: u32) -> Result<Self, ModelError> {
        if !(1..=MAX_WORD_LENGTH).contains(&word_length) {
            return Err(ModelError::InvalidWordLength { n: word_length });
        }
        if nodes.is_empty() {
            return Err(ModelError::EmptyField);
        }
        let dim = nodes[0].1.len();
        if !(1..=3).contains(&dim) {
            return Err(ModelError::UnsupportedDimension { dim });
        }
        let mut seen = BTreeSet::new();
        for (id, pos) in &nodes {
            if !seen.insert(*id) {
                return Err(ModelError::DuplicateNodeId { id: *id });
            }
            if pos.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    id: *id,
                    expected: dim,
                    found: pos.len(),
                });
            }
            if pos.iter().any(|c| !c.is_finite()) {
                return Err(ModelError::NonFiniteCoordinate { id: *id });
            }
        }
        for (expected, found) in (1..).zip(seen.iter().copied()) {
            if expected != found {
                return Err(ModelError::NonContiguousIds { expected, found });
            }
        }
        let mut nodes: Vec<Node> = nodes.into_iter().map(|(id, pos)| Node { id, pos }).collect();
        nodes.sort_by_key(|node| node.id);
        for (a, b) in nodes
            .iter()
            .enumerate()
            .flat_map(|(i, a)| nodes[i + 1..].iter().map(move |b| (a, b)))
        {
            if a.pos == b.pos {
                return Err(ModelError::DuplicatePosition {
                    first: a.id,
                    second: b.id,
                });
            }
        }
        Ok(SensorField { nodes, word_length })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word_length(&self) -> u32 {
        self.word_length
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    fn node(&self, id: NodeId) -> Result<&Node, ModelError> {
        self.nodes
            .get(id.checked_sub(1).ok_or(ModelError::UnknownNode { id })? as usize)
            .ok_or(ModelError::UnknownNode { id })
    }

    /// Euclidean distance between two distinct nodes.
    pub fn distance(&self, i: NodeId, j: NodeId) -> Result<f64, ModelError> {
        if i == j {
            return Err(ModelError::SelfConditioning { id: i });
        }
        let a = self.node(i)?;
        let b = self.node(j)?;
        Ok(a.pos
            .iter()
            .zip(&b.pos)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt())
    }

    /// Conditional bit count for the pair `(i, j)` under this field's word
    /// length.
    pub fn pairwise_bits(&self, i: NodeId, j: NodeId) -> Result<u32, ModelError> {
        Ok(correlation_bits(self.distance(i, j)?, self.word_length))
    }
}

/// The symmetric matrix of pairwise conditional bit counts for a field,
/// detached from the geometry that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationModel {
    n_nodes: usize,
    word_length: u32,
    bits: Vec<u32>,
}

impl CorrelationModel {
    pub fn from_field(field: &SensorField) -> Self {
        let n_nodes = field.len();
        let mut bits = vec![0u32; n_nodes * n_nodes];
        for i in field.node_ids() {
            for j in field.node_ids() {
                if i != j {
                    bits[Self::index(n_nodes, i, j)] =
                        field.pairwise_bits(i, j).expect("validated field");
                }
            }
        }
        CorrelationModel {
            n_nodes,
            word_length: field.word_length(),
            bits,
        }
    }

    /// Build directly from a matrix. The diagonal is ignored; off-diagonal
    /// entries must be symmetric and within `1..=word_length`.
    pub fn from_matrix(matrix: Vec<Vec<u32>>, word_length: u32) -> Result<Self, ModelError> {
        if !(1..=MAX_WORD_LENGTH).contains(&word_length) {
            return Err(ModelError::InvalidWordLength { n: word_length });
        }
        let n_nodes = matrix.len();
        if n_nodes == 0 {
            return Err(ModelError::EmptyField);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n_nodes {
                return Err(ModelError::RaggedMatrix { row, len: r.len() });
            }
        }
        let mut bits = vec![0u32; n_nodes * n_nodes];
        for i in 0..n_nodes {
            for j in 0..n_nodes {
                if i == j {
                    continue;
                }
                let v = matrix[i][j];
                if matrix[j][i] != v {
                    return Err(ModelError::AsymmetricMatrix {
                        i: (i + 1) as NodeId,
                        j: (j + 1) as NodeId,
                        a: v,
                        b: matrix[j][i],
                    });
                }
                if !(1..=word_length).contains(&v) {
                    return Err(ModelError::BitsOutOfRange {
                        i: (i + 1) as NodeId,
                        j: (j + 1) as NodeId,
                        bits: v,
                        n: word_length,
                    });
                }
                bits[i * n_nodes + j] = v;
            }
        }
        Ok(CorrelationModel {
            n_nodes,
            word_length,
            bits,
        })
    }

    fn index(n_nodes: usize, i: NodeId, j: NodeId) -> usize {
        (i as usize - 1) * n_nodes + (j as usize - 1)
    }

    pub fn len(&self) -> usize {
        self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word_length(&self) -> u32 {
        self.word_length
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        1..=self.n_nodes as NodeId
    }

    fn check_node(&self, id: NodeId) -> Result<(), ModelError> {
        if id == 0 || id as usize > self.n_nodes {
            Err(ModelError::UnknownNode { id })
        } else {
            Ok(())
        }
    }

    /// Bits node `i` must send when node `j` alone is known.
    pub fn pairwise(&self, i: NodeId, j: NodeId) -> Result<u32, ModelError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(ModelError::SelfConditioning { id: i });
        }
        Ok(self.bits[Self::index(self.n_nodes, i, j)])
    }

    /// Bits node `i` must send once every node in `polled` is known: the
    /// minimum pairwise count over the polled set. The first node of a
    /// schedule is the caller's concern; an empty set is an error.
    pub fn conditional(&self, i: NodeId, polled: &[NodeId]) -> Result<u32, ModelError> {
        Ok(self.nearest_polled(i, polled)?.1)
    }

    /// The already-polled node realizing the minimum (ties broken by the
    /// smallest node id), along with its pairwise bit count.
    pub fn nearest_polled(&self, i: NodeId, polled: &[NodeId]) -> Result<(NodeId, u32), ModelError> {
        if polled.is_empty() {
            return Err(ModelError::EmptyPolledSet);
        }
        let mut best: Option<(u32, NodeId)> = None;
        for &j in polled {
            let b = self.pairwise(i, j)?;
            if best.is_none_or(|(bb, bj)| (b, j) < (bb, bj)) {
                best = Some((b, j));
            }
        }
        let (b, j) = best.expect("polled is nonempty");
        Ok((j, b))
    }
}

/// A polling order: a permutation of the node ids `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Schedule {
    order: Vec<NodeId>,
}

impl Schedule {
    pub fn new(order: Vec<NodeId>) -> Result<Self, ModelError> {
        let n = order.len();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        let ok = n >= 1 && sorted.iter().copied().eq(1..=n as NodeId);
        if ok {
            Ok(Schedule { order })
        } else {
            Err(ModelError::NotAPermutation { order, n })
        }
    }

    /// The schedule `1, 2, ..., n`.
    pub fn identity(n: usize) -> Self {
        Schedule {
            order: (1..=n as NodeId).collect(),
        }
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Per-node uplink/downlink accounting for one schedule.
///
/// `complexity_eq9` counts every query and every data reply but not the
/// schedule's first, unconditioned `n`-bit upload; `total_with_first_node`
/// adds it back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostBreakdown {
    pub per_node: Vec<NodeCost>,
    pub complexity_eq9: u64,
    pub total_with_first_node: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeCost {
    pub node_id: NodeId,
    pub downlink_bits: u64,
    pub uplink_bits: u64,
}

/// On-disk field description: `{"n": 5, "nodes": [{"id": 1, "pos": [0.0]}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldFile {
    pub n: u32,
    pub nodes: Vec<FieldFileNode>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldFileNode {
    pub id: NodeId,
    pub pos: Vec<f64>,
}

impl FieldFile {
    pub fn into_field(self) -> Result<SensorField, ModelError> {
        SensorField::new(
            self.nodes.into_iter().map(|n| (n.id, n.pos)).collect(),
            self.n,
        )
    }

    pub fn from_field(field: &SensorField) -> Self {
        FieldFile {
            n: field.word_length(),
            nodes: field
                .nodes()
                .iter()
                .map(|n| FieldFileNode {
                    id: n.id,
                    pos: n.pos.clone(),
                })
                .collect(),
        }
    }
}

/// Random field with positions uniform in `[0, 2n]^2`, for tests and
/// benchmarks. Draws again on the (measure-zero) chance of a coincident pair.
pub fn random_field<R: rand::Rng>(
    rng: &mut R,
    n_nodes: usize,
    word_length: u32,
) -> SensorField {
    let side = 2.0 * f64::from(word_length);
    loop {
        let nodes = (1..=n_nodes as NodeId)
            .map(|id| {
                (
                    id,
                    vec![rng.random_range(0.0..side), rng.random_range(0.0..side)],
                )
            })
            .collect();
        if let Ok(field) = SensorField::new(nodes, word_length) {
            return field;
        }
    }
}
