//! Message-level simulation of the polling protocol: an omniscient base
//! station queries node agents over a lossless channel, decodes instantly
//! (each word is reconstructed from prior reconstructions the moment its
//! bits arrive), and the counted bits must agree with the analytic schedule
//! cost exactly.

use crate::bits::Bits;
use crate::huffman::HuffmanError;
use crate::model::{CorrelationModel, ModelError, NodeId, Schedule};
use crate::scheduling::{evaluate_schedule, resolve_steps, PatternSpec, ScheduleError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimulatorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Huffman(#[from] HuffmanError),
    #[error("field data covers {got} nodes but the model has {expected}")]
    WrongNodeCount { expected: usize, got: usize },
    #[error("node {id} holds {word:#x}, which does not fit in {n} bits")]
    WordTooWide { id: NodeId, word: u64, n: u32 },
    #[error("query of {len} bits carries index {index}, outside the bit-count alphabet")]
    MalformedQuery { len: usize, index: u64 },
    #[error("at least one trial is required")]
    ZeroTrials,
}

fn word_mask(bits: u32) -> u64 {
    debug_assert!(bits <= 63);
    (1u64 << bits) - 1
}

/// Per-node readings for one polling round, with the pairwise consistency
/// flag the reconstruction guarantee rides on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldData {
    words: Vec<u64>,
    word_length: u32,
    pub consistency_ok: bool,
}

impl FieldData {
    /// Wrap per-node words (index 0 is node 1) and check that every pair
    /// with a conditional count below the word length agrees on the bits
    /// above it.
    pub fn new(words: Vec<u64>, model: &CorrelationModel) -> Result<Self, SimulatorError> {
        if words.len() != model.len() {
            return Err(SimulatorError::WrongNodeCount {
                expected: model.len(),
                got: words.len(),
            });
        }
        let n = model.word_length();
        for (idx, &word) in words.iter().enumerate() {
            if word > word_mask(n) {
                return Err(SimulatorError::WordTooWide {
                    id: (idx + 1) as NodeId,
                    word,
                    n,
                });
            }
        }
        let mut consistency_ok = true;
        'outer: for i in model.node_ids() {
            for j in model.node_ids().filter(|&j| j > i) {
                let b = model.pairwise(i, j).expect("distinct valid nodes");
                if b < n && (words[i as usize - 1] >> b) != (words[j as usize - 1] >> b) {
                    consistency_ok = false;
                    break 'outer;
                }
            }
        }
        Ok(FieldData {
            words,
            word_length: n,
            consistency_ok,
        })
    }

    pub fn word(&self, id: NodeId) -> u64 {
        self.words[id as usize - 1]
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn word_length(&self) -> u32 {
        self.word_length
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Draw a correlated reading set: a base word is drawn uniformly, and each
/// node keeps its top bits while its `m_i = min_j B(i|j)` least significant
/// bits are drawn fresh. Every pair then agrees above its conditional count
/// by construction.
pub fn generate_field_data(model: &CorrelationModel, seed: u64) -> FieldData {
    let n = model.word_length();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let base: u64 = rng.random_range(0..=word_mask(n));
    let words = model
        .node_ids()
        .map(|i| {
            let m = model
                .node_ids()
                .filter(|&j| j != i)
                .map(|j| model.pairwise(i, j).expect("distinct valid nodes"))
                .min()
                .unwrap_or(n);
            let fresh: u64 = rng.random_range(0..=word_mask(m));
            ((base >> m) << m) | fresh
        })
        .collect();
    FieldData::new(words, model).expect("constructed to fit the model")
}

/// A sensor node holding one n-bit reading. It answers queries with its
/// least significant bits and knows nothing about the rest of the field.
#[derive(Clone, Copy, Debug)]
pub struct NodeAgent {
    pub node_id: NodeId,
    data: u64,
}

impl NodeAgent {
    pub fn new(node_id: NodeId, data: u64, word_length: u32) -> Result<Self, SimulatorError> {
        if data > word_mask(word_length) {
            return Err(SimulatorError::WordTooWide {
                id: node_id,
                word: data,
                n: word_length,
            });
        }
        Ok(NodeAgent { node_id, data })
    }

    fn full_word(&self, word_length: u32) -> Bits {
        Bits::encode_be(self.data, word_length)
    }

    fn least_significant(&self, b: u32) -> Bits {
        Bits::encode_be(self.data & word_mask(b), b)
    }
}

/// Downlink query telling a node to send its `b` least significant bits.
///
/// The bit-count alphabet splits by codeword length: a 1-bit query selects
/// within {1, 2}, an L-bit query within (2^(L-1), 2^L]. The message length
/// itself (known from framing) tells the node which range applies, so the
/// value decodes in exactly `query_cost(b)` bits.
pub fn encode_query(b: u32) -> Bits {
    let len = crate::model::query_cost(b).expect("b >= 1");
    let index = if len == 1 {
        u64::from(b) - 1
    } else {
        u64::from(b) - (1 << (len - 1)) - 1
    };
    Bits::encode_be(index, len)
}

/// Node-side decoding of a query message.
pub fn decode_query(bits: &Bits) -> Result<u32, SimulatorError> {
    let len = bits.len();
    let index = bits.decode_be();
    let b = if len == 1 {
        index + 1
    } else {
        (1 << (len - 1)) + 1 + index
    };
    let valid = len >= 1 && (len == 1 || index < (1 << (len - 1)));
    if valid {
        Ok(b as u32)
    } else {
        Err(SimulatorError::MalformedQuery { len, index })
    }
}

/// The recipient side: knows the correlation model and the schedule, never a
/// node's data except through messages, and reconstructs each word the
/// moment its bits arrive.
#[derive(Debug)]
pub struct BaseStation<'a> {
    model: &'a CorrelationModel,
    schedule: &'a Schedule,
    reconstructed: BTreeMap<NodeId, u64>,
}

impl<'a> BaseStation<'a> {
    pub fn new(model: &'a CorrelationModel, schedule: &'a Schedule) -> Result<Self, SimulatorError> {
        if schedule.len() != model.len() {
            return Err(ScheduleError::WrongScheduleSize {
                expected: model.len(),
                got: schedule.len(),
            }
            .into());
        }
        Ok(BaseStation {
            model,
            schedule,
            reconstructed: BTreeMap::new(),
        })
    }

    pub fn reconstructed(&self) -> &BTreeMap<NodeId, u64> {
        &self.reconstructed
    }

    fn record_first(&mut self, node: NodeId, bits: &Bits) {
        self.reconstructed.insert(node, bits.decode_be());
    }

    /// The donor and bit count for polled position `k` (0-based, k >= 1).
    fn plan_step(&self, k: usize) -> Result<(NodeId, u32), SimulatorError> {
        let order = self.schedule.order();
        Ok(self.model.nearest_polled(order[k], &order[..k])?)
    }

    fn integrate(&mut self, node: NodeId, donor: NodeId, b: u32, payload: u64) {
        let donor_word = self.reconstructed[&donor];
        let word = ((donor_word >> b) << b) | payload;
        self.reconstructed.insert(node, word);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Down,
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub node_id: NodeId,
    pub bit_length: usize,
}

/// Outcome of one worst-case polling round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationReport {
    pub transcript: Vec<TranscriptEntry>,
    pub total_downlink: u64,
    pub total_uplink: u64,
    pub reconstruction_exact: bool,
    pub analytic_match: bool,
}

impl SimulationReport {
    pub fn total_bits(&self) -> u64 {
        self.total_downlink + self.total_uplink
    }
}

/// Poll every node once in schedule order. The first node uploads its full
/// word; each later node is queried for its conditional bit count and
/// answers with that many least significant bits. Exact reconstruction is
/// guaranteed when `data.consistency_ok`; the bit accounting is
/// data-independent either way.
pub fn run_poll(
    model: &CorrelationModel,
    schedule: &Schedule,
    data: &FieldData,
) -> Result<SimulationReport, SimulatorError> {
    if data.len() != model.len() {
        return Err(SimulatorError::WrongNodeCount {
            expected: model.len(),
            got: data.len(),
        });
    }
    let n = model.word_length();
    let agents: BTreeMap<NodeId, NodeAgent> = model
        .node_ids()
        .map(|id| Ok((id, NodeAgent::new(id, data.word(id), n)?)))
        .collect::<Result<_, SimulatorError>>()?;
    let mut station = BaseStation::new(model, schedule)?;
    let order = schedule.order();
    let mut transcript = Vec::with_capacity(2 * order.len() - 1);

    let first = order[0];
    let first_bits = agents[&first].full_word(n);
    transcript.push(TranscriptEntry {
        direction: Direction::Up,
        node_id: first,
        bit_length: first_bits.len(),
    });
    station.record_first(first, &first_bits);

    for (k, &node) in order.iter().enumerate().skip(1) {
        let (donor, b) = station.plan_step(k)?;
        let query = encode_query(b);
        transcript.push(TranscriptEntry {
            direction: Direction::Down,
            node_id: node,
            bit_length: query.len(),
        });
        let asked = decode_query(&query)?;
        let reply = agents[&node].least_significant(asked);
        transcript.push(TranscriptEntry {
            direction: Direction::Up,
            node_id: node,
            bit_length: reply.len(),
        });
        station.integrate(node, donor, asked, reply.decode_be());
    }

    let total_downlink: u64 = transcript
        .iter()
        .filter(|e| e.direction == Direction::Down)
        .map(|e| e.bit_length as u64)
        .sum();
    let total_uplink: u64 = transcript
        .iter()
        .filter(|e| e.direction == Direction::Up)
        .map(|e| e.bit_length as u64)
        .sum();
    let reconstruction_exact = model
        .node_ids()
        .all(|id| station.reconstructed()[&id] == data.word(id));
    let analytic = evaluate_schedule(model, schedule)?.cost.complexity_eq9;
    let analytic_match = total_downlink + total_uplink - u64::from(n) == analytic;

    Ok(SimulationReport {
        transcript,
        total_downlink,
        total_uplink,
        reconstruction_exact,
        analytic_match,
    })
}

/// Monte Carlo polling with per-step prefix-coded uplinks.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragePollReport {
    pub trials: u64,
    pub mean_total_bits: f64,
    pub std_error: f64,
    /// `n` plus the expected per-step query and uplink costs.
    pub analytic_total_bits: f64,
    pub per_step_mean_uplink: Vec<f64>,
    pub within_three_se: bool,
}

/// Run repeated polls with each step's uplink pattern drawn from the given
/// distribution and sent through that step's prefix code (codebooks are
/// shared knowledge and not charged). Readings are generated along the
/// schedule so every draw is consistent, and each trial's reconstruction is
/// checked against the generated truth.
pub fn run_average_poll(
    model: &CorrelationModel,
    schedule: &Schedule,
    spec: &PatternSpec,
    trials: u64,
    seed: u64,
) -> Result<AveragePollReport, SimulatorError> {
    if trials == 0 {
        return Err(SimulatorError::ZeroTrials);
    }
    let steps = resolve_steps(model, schedule, spec)?;
    let n = model.word_length();
    let order = schedule.order();
    let donors: Vec<NodeId> = (1..order.len())
        .map(|k| Ok(model.nearest_polled(order[k], &order[..k])?.0))
        .collect::<Result<_, SimulatorError>>()?;
    // inverse-CDF tables for explicitly distributed steps
    let cumulative: Vec<Option<Vec<f64>>> = match spec {
        PatternSpec::Uniform => vec![None; steps.len()],
        PatternSpec::PerStep(dists) => dists
            .iter()
            .map(|d| {
                let mut acc = 0.0;
                Some(
                    d.probs
                        .iter()
                        .map(|p| {
                            acc += p;
                            acc
                        })
                        .collect(),
                )
            })
            .collect(),
    };
    let analytic_total_bits = f64::from(n)
        + steps
            .iter()
            .map(|s| f64::from(s.query_bits) + s.expected_uplink)
            .sum::<f64>();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut totals = Vec::with_capacity(trials as usize);
    let mut uplink_sums = vec![0.0f64; steps.len()];
    for _ in 0..trials {
        let mut words: BTreeMap<NodeId, u64> = BTreeMap::new();
        words.insert(order[0], rng.random_range(0..=word_mask(n)));
        let mut reconstructed = words.clone();
        let mut total = u64::from(n);
        for (idx, step) in steps.iter().enumerate() {
            let pattern: u64 = match &cumulative[idx] {
                None => rng.random_range(0..=word_mask(step.b)),
                Some(cum) => {
                    let u: f64 = rng.random();
                    cum.iter()
                        .position(|&c| u < c)
                        .unwrap_or(cum.len() - 1) as u64
                }
            };
            let truth = ((words[&donors[idx]] >> step.b) << step.b) | pattern;
            words.insert(step.node_id, truth);
            total += u64::from(step.query_bits);
            let uplink_len = match &step.codebook {
                Some(cb) => {
                    let code = cb.code(pattern as usize)?;
                    let mut cursor = 0;
                    let decoded = cb.decode_prefix(code.as_str(), &mut cursor)?;
                    let donor_word = reconstructed[&donors[idx]];
                    reconstructed.insert(
                        step.node_id,
                        ((donor_word >> step.b) << step.b) | decoded as u64,
                    );
                    code.len()
                }
                None => {
                    let donor_word = reconstructed[&donors[idx]];
                    reconstructed.insert(step.node_id, ((donor_word >> step.b) << step.b) | pattern);
                    step.b as usize
                }
            };
            debug_assert_eq!(reconstructed[&step.node_id], truth);
            uplink_sums[idx] += uplink_len as f64;
            total += uplink_len as u64;
        }
        totals.push(total as f64);
    }

    let trials_f = trials as f64;
    let mean_total_bits = totals.iter().sum::<f64>() / trials_f;
    let std_error = if trials > 1 {
        let var = totals
            .iter()
            .map(|t| (t - mean_total_bits) * (t - mean_total_bits))
            .sum::<f64>()
            / (trials_f - 1.0);
        (var / trials_f).sqrt()
    } else {
        0.0
    };
    let per_step_mean_uplink = uplink_sums.iter().map(|s| s / trials_f).collect();
    let within_three_se = (mean_total_bits - analytic_total_bits).abs() <= 3.0 * std_error + 1e-9;

    Ok(AveragePollReport {
        trials,
        mean_total_bits,
        std_error,
        analytic_total_bits,
        per_step_mean_uplink,
        within_three_se,
    })
}
