//! Schedule cost evaluation, exhaustive and greedy schedule search, and the
//! average-case accounting that swaps fixed per-step bit counts for expected
//! prefix-code lengths.

use crate::huffman::{uniform_pattern_probs, Codebook, HuffmanError};
use crate::model::{query_cost, CorrelationModel, CostBreakdown, ModelError, NodeCost, NodeId, Schedule};
use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

/// Largest node count the exhaustive optimizer accepts by default; beyond
/// this the factorial search space stops being a desk-scale oracle.
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 10;

/// Widest step (in bits) for which a uniform pattern distribution is
/// materialized as an explicit codebook; wider steps use the exact analytic
/// value, which for a uniform distribution over `2^B` patterns is `B`.
pub const MAX_EXPLICIT_UNIFORM_BITS: u32 = 16;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("exhaustive search over {n} nodes means {n}! schedules, above the limit of {limit}")]
    TooManyNodes { n: usize, limit: usize },
    #[error("schedule covers {got} nodes but the model has {expected}")]
    WrongScheduleSize { expected: usize, got: usize },
    #[error("expected {expected} per-step distributions, got {got}")]
    WrongStepCount { expected: usize, got: usize },
    #[error("step {step}: distribution over {got} patterns, expected 2^{b} = {expected}")]
    WrongPatternCount {
        step: usize,
        b: u32,
        expected: usize,
        got: usize,
    },
    #[error("step {step}: probabilities sum to {sum}, expected 1 within 1e-9")]
    BadProbabilitySum { step: usize, sum: f64 },
    #[error("step {step}: {source}")]
    BadDistribution {
        step: usize,
        source: HuffmanError,
    },
}

/// A schedule together with its per-step bit counts and cost breakdown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleEvaluation {
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    /// Conditional bit count of each polled node after the first.
    pub per_step_b: Vec<u32>,
    /// Nodes whose query-plus-reply exceeds the unconditioned word length;
    /// the accounting still charges the query for them.
    pub wasteful_steps: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Greedy,
}

/// Outcome of a schedule search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptimizationResult {
    pub best_schedule: Schedule,
    pub best_cost: u64,
    pub evaluated_count: u64,
    pub method: Method,
}

fn order_cost(model: &CorrelationModel, order: &[NodeId]) -> u64 {
    let mut cost = 0u64;
    for k in 1..order.len() {
        let b = model
            .conditional(order[k], &order[..k])
            .expect("valid permutation prefix");
        cost += u64::from(query_cost(b).expect("b >= 1")) + u64::from(b);
    }
    cost
}

/// Evaluate a schedule: the first node uploads its full word for free as far
/// as this count is concerned, and every later node is charged its query plus
/// its conditional bit count.
pub fn evaluate_schedule(
    model: &CorrelationModel,
    schedule: &Schedule,
) -> Result<ScheduleEvaluation, ScheduleError> {
    if schedule.len() != model.len() {
        return Err(ScheduleError::WrongScheduleSize {
            expected: model.len(),
            got: schedule.len(),
        });
    }
    let order = schedule.order();
    let n = model.word_length();
    let mut per_node = vec![NodeCost {
        node_id: order[0],
        downlink_bits: 0,
        uplink_bits: u64::from(n),
    }];
    let mut per_step_b = Vec::with_capacity(order.len().saturating_sub(1));
    let mut wasteful_steps = Vec::new();
    let mut complexity = 0u64;
    for k in 1..order.len() {
        let b = model.conditional(order[k], &order[..k])?;
        let q = query_cost(b)?;
        per_step_b.push(b);
        if q + b > n {
            wasteful_steps.push(order[k]);
        }
        per_node.push(NodeCost {
            node_id: order[k],
            downlink_bits: u64::from(q),
            uplink_bits: u64::from(b),
        });
        complexity += u64::from(q) + u64::from(b);
    }
    Ok(ScheduleEvaluation {
        schedule: schedule.clone(),
        cost: CostBreakdown {
            per_node,
            complexity_eq9: complexity,
            total_with_first_node: complexity + u64::from(n),
        },
        per_step_b,
        wasteful_steps,
    })
}

/// Minimize the schedule cost over all `N!` permutations, breaking ties
/// toward the lexicographically smallest order.
pub fn brute_force_optimum(model: &CorrelationModel) -> Result<OptimizationResult, ScheduleError> {
    brute_force_optimum_with_limit(model, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn brute_force_optimum_with_limit(
    model: &CorrelationModel,
    limit: usize,
) -> Result<OptimizationResult, ScheduleError> {
    let n = model.len();
    if n > limit {
        return Err(ScheduleError::TooManyNodes { n, limit });
    }
    let ids: Vec<NodeId> = model.node_ids().collect();
    let mut best: Option<(u64, Vec<NodeId>)> = None;
    let mut evaluated = 0u64;
    // permutations of a sorted slice come out in lexicographic order, so
    // keeping the first strict minimum realizes the tie-break
    for order in ids.iter().copied().permutations(n) {
        let cost = order_cost(model, &order);
        evaluated += 1;
        if best.as_ref().is_none_or(|(bc, _)| cost < *bc) {
            best = Some((cost, order));
        }
    }
    let (best_cost, order) = best.expect("at least one permutation");
    Ok(OptimizationResult {
        best_schedule: Schedule::new(order).expect("permutation by construction"),
        best_cost,
        evaluated_count: evaluated,
        method: Method::BruteForce,
    })
}

/// Build a schedule by repeatedly appending the unscheduled node with the
/// smallest conditional bit count toward the scheduled set, ties to the
/// smallest node id.
pub fn greedy_schedule(
    model: &CorrelationModel,
    start: NodeId,
) -> Result<OptimizationResult, ScheduleError> {
    if start == 0 || start as usize > model.len() {
        return Err(ScheduleError::Model(ModelError::UnknownNode { id: start }));
    }
    let mut order = vec![start];
    let mut remaining: Vec<NodeId> = model.node_ids().filter(|&id| id != start).collect();
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &id)| {
                let b = model.conditional(id, &order).expect("disjoint sets");
                (pos, (b, id))
            })
            .min_by_key(|&(_, key)| key)
            .expect("remaining is nonempty");
        order.push(remaining.remove(pos));
    }
    let best_cost = order_cost(model, &order);
    Ok(OptimizationResult {
        best_schedule: Schedule::new(order).expect("permutation by construction"),
        best_cost,
        evaluated_count: 1,
        method: Method::Greedy,
    })
}

/// Evaluate every permutation's cost, for plotting and small-scale tables.
pub fn all_schedule_costs(
    model: &CorrelationModel,
    limit: usize,
) -> Result<Vec<(Vec<NodeId>, u64)>, ScheduleError> {
    let n = model.len();
    if n > limit {
        return Err(ScheduleError::TooManyNodes { n, limit });
    }
    let ids: Vec<NodeId> = model.node_ids().collect();
    Ok(ids
        .iter()
        .copied()
        .permutations(n)
        .map(|order| {
            let cost = order_cost(model, &order);
            (order, cost)
        })
        .collect())
}

/// How the bit patterns each polled node may send are distributed.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternSpec {
    /// Every step's `2^B` patterns are equally likely.
    Uniform,
    /// One distribution per polled step (schedule positions 2..=N).
    PerStep(Vec<StepDistribution>),
}

/// Probabilities over the `2^B` patterns of one step, in pattern-value order.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDistribution {
    pub probs: Vec<f64>,
}

/// One polled step resolved against a schedule: its bit count, query cost,
/// prefix code (when materialized), and expected uplink length.
#[derive(Clone, Debug)]
pub struct ResolvedStep {
    pub node_id: NodeId,
    pub b: u32,
    pub query_bits: u32,
    pub codebook: Option<Codebook>,
    pub expected_uplink: f64,
}

/// Resolve a pattern spec against a schedule, validating distribution shapes
/// and building per-step codebooks.
pub fn resolve_steps(
    model: &CorrelationModel,
    schedule: &Schedule,
    spec: &PatternSpec,
) -> Result<Vec<ResolvedStep>, ScheduleError> {
    let eval = evaluate_schedule(model, schedule)?;
    let steps = eval.per_step_b.len();
    if let PatternSpec::PerStep(dists) = spec {
        if dists.len() != steps {
            return Err(ScheduleError::WrongStepCount {
                expected: steps,
                got: dists.len(),
            });
        }
    }
    let mut resolved = Vec::with_capacity(steps);
    for (step, (&b, node)) in eval
        .per_step_b
        .iter()
        .zip(schedule.order()[1..].iter().copied())
        .enumerate()
    {
        let query_bits = query_cost(b)?;
        let (codebook, expected_uplink) = match spec {
            PatternSpec::Uniform => {
                if b <= MAX_EXPLICIT_UNIFORM_BITS {
                    let cb = Codebook::from_probs(&uniform_pattern_probs(b))
                        .map_err(|source| ScheduleError::BadDistribution { step, source })?;
                    let expected = cb.expected_length();
                    (Some(cb), expected)
                } else {
                    (None, f64::from(b))
                }
            }
            PatternSpec::PerStep(dists) => {
                let probs = &dists[step].probs;
                let expected_len = 1usize << b;
                if probs.len() != expected_len {
                    return Err(ScheduleError::WrongPatternCount {
                        step,
                        b,
                        expected: expected_len,
                        got: probs.len(),
                    });
                }
                let sum: f64 = probs.iter().sum();
                if !sum.is_finite() || (sum - 1.0).abs() > 1e-9 {
                    return Err(ScheduleError::BadProbabilitySum { step, sum });
                }
                let cb = Codebook::from_probs(probs)
                    .map_err(|source| ScheduleError::BadDistribution { step, source })?;
                let expected = cb.expected_length();
                (Some(cb), expected)
            }
        };
        resolved.push(ResolvedStep {
            node_id: node,
            b,
            query_bits,
            codebook,
            expected_uplink,
        });
    }
    Ok(resolved)
}

/// Average-case cost of a schedule: the query bits plus each step's expected
/// prefix-code length under its pattern distribution. With uniform patterns
/// this equals the worst-case count exactly.
pub fn average_case_complexity(
    model: &CorrelationModel,
    schedule: &Schedule,
    spec: &PatternSpec,
) -> Result<f64, ScheduleError> {
    Ok(resolve_steps(model, schedule, spec)?
        .iter()
        .map(|s| f64::from(s.query_bits) + s.expected_uplink)
        .sum())
}
