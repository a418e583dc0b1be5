//! Interactive polling of correlated informants.
//!
//! One recipient collects the readings of many correlated sources by
//! querying them in a schedule. This crate provides:
//!
//! - the distance-driven correlation model of a sensor field and its bit
//!   accounting ([`model`]),
//! - ambiguity sets and worst-case lower bounds over finite joint supports
//!   ([`ambiguity`]),
//! - the three-party league announcement protocols with bit-exact
//!   transcripts ([`league`]),
//! - worst- and average-case schedule costs, an exhaustive optimizer, and
//!   the greedy nearest-next scheduler ([`scheduling`]),
//! - a message-level polling simulator whose counted bits equal the
//!   analytic costs ([`simulator`]).

pub mod ambiguity;
pub mod bits;
pub mod huffman;
pub mod league;
pub mod model;
pub mod scheduling;
pub mod simulator;

pub use ambiguity::{
    build_league_supports, AmbiguityError, AmbiguityReport, GroupPair, LeagueSupports,
    SupportRelation, TeamPair,
};
pub use bits::{ceil_log2, Bits};
pub use huffman::{Codebook, HuffmanError};
pub use league::{
    compare_orders, enumerate_matches, run_no_interaction, run_y_first, run_z_first,
    ComparisonReport, KnowledgeState, LeagueConfig, LeagueError, MatchInstance, Party,
    ProtocolBits, ProtocolKind, ProtocolRun, TeamRef, Transcript,
};
pub use model::{
    correlation_bits, query_cost, random_field, CorrelationModel, CostBreakdown, FieldFile,
    FieldFileNode, ModelError, NodeId, Schedule, SensorField, MAX_WORD_LENGTH,
};
pub use scheduling::{
    all_schedule_costs, average_case_complexity, brute_force_optimum,
    brute_force_optimum_with_limit, evaluate_schedule, greedy_schedule, resolve_steps, Method,
    OptimizationResult, PatternSpec, ResolvedStep, ScheduleError, ScheduleEvaluation,
    StepDistribution, DEFAULT_BRUTE_FORCE_LIMIT,
};
pub use simulator::{
    generate_field_data, run_average_poll, run_poll, AveragePollReport, BaseStation, Direction,
    FieldData, NodeAgent, SimulationReport, SimulatorError, TranscriptEntry,
};
