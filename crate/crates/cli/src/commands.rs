//! Command implementations. Every report is a single compact JSON line with
//! deterministic key order; transcript and curve data precede it as their own
//! lines.

use crate::{MethodArg, ModeArg, Outcome, UsageError};
use corrpoll_core::league::{
    enumerate_matches, run_no_interaction, run_y_first, run_z_first, LeagueConfig, ProtocolKind,
};
use corrpoll_core::{
    all_schedule_costs, brute_force_optimum_with_limit, build_league_supports, compare_orders,
    correlation_bits, evaluate_schedule, generate_field_data, greedy_schedule, run_average_poll,
    run_poll, ComparisonReport, CorrelationModel, Direction, FieldFile, NodeId, PatternSpec,
    ProtocolRun, Schedule, ScheduleEvaluation, SensorField, StepDistribution, SupportRelation,
    DEFAULT_BRUTE_FORCE_LIMIT,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;

type CmdResult = Result<Outcome, UsageError>;

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

fn load_field(path: &Path) -> Result<SensorField, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read field file {}: {e}", path.display())))?;
    let file: FieldFile = serde_json::from_str(&text)
        .map_err(|e| usage(format!("field file {}: {e}", path.display())))?;
    file.into_field()
        .map_err(|e| usage(format!("field file {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// league

#[derive(Serialize)]
struct TranscriptHeader<'a> {
    transcript: &'a str,
}

#[derive(Serialize)]
struct TranscriptLine<'a> {
    sender: String,
    bits: &'a str,
    purpose: &'a str,
}

#[derive(Serialize)]
struct ExhaustiveSection {
    instances: usize,
    all_exact: bool,
}

#[derive(Serialize)]
struct LeagueReport {
    groups: u32,
    teams: u32,
    comparison: ComparisonReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive: Option<ExhaustiveSection>,
}

fn transcript_lines(kind: ProtocolKind, run: &ProtocolRun, lines: &mut Vec<String>) {
    lines.push(json_line(&TranscriptHeader {
        transcript: &kind.to_string(),
    }));
    for msg in &run.transcript.messages {
        lines.push(json_line(&TranscriptLine {
            sender: msg.sender.to_string(),
            bits: msg.bits.as_str(),
            purpose: &msg.purpose,
        }));
    }
}

pub fn league(groups: u32, teams: u32, exhaustive: bool, transcripts: bool) -> CmdResult {
    let cfg = LeagueConfig::new(groups, teams).map_err(|e| usage(e.to_string()))?;
    let mut lines = Vec::new();

    if transcripts {
        let sample = enumerate_matches(&cfg)[0];
        let runs = [
            (ProtocolKind::NoInteraction, run_no_interaction(&cfg, &sample)),
            (ProtocolKind::YFirst, run_y_first(&cfg, &sample)),
            (ProtocolKind::ZFirst, run_z_first(&cfg, &sample)),
        ];
        for (kind, run) in runs {
            transcript_lines(kind, &run.map_err(|e| usage(e.to_string()))?, &mut lines);
        }
    }

    let exhaustive_section = if exhaustive {
        let matches = enumerate_matches(&cfg);
        let mut all_exact = true;
        for m in &matches {
            for run in [
                run_no_interaction(&cfg, m),
                run_y_first(&cfg, m),
                run_z_first(&cfg, m),
            ] {
                let run = run.map_err(|e| usage(e.to_string()))?;
                all_exact &= run.reconstructed == m.canonical();
            }
        }
        Some(ExhaustiveSection {
            instances: matches.len(),
            all_exact,
        })
    } else {
        None
    };

    let checks_ok = exhaustive_section.as_ref().is_none_or(|s| s.all_exact);
    let comparison = compare_orders(&cfg).map_err(|e| usage(e.to_string()))?;
    lines.push(json_line(&LeagueReport {
        groups,
        teams,
        comparison,
        exhaustive: exhaustive_section,
    }));
    Ok(Outcome { lines, checks_ok })
}

// ---------------------------------------------------------------------------
// ambiguity

#[derive(Serialize)]
struct SupportReport {
    x_label: String,
    y_label: String,
    pairs: usize,
    max_ambiguity: usize,
    lower_bound_bits: u32,
    per_y: BTreeMap<String, usize>,
}

fn support_report<X, Y>(rel: &SupportRelation<X, Y>) -> SupportReport
where
    X: Ord + Clone,
    Y: Ord + Clone + Display,
{
    let report = rel.max_ambiguity();
    SupportReport {
        x_label: rel.x_label.clone(),
        y_label: rel.y_label.clone(),
        pairs: rel.len(),
        max_ambiguity: report.max_ambiguity,
        lower_bound_bits: report.lower_bound_bits,
        per_y: report.per_y_display(),
    }
}

#[derive(Serialize)]
struct AmbiguityCmdReport {
    groups: u32,
    teams: u32,
    supports: BTreeMap<String, SupportReport>,
}

pub fn ambiguity(groups: u32, teams: u32) -> CmdResult {
    let s = build_league_supports(groups, teams).map_err(|e| usage(e.to_string()))?;
    let mut supports = BTreeMap::new();
    supports.insert("teams_given_groups".into(), support_report(&s.teams_given_groups));
    supports.insert("winner_given_teams".into(), support_report(&s.winner_given_teams));
    supports.insert("winner_given_groups".into(), support_report(&s.winner_given_groups));
    supports.insert(
        "remaining_team_given_group".into(),
        support_report(&s.remaining_team_given_group),
    );
    Ok(Outcome {
        lines: vec![json_line(&AmbiguityCmdReport {
            groups,
            teams,
            supports,
        })],
        checks_ok: true,
    })
}

// ---------------------------------------------------------------------------
// schedule

#[derive(Serialize)]
struct SearchSection {
    schedule: Vec<NodeId>,
    cost: u64,
    evaluated: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<NodeId>,
}

#[derive(Serialize)]
struct StepRow {
    node: NodeId,
    b: u32,
    query: u32,
}

#[derive(Serialize)]
struct EvalSection {
    schedule: Vec<NodeId>,
    per_step: Vec<StepRow>,
    complexity_eq9: u64,
    total_with_first_node: u64,
    wasteful_steps: Vec<NodeId>,
}

fn eval_section(eval: &ScheduleEvaluation) -> EvalSection {
    EvalSection {
        schedule: eval.schedule.order().to_vec(),
        per_step: eval
            .schedule
            .order()
            .iter()
            .skip(1)
            .zip(&eval.cost.per_node[1..])
            .map(|(&node, cost)| StepRow {
                node,
                b: cost.uplink_bits as u32,
                query: cost.downlink_bits as u32,
            })
            .collect(),
        complexity_eq9: eval.cost.complexity_eq9,
        total_with_first_node: eval.cost.total_with_first_node,
        wasteful_steps: eval.wasteful_steps.clone(),
    }
}

#[derive(Serialize)]
struct ScheduleReport {
    field: String,
    nodes: usize,
    word_length: u32,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    greedy: Option<SearchSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute: Option<SearchSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement: Option<bool>,
    evaluation: EvalSection,
}

/// The bits-versus-distance curve of the correlation model in 0.25 steps of
/// distance up to two past the word length.
fn curve_lines(n: u32) -> Vec<String> {
    let mut lines = vec!["d,bits".to_string()];
    let mut quarter_steps = 1;
    loop {
        let d = f64::from(quarter_steps) * 0.25;
        if d > f64::from(n) + 2.0 {
            break;
        }
        lines.push(format!("{d:.2},{}", correlation_bits(d, n)));
        quarter_steps += 1;
    }
    lines
}

pub fn schedule(
    field_path: Option<&Path>,
    method: MethodArg,
    start: u32,
    brute_limit: Option<usize>,
    csv: Option<&Path>,
    emit_curve: bool,
    word_length: Option<u32>,
) -> CmdResult {
    if emit_curve {
        let n = match (word_length, field_path) {
            (Some(n), _) => n,
            (None, Some(path)) => load_field(path)?.word_length(),
            (None, None) => {
                return Err(usage(
                    "--emit-correlation-curve needs --word-length or --field",
                ))
            }
        };
        let lines = curve_lines(n);
        return match csv {
            Some(path) => {
                fs::write(path, lines.join("\n") + "\n")
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                Ok(Outcome {
                    lines: vec![format!(
                        "{{\"curve_rows\":{},\"csv\":{}}}",
                        lines.len() - 1,
                        serde_json::to_string(&path.display().to_string()).expect("string"),
                    )],
                    checks_ok: true,
                })
            }
            None => Ok(Outcome {
                lines,
                checks_ok: true,
            }),
        };
    }

    let field_path = field_path.ok_or_else(|| usage("--field is required"))?;
    let field = load_field(field_path)?;
    let model = CorrelationModel::from_field(&field);
    let limit = brute_limit.unwrap_or(DEFAULT_BRUTE_FORCE_LIMIT);

    let greedy = if matches!(method, MethodArg::Greedy | MethodArg::Both) {
        let result = greedy_schedule(&model, start).map_err(|e| usage(e.to_string()))?;
        Some((result, start))
    } else {
        None
    };
    let brute = if matches!(method, MethodArg::Brute | MethodArg::Both) {
        Some(brute_force_optimum_with_limit(&model, limit).map_err(|e| usage(e.to_string()))?)
    } else {
        None
    };
    let agreement = match (&greedy, &brute) {
        (Some((g, _)), Some(b)) => Some(g.best_cost == b.best_cost),
        _ => None,
    };
    let checks_ok = agreement.unwrap_or(true);

    let best = greedy
        .as_ref()
        .map(|(g, _)| &g.best_schedule)
        .or(brute.as_ref().map(|b| &b.best_schedule))
        .expect("at least one method ran");
    let eval = evaluate_schedule(&model, best).map_err(|e| usage(e.to_string()))?;

    if let Some(path) = csv {
        let table = all_schedule_costs(&model, limit).map_err(|e| usage(e.to_string()))?;
        let mut out = String::from("schedule,cost\n");
        for (order, cost) in table {
            let cells: Vec<String> = order.iter().map(|id| id.to_string()).collect();
            out.push_str(&format!("{},{cost}\n", cells.join("-")));
        }
        fs::write(path, out).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let report = ScheduleReport {
        field: field_path.display().to_string(),
        nodes: model.len(),
        word_length: model.word_length(),
        method: match method {
            MethodArg::Greedy => "greedy",
            MethodArg::Brute => "brute",
            MethodArg::Both => "both",
        },
        greedy: greedy.map(|(g, start)| SearchSection {
            schedule: g.best_schedule.order().to_vec(),
            cost: g.best_cost,
            evaluated: g.evaluated_count,
            start: Some(start),
        }),
        brute: brute.map(|b| SearchSection {
            schedule: b.best_schedule.order().to_vec(),
            cost: b.best_cost,
            evaluated: b.evaluated_count,
            start: None,
        }),
        agreement,
        evaluation: eval_section(&eval),
    };
    Ok(Outcome {
        lines: vec![json_line(&report)],
        checks_ok,
    })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Serialize)]
struct SimTranscriptLine {
    dir: &'static str,
    node: NodeId,
    bits: usize,
}

#[derive(Serialize)]
struct WorstSummary {
    downlink: u64,
    uplink: u64,
    total: u64,
    analytic: u64,
    #[serde(rename = "match")]
    is_match: bool,
    exact: bool,
}

#[derive(Serialize)]
struct AverageSummary {
    mode: &'static str,
    trials: u64,
    mean_total: f64,
    analytic_total: f64,
    std_error: f64,
    within_three_se: bool,
    per_step_mean_uplink: Vec<f64>,
}

fn parse_schedule(text: &str) -> Result<Schedule, UsageError> {
    let order: Vec<NodeId> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<NodeId>()
                .map_err(|_| usage(format!("invalid schedule element {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    Schedule::new(order).map_err(|e| usage(e.to_string()))
}

fn load_patterns(path: &Path) -> Result<PatternSpec, UsageError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read patterns file {}: {e}", path.display())))?;
    let probs: Vec<Vec<f64>> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("patterns file {}: {e}", path.display())))?;
    Ok(PatternSpec::PerStep(
        probs
            .into_iter()
            .map(|probs| StepDistribution { probs })
            .collect(),
    ))
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    field_path: &Path,
    schedule_arg: Option<&str>,
    start: u32,
    mode: ModeArg,
    trials: u64,
    patterns: Option<&Path>,
    transcripts: bool,
    seed: u64,
) -> CmdResult {
    let field = load_field(field_path)?;
    let model = CorrelationModel::from_field(&field);
    let schedule = match schedule_arg {
        Some(text) => parse_schedule(text)?,
        None => greedy_schedule(&model, start)
            .map_err(|e| usage(e.to_string()))?
            .best_schedule,
    };
    if schedule.len() != model.len() {
        return Err(usage(format!(
            "schedule covers {} nodes but the field has {}",
            schedule.len(),
            model.len()
        )));
    }

    let mut lines = Vec::new();
    match mode {
        ModeArg::Worst => {
            let data = generate_field_data(&model, seed);
            let report = run_poll(&model, &schedule, &data).map_err(|e| usage(e.to_string()))?;
            if transcripts {
                for entry in &report.transcript {
                    lines.push(json_line(&SimTranscriptLine {
                        dir: match entry.direction {
                            Direction::Down => "down",
                            Direction::Up => "up",
                        },
                        node: entry.node_id,
                        bits: entry.bit_length,
                    }));
                }
            }
            let analytic = evaluate_schedule(&model, &schedule)
                .map_err(|e| usage(e.to_string()))?
                .cost
                .total_with_first_node;
            let checks_ok = report.analytic_match && report.reconstruction_exact;
            lines.push(json_line(&WorstSummary {
                downlink: report.total_downlink,
                uplink: report.total_uplink,
                total: report.total_bits(),
                analytic,
                is_match: report.analytic_match,
                exact: report.reconstruction_exact,
            }));
            Ok(Outcome { lines, checks_ok })
        }
        ModeArg::Average => {
            let spec = match patterns {
                Some(path) => load_patterns(path)?,
                None => PatternSpec::Uniform,
            };
            let report = run_average_poll(&model, &schedule, &spec, trials, seed)
                .map_err(|e| usage(e.to_string()))?;
            let checks_ok = report.within_three_se;
            lines.push(json_line(&AverageSummary {
                mode: "average",
                trials: report.trials,
                mean_total: report.mean_total_bits,
                analytic_total: report.analytic_total_bits,
                std_error: report.std_error,
                within_three_se: report.within_three_se,
                per_step_mean_uplink: report.per_step_mean_uplink,
            }));
            Ok(Outcome { lines, checks_ok })
        }
    }
}
