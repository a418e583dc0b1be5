//! End-to-end checks of the binary: JSON output shapes, exit codes, and
//! byte-for-byte determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn corrpoll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrpoll"))
        .args(args)
        .env_remove("CORRPOLL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every stdout line is JSON"))
        .collect()
}

fn write_line_field(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("line.json");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(
        f,
        r#"{{"n":5,"nodes":[{{"id":1,"pos":[0.0]}},{{"id":2,"pos":[2.5]}},{{"id":3,"pos":[6.0]}}]}}"#
    )
    .unwrap();
    path
}

#[test]
fn league_reports_the_three_totals() {
    let out = corrpoll(&["league", "--groups", "8", "--teams", "4"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines.len(), 1);
    let runs = lines[0]["comparison"]["runs"].as_array().unwrap();
    let totals: Vec<u64> = runs.iter().map(|r| r["total_bits"].as_u64().unwrap()).collect();
    assert_eq!(totals, vec![12, 11, 10]);
    assert_eq!(lines[0]["comparison"]["order_dependent"], true);
}

#[test]
fn league_exhaustive_flag_reports_exact_decoding() {
    let out = corrpoll(&["league", "--groups", "4", "--teams", "2", "--exhaustive"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0]["exhaustive"]["instances"], 48);
    assert_eq!(lines[0]["exhaustive"]["all_exact"], true);
}

#[test]
fn league_transcript_lines_have_the_message_schema() {
    let out = corrpoll(&["league", "--groups", "8", "--teams", "4", "--transcripts"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    // 3 headers + (4 + 6 + 6) messages + the report
    assert_eq!(lines.len(), 3 + 16 + 1);
    let msg = &lines[1];
    assert!(msg["sender"].is_string());
    assert!(msg["bits"].is_string());
    assert!(msg["purpose"].is_string());
}

#[test]
fn league_rejects_one_group() {
    let out = corrpoll(&["league", "--groups", "1", "--teams", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("two groups"));
}

#[test]
fn ambiguity_reports_the_four_supports() {
    let out = corrpoll(&["ambiguity", "--groups", "8", "--teams", "4"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    let supports = &lines[0]["supports"];
    assert_eq!(supports["teams_given_groups"]["max_ambiguity"], 16);
    assert_eq!(supports["winner_given_teams"]["max_ambiguity"], 2);
    assert_eq!(supports["winner_given_groups"]["max_ambiguity"], 8);
    assert_eq!(supports["remaining_team_given_group"]["max_ambiguity"], 4);
    assert_eq!(supports["teams_given_groups"]["lower_bound_bits"], 4);
}

#[test]
fn schedule_both_methods_agree_on_the_line_field() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let out = corrpoll(&["schedule", "--field", field.to_str().unwrap(), "--method", "both"]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0]["greedy"]["cost"], 11);
    assert_eq!(lines[0]["brute"]["cost"], 11);
    assert_eq!(lines[0]["agreement"], true);
    assert_eq!(lines[0]["evaluation"]["total_with_first_node"], 16);
}

#[test]
fn schedule_greedy_from_the_far_end() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let out = corrpoll(&[
        "schedule",
        "--field",
        field.to_str().unwrap(),
        "--method",
        "greedy",
        "--start",
        "3",
    ]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0]["greedy"]["schedule"], serde_json::json!([3, 2, 1]));
    assert_eq!(lines[0]["greedy"]["cost"], 11);
}

#[test]
fn schedule_missing_field_file_names_the_path() {
    let out = corrpoll(&["schedule", "--field", "/no/such/field.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/field.json"));
}

#[test]
fn schedule_csv_table_lists_all_permutations() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let csv = dir.path().join("costs.csv");
    let out = corrpoll(&[
        "schedule",
        "--field",
        field.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 1 + 6);
    assert!(table.starts_with("schedule,cost\n"));
    assert!(table.contains("1-2-3,11"));
}

#[test]
fn correlation_curve_matches_the_model() {
    let out = corrpoll(&["schedule", "--emit-correlation-curve", "--word-length", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,bits"));
    assert!(text.contains("0.25,1"));
    assert!(text.contains("3.25,4"));
    assert!(text.contains("6.00,5"));
    // capped at the word length past d = n
    assert!(!text.contains(",6"));
}

#[test]
fn simulate_worst_mode_summary_schema() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let out = corrpoll(&["simulate", "--field", field.to_str().unwrap()]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    let summary = &lines[0];
    assert_eq!(summary["total"], 16);
    assert_eq!(summary["analytic"], 16);
    assert_eq!(summary["match"], true);
    assert_eq!(summary["exact"], true);
    assert_eq!(
        summary["downlink"].as_u64().unwrap() + summary["uplink"].as_u64().unwrap(),
        16
    );
}

#[test]
fn simulate_transcript_lines_account_for_every_bit() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let out = corrpoll(&[
        "simulate",
        "--field",
        field.to_str().unwrap(),
        "--transcripts",
    ]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    let total: u64 = lines[..lines.len() - 1]
        .iter()
        .map(|l| l["bits"].as_u64().unwrap())
        .sum();
    assert_eq!(total, lines[lines.len() - 1]["total"].as_u64().unwrap());
}

#[test]
fn simulate_average_mode_tracks_the_analytic_value() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let out = corrpoll(&[
        "simulate",
        "--field",
        field.to_str().unwrap(),
        "--mode",
        "average",
        "--trials",
        "2000",
    ]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    assert_eq!(lines[0]["analytic_total"], 16.0);
    assert_eq!(lines[0]["within_three_se"], true);
}

#[test]
fn simulate_rejects_a_non_permutation_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let out = corrpoll(&[
        "simulate",
        "--field",
        field.to_str().unwrap(),
        "--schedule",
        "1,1,2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a permutation"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let args = [
        "simulate",
        "--field",
        field.to_str().unwrap(),
        "--mode",
        "average",
        "--trials",
        "500",
        "--seed",
        "7",
    ];
    let a = corrpoll(&args);
    let b = corrpoll(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_env_var_overrides_the_default() {
    let dir = tempfile::tempdir().unwrap();
    let field = write_line_field(dir.path());
    let with_env = Command::new(env!("CARGO_BIN_EXE_corrpoll"))
        .args(["simulate", "--field", field.to_str().unwrap(), "--transcripts"])
        .env("CORRPOLL_SEED", "123")
        .output()
        .unwrap();
    let with_flag = corrpoll(&[
        "simulate",
        "--field",
        field.to_str().unwrap(),
        "--transcripts",
        "--seed",
        "123",
    ]);
    assert!(with_env.status.success());
    assert_eq!(with_env.stdout, with_flag.stdout);
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = corrpoll(&[
        "league",
        "--groups",
        "4",
        "--teams",
        "2",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let report: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(report["groups"], 4);
}
