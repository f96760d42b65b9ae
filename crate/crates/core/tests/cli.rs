use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rendezvous")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn solve_reports_the_half_speed_optimum() {
    let text = stdout(&["solve", "--variant", "none", "--v", "1/2"]);
    assert!(text.starts_with("opt_sum 68/9 "), "{text}");
}

#[test]
fn eval_form_gives_the_marker_schedule() {
    let text = stdout(&["eval-form", "--name", "marker_slow", "--v", "1"]);
    assert_eq!(text.lines().nth(1), Some("marker_slow,1,1/4,3/4,1,7/4,5/2,6,6"));
}

#[test]
fn oracle_closes_the_gap_at_equal_speed() {
    let text = stdout(&["oracle", "--variant", "none", "--v", "1", "--resolution", "8"]);
    assert!(text.contains("value 13/2"), "{text}");
    assert!(text.contains("gap 0 "), "{text}");
}

#[test]
fn sweep_csv_has_the_paired_columns() {
    let text = stdout(&["sweep", "--grid", "4"]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some(
            "v,v_decimal,opt_sum,opt_sum_decimal,opt_avg,opt_avg_decimal,next_to_opt_sum,next_to_opt_sum_decimal,\
             strategy_id,closed_form,closed_form_sum,closed_form_sum_decimal,match"
        )
    );
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("1,1,13/2,6.5,13/8,1.625,"), "{}", rows[3]);
}

#[test]
fn distance_doubles_every_sum() {
    let one: serde_json::Value = serde_json::from_str(&stdout(&["sweep", "--variant", "slow-marker", "--grid", "2", "--format", "json"])).unwrap();
    let two: serde_json::Value = serde_json::from_str(&stdout(&[
        "sweep", "--variant", "slow-marker", "--grid", "2", "--format", "json", "--distance", "2",
    ]))
    .unwrap();
    assert_eq!(two["metadata"]["distance"], "2");
    let sums = |v: &serde_json::Value| -> Vec<String> {
        v["rows"].as_array().unwrap().iter().map(|r| r["opt_sum"].as_str().unwrap().to_string()).collect()
    };
    assert_eq!(sums(&one), ["1312/189", "6"]);
    assert_eq!(sums(&two), ["2624/189", "12"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["certify", "--grid", "10", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let dir = std::env::temp_dir().join(format!("rendezvous-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for p in [&a, &b] {
        stdout(&["sweep", "--grid", "8", "--output", p.to_str().unwrap()]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn show_strategy_dumps_a_valid_replay() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["show-strategy", "--variant", "slow-marker", "--v", "1"])).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["outcome"]["sum"], "6");
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["sweep", "--grid", "0"][..],
        &["frobnicate"],
        &["solve", "--v", "3/2"],
        &["solve", "--v", "banana"],
        &["eval-form", "--name", "marker_slow"],
        &["sweep", "--grid", "2", "--distance", "-1"],
        &["show-strategy", "--v", "1", "--id", "not-an-id"],
        &["oracle", "--v", "1", "--resolution", "0"],
    ] {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
}
