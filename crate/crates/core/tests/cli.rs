use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blindcounter"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn machine(args: &[&str]) -> (String, i32) {
    let mut full = vec!["--machine"];
    full.extend_from_slice(args);
    let out = run(&full);
    (
        String::from_utf8(out.stdout).unwrap(),
        out.status.code().unwrap(),
    )
}

fn has_line(out: &str, line: &str) -> bool {
    out.lines().any(|l| l == line)
}

#[test]
fn validate_the_shipped_automaton() {
    let (out, code) = machine(&["validate", &data("liminf.auto")]);
    assert_eq!(code, 0);
    assert!(has_line(&out, "violations=0"));
}

#[test]
fn validate_reports_violations_with_exit_one() {
    let dir = std::env::temp_dir().join(format!("bc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.auto");
    std::fs::write(
        &file,
        "states: p q\nalphabet: a\ncounters: 1\ninitial: p\naccepting: q\np a 0 q 1\n",
    )
    .unwrap();
    let (out, code) = machine(&["validate", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(has_line(&out, "violations=1"), "{out}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        run(&["accept", &data("liminf.auto")]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["canonical-run", "--blocks", "|1:1"]).status.code(),
        Some(2)
    );
}

#[test]
fn help_and_version_exit_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("accept"));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_one() {
    let (out, code) = machine(&["accept", &data("liminf.auto"), "--lasso", "|abc"]);
    assert_eq!(code, 1);
    assert!(out.lines().any(|l| l.starts_with("error=")));
    let (_, code) = machine(&["encode", "--intlasso", "1,2|"]);
    assert_eq!(code, 1);
    let (_, code) = machine(&["validate", "/nonexistent/file.auto"]);
    assert_eq!(code, 1);
}

#[test]
fn accept_and_reject() {
    let (out, code) = machine(&["accept", &data("liminf.auto"), "--lasso", "|ab"]);
    assert_eq!(code, 0);
    assert!(has_line(&out, "accepted=true"));
    assert!(has_line(&out, "witness=present"));
    assert!(out.lines().any(|l| l.starts_with("trace=")));
    let (out, code) = machine(&["accept", &data("liminf.auto"), "--lasso", "|aab"]);
    assert_eq!(code, 0);
    assert!(has_line(&out, "accepted=false"));
}

#[test]
fn oracle_reports_cap_contact() {
    let (out, _) = machine(&[
        "oracle",
        &data("liminf.auto"),
        "--lasso",
        "|aab",
        "--counter-cap",
        "8",
    ]);
    assert!(has_line(&out, "verdict=reject-within-caps"));
    assert!(has_line(&out, "cap_touched=true"));
    assert!(has_line(&out, "conclusive=no"));
}

#[test]
fn encode_and_block_commands() {
    let (out, _) = machine(&["encode", "--intlasso", "1|0,2"]);
    assert!(has_line(&out, "word=aabb|abaaabbb"));
    assert!(has_line(&out, "blocks=2:2|1:1,3:3"));
    assert!(has_line(&out, "liminf=0"));
    let (out, _) = machine(&[
        "canonical-run",
        "--blocks",
        "|2:1,1:1",
        "--n",
        "1",
        "--horizon",
        "4",
    ]);
    assert!(has_line(&out, "used=1,3"));
    let (out, _) = machine(&["characterize", "--blocks", "|2:1"]);
    assert!(has_line(&out, "verdict=reject"));
}

#[test]
fn demo_and_translation_succeed() {
    let (out, code) = machine(&["demo"]);
    assert_eq!(code, 0);
    assert!(has_line(&out, "failed=0"));
    let (out, code) = machine(&["translate-pn", &data("producer_consumer.net")]);
    assert_eq!(code, 0);
    assert!(has_line(&out, "counters=1"));
}

#[test]
fn human_output_carries_timing() {
    let out = run(&["reduction", "--intlasso", "|3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("elapsed: "));
    assert!(text.contains("\n---\n"));
    assert!(text.contains("biconditional=true"));
}

#[test]
fn machine_output_is_byte_stable() {
    let auto = data("liminf.auto");
    let net = data("gated_buffer.net");
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate", &auto],
        vec!["eliminate", &auto],
        vec!["accept", &auto, "--lasso", "a|abaab"],
        vec!["oracle", &auto, "--lasso", "|ab", "--counter-cap", "6"],
        vec!["encode", "--intlasso", "2,0|1,3"],
        vec!["characterize", "--blocks", "1:2|2:2,1:3"],
        vec!["reduction", "--intlasso", "9,9|1"],
        vec!["translate-pn", &net],
        vec!["demo"],
    ];
    for c in commands {
        let first = machine(&c);
        let second = machine(&c);
        assert_eq!(first, second, "{c:?}");
        assert!(!first.0.contains("elapsed"));
    }
}
