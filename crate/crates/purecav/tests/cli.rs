//! Contract tests for the command-line interface: subcommand names,
//! flag/environment/config-file precedence, exit codes, and byte-stable
//! output.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_purecav"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn sweep_is_deterministic_and_well_formed() {
    let args = ["sweep", "--f-min", "0.75", "--f-max", "0.85", "--f-step", "0.05", "--rounds", "2", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "CSV bytes must not vary between runs");
    let text = stdout(&a);
    assert!(text.starts_with("# seed = 11\n"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "f,F1,F2,fhat2,P_succ_1,P_succ_2");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn usage_errors_exit_with_code_two() {
    let below_threshold = run(&["sweep", "--f-min", "0.4"]);
    assert_eq!(below_threshold.status.code(), Some(2));
    let no_rungs = run(&["verify-appendix", "--multipliers", ""]);
    assert_eq!(no_rungs.status.code(), Some(2));
    let too_few_trials = run(&["resources", "--trials", "99"]);
    assert_eq!(too_few_trials.status.code(), Some(2));
    let bad_scheme = run(&["sweep", "--scheme", "best"]);
    assert_eq!(bad_scheme.status.code(), Some(2));
}

#[test]
fn environment_variables_mirror_flags() {
    let narrow = bin()
        .args(["sweep", "--f-min", "0.75", "--f-step", "0.05", "--rounds", "1"])
        .env("PURECAV_F_MAX", "0.8")
        .output()
        .unwrap();
    assert_eq!(narrow.status.code(), Some(0));
    assert_eq!(stdout(&narrow).lines().filter(|l| !l.starts_with('#')).count(), 3);
    // An explicit flag beats the environment.
    let flag_wins = bin()
        .args(["sweep", "--f-min", "0.75", "--f-max", "0.75", "--f-step", "0.05", "--rounds", "1"])
        .env("PURECAV_F_MAX", "0.95")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
    assert_eq!(stdout(&flag_wins).lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "f-min = 0.8\nf-max = 0.8\nrounds = 1\n").unwrap();
    let out = run(&["sweep", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().last().unwrap();
    let f: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!((f - 0.8).abs() < 1e-12);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--f-min",
        "0.8",
        "--f-max",
        "0.8",
        "--rounds",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), stdout(&out));
}

#[test]
fn fusion_command_warns_below_strong_coupling() {
    let out = run(&["fusion", "--j2", "0.05", "--kappa", "1.0", "--t-final", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("warning"));
    assert!(text.contains("|alpha_ss|"));
}

#[test]
fn resources_accepts_forced_probability() {
    let out = run(&[
        "resources",
        "--rounds",
        "3",
        "--trials",
        "200",
        "--force-probability",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("expected temporary pairs"));
    assert!(text.contains("6.00000000000e0"), "deterministic schedule costs exactly 6 pairs:\n{text}");
}

#[test]
fn ring_ladder_accepts_alias_names(){
    // Two quick rungs on the three-atom ring; `C` and `ring` are the
    // same setup.
    let out = run(&["verify-appendix", "--which", "ring", "--multipliers", "1,2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("monotone decrease verified"));
    let upper = run(&["verify-appendix", "--which", "C", "--multipliers", "1,2"]);
    assert_eq!(stdout(&upper), stdout(&out));
}
