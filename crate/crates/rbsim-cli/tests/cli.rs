//! End-to-end checks of the compiled binary: exit codes, file contents, and
//! reproducibility, driven exactly as a user would from a shell.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rbsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rbsim"))
}

struct Workspace {
    _dir: tempfile::TempDir,
    config: PathBuf,
    out: PathBuf,
}

impl Workspace {
    fn new(config_text: &str) -> Workspace {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("run.toml");
        std::fs::write(&config, config_text).unwrap();
        let out = dir.path().join("out");
        Workspace { _dir: dir, config, out }
    }

    fn run(&self, args: &[&str]) -> Output {
        rbsim()
            .arg("--config")
            .arg(&self.config)
            .arg("--out")
            .arg(&self.out)
            .args(args)
            .output()
            .unwrap()
    }

    fn run_ok(&self, args: &[&str]) -> Output {
        let output = self.run(args);
        assert!(
            output.status.success(),
            "rbsim {args:?} failed:\n{}",
            String::from_utf8_lossy(&output.stderr)
        );
        output
    }
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process terminated by signal")
}

const SMALL: &str = "[plan]\nseed = 5\nlengths = [2, 4, 8]\nshots = 64\nbatches = 2\n\
    [noise]\ndepol_per_gate = 0.01\n[fit]\nbootstrap_resamples = 100\n";

#[test]
fn the_standard_plan_expands_to_544_sequences() {
    let ws = Workspace::new("[plan]\nseed = 1\n");
    ws.run_ok(&["generate"]);
    // 17 lengths x 4 base sequences x 8 randomizations.
    assert_eq!(data_lines(&ws.out.join("plan.txt")).len(), 544);
}

#[test]
fn the_smallest_plan_is_a_single_record() {
    let ws = Workspace::new(
        "[plan]\nseed = 2\nlengths = [2]\ngate_sequences = 1\n\
         randomizations = 1\nshots = 1\nbatches = 1\n",
    );
    ws.run_ok(&["generate"]);
    assert_eq!(data_lines(&ws.out.join("plan.txt")).len(), 1);
    ws.run_ok(&["run"]);
    assert_eq!(data_lines(&ws.out.join("records.txt")).len(), 1);
}

#[test]
fn a_zero_noise_run_never_records_a_wrong_outcome() {
    let ws = Workspace::new(
        "[plan]\nseed = 3\nlengths = [2, 4, 8]\nshots = 64\nbatches = 2\n",
    );
    ws.run_ok(&["generate"]);
    ws.run_ok(&["run"]);
    for line in data_lines(&ws.out.join("records.txt")) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(fields[3], "0", "wrong count in {line:?}");
    }
}

#[test]
fn regenerating_and_rerunning_are_byte_identical() {
    let ws = Workspace::new(SMALL);
    ws.run_ok(&["generate"]);
    let plan_a = std::fs::read(ws.out.join("plan.txt")).unwrap();
    ws.run_ok(&["run"]);
    let records_a = std::fs::read(ws.out.join("records.txt")).unwrap();

    ws.run_ok(&["generate"]);
    assert_eq!(plan_a, std::fs::read(ws.out.join("plan.txt")).unwrap());
    ws.run_ok(&["run"]);
    assert_eq!(records_a, std::fs::read(ws.out.join("records.txt")).unwrap());
}

#[test]
fn worker_count_never_leaks_into_the_output_bytes() {
    let ws = Workspace::new(SMALL);
    ws.run_ok(&["generate"]);
    ws.run_ok(&["--jobs", "1", "run"]);
    let serial = std::fs::read(ws.out.join("records.txt")).unwrap();
    ws.run_ok(&["--jobs", "4", "run"]);
    assert_eq!(serial, std::fs::read(ws.out.join("records.txt")).unwrap());
}

#[test]
fn fit_writes_the_report_and_both_figure_files() {
    let ws = Workspace::new(SMALL);
    ws.run_ok(&["generate"]);
    ws.run_ok(&["run"]);
    let output = ws.run_ok(&["fit"]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("error per gate"), "{stdout}");
    assert!(ws.out.join("report.txt").exists());

    // One figure line per record: 4 x 8 = 32 per length.
    let each = data_lines(&ws.out.join("fig_each.dat"));
    assert_eq!(each.len(), 3 * 32);
    for length in ["3", "5", "9"] {
        let at = each.iter().filter(|l| l.split_whitespace().next() == Some(length));
        assert_eq!(at.count(), 32, "length {length}");
    }
    // One averaged line per length, with a column per base sequence.
    let avg = data_lines(&ws.out.join("fig_avg.dat"));
    assert_eq!(avg.len(), 3);
    assert_eq!(avg[0].split_whitespace().count(), 1 + 4 + 5);
}

#[test]
fn report_prints_without_writing_files() {
    let ws = Workspace::new(SMALL);
    ws.run_ok(&["generate"]);
    ws.run_ok(&["run"]);
    let output = ws.run_ok(&["report"]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("benchmark decay fit"), "{stdout}");
    assert!(!ws.out.join("report.txt").exists());
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let output = rbsim().arg(flag).output().unwrap();
        assert_eq!(exit_code(&output), 0, "{flag}");
    }
}

#[test]
fn usage_problems_exit_one() {
    // No subcommand at all.
    assert_eq!(exit_code(&rbsim().output().unwrap()), 1);
    // Unknown flag.
    assert_eq!(exit_code(&rbsim().args(["generate", "--bogus"]).output().unwrap()), 1);
    // Missing --config.
    assert_eq!(exit_code(&rbsim().arg("generate").output().unwrap()), 1);
    // Config with a typo.
    let ws = Workspace::new("[plan]\nseed = 1\nshotz = 10\n");
    assert_eq!(exit_code(&ws.run(&["generate"])), 1);
    // Unknown experiment selector.
    let ws = Workspace::new("[plan]\nseed = 1\n");
    let output = ws.run(&["calibrate", "--experiment", "nope"]);
    assert_eq!(exit_code(&output), 1);
    assert!(String::from_utf8_lossy(&output.stderr).contains("spont-ratio"));
}

#[test]
fn data_problems_exit_two() {
    // Running without a plan file.
    let ws = Workspace::new(SMALL);
    let output = ws.run(&["run"]);
    assert_eq!(exit_code(&output), 2);
    assert!(String::from_utf8_lossy(&output.stderr).contains("generate"));
    // Fitting records that do not exist.
    assert_eq!(exit_code(&ws.run(&["fit"])), 2);
    // A plan from a different seed.
    ws.run_ok(&["generate"]);
    let output = rbsim()
        .arg("--config")
        .arg(&ws.config)
        .arg("--out")
        .arg(&ws.out)
        .args(["--seed", "77", "run"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn calibrate_runs_each_experiment_and_writes_its_artifacts() {
    let ws = Workspace::new(
        "[plan]\nseed = 9\n[noise]\ndephasing_rate = 0.002\nspont_rate = 0.001\n\
         [calibration]\nshots = 300\nbatches = 20\n",
    );
    let output = ws.run_ok(&["calibrate", "--experiment", "ramsey-refocused"]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("per-step error contribution"), "{stdout}");
    assert!(ws.out.join("ramsey-refocused.dat").exists());
    assert!(ws.out.join("ramsey-refocused-report.txt").exists());

    ws.run_ok(&["calibrate", "--experiment", "spont-ratio"]);
    for name in
        ["spont-with-beams.dat", "spont-reference.dat", "spont-ratio.dat",
         "spont-ratio-report.txt"]
    {
        assert!(ws.out.join(name).exists(), "{name}");
    }
}
