//! End-to-end tests of the `ccflex` binary: artifact plumbing, exit
//! codes, and the determinism contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ccflex() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ccflex"))
}

fn assert_code(output: &Output, expected: i32) {
    let code = output.status.code().expect("process terminated by signal");
    assert_eq!(
        code,
        expected,
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_config(dir: &Path, name: &str, out_name: &str, extra: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    let out = dir.join(out_name);
    fs::write(
        &path,
        format!(
            "K = 6\nL = 4\nt = 2\nP = 3,15\nsnr_db = 0,20\ntrials = 5\nseed = 9\n\
             label = net1\noutput_dir = {}\n{extra}",
            out.display()
        ),
    )
    .unwrap();
    path
}

#[test]
fn simulate_is_deterministic_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_a = write_config(dir.path(), "a.conf", "out_a", "baseline_P = 3\n");
    let cfg_b = write_config(dir.path(), "b.conf", "out_b", "baseline_P = 3\n");

    let run_a = ccflex().arg("simulate").arg(&cfg_a).output().unwrap();
    assert_code(&run_a, 0);
    let run_b = ccflex().arg("simulate").arg(&cfg_b).output().unwrap();
    assert_code(&run_b, 0);

    for name in [
        "placement_P3.txt",
        "placement_P15.txt",
        "schedule_P3.json",
        "schedule_P15.json",
        "efficiency.csv",
        "rates.csv",
        "rate_advantage.csv",
    ] {
        let a = fs::read(dir.path().join("out_a").join(name)).unwrap();
        let b = fs::read(dir.path().join("out_b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let rates = fs::read_to_string(dir.path().join("out_a/rates.csv")).unwrap();
    assert!(rates.starts_with("P,snr_db,mean_rate,std_err,trials,seed\n"));
    assert!(rates.lines().skip(1).all(|l| l.ends_with(",5,9")));
}

#[test]
fn efficiency_reports_published_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eff.conf", "out", "");
    let run = ccflex().arg("efficiency").arg(&cfg).output().unwrap();
    assert_code(&run, 0);
    let csv = fs::read_to_string(dir.path().join("out/efficiency.csv")).unwrap();
    assert!(csv.contains("net1,3,1,0.666667,4,12"));
    assert!(csv.contains("net1,15,6,1.000000,0,20"));
}

#[test]
fn validate_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.conf", "out", "");
    let run = ccflex().arg("schedule").arg(&cfg).output().unwrap();
    assert_code(&run, 0);

    let placement = dir.path().join("out/placement_P3.txt");
    let ok = ccflex().arg("validate").arg(&placement).output().unwrap();
    assert_code(&ok, 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("valid placement: P = 3"));

    let text = fs::read_to_string(&placement).unwrap();
    let corrupted = text.replacen('1', "0", 1);
    let bad_path = dir.path().join("bad.txt");
    fs::write(&bad_path, corrupted).unwrap();
    let bad = ccflex().arg("validate").arg(&bad_path).output().unwrap();
    assert_code(&bad, 3);
}

#[test]
fn config_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "K = 6\nL = 4\n",                                  // missing t
        "K = 6\nL = 4\nt = 2\nwhatever = 1\n",             // unknown key
        "K = 6\nL = 4\nt = 2\nP = 7\n",                    // unachievable P
        "K = 6\nL = 4\nt = 2\nP = 3\nsnr_db = 0\n",        // simulate without trials
    ] {
        let path = dir.path().join("cfg.conf");
        fs::write(&path, body).unwrap();
        let run = ccflex().arg("simulate").arg(&path).output().unwrap();
        assert_code(&run, 2);
    }

    let missing = ccflex()
        .arg("schedule")
        .arg(dir.path().join("nope.conf"))
        .output()
        .unwrap();
    assert_code(&missing, 1);
}

#[test]
fn undecodable_placement_exits_4_without_validation() {
    let dir = tempfile::tempdir().unwrap();
    // Row weight 3 with t = 2: packet 1 can never reach user 4, but only
    // validation knows the row is malformed.
    let matrix = dir.path().join("wide_row.txt");
    fs::write(&matrix, "1 4 2\n1110\n").unwrap();
    let cfg = dir.path().join("cfg.conf");
    fs::write(
        &cfg,
        format!(
            "K = 4\nL = 2\nt = 2\nplacement = file:{}\noutput_dir = {}\n",
            matrix.display(),
            dir.path().join("out").display()
        ),
    )
    .unwrap();

    let validated = ccflex().arg("schedule").arg(&cfg).output().unwrap();
    assert_code(&validated, 3);

    let skipped = ccflex()
        .arg("schedule")
        .arg(&cfg)
        .arg("--no-validate")
        .output()
        .unwrap();
    assert_code(&skipped, 4);
}

#[test]
fn env_seed_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed.conf", "out", "");
    let run = ccflex()
        .arg("simulate")
        .arg(&cfg)
        .env("CCFLEX_SEED", "123")
        .output()
        .unwrap();
    assert_code(&run, 0);
    let rates = fs::read_to_string(dir.path().join("out/rates.csv")).unwrap();
    assert!(rates.lines().skip(1).all(|l| l.ends_with(",5,123")));

    let garbage = ccflex()
        .arg("simulate")
        .arg(&cfg)
        .env("CCFLEX_SEED", "not-a-seed")
        .output()
        .unwrap();
    assert_code(&garbage, 2);
}

#[test]
fn blocks_lists_orbits_and_achievable_counts() {
    let run = ccflex()
        .args(["blocks", "--K", "6", "--t", "2"])
        .output()
        .unwrap();
    assert_code(&run, 0);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("block 1"));
    assert!(stdout.contains("block 3"));
    assert!(stdout.contains("achievable packet counts: [3, 6, 9, 12, 15]"));
}
