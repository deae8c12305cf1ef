//! End-to-end tests against the built binary: argument handling, exit codes,
//! stream formats, and cross-run determinism.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_permtwins"));
    c.env_remove("PERMTWINS_SEED");
    c
}

fn run_with_stdin(mut cmd: Command, stdin: &str) -> Output {
    cmd.stdin(Stdio::piped());
    cmd.stdout(Stdio::piped());
    cmd.stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn permtwins");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("permtwins-{}-{name}", std::process::id()))
}

#[test]
fn gen_is_deterministic_and_supports_families() {
    let run = |args: &[&str]| {
        let out = bin().args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", stderr_of(&out));
        stdout_of(&out)
    };
    let a = run(&["gen", "--kind", "uniform", "--n", "50", "--seed", "9"]);
    let b = run(&["gen", "--kind", "uniform", "--n", "50", "--seed", "9"]);
    assert_eq!(a, b);
    assert_ne!(a, run(&["gen", "--kind", "uniform", "--n", "50", "--seed", "10"]));
    assert_eq!(run(&["gen", "--kind", "identity", "--n", "4"]), "1 2 3 4\n");
    assert_eq!(run(&["gen", "--kind", "reverse", "--n", "4"]), "4 3 2 1\n");
    assert_eq!(
        run(&["gen", "--kind", "block-adversarial", "--n", "9", "--blocks", "3"]),
        "7 8 9 4 5 6 1 2 3\n"
    );
}

#[test]
fn seed_env_var_is_the_default_only() {
    let explicit = bin()
        .args(["gen", "--kind", "uniform", "--n", "30", "--seed", "123"])
        .output()
        .unwrap();
    let via_env = bin()
        .args(["gen", "--kind", "uniform", "--n", "30"])
        .env("PERMTWINS_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(stdout_of(&explicit), stdout_of(&via_env));
    // An explicit flag wins over the environment.
    let flag_wins = bin()
        .args(["gen", "--kind", "uniform", "--n", "30", "--seed", "123"])
        .env("PERMTWINS_SEED", "999")
        .output()
        .unwrap();
    assert_eq!(stdout_of(&explicit), stdout_of(&flag_wins));
    let bad_env = bin()
        .args(["gen", "--kind", "uniform", "--n", "30"])
        .env("PERMTWINS_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn twins_to_verify_roundtrip_for_every_algorithm() {
    let host = stdout_of(
        &bin()
            .args(["gen", "--kind", "uniform", "--n", "12", "--seed", "5"])
            .output()
            .unwrap(),
    );
    for algo in ["es", "thm1", "thm2", "exact"] {
        let twins = run_with_stdin(
            {
                let mut c = bin();
                c.args(["twins", "--algo", algo]);
                c
            },
            &host,
        );
        assert!(twins.status.success(), "{algo}: {}", stderr_of(&twins));
        let summary = stderr_of(&twins);
        assert!(summary.contains(&format!("algo={algo}")), "{summary}");
        assert!(summary.contains("valid=true"), "{summary}");
        assert!(summary.contains("guarantee_n="), "{summary}");
        let verify = run_with_stdin(
            {
                let mut c = bin();
                c.arg("verify");
                c
            },
            &stdout_of(&twins),
        );
        assert_eq!(verify.status.code(), Some(0), "{algo}");
        assert!(stdout_of(&verify).starts_with("valid:"));
    }
}

#[test]
fn verify_distinguishes_invalid_from_unparseable() {
    // Order-isomorphism failure: (1,5) against (6,4).
    let bad = "1 3 5 6 4 2\n1 3\n4 5\n";
    let out = run_with_stdin(
        {
            let mut c = bin();
            c.arg("verify");
            c
        },
        bad,
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).starts_with("invalid:"), "{}", stdout_of(&out));

    let garbage = run_with_stdin(
        {
            let mut c = bin();
            c.arg("verify");
            c
        },
        "not a twin file\n",
    );
    assert_eq!(garbage.status.code(), Some(2));

    let good = "1 3 5 6 4 2\n1 3 6\n2 4 5\n";
    let out = run_with_stdin(
        {
            let mut c = bin();
            c.arg("verify");
            c
        },
        good,
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_reads_external_hosts() {
    let host_path = tmp_path("host.perm");
    std::fs::write(&host_path, "1 3 5 6 4 2\n").unwrap();
    let pair = "@\n1 3 6\n2 4 5\n";
    let out = run_with_stdin(
        {
            let mut c = bin();
            c.args(["verify", "--host"]).arg(&host_path);
            c
        },
        pair,
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    std::fs::remove_file(&host_path).ok();
}

#[test]
fn windowed_trace_emits_round_json() {
    let host = stdout_of(
        &bin()
            .args(["gen", "--kind", "uniform", "--n", "3000", "--seed", "7"])
            .output()
            .unwrap(),
    );
    let out = run_with_stdin(
        {
            let mut c = bin();
            c.args(["twins", "--algo", "thm1", "--trace"]);
            c
        },
        &host,
    );
    assert!(out.status.success());
    let stderr = stderr_of(&out);
    let trace_lines: Vec<&str> = stderr.lines().filter(|l| l.starts_with('{')).collect();
    assert!(!trace_lines.is_empty());
    assert!(trace_lines[0].starts_with("{\"round\":0,\"i0_len\":"));
    for line in &trace_lines {
        assert!(line.ends_with('}'));
        for key in ["pair", "common_len", "kept_len", "deleted_count", "remainder_len"] {
            assert!(line.contains(key), "{line}");
        }
    }
    // The summary names the number of rounds that the trace shows.
    assert!(stderr.contains(&format!("rounds={}", trace_lines.len())));

    let untrimmed = run_with_stdin(
        {
            let mut c = bin();
            c.args(["twins", "--algo", "thm1", "--no-trim"]);
            c
        },
        &host,
    );
    assert!(untrimmed.status.success());
    assert!(stderr_of(&untrimmed).contains("valid=true"));
}

#[test]
fn grid_dump_lists_occupied_cells() {
    let dump_path = tmp_path("cells.csv");
    let host = stdout_of(
        &bin()
            .args(["gen", "--kind", "uniform", "--n", "400", "--seed", "2"])
            .output()
            .unwrap(),
    );
    let out = run_with_stdin(
        {
            let mut c = bin();
            c.args(["twins", "--algo", "thm2", "--dump-grid"]).arg(&dump_path);
            c
        },
        &host,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&dump_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,j,count"));
    let mut total = 0u32;
    for line in lines {
        let fields: Vec<u32> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 3);
        assert!(fields[2] >= 1);
        total += fields[2];
    }
    // Every point of the host lands in exactly one occupied cell.
    assert_eq!(total, 400);
    std::fs::remove_file(&dump_path).ok();
}

#[test]
fn sparse_hosts_report_both_guarantees() {
    let out = run_with_stdin(
        {
            let mut c = bin();
            c.args(["twins", "--algo", "es"]);
            c
        },
        "# n=100\n90 17 42 3 55 81 64 29 76 10 38 71 25 60 47 94 5 33 68 13 50 86 21 58 40\n",
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let summary = stderr_of(&out);
    assert!(summary.contains("n=100"), "{summary}");
    assert!(summary.contains("m=25"), "{summary}");
    assert!(summary.contains("guarantee_n=5"), "{summary}");
    assert!(summary.contains("guarantee_m=2"), "{summary}");
}

#[test]
fn experiment_runs_are_byte_identical() {
    let config_path = tmp_path("exp.conf");
    std::fs::write(
        &config_path,
        "algos = es, thm2\nns = 80, 200\nseeds = 4\nmaster_seed = 31\n",
    )
    .unwrap();
    let run = || {
        let out = bin()
            .args(["experiment", "--config"])
            .arg(&config_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr_of(&out));
        stdout_of(&out)
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.starts_with("# permtwins experiment format v1\n"));
    assert!(a.contains("\nalgo,n,m,seed,twin_length,guarantee,valid,extra\n"));
    assert!(a.contains("# summary algo=es n=80"));
    std::fs::remove_file(&config_path).ok();
}

#[test]
fn experiment_rejects_unknown_keys_with_parse_exit() {
    let config_path = tmp_path("bad.conf");
    std::fs::write(&config_path, "algos = es\nns = 10\nseeds = 2\nwat = 1\n").unwrap();
    let out = bin()
        .args(["experiment", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown key"));
    std::fs::remove_file(&config_path).ok();
}

#[test]
fn oracle_subcommands_report_frozen_values() {
    let tn = bin().args(["oracle", "tn", "--n", "5"]).output().unwrap();
    assert!(tn.status.success());
    assert!(stdout_of(&tn).starts_with("t(5) = 2 witness = 1 2 3 4 5"));

    let probe = bin()
        .args(["oracle", "probe", "--ns", "6,8,10", "--trials", "20", "--seed", "4"])
        .output()
        .unwrap();
    assert!(probe.status.success());
    let text = stdout_of(&probe);
    assert!(text.contains("n,trials,mean,min,max"));
    assert!(text.contains("# exponent slope="));

    let starved = run_with_stdin(
        {
            let mut c = bin();
            c.args(["oracle", "exact", "--node-limit", "2"]);
            c
        },
        "1 3 5 6 4 2\n",
    );
    assert!(starved.status.success());
    assert!(stderr_of(&starved).contains("optimal=false"));
}

#[test]
fn lemma_check_and_sample_behave() {
    let lemma = bin()
        .args(["lemma-check", "--m", "30", "--trials", "50", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(lemma.status.code(), Some(0));
    assert!(stdout_of(&lemma).contains("violations=0"));

    let sample = bin()
        .args(["sample", "--lambda", "12", "--seed", "3"])
        .output()
        .unwrap();
    assert!(sample.status.success());
    assert!(stderr_of(&sample).starts_with("m="));
    let again = bin()
        .args(["sample", "--lambda", "12", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&sample), stdout_of(&again));

    let bad_model = bin()
        .args(["sample", "--model", "gauss", "--lambda", "2"])
        .output()
        .unwrap();
    assert_eq!(bad_model.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["twins", "--algo", "warp"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
}
