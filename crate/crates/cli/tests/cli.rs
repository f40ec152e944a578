//! End-to-end tests of the `schwinger` binary and the check hooks.

use std::path::Path;
use std::process::{Command, Output};

use schwinger_cli::checks::{
    self, fixture_dynamics, fixture_pulse_count, split_consistency, split_consistency_with,
    TABLE1_FIXTURE,
};

fn schwinger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schwinger"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

/// Rows of a CSV file as maps from header to field.
fn read_csv(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            headers
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn field(row: &std::collections::HashMap<String, String>, name: &str) -> f64 {
    row[name].parse().unwrap()
}

#[test]
fn evolve_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = schwinger(&["evolve", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "step,wt,nu,g2,lambda,negativity,log_negativity,retention"
    );
    let rows = read_csv(&text);
    assert_eq!(rows.len(), 17);
    assert!((field(&rows[16], "wt") - 4.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r["retention"].is_empty()));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["params"]["n_sites"], 4);
    assert_eq!(summary["config"]["schedule"]["step_time"], 0.25);
    assert_eq!(summary["config"]["backend"], "exact-pure");
    assert_eq!(summary["series"]["rows"], 17);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"params": {"m": 1.0}, "backend": "trotter-noisy", "noise_p": 0.038,
            "postselect": true, "shots": 500, "seed": 7}"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = schwinger(&["evolve", "--config", config.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let rows = read_csv(std::str::from_utf8(&a).unwrap());
    assert!(rows.iter().all(|r| !r["retention"].is_empty()));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(&config, r#"{"params": {"n_sites": 6}, "schedule": {"n_steps": 3}}"#).unwrap();
    let o = schwinger(&["evolve", "--config", config.to_str().unwrap(), "--n-steps", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_csv(&stdout(&o)).len(), 3);
    // Without --output the summary goes to stderr.
    let summary: serde_json::Value = serde_json::from_str(&stderr(&o)).unwrap();
    assert_eq!(summary["config"]["params"]["n_sites"], 6);
    assert_eq!(summary["config"]["schedule"]["n_steps"], 2);
}

#[test]
fn zero_steps_give_a_single_vacuum_row() {
    let o = schwinger(&["evolve", "--n-steps", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1).unwrap(), "0,0,0,1,0,0,0,");
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn exact_run_matches_the_reference_files() {
    let o = schwinger(&["evolve", "--n-steps", "30", "--step-time", "0.1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    // Regression: byte-identical to the stored output.
    assert_eq!(text, std::fs::read_to_string(data("exact_n4_golden.csv")).unwrap());
    // Independent reference from Kronecker products and a dense matrix
    // exponential (tests/data/gen_exact_oracle.py).
    let oracle = read_csv(&std::fs::read_to_string(data("exact_n4_oracle.csv")).unwrap());
    let rows = read_csv(&text);
    assert_eq!(rows.len(), oracle.len());
    for (r, o) in rows.iter().zip(&oracle) {
        for col in ["wt", "nu", "g2", "log_negativity"] {
            assert!((field(r, col) - field(o, col)).abs() < 1e-12, "{col}: {r:?} vs {o:?}");
        }
    }
}

#[test]
fn noiseless_noisy_backend_matches_pure_trotter() {
    let pure = read_csv(&stdout(&schwinger(&["evolve", "--backend", "trotter-pure"])));
    let noisy = read_csv(&stdout(&schwinger(&[
        "evolve", "--backend", "trotter-noisy", "--noise-p", "0",
    ])));
    for (a, b) in pure.iter().zip(&noisy) {
        for col in ["nu", "g2", "negativity", "log_negativity"] {
            assert!((field(a, col) - field(b, col)).abs() < 1e-10);
        }
    }
}

#[test]
fn sweep_rows_follow_value_order() {
    let o = schwinger(&["sweep", "--axis", "m", "--values", "2,0,1", "--jobs", "3", "--n-steps", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&stdout(&o));
    assert_eq!(rows.len(), 15);
    let axis: Vec<&str> = rows.iter().step_by(5).map(|r| r["axis_value"].as_str()).collect();
    assert_eq!(axis, ["2", "0", "1"]);
}

#[test]
fn single_value_sweep_equals_evolve() {
    let evolve = stdout(&schwinger(&["evolve", "--m", "0.5"]));
    let sweep = stdout(&schwinger(&["sweep", "--axis", "m", "--values", "0.5"]));
    let stripped: Vec<String> = sweep
        .lines()
        .map(|l| l.split_once(',').unwrap().1.to_string())
        .collect();
    assert_eq!(stripped, evolve.lines().collect::<Vec<_>>());
}

#[test]
fn size_sweep_covers_each_chain() {
    let o = schwinger(&["sweep", "--axis", "N", "--values", "4,6,8", "--m", "1", "--jobs", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&stdout(&o));
    assert_eq!(rows.len(), 3 * 17);
    assert_eq!(rows[17]["axis_value"], "6");
}

#[test]
fn compile_emits_table_angles_and_verifies() {
    let o = schwinger(&["compile", "--emit", "pulses", "--symbolic", "--verify", "--step-time", "0.05"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for line in ["Z((2m+2J)Delta_t, 1)", "Z(J Delta_t, 2)", "Z((2m+J)Delta_t, 3)"] {
        assert!(text.lines().any(|l| l == line), "missing {line}");
    }
    let err = stderr(&o);
    assert!(err.contains("verify: residual") && err.contains("PASS"), "{err}");
}

#[test]
fn compile_for_two_sites_has_no_zz_section() {
    let o = schwinger(&["compile", "-N", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains("section I (ZZ)"));
    assert!(text.contains("section II (PM)"));
}

#[test]
fn compile_accepts_odd_chains() {
    let o = schwinger(&["compile", "-N", "5", "--verify"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("section I (ZZ) window 3"));
}

#[test]
fn check_passes_on_the_pristine_fixture() {
    let o = schwinger(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("7 of 7 checks passed"));
}

#[test]
fn check_fails_when_a_pulse_is_deleted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.pulse");
    // Drop one crosstalk correction: the sequence still lowers, but the
    // count no longer matches.
    let broken = TABLE1_FIXTURE.replacen("R(0.01pi, 0.9pi, 4)!\n", "", 1);
    std::fs::write(&path, broken).unwrap();
    let o = schwinger(&["check", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o)
        .lines()
        .find(|l| l.contains("pulse count"))
        .unwrap()
        .to_string();
    assert!(line.starts_with("FAIL") && line.contains("expected 222"), "{line}");
    assert!(line.contains("found 221"), "{line}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["evolve", "-N", "3"],
        vec!["evolve", "--noise-p", "0.1"],
        vec!["evolve", "-N", "10", "--backend", "trotter-noisy"],
        vec!["sweep", "--axis", "m", "--values", ""],
        vec!["evolve", "--bogus"],
        vec!["check", "--fixture", "/nonexistent/table.pulse"],
    ] {
        let o = schwinger(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = schwinger(&["evolve", "-N", "10", "--backend", "trotter-noisy"]);
    assert!(stderr(&o).contains("size limit"), "{}", stderr(&o));
}

#[test]
fn perturbed_couplings_fail_split_consistency() {
    assert!(split_consistency().passed);
    let broken = split_consistency_with(|c| {
        if c.n_sites() >= 4 {
            c.set(1, 3, c.get(1, 3) + 1e-3);
        }
    });
    assert!(!broken.passed, "{}", broken.detail);
}

#[test]
fn fixture_checks_detect_injected_faults() {
    assert!(fixture_pulse_count(TABLE1_FIXTURE).passed);
    assert!(fixture_dynamics(TABLE1_FIXTURE).passed);
    // A wrong local angle keeps the count but breaks the dynamics.
    let wrong_angle = TABLE1_FIXTURE.replace("Z(J Delta_t, 2)", "Z(2J Delta_t, 2)");
    assert!(fixture_pulse_count(&wrong_angle).passed);
    assert!(!fixture_dynamics(&wrong_angle).passed);
    // So does a wrong MS phase. On the first pair it acts on the vacuum,
    // where σˣσˣ and σʸσʸ agree, so it is corrupted in every step.
    let wrong_phase = TABLE1_FIXTURE.replace("MS(Delta_t, pi/2, all)", "MS(Delta_t, 0, all)");
    assert!(!fixture_dynamics(&wrong_phase).passed);
    // Deleting a hiding pulse breaks the lowering.
    let broken = TABLE1_FIXTURE.replacen("HidingB(pi, 0, 4)\n", "", 1);
    let outcome = checks::fixture_dynamics(&broken);
    assert!(!outcome.passed && outcome.detail.contains("error"), "{}", outcome.detail);
}
