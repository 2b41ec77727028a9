use std::process::{Command, Output};

fn barypoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barypoly")).args(args).env_remove("BARYPOLY_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn alpha_prints_shortest_round_trip() {
    let o = barypoly(&["alpha", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.6180339887498949\n");
    assert_eq!(stdout(&barypoly(&["alpha", "--p", "2"])), "0.5\n");
}

#[test]
fn classify_prints_verdict_first() {
    let o = barypoly(&["classify", "--t", "0.3,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Periodic2\n"));

    let o = barypoly(&["classify", "--t", "0.2,0.3,0.4,0.5"]);
    assert!(stdout(&o).starts_with("ConjecturedAlternating\n"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [&["bogus"][..], &["simulate", "--regular"], &["classify", "--t", "0.1,0.2", "--horizon", "x"]] {
        assert_eq!(barypoly(args).status.code(), Some(2), "{args:?}");
    }
    let o = barypoly(&["simulate", "--regular", "3", "--random", "3,2", "--t", "0.5,0.5,0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validation_errors_exit_1_and_list_everything() {
    let o = barypoly(&["simulate", "--points", "0,0;1,0;1", "--t", "0,2,0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("t[0]") && err.contains("t[1]"), "{err}");
    assert!(err.lines().count() >= 3, "{err}");
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("trace.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"points": [[0, 0], [4, 0], [0, 3]], "t": [0.5, "1/3", 0.25], "iterations": 12,
                "output": {{"format": "json", "path": {:?}}}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = barypoly(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("wrote: "));
    let table = barypoly::io::parse_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(table.steps.len(), 13);
    assert_eq!(table.t0[1], 1.0 / 3.0);
}

#[test]
fn batch_simulate_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut configs = Vec::new();
    for k in 0..4 {
        let cfg = dir.path().join(format!("c{k}.json"));
        let out = dir.path().join(format!("batch{k}.csv"));
        std::fs::write(
            &cfg,
            format!(
                r#"{{"generator": {{"kind": "random", "p": 4, "d": 2, "seed": {k}}}, "t": [0.2, 0.4, 0.6, 0.3],
                    "output": {{"format": "csv", "path": {:?}}}}}"#,
                out.to_str().unwrap()
            ),
        )
        .unwrap();
        configs.push(cfg);
    }
    let mut args = vec!["simulate", "--jobs", "3"];
    for c in &configs {
        args.push("--config");
        args.push(c.to_str().unwrap());
    }
    let o = barypoly(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for k in 0..configs.len() {
        let batch = std::fs::read_to_string(dir.path().join(format!("batch{k}.csv"))).unwrap();
        let again = barypoly(&["simulate", "--random", "4,2", "--seed", &k.to_string(), "--t", "0.2,0.4,0.6,0.3"]);
        assert_eq!(stdout(&again), batch);
    }
}

#[test]
fn seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_barypoly"))
            .args(["simulate", "--random", "3,2", "--t", "0.2,0.3,0.4", "--n", "3"])
            .env("BARYPOLY_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(run("11").stdout, run("11").stdout);
    assert_ne!(run("11").stdout, run("12").stdout);
    assert_eq!(run("eleven").status.code(), Some(1));
}

#[test]
fn dual_report() {
    let o = barypoly(&["dual", "--points", "0,0;1,0;0,1", "--t", "0.2,0.3,0.4", "--n", "60"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("saturated_at: 19"), "{out}");
    assert!(out.contains("first_below_1e-6: 14"), "{out}");
}
