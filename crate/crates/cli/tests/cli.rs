//! End-to-end tests of the `neuroclear` binary: exit codes, the
//! collect/train/eval/plan pipeline, and byte-level determinism of the
//! seeded subcommands under the iteration clock.

use std::path::Path;
use std::process::{Command, Output};

fn neuroclear(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neuroclear"))
        .args(args)
        .output()
        .expect("spawn neuroclear")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_exits_zero_and_usage_errors_exit_one() {
    let help = neuroclear(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("collect"));

    let unknown = neuroclear(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));

    let missing = neuroclear(&["collect", "--env", "narrow-gap"]);
    assert_eq!(missing.status.code(), Some(1), "{}", stderr(&missing));

    let bad_env = neuroclear(&[
        "collect",
        "--env",
        "no-such-env",
        "--n-train",
        "10",
        "--n-eval",
        "0",
        "--out",
        "/tmp/unused.ds",
    ]);
    assert_eq!(bad_env.status.code(), Some(1));
    assert!(stderr(&bad_env).contains("narrow-gap"), "{}", stderr(&bad_env));
}

#[test]
fn pipeline_collect_train_eval_plan_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("narrow-gap.ds");
    let model = dir.path().join("narrow-gap.model.json");
    let path_out = dir.path().join("query.path.json");

    let collect = neuroclear(&[
        "collect",
        "--env",
        "narrow-gap",
        "--n-train",
        "600",
        "--n-eval",
        "200",
        "--seed",
        "7",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_eq!(collect.status.code(), Some(0), "{}", stderr(&collect));
    assert!(stdout(&collect).contains("800 samples"));
    assert!(data.is_file());

    let train = neuroclear(&[
        "train",
        "--env",
        "narrow-gap",
        "--data",
        data.to_str().unwrap(),
        "--hidden",
        "16",
        "--epochs",
        "2",
        "--batch",
        "64",
        "--seed",
        "7",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(train.status.code(), Some(0), "{}", stderr(&train));
    assert!(stdout(&train).contains("epoch 2"));
    assert!(model.is_file());

    let eval = neuroclear(&[
        "eval-model",
        "--env",
        "narrow-gap",
        "--data",
        data.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--d-star",
        "0.0",
    ]);
    assert_eq!(eval.status.code(), Some(0), "{}", stderr(&eval));
    let eval_out = stdout(&eval);
    let mut lines = eval_out.lines();
    assert_eq!(
        lines.next(),
        Some("env,d_star,n,tp,tn,fp,fn,accuracy")
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("narrow-gap,0,200,"), "{row}");

    let plan = neuroclear(&[
        "plan",
        "--env",
        "narrow-gap",
        "--model",
        model.to_str().unwrap(),
        "--start",
        "2.2,0.3,0.2",
        "--goal",
        "2.2,-0.4,-0.3",
        "--t-max",
        "5.0",
        "--seed",
        "7",
        "--clock",
        "iteration",
        "--tick",
        "1e-5",
        "--out",
        path_out.to_str().unwrap(),
    ]);
    assert_eq!(plan.status.code(), Some(0), "{}", stderr(&plan));
    assert!(stdout(&plan).contains("success=true"));
    let path_file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path_out).unwrap()).unwrap();
    let waypoints = path_file["waypoints"].as_array().unwrap();
    assert!(waypoints.len() >= 2);
    assert_eq!(waypoints[0].as_array().unwrap().len(), 3);

    // A start inside the wall is an infeasible query, not a usage error.
    let blocked = neuroclear(&[
        "plan",
        "--env",
        "narrow-gap",
        "--model",
        model.to_str().unwrap(),
        "--start",
        "0.45,0,0",
        "--goal",
        "2.2,-0.4,-0.3",
        "--out",
        dir.path().join("unused.json").to_str().unwrap(),
    ]);
    assert_eq!(blocked.status.code(), Some(2), "{}", stderr(&blocked));
    assert!(stderr(&blocked).contains("infeasible"));
}

#[test]
fn equal_seeds_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let bytes_of = |p: &Path| std::fs::read(p).unwrap();

    for run in ["a", "b"] {
        let data = dir.path().join(format!("{run}.ds"));
        let model = dir.path().join(format!("{run}.model.json"));
        let collect = neuroclear(&[
            "collect",
            "--env",
            "clutter",
            "--n-train",
            "300",
            "--n-eval",
            "100",
            "--seed",
            "11",
            "--out",
            data.to_str().unwrap(),
        ]);
        assert_eq!(collect.status.code(), Some(0), "{}", stderr(&collect));
        let train = neuroclear(&[
            "train",
            "--env",
            "clutter",
            "--data",
            data.to_str().unwrap(),
            "--hidden",
            "8",
            "--epochs",
            "1",
            "--batch",
            "50",
            "--seed",
            "11",
            "--out",
            model.to_str().unwrap(),
        ]);
        assert_eq!(train.status.code(), Some(0), "{}", stderr(&train));
    }
    assert_eq!(
        bytes_of(&dir.path().join("a.ds")),
        bytes_of(&dir.path().join("b.ds"))
    );
    assert_eq!(
        bytes_of(&dir.path().join("a.model.json")),
        bytes_of(&dir.path().join("b.model.json"))
    );

    // Same CSV file name in per-run directories: the relative path_file
    // column must also be identical.
    for run in ["x", "y"] {
        let run_dir = dir.path().join(run);
        std::fs::create_dir_all(&run_dir).unwrap();
        let csv = run_dir.join("rows.csv");
        let bench = neuroclear(&[
            "bench",
            "--env",
            "clutter",
            "--model",
            dir.path().join("a.model.json").to_str().unwrap(),
            "--queries",
            "3",
            "--seed",
            "11",
            "--t-max",
            "0.5",
            "--clock",
            "iteration",
            "--tick",
            "1e-5",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(bench.status.code(), Some(0), "{}", stderr(&bench));
    }
    assert_eq!(
        bytes_of(&dir.path().join("x/rows.csv")),
        bytes_of(&dir.path().join("y/rows.csv"))
    );
    let csv = String::from_utf8(bytes_of(&dir.path().join("x/rows.csv"))).unwrap();
    assert!(csv.starts_with("env,planner,query,seed,success,"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("clutter,")).count(), 9);
}

#[test]
fn tradeoff_prints_the_reference_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("report.csv");
    let run = neuroclear(&["tradeoff", "--out", out_csv.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = stdout(&run);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "env,n_collect_online,n_all_online,n_all_offline,no_savings");
    assert_eq!(lines[1], "block,606,2193,569,false");
    assert_eq!(lines[4], "mobile,-36,-1056,21,true");
    assert_eq!(lines[9], "mobile-1m,-71,-2111,42,true");
    assert_eq!(lines.len(), 11);
    assert_eq!(std::fs::read_to_string(&out_csv).unwrap(), text);

    // A scenario file is accepted in place of the bundled table.
    let scen = dir.path().join("one.csv");
    std::fs::write(
        &scen,
        "env,t_training,dataset_size,t_check,t_rrt,t_cnrrt\nblock,1500,350000,0.0001,2.7,2\n",
    )
    .unwrap();
    let run = neuroclear(&["tradeoff", "--scenarios", scen.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert!(stdout(&run).contains("block,606,2193,569,false"));

    let damaged = dir.path().join("bad.csv");
    std::fs::write(&damaged, "nope\n").unwrap();
    let run = neuroclear(&["tradeoff", "--scenarios", damaged.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
}
