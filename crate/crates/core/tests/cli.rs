use std::path::Path;
use std::process::{Command, Output};

fn ocycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocycle"))
        .args(args)
        .env_remove("OCYCLE_SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn threshold_emits_one_row_per_grid_point() {
    let args = ["threshold", "--pattern", "anti:10", "--n", "10", "--grid", "0.1:0.9:9", "--trials", "100", "--engine", "oracle"];
    let a = ocycle(&args);
    assert_eq!(code(&a), 0);
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "experiment,n,seed,trial,i,p,pattern,metric,value");
    assert_eq!(lines.len(), 10);
    assert!(!text.contains('\r'));
    assert_eq!(ocycle(&args).stdout, a.stdout);
}

#[test]
fn embed_honours_pins_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    assert_eq!(code(&ocycle(&["gen", "--model", "dnp", "--n", "10", "--p", "0.7", "--seed", "4", "--out", &g])), 0);
    let o = ocycle(&["embed", "--graph", &g, "--pattern", "anti:10", "--pin", "3=7"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "3 7"));
    assert_eq!(text.lines().count(), 10);

    let empty = path(dir.path(), "empty.txt");
    std::fs::write(&empty, "10 0\n").unwrap();
    let o = ocycle(&["embed", "--graph", &empty, "--pattern", "anti:10"]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(code(&ocycle(&["hitting", "--n", "8", "--bogus"])), 2);
    assert_eq!(code(&ocycle(&["embed", "--graph", "/nonexistent/g.txt", "--pattern", "anti:4"])), 2);
    let t = ["threshold", "--pattern", "anti:6", "--n", "6", "--grid", "0.1:0.9:3", "--trials", "2"];
    assert_eq!(code(&ocycle(&[&t[..], &["--engine", "nope"]].concat())), 2);
    assert_eq!(code(&ocycle(&[&t[..], &["--profile", "huge"]].concat())), 2);
    assert_eq!(code(&ocycle(&["threshold", "--pattern", "+-x", "--n", "3", "--grid", "0.5:0.5:1"])), 2);
}

#[test]
fn help_lists_uniform_flags_and_default_profile() {
    let o = ocycle(&["pipeline", "run", "--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[default: paper]"));
    for flag in ["--seed", "--trials", "--profile", "--out", "--jobs"] {
        assert!(text.contains(flag), "{flag}");
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ocycle"));
        c.args(["gen", "--model", "gnp", "--n", "12", "--p", "0.5"]);
        match seed {
            Some(s) => c.env("OCYCLE_SEED", s),
            None => c.env_remove("OCYCLE_SEED"),
        };
        c.output().unwrap().stdout
    };
    let explicit = ocycle(&["gen", "--model", "gnp", "--n", "12", "--p", "0.5", "--seed", "77"]).stdout;
    assert_eq!(run(Some("77")), explicit);
    assert_ne!(run(None), explicit);
}

#[test]
fn pipeline_run_writes_report_and_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let e = path(dir.path(), "e.txt");
    let args = ["pipeline", "run", "--n", "200", "--pattern", "random:200:80:1", "--profile", "desk", "--seed", "2", "--embedding", &e];
    let o = ocycle(&args);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["failed_stage"].is_null());
    assert_eq!(std::fs::read_to_string(&e).unwrap().lines().count(), 200);
    assert_eq!(ocycle(&args).stdout, o.stdout);
}

#[test]
fn params_file_overrides_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "p.cfg");
    std::fs::write(&cfg, "profile = desk\nnot_a_knob = 3\n").unwrap();
    let o = ocycle(&["pipeline", "run", "--n", "100", "--pattern", "anti:100", "--params", &cfg]);
    assert_eq!(code(&o), 2);
}

#[test]
fn trace_dump_and_reload_agree() {
    let dir = tempfile::tempdir().unwrap();
    let t = path(dir.path(), "t.txt");
    let first = ocycle(&["process", "--n", "200", "--pattern", "random:200:100:3", "--profile", "desk", "--index", "8000", "--dump-trace", &t, "--seed", "5"]);
    let again = ocycle(&["process", "--trace", &t, "--pattern", "random:200:100:3", "--profile", "desk", "--index", "8000", "--seed", "5"]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(code(&first), code(&again));
}

#[test]
fn experiment_commands_are_deterministic() {
    let cmds: [&[&str]; 5] = [
        &["hitting", "--n", "8", "--trials", "20", "--jobs", "3"],
        &["coupling", "--n", "4", "--p", "0.3", "--trials", "500", "--format", "json"],
        &["process", "--n", "60", "--properties", "1,9,12", "--trials", "4"],
        &["threshold", "--pattern", "directed:8", "--n", "8", "--grid", "0.2:0.6:3", "--trials", "10", "--engine", "pipeline", "--profile", "desk"],
        &["gen", "--model", "process", "--n", "6"],
    ];
    for args in cmds {
        let a = ocycle(args);
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(ocycle(args).stdout, a.stdout, "{args:?}");
    }
}

#[test]
fn posa_and_verify_pseudo_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    ocycle(&["gen", "--model", "gnp", "--n", "60", "--p", "0.3", "--seed", "1", "--out", &g]);
    let o = ocycle(&["posa", "--graph", &g, "--x", "0", "--y", "1"]);
    assert_eq!(code(&o), 0);
    let path: Vec<usize> = String::from_utf8(o.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(path.len(), 60);
    assert_eq!((path[0], path[59]), (0, 1));

    let d = dir.path().join("d.txt");
    std::fs::write(&d, "6 0\n").unwrap();
    let o = ocycle(&["verify-pseudo", "--graph", d.to_str().unwrap(), "--profile", "desk"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["a2"]["passed"], false);
}
