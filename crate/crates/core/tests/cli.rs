use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn simres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simres"))
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

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_formats() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("nodes.csv");
    let edges = dir.path().join("edges.txt");
    let o = simres(&[
        "generate",
        "--q",
        "1",
        "--t",
        "1",
        "--out",
        path_str(&table),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert_eq!(
        text.lines().next(),
        Some("id,t_v,parent_low,parent_high,clique_copy")
    );
    assert_eq!(text.lines().nth(4), Some("3,1,0,1,0"));

    let o = simres(&[
        "generate",
        "--q",
        "1",
        "--t",
        "1",
        "--format",
        "edges",
        "--out",
        path_str(&edges),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&edges).unwrap().lines().count(), 9);

    let dot = stdout(&simres(&[
        "generate", "--q", "2", "--t", "0", "--format", "dot",
    ]));
    assert!(dot.starts_with("graph simplicial_q2_t0 {"));
    assert_eq!(dot.matches(" -- ").count(), 6);

    let json = stdout(&simres(&[
        "generate", "--q", "2", "--t", "1", "--format", "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!((v["N"].as_u64(), v["M"].as_u64()), (Some(16), Some(36)));
}

#[test]
fn generate_refuses_oversized() {
    let o = simres(&["generate", "--q", "1", "--t", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("5230176603"));
    let o = simres(&["generate", "--q", "1", "--t", "3", "--max-nodes", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["generate", "--q", "2", "--t", "2", "--format", "dot"],
        vec!["indices", "--q", "1", "--t-max", "3"],
        vec!["sweep", "--q", "1", "--q-max", "2", "--t-max", "5"],
    ] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for p in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", path_str(p)]);
            assert_eq!(simres(&full).status.code(), Some(0));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn resist_verdicts() {
    let o = simres(&["resist", "--q", "1", "--t", "1", "--pair", "0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("4/9 MATCH"));

    let o = simres(&["resist", "--q", "1", "--t", "1", "--pair", "3", "3"]);
    assert_eq!(stdout(&o), "0\n");

    // New node 4 of the q=2 network hangs off edge (0, 1).
    let o = simres(&["resist", "--q", "2", "--t", "1", "--pair", "4", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("7/16 MATCH"));

    let o = simres(&["resist", "--q", "1", "--t", "1", "--pair", "0", "99"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("99"));
}

#[test]
fn indices_rows() {
    let out = stdout(&simres(&[
        "indices", "--q", "1", "--t", "0", "--t-max", "1",
    ]));
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][4..8], &["4", "16", "16", "2/3"]);
    assert_eq!(&rows[1][4..8], &["65/3", "122", "168", "13/18"]);
    assert_eq!(rows[1][14], "closed-form+recursion+brute-force");

    let out = stdout(&simres(&["indices", "--q", "3", "--t", "0"]));
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[4..7], &["8", "64", "128"]);

    let out = stdout(&simres(&[
        "indices",
        "--q",
        "1",
        "--t",
        "9",
        "--brute-max",
        "0",
    ]));
    assert!(out
        .lines()
        .nth(1)
        .unwrap()
        .ends_with(",closed-form+recursion"));
}

#[test]
fn sweep_rows() {
    let out = stdout(&simres(&["sweep", "--q", "1", "--t", "0", "--t-max", "6"]));
    let rows: Vec<Vec<&str>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 7);
    assert!(rows[1..].iter().all(|r| r[9] == "yes"));
    assert!(rows.iter().all(|r| r[5] == "25/21"));
    let out = stdout(&simres(&["sweep", "--q", "2", "--t", "0"]));
    assert_eq!(out.lines().nth(1).unwrap().split(',').nth(3), Some("1/2"));
}

#[test]
fn verify_passes_and_catches_fault() {
    let o = simres(&["verify", "--q", "1", "--t-max", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 failed"));

    let o = simres(&[
        "verify",
        "--q",
        "1",
        "--t-max",
        "1",
        "--checks",
        "index-agreement,base-reductions",
        "--inject-fault",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL index-agreement"));
    assert!(stderr(&o).contains("Kirchhoff index"));

    let o = simres(&[
        "verify",
        "--checks",
        "float-vs-exact",
        "--q",
        "1",
        "--t",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max relative error"));

    let o = simres(&["verify", "--checks", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# sweep settings\nq = 2\nt = 0\nt_max = 2\nformat = csv\n",
    )
    .unwrap();
    let from_file = stdout(&simres(&["sweep", "--config", path_str(&cfg)]));
    assert_eq!(from_file.lines().count(), 4);
    assert!(from_file.lines().skip(1).all(|l| l.starts_with("2,")));

    let flag_wins = stdout(&simres(&["sweep", "--config", path_str(&cfg), "--q", "1"]));
    assert!(flag_wins.lines().skip(1).all(|l| l.starts_with("1,")));
    assert_eq!(flag_wins.lines().count(), 4);

    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(
        simres(&["sweep", "--config", path_str(&cfg)]).status.code(),
        Some(2)
    );
}

#[test]
fn usage_errors() {
    assert_eq!(simres(&[]).status.code(), Some(2));
    assert_eq!(
        simres(&["generate", "--mode", "approximate"]).status.code(),
        Some(2)
    );
    assert_eq!(
        simres(&["sweep", "--t", "4", "--t-max", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(simres(&["--help"]).status.code(), Some(0));
}
