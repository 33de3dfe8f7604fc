use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const GRAPH: &str = "1 2\n2 3\n3 4\n4 5\n5 1\n1 3\n2 5\n6 1\n6 4\n";

fn deeppm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deeppm"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn setup(dir: &Path) {
    fs::write(dir.join("g.txt"), GRAPH).unwrap();
    fs::write(
        dir.join("exp.cfg"),
        "dataset = g.txt\ndataset_name = toy\nprob_model = trivalency\nbudgets = 100, 200\n\
         methods = DeepPM, HD, Random\nr_eval = 200\ntrain.masks = 20\ntrain.labels_per_mask = 2\n\
         train.epochs = 5\ntrain.hidden = 4\ntrain.ae_hidden = 8\ntrain.latent = 2\n\
         infer.restarts = 2\ninfer.ascent_steps = 10\n",
    )
    .unwrap();
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn stats_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    let out = stdout(&deeppm(&["stats", "g.txt"], dir.path()));
    let row = out.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split('\t').collect();
    assert_eq!(&cells[1..], ["6", "9", "4", "3.00"]);
    let via_config = stdout(&deeppm(&["stats", "--config", "exp.cfg"], dir.path()));
    assert!(via_config.lines().nth(1).unwrap().ends_with("6\t9\t4\t3.00"));
}

#[test]
fn run_train_select_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    stdout(&deeppm(&["run", "--config", "exp.cfg", "--out", "res", "--seed", "3"], dir.path()));
    let records = fs::read_to_string(dir.path().join("res/records.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 6);
    assert!(records.lines().skip(1).all(|l| l.ends_with(",3")));

    stdout(&deeppm(&["run", "--config", "exp.cfg", "--out", "res", "--append"], dir.path()));
    let appended = fs::read_to_string(dir.path().join("res/records.csv")).unwrap();
    assert_eq!(appended.lines().count(), 1 + 12);

    let ckpt = stdout(&deeppm(&["train", "--config", "exp.cfg", "--out", "model", "--budget", "200"], dir.path()));
    assert!(ckpt.trim().ends_with("checkpoint.json"));
    stdout(&deeppm(
        &["select", "--config", "exp.cfg", "--out", "model", "--checkpoint", "model/checkpoint.json"],
        dir.path(),
    ));
    let seeds = fs::read_to_string(dir.path().join("model/seeds.txt")).unwrap();
    assert!(seeds.lines().all(|l| ["1", "2", "3", "4", "5", "6"].contains(&l)));

    let files = stdout(&deeppm(&["plotdata", "res/records.csv", "--out", "plots"], dir.path()));
    assert_eq!(files.lines().count(), 3);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    setup(dir.path());
    fs::write(dir.path().join("bad.cfg"), "dataset = g.txt\nmethods = Magic\n").unwrap();
    let o = deeppm(&["run", "--config", "bad.cfg"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Magic"));
    assert!(!deeppm(&["stats", "missing.txt"], dir.path()).status.success());
    assert!(!deeppm(&["bogus"], dir.path()).status.success());
}
