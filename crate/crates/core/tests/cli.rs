use std::path::Path;
use std::process::{Command, Output};

use edgesched::gen::{generate, GenParams, Profile};
use edgesched::io::{read_instance, read_records, write_instance};
use edgesched::Instance;

const E2: &str = r#"{"m":1,"n":2,"accuracies":[0.5,1.0],"times":[[0.6,0.6],[0.6,0.6]],"T":0.9}"#;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgesched"))
        .args(args)
        .current_dir(dir)
        .env_remove("EDGESCHED_DELTA")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_exact_on_e2_appends_rows() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("e2.json"), E2).unwrap();
    for algo in ["exact", "greedy", "amr2"] {
        let o = run(&["solve", "--instance", "e2.json", "--algo", algo, "--out", "runs.csv", "--seed", "7"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let records = read_records(std::fs::File::open(dir.path().join("runs.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0].algorithm, "exact");
    assert_eq!(records[0].total_accuracy, 1.5);
    assert_eq!(records[0].lp_objective, None);
    assert_eq!(records[0].seed, Some(7));
    assert_eq!(records[1].total_accuracy, 1.5);
    assert!((records[2].lp_objective.unwrap() - 1.75).abs() < 1e-9);
    assert_eq!(records[2].fractional_jobs, 1);
}

#[test]
fn solve_without_out_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("e2.json"), E2).unwrap();
    let o = run(&["solve", "--instance", "e2.json", "--algo", "exact"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let records = read_records(o.stdout.as_slice()).unwrap();
    assert_eq!(records[0].total_accuracy, 1.5);
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"m":1,"n":2,"accuracies":[1.0,0.5],"times":[[0.6,0.6],[0.6,0.6]],"T":0.9}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let o = run(&["solve", "--instance", "bad.json", "--algo", "exact"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NonMonotoneAccuracy"), "{}", stderr(&o));

    let o = run(&["solve", "--instance", "missing.json", "--algo", "exact"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(dir.path().join("junk.json"), "{\"m\": 1").unwrap();
    let o = run(&["solve", "--instance", "junk.json", "--algo", "amr2"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["solve", "--instance", "bad.json", "--algo", "simplex"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let tight = r#"{"m":1,"n":1,"accuracies":[0.5,0.9],"times":[[2.0],[3.0]],"T":1.0}"#;
    std::fs::write(dir.path().join("tight.json"), tight).unwrap();
    for algo in ["exact", "amr2"] {
        let o = run(&["solve", "--instance", "tight.json", "--algo", algo], dir.path());
        assert_eq!(o.status.code(), Some(1), "{algo}: {}", stderr(&o));
    }
    let o = run(&["solve", "--instance", "tight.json", "--algo", "greedy"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn gen_writes_the_generated_instance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["gen", "--profile", "monotone_random", "--n", "12", "--m", "3", "--T", "1.5", "--seed", "42", "--out", "i.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let read = read_instance(&dir.path().join("i.json")).unwrap();
    let expected = generate(&GenParams::new(Profile::MonotoneRandom, 12, 3, 1.5, 42)).unwrap();
    assert_eq!(read, expected);

    let o = run(
        &["gen", "--profile", "table2", "--n", "5", "--T", "2", "--mix", "1,0,0", "--out", "t.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t2 = read_instance(&dir.path().join("t.json")).unwrap();
    assert!((0..5).all(|j| t2.time(0, j) == 0.01));

    let o = run(&["gen", "--profile", "nope", "--n", "5", "--T", "2", "--out", "x.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn delta_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let inst = Instance::new(
        vec![0.4, 0.6, 0.8],
        vec![vec![0.2; 4], vec![0.5; 4], vec![1.0; 4]],
        None,
        2.0,
    )
    .unwrap();
    write_instance(&dir.path().join("id.json"), &inst).unwrap();
    let bin = env!("CARGO_BIN_EXE_edgesched");
    let o = Command::new(bin)
        .args(["solve", "--instance", "id.json", "--algo", "amdp"])
        .current_dir(dir.path())
        .env("EDGESCHED_DELTA", "0.1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((read_records(o.stdout.as_slice()).unwrap()[0].total_accuracy - 2.8).abs() < 1e-12);

    let o = Command::new(bin)
        .args(["solve", "--instance", "id.json", "--algo", "amdp"])
        .current_dir(dir.path())
        .env("EDGESCHED_DELTA", "fast")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("EDGESCHED_DELTA"));

    // A non-positive δ is rejected before solving.
    let o = Command::new(bin)
        .args(["solve", "--instance", "id.json", "--algo", "amdp", "--delta", "-1"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_emits_the_cross_product() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tpl.json"), r#"{"profile":"table2","n":10,"T":1.0,"seed":3}"#).unwrap();
    let o = run(
        &[
            "sweep", "--instance-template", "tpl.json", "--seeds", "2", "--vary", "T", "--from", "1", "--to", "3",
            "--steps", "3", "--algos", "amr2,greedy", "--out", "sweep.csv",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let records = read_records(std::fs::File::open(dir.path().join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 3 * 2 * 2);
    let keys: Vec<(f64, Option<u64>, &str)> =
        records.iter().map(|r| (r.deadline, r.seed, r.algorithm.as_str())).collect();
    assert_eq!(keys[0], (1.0, Some(3), "amr2"));
    assert_eq!(keys[1], (1.0, Some(3), "greedy"));
    assert_eq!(keys[2], (1.0, Some(4), "amr2"));
    assert_eq!(keys[11], (3.0, Some(4), "greedy"));
    assert!(records.iter().all(|r| r.n == 10 && r.total_accuracy.is_finite()));

    let o = run(
        &[
            "sweep", "--instance-template", "tpl.json", "--vary", "n", "--from", "5", "--to", "15", "--steps", "2",
            "--algos", "greedy",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ns: Vec<usize> = read_records(o.stdout.as_slice()).unwrap().iter().map(|r| r.n).collect();
    assert_eq!(ns, vec![5, 15]);
}

#[test]
fn verify_reports_counts_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--seeds", "25", "--out", "v.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("lemma1: 25/25 ≤2 fractional"), "{text}");
    assert!(text.contains("amdp: 25/25"), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(csv.starts_with("suite,case,n,m,T,value,bound,pass\n"));
    assert_eq!(csv.lines().count(), 1 + 4 * 25);
}
