use std::process::{Command, Output};

fn circanon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circanon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn spectrum_prime_order() {
    let o = circanon(&["spectrum", "7: 1,2,4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "distinct_count"), "3");
    assert_eq!(field(&s, "simple"), "false");
    assert_eq!(field(&s, "saturated"), "n/a");
}

#[test]
fn spectrum_numeric_csv() {
    let o = circanon(&["spectrum", "5: 1,4", "--numeric"]);
    let s = stdout(&o);
    assert_eq!(field(&s, "saturated"), "true");
    let rows: Vec<&str> = s.lines().skip_while(|l| *l != "a,re,im").skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("0,2.0"));
}

#[test]
fn walk_rank_and_rows() {
    let s = stdout(&circanon(&["walk", "6: 1,2"]));
    assert_eq!(field(&s, "rank"), "5");
    assert_eq!(field(&s, "distinct_rows"), "6");
    let s = stdout(&circanon(&["walk", "5: 1,4"]));
    assert_eq!(field(&s, "rank"), "3");
    assert_eq!(field(&s, "walk_saturated"), "true");
}

#[test]
fn cr_with_individualization() {
    let s = stdout(&circanon(&["cr", "7: 1,3", "--individualize", "0"]));
    assert_eq!(field(&s, "discrete"), "true");
    assert!(s.starts_with("round 0: 2 classes"));
}

#[test]
fn canon_digest_invariant_under_relabeling() {
    let dir = std::env::temp_dir().join(format!("circanon-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // cay(Z_7, {1,3}) relabeled by x -> 3x + 2.
    let mut text = String::from("n 7 directed\n");
    for x in 0..7 {
        for s in [1, 3] {
            let f = |v: usize| (3 * v + 2) % 7;
            text.push_str(&format!("{} {}\n", f(x), f((x + s) % 7)));
        }
    }
    let path = dir.join("g.txt");
    std::fs::write(&path, text).unwrap();
    let a = stdout(&circanon(&["canon", "7: 1,3"]));
    let b = circanon(&["canon", path.to_str().unwrap()]);
    assert!(b.status.success());
    let b = stdout(&b);
    assert_eq!(field(&a, "outcome"), "success");
    assert_eq!(field(&a, "digest"), field(&b, "digest"));
    assert_eq!(field(&a, "sha256"), field(&b, "sha256"));
    assert_eq!(field(&a, "sha256").len(), 64);
}

#[test]
fn canon_give_up_exit_code() {
    let o = circanon(&["canon", "8: 1,2,5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(field(&stdout(&o), "outcome").starts_with("give-up"));
}

#[test]
fn invalid_input_exit_code() {
    assert_eq!(circanon(&["canon", "5: 7"]).status.code(), Some(2));
    assert_eq!(
        circanon(&["canon", "5: 1", "--mode", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        circanon(&["spectrum", "/nonexistent/file"]).status.code(),
        Some(2)
    );
    assert_eq!(
        circanon(&["canon", "6: 1", "--mode", "graph"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn wl2_rep_recovers_connection_set() {
    let o = circanon(&["wl2-rep", "8: 1,2,4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "firm"), "true");
    assert_eq!(field(&s, "outcome"), "success");
    let set = field(&s, "set");
    assert!(set.starts_with("8: "));
    assert_eq!(set.split(',').count(), 3);
}

#[test]
fn wl2_round_counts() {
    let s = stdout(&circanon(&["wl2", "5: 1,4"]));
    assert_eq!(field(&s, "stable_classes"), "3");
}

#[test]
fn gen_is_seeded_and_labels_model() {
    let args = [
        "gen",
        "--model",
        "unlabeled",
        "--n",
        "6",
        "--count",
        "5",
        "--seed",
        "9",
    ];
    let a = stdout(&circanon(&args));
    assert_eq!(a, stdout(&circanon(&args)));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("# model: unlabeled n: 6 directed"));
    assert_eq!(lines.filter(|l| l.starts_with("6:")).count(), 5);
    let g = stdout(&circanon(&[
        "gen",
        "--model",
        "labeled",
        "--n",
        "5",
        "--undirected",
    ]));
    assert!(g.contains("n 5 undirected"));
}

#[test]
fn experiment_csv_is_deterministic_across_jobs() {
    let run = |jobs: &str| {
        stdout(&circanon(&[
            "--jobs",
            jobs,
            "--seed",
            "3",
            "experiment",
            "--name",
            "simple-spectrum",
            "--n",
            "8..10,16",
            "--trials",
            "40",
        ]))
    };
    let a = run("1");
    assert_eq!(a, run("4"));
    assert!(a.starts_with("n,trial,seed,"));
    assert!(a.trim_end().ends_with("# result: PASS"));
}

#[test]
fn experiment_assertion_exit_code() {
    let o = circanon(&[
        "experiment",
        "--name",
        "3p-collision",
        "--n",
        "15",
        "--trials",
        "20",
        "--tolerance",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).trim_end().ends_with("# result: FAIL"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("circanon-out-{}.txt", std::process::id()));
    let o = circanon(&["--out", path.to_str().unwrap(), "spectrum", "3: 1,2"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let s = std::fs::read_to_string(&path).unwrap();
    assert_eq!(field(&s, "distinct_count"), "2");
}
