use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hitmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitmix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn two_cliques(dir: &Path) -> (String, String) {
    let mut edges = String::new();
    for block in [0usize, 8] {
        for u in block..block + 8 {
            for v in (u + 1)..block + 8 {
                edges.push_str(&format!("{u} {v}\n"));
            }
        }
    }
    edges.push_str("7 8\n");
    let g = dir.join("g.txt");
    let s = dir.join("s.txt");
    fs::write(&g, edges).unwrap();
    fs::write(&s, "0\n1\n2\n").unwrap();
    (path_str(&g).to_owned(), path_str(&s).to_owned())
}

#[test]
fn moments_on_three_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path3.txt");
    let s = dir.path().join("seed2.txt");
    let out = dir.path().join("m.tsv");
    fs::write(&g, "0 1\n1 2\n").unwrap();
    fs::write(&s, "2\n").unwrap();
    let o = hitmix(&[
        "moments",
        "--graph",
        path_str(&g),
        "--seeds",
        path_str(&s),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("vertex_id\tmean\tvariance\treachable"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split('\t').map(|f| f.parse().unwrap()).collect())
        .collect();
    let expected = [[0.0, 4.0, 8.0, 1.0], [1.0, 3.0, 8.0, 1.0]];
    assert_eq!(rows.len(), 2);
    for (row, exp) in rows.iter().zip(expected) {
        for (a, b) in row.iter().zip(exp) {
            assert!((a - b).abs() < 1e-6, "{row:?}");
        }
    }
}

#[test]
fn expand_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = two_cliques(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = hitmix(&[
            "expand",
            "--graph",
            &g,
            "--seeds",
            &s,
            "--tau",
            "0.5",
            "--seed",
            "7",
            "--out",
            path_str(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (
            fs::read(&out).unwrap(),
            fs::read(out.with_extension("tsv.json")).unwrap(),
        )
    };
    let (a, a_json) = run("a.tsv");
    let (b, b_json) = run("b.tsv");
    assert_eq!(a, b);
    assert_eq!(a_json, b_json);

    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("vertex_id\tmean\tvariance\tposterior_goal\tlabel\n"));
    let goal: Vec<usize> = text
        .lines()
        .skip(1)
        .filter(|l| l.ends_with("\t1"))
        .map(|l| l.split('\t').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(goal, (3..8).collect::<Vec<_>>());

    let report: serde_json::Value = serde_json::from_slice(&a_json).unwrap();
    assert!(report["selected_g"].as_u64().unwrap() >= 2);
    assert!(report["bic"].as_array().is_some_and(|v| !v.is_empty()));
    assert!(report["em_iterations"].as_u64().is_some());
    assert_eq!(report["seed"].as_u64(), Some(7));
}

#[test]
fn expand_without_seed_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = two_cliques(dir.path());
    let o = hitmix(&[
        "-q",
        "expand",
        "--graph",
        &g,
        "--seeds",
        &s,
        "--clusters",
        "2",
    ]);
    assert!(o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("using seed"), "{stderr}");
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("vertex_id\t"));
}

#[test]
fn eval_identical_labels() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("labels.tsv");
    fs::write(&p, "vertex_id\tlabel\n0\t1\n1\t1\n2\t0\n3\t0\n4\t1\n").unwrap();
    let o = hitmix(&["eval", "--pred", path_str(&p), "--truth", path_str(&p)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ari"].as_f64(), Some(1.0));
    assert_eq!(v["f1"].as_f64(), Some(1.0));
    assert_eq!(v["precision"].as_f64(), Some(1.0));
    assert_eq!(v["recall"].as_f64(), Some(1.0));
}

#[test]
fn relabel_writes_dense_ids() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("names.txt");
    let out = dir.path().join("dense.txt");
    let map = dir.path().join("map.tsv");
    fs::write(&g, "alice bob\nbob carol\n# comment\ncarol alice\n").unwrap();
    let o = hitmix(&[
        "relabel",
        "--graph",
        path_str(&g),
        "--out",
        path_str(&out),
        "--map",
        path_str(&map),
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), "0 1\n1 2\n2 0\n");
    assert_eq!(
        fs::read_to_string(&map).unwrap(),
        "name\tid\nalice\t0\nbob\t1\ncarol\t2\n"
    );
}

#[test]
fn sbm_sim_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.conf");
    fs::write(
        &cfg,
        "sweep = p_in\nvalues = 0.3, 0.1\nblock_size = 30\np_out = 0.05\n\
         hitting_set_size = 5\nmc_samples = 3\nseed = 11\nworkers = 2\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = hitmix(&[
            "-q",
            "sbm-sim",
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (
            fs::read_to_string(out.join("summary.csv")).unwrap(),
            fs::read_to_string(out.join("runs.csv")).unwrap(),
        )
    };
    let (summary, runs) = run("a");
    assert_eq!(run("b"), (summary.clone(), runs.clone()));
    assert!(summary.starts_with("condition,ari_mean,ari_p5,ari_p95,f1_mean,f1_p5,f1_p95\n"));
    assert_eq!(summary.lines().count(), 3);
    assert!(runs.starts_with("condition,run,ari,f1\n"));
    assert_eq!(runs.lines().count(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(hitmix(&["moments", "--nope"]).status.code(), Some(1));
    assert_eq!(
        hitmix(&["moments", "--graph", "/no/such", "--seeds", "/no/such"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let s = dir.path().join("s.txt");
    fs::write(&g, "0 1\n1 two\n").unwrap();
    fs::write(&s, "0\n").unwrap();
    assert_eq!(
        hitmix(&["moments", "--graph", path_str(&g), "--seeds", path_str(&s)])
            .status
            .code(),
        Some(1)
    );

    // every non-seed vertex is cut off from the seeds
    fs::write(&g, "0 1\n2 3\n").unwrap();
    fs::write(&s, "0\n1\n").unwrap();
    assert_eq!(
        hitmix(&["moments", "--graph", path_str(&g), "--seeds", path_str(&s)])
            .status
            .code(),
        Some(2)
    );
}
