use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use markov2::format::{CsvTable, TensorFile, TraceFile};
use markov2::TransitionTensor;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(format!("{name}.json"))
}

fn markov2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markov2"))
        .args(args)
        .env_remove("MARKOV2_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_tensor(dir: &Path, name: &str, p: &TransitionTensor) -> String {
    let path = dir.join(name);
    TensorFile::from_tensor(p, Some(name), None).write(&path).unwrap();
    path.to_string_lossy().into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = markov2(&["validate", s(&data("dna_i")), "--tol", "1e-3"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert_eq!(stdout(&ok).lines().filter(|l| l.starts_with("fiber")).count(), 9);

    let negative = dir.path().join("neg.json");
    std::fs::write(
        &negative,
        r#"{"n": 2, "slices": [[[1.0, 0.5], [0.0, 0.5]], [[1.1, 0.5], [-0.1, 0.5]]]}"#,
    )
    .unwrap();
    let o = markov2(&["validate", s(&negative)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("entry above one at p[1,1,2]"), "{}", stderr(&o));

    let negative = dir.path().join("neg2.json");
    std::fs::write(
        &negative,
        r#"{"n": 2, "slices": [[[1.0, 0.5], [0.0, 0.5]], [[1.0, 0.5], [0.0, -0.5]]]}"#,
    )
    .unwrap();
    let o = markov2(&["validate", s(&negative)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("negative entry at p[2,2,2]"), "{}", stderr(&o));

    let text = std::fs::read_to_string(data("dna_i")).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&markov2(&["validate", s(&truncated)])), 2);

    assert_eq!(code(&markov2(&["validate", s(&dir.path().join("missing.json"))])), 1);
    assert_eq!(code(&markov2(&["validate"])), 1);
    assert_eq!(code(&markov2(&["--help"])), 0);
}

#[test]
fn tolerance_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("off.json");
    std::fs::write(
        &off,
        r#"{"n": 2, "tolerance": 0.01, "slices": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, 0.5], [0.505, 0.5]]]}"#,
    )
    .unwrap();
    assert_eq!(code(&markov2(&["validate", s(&off)])), 0);
    let o = markov2(&["validate", s(&off), "--tol", "1e-3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("fiber (j,k)=(1,2)"), "{}", stderr(&o));
}

#[test]
fn diagnose_verdicts() {
    let o = markov2(&["diagnose", s(&data("dna_i"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("delta-condition: HOLDS (delta=0.2 > 0.1667), contraction=0.8"));
    assert!(stdout(&o).contains("irreducible: yes"));

    let o = markov2(&["diagnose", s(&data("dna_ii"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("delta-condition: FAILS (delta=0.1516 <= 0.1667)"));
    assert_eq!(code(&markov2(&["diagnose", s(&data("dna_ii")), "--require-delta"])), 5);

    let dir = tempfile::tempdir().unwrap();
    let uniform = write_tensor(dir.path(), "uniform.json", &TransitionTensor::uniform(3));
    let o = markov2(&["diagnose", &uniform]);
    assert!(stdout(&o).contains("delta-condition: HOLDS (delta=0.3333 > 0.1667), contraction=0"));
}

#[test]
fn diagnose_json_is_machine_readable() {
    let o = markov2(&[
        "diagnose",
        s(&data("dna_i")),
        "--json",
        "--samples",
        "20",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["delta_condition_holds"], true);
    assert_eq!(v["irreducibility"], "irreducible");
    assert_eq!(v["samples"].as_array().unwrap().len(), 24);
    assert!((v["contraction"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    let again = markov2(&[
        "diagnose",
        s(&data("dna_i")),
        "--json",
        "--samples",
        "20",
        "--seed",
        "3",
    ]);
    assert_eq!(o.stdout, again.stdout);
}

fn mean_iterations(out: &Output) -> f64 {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix("mean iterations: "))
        .expect("mean line")
        .parse()
        .unwrap()
}

#[test]
fn solve_reproduces_iteration_statistics() {
    for (name, method, lo, hi) in [
        ("dna_i", "power", 7.0, 12.0),
        ("dna_ii", "power", 4.0, 8.0),
        ("dna_i", "markov", 9.0, 15.0),
        ("dna_ii", "markov", 8.0, 14.0),
    ] {
        let o = markov2(&[
            "solve",
            s(&data(name)),
            "--method",
            method,
            "--runs",
            "10",
            "--tol",
            "1e-6",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let mean = mean_iterations(&o);
        assert!((lo..=hi).contains(&mean), "{method} on {name}: {mean}");
        assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("run ")).count(), 10);
    }
}

#[test]
fn solve_uniform_and_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = write_tensor(dir.path(), "u3.json", &TransitionTensor::uniform(3));
    let o = markov2(&["solve", &uniform, "--method", "power", "--x0", "uniform"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("x* = (0.3333333333, 0.3333333333, 0.3333333333)"));
    assert!(stdout(&o).contains("iterations: 1\n"));

    let q = markov2::solvers::Quadratic222::new(0.7, 0.5, 0.5, 0.4).unwrap();
    let two = write_tensor(dir.path(), "q.json", &q.to_tensor());
    let o = markov2(&["solve", &two, "--method", "quadratic"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(
        stdout(&o).contains("x* = (0.5358983849, 0.4641016151)"),
        "{}",
        stdout(&o)
    );
    assert_eq!(
        code(&markov2(&["solve", s(&data("dna_i")), "--method", "quadratic"])),
        1
    );
}

#[test]
fn solve_with_start_files() {
    let dir = tempfile::tempdir().unwrap();
    let x0 = dir.path().join("x0.json");
    std::fs::write(&x0, "[1.0, 0.0, 0.0]").unwrap();
    let o = markov2(&[
        "solve",
        s(&data("dna_i")),
        "--method",
        "markov",
        "--x0",
        s(&x0),
        "--x1",
        "uniform",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[0.5, 0.6, 0.0]").unwrap();
    assert_eq!(code(&markov2(&["solve", s(&data("dna_i")), "--x0", s(&bad)])), 3);
    let short = dir.path().join("short.json");
    std::fs::write(&short, "[0.5, 0.5]").unwrap();
    assert_eq!(code(&markov2(&["solve", s(&data("dna_i")), "--x0", s(&short)])), 1);
    assert_eq!(code(&markov2(&["solve", s(&data("dna_i")), "--x0", "map"])), 1);
}

#[test]
fn traces_are_written_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let o = markov2(&[
        "solve",
        s(&data("dna_i")),
        "--method",
        "markov",
        "--runs",
        "3",
        "--seed",
        "11",
        "--oracle",
        "--trace",
        s(&trace),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for r in 0..3 {
        let t = TraceFile::read(dir.path().join(format!("t_run{r}.csv"))).unwrap();
        assert_eq!(t.meta("method"), Some("markov"));
        assert_eq!(t.meta("seed"), Some((11 + r).to_string().as_str()));
        assert!(t.meta("command").unwrap().contains("--trace"));
        assert_eq!(t.rows[0].k, 2);
        assert!(t.rows.iter().all(|row| row.error.unwrap() <= row.bound.unwrap() + 1e-9));
    }
    assert!(!trace.exists());
}

#[test]
fn non_convergence_keeps_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("partial.csv");
    let o = markov2(&[
        "solve",
        s(&data("dna_i")),
        "--tol",
        "1e-15",
        "--max-iter",
        "3",
        "--trace",
        s(&trace),
    ]);
    assert_eq!(code(&o), 4);
    let t = TraceFile::read(&trace).unwrap();
    assert_eq!(t.meta("converged"), Some("false"));
    assert_eq!(t.rows.len(), 3);
    assert!(t.rows.iter().all(|r| r.error.is_none()));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = markov2(&[
            "generate",
            "--n",
            "100",
            "--delta",
            "0.0065",
            "--seed",
            "7",
            "-o",
            s(path),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let p = TensorFile::read(&a).unwrap().to_tensor(None).unwrap();
    assert!(p.min_entry() >= 0.0065 - 1e-12);
    assert_eq!(code(&markov2(&["validate", s(&a), "-q"])), 0);
    let o = markov2(&["diagnose", s(&a), "--samples", "5", "--require-delta"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("delta-condition: HOLDS"));
    assert!(stdout(&o).contains("contraction=0.7"));

    assert_eq!(
        code(&markov2(&["generate", "--n", "2", "--delta", "0.6", "-o", s(&a)])),
        1
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_markov2"))
        .args(["generate", "--n", "3", "--seed", "5"])
        .env("MARKOV2_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("random_n3_seed5.json").exists());
}

#[test]
fn figure_one_ratios_stay_under_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f1.csv");
    let o = markov2(&["figure", "--which", "1", "--seed", "4", "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = TraceFile::read(&out).unwrap();
    assert_eq!(t.meta("method"), Some("power"));
    for row in &t.rows {
        assert!((row.bound.unwrap() - 0.8).abs() < 1e-12);
        let ratio = row.observed_ratio.unwrap();
        assert!(ratio <= 0.8 + 1e-9, "ratio {ratio} at k = {}", row.k);
    }
    assert_eq!(
        code(&markov2(&["figure", "--which", "1", s(&data("dna_ii")), "-o", s(&out)])),
        5
    );
}

#[test]
fn figure_two_converges_to_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.csv");
    let o = markov2(&["figure", "--which", "2", s(&data("dna_i")), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = TraceFile::read(&out).unwrap();
    assert!(t.meta("reference").unwrap().contains("oracle"));
    assert!(t.rows.last().unwrap().error.unwrap() < 1e-6);
    assert!(t.rows.iter().all(|r| r.error.unwrap() <= r.bound.unwrap() + 1e-9));
}

#[test]
fn figure_three_errors_are_dominated() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f3.csv");
    let o = markov2(&["figure", "--which", "3", "--seed", "1", "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = CsvTable::read(&out).unwrap();
    assert_eq!(t.columns.len(), 12);
    assert_eq!(
        t.meta("rate")
            .map(|r| r.parse::<f64>().unwrap())
            .map(|r| (r - 0.7).abs() < 1e-12),
        Some(true)
    );
    let bound = t.column("bound").unwrap();
    for run in 0..10 {
        let errors = t.column(&format!("error_l1_run{run}")).unwrap();
        assert!(errors[0].is_some());
        for (e, b) in errors.iter().zip(&bound) {
            if let Some(e) = e {
                assert!(*e <= b.unwrap() * (1.0 + 1e-9));
            }
        }
    }
}
