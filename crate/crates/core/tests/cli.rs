use std::path::Path;
use std::process::{Command, Output};

use sfp_core::textio::{write_matrix, write_vector};
use sfp_core::DenseMatrix;

fn sfp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let a = DenseMatrix::from_rows(&[
        vec![1.0, 0.2, 0.0, -0.3],
        vec![0.0, 1.0, 0.5, 0.1],
        vec![0.3, -0.1, 1.0, 0.0],
    ])
    .unwrap();
    std::fs::write(dir.path().join("a.mat"), write_matrix(&a)).unwrap();
    std::fs::write(dir.path().join("b.vec"), write_vector(&[1.0, 0.0, 0.5])).unwrap();
    std::fs::write(dir.path().join("lo.vec"), write_vector(&[0.0; 4])).unwrap();
    std::fs::write(dir.path().join("hi.vec"), write_vector(&[2.0; 4])).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_happy_path_for_every_algorithm() {
    let dir = fixture();
    for algo in ["dca", "fb", "mf", "cq", "mcq"] {
        let trace = format!("trace_{algo}.csv");
        let mut args = vec!["solve", "--algo", algo, "--A", "a.mat", "--Q", "singleton:b.vec", "--gamma", "0.6"];
        args.extend(["--trace", &trace, "--out", "x.vec"]);
        if algo == "mcq" {
            args.extend(["--t", "2"]);
        }
        let o = sfp(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{algo}: {}", stderr(&o));
        let line = stdout(&o);
        assert!(line.starts_with("status=converged iters="), "{algo}: {line}");
        assert!(line.contains(" objective="));
        let csv = std::fs::read_to_string(dir.path().join(&trace)).unwrap();
        assert_eq!(csv.lines().next(), Some("iter,objective,residual,step_norm,elapsed_ms"));
        assert!(csv.lines().count() >= 2);
        let x = std::fs::read_to_string(dir.path().join("x.vec")).unwrap();
        assert!(x.starts_with("4\n"));
    }
}

#[test]
fn default_trace_path_and_constraint_sets() {
    let dir = fixture();
    let o = sfp(
        dir.path(),
        &["solve", "--algo", "dca", "--A", "a.mat", "--Q", "ball:b.vec:0.1", "--C", "box:lo.vec:hi.vec", "--gamma", "0.3"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("trace.csv").exists());
    let o = sfp(
        dir.path(),
        &["solve", "--algo", "cq", "--A", "a.mat", "--Q", "singleton:b.vec", "--C", "orthant:4"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn configuration_errors_exit_2_and_name_the_flag() {
    let dir = fixture();
    let cases: &[(&[&str], &str)] = &[
        (&["solve", "--algo", "dca", "--A", "a.mat", "--Q", "singleton:b.vec"], "--gamma"),
        (&["solve", "--algo", "fb", "--A", "missing.mat", "--Q", "singleton:b.vec", "--gamma", "1"], "--A"),
        (&["solve", "--algo", "fb", "--A", "a.mat", "--Q", "sphere:b.vec", "--gamma", "1"], "--Q"),
        (&["solve", "--algo", "fb", "--A", "a.mat", "--Q", "fullspace:7", "--gamma", "1"], "problem"),
        (&["solve", "--algo", "sgd", "--A", "a.mat", "--Q", "singleton:b.vec"], "--algo"),
        (&["solve", "--algo", "dca", "--A", "a.mat", "--Q", "singleton:b.vec", "--gamma", "1", "--inner", "admm"], "--inner"),
        (&["solve", "--algo", "fb", "--A", "a.mat", "--Q", "singleton:b.vec", "--gamma", "1", "--C", "orthant:4"], "fullspace"),
        (&["solve", "--algo", "fb", "--A", "a.mat", "--Q", "singleton:b.vec", "--gamma", "1", "--fb-step", "100"], "step"),
        (&["solve", "--algo", "mcq", "--A", "a.mat", "--Q", "singleton:b.vec"], "level"),
        (&["solve", "--algo", "cq", "--A", "a.mat", "--Q", "singleton:b.vec", "--x0", "b.vec"], "--x0"),
        (&["bench-sparse", "--config", "nope.cfg"], "--config"),
    ];
    for (args, needle) in cases {
        let o = sfp(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn budget_exhaustion_exits_1() {
    let dir = fixture();
    let o = sfp(
        dir.path(),
        &["solve", "--algo", "cq", "--A", "a.mat", "--Q", "singleton:b.vec", "--max-iter", "2", "--step-tol", "1e-14"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("status=max-iterations iters=2 "));
}

#[test]
fn bench_sparse_writes_rows_for_each_pair() {
    let dir = fixture();
    std::fs::write(
        dir.path().join("cfg.txt"),
        "seed=3\nm=20\nn=40\nk=3\ntrials=3\nalgos=dca,cq\ntraces=true\nout_dir=out\n",
    )
    .unwrap();
    let o = sfp(dir.path(), &["bench-sparse", "--config", "cfg.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 3 * 2);
    assert!(dir.path().join("out/trace_cq_2.csv").exists());
    assert!(dir.path().join("out/quantiles_dca.csv").exists());

    let o = sfp(dir.path(), &["bench-random", "--config", "cfg.txt", "--out-dir", "rand"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("rand/summary.csv").exists());
    let o = sfp(dir.path(), &["bench-random", "--config", "cfg.txt", "--large-scale"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn prox_check_subcommand() {
    let dir = fixture();
    let o = sfp(dir.path(), &["prox-check", "--samples-2d", "30", "--samples-3d", "6", "--grid-step", "0.005"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    let gap: f64 = line
        .split_whitespace()
        .find_map(|f| f.strip_prefix("max_gap="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(gap <= 5e-3, "{line}");
}
