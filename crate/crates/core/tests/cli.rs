use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn framefit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framefit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn results(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn approximate_writes_outputs_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&["approximate", "--out", &out_arg(dir.path()), "--set", "approximate.n=30", "--set", "function.name=exp"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["coefficients.csv", "evaluation.csv", "config.txt"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let coefficients = fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
    assert_eq!(coefficients.lines().count(), 31);
    assert!(stdout(&o).contains("# approximate.n = 30"));
    assert!(results(&o)[0].starts_with("N=30 residual="));
}

#[test]
fn saved_config_reproduces_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let a = framefit(&["adapt", "--out", &out_arg(first.path()), "--set", "function.name=exp", "--set", "criterion.delta=1e-8"]);
    assert_eq!(a.status.code(), Some(0));
    let config = first.path().join("config.txt");
    let b = framefit(&["adapt", "--config", config.to_str().unwrap(), "--out", &out_arg(second.path())]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(results(&a), results(&b));
    let trace = |d: &Path| fs::read_to_string(d.join("trace.csv")).unwrap();
    assert_eq!(trace(first.path()), trace(second.path()));
}

#[test]
fn adapt_prints_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&["adapt", "--out", &out_arg(dir.path()), "--set", "function.name=exp", "--set", "criterion.delta=1e-8"]);
    let last = results(&o).pop().unwrap();
    let fields: Vec<&str> = last.split(' ').collect();
    assert_eq!(fields.len(), 4, "{last}");
    assert!(fields[0].strip_prefix("N_opt=").unwrap().parse::<usize>().is_ok());
    assert!(fields[1].strip_prefix("residual=").unwrap().parse::<f64>().is_ok());
    assert!(fields[2].strip_prefix("coefnorm=").unwrap().parse::<f64>().is_ok());
    assert_eq!(fields[3], "terminated=converged");
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("phase,N,descriptor,residual,coefnorm,b_norm,reference_b_norm,"));
}

#[test]
fn hitting_n_max_is_reported_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&[
        "adapt",
        "--out",
        &out_arg(dir.path()),
        "--set",
        "function.name=exp",
        "--set",
        "criterion.delta=1e-14",
        "--set",
        "criterion.epsilon=1e-6",
        "--set",
        "criterion.n_max=40",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(results(&o).pop().unwrap().ends_with("terminated=hitNmax"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&["approximate", "--out", &out_arg(dir.path()), "--set", "bogus.key=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus.key"));

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "function.name = exp\nsampling.gamma = abc\n").unwrap();
    let o = framefit(&["approximate", "--config", cfg.to_str().unwrap(), "--set", "approximate.n=5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn numerical_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // the domain reaches outside the support of the dictionary
    let o = framefit(&[
        "approximate",
        "--out",
        &out_arg(dir.path()),
        "--set",
        "approximate.n=5",
        "--set",
        "domain.bounds=-3,1",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sweep_writes_one_row_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&["sweep", "--out", &out_arg(dir.path()), "--set", "sweep.n=2:20:2", "--set", "function.name=exp"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn figure_rejects_unknown_id() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&["figure", "fig42", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig1_extension_beats_basis() {
    let dir = tempfile::tempdir().unwrap();
    let o = framefit(&["figure", "fig1", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = results(&o);
    let error = |prefix: &str| -> f64 {
        let line = lines.iter().find(|l| l.starts_with(prefix)).unwrap();
        let field = line.split(' ').find_map(|f| f.strip_prefix("uniform_error=")).unwrap();
        field.parse().unwrap()
    };
    assert!(error("extension") < 1e-10);
    assert!(error("basis") > 0.1);
}
