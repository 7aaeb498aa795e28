use std::path::Path;
use std::process::{Command, Output};

fn slfem(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slfem")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", "n_div = 8\nbeta = 0.5\noutput_prefix = out/case\n");
    let out = slfem(&["solve", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for suffix in ["_probe.csv", "_fields.vtk", "_report.txt"] {
        assert!(dir.path().join(format!("out/case{suffix}")).exists(), "missing {suffix}");
    }
    let csv = std::fs::read_to_string(dir.path().join("out/case_probe.csv")).unwrap();
    assert!(csv.starts_with("x,y,sigma_xx,sigma_yy,sigma_xy,eps_xx,eps_yy,eps_xy,s,psi,W,W_half\n"));
    assert_eq!(csv.lines().count(), 1 + 8);
}

#[test]
fn output_prefix_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", "n_div = 4\noutput_prefix = ignored\n");
    let out = slfem(&["solve", &cfg, "--output-prefix", "chosen"], dir.path());
    assert!(out.status.success());
    assert!(dir.path().join("chosen_report.txt").exists());
    assert!(!dir.path().join("ignored_report.txt").exists());
}

#[test]
fn non_convergence_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", "n_div = 8\nbeta = 0.5\nload_c = 0.2\nmax_iter = 1\ntol = 1e-14\n");
    let out = slfem(&["solve", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report = std::fs::read_to_string(dir.path().join("run_report.txt")).unwrap();
    assert!(report.starts_with("converged: false\n"));
}

#[test]
fn bad_config_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.conf", "n_div = 8\n\nbeta = -1\n");
    let out = slfem(&["solve", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = slfem(&["solve", "nope.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_over_load() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", "n_div = 8\noutput_prefix = sw\n");
    let out = slfem(&["sweep", &cfg, "--key", "load_c", "--values", "0.05,0.1,0.2"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sw_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    // the load trend increases every tip quantity
    assert!(lines[2].ends_with(",1,1,1,1") && lines[3].ends_with(",1,1,1,1"), "{csv}");
    for v in ["0.05", "0.1", "0.2"] {
        assert!(dir.path().join(format!("sw_load_c_{v}_probe.csv")).exists());
    }
}

#[test]
fn sweep_rejects_unknown_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.conf", "n_div = 4\n");
    let out = slfem(&["sweep", &cfg, "--key", "mu", "--values", "1,2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = slfem(&["selftest"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        slfem::driver::read_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 5);
}
