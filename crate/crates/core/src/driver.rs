//! Benchmark orchestration: single runs, parameter sweeps and the built-in
//! self-test.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assembly::{apply_benchmark_bcs, dof, DofMap};
use crate::config::RunConfig;
use crate::constitutive::{energy_density, strain_of_stress, stress_of_strain, ModelParams};
use crate::error::{Error, Result};
use crate::mesh::{build_cracked_square, build_uncracked_square, CrackMesh};
use crate::output::{write_file, write_probe_csv, write_report, write_sweep_csv, write_vtk, SweepRow};
use crate::postprocess::{extract_tip_probe, recover_fields, trend_table, FieldSample, TipProbe, TrendTable};
use crate::solver::{PicardSolver, SolveReport};
use crate::tensor2d::{ElasticOperator, SymTensor2};

pub const SWEEP_KEYS: [&str; 4] = ["alpha", "beta", "load_c", "fiber"];

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: RunConfig,
    pub mesh: CrackMesh,
    pub dofs: DofMap,
    pub u: Vec<f64>,
    pub report: SolveReport,
    pub samples: Vec<FieldSample>,
    pub probe: Option<TipProbe>,
    pub notes: Vec<String>,
}

impl RunResult {
    pub fn converged(&self) -> bool {
        self.report.converged
    }
}

/// Solves one configuration in memory (no files).
pub fn run_benchmark(cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate().map_err(Error::InvalidInput)?;
    let mesh = if cfg.cracked { build_cracked_square(cfg.n_div)? } else { build_uncracked_square(cfg.n_div)? };
    let dofs = apply_benchmark_bcs(&mesh, cfg.load_c)?;
    let op = cfg.operator()?;
    let params = cfg.params()?;
    let solver_cfg = cfg.solver_config();
    let solver = PicardSolver::new(&mesh, &dofs, &op, params, solver_cfg.clone())?;
    let (u, report) = solver.solve()?;
    let samples = recover_fields(&mesh, &op, &params, &u, &solver_cfg.rule())?;
    let mut notes = Vec::new();
    let probe = match extract_tip_probe(&samples, &mesh, cfg.probe_side) {
        Ok(p) => Some(p),
        Err(Error::NoTip(reason)) => {
            notes.push(format!("no tip probe ({reason})"));
            None
        }
        Err(e) => return Err(e),
    };
    Ok(RunResult { config: cfg.clone(), mesh, dofs, u, report, samples, probe, notes })
}

pub fn output_paths(prefix: &str) -> [PathBuf; 3] {
    [
        PathBuf::from(format!("{prefix}_probe.csv")),
        PathBuf::from(format!("{prefix}_fields.vtk")),
        PathBuf::from(format!("{prefix}_report.txt")),
    ]
}

fn write_outputs(run: &RunResult) -> Result<Vec<PathBuf>> {
    let [probe_path, vtk_path, report_path] = output_paths(&run.config.output_prefix);
    let mut written = Vec::new();
    if let Some(probe) = &run.probe {
        write_file(&probe_path, |w| write_probe_csv(w, &probe.samples))?;
        written.push(probe_path);
    }
    write_file(&vtk_path, |w| write_vtk(w, &run.mesh, &run.u, &run.samples))?;
    written.push(vtk_path);
    write_file(&report_path, |w| write_report(w, &run.report, &run.notes))?;
    written.push(report_path);
    Ok(written)
}

/// Solves and writes `<prefix>_probe.csv`, `<prefix>_fields.vtk` and `<prefix>_report.txt`.
pub fn run_single(cfg: &RunConfig) -> Result<(RunResult, Vec<PathBuf>)> {
    let run = run_benchmark(cfg)?;
    let files = write_outputs(&run)?;
    Ok((run, files))
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub key: String,
    pub runs: Vec<RunResult>,
    pub trend: Option<TrendTable>,
    pub sweep_csv: PathBuf,
}

impl SweepResult {
    pub fn all_converged(&self) -> bool {
        self.runs.iter().all(RunResult::converged)
    }
}

fn sweep_configs(base: &RunConfig, key: &str, values: &[String]) -> Result<Vec<RunConfig>> {
    if !SWEEP_KEYS.contains(&key) {
        return Err(Error::InvalidInput(format!("sweep key must be one of {SWEEP_KEYS:?}, got '{key}'")));
    }
    if values.len() < 2 {
        return Err(Error::InvalidInput("a sweep needs at least 2 values".to_string()));
    }
    values
        .iter()
        .map(|v| {
            let mut cfg = base.clone();
            cfg.set(key, v).map_err(|msg| Error::InvalidInput(format!("sweep value '{v}': {msg}")))?;
            cfg.output_prefix = format!("{}_{key}_{v}", base.output_prefix);
            cfg.validate().map_err(Error::InvalidInput)?;
            Ok(cfg)
        })
        .collect()
}

/// One run per value plus `<prefix>_sweep.csv`. Non-converged runs are
/// recorded and left out of the trend table.
pub fn run_sweep(base: &RunConfig, key: &str, values: &[String]) -> Result<SweepResult> {
    let configs = sweep_configs(base, key, values)?;
    let runs: Vec<RunResult> = configs.par_iter().map(|c| run_single(c).map(|(r, _)| r)).collect::<Result<_>>()?;

    let trend_runs: Vec<(String, TipProbe)> = runs
        .iter()
        .filter(|r| r.converged())
        .filter_map(|r| r.probe.clone().map(|p| (r.config.get(key).unwrap_or_default(), p)))
        .collect();
    let trend = if trend_runs.len() >= 2 { Some(trend_table(&trend_runs)?) } else { None };

    let rows: Vec<SweepRow> = runs
        .iter()
        .map(|r| SweepRow {
            key: key.to_string(),
            value: r.config.get(key).unwrap_or_default(),
            converged: r.converged(),
            iterations: r.report.iterations,
            probe: r.probe.as_ref().map(|p| {
                let t = &p.tip_value;
                [t.sigma.yy.abs(), t.eps.yy.abs(), t.w, t.w_half]
            }),
        })
        .collect();
    let sweep_csv = PathBuf::from(format!("{}_sweep.csv", base.output_prefix));
    write_file(&sweep_csv, |w| write_sweep_csv(w, &rows, trend.as_ref()))?;
    Ok(SweepResult { key: key.to_string(), runs, trend, sweep_csv })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

fn random_operator(rng: &mut ChaCha8Rng) -> Result<ElasticOperator> {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let fiber = if rng.gen_bool(0.5) { Some([theta.cos(), theta.sin()]) } else { None };
    // unit-normalize once more so the |m| = 1 check sees no rounding drift
    let fiber = fiber.map(|m: [f64; 2]| {
        let n = (m[0] * m[0] + m[1] * m[1]).sqrt();
        [m[0] / n, m[1] / n]
    });
    ElasticOperator::new(rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0), rng.gen_range(0.0..3.0), fiber)
}

/// Random strain with `β·s` at a prescribed fraction of the admissible range.
fn random_admissible_strain(
    rng: &mut ChaCha8Rng,
    op: &ElasticOperator,
    p: &ModelParams,
    max_u: f64,
) -> Result<SymTensor2> {
    let dir = SymTensor2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let s = op.energy_seminorm(dir)?;
    let target = rng.gen_range(0.01..max_u) / p.beta().max(1e-12);
    Ok((target / s) * dir)
}

/// Quick invariant suite runnable from the command line.
pub fn selftest() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // constitutive inverse pair and strain bound
    let mut worst_pair = 0.0_f64;
    let mut bound_ok = true;
    for _ in 0..200 {
        let op = random_operator(&mut rng)?;
        let p = ModelParams::new(rng.gen_range(0.5..4.0), rng.gen_range(0.05..2.0))?;
        let eps = random_admissible_strain(&mut rng, &op, &p, 0.99)?;
        let back = strain_of_stress(&op, &p, stress_of_strain(&op, &p, eps)?.sigma)?;
        worst_pair = worst_pair.max((back - eps).norm() / eps.norm());
        let sigma = SymTensor2::new(rng.gen_range(-1e6..1e6), rng.gen_range(-1e6..1e6), rng.gen_range(-1e6..1e6));
        // alpha <= 2: for larger alpha the gap 1 - beta*s drops below f64 resolution at |sigma| ~ 1e6
        let q = ModelParams::new(rng.gen_range(1.0..2.0), p.beta())?;
        bound_ok &= op.energy_seminorm(strain_of_stress(&op, &q, sigma)?)? * q.beta() < 1.0;
    }
    out.push(check("constitutive inverse pair", worst_pair <= 1e-12, format!("max rel err {worst_pair:e}")));
    out.push(check("strain bound 1/beta", bound_ok, String::new()));

    // hyperelastic gradient
    let mut worst_grad = 0.0_f64;
    for _ in 0..50 {
        let op = random_operator(&mut rng)?;
        let p = ModelParams::new(rng.gen_range(0.5..4.0), rng.gen_range(0.05..2.0))?;
        let eps = random_admissible_strain(&mut rng, &op, &p, 0.9)?;
        let sigma = stress_of_strain(&op, &p, eps)?.sigma;
        let h = 1e-6;
        let mut grad = [0.0; 3];
        for (k, g) in grad.iter_mut().enumerate() {
            let mut plus = eps.to_voigt();
            let mut minus = eps.to_voigt();
            plus[k] += h;
            minus[k] -= h;
            *g = (energy_density(&op, &p, SymTensor2::from_voigt(plus))?
                - energy_density(&op, &p, SymTensor2::from_voigt(minus))?)
                / (2.0 * h);
        }
        let fd = SymTensor2::new(grad[0], grad[1], 0.5 * grad[2]);
        worst_grad = worst_grad.max((fd - sigma).norm() / sigma.norm());
    }
    out.push(check("energy gradient equals stress", worst_grad <= 1e-6, format!("max rel err {worst_grad:e}")));

    // patch test
    let op = ElasticOperator::isotropic(1.0, 1.0)?;
    let mesh = build_uncracked_square(4)?;
    let dofs = apply_benchmark_bcs(&mesh, 0.1)?;
    let solver = PicardSolver::new(&mesh, &dofs, &op, ModelParams::new(2.0, 0.1)?, Default::default())?;
    let (u, report) = solver.solve()?;
    let ratio = op.lambda() / (op.lambda() + 2.0 * op.mu());
    let err = mesh.nodes.iter().enumerate().fold(0.0_f64, |m, (i, p)| {
        m.max((u[dof(i, 0)] - ratio * 0.1 * p[0]).abs()).max((u[dof(i, 1)] + 0.1 * p[1]).abs())
    });
    out.push(check("homogeneous compression patch", err <= 1e-10 && report.converged, format!("max err {err:e}")));

    // linear limit on a small cracked mesh
    let mesh = build_cracked_square(8)?;
    let dofs = apply_benchmark_bcs(&mesh, 0.1)?;
    let solver = PicardSolver::new(&mesh, &dofs, &op, ModelParams::linear(), Default::default())?;
    let lin = solver.solve_linear()?;
    let (u, report) = solver.solve()?;
    let diff = lin.iter().zip(&u).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    out.push(check(
        "beta = 0 is one Picard iteration",
        report.iterations == 1 && report.converged && diff <= 1e-12,
        format!("iterations {}, diff {diff:e}", report.iterations),
    ));
    Ok(out)
}

pub fn ensure_parent_dir(prefix: &str) -> Result<()> {
    let probe = PathBuf::from(format!("{prefix}_x"));
    if let Some(dir) = probe.parent().filter(|d| !d.as_os_str().is_empty()) {
        if !dir.exists() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    Ok(())
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    crate::config::parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(prefix: &Path) -> RunConfig {
        RunConfig { n_div: 8, output_prefix: prefix.to_string_lossy().into_owned(), ..RunConfig::default() }
    }

    #[test]
    fn single_run_writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let (run, files) = run_single(&small(&dir.path().join("a"))).unwrap();
        assert!(run.converged());
        assert_eq!(files.len(), 3);
        assert!(files.iter().all(|f| f.exists()));
        let report = std::fs::read_to_string(&files[2]).unwrap();
        assert!(report.starts_with("converged: true\n"));
    }

    #[test]
    fn zero_load_gives_zero_probe() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { load_c: 0.0, ..small(&dir.path().join("z")) };
        let (run, files) = run_single(&cfg).unwrap();
        assert_eq!(run.report.iterations, 1);
        let csv = std::fs::read_to_string(&files[0]).unwrap();
        for line in csv.lines().skip(1) {
            let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert!(vals[2..].iter().enumerate().all(|(k, v)| if k == 7 { *v == 1.0 } else { *v == 0.0 }));
        }
    }

    #[test]
    fn uncracked_run_skips_probe() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { cracked: false, ..small(&dir.path().join("u")) };
        let (run, files) = run_single(&cfg).unwrap();
        assert!(run.probe.is_none());
        assert_eq!(files.len(), 2);
        assert!(run.notes.iter().any(|n| n.contains("no tip probe")));
        let report = std::fs::read_to_string(&files[1]).unwrap();
        assert!(report.contains("note: no tip probe"));
    }

    #[test]
    fn sweep_validation() {
        let base = RunConfig::default();
        assert!(sweep_configs(&base, "mu", &["1".into(), "2".into()]).is_err());
        assert!(sweep_configs(&base, "beta", &["0.1".into()]).is_err());
        assert!(sweep_configs(&base, "beta", &["0.1".into(), "-2".into()]).is_err());
        let cfgs = sweep_configs(&base, "fiber", &["x".into(), "y".into()]).unwrap();
        assert_eq!(cfgs[1].output_prefix, "run_fiber_y");
    }

    #[test]
    fn fiber_sweep_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let base = small(&dir.path().join("s"));
        let res = run_sweep(&base, "fiber", &["x".into(), "y".into()]).unwrap();
        assert!(res.all_converged());
        let csv = std::fs::read_to_string(&res.sweep_csv).unwrap();
        assert_eq!(csv.lines().count(), 3);
        let t = res.trend.unwrap();
        assert_ne!(t.rows[0].abs_sigma_yy, t.rows[1].abs_sigma_yy);
    }

    #[test]
    fn selftest_passes() {
        for c in selftest().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
