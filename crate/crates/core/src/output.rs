//! CSV, legacy ASCII VTK and plain-text report writers.
//!
//! Numbers are written in scientific notation with 17 significant digits so
//! that repeated runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::CrackMesh;
use crate::postprocess::{element_means, FieldSample, TipQuantity, TrendTable};
use crate::solver::SolveReport;

pub const PROBE_HEADER: &str = "x,y,sigma_xx,sigma_yy,sigma_xy,eps_xx,eps_yy,eps_xy,s,psi,W,W_half";

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_probe_csv<W: Write>(out: &mut W, samples: &[FieldSample]) -> std::io::Result<()> {
    writeln!(out, "{PROBE_HEADER}")?;
    for s in samples {
        let row =
            [s.x, s.y, s.sigma.xx, s.sigma.yy, s.sigma.xy, s.eps.xx, s.eps.yy, s.eps.xy, s.s, s.psi, s.w, s.w_half];
        let line: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

type CellField = (&'static str, fn(&FieldSample) -> f64);

/// Unstructured grid with quad cells, nodal displacement, and per-element
/// means of the quadrature-point fields.
pub fn write_vtk<W: Write>(out: &mut W, mesh: &CrackMesh, u: &[f64], samples: &[FieldSample]) -> std::io::Result<()> {
    let n = mesh.num_nodes();
    let m = mesh.num_elements();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "strain-limiting elasticity, edge crack under compression")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {n} double")?;
    for p in &mesh.nodes {
        writeln!(out, "{} {} {}", fmt_num(p[0]), fmt_num(p[1]), fmt_num(0.0))?;
    }
    writeln!(out, "CELLS {m} {}", 5 * m)?;
    for q in &mesh.quads {
        writeln!(out, "4 {} {} {} {}", q[0], q[1], q[2], q[3])?;
    }
    writeln!(out, "CELL_TYPES {m}")?;
    for _ in 0..m {
        // VTK_QUAD
        writeln!(out, "9")?;
    }
    writeln!(out, "POINT_DATA {n}")?;
    writeln!(out, "VECTORS displacement double")?;
    for i in 0..n {
        writeln!(out, "{} {} {}", fmt_num(u[2 * i]), fmt_num(u[2 * i + 1]), fmt_num(0.0))?;
    }
    writeln!(out, "CELL_DATA {m}")?;
    let means = element_means(samples, m);
    let fields: [CellField; 9] = [
        ("sigma_xx", |s| s.sigma.xx),
        ("sigma_yy", |s| s.sigma.yy),
        ("sigma_xy", |s| s.sigma.xy),
        ("eps_xx", |s| s.eps.xx),
        ("eps_yy", |s| s.eps.yy),
        ("eps_xy", |s| s.eps.xy),
        ("s", |s| s.s),
        ("psi", |s| s.psi),
        ("W", |s| s.w),
    ];
    for (name, get) in fields {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for e in &means {
            writeln!(out, "{}", fmt_num(get(e)))?;
        }
    }
    Ok(())
}

pub fn write_report<W: Write>(out: &mut W, report: &SolveReport, notes: &[String]) -> std::io::Result<()> {
    let join = |v: Vec<String>| v.join(",");
    writeln!(out, "converged: {}", report.converged)?;
    writeln!(out, "iterations: {}", report.iterations)?;
    writeln!(out, "residual_history: {}", join(report.residual_history.iter().map(|v| fmt_num(*v)).collect()))?;
    writeln!(out, "increment_history: {}", join(report.increment_history.iter().map(|v| fmt_num(*v)).collect()))?;
    writeln!(out, "clamp_history: {}", join(report.clamp_history.iter().map(|v| v.to_string()).collect()))?;
    writeln!(out, "max_beta_s: {}", fmt_num(report.max_beta_s_final))?;
    for note in notes {
        writeln!(out, "note: {note}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub key: String,
    pub value: String,
    pub converged: bool,
    pub iterations: usize,
    pub probe: Option<[f64; 4]>,
}

pub const SWEEP_HEADER: &str = "key,value,converged,iterations,tip_abs_sigma_yy,tip_abs_eps_yy,tip_W,tip_W_half,\
order_abs_sigma_yy,order_abs_eps_yy,order_W,order_W_half";

/// One line per run; ordering flags compare each trend row to the previous
/// one (`+1`, `-1`, `0`) and are empty for the first trend row and for runs
/// excluded from the trend.
pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow], trend: Option<&TrendTable>) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    let orders: Vec<Vec<i8>> = match trend {
        Some(t) => TipQuantity::ALL.iter().map(|&q| t.ordering(q)).collect(),
        None => Vec::new(),
    };
    let mut trend_pos = 0usize;
    for row in rows {
        let mut cols = vec![row.key.clone(), row.value.clone(), row.converged.to_string(), row.iterations.to_string()];
        let in_trend = row.converged && row.probe.is_some() && trend.is_some();
        match row.probe {
            Some(q) => cols.extend(q.iter().map(|v| fmt_num(*v))),
            None => cols.extend(std::iter::repeat_n(String::new(), 4)),
        }
        if in_trend && trend_pos > 0 {
            cols.extend(orders.iter().map(|o| o[trend_pos - 1].to_string()));
        } else {
            cols.extend(std::iter::repeat_n(String::new(), 4));
        }
        if in_trend {
            trend_pos += 1;
        }
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}

/// Creates `path` and runs `body` against a buffered writer.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
