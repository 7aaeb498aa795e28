//! Quadrature-point field recovery, crack-tip line probes, and trend tables
//! comparing probes across runs.

use rayon::prelude::*;

use crate::assembly::{dof, point_geometry, strain_at};
use crate::constitutive::{stress_of_strain, ModelParams};
use crate::error::{Error, Result};
use crate::mesh::{CrackMesh, TIP};
use crate::quadrature::QuadratureRule;
use crate::tensor2d::{ElasticOperator, SymTensor2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub eps: SymTensor2,
    pub sigma: SymTensor2,
    pub s: f64,
    pub psi: f64,
    pub w: f64,
    /// `½ σ : ε`
    pub w_half: f64,
    pub element: usize,
    pub qpoint: usize,
    /// Integration weight `w_q · det J_q`.
    pub dv: f64,
    pub clamped: bool,
}

impl FieldSample {
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        ((self.x - p[0]).powi(2) + (self.y - p[1]).powi(2)).sqrt()
    }
}

/// One sample per element quadrature point, in element-then-point order.
pub fn recover_fields(
    mesh: &CrackMesh,
    op: &ElasticOperator,
    p: &ModelParams,
    u: &[f64],
    rule: &QuadratureRule,
) -> Result<Vec<FieldSample>> {
    if u.len() != 2 * mesh.num_nodes() {
        return Err(Error::InvalidInput(format!(
            "displacement has {} entries, expected {}",
            u.len(),
            2 * mesh.num_nodes()
        )));
    }
    let per_element: Vec<Vec<FieldSample>> = mesh
        .quads
        .par_iter()
        .enumerate()
        .map(|(e, quad)| {
            let coords = mesh.element_coords(e);
            let ul: [f64; 8] = std::array::from_fn(|k| u[dof(quad[k / 2], k % 2)]);
            rule.points
                .iter()
                .zip(&rule.weights)
                .enumerate()
                .map(|(q, (pt, wq))| {
                    let geo = point_geometry(e, &coords, pt[0], pt[1])?;
                    let eps = strain_at(&geo.grads, &ul);
                    let ev = stress_of_strain(op, p, eps)?;
                    Ok(FieldSample {
                        x: geo.position[0],
                        y: geo.position[1],
                        eps,
                        sigma: ev.sigma,
                        s: ev.s,
                        psi: ev.psi,
                        w: ev.w,
                        w_half: 0.5 * ev.sigma.inner(eps),
                        element: e,
                        qpoint: q,
                        dv: wq * geo.det_j,
                        clamped: ev.clamped,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_element.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbeSide {
    /// Quadrature row just below the crack line.
    #[default]
    Lower,
    /// Quadrature row just above the crack line.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TipProbe {
    /// Ordered from the tip outward (x descending).
    pub samples: Vec<FieldSample>,
    pub tip_value: FieldSample,
}

/// Samples along the quadrature row adjacent to `y = 0.5`, ahead of the tip
/// (`x ≤ 0.5`), with the sample nearest the tip as the tip value.
pub fn extract_tip_probe(samples: &[FieldSample], mesh: &CrackMesh, side: ProbeSide) -> Result<TipProbe> {
    mesh.tip_index()?;
    let h = 1.0 / mesh.n_div as f64;
    let in_band = |s: &FieldSample| match side {
        ProbeSide::Lower => s.y < TIP[1] && s.y > TIP[1] - h,
        ProbeSide::Upper => s.y > TIP[1] && s.y < TIP[1] + h,
    };
    let ahead: Vec<&FieldSample> = samples.iter().filter(|s| s.x <= TIP[0] && in_band(s)).collect();
    // the quadrature row closest to the crack line
    let row_y = ahead
        .iter()
        .map(|s| s.y)
        .min_by(|a, b| (a - TIP[1]).abs().total_cmp(&(b - TIP[1]).abs()))
        .ok_or_else(|| Error::NoTip("no samples ahead of the crack tip".to_string()))?;
    let tol = 1e-9 * h;
    let mut row: Vec<FieldSample> = ahead.into_iter().filter(|s| (s.y - row_y).abs() <= tol).copied().collect();
    row.sort_by(|a, b| b.x.total_cmp(&a.x));
    let tip_value =
        *row.iter().min_by(|a, b| a.distance_to(TIP).total_cmp(&b.distance_to(TIP))).expect("row is non-empty");
    Ok(TipProbe { samples: row, tip_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TipQuantity {
    SigmaYy,
    EpsYy,
    W,
    WHalf,
}

impl TipQuantity {
    pub const ALL: [TipQuantity; 4] = [TipQuantity::SigmaYy, TipQuantity::EpsYy, TipQuantity::W, TipQuantity::WHalf];

    pub fn name(self) -> &'static str {
        match self {
            TipQuantity::SigmaYy => "tip_abs_sigma_yy",
            TipQuantity::EpsYy => "tip_abs_eps_yy",
            TipQuantity::W => "tip_W",
            TipQuantity::WHalf => "tip_W_half",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub label: String,
    pub abs_sigma_yy: f64,
    pub abs_eps_yy: f64,
    pub w: f64,
    pub w_half: f64,
}

impl TrendRow {
    pub fn get(&self, q: TipQuantity) -> f64 {
        match q {
            TipQuantity::SigmaYy => self.abs_sigma_yy,
            TipQuantity::EpsYy => self.abs_eps_yy,
            TipQuantity::W => self.w,
            TipQuantity::WHalf => self.w_half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
}

impl TrendTable {
    pub fn values(&self, q: TipQuantity) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(q)).collect()
    }

    /// Row-order comparison flags: `+1` when the next row is larger, `-1` smaller, `0` equal.
    pub fn ordering(&self, q: TipQuantity) -> Vec<i8> {
        self.values(q)
            .windows(2)
            .map(|w| match w[1].partial_cmp(&w[0]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            })
            .collect()
    }

    pub fn strictly_increasing(&self, q: TipQuantity) -> bool {
        self.ordering(q).iter().all(|&o| o == 1)
    }

    pub fn strictly_decreasing(&self, q: TipQuantity) -> bool {
        self.ordering(q).iter().all(|&o| o == -1)
    }
}

pub fn trend_table(runs: &[(String, TipProbe)]) -> Result<TrendTable> {
    if runs.len() < 2 {
        return Err(Error::InvalidInput(format!("trend table needs at least 2 runs, got {}", runs.len())));
    }
    let rows = runs
        .iter()
        .map(|(label, probe)| {
            let t = &probe.tip_value;
            TrendRow {
                label: label.clone(),
                abs_sigma_yy: t.sigma.yy.abs(),
                abs_eps_yy: t.eps.yy.abs(),
                w: t.w,
                w_half: t.w_half,
            }
        })
        .collect();
    Ok(TrendTable { rows })
}

/// Element holding the largest `W` sample.
pub fn argmax_energy_element(samples: &[FieldSample]) -> Option<usize> {
    samples.iter().max_by(|a, b| a.w.total_cmp(&b.w)).map(|s| s.element)
}

/// Per-element arithmetic means of the quadrature samples.
pub fn element_means(samples: &[FieldSample], n_elements: usize) -> Vec<FieldSample> {
    let mut sums: Vec<(FieldSample, usize)> = (0..n_elements)
        .map(|e| {
            (
                FieldSample {
                    x: 0.0,
                    y: 0.0,
                    eps: SymTensor2::ZERO,
                    sigma: SymTensor2::ZERO,
                    s: 0.0,
                    psi: 0.0,
                    w: 0.0,
                    w_half: 0.0,
                    element: e,
                    qpoint: 0,
                    dv: 0.0,
                    clamped: false,
                },
                0,
            )
        })
        .collect();
    for s in samples {
        let (acc, n) = &mut sums[s.element];
        acc.x += s.x;
        acc.y += s.y;
        acc.eps += s.eps;
        acc.sigma += s.sigma;
        acc.s += s.s;
        acc.psi += s.psi;
        acc.w += s.w;
        acc.w_half += s.w_half;
        acc.dv += s.dv;
        acc.clamped |= s.clamped;
        *n += 1;
    }
    sums.into_iter()
        .map(|(mut acc, n)| {
            if n > 0 {
                let k = 1.0 / n as f64;
                acc.x *= k;
                acc.y *= k;
                acc.eps = k * acc.eps;
                acc.sigma = k * acc.sigma;
                acc.s *= k;
                acc.psi *= k;
                acc.w *= k;
                acc.w_half *= k;
            }
            acc
        })
        .collect()
}
