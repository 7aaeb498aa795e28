//! Q1 element kernels and global assembly of the Picard-lagged system.
//!
//! For a lagged iterate `u_prev` the bilinear form is
//!
//! ```text
//! a_prev(u, v) = Σ_K ∫_K Ψ(s(u_prev)) E[ε(u)] : ε(v) dx
//! ```
//!
//! Dirichlet data are eliminated: constrained dofs leave the unknown vector
//! and their couplings move to the right-hand side. Body forces and
//! tractions vanish in the benchmark, so the load enters only that way.

use rayon::prelude::*;

use crate::constitutive::{psi_of_s, stress_of_strain, ModelParams};
use crate::error::{Error, Result};
use crate::mesh::{CrackMesh, Marker};
use crate::quadrature::QuadratureRule;
use crate::sparse::{norm2, CsrMatrix};
use crate::tensor2d::{ElasticOperator, SymTensor2};

const XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

pub fn shape_values(xi: f64, eta: f64) -> [f64; 4] {
    std::array::from_fn(|a| 0.25 * (1.0 + XI[a] * xi) * (1.0 + ETA[a] * eta))
}

/// Shape-function gradients in physical coordinates at one quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct PointGeometry {
    pub grads: [[f64; 2]; 4],
    pub det_j: f64,
    pub position: [f64; 2],
}

pub fn point_geometry(element: usize, coords: &[[f64; 2]; 4], xi: f64, eta: f64) -> Result<PointGeometry> {
    let mut dxi = [[0.0; 2]; 4];
    for a in 0..4 {
        dxi[a] = [0.25 * XI[a] * (1.0 + ETA[a] * eta), 0.25 * ETA[a] * (1.0 + XI[a] * xi)];
    }
    // J[r][c] = ∂x_r/∂ξ_c
    let mut j = [[0.0; 2]; 2];
    for a in 0..4 {
        for r in 0..2 {
            for c in 0..2 {
                j[r][c] += coords[a][r] * dxi[a][c];
            }
        }
    }
    let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det_j > 0.0) {
        return Err(Error::Geometry { element, reason: format!("non-positive Jacobian {det_j:e} at ({xi}, {eta})") });
    }
    let inv = [[j[1][1] / det_j, -j[0][1] / det_j], [-j[1][0] / det_j, j[0][0] / det_j]];
    let mut grads = [[0.0; 2]; 4];
    for a in 0..4 {
        // ∂N/∂x_c = Σ_r ∂N/∂ξ_r ∂ξ_r/∂x_c
        grads[a] = [dxi[a][0] * inv[0][0] + dxi[a][1] * inv[1][0], dxi[a][0] * inv[0][1] + dxi[a][1] * inv[1][1]];
    }
    let n = shape_values(xi, eta);
    let position = [(0..4).map(|a| n[a] * coords[a][0]).sum(), (0..4).map(|a| n[a] * coords[a][1]).sum()];
    Ok(PointGeometry { grads, det_j, position })
}

/// Strain of local dof `k` (node `k/2`, component `k%2`) for a unit value.
pub fn dof_strain(grads: &[[f64; 2]; 4], k: usize) -> SymTensor2 {
    let g = grads[k / 2];
    if k.is_multiple_of(2) {
        SymTensor2::new(g[0], 0.0, 0.5 * g[1])
    } else {
        SymTensor2::new(0.0, g[1], 0.5 * g[0])
    }
}

pub fn strain_at(grads: &[[f64; 2]; 4], u_local: &[f64; 8]) -> SymTensor2 {
    (0..8).fold(SymTensor2::ZERO, |acc, k| acc + u_local[k] * dof_strain(grads, k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix {
    pub k: [[f64; 8]; 8],
    pub clamp_count: usize,
    pub max_beta_s: f64,
}

/// Element stiffness with Ψ lagged at `u_prev`.
pub fn element_stiffness(
    op: &ElasticOperator,
    p: &ModelParams,
    coords: &[[f64; 2]; 4],
    u_prev: &[f64; 8],
    rule: &QuadratureRule,
) -> Result<ElementMatrix> {
    element_stiffness_indexed(0, op, p, coords, u_prev, rule)
}

fn element_stiffness_indexed(
    element: usize,
    op: &ElasticOperator,
    p: &ModelParams,
    coords: &[[f64; 2]; 4],
    u_prev: &[f64; 8],
    rule: &QuadratureRule,
) -> Result<ElementMatrix> {
    let mut k = [[0.0; 8]; 8];
    let mut clamp_count = 0;
    let mut max_beta_s = 0.0_f64;
    for (pt, w) in rule.points.iter().zip(&rule.weights) {
        let geo = point_geometry(element, coords, pt[0], pt[1])?;
        let s = op.energy_seminorm(strain_at(&geo.grads, u_prev))?;
        let (psi, clamped) = psi_of_s(p, s)?;
        clamp_count += clamped as usize;
        max_beta_s = max_beta_s.max(p.beta() * s);
        let scale = w * geo.det_j * psi;
        let b: [SymTensor2; 8] = std::array::from_fn(|i| dof_strain(&geo.grads, i));
        let eb: [SymTensor2; 8] = b.map(|bi| op.apply_e(bi));
        for i in 0..8 {
            for j in i..8 {
                k[i][j] += scale * eb[j].inner(b[i]);
            }
        }
    }
    for i in 0..8 {
        for j in 0..i {
            k[i][j] = k[j][i];
        }
    }
    Ok(ElementMatrix { k, clamp_count, max_beta_s })
}

/// Internal force `∫ σ(ε(u)) : ε(φ_i)` with Ψ at `u` itself.
pub fn element_internal_force(
    element: usize,
    op: &ElasticOperator,
    p: &ModelParams,
    coords: &[[f64; 2]; 4],
    u: &[f64; 8],
    rule: &QuadratureRule,
) -> Result<([f64; 8], usize, f64)> {
    let mut f = [0.0; 8];
    let mut clamp_count = 0;
    let mut max_beta_s = 0.0_f64;
    for (pt, w) in rule.points.iter().zip(&rule.weights) {
        let geo = point_geometry(element, coords, pt[0], pt[1])?;
        let eps = strain_at(&geo.grads, u);
        let s = op.energy_seminorm(eps)?;
        let (psi, clamped) = psi_of_s(p, s)?;
        clamp_count += clamped as usize;
        max_beta_s = max_beta_s.max(p.beta() * s);
        let sigma = psi * op.apply_e(eps);
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += w * geo.det_j * sigma.inner(dof_strain(&geo.grads, i));
        }
    }
    Ok((f, clamp_count, max_beta_s))
}

/// Global dof numbering `2·node + component` with a constraint table.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    n_dofs: usize,
    prescribed: Vec<Option<f64>>,
    free: Vec<usize>,
    free_index: Vec<Option<usize>>,
}

impl DofMap {
    /// Builds the map; repeated constraints must agree on the value.
    pub fn new(n_nodes: usize, constraints: &[(usize, f64)]) -> Result<Self> {
        let n_dofs = 2 * n_nodes;
        let mut prescribed = vec![None; n_dofs];
        for &(dof, value) in constraints {
            if dof >= n_dofs {
                return Err(Error::InvalidInput(format!("constraint on dof {dof} outside 0..{n_dofs}")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite prescribed value on dof {dof}")));
            }
            match prescribed[dof] {
                Some(old) if old != value => {
                    return Err(Error::InvalidInput(format!("conflicting constraints on dof {dof}: {old} vs {value}")))
                }
                _ => prescribed[dof] = Some(value),
            }
        }
        let free: Vec<usize> = (0..n_dofs).filter(|&d| prescribed[d].is_none()).collect();
        let mut free_index = vec![None; n_dofs];
        for (k, &d) in free.iter().enumerate() {
            free_index[d] = Some(k);
        }
        Ok(DofMap { n_dofs, prescribed, free, free_index })
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    pub fn prescribed(&self, dof: usize) -> Option<f64> {
        self.prescribed[dof]
    }

    pub fn constraints(&self) -> Vec<(usize, f64)> {
        (0..self.n_dofs).filter_map(|d| self.prescribed[d].map(|v| (d, v))).collect()
    }

    /// Full vector holding the prescribed values and zeros elsewhere.
    pub fn lift(&self) -> Vec<f64> {
        self.prescribed.iter().map(|v| v.unwrap_or(0.0)).collect()
    }

    pub fn gather_free(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&d| full[d]).collect()
    }

    /// Full vector from free values, with Dirichlet values embedded.
    pub fn scatter_free(&self, free_values: &[f64]) -> Vec<f64> {
        let mut full = self.lift();
        for (k, &d) in self.free.iter().enumerate() {
            full[d] = free_values[k];
        }
        full
    }
}

pub fn dof(node: usize, component: usize) -> usize {
    2 * node + component
}

/// Benchmark constraints: `u₂ = −c` on Γ3, `u₂ = 0` on Γ1, `u₁ = 0` at (0, 0).
pub fn apply_benchmark_bcs(mesh: &CrackMesh, load_c: f64) -> Result<DofMap> {
    if !(load_c.is_finite() && load_c >= 0.0) {
        return Err(Error::InvalidInput(format!("load_c must be >= 0, got {load_c}")));
    }
    let mut constraints = Vec::new();
    for n in mesh.nodes_on(Marker::Gamma3Top) {
        constraints.push((dof(n, 1), -load_c));
    }
    for n in mesh.nodes_on(Marker::Gamma1Bottom) {
        constraints.push((dof(n, 1), 0.0));
    }
    let origin = mesh
        .nodes
        .iter()
        .position(|p| p[0] == 0.0 && p[1] == 0.0)
        .ok_or_else(|| Error::Mesh("no node at the origin for the rigid-mode pin".to_string()))?;
    constraints.push((dof(origin, 0), 0.0));
    DofMap::new(mesh.num_nodes(), &constraints)
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub clamp_count: usize,
    pub max_beta_s: f64,
}

fn local_dofs(quad: &[usize; 4]) -> [usize; 8] {
    std::array::from_fn(|k| dof(quad[k / 2], k % 2))
}

fn local_values(quad: &[usize; 4], u: &[f64]) -> [f64; 8] {
    local_dofs(quad).map(|d| u[d])
}

/// Reusable assembly context: mesh, constraints, material, and the sparsity
/// pattern of the reduced (free-dof) matrix.
#[derive(Debug, Clone)]
pub struct Assembler<'a> {
    mesh: &'a CrackMesh,
    dofs: &'a DofMap,
    op: &'a ElasticOperator,
    rule: QuadratureRule,
    pattern: Vec<Vec<usize>>,
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a CrackMesh, dofs: &'a DofMap, op: &'a ElasticOperator, rule: QuadratureRule) -> Result<Self> {
        if dofs.n_dofs() != 2 * mesh.num_nodes() {
            return Err(Error::InvalidInput(format!(
                "dof map has {} dofs, mesh needs {}",
                dofs.n_dofs(),
                2 * mesh.num_nodes()
            )));
        }
        let mut pattern = vec![Vec::new(); dofs.n_free()];
        for quad in &mesh.quads {
            let ld = local_dofs(quad);
            for &a in &ld {
                if let Some(i) = dofs.free_index(a) {
                    pattern[i].extend(ld.iter().filter_map(|&b| dofs.free_index(b)));
                }
            }
        }
        for row in &mut pattern {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Assembler { mesh, dofs, op, rule, pattern })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dofs.n_dofs() {
            return Err(Error::InvalidInput(format!(
                "displacement has {} entries, expected {}",
                u.len(),
                self.dofs.n_dofs()
            )));
        }
        Ok(())
    }

    /// Reduced system with Ψ lagged at `u_prev`.
    pub fn assemble(&self, p: &ModelParams, u_prev: &[f64]) -> Result<AssembledSystem> {
        self.check_len(u_prev)?;
        // element kernels run in parallel; scatter is sequential in element order
        let elements: Vec<ElementMatrix> = self
            .mesh
            .quads
            .par_iter()
            .enumerate()
            .map(|(e, quad)| {
                element_stiffness_indexed(
                    e,
                    self.op,
                    p,
                    &self.mesh.element_coords(e),
                    &local_values(quad, u_prev),
                    &self.rule,
                )
            })
            .collect::<Result<_>>()?;

        let mut matrix = CsrMatrix::from_pattern(self.pattern.clone());
        let mut rhs = vec![0.0; self.dofs.n_free()];
        let mut clamp_count = 0;
        let mut max_beta_s = 0.0_f64;
        for (quad, em) in self.mesh.quads.iter().zip(&elements) {
            clamp_count += em.clamp_count;
            max_beta_s = max_beta_s.max(em.max_beta_s);
            let ld = local_dofs(quad);
            for a in 0..8 {
                let Some(i) = self.dofs.free_index(ld[a]) else { continue };
                for b in 0..8 {
                    match self.dofs.free_index(ld[b]) {
                        Some(j) => matrix.add(i, j, em.k[a][b]),
                        None => {
                            let value = self.dofs.prescribed(ld[b]).unwrap_or(0.0);
                            rhs[i] -= em.k[a][b] * value;
                        }
                    }
                }
            }
        }
        Ok(AssembledSystem { matrix, rhs, clamp_count, max_beta_s })
    }

    /// Nonlinear residual `a(u; φ_i) − L(φ_i)` over free dofs, Ψ at `u`.
    pub fn residual(&self, p: &ModelParams, u: &[f64]) -> Result<ResidualEval> {
        self.check_len(u)?;
        let forces: Vec<([f64; 8], usize, f64)> = self
            .mesh
            .quads
            .par_iter()
            .enumerate()
            .map(|(e, quad)| {
                element_internal_force(e, self.op, p, &self.mesh.element_coords(e), &local_values(quad, u), &self.rule)
            })
            .collect::<Result<_>>()?;
        let mut r = vec![0.0; self.dofs.n_free()];
        let mut clamp_count = 0;
        let mut max_beta_s = 0.0_f64;
        for (quad, (f, c, m)) in self.mesh.quads.iter().zip(&forces) {
            clamp_count += c;
            max_beta_s = max_beta_s.max(*m);
            for (k, d) in local_dofs(quad).into_iter().enumerate() {
                if let Some(i) = self.dofs.free_index(d) {
                    r[i] += f[k];
                }
            }
        }
        Ok(ResidualEval { norm: norm2(&r), vector: r, clamp_count, max_beta_s })
    }

    /// Stored energy `Σ_q w_q det J_q W(ε_q)` of a displacement.
    pub fn stored_energy(&self, p: &ModelParams, u: &[f64]) -> Result<f64> {
        self.check_len(u)?;
        let mut total = 0.0;
        for (e, quad) in self.mesh.quads.iter().enumerate() {
            let coords = self.mesh.element_coords(e);
            let ul = local_values(quad, u);
            for (pt, w) in self.rule.points.iter().zip(&self.rule.weights) {
                let geo = point_geometry(e, &coords, pt[0], pt[1])?;
                total += w * geo.det_j * stress_of_strain(self.op, p, strain_at(&geo.grads, &ul))?.w;
            }
        }
        Ok(total)
    }
}

#[derive(Debug, Clone)]
pub struct ResidualEval {
    pub vector: Vec<f64>,
    pub norm: f64,
    pub clamp_count: usize,
    pub max_beta_s: f64,
}

pub fn assemble(
    mesh: &CrackMesh,
    dofs: &DofMap,
    op: &ElasticOperator,
    p: &ModelParams,
    u_prev: &[f64],
    rule: &QuadratureRule,
) -> Result<AssembledSystem> {
    Assembler::new(mesh, dofs, op, rule.clone())?.assemble(p, u_prev)
}

pub fn residual_norm(
    mesh: &CrackMesh,
    dofs: &DofMap,
    op: &ElasticOperator,
    p: &ModelParams,
    u: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    Ok(Assembler::new(mesh, dofs, op, rule.clone())?.residual(p, u)?.norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cracked_square, build_uncracked_square};
    use crate::sparse::SkylineCholesky;

    const UNIT: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    fn iso11() -> ElasticOperator {
        ElasticOperator::isotropic(1.0, 1.0).unwrap()
    }

    /// Element matrix from a fine midpoint sum, independent of the Gauss rule.
    fn midpoint_oracle(op: &ElasticOperator) -> [[f64; 8]; 8] {
        let n = 200;
        let mut k = [[0.0; 8]; 8];
        for a in 0..n {
            for b in 0..n {
                let xi = -1.0 + (2.0 * a as f64 + 1.0) / n as f64;
                let eta = -1.0 + (2.0 * b as f64 + 1.0) / n as f64;
                let geo = point_geometry(0, &UNIT, xi, eta).unwrap();
                let w = 4.0 / (n * n) as f64 * geo.det_j;
                for i in 0..8 {
                    for j in 0..8 {
                        k[i][j] += w * op.apply_e(dof_strain(&geo.grads, j)).inner(dof_strain(&geo.grads, i));
                    }
                }
            }
        }
        k
    }

    #[test]
    fn linear_element_matches_midpoint_sum_and_has_rigid_modes() {
        let op = iso11();
        let em = element_stiffness(&op, &ModelParams::linear(), &UNIT, &[0.0; 8], &QuadratureRule::gauss(2)).unwrap();
        let oracle = midpoint_oracle(&op);
        for i in 0..8 {
            for j in 0..8 {
                // midpoint rule error is O(h²) for the quadratic integrand
                assert!((em.k[i][j] - oracle[i][j]).abs() < 1e-4, "{i},{j}");
                assert_eq!(em.k[i][j], em.k[j][i]);
            }
        }
        // K_00 = (λ+2μ)/3 + μ/3
        assert!((em.k[0][0] - 4.0 / 3.0).abs() < 1e-14);
        let modes = [[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]];
        for m in modes {
            for i in 0..8 {
                let r: f64 = (0..8).map(|j| em.k[i][j] * m[j]).sum();
                assert!(r.abs() < 1e-12);
            }
        }
        // infinitesimal rotation: u = (-y, x)
        let rot: [f64; 8] = std::array::from_fn(|k| if k % 2 == 0 { -UNIT[k / 2][1] } else { UNIT[k / 2][0] });
        for i in 0..8 {
            let r: f64 = (0..8).map(|j| em.k[i][j] * rot[j]).sum();
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_lag_gives_linear_matrix() {
        let op = ElasticOperator::new(1.0, 2.0, 1.0, Some([0.0, 1.0])).unwrap();
        let rule = QuadratureRule::gauss(2);
        let lin = element_stiffness(&op, &ModelParams::linear(), &UNIT, &[0.0; 8], &rule).unwrap();
        let nl = element_stiffness(&op, &ModelParams::new(2.0, 0.5).unwrap(), &UNIT, &[0.0; 8], &rule).unwrap();
        assert_eq!(lin.k, nl.k);
        assert_eq!(nl.clamp_count, 0);
    }

    #[test]
    fn constant_strain_factorizes() {
        let op = iso11();
        let p = ModelParams::new(2.0, 0.5).unwrap();
        let rule = QuadratureRule::gauss(2);
        let c = 0.1;
        let exx = c / 3.0;
        let coords = [[0.2, 0.1], [0.45, 0.1], [0.45, 0.3], [0.2, 0.3]];
        let u: [f64; 8] =
            std::array::from_fn(|k| if k % 2 == 0 { exx * coords[k / 2][0] } else { -c * coords[k / 2][1] });
        let lin = element_stiffness(&op, &ModelParams::linear(), &coords, &[0.0; 8], &rule).unwrap();
        let nl = element_stiffness(&op, &p, &coords, &u, &rule).unwrap();
        // scalar oracle: s² = ε:E[ε] with ε = diag(c/3, -c)
        let eps = SymTensor2::diag(exx, -c);
        let s = (eps.xx * (3.0 * eps.xx + eps.yy) + eps.yy * (eps.xx + 3.0 * eps.yy)).sqrt();
        let psi = 1.0 / (1.0 - (0.5 * s).powi(2)).sqrt();
        for i in 0..8 {
            for j in 0..8 {
                assert!((nl.k[i][j] - psi * lin.k[i][j]).abs() < 1e-14 * (1.0 + lin.k[i][j].abs()));
            }
        }
        assert!((nl.max_beta_s - 0.5 * s).abs() < 1e-15);
    }

    #[test]
    fn rejects_inverted_element() {
        let flipped = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let r = element_stiffness(&iso11(), &ModelParams::linear(), &flipped, &[0.0; 8], &QuadratureRule::gauss(2));
        assert!(matches!(r, Err(Error::Geometry { .. })));
    }

    #[test]
    fn dofmap_rules() {
        assert!(DofMap::new(2, &[(0, 1.0), (0, 2.0)]).is_err());
        assert!(DofMap::new(2, &[(9, 1.0)]).is_err());
        let d = DofMap::new(2, &[(0, 1.0), (0, 1.0), (3, -2.0)]).unwrap();
        assert_eq!(d.n_free(), 2);
        assert_eq!(d.free_dofs(), &[1, 2]);
        assert_eq!(d.scatter_free(&[5.0, 6.0]), vec![1.0, 5.0, 6.0, -2.0]);
        let mut seen: Vec<usize> = d.free_dofs().to_vec();
        seen.extend(d.constraints().iter().map(|c| c.0));
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn benchmark_bcs_n4() {
        let mesh = build_cracked_square(4).unwrap();
        let dofs = apply_benchmark_bcs(&mesh, 0.1).unwrap();
        let c = dofs.constraints();
        assert_eq!(c.iter().filter(|(_, v)| *v == -0.1).count(), 5);
        let zeros_u2 = c.iter().filter(|(d, v)| d % 2 == 1 && *v == 0.0).count();
        assert_eq!(zeros_u2, 5);
        let pins: Vec<_> = c.iter().filter(|(d, _)| d % 2 == 0).collect();
        assert_eq!(pins.len(), 1);
        let origin = pins[0].0 / 2;
        assert_eq!(mesh.nodes[origin], [0.0, 0.0]);
        // the origin carries both the roller and the pin
        assert_eq!(dofs.prescribed(dof(origin, 1)), Some(0.0));
        assert_eq!(dofs.n_free(), 2 * 27 - 11);
        assert!(apply_benchmark_bcs(&mesh, -0.1).is_err());
    }

    #[test]
    fn fully_clamped_bookkeeping() {
        let mesh = build_uncracked_square(2).unwrap();
        let mut cons = Vec::new();
        for (i, p) in mesh.nodes.iter().enumerate() {
            if p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0 {
                cons.push((dof(i, 0), 0.0));
                cons.push((dof(i, 1), 0.0));
            }
        }
        let dofs = DofMap::new(mesh.num_nodes(), &cons).unwrap();
        let sys =
            assemble(&mesh, &dofs, &iso11(), &ModelParams::linear(), &dofs.lift(), &QuadratureRule::gauss(2)).unwrap();
        assert_eq!(sys.matrix.nrows(), 2);
        assert_eq!(sys.rhs.len(), dofs.n_free());
    }

    fn homogeneous(mesh: &CrackMesh, c: f64, op: &ElasticOperator) -> Vec<f64> {
        let ratio = op.lambda() / (op.lambda() + 2.0 * op.mu());
        let mut u = vec![0.0; 2 * mesh.num_nodes()];
        for (i, p) in mesh.nodes.iter().enumerate() {
            u[dof(i, 0)] = ratio * c * p[0];
            u[dof(i, 1)] = -c * p[1];
        }
        u
    }

    #[test]
    fn homogeneous_state_has_zero_residual() {
        let op = ElasticOperator::isotropic(1.0, 1.5).unwrap();
        for n in [2, 5] {
            let mesh = build_uncracked_square(n).unwrap();
            let dofs = apply_benchmark_bcs(&mesh, 0.1).unwrap();
            let u = homogeneous(&mesh, 0.1, &op);
            for beta in [0.0, 0.1, 0.5, 1.5] {
                let p = ModelParams::new(2.0, beta).unwrap();
                let r = residual_norm(&mesh, &dofs, &op, &p, &u, &QuadratureRule::gauss(2)).unwrap();
                assert!(r <= 1e-10, "n={n} beta={beta} r={r:e}");
                // and the lagged system reproduces it as its solution
                let sys = assemble(&mesh, &dofs, &op, &p, &u, &QuadratureRule::gauss(2)).unwrap();
                let uf = dofs.gather_free(&u);
                let mut ku = vec![0.0; uf.len()];
                sys.matrix.mul_vec(&uf, &mut ku);
                let d: f64 = ku.iter().zip(&sys.rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!(d <= 1e-10);
            }
        }
    }

    #[test]
    fn residual_positive_for_zero_guess() {
        let mesh = build_cracked_square(4).unwrap();
        let dofs = apply_benchmark_bcs(&mesh, 0.1).unwrap();
        let op = iso11();
        let r =
            residual_norm(&mesh, &dofs, &op, &ModelParams::linear(), &dofs.lift(), &QuadratureRule::gauss(2)).unwrap();
        assert!(r > 0.0);
    }

    #[test]
    fn linear_solution_has_small_residual() {
        let mesh = build_cracked_square(8).unwrap();
        let dofs = apply_benchmark_bcs(&mesh, 0.1).unwrap();
        let op = ElasticOperator::new(1.0, 1.0, 1.0, Some([1.0, 0.0])).unwrap();
        let lin = ModelParams::linear();
        let asm = Assembler::new(&mesh, &dofs, &op, QuadratureRule::gauss(2)).unwrap();
        let sys = asm.assemble(&lin, &dofs.lift()).unwrap();
        let x = SkylineCholesky::factor(&sys.matrix).unwrap().solve(&sys.rhs);
        let u = dofs.scatter_free(&x);
        let r = asm.residual(&lin, &u).unwrap().norm;
        assert!(r <= 1e-10 * (1.0 + norm2(&sys.rhs)));
    }

    #[test]
    fn assembly_symmetric_and_deterministic() {
        let mesh = build_cracked_square(8).unwrap();
        let dofs = apply_benchmark_bcs(&mesh, 0.1).unwrap();
        let op = ElasticOperator::new(1.0, 1.0, 1.0, Some([0.0, 1.0])).unwrap();
        let p = ModelParams::new(2.0, 0.5).unwrap();
        // a non-homogeneous lag state
        let u: Vec<f64> = (0..dofs.n_dofs()).map(|i| 0.01 * ((i as f64) * 0.37).sin()).collect();
        let a = assemble(&mesh, &dofs, &op, &p, &u, &QuadratureRule::gauss(2)).unwrap();
        let b = assemble(&mesh, &dofs, &op, &p, &u, &QuadratureRule::gauss(2)).unwrap();
        assert!(a.matrix.max_asymmetry() <= 1e-12 * a.matrix.max_abs());
        let bits = |s: &AssembledSystem| s.matrix.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(
            a.rhs.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.rhs.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
