//! Picard (lagged-coefficient) iteration for the strain-limiting problem.
//!
//! 1. `u⁰` solves the linear elastic problem (β = 0).
//! 2. For `n = 1, 2, …`: assemble with Ψ frozen at `uⁿ⁻¹`, solve for `ũ`,
//!    relax `uⁿ = (1 − ω) uⁿ⁻¹ + ω ũ`.
//! 3. Stop once both `‖uⁿ − uⁿ⁻¹‖` and the nonlinear residual at `uⁿ` are
//!    at most `tol` (Euclidean norms over free dofs).

use crate::assembly::{AssembledSystem, Assembler, DofMap};
use crate::constitutive::ModelParams;
use crate::error::{Error, Result};
use crate::mesh::CrackMesh;
use crate::quadrature::QuadratureRule;
use crate::sparse::{pcg, relative_residual, SkylineCholesky};
use crate::tensor2d::ElasticOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolverKind {
    /// Envelope Cholesky factorization.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients, warm-started.
    Cg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    pub linear_tol: f64,
    pub quad_order: usize,
    pub linear_solver: LinearSolverKind,
    /// Halve ω whenever the residual grows between iterations.
    pub adaptive_relaxation: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-4,
            max_iter: 200,
            relaxation: 1.0,
            linear_tol: 1e-10,
            quad_order: 2,
            linear_solver: LinearSolverKind::Direct,
            adaptive_relaxation: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidInput("max_iter must be >= 1".to_string()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidInput(format!("relaxation must be in (0, 1], got {}", self.relaxation)));
        }
        if !(self.linear_tol.is_finite() && self.linear_tol > 0.0) {
            return Err(Error::InvalidInput(format!("linear_tol must be > 0, got {}", self.linear_tol)));
        }
        if !matches!(self.quad_order, 2 | 3) {
            return Err(Error::InvalidInput(format!("quad_order must be 2 or 3, got {}", self.quad_order)));
        }
        Ok(())
    }

    pub fn rule(&self) -> QuadratureRule {
        QuadratureRule::gauss(self.quad_order)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub increment_history: Vec<f64>,
    pub clamp_history: Vec<usize>,
    pub max_beta_s_final: f64,
    pub relaxation_history: Vec<f64>,
}

impl SolveReport {
    pub fn final_clamp_count(&self) -> usize {
        self.clamp_history.last().copied().unwrap_or(0)
    }
}

/// Solves the reduced system, warm-starting iterative solves from `guess`.
pub fn solve_system(sys: &AssembledSystem, guess: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    let n = sys.rhs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let x = match cfg.linear_solver {
        LinearSolverKind::Direct => SkylineCholesky::factor(&sys.matrix)?.solve(&sys.rhs),
        LinearSolverKind::Cg => {
            let mut x = guess.to_vec();
            pcg(&sys.matrix, &sys.rhs, &mut x, cfg.linear_tol, 20 * n + 100)?;
            x
        }
    };
    let rel = relative_residual(&sys.matrix, &x, &sys.rhs);
    // direct solves are checked against the same contract as iterative ones
    if !(rel <= cfg.linear_tol.max(1e-12)) {
        return Err(Error::LinearSolver(format!("relative residual {rel:e} exceeds {:e}", cfg.linear_tol)));
    }
    Ok(x)
}

/// Picard driver bound to one mesh, constraint set and material.
pub struct PicardSolver<'a> {
    assembler: Assembler<'a>,
    dofs: &'a DofMap,
    params: ModelParams,
    cfg: SolverConfig,
}

impl<'a> PicardSolver<'a> {
    pub fn new(
        mesh: &'a CrackMesh,
        dofs: &'a DofMap,
        op: &'a ElasticOperator,
        params: ModelParams,
        cfg: SolverConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let assembler = Assembler::new(mesh, dofs, op, cfg.rule())?;
        Ok(PicardSolver { assembler, dofs, params, cfg })
    }

    pub fn assembler(&self) -> &Assembler<'a> {
        &self.assembler
    }

    /// β = 0 solution with Dirichlet values embedded.
    pub fn solve_linear(&self) -> Result<Vec<f64>> {
        let lift = self.dofs.lift();
        let sys = self.assembler.assemble(&ModelParams::linear(), &lift)?;
        let x = solve_system(&sys, &vec![0.0; self.dofs.n_free()], &self.cfg)?;
        Ok(self.dofs.scatter_free(&x))
    }

    /// One unrelaxed lagged step from `u`: the solution of the system frozen at `u`.
    pub fn picard_step(&self, u: &[f64]) -> Result<Vec<f64>> {
        let sys = self.assembler.assemble(&self.params, u)?;
        let x = solve_system(&sys, &self.dofs.gather_free(u), &self.cfg)?;
        Ok(self.dofs.scatter_free(&x))
    }

    pub fn solve(&self) -> Result<(Vec<f64>, SolveReport)> {
        let mut u = self.solve_linear()?;
        let mut report = SolveReport::default();
        let mut omega = self.cfg.relaxation;
        let mut last_residual = f64::INFINITY;
        for _ in 0..self.cfg.max_iter {
            let target = self.picard_step(&u)?;
            let mut increment_sq = 0.0;
            let mut next = u.clone();
            for &d in self.dofs.free_dofs() {
                let v = if omega == 1.0 { target[d] } else { (1.0 - omega) * u[d] + omega * target[d] };
                increment_sq += (v - u[d]) * (v - u[d]);
                next[d] = v;
            }
            u = next;
            let res = self.assembler.residual(&self.params, &u)?;
            report.iterations += 1;
            report.increment_history.push(increment_sq.sqrt());
            report.residual_history.push(res.norm);
            report.clamp_history.push(res.clamp_count);
            report.relaxation_history.push(omega);
            report.max_beta_s_final = res.max_beta_s;
            if increment_sq.sqrt() <= self.cfg.tol && res.norm <= self.cfg.tol {
                report.converged = true;
                break;
            }
            if self.cfg.adaptive_relaxation && res.norm > last_residual {
                omega = (0.5 * omega).max(1.0 / 64.0);
            }
            last_residual = res.norm;
        }
        Ok((u, report))
    }
}

pub fn solve_linear(mesh: &CrackMesh, dofs: &DofMap, op: &ElasticOperator, cfg: &SolverConfig) -> Result<Vec<f64>> {
    PicardSolver::new(mesh, dofs, op, ModelParams::linear(), cfg.clone())?.solve_linear()
}

pub fn solve_picard(
    mesh: &CrackMesh,
    dofs: &DofMap,
    op: &ElasticOperator,
    p: &ModelParams,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    PicardSolver::new(mesh, dofs, op, *p, cfg.clone())?.solve()
}
