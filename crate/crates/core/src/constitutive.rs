//! Strain-limiting response.
//!
//! The forward law bounds strain by `1/β` in the energy seminorm:
//!
//! ```text
//! F(σ) = K[σ] / (1 + β^α ‖K^{1/2}[σ]‖^α)^{1/α}
//! ```
//!
//! Its inverse is the hyperelastic law used by the displacement solver,
//!
//! ```text
//! σ(ε) = Ψ(s) E[ε],   s = ‖E^{1/2}[ε]‖,   Ψ(s) = (1 − (βs)^α)^{−1/α}
//! ```
//!
//! with potential `W(ε) = ∫₀^s t Ψ(t) dt`. States with `β·s` at or above
//! [`U_CAP`] are evaluated at the cap and flagged as clamped.

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::tensor2d::{ElasticOperator, SymTensor2};

/// Largest admissible `β·s`.
pub const U_CAP: f64 = 1.0 - 1e-8;

const ENERGY_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInput(format!("alpha must be > 0, got {alpha}")));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidInput(format!("beta must be >= 0, got {beta}")));
        }
        Ok(ModelParams { alpha, beta })
    }

    /// β = 0: classical linear elasticity.
    pub fn linear() -> Self {
        ModelParams { alpha: 2.0, beta: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_linear(&self) -> bool {
        self.beta == 0.0
    }

    fn pow_alpha(&self, u: f64) -> f64 {
        if self.alpha == 2.0 {
            u * u
        } else if u == 0.0 {
            0.0
        } else {
            u.powf(self.alpha)
        }
    }

    /// `1 − u^α` without cancellation as `u → 1`.
    fn one_minus_pow_alpha(&self, u: f64) -> f64 {
        if self.alpha == 2.0 {
            (1.0 - u) * (1.0 + u)
        } else if u <= 0.5 {
            1.0 - self.pow_alpha(u)
        } else {
            -(self.alpha * (u - 1.0).ln_1p()).exp_m1()
        }
    }

    fn psi_unchecked(&self, u: f64) -> f64 {
        let base = self.one_minus_pow_alpha(u);
        if self.alpha == 2.0 {
            1.0 / base.sqrt()
        } else {
            base.powf(-1.0 / self.alpha)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveEval {
    pub s: f64,
    pub psi: f64,
    pub sigma: SymTensor2,
    pub w: f64,
    pub clamped: bool,
}

/// Response function `Ψ(s)`; returns the value and whether `β·s` was clamped.
pub fn psi_of_s(p: &ModelParams, s: f64) -> Result<(f64, bool)> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidInput(format!("energy seminorm must be finite and >= 0, got {s}")));
    }
    if p.beta == 0.0 {
        return Ok((1.0, false));
    }
    let u = p.beta * s;
    if u < U_CAP {
        Ok((p.psi_unchecked(u), false))
    } else {
        Ok((p.psi_unchecked(U_CAP), true))
    }
}

pub fn stress_of_strain(op: &ElasticOperator, p: &ModelParams, eps: SymTensor2) -> Result<ConstitutiveEval> {
    if !eps.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite strain {eps:?}")));
    }
    let s = op.energy_seminorm(eps)?;
    let (psi, clamped) = psi_of_s(p, s)?;
    let sigma = psi * op.apply_e(eps);
    let w = energy_of_seminorm(p, s)?;
    Ok(ConstitutiveEval { s, psi, sigma, w, clamped })
}

/// Forward strain-limiting law `ε = F(σ)`.
pub fn strain_of_stress(op: &ElasticOperator, p: &ModelParams, sigma: SymTensor2) -> Result<SymTensor2> {
    if !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite stress {sigma:?}")));
    }
    let k_sigma = op.apply_k(sigma);
    if p.beta == 0.0 {
        return Ok(k_sigma);
    }
    let t = sigma.inner(k_sigma).max(0.0).sqrt();
    let v = p.beta * t;
    // (1 + v^α)^{-1/α}, rearranged for v > 1 so that huge stresses do not overflow
    let scale = if v <= 1.0 {
        (1.0 + p.pow_alpha(v)).powf(-1.0 / p.alpha)
    } else {
        (1.0 + p.pow_alpha(1.0 / v)).powf(-1.0 / p.alpha) / v
    };
    Ok(scale * k_sigma)
}

/// Stored energy `W(ε) = ∫₀^s t Ψ(t) dt`.
pub fn energy_density(op: &ElasticOperator, p: &ModelParams, eps: SymTensor2) -> Result<f64> {
    if !eps.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite strain {eps:?}")));
    }
    energy_of_seminorm(p, op.energy_seminorm(eps)?)
}

/// `∫₀^u x Ψ(x/β) dx` in the gap variable `d = 1 − x`, on panels whose
/// width doubles away from the singularity of Ψ at `d = 0`.
fn integrate_graded(p: &ModelParams, u: f64) -> Result<f64> {
    let f = |d: f64| {
        let base = if p.alpha == 2.0 { d * (2.0 - d) } else { -(p.alpha * (-d).ln_1p()).exp_m1() };
        (1.0 - d) * base.powf(-1.0 / p.alpha)
    };
    let mut total = 0.0;
    let mut lo = 1.0 - u;
    while lo < 1.0 {
        let hi = (2.0 * lo).min(1.0);
        total += integrate_adaptive(f, lo, hi, ENERGY_REL_TOL)?;
        lo = hi;
    }
    Ok(total)
}

/// `W` as a function of the energy seminorm alone.
///
/// Past the cap, Ψ is frozen at its capped value and `W` is continued as
/// `W(s_cap) + Ψ_cap (s² − s_cap²) / 2`, which keeps `∂W/∂ε = σ` for clamped states.
pub fn energy_of_seminorm(p: &ModelParams, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidInput(format!("energy seminorm must be finite and >= 0, got {s}")));
    }
    if p.beta == 0.0 || s == 0.0 {
        return Ok(0.5 * s * s);
    }
    let beta = p.beta;
    let u = beta * s;
    let (u_eff, extra) = if u < U_CAP {
        (u, 0.0)
    } else {
        let s_cap = U_CAP / beta;
        (U_CAP, 0.5 * p.psi_unchecked(U_CAP) * (s * s - s_cap * s_cap))
    };
    // In the scaled variable x = βt: W = β⁻² ∫₀^u x Ψ(x/β) dx.
    let core = if p.alpha == 2.0 {
        // 1 − sqrt(1 − u²), written without cancellation
        let u2 = u_eff * u_eff;
        u2 / (1.0 + (1.0 - u2).sqrt())
    } else {
        integrate_graded(p, u_eff)?
    };
    Ok(core / (beta * beta) + extra)
}
