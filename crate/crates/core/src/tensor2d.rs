//! Symmetric 2×2 tensors and the fourth-order elasticity and compliance
//! operators acting on them.
//!
//! Tensors are stored in Voigt order `(xx, yy, xy)` with the tensor (not the
//! engineering) shear component. The factor 2 on the off-diagonal lives in
//! [`SymTensor2::inner`], never in storage.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 { xx: 0.0, yy: 0.0, xy: 0.0 };
    pub const IDENTITY: SymTensor2 = SymTensor2 { xx: 1.0, yy: 1.0, xy: 0.0 };

    pub const fn new(xx: f64, yy: f64, xy: f64) -> Self {
        SymTensor2 { xx, yy, xy }
    }

    pub const fn diag(xx: f64, yy: f64) -> Self {
        SymTensor2 { xx, yy, xy: 0.0 }
    }

    /// Dyadic square `a ⊗ a` of a 2-vector.
    pub fn outer(a: [f64; 2]) -> Self {
        SymTensor2 { xx: a[0] * a[0], yy: a[1] * a[1], xy: a[0] * a[1] }
    }

    pub fn from_voigt(v: [f64; 3]) -> Self {
        SymTensor2 { xx: v[0], yy: v[1], xy: v[2] }
    }

    pub fn to_voigt(self) -> [f64; 3] {
        [self.xx, self.yy, self.xy]
    }

    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }

    /// Frobenius inner product `A : B`.
    pub fn inner(self, other: SymTensor2) -> f64 {
        self.xx * other.xx + self.yy * other.yy + 2.0 * self.xy * other.xy
    }

    pub fn norm(self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.xx.is_finite() && self.yy.is_finite() && self.xy.is_finite()
    }
}

impl Add for SymTensor2 {
    type Output = SymTensor2;
    fn add(self, rhs: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.xx + rhs.xx, self.yy + rhs.yy, self.xy + rhs.xy)
    }
}

impl AddAssign for SymTensor2 {
    fn add_assign(&mut self, rhs: SymTensor2) {
        *self = *self + rhs;
    }
}

impl Sub for SymTensor2 {
    type Output = SymTensor2;
    fn sub(self, rhs: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.xx - rhs.xx, self.yy - rhs.yy, self.xy - rhs.xy)
    }
}

impl Neg for SymTensor2 {
    type Output = SymTensor2;
    fn neg(self) -> SymTensor2 {
        SymTensor2::new(-self.xx, -self.yy, -self.xy)
    }
}

impl Mul<SymTensor2> for f64 {
    type Output = SymTensor2;
    fn mul(self, rhs: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self * rhs.xx, self * rhs.yy, self * rhs.xy)
    }
}

impl Mul<f64> for SymTensor2 {
    type Output = SymTensor2;
    fn mul(self, rhs: f64) -> SymTensor2 {
        rhs * self
    }
}

/// Linearized elasticity tensor of a transversely isotropic solid,
/// `E[ε] = 2μ ε + λ tr(ε) I + γ (ε : M) M` with `M = m ⊗ m`.
///
/// Without a fiber direction the γ term is dropped and the operator is
/// isotropic. The compliance (inverse) matrix is computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticOperator {
    mu: f64,
    lambda: f64,
    gamma: f64,
    structural: Option<SymTensor2>,
    m_dir: Option<[f64; 2]>,
    compliance: [[f64; 3]; 3],
}

impl ElasticOperator {
    pub fn new(mu: f64, lambda: f64, gamma: f64, m_dir: Option<[f64; 2]>) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidInput(format!("mu must be > 0, got {mu}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidInput(format!("lambda must be > 0, got {lambda}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidInput(format!("gamma must be >= 0, got {gamma}")));
        }
        if let Some(m) = m_dir {
            let len = (m[0] * m[0] + m[1] * m[1]).sqrt();
            if !len.is_finite() || (len - 1.0).abs() > 1e-14 {
                return Err(Error::InvalidInput(format!("fiber direction must be a unit vector, |m| = {len}")));
            }
        }
        let mut op = ElasticOperator {
            mu,
            lambda,
            gamma,
            structural: m_dir.map(SymTensor2::outer),
            m_dir,
            compliance: [[0.0; 3]; 3],
        };
        op.compliance =
            invert3(&op.voigt_matrix()).ok_or_else(|| Error::Internal("elasticity matrix is singular".to_string()))?;
        Ok(op)
    }

    pub fn isotropic(mu: f64, lambda: f64) -> Result<Self> {
        Self::new(mu, lambda, 0.0, None)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn fiber(&self) -> Option<[f64; 2]> {
        self.m_dir
    }

    pub fn apply_e(&self, eps: SymTensor2) -> SymTensor2 {
        let mut sigma = 2.0 * self.mu * eps + (self.lambda * eps.trace()) * SymTensor2::IDENTITY;
        if let Some(m) = self.structural {
            sigma += (self.gamma * eps.inner(m)) * m;
        }
        sigma
    }

    /// Compliance `K = E⁻¹` applied to a stress.
    pub fn apply_k(&self, sigma: SymTensor2) -> SymTensor2 {
        SymTensor2::from_voigt(matvec3(&self.compliance, sigma.to_voigt()))
    }

    /// `s = sqrt(ε : E[ε])`.
    pub fn energy_seminorm(&self, eps: SymTensor2) -> Result<f64> {
        let q = eps.inner(self.apply_e(eps));
        if q < -1e-14 {
            return Err(Error::Internal(format!("negative elastic energy {q:e}; operator is not positive definite")));
        }
        Ok(q.max(0.0).sqrt())
    }

    /// Matrix mapping stored strain components to stored stress components.
    pub fn voigt_matrix(&self) -> [[f64; 3]; 3] {
        let mut c = [[0.0; 3]; 3];
        for (j, unit) in
            [SymTensor2::new(1.0, 0.0, 0.0), SymTensor2::new(0.0, 1.0, 0.0), SymTensor2::new(0.0, 0.0, 1.0)]
                .into_iter()
                .enumerate()
        {
            let col = self.apply_e(unit).to_voigt();
            for i in 0..3 {
                c[i][j] = col[i];
            }
        }
        c
    }

    pub fn compliance_matrix(&self) -> [[f64; 3]; 3] {
        self.compliance
    }
}

fn matvec3(a: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

/// Adjugate inverse; `None` when the determinant vanishes relative to the entries.
fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = a[0][0] * adj[0][0] + a[0][1] * adj[1][0] + a[0][2] * adj[2][0];
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !det.is_finite() || det.abs() <= 1e-14 * scale.powi(3) {
        return None;
    }
    let mut inv = adj;
    for row in inv.iter_mut() {
        for v in row.iter_mut() {
            *v /= det;
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iso11() -> ElasticOperator {
        ElasticOperator::isotropic(1.0, 1.0).unwrap()
    }

    fn random_op(rng: &mut ChaCha8Rng) -> ElasticOperator {
        let mu = rng.gen_range(0.1..10.0);
        let lambda = rng.gen_range(0.1..10.0);
        if rng.gen_bool(0.3) {
            return ElasticOperator::isotropic(mu, lambda).unwrap();
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (s, c) = theta.sin_cos();
        let n = (c * c + s * s).sqrt();
        ElasticOperator::new(mu, lambda, rng.gen_range(0.0..10.0), Some([c / n, s / n])).unwrap()
    }

    fn random_tensor(rng: &mut ChaCha8Rng) -> SymTensor2 {
        SymTensor2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    /// Full 2×2×2×2 index form of E, written independently of `apply_e`.
    fn brute_force_e(op: &ElasticOperator, eps: SymTensor2) -> SymTensor2 {
        let e = [[eps.xx, eps.xy], [eps.xy, eps.yy]];
        let m = op.fiber().unwrap_or([0.0, 0.0]);
        let gamma = if op.fiber().is_some() { op.gamma() } else { 0.0 };
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let c = op.mu() * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
                            + op.lambda() * delta(i, j) * delta(k, l)
                            + gamma * m[i] * m[j] * m[k] * m[l];
                        out[i][j] += c * e[k][l];
                    }
                }
            }
        }
        SymTensor2::new(out[0][0], out[1][1], out[0][1])
    }

    #[test]
    fn apply_e_isotropic_identity() {
        assert_eq!(iso11().apply_e(SymTensor2::IDENTITY), SymTensor2::diag(4.0, 4.0));
    }

    #[test]
    fn apply_e_fiber_along_x() {
        let op = ElasticOperator::new(1.0, 1.0, 1.0, Some([1.0, 0.0])).unwrap();
        assert_eq!(op.apply_e(SymTensor2::IDENTITY), SymTensor2::diag(5.0, 4.0));
    }

    #[test]
    fn apply_e_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(random_op(&mut rng).apply_e(SymTensor2::ZERO), SymTensor2::ZERO);
        }
    }

    #[test]
    fn apply_e_matches_index_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let op = random_op(&mut rng);
            let eps = random_tensor(&mut rng);
            let a = op.apply_e(eps);
            let b = brute_force_e(&op, eps);
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn seminorm_examples() {
        let op = iso11();
        assert_relative_eq!(op.energy_seminorm(SymTensor2::IDENTITY).unwrap(), 8.0_f64.sqrt(), max_relative = 1e-15);
        assert_eq!(op.energy_seminorm(SymTensor2::ZERO).unwrap(), 0.0);
        // pure shear: E[S] = 2μS, S:2μS = 2μ·2·1² = 4
        assert_relative_eq!(op.energy_seminorm(SymTensor2::new(0.0, 0.0, 1.0)).unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn compliance_examples() {
        let op = iso11();
        let eps = op.apply_k(SymTensor2::diag(4.0, 4.0));
        assert!((eps - SymTensor2::IDENTITY).norm() < 1e-15);
        assert_eq!(op.apply_k(SymTensor2::ZERO), SymTensor2::ZERO);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ElasticOperator::isotropic(0.0, 1.0).is_err());
        assert!(ElasticOperator::isotropic(1.0, 0.0).is_err());
        assert!(ElasticOperator::isotropic(1.0, f64::NAN).is_err());
        assert!(ElasticOperator::new(1.0, 1.0, -1.0, Some([1.0, 0.0])).is_err());
        assert!(ElasticOperator::new(1.0, 1.0, 1.0, Some([1.0, 0.1])).is_err());
    }

    #[test]
    fn operator_properties_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let op = random_op(&mut rng);
            let a = random_tensor(&mut rng);
            let b = random_tensor(&mut rng);

            let ab = a.inner(op.apply_e(b));
            let ba = b.inner(op.apply_e(a));
            assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()), "self-adjointness");

            if a != SymTensor2::ZERO {
                assert!(a.inner(op.apply_e(a)) > 0.0, "positive definiteness");
            }

            let (x, y) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let lhs = op.apply_e(x * a + y * b);
            let rhs = x * op.apply_e(a) + y * op.apply_e(b);
            assert!((lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()), "linearity");

            let ka = op.apply_k(op.apply_e(a));
            assert!((ka - a).norm() <= 1e-12 * a.norm());
            let ek = op.apply_e(op.apply_k(a));
            assert!((ek - a).norm() <= 1e-12 * a.norm());

            let s = op.energy_seminorm(a).unwrap();
            assert!((s * s - a.inner(op.apply_e(a))).abs() <= 1e-13 * (1.0 + s * s));
        }
    }
}
