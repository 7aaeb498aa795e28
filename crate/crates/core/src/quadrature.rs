//! Gauss–Legendre rules: 1D nodes/weights, tensor-product rules on the
//! reference square, and an adaptive 1D integrator.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product rule on the reference square [-1, 1]².
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `order × order` Gauss points. Points are ordered with ξ varying fastest.
    pub fn gauss(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for j in 0..order {
            for i in 0..order {
                points.push([x[i], x[j]]);
                weights.push(w[i] * w[j]);
            }
        }
        QuadratureRule { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::gauss(2)
    }
}

const ADAPTIVE_POINTS: usize = 10;
const MAX_DEPTH: usize = 60;
const ROUNDING_FACTOR: f64 = 64.0;
const MAX_PANELS: usize = 200_000;

/// Adaptive Gauss–Legendre integration of `f` over `[a, b]`.
///
/// Each panel is accepted when its 10-point value agrees with the sum over
/// its two halves to within the panel's share of `rel_tol · |I|`, or when
/// the disagreement is at the rounding level of the panel sums.
/// Integrands singular near an endpoint are best rewritten in the distance
/// to that endpoint.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (x, w) = gauss_legendre(ADAPTIVE_POINTS);
    // (value, sum of |terms|) on one panel
    let panel = |lo: f64, hi: f64| {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        x.iter().zip(&w).fold((0.0, 0.0), |(v, m), (xi, wi)| {
            let term = half * wi * f(mid + half * xi);
            (v + term, m + term.abs())
        })
    };
    let (whole, _) = panel(a, b);
    let abs_tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);

    let mut total = 0.0;
    let mut panels = 0usize;
    let mut stack = vec![(a, b, whole, 0usize)];
    while let Some((lo, hi, value, depth)) = stack.pop() {
        panels += 1;
        let mid = 0.5 * (lo + hi);
        let (left, left_mag) = panel(lo, mid);
        let (right, right_mag) = panel(mid, hi);
        let refined = left + right;
        let diff = (refined - value).abs();
        let share = abs_tol * (hi - lo) / (b - a);
        let noise = ROUNDING_FACTOR * f64::EPSILON * (left_mag + right_mag);
        // panels at the spacing of representable abscissae cannot be refined further
        let unresolvable = hi - lo <= ROUNDING_FACTOR * f64::EPSILON * lo.abs().max(hi.abs());
        if diff <= share.max(noise) || unresolvable {
            total += refined;
        } else if depth >= MAX_DEPTH || panels >= MAX_PANELS || !refined.is_finite() {
            return Err(Error::Internal(format!("adaptive quadrature did not converge on [{lo:e}, {hi:e}]")));
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}
