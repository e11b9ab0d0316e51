//! For μ ≠ ½ the determinant changes sign across the saddle on `x₁ = 0`:
//! `det U_W(θ, 0, x* + x̂) = G₁(r₁) G₂(r₁, cos θ) x̂³ + O(x̂⁴)` with
//! `x* = arccos(1 − 2r₁)`.

use super::det_u_w;
use crate::dynamics::{lagrange_values, mu_of_r1, MassRatio};
use crate::error::{invalid, Result};
use crate::regularization::RegularizedHamiltonian;
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

fn p(r1: f64) -> f64 {
    (1.0 - r1).powi(2) + (2.0 - r1) * r1.powi(3)
}

fn q(r1: f64) -> f64 {
    (3.0 - r1).powi(2) + 4.0 * r1 * r1 + (2.0 - r1) * r1.powi(3)
}

pub fn g1(r1: f64) -> f64 {
    let w = ((1.0 - r1) * r1).powf(5.5);
    w * (1.0 - 2.0 * r1) * (3.0 - 3.0 * r1 + r1 * r1) * (1.0 + r1 + r1 * r1) * q(r1)
        / (2.0 * p(r1).powi(3))
}

/// `G₂(r₁, s) = 4√(P Q) s − (15 − 14r₁ + 11r₁² + 6r₁³ − 3r₁⁴)`.
pub fn g2(r1: f64, s: f64) -> f64 {
    4.0 * (p(r1) * q(r1)).sqrt() * s - g2_constant(r1)
}

pub(crate) fn g2_constant(r1: f64) -> f64 {
    15.0 - 14.0 * r1 + 11.0 * r1 * r1 + 6.0 * r1.powi(3) - 3.0 * r1.powi(4)
}

/// `(15 − …)² − 16 P Q`, positive on `(0, 1)`, which forces `G₂ < 0`.
pub fn g2_gap(r1: f64) -> f64 {
    g2_constant(r1).powi(2) - 16.0 * p(r1) * q(r1)
}

/// `(G₁(r₁), G₂(r₁, s))`.
pub fn nonconvexity_certificate(r1: f64, s: f64) -> Result<(f64, f64)> {
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(invalid("r1", r1, "r1 must lie in (0, 1)"));
    }
    if !(-1.0..=1.0).contains(&s) {
        return Err(invalid("s", s, "s = cos θ must lie in [-1, 1]"));
    }
    Ok((g1(r1), g2(r1, s)))
}

/// Regularized Hamiltonian at `μ(r₁)` and level `L₁`, with `x* = arccos(1 − 2r₁)`.
pub fn saddle_model(r1: f64) -> Result<(RegularizedHamiltonian, f64)> {
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(invalid("r1", r1, "r1 must lie in (0, 1)"));
    }
    let mu = MassRatio::new(mu_of_r1(r1))?;
    let l1 = lagrange_values(&mu).l1();
    Ok((
        RegularizedHamiltonian::new(mu.mu(), l1),
        (1.0 - 2.0 * r1).acos(),
    ))
}

/// One-sided estimates of the cubic coefficient of `x̂ ↦ det U_W(θ, 0, x* + x̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicFit {
    pub r1: f64,
    pub theta: f64,
    pub step: f64,
    pub left: f64,
    pub right: f64,
    /// `G₁ G₂(r₁, cos θ)`, the coefficient for `x̂ < 0`.
    pub predicted_left: f64,
    /// `G₁ G₂(r₁, −cos θ)`: `r ∼ |x̂|`, so the terms odd in `r` flip sign.
    pub predicted_right: f64,
}

impl CubicFit {
    pub fn max_relative_error(&self) -> f64 {
        let e = |v: f64, p: f64| ((v - p) / p).abs();
        e(self.left, self.predicted_left).max(e(self.right, self.predicted_right))
    }
}

/// `det/x̂³` at `±step` and `±2·step`, combined by Richardson extrapolation to
/// cancel the `O(x̂)` correction on each side.
pub fn cubic_coefficient(r1: f64, theta: f64, step: f64) -> Result<CubicFit> {
    let (model, xs) = saddle_model(r1)?;
    let ratio = |dx: f64| -> Result<f64> {
        Ok(det_u_w(&model, theta, &Vector2::new(0.0, xs + dx))? / dx.powi(3))
    };
    let right = 2.0 * ratio(step)? - ratio(2.0 * step)?;
    let left = 2.0 * ratio(-step)? - ratio(-2.0 * step)?;
    Ok(CubicFit {
        r1,
        theta,
        step,
        left,
        right,
        predicted_left: g1(r1) * g2(r1, theta.cos()),
        predicted_right: g1(r1) * g2(r1, -theta.cos()),
    })
}
