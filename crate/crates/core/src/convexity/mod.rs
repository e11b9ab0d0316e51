//! Strict convexity of energy levels of magnetic Hamiltonians
//! `H(y, x) = ½|y + F(x)|² + V(x)`.
//!
//! The tangent Hessian of `H` on `H = level` is positive definite exactly when
//! `det U_W > 0`, with
//! `U_W = r²(cos θ ∇²f₁ + sin θ ∇²f₂) + r∇²V + r⁻¹∇V⊗∇V`, `r = |y + F|`.
//! The regularized μ = ½ problem is handled in [`copenhagen`], the polynomial
//! positivity suite in [`appendix_b`] and the μ ≠ ½ cubic expansion in
//! [`nonconvex`].

pub mod appendix_b;
pub mod copenhagen;
pub mod nonconvex;
#[cfg(test)]
mod tests;

pub use appendix_b::{
    appendix_b_suite, appendix_b_suite_seeded, appendix_b_suite_with, AppendixBReport, Check,
    IdentityCheck,
};
pub use copenhagen::{
    convexity_scan, copenhagen_model, helper_functions, CollarFit, ConvexityScan, Copenhagen,
    Helpers, ScanSpec,
};
pub use nonconvex::{cubic_coefficient, g1, g2, nonconvexity_certificate, saddle_model, CubicFit};

use crate::error::{Cr3bpError, Result};
use crate::regularization::{magnetic_field, Jet2, RegularizedHamiltonian};
use nalgebra::{Matrix2, Matrix3, Matrix4, Vector2, Vector4};

/// `F = (f₁, f₂)` and `V` with two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelJet {
    pub f: [Jet2; 2],
    pub v: Jet2,
}

pub trait MagneticModel: Sync {
    fn jet(&self, x: &Vector2<f64>) -> ModelJet;

    /// Value of `H` on the energy surface.
    fn level(&self) -> f64 {
        0.0
    }

    /// `f₁` depends on `x₂` only, `f₂` on `x₁` only and `V = W₁(x₁) + W₂(x₂)`.
    fn decoupled(&self) -> bool {
        false
    }
}

impl MagneticModel for RegularizedHamiltonian {
    fn jet(&self, x: &Vector2<f64>) -> ModelJet {
        let (f1, f2) = magnetic_field(x);
        ModelJet {
            f: [
                Jet2 {
                    value: f1[0],
                    grad: Vector2::new(0.0, f1[1]),
                    hess: Matrix2::new(0.0, 0.0, 0.0, f1[2]),
                },
                Jet2 {
                    value: f2[0],
                    grad: Vector2::new(f2[1], 0.0),
                    hess: Matrix2::new(f2[2], 0.0, 0.0, 0.0),
                },
            ],
            v: self.potential(x),
        }
    }

    fn decoupled(&self) -> bool {
        self.mu == 0.5
    }
}

/// Tolerance below which a negative `r²` is treated as boundary round-off.
const R2_SLACK: f64 = 1e-13;

/// `r = √(2(level − V))` together with the jet; fails outside the Hill region.
pub fn radius<M: MagneticModel + ?Sized>(model: &M, x: &Vector2<f64>) -> Result<(f64, ModelJet)> {
    let jet = model.jet(x);
    let r2 = 2.0 * (model.level() - jet.v.value);
    if r2 < -R2_SLACK {
        return Err(Cr3bpError::OutsideHillRegion {
            excess: jet.v.value - model.level(),
        });
    }
    Ok((r2.max(0.0).sqrt(), jet))
}

fn field_hessian(jet: &ModelJet, theta: f64) -> Matrix2<f64> {
    let (t, s) = theta.sin_cos();
    jet.f[0].hess * s + jet.f[1].hess * t
}

/// `U_W(θ, x)`; needs `r > 0`.
pub fn u_w_matrix<M: MagneticModel + ?Sized>(
    model: &M,
    theta: f64,
    x: &Vector2<f64>,
) -> Result<Matrix2<f64>> {
    let (r, jet) = radius(model, x)?;
    if r == 0.0 {
        return Err(Cr3bpError::Degenerate(
            "U_W is singular on the boundary of the Hill region; use det_u_w".into(),
        ));
    }
    let g = jet.v.grad;
    Ok(field_hessian(&jet, theta) * (r * r) + jet.v.hess * r + g * g.transpose() / r)
}

/// `V₂₂V₁² + V₁₁V₂² − 2V₁₂V₁V₂`, the limit of `det U_W` on `r = 0`.
pub fn boundary_det(v: &Jet2) -> f64 {
    let (g, m) = (v.grad, v.hess);
    m[(1, 1)] * g.x * g.x + m[(0, 0)] * g.y * g.y - 2.0 * m[(0, 1)] * g.x * g.y
}

/// `det U_W`, written as `r² det A + gᵀ adj(A) g` with `A = rΦ + ∇²V` so that
/// it stays regular at `r = 0`.
pub fn det_u_w<M: MagneticModel + ?Sized>(model: &M, theta: f64, x: &Vector2<f64>) -> Result<f64> {
    let (r, jet) = radius(model, x)?;
    Ok(det_from_jet(&jet, r, theta))
}

pub(crate) fn det_from_jet(jet: &ModelJet, r: f64, theta: f64) -> f64 {
    let a = field_hessian(jet, theta) * r + jet.v.hess;
    let g = jet.v.grad;
    let adj = a[(1, 1)] * g.x * g.x + a[(0, 0)] * g.y * g.y - 2.0 * a[(0, 1)] * g.x * g.y;
    r * r * a.determinant() + adj
}

/// `d V₁² + c V₂² + r² c d` with `c = r(s f₁,₁₁ + t f₂,₁₁) + V₁₁` and
/// `d = r(s f₁,₂₂ + t f₂,₂₂) + V₂₂`.
pub fn decoupled_det<M: MagneticModel + ?Sized>(
    model: &M,
    theta: f64,
    x: &Vector2<f64>,
) -> Result<f64> {
    if !model.decoupled() {
        return Err(Cr3bpError::Unsupported("model is not decoupled".into()));
    }
    let (r, jet) = radius(model, x)?;
    let phi = field_hessian(&jet, theta);
    let c = r * phi[(0, 0)] + jet.v.hess[(0, 0)];
    let d = r * phi[(1, 1)] + jet.v.hess[(1, 1)];
    let g = jet.v.grad;
    Ok(d * g.x * g.x + c * g.y * g.y + r * r * c * d)
}

/// The pieces of `C₀ = r⁴A₂ + r(r²A₁₃ + A₁₁) + A₀` and its split `C₀ = D₁ + D₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionTerms {
    pub a2: f64,
    pub a13: f64,
    pub a11: f64,
    pub a0: f64,
    pub c0: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn criterion_terms<M: MagneticModel + ?Sized>(
    model: &M,
    theta: f64,
    x: &Vector2<f64>,
) -> Result<CriterionTerms> {
    let (r, jet) = radius(model, x)?;
    if r == 0.0 {
        return Err(Cr3bpError::Degenerate("C₀ split needs r > 0".into()));
    }
    let (t, s) = theta.sin_cos();
    let (f1, f2) = (jet.f[0].hess, jet.f[1].hess);
    let vh = jet.v.hess;
    let (v1, v2) = (jet.v.grad.x, jet.v.grad.y);
    let (v11, v12, v22) = (vh[(0, 0)], vh[(0, 1)], vh[(1, 1)]);
    let det2 = |m: &Matrix2<f64>| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(0, 1)];
    let a2 = s * s * det2(&f1)
        + t * t * det2(&f2)
        + s * t
            * (f1[(0, 0)] * f2[(1, 1)] + f2[(0, 0)] * f1[(1, 1)] - 2.0 * f1[(0, 1)] * f2[(0, 1)]);
    let lin = |f: &Matrix2<f64>, a: f64, b: f64, c: f64| {
        f[(0, 0)] * a + f[(1, 1)] * b - 2.0 * f[(0, 1)] * c
    };
    let a13 = s * lin(&f1, v22, v11, v12) + t * lin(&f2, v22, v11, v12);
    let a11 = s * lin(&f1, v2 * v2, v1 * v1, v1 * v2) + t * lin(&f2, v2 * v2, v1 * v1, v1 * v2);
    let r2 = r * r;
    let a0 = r2 * (v11 * v22 - v12 * v12) + v22 * v1 * v1 + v11 * v2 * v2 - 2.0 * v12 * v1 * v2;
    let c0 = r2 * r2 * a2 + r * (r2 * a13 + a11) + a0;
    let mix = s * f1[(0, 1)] + t * f2[(0, 1)];
    let d1 = -(r2 * mix + (r2 * v12 + v1 * v2) / r).powi(2) + (v1 * v2 / r).powi(2);
    let p = r2 * (s * f1[(0, 0)] + t * f2[(0, 0)]) + (r2 * v11 + v1 * v1) / r;
    let q = r2 * (s * f1[(1, 1)] + t * f2[(1, 1)]) + (r2 * v22 + v2 * v2) / r;
    let d2 = p * q - (v1 * v2 / r).powi(2);
    Ok(CriterionTerms {
        a2,
        a13,
        a11,
        a0,
        c0,
        d1,
        d2,
    })
}

/// Below this `r` the `X` frame degenerates and the boundary frame is used.
const BOUNDARY_R: f64 = 1e-7;

/// Full Hessian of `H` at `(y, x)` in the order `(y₁, y₂, x₁, x₂)`.
pub fn hamiltonian_hessian(jet: &ModelJet, y_f: &Vector2<f64>) -> Matrix4<f64> {
    let mut h = Matrix4::zeros();
    h[(0, 0)] = 1.0;
    h[(1, 1)] = 1.0;
    for i in 0..2 {
        for j in 0..2 {
            // ∂²H/∂yᵢ∂xⱼ = ∂ⱼfᵢ
            h[(i, 2 + j)] = jet.f[i].grad[j];
            h[(2 + j, i)] = jet.f[i].grad[j];
        }
    }
    let mut m = jet.v.hess;
    for i in 0..2 {
        m += jet.f[i].grad * jet.f[i].grad.transpose() + jet.f[i].hess * y_f[i];
    }
    h.fixed_view_mut::<2, 2>(2, 2).copy_from(&m);
    h
}

/// `det W / |y_F|⁴` for the tangent Hessian `W` written in the frame
/// `X₁ = (−H_{y₂}, H_{y₁}, 0, 0)`, `X₂ = (−H_{x₁}, −H_{x₂}, H_{y₁}, H_{y₂})`,
/// `X₃ = (H_{x₂}, −H_{x₁}, H_{y₂}, −H_{y₁})`. Close to `r = 0` the frame
/// `e₁, e₂, (0, 0, V₂, −V₁)` is used and `det W_b` returned.
pub fn tangent_hessian_det<M: MagneticModel + ?Sized>(
    model: &M,
    theta: f64,
    x: &Vector2<f64>,
) -> Result<f64> {
    let (r, jet) = radius(model, x)?;
    let (t, s) = theta.sin_cos();
    let y_f = Vector2::new(r * s, r * t);
    let hess = hamiltonian_hessian(&jet, &y_f);
    let boundary = r < BOUNDARY_R;
    let frame: [Vector4<f64>; 3] = if !boundary {
        let gx = Vector2::new(
            y_f.dot(&Vector2::new(jet.f[0].grad.x, jet.f[1].grad.x)),
            y_f.dot(&Vector2::new(jet.f[0].grad.y, jet.f[1].grad.y)),
        ) + jet.v.grad;
        let gy = y_f;
        [
            Vector4::new(-gy.y, gy.x, 0.0, 0.0),
            Vector4::new(-gx.x, -gx.y, gy.x, gy.y),
            Vector4::new(gx.y, -gx.x, gy.y, -gy.x),
        ]
    } else {
        let g = jet.v.grad;
        [
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, 1.0, 0.0, 0.0),
            Vector4::new(0.0, 0.0, g.y, -g.x),
        ]
    };
    let w = Matrix3::from_fn(|i, j| frame[i].dot(&(hess * frame[j])));
    let scale = if boundary { 1.0 } else { r.powi(4) };
    Ok(w.determinant() / scale)
}
