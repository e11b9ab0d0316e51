//! Elliptic-hyperbolic regularization of both collisions at once.
//!
//! With the primaries at `±½` (earth at `-½`), the chart
//! `q₁ + i q₂ = ½ cosh(x₁ + i x₂)` lifts to a symplectic map
//! `(y, x) ↦ (p, q)` and the regularized Hamiltonian
//! `Ĥ = ¼(cosh²x₁ − cos²x₂)(H̄ − h)` is smooth everywhere.

use crate::dynamics::{Frame, MassRatio, RotatingState, COLLISION_GUARD};
use crate::error::{Cr3bpError, Result};
use crate::flow::{HamiltonianSystem, OdeSystem};
use crate::linalg::j4;
use nalgebra::{Complex, Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedState {
    pub y: Vector2<f64>,
    /// `x₂` is kept in `[0, 2π)`.
    pub x: Vector2<f64>,
}

impl RegularizedState {
    pub fn new(y: [f64; 2], x: [f64; 2]) -> Self {
        Self {
            y: Vector2::new(y[0], y[1]),
            x: Vector2::new(x[0], x[1].rem_euclid(TAU)),
        }
    }

    pub fn to_vec(&self) -> Vector4<f64> {
        Vector4::new(self.y.x, self.y.y, self.x.x, self.x.y)
    }

    pub fn from_vec(z: &Vector4<f64>) -> Self {
        Self::new([z[0], z[1]], [z[2], z[3]])
    }

    /// Representative under `(y, x) ~ -(y, x)` with `x₁ ≥ 0`.
    pub fn canonical(&self) -> Self {
        if self.x.x < 0.0 {
            Self::new([-self.y.x, -self.y.y], [-self.x.x, -self.x.y])
        } else {
            *self
        }
    }
}

/// `¼(cosh²x₁ − cos²x₂)`, the time change `dt/dσ`.
pub fn flow_correspondence_factor(x: &Vector2<f64>) -> f64 {
    0.25 * (x.x.cosh().powi(2) - x.y.cos().powi(2))
}

/// `Dφ` of `x ↦ q` as `½ M`.
fn chart_m(x: &Vector2<f64>) -> Matrix2<f64> {
    let (sh, ch) = (x.x.sinh(), x.x.cosh());
    let (s, c) = x.y.sin_cos();
    Matrix2::new(sh * c, -ch * s, ch * s, sh * c)
}

pub fn position(x: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(0.5 * x.x.cosh() * x.y.cos(), 0.5 * x.x.sinh() * x.y.sin())
}

/// `(y, x) ↦ (p, q)` with primaries at `±½`.
pub fn from_regularized(rs: &RegularizedState) -> Result<RotatingState> {
    let d = 4.0 * flow_correspondence_factor(&rs.x);
    if d < COLLISION_GUARD {
        return Err(Cr3bpError::Collision {
            dist: d,
            primary: [0.5 * rs.x.y.cos().signum(), 0.0],
        });
    }
    let p = chart_m(&rs.x) * rs.y * (2.0 / d);
    Ok(RotatingState {
        p,
        q: position(&rs.x),
    })
}

/// `(p, q) ↦ (y, x)` with primaries at `±½`; returns the `x₁ ≥ 0` representative.
pub fn to_regularized(s: &RotatingState) -> Result<RegularizedState> {
    for f in [0.5, -0.5] {
        let dist = (s.q - Vector2::new(f, 0.0)).norm();
        if dist < COLLISION_GUARD {
            return Err(Cr3bpError::Collision {
                dist,
                primary: [f, 0.0],
            });
        }
    }
    let w = Complex::new(2.0 * s.q.x, 2.0 * s.q.y).acosh();
    let mut x = Vector2::new(w.re, w.im);
    if x.x < 0.0 {
        x = -x;
    }
    let y = chart_m(&x).transpose() * s.p * 0.5;
    Ok(RegularizedState::new([y.x, y.y], [x.x, x.y]))
}

/// Same as [`to_regularized`] for a state in an arbitrary frame.
pub fn to_regularized_from(
    mu: &MassRatio,
    s: &RotatingState,
    frame: Frame,
) -> Result<RegularizedState> {
    let std = crate::dynamics::from_frame(mu, s, frame);
    to_regularized(&crate::dynamics::to_frame(mu, &std, Frame::Symmetric))
}

pub fn from_regularized_to(
    mu: &MassRatio,
    rs: &RegularizedState,
    frame: Frame,
) -> Result<RotatingState> {
    let sym = from_regularized(rs)?;
    let std = crate::dynamics::from_frame(mu, &sym, Frame::Symmetric);
    Ok(crate::dynamics::to_frame(mu, &std, frame))
}

/// `W₁, W₂` and their first two derivatives for the decoupled μ = ½ potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopenhagenSplit {
    pub w1: [f64; 3],
    pub w2: [f64; 3],
}

pub fn copenhagen_split(h: f64, x: &Vector2<f64>) -> CopenhagenSplit {
    let x1 = x.x;
    let x2 = x.y;
    let (c1, c2) = (x1.cosh(), x2.cos());
    let w1 = [
        -h * c1 * c1 / 4.0 - c1 / 2.0 - (2.0 * x1).sinh().powi(2) / 128.0,
        -h * (2.0 * x1).sinh() / 4.0 - x1.sinh() / 2.0 - (4.0 * x1).sinh() / 64.0,
        -h * (2.0 * x1).cosh() / 2.0 - c1 / 2.0 - (4.0 * x1).cosh() / 16.0,
    ];
    let w2 = [
        h * c2 * c2 / 4.0 - (2.0 * x2).sin().powi(2) / 128.0,
        -h * (2.0 * x2).sin() / 4.0 - (4.0 * x2).sin() / 64.0,
        -h * (2.0 * x2).cos() / 2.0 - (4.0 * x2).cos() / 16.0,
    ];
    CopenhagenSplit { w1, w2 }
}

/// Value, gradient and Hessian of a scalar function of `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vector2<f64>,
    pub hess: Matrix2<f64>,
}

/// `V̂ = cos x₂/2 − (1/16)(½ − μ + cosh x₁ cos x₂)(cosh²x₁ − cos²x₂)`.
pub fn vhat(mu: f64, x: &Vector2<f64>) -> Jet2 {
    let (sh, ch) = (x.x.sinh(), x.x.cosh());
    let (s, c) = x.y.sin_cos();
    let k = 0.5 - mu;
    let p = k + ch * c;
    let q = ch * ch - c * c;
    let (p1, p2) = (sh * c, -ch * s);
    let (q1, q2) = (2.0 * ch * sh, 2.0 * c * s);
    let (p11, p22, p12) = (ch * c, -ch * c, -sh * s);
    let (q11, q22) = (2.0 * (ch * ch + sh * sh), 2.0 * (c * c - s * s));
    let value = c / 2.0 - p * q / 16.0;
    let grad = Vector2::new(
        -(p1 * q + p * q1) / 16.0,
        -s / 2.0 - (p2 * q + p * q2) / 16.0,
    );
    let h11 = -(p11 * q + 2.0 * p1 * q1 + p * q11) / 16.0;
    let h22 = -c / 2.0 - (p22 * q + 2.0 * p2 * q2 + p * q22) / 16.0;
    let h12 = -(p12 * q + p1 * q2 + p2 * q1) / 16.0;
    Jet2 {
        value,
        grad,
        hess: Matrix2::new(h11, h12, h12, h22),
    }
}

/// Magnetic potential `F = (sin 2x₂ / 8, sinh 2x₁ / 8)`: values and first two derivatives
/// `([f₁, f₁', f₁''], [f₂, f₂', f₂''])`, `f₁` in `x₂`, `f₂` in `x₁`.
pub fn magnetic_field(x: &Vector2<f64>) -> ([f64; 3], [f64; 3]) {
    let (s2, c2) = (2.0 * x.y).sin_cos();
    let (sh, ch) = ((2.0 * x.x).sinh(), (2.0 * x.x).cosh());
    (
        [s2 / 8.0, c2 / 4.0, -s2 / 2.0],
        [sh / 8.0, ch / 4.0, sh / 2.0],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedHamiltonian {
    pub mu: f64,
    pub h: f64,
}

impl RegularizedHamiltonian {
    pub fn new(mu: f64, h: f64) -> Self {
        Self { mu, h }
    }

    /// Total potential `V + (1 − 2μ)V̂`.
    pub fn potential(&self, x: &Vector2<f64>) -> Jet2 {
        let sp = copenhagen_split(self.h, x);
        let mut jet = Jet2 {
            value: sp.w1[0] + sp.w2[0],
            grad: Vector2::new(sp.w1[1], sp.w2[1]),
            hess: Matrix2::new(sp.w1[2], 0.0, 0.0, sp.w2[2]),
        };
        let w = 1.0 - 2.0 * self.mu;
        if w != 0.0 {
            let vh = vhat(self.mu, x);
            jet.value += w * vh.value;
            jet.grad += vh.grad * w;
            jet.hess += vh.hess * w;
        }
        jet
    }

    pub fn value(&self, rs: &RegularizedState) -> f64 {
        self.energy(&rs.to_vec()).expect("Ĥ is globally defined")
    }

    /// Defining product form `¼(cosh²x₁ − cos²x₂)(H̄ − h)`; fails on collisions.
    pub fn product_form(&self, rs: &RegularizedState) -> Result<f64> {
        let s = from_regularized(rs)?;
        let m = MassRatio::new(self.mu)?;
        let std = crate::dynamics::from_frame(&m, &s, Frame::Symmetric);
        let hbar = crate::dynamics::hamiltonian(&m, &std)?;
        Ok(flow_correspondence_factor(&rs.x) * (hbar - self.h))
    }
}

impl HamiltonianSystem for RegularizedHamiltonian {
    fn energy(&self, z: &Vector4<f64>) -> Result<f64> {
        let x = Vector2::new(z[2], z[3]);
        let (f1, f2) = magnetic_field(&x);
        let v = self.potential(&x);
        Ok(0.5 * ((z[0] + f1[0]).powi(2) + (z[1] + f2[0]).powi(2)) + v.value)
    }

    fn gradient(&self, z: &Vector4<f64>) -> Result<Vector4<f64>> {
        let x = Vector2::new(z[2], z[3]);
        let (f1, f2) = magnetic_field(&x);
        let v = self.potential(&x);
        let u1 = z[0] + f1[0];
        let u2 = z[1] + f2[0];
        Ok(Vector4::new(
            u1,
            u2,
            u2 * f2[1] + v.grad.x,
            u1 * f1[1] + v.grad.y,
        ))
    }

    fn hessian(&self, z: &Vector4<f64>) -> Result<Matrix4<f64>> {
        let x = Vector2::new(z[2], z[3]);
        let (f1, f2) = magnetic_field(&x);
        let v = self.potential(&x);
        let u1 = z[0] + f1[0];
        let u2 = z[1] + f2[0];
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 1.0;
        m[(0, 3)] = f1[1];
        m[(3, 0)] = f1[1];
        m[(1, 2)] = f2[1];
        m[(2, 1)] = f2[1];
        m[(2, 2)] = f2[1] * f2[1] + u2 * f2[2] + v.hess[(0, 0)];
        m[(3, 3)] = f1[1] * f1[1] + u1 * f1[2] + v.hess[(1, 1)];
        m[(2, 3)] = v.hess[(0, 1)];
        m[(3, 2)] = v.hess[(1, 0)];
        Ok(m)
    }
}

/// Regularized flow with physical time appended: `y[4] = t`, `dt/dσ = ¼(cosh²x₁ − cos²x₂)`.
/// With `variational`, `ψ` occupies `y[5..21]`.
pub struct TimedRegularizedFlow<'a> {
    pub ham: &'a RegularizedHamiltonian,
    pub variational: bool,
}

impl OdeSystem for TimedRegularizedFlow<'_> {
    fn dim(&self) -> usize {
        if self.variational {
            21
        } else {
            5
        }
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let z = Vector4::from_column_slice(&y[..4]);
        let f = self.ham.field(&z)?;
        dy[..4].copy_from_slice(f.as_slice());
        dy[4] = flow_correspondence_factor(&Vector2::new(z[2], z[3]));
        if self.variational {
            let psi = Matrix4::from_column_slice(&y[5..21]);
            let d = j4() * self.ham.hessian(&z)? * psi;
            dy[5..21].copy_from_slice(d.as_slice());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{Direction, EventSpec, Integrator, StateFlow};
    use crate::linalg::symplectic_defect4;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chart_basics() {
        let q = position(&Vector2::new(0.0, 0.0));
        assert!((q - Vector2::new(0.5, 0.0)).norm() < 1e-15);
        assert!(from_regularized(&RegularizedState::new([0.1, 0.2], [0.0, 0.0])).is_err());
        assert_eq!(flow_correspondence_factor(&Vector2::new(0.0, 0.0)), 0.0);
        let f = flow_correspondence_factor(&Vector2::new(1.0, std::f64::consts::FRAC_PI_2));
        assert!((f - 0.25 * 1f64.cosh().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let rs = RegularizedState::new(
                [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                [rng.gen_range(0.05..2.0), rng.gen_range(0.0..TAU)],
            );
            let back = to_regularized(&from_regularized(&rs).unwrap()).unwrap();
            let mut d = (back.to_vec() - rs.to_vec()).abs();
            d[3] = d[3].min(TAU - d[3]);
            assert!(d.amax() < 1e-11, "{rs:?} {back:?}");
        }
    }

    #[test]
    fn chart_is_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let z = Vector4::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.1..1.5),
                rng.gen_range(0.2..3.0),
            );
            let map = |z: &Vector4<f64>| {
                from_regularized(&RegularizedState::from_vec(z))
                    .unwrap()
                    .to_vec()
            };
            let h = 1e-6;
            let jac = Matrix4::from_fn(|i, j| {
                let mut zp: Vector4<f64> = z;
                let mut zm: Vector4<f64> = z;
                zp[j] += h;
                zm[j] -= h;
                (map(&zp)[i] - map(&zm)[i]) / (2.0 * h)
            });
            assert!(symplectic_defect4(&jac) < 1e-9);
        }
    }

    #[test]
    fn closed_form_matches_product_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let mu = rng.gen_range(0.05..0.95);
            let h = rng.gen_range(-3.0..-1.0);
            let rs = RegularizedState::new(
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                [rng.gen_range(0.05..1.5), rng.gen_range(0.0..TAU)],
            );
            let ham = RegularizedHamiltonian::new(mu, h);
            let a = ham.value(&rs);
            let b = ham.product_form(&rs).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{a} {b}");
        }
    }

    #[test]
    fn copenhagen_potential_landmarks() {
        for h in [-2.0, -2.5, -3.1] {
            let ham = RegularizedHamiltonian::new(0.5, h);
            for x in [
                Vector2::new(0.0, 0.0),
                Vector2::new(0.0, std::f64::consts::PI),
            ] {
                let v = ham.potential(&x);
                assert!((v.value + 0.5).abs() < 1e-15);
                assert!(v.grad.norm() < 1e-15);
                assert!(v.hess[(0, 0)] > 0.0 && v.hess[(1, 1)] > 0.0);
            }
            for x2 in [std::f64::consts::FRAC_PI_2, -std::f64::consts::FRAC_PI_2] {
                let v = ham.potential(&Vector2::new(0.0, x2));
                assert!((v.value - (-h / 4.0 - 0.5)).abs() < 1e-14);
                assert!(v.grad.norm() < 1e-14);
                assert!(v.hess[(0, 0)] * v.hess[(1, 1)] < 0.0);
            }
        }
    }

    #[test]
    fn potential_in_s_coordinates() {
        // s₁ = cosh x₁, s₂ = cos x₂
        let v = |s1: f64, s2: f64| {
            let ham = RegularizedHamiltonian::new(0.5, -2.0);
            ham.potential(&Vector2::new(s1.acosh(), s2.acos())).value
        };
        assert!((v(1.9, 1.0) - 19379.0 / 320000.0).abs() < 1e-14);
        assert!((v(1.6, 0.82) - 0.012116305).abs() < 1e-8);
    }

    #[test]
    fn split_matches_potential_derivatives() {
        let h = -2.3;
        let ham = RegularizedHamiltonian::new(0.3, h);
        let x = Vector2::new(0.4, 1.3);
        let d = 1e-5;
        let j = ham.potential(&x);
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += d;
            xm[k] -= d;
            let g = (ham.potential(&xp).value - ham.potential(&xm).value) / (2.0 * d);
            assert!((g - j.grad[k]).abs() < 1e-8);
            let hk = (ham.potential(&xp).grad - ham.potential(&xm).grad) / (2.0 * d);
            assert!((hk - j.hess.column(k)).amax() < 1e-8);
        }
        let sp = copenhagen_split(h, &x);
        let half = RegularizedHamiltonian::new(0.5, h).potential(&x);
        assert!((sp.w1[0] + sp.w2[0] - half.value).abs() < 1e-13);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let ham = RegularizedHamiltonian::new(0.3, -1.8);
        let z = Vector4::new(0.2, -0.3, 0.6, 2.2);
        let g = ham.gradient(&z).unwrap();
        let hs = ham.hessian(&z).unwrap();
        let d = 1e-5;
        for k in 0..4 {
            let mut zp = z;
            let mut zm = z;
            zp[k] += d;
            zm[k] -= d;
            let fd = (ham.energy(&zp).unwrap() - ham.energy(&zm).unwrap()) / (2.0 * d);
            assert!((fd - g[k]).abs() < 1e-8);
            let fh = (ham.gradient(&zp).unwrap() - ham.gradient(&zm).unwrap()) / (2.0 * d);
            assert!((fh - hs.column(k)).amax() < 1e-7);
        }
        let yy = hs.fixed_view::<2, 2>(0, 0);
        assert_eq!(yy, Matrix2::identity());
    }

    #[test]
    fn factor_positive_in_hill_region() {
        let m = MassRatio::new(0.5).unwrap();
        for i in 0..60 {
            for j in 0..60 {
                let x = Vector2::new(0.01 + 2.0 * i as f64 / 60.0, TAU * j as f64 / 60.0);
                let q = position(&x);
                let std = crate::dynamics::from_frame(
                    &m,
                    &RotatingState {
                        p: Vector2::zeros(),
                        q,
                    },
                    Frame::Symmetric,
                );
                if let Ok((true, _)) = crate::dynamics::hill_region_contains(&m, -2.0, &std.q) {
                    assert!(flow_correspondence_factor(&x) > 0.0);
                }
            }
        }
    }

    /// Regularized arcs reproduce Cartesian arcs after the time change.
    pub(crate) fn correspondence_error(mu: f64, s0: &RotatingState, t_end: f64) -> f64 {
        let m = MassRatio::new(mu).unwrap();
        let std0 = crate::dynamics::from_frame(&m, s0, Frame::Symmetric);
        let h = crate::dynamics::hamiltonian(&m, &std0).unwrap();
        let cart = crate::dynamics::Cr3bp::in_frame(m, Frame::Symmetric);
        let integ = Integrator::with_tol(1e-13, 1e-15).dense();
        let csol = integ
            .integrate(&StateFlow(&cart), 0.0, s0.to_vec().as_slice(), t_end, &[])
            .ok()
            .unwrap();
        let ham = RegularizedHamiltonian::new(mu, h);
        let rs0 = to_regularized(s0).unwrap();
        let mut y0 = rs0.to_vec().as_slice().to_vec();
        y0.push(0.0);
        let flow = TimedRegularizedFlow {
            ham: &ham,
            variational: false,
        };
        let ev = [EventSpec::new(
            move |_s, y: &[f64]| y[4] - t_end,
            Direction::Increasing,
            true,
        )];
        let rsol = Integrator::with_tol(1e-13, 1e-15).integrate(&flow, 0.0, &y0, 1e3, &ev);
        let mut worst: f64 = 0.0;
        for y in &rsol.y {
            let rs = RegularizedState::from_vec(&Vector4::from_column_slice(&y[..4]));
            let z = from_regularized(&rs).unwrap().to_vec();
            let zc = Vector4::from_column_slice(&csol.interpolate(y[4]).unwrap()[..4]);
            worst = worst.max((z - zc).amax());
        }
        worst
    }

    #[test]
    fn trajectory_correspondence() {
        let s0 = RotatingState::new([0.1, 0.9], [0.1, 0.3]);
        assert!(correspondence_error(0.4, &s0, 1.0) < 1e-6);
    }

    proptest! {
        #[test]
        fn antipodal_symmetry(mu in 0.05f64..0.95, h in -3.0f64..-1.0,
                              y1 in -2.0f64..2.0, y2 in -2.0f64..2.0,
                              x1 in -2.0f64..2.0, x2 in 0.0f64..TAU) {
            let ham = RegularizedHamiltonian::new(mu, h);
            let a = ham.energy(&Vector4::new(y1, y2, x1, x2)).unwrap();
            let b = ham.energy(&Vector4::new(-y1, -y2, -x1, -x2)).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
