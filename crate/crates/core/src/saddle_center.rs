//! Linear package at the saddle-center `l₁`: eigenvalues, symplectic basis,
//! quadratic model, Lyapunov orbits, the Liouville field `Y₂` and the shield
//! profile ODE.

use crate::dynamics::{hamiltonian_hessian, lagrange_values, Frame, MassRatio};
use crate::error::{invalid, Cr3bpError, Result};
use crate::flow::{Direction, EventSpec, HamiltonianSystem, Integrator, OdeSystem, Status};
use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn a_of_r1(r1: f64) -> f64 {
    let r2 = r1 * r1;
    (2.0 - r1 + r2) / (1.0 - 2.0 * r1 + r2 + 2.0 * r2 * r1 - r2 * r2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleCenterData {
    pub mu: f64,
    pub r1: f64,
    pub a: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Columns `V₁..V₄`; `(p̂, q̂)ᵀ = V xᵀ`.
    pub v: Matrix4<f64>,
    /// `l₁` as `(p1, p2, q1, q2)`.
    pub l1: Vector4<f64>,
    pub l1_value: f64,
}

impl SaddleCenterData {
    pub fn new(mu: &MassRatio) -> Self {
        let r1 = mu.r1();
        let a = a_of_r1(r1);
        let s = (a * (9.0 * a - 4.0)).sqrt();
        let lambda1 = (a - 1.0 + s).sqrt();
        let lambda2 = (1.0 - a + s).sqrt();
        let c0 = 2f64.sqrt() * (a * (9.0 * a - 4.0)).powf(0.25);
        let c1 = (2.0 + 3.0 * a - s).sqrt();
        let c2 = (2.0 + 3.0 * a + s).sqrt();
        let (sl1, sl2) = (lambda1.sqrt(), lambda2.sqrt());
        #[rustfmt::skip]
        let v = Matrix4::new(
            (c2 * c2 + 2.0 * a - 2.0) / (sl1 * c1 * c0), 0.0, 0.0, (c1 * c1 + 2.0 * a - 2.0) / (sl2 * c2 * c0),
            0.0, sl2 * (c2 * c2 - 2.0) / (c2 * c0), sl1 * (c1 * c1 - 2.0) / (c1 * c0), 0.0,
            0.0, 2.0 * sl2 / (c2 * c0), 2.0 * sl1 / (c1 * c0), 0.0,
            c1 / (sl1 * c0), 0.0, 0.0, c2 / (sl2 * c0),
        );
        let ld = lagrange_values(mu);
        let l1 = Vector4::from_row_slice(&ld.points[0]);
        Self {
            mu: mu.mu(),
            r1,
            a,
            lambda1,
            lambda2,
            c0,
            c1,
            c2,
            v,
            l1,
            l1_value: ld.values[0],
        }
    }

    pub fn mass_ratio(&self) -> MassRatio {
        MassRatio::new(self.mu).expect("stored mass ratio is valid")
    }

    /// `∇²H(l₁)` assembled from the potential's analytic Hessian.
    pub fn hessian_at_l1(&self) -> Matrix4<f64> {
        hamiltonian_hessian(&self.mass_ratio(), &self.l1, Frame::Standard)
            .expect("l1 is not a collision")
    }

    /// `∇²H(l₁)` from the closed form `diag(-4a, 2a)` block.
    pub fn hessian_closed_form(&self) -> Matrix4<f64> {
        let mut h = Matrix4::zeros();
        h[(0, 0)] = 1.0;
        h[(1, 1)] = 1.0;
        h[(0, 3)] = -1.0;
        h[(3, 0)] = -1.0;
        h[(1, 2)] = 1.0;
        h[(2, 1)] = 1.0;
        h[(2, 2)] = -4.0 * self.a;
        h[(3, 3)] = 2.0 * self.a;
        h
    }

    pub fn v_inverse(&self) -> Matrix4<f64> {
        // V is symplectic, so V⁻¹ = -J Vᵀ J
        let j = crate::linalg::j4();
        -(j * self.v.transpose() * j)
    }

    pub fn to_x(&self, phat: &Vector4<f64>) -> Vector4<f64> {
        self.v_inverse() * phat
    }

    pub fn from_x(&self, x: &Vector4<f64>) -> Vector4<f64> {
        self.v * x
    }

    /// `(p, q) = ε^{1/2} V x + l₁`.
    pub fn rescaled_to_phase(&self, eps: f64, x: &Vector4<f64>) -> Vector4<f64> {
        self.v * x * eps.sqrt() + self.l1
    }

    pub fn phase_to_rescaled(&self, eps: f64, z: &Vector4<f64>) -> Vector4<f64> {
        self.v_inverse() * (z - self.l1) / eps.sqrt()
    }

    pub fn h2(&self, x: &Vector4<f64>) -> f64 {
        0.5 * self.lambda1 * (x[0] * x[0] - x[2] * x[2])
            + 0.5 * self.lambda2 * (x[1] * x[1] + x[3] * x[3])
    }

    /// Closed-form flow of `H₂`.
    pub fn linear_flow(&self, x0: &Vector4<f64>, t: f64) -> Vector4<f64> {
        let (ch, sh) = ((self.lambda1 * t).cosh(), (self.lambda1 * t).sinh());
        let (s, c) = (self.lambda2 * t).sin_cos();
        Vector4::new(
            x0[0] * ch + x0[2] * sh,
            x0[1] * c - x0[3] * s,
            x0[2] * ch + x0[0] * sh,
            x0[3] * c + x0[1] * s,
        )
    }

    /// Linearized flow matrix of `H₂` in `x` coordinates.
    pub fn linear_flow_matrix(&self, t: f64) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| {
            let mut e = Vector4::zeros();
            e[j] = 1.0;
            self.linear_flow(&e, t)[i]
        })
    }

    pub fn linear_lyapunov(&self, c0: f64, t: f64) -> Result<Vector4<f64>> {
        if c0 <= 0.0 {
            return Err(invalid("c0", c0, "energy of the H2 level must be positive"));
        }
        let r = (2.0 * c0 / self.lambda2).sqrt();
        let (s, c) = (self.lambda2 * t).sin_cos();
        Ok(Vector4::new(0.0, r * c, 0.0, r * s))
    }

    pub fn linear_period(&self) -> f64 {
        2.0 * PI / self.lambda2
    }

    /// Generator `diag(λ₁, λ₂, -λ₁, λ₂)` of the linear flow in `x` coordinates.
    pub fn h2_hessian(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::new(
            self.lambda1,
            self.lambda2,
            -self.lambda1,
            self.lambda2,
        ))
    }
}

/// `H₂` as a Hamiltonian system in `x` coordinates.
#[derive(Debug, Clone)]
pub struct LinearH2(pub SaddleCenterData);

impl HamiltonianSystem for LinearH2 {
    fn energy(&self, z: &Vector4<f64>) -> Result<f64> {
        Ok(self.0.h2(z))
    }

    fn gradient(&self, z: &Vector4<f64>) -> Result<Vector4<f64>> {
        Ok(self.0.h2_hessian() * z)
    }

    fn hessian(&self, _z: &Vector4<f64>) -> Result<Matrix4<f64>> {
        Ok(self.0.h2_hessian())
    }
}

/// `Y₂ = ((1-b)x₁, ½x₂, b x₃, ½x₄)`.
pub fn y2_field(b: f64, x: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new((1.0 - b) * x[0], 0.5 * x[1], b * x[2], 0.5 * x[3])
}

pub fn dh2_dot_y2(scd: &SaddleCenterData, b: f64, x: &Vector4<f64>) -> f64 {
    scd.lambda1 * (1.0 - b) * x[0] * x[0] - scd.lambda1 * b * x[2] * x[2]
        + 0.5 * scd.lambda2 * (x[1] * x[1] + x[3] * x[3])
}

/// Right-hand side `g(r)` of the shield profile equation `r' = g(r)`.
pub fn shield_ode_rhs(scd: &SaddleCenterData, c0: f64, b: f64, r: f64) -> f64 {
    let (l1, l2) = (scd.lambda1, scd.lambda2);
    let w = 2.0 * c0 - l2 * r * r;
    let num = -2.0 * PI * r * (l2 * r * r - 2.0 * c0) * (l1 * r * r + 4.0 * (b - 1.0).powi(2) * w);
    let den = 2.0 * c0 + (1.0 - 2.0 * b) * w;
    num / (den * den)
}

/// `g'(r₀) = -4πλ₁/λ₂`, independent of `c₀` and `b`.
pub fn shield_rate_at_r0(scd: &SaddleCenterData) -> f64 {
    -4.0 * PI * scd.lambda1 / scd.lambda2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShieldProfile {
    pub c0: f64,
    pub b: f64,
    pub r0: f64,
    /// Increasing `s` samples from both branches, `s = 0` at `r_init`.
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    /// `a(s)` with `a(0) = 0`.
    pub a: Vec<f64>,
    /// Fitted exponential approach rate of `r → r₀`.
    pub rate: f64,
    /// Analytic `|g'(r₀)|`.
    pub rate_expected: f64,
    /// `π r(s)²` at the forward end.
    pub area_rate_end: f64,
    /// `E = π r₀² = 2π c₀ / λ₂`.
    pub energy: f64,
}

struct ShieldOde<'a> {
    scd: &'a SaddleCenterData,
    c0: f64,
    b: f64,
}

impl OdeSystem for ShieldOde<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = shield_ode_rhs(self.scd, self.c0, self.b, y[0]);
        dy[1] = PI * y[0] * y[0];
        Ok(())
    }
}

pub fn shield_profile(
    scd: &SaddleCenterData,
    c0: f64,
    b: f64,
    r_init: f64,
) -> Result<ShieldProfile> {
    if c0 <= 0.0 {
        return Err(invalid("c0", c0, "must be positive"));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(invalid("b", b, "must lie in (0, 1)"));
    }
    let r0 = (2.0 * c0 / scd.lambda2).sqrt();
    if !(r_init.abs() < r0 && r_init != 0.0) {
        return Err(invalid("r_init", r_init, "must lie in (-r0, r0) \\ {0}"));
    }
    let sign = r_init.signum();
    let ode = ShieldOde { scd, c0, b };
    let integ = Integrator::with_tol(1e-13, 1e-16);
    let fwd_ev = [EventSpec::new(
        move |_t, y: &[f64]| r0 - sign * y[0] - 1e-10,
        Direction::Decreasing,
        true,
    )];
    let fwd = integ.integrate(&ode, 0.0, &[r_init, 0.0], 200.0, &fwd_ev);
    if !matches!(fwd.status, Status::Terminated(_)) {
        return Err(Cr3bpError::Integration {
            t: fwd.last().0,
            reason: "profile did not reach r0".into(),
        });
    }
    let bwd_ev = [EventSpec::new(
        |_t, y: &[f64]| y[0].abs() - 1e-10,
        Direction::Decreasing,
        true,
    )];
    let bwd = integ
        .integrate(&ode, 0.0, &[r_init, 0.0], -200.0, &bwd_ev)
        .ok()?;
    let mut s = Vec::new();
    let mut r = Vec::new();
    let mut a = Vec::new();
    for (t, y) in bwd.t.iter().zip(&bwd.y).rev() {
        s.push(*t);
        r.push(y[0]);
        a.push(y[1]);
    }
    for (t, y) in fwd.t.iter().zip(&fwd.y).skip(1) {
        s.push(*t);
        r.push(y[0]);
        a.push(y[1]);
    }
    // log-linear fit of |r0 - |r|| over the tail
    let (mut sx, mut sy, mut sxx, mut sxy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, y) in fwd.t.iter().zip(&fwd.y) {
        let d = r0 - y[0].abs();
        if d > 1e-9 && d < 1e-4 {
            let ly = d.ln();
            sx += t;
            sy += ly;
            sxx += t * t;
            sxy += t * ly;
            n += 1.0;
        }
    }
    let rate = if n >= 2.0 {
        -(n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };
    let r_end = fwd.last().1[0];
    Ok(ShieldProfile {
        c0,
        b,
        r0,
        s,
        r,
        a,
        rate,
        rate_expected: shield_rate_at_r0(scd).abs(),
        area_rate_end: PI * r_end * r_end,
        energy: 2.0 * PI * c0 / scd.lambda2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{hamiltonian, RotatingState};
    use crate::linalg::{j4, symplectic_defect4};

    fn mu_grid() -> Vec<MassRatio> {
        (1..=20)
            .map(|k| MassRatio::new(0.025 + 0.95 * (k - 1) as f64 / 19.0).unwrap())
            .collect()
    }

    #[test]
    fn copenhagen_values() {
        let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
        assert!((scd.a - 4.0).abs() < 1e-12);
        assert!((a_of_r1(1e-9) - 2.0).abs() < 1e-7);
        assert!((a_of_r1(1.0 - 1e-9) - 2.0).abs() < 1e-7);
        // λ₁² = 3 + 4√2·... closed values at a = 4: √(4·32) = 8√2
        let s = 128f64.sqrt();
        assert!((scd.lambda1 * scd.lambda1 - (3.0 + s)).abs() < 1e-12);
        assert!((scd.lambda2 * scd.lambda2 - (s - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_on_grid() {
        for m in mu_grid() {
            let scd = SaddleCenterData::new(&m);
            let mu_a =
                (1.0 - m.mu()) / (2.0 * (1.0 - m.r1()).powi(3)) + m.mu() / (2.0 * m.r1().powi(3));
            assert!((mu_a - scd.a).abs() < 1e-10 * scd.a);
            assert!(scd.lambda1.powi(2) >= 1.0 + 2.0 * 7f64.sqrt() - 1e-12);
            assert!(scd.lambda2.powi(2) >= -1.0 + 2.0 * 7f64.sqrt() - 1e-12);
            assert!(scd.lambda1 >= scd.lambda2);
            assert!(scd.c2 > scd.c1 && scd.c1 > 0.0);
            let s = (scd.a * (9.0 * scd.a - 4.0)).sqrt();
            assert!((scd.c0 * scd.c0 - 2.0 * s).abs() < 1e-12);
            assert!(symplectic_defect4(&scd.v) < 1e-10);
            assert!((scd.hessian_at_l1() - scd.hessian_closed_form()).amax() < 1e-9);
            let a = scd.a;
            let lhs = scd.c2.powi(4) * scd.lambda2.powi(2) - scd.c1.powi(4) * scd.lambda1.powi(2);
            let rhs = 8.0 - 24.0 * a + 44.0 * a * a + 72.0 * a * a * a;
            assert!(((lhs - rhs) / rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn v_block_diagonalizes() {
        for m in mu_grid() {
            let scd = SaddleCenterData::new(&m);
            let a = scd.v_inverse() * j4() * scd.hessian_at_l1() * scd.v;
            let mut expected = Matrix4::zeros();
            expected[(0, 2)] = scd.lambda1;
            expected[(2, 0)] = scd.lambda1;
            expected[(1, 3)] = -scd.lambda2;
            expected[(3, 1)] = scd.lambda2;
            assert!((a - expected).amax() < 1e-8);
        }
    }

    #[test]
    fn rescaled_hamiltonian_converges_to_h2() {
        let m = MassRatio::new(0.3).unwrap();
        let scd = SaddleCenterData::new(&m);
        let x = Vector4::new(0.3, -0.7, 0.4, 0.5);
        let mut errs = Vec::new();
        for k in 2..=6 {
            let eps = 10f64.powi(-k);
            let z = scd.rescaled_to_phase(eps, &x);
            let h = hamiltonian(&m, &RotatingState::from_vec(&z)).unwrap();
            errs.push(((h - scd.l1_value) / eps - scd.h2(&x)).abs());
        }
        // O(ε^{1/2}): one decade of ε gains half a decade
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 2.5 && ratio < 4.5, "{errs:?}");
        }
    }

    #[test]
    fn lyapunov_on_level() {
        let scd = SaddleCenterData::new(&MassRatio::new(0.3).unwrap());
        assert!(scd.linear_lyapunov(-1.0, 0.0).is_err());
        for i in 0..20 {
            let t = 0.37 * i as f64;
            let x = scd.linear_lyapunov(0.2, t).unwrap();
            assert!((scd.h2(&x) - 0.2).abs() < 1e-14);
        }
        let x0 = scd.linear_lyapunov(0.2, 0.0).unwrap();
        assert!((x0[1] - (0.4 / scd.lambda2).sqrt()).abs() < 1e-15);
        let back = scd.linear_lyapunov(0.2, scd.linear_period()).unwrap();
        assert!((back - x0).amax() < 1e-13);
    }

    #[test]
    fn y2_contraction_identities() {
        let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
        let x = Vector4::new(0.3, -0.2, 0.1, 0.4);
        let direct = (scd.h2_hessian() * x).dot(&y2_field(0.3, &x));
        assert!((direct - dh2_dot_y2(&scd, 0.3, &x)).abs() < 1e-14);
        assert!((dh2_dot_y2(&scd, 0.5, &x) - scd.h2(&x)).abs() < 1e-14);
        // on H₂⁻¹(c₀): c₀ + λ₁(½ - b)(x₁² + x₃²)
        let c0 = scd.h2(&x);
        let b = 0.2;
        let closed = c0 + scd.lambda1 * (0.5 - b) * (x[0] * x[0] + x[2] * x[2]);
        assert!((closed - dh2_dot_y2(&scd, b, &x)).abs() < 1e-12);
    }

    #[test]
    fn y2_transversality_loss_at_large_x3() {
        // b = 1/2: dH₂·Y₂ = H₂ = c₀ > 0 on the level; for b > 1/2 it fails
        // once x₃² exceeds c₀/(λ₁(b - ½)) + ... locate the sign change
        let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
        let (c0, b) = (0.1, 0.8);
        let f = |x3: f64| {
            // point on H₂⁻¹(c₀) with x₂ = x₄ = 0
            let x1 = (x3 * x3 + 2.0 * c0 / scd.lambda1).sqrt();
            dh2_dot_y2(&scd, b, &Vector4::new(x1, 0.0, x3, 0.0))
        };
        assert!(f(0.0) > 0.0);
        assert!(f(10.0) < 0.0);
        let root = crate::dynamics::bisect(f, 0.0, 10.0, 1e-14);
        // closed form: c₀ + λ₁(½ - b)(2x₃² + 2c₀/λ₁) = 0
        let exact = ((c0 / (scd.lambda1 * (b - 0.5)) - 2.0 * c0 / scd.lambda1) / 2.0).sqrt();
        assert!((root - exact).abs() < 1e-10);
    }

    #[test]
    fn shield_rhs_signs() {
        let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
        let (c0, b) = (0.3, 0.5);
        let r0 = (2.0 * c0 / scd.lambda2).sqrt();
        assert_eq!(shield_ode_rhs(&scd, c0, b, 0.0), 0.0);
        assert!(shield_ode_rhs(&scd, c0, b, r0).abs() < 1e-15);
        assert!(shield_ode_rhs(&scd, c0, b, -r0).abs() < 1e-15);
        for i in 1..100 {
            let r = r0 * i as f64 / 100.0;
            assert!(shield_ode_rhs(&scd, c0, b, r) > 0.0);
            assert!(shield_ode_rhs(&scd, c0, b, -r) < 0.0);
        }
        let h = 1e-6;
        let fd = (shield_ode_rhs(&scd, c0, 0.3, r0 + h) - shield_ode_rhs(&scd, c0, 0.3, r0 - h))
            / (2.0 * h);
        assert!((fd - shield_rate_at_r0(&scd)).abs() < 1e-6 * fd.abs());
    }

    #[test]
    fn shield_profile_behaviour() {
        let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
        let (c0, b) = (0.2, 0.5);
        let p = shield_profile(&scd, c0, b, 0.5 * (2.0 * c0 / scd.lambda2).sqrt()).unwrap();
        assert!(p.r.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.a.windows(2).all(|w| w[1] >= w[0]));
        assert!(((p.rate - p.rate_expected) / p.rate_expected).abs() < 0.05);
        assert!((p.area_rate_end - p.energy).abs() < 1e-6);
        for r in &p.r {
            assert!(2.0 * c0 - scd.lambda2 * r * r >= -1e-12);
        }
        let x1_first = ((2.0 * c0 - scd.lambda2 * p.r[0].powi(2)) / scd.lambda1).sqrt();
        assert!((x1_first - (2.0 * c0 / scd.lambda1).sqrt()).abs() < 1e-9);
        let neg = shield_profile(&scd, c0, b, -0.1).unwrap();
        assert!(neg.r.windows(2).all(|w| w[1] <= w[0]));
        assert!(shield_profile(&scd, c0, b, 0.0).is_err());
    }
}
