//! Rotating-frame Hamiltonian of the planar circular restricted three-body
//! problem, Lagrange points and Hill regions.
//!
//! Standard frame: the earth (mass `1 - μ`) sits at `(-μ, 0)`, the moon
//! (mass `μ`) at `(1 - μ, 0)`. Phase vectors are ordered `(p1, p2, q1, q2)`.

use crate::error::{invalid, Cr3bpError, Result};
use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

pub const COLLISION_GUARD: f64 = 1e-9;

/// Closed-form mass ratio as a function of the moon–`l̂₁` distance.
pub fn mu_of_r1(r1: f64) -> f64 {
    let r2 = r1 * r1;
    let r3 = r2 * r1;
    r3 * (3.0 - 3.0 * r1 + r2) / (1.0 - 2.0 * r1 + r2 + 2.0 * r3 - r2 * r2)
}

fn r1_residual(mu: f64, r: f64) -> f64 {
    (1.0 - mu) / ((1.0 - r) * (1.0 - r)) - mu / (r * r) - (1.0 - mu - r)
}

fn r1_residual_deriv(mu: f64, r: f64) -> f64 {
    2.0 * (1.0 - mu) / (1.0 - r).powi(3) + 2.0 * mu / r.powi(3) + 1.0
}

/// Solves `(1-μ)/(1-r)² - μ/r² = 1-μ-r` for `r ∈ (0, 1)`.
pub fn lagrange_r1(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid("mu", mu, "mass ratio must lie in (0, 1)"));
    }
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if r1_residual(mu, mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..4 {
        let step = r1_residual(mu, r) / r1_residual_deriv(mu, r);
        let next = r - step;
        if next > 0.0 && next < 1.0 {
            r = next;
        }
        if step.abs() < 1e-17 {
            break;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassRatio {
    mu: f64,
    r1: f64,
}

impl MassRatio {
    pub fn new(mu: f64) -> Result<Self> {
        let r1 = lagrange_r1(mu)?;
        Ok(Self { mu, r1 })
    }

    /// Uses `r1` as the primary parameter; `μ` comes from the closed form.
    pub fn from_r1(r1: f64) -> Result<Self> {
        if !(r1 > 0.0 && r1 < 1.0) {
            return Err(invalid("r1", r1, "must lie in (0, 1)"));
        }
        Ok(Self {
            mu: mu_of_r1(r1),
            r1,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn earth(&self) -> Vector2<f64> {
        Vector2::new(-self.mu, 0.0)
    }

    pub fn moon(&self) -> Vector2<f64> {
        Vector2::new(1.0 - self.mu, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatingState {
    pub p: Vector2<f64>,
    pub q: Vector2<f64>,
}

impl RotatingState {
    pub fn new(p: [f64; 2], q: [f64; 2]) -> Self {
        Self {
            p: Vector2::new(p[0], p[1]),
            q: Vector2::new(q[0], q[1]),
        }
    }

    pub fn to_vec(&self) -> Vector4<f64> {
        Vector4::new(self.p.x, self.p.y, self.q.x, self.q.y)
    }

    pub fn from_vec(z: &Vector4<f64>) -> Self {
        Self {
            p: Vector2::new(z[0], z[1]),
            q: Vector2::new(z[2], z[3]),
        }
    }

    /// Velocity `q̇ = p + i q`.
    pub fn velocity(&self) -> Vector2<f64> {
        Vector2::new(self.p.x - self.q.y, self.p.y + self.q.x)
    }

    pub fn from_velocity(q: Vector2<f64>, qdot: Vector2<f64>) -> Self {
        Self {
            p: Vector2::new(qdot.x + q.y, qdot.y - q.x),
            q,
        }
    }
}

/// Position conventions along the `q1` axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Earth at `-μ`, moon at `1-μ`.
    Standard,
    /// Earth at `0`, moon at `1`.
    EarthOrigin,
    /// Earth at `-1/2`, moon at `1/2`.
    Symmetric,
}

impl Frame {
    /// Translation `c` with `q_frame = q_std + c e₁`.
    pub fn offset(self, mu: f64) -> f64 {
        match self {
            Frame::Standard => 0.0,
            Frame::EarthOrigin => mu,
            Frame::Symmetric => mu - 0.5,
        }
    }
}

/// Moves a standard-frame state into `frame`. The momentum shift
/// `p2 ↦ p2 - c` keeps the kinetic part `½|p + iq|²` unchanged, so the
/// Hamiltonian value is preserved.
pub fn to_frame(mu: &MassRatio, s: &RotatingState, frame: Frame) -> RotatingState {
    let c = frame.offset(mu.mu);
    RotatingState {
        p: Vector2::new(s.p.x, s.p.y - c),
        q: Vector2::new(s.q.x + c, s.q.y),
    }
}

pub fn from_frame(mu: &MassRatio, s: &RotatingState, frame: Frame) -> RotatingState {
    let c = frame.offset(mu.mu);
    RotatingState {
        p: Vector2::new(s.p.x, s.p.y + c),
        q: Vector2::new(s.q.x - c, s.q.y),
    }
}

/// Value, gradient and Hessian of the effective potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialJet {
    pub value: f64,
    pub grad: Vector2<f64>,
    pub hess: Matrix2<f64>,
}

fn add_kepler_term(jet: &mut PotentialJet, m: f64, d: Vector2<f64>) -> Result<()> {
    let rho = d.norm();
    if rho < COLLISION_GUARD {
        return Err(Cr3bpError::Collision {
            dist: rho,
            primary: [f64::NAN, f64::NAN],
        });
    }
    let r3 = rho * rho * rho;
    jet.value -= m / rho;
    jet.grad += d * (m / r3);
    jet.hess += (Matrix2::identity() - d * d.transpose() * (3.0 / (rho * rho))) * (m / r3);
    Ok(())
}

/// `U(q) = -μ/|q-(1-μ)| - (1-μ)/|q+μ| - ½|q|²` in the standard frame.
pub fn effective_potential(mu: &MassRatio, q: &Vector2<f64>) -> Result<PotentialJet> {
    potential_in_frame(mu, q, Frame::Standard)
}

/// Effective potential written in another frame (`q` given in that frame).
pub fn potential_in_frame(mu: &MassRatio, q: &Vector2<f64>, frame: Frame) -> Result<PotentialJet> {
    let m = mu.mu;
    let c = frame.offset(m);
    let mut jet = PotentialJet {
        value: 0.0,
        grad: Vector2::zeros(),
        hess: Matrix2::zeros(),
    };
    let moon = Vector2::new(1.0 - m + c, 0.0);
    let earth = Vector2::new(-m + c, 0.0);
    add_kepler_term(&mut jet, m, q - moon).map_err(|e| tag_primary(e, moon))?;
    add_kepler_term(&mut jet, 1.0 - m, q - earth).map_err(|e| tag_primary(e, earth))?;
    let qs = Vector2::new(q.x - c, q.y);
    jet.value -= 0.5 * qs.norm_squared();
    jet.grad -= qs;
    jet.hess -= Matrix2::identity();
    Ok(jet)
}

fn tag_primary(e: Cr3bpError, at: Vector2<f64>) -> Cr3bpError {
    match e {
        Cr3bpError::Collision { dist, .. } => Cr3bpError::Collision {
            dist,
            primary: [at.x, at.y],
        },
        other => other,
    }
}

pub fn hamiltonian(mu: &MassRatio, s: &RotatingState) -> Result<f64> {
    let u = effective_potential(mu, &s.q)?;
    Ok(0.5 * s.velocity().norm_squared() + u.value)
}

/// `∇H` in `(p1, p2, q1, q2)` ordering, frame-aware.
pub fn hamiltonian_gradient(
    mu: &MassRatio,
    z: &Vector4<f64>,
    frame: Frame,
) -> Result<Vector4<f64>> {
    let q = Vector2::new(z[2], z[3]);
    let u = potential_in_frame(mu, &q, frame)?;
    let v1 = z[0] - z[3];
    let v2 = z[1] + z[2];
    Ok(Vector4::new(v1, v2, v2 + u.grad.x, -v1 + u.grad.y))
}

pub fn hamiltonian_hessian(mu: &MassRatio, z: &Vector4<f64>, frame: Frame) -> Result<Matrix4<f64>> {
    let q = Vector2::new(z[2], z[3]);
    let u = potential_in_frame(mu, &q, frame)?;
    let mut h = Matrix4::zeros();
    h[(0, 0)] = 1.0;
    h[(1, 1)] = 1.0;
    h[(0, 3)] = -1.0;
    h[(3, 0)] = -1.0;
    h[(1, 2)] = 1.0;
    h[(2, 1)] = 1.0;
    h[(2, 2)] = 1.0 + u.hess[(0, 0)];
    h[(3, 3)] = 1.0 + u.hess[(1, 1)];
    h[(2, 3)] = u.hess[(0, 1)];
    h[(3, 2)] = u.hess[(1, 0)];
    Ok(h)
}

/// Hamilton's equations `(ṗ1, ṗ2, q̇1, q̇2)` in the standard frame.
pub fn vector_field(mu: &MassRatio, s: &RotatingState) -> Result<Vector4<f64>> {
    let g = hamiltonian_gradient(mu, &s.to_vec(), Frame::Standard)?;
    Ok(Vector4::new(-g[2], -g[3], g[0], g[1]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangeData {
    pub mu: f64,
    pub r1: f64,
    /// `q1` coordinate of `l̂₁`.
    pub lhat1: f64,
    /// Critical values `L1..L5`.
    pub values: [f64; 5],
    /// Critical phase points `(p1, p2, q1, q2)`.
    pub points: [[f64; 4]; 5],
}

impl LagrangeData {
    pub fn l1(&self) -> f64 {
        self.values[0]
    }

    pub fn point(&self, i: usize) -> RotatingState {
        let z = self.points[i];
        RotatingState::new([z[0], z[1]], [z[2], z[3]])
    }
}

fn axis_dudx(mu: f64, x: f64) -> f64 {
    let a = x - 1.0 + mu;
    let b = x + mu;
    mu * a.signum() / (a * a) + (1.0 - mu) * b.signum() / (b * b) - x
}

/// Root of a continuous function with `f(lo)` and `f(hi)` of opposite signs.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < tol {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Collinear root on `(lo, hi)`; the bracket is shrunk by a coarse sign scan.
fn collinear_point(mu: f64, lo: f64, hi: f64) -> f64 {
    let n = 64;
    let f = |x: f64| axis_dudx(mu, x);
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=n {
        let b = lo + (hi - lo) * k as f64 / n as f64;
        let fb = f(b);
        if fa.signum() != fb.signum() {
            return bisect(f, a, b, 1e-15);
        }
        a = b;
        fa = fb;
    }
    bisect(f, lo, hi, 1e-15)
}

pub fn lagrange_values(mu: &MassRatio) -> LagrangeData {
    let m = mu.mu;
    let r1 = mu.r1;
    let lhat1 = 1.0 - m - r1;
    let eps = 1e-7;
    let beyond_moon = collinear_point(m, 1.0 - m + eps, 2.5);
    let beyond_earth = collinear_point(m, -2.5, -m - eps);
    let u_axis = |x: f64| {
        effective_potential(mu, &Vector2::new(x, 0.0))
            .map(|u| u.value)
            .unwrap_or(f64::NAN)
    };
    // l₂ is the outer collinear point with the lower value
    let (x2, x3) = if u_axis(beyond_moon) <= u_axis(beyond_earth) {
        (beyond_moon, beyond_earth)
    } else {
        (beyond_earth, beyond_moon)
    };
    let positions = [
        Vector2::new(lhat1, 0.0),
        Vector2::new(x2, 0.0),
        Vector2::new(x3, 0.0),
        Vector2::new(0.5 - m, 0.75f64.sqrt()),
        Vector2::new(0.5 - m, -(0.75f64.sqrt())),
    ];
    let mut values = [0.0; 5];
    let mut points = [[0.0; 4]; 5];
    for (i, q) in positions.iter().enumerate() {
        values[i] = effective_potential(mu, q)
            .map(|u| u.value)
            .unwrap_or(f64::NAN);
        points[i] = [q.y, -q.x, q.x, q.y];
    }
    // closed forms where available
    values[0] = -m / r1 - (1.0 - m) / (1.0 - r1) - 0.5 * lhat1 * lhat1;
    values[3] = -1.5 + 0.5 * m * (1.0 - m);
    values[4] = values[3];
    LagrangeData {
        mu: m,
        r1,
        lhat1,
        values,
        points,
    }
}

/// `(U(q) ≤ h, h − U(q))`.
pub fn hill_region_contains(mu: &MassRatio, h: f64, q: &Vector2<f64>) -> Result<(bool, f64)> {
    let u = effective_potential(mu, q)?;
    let margin = h - u.value;
    Ok((margin >= 0.0, margin))
}

/// The CR3BP flow in a chosen frame.
#[derive(Debug, Clone, Copy)]
pub struct Cr3bp {
    pub mu: MassRatio,
    pub frame: Frame,
}

impl Cr3bp {
    pub fn new(mu: MassRatio) -> Self {
        Self {
            mu,
            frame: Frame::Standard,
        }
    }

    pub fn in_frame(mu: MassRatio, frame: Frame) -> Self {
        Self { mu, frame }
    }
}

impl crate::flow::HamiltonianSystem for Cr3bp {
    fn energy(&self, z: &Vector4<f64>) -> Result<f64> {
        let q = Vector2::new(z[2], z[3]);
        let u = potential_in_frame(&self.mu, &q, self.frame)?;
        let v = Vector2::new(z[0] - z[3], z[1] + z[2]);
        Ok(0.5 * v.norm_squared() + u.value)
    }

    fn gradient(&self, z: &Vector4<f64>) -> Result<Vector4<f64>> {
        hamiltonian_gradient(&self.mu, z, self.frame)
    }

    fn hessian(&self, z: &Vector4<f64>) -> Result<Matrix4<f64>> {
        hamiltonian_hessian(&self.mu, z, self.frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term_by_term(mu: f64, p: [f64; 2], q: [f64; 2]) -> f64 {
        let kin = 0.5 * ((p[0] - q[1]).powi(2) + (p[1] + q[0]).powi(2));
        let d_moon = ((q[0] - (1.0 - mu)).powi(2) + q[1].powi(2)).sqrt();
        let d_earth = ((q[0] + mu).powi(2) + q[1].powi(2)).sqrt();
        kin - mu / d_moon - (1.0 - mu) / d_earth - 0.5 * (q[0] * q[0] + q[1] * q[1])
    }

    #[test]
    fn energy_at_l1_copenhagen() {
        let m = MassRatio::new(0.5).unwrap();
        let ld = lagrange_values(&m);
        let h = hamiltonian(&m, &ld.point(0)).unwrap();
        assert!((h + 2.0).abs() < 1e-14);
        assert!((ld.l1() + 2.0).abs() < 1e-14);
        assert!((ld.values[1] - ld.values[2]).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_matches_direct_formula() {
        let m = MassRatio::new(0.3).unwrap();
        let s = RotatingState::new([0.1, 0.2], [0.4, 0.1]);
        let h = hamiltonian(&m, &s).unwrap();
        let oracle = term_by_term(0.3, [0.1, 0.2], [0.4, 0.1]);
        assert!((h - oracle).abs() < 1e-14);
        assert!((h - (-1.843_632_791_711_680_3)).abs() < 1e-12, "{h}");
    }

    #[test]
    fn r1_against_bisection_oracle() {
        // independent oracle: plain bisection on the quintic-free residual
        let mu: f64 = 0.3;
        let f = |r: f64| (1.0 - mu) / (1.0 - r).powi(2) - mu / (r * r) - (1.0 - mu - r);
        let (mut lo, mut hi) = (0.01, 0.99);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if f(m) > 0.0 {
                hi = m
            } else {
                lo = m
            }
        }
        let r = lagrange_r1(mu).unwrap();
        assert!((r - 0.5 * (lo + hi)).abs() < 1e-13);
        assert!((r - 0.413_870_217_949_311_0).abs() < 1e-12, "{r}");
        assert!(r1_residual(mu, r).abs() < 1e-13);
        assert_eq!(lagrange_r1(0.5).unwrap(), 0.5);
    }

    #[test]
    fn r1_round_trip_grid() {
        for k in 1..=19 {
            let mu = 0.05 * k as f64;
            let r = lagrange_r1(mu).unwrap();
            assert!((mu_of_r1(r) - mu).abs() < 1e-12);
        }
        assert!(lagrange_r1(0.0).is_err());
        assert!(lagrange_r1(1.2).is_err());
    }

    #[test]
    fn gradient_vanishes_at_lagrange_points() {
        for mu in [0.1, 0.3, 0.5, 0.77] {
            let m = MassRatio::new(mu).unwrap();
            let ld = lagrange_values(&m);
            for i in 0..5 {
                let f = vector_field(&m, &ld.point(i)).unwrap();
                assert!(f.norm() < 1e-10, "mu {mu} point {i}: {f}");
                let u = effective_potential(&m, &ld.point(i).q).unwrap();
                assert!((u.value - ld.values[i]).abs() < 1e-12);
            }
            let v = ld.values;
            assert!(v[0] < v[1] && v[1] <= v[2] + 1e-15 && v[2] < v[3] && v[3] == v[4]);
        }
    }

    #[test]
    fn field_matches_finite_differences() {
        let m = MassRatio::new(0.5).unwrap();
        let s = RotatingState::new([0.0, 0.0], [0.2, 0.0]);
        let f = vector_field(&m, &s).unwrap();
        let z = s.to_vec();
        let h = 1e-5;
        let mut grad = Vector4::zeros();
        for i in 0..4 {
            let mut zp = z;
            let mut zm = z;
            zp[i] += h;
            zm[i] -= h;
            grad[i] = (hamiltonian(&m, &RotatingState::from_vec(&zp)).unwrap()
                - hamiltonian(&m, &RotatingState::from_vec(&zm)).unwrap())
                / (2.0 * h);
        }
        let jg = Vector4::new(-grad[2], -grad[3], grad[0], grad[1]);
        assert!((f - jg).amax() < 1e-7);
    }

    #[test]
    fn dq1_u_positive_between_earth_and_l1() {
        // earth at the origin, moon at 1
        for mu in [0.2, 0.5, 0.8] {
            let m = MassRatio::new(mu).unwrap();
            let lhat = 1.0 - m.r1();
            for i in 1..200 {
                let x = lhat * i as f64 / 200.0;
                for j in 0..20 {
                    let y = -0.3 + 0.6 * j as f64 / 19.0;
                    let q = Vector2::new(x, y);
                    let u = potential_in_frame(&m, &q, Frame::EarthOrigin).unwrap();
                    // the statement is restricted to the earth's Hill component
                    if u.value <= lagrange_values(&m).l1() {
                        assert!(u.grad.x > 0.0, "mu {mu} q {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn hill_region_basics() {
        let m = MassRatio::new(0.5).unwrap();
        let (_, margin) = hill_region_contains(&m, -2.0, &Vector2::new(0.0, 0.0)).unwrap();
        assert!(margin.abs() < 1e-12);
        let (inside, _) = hill_region_contains(&m, 5.0, &Vector2::new(-0.5 + 1e-6, 0.0)).unwrap();
        assert!(inside);
        assert!(hill_region_contains(&m, 0.0, &Vector2::new(0.5, 0.0)).is_err());
        // zero-velocity curve along the ray at angle 2 from the earth
        let h = -2.2;
        let dir = Vector2::new(2.0f64.cos(), 2.0f64.sin());
        let g = |t: f64| {
            effective_potential(&m, &(m.earth() + dir * t))
                .unwrap()
                .value
                - h
        };
        let t = bisect(g, 1e-3, 0.8, 1e-15);
        let (_, margin) = hill_region_contains(&m, h, &(m.earth() + dir * t)).unwrap();
        assert!(margin.abs() < 1e-10);
    }

    #[test]
    fn frames_preserve_energy() {
        let m = MassRatio::new(0.3).unwrap();
        let s = RotatingState::new([0.3, -0.2], [0.1, 0.25]);
        let h = hamiltonian(&m, &s).unwrap();
        for fr in [Frame::EarthOrigin, Frame::Symmetric] {
            let t = to_frame(&m, &s, fr);
            let sys = Cr3bp::in_frame(m, fr);
            use crate::flow::HamiltonianSystem;
            assert!((sys.energy(&t.to_vec()).unwrap() - h).abs() < 1e-14);
            let back = from_frame(&m, &t, fr);
            assert!((back.to_vec() - s.to_vec()).amax() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn reflection_symmetry(mu in 0.01f64..0.99, p1 in -2.0f64..2.0, p2 in -2.0f64..2.0,
                               q1 in -1.5f64..1.5, q2 in 0.05f64..1.5) {
            let m = MassRatio::new(mu).unwrap();
            let mr = MassRatio::new(1.0 - mu).unwrap();
            let s = RotatingState::new([p1, p2], [q1, q2]);
            let r = RotatingState::new([-p1, -p2], [-q1, -q2]);
            let a = hamiltonian(&m, &s).unwrap();
            let b = hamiltonian(&mr, &r).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }

        #[test]
        fn a_bounds(r1 in 1e-3f64..0.999) {
            let a = crate::saddle_center::a_of_r1(r1);
            prop_assert!((2.0 - 1e-12..=4.0 + 1e-12).contains(&a));
        }
    }
}
