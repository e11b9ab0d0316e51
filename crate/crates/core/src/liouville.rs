//! Liouville vector fields centred at the primaries and at `l₁`, the
//! interpolated field `Y_ε` across the neck and on-surface transversality
//! scans.
//!
//! Phase points are `(p1, p2, q1, q2)` in the standard frame. Inside the neck
//! the rescaled coordinates `x` with `(p, q) = ε^{1/2} V x + l₁` are used, where
//! the symplectic form is `dx₁∧dx₃ + dx₂∧dx₄`.

use crate::dynamics::{
    effective_potential, hamiltonian_gradient, lagrange_values, Frame, MassRatio,
};
use crate::error::{invalid, Cr3bpError, Result};
use crate::linalg::j4;
use crate::saddle_center::SaddleCenterData;
use nalgebra::{Matrix4, Vector2, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Centre of a radial Liouville field in the position plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Primary {
    Earth,
    Moon,
}

impl Primary {
    pub fn position(self, mu: f64) -> Vector2<f64> {
        match self {
            Primary::Earth => Vector2::new(-mu, 0.0),
            Primary::Moon => Vector2::new(1.0 - mu, 0.0),
        }
    }
}

/// `Y = (q - c)∂_q` for the primary at `c`.
pub fn radial_field(mu: f64, primary: Primary, z: &Vector4<f64>) -> Vector4<f64> {
    let c = primary.position(mu);
    Vector4::new(0.0, 0.0, z[2] - c.x, z[3] - c.y)
}

pub fn y_e_field(mu: f64, z: &Vector4<f64>) -> Vector4<f64> {
    radial_field(mu, Primary::Earth, z)
}

pub fn y_m_field(mu: f64, z: &Vector4<f64>) -> Vector4<f64> {
    radial_field(mu, Primary::Moon, z)
}

/// Largest entry of `d(ι_Y ω) - ω`, by central differences of the contracted
/// one-form `ι_Y ω = (J Y)ᵀ dz`.
pub fn liouville_defect<F>(field: F, z: &Vector4<f64>, h: f64) -> f64
where
    F: Fn(&Vector4<f64>) -> Vector4<f64>,
{
    let j = j4();
    let alpha = |w: &Vector4<f64>| j * field(w);
    let mut da = Matrix4::zeros();
    for i in 0..4 {
        let mut e = Vector4::zeros();
        e[i] = h;
        let d = (alpha(&(z + e)) - alpha(&(z - e))) / (2.0 * h);
        for k in 0..4 {
            // d[k] = ∂_i α_k
            da[(i, k)] += d[k];
            da[(k, i)] -= d[k];
        }
    }
    // ω(e_i, e_k) = ⟨J e_i, e_k⟩ = J_ki
    (da - j.transpose()).abs().max()
}

/// `dH·Y_e` at a phase point.
pub fn y_e_margin_at(mu: &MassRatio, z: &Vector4<f64>) -> Result<f64> {
    let g = hamiltonian_gradient(mu, z, Frame::Standard)?;
    Ok(g.dot(&y_e_field(mu.mu(), z)))
}

/// `dH·Y_e = ρ(∂_ρU - r sin(θ - θ_v))` for `q = -μ + ρe^{iθ}` and velocity
/// `r e^{iθ_v}`.
pub fn y_e_margin_polar(
    mu: &MassRatio,
    rho: f64,
    theta: f64,
    speed: f64,
    theta_v: f64,
) -> Result<f64> {
    let (s, c) = theta.sin_cos();
    let q = Vector2::new(-mu.mu() + rho * c, rho * s);
    let u = effective_potential(mu, &q)?;
    let drho = u.grad.x * c + u.grad.y * s;
    Ok(rho * (drho - speed * (theta - theta_v).sin()))
}

/// Angle `θ̂ ∈ (0, π)` with `2cos θ̂ = ρ`.
pub fn theta_hat(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("rho", rho, "radius must lie in (0, 1)"));
    }
    Ok((0.5 * rho).acos())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YeTransversality {
    pub energy: f64,
    pub samples: usize,
    pub min_margin: f64,
    /// `(ρ, θ, θ_v)` of the smallest margin.
    pub worst: [f64; 3],
}

/// Scans `dH·Y_e` over the component around the earth for `E < L₁`, on a
/// polar position grid times `n_vel` velocity directions.
pub fn y_e_transversality(
    mu: &MassRatio,
    energy: f64,
    n_rho: usize,
    n_theta: usize,
    n_vel: usize,
) -> Result<YeTransversality> {
    let l1 = lagrange_values(mu).values[0];
    if energy >= l1 {
        return Err(invalid(
            "energy",
            energy,
            "must lie below the first critical value",
        ));
    }
    let rmax = 1.0 - mu.r1();
    let rows: Vec<Result<(usize, f64, [f64; 3])>> = (0..n_rho)
        .into_par_iter()
        .map(|i| {
            let rho = rmax * (i as f64 + 0.5) / n_rho as f64;
            let mut count = 0;
            let mut best = (f64::INFINITY, [0.0; 3]);
            for k in 0..n_theta {
                let theta = 2.0 * PI * k as f64 / n_theta as f64;
                let q = Vector2::new(-mu.mu() + rho * theta.cos(), rho * theta.sin());
                let u = effective_potential(mu, &q)?;
                if u.value > energy {
                    continue;
                }
                let speed = (2.0 * (energy - u.value)).sqrt();
                for m in 0..n_vel {
                    let tv = 2.0 * PI * m as f64 / n_vel as f64;
                    let v = y_e_margin_polar(mu, rho, theta, speed, tv)?;
                    count += 1;
                    if v < best.0 {
                        best = (v, [rho, theta, tv]);
                    }
                }
            }
            Ok((count, best.0, best.1))
        })
        .collect();
    let mut out = YeTransversality {
        energy,
        samples: 0,
        min_margin: f64::INFINITY,
        worst: [0.0; 3],
    };
    for r in rows {
        let (c, m, w) = r?;
        out.samples += c;
        if m < out.min_margin {
            out.min_margin = m;
            out.worst = w;
        }
    }
    Ok(out)
}

/// `F₁(ρ) = (∂_ρU)² - 2(L₁ + ε - U)` on the segment from the earth towards `l₁`.
pub fn f1_margin(mu: &MassRatio, eps: f64, rho: f64) -> Result<f64> {
    let rmax = 1.0 - mu.r1();
    if !(rho > 0.0 && rho <= rmax * (1.0 + 1e-12)) {
        return Err(invalid("rho", rho, "must lie in (0, 1 - r1]"));
    }
    let l1 = lagrange_values(mu).values[0];
    let u = effective_potential(mu, &Vector2::new(-mu.mu() + rho, 0.0))?;
    Ok(u.grad.x * u.grad.x - 2.0 * (l1 + eps - u.value))
}

/// Leading coefficient `c` in `F₁(1 - r₁ - ε^{1/2}) = c ε + O(ε^{3/2})`.
pub fn f1_leading_coefficient(r1: f64) -> f64 {
    let f = 5.0 * (7.0 - 8.0 * r1 + 6.0 * r1 * r1)
        + r1 * (2.0 + 5.0 * r1.powi(3) + 3.0 * r1.powi(6))
        + r1 * r1 * (14.0 + 6.0 * r1 * r1 + 4.0 * r1.powi(3) + r1.powi(5)) * (1.0 - r1);
    let den = (1.0 - r1).powi(2) + r1.powi(3) * (2.0 - r1);
    2.0 * f / (den * den)
}

/// The affine Liouville field `x ↦ A x + c` that a radial field becomes in
/// the rescaled coordinates, and its primitive `G` with `Y₂ - Y = X_G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineLiouville {
    pub a: Matrix4<f64>,
    pub c: Vector4<f64>,
    /// Quadratic part of `G`.
    pub gq: Matrix4<f64>,
    /// Linear part of `G`.
    pub gl: Vector4<f64>,
}

impl AffineLiouville {
    fn new(scd: &SaddleCenterData, eps: f64, b: f64, primary: Primary) -> Self {
        let vi = scd.v_inverse();
        let mut p = Matrix4::zeros();
        p[(2, 2)] = 1.0;
        p[(3, 3)] = 1.0;
        let a = vi * p * scd.v;
        let centre = primary.position(scd.mu);
        let shift = Vector4::new(0.0, 0.0, scd.l1[2] - centre.x, scd.l1[3] - centre.y);
        let c = vi * shift / eps.sqrt();
        let lambda = Matrix4::from_diagonal(&Vector4::new(1.0 - b, 0.5, b, 0.5));
        let j = j4();
        let gq = -(j * (lambda - a));
        let gq = (gq + gq.transpose()) * 0.5;
        let gl = j * c;
        Self { a, c, gq, gl }
    }

    pub fn field(&self, x: &Vector4<f64>) -> Vector4<f64> {
        self.a * x + self.c
    }

    pub fn g(&self, x: &Vector4<f64>) -> f64 {
        0.5 * x.dot(&(self.gq * x)) + self.gl.dot(x)
    }

    pub fn grad_g(&self, x: &Vector4<f64>) -> Vector4<f64> {
        self.gq * x + self.gl
    }
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

const GL_NODES: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

fn gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    // two panels of 8-point Gauss–Legendre
    let m = 0.5 * (a + b);
    let mut total = 0.0;
    for (lo, hi) in [(a, m), (m, b)] {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += h * GL_NODES.iter().map(|(x, w)| w * f(c + h * x)).sum::<f64>();
    }
    total
}

/// The even cutoff `β(x₃)`: zero for `|x₃| ≤ ĉ`, one for `|x₃| ≥ top`, and in
/// between the power branch `(v̂₂(4+λ₁u²))^k - (v̂₂(4+λ₁ĉ²))^k`, `u = |x₃|`,
/// blended in with quintic steps so that `|β'|` never exceeds the branch's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCutoff {
    pub vhat2: f64,
    pub lambda1: f64,
    pub k: f64,
    pub chat: f64,
    pub ccheck: f64,
    /// Blend window width.
    pub window: f64,
    /// Point where the blended cutoff reaches one.
    pub top: f64,
    lo_mass: f64,
}

impl BetaCutoff {
    fn new(vhat1: f64, vhat2: f64, lambda1: f64, chat: f64) -> Result<Self> {
        let k = vhat1 / (2.0 * vhat2 * lambda1);
        let pc = (vhat2 * (4.0 + lambda1 * chat * chat)).powf(k);
        // β(-č) = 1 solved in closed form
        let ccheck2 = ((1.0 + pc).powf(1.0 / k) / vhat2 - 4.0) / lambda1;
        let ccheck = ccheck2.sqrt();
        let window = 0.05 * (ccheck - chat);
        let mut beta = Self {
            vhat2,
            lambda1,
            k,
            chat,
            ccheck,
            window,
            top: ccheck,
            lo_mass: 0.0,
        };
        beta.lo_mass = gauss(
            |u| beta.lo_weight(u) * beta.raw_slope(u),
            chat,
            chat + window,
        );
        // total mass is increasing in top; bracket and bisect for mass one
        let mass = |t: f64| -> f64 {
            let mut b = beta.clone();
            b.top = t;
            b.profile(t)
        };
        let (mut lo, mut hi) = (ccheck, ccheck + 2.0 * window);
        let mut grow = 0;
        while mass(hi) < 1.0 {
            hi += 2.0 * window;
            grow += 1;
            if grow > 1000 {
                return Err(Cr3bpError::Degenerate(
                    "cutoff blend does not reach one".into(),
                ));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * hi {
                break;
            }
        }
        beta.top = hi;
        if beta.top - window < chat + window {
            return Err(Cr3bpError::Degenerate(
                "cutoff blend windows overlap".into(),
            ));
        }
        Ok(beta)
    }

    fn power(&self, u: f64) -> f64 {
        (self.vhat2 * (4.0 + self.lambda1 * u * u)).powf(self.k)
    }

    /// Un-blended branch `β_raw(u)`, with `β_raw(ĉ) = 0` and `β_raw(č) = 1`.
    pub fn raw(&self, u: f64) -> f64 {
        self.power(u) - self.power(self.chat)
    }

    /// `dβ_raw/du`.
    pub fn raw_slope(&self, u: f64) -> f64 {
        self.power(u) * self.k * 2.0 * self.lambda1 * u / (4.0 + self.lambda1 * u * u)
    }

    fn lo_weight(&self, u: f64) -> f64 {
        smoothstep((u - self.chat) / self.window)
    }

    fn hi_weight(&self, u: f64) -> f64 {
        smoothstep((self.top - u) / self.window)
    }

    fn weight(&self, u: f64) -> f64 {
        if u <= self.chat || u >= self.top {
            0.0
        } else {
            self.lo_weight(u) * self.hi_weight(u)
        }
    }

    /// Blended profile in `u = |x₃|`.
    fn profile(&self, u: f64) -> f64 {
        let (c, w, t) = (self.chat, self.window, self.top);
        if u <= c {
            0.0
        } else if u <= c + w {
            gauss(|v| self.lo_weight(v) * self.raw_slope(v), c, u)
        } else if u <= t - w {
            self.lo_mass + self.power(u) - self.power(c + w)
        } else {
            let u = u.min(t);
            self.lo_mass + self.power(t - w) - self.power(c + w)
                + gauss(|v| self.hi_weight(v) * self.raw_slope(v), t - w, u)
        }
    }

    pub fn value(&self, x3: f64) -> f64 {
        let u = x3.abs();
        if u >= self.top {
            1.0
        } else {
            self.profile(u).clamp(0.0, 1.0)
        }
    }

    /// `dβ/dx₃`.
    pub fn derivative(&self, x3: f64) -> f64 {
        let u = x3.abs();
        self.weight(u) * self.raw_slope(u) * x3.signum()
    }
}

/// Everything needed to evaluate `Y_ε` at one `(μ, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationData {
    pub scd: SaddleCenterData,
    pub eps: f64,
    pub b: f64,
    /// `d₁ … d₆`.
    pub d: [f64; 6],
    pub q0: Matrix4<f64>,
    pub qg: Matrix4<f64>,
    pub vhat1: f64,
    pub vhat2: f64,
    pub chat: f64,
    pub ccheck: f64,
    /// Largest eigenvalue modulus of `V⁻¹`.
    pub alpha1: f64,
    pub n: f64,
    pub delta: f64,
    /// Radius in `x` of the ball where `Y_ε` is interpolated. On the quadratic
    /// level `H₂ = 1` every point with `|x|` near this radius has
    /// `|x₃| ≥ 1.2·top`, where the cutoff is already one.
    pub zone_radius: f64,
    pub beta: BetaCutoff,
    pub earth: AffineLiouville,
    pub moon: AffineLiouville,
}

pub fn interpolation_data(mu: &MassRatio, eps: f64) -> Result<InterpolationData> {
    if !(eps > 0.0 && eps < 0.1) {
        return Err(invalid("eps", eps, "energy offset must lie in (0, 0.1)"));
    }
    let scd = SaddleCenterData::new(mu);
    let (a, r1) = (scd.a, scd.r1);
    let (l1, l2) = (scd.lambda1, scd.lambda2);
    let (c0, c1, c2) = (scd.c0, scd.c1, scd.c2);
    let (s1, s2) = (l1.sqrt(), l2.sqrt());
    let c02 = c0 * c0;
    let d = [
        1.0 + (c1 * c1 - 2.0) / c02,
        (c2 * c2 - 2.0) / c02,
        (c2 * c2 - 2.0) * c1 * s2 / (c02 * c2 * s1),
        (2.0 - c1 * c1) * c2 * s1 / (c02 * c1 * s2),
        -(2.0 * (a - 1.0) + c1 * c1) * (1.0 - r1) / (c0 * c2 * s2),
        (2.0 * (a - 1.0) + c2 * c2) * (1.0 - r1) / (c0 * c1 * s1),
    ];
    let b = 0.5;
    #[rustfmt::skip]
    let q0 = Matrix4::new(
        1.0 - d[0], 0.0, 0.0, d[2],
        0.0, 1.0 - d[1], d[2], 0.0,
        0.0, d[3], d[0], 0.0,
        d[3], 0.0, 0.0, d[1],
    );
    #[rustfmt::skip]
    let qg = Matrix4::new(
        0.0, -d[2], b - d[0], 0.0,
        -d[2], 0.0, 0.0, 0.5 - d[1],
        b - d[0], 0.0, 0.0, d[3],
        0.0, 0.5 - d[1], d[3], 0.0,
    );
    let vhat1 = (1.0 - r1) * s1 * (c1 + c2) * c0 / (2.0 * c1 * c2);
    let vhat2 = d[5] + d[4].abs() * (1.0 + l1 / l2);
    let chat = (3.0 / l1).sqrt() * c1 / (c2 - c1);
    let beta = BetaCutoff::new(vhat1, vhat2, l1, chat)?;
    let alpha1 = scd
        .v_inverse()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let n = (10.0 * alpha1).max(beta.top + 1.0);
    let spread = 1.0 / l1 + 1.0 / l2;
    let zone_radius = ((1.2 * beta.top).powi(2) * (2.0 + l1 / l2) + 2.0 * spread).sqrt();
    let earth = AffineLiouville::new(&scd, eps, b, Primary::Earth);
    let moon = AffineLiouville::new(&scd, eps, b, Primary::Moon);
    Ok(InterpolationData {
        ccheck: beta.ccheck,
        scd,
        eps,
        b,
        d,
        q0,
        qg,
        vhat1,
        vhat2,
        chat,
        alpha1,
        n,
        delta: chat,
        zone_radius,
        beta,
        earth,
        moon,
    })
}

/// Decomposition `dH·Y_ε = β dH·Y_side + (1-β) dH·Y₂ + G dβ·X_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Termwise {
    pub beta: f64,
    pub side: f64,
    pub radial: f64,
    pub cutoff: f64,
    pub total: f64,
}

impl InterpolationData {
    pub fn to_x(&self, z: &Vector4<f64>) -> Vector4<f64> {
        self.scd.phase_to_rescaled(self.eps, z)
    }

    fn side(&self, x3: f64) -> &AffineLiouville {
        if x3 <= 0.0 {
            &self.earth
        } else {
            &self.moon
        }
    }

    pub fn y2(&self, x: &Vector4<f64>) -> Vector4<f64> {
        crate::saddle_center::y2_field(self.b, x)
    }

    /// `Y_ε = Y₂ - X_{βG}` in rescaled coordinates, `G` taken from the earth
    /// side for `x₃ ≤ 0` and from the moon side otherwise.
    pub fn y_eps(&self, x: &Vector4<f64>) -> Vector4<f64> {
        let side = self.side(x[2]);
        let beta = self.beta.value(x[2]);
        let db = self.beta.derivative(x[2]);
        let mut grad = side.grad_g(x) * beta;
        grad[2] += side.g(x) * db;
        self.y2(x) - j4() * grad
    }

    fn to_phase_vector(&self, y: &Vector4<f64>) -> Vector4<f64> {
        self.scd.v * y * self.eps.sqrt()
    }

    /// Evaluates `dH·Y_ε` and its three terms at a phase point in the
    /// interpolation zone.
    pub fn termwise(&self, z: &Vector4<f64>) -> Result<Termwise> {
        let mu = self.scd.mass_ratio();
        let grad = hamiltonian_gradient(&mu, z, Frame::Standard)?;
        let x = self.to_x(z);
        let side = self.side(x[2]);
        let beta = self.beta.value(x[2]);
        let db = self.beta.derivative(x[2]);
        let gx = self.scd.v.transpose() * grad * self.eps.sqrt();
        let dh_side = gx.dot(&side.field(&x));
        let dh_radial = gx.dot(&self.y2(&x));
        // X_H = J∇_x H in rescaled coordinates; only its x₃ component enters
        let xh3 = (j4() * gx)[2];
        let total = grad.dot(&self.to_phase_vector(&self.y_eps(&x)));
        Ok(Termwise {
            beta,
            side: beta * dh_side,
            radial: (1.0 - beta) * dh_radial,
            cutoff: side.g(&x) * db * xh3,
            total,
        })
    }

    /// Slack of `|β'| ≤ (-v̂₁x₃β + (1-β)ε^{1/2}/2) / (v̂₂(4+λ₁x₃²))` at `x₃ ≤ 0`.
    pub fn beta_condition_slack(&self, x3: f64) -> f64 {
        let u = x3.abs();
        let beta = self.beta.value(u);
        let den = self.vhat2 * (4.0 + self.scd.lambda1 * u * u);
        let rhs = (self.vhat1 * u * beta + (1.0 - beta) * self.eps.sqrt() / 2.0) / den;
        rhs - self.beta.derivative(u).abs()
    }

    /// Interpolation zone: `|x| < zone_radius` and `|x₃| < N`.
    pub fn in_zone(&self, z: &Vector4<f64>) -> bool {
        let x = self.to_x(z);
        x.norm() < self.zone_radius && x[2].abs() < self.n
    }

    /// Neck region membership: at least `ε^{1/2}` inside neither disk around
    /// the primaries.
    pub fn in_neck(&self, q: &Vector2<f64>) -> bool {
        let mu = self.scd.mu;
        let lhat = self.scd.l1[2];
        let se = self.eps.sqrt();
        (q - Primary::Earth.position(mu)).norm() >= mu + lhat - se
            && (q - Primary::Moon.position(mu)).norm() >= 1.0 - mu - lhat - se
    }
}

/// Sampling resolution for [`verify_y_eps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    /// Position grid over the whole component, per axis.
    pub global: usize,
    /// Position grid over the box of half-width `3ε^{1/2}` around `l̂₁`.
    pub neck: usize,
    /// Velocity directions per position.
    pub angles: usize,
}

impl Default for SurfaceGrid {
    fn default() -> Self {
        Self {
            global: 160,
            neck: 120,
            angles: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub samples: usize,
    pub min_margin: f64,
    pub worst_point: [f64; 4],
    pub worst_terms: Option<Termwise>,
}

impl RegionStats {
    fn empty() -> Self {
        Self {
            samples: 0,
            min_margin: f64::INFINITY,
            worst_point: [f64::NAN; 4],
            worst_terms: None,
        }
    }

    fn push(&mut self, z: &Vector4<f64>, m: f64, t: Option<Termwise>) {
        self.samples += 1;
        if m < self.min_margin {
            self.min_margin = m;
            self.worst_point = [z[0], z[1], z[2], z[3]];
            self.worst_terms = t;
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.samples += o.samples;
        if o.min_margin < self.min_margin {
            self.min_margin = o.min_margin;
            self.worst_point = o.worst_point;
            self.worst_terms = o.worst_terms;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub mu: f64,
    pub eps: f64,
    pub n: f64,
    pub chat: f64,
    pub ccheck: f64,
    pub beta_top: f64,
    /// Every on-surface sample.
    pub full: RegionStats,
    /// Samples in the interpolation zone.
    pub zone: RegionStats,
    /// Samples in the neck region `𝒩_ε`.
    pub neck: RegionStats,
    /// Largest `|(p,q) - l₁| / ε^{1/2}` over neck samples.
    pub neck_max_distance: f64,
    /// Largest `|x₃|` over neck samples.
    pub neck_max_x3: f64,
    /// Zone samples in the outer shell `|x| > 0.95·zone_radius` where the
    /// cutoff is below one, so that `Y_ε` would jump at the zone boundary.
    pub zone_boundary_mismatch: usize,
    /// Smallest slack of the cutoff condition on `[-N, -ĉ]`.
    pub beta_slack_min: f64,
    pub beta_slack_argmin: f64,
}

impl LiouvilleReport {
    pub fn transverse(&self) -> bool {
        self.full.min_margin > 0.0
    }
}

fn zone_sample(data: &InterpolationData, z: &Vector4<f64>) -> Result<(f64, Option<Termwise>)> {
    let mu = data.scd.mass_ratio();
    if data.in_zone(z) {
        let t = data.termwise(z)?;
        return Ok((t.total, Some(t)));
    }
    let grad = hamiltonian_gradient(&mu, z, Frame::Standard)?;
    let y = if z[2] < data.scd.l1[2] {
        y_e_field(mu.mu(), z)
    } else {
        y_m_field(mu.mu(), z)
    };
    Ok((grad.dot(&y), None))
}

/// Samples the component of `H = L₁ + ε` containing both primaries and
/// evaluates `dH·Y_ε` there.
///
/// Positions run over a global grid and a fine grid around `l̂₁`; at each
/// position in the Hill region the velocity circle of radius
/// `(2(E - U))^{1/2}` is sampled at `grid.angles` directions. Inside the zone
/// the interpolated field is used, elsewhere the radial field of the primary
/// on the same side of `l̂₁`.
pub fn verify_y_eps(mu: &MassRatio, eps: f64, grid: &SurfaceGrid) -> Result<LiouvilleReport> {
    if grid.global < 16 || grid.neck < 16 || grid.angles < 4 {
        return Err(invalid("grid", grid.global as f64, "resolution too small"));
    }
    let data = interpolation_data(mu, eps)?;
    let m = mu.mu();
    let r1 = mu.r1();
    let lhat = data.scd.l1[2];
    let energy = data.scd.l1_value + eps;
    let se = eps.sqrt();
    let in_component = |q: &Vector2<f64>| {
        (q - Primary::Earth.position(m)).norm() < 1.0 - r1
            || (q - Primary::Moon.position(m)).norm() < r1
            || (q - Vector2::new(lhat, 0.0)).norm() < 10.0 * se
    };
    let mut positions = Vec::new();
    let (x0, x1) = (-m - (1.0 - r1), 1.0 - m + r1);
    let ymax = (1.0 - r1).max(r1);
    for i in 0..grid.global {
        for j in 0..grid.global {
            let q = Vector2::new(
                x0 + (x1 - x0) * (i as f64 + 0.5) / grid.global as f64,
                -ymax + 2.0 * ymax * (j as f64 + 0.5) / grid.global as f64,
            );
            positions.push(q);
        }
    }
    for i in 0..grid.neck {
        for j in 0..grid.neck {
            let q = Vector2::new(
                lhat + 3.0 * se * (2.0 * (i as f64 + 0.5) / grid.neck as f64 - 1.0),
                3.0 * se * (2.0 * (j as f64 + 0.5) / grid.neck as f64 - 1.0),
            );
            positions.push(q);
        }
    }
    type Acc = (RegionStats, RegionStats, RegionStats, f64, f64, usize);
    let init = || -> Acc {
        (
            RegionStats::empty(),
            RegionStats::empty(),
            RegionStats::empty(),
            0.0,
            0.0,
            0,
        )
    };
    let acc = positions
        .par_iter()
        .map(|q| -> Result<Acc> {
            let mut acc = init();
            if !in_component(q)
                || (q - Primary::Earth.position(m)).norm() < 1e-3
                || (q - Primary::Moon.position(m)).norm() < 1e-3
            {
                return Ok(acc);
            }
            let u = effective_potential(mu, q)?;
            if u.value > energy {
                return Ok(acc);
            }
            let speed = (2.0 * (energy - u.value)).sqrt();
            let neck = data.in_neck(q);
            for k in 0..grid.angles {
                let th = 2.0 * PI * k as f64 / grid.angles as f64;
                let v = Vector2::new(speed * th.cos(), speed * th.sin());
                let z = Vector4::new(v.x + q.y, v.y - q.x, q.x, q.y);
                let (margin, terms) = zone_sample(&data, &z)?;
                acc.0.push(&z, margin, terms);
                if let Some(t) = terms {
                    acc.1.push(&z, margin, terms);
                    if t.beta < 1.0 && data.to_x(&z).norm() > 0.95 * data.zone_radius {
                        acc.5 += 1;
                    }
                }
                if neck {
                    acc.2.push(&z, margin, terms);
                    let x = data.to_x(&z);
                    acc.3 = acc.3.max((z - data.scd.l1).norm() / se);
                    acc.4 = acc.4.max(x[2].abs());
                }
            }
            Ok(acc)
        })
        .try_reduce(init, |a, b| {
            Ok((
                a.0.merge(b.0),
                a.1.merge(b.1),
                a.2.merge(b.2),
                a.3.max(b.3),
                a.4.max(b.4),
                a.5 + b.5,
            ))
        })?;
    let (mut smin, mut sarg) = (f64::INFINITY, 0.0);
    let steps = 20_000;
    for i in 0..=steps {
        let x3 = -data.n + (data.n - data.chat) * i as f64 / steps as f64;
        let s = data.beta_condition_slack(x3);
        if s < smin {
            smin = s;
            sarg = x3;
        }
    }
    Ok(LiouvilleReport {
        mu: m,
        eps,
        n: data.n,
        chat: data.chat,
        ccheck: data.ccheck,
        beta_top: data.beta.top,
        full: acc.0,
        zone: acc.1,
        neck: acc.2,
        neck_max_distance: acc.3,
        neck_max_x3: acc.4,
        zone_boundary_mismatch: acc.5,
        beta_slack_min: smin,
        beta_slack_argmin: sarg,
    })
}
