//! Birkhoff shooting for retrograde orbits around the earth and
//! differential correction of the Lyapunov orbit near `L₁`.
//!
//! Shooting works in the frame with the earth at `0` and the moon at `1`
//! and integrates in the regularized chart throughout, with physical time
//! carried along as an extra coordinate.

use crate::dynamics::{
    lagrange_values, potential_in_frame, Cr3bp, Frame, MassRatio, RotatingState,
};
use crate::error::{invalid, Cr3bpError, Result};
use crate::flow::{
    integrate_variational, Direction, EventSpec, HamiltonianSystem, Integrator, Solution,
    StateFlow, Status,
};
use crate::regularization::{
    from_regularized_to, to_regularized_from, RegularizedHamiltonian, RegularizedState,
    TimedRegularizedFlow,
};
use crate::saddle_center::SaddleCenterData;
use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Gamma1,
    Gamma2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitClass {
    Retrograde,
    Lyapunov,
    Generic,
}

/// Result of one shot: the image point `(θ, q₂)` on the `q₂` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotPoint {
    pub q1_0: f64,
    /// `arg q̇` at the crossing.
    pub theta: f64,
    pub q2: f64,
    /// Physical time to the crossing, positive for both branches.
    pub time: f64,
    /// Regularized time to the crossing (signed).
    pub sigma: f64,
    /// Start in regularized coordinates.
    pub start: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingCurve {
    pub branch: Branch,
    pub points: Vec<ShotPoint>,
    /// Estimated end of the admissible `q₁(0)` interval and the violated condition there.
    pub endpoint: Option<(f64, String)>,
}

impl ShootingCurve {
    pub fn image(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.theta, p.q2)).collect()
    }

    /// Number of pairwise intersections between non-adjacent segments.
    pub fn self_intersections(&self) -> usize {
        let pts = self.image();
        let mut count = 0;
        for i in 0..pts.len().saturating_sub(1) {
            for j in (i + 2)..pts.len().saturating_sub(1) {
                if segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]).is_some() {
                    count += 1;
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Initial state in the standard frame.
    pub state: RotatingState,
    pub period: f64,
    pub energy: f64,
    pub mu: f64,
    /// Monodromy; regularized chart for retrograde orbits (double cover), Cartesian otherwise.
    pub monodromy: Matrix4<f64>,
    pub multipliers: Vec<[f64; 2]>,
    pub index: Option<i64>,
    /// Number of physical periods the index refers to.
    pub index_covers: usize,
    pub orbit_class: OrbitClass,
    pub closure_residual: f64,
    pub energy_drift: f64,
    pub action: Option<f64>,
    /// Regularized start and regularized time of the closed lift (two periods).
    pub regularized: Option<([f64; 4], f64)>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub samples: usize,
    pub rtol: f64,
    pub atol: f64,
    pub sigma_max: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub compute_index: bool,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            samples: 120,
            rtol: 1e-12,
            atol: 1e-13,
            sigma_max: 200.0,
            newton_tol: 1e-11,
            max_newton: 40,
            compute_index: true,
        }
    }
}

fn u_eo(mu: &MassRatio, q1: f64, q2: f64) -> Result<f64> {
    Ok(potential_in_frame(mu, &Vector2::new(q1, q2), Frame::EarthOrigin)?.value)
}

/// `(q̄₁, q_right)`: axis boundaries of the earth component of the Hill
/// region in the earth-origin frame; `q_right` is capped at `L₁`.
pub fn axis_interval(mu: &MassRatio, energy: f64) -> Result<(f64, f64)> {
    let ld = lagrange_values(mu);
    let l1_eo = ld.lhat1 + mu.mu();
    let f = |x: f64| u_eo(mu, x, 0.0).unwrap_or(f64::NEG_INFINITY) - energy;
    // maximum of U on the negative axis
    let (mut lo, mut hi) = (-2.5, -1e-9);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) > f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let qmax = 0.5 * (lo + hi);
    if f(qmax) < 0.0 {
        return Err(invalid(
            "energy",
            energy,
            "earth component of the Hill region is not bounded on the negative axis",
        ));
    }
    let left = crate::dynamics::bisect(f, qmax, -1e-12, 1e-15);
    let right = if f(l1_eo) > 0.0 {
        crate::dynamics::bisect(f, 1e-12, l1_eo, 1e-15)
    } else {
        l1_eo
    };
    Ok((left, right))
}

fn start_state(mu: &MassRatio, energy: f64, q1_0: f64, branch: Branch) -> Result<RotatingState> {
    let u = u_eo(mu, q1_0, 0.0)?;
    let k = 2.0 * (energy - u);
    if k <= 0.0 {
        return Err(Cr3bpError::OutsideHillRegion { excess: -k / 2.0 });
    }
    let v = k.sqrt();
    let vdir = match branch {
        Branch::Gamma1 => -v,
        Branch::Gamma2 => v,
    };
    Ok(RotatingState::from_velocity(
        Vector2::new(q1_0, 0.0),
        Vector2::new(0.0, vdir),
    ))
}

// q in the earth-origin frame from regularized coordinates
fn q_eo(y: &[f64]) -> Vector2<f64> {
    Vector2::new(
        0.5 * y[2].cosh() * y[3].cos() + 0.5,
        0.5 * y[2].sinh() * y[3].sin(),
    )
}

fn state_eo(mu: &MassRatio, y: &[f64]) -> Result<RotatingState> {
    let rs = RegularizedState::from_vec(&Vector4::new(y[0], y[1], y[2], y[3]));
    from_regularized_to(mu, &rs, Frame::EarthOrigin)
}

/// Shoots one trajectory of the family `branch` from `(q1_0, 0)`.
pub fn shoot(
    mu: &MassRatio,
    energy: f64,
    q1_0: f64,
    branch: Branch,
    cfg: &ShootingConfig,
) -> Result<ShotPoint> {
    match branch {
        Branch::Gamma1 if q1_0 >= 0.0 => {
            return Err(invalid("q1_0", q1_0, "Γ₁ starts on the negative axis"))
        }
        Branch::Gamma2 if q1_0 <= 0.0 => {
            return Err(invalid("q1_0", q1_0, "Γ₂ starts on the positive axis"))
        }
        _ => {}
    }
    let s0 = start_state(mu, energy, q1_0, branch)?;
    let rs = to_regularized_from(mu, &s0, Frame::EarthOrigin)?;
    let ham = RegularizedHamiltonian::new(mu.mu(), energy);
    let flow = TimedRegularizedFlow {
        ham: &ham,
        variational: false,
    };
    let z = rs.to_vec();
    let y0 = [z[0], z[1], z[2], z[3], 0.0];
    let sign = match branch {
        Branch::Gamma1 => 1.0,
        Branch::Gamma2 => -1.0,
    };
    let guard = 1e-10;
    let cross_dir = match branch {
        Branch::Gamma1 => Direction::Increasing,
        Branch::Gamma2 => Direction::Decreasing,
    };
    let events = [
        EventSpec::new(|_, y: &[f64]| q_eo(y).x, cross_dir, true),
        EventSpec::new(
            move |_, y: &[f64]| if y[4].abs() < guard { -1.0 } else { q_eo(y).y },
            Direction::Increasing,
            true,
        ),
        EventSpec::new(
            move |_, y: &[f64]| {
                if y[4].abs() < guard {
                    return 1.0;
                }
                state_eo(mu, y).map(|s| s.velocity().x).unwrap_or(1.0)
            },
            Direction::Decreasing,
            true,
        ),
    ];
    let integ = Integrator::with_tol(cfg.rtol, cfg.atol).sparse();
    let sol = integ
        .integrate(&flow, 0.0, &y0, sign * cfg.sigma_max, &events)
        .ok()?;
    let hit = match sol.status {
        Status::Terminated(i) => sol.events.last().filter(|h| h.index == i).cloned(),
        _ => None,
    };
    let hit = hit.ok_or_else(|| {
        Cr3bpError::Shooting(format!(
            "no return to the q2 axis within regularized time {}",
            cfg.sigma_max
        ))
    })?;
    match hit.index {
        0 => {}
        1 => {
            let case = if branch == Branch::Gamma1 {
                "(b)"
            } else {
                "(f)"
            };
            return Err(Cr3bpError::Shooting(format!(
                "case {case}: trajectory returned to the q1 axis at t = {:.6} before reaching the q2 axis",
                hit.y[4]
            )));
        }
        _ => {
            let case = if branch == Branch::Gamma1 {
                "(c)"
            } else {
                "(c')"
            };
            return Err(Cr3bpError::Shooting(format!(
                "case {case}: q̇1 vanished at t = {:.6} before reaching the q2 axis",
                hit.y[4]
            )));
        }
    }
    let s = state_eo(mu, &hit.y)?;
    let v = s.velocity();
    if s.q.y > -1e-9 {
        let case = if branch == Branch::Gamma1 {
            "(a)"
        } else {
            "(e)"
        };
        return Err(Cr3bpError::Shooting(format!(
            "case {case}: crossing at the collision point"
        )));
    }
    Ok(ShotPoint {
        q1_0,
        theta: v.y.atan2(v.x),
        q2: s.q.y,
        time: hit.y[4].abs(),
        sigma: hit.t,
        start: [z[0], z[1], z[2], z[3]],
    })
}

fn sample_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    // cosine clustering at both ends plus a geometric tail towards `hi`
    let mut v: Vec<f64> = (1..n)
        .map(|i| {
            let u = i as f64 / n as f64;
            lo + (hi - lo) * 0.5 * (1.0 - (std::f64::consts::PI * u).cos())
        })
        .collect();
    let w = (hi - lo).abs();
    for k in 3..9 {
        v.push(hi - (hi - lo) * 10f64.powi(-k) / w.max(1e-300) * w);
    }
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    v
}

/// Samples `Γ₁` (or `Γ₂`) ordered from `q₁(0) → 0` outwards and estimates
/// the end of the admissible interval by bisection on failure.
pub fn shooting_curve(
    mu: &MassRatio,
    energy: f64,
    branch: Branch,
    cfg: &ShootingConfig,
) -> Result<ShootingCurve> {
    let (left, right) = axis_interval(mu, energy)?;
    // parameter s ∈ (0, 1) measures the distance from the earth
    let (lo, hi) = match branch {
        Branch::Gamma1 => (left, 0.0),
        Branch::Gamma2 => (right, 0.0),
    };
    let grid = sample_grid(lo, hi, cfg.samples);
    let mut grid: Vec<f64> = grid
        .into_iter()
        .filter(|&x| x != lo && x != hi && (x - hi).abs() > 1e-9)
        .collect();
    // order from the earth outwards
    grid.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let results: Vec<(f64, Result<ShotPoint>)> = grid
        .par_iter()
        .map(|&q| (q, shoot(mu, energy, q, branch, cfg)))
        .collect();
    let mut points = Vec::new();
    let mut endpoint = None;
    let mut last_ok = None;
    for (q, r) in results {
        match r {
            Ok(p) => {
                points.push(p);
                last_ok = Some(q);
            }
            Err(e) => {
                // bisect between the last success and this failure
                let mut a = last_ok.unwrap_or(0.0);
                let mut b = q;
                let mut reason = e.to_string();
                if last_ok.is_some() {
                    for _ in 0..40 {
                        let m = 0.5 * (a + b);
                        match shoot(mu, energy, m, branch, cfg) {
                            Ok(_) => a = m,
                            Err(e) => {
                                b = m;
                                reason = e.to_string();
                            }
                        }
                        if (b - a).abs() < 1e-10 {
                            break;
                        }
                    }
                }
                endpoint = Some((0.5 * (a + b), reason));
                break;
            }
        }
    }
    Ok(ShootingCurve {
        branch,
        points,
        endpoint,
    })
}

/// Intersection parameters `(s, t) ∈ [0,1]²` of segments `p0p1` and `q0q1`.
pub fn segment_intersection(
    p0: (f64, f64),
    p1: (f64, f64),
    q0: (f64, f64),
    q1: (f64, f64),
) -> Option<(f64, f64)> {
    let r = (p1.0 - p0.0, p1.1 - p0.1);
    let s = (q1.0 - q0.0, q1.1 - q0.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den.abs() < 1e-300 {
        return None;
    }
    let d = (q0.0 - p0.0, q0.1 - p0.1);
    let t = (d.0 * s.1 - d.1 * s.0) / den;
    let u = (d.0 * r.1 - d.1 * r.0) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// All transversal crossings of two sampled curves, as interpolated
/// `(q1_0 on Γ₁, q1_0 on Γ₂)` pairs.
pub fn curve_crossings(g1: &ShootingCurve, g2: &ShootingCurve) -> Vec<(f64, f64)> {
    let (a, b) = (g1.image(), g2.image());
    let mut out = Vec::new();
    for i in 0..a.len().saturating_sub(1) {
        for j in 0..b.len().saturating_sub(1) {
            if let Some((s, t)) = segment_intersection(a[i], a[i + 1], b[j], b[j + 1]) {
                let qa = g1.points[i].q1_0 + s * (g1.points[i + 1].q1_0 - g1.points[i].q1_0);
                let qb = g2.points[j].q1_0 + t * (g2.points[j + 1].q1_0 - g2.points[j].q1_0);
                out.push((qa, qb));
            }
        }
    }
    out
}

fn mismatch(mu: &MassRatio, e: f64, a: f64, b: f64, cfg: &ShootingConfig) -> Result<Vector2<f64>> {
    let p = shoot(mu, e, a, Branch::Gamma1, cfg)?;
    let q = shoot(mu, e, b, Branch::Gamma2, cfg)?;
    Ok(Vector2::new(p.theta - q.theta, p.q2 - q.q2))
}

/// Damped Newton on `Γ₁(a) − Γ₂(b) = 0` with a finite-difference Jacobian.
pub fn refine_crossing(
    mu: &MassRatio,
    energy: f64,
    seed: (f64, f64),
    bracket: f64,
    cfg: &ShootingConfig,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = seed;
    let mut f = mismatch(mu, energy, a, b, cfg)?;
    for _ in 0..cfg.max_newton {
        if f.norm() < cfg.newton_tol {
            return Ok((a, b));
        }
        let ha = 1e-7 * a.abs().max(1e-3);
        let hb = 1e-7 * b.abs().max(1e-3);
        let fa = (mismatch(mu, energy, a + ha, b, cfg)? - mismatch(mu, energy, a - ha, b, cfg)?)
            / (2.0 * ha);
        let fb = (mismatch(mu, energy, a, b + hb, cfg)? - mismatch(mu, energy, a, b - hb, cfg)?)
            / (2.0 * hb);
        let jac = Matrix2::new(fa.x, fb.x, fa.y, fb.y);
        let step = jac
            .try_inverse()
            .ok_or_else(|| Cr3bpError::Shooting("singular crossing Jacobian".into()))?
            * (-f);
        let clamp = 0.2 * bracket;
        let scale = if step.amax() > clamp {
            clamp / step.amax()
        } else {
            1.0
        };
        let mut lam = scale;
        let mut accepted = false;
        for _ in 0..12 {
            let (na, nb) = (a + lam * step.x, b + lam * step.y);
            if na < 0.0 && nb > 0.0 {
                if let Ok(nf) = mismatch(mu, energy, na, nb, cfg) {
                    if nf.norm() < f.norm() {
                        a = na;
                        b = nb;
                        f = nf;
                        accepted = true;
                        break;
                    }
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if f.norm() < cfg.newton_tol * 10.0 {
        return Ok((a, b));
    }
    Err(Cr3bpError::NoConvergence {
        iterations: cfg.max_newton,
        residual: f.norm(),
    })
}

fn multipliers(m: &Matrix4<f64>) -> Vec<[f64; 2]> {
    let mut v: Vec<[f64; 2]> = m
        .complex_eigenvalues()
        .iter()
        .map(|c| [c.re, c.im])
        .collect();
    v.sort_by(|a, b| (a[0] * a[0] + a[1] * a[1]).total_cmp(&(b[0] * b[0] + b[1] * b[1])));
    v
}

/// Integrates the regularized flow until physical time `t_end`.
fn reg_until(
    ham: &RegularizedHamiltonian,
    z0: &Vector4<f64>,
    t_end: f64,
    sigma_max: f64,
    integ: &Integrator,
) -> Result<Solution> {
    let flow = TimedRegularizedFlow {
        ham,
        variational: false,
    };
    let y0 = [z0[0], z0[1], z0[2], z0[3], 0.0];
    let sign = t_end.signum();
    let ev = [EventSpec::new(
        move |_, y: &[f64]| y[4] - t_end,
        Direction::Both,
        true,
    )];
    let sol = integ
        .integrate(&flow, 0.0, &y0, sign * sigma_max, &ev)
        .ok()?;
    match sol.status {
        Status::Terminated(_) => Ok(sol),
        _ => Err(Cr3bpError::Integration {
            t: sol.last().0,
            reason: "physical time not reached".into(),
        }),
    }
}

/// `∮ y·dx` over a regularized solution with dense output.
fn action_of(ham: &RegularizedHamiltonian, sol: &Solution) -> Result<f64> {
    let nodes = [
        (0.5 - 0.5 * (3.0f64 / 5.0).sqrt(), 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + 0.5 * (3.0f64 / 5.0).sqrt(), 5.0 / 18.0),
    ];
    let mut acc = 0.0;
    for st in &sol.dense {
        for (x, w) in nodes {
            let y = st.eval(st.t0 + x * st.h);
            let z = Vector4::new(y[0], y[1], y[2], y[3]);
            let g = ham.gradient(&z)?;
            acc += w * st.h * (y[0] * g[0] + y[1] * g[1]);
        }
    }
    Ok(acc)
}

fn wrap_diff(a: &[f64], b: &[f64]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        let mut x = (a[i] - b[i]).abs();
        if i == 3 {
            x = x.rem_euclid(TAU);
            x = x.min(TAU - x);
        }
        d = d.max(x);
    }
    d
}

/// Retrograde orbit around the earth at `(μ, E)` from a crossing of `Γ₁`
/// and `Γ₂`; `seed` skips curve sampling and starts Newton directly.
pub fn find_retrograde(
    mu: &MassRatio,
    energy: f64,
    seed: Option<(f64, f64)>,
    cfg: &ShootingConfig,
) -> Result<PeriodicOrbit> {
    let (a, b) = match seed {
        Some(s) => refine_crossing(mu, energy, s, s.0.abs().max(s.1.abs()), cfg)?,
        None => {
            let g1 = shooting_curve(mu, energy, Branch::Gamma1, cfg)?;
            let g2 = shooting_curve(mu, energy, Branch::Gamma2, cfg)?;
            let cs = curve_crossings(&g1, &g2);
            let first = cs.first().copied().ok_or_else(|| {
                Cr3bpError::Shooting(format!(
                    "no crossing of Γ1 ({} samples, end {:?}) and Γ2 ({} samples, end {:?})",
                    g1.points.len(),
                    g1.endpoint,
                    g2.points.len(),
                    g2.endpoint
                ))
            })?;
            let bracket = first.0.abs().max(first.1.abs());
            refine_crossing(mu, energy, first, bracket, cfg)?
        }
    };
    retrograde_from_crossing(mu, energy, a, b, cfg)
}

fn retrograde_from_crossing(
    mu: &MassRatio,
    energy: f64,
    a: f64,
    b: f64,
    cfg: &ShootingConfig,
) -> Result<PeriodicOrbit> {
    let p1 = shoot(mu, energy, a, Branch::Gamma1, cfg)?;
    let p2 = shoot(mu, energy, b, Branch::Gamma2, cfg)?;
    let period = 2.0 * (p1.time + p2.time);
    let ham = RegularizedHamiltonian::new(mu.mu(), energy);
    let z0 = Vector4::from_row_slice(&p1.start);
    let integ = Integrator::with_tol(cfg.rtol, cfg.atol).dense();
    // one physical period
    let one = reg_until(&ham, &z0, period, cfg.sigma_max * 4.0, &integ)?;
    let (_, y1) = one.last();
    let s_start = state_eo(mu, &p1.start)?;
    let s_end = state_eo(mu, y1)?;
    let closure = (s_end.to_vec() - s_start.to_vec()).amax();
    // closed lift: two physical periods
    let two = reg_until(&ham, &z0, 2.0 * period, cfg.sigma_max * 8.0, &integ)?;
    let (sig2, y2) = two.last();
    let lift_closure = wrap_diff(y2, &p1.start);
    let drift = two
        .y
        .iter()
        .map(|y| {
            ham.energy(&Vector4::new(y[0], y[1], y[2], y[3]))
                .unwrap_or(f64::NAN)
                .abs()
        })
        .fold(0.0, f64::max);
    let action = action_of(&ham, &one)?;
    let (zf, psi, _) =
        integrate_variational(&ham, &z0, sig2, &Integrator::with_tol(cfg.rtol, cfg.atol))?;
    let _ = zf;
    let index = if cfg.compute_index {
        Some(crate::index::orbit_index(&ham, &z0, sig2, 1)?)
    } else {
        None
    };
    let std = crate::dynamics::from_frame(mu, &s_start, Frame::EarthOrigin);
    Ok(PeriodicOrbit {
        state: std,
        period,
        energy,
        mu: mu.mu(),
        monodromy: psi,
        multipliers: multipliers(&psi),
        index,
        index_covers: 2,
        orbit_class: OrbitClass::Retrograde,
        closure_residual: closure.max(lift_closure),
        energy_drift: drift,
        action: Some(action),
        regularized: Some((p1.start, sig2)),
    })
}

/// Largest deviation `|q(t) − conj q(−t)|` over `n` sample times in `(0, T/2)`.
pub fn symmetry_defect(orbit: &PeriodicOrbit, n: usize) -> Result<f64> {
    let mu = MassRatio::new(orbit.mu)?;
    let (start, _) = orbit.regularized.ok_or_else(|| {
        Cr3bpError::Unsupported("symmetry check needs the regularized start".into())
    })?;
    let ham = RegularizedHamiltonian::new(orbit.mu, orbit.energy);
    let z0 = Vector4::from_row_slice(&start);
    let integ = Integrator::with_tol(1e-12, 1e-13).sparse();
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let t = 0.5 * orbit.period * k as f64 / (n + 1) as f64;
        let f = reg_until(&ham, &z0, t, 1e3, &integ)?;
        let g = reg_until(&ham, &z0, -t, 1e3, &integ)?;
        let qf = state_eo(&mu, f.last().1)?.q;
        let qg = state_eo(&mu, g.last().1)?.q;
        worst = worst.max((qf.x - qg.x).abs()).max((qf.y + qg.y).abs());
    }
    Ok(worst)
}

/// Retrograde orbits along a list of energies, each Newton solve seeded by
/// the previous crossing.
pub fn retrograde_family(
    mu: &MassRatio,
    energies: &[f64],
    cfg: &ShootingConfig,
) -> Result<Vec<(PeriodicOrbit, (f64, f64))>> {
    let mut out = Vec::new();
    let mut seed: Option<(f64, f64)> = None;
    for &e in energies {
        let (a, b) = match seed {
            Some(s) => refine_crossing(mu, e, s, s.0.abs().max(s.1.abs()), cfg)
                .or_else(|_| crossing_from_curves(mu, e, cfg))?,
            None => crossing_from_curves(mu, e, cfg)?,
        };
        let orbit = retrograde_from_crossing(mu, e, a, b, cfg)?;
        seed = Some((a, b));
        out.push((orbit, (a, b)));
    }
    Ok(out)
}

fn crossing_from_curves(mu: &MassRatio, e: f64, cfg: &ShootingConfig) -> Result<(f64, f64)> {
    let g1 = shooting_curve(mu, e, Branch::Gamma1, cfg)?;
    let g2 = shooting_curve(mu, e, Branch::Gamma2, cfg)?;
    let first = curve_crossings(&g1, &g2)
        .first()
        .copied()
        .ok_or_else(|| Cr3bpError::Shooting("no crossing of Γ1 and Γ2".into()))?;
    refine_crossing(mu, e, first, first.0.abs().max(first.1.abs()), cfg)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub rtol: f64,
    pub atol: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub compute_index: bool,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            atol: 1e-15,
            tol: 1e-13,
            max_iter: 40,
            compute_index: true,
        }
    }
}

fn lyapunov_state(mu: &MassRatio, energy: f64, q1: f64, up: bool) -> Result<RotatingState> {
    let u = crate::dynamics::effective_potential(mu, &Vector2::new(q1, 0.0))?.value;
    let k = 2.0 * (energy - u);
    if k <= 0.0 {
        return Err(Cr3bpError::OutsideHillRegion { excess: -k / 2.0 });
    }
    let v = if up { k.sqrt() } else { -k.sqrt() };
    Ok(RotatingState::from_velocity(
        Vector2::new(q1, 0.0),
        Vector2::new(0.0, v),
    ))
}

// (q̇₁ at the next q₂ = 0 crossing, half period, state there)
fn lyapunov_half(
    sys: &Cr3bp,
    energy: f64,
    q1: f64,
    up: bool,
    integ: &Integrator,
    t_max: f64,
) -> Result<(f64, f64, Vector4<f64>)> {
    let s = lyapunov_state(&sys.mu, energy, q1, up)?;
    let ev = [EventSpec::new(|_, y: &[f64]| y[3], Direction::Both, true)];
    let sol = integ
        .integrate(&StateFlow(sys), 0.0, s.to_vec().as_slice(), t_max, &ev)
        .ok()?;
    match (sol.status.clone(), sol.events.last()) {
        (Status::Terminated(_), Some(h)) => {
            let z = Vector4::from_row_slice(&h.y);
            Ok((z[0] - z[3], h.t, z))
        }
        _ => Err(Cr3bpError::Shooting("no return to the q1 axis".into())),
    }
}

/// Lyapunov orbit at energy `L₁ + ε`, seeded from the linear flow of `H₂`
/// and corrected by Newton on the symmetric half-period condition `q̇₁ = 0`.
pub fn lyapunov_orbit(mu: &MassRatio, eps: f64, cfg: &LyapunovConfig) -> Result<PeriodicOrbit> {
    if eps <= 0.0 {
        return Err(invalid(
            "eps",
            eps,
            "energy must lie above the first Lagrange value",
        ));
    }
    let scd = SaddleCenterData::new(mu);
    let energy = scd.l1_value + eps;
    let x0 = scd.linear_lyapunov(1.0, 0.0)?;
    let z_seed = scd.rescaled_to_phase(eps, &x0);
    let v_seed = z_seed[1] + z_seed[2];
    let up = v_seed > 0.0;
    let sys = Cr3bp::new(*mu);
    let integ = Integrator::with_tol(cfg.rtol, cfg.atol).sparse();
    let t_max = 2.0 * scd.linear_period();
    let mut q = z_seed[2];
    let scale = eps.sqrt();
    let f = |q: f64| lyapunov_half(&sys, energy, q, up, &integ, t_max).map(|r| r.0);
    let mut fq = f(q)?;
    let mut iters = 0;
    while fq.abs() > cfg.tol {
        iters += 1;
        if iters > cfg.max_iter {
            return Err(Cr3bpError::NoConvergence {
                iterations: iters,
                residual: fq.abs(),
            });
        }
        let h = 1e-7 * scale;
        let d = (f(q + h)? - f(q - h)?) / (2.0 * h);
        let mut step = -fq / d;
        if step.abs() > 0.5 * scale {
            step = 0.5 * scale * step.signum();
        }
        let nq = q + step;
        if (nq - z_seed[2]).abs() > 10.0 * scale {
            return Err(Cr3bpError::Shooting(format!(
                "differential correction left the neck (last q1 = {nq})"
            )));
        }
        let nf = f(nq)?;
        q = nq;
        fq = nf;
    }
    let (_, half, _) = lyapunov_half(&sys, energy, q, up, &integ, t_max)?;
    let period = 2.0 * half;
    let z0 = lyapunov_state(mu, energy, q, up)?.to_vec();
    let (z_end, psi, sol) =
        integrate_variational(&sys, &z0, period, &Integrator::with_tol(cfg.rtol, cfg.atol))?;
    let closure = (z_end - z0).amax();
    let drift = crate::flow::energy_drift(&sys, &sol)?;
    let index = if cfg.compute_index {
        Some(crate::index::orbit_index(&sys, &z0, period, 1)?)
    } else {
        None
    };
    Ok(PeriodicOrbit {
        state: RotatingState::from_vec(&z0),
        period,
        energy,
        mu: mu.mu(),
        monodromy: psi,
        multipliers: multipliers(&psi),
        index,
        index_covers: 1,
        orbit_class: OrbitClass::Lyapunov,
        closure_residual: closure,
        energy_drift: drift,
        action: None,
        regularized: None,
    })
}

/// Diameter of the `q`-projection of a Cartesian orbit.
pub fn projection_diameter(orbit: &PeriodicOrbit, n: usize) -> Result<f64> {
    let mu = MassRatio::new(orbit.mu)?;
    let sys = Cr3bp::new(mu);
    let integ = Integrator::with_tol(1e-12, 1e-14).dense();
    let z0 = orbit.state.to_vec();
    let sol = integ
        .integrate(&StateFlow(&sys), 0.0, z0.as_slice(), orbit.period, &[])
        .ok()?;
    let pts: Vec<Vector2<f64>> = (0..n)
        .filter_map(|k| sol.interpolate(orbit.period * k as f64 / n as f64))
        .map(|y| Vector2::new(y[2], y[3]))
        .collect();
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    Ok(d)
}

/// `true` if the transverse multipliers are real, positive and off the unit circle.
pub fn transverse_hyperbolic(orbit: &PeriodicOrbit) -> bool {
    let m = &orbit.multipliers;
    m.len() == 4
        && m[0][1].abs() < 1e-8
        && m[3][1].abs() < 1e-8
        && m[0][0] > 0.0
        && (m[3][0] - 1.0) > 1e-6
        && (m[0][0] * m[3][0] - 1.0).abs() < 1e-6
}
