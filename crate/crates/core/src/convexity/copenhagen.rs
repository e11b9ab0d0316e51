//! The regularized μ = ½ problem: `F = (sin 2x₂, sinh 2x₁)/8`,
//! `V = W₁(x₁) + W₂(x₂)`, level `0`, and the closed forms in
//! `(s₁, s₂) = (cosh x₁, cos x₂)` used to certify `det U_W > 0`.

use super::{det_from_jet, radius, MagneticModel, ModelJet};
use crate::error::{invalid, Result};
use crate::regularization::Jet2;
use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

/// μ = ½ regularized Hamiltonian at energy `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Copenhagen {
    pub h: f64,
}

/// The model is meant for `h ≤ −2`, where the Hill region component around
/// a primary is a disk (touching `S±` at `h = −2`).
pub fn copenhagen_model(h: f64) -> Copenhagen {
    Copenhagen { h }
}

impl Copenhagen {
    fn k(&self) -> f64 {
        8.0 * self.h - 1.0
    }

    /// `W₁` as a function of `s₁`, expanded in `u = s₁ − 1` so that the value
    /// at `s₁ = 1` carries no cancellation.
    pub fn w1(&self, s1: f64) -> f64 {
        self.w1_u(s1 - 1.0)
    }

    fn w1_u(&self, u: f64) -> f64 {
        let h = self.h;
        -(1.0 + u) / 32.0 * ((16.0 + 8.0 * h) + (8.0 * h + 2.0) * u + 3.0 * u * u + u * u * u)
    }

    pub fn w2(&self, s2: f64) -> f64 {
        s2 * s2 / 32.0 * (self.k() + s2 * s2)
    }

    /// `V(s₁, s₂)`.
    pub fn potential_s(&self, s1: f64, s2: f64) -> f64 {
        self.w1(s1) + self.w2(s2)
    }

    fn dw1(&self, s1: f64) -> f64 {
        -(16.0 + 2.0 * self.k() * s1 + 4.0 * s1.powi(3)) / 32.0
    }

    fn d2w1(&self, s1: f64) -> f64 {
        -(2.0 * self.k() + 12.0 * s1 * s1) / 32.0
    }

    fn dw2(&self, s2: f64) -> f64 {
        s2 / 16.0 * (self.k() + 2.0 * s2 * s2)
    }

    fn d2w2(&self, s2: f64) -> f64 {
        (2.0 * self.k() + 12.0 * s2 * s2) / 32.0
    }

    /// `r(s₁, s₂) = √(−2V)`, NaN outside the Hill region.
    pub fn r_s(&self, s1: f64, s2: f64) -> f64 {
        (-2.0 * self.potential_s(s1, s2)).sqrt()
    }

    /// `V₁ = ∂_{x₁}W₁ ≥ 0` for `x₁ ≥ 0`.
    pub fn v1_s(&self, s1: f64) -> f64 {
        self.dw1(s1) * (s1 * s1 - 1.0).max(0.0).sqrt()
    }

    /// `V₂ = ∂_{x₂}W₂ ≥ 0` for `x₂ ∈ [0, π/2]`.
    pub fn v2_s(&self, s2: f64) -> f64 {
        -self.dw2(s2) * (1.0 - s2 * s2).max(0.0).sqrt()
    }

    pub fn v11_s(&self, s1: f64) -> f64 {
        self.d2w1(s1) * (s1 * s1 - 1.0) + self.dw1(s1) * s1
    }

    pub fn v22_s(&self, s2: f64) -> f64 {
        self.d2w2(s2) * (1.0 - s2 * s2) - self.dw2(s2) * s2
    }

    /// `(x̄₁, s̄₁)` with `V(x̄₁, 0) = 0`: the extent of the Hill region along `x₂ = 0`.
    pub fn hill_bound(&self) -> (f64, f64) {
        let f = |s1: f64| self.potential_s(s1, 1.0);
        let mut hi = 1.0;
        while f(hi) < 0.0 {
            hi += 0.01;
        }
        let s = bisect(f, hi - 0.01, hi);
        (s.acosh(), s)
    }

    /// `x₁ ≥ 0` on `∂ℋ` at height `x₂`, or `None` when `(0, x₂)` is outside.
    pub fn boundary_x1(&self, x2: f64) -> Option<f64> {
        let s2 = x2.cos();
        if self.potential_s(1.0, s2) > 0.0 {
            return None;
        }
        let (xbar, _) = self.hill_bound();
        Some(bisect(|x1| self.jet_value(x1, s2), 0.0, xbar))
    }

    fn jet_value(&self, x1: f64, s2: f64) -> f64 {
        let u = 2.0 * (0.5 * x1).sinh().powi(2);
        self.w1_u(u) + self.w2(s2)
    }

    /// Whether the saddles `S± = (0, ±π/2)` belong to the Hill region.
    pub fn contains_saddles(&self) -> bool {
        self.potential_s(1.0, 0.0) <= 1e-14
    }

    /// `c₋₁ = −r f₂,₁₁ + V₁₁`, the smallest of `c_t` over `t ∈ [−1, 1]`.
    pub fn c_minus_one(&self, s1: f64, s2: f64) -> f64 {
        let p = SlicePoint::from_s1(s1);
        self.c_minus_one_at(&p, s2)
    }

    fn c_minus_one_at(&self, p: &SlicePoint, s2: f64) -> f64 {
        let r = (-2.0 * (self.w1_u(p.u) + self.w2(s2))).sqrt();
        -r * p.s1 * p.sh + self.d2w1(p.s1) * p.sh * p.sh + self.dw1(p.s1) * p.s1
    }

    /// `D̂(s₂) = r(0, x₂) f₁,₂₂ + V₂₂`, i.e. `d_s` at `x₁ = 0`, `s = 1`.
    pub fn d_hat(&self, s2: f64) -> f64 {
        -self.r_s(1.0, s2) * s2 * (1.0 - s2 * s2).max(0.0).sqrt() + self.v22_s(s2)
    }

    /// `W₀ = V₁²/c₋₁ + r²`.
    pub fn w0(&self, s1: f64, s2: f64) -> f64 {
        self.w0_at(&SlicePoint::from_s1(s1), s2)
    }

    fn w0_at(&self, p: &SlicePoint, s2: f64) -> f64 {
        let v1 = self.dw1(p.s1) * p.sh;
        v1 * v1 / self.c_minus_one_at(p, s2) - 2.0 * (self.w1_u(p.u) + self.w2(s2))
    }

    /// `I₀ = V₂² + D̂ W₀`.
    pub fn i0(&self, s1: f64, s2: f64) -> f64 {
        self.i0_at(&SlicePoint::from_s1(s1), s2)
    }

    /// `I₀` at `x₁` rather than `s₁`; accurate close to `x₁ = 0`.
    pub fn i0_x(&self, x1: f64, s2: f64) -> f64 {
        self.i0_at(&SlicePoint::from_x1(x1), s2)
    }

    fn i0_at(&self, p: &SlicePoint, s2: f64) -> f64 {
        self.v2_s(s2).powi(2) + self.d_hat(s2) * self.w0_at(p, s2)
    }
}

/// `s₁ = cosh x₁`, `u = s₁ − 1` and `sinh |x₁|`.
struct SlicePoint {
    s1: f64,
    u: f64,
    sh: f64,
}

impl SlicePoint {
    fn from_s1(s1: f64) -> Self {
        Self {
            s1,
            u: s1 - 1.0,
            sh: (s1 * s1 - 1.0).max(0.0).sqrt(),
        }
    }

    fn from_x1(x1: f64) -> Self {
        Self {
            s1: x1.cosh(),
            u: 2.0 * (0.5 * x1).sinh().powi(2),
            sh: x1.sinh().abs(),
        }
    }
}

impl MagneticModel for Copenhagen {
    fn jet(&self, x: &Vector2<f64>) -> ModelJet {
        let (sh, s1) = (x.x.sinh(), x.x.cosh());
        let u = 2.0 * (0.5 * x.x).sinh().powi(2);
        let (sn, s2) = x.y.sin_cos();
        let v = Jet2 {
            value: self.w1_u(u) + self.w2(s2),
            grad: Vector2::new(self.dw1(s1) * sh, -self.dw2(s2) * sn),
            hess: Matrix2::new(
                self.d2w1(s1) * sh * sh + self.dw1(s1) * s1,
                0.0,
                0.0,
                self.d2w2(s2) * sn * sn - self.dw2(s2) * s2,
            ),
        };
        let f1 = Jet2 {
            value: sn * s2 / 4.0,
            grad: Vector2::new(0.0, (2.0 * x.y).cos() / 4.0),
            hess: Matrix2::new(0.0, 0.0, 0.0, -sn * s2),
        };
        let f2 = Jet2 {
            value: sh * s1 / 4.0,
            grad: Vector2::new((2.0 * x.x).cosh() / 4.0, 0.0),
            hess: Matrix2::new(sh * s1, 0.0, 0.0, 0.0),
        };
        ModelJet { f: [f1, f2], v }
    }

    fn decoupled(&self) -> bool {
        true
    }
}

pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `h` solving `V(1, s₂) = 0`: `−(16 + s₂² − s₂⁴)/(8(1 − s₂²))`.
pub fn underline_h(s2: f64) -> f64 {
    let l = s2 * s2;
    -(16.0 + l - l * l) / (8.0 * (1.0 - l))
}

/// `h` solving `∂_h D̂(s₂, h) = 0`.
pub fn bar_h(s2: f64) -> f64 {
    let l = s2 * s2;
    (16.0 - 67.0 * l + 71.0 * l * l - 4.0 * l * l * l) / (8.0 * (l - 1.0) * (2.0 * l - 1.0).powi(2))
}

/// Closed form of `D̂(s₂, h)` (times 16 on the left of the displayed identity).
pub fn hat_d_closed(s2: f64, h: f64) -> f64 {
    let l = s2 * s2;
    (-1.0 + 8.0 * l - 8.0 * l * l + h * (8.0 - 16.0 * l)
        - 4.0 * s2 * (1.0 - l).sqrt() * (16.0 + l - l * l + 8.0 * h * (1.0 - l)).sqrt())
        / 16.0
}

/// `D(s₂) = D̂(s₂, −2)`.
pub fn d_of(s2: f64) -> f64 {
    let l = s2 * s2;
    (-17.0 - 8.0 * l * l + 40.0 * l - 4.0 * l * (1.0 - l).sqrt() * (17.0 - l).sqrt()) / 16.0
}

/// The unique zero of `D` in `(0, 1)`.
pub fn shat2() -> f64 {
    bisect(d_of, 0.0, 1.0)
}

/// Second zero of `h̄ + 2`: `½((57 − √129)/30)^{1/2}`.
pub fn s20() -> f64 {
    0.5 * ((57.0 - 129f64.sqrt()) / 30.0).sqrt()
}

/// `ŝ₁` with `V(ŝ₁, 5/8) = 0` at `h = −2`.
pub fn shat1() -> f64 {
    let m = copenhagen_model(-2.0);
    bisect(|s1| m.potential_s(s1, 0.625), 1.0, 1.9)
}

/// Closed-form quantities of the μ = ½ positivity argument at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Helpers {
    pub c_minus_one: f64,
    pub d: f64,
    pub hat_d: f64,
    pub i0: f64,
    pub underline_h: f64,
    pub bar_h: f64,
    pub shat2: f64,
}

pub fn helper_functions(h: f64, s1: f64, s2: f64) -> Result<Helpers> {
    if !(s1 >= 1.0 && (0.0..=1.0).contains(&s2)) {
        return Err(invalid("s1", s1, "need s1 ≥ 1 and s2 ∈ [0, 1]"));
    }
    let m = copenhagen_model(h);
    Ok(Helpers {
        c_minus_one: m.c_minus_one(s1, s2),
        d: d_of(s2),
        hat_d: m.d_hat(s2),
        i0: m.i0(s1, s2),
        underline_h: underline_h(s2),
        bar_h: bar_h(s2),
        shat2: shat2(),
    })
}

/// Resolution and exclusions of a scan of `det U_W` over `ℋ × S¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub n_x1: usize,
    pub n_x2: usize,
    pub n_theta: usize,
    /// Scan `[−x̄₁, x̄₁] × [−π/2, π/2]` instead of the first quadrant.
    pub full_domain: bool,
    /// Radius of the disk around `S±` left out when the saddles are in `ℋ`.
    pub collar: f64,
    /// `s₂` range of the vanishing-order fit.
    pub fit_window: (f64, f64),
    pub fit_points: usize,
    /// Keep every `(x₁, x₂, θ, det)` sample.
    pub record: bool,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            n_x1: 400,
            n_x2: 400,
            n_theta: 64,
            full_domain: false,
            collar: 1e-3,
            fit_window: (1e-4, 1e-2),
            fit_points: 12,
            record: false,
        }
    }
}

/// Power-law fit `max |·| ∼ s₂^p` on slices `x₂ = arccos s₂` near `S₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollarFit {
    pub radius: f64,
    pub excluded: usize,
    pub det_exponent: f64,
    pub det_r_squared: f64,
    pub i0_exponent: f64,
    pub i0_r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityScan {
    pub h: f64,
    pub spec: ScanSpec,
    pub samples: usize,
    pub min_det: f64,
    /// `(x₁, x₂, θ)` of the minimum.
    pub argmin: [f64; 3],
    pub boundary_samples: usize,
    pub min_boundary_det: f64,
    pub boundary_argmin: [f64; 2],
    pub collar: Option<CollarFit>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub points: Vec<[f64; 4]>,
}

impl ConvexityScan {
    pub fn positive(&self) -> bool {
        self.min_det > 0.0 && self.min_boundary_det > 0.0
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn in_collar(x1: f64, x2: f64, radius: f64) -> bool {
    x1.hypot(x2.abs() - FRAC_PI_2) < radius
}

/// Least-squares slope and `R²` of `log y` against `log x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, sxy * sxy / (sxx * syy))
}

/// `det U_W` over the Hill region times a `θ` circle. Points inside the collar
/// around `S±` are skipped when the saddles lie in `ℋ`, and the vanishing
/// order at `S₊` is fitted instead.
pub fn convexity_scan(model: &Copenhagen, spec: &ScanSpec) -> Result<ConvexityScan> {
    for (name, n) in [
        ("n_x1", spec.n_x1),
        ("n_x2", spec.n_x2),
        ("n_theta", spec.n_theta),
    ] {
        if n < 64 {
            return Err(invalid(
                name,
                n as f64,
                "scan resolution must be at least 64",
            ));
        }
    }
    if spec.collar.is_nan() || spec.collar < 0.0 {
        return Err(invalid(
            "collar",
            spec.collar,
            "collar radius must be non-negative",
        ));
    }
    let (xbar, _) = model.hill_bound();
    let saddles = model.contains_saddles();
    let x1s = if spec.full_domain {
        linspace(-xbar, xbar, spec.n_x1)
    } else {
        linspace(0.0, xbar, spec.n_x1)
    };
    let x2s = if spec.full_domain {
        linspace(-FRAC_PI_2, FRAC_PI_2, spec.n_x2)
    } else {
        linspace(0.0, FRAC_PI_2, spec.n_x2)
    };
    let thetas: Vec<f64> = (0..spec.n_theta)
        .map(|k| TAU * k as f64 / spec.n_theta as f64)
        .collect();

    struct Acc {
        samples: usize,
        excluded: usize,
        min: f64,
        arg: [f64; 3],
        points: Vec<[f64; 4]>,
    }
    let rows: Vec<Acc> = x1s
        .par_iter()
        .map(|&x1| {
            let mut acc = Acc {
                samples: 0,
                excluded: 0,
                min: f64::INFINITY,
                arg: [f64::NAN; 3],
                points: Vec::new(),
            };
            for &x2 in &x2s {
                let x = Vector2::new(x1, x2);
                let Ok((r, jet)) = radius(model, &x) else {
                    continue;
                };
                if saddles && in_collar(x1, x2, spec.collar) {
                    acc.excluded += 1;
                    continue;
                }
                for &th in &thetas {
                    let d = det_from_jet(&jet, r, th);
                    acc.samples += 1;
                    if d < acc.min {
                        acc.min = d;
                        acc.arg = [x1, x2, th];
                    }
                    if spec.record {
                        acc.points.push([x1, x2, th, d]);
                    }
                }
            }
            acc
        })
        .collect();

    let mut samples = 0;
    let mut excluded = 0;
    let mut min_det = f64::INFINITY;
    let mut argmin = [f64::NAN; 3];
    let mut points = Vec::new();
    for mut a in rows {
        samples += a.samples;
        excluded += a.excluded;
        if a.min < min_det {
            min_det = a.min;
            argmin = a.arg;
        }
        points.append(&mut a.points);
    }

    let mut boundary_samples = 0;
    let mut min_boundary_det = f64::INFINITY;
    let mut boundary_argmin = [f64::NAN; 2];
    for &x2 in &x2s {
        let Some(b) = model.boundary_x1(x2) else {
            continue;
        };
        let sides: &[f64] = if spec.full_domain && b > 0.0 {
            &[1.0, -1.0]
        } else {
            &[1.0]
        };
        for &sg in sides {
            let x1 = sg * b;
            if saddles && in_collar(x1, x2, spec.collar) {
                continue;
            }
            let d = super::boundary_det(&model.jet(&Vector2::new(x1, x2)).v);
            boundary_samples += 1;
            if d < min_boundary_det {
                min_boundary_det = d;
                boundary_argmin = [x1, x2];
            }
        }
    }

    let collar = if saddles {
        Some(collar_fit(model, spec, &thetas, excluded))
    } else {
        None
    };

    Ok(ConvexityScan {
        h: model.h,
        spec: *spec,
        samples,
        min_det,
        argmin,
        boundary_samples,
        min_boundary_det,
        boundary_argmin,
        collar,
        points,
    })
}

fn collar_fit(model: &Copenhagen, spec: &ScanSpec, thetas: &[f64], excluded: usize) -> CollarFit {
    let (lo, hi) = spec.fit_window;
    let n = spec.fit_points.max(3);
    let s2s: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let maxima: Vec<(f64, f64)> = s2s
        .par_iter()
        .map(|&s2| {
            let x2 = s2.acos();
            let b = model.boundary_x1(x2).unwrap_or(0.0);
            let mut det_max: f64 = 0.0;
            let mut i0_max: f64 = 0.0;
            for x1 in linspace(0.0, b, 33) {
                let x = Vector2::new(x1, x2);
                let Ok((r, jet)) = radius(model, &x) else {
                    continue;
                };
                for &th in thetas {
                    det_max = det_max.max(det_from_jet(&jet, r, th).abs());
                }
                i0_max = i0_max.max(model.i0_x(x1, s2).abs());
            }
            (det_max, i0_max)
        })
        .collect();
    let dets: Vec<f64> = maxima.iter().map(|m| m.0).collect();
    let i0s: Vec<f64> = maxima.iter().map(|m| m.1).collect();
    let (det_exponent, det_r_squared) = loglog_fit(&s2s, &dets);
    let (i0_exponent, i0_r_squared) = loglog_fit(&s2s, &i0s);
    CollarFit {
        radius: spec.collar,
        excluded,
        det_exponent,
        det_r_squared,
        i0_exponent,
        i0_r_squared,
    }
}
