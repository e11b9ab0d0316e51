//! Robbin–Salamon index of symplectic paths via crossing forms, the
//! geometric Conley–Zehnder index in `Sp(2)`, rotation numbers and the
//! transverse index of periodic orbits.

mod nonneg;

pub use nonneg::{nonneg_path, NormalBlock};

use crate::error::{Cr3bpError, Result};
use crate::flow::{HamiltonianSystem, Integrator, VariationalFlow};
use crate::linalg::{j_matrix, symplectic_defect, symplectic_inverse};
use crate::saddle_center::SaddleCenterData;
use nalgebra::{DMatrix, Matrix4, SymmetricEigen, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn from_int(k: i64) -> Self {
        HalfInt(2 * k)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}", self.value())
        }
    }
}

type PathFn = dyn Fn(f64) -> (DMatrix<f64>, DMatrix<f64>) + Send + Sync;
type GraphFn = dyn Fn(f64) -> DMatrix<f64> + Send + Sync;

/// A path `ψ(t) ∈ Sp(2n)` on `[a, b]` together with `S(t) = -J ψ̇ ψ⁻¹`.
#[derive(Clone)]
pub struct SymplecticPath {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// Lower bound on the number of samples used to scan for crossings.
    pub min_samples: usize,
    eval: Arc<PathFn>,
    /// Optional well-conditioned basis `[X; Y]` of the graph of `ψ(t)`, i.e.
    /// `ψX = Y`, continuous in `t` with `det X > 0`.
    graph: Option<Arc<GraphFn>>,
}

impl fmt::Debug for SymplecticPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticPath")
            .field("n", &self.n)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish()
    }
}

impl SymplecticPath {
    pub fn new<F>(n: usize, a: f64, b: f64, f: F) -> Self
    where
        F: Fn(f64) -> (DMatrix<f64>, DMatrix<f64>) + Send + Sync + 'static,
    {
        Self {
            n,
            a,
            b,
            min_samples: 256,
            eval: Arc::new(f),
            graph: None,
        }
    }

    /// Attaches a basis of the graph of `ψ(t)`; see [`SymplecticPath::graph_basis`].
    pub fn with_graph<G>(mut self, g: G) -> Self
    where
        G: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.graph = Some(Arc::new(g));
        self
    }

    /// A `4n × 2n` basis `[X; Y]` of `{(v, ψ(t)v)}` with `det X > 0`; `[I; ψ]`
    /// unless the path supplies a better conditioned one.
    pub fn graph_basis(&self, t: f64) -> DMatrix<f64> {
        if let Some(g) = &self.graph {
            return g(t);
        }
        let psi = self.psi(t);
        let dim = psi.nrows();
        let mut stacked = DMatrix::zeros(2 * dim, dim);
        stacked.view_mut((0, 0), (dim, dim)).fill_with_identity();
        stacked.view_mut((dim, 0), (dim, dim)).copy_from(&psi);
        stacked
    }

    /// `ψ(t) = exp((t - a) J S) ψ₀` for a constant symmetric generator.
    ///
    /// The graph basis is carried forward through checkpoints a unit of
    /// `‖JS‖⁻¹` apart and re-orthonormalized at each, so it stays accurate
    /// long after `ψ` itself has overflowed the precision of its entries.
    pub fn constant_generator(s: DMatrix<f64>, psi0: DMatrix<f64>, a: f64, b: f64) -> Self {
        let n = s.nrows() / 2;
        let dim = 2 * n;
        let js = j_matrix(n) * &s;
        let step = 1.0 / js.norm().max(1e-12);
        let count = (((b - a) / step).ceil() as usize).clamp(1, 1_000_000);
        let step = (b - a) / count as f64;
        let js_step = js.clone();
        let advance = move |basis: &DMatrix<f64>, dt: f64| {
            let mut next = basis.clone();
            let bottom = (&js_step * dt).exp() * basis.rows(dim, dim);
            next.rows_mut(dim, dim).copy_from(&bottom);
            next
        };
        let mut start = DMatrix::zeros(2 * dim, dim);
        start.view_mut((0, 0), (dim, dim)).fill_with_identity();
        start.view_mut((dim, 0), (dim, dim)).copy_from(&psi0);
        let mut checkpoints = vec![positive_qr(&start)];
        for _ in 0..count {
            let next = advance(checkpoints.last().expect("nonempty"), step);
            checkpoints.push(positive_qr(&next));
        }
        Self::new(n, a, b, move |t| {
            (((&js) * (t - a)).exp() * &psi0, s.clone())
        })
        .with_graph(move |t| {
            let j = (((t - a) / step).floor().max(0.0) as usize).min(count);
            advance(&checkpoints[j], t - (a + step * j as f64))
        })
    }

    /// Path `t ↦ R(2πk t)`-style rotation on `[0, 1]` in `Sp(2)`.
    pub fn rotation(turns: f64) -> Self {
        let w = TAU * turns;
        Self::new(1, 0.0, 1.0, move |t| {
            (crate::linalg::rot2(w * t), DMatrix::identity(2, 2) * w)
        })
    }

    pub fn eval(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        (self.eval)(t)
    }

    pub fn psi(&self, t: f64) -> DMatrix<f64> {
        (self.eval)(t).0
    }

    pub fn restrict(&self, a: f64, b: f64) -> Self {
        let mut p = self.clone();
        p.a = a;
        p.b = b;
        p
    }

    pub fn with_min_samples(mut self, n: usize) -> Self {
        self.min_samples = n;
        self
    }

    /// `ψ ⊕ ψ'`, both on the same interval.
    pub fn direct_sum(&self, other: &SymplecticPath) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let mut p = Self::new(self.n + other.n, self.a, self.b, move |t| {
            let (pa, sa) = f(t);
            let (pb, sb) = g(t);
            (
                crate::linalg::symplectic_direct_sum(&pa, &pb),
                crate::linalg::symplectic_direct_sum(&sa, &sb),
            )
        });
        p.min_samples = self.min_samples.max(other.min_samples);
        if self.graph.is_some() || other.graph.is_some() {
            let (l, r) = (self.clone(), other.clone());
            let (dl, dr) = (2 * self.n, 2 * other.n);
            p.graph = Some(Arc::new(move |t| {
                let (gl, gr) = (l.graph_basis(t), r.graph_basis(t));
                let top = crate::linalg::symplectic_direct_sum(
                    &gl.rows(0, dl).into_owned(),
                    &gr.rows(0, dr).into_owned(),
                );
                let bottom = crate::linalg::symplectic_direct_sum(
                    &gl.rows(dl, dl).into_owned(),
                    &gr.rows(dr, dr).into_owned(),
                );
                let d = top.nrows();
                let mut out = DMatrix::zeros(2 * d, d);
                out.rows_mut(0, d).copy_from(&top);
                out.rows_mut(d, d).copy_from(&bottom);
                out
            }));
        }
        p
    }

    /// Monotone reparametrization `t = φ(s)` on `[φ⁻¹(a), φ⁻¹(b)]`.
    pub fn reparametrize<F, G>(&self, phi: F, dphi: G, sa: f64, sb: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f = self.eval.clone();
        let phi = Arc::new(phi);
        let phi_graph = phi.clone();
        let mut p = Self::new(self.n, sa, sb, move |s| {
            let (psi, gen) = f(phi.as_ref()(s));
            (psi, gen * dphi(s))
        });
        p.min_samples = self.min_samples;
        if let Some(g) = self.graph.clone() {
            p.graph = Some(Arc::new(move |s| g(phi_graph.as_ref()(s))));
        }
        p
    }

    /// Fixed-end homotopy `ψ(t) exp(φ(t) J K)` with `φ = δ sin(π(t-a)/(b-a))`.
    pub fn perturbed(&self, delta: f64, k: DMatrix<f64>) -> Self {
        let f = self.eval.clone();
        let (a, b, n) = (self.a, self.b, self.n);
        let jk = j_matrix(n) * &k;
        let jk_graph = jk.clone();
        let mut p = Self::new(n, a, b, move |t| {
            let w = PI / (b - a);
            let phi = delta * (w * (t - a)).sin();
            let dphi = delta * w * (w * (t - a)).cos();
            let (psi, s) = f(t);
            let e = (&jk * phi).exp();
            let inv = symplectic_inverse(&psi);
            let s_new = s + inv.transpose() * &k * &inv * dphi;
            (psi * e, s_new)
        });
        p.min_samples = self.min_samples;
        if let Some(g) = self.graph.clone() {
            // graph of ψE: X' = E⁻¹X, Y' = Y
            let jk = jk_graph;
            p.graph = Some(Arc::new(move |t| {
                let w = PI / (b - a);
                let phi = delta * (w * (t - a)).sin();
                let mut basis = g(t);
                let top = (&jk * -phi).exp() * basis.rows(0, 2 * n);
                basis.rows_mut(0, 2 * n).copy_from(&top);
                basis
            }));
        }
        p
    }

    /// Largest symplectic defect and generator asymmetry over `m` samples.
    pub fn check_invariants(&self, m: usize) -> (f64, f64) {
        let mut d: f64 = 0.0;
        let mut asym: f64 = 0.0;
        for i in 0..=m {
            let t = self.a + (self.b - self.a) * i as f64 / m as f64;
            let (psi, s) = self.eval(t);
            d = d.max(symplectic_defect(&psi));
            asym = asym.max((&s - s.transpose()).amax());
        }
        (d, asym)
    }

    /// Path from samples `ψ(tᵢ)`; `S` by central differences, values between
    /// samples by `exp((t - tᵢ) J Sᵢ) ψᵢ`.
    pub fn from_samples(ts: Vec<f64>, psis: Vec<DMatrix<f64>>) -> Result<Self> {
        if ts.len() < 3 || ts.len() != psis.len() {
            return Err(Cr3bpError::Degenerate(
                "need at least three samples with matching times".into(),
            ));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Cr3bpError::Degenerate("sample times must increase".into()));
        }
        let n = psis[0].nrows() / 2;
        let j = j_matrix(n);
        let m = ts.len();
        let mut gens = Vec::with_capacity(m);
        for i in 0..m {
            let (l, r) = (i.saturating_sub(1), (i + 1).min(m - 1));
            let d = (&psis[r] - &psis[l]) / (ts[r] - ts[l]);
            let s = -(&j * d * symplectic_inverse(&psis[i]));
            gens.push((&s + s.transpose()) * 0.5);
        }
        let (a, b) = (ts[0], ts[m - 1]);
        let min_samples = 4 * m;
        let mut p = Self::new(n, a, b, move |t| {
            let i = ts.partition_point(|&x| x <= t).saturating_sub(1).min(m - 2);
            let i = if t - ts[i] > ts[i + 1] - t { i + 1 } else { i };
            let js = &j * &gens[i] * (t - ts[i]);
            (js.exp() * &psis[i], gens[i].clone())
        });
        p.min_samples = min_samples;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t0: f64,
    pub kernel_dim: usize,
    pub signature: i64,
    pub boundary: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct CrossingOptions {
    /// Singular-value threshold for the intersection of the graph of `ψ`
    /// with the diagonal, i.e. for `ker(I - ψ)`.
    pub kernel_tol: f64,
    /// Eigenvalues of the crossing form below this count as degenerate.
    pub degenerate_tol: f64,
    /// Samples per unit of `(b - a)·max‖S‖`.
    pub density: f64,
    pub max_samples: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            kernel_tol: 1e-8,
            degenerate_tol: 1e-9,
            density: 24.0,
            max_samples: 400_000,
        }
    }
}

fn svd_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sv = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(m.ncols(), idx.len(), |r, c| vt[(idx[c], r)]);
    (sv, v)
}

/// Distance of the graph of `ψ` from the diagonal.
///
/// With `[I; ψ] = QR`, the columns of `Q` span the graph and
/// `N = Q_top - Q_bot = (I - ψ)R⁻¹`. `N` shares its kernel with `I - ψ` up to
/// the map `Q_top = R⁻¹`, and its singular values stay of order one however
/// large `ψ` grows, so fixed thresholds remain meaningful on long hyperbolic
/// paths where `I - ψ` itself is hopelessly ill-conditioned.
struct GraphGap {
    n: DMatrix<f64>,
    top: DMatrix<f64>,
    /// Sign of `det(I - ψ)`.
    det_sign: f64,
}

/// `Q` of a QR factorization with positive diagonal in `R`.
fn positive_qr(m: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = m.clone().qr();
    let mut q = qr.q();
    for (i, d) in qr.r().diagonal().iter().enumerate() {
        if *d < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    q
}

fn graph_gap(basis: &DMatrix<f64>) -> GraphGap {
    let dim = basis.ncols();
    let qr = basis.clone().qr();
    let q = qr.q();
    // det Q_top = det X / det R and det X > 0
    let r_sign: f64 = qr.r().diagonal().iter().map(|x| x.signum()).product();
    let top = q.rows(0, dim).into_owned();
    let n = &top - q.rows(dim, dim);
    let det_sign = n.determinant().signum() * r_sign;
    GraphGap { n, top, det_sign }
}

fn sigma_min_of(path: &SymplecticPath, t: f64) -> f64 {
    graph_gap(&path.graph_basis(t)).n.singular_values().min()
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut l: f64, mut r: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = r - g * (r - l);
    let mut x2 = l + g * (r - l);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..90 {
        if f1 <= f2 {
            r = x2;
            x2 = x1;
            f2 = f1;
            x1 = r - g * (r - l);
            f1 = f(x1);
        } else {
            l = x1;
            x1 = x2;
            f1 = f2;
            x2 = l + g * (r - l);
            f2 = f(x2);
        }
        if (r - l).abs() <= 4.0 * f64::EPSILON * (1.0 + l.abs().max(r.abs())) {
            break;
        }
    }
    // endpoints of the final bracket may be better on one-sided brackets
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [l, r] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Signature of `S(t₀)` restricted to `ker(I − ψ(t₀))`.
pub fn crossing_signature_with(
    path: &SymplecticPath,
    t0: f64,
    opts: &CrossingOptions,
) -> Result<(usize, i64)> {
    let s = path.eval(t0).1;
    let gap = graph_gap(&path.graph_basis(t0));
    let (sv, v) = svd_sorted(&gap.n);
    // σ(N) ≤ √2, so the threshold is absolute; N vanishes at ψ = I
    let k = sv.iter().take_while(|&&x| x < opts.kernel_tol).count();
    if k == 0 {
        return Ok((0, 0));
    }
    // back to the original coordinates, orthonormalized
    let basis = (&gap.top * v.columns(0, k)).qr().q();
    let form = basis.transpose() * &s * &basis;
    let scale = s.amax().max(1.0);
    match crate::linalg::signature(&form, opts.degenerate_tol * scale) {
        (Some(sig), _) => Ok((k, sig)),
        (None, min_eig) => Err(Cr3bpError::DegenerateCrossing { t: t0, min_eig }),
    }
}

pub fn crossing_signature(path: &SymplecticPath, t0: f64) -> Result<i64> {
    crossing_signature_with(path, t0, &CrossingOptions::default()).map(|r| r.1)
}

pub fn find_crossings_with(path: &SymplecticPath, opts: &CrossingOptions) -> Result<Vec<Crossing>> {
    let (a, b) = (path.a, path.b);
    let len = b - a;
    // sampling density from the generator size
    let mut smax: f64 = 0.0;
    for i in 0..=32 {
        let (_, s) = path.eval(a + len * i as f64 / 32.0);
        smax = smax.max(s.norm());
    }
    let n = ((opts.density * len * smax).ceil() as usize)
        .max(path.min_samples)
        .min(opts.max_samples);
    let ts: Vec<f64> = (0..=n).map(|i| a + len * i as f64 / n as f64).collect();
    // σ₁ and σ₁σ₂ of I - ψ. A crossing of one block can sit in a narrow dip
    // under a smaller singular value of another; the product still has a
    // local minimum there.
    let g = |t: f64| {
        let mut v: Vec<f64> = graph_gap(&path.graph_basis(t))
            .n
            .singular_values()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        [v[0], v[0] * v[1]]
    };
    let gs: Vec<[f64; 2]> = ts.iter().map(|&t| g(t)).collect();
    let mut times: Vec<f64> = Vec::new();
    let edge = 1e-9 * len.abs().max(1e-300);
    let f = |t: f64| sigma_min_of(path, t);
    let tol = opts.kernel_tol;
    let local_min = |v: &[[f64; 2]], i: usize, k: usize| {
        let left = if i > 0 { v[i - 1][k] } else { f64::INFINITY };
        let right = if i + 1 < v.len() {
            v[i + 1][k]
        } else {
            f64::INFINITY
        };
        v[i][k] <= left && v[i][k] <= right
    };
    for i in 0..=n {
        if !local_min(&gs, i, 0) && !local_min(&gs, i, 1) {
            continue;
        }
        // crossings of different blocks can share one sampled dip
        let l = ts[i.saturating_sub(1)];
        let r = ts[(i + 1).min(n)];
        let m = 64;
        let step = (r - l) / m as f64;
        let fine: Vec<[f64; 2]> = (0..=m).map(|j| g(l + step * j as f64)).collect();
        for j in 0..=m {
            for k in 0..2 {
                if !local_min(&fine, j, k) {
                    continue;
                }
                let c = l + step * j as f64;
                let (tm, _) = golden_min(|t| g(t)[k], (c - step).max(l), (c + step).min(r));
                if f(tm) >= tol {
                    continue;
                }
                let tm = if (tm - a).abs() < edge {
                    a
                } else if (b - tm).abs() < edge {
                    b
                } else {
                    tm
                };
                if !times.iter().any(|&x| (x - tm).abs() < 10.0 * edge) {
                    times.push(tm);
                }
            }
        }
    }
    // odd-dimensional crossings flip the sign of det(I - ψ), which a smaller
    // singular value of another block cannot hide
    let det = |t: f64| graph_gap(&path.graph_basis(t)).det_sign;
    let delta = 1e-7 * len;
    let bisect = |mut l: f64, mut r: f64| {
        let sl = det(l).signum();
        for _ in 0..200 {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            if det(m) == sl {
                l = m;
            } else {
                r = m;
            }
        }
        if f(l) <= f(r) {
            l
        } else {
            r
        }
    };
    let ds: Vec<f64> = ts.iter().map(|&t| det(t)).collect();
    for i in 0..n {
        let sign = ds[i] * ds[i + 1];
        if sign.is_nan() || sign >= 0.0 {
            continue;
        }
        let tm = bisect(ts[i], ts[i + 1]);
        if f(tm) < tol && !times.iter().any(|&x| (x - tm).abs() < 10.0 * edge) {
            times.push(tm);
        }
    }
    // parity: det(I - ψ) can only change sign across a crossing, so a sign
    // change between consecutive known crossings exposes one more
    for _ in 0..8 {
        times.sort_by(f64::total_cmp);
        let mut knots = vec![a];
        for &t in &times {
            knots.push(t - delta);
            knots.push(t + delta);
        }
        knots.push(b);
        let mut found = Vec::new();
        for w in knots.chunks(2) {
            let (u, v) = (w[0].max(a + delta), w[1].min(b - delta));
            if v <= u {
                continue;
            }
            let (du, dv) = (det(u), det(v));
            if du * dv < 0.0 {
                let tm = bisect(u, v);
                if f(tm) < tol && !times.iter().any(|&x| (x - tm).abs() < 10.0 * edge) {
                    found.push(tm);
                }
            }
        }
        if found.is_empty() {
            break;
        }
        times.extend(found);
    }
    for t in [a, b] {
        if f(t) < tol && !times.iter().any(|&x| (x - t).abs() < 10.0 * edge) {
            times.push(t);
        }
    }
    times.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(times.len());
    for t0 in times {
        let (k, sig) = crossing_signature_with(path, t0, opts)?;
        if k == 0 {
            continue;
        }
        out.push(Crossing {
            t0,
            kernel_dim: k,
            signature: sig,
            boundary: t0 == a || t0 == b,
        });
    }
    Ok(out)
}

pub fn find_crossings(path: &SymplecticPath) -> Result<Vec<Crossing>> {
    find_crossings_with(path, &CrossingOptions::default())
}

fn index_from_crossings(cs: &[Crossing]) -> HalfInt {
    HalfInt(
        cs.iter()
            .map(|c| {
                if c.boundary {
                    c.signature
                } else {
                    2 * c.signature
                }
            })
            .sum(),
    )
}

/// Robbin–Salamon index; degenerate crossings trigger up to three fixed-end
/// perturbations of size `δ = 1e-6`.
pub fn robbin_salamon(path: &SymplecticPath) -> Result<HalfInt> {
    robbin_salamon_with(path, &CrossingOptions::default())
}

pub fn robbin_salamon_with(path: &SymplecticPath, opts: &CrossingOptions) -> Result<HalfInt> {
    match find_crossings_with(path, opts) {
        Ok(cs) => return Ok(index_from_crossings(&cs)),
        Err(Cr3bpError::DegenerateCrossing { .. }) => {}
        Err(e) => return Err(e),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut last = None;
    for _ in 0..3 {
        let k = crate::linalg::random_symmetric(&mut rng, 2 * path.n, 1.0);
        let p = path.perturbed(1e-6, k);
        match find_crossings_with(&p, opts) {
            Ok(cs) => return Ok(index_from_crossings(&cs)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Cr3bpError::Degenerate("irreparably degenerate path".into())))
}

/// Hyperbolic block `[[cosh λt, sinh λt], [sinh λt, cosh λt]] ψ₀`.
pub fn hyperbolic_path(lambda: f64, psi0: DMatrix<f64>, a: f64, b: f64) -> SymplecticPath {
    SymplecticPath::new(1, a, b, move |t| {
        let (c, s) = ((lambda * t).cosh(), (lambda * t).sinh());
        let h = DMatrix::from_row_slice(2, 2, &[c, s, s, c]);
        let gen = DMatrix::from_row_slice(2, 2, &[lambda, 0.0, 0.0, -lambda]);
        (h * &psi0, gen)
    })
}

/// `c₁ = (a₁₁+a₂₂+a₁₂+a₂₁)/2`, `c₂ = (a₁₁+a₂₂−a₁₂−a₂₁)/2` of the hyperbolic block.
pub fn hyperbolic_coefficients(psi0: &DMatrix<f64>) -> (f64, f64) {
    let (a11, a12, a21, a22) = (psi0[(0, 0)], psi0[(0, 1)], psi0[(1, 0)], psi0[(1, 1)]);
    (0.5 * (a11 + a22 + a12 + a21), 0.5 * (a11 + a22 - a12 - a21))
}

/// Elliptic block `R(λt) ψ₀`.
pub fn elliptic_path(lambda: f64, psi0: DMatrix<f64>, a: f64, b: f64) -> SymplecticPath {
    SymplecticPath::new(1, a, b, move |t| {
        (
            crate::linalg::rot2(lambda * t) * &psi0,
            DMatrix::identity(2, 2) * lambda,
        )
    })
}

pub fn elliptic_lower_bound(lambda: f64, a: f64, b: f64) -> i64 {
    2 * (lambda * (b - a) / TAU).floor() as i64
}

/// `2⌊λ₂(b−a)/2π⌋ − 1`.
pub fn saddle_center_bound(scd: &SaddleCenterData, a: f64, b: f64) -> i64 {
    elliptic_lower_bound(scd.lambda2, a, b) - 1
}

/// Linear flow at the saddle-center with generator `diag(λ₁, λ₂, −λ₁, λ₂)`
/// started from `ψ₀` at `t = a`.
pub fn saddle_center_path(
    scd: &SaddleCenterData,
    psi0: DMatrix<f64>,
    a: f64,
    b: f64,
) -> SymplecticPath {
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        scd.lambda1,
        scd.lambda2,
        -scd.lambda1,
        scd.lambda2,
    ]));
    SymplecticPath::constant_generator(s, psi0, a, b)
}

/// Bound and computed index of the saddle-center linear path.
pub fn saddle_center_check(
    scd: &SaddleCenterData,
    psi0: DMatrix<f64>,
    a: f64,
    b: f64,
) -> Result<(i64, HalfInt)> {
    let p = saddle_center_path(scd, psi0, a, b);
    Ok((saddle_center_bound(scd, a, b), robbin_salamon(&p)?))
}

fn angle_of(m: &DMatrix<f64>, v: (f64, f64)) -> f64 {
    let x = m[(0, 0)] * v.0 + m[(0, 1)] * v.1;
    let y = m[(1, 0)] * v.0 + m[(1, 1)] * v.1;
    y.atan2(x)
}

/// Rotation interval `I_P = [min Δ, max Δ]` of an `Sp(2)` path with `ψ(a) = I`.
pub fn rotation_interval(path: &SymplecticPath) -> Result<(f64, f64)> {
    if path.n != 1 {
        return Err(Cr3bpError::Unsupported(
            "geometric index needs a path in Sp(2)".into(),
        ));
    }
    let fan: Vec<(f64, f64)> = (0..90)
        .map(|k| {
            let al = PI * k as f64 / 90.0;
            (al.cos(), al.sin())
        })
        .collect();
    let psi_a = path.psi(path.a);
    if (&psi_a - DMatrix::identity(2, 2)).amax() > 1e-8 {
        return Err(Cr3bpError::Degenerate(
            "path must start at the identity".into(),
        ));
    }
    let m0 = path.min_samples.max(64);
    let mut total = vec![0.0; fan.len()];
    let mut prev_t = path.a;
    let mut prev: Vec<f64> = fan.iter().map(|v| angle_of(&psi_a, *v)).collect();
    let h0 = (path.b - path.a) / m0 as f64;
    let mut t = path.a;
    let mut h = h0;
    while t < path.b {
        let tn = (t + h).min(path.b);
        let m = path.psi(tn);
        let cur: Vec<f64> = fan.iter().map(|v| angle_of(&m, *v)).collect();
        let mut ok = true;
        let mut incs = Vec::with_capacity(fan.len());
        for (p, c) in prev.iter().zip(&cur) {
            let mut d = c - p;
            d = (d + PI).rem_euclid(TAU) - PI;
            if d.abs() > PI / 4.0 {
                ok = false;
                break;
            }
            incs.push(d);
        }
        if !ok {
            h *= 0.5;
            if h < 1e-12 * (path.b - path.a) {
                return Err(Cr3bpError::Degenerate(
                    "frame discontinuity: angle jump persists under refinement".into(),
                ));
            }
            continue;
        }
        for (tot, d) in total.iter_mut().zip(incs) {
            *tot += d;
        }
        prev = cur;
        prev_t = tn;
        t = tn;
        h = (h * 1.5).min(h0);
    }
    let _ = prev_t;
    let lo = total.iter().cloned().fold(f64::INFINITY, f64::min) / TAU;
    let hi = total.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / TAU;
    Ok((lo, hi))
}

/// Geometric Conley–Zehnder index of a nondegenerate `Sp(2)` path from `I`.
pub fn conley_zehnder_geometric(path: &SymplecticPath) -> Result<i64> {
    let end = path.psi(path.b);
    let det = (DMatrix::identity(2, 2) - &end).determinant();
    if det.abs() < 1e-9 * end.amax().max(1.0) {
        return Err(Cr3bpError::Degenerate("endpoint has eigenvalue 1".into()));
    }
    let (lo, hi) = rotation_interval(path)?;
    if hi - lo >= 0.5 + 1e-9 {
        return Err(Cr3bpError::Degenerate(format!(
            "rotation interval too long: [{lo}, {hi}]"
        )));
    }
    let k_hi = hi.floor();
    if k_hi > lo {
        Ok(2 * k_hi as i64)
    } else {
        Ok(2 * lo.floor() as i64 + 1)
    }
}

/// `k`-fold iterate of an `Sp(2)` path on `[0, T]`: `Φ(t − jT) Φ(T)ʲ`.
pub fn iterate_path(path: &SymplecticPath, k: usize) -> SymplecticPath {
    let base = path.clone();
    let period = path.b - path.a;
    let a = path.a;
    let end = path.psi(path.b);
    let mut p = SymplecticPath::new(path.n, a, a + k as f64 * period, move |t| {
        let mut j = ((t - a) / period).floor() as i64;
        j = j.clamp(0, k as i64 - 1);
        let (psi, s) = base.eval(t - j as f64 * period);
        let mut pow = DMatrix::identity(psi.nrows(), psi.nrows());
        for _ in 0..j {
            pow = &pow * &end;
        }
        let sj = if j == 0 { s } else { s.clone() };
        (psi * pow, sj)
    });
    p.min_samples = path.min_samples * k;
    p
}

/// Mean rotation `lim μ(Pᵏ)/2k`, estimated from the rotation interval of
/// the `k_max`-fold iterate; the `k_max/2` estimate must agree within `1/k_max`.
pub fn rotation_number(path: &SymplecticPath, k_max: usize) -> Result<f64> {
    let k_max = k_max.max(2);
    let est = |k: usize| -> Result<f64> {
        let (lo, hi) = rotation_interval(&iterate_path(path, k))?;
        Ok(0.5 * (lo + hi) / k as f64)
    };
    let full = est(k_max)?;
    let half = est(k_max / 2)?;
    if (full - half).abs() > 2.0 / (k_max / 2) as f64 {
        return Err(Cr3bpError::NoConvergence {
            iterations: k_max,
            residual: (full - half).abs(),
        });
    }
    Ok(full)
}

/// Unit symplectic frame `(e₁, Je₁)` of the complex line orthogonal to `∇H`.
pub fn transverse_frame(g: &Vector4<f64>) -> Result<(Vector4<f64>, Vector4<f64>)> {
    let n = g.norm();
    if n < 1e-14 {
        return Err(Cr3bpError::Degenerate(
            "gradient vanishes on the orbit".into(),
        ));
    }
    let u = Vector4::new(-g[1], g[0], g[3], -g[2]) / n;
    let ju = Vector4::new(-u[2], -u[3], u[0], u[1]);
    Ok((u, ju))
}

/// Linearized flow along a closed orbit reduced to the transverse
/// symplectic plane, repeated `covers` times.
pub fn reduced_transverse_path<S: HamiltonianSystem + ?Sized>(
    sys: &S,
    z0: &Vector4<f64>,
    period: f64,
    covers: usize,
) -> Result<SymplecticPath> {
    let integ = Integrator::default().dense();
    let sol = integ
        .integrate(
            &VariationalFlow(sys),
            0.0,
            &crate::flow::variational_initial(z0),
            period,
            &[],
        )
        .ok()?;
    let (e10, e20) = transverse_frame(&sys.gradient(z0)?)?;
    let mut frames = Vec::new();
    let n_steps = sol.dense.len();
    let mut samples_t = Vec::new();
    let mut samples_phi = Vec::new();
    let per_step = 4;
    for step in &sol.dense {
        for k in 0..per_step {
            let t = step.t0 + step.h * k as f64 / per_step as f64;
            samples_t.push(t);
        }
    }
    samples_t.push(period);
    for &t in &samples_t {
        let y = sol.interpolate(t).expect("dense output recorded");
        let (z, psi) = crate::flow::split_variational(&y);
        let (e1, e2) = transverse_frame(&sys.gradient(&z)?)?;
        let cols = [psi * e10, psi * e20];
        let phi = DMatrix::from_row_slice(
            2,
            2,
            &[
                e1.dot(&cols[0]),
                e1.dot(&cols[1]),
                e2.dot(&cols[0]),
                e2.dot(&cols[1]),
            ],
        );
        frames.push((e1, e2));
        samples_phi.push(phi);
    }
    let _ = n_steps;
    let base = SymplecticPath::from_samples(samples_t, samples_phi)?;
    let path = if covers > 1 {
        iterate_path(&base, covers)
    } else {
        base
    };
    Ok(path)
}

/// Conley–Zehnder index of a closed orbit (or its `covers`-fold iterate)
/// in the global frame `(e₁, Je₁)`, `e₁ ⟂_ℂ ∇H`.
pub fn orbit_index<S: HamiltonianSystem + ?Sized>(
    sys: &S,
    z0: &Vector4<f64>,
    period: f64,
    covers: usize,
) -> Result<i64> {
    let p = reduced_transverse_path(sys, z0, period, covers)?;
    conley_zehnder_geometric(&p)
}

/// Eigenvalues of the transverse monodromy block.
pub fn transverse_monodromy<S: HamiltonianSystem + ?Sized>(
    sys: &S,
    z0: &Vector4<f64>,
    psi: &Matrix4<f64>,
) -> Result<DMatrix<f64>> {
    let (e1, e2) = transverse_frame(&sys.gradient(z0)?)?;
    let c1 = psi * e1;
    let c2 = psi * e2;
    Ok(DMatrix::from_row_slice(
        2,
        2,
        &[e1.dot(&c1), e1.dot(&c2), e2.dot(&c1), e2.dot(&c2)],
    ))
}

/// Random paths used by the statistical lower-bound check: a trajectory of
/// `Ĥ` at `μ = ½` through a random point of its zero level, with a random
/// symplectic start `ψ₀` and a random length in `[1, 20]`.
pub fn random_hat_h_path<R: Rng>(rng: &mut R, h: f64) -> Result<SymplecticPath> {
    use crate::regularization::{magnetic_field, RegularizedHamiltonian};
    let ham = RegularizedHamiltonian::new(0.5, h);
    // rejection-sample x with V(x) < 0 so the momentum circle is nonempty
    let x = loop {
        let x = nalgebra::Vector2::new(rng.gen_range(-1.2..1.2), rng.gen_range(0.0..TAU));
        if ham.potential(&x).value < -1e-3 {
            break x;
        }
    };
    let v = ham.potential(&x).value;
    let rad = (-2.0 * v).sqrt();
    let ang = rng.gen_range(0.0..TAU);
    let (f1, f2) = magnetic_field(&x);
    let z0 = Vector4::new(rad * ang.cos() - f1[0], rad * ang.sin() - f2[0], x.x, x.y);
    let t_end = rng.gen_range(1.0..20.0);
    let psi0 = crate::linalg::random_symplectic(rng, 2, 0.6);
    let integ = Integrator::with_tol(1e-11, 1e-13).dense();
    let sol = integ
        .integrate(
            &VariationalFlow(&ham),
            0.0,
            &crate::flow::variational_initial(&z0),
            t_end,
            &[],
        )
        .ok()?;
    let sol = Arc::new(sol);
    let ham2 = ham;
    let p = SymplecticPath::new(2, 0.0, t_end, move |t| {
        let y = sol.interpolate(t).expect("dense");
        let (z, psi) = crate::flow::split_variational(&y);
        let b = ham2.hessian(&z).expect("smooth");
        let m = DMatrix::from_fn(4, 4, |i, j| psi[(i, j)]) * &psi0;
        (m, DMatrix::from_fn(4, 4, |i, j| b[(i, j)]))
    });
    Ok(p)
}

/// Generator eigen-range `(min, max)` over samples.
pub fn generator_eigen_range(path: &SymplecticPath, m: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=m {
        let t = path.a + (path.b - path.a) * i as f64 / m as f64;
        let (_, s) = path.eval(t);
        let e = SymmetricEigen::new((&s + s.transpose()) * 0.5);
        for v in e.eigenvalues.iter() {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    (lo, hi)
}
