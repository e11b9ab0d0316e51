//! Non-negative paths from `I` to a semi-simple symplectic matrix through
//! its symplectic normal form.

use super::SymplecticPath;
use crate::error::{Cr3bpError, Result};
use crate::linalg::{j_matrix, rot2, symplectic_defect, symplectic_direct_sum, symplectic_inverse};
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormalBlock {
    /// `R(θ)`, `θ ∈ (0, 2π]`.
    Rotation(f64),
    /// `diag(λ, 1/λ)`, `λ ∈ ℝ \ [-1, 1]`.
    Hyperbolic(f64),
    /// `diag(ρR(θ), ρ⁻¹R(θ))`, `ρ > 1`, `θ ∈ (0, π)`.
    Quadruple { rho: f64, theta: f64 },
}

impl NormalBlock {
    pub fn dim(&self) -> usize {
        match self {
            NormalBlock::Quadruple { .. } => 2,
            _ => 1,
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.at(1.0).0
    }

    /// Point and generator of the block path at `t ∈ [0, 1]`.
    pub fn at(&self, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        match *self {
            NormalBlock::Rotation(th) => (rot2(th * t), DMatrix::identity(2, 2) * th),
            NormalBlock::Hyperbolic(l) => hyperbolic_block(l, t),
            NormalBlock::Quadruple { rho, theta } => quadruple_block(rho, theta, t),
        }
    }
}

fn diag2(a: f64, b: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b])
}

// generator of Q R(ωt) Q⁻¹ and of D R(ωt): ω Q⁻ᵀ Q⁻¹
fn conj_gen(q: &DMatrix<f64>, w: f64) -> DMatrix<f64> {
    let qi = symplectic_inverse(q);
    qi.transpose() * qi * w
}

fn hyperbolic_block(l: f64, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let r = l.abs().sqrt();
    let q = diag2(r, 1.0 / r);
    let qi = diag2(1.0 / r, r);
    let d = diag2(l.abs(), 1.0 / l.abs());
    if l > 0.0 {
        if t <= 0.5 {
            (&q * rot2(3.0 * PI * t) * &qi, conj_gen(&q, 3.0 * PI))
        } else {
            (&d * rot2(PI + PI * t), conj_gen(&d, PI))
        }
    } else if t <= 0.5 {
        (&q * rot2(PI * t) * &qi, conj_gen(&q, PI))
    } else {
        (&d * rot2(PI * t), conj_gen(&d, PI))
    }
}

// real 4×4 form of a complex 2×2 matrix acting on z = p + iq
fn realify(c: &[[Complex<f64>; 2]; 2]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = c[i][j].re;
            m[(i, j + 2)] = -c[i][j].im;
            m[(i + 2, j)] = c[i][j].im;
            m[(i + 2, j + 2)] = c[i][j].re;
        }
    }
    m
}

// unitary path with phases (θs, (2π−θ)s) on the eigenlines of R(θ) ⊕ R(θ)
fn unitary_phase(theta: f64, s: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let i = Complex::new(0.0, 1.0);
    let half = Complex::new(0.5, 0.0);
    let pp = [[half, half * i], [-half * i, half]];
    let pm = [[half, -half * i], [half * i, half]];
    let ea = (i * theta * s).exp();
    let eb = (i * (TAU - theta) * s).exp();
    let mut u = [[Complex::new(0.0, 0.0); 2]; 2];
    let mut h = [[Complex::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            u[r][c] = ea * pp[r][c] + eb * pm[r][c];
            h[r][c] = pp[r][c] * theta + pm[r][c] * (TAU - theta);
        }
    }
    (realify(&u), realify(&h))
}

fn quadruple_block(rho: f64, theta: f64, t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    // unitary phases (θ+π, π−θ) reach diag(R(θ−π), R(θ−π)); then the
    // negative hyperbolic path on both factors
    if t <= 0.5 {
        let (u, h) = unitary_phase(theta + PI, 2.0 * t);
        (u, h * 2.0)
    } else {
        let (u, _) = unitary_phase(theta + PI, 1.0);
        let (k, sk) = hyperbolic_block(-rho, 2.0 * t - 1.0);
        (
            symplectic_direct_sum(&k, &k) * u,
            symplectic_direct_sum(&sk, &sk) * 2.0,
        )
    }
}

/// Symplectic normal form `M = P (N₁ ⋄ … ⋄ N_k) P⁻¹` of a semi-simple
/// matrix with eigenvalues off `±1` (or `M = I`).
pub fn normal_form(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<NormalBlock>)> {
    let dim = m.nrows();
    if !dim.is_multiple_of(2) || m.ncols() != dim {
        return Err(Cr3bpError::Degenerate("matrix must be 2n × 2n".into()));
    }
    let n = dim / 2;
    let scale = m.amax().max(1.0);
    if symplectic_defect(m) > 1e-8 * scale * scale {
        return Err(Cr3bpError::Degenerate("matrix is not symplectic".into()));
    }
    if (m - DMatrix::identity(dim, dim)).amax() < 1e-12 * scale {
        return Ok((
            DMatrix::identity(dim, dim),
            vec![NormalBlock::Rotation(TAU); n],
        ));
    }
    let j = j_matrix(n);
    let omega = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| (&j * a).dot(b);
    let eig = m.complex_eigenvalues();
    let tol = 1e-7;
    let mut ps: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut qs: Vec<nalgebra::DVector<f64>> = Vec::new();
    let mut blocks = Vec::new();
    let mc = m.map(|x| Complex::new(x, 0.0));
    let kernel = |lam: Complex<f64>| -> nalgebra::DVector<Complex<f64>> {
        let a = &mc - DMatrix::<Complex<f64>>::identity(dim, dim) * lam;
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("v_t");
        let (k, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .expect("nonempty");
        vt.row(k).transpose().map(|c| c.conj())
    };
    for lam in eig.iter() {
        let (modl, im) = (lam.norm(), lam.im);
        if (modl - 1.0).abs() < tol && im.abs() < tol {
            return Err(Cr3bpError::Unsupported(
                "eigenvalue ±1 away from M = I".into(),
            ));
        }
        if im.abs() < tol {
            if modl <= 1.0 {
                continue;
            }
            let l = lam.re;
            let u = kernel(Complex::new(l, 0.0)).map(|c| c.re);
            let w = kernel(Complex::new(1.0 / l, 0.0)).map(|c| c.re);
            // the real kernel vector may carry a global phase
            let u = fix_real(&kernel(Complex::new(l, 0.0)), u);
            let w = fix_real(&kernel(Complex::new(1.0 / l, 0.0)), w);
            let c = omega(&u, &w);
            if c.abs() < 1e-12 {
                return Err(Cr3bpError::Degenerate("non-generic hyperbolic pair".into()));
            }
            ps.push(u);
            qs.push(w / c);
            blocks.push(NormalBlock::Hyperbolic(l));
        } else if im > 0.0 && (modl - 1.0).abs() < tol {
            let v = kernel(*lam);
            let a = v.map(|c| c.re);
            let b = v.map(|c| c.im);
            let c = omega(&a, &(-&b));
            let th = lam.arg();
            if c > 0.0 {
                let s = 1.0 / c.sqrt();
                ps.push(a * s);
                qs.push(-b * s);
                blocks.push(NormalBlock::Rotation(th));
            } else {
                let s = 1.0 / (-c).sqrt();
                ps.push(a * s);
                qs.push(b * s);
                blocks.push(NormalBlock::Rotation(TAU - th));
            }
        } else if im > 0.0 && modl > 1.0 {
            let v = kernel(*lam);
            let w = kernel(lam / (modl * modl));
            let (ep1, ep2) = (v.map(|c| c.re), v.map(|c| -c.im));
            let (eq1, eq2) = (w.map(|c| c.re), w.map(|c| -c.im));
            let g = nalgebra::Matrix2::new(
                omega(&ep1, &eq1),
                omega(&ep1, &eq2),
                omega(&ep2, &eq1),
                omega(&ep2, &eq2),
            );
            let gi = g
                .try_inverse()
                .ok_or_else(|| Cr3bpError::Degenerate("degenerate quadruple pairing".into()))?;
            let al = 0.5 * (gi[(0, 0)] + gi[(1, 1)]);
            let be = 0.5 * (gi[(1, 0)] - gi[(0, 1)]);
            let f1 = &eq1 * al + &eq2 * be;
            let f2 = &eq2 * al - &eq1 * be;
            ps.push(ep1);
            ps.push(ep2);
            qs.push(f1);
            qs.push(f2);
            blocks.push(NormalBlock::Quadruple {
                rho: modl,
                theta: lam.arg(),
            });
        }
    }
    if ps.len() != n {
        return Err(Cr3bpError::Degenerate(format!(
            "found {} symplectic pairs for dimension {}",
            ps.len(),
            dim
        )));
    }
    let mut p = DMatrix::zeros(dim, dim);
    for k in 0..n {
        p.set_column(k, &ps[k]);
        p.set_column(n + k, &qs[k]);
    }
    let nf = block_matrix(&blocks, 1.0).0;
    let recon = &p * nf * symplectic_inverse(&p);
    let pscale = p.amax().max(1.0);
    if symplectic_defect(&p) > 1e-6 * pscale * pscale || (&recon - m).amax() > 1e-6 * scale {
        return Err(Cr3bpError::Degenerate(
            "normal form reconstruction failed (matrix may not be semi-simple)".into(),
        ));
    }
    Ok((p, blocks))
}

fn fix_real(
    v: &nalgebra::DVector<Complex<f64>>,
    _re: nalgebra::DVector<f64>,
) -> nalgebra::DVector<f64> {
    let k = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|x| x.0)
        .unwrap_or(0);
    let ph = v[k] / v[k].norm();
    v.map(|c| (c / ph).re)
}

fn block_matrix(blocks: &[NormalBlock], t: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut acc: Option<(DMatrix<f64>, DMatrix<f64>)> = None;
    for b in blocks {
        let (m, s) = b.at(t);
        acc = Some(match acc {
            None => (m, s),
            Some((am, asg)) => (
                symplectic_direct_sum(&am, &m),
                symplectic_direct_sum(&asg, &s),
            ),
        });
    }
    acc.unwrap_or_else(|| (DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)))
}

/// `β(t) = P (N₁(t) ⋄ …) P⁻¹` on `[0, 1]` with `β(0) = I`, `β(1) = M` and
/// `−Jβ̇β⁻¹ ⪰ 0`.
pub fn nonneg_path(m: &DMatrix<f64>) -> Result<(SymplecticPath, Vec<NormalBlock>)> {
    let (p, blocks) = normal_form(m)?;
    let pi = symplectic_inverse(&p);
    let bl = blocks.clone();
    let path = SymplecticPath::new(m.nrows() / 2, 0.0, 1.0, move |t| {
        let (nm, ns) = block_matrix(&bl, t);
        (&p * nm * &pi, pi.transpose() * ns * &pi)
    });
    Ok((path.with_min_samples(2000), blocks))
}
