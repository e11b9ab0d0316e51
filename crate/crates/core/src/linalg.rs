//! Small symplectic linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use rand::Rng;

/// Standard complex structure `[[0, -I], [I, 0]]` in dimension `2n`.
pub fn j_matrix(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

pub fn j4() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    )
}

/// `‖MᵀJM − J‖` in the max norm.
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let j = j_matrix(n);
    (m.transpose() * &j * m - j).amax()
}

pub fn symplectic_defect4(m: &Matrix4<f64>) -> f64 {
    let j = j4();
    (m.transpose() * j * m - j).amax()
}

pub fn to_dmatrix4(m: &Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| m[(i, j)])
}

/// Inverse of a symplectic matrix, `-J Mᵀ J`.
pub fn symplectic_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let j = j_matrix(m.nrows() / 2);
    -(&j * m.transpose() * &j)
}

/// Block-diagonal sum of symplectic matrices written in `(p, q)` ordering,
/// so that the result is symplectic for the standard `J` of the total dimension.
pub fn symplectic_direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let na = a.nrows() / 2;
    let nb = b.nrows() / 2;
    let n = na + nb;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let ia = |i: usize| if i < na { i } else { n + (i - na) };
    let ib = |i: usize| if i < nb { na + i } else { n + na + (i - nb) };
    for r in 0..2 * na {
        for c in 0..2 * na {
            m[(ia(r), ia(c))] = a[(r, c)];
        }
    }
    for r in 0..2 * nb {
        for c in 0..2 * nb {
            m[(ib(r), ib(c))] = b[(r, c)];
        }
    }
    m
}

/// Number of positive minus number of negative eigenvalues; `None` if some
/// eigenvalue is below `tol` in absolute value.
pub fn signature(s: &DMatrix<f64>, tol: f64) -> (Option<i64>, f64) {
    if s.nrows() == 0 {
        return (Some(0), f64::INFINITY);
    }
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min_abs = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_abs < tol {
        return (None, min_abs);
    }
    let sig = eig
        .eigenvalues
        .iter()
        .map(|&v| if v > 0.0 { 1 } else { -1 })
        .sum();
    (Some(sig), min_abs)
}

/// Symmetric matrix with i.i.d. normal-ish entries scaled by `scale`.
pub fn random_symmetric<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0) * scale);
    (&a + a.transpose()) * 0.5
}

/// A random symplectic matrix `exp(J S)` with `S` random symmetric.
pub fn random_symplectic<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let s = random_symmetric(rng, 2 * n, scale);
    (j_matrix(n) * s).exp()
}

/// Planar rotation `R(θ)`.
pub fn rot2(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_symplectic_is_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..4 {
            let m = random_symplectic(&mut rng, n, 1.0);
            assert!(symplectic_defect(&m) < 1e-10);
            let inv = symplectic_inverse(&m);
            assert!((&m * inv - DMatrix::identity(2 * n, 2 * n)).amax() < 1e-10);
        }
    }

    #[test]
    fn direct_sum_preserves_symplecticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_symplectic(&mut rng, 1, 1.0);
        let b = random_symplectic(&mut rng, 2, 0.7);
        let m = symplectic_direct_sum(&a, &b);
        assert!(symplectic_defect(&m) < 1e-10);
    }

    #[test]
    fn signature_counts() {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -1.0, 3.0]));
        assert_eq!(signature(&s, 1e-9).0, Some(1));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.0]));
        assert_eq!(signature(&d, 1e-9).0, None);
    }
}
