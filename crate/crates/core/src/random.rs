//! Seeded random generators for exact-arithmetic property checks: rational
//! matrices, nilpotent endomorphisms and commuting nilpotent families.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::scalars::{rat, Field, Gauss, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<Rational> {
    Matrix::from_fn(rows, cols, |_, _| rat(r.gen_range(-5..6), 1))
}

/// Random invertible rational matrix (unit lower times unit upper with a
/// random permutation).
pub fn invertible_matrix(r: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, rat(r.gen_range(-3..4), 1));
            upper.set(j, i, rat(r.gen_range(-3..4), 1));
        }
    }
    let mut perm = Matrix::zeros(n, n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, r.gen_range(0..=i));
    }
    for (i, &j) in idx.iter().enumerate() {
        perm.set(i, j, Field::one());
    }
    lower.matmul(&upper).matmul(&perm)
}

/// Random nilpotent rational matrix: strictly upper triangular conjugated by
/// a random invertible matrix.
pub fn nilpotent_matrix(r: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
    let mut strict = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(0.6) {
                strict.set(i, j, rat(r.gen_range(-3..4), 1));
            }
        }
    }
    let p = invertible_matrix(r, n);
    let pinv = invert(&p).expect("invertible by construction");
    p.matmul(&strict).matmul(&pinv)
}

/// Random commuting nilpotent family: polynomials in one random nilpotent
/// matrix with zero constant term.
pub fn commuting_nilpotent_family(
    r: &mut ChaCha8Rng,
    n_ops: usize,
    dim: usize,
) -> Vec<Matrix<Rational>> {
    let base = nilpotent_matrix(r, dim);
    (0..n_ops)
        .map(|_| {
            let mut acc = Matrix::zeros(dim, dim);
            let mut pw = base.clone();
            for _ in 0..dim {
                acc = acc.add(&pw.scale(&rat(r.gen_range(-2..3), 1)));
                pw = pw.matmul(&base);
            }
            acc
        })
        .collect()
}

/// Exact inverse of a square matrix; `None` when singular.
pub fn invert<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    let mut aug = m.hstack(&Matrix::identity(n));
    let pivots = aug.rref();
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| aug.get(i, n + j).clone()))
}

pub fn to_gauss(m: &Matrix<Rational>) -> Matrix<Gauss> {
    m.map(|x| Gauss::from_rational(x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_is_nilpotent() {
        let mut r = rng(7);
        for _ in 0..10 {
            let n = r.gen_range(1..6);
            let m = nilpotent_matrix(&mut r, n);
            assert!(m.pow(n).is_zero());
        }
    }

    #[test]
    fn family_commutes() {
        let mut r = rng(11);
        let fam = commuting_nilpotent_family(&mut r, 3, 4);
        for a in &fam {
            assert!(a.pow(4).is_zero());
            for b in &fam {
                assert_eq!(a.matmul(b), b.matmul(a));
            }
        }
    }

    #[test]
    fn invert_roundtrip() {
        let mut r = rng(3);
        let m = invertible_matrix(&mut r, 5);
        let inv = invert(&m).unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(5));
    }
}
