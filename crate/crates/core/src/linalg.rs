//! Exact linear algebra over a field: matrices, canonical echelon-basis
//! subspaces, kernels, images, intersections, quotients and solving.
//!
//! Every subspace is stored as its reduced row-echelon basis, so subspace
//! equality is literal equality of bases.

use std::fmt;

use crate::scalars::{ConjField, Field, Gauss};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspace is not contained in the target: {0}")]
    NotContained(String),
}

/// Dense matrix, row-major. Acts on column vectors: `y = M v`.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<F> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn col(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(rhs.get(i, j)))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(rhs.get(i, j)))
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(s))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn pow(&self, e: usize) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.matmul(self);
        }
        acc
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut rows = self.row_vecs();
        rows.extend(rhs.row_vecs());
        Self::from_rows(rows)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix::from_fn(self.rows, self.cols, |i, j| f(self.get(i, j)))
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..self.cols {
            if lead >= self.rows {
                break;
            }
            // leftmost nonzero entry at or below `lead`
            let Some(pr) = (lead..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pr != lead {
                for c in 0..self.cols {
                    self.data.swap(pr * self.cols + c, lead * self.cols + c);
                }
            }
            let inv = self.get(lead, col).inv().expect("nonzero pivot");
            for c in 0..self.cols {
                let v = self.get(lead, c).mul(&inv);
                self.set(lead, c, v);
            }
            for r in 0..self.rows {
                if r != lead && !self.get(r, col).is_zero() {
                    let factor = self.get(r, col).clone();
                    for c in 0..self.cols {
                        let v = self.get(r, c).sub(&factor.mul(self.get(lead, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Solve `M x = v`; `None` when inconsistent.
    pub fn solve(&self, v: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, v.len(), "solve shape mismatch");
        let mut aug = self.hstack(&Matrix::from_rows(v.iter().map(|x| vec![x.clone()]).collect()));
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![F::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Canonical basis of `{x : M x = 0}`, one kernel vector per row.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let rank = pivots.len();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![F::zero(); self.cols];
            v[fc] = F::one();
            for r in 0..rank {
                v[pivots[r]] = m.get(r, fc).neg();
            }
            basis.push(v);
        }
        basis
    }
}

impl Matrix<Gauss> {
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Subspace of `F^ambient` in canonical reduced-echelon form.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn from_rows(ambient: usize, rows: Vec<Vec<F>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ambient), "bad row length");
        if rows.is_empty() {
            return Self::zero(ambient);
        }
        let mut m = Matrix::from_rows(rows);
        let pivots = m.rref();
        let rank = pivots.len();
        if rank == 0 {
            return Self::zero(ambient);
        }
        Subspace {
            ambient,
            basis: Matrix::from_rows(m.row_vecs().into_iter().take(rank).collect()),
        }
    }

    pub fn span_of_columns(m: &Matrix<F>) -> Self {
        Self::from_rows(m.rows(), m.transpose().row_vecs())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<F>> {
        self.basis.row_vecs()
    }

    pub fn contains(&self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.basis.transpose().solve(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other.basis_rows().iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the canonical basis.
    pub fn coords_of(&self, v: &[F]) -> Option<Vec<F>> {
        self.basis.transpose().solve(v)
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Self::from_rows(self.ambient, rows)
    }

    /// Zassenhaus intersection.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let m = self.ambient;
        let mut rows = Vec::new();
        for a in self.basis_rows() {
            let mut row = a.clone();
            row.extend(a);
            rows.push(row);
        }
        for b in other.basis_rows() {
            let mut row = b.clone();
            row.extend(vec![F::zero(); m]);
            rows.push(row);
        }
        if rows.is_empty() {
            return Self::zero(m);
        }
        let mut mat = Matrix::from_rows(rows);
        mat.rref();
        let mut inter = Vec::new();
        for r in 0..mat.rows() {
            let left_zero = (0..m).all(|c| mat.get(r, c).is_zero());
            let right = (m..2 * m).map(|c| mat.get(r, c).clone()).collect::<Vec<_>>();
            if left_zero && right.iter().any(|x| !x.is_zero()) {
                inter.push(right);
            }
        }
        Self::from_rows(m, inter)
    }

    /// Matrix `E` with `self = { x : E x = 0 }`.
    pub fn equation_matrix(&self) -> Matrix<F> {
        if self.dim() == 0 {
            return Matrix::identity(self.ambient);
        }
        let rows = self.basis.kernel_basis();
        if rows.is_empty() {
            Matrix::zeros(0, self.ambient)
        } else {
            Matrix::from_rows(rows)
        }
    }

    /// Image of the subspace under `m`.
    pub fn apply(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.cols(), self.ambient);
        Self::from_rows(
            m.rows(),
            self.basis_rows().iter().map(|v| m.mul_vec(v)).collect(),
        )
    }
}

impl<F: Field> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace<Gauss> {
    pub fn conj(&self) -> Self {
        Subspace::from_rows(
            self.ambient,
            self.basis_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| x.conj()).collect())
                .collect(),
        )
    }

    pub fn is_conj_stable(&self) -> bool {
        self.conj() == *self
    }

    /// Canonical subspace spanned by the fixed points of conjugation; for a
    /// conjugation-stable space its (complex) dimension is preserved and the
    /// canonical basis has rational entries.
    pub fn real_points(&self) -> Self {
        let half = Gauss::new(crate::scalars::rat(1, 2), crate::scalars::rat(0, 1));
        let mhalf_i = Gauss::new(crate::scalars::rat(0, 1), crate::scalars::rat(-1, 2));
        let mut rows = Vec::new();
        for b in self.basis_rows() {
            let re: Vec<Gauss> = b.iter().map(|x| x.add(&x.conj()).mul(&half)).collect();
            let im: Vec<Gauss> = b.iter().map(|x| x.sub(&x.conj()).mul(&mhalf_i)).collect();
            rows.push(re);
            rows.push(im);
        }
        // keep only vectors that genuinely lie in the space (always the case
        // when the space is conjugation stable)
        rows.retain(|v| self.contains(v));
        Subspace::from_rows(self.ambient, rows)
    }
}

/// Linear map with explicit domain/codomain dimensions, acting as `v -> M v`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<F: Field> {
    pub matrix: Matrix<F>,
}

impl<F: Field> LinearMap<F> {
    pub fn new(matrix: Matrix<F>) -> Self {
        LinearMap { matrix }
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        self.matrix.mul_vec(v)
    }

    pub fn image(&self) -> Subspace<F> {
        Subspace::span_of_columns(&self.matrix)
    }

    pub fn kernel(&self) -> Subspace<F> {
        Subspace::from_rows(self.domain_dim(), self.matrix.kernel_basis())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().dim() == 0
    }
}

/// Image (column space) of a matrix.
pub fn image<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    Subspace::span_of_columns(m)
}

/// Kernel of a matrix acting on column vectors.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    Subspace::from_rows(m.cols(), m.kernel_basis())
}

/// `{ v : M v ∈ s }`.
pub fn preimage<F: Field>(m: &Matrix<F>, s: &Subspace<F>) -> Subspace<F> {
    assert_eq!(m.rows(), s.ambient());
    let eqs = s.equation_matrix();
    if eqs.rows() == 0 {
        return Subspace::full(m.cols());
    }
    kernel(&eqs.matmul(m))
}

/// Canonical projection onto the quotient by `a`: kills `a`, coordinates are
/// the non-pivot positions of `a`'s echelon basis.
pub fn quotient_map<F: Field>(a: &Subspace<F>) -> LinearMap<F> {
    let ambient = a.ambient();
    let basis = a.basis();
    let mut pivots = Vec::new();
    for r in 0..basis.rows() {
        let p = (0..ambient).find(|&c| !basis.get(r, c).is_zero()).unwrap();
        pivots.push(p);
    }
    let free: Vec<usize> = (0..ambient).filter(|c| !pivots.contains(c)).collect();
    // reduction of e_j modulo the echelon basis, read off at free columns
    let mut m = Matrix::zeros(free.len(), ambient);
    for (out_i, &fc) in free.iter().enumerate() {
        m.set(out_i, fc, F::one());
        for (r, &pc) in pivots.iter().enumerate() {
            // e_{pc} reduces to -(row_r restricted to free columns) + e_{pc}; i.e.
            // the class of e_{pc} is minus the free part of row r... reduction:
            // x - sum_r x[pc_r] * row_r ; coordinate at fc:
            // x[fc] - sum_r x[pc_r]*row_r[fc]
            let v = basis.get(r, fc).neg();
            m.set(out_i, pc, v);
        }
    }
    LinearMap::new(m)
}

/// Quotient projection `b -> b/a` in `b`'s canonical coordinates; errors when
/// `a` is not contained in `b`.
pub fn quotient_map_in<F: Field>(
    a: &Subspace<F>,
    b: &Subspace<F>,
) -> Result<LinearMap<F>, LinalgError> {
    if !b.contains_subspace(a) {
        return Err(LinalgError::NotContained(format!(
            "dim {} space not inside dim {} space",
            a.dim(),
            b.dim()
        )));
    }
    let a_in_b: Vec<Vec<F>> = a
        .basis_rows()
        .iter()
        .map(|v| b.coords_of(v).expect("containment checked"))
        .collect();
    let a_sub = Subspace::from_rows(b.dim(), a_in_b);
    Ok(quotient_map(&a_sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, Rational};
    use proptest::prelude::*;

    fn rmat(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| rat(x, 1)).collect())
                .collect(),
        )
    }

    #[test]
    fn kernel_of_rank_one_on_dim_four() {
        // N kills e1,e3,e4 and sends e2 to e3: kernel is <e1,e3,e4>
        let n = rmat(vec![
            vec![0, 0, 0, 0],
            vec![0, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 0, 0],
        ]);
        let k = kernel(&n);
        assert_eq!(k.dim(), 3);
        for idx in [0, 2, 3] {
            let mut v = vec![rat(0, 1); 4];
            v[idx] = rat(1, 1);
            assert!(k.contains(&v));
        }
    }

    #[test]
    fn intersect_with_ambient_is_identity() {
        let s = Subspace::from_rows(
            3,
            vec![vec![rat(1, 1), rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1), rat(1, 1)]],
        );
        assert_eq!(s.intersect(&Subspace::full(3)), s);
    }

    #[test]
    fn image_of_graded_map_from_explicit_blocks() {
        // v -> (N1 v, N2 v, N3 v) on Q^2 with the three 2x2 blocks; image is
        // 2-dimensional inside Q^3 per graded piece... here target Q^6
        // collapsed to Q^3 by each block having rank <= 1 columns g1,g2:
        // N1 = [[1,0],[0,0]], N2 = [[0,0],[0,1]], N3 = [[1,1],[1,1]]
        // stacked map Q^2 -> Q^6
        let stacked = rmat(vec![
            vec![1, 0],
            vec![0, 0],
            vec![0, 0],
            vec![0, 1],
            vec![1, 1],
            vec![1, 1],
        ]);
        assert_eq!(image(&stacked).dim(), 2);
    }

    #[test]
    fn preimage_and_quotient() {
        let m = rmat(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 0]]);
        let s = Subspace::from_rows(3, vec![vec![rat(1, 1), rat(0, 1), rat(0, 1)]]);
        let p = preimage(&m, &s);
        // Mv in <e1> iff v2 = 0
        assert_eq!(p.dim(), 2);
        assert!(p.contains(&[rat(1, 1), rat(0, 1), rat(0, 1)]));
        assert!(p.contains(&[rat(0, 1), rat(0, 1), rat(1, 1)]));
        assert!(!p.contains(&[rat(0, 1), rat(1, 1), rat(0, 1)]));

        let q = quotient_map(&s);
        assert_eq!(q.codomain_dim(), 2);
        assert!(q.apply(&[rat(5, 1), rat(0, 1), rat(0, 1)]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn quotient_map_in_rejects_non_subspace() {
        let a = Subspace::from_rows(3, vec![vec![rat(1, 1), rat(0, 1), rat(0, 1)]]);
        let b = Subspace::from_rows(3, vec![vec![rat(0, 1), rat(1, 1), rat(0, 1)]]);
        assert!(quotient_map_in(&a, &b).is_err());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = rmat(vec![vec![1, 2], vec![2, 4]]);
        assert!(m.solve(&[rat(1, 1), rat(2, 1)]).is_some());
        assert!(m.solve(&[rat(1, 1), rat(3, 1)]).is_none());
        let x = m.solve(&[rat(3, 1), rat(6, 1)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(3, 1), rat(6, 1)]);
    }

    #[test]
    fn real_points_of_conj_stable_space() {
        // span of (1, i) over C is not conj stable; span of (i, 0),(0,1) is
        let s = Subspace::from_rows(
            2,
            vec![
                vec![Gauss::i(), Gauss::zero()],
                vec![Gauss::zero(), Gauss::one()],
            ],
        );
        assert!(s.is_conj_stable());
        let r = s.real_points();
        assert_eq!(r.dim(), 2);
        let t = Subspace::from_rows(2, vec![vec![Gauss::one(), Gauss::i()]]);
        assert!(!t.is_conj_stable());
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix<Rational>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-6i64..6, c), r)
                .prop_map(move |rows| rmat(rows))
        })
    }

    fn arb_subspace_pair() -> impl Strategy<Value = (Subspace<Rational>, Subspace<Rational>)> {
        (1usize..5).prop_flat_map(|amb| {
            let gen = proptest::collection::vec(proptest::collection::vec(-4i64..4, amb), 0..4);
            (gen.clone(), gen).prop_map(move |(a, b)| {
                let mk = |rows: Vec<Vec<i64>>| {
                    Subspace::from_rows(
                        amb,
                        rows.into_iter()
                            .map(|r| r.into_iter().map(|x| rat(x, 1)).collect())
                            .collect(),
                    )
                };
                (mk(a), mk(b))
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            prop_assert_eq!(m.rank() + kernel(&m).dim(), m.cols());
        }

        #[test]
        fn dim_formula(pair in arb_subspace_pair()) {
            let (a, b) = pair;
            prop_assert_eq!(
                a.intersect(&b).dim() + a.sum(&b).dim(),
                a.dim() + b.dim()
            );
        }

        #[test]
        fn canonical_basis_independent_of_spanning_set(m in arb_matrix()) {
            let amb = m.cols();
            let rows = m.row_vecs();
            let s1 = Subspace::from_rows(amb, rows.clone());
            // doubled and reversed spanning set spans the same space
            let mut rows2: Vec<Vec<Rational>> = rows.iter().rev().cloned().collect();
            for r in &rows {
                rows2.push(r.iter().map(|x| x.mul(&rat(3, 1))).collect());
            }
            let s2 = Subspace::from_rows(amb, rows2);
            prop_assert_eq!(s1, s2);
        }
    }
}
