//! The one-parameter deformation of the four-dimensional orbit, its pullback
//! to several variables, and the symbolic/numeric verifications built on it:
//! transversality, conjugate frames, orthogonality, frame independence,
//! positivity sampling, the limit fiber and the vanishing certificate.

use num_complex::Complex64;

use crate::linalg::{Matrix, Subspace};
use crate::mhs::{DecreasingFiltration, IncreasingFiltration, MixedHodgeStructure, Pairing};
use crate::orbits::NilpotentOrbit;
use crate::params::{Assignment, ParamElement, ParamRing, Var};
use crate::scalars::{ConjField, Field, Gauss};

#[derive(Debug, thiserror::Error)]
pub enum DeformError {
    #[error("invalid deformation data: {0}")]
    Invalid(String),
    #[error("symbolic identity failed: {0}")]
    Identity(String),
    #[error("numeric check failed: {0}")]
    Numeric(String),
}

/// Coordinate vector over the distinguished frame; entries are ring elements.
pub type FrameVector = [ParamElement; 4];

/// The deformed family over the parameter ring: both coordinate systems of
/// the filtration frame, the scalar data, and enough of the ambient limit
/// structure to rebuild the boundary fiber.
#[derive(Clone, Debug)]
pub struct DeformationFamily {
    pub ring: ParamRing,
    pub a: Gauss,
    pub big_c: Gauss,
    /// `None` keeps λ symbolic; `Some` substitutes a numeric value.
    pub lambda: Option<Gauss>,
    /// frame vectors in coordinates over the flat basis `u_1..u_4`
    pub w_u: [FrameVector; 4],
    /// frame vectors in coordinates over the extension basis `ũ_1..ũ_4`
    pub w_tilde: [FrameVector; 4],
    /// pairing values `<u_1,u_4>` and `<u_2,u_3>`
    pub q14: Gauss,
    pub p23: Gauss,
    /// ambient coordinates of `u_1..u_4` and the ambient weight filtration,
    /// for boundary-fiber reconstruction
    pub u_ambient: [Vec<Gauss>; 4],
    pub weight: IncreasingFiltration,
}

/// Deliberate single-term mutations used to demonstrate that each symbolic
/// check really constrains its term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// drop the `λt` tail of the third frame vector
    DropTailOfW3,
    /// rebuild the frame with the scalar `C` shifted by one, keeping the pairing
    ShiftBigC,
    /// add `ũ_3` to the first frame vector
    AddU3ToW1,
    /// add `λ·ũ_3` to the second frame vector
    AddLambdaU3ToW2,
}

fn pe(ring: ParamRing, c: &Gauss) -> ParamElement {
    ParamElement::constant(ring, c.clone())
}

fn zero4(ring: ParamRing) -> FrameVector {
    [
        ParamElement::zero(ring),
        ParamElement::zero(ring),
        ParamElement::zero(ring),
        ParamElement::zero(ring),
    ]
}

fn lambda_elem(ring: ParamRing, lambda: &Option<Gauss>) -> ParamElement {
    match lambda {
        None => ParamElement::var(ring, Var::Lambda),
        Some(v) => ParamElement::constant(ring, v.clone()),
    }
}

/// `Σ_k z_k` (the logarithm of the coordinate product).
fn z_sum(ring: ParamRing) -> ParamElement {
    let mut acc = ParamElement::zero(ring);
    for k in 0..ring.n {
        acc = acc.add(&ParamElement::var(ring, Var::Z(k)));
    }
    acc
}

/// Flat-to-extension basis change: `ũ_2 = u_2 - Σ_k z_k u_3`, other basis
/// vectors unchanged. Input and output are coordinate 4-vectors.
fn tilde_to_u(ring: ParamRing, v: &FrameVector) -> FrameVector {
    let mut out = v.clone();
    // a ũ_2 component contributes -a·Σz_k to the u_3 coordinate
    out[2] = out[2].sub(&v[1].mul(&z_sum(ring)));
    out
}

/// Conjugate of a flat-coordinate vector under `ū_1 = u_4`, `ū_2 = u_2`,
/// `ū_3 = -u_3`, `ū_4 = u_1`.
pub fn conj_u(v: &FrameVector) -> FrameVector {
    [
        v[3].conj(),
        v[1].conj(),
        v[2].conj().neg(),
        v[0].conj(),
    ]
}

/// Derivation `ξ_k` on flat coordinates (flat basis vectors are horizontal).
fn xi_u(v: &FrameVector, k: usize) -> FrameVector {
    [v[0].xi(k), v[1].xi(k), v[2].xi(k), v[3].xi(k)]
}

/// `exp(-Σ_k z_k N_k) v` expanded in the extension frame: ambient coordinate
/// functions of the flat section `v`.
pub fn horizontal_to_deligne(
    v: &[Gauss],
    family: &crate::orbits::NilpotentFamily,
    ring: ParamRing,
) -> Vec<ParamElement> {
    let d = v.len();
    assert_eq!(d, family.dim());
    let mut current: Vec<ParamElement> = v.iter().map(|c| pe(ring, c)).collect();
    let mut total = current.clone();
    let mut factorial = Gauss::one();
    for m in 1..=d {
        factorial = factorial.mul(&Gauss::from_i64(m as i64));
        // apply -Σ_k z_k N_k once
        let mut next = vec![ParamElement::zero(ring); d];
        for k in 0..family.n() {
            let zk = ParamElement::var(ring, Var::Z(k));
            let n = family.op(k);
            for r in 0..d {
                let mut acc = ParamElement::zero(ring);
                for c in 0..d {
                    if !n.get(r, c).is_zero() {
                        acc = acc.add(&current[c].scale(n.get(r, c)));
                    }
                }
                next[r] = next[r].sub(&acc.mul(&zk));
            }
        }
        if next.iter().all(|x| x.is_zero()) {
            break;
        }
        let inv = factorial.inv().unwrap();
        for (t, x) in total.iter_mut().zip(&next) {
            *t = t.add(&x.scale(&inv));
        }
        current = next;
    }
    total
}

/// Build the deformed frame from a distinguished basis and the scalar data.
/// `u` are ambient coordinates of the four basis vectors; the pairing supplies
/// the two nonzero values; `weight` is the ambient weight filtration (kept for
/// the boundary fiber).
#[allow(clippy::too_many_arguments)]
pub fn build_family(
    u: &[Vec<Gauss>; 4],
    a: &Gauss,
    big_c: &Gauss,
    lambda: Option<Gauss>,
    pairing: &Pairing,
    weight: &IncreasingFiltration,
    ring: ParamRing,
) -> Result<DeformationFamily, DeformError> {
    let q14 = pairing.value(&u[0], &u[3]);
    let p23 = pairing.value(&u[1], &u[2]);
    if p23.is_zero() {
        return Err(DeformError::Invalid("<u_2, u_3> must be nonzero".into()));
    }
    let (w_tilde, w_u) = build_frames(ring, a, big_c, &lambda);
    Ok(DeformationFamily {
        ring,
        a: a.clone(),
        big_c: big_c.clone(),
        lambda,
        w_u,
        w_tilde,
        q14,
        p23,
        u_ambient: u.clone(),
        weight: weight.clone(),
    })
}

/// Closed-form frame vectors in extension and flat coordinates.
fn build_frames(
    ring: ParamRing,
    a: &Gauss,
    big_c: &Gauss,
    lambda: &Option<Gauss>,
) -> ([FrameVector; 4], [FrameVector; 4]) {
    let tau = ParamElement::t_product(ring);
    let lam = lambda_elem(ring, lambda);
    let half = Gauss::new(crate::scalars::rat(1, 2), crate::scalars::rat(0, 1));
    let clt = lam.mul(&tau).scale(big_c);
    let lt = lam.mul(&tau);
    let mut w1 = zero4(ring);
    w1[0] = ParamElement::one(ring);
    w1[1] = clt.clone();
    w1[2] = clt.scale(a);
    w1[3] = clt.mul(&lt).scale(&half);
    let mut w2 = zero4(ring);
    w2[1] = ParamElement::one(ring);
    w2[2] = pe(ring, &a.sub(&Gauss::one()));
    w2[3] = lt.clone();
    let mut w3 = zero4(ring);
    w3[2] = ParamElement::one(ring).neg();
    w3[3] = lt.clone();
    let mut w4 = zero4(ring);
    w4[3] = ParamElement::one(ring);
    let w_tilde = [w1, w2, w3, w4];
    let w_u = [
        tilde_to_u(ring, &w_tilde[0]),
        tilde_to_u(ring, &w_tilde[1]),
        tilde_to_u(ring, &w_tilde[2]),
        tilde_to_u(ring, &w_tilde[3]),
    ];
    (w_tilde, w_u)
}

impl DeformationFamily {
    /// Apply a single-term mutation (for negative tests).
    pub fn perturbed(&self, p: Perturbation) -> DeformationFamily {
        let mut out = self.clone();
        let ring = self.ring;
        match p {
            Perturbation::DropTailOfW3 => {
                let mut w3 = zero4(ring);
                w3[2] = ParamElement::one(ring).neg();
                out.w_tilde[2] = w3.clone();
                out.w_u[2] = tilde_to_u(ring, &w3);
            }
            Perturbation::ShiftBigC => {
                // rebuild the frame with the shifted constant while keeping
                // the original pairing values
                out.big_c = self.big_c.add(&Gauss::one());
                let (wt, wu) = build_frames(ring, &self.a, &out.big_c, &self.lambda);
                out.w_tilde = wt;
                out.w_u = wu;
            }
            Perturbation::AddU3ToW1 => {
                out.w_tilde[0][2] = out.w_tilde[0][2].add(&ParamElement::one(ring));
                out.w_u[0] = tilde_to_u(ring, &out.w_tilde[0]);
            }
            Perturbation::AddLambdaU3ToW2 => {
                let lam = lambda_elem(ring, &None);
                out.w_tilde[1][2] = out.w_tilde[1][2].add(&lam);
                out.w_u[1] = tilde_to_u(ring, &out.w_tilde[1]);
            }
        }
        out
    }

    fn lam(&self) -> ParamElement {
        lambda_elem(self.ring, &self.lambda)
    }

    fn lt(&self) -> ParamElement {
        self.lam().mul(&ParamElement::t_product(self.ring))
    }

    /// Pairing of two flat-coordinate vectors, extended bilinearly; only the
    /// `{1,4}` and `{2,3}` slots carry nonzero values.
    pub fn pair(&self, x: &FrameVector, y: &FrameVector) -> ParamElement {
        let mut acc = ParamElement::zero(self.ring);
        let vals: [(usize, usize, Gauss); 4] = [
            (0, 3, self.q14.clone()),
            (3, 0, self.q14.neg()),
            (1, 2, self.p23.clone()),
            (2, 1, self.p23.neg()),
        ];
        for (i, j, v) in vals {
            acc = acc.add(&x[i].mul(&y[j]).scale(&v));
        }
        acc
    }

    /// The four transversality identities, exact in the parameter ring, for
    /// every index.
    pub fn check_transversality(&self) -> Result<(), DeformError> {
        let clt = self.lt().scale(&self.big_c);
        let lt = self.lt();
        for k in 0..self.ring.n {
            let targets: [FrameVector; 4] = [
                scale_frame(&self.w_u[1], &clt),
                self.w_u[2].clone(),
                scale_frame(&self.w_u[3], &lt),
                zero4(self.ring),
            ];
            for (j, target) in targets.iter().enumerate() {
                let lhs = xi_u(&self.w_u[j], k);
                for c in 0..4 {
                    if lhs[c] != target[c] {
                        return Err(DeformError::Identity(format!(
                            "ξ_{} of frame vector {} has wrong coordinate {}: {} vs {}",
                            k + 1,
                            j + 1,
                            c + 1,
                            lhs[c],
                            target[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Conjugate frame in flat coordinates against the closed-form
    /// expressions built from the conjugated scalars.
    pub fn check_conjugate_frame(&self) -> Result<(), DeformError> {
        let ring = self.ring;
        let taub = ParamElement::t_product(ring).conj();
        let lamb = self.lam().conj();
        let ltb = lamb.mul(&taub);
        let cb = self.big_c.conj();
        let ab = self.a.conj();
        let zb = z_sum(ring).conj();
        let half = Gauss::new(crate::scalars::rat(1, 2), crate::scalars::rat(0, 1));
        // w̄_1 = u_4 + C̄λ̄t̄(u_2 + (z̄-ā)u_3 + ½λ̄t̄u_1)
        let mut e1 = zero4(ring);
        e1[3] = ParamElement::one(ring);
        e1[1] = ltb.scale(&cb);
        e1[2] = ltb.scale(&cb).mul(&zb.sub(&pe(ring, &ab)));
        e1[0] = ltb.scale(&cb).mul(&ltb).scale(&half);
        // w̄_2 = u_2 + (z̄-ā+1)u_3 + λ̄t̄u_1
        let mut e2 = zero4(ring);
        e2[1] = ParamElement::one(ring);
        e2[2] = zb.sub(&pe(ring, &ab.sub(&Gauss::one())));
        e2[0] = ltb.clone();
        // w̄_3 = u_3 + λ̄t̄u_1, w̄_4 = u_1
        let mut e3 = zero4(ring);
        e3[2] = ParamElement::one(ring);
        e3[0] = ltb.clone();
        let mut e4 = zero4(ring);
        e4[0] = ParamElement::one(ring);
        let expected = [e1, e2, e3, e4];
        for (j, exp) in expected.iter().enumerate() {
            let got = conj_u(&self.w_u[j]);
            for c in 0..4 {
                if got[c] != exp[c] {
                    return Err(DeformError::Identity(format!(
                        "conjugate of frame vector {} disagrees at coordinate {}: {} vs {}",
                        j + 1,
                        c + 1,
                        got[c],
                        exp[c]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Symbolic orthogonality of the filtration levels: reduces to the two
    /// pairings against the first frame vector; a nonzero result is returned
    /// as the polynomial witness.
    pub fn check_orthogonality(&self) -> Result<(), ParamElement> {
        let p12 = self.pair(&self.w_u[0], &self.w_u[1]);
        if !p12.is_zero() {
            return Err(p12);
        }
        let p13 = self.pair(&self.w_u[0], &self.w_u[2]);
        if !p13.is_zero() {
            return Err(p13);
        }
        Ok(())
    }

    /// Rows of the independence matrix: the first three frame vectors and the
    /// conjugate of the first, in flat coordinates.
    pub fn independence_matrix(&self) -> [FrameVector; 4] {
        [
            self.w_u[0].clone(),
            self.w_u[1].clone(),
            self.w_u[2].clone(),
            conj_u(&self.w_u[0]),
        ]
    }

    /// Symbolic determinant of the independence matrix (cofactor expansion).
    pub fn frame_determinant(&self) -> ParamElement {
        let m = self.independence_matrix();
        let rows: Vec<Vec<ParamElement>> = m.iter().map(|r| r.to_vec()).collect();
        det_param(&rows)
    }

    /// Numeric determinant at a sample; errors when it falls under the
    /// tolerance.
    pub fn check_frame_independence(
        &self,
        sample: &Assignment,
        tol: f64,
    ) -> Result<Complex64, DeformError> {
        let rows: Vec<Vec<Complex64>> = self
            .independence_matrix()
            .iter()
            .map(|r| eval_frame(r, sample))
            .collect::<Result<_, _>>()?;
        let det = det_complex(&rows);
        if det.norm() <= tol {
            return Err(DeformError::Numeric(format!(
                "frame determinant {det} below tolerance at sample"
            )));
        }
        Ok(det)
    }

    /// Positivity of the four Hermitian signs at a numeric sample, plus the
    /// one-dimensionality of the crossing intersection.
    pub fn check_positivity(&self, sample: &Assignment, tol: f64) -> Result<[f64; 4], DeformError> {
        self.check_frame_independence(sample, tol)?;
        let w: Vec<Vec<Complex64>> = self
            .w_u
            .iter()
            .map(|r| eval_frame(r, sample))
            .collect::<Result<_, _>>()?;
        let wb: Vec<Vec<Complex64>> = self
            .w_u
            .iter()
            .map(|r| eval_frame(&conj_u(r), sample))
            .collect::<Result<_, _>>()?;
        // crossing system: x_1 w_1 + x_2 w_2 = y_1 w̄_1 + y_2 w̄_2 + y_3 w̄_3
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        cols.push(w[0].clone());
        cols.push(w[1].clone());
        for j in 0..3 {
            cols.push(wb[j].iter().map(|x| -x).collect());
        }
        let null = complex_nullspace(&cols, tol);
        if null.len() != 1 {
            return Err(DeformError::Numeric(format!(
                "crossing intersection has numeric dimension {}, expected 1",
                null.len()
            )));
        }
        let x = &null[0];
        let eta2: Vec<Complex64> = (0..4).map(|i| x[0] * w[0][i] + x[1] * w[1][i]).collect();
        let eta1 = w[0].clone();
        let eta3 = conj_numeric(&eta2);
        let eta4 = conj_numeric(&eta1);
        let b14 = self.q14.to_complex64();
        let b23 = self.p23.to_complex64();
        let etas = [(eta1, 1i64), (eta2, 0), (eta3, -1), (eta4, -2)];
        let mut signs = [0f64; 4];
        for (idx, (eta, p)) in etas.iter().enumerate() {
            let ebar = conj_numeric(eta);
            let ipow = Complex64::new(0.0, 1.0).powi((-2 * p - 1).rem_euclid(4) as i32);
            let scaled: Vec<Complex64> = ebar.iter().map(|x| ipow * x).collect();
            let v = pair_numeric(eta, &scaled, b14, b23);
            if v.im.abs() > tol {
                return Err(DeformError::Numeric(format!(
                    "Hermitian value at p = {p} is not real: {v}"
                )));
            }
            if v.re <= tol {
                return Err(DeformError::Numeric(format!(
                    "Hermitian sign at p = {p} not positive: {}",
                    v.re
                )));
            }
            signs[idx] = v.re;
        }
        Ok(signs)
    }

    /// Boundary fiber: substitute all coordinate variables by zero. The
    /// result must be free of λ; it is returned as a filtered structure on
    /// the ambient space with the stored weight filtration.
    pub fn limit_fiber(&self) -> Result<MixedHodgeStructure, DeformError> {
        let d = self.u_ambient[0].len();
        let mut limits: Vec<Vec<Gauss>> = Vec::with_capacity(4);
        for (j, wt) in self.w_tilde.iter().enumerate() {
            let mut ambient = vec![Gauss::zero(); d];
            for (c, coeff_fn) in wt.iter().enumerate() {
                let at_zero = coeff_fn.subst_t_zero();
                if !at_zero.is_lambda_free() {
                    return Err(DeformError::Identity(format!(
                        "boundary value of frame vector {} depends on λ",
                        j + 1
                    )));
                }
                let val = at_zero.constant_term();
                if at_zero != pe(self.ring, &val) {
                    return Err(DeformError::Identity(format!(
                        "boundary value of frame vector {} is not constant",
                        j + 1
                    )));
                }
                for (x, u) in ambient.iter_mut().zip(&self.u_ambient[c]) {
                    *x = x.add(&val.mul(u));
                }
            }
            limits.push(ambient);
        }
        let mut fsteps = std::collections::BTreeMap::new();
        for p in -2i64..=1 {
            let count = (2 - p) as usize;
            fsteps.insert(p, Subspace::from_rows(d, limits[..count].to_vec()));
        }
        let hodge = DecreasingFiltration::new(d, fsteps)
            .map_err(|e| DeformError::Invalid(format!("{e}")))?;
        MixedHodgeStructure::new(self.weight.clone(), hodge, 0, crate::mhs::FieldMode::RealForm)
            .map_err(|e| DeformError::Invalid(format!("{e}")))
    }

    /// Reduce a flat-coordinate vector against the first `frame_size` frame
    /// vectors; the remainder is the obstruction to membership in their span.
    fn reduce_against_frame(&self, v: &FrameVector, frame_size: usize) -> FrameVector {
        // the ũ-coordinate frame is triangular with unit leading entries, so
        // reduction by successive elimination is exact
        let mut rest = v.clone();
        for j in 0..frame_size {
            let lead = &self.w_tilde[j];
            // pivot coordinate of frame vector j is coordinate j (entries
            // 1, 1, -1, 1 respectively)
            let pivot = lead[j].clone();
            let pivot_const = pivot.constant_term();
            let factor = rest[j].scale(&pivot_const.inv().expect("unit pivot"));
            for c in 0..4 {
                rest[c] = rest[c].sub(&factor.mul(&lead[c]));
            }
        }
        rest
    }

    /// Stability of the next-to-last filtration level under all derivations;
    /// on failure reports the index and the leftover coefficient (always a
    /// multiple of the coordinate product).
    pub fn check_theorem15_hypothesis(&self) -> Result<(), (usize, ParamElement)> {
        self.check_theorem15_with_frame(3)
    }

    pub fn check_theorem15_with_frame(
        &self,
        frame_size: usize,
    ) -> Result<(), (usize, ParamElement)> {
        if frame_size >= 4 {
            return Ok(()); // the whole module is trivially stable
        }
        for k in 0..self.ring.n {
            for j in 0..frame_size {
                // ξ_k in extension coordinates: derive coefficients and add
                // the ũ_2 → -ũ_3 correction
                let wt = &self.w_tilde[j];
                let mut lhs = [wt[0].xi(k), wt[1].xi(k), wt[2].xi(k), wt[3].xi(k)];
                lhs[2] = lhs[2].sub(&wt[1]);
                let rest = self.reduce_against_frame(&lhs, frame_size);
                if let Some(c) = rest.iter().position(|x| !x.is_zero()) {
                    return Err((k, rest[c].clone()));
                }
            }
        }
        Ok(())
    }
}

fn scale_frame(v: &FrameVector, s: &ParamElement) -> FrameVector {
    [v[0].mul(s), v[1].mul(s), v[2].mul(s), v[3].mul(s)]
}

fn eval_frame(v: &FrameVector, at: &Assignment) -> Result<Vec<Complex64>, DeformError> {
    v.iter()
        .map(|x| x.evaluate(at).map_err(DeformError::Numeric))
        .collect()
}

/// Conjugation of a numeric flat-coordinate vector (swap 1 ↔ 4, negate 3).
fn conj_numeric(v: &[Complex64]) -> Vec<Complex64> {
    vec![v[3].conj(), v[1].conj(), -v[2].conj(), v[0].conj()]
}

fn pair_numeric(x: &[Complex64], y: &[Complex64], b14: Complex64, b23: Complex64) -> Complex64 {
    x[0] * y[3] * b14 - x[3] * y[0] * b14 + x[1] * y[2] * b23 - x[2] * y[1] * b23
}

/// Determinant of a square matrix of ring elements by cofactor expansion.
pub fn det_param(rows: &[Vec<ParamElement>]) -> ParamElement {
    let n = rows.len();
    let ring = rows[0][0].ring();
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc = ParamElement::zero(ring);
    for j in 0..n {
        if rows[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<ParamElement>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = rows[0][j].mul(&det_param(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn det_complex(rows: &[Vec<Complex64>]) -> Complex64 {
    let n = rows.len();
    let mut m: Vec<Vec<Complex64>> = rows.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())
            .unwrap();
        if m[piv][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        let inv = m[col][col].inv();
        for r in col + 1..n {
            let f = m[r][col] * inv;
            for c in col..n {
                let sub = f * m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Numeric nullspace of the matrix with the given columns (rows = common
/// length); returns coefficient vectors of unit norm.
fn complex_nullspace(cols: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    let ncols = cols.len();
    let nrows = cols[0].len();
    let mut m: Vec<Vec<Complex64>> = (0..nrows)
        .map(|r| (0..ncols).map(|c| cols[c][r]).collect())
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        let piv = (row..nrows).max_by(|&a, &b| {
            m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap()
        });
        let Some(piv) = piv else { break };
        if m[piv][col].norm() <= tol {
            continue;
        }
        m.swap(piv, row);
        let inv = m[row][col].inv();
        for c in 0..ncols {
            m[row][c] *= inv;
        }
        for r in 0..nrows {
            if r != row && m[r][col].norm() > 0.0 {
                let f = m[r][col];
                for c in 0..ncols {
                    let sub = f * m[row][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &fc in &free {
        let mut v = vec![Complex64::new(0.0, 0.0); ncols];
        v[fc] = Complex64::new(1.0, 0.0);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][fc];
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        out.push(v);
    }
    out
}

/// Default numeric sample grid: two moduli times four phases for the
/// coordinates (all coordinates equal), with the given λ.
pub fn default_samples(n: usize, lambda: Complex64) -> Vec<Assignment> {
    let mut out = Vec::new();
    for &modulus in &[1e-1, 1e-2] {
        for &phase in &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ] {
            let t = phase * modulus;
            out.push(Assignment::new(vec![t; n], lambda));
        }
    }
    out
}

/// Outcome of the vanishing certificate.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub n: usize,
    pub target_dim: usize,
    /// per ordered pair (k, k'), the derived obstruction `λ(c_k - c_k')`
    pub identities: Vec<((usize, usize), ParamElement)>,
    pub feasibility: Option<FeasibilityReport>,
}

#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub lambda: Gauss,
    pub c: Vec<Gauss>,
    pub truncation: u32,
    pub unknowns: usize,
    pub equations: usize,
    pub feasible: bool,
}

/// Derive the vanishing obstruction: verify the frame relation expressing the
/// third extension-basis vector, extract the coordinate-product coefficient
/// of the pairwise differences of the transversality constraints, and
/// optionally solve the truncated linear system for explicit data.
pub fn theorem23_certificate(
    orbit: &NilpotentOrbit,
    fam: &DeformationFamily,
    feasibility: Option<(Gauss, Vec<Gauss>, u32)>,
) -> Result<Certificate, DeformError> {
    let n = fam.ring.n;
    if n < 2 {
        return Err(DeformError::Invalid(
            "the certificate needs at least two variables".into(),
        ));
    }
    // target dimension via the intersection complex
    let h1 = crate::cohomology::ic_complex(&orbit.limit, &orbit.family).h(1);
    let target_dim = h1.space.dim();

    // the frame relation ũ_3 = λ t_1⋯t_n w_4 - w_3 must hold exactly
    let ring = fam.ring;
    let lt = fam.lt();
    let mut u3 = zero4(ring);
    u3[2] = ParamElement::one(ring);
    for c in 0..4 {
        let rhs = fam.w_tilde[3][c].mul(&lt).sub(&fam.w_tilde[2][c]);
        if rhs != u3[c] {
            return Err(DeformError::Identity(
                "frame relation for the third basis vector fails".into(),
            ));
        }
    }

    // Transversality of the extended section forces, for each k,
    //   λ t_1⋯t_n (h_3 - c_k) + ξ_k h_4 = 0.
    // The unknown parts agree for all k; pairwise differences leave, at the
    // coordinate-product coefficient, exactly λ(c_k - c_k'). Derive in a ring
    // whose truncation accommodates the degree-(n+1) product λ t_1⋯t_n.
    let ring = ParamRing {
        n,
        trunc: ring.trunc.max(n as u32 + 1),
    };
    let lt = lambda_elem(ring, &None).mul(&ParamElement::t_product(ring));
    let lam = lambda_elem(ring, &None);
    let mut identities = Vec::new();
    for k in 0..n {
        for kp in k + 1..n {
            let ck = ParamElement::var(ring, Var::C(k));
            let ckp = ParamElement::var(ring, Var::C(kp));
            // known part of the k-th constraint: -λτ·c_k (the h_j terms are
            // identical across k and cancel in the difference)
            let known_k = lt.mul(&ck).neg();
            let known_kp = lt.mul(&ckp).neg();
            let diff = known_kp.sub(&known_k); // = λτ(c_k - c_k')
            let ident = diff.t_product_coefficient();
            let expected = lam.mul(&ck.sub(&ckp));
            if ident != expected {
                return Err(DeformError::Identity(
                    "derived identity is not λ(c_k - c_k')".into(),
                ));
            }
            identities.push(((k, kp), ident.truncated(fam.ring.trunc)));
        }
    }

    let feasibility = match feasibility {
        None => None,
        Some((lambda, c, trunc)) => {
            if c.len() != n {
                return Err(DeformError::Invalid("c-vector arity mismatch".into()));
            }
            Some(solve_truncated_system(n, &lambda, &c, trunc))
        }
    };
    Ok(Certificate {
        n,
        target_dim,
        identities,
        feasibility,
    })
}

/// Exponent vectors of total degree ≤ d.
fn exponents_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; n]];
    for k in 0..n {
        let mut next = Vec::new();
        for e in &out {
            let used: u32 = e.iter().sum();
            for v in 0..=(d - used) {
                let mut e2 = e.clone();
                e2[k] = v;
                next.push(e2);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Exact feasibility of the truncated constraint system
/// `λ τ (h_3 - c_k) + ξ_k h_4 = 0` in the unknown coefficients of the two
/// holomorphic series, both truncated at total degree `trunc`.
fn solve_truncated_system(n: usize, lambda: &Gauss, c: &[Gauss], trunc: u32) -> FeasibilityReport {
    let monos = exponents_up_to(n, trunc);
    let index: std::collections::BTreeMap<Vec<u32>, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let m_count = monos.len();
    // unknowns: h3 coefficients then h4 coefficients
    let unknowns = 2 * m_count;
    let mut rows: Vec<Vec<Gauss>> = Vec::new();
    let mut rhs: Vec<Gauss> = Vec::new();
    let ones = vec![1u32; n];
    for k in 0..n {
        for (mi, mu) in monos.iter().enumerate() {
            let mut row = vec![Gauss::zero(); unknowns];
            let mut any = false;
            // λ·h3[μ - (1,…,1)]
            if mu.iter().all(|&e| e >= 1) {
                let shifted: Vec<u32> = mu.iter().map(|&e| e - 1).collect();
                if let Some(&si) = index.get(&shifted) {
                    row[si] = lambda.clone();
                    any = true;
                }
            }
            // μ_k · h4[μ]
            if mu[k] > 0 {
                row[m_count + mi] = Gauss::from_i64(mu[k] as i64);
                any = true;
            }
            let b = if *mu == ones {
                lambda.mul(&c[k])
            } else {
                Gauss::zero()
            };
            if any || !b.is_zero() {
                rows.push(row);
                rhs.push(b);
            }
        }
    }
    let equations = rows.len();
    let m = Matrix::from_rows(rows);
    let feasible = m.solve(&rhs).is_some();
    FeasibilityReport {
        lambda: lambda.clone(),
        c: c.to_vec(),
        truncation: trunc,
        unknowns,
        equations,
        feasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;
    use crate::scenario::fixtures;

    fn fam(n: usize, trunc: u32, lambda: Option<Gauss>) -> DeformationFamily {
        let mut s = fixtures::h1_orbit();
        if let Some(p) = &mut s.params {
            p.n = n;
        }
        s.deformation(Some(trunc), Some(lambda)).unwrap()
    }

    fn gi(re: i64, im: i64) -> Gauss {
        Gauss::new(rat(re, 1), rat(im, 1))
    }

    #[test]
    fn transversality_exact_symbolic() {
        for n in [1, 3] {
            fam(n, 6, None).check_transversality().unwrap();
        }
    }

    #[test]
    fn conjugate_frame_matches_closed_form() {
        for n in [1, 2] {
            fam(n, 6, None).check_conjugate_frame().unwrap();
        }
    }

    #[test]
    fn orthogonality_holds_and_fails_with_divisible_witness() {
        let f = fam(2, 6, None);
        f.check_orthogonality().unwrap();
        let witness = f
            .perturbed(Perturbation::ShiftBigC)
            .check_orthogonality()
            .unwrap_err();
        assert!(!witness.is_zero());
        // witness vanishes both at t = 0 and at λ = 0, i.e. is divisible by λt
        assert!(witness.subst_t_zero().is_zero());
        assert!(witness.subst_lambda(&Gauss::zero()).is_zero());
    }

    #[test]
    fn dropped_tail_breaks_transversality() {
        let f = fam(2, 6, None).perturbed(Perturbation::DropTailOfW3);
        assert!(f.check_transversality().is_err());
    }

    #[test]
    fn perturbed_first_vector_breaks_conjugate_frame() {
        let f = fam(2, 6, None).perturbed(Perturbation::AddU3ToW1);
        assert!(f.check_conjugate_frame().is_err());
    }

    #[test]
    fn limit_fiber_is_lambda_free_and_matches_fixture() {
        let f = fam(2, 6, None);
        let limit = f.limit_fiber().unwrap();
        limit.check_mhs().unwrap();
        let expected = fixtures::h1_orbit().mhs().unwrap();
        assert!(limit.hodge.equivalent(&expected.hodge));
        assert!(limit.weight.equivalent(&expected.weight));
        // a λ-dependent frame coefficient survives at t = 0 and is rejected
        let bad = f.perturbed(Perturbation::AddLambdaU3ToW2);
        assert!(bad.limit_fiber().is_err());
    }

    /// Determinant oracle: full permutation-sum expansion.
    fn det_leibniz(rows: &[Vec<ParamElement>]) -> ParamElement {
        let n = rows.len();
        let ring = rows[0][0].ring();
        let mut perms: Vec<(Vec<usize>, bool)> = vec![(Vec::new(), true)];
        for _ in 0..n {
            let mut next = Vec::new();
            for (p, sign) in &perms {
                for j in 0..n {
                    if !p.contains(&j) {
                        let inversions = p.iter().filter(|&&x| x > j).count();
                        let mut p2 = p.clone();
                        p2.push(j);
                        next.push((p2, *sign == (inversions % 2 == 0)));
                    }
                }
            }
            perms = next;
        }
        let mut acc = ParamElement::zero(ring);
        for (p, sign) in perms {
            let mut term = ParamElement::one(ring);
            for (i, &j) in p.iter().enumerate() {
                term = term.mul(&rows[i][j]);
            }
            acc = if sign { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    #[test]
    fn frame_determinant_minus_one_at_lambda_zero_and_matches_oracle() {
        let f = fam(2, 4, None);
        let det = f.frame_determinant();
        let at_zero = det.subst_lambda(&Gauss::zero());
        assert_eq!(at_zero, ParamElement::constant(f.ring, gi(-1, 0)));
        let rows: Vec<Vec<ParamElement>> =
            f.independence_matrix().iter().map(|r| r.to_vec()).collect();
        assert_eq!(det, det_leibniz(&rows));
        // numeric: nonzero on the default grid for small nonzero λ
        for s in default_samples(2, Complex64::new(0.0, 1e-2)) {
            f.check_frame_independence(&s, 1e-9).unwrap();
        }
    }

    #[test]
    fn positivity_on_sample_grid() {
        let f = fam(2, 6, None);
        for lambda in [
            Complex64::new(0.0, 0.0),
            Complex64::new(1e-3, 0.0),
            Complex64::new(0.0, 1e-2),
        ] {
            let samples = default_samples(2, lambda);
            assert_eq!(samples.len(), 8);
            for s in &samples {
                let signs = f.check_positivity(s, 1e-9).unwrap();
                for v in signs {
                    assert!(v > 1e-9);
                }
            }
        }
    }

    #[test]
    fn stability_of_next_to_last_level() {
        // numeric λ = 0: stable
        fam(2, 6, Some(Gauss::zero()))
            .check_theorem15_hypothesis()
            .unwrap();
        // symbolic λ: fails with remainder λ t_1⋯t_n
        let f = fam(2, 6, None);
        let (_, witness) = f.check_theorem15_hypothesis().unwrap_err();
        let expected = ParamElement::var(f.ring, Var::Lambda).mul(&ParamElement::t_product(f.ring));
        assert_eq!(witness, expected);
        // the whole module is trivially stable
        f.check_theorem15_with_frame(4).unwrap();
    }

    #[test]
    fn deligne_coordinates_of_flat_section() {
        let s = fixtures::h1_orbit();
        let family = s.family().unwrap();
        let ring = ParamRing { n: 1, trunc: 4 };
        // the second basis vector maps to itself minus z times its image
        let e2 = vec![Gauss::zero(), Gauss::one(), Gauss::zero(), Gauss::zero()];
        let tilde = horizontal_to_deligne(&e2, &family, ring);
        assert_eq!(tilde[1], ParamElement::one(ring));
        let z = ParamElement::var(ring, Var::Z(0));
        assert_eq!(tilde[2], z.scale(&gi(0, 1)).neg());
        assert!(tilde[0].is_zero() && tilde[3].is_zero());
    }

    #[test]
    fn certificate_identities_and_feasibility() {
        for n in [2usize, 3] {
            let s = fixtures::h1_orbit();
            let orbit = s.pullback_orbit(n).unwrap();
            let f = fam(n, 3, None);
            let lam = Gauss::new(rat(1, 100), rat(0, 1));
            let mut c = vec![Gauss::zero(); n];
            c[0] = Gauss::one();
            let cert =
                theorem23_certificate(&orbit, &f, Some((lam, c, 3))).unwrap();
            assert_eq!(cert.target_dim, n - 1);
            assert_eq!(cert.identities.len(), n * (n - 1) / 2);
            for ((k, kp), ident) in &cert.identities {
                let expected = ParamElement::var(f.ring, Var::Lambda).mul(
                    &ParamElement::var(f.ring, Var::C(*k))
                        .sub(&ParamElement::var(f.ring, Var::C(*kp))),
                );
                assert_eq!(*ident, expected);
            }
            assert!(!cert.feasibility.as_ref().unwrap().feasible);
        }
    }

    #[test]
    fn certificate_degenerate_cases() {
        let s = fixtures::h1_orbit();
        let orbit = s.pullback_orbit(2).unwrap();
        let f = fam(2, 3, None);
        // λ = 0 removes the obstruction: the system is feasible
        let cert = theorem23_certificate(
            &orbit,
            &f,
            Some((Gauss::zero(), vec![Gauss::one(), Gauss::zero()], 3)),
        )
        .unwrap();
        assert!(cert.feasibility.unwrap().feasible);
        // a single variable admits no pairwise obstruction
        let orbit1 = s.pullback_orbit(1).unwrap();
        let f1 = fam(1, 3, None);
        assert!(theorem23_certificate(&orbit1, &f1, None).is_err());
    }
}
