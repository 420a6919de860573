//! Commuting nilpotent families, monodromy and relative monodromy weight
//! filtrations, nilpotent-orbit validation and the distinguished
//! four-dimensional basis machinery.

use std::collections::BTreeMap;

use crate::linalg::{image, kernel, preimage, quotient_map_in, Matrix, Subspace};
use crate::mhs::{DecreasingFiltration, IncreasingFiltration, MixedHodgeStructure, Pairing};
use crate::scalars::{ConjField, Field, Gauss, Rational};

#[derive(Debug, thiserror::Error)]
pub enum OrbitError {
    #[error("invalid nilpotent family: {0}")]
    BadFamily(String),
    #[error("orbit check failed at clause ({clause}): {detail}")]
    CheckFailed { clause: char, detail: String },
    #[error("basis construction failed: {0}")]
    Construction(String),
    #[error("mixed orbit check failed: {0}")]
    Mixed(String),
}

/// Pairwise commuting nilpotent endomorphisms on a common space.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentFamily {
    dim: usize,
    ops: Vec<Matrix<Gauss>>,
}

impl NilpotentFamily {
    pub fn new(ops: Vec<Matrix<Gauss>>) -> Result<Self, OrbitError> {
        let dim = ops.first().map(|m| m.rows()).unwrap_or(0);
        for (i, m) in ops.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(OrbitError::BadFamily(format!(
                    "operator {i} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.pow(dim).is_zero() {
                return Err(OrbitError::BadFamily(format!("operator {i} is not nilpotent")));
            }
        }
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                if ops[i].matmul(&ops[j]) != ops[j].matmul(&ops[i]) {
                    return Err(OrbitError::BadFamily(format!(
                        "operators {i} and {j} do not commute"
                    )));
                }
            }
        }
        Ok(NilpotentFamily { dim, ops })
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn op(&self, i: usize) -> &Matrix<Gauss> {
        &self.ops[i]
    }

    pub fn ops(&self) -> &[Matrix<Gauss>] {
        &self.ops
    }

    pub fn subset_sum(&self, idxs: &[usize]) -> Matrix<Gauss> {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for &i in idxs {
            acc = acc.add(&self.ops[i]);
        }
        acc
    }

    pub fn total(&self) -> Matrix<Gauss> {
        self.subset_sum(&(0..self.n()).collect::<Vec<_>>())
    }

    /// Replace the family by `n` copies of the same operator (diagonal
    /// pullback to several variables).
    pub fn pullback(op: Matrix<Gauss>, n: usize) -> Result<Self, OrbitError> {
        NilpotentFamily::new(vec![op; n])
    }
}

fn clamped_power(n: &Matrix<Gauss>, e: i64, nilpotency: usize) -> Matrix<Gauss> {
    let d = n.rows();
    if e <= 0 {
        Matrix::identity(d)
    } else if e as usize >= nilpotency {
        Matrix::zeros(d, d)
    } else {
        n.pow(e as usize)
    }
}

/// The weight filtration of a nilpotent endomorphism about `center`: the
/// unique increasing filtration `M` with `N·M_k ⊆ M_{k-2}` and
/// `N^j : Gr_{center+j} ≅ Gr_{center-j}`. Both defining properties are
/// re-verified on the output (the closed formula is not trusted).
pub fn monodromy_filtration(n: &Matrix<Gauss>, center: i64) -> IncreasingFiltration {
    let d = n.rows();
    assert_eq!(d, n.cols(), "square matrix required");
    let mut pw = Matrix::identity(d);
    let mut r = 0usize;
    while !pw.is_zero() {
        pw = pw.matmul(n);
        r += 1;
        assert!(r <= d + 1, "matrix is not nilpotent");
    }
    // N^r = 0 minimally (r = 0 only for the zero-dimensional space)
    if d == 0 {
        return IncreasingFiltration::new(0, BTreeMap::new()).unwrap();
    }
    let mut steps = BTreeMap::new();
    for j in -(r as i64 - 1)..=(r as i64 - 1) {
        let mut acc = Subspace::zero(d);
        for k in 0..r as i64 {
            let ker_k = kernel(&clamped_power(n, k + 1, r));
            let im_k = image(&clamped_power(n, k - j, r));
            acc = acc.sum(&ker_k.intersect(&im_k));
        }
        steps.insert(center + j, acc);
    }
    let m = IncreasingFiltration::new(d, steps).expect("weight filtration is nested");

    // verification 1: N lowers the filtration by two
    for k in (center - r as i64)..=(center + r as i64) {
        assert!(
            m.at(k - 2).contains_subspace(&m.at(k).apply(n)),
            "weight filtration verification failed: N M_{k} not inside M_{}",
            k - 2
        );
    }
    // verification 2: N^j induces Gr_{c+j} ≅ Gr_{c-j}
    for j in 1..r as i64 {
        let hi = m.at(center + j).dim() - m.at(center + j - 1).dim();
        let lo = m.at(center - j).dim() - m.at(center - j - 1).dim();
        assert_eq!(hi, lo, "graded dimensions differ at distance {j} from center");
        let nj = clamped_power(n, j, r);
        let ker_gr = preimage(&nj, &m.at(center - j - 1)).intersect(&m.at(center + j));
        assert_eq!(
            ker_gr,
            m.at(center + j - 1),
            "N^{j} is not injective on Gr_{}",
            center + j
        );
    }
    m
}

/// Section data for one graded piece of a filtration: quotient projection in
/// ambient terms plus an explicit lift of each quotient coordinate.
struct GradedSection {
    z: Subspace<Gauss>,
    /// projection matrix from `z`-coordinates to quotient coordinates
    proj: Matrix<Gauss>,
    /// ambient lifts of the quotient basis vectors
    lifts: Vec<Vec<Gauss>>,
    /// induced matrix of the operator on the quotient
    induced: Matrix<Gauss>,
}

fn graded_section(
    n: &Matrix<Gauss>,
    z: &Subspace<Gauss>,
    b: &Subspace<Gauss>,
) -> Option<GradedSection> {
    // the operator must preserve both steps
    if !z.contains_subspace(&z.apply(n)) || !b.contains_subspace(&b.apply(n)) {
        return None;
    }
    let q = quotient_map_in(b, z).ok()?;
    let g = z.dim() - b.dim();
    let m = z.dim();
    // section: solve proj * S = identity column by column
    let mut lifts = Vec::with_capacity(g);
    let mut s = Matrix::zeros(m, g);
    for i in 0..g {
        let mut e = vec![Gauss::zero(); g];
        e[i] = Gauss::one();
        let col = q.matrix.solve(&e)?;
        let basis = z.basis_rows();
        let mut ambient = vec![Gauss::zero(); z.ambient()];
        for (k, c) in col.iter().enumerate() {
            for (j, x) in basis[k].iter().enumerate() {
                ambient[j] = ambient[j].add(&c.mul(x));
            }
            s.set(k, i, c.clone());
        }
        lifts.push(ambient);
    }
    // z-coordinate matrix of the restriction of n
    let mut a = Matrix::zeros(m, m);
    for (i, w) in z.basis_rows().iter().enumerate() {
        let coords = z.coords_of(&n.mul_vec(w))?;
        for (k, c) in coords.into_iter().enumerate() {
            a.set(k, i, c);
        }
    }
    let induced = q.matrix.matmul(&a).matmul(&s);
    Some(GradedSection {
        z: z.clone(),
        proj: q.matrix,
        lifts,
        induced,
    })
}

/// Relative monodromy weight filtration of `n` with respect to `wp`: the
/// unique `M` with `N·M_k ⊆ M_{k-2}` inducing on each `Gr^{W'}_j` the
/// monodromy filtration of the induced operator centered at `j`. A candidate
/// is assembled from canonical lifts of the graded filtrations and then fully
/// verified; `None` when no such filtration exists (or the candidate rule
/// fails to produce it).
pub fn relative_monodromy_filtration(
    n: &Matrix<Gauss>,
    wp: &IncreasingFiltration,
) -> Option<IncreasingFiltration> {
    let d = wp.ambient();
    if d == 0 {
        return Some(wp.clone());
    }
    let jumps = wp.jump_indices();
    let mut pieces: Vec<(i64, GradedSection, IncreasingFiltration)> = Vec::new();
    for &j in &jumps {
        let z = wp.at(j);
        let b = wp.at(j - 1);
        if z.dim() == b.dim() {
            continue;
        }
        let sec = graded_section(n, &z, &b)?;
        let mono = monodromy_filtration(&sec.induced, j);
        pieces.push((j, sec, mono));
    }
    let lo = pieces.iter().filter_map(|(_, _, m)| m.min_index()).min()?;
    let hi = pieces.iter().filter_map(|(_, _, m)| m.max_index()).max()?;
    let mut steps = BTreeMap::new();
    for k in lo..=hi {
        let mut rows: Vec<Vec<Gauss>> = Vec::new();
        for (_, sec, mono) in &pieces {
            for s in mono.at(k).basis_rows() {
                let mut v = vec![Gauss::zero(); d];
                for (i, c) in s.iter().enumerate() {
                    for (x, l) in v.iter_mut().zip(&sec.lifts[i]) {
                        *x = x.add(&c.mul(l));
                    }
                }
                rows.push(v);
            }
        }
        steps.insert(k, Subspace::from_rows(d, rows));
    }
    let m = IncreasingFiltration::new(d, steps).ok()?;

    // verify N·M_k ⊆ M_{k-2}
    for k in lo..=hi {
        if !m.at(k - 2).contains_subspace(&m.at(k).apply(n)) {
            return None;
        }
    }
    // verify the induced filtration on each graded piece by recomputation
    for (_, sec, mono) in &pieces {
        for k in (lo - 1)..=(hi + 1) {
            let meet = m.at(k).intersect(&sec.z);
            let proj_rows: Option<Vec<Vec<Gauss>>> = meet
                .basis_rows()
                .iter()
                .map(|v| sec.z.coords_of(v).map(|c| sec.proj.mul_vec(&c)))
                .collect();
            let induced = Subspace::from_rows(sec.proj.rows(), proj_rows?);
            if induced != mono.at(k) {
                return None;
            }
        }
    }
    Some(m)
}

/// Limit structure together with its commuting operators and polarizing
/// pairing.
#[derive(Clone, Debug)]
pub struct NilpotentOrbit {
    pub limit: MixedHodgeStructure,
    pub family: NilpotentFamily,
    pub pairing: Option<Pairing>,
    pub weight: i64,
}

fn all_nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Griffiths transversality `N F^p ⊆ F^{p-1}` for a single operator.
pub fn transversal(n: &Matrix<Gauss>, f: &DecreasingFiltration) -> Result<(), i64> {
    let (Some(pmin), Some(pmax)) = (f.min_index(), f.max_index()) else {
        return Ok(());
    };
    for p in pmin..=pmax + 1 {
        if !f.at(p - 1).contains_subspace(&f.at(p).apply(n)) {
            return Err(p);
        }
    }
    Ok(())
}

/// Validate a pure nilpotent orbit of its declared weight: (a) the limit is a
/// mixed Hodge structure, (b) each operator satisfies Griffiths
/// transversality, (c) every nonempty partial sum of operators has `W` as its
/// monodromy weight filtration about the weight, (d) the operators are
/// infinitesimal isometries of the pairing and the weight steps pair to zero
/// below the expected level. Positivity of the polarization is numeric and
/// lives in the deformation module.
pub fn check_pure_nilpotent_orbit(orbit: &NilpotentOrbit) -> Result<(), OrbitError> {
    let fail = |clause: char, detail: String| Err(OrbitError::CheckFailed { clause, detail });
    if orbit.family.dim() != orbit.limit.dim() {
        return fail('a', "operator and limit dimensions differ".into());
    }
    if let Err(w) = orbit.limit.check_mhs() {
        return fail(
            'a',
            format!("purity fails on Gr_{} at p = {}", w.level, w.p),
        );
    }
    for (i, n) in orbit.family.ops().iter().enumerate() {
        if let Err(p) = transversal(n, &orbit.limit.hodge) {
            return fail('b', format!("operator {i} moves F^{p} outside F^{}", p - 1));
        }
    }
    for idxs in all_nonempty_subsets(orbit.family.n()) {
        let m = monodromy_filtration(&orbit.family.subset_sum(&idxs), orbit.weight);
        if !m.equivalent(&orbit.limit.weight) {
            return fail(
                'c',
                format!("partial sum over {idxs:?} has the wrong weight filtration"),
            );
        }
    }
    if let Some(pairing) = &orbit.pairing {
        if !pairing.is_skew() {
            return fail('d', "pairing is not skew-symmetric".into());
        }
        for (i, n) in orbit.family.ops().iter().enumerate() {
            let lhs = n.transpose().matmul(&pairing.matrix);
            let rhs = pairing.matrix.matmul(n);
            if !lhs.add(&rhs).is_zero() {
                return fail('d', format!("operator {i} is not an infinitesimal isometry"));
            }
        }
        // steps of total weight below 2·weight pair to zero
        let keys = orbit.limit.weight.jump_indices();
        for &ka in &keys {
            for &kb in &keys {
                if ka + kb < 2 * orbit.weight
                    && !pairing.annihilates(&orbit.limit.weight.at(ka), &orbit.limit.weight.at(kb))
                {
                    return fail('d', format!("W_{ka} and W_{kb} do not pair to zero"));
                }
            }
        }
    }
    Ok(())
}

/// Mixed analogue: relative monodromy filtrations exist for every operator
/// (and partial sums), and every graded piece of the auxiliary filtration is
/// a pure nilpotent orbit of its level. Returns the relative filtration of
/// the total sum.
pub fn check_mixed_nilpotent_orbit(
    wprime: &IncreasingFiltration,
    hodge: &DecreasingFiltration,
    family: &NilpotentFamily,
) -> Result<IncreasingFiltration, OrbitError> {
    let d = wprime.ambient();
    if d != hodge.ambient() || d != family.dim() {
        return Err(OrbitError::Mixed("dimension mismatch".into()));
    }
    let mut relative_total = None;
    for idxs in all_nonempty_subsets(family.n()) {
        let n = family.subset_sum(&idxs);
        let Some(m) = relative_monodromy_filtration(&n, wprime) else {
            return Err(OrbitError::Mixed(format!(
                "relative monodromy filtration does not exist for partial sum {idxs:?}"
            )));
        };
        if idxs.len() == family.n() {
            relative_total = Some(m);
        }
    }
    // each graded piece of W' must be a pure nilpotent orbit of its level
    let ambient_mhs = MixedHodgeStructure::new(
        wprime.clone(),
        hodge.clone(),
        0,
        crate::mhs::FieldMode::RealForm,
    )
    .map_err(|e| OrbitError::Mixed(format!("{e}")))?;
    for j in wprime.jump_indices() {
        let gr = ambient_mhs.gr_w(j);
        let g = gr.space.dim();
        if g == 0 {
            continue;
        }
        let mut gr_ops = Vec::new();
        for n in family.ops() {
            let sec = graded_section(n, &gr.z, &gr.b).ok_or_else(|| {
                OrbitError::Mixed(format!("an operator does not preserve W'_{j}"))
            })?;
            gr_ops.push(sec.induced);
        }
        let gr_family = NilpotentFamily::new(gr_ops)
            .map_err(|e| OrbitError::Mixed(format!("graded family at level {j}: {e}")))?;
        let total = gr_family.total();
        let w = monodromy_filtration(&total, j);
        let gr_mhs = MixedHodgeStructure::new(
            w,
            gr.space.hodge.clone(),
            gr.space.twist,
            gr.space.mode,
        )
        .map_err(|e| OrbitError::Mixed(format!("graded structure at level {j}: {e}")))?;
        let gr_orbit = NilpotentOrbit {
            limit: gr_mhs,
            family: gr_family,
            pairing: None,
            weight: j,
        };
        check_pure_nilpotent_orbit(&gr_orbit)
            .map_err(|e| OrbitError::Mixed(format!("graded piece at level {j}: {e}")))?;
    }
    relative_total.ok_or_else(|| OrbitError::Mixed("empty operator family".into()))
}

/// The distinguished four-vector basis with its scalar `a`, plus the
/// splitting into the span and its orthogonal complement.
#[derive(Clone, Debug)]
pub struct DistinguishedBasis {
    pub u: [Vec<Gauss>; 4],
    pub a: Gauss,
    pub span: Subspace<Gauss>,
    pub complement: Subspace<Gauss>,
}

fn is_real_vec(v: &[Gauss]) -> bool {
    v.iter().all(|x| x.is_real())
}

fn conj_vec(v: &[Gauss]) -> Vec<Gauss> {
    v.iter().map(|x| x.conj()).collect()
}

fn sub_vec(a: &[Gauss], b: &[Gauss]) -> Vec<Gauss> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn add_scaled(a: &[Gauss], c: &Gauss, b: &[Gauss]) -> Vec<Gauss> {
    a.iter().zip(b).map(|(x, y)| x.add(&c.mul(y))).collect()
}

/// Check the five defining conditions of the distinguished basis against a
/// weight −1 structure with operator `n`. Returns the list of violated
/// conditions (empty = pass).
pub fn validate_prop21_basis(
    h: &MixedHodgeStructure,
    n: &Matrix<Gauss>,
    pairing: &Pairing,
    u: &[Vec<Gauss>; 4],
    a: &Gauss,
) -> Vec<String> {
    let mut bad = Vec::new();
    let w = &h.weight;
    let f = &h.hodge;
    // (i) memberships
    let f1w1 = f.at(1).intersect(&w.at(-1));
    if !f1w1.contains(&u[0]) {
        bad.push("(i): u_1 not in F^1 ∩ W_{-1}".into());
    }
    if !w.at(0).contains(&u[1]) || !is_real_vec(&u[1]) {
        bad.push("(i): u_2 not a real vector of W_0".into());
    }
    if !w.at(-2).contains(&u[2]) {
        bad.push("(i): u_3 not in W_{-2}".into());
    }
    if !f.at(-2).intersect(&w.at(-1)).contains(&u[3]) {
        bad.push("(i): u_4 not in F^{-2} ∩ W_{-1}".into());
    }
    // (ii) conjugation and operator relations
    if conj_vec(&u[0]) != u[3] {
        bad.push("(ii): conj(u_1) ≠ u_4".into());
    }
    if conj_vec(&u[1]) != u[1] {
        bad.push("(ii): u_2 not real".into());
    }
    if conj_vec(&u[2]) != u[2].iter().map(|x| x.neg()).collect::<Vec<_>>() {
        bad.push("(ii): u_3 not purely imaginary".into());
    }
    if n.mul_vec(&u[1]) != u[2] {
        bad.push("(ii): N u_2 ≠ u_3".into());
    }
    for (j, label) in [(0, "u_1"), (2, "u_3"), (3, "u_4")] {
        if n.mul_vec(&u[j]).iter().any(|x| !x.is_zero()) {
            bad.push(format!("(ii): N {label} ≠ 0"));
        }
    }
    // (iii) extreme Hodge types on the middle graded piece
    let gr = h.gr_w(-1);
    // type (p, q) with p + q = -1 means membership in F^p ∩ conj(F^q) and in
    // neither F^{p+1} nor conj(F^{q+1})
    let checks: [(usize, i64, &str); 2] = [(0, 1, "u_1"), (3, -2, "u_4")];
    for (idx, p_in, label) in checks {
        let q_in = -1 - p_in;
        match gr.project(&u[idx]) {
            Some(cls) if cls.iter().any(|x| !x.is_zero()) => {
                let fp = gr.space.hodge.at(p_in);
                let fq = gr.space.hodge.at(q_in).conj();
                if !fp.contains(&cls) || !fq.contains(&cls) {
                    bad.push(format!("(iii): [{label}] has the wrong Hodge type"));
                }
                if gr.space.hodge.at(p_in + 1).contains(&cls)
                    || gr.space.hodge.at(q_in + 1).conj().contains(&cls)
                {
                    bad.push(format!("(iii): [{label}] lies one Hodge level too deep"));
                }
            }
            _ => bad.push(format!("(iii): [{label}] vanishes on Gr_{{-1}}")),
        }
    }
    // (iv) the F^0 representative of u_2
    let shifted = add_scaled(&u[1], a, &u[2]);
    if !f.at(0).intersect(&w.at(0)).contains(&shifted) {
        bad.push("(iv): u_2 + a u_3 not in F^0 ∩ W_0".into());
    }
    // (v) pairing support on {1,4} and {2,3} only
    for i in 0..4 {
        for j in 0..4 {
            let v = pairing.value(&u[i], &u[j]);
            let allowed = (i, j) == (0, 3) || (i, j) == (3, 0) || (i, j) == (1, 2) || (i, j) == (2, 1);
            if allowed && i < j && v.is_zero() {
                bad.push(format!("(v): <u_{}, u_{}> unexpectedly zero", i + 1, j + 1));
            }
            if !allowed && !v.is_zero() {
                bad.push(format!("(v): <u_{}, u_{}> ≠ 0", i + 1, j + 1));
            }
        }
    }
    bad
}

/// Solve `M x = v` for a vector `x` with real (rational) entries, treating
/// real and imaginary parts as separate rational equations.
fn solve_real(m: &Matrix<Gauss>, v: &[Gauss]) -> Option<Vec<Gauss>> {
    let re = m.map(|x| x.re.clone());
    let im = m.map(|x| x.im.clone());
    let stacked = re.vstack(&im);
    let rhs: Vec<Rational> = v
        .iter()
        .map(|x| x.re.clone())
        .chain(v.iter().map(|x| x.im.clone()))
        .collect();
    let sol = stacked.solve(&rhs)?;
    Some(sol.into_iter().map(Gauss::from_rational).collect())
}

/// Matrix whose columns are the given ambient vectors.
fn columns(vecs: &[Vec<Gauss>], ambient: usize) -> Matrix<Gauss> {
    Matrix::from_fn(ambient, vecs.len(), |i, j| vecs[j][i].clone())
}

/// Construct a distinguished basis for a weight −1 orbit with one-dimensional
/// operator image, following the existence proof: extreme-type conjugate pair
/// from `F^1`, purely imaginary generator of `W_{-2}`, a real preimage under
/// the operator fixed up so that some `u_2 + a u_3` is holomorphic, and a
/// final pairing correction by a multiple of `u_3`.
pub fn construct_prop21_basis(orbit: &NilpotentOrbit) -> Result<DistinguishedBasis, OrbitError> {
    let err = |msg: &str| OrbitError::Construction(msg.to_string());
    if orbit.weight != -1 {
        return Err(err("orbit weight must be -1"));
    }
    let h = &orbit.limit;
    let n = orbit.family.total();
    let d = h.dim();
    if image(&n).dim() != 1 {
        return Err(err("operator image must be one-dimensional"));
    }
    let w = &h.weight;
    let f = &h.hodge;

    // u_1: an F^1 vector of weight level -1, conjugate partner u_4
    let f1w1 = f.at(1).intersect(&w.at(-1));
    let u1 = f1w1
        .basis_rows()
        .into_iter()
        .next()
        .ok_or_else(|| err("F^1 ∩ W_{-1} = 0 (hypothesis fails)"))?;
    let mut u1 = u1;
    let mut u4 = conj_vec(&u1);

    // u_3: purely imaginary generator of W_{-2}, required to lie in F^{-1}
    let w2 = w.at(-2);
    if w2.dim() != 1 {
        return Err(err("W_{-2} must be one-dimensional"));
    }
    if f.at(-1).intersect(&w2).dim() == 0 {
        return Err(err("F^{-1} ∩ W_{-2} = 0 (hypothesis fails)"));
    }
    let x = w2.basis_rows().into_iter().next().unwrap();
    let diff = sub_vec(&x, &conj_vec(&x));
    let u3 = if diff.iter().any(|c| !c.is_zero()) {
        diff
    } else {
        x.iter().map(|c| c.mul(&Gauss::i())).collect()
    };

    // u_2: real solution of N u_2 = u_3
    let u2 = solve_real(&n, &u3).ok_or_else(|| err("no real preimage of u_3 under N"))?;

    // holomorphic representative v ∈ F^0 of the class of u_2 modulo W_{-1}
    let f0 = f.at(0);
    let wm1 = w.at(-1);
    let mut cols: Vec<Vec<Gauss>> = f0.basis_rows();
    let split = cols.len();
    cols.extend(wm1.basis_rows());
    let coeffs = columns(&cols, d)
        .solve(&u2)
        .ok_or_else(|| err("class of u_2 has no holomorphic representative"))?;
    let mut v = vec![Gauss::zero(); d];
    for (c, basis_vec) in coeffs.iter().take(split).zip(f0.basis_rows()) {
        v = add_scaled(&v, c, &basis_vec);
    }

    // correct v so that v - conj(v) falls into W_{-2}: solve
    //   w + conj(w) ≡ i (v - conj v)  (mod W_{-2}),  w ∈ F^0 ∩ W_{-1}
    let p_basis = f0.intersect(&wm1).basis_rows();
    let q_basis = w2.basis_rows();
    let tau: Vec<Gauss> = sub_vec(&v, &conj_vec(&v))
        .iter()
        .map(|c| c.mul(&Gauss::i()))
        .collect();
    // rational unknowns: re/im parts of the w-coefficients and the slack
    let mut real_cols: Vec<Vec<Gauss>> = Vec::new();
    for p in &p_basis {
        let pc = conj_vec(p);
        real_cols.push(p.iter().zip(&pc).map(|(x, y)| x.add(y)).collect());
        real_cols.push(
            p.iter()
                .zip(&pc)
                .map(|(x, y)| x.sub(y).mul(&Gauss::i()))
                .collect(),
        );
    }
    for q in &q_basis {
        real_cols.push(q.clone());
        real_cols.push(q.iter().map(|c| c.mul(&Gauss::i())).collect());
    }
    let sys = columns(&real_cols, d);
    let re = sys.map(|x| x.re.clone()).vstack(&sys.map(|x| x.im.clone()));
    let rhs: Vec<Rational> = tau
        .iter()
        .map(|x| x.re.clone())
        .chain(tau.iter().map(|x| x.im.clone()))
        .collect();
    let sol = re
        .solve(&rhs)
        .ok_or_else(|| err("holomorphic correction system unsolvable"))?;
    let mut wvec = vec![Gauss::zero(); d];
    for (i, p) in p_basis.iter().enumerate() {
        let c = Gauss::new(sol[2 * i].clone(), sol[2 * i + 1].clone());
        wvec = add_scaled(&wvec, &c, p);
    }
    v = add_scaled(&v, &Gauss::i(), &wvec);

    // now v - conj(v) = c·u_3 with c real; split off a = c/2
    let delta = sub_vec(&v, &conj_vec(&v));
    let u3_mat = columns(std::slice::from_ref(&u3), d);
    let c = if delta.iter().all(|x| x.is_zero()) {
        Gauss::zero()
    } else {
        let coords = u3_mat
            .solve(&delta)
            .ok_or_else(|| err("v - conj(v) escaped W_{-2}"))?;
        coords[0].clone()
    };
    if !c.is_real() {
        return Err(err("v - conj(v) is not a real multiple of u_3"));
    }
    let half = Gauss::new(crate::scalars::rat(1, 2), crate::scalars::rat(0, 1));
    let a = c.mul(&half);
    let scaled_u3: Vec<Gauss> = u3.iter().map(|x| a.mul(x)).collect();
    let u2 = sub_vec(&v, &scaled_u3);

    // pairing correction of u_1 (and conjugate u_4) by a multiple of u_3
    let pairing = orbit
        .pairing
        .as_ref()
        .ok_or_else(|| err("a polarizing pairing is required"))?;
    let p23 = pairing.value(&u2, &u3);
    if p23.is_zero() {
        return Err(err("<u_2, u_3> vanishes"));
    }
    let p12 = pairing.value(&u1, &u2);
    if !p12.is_zero() {
        let s = p12.neg().mul(&pairing.value(&u3, &u2).inv().unwrap());
        u1 = add_scaled(&u1, &s, &u3);
        u4 = conj_vec(&u1);
    }

    let u = [u1, u2, u3.clone(), u4];
    let violations = validate_prop21_basis(h, &n, pairing, &u, &a);
    if !violations.is_empty() {
        return Err(err(&format!("constructed tuple fails validation: {violations:?}")));
    }
    let span = Subspace::from_rows(d, u.to_vec());
    // orthogonal complement of the span under the pairing
    let mut eq = Matrix::zeros(4, d);
    for (r, uv) in u.iter().enumerate() {
        let col = pairing.matrix.mul_vec(uv);
        for (cidx, val) in col.into_iter().enumerate() {
            eq.set(r, cidx, val);
        }
    }
    let complement = kernel(&eq);
    Ok(DistinguishedBasis { u, a, span, complement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{nilpotent_matrix, rng, to_gauss};
    use rand::Rng;

    fn fixture_orbit() -> NilpotentOrbit {
        crate::scenario::fixtures::h1_orbit().orbit().unwrap()
    }

    #[test]
    fn zero_operator_filtration_is_single_jump() {
        let m = monodromy_filtration(&Matrix::zeros(3, 3), -1);
        assert_eq!(m.at(-2).dim(), 0);
        assert_eq!(m.at(-1).dim(), 3);
    }

    #[test]
    fn jordan_block_centered_zero() {
        let mut n = Matrix::zeros(2, 2);
        n.set(0, 1, Gauss::one());
        let m = monodromy_filtration(&n, 0);
        assert_eq!(m.at(-2).dim(), 0);
        assert_eq!(m.at(-1), image(&n));
        assert_eq!(m.at(0), image(&n));
        assert_eq!(m.at(1).dim(), 2);
    }

    #[test]
    fn fixture_weight_filtration_is_kernel_image() {
        let orbit = fixture_orbit();
        let n = orbit.family.total();
        let m = monodromy_filtration(&n, -1);
        assert_eq!(m.at(-2), image(&n));
        assert_eq!(m.at(-1), kernel(&n));
        assert_eq!(m.at(0).dim(), 4);
        assert!(m.equivalent(&orbit.limit.weight));
    }

    #[test]
    fn random_filtrations_verify() {
        let mut r = rng(1234);
        for _ in 0..25 {
            let d = r.gen_range(1..7);
            let n = to_gauss(&nilpotent_matrix(&mut r, d));
            // construction panics if either defining property fails
            let _ = monodromy_filtration(&n, 0);
        }
    }

    #[test]
    fn relative_reduces_to_absolute_for_trivial_wp() {
        let mut r = rng(5);
        let n = to_gauss(&nilpotent_matrix(&mut r, 4));
        let wp = IncreasingFiltration::single_jump(4, 2);
        let m = relative_monodromy_filtration(&n, &wp).unwrap();
        assert!(m.equivalent(&monodromy_filtration(&n, 2)));
    }

    #[test]
    fn relative_of_zero_operator_is_wp() {
        let orbit = fixture_orbit();
        let wp = orbit.limit.weight.clone();
        let m = relative_monodromy_filtration(&Matrix::zeros(4, 4), &wp).unwrap();
        assert!(m.equivalent(&wp));
    }

    #[test]
    fn fixture_orbit_passes_all_clauses() {
        let orbit = fixture_orbit();
        check_pure_nilpotent_orbit(&orbit).unwrap();
    }

    #[test]
    fn enlarged_f1_fails() {
        let mut orbit = fixture_orbit();
        let mut fsteps = std::collections::BTreeMap::new();
        for p in orbit.limit.hodge.jump_indices() {
            fsteps.insert(p, orbit.limit.hodge.at(p));
        }
        fsteps.insert(1, orbit.limit.hodge.at(0));
        orbit.limit = MixedHodgeStructure::new(
            orbit.limit.weight.clone(),
            DecreasingFiltration::new(4, fsteps).unwrap(),
            orbit.limit.twist,
            orbit.limit.mode,
        )
        .unwrap();
        let e = check_pure_nilpotent_orbit(&orbit).unwrap_err();
        match e {
            OrbitError::CheckFailed { clause, .. } => assert!(clause == 'a' || clause == 'b'),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn fixture_basis_round_trip() {
        let orbit = fixture_orbit();
        let basis = construct_prop21_basis(&orbit).unwrap();
        let n = orbit.family.total();
        let violations = validate_prop21_basis(
            &orbit.limit,
            &n,
            orbit.pairing.as_ref().unwrap(),
            &basis.u,
            &basis.a,
        );
        assert!(violations.is_empty(), "{violations:?}");
        assert_eq!(basis.span.dim(), 4);
        assert_eq!(basis.complement.dim(), 0);
    }

    #[test]
    fn swapped_extremes_fail_validation() {
        let orbit = fixture_orbit();
        let basis = construct_prop21_basis(&orbit).unwrap();
        let mut u = basis.u.clone();
        u.swap(0, 3);
        let n = orbit.family.total();
        let violations =
            validate_prop21_basis(&orbit.limit, &n, orbit.pairing.as_ref().unwrap(), &u, &basis.a);
        assert!(violations.iter().any(|v| v.starts_with("(i)")));
        assert!(violations.iter().any(|v| v.starts_with("(iii)")));
    }

    #[test]
    fn zero_operator_orbit_rejected_by_construction() {
        let mut orbit = fixture_orbit();
        orbit.family = NilpotentFamily::new(vec![Matrix::zeros(4, 4)]).unwrap();
        assert!(construct_prop21_basis(&orbit).is_err());
    }
}
