//! The two finite complexes attached to a commuting nilpotent family — the
//! full Koszul complex and its intersection subcomplex — their cohomology as
//! filtered structures, the class map for extension data, and the
//! surjectivity/vanishing predicates.

use crate::linalg::{image, kernel, LinearMap, Matrix, Subspace};
use crate::mhs::{DecreasingFiltration, IncreasingFiltration, MixedHodgeStructure, Subquotient};
use crate::orbits::{check_mixed_nilpotent_orbit, NilpotentFamily, NilpotentOrbit, OrbitError};
use crate::scalars::{Field, Gauss};

#[derive(Debug, thiserror::Error)]
pub enum CohomologyError {
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("class is not liftable: {0}")]
    NotLiftable(String),
    #[error("orbit validation failed: {0}")]
    Orbit(#[from] OrbitError),
    #[error("{0}")]
    Other(String),
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All k-subsets of {0..n-1} in lexicographic order.
fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn koszul_sign(i_set: &[usize], j: usize) -> Gauss {
    if i_set.iter().filter(|&&i| i < j).count() % 2 == 0 {
        Gauss::one()
    } else {
        Gauss::one().neg()
    }
}

/// Finite complex in degrees 0..=n whose degree-k term is a canonical
/// subspace of the direct sum of one copy of the base space per k-subset,
/// twisted by -k.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dim_h: usize,
    pub n: usize,
    pub subsets: Vec<Vec<Vec<usize>>>,
    /// per degree: the ambient filtered structure (twist included)
    pub ambient: Vec<MixedHodgeStructure>,
    pub terms: Vec<Subspace<Gauss>>,
    /// ambient differential matrices, diffs[k] maps degree k to k+1
    pub diffs: Vec<Matrix<Gauss>>,
}

fn direct_power(h: &MixedHodgeStructure, copies: usize) -> MixedHodgeStructure {
    let mut acc = MixedHodgeStructure::zero(h.mode);
    for _ in 0..copies {
        acc = acc.direct_sum(h);
    }
    acc
}

fn build_complex(
    h: &MixedHodgeStructure,
    family: &NilpotentFamily,
    term_of_subset: impl Fn(&[usize]) -> Subspace<Gauss>,
) -> ChainComplex {
    let d = h.dim();
    let n = family.n();
    let subsets: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets_of_size(n, k)).collect();
    let ambient: Vec<MixedHodgeStructure> = (0..=n)
        .map(|k| direct_power(h, subsets[k].len()).tate_twist(-(k as i64)))
        .collect();
    let mut terms = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let amb = subsets[k].len() * d;
        let mut rows = Vec::new();
        for (bi, i_set) in subsets[k].iter().enumerate() {
            for r in term_of_subset(i_set).basis_rows() {
                let mut v = vec![Gauss::zero(); amb];
                v[bi * d..(bi + 1) * d].clone_from_slice(&r);
                rows.push(v);
            }
        }
        terms.push(Subspace::from_rows(amb, rows));
    }
    let mut diffs = Vec::with_capacity(n);
    for k in 0..n {
        let src = &subsets[k];
        let tgt = &subsets[k + 1];
        let mut m: Matrix<Gauss> = Matrix::zeros(tgt.len() * d, src.len() * d);
        for (si, i_set) in src.iter().enumerate() {
            for j in 0..n {
                if i_set.contains(&j) {
                    continue;
                }
                let mut joined = i_set.clone();
                joined.push(j);
                joined.sort_unstable();
                let ti = tgt.iter().position(|s| *s == joined).unwrap();
                let sign = koszul_sign(i_set, j);
                let nj = family.op(j);
                for r in 0..d {
                    for c in 0..d {
                        let cur = m.get(ti * d + r, si * d + c).clone();
                        m.set(ti * d + r, si * d + c, cur.add(&sign.mul(nj.get(r, c))));
                    }
                }
            }
        }
        diffs.push(m);
    }
    // d ∘ d = 0
    for k in 0..n.saturating_sub(1) {
        assert!(
            diffs[k + 1].matmul(&diffs[k]).is_zero(),
            "differentials do not compose to zero"
        );
    }
    ChainComplex {
        dim_h: d,
        n,
        subsets,
        ambient,
        terms,
        diffs,
    }
}

/// Full Koszul complex: every term is the whole direct sum.
pub fn koszul_complex(h: &MixedHodgeStructure, family: &NilpotentFamily) -> ChainComplex {
    let d = h.dim();
    build_complex(h, family, |_| Subspace::full(d))
}

/// Intersection subcomplex: the subset-I term is the image of the product of
/// the chosen operators.
pub fn ic_complex(h: &MixedHodgeStructure, family: &NilpotentFamily) -> ChainComplex {
    let d = h.dim();
    build_complex(h, family, |i_set| {
        let mut p = Matrix::identity(d);
        for &i in i_set {
            p = family.op(i).matmul(&p);
        }
        image(&p)
    })
}

impl ChainComplex {
    pub fn term_dim(&self, k: usize) -> usize {
        self.terms[k].dim()
    }

    /// Degree-k cohomology with its induced filtrations, as a subquotient of
    /// the degree-k ambient space (projection and canonical lifts included).
    pub fn h(&self, k: usize) -> Subquotient {
        let z = if k < self.diffs.len() {
            self.terms[k].intersect(&kernel(&self.diffs[k]))
        } else {
            self.terms[k].clone()
        };
        let b = if k > 0 {
            self.terms[k - 1].apply(&self.diffs[k - 1])
        } else {
            Subspace::zero(z.ambient())
        };
        self.ambient[k]
            .subquotient(&z, &b)
            .expect("boundaries lie inside cycles")
    }
}

/// The induced map `H^1(intersection) -> H^1(Koszul)`; always injective.
pub fn h1_inclusion(h: &MixedHodgeStructure, family: &NilpotentFamily) -> LinearMap<Gauss> {
    let hi = ic_complex(h, family).h(1);
    let hk = koszul_complex(h, family).h(1);
    let m = hi.space.dim();
    let mut matrix = Matrix::zeros(hk.space.dim(), m);
    for i in 0..m {
        let mut e = vec![Gauss::zero(); m];
        e[i] = Gauss::one();
        let rep = hi.lift(&e);
        let cls = hk
            .project(&rep)
            .expect("intersection cycles are Koszul cycles");
        for (r, v) in cls.into_iter().enumerate() {
            matrix.set(r, i, v);
        }
    }
    let map = LinearMap::new(matrix);
    assert!(map.is_injective(), "induced map on H^1 must be injective");
    map
}

/// Extension of the unit structure by the base orbit, presented by its limit
/// data: rational components, a Hodge vector, the extended operators and the
/// two filtrations on the extended space.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    pub base: NilpotentOrbit,
    /// component vectors of the rational representative, one per operator
    pub alpha_q: Vec<Vec<Gauss>>,
    pub beta: Vec<Gauss>,
    pub primed_family: NilpotentFamily,
    pub wprime: IncreasingFiltration,
    pub hodge: DecreasingFiltration,
}

impl ExtensionData {
    /// Assemble the extension from the base orbit, the rational components
    /// and the Hodge vector: extended operators send the new generator to the
    /// components; the Hodge filtration in non-positive levels acquires the
    /// graph vector of `beta`.
    pub fn new(
        base: NilpotentOrbit,
        alpha_q: Vec<Vec<Gauss>>,
        beta: Vec<Gauss>,
    ) -> Result<Self, CohomologyError> {
        let d = base.limit.dim();
        let n = base.family.n();
        if alpha_q.len() != n || alpha_q.iter().any(|v| v.len() != d) || beta.len() != d {
            return Err(CohomologyError::InvalidExtension(
                "component dimensions do not match the base".into(),
            ));
        }
        let mut primed = Vec::with_capacity(n);
        for (i, a) in alpha_q.iter().enumerate() {
            let mut m = Matrix::zeros(d + 1, d + 1);
            for r in 0..d {
                for c in 0..d {
                    m.set(r, c, base.family.op(i).get(r, c).clone());
                }
                m.set(r, d, a[r].clone());
            }
            primed.push(m);
        }
        let primed_family = NilpotentFamily::new(primed)
            .map_err(|e| CohomologyError::InvalidExtension(format!("{e}")))?;

        let embed = |v: &[Gauss]| {
            let mut w = vec![Gauss::zero(); d + 1];
            w[..d].clone_from_slice(v);
            w
        };
        let h_block = Subspace::from_rows(
            d + 1,
            (0..d)
                .map(|i| {
                    let mut v = vec![Gauss::zero(); d + 1];
                    v[i] = Gauss::one();
                    v
                })
                .collect(),
        );
        let mut wsteps = std::collections::BTreeMap::new();
        wsteps.insert(-1, h_block);
        wsteps.insert(0, Subspace::full(d + 1));
        let wprime = IncreasingFiltration::new(d + 1, wsteps)
            .map_err(|e| CohomologyError::InvalidExtension(format!("{e}")))?;

        let mut graph = embed(&beta);
        graph[d] = Gauss::one();
        let mut fsteps = std::collections::BTreeMap::new();
        for p in base.limit.hodge.jump_indices() {
            let mut rows: Vec<Vec<Gauss>> = base
                .limit
                .hodge
                .at(p)
                .basis_rows()
                .iter()
                .map(|v| embed(v))
                .collect();
            if p <= 0 {
                rows.push(graph.clone());
            }
            fsteps.insert(p, Subspace::from_rows(d + 1, rows));
        }
        let hodge = DecreasingFiltration::new(d + 1, fsteps)
            .map_err(|e| CohomologyError::InvalidExtension(format!("{e}")))?;
        Ok(ExtensionData {
            base,
            alpha_q,
            beta,
            primed_family,
            wprime,
            hodge,
        })
    }

    /// Mixed-orbit validity: relative monodromy filtrations exist, graded pieces
    /// are pure orbits, and the extended operators are transversal.
    pub fn validate(&self) -> Result<(), CohomologyError> {
        check_mixed_nilpotent_orbit(&self.wprime, &self.hodge, &self.primed_family)?;
        for (i, m) in self.primed_family.ops().iter().enumerate() {
            if let Err(p) = crate::orbits::transversal(m, &self.hodge) {
                return Err(CohomologyError::InvalidExtension(format!(
                    "extended operator {i} moves F^{p} outside F^{}",
                    p - 1
                )));
            }
        }
        Ok(())
    }
}

/// Cycle representative together with its cohomology class.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFunctionClass {
    /// element of the degree-1 term (one base-space block per operator)
    pub representative: Vec<Gauss>,
    /// coordinates in degree-1 cohomology of the intersection complex
    pub class: Vec<Gauss>,
}

/// The class of an extension: apply each extended operator to the new
/// generator and read the result in degree-1 cohomology of the intersection
/// complex of the base.
pub fn class_of_extension(e: &ExtensionData) -> Result<NormalFunctionClass, CohomologyError> {
    e.validate()?;
    let d = e.base.limit.dim();
    let n = e.base.family.n();
    let mut sigma = vec![Gauss::zero(); d + 1];
    sigma[d] = Gauss::one();
    let mut rep = Vec::with_capacity(n * d);
    for m in e.primed_family.ops() {
        let img = m.mul_vec(&sigma);
        rep.extend_from_slice(&img[..d]);
    }
    let complex = ic_complex(&e.base.limit, &e.base.family);
    if !complex.terms[1].contains(&rep) {
        return Err(CohomologyError::InvalidExtension(
            "representative does not lie in the degree-1 term".into(),
        ));
    }
    if n >= 2 {
        let img = complex.diffs[1].mul_vec(&rep);
        if img.iter().any(|x| !x.is_zero()) {
            return Err(CohomologyError::InvalidExtension(
                "representative is not a cycle".into(),
            ));
        }
    }
    let h1 = complex.h(1);
    let class = h1
        .project(&rep)
        .ok_or_else(|| CohomologyError::Other("projection failed".into()))?;
    Ok(NormalFunctionClass {
        representative: rep,
        class,
    })
}

fn solve_real_system(cols: &[Vec<Gauss>], rhs: &[Gauss]) -> Option<Vec<Gauss>> {
    let rows = rhs.len();
    let m = Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone());
    let stacked = m.map(|x| x.re.clone()).vstack(&m.map(|x| x.im.clone()));
    let target: Vec<crate::scalars::Rational> = rhs
        .iter()
        .map(|x| x.re.clone())
        .chain(rhs.iter().map(|x| x.im.clone()))
        .collect();
    let sol = stacked.solve(&target)?;
    Some(sol.into_iter().map(Gauss::from_rational).collect())
}

fn combine(basis: &[Vec<Gauss>], coeffs: &[Gauss], ambient: usize) -> Vec<Gauss> {
    let mut v = vec![Gauss::zero(); ambient];
    for (c, b) in coeffs.iter().zip(basis) {
        for (x, y) in v.iter_mut().zip(b) {
            *x = x.add(&c.mul(y));
        }
    }
    v
}

/// Construct extension data realizing a prescribed degree-1 class of the
/// intersection complex: choose the canonical rational and Hodge lifts of the
/// class, solve for the Hodge vector linking them, and assemble the extended
/// structure.
pub fn build_extension(
    orbit: &NilpotentOrbit,
    alpha: &[Gauss],
) -> Result<ExtensionData, CohomologyError> {
    let h = &orbit.limit;
    let d = h.dim();
    let n = orbit.family.n();
    let complex = ic_complex(h, &orbit.family);
    let h1 = complex.h(1);
    if alpha.len() != h1.space.dim() {
        return Err(CohomologyError::NotLiftable(format!(
            "class has {} coordinates, cohomology has dimension {}",
            alpha.len(),
            h1.space.dim()
        )));
    }
    let hodge_classes = h1
        .space
        .hom_from_unit()
        .map_err(|e| CohomologyError::Other(format!("{e}")))?;
    if !hodge_classes.contains(alpha) {
        return Err(CohomologyError::NotLiftable(
            "class is not a rational Hodge class of the expected type".into(),
        ));
    }

    // rational lift: real representative with the prescribed class
    let z_real = h1.z.real_points();
    let real_basis = z_real.basis_rows();
    let cols: Vec<Vec<Gauss>> = real_basis
        .iter()
        .map(|b| h1.project(b).expect("basis lies in the cycles"))
        .collect();
    let coeffs = solve_real_system(&cols, alpha)
        .ok_or_else(|| CohomologyError::NotLiftable("no rational representative".into()))?;
    let alpha_q_flat = combine(&real_basis, &coeffs, n * d);

    // Hodge lift: representative inside the degree-1 Hodge level
    let fz = h1.z.intersect(&complex.ambient[1].hodge.at(0));
    let f_basis = fz.basis_rows();
    let f_cols: Vec<Vec<Gauss>> = f_basis
        .iter()
        .map(|b| h1.project(b).expect("basis lies in the cycles"))
        .collect();
    let f_matrix = Matrix::from_fn(alpha.len(), f_cols.len(), |i, j| f_cols[j][i].clone());
    let f_coeffs = f_matrix
        .solve(alpha)
        .ok_or_else(|| CohomologyError::NotLiftable("no Hodge representative".into()))?;
    let alpha_f_flat = combine(&f_basis, &f_coeffs, n * d);

    // beta links the two lifts: (N_i beta) = alpha_F - alpha_Q componentwise
    let mut stacked = Matrix::zeros(0, d);
    for i in 0..n {
        stacked = stacked.vstack(orbit.family.op(i));
    }
    let rhs: Vec<Gauss> = alpha_f_flat
        .iter()
        .zip(&alpha_q_flat)
        .map(|(a, b)| a.sub(b))
        .collect();
    let beta = stacked.solve(&rhs).ok_or_else(|| {
        CohomologyError::NotLiftable("lift difference is not in the diagonal image".into())
    })?;

    let alpha_q: Vec<Vec<Gauss>> = (0..n)
        .map(|i| alpha_q_flat[i * d..(i + 1) * d].to_vec())
        .collect();
    let ext = ExtensionData::new(orbit.clone(), alpha_q, beta)?;
    ext.validate()?;
    Ok(ext)
}

/// Vanishing criterion for the equal-operator situation: true when the
/// Hodge-level part of the bottom graded piece meets the kernel of the
/// induced operator trivially. When true, the unit-morphism space of
/// degree-1 cohomology is asserted to vanish too.
pub fn check_remark24_vanishing(
    h: &MixedHodgeStructure,
    family: &NilpotentFamily,
) -> Result<bool, CohomologyError> {
    let n0 = family.op(0).clone();
    if family.ops().iter().any(|m| *m != n0) {
        return Err(CohomologyError::Other(
            "criterion requires all operators equal".into(),
        ));
    }
    let gr = h.gr_w(-2);
    let g = gr.space.dim();
    // induced operator on the bottom graded piece
    let mut cols = Vec::new();
    for i in 0..g {
        let mut e = vec![Gauss::zero(); g];
        e[i] = Gauss::one();
        let rep = gr.lift(&e);
        let img = gr
            .project(&n0.mul_vec(&rep))
            .ok_or_else(|| CohomologyError::Other("operator does not preserve W_{-2}".into()))?;
        cols.push(img);
    }
    let induced = Matrix::from_fn(g, g, |i, j| cols[j][i].clone());
    let meet = gr
        .space
        .hodge
        .at(-1)
        .intersect(&kernel(&induced))
        .real_points();
    let vanishes = meet.dim() == 0;
    if vanishes {
        let h1 = ic_complex(h, family).h(1);
        let target = h1
            .space
            .hom_from_unit()
            .map_err(|e| CohomologyError::Other(format!("{e}")))?;
        assert_eq!(target.dim(), 0, "criterion held but the target is nonzero");
    }
    Ok(vanishes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::fixtures;

    fn orbit_n(n: usize) -> NilpotentOrbit {
        let base = fixtures::h1_orbit().orbit().unwrap();
        let family = NilpotentFamily::pullback(base.family.op(0).clone(), n).unwrap();
        NilpotentOrbit { family, ..base }
    }

    #[test]
    fn koszul_n1_is_the_operator() {
        let orbit = orbit_n(1);
        let c = koszul_complex(&orbit.limit, &orbit.family);
        assert_eq!(c.terms.len(), 2);
        assert_eq!(c.term_dim(0), 4);
        assert_eq!(c.term_dim(1), 4);
        assert_eq!(c.h(0).space.dim(), 3); // kernel of the fixture operator
    }

    #[test]
    fn ic_terms_for_n2() {
        let orbit = orbit_n(2);
        let c = ic_complex(&orbit.limit, &orbit.family);
        assert_eq!(c.term_dim(0), 4);
        assert_eq!(c.term_dim(1), 2);
        assert_eq!(c.term_dim(2), 0);
    }

    #[test]
    fn h1_of_ic_vanishes_for_one_variable() {
        let orbit = orbit_n(1);
        assert_eq!(ic_complex(&orbit.limit, &orbit.family).h(1).space.dim(), 0);
    }

    #[test]
    fn h1_dims_grow_with_n() {
        for n in 2..=5 {
            let orbit = orbit_n(n);
            let h1 = ic_complex(&orbit.limit, &orbit.family).h(1);
            assert_eq!(h1.space.dim(), n - 1);
            assert_eq!(h1.space.hom_from_unit().unwrap().dim(), n - 1);
        }
    }

    #[test]
    fn inclusion_into_koszul_is_injective() {
        let orbit = orbit_n(3);
        let map = h1_inclusion(&orbit.limit, &orbit.family);
        assert!(map.is_injective());
    }

    #[test]
    fn trivial_extension_has_zero_class() {
        let orbit = orbit_n(2);
        let d = orbit.limit.dim();
        let ext = ExtensionData::new(
            orbit,
            vec![vec![Gauss::zero(); d]; 2],
            vec![Gauss::zero(); d],
        )
        .unwrap();
        let cls = class_of_extension(&ext).unwrap();
        assert!(cls.class.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn round_trip_on_basis_class() {
        let orbit = orbit_n(2);
        let h1 = ic_complex(&orbit.limit, &orbit.family).h(1);
        let hodge = h1.space.hom_from_unit().unwrap();
        assert_eq!(hodge.dim(), 1);
        let alpha = hodge.basis_rows().into_iter().next().unwrap();
        let ext = build_extension(&orbit, &alpha).unwrap();
        let cls = class_of_extension(&ext).unwrap();
        assert_eq!(cls.class, alpha);
    }

    #[test]
    fn remark25_h1_is_one_dimensional() {
        let s = fixtures::remark25();
        let h = s.mhs().unwrap();
        let family = s.family().unwrap();
        let c = ic_complex(&h, &family);
        assert_eq!(c.term_dim(1), 3);
        assert_eq!(c.h(1).space.dim(), 1);
    }

    #[test]
    fn remark24_false_on_fixture() {
        let orbit = orbit_n(2);
        assert!(!check_remark24_vanishing(&orbit.limit, &orbit.family).unwrap());
    }
}
