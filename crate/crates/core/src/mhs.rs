//! Filtrations, mixed Hodge structures, Tate twists, pairings and the
//! computation of morphisms from the unit structure.
//!
//! Everything lives over the Gaussian rationals: the real (or rational) form
//! is the fixed locus of entrywise conjugation in the distinguished basis, so
//! conjugation stays exact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::linalg::{quotient_map_in, LinearMap, Subspace};
use crate::scalars::{Field, Gauss};

#[derive(Debug, thiserror::Error)]
pub enum MhsError {
    #[error("filtration invalid: {0}")]
    BadFiltration(String),
    #[error("not a mixed Hodge structure: purity fails at weight {level}, p = {p}")]
    NotPure { level: i64, p: i64 },
    #[error("structure failed validation: {0}")]
    Invalid(String),
}

/// Finite increasing filtration `k -> W_k`, exhaustive and separated.
#[derive(Clone, Debug, PartialEq)]
pub struct IncreasingFiltration {
    ambient: usize,
    steps: BTreeMap<i64, Subspace<Gauss>>,
}

impl IncreasingFiltration {
    pub fn new(
        ambient: usize,
        steps: BTreeMap<i64, Subspace<Gauss>>,
    ) -> Result<Self, MhsError> {
        let mut prev: Option<&Subspace<Gauss>> = None;
        for (k, s) in &steps {
            if s.ambient() != ambient {
                return Err(MhsError::BadFiltration(format!(
                    "W_{k} lives in dimension {} != {ambient}",
                    s.ambient()
                )));
            }
            if let Some(p) = prev {
                if !s.contains_subspace(p) {
                    return Err(MhsError::BadFiltration(format!(
                        "W is not increasing at index {k}"
                    )));
                }
            }
            prev = Some(s);
        }
        match steps.values().last() {
            Some(top) if top.dim() == ambient => {}
            _ if ambient == 0 => {}
            _ => {
                return Err(MhsError::BadFiltration(
                    "W is not exhaustive (top step is not the whole space)".into(),
                ))
            }
        }
        Ok(IncreasingFiltration { ambient, steps })
    }

    /// Single-jump filtration: everything appears at index `k`.
    pub fn single_jump(ambient: usize, k: i64) -> Self {
        let mut steps = BTreeMap::new();
        steps.insert(k, Subspace::full(ambient));
        IncreasingFiltration { ambient, steps }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn at(&self, k: i64) -> Subspace<Gauss> {
        self.steps
            .range(..=k)
            .next_back()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Subspace::zero(self.ambient))
    }

    pub fn jump_indices(&self) -> Vec<i64> {
        self.steps.keys().copied().collect()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.steps.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.steps.keys().next_back().copied()
    }

    /// Shift all indices by `s` (used by Tate twists).
    pub fn shifted(&self, s: i64) -> Self {
        IncreasingFiltration {
            ambient: self.ambient,
            steps: self.steps.iter().map(|(k, v)| (k + s, v.clone())).collect(),
        }
    }

    pub fn is_conj_stable(&self) -> bool {
        self.steps.values().all(|s| s.is_conj_stable())
    }

    /// Filtration equality as functions of the index (the stored jump maps may
    /// list redundant steps).
    pub fn equivalent(&self, other: &Self) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        let mut keys: Vec<i64> = self.steps.keys().chain(other.steps.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.iter()
            .all(|&k| self.at(k) == other.at(k) && self.at(k - 1) == other.at(k - 1))
    }
}

/// Finite decreasing filtration `p -> F^p`, exhaustive and separated.
#[derive(Clone, Debug, PartialEq)]
pub struct DecreasingFiltration {
    ambient: usize,
    steps: BTreeMap<i64, Subspace<Gauss>>,
}

impl DecreasingFiltration {
    pub fn new(
        ambient: usize,
        steps: BTreeMap<i64, Subspace<Gauss>>,
    ) -> Result<Self, MhsError> {
        let mut prev: Option<&Subspace<Gauss>> = None;
        for (p, s) in &steps {
            if s.ambient() != ambient {
                return Err(MhsError::BadFiltration(format!(
                    "F^{p} lives in dimension {} != {ambient}",
                    s.ambient()
                )));
            }
            if let Some(q) = prev {
                if !q.contains_subspace(s) {
                    return Err(MhsError::BadFiltration(format!(
                        "F is not decreasing at index {p}"
                    )));
                }
            }
            prev = Some(s);
        }
        match steps.values().next() {
            Some(bottom) if bottom.dim() == ambient => {}
            _ if ambient == 0 => {}
            _ => {
                return Err(MhsError::BadFiltration(
                    "F is not exhaustive (lowest step is not the whole space)".into(),
                ))
            }
        }
        Ok(DecreasingFiltration { ambient, steps })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn at(&self, p: i64) -> Subspace<Gauss> {
        self.steps
            .range(p..)
            .next()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Subspace::zero(self.ambient))
    }

    pub fn jump_indices(&self) -> Vec<i64> {
        self.steps.keys().copied().collect()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.steps.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.steps.keys().next_back().copied()
    }

    pub fn shifted(&self, s: i64) -> Self {
        DecreasingFiltration {
            ambient: self.ambient,
            steps: self.steps.iter().map(|(k, v)| (k + s, v.clone())).collect(),
        }
    }

    /// Filtration equality as functions of the index (the stored jump maps may
    /// list redundant steps).
    pub fn equivalent(&self, other: &Self) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        let mut keys: Vec<i64> = self.steps.keys().chain(other.steps.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.iter()
            .all(|&p| self.at(p) == other.at(p) && self.at(p + 1) == other.at(p + 1))
    }
}

/// Scalar mode of the distinguished form; purely descriptive since both act
/// through exact Gaussian-rational coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    Rational,
    RealForm,
}

/// Rational (or real-form) space with weight filtration `W`, Hodge filtration
/// `F` on the complexification and Tate-twist bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedHodgeStructure {
    dim: usize,
    pub weight: IncreasingFiltration,
    pub hodge: DecreasingFiltration,
    pub twist: i64,
    pub mode: FieldMode,
}

/// Failure witness of the purity test.
#[derive(Clone, Debug)]
pub struct PurityFailure {
    pub level: i64,
    pub p: i64,
    /// A nonzero vector of `F^p ∩ conj(F^{k-p+1})` in graded coordinates, when
    /// the failure is a nontrivial intersection.
    pub witness: Option<Vec<Gauss>>,
}

/// Projection onto a subquotient `Z/B` with its induced filtrations.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub space: MixedHodgeStructure,
    pub z: Subspace<Gauss>,
    pub b: Subspace<Gauss>,
    q: LinearMap<Gauss>,
}

impl Subquotient {
    /// Class of an ambient vector; `None` when it does not lie in `Z`.
    pub fn project(&self, v: &[Gauss]) -> Option<Vec<Gauss>> {
        let coords = self.z.coords_of(v)?;
        Some(self.q.apply(&coords))
    }

    /// Canonical ambient representative of a class.
    pub fn lift(&self, cls: &[Gauss]) -> Vec<Gauss> {
        let coords = self
            .q
            .matrix
            .solve(cls)
            .expect("quotient projection is surjective");
        let basis = self.z.basis_rows();
        let mut v = vec![Gauss::zero(); self.z.ambient()];
        for (c, b) in coords.iter().zip(&basis) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = crate::scalars::Field::add(x, &crate::scalars::Field::mul(c, y));
            }
        }
        v
    }

    pub fn project_subspace(&self, s: &Subspace<Gauss>) -> Option<Subspace<Gauss>> {
        let rows: Option<Vec<Vec<Gauss>>> =
            s.basis_rows().iter().map(|v| self.project(v)).collect();
        Some(Subspace::from_rows(self.space.dim(), rows?))
    }
}

impl MixedHodgeStructure {
    pub fn new(
        weight: IncreasingFiltration,
        hodge: DecreasingFiltration,
        twist: i64,
        mode: FieldMode,
    ) -> Result<Self, MhsError> {
        if weight.ambient() != hodge.ambient() {
            return Err(MhsError::Invalid(
                "W and F live on spaces of different dimension".into(),
            ));
        }
        if !weight.is_conj_stable() {
            return Err(MhsError::Invalid(
                "W is not defined over the real/rational form".into(),
            ));
        }
        Ok(MixedHodgeStructure {
            dim: weight.ambient(),
            weight,
            hodge,
            twist,
            mode,
        })
    }

    /// The unit structure: one-dimensional, weight 0, type (0,0).
    pub fn unit(mode: FieldMode) -> Self {
        let w = IncreasingFiltration::single_jump(1, 0);
        let mut fsteps = BTreeMap::new();
        fsteps.insert(0, Subspace::full(1));
        let f = DecreasingFiltration::new(1, fsteps).unwrap();
        MixedHodgeStructure::new(w, f, 0, mode).unwrap()
    }

    pub fn zero(mode: FieldMode) -> Self {
        let w = IncreasingFiltration {
            ambient: 0,
            steps: BTreeMap::new(),
        };
        let f = DecreasingFiltration {
            ambient: 0,
            steps: BTreeMap::new(),
        };
        MixedHodgeStructure::new(w, f, 0, mode).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Subquotient `Z/B` with induced `W` and `F`.
    pub fn subquotient(
        &self,
        z: &Subspace<Gauss>,
        b: &Subspace<Gauss>,
    ) -> Result<Subquotient, MhsError> {
        let q = quotient_map_in(b, z)
            .map_err(|e| MhsError::Invalid(format!("subquotient: {e}")))?;
        let d = z.dim() - b.dim();
        let mut partial = Subquotient {
            space: MixedHodgeStructure {
                dim: d,
                weight: IncreasingFiltration::single_jump(d, 0),
                hodge: DecreasingFiltration {
                    ambient: d,
                    steps: BTreeMap::new(),
                },
                twist: self.twist,
                mode: self.mode,
            },
            z: z.clone(),
            b: b.clone(),
            q,
        };
        let mut wsteps = BTreeMap::new();
        for k in self.weight.jump_indices() {
            let piece = self.weight.at(k).intersect(z);
            let img = partial
                .project_subspace(&piece)
                .expect("piece lies inside z");
            wsteps.insert(k, img);
        }
        if d > 0 {
            wsteps.insert(
                self.weight.max_index().unwrap_or(0),
                Subspace::full(d),
            );
        }
        let mut fsteps = BTreeMap::new();
        for p in self.hodge.jump_indices() {
            let piece = self.hodge.at(p).intersect(z);
            let img = partial
                .project_subspace(&piece)
                .expect("piece lies inside z");
            fsteps.insert(p, img);
        }
        partial.space.weight = IncreasingFiltration::new(d, wsteps)?;
        partial.space.hodge = DecreasingFiltration::new(d, fsteps)?;
        Ok(partial)
    }

    /// Weight-graded piece `Gr^W_k` with its induced Hodge filtration.
    pub fn gr_w(&self, k: i64) -> Subquotient {
        let z = self.weight.at(k);
        let b = self.weight.at(k - 1);
        self.subquotient(&z, &b)
            .expect("weight steps are nested")
    }

    /// Verify that every weight-graded piece is pure of its weight.
    pub fn check_mhs(&self) -> Result<(), PurityFailure> {
        let (Some(wmin), Some(wmax)) = (self.weight.min_index(), self.weight.max_index())
        else {
            return Ok(()); // zero space
        };
        let pmin = self.hodge.min_index().unwrap_or(0) - 1;
        let pmax = self.hodge.max_index().unwrap_or(0) + 1;
        for k in wmin..=wmax {
            let gr = self.gr_w(k);
            let d = gr.space.dim();
            if d == 0 {
                continue;
            }
            for p in pmin..=pmax {
                let fp = gr.space.hodge.at(p);
                let fc = gr.space.hodge.at(k - p + 1).conj();
                let meet = fp.intersect(&fc);
                if meet.dim() > 0 {
                    return Err(PurityFailure {
                        level: k,
                        p,
                        witness: meet.basis_rows().into_iter().next(),
                    });
                }
                if fp.dim() + fc.dim() != d {
                    return Err(PurityFailure {
                        level: k,
                        p,
                        witness: None,
                    });
                }
            }
        }
        Ok(())
    }

    /// Tate twist `H(m)`: `W` indices shift by `-2m`, `F` indices by `-m`.
    pub fn tate_twist(&self, m: i64) -> Self {
        MixedHodgeStructure {
            dim: self.dim,
            weight: self.weight.shifted(-2 * m),
            hodge: self.hodge.shifted(-m),
            twist: self.twist + m,
            mode: self.mode,
        }
    }

    /// Morphisms from the unit structure: rational vectors in `W_0` whose
    /// complexification lies in `F^0`. Returned as the canonical subspace
    /// with rational basis.
    pub fn hom_from_unit(&self) -> Result<Subspace<Gauss>, MhsError> {
        if let Err(f) = self.check_mhs() {
            return Err(MhsError::NotPure {
                level: f.level,
                p: f.p,
            });
        }
        let s = self.weight.at(0).intersect(&self.hodge.at(0));
        let t = s.intersect(&s.conj());
        Ok(t.real_points())
    }

    /// Direct sum (block diagonal), used by tests and the Koszul terms.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let d = self.dim + other.dim;
        let embed = |s: &Subspace<Gauss>, offset: usize, amb: usize| -> Vec<Vec<Gauss>> {
            s.basis_rows()
                .into_iter()
                .map(|r| {
                    let mut v = vec![Gauss::zero(); amb];
                    v[offset..offset + r.len()].clone_from_slice(&r);
                    v
                })
                .collect()
        };
        let mut wsteps: BTreeMap<i64, Subspace<Gauss>> = BTreeMap::new();
        let mut keys: Vec<i64> = self.weight.jump_indices();
        keys.extend(other.weight.jump_indices());
        keys.sort_unstable();
        keys.dedup();
        for k in keys {
            let mut rows = embed(&self.weight.at(k), 0, d);
            rows.extend(embed(&other.weight.at(k), self.dim, d));
            wsteps.insert(k, Subspace::from_rows(d, rows));
        }
        let mut fsteps: BTreeMap<i64, Subspace<Gauss>> = BTreeMap::new();
        let mut keys: Vec<i64> = self.hodge.jump_indices();
        keys.extend(other.hodge.jump_indices());
        keys.sort_unstable();
        keys.dedup();
        for p in keys {
            let mut rows = embed(&self.hodge.at(p), 0, d);
            rows.extend(embed(&other.hodge.at(p), self.dim, d));
            fsteps.insert(p, Subspace::from_rows(d, rows));
        }
        MixedHodgeStructure {
            dim: d,
            weight: IncreasingFiltration { ambient: d, steps: wsteps },
            hodge: DecreasingFiltration { ambient: d, steps: fsteps },
            twist: self.twist,
            mode: self.mode,
        }
    }
}

/// Bilinear form with symmetry and weight bookkeeping. The stored matrix is
/// the form divided by `2πi`, which keeps all fixture values Gaussian
/// rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub matrix: crate::linalg::Matrix<Gauss>,
    pub weight: i64,
    pub skew: bool,
}

impl Pairing {
    pub fn new(matrix: crate::linalg::Matrix<Gauss>, weight: i64, skew: bool) -> Self {
        Pairing { matrix, weight, skew }
    }

    pub fn value(&self, x: &[Gauss], y: &[Gauss]) -> Gauss {
        let my = self.matrix.mul_vec(y);
        let mut acc = Gauss::zero();
        for (a, b) in x.iter().zip(&my) {
            acc = crate::scalars::Field::add(&acc, &crate::scalars::Field::mul(a, b));
        }
        acc
    }

    pub fn is_skew(&self) -> bool {
        self.matrix.transpose() == self.matrix.scale(&crate::scalars::Field::neg(&Gauss::one()))
    }

    /// `<s, t> = 0` for all basis vectors of the two subspaces.
    pub fn annihilates(&self, s: &Subspace<Gauss>, t: &Subspace<Gauss>) -> bool {
        s.basis_rows().iter().all(|x| {
            t.basis_rows()
                .iter()
                .all(|y| crate::scalars::Field::is_zero(&self.value(x, y)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::scalars::{rat, Field};

    fn gv(entries: &[(usize, Gauss)], dim: usize) -> Vec<Gauss> {
        let mut v = vec![Gauss::zero(); dim];
        for (i, x) in entries {
            v[*i] = x.clone();
        }
        v
    }

    /// The four-dimensional weight -1 fixture (see `scenario::fixtures`).
    fn fixture() -> MixedHodgeStructure {
        crate::scenario::fixtures::h1_orbit().orbit().unwrap().limit
    }

    #[test]
    fn filtration_lookup_conventions() {
        let w = IncreasingFiltration::single_jump(2, -1);
        assert_eq!(w.at(-2).dim(), 0);
        assert_eq!(w.at(-1).dim(), 2);
        assert_eq!(w.at(5).dim(), 2);
    }

    #[test]
    fn gr_of_fixture_has_expected_dimensions() {
        let h = fixture();
        assert_eq!(h.gr_w(0).space.dim(), 1);
        assert_eq!(h.gr_w(-1).space.dim(), 2);
        assert_eq!(h.gr_w(-2).space.dim(), 1);
        assert_eq!(h.gr_w(3).space.dim(), 0);
        let total: usize = (-3..=3).map(|k| h.gr_w(k).space.dim()).sum();
        assert_eq!(total, h.dim());
    }

    #[test]
    fn gr_minus_one_has_conjugate_extreme_types() {
        let h = fixture();
        let gr = h.gr_w(-1).space;
        // types (1,-2) and (-2,1): F^1 is 1-dimensional, F^0 = F^1,
        // F^-1 = F^1, F^-2 = everything
        assert_eq!(gr.hodge.at(1).dim(), 1);
        assert_eq!(gr.hodge.at(0).dim(), 1);
        assert_eq!(gr.hodge.at(-1).dim(), 1);
        assert_eq!(gr.hodge.at(-2).dim(), 2);
        assert_eq!(gr.hodge.at(2).dim(), 0);
    }

    #[test]
    fn gr_zero_is_spanned_by_class_of_u2() {
        let h = fixture();
        let gr0 = h.gr_w(0);
        assert_eq!(gr0.space.dim(), 1);
        // u_2 = e_2 generates
        let u2 = gv(&[(1, Gauss::one())], 4);
        let cls = gr0.project(&u2).unwrap();
        assert!(cls.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn fixture_passes_purity_and_swapped_hodge_fails() {
        let h = fixture();
        assert!(h.check_mhs().is_ok());

        // deliberately break F: give F^1 two dimensions
        let mut fsteps = BTreeMap::new();
        for p in h.hodge.jump_indices() {
            fsteps.insert(p, h.hodge.at(p));
        }
        fsteps.insert(1, h.hodge.at(0));
        let bad = MixedHodgeStructure::new(
            h.weight.clone(),
            DecreasingFiltration::new(4, fsteps).unwrap(),
            h.twist,
            h.mode,
        )
        .unwrap();
        assert!(bad.check_mhs().is_err());
    }

    #[test]
    fn zero_space_passes() {
        assert!(MixedHodgeStructure::zero(FieldMode::RealForm).check_mhs().is_ok());
    }

    #[test]
    fn tate_twist_shifts_and_inverts() {
        let h = fixture();
        assert_eq!(h.tate_twist(0), h);
        let tw = h.tate_twist(-1);
        // F^0 of H(-1) equals F^-1 of H
        assert_eq!(tw.hodge.at(0), h.hodge.at(-1));
        assert_eq!(tw.weight.at(0), h.weight.at(-2));
        assert_eq!(tw.tate_twist(1), h);
    }

    #[test]
    fn hom_from_unit_examples() {
        let unit = MixedHodgeStructure::unit(FieldMode::Rational);
        assert_eq!(unit.hom_from_unit().unwrap().dim(), 1);

        // pure weight -1 structure: no morphisms from the unit
        let w = IncreasingFiltration::single_jump(2, -1);
        let mut fs = BTreeMap::new();
        fs.insert(
            0,
            Subspace::from_rows(2, vec![gv(&[(0, Gauss::one()), (1, Gauss::i())], 2)]),
        );
        fs.insert(-1, Subspace::full(2));
        let f = DecreasingFiltration::new(2, fs).unwrap();
        let pure = MixedHodgeStructure::new(w, f, 0, FieldMode::RealForm).unwrap();
        assert!(pure.check_mhs().is_ok());
        assert_eq!(pure.hom_from_unit().unwrap().dim(), 0);
    }

    #[test]
    fn hom_from_unit_additive_on_sums() {
        let unit = MixedHodgeStructure::unit(FieldMode::Rational);
        let h = fixture();
        let both = unit.direct_sum(&h);
        assert_eq!(
            both.hom_from_unit().unwrap().dim(),
            unit.hom_from_unit().unwrap().dim() + h.hom_from_unit().unwrap().dim()
        );
    }

    #[test]
    fn purity_invariant_under_real_basis_change() {
        let h = fixture();
        let mut r = crate::random::rng(42);
        let p = crate::random::to_gauss(&crate::random::invertible_matrix(&mut r, 4));
        let tw = |s: &Subspace<Gauss>| s.apply(&p);
        let wsteps: BTreeMap<i64, Subspace<Gauss>> = h
            .weight
            .jump_indices()
            .into_iter()
            .map(|k| (k, tw(&h.weight.at(k))))
            .collect();
        let fsteps: BTreeMap<i64, Subspace<Gauss>> = h
            .hodge
            .jump_indices()
            .into_iter()
            .map(|p_| (p_, tw(&h.hodge.at(p_))))
            .collect();
        let moved = MixedHodgeStructure::new(
            IncreasingFiltration::new(4, wsteps).unwrap(),
            DecreasingFiltration::new(4, fsteps).unwrap(),
            h.twist,
            h.mode,
        )
        .unwrap();
        assert!(moved.check_mhs().is_ok());
    }

    #[test]
    fn pairing_skew_detection() {
        let mut m = Matrix::zeros(2, 2);
        m.set(0, 1, Gauss::one());
        m.set(1, 0, Field::neg(&Gauss::one()));
        let p = Pairing::new(m, -1, true);
        assert!(p.is_skew());
        let x = gv(&[(0, Gauss::one())], 2);
        let y = gv(&[(1, Gauss::from_rational(rat(2, 1)))], 2);
        assert_eq!(p.value(&x, &y), Gauss::from_rational(rat(2, 1)));
        assert_eq!(p.value(&y, &x), Gauss::from_rational(rat(-2, 1)));
    }
}
