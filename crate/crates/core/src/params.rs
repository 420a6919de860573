//! Conjugation-closed truncated polynomial ring in the paired variables
//! `t_k / t̄_k`, `z_k / z̄_k`, `λ / λ̄` and real constants `c_k`.
//!
//! `z_k` stands for `log t_k` (branch fixed by `Im z_k ∈ [0, 2π)`), which is
//! why the derivation `ξ_k = t_k ∂/∂t_k` sends `z_k` to `1` while scaling
//! `t_k` by itself. Truncation bounds the total degree in the `t`-type and
//! `λ`-type variables; `z`-type and `c`-type variables are never truncated.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalars::{Field, Gauss};

/// Ring context: number of disk coordinates and the truncation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamRing {
    pub n: usize,
    pub trunc: u32,
}

impl ParamRing {
    pub fn new(n: usize, trunc: u32) -> Self {
        ParamRing { n, trunc }
    }
}

/// A single variable of the ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    T(usize),
    TBar(usize),
    Z(usize),
    ZBar(usize),
    /// Real constant `c_k` (self-conjugate, killed by every `ξ_k`).
    C(usize),
    Lambda,
    LambdaBar,
}

/// Exponent vector of one monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    t: Vec<u16>,
    tb: Vec<u16>,
    z: Vec<u16>,
    zb: Vec<u16>,
    c: Vec<u16>,
    lam: u16,
    lab: u16,
}

impl Monomial {
    fn unit(n: usize) -> Self {
        Monomial {
            t: vec![0; n],
            tb: vec![0; n],
            z: vec![0; n],
            zb: vec![0; n],
            c: vec![0; n],
            lam: 0,
            lab: 0,
        }
    }

    /// Degree counted against the truncation order.
    fn trunc_degree(&self) -> u32 {
        let s: u32 = self.t.iter().chain(&self.tb).map(|&e| e as u32).sum();
        s + self.lam as u32 + self.lab as u32
    }

    fn mul(&self, other: &Self) -> Self {
        let zip = |a: &[u16], b: &[u16]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Monomial {
            t: zip(&self.t, &other.t),
            tb: zip(&self.tb, &other.tb),
            z: zip(&self.z, &other.z),
            zb: zip(&self.zb, &other.zb),
            c: zip(&self.c, &other.c),
            lam: self.lam + other.lam,
            lab: self.lab + other.lab,
        }
    }

    fn conj(&self) -> Self {
        Monomial {
            t: self.tb.clone(),
            tb: self.t.clone(),
            z: self.zb.clone(),
            zb: self.z.clone(),
            c: self.c.clone(),
            lam: self.lab,
            lab: self.lam,
        }
    }

    fn has_t_type(&self) -> bool {
        self.t.iter().any(|&e| e > 0) || self.tb.iter().any(|&e| e > 0)
    }

    fn var_name(block: &str, k: usize) -> String {
        format!("{block}{}", k + 1)
    }

    fn to_name_map(&self) -> BTreeMap<String, u16> {
        let mut m = BTreeMap::new();
        let mut put = |name: String, e: u16| {
            if e > 0 {
                m.insert(name, e);
            }
        };
        for k in 0..self.t.len() {
            put(Self::var_name("t", k), self.t[k]);
            put(Self::var_name("tbar", k), self.tb[k]);
            put(Self::var_name("z", k), self.z[k]);
            put(Self::var_name("zbar", k), self.zb[k]);
            put(Self::var_name("c", k), self.c[k]);
        }
        put("lam".into(), self.lam);
        put("lambar".into(), self.lab);
        m
    }

    fn from_name_map(n: usize, m: &BTreeMap<String, u16>) -> Result<Self, String> {
        let mut mono = Monomial::unit(n);
        for (name, &e) in m {
            let set = |block: &mut Vec<u16>, idx_str: &str| -> Result<(), String> {
                let k: usize = idx_str
                    .parse()
                    .map_err(|_| format!("bad variable `{name}`"))?;
                if k == 0 || k > n {
                    return Err(format!("variable index out of range in `{name}`"));
                }
                block[k - 1] = e;
                Ok(())
            };
            if name == "lam" {
                mono.lam = e;
            } else if name == "lambar" {
                mono.lab = e;
            } else if let Some(rest) = name.strip_prefix("tbar") {
                set(&mut mono.tb, rest)?;
            } else if let Some(rest) = name.strip_prefix("zbar") {
                set(&mut mono.zb, rest)?;
            } else if let Some(rest) = name.strip_prefix('t') {
                set(&mut mono.t, rest)?;
            } else if let Some(rest) = name.strip_prefix('z') {
                set(&mut mono.z, rest)?;
            } else if let Some(rest) = name.strip_prefix('c') {
                set(&mut mono.c, rest)?;
            } else {
                return Err(format!("unknown variable `{name}`"));
            }
        }
        Ok(mono)
    }
}

/// Element of the truncated parameter ring, sparse over Gaussian rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ParamElement {
    ring: ParamRing,
    terms: BTreeMap<Monomial, Gauss>,
}

/// Numeric point of the parameter space for evaluation.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub t: Vec<Complex64>,
    pub lambda: Complex64,
    pub c: Vec<f64>,
}

impl Assignment {
    pub fn new(t: Vec<Complex64>, lambda: Complex64) -> Self {
        let n = t.len();
        Assignment {
            t,
            lambda,
            c: vec![0.0; n],
        }
    }

    /// `log t_k` with the branch fixed by `Im z ∈ [0, 2π)`.
    pub fn z(&self, k: usize) -> Complex64 {
        let mut z = self.t[k].ln();
        if z.im < 0.0 {
            z.im += 2.0 * std::f64::consts::PI;
        }
        z
    }
}

impl ParamElement {
    pub fn ring(&self) -> ParamRing {
        self.ring
    }

    pub fn zero(ring: ParamRing) -> Self {
        ParamElement {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: ParamRing, c: Gauss) -> Self {
        let mut e = Self::zero(ring);
        if !c.is_zero() {
            e.terms.insert(Monomial::unit(ring.n), c);
        }
        e
    }

    pub fn one(ring: ParamRing) -> Self {
        Self::constant(ring, Field::one())
    }

    pub fn var(ring: ParamRing, v: Var) -> Self {
        let mut m = Monomial::unit(ring.n);
        match v {
            Var::T(k) => m.t[k] = 1,
            Var::TBar(k) => m.tb[k] = 1,
            Var::Z(k) => m.z[k] = 1,
            Var::ZBar(k) => m.zb[k] = 1,
            Var::C(k) => m.c[k] = 1,
            Var::Lambda => m.lam = 1,
            Var::LambdaBar => m.lab = 1,
        }
        let mut e = Self::zero(ring);
        e.terms.insert(m, Field::one());
        e.normalize();
        e
    }

    /// The product `t_1 ⋯ t_n`.
    pub fn t_product(ring: ParamRing) -> Self {
        let mut m = Monomial::unit(ring.n);
        for e in &mut m.t {
            *e = 1;
        }
        let mut p = Self::zero(ring);
        p.terms.insert(m, Field::one());
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        let trunc = self.ring.trunc;
        self.terms
            .retain(|m, c| !c.is_zero() && m.trunc_degree() <= trunc);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ring, rhs.ring, "mixed parameter rings");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let entry = out.terms.entry(m.clone()).or_insert_with(Field::zero);
            *entry = entry.add(c);
        }
        out.normalize();
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = Field::neg(c);
        }
        out
    }

    pub fn scale(&self, s: &Gauss) -> Self {
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.mul(s));
        }
        out.normalize();
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ring, rhs.ring, "mixed parameter rings");
        let mut out = Self::zero(self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                if m.trunc_degree() > self.ring.trunc {
                    continue;
                }
                let entry = out.terms.entry(m).or_insert_with(Field::zero);
                *entry = entry.add(&ca.mul(cb));
            }
        }
        out.normalize();
        out
    }

    /// Conjugation: swaps barred and unbarred variables and conjugates
    /// coefficients.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.conj(), crate::scalars::ConjField::conj(c));
        }
        out
    }

    /// The derivation `ξ_k = t_k ∂/∂t_k` (with `z_k = log t_k`, so
    /// `ξ_k z_k = 1`); barred variables and constants are killed.
    pub fn xi(&self, k: usize) -> Self {
        assert!(k < self.ring.n, "xi index out of range");
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            let td = m.t[k];
            if td > 0 {
                let coeff = c.mul(&Gauss::from_i64(td as i64));
                let entry = out.terms.entry(m.clone()).or_insert_with(Field::zero);
                *entry = entry.add(&coeff);
            }
            let zd = m.z[k];
            if zd > 0 {
                let mut m2 = m.clone();
                m2.z[k] -= 1;
                let coeff = c.mul(&Gauss::from_i64(zd as i64));
                let entry = out.terms.entry(m2).or_insert_with(Field::zero);
                *entry = entry.add(&coeff);
            }
        }
        out.normalize();
        out
    }

    /// Substitute every `t`-type variable by 0 (the boundary fiber).
    pub fn subst_t_zero(&self) -> Self {
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            if !m.has_t_type() {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// True when no monomial involves `λ` or `λ̄`.
    pub fn is_lambda_free(&self) -> bool {
        self.terms.keys().all(|m| m.lam == 0 && m.lab == 0)
    }

    /// Substitute a constant value for `λ` (and its conjugate for `λ̄`).
    pub fn subst_lambda(&self, value: &Gauss) -> Self {
        let vbar = crate::scalars::ConjField::conj(value);
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let (lam, lab) = (m2.lam, m2.lab);
            m2.lam = 0;
            m2.lab = 0;
            let mut coeff = c.clone();
            for _ in 0..lam {
                coeff = coeff.mul(value);
            }
            for _ in 0..lab {
                coeff = coeff.mul(&vbar);
            }
            let entry = out.terms.entry(m2).or_insert_with(Field::zero);
            *entry = entry.add(&coeff);
        }
        out.normalize();
        out
    }

    /// Constant term (all exponents zero).
    pub fn constant_term(&self) -> Gauss {
        self.terms
            .get(&Monomial::unit(self.ring.n))
            .cloned()
            .unwrap_or_else(Field::zero)
    }

    /// Coefficient of the pure monomial `t_1 ⋯ t_n` (no other variables).
    pub fn t_product_coefficient(&self) -> Self {
        let mut out = Self::zero(self.ring);
        for (m, c) in &self.terms {
            if m.t.iter().all(|&e| e == 1)
                && !m.tb.iter().any(|&e| e > 0)
                && !m.z.iter().any(|&e| e > 0)
                && !m.zb.iter().any(|&e| e > 0)
            {
                let mut m2 = m.clone();
                for e in &mut m2.t {
                    *e = 0;
                }
                out.terms.insert(m2, c.clone());
            }
        }
        out.normalize();
        out
    }

    /// Numeric evaluation; a ring homomorphism with barred variables bound to
    /// the conjugates of their partners.
    pub fn evaluate(&self, at: &Assignment) -> Result<Complex64, String> {
        if at.t.len() != self.ring.n {
            return Err("assignment arity mismatch".into());
        }
        for (k, t) in at.t.iter().enumerate() {
            if *t == Complex64::new(0.0, 0.0) {
                return Err(format!("t_{} = 0: log undefined", k + 1));
            }
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (m, coeff) in &self.terms {
            let mut v = coeff.to_complex64();
            for k in 0..self.ring.n {
                let t = at.t[k];
                let z = at.z(k);
                v *= t.powi(m.t[k] as i32)
                    * t.conj().powi(m.tb[k] as i32)
                    * z.powi(m.z[k] as i32)
                    * z.conj().powi(m.zb[k] as i32)
                    * Complex64::new(at.c[k], 0.0).powi(m.c[k] as i32);
            }
            v *= at.lambda.powi(m.lam as i32) * at.lambda.conj().powi(m.lab as i32);
            total += v;
        }
        Ok(total)
    }

    /// Retruncate to a (lower) order.
    pub fn truncated(&self, trunc: u32) -> Self {
        let mut out = self.clone();
        out.ring.trunc = trunc;
        out.normalize();
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Gauss)> {
        self.terms.iter()
    }
}

impl fmt::Display for ParamElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, e) in m.to_name_map() {
                if e == 1 {
                    write!(f, " {name}")?;
                } else {
                    write!(f, " {name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for ParamElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            ring: ParamRing,
            terms: Vec<(BTreeMap<String, u16>, &'a Gauss)>,
        }
        Repr {
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.to_name_map(), c))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParamElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            ring: ParamRing,
            terms: Vec<(BTreeMap<String, u16>, Gauss)>,
        }
        let r = Repr::deserialize(d)?;
        let mut out = ParamElement::zero(r.ring);
        for (names, coeff) in r.terms {
            let m = Monomial::from_name_map(r.ring.n, &names).map_err(serde::de::Error::custom)?;
            let entry = out.terms.entry(m).or_insert_with(Field::zero);
            *entry = entry.add(&coeff);
        }
        out.normalize();
        Ok(out)
    }
}
