//! Exact coefficient arithmetic: arbitrary-precision rationals and Gaussian
//! rationals, plus the small field abstraction the linear algebra is generic
//! over.
//!
//! String encodings: rationals as `p/q` (or `p`), Gaussian rationals as
//! `p/q+r/s i`.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{Signed, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number, always reduced with positive
/// denominator (guaranteed by `num::BigRational`).
pub type Rational = num::BigRational;

/// Field operations used by the exact linear algebra.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

/// Fields carrying an exact conjugation involution.
pub trait ConjField: Field {
    fn conj(&self) -> Self;
}

impl Field for Rational {
    fn zero() -> Self {
        <num::BigRational as num::Zero>::zero()
    }
    fn one() -> Self {
        <num::BigRational as num::One>::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl ConjField for Rational {
    fn conj(&self) -> Self {
        self.clone()
    }
}

/// Convenience constructor for a rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Gaussian rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gauss {
    pub re: Rational,
    pub im: Rational,
}

impl Gauss {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gauss { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Gauss {
            re,
            im: Field::zero(),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Gauss::from_rational(rat(n, 1))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Gauss {
            re: Field::zero(),
            im: Field::one(),
        }
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    /// Squared modulus `re^2 + im^2`.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex64(&self) -> Complex64 {
        fn f(r: &Rational) -> f64 {
            let n = r.numer();
            let d = r.denom();
            // exact for all fixture-sized values
            match (n.to_string().parse::<f64>(), d.to_string().parse::<f64>()) {
                (Ok(a), Ok(b)) => a / b,
                _ => f64::NAN,
            }
        }
        Complex64::new(f(&self.re), f(&self.im))
    }

    /// Multiply by `i^k` (k may be negative).
    pub fn mul_i_pow(&self, k: i64) -> Self {
        let k = k.rem_euclid(4);
        match k {
            0 => self.clone(),
            1 => Gauss::new(Field::neg(&self.im), self.re.clone()),
            2 => Field::neg(self),
            _ => Gauss::new(self.im.clone(), Field::neg(&self.re)),
        }
    }
}

impl Field for Gauss {
    fn zero() -> Self {
        Gauss {
            re: Field::zero(),
            im: Field::zero(),
        }
    }
    fn one() -> Self {
        Gauss {
            re: Field::one(),
            im: Field::zero(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        Gauss {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Gauss {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        Gauss {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
    fn neg(&self) -> Self {
        Gauss {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm_sq();
        if Zero::is_zero(&n) {
            return None;
        }
        Some(Gauss {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
}

impl ConjField for Gauss {
    fn conj(&self) -> Self {
        Gauss {
            re: self.re.clone(),
            im: -&self.im,
        }
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.im) {
            write!(f, "{}", self.re)
        } else if Zero::is_zero(&self.re) {
            write!(f, "{} i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{} i", self.re, -&self.im)
        } else {
            write!(f, "{}+{} i", self.re, self.im)
        }
    }
}

impl fmt::Debug for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parse error for scalar strings.
#[derive(Debug, thiserror::Error)]
#[error("invalid scalar literal `{0}`")]
pub struct ScalarParseError(pub String);

impl FromStr for Gauss {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw = s.trim();
        let err = || ScalarParseError(raw.to_string());
        let parse_rat = |t: &str| Rational::from_str(t.trim()).map_err(|_| err());
        if let Some(body) = raw.strip_suffix('i') {
            let body = body.trim_end();
            // find the +/- separating real and imaginary parts (not the
            // leading sign, not a sign inside `p/q`)
            let mut split = None;
            for (idx, ch) in body.char_indices().skip(1) {
                if (ch == '+' || ch == '-')
                    && !matches!(body.as_bytes()[idx - 1], b'/' | b'+' | b'-')
                {
                    split = Some((idx, ch));
                }
            }
            match split {
                Some((idx, ch)) => {
                    let re = parse_rat(&body[..idx])?;
                    let im_str = body[idx + 1..].trim();
                    let im = if im_str.is_empty() {
                        Field::one()
                    } else {
                        parse_rat(im_str)?
                    };
                    let im = if ch == '-' { -im } else { im };
                    Ok(Gauss::new(re, im))
                }
                None => {
                    let body = body.trim();
                    let im = if body.is_empty() || body == "+" {
                        Field::one()
                    } else if body == "-" {
                        -<Rational as Field>::one()
                    } else {
                        parse_rat(body)?
                    };
                    Ok(Gauss::new(Field::zero(), im))
                }
            }
        } else {
            Ok(Gauss::from_rational(parse_rat(raw)?))
        }
    }
}

impl Serialize for Gauss {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Gauss {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
