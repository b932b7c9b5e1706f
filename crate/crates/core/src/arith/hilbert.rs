use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::factor::is_prime;
use super::square_class::square_class;
use super::Rational;
use crate::error::{Error, Result};

/// A place of Q: the real embedding or a finite prime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Prime(BigInt),
}

impl Place {
    pub fn prime(p: u64) -> Place {
        Place::Prime(BigInt::from(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Place::Real => s.serialize_str("inf"),
            Place::Prime(p) => crate::json::bigint::serialize(p, s),
        }
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        if v.as_str() == Some("inf") {
            return Ok(Place::Real);
        }
        crate::json::bigint::from_value(&v)
            .map(Place::Prime)
            .map_err(serde::de::Error::custom)
    }
}

/// Legendre symbol (a | p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: &BigInt, p: &BigInt) -> i8 {
    let r = a.mod_floor(p);
    if r.is_zero() {
        return 0;
    }
    let e = (p - 1u32) >> 1;
    if r.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

fn split_squarefree(a: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let (q, r) = a.div_rem(p);
    if r.is_zero() {
        (1, q)
    } else {
        (0, a.clone())
    }
}

fn mod8(u: &BigInt) -> u32 {
    u.mod_floor(&BigInt::from(8)).to_u32().unwrap()
}

/// Hilbert symbol (a, b)_v: +1 iff z^2 = a x^2 + b y^2 has a nontrivial
/// solution over the completion of Q at `place`.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: &Place) -> Result<i8> {
    let a = square_class(a)?;
    let b = square_class(b)?;
    let (a, b) = (a.representative(), b.representative());
    match place {
        Place::Real => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p.clone()));
            }
            let (alpha, u) = split_squarefree(a, p);
            let (beta, v) = split_squarefree(b, p);
            if p == &BigInt::from(2) {
                let eps = |x: u32| ((x - 1) / 2) % 2;
                let omega = |x: u32| ((x * x - 1) / 8) % 2;
                let (u8_, v8) = (mod8(&u), mod8(&v));
                let e = eps(u8_) * eps(v8) + alpha * omega(v8) + beta * omega(u8_);
                Ok(if e % 2 == 0 { 1 } else { -1 })
            } else {
                let eps_p = ((p - 1u32) >> 1u32).is_odd();
                let mut s: i8 = if alpha * beta == 1 && eps_p { -1 } else { 1 };
                if beta == 1 {
                    s *= legendre(&u, p);
                }
                if alpha == 1 {
                    s *= legendre(&v, p);
                }
                Ok(s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn hs(a: i64, b: i64, p: u64) -> i8 {
        hilbert_symbol(&int(a), &int(b), &Place::prime(p)).unwrap()
    }

    #[test]
    fn documented_values() {
        assert_eq!(hs(1, 7, 2), 1);
        assert_eq!(hs(1, -5, 3), 1);
        assert_eq!(hs(2, 2, 2), 1);
        assert_eq!(hs(3, 3, 3), -1);
        assert_eq!(hs(-1, -1, 2), -1);
        assert_eq!(hs(2, 3, 3), -1);
        assert_eq!(hs(5, 2, 5), -1);
        assert_eq!(hilbert_symbol(&int(-1), &int(-3), &Place::Real).unwrap(), -1);
        assert_eq!(hilbert_symbol(&int(-1), &int(3), &Place::Real).unwrap(), 1);
    }

    #[test]
    fn legendre_values() {
        let p = BigInt::from(7);
        let res: Vec<i8> = (0..7).map(|a| legendre(&BigInt::from(a), &p)).collect();
        assert_eq!(res, vec![0, 1, 1, -1, 1, -1, -1]);
    }

    #[test]
    fn place_json() {
        let places = vec![Place::Real, Place::prime(2), Place::prime(101)];
        let s = serde_json::to_string(&places).unwrap();
        assert_eq!(s, r#"["inf",2,101]"#);
        let back: Vec<Place> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, places);
    }
}
