use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::factor::{factorize, is_prime};
use super::Rational;
use crate::error::{Error, Result};

/// A nonzero rational modulo nonzero squares, represented by the unique
/// signed squarefree integer in its class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SquareClass(#[serde(with = "crate::json::bigint")] BigInt);

impl SquareClass {
    pub fn one() -> Self {
        SquareClass(BigInt::one())
    }

    pub fn representative(&self) -> &BigInt {
        &self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_integer(self.0.clone())
    }

    /// Primes dividing the representative.
    pub fn primes(&self) -> Result<Vec<BigInt>> {
        if self.0.abs().is_one() {
            return Ok(Vec::new());
        }
        Ok(factorize(&self.0)?.into_keys().collect())
    }

    /// Product of classes; squarefree parts multiply then drop common primes.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        // g is squarefree and divides both, so g^2 drops out of the product.
        let g = self.0.gcd(&other.0);
        SquareClass((&self.0 / &g) * (&other.0 / &g))
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The squarefree integer representing `a` modulo squares.
pub fn square_class(a: &Rational) -> Result<SquareClass> {
    if a.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    // a/b and a*b differ by the square b^2.
    let n = a.numer() * a.denom();
    let mut rep = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    if !n.abs().is_one() {
        for (p, e) in factorize(&n)? {
            if e % 2 == 1 {
                rep *= p;
            }
        }
    }
    Ok(SquareClass(rep))
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(a: &Rational, p: &BigInt) -> i64 {
    assert!(!a.is_zero());
    fn v(mut n: BigInt, p: &BigInt) -> i64 {
        let mut k = 0;
        loop {
            let (q, r) = n.div_rem(p);
            if !r.is_zero() {
                return k;
            }
            n = q;
            k += 1;
        }
    }
    v(a.numer().clone(), p) - v(a.denom().clone(), p)
}

/// Local data of a nonzero rational at a prime: `a = unit * p^valuation`
/// with `unit` a p-adic unit and `unit_residue` its image in F_p^*.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalUnitData {
    #[serde(with = "crate::json::bigint")]
    pub prime: BigInt,
    pub valuation: i64,
    #[serde(with = "crate::json::rational")]
    pub unit: Rational,
    #[serde(with = "crate::json::bigint")]
    pub unit_residue: BigInt,
}

pub fn p_adic_split(a: &Rational, p: &BigInt) -> Result<LocalUnitData> {
    if a.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let i = valuation(a, p);
    let pk = Rational::from_integer(p.pow(i.unsigned_abs() as u32));
    let unit = if i >= 0 { a / pk } else { a * pk };
    let den_inv = unit
        .denom()
        .modinv(p)
        .expect("unit denominator is prime to p");
    let unit_residue = (unit.numer() * den_inv).mod_floor(p);
    Ok(LocalUnitData {
        prime: p.clone(),
        valuation: i,
        unit,
        unit_residue,
    })
}
