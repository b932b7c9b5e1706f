//! Exact scalar arithmetic: rationals, square classes, p-adic splitting,
//! Hilbert symbols and integer factoring.

mod factor;
mod hilbert;
mod square_class;

pub use factor::{
    factorize, is_prime, set_trial_division_bound, trial_division_bound, Factorization,
    DEFAULT_TRIAL_DIVISION_BOUND,
};
pub use hilbert::{hilbert_symbol, legendre, Place};
pub use square_class::{p_adic_split, square_class, valuation, LocalUnitData, SquareClass};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(a: &Rational) -> i32 {
    if a.is_zero() {
        0
    } else if a.is_positive() {
        1
    } else {
        -1
    }
}

/// Parses `"a/b"`, `"a"` or a decimal integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Canonical string form: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(a: &Rational) -> String {
    if a.denom().is_one() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}
