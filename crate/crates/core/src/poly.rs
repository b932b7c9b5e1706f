//! Univariate polynomials over Q with exact Sturm root counting.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, sign, Rational};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Coefficients stored low degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "crate::json::rational_vec")]
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `t - a`.
    pub fn linear_root(a: &Rational) -> Self {
        Self::new(vec![-a.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_matrix(&self, m: &Matrix<Rational>) -> Matrix<Rational> {
        let n = m.rows();
        let mut acc = Matrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &Matrix::identity(n).scale(c);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut r = self.coeffs.clone();
        let dl = d.lead();
        let dd = d.deg();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (i, b) in d.coeffs.iter().enumerate() {
                    r[k + i] -= &c * b;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// `self / gcd(self, self')`, monic.
    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).expect("gcd is nonzero").0.monic()
    }

    /// Yun's algorithm: monic squarefree factors f_1, f_2, ... with
    /// self = lead * prod f_i^i.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).unwrap().0;
        let mut c = d.div_rem(&a0).unwrap().0;
        let mut e = c.sub(&b.derivative());
        while b.deg() > 0 {
            let a = b.gcd(&e);
            out.push(a.clone());
            b = b.div_rem(&a).unwrap().0;
            c = e.div_rem(&a).unwrap().0;
            e = c.sub(&b.derivative());
        }
        out
    }

    /// Writes self = t^k * q with q(0) != 0.
    fn strip_zero_roots(&self) -> (usize, Self) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, Self::new(self.coeffs[k..].to_vec()))
    }

    /// Characteristic polynomial det(t I - m) by Faddeev-LeVerrier.
    pub fn charpoly(m: &Matrix<Rational>) -> Self {
        assert!(m.is_square(), "charpoly of non-square matrix");
        let n = m.rows();
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let prev = coeffs[n - k + 1].clone();
            mk = &(m * &mk) + &Matrix::identity(n).scale(&prev);
            let am = m * &mk;
            coeffs[n - k] = -am.trace() / Rational::from_integer(BigInt::from(k));
        }
        Self::new(coeffs)
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coef = if a.is_one() && i > 0 { String::new() } else { format_rational(&a) };
            out.push_str(&coef);
            match i {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_in("t"))
    }
}

fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    while !seq.last().unwrap().is_zero() {
        let n = seq.len();
        let r = seq[n - 2].div_rem(&seq[n - 1]).unwrap().1;
        seq.push(r.scale(&-Rational::one()));
    }
    seq.pop();
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn var_at(seq: &[Poly], x: &Rational) -> usize {
    variations(seq.iter().map(|q| sign(&q.eval(x))))
}

fn var_pos_inf(seq: &[Poly]) -> usize {
    variations(seq.iter().map(|q| sign(&q.lead())))
}

fn var_neg_inf(seq: &[Poly]) -> usize {
    variations(seq.iter().map(|q| {
        let s = sign(&q.lead());
        if q.deg() % 2 == 1 {
            -s
        } else {
            s
        }
    }))
}

/// Root counts of a nonzero polynomial. Counts are with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SturmReport {
    pub degree: usize,
    pub positive_roots: usize,
    pub real_roots: usize,
    pub all_real: bool,
    pub all_positive: bool,
    pub squarefree: bool,
}

/// Distinct roots of a squarefree polynomial in (-inf, inf) and (0, inf).
fn distinct_counts(q: &Poly) -> (usize, usize) {
    if q.deg() == 0 {
        return (0, 0);
    }
    let (_, rest) = q.strip_zero_roots();
    let seq = sturm_sequence(q);
    let real = var_neg_inf(&seq) - var_pos_inf(&seq);
    let positive = if rest.deg() == 0 {
        0
    } else {
        let seq = sturm_sequence(&rest);
        var_at(&seq, &Rational::zero()) - var_pos_inf(&seq)
    };
    (real, positive)
}

pub fn sturm_positive_real_roots(p: &Poly) -> Result<SturmReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut real = 0;
    let mut positive = 0;
    for (i, f) in p.squarefree_decomposition().iter().enumerate() {
        let (r, pos) = distinct_counts(f);
        real += (i + 1) * r;
        positive += (i + 1) * pos;
    }
    let degree = p.deg();
    Ok(SturmReport {
        degree,
        positive_roots: positive,
        real_roots: real,
        all_real: real == degree,
        all_positive: positive == degree,
        squarefree: p.is_squarefree(),
    })
}

/// Distinct rational roots, ascending.
pub fn rational_roots(p: &Poly) -> Result<Vec<Rational>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = p.squarefree_part();
    if q.deg() == 0 {
        return Ok(Vec::new());
    }
    // Clear denominators into a primitive integer polynomial.
    let den = q
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = q
        .coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let n = ints.len() - 1;
    let lead = ints[n].abs();
    let zq = Poly::new(ints.iter().cloned().map(Rational::from_integer).collect());
    // Cauchy bound in units of 1/lead; rational roots are k/lead for integer k.
    let cauchy = ints[..n]
        .iter()
        .map(|c| Rational::new(c.abs(), lead.clone()))
        .max()
        .unwrap_or_else(Rational::zero)
        + Rational::one();
    let bound = (cauchy * Rational::from_integer(lead.clone())).ceil().to_integer() + 1;
    let scaled = ScaledPoly { q: zq.clone(), seq: sturm_sequence(&zq), lead: lead.clone() };
    let mut roots = Vec::new();
    scaled.isolate(-&bound - 1, bound, &mut roots);
    let lead = Rational::from_integer(lead);
    let mut out: Vec<Rational> = roots.into_iter().map(|k| Rational::from_integer(k) / &lead).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Squarefree polynomial searched on the grid `k / lead`.
struct ScaledPoly {
    q: Poly,
    seq: Vec<Poly>,
    lead: BigInt,
}

impl ScaledPoly {
    fn at(&self, k: &BigInt) -> Rational {
        Rational::new(k.clone(), self.lead.clone())
    }

    /// Grid points `k` in `(lo, hi]` with `q(k / lead) = 0`.
    fn isolate(&self, lo: BigInt, hi: BigInt, out: &mut Vec<BigInt>) {
        let count = var_at(&self.seq, &self.at(&lo)) - var_at(&self.seq, &self.at(&hi));
        if count == 0 {
            return;
        }
        if &hi - &lo == BigInt::one() {
            if self.q.eval(&self.at(&hi)).is_zero() {
                out.push(hi);
            }
            return;
        }
        let mid = (&lo + &hi).div_floor(&BigInt::from(2));
        self.isolate(lo, mid.clone(), out);
        self.isolate(mid, hi, out);
    }
}
