//! Witt classes over Q and F_p in canonical form, residue homomorphisms and
//! equality decisions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{legendre, p_adic_split, square_class, Place, Rational};
use crate::error::{Error, Result};
use crate::forms::{
    diagonalize, hasse_of_diagonal, invariants_of_diagonal, radical_split, relevant_places,
    symplectic_reduce, BilinearForm, Field, Symmetry,
};

/// Group-specific payload of a class in W(F_p).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "group")]
pub enum FpPayload {
    /// p = 2: W(F_2) = Z/2 by rank parity.
    #[serde(rename = "Z/2")]
    Z2 { rank_parity: u8 },
    /// p ≡ 3 mod 4: W(F_p) = Z/4 generated by ⟨1⟩.
    #[serde(rename = "Z/4")]
    Z4 { value: u8 },
    /// p ≡ 1 mod 4: W(F_p) = Z/2 × Z/2 by rank parity and discriminant.
    #[serde(rename = "Z/2xZ/2")]
    Z2xZ2 { rank_parity: u8, disc_is_residue: bool },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Case {
    Two,
    ThreeMod4,
    OneMod4,
}

fn case_of(p: &BigInt) -> Case {
    if p == &BigInt::from(2) {
        Case::Two
    } else if p.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        Case::ThreeMod4
    } else {
        Case::OneMod4
    }
}

/// Element of W(F_p).
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FpRepr", into = "FpRepr")]
pub struct WittClassFp {
    p: BigInt,
    payload: FpPayload,
}

#[derive(Serialize, Deserialize)]
struct FpRepr {
    #[serde(with = "crate::json::bigint")]
    p: BigInt,
    #[serde(flatten)]
    payload: FpPayload,
}

impl TryFrom<FpRepr> for WittClassFp {
    type Error = Error;
    fn try_from(r: FpRepr) -> Result<Self> {
        let zero = WittClassFp::zero(&r.p)?;
        let ok = matches!(
            (zero.payload, r.payload),
            (FpPayload::Z2 { .. }, FpPayload::Z2 { rank_parity: 0 | 1 })
                | (FpPayload::Z4 { .. }, FpPayload::Z4 { value: 0..=3 })
                | (FpPayload::Z2xZ2 { .. }, FpPayload::Z2xZ2 { rank_parity: 0 | 1, .. })
        );
        if !ok {
            return Err(Error::Parse(format!("payload {:?} does not describe W(F_{})", r.payload, r.p)));
        }
        Ok(WittClassFp { p: r.p, payload: r.payload })
    }
}

impl From<WittClassFp> for FpRepr {
    fn from(c: WittClassFp) -> Self {
        FpRepr { p: c.p, payload: c.payload }
    }
}

impl WittClassFp {
    pub fn zero(p: &BigInt) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p.clone()));
        }
        let payload = match case_of(p) {
            Case::Two => FpPayload::Z2 { rank_parity: 0 },
            Case::ThreeMod4 => FpPayload::Z4 { value: 0 },
            Case::OneMod4 => FpPayload::Z2xZ2 { rank_parity: 0, disc_is_residue: true },
        };
        Ok(WittClassFp { p: p.clone(), payload })
    }

    /// The class [⟨1⟩].
    pub fn one(p: &BigInt) -> Result<Self> {
        let z = Self::zero(p)?;
        Ok(z.add_unit(&BigInt::one()))
    }

    pub fn prime(&self) -> &BigInt {
        &self.p
    }

    pub fn payload(&self) -> FpPayload {
        self.payload
    }

    pub fn is_zero(&self) -> bool {
        matches!(
            self.payload,
            FpPayload::Z2 { rank_parity: 0 }
                | FpPayload::Z4 { value: 0 }
                | FpPayload::Z2xZ2 { rank_parity: 0, disc_is_residue: true }
        )
    }

    /// Adds the class of ⟨u⟩ for a unit `u` mod p.
    fn add_unit(&self, u: &BigInt) -> Self {
        let payload = match self.payload {
            FpPayload::Z2 { rank_parity } => FpPayload::Z2 { rank_parity: rank_parity ^ 1 },
            FpPayload::Z4 { value } => {
                let step = if legendre(u, &self.p) == 1 { 1 } else { 3 };
                FpPayload::Z4 { value: (value + step) % 4 }
            }
            FpPayload::Z2xZ2 { rank_parity, disc_is_residue } => FpPayload::Z2xZ2 {
                rank_parity: rank_parity ^ 1,
                disc_is_residue: disc_is_residue == (legendre(u, &self.p) == 1),
            },
        };
        WittClassFp { p: self.p.clone(), payload }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::FieldMismatch(format!("W(F_{}) vs W(F_{})", self.p, other.p)));
        }
        let payload = match (self.payload, other.payload) {
            (FpPayload::Z2 { rank_parity: a }, FpPayload::Z2 { rank_parity: b }) => {
                FpPayload::Z2 { rank_parity: a ^ b }
            }
            (FpPayload::Z4 { value: a }, FpPayload::Z4 { value: b }) => FpPayload::Z4 { value: (a + b) % 4 },
            (
                FpPayload::Z2xZ2 { rank_parity: a, disc_is_residue: x },
                FpPayload::Z2xZ2 { rank_parity: b, disc_is_residue: y },
            ) => FpPayload::Z2xZ2 { rank_parity: a ^ b, disc_is_residue: x == y },
            _ => unreachable!("payload case is determined by p"),
        };
        Ok(WittClassFp { p: self.p.clone(), payload })
    }

    pub fn neg(&self) -> Self {
        let payload = match self.payload {
            FpPayload::Z4 { value } => FpPayload::Z4 { value: (4 - value) % 4 },
            other => other,
        };
        WittClassFp { p: self.p.clone(), payload }
    }

    pub fn times(&self, n: i64) -> Self {
        let base = if n < 0 { self.neg() } else { self.clone() };
        let mut acc = Self::zero(&self.p).expect("prime");
        for _ in 0..n.unsigned_abs() {
            acc = acc.add(&base).expect("same prime");
        }
        acc
    }

    /// Additive order, found by repeated addition.
    pub fn order(&self) -> usize {
        let mut acc = self.clone();
        let mut n = 1;
        while !acc.is_zero() {
            acc = acc.add(self).expect("same prime");
            n += 1;
        }
        n
    }
}

impl fmt::Display for WittClassFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.payload {
            FpPayload::Z2 { rank_parity } => write!(f, "{rank_parity} in W(F_2) = Z/2"),
            FpPayload::Z4 { value } => write!(f, "{value}[<1>] in W(F_{}) = Z/4", self.p),
            FpPayload::Z2xZ2 { rank_parity, disc_is_residue } => write!(
                f,
                "(rank {} mod 2, disc {}) in W(F_{}) = Z/2 x Z/2",
                rank_parity,
                if disc_is_residue { "square" } else { "nonsquare" },
                self.p
            ),
        }
    }
}

/// Class in W(F_p) of the diagonal form with the given unit entries, p odd.
pub fn fp_class_of(entries: &[BigInt], p: &BigInt) -> Result<WittClassFp> {
    if p == &BigInt::from(2) {
        return Err(Error::UseRankParity);
    }
    let mut c = WittClassFp::zero(p)?;
    for a in entries {
        if a.mod_floor(p).is_zero() {
            return Err(Error::ZeroEntry(p.clone()));
        }
        c = c.add_unit(a);
    }
    Ok(c)
}

/// Class in W(F_p) of a nondegenerate form over an odd prime field.
pub fn fp_class_of_form(f: &BilinearForm) -> Result<WittClassFp> {
    let Field::PrimeField(p) = f.field() else {
        return Err(Error::FieldMismatch("expected a form over F_p".into()));
    };
    if f.symmetry() == Symmetry::Skew {
        symplectic_reduce(&radical_split(f).nondegenerate)?;
        return WittClassFp::zero(p);
    }
    let d = diagonalize(f)?;
    let units: Vec<BigInt> = d.entries.iter().map(|a| a.numer().clone()).collect();
    fp_class_of(&units, p)
}

/// Residue map ψ^k at p on a diagonal form: entries u·p^i with i ≡ k mod 2
/// contribute ⟨ū⟩, the others nothing. At p = 2 only the rank parity of the
/// contributing entries is recorded.
pub fn psi_of_diagonal(entries: &[Rational], p: &BigInt, k: u8) -> Result<WittClassFp> {
    if k > 1 {
        return Err(Error::InvalidArgument(format!("k must be 0 or 1, got {k}")));
    }
    let mut c = WittClassFp::zero(p)?;
    for a in entries {
        let s = p_adic_split(a, p)?;
        if s.valuation.rem_euclid(2) == i64::from(k) {
            c = c.add_unit(&s.unit_residue);
        }
    }
    Ok(c)
}

/// ψ^k of a symmetric form over Q; the form is diagonalized first and its
/// radical discarded.
pub fn psi(f: &BilinearForm, p: &BigInt, k: u8) -> Result<WittClassFp> {
    let entries = rational_diagonal(f)?;
    psi_of_diagonal(&entries, p, k)
}

fn rational_diagonal(f: &BilinearForm) -> Result<Vec<Rational>> {
    if !f.is_rational() {
        return Err(Error::FieldMismatch(format!("expected a form over Q, got {}", f.field())));
    }
    Ok(diagonalize(f)?.entries)
}

/// Element of W(Q): signature plus the nonzero second residues.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "QRepr", into = "QRepr")]
pub struct WittClassQ {
    signature: i64,
    residues: BTreeMap<BigInt, WittClassFp>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QRepr {
    signature: i64,
    residues: Vec<ResidueEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidueEntry {
    #[serde(with = "crate::json::bigint")]
    p: BigInt,
    class: FpPayload,
}

impl TryFrom<QRepr> for WittClassQ {
    type Error = Error;
    fn try_from(r: QRepr) -> Result<Self> {
        let mut residues = BTreeMap::new();
        for e in r.residues {
            let c = WittClassFp::try_from(FpRepr { p: e.p.clone(), payload: e.class })?;
            if c.is_zero() {
                return Err(Error::Parse(format!("zero residue stored at {}", e.p)));
            }
            if residues.insert(e.p.clone(), c).is_some() {
                return Err(Error::Parse(format!("duplicate residue at {}", e.p)));
            }
        }
        Ok(WittClassQ { signature: r.signature, residues })
    }
}

impl From<WittClassQ> for QRepr {
    fn from(c: WittClassQ) -> Self {
        QRepr {
            signature: c.signature,
            residues: c
                .residues
                .into_iter()
                .map(|(p, class)| ResidueEntry { p, class: class.payload })
                .collect(),
        }
    }
}

impl WittClassQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn signature(&self) -> i64 {
        self.signature
    }

    pub fn residues(&self) -> &BTreeMap<BigInt, WittClassFp> {
        &self.residues
    }

    /// Residue at `p`, zero when not stored.
    pub fn residue(&self, p: &BigInt) -> Result<WittClassFp> {
        match self.residues.get(p) {
            Some(c) => Ok(c.clone()),
            None => WittClassFp::zero(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signature == 0 && self.residues.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut residues = self.residues.clone();
        for (p, c) in &other.residues {
            let sum = match residues.get(p) {
                Some(a) => a.add(c).expect("same prime"),
                None => c.clone(),
            };
            if sum.is_zero() {
                residues.remove(p);
            } else {
                residues.insert(p.clone(), sum);
            }
        }
        WittClassQ { signature: self.signature + other.signature, residues }
    }

    pub fn neg(&self) -> Self {
        WittClassQ {
            signature: -self.signature,
            residues: self.residues.iter().map(|(p, c)| (p.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Canonical class of a diagonal form with nonzero entries.
    pub fn of_diagonal(entries: &[Rational]) -> Result<Self> {
        let mut signature = 0i64;
        let mut primes = std::collections::BTreeSet::new();
        for a in entries {
            if a.is_zero() {
                return Err(Error::Degenerate);
            }
            signature += if a.is_positive() { 1 } else { -1 };
            primes.extend(square_class(a)?.primes()?);
        }
        let mut residues = BTreeMap::new();
        for p in primes {
            let c = psi_of_diagonal(entries, &p, 1)?;
            if !c.is_zero() {
                residues.insert(p, c);
            }
        }
        Ok(WittClassQ { signature, residues })
    }
}

impl fmt::Display for WittClassQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "signature {}", self.signature)?;
        if self.residues.is_empty() {
            write!(f, ", no residues")
        } else {
            for c in self.residues.values() {
                write!(f, "; residue at {}: {}", c.p, c)?;
            }
            Ok(())
        }
    }
}

/// Class in W(Q) of a form over Q. Skew forms are certified to vanish by
/// symplectic reduction of their nondegenerate part.
pub fn witt_class_of(f: &BilinearForm) -> Result<WittClassQ> {
    if f.symmetry() == Symmetry::Skew {
        if !f.is_rational() {
            return Err(Error::FieldMismatch(format!("expected a form over Q, got {}", f.field())));
        }
        symplectic_reduce(&radical_split(f).nondegenerate)?;
        return Ok(WittClassQ::zero());
    }
    WittClassQ::of_diagonal(&rational_diagonal(f)?)
}

/// Decides [f] = [g] in W(Q) by Hasse-Minkowski: f ⊕ -g must be split,
/// i.e. of even rank 2r with the signature, discriminant and Hasse
/// invariants of r hyperbolic planes.
pub fn hasse_equivalent(f: &BilinearForm, g: &BilinearForm) -> Result<bool> {
    if f.symmetry() != g.symmetry() {
        return Err(Error::SymmetryMismatch("common"));
    }
    if f.symmetry() == Symmetry::Skew {
        return Ok(true);
    }
    let mut entries = rational_diagonal(f)?;
    entries.extend(rational_diagonal(g)?.into_iter().map(|a| -a));
    split_by_invariants(&entries)
}

/// Whether the diagonal form is hyperbolic, judged only by classical invariants.
pub fn split_by_invariants(entries: &[Rational]) -> Result<bool> {
    if entries.len() % 2 == 1 {
        return Ok(false);
    }
    let inv = invariants_of_diagonal(entries)?;
    let hyp: Vec<Rational> = (0..entries.len())
        .map(|i| if i % 2 == 0 { Rational::one() } else { -Rational::one() })
        .collect();
    let target = invariants_of_diagonal(&hyp)?;
    if inv.signature != target.signature || inv.discriminant != target.discriminant {
        return Ok(false);
    }
    let mut places = relevant_places(entries)?;
    places.insert(Place::Real);
    for place in places {
        if hasse_of_diagonal(entries, &place)? != target.hasse_at(&place) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Equality in W(Q), decided by both the residue oracle and the Hasse oracle.
pub fn equivalent(f: &BilinearForm, g: &BilinearForm) -> Result<bool> {
    let by_residues = witt_class_of(f)? == witt_class_of(g)?;
    let by_hasse = hasse_equivalent(f, g)?;
    if by_residues != by_hasse {
        return Err(Error::Inconsistent(format!(
            "residue oracle says {by_residues}, Hasse oracle says {by_hasse}"
        )));
    }
    Ok(by_residues)
}

/// Every element of W(F_p), generated from [⟨1⟩] and [⟨u⟩] for a nonresidue u.
pub fn fp_group_elements(p: &BigInt) -> Result<Vec<WittClassFp>> {
    let one = WittClassFp::one(p)?;
    let gens = if p == &BigInt::from(2) {
        vec![one]
    } else {
        let u = (2u64..)
            .map(BigInt::from)
            .find(|u| legendre(u, p) == -1)
            .expect("nonresidue exists");
        vec![one, fp_class_of(&[u], p)?]
    };
    let mut elems = vec![WittClassFp::zero(p)?];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for e in &frontier {
            for g in &gens {
                let s = e.add(g)?;
                if !elems.contains(&s) {
                    elems.push(s.clone());
                    next.push(s);
                }
            }
        }
        frontier = next;
    }
    elems.sort();
    Ok(elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn fp_examples() {
        let c = fp_class_of(&[b(1)], &b(3)).unwrap();
        assert_eq!(c.payload(), FpPayload::Z4 { value: 1 });
        assert_eq!(c.order(), 4);
        assert!(fp_class_of(&[b(1), b(1)], &b(5)).unwrap().is_zero());
        let c = fp_class_of(&[b(1), b(1)], &b(3)).unwrap();
        assert_eq!(c.payload(), FpPayload::Z4 { value: 2 });
        assert!(!c.is_zero());
        assert_eq!(fp_class_of(&[b(1)], &b(2)), Err(Error::UseRankParity));
        assert_eq!(fp_class_of(&[b(3)], &b(3)), Err(Error::ZeroEntry(b(3))));
    }

    #[test]
    fn psi_examples() {
        let c = psi_of_diagonal(&[int(-2)], &b(2), 1).unwrap();
        assert_eq!(c.payload(), FpPayload::Z2 { rank_parity: 1 });
        let c = psi_of_diagonal(&[int(-2)], &b(3), 0).unwrap();
        assert_eq!(c, WittClassFp::one(&b(3)).unwrap());
        for p in [3, 5, 7, 2] {
            assert!(psi_of_diagonal(&[int(p)], &b(p), 0).unwrap().is_zero());
        }
    }

    #[test]
    fn witt_class_examples() {
        let h = BilinearForm::hyperbolic(1);
        assert!(witt_class_of(&h).unwrap().is_zero());
        let c = witt_class_of(&BilinearForm::diagonal_ints(&[-2])).unwrap();
        assert_eq!(c.signature(), -1);
        assert!(!c.residue(&b(2)).unwrap().is_zero());
        let c = witt_class_of(&BilinearForm::diagonal_ints(&[1, 1])).unwrap();
        assert_eq!((c.signature(), c.residues().len()), (2, 0));
    }

    #[test]
    fn group_law_examples() {
        let a = witt_class_of(&BilinearForm::diagonal_ints(&[-2])).unwrap();
        let one = witt_class_of(&BilinearForm::diagonal_ints(&[1])).unwrap();
        assert!(!a.add(&one).is_zero());
        for x in [3, -7, 10, 12] {
            let p = witt_class_of(&BilinearForm::diagonal_ints(&[x])).unwrap();
            let n = witt_class_of(&BilinearForm::diagonal_ints(&[-x])).unwrap();
            assert!(p.add(&n).is_zero());
            assert_eq!(p.neg().neg(), p);
        }
    }

    #[test]
    fn both_oracles_agree_on_small_cases() {
        let f = BilinearForm::diagonal_ints(&[1, 1]);
        let g = BilinearForm::diagonal_ints(&[2, 2]);
        assert!(equivalent(&f, &g).unwrap());
        let f = BilinearForm::diagonal_ints(&[1]);
        let g = BilinearForm::diagonal_ints(&[3]);
        assert!(!equivalent(&f, &g).unwrap());
        let f = BilinearForm::hyperbolic(1);
        let g = BilinearForm::diagonal_ints(&[1, -1]);
        assert!(equivalent(&f, &g).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let c = witt_class_of(&BilinearForm::diagonal_ints(&[-2, 3, 5])).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: WittClassQ = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let c = witt_class_of(&BilinearForm::diagonal_ints(&[-2])).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"signature":-1,"residues":[{"p":2,"class":{"group":"Z/2","rank_parity":1}}]}"#
        );
        assert!(serde_json::from_str::<WittClassQ>(
            r#"{"signature":0,"residues":[{"p":3,"class":{"group":"Z/2","rank_parity":1}}]}"#
        )
        .is_err());
    }

    #[test]
    fn group_tables() {
        for (p, size, exp) in [(2, 2, 2), (3, 4, 4), (5, 4, 2), (7, 4, 4), (13, 4, 2)] {
            let elems = fp_group_elements(&b(p)).unwrap();
            assert_eq!(elems.len(), size);
            assert_eq!(elems.iter().map(WittClassFp::order).max().unwrap(), exp);
        }
    }
}
