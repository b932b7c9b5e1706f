//! ε-symmetric bilinear forms over Q and odd prime fields.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{hilbert_symbol, is_prime, square_class, Place, Rational, SquareClass};
use crate::error::{Error, Result};
use crate::linalg::{congruent, Matrix};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Skew,
}

impl Symmetry {
    pub fn sign(self) -> i32 {
        match self {
            Symmetry::Symmetric => 1,
            Symmetry::Skew => -1,
        }
    }

    pub fn from_sign(s: i32) -> Symmetry {
        if s >= 0 {
            Symmetry::Symmetric
        } else {
            Symmetry::Skew
        }
    }

    pub fn flip(self) -> Symmetry {
        Self::from_sign(-self.sign())
    }
}

/// Scalar field of a form. Only odd prime fields are materialized.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Field {
    Rational,
    PrimeField(BigInt),
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Field::Rational => s.serialize_str("Q"),
            Field::PrimeField(p) => {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("Fp", &JsonInt(p))?;
                m.end()
            }
        }
    }
}

struct JsonInt<'a>(&'a BigInt);

impl Serialize for JsonInt<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::bigint::serialize(self.0, s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        if v.as_str() == Some("Q") {
            return Ok(Field::Rational);
        }
        let p = v
            .as_object()
            .filter(|o| o.len() == 1)
            .and_then(|o| o.get("Fp"))
            .ok_or_else(|| D::Error::custom("field must be \"Q\" or {\"Fp\": p}"))?;
        crate::json::bigint::from_value(p)
            .map(Field::PrimeField)
            .map_err(D::Error::custom)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// Bilinear form given by its Gram matrix. Over F_p the entries are stored
/// as integers in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct BilinearForm {
    field: Field,
    symmetry: Symmetry,
    gram: Matrix<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormRepr {
    symmetry: Symmetry,
    #[serde(default = "default_field")]
    field: Field,
    #[serde(with = "crate::json::matrix")]
    gram: Matrix<Rational>,
}

fn default_field() -> Field {
    Field::Rational
}

impl TryFrom<FormRepr> for BilinearForm {
    type Error = Error;
    fn try_from(r: FormRepr) -> Result<Self> {
        BilinearForm::new(r.field, r.symmetry, r.gram)
    }
}

impl From<BilinearForm> for FormRepr {
    fn from(f: BilinearForm) -> Self {
        FormRepr { symmetry: f.symmetry, field: f.field, gram: f.gram }
    }
}

fn reduce_mod(a: &Rational, p: &BigInt) -> Result<Rational> {
    let inv = a
        .denom()
        .modinv(p)
        .ok_or_else(|| Error::FieldMismatch(format!("denominator of {a} vanishes mod {p}")))?;
    Ok(Rational::from_integer((a.numer() * inv).mod_floor(p)))
}

impl BilinearForm {
    pub fn new(field: Field, symmetry: Symmetry, gram: Matrix<Rational>) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension(format!(
                "gram matrix is {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        let gram = match &field {
            Field::Rational => gram,
            Field::PrimeField(p) => {
                if p == &BigInt::from(2) {
                    return Err(Error::UseRankParity);
                }
                if !is_prime(p) {
                    return Err(Error::NotPrime(p.clone()));
                }
                let mut g = gram;
                for i in 0..g.rows() {
                    for j in 0..g.cols() {
                        g[(i, j)] = reduce_mod(&g[(i, j)], p)?;
                    }
                }
                g
            }
        };
        let f = BilinearForm { field, symmetry, gram };
        let t = f.gram.transpose();
        let expected = match symmetry {
            Symmetry::Symmetric => t,
            Symmetry::Skew => f.reduce(&-t),
        };
        if f.gram != expected {
            return Err(Error::SymmetryMismatch(match symmetry {
                Symmetry::Symmetric => "+1",
                Symmetry::Skew => "-1",
            }));
        }
        Ok(f)
    }

    pub fn symmetric(gram: Matrix<Rational>) -> Result<Self> {
        Self::new(Field::Rational, Symmetry::Symmetric, gram)
    }

    pub fn skew(gram: Matrix<Rational>) -> Result<Self> {
        Self::new(Field::Rational, Symmetry::Skew, gram)
    }

    pub fn from_int_rows(symmetry: Symmetry, rows: &[&[i64]]) -> Result<Self> {
        let g = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        );
        Self::new(Field::Rational, symmetry, g)
    }

    /// The diagonal form ⟨a_1, ..., a_n⟩ over Q.
    pub fn diagonal(entries: &[Rational]) -> Self {
        BilinearForm {
            field: Field::Rational,
            symmetry: Symmetry::Symmetric,
            gram: Matrix::diagonal(entries),
        }
    }

    pub fn diagonal_ints(entries: &[i64]) -> Self {
        let e: Vec<Rational> = entries.iter().map(|&x| Rational::from_integer(x.into())).collect();
        Self::diagonal(&e)
    }

    /// The empty form of the given symmetry.
    pub fn empty(symmetry: Symmetry) -> Self {
        BilinearForm { field: Field::Rational, symmetry, gram: Matrix::zeros(0, 0) }
    }

    /// `n` copies of the hyperbolic plane [[0,1],[1,0]].
    pub fn hyperbolic(n: usize) -> Self {
        let h = Matrix::from_fn(2 * n, 2 * n, |i, j| {
            if i / 2 == j / 2 && i != j {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        BilinearForm { field: Field::Rational, symmetry: Symmetry::Symmetric, gram: h }
    }

    /// `n` copies of the standard symplectic plane [[0,1],[-1,0]].
    pub fn standard_symplectic(n: usize) -> Self {
        BilinearForm {
            field: Field::Rational,
            symmetry: Symmetry::Skew,
            gram: standard_symplectic_gram(n),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn gram(&self) -> &Matrix<Rational> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_rational(&self) -> bool {
        self.field == Field::Rational
    }

    fn reduce(&self, m: &Matrix<Rational>) -> Matrix<Rational> {
        match &self.field {
            Field::Rational => m.clone(),
            Field::PrimeField(p) => m.map(|a| reduce_mod(a, p).expect("integral entries")),
        }
    }

    fn with_gram(&self, gram: Matrix<Rational>) -> Self {
        BilinearForm { field: self.field.clone(), symmetry: self.symmetry, gram: self.reduce(&gram) }
    }

    pub fn value(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let g = &self.gram;
        let mut acc = Rational::zero();
        for i in 0..g.rows() {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..g.cols() {
                acc += &u[i] * &g[(i, j)] * &v[j];
            }
        }
        match &self.field {
            Field::Rational => acc,
            Field::PrimeField(p) => reduce_mod(&acc, p).expect("integral entries"),
        }
    }

    /// The form `P^T G P`.
    pub fn congruent(&self, p: &Matrix<Rational>) -> Self {
        self.with_gram(congruent(&self.gram, p))
    }

    /// Restriction to the span of the columns of `basis`.
    pub fn restrict(&self, basis: &Matrix<Rational>) -> Self {
        self.congruent(basis)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        if self.symmetry != other.symmetry {
            return Err(Error::SymmetryMismatch("common"));
        }
        Ok(self.with_gram(self.gram.block_diag(&other.gram)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.with_gram(self.gram.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn det(&self) -> Rational {
        let d = self.gram.det();
        match &self.field {
            Field::Rational => d,
            Field::PrimeField(p) => reduce_mod(&d, p).expect("integral entries"),
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det().is_zero()
    }

    fn ops(&self) -> Ops {
        match &self.field {
            Field::Rational => Ops::Q,
            Field::PrimeField(p) => Ops::Fp(p.clone()),
        }
    }
}

impl fmt::Display for BilinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram
            .to_rows()
            .iter()
            .map(|r| {
                let e: Vec<String> = r.iter().map(crate::arith::format_rational).collect();
                format!("[{}]", e.join(", "))
            })
            .collect();
        write!(f, "{} form over {}: [{}]", match self.symmetry {
            Symmetry::Symmetric => "symmetric",
            Symmetry::Skew => "skew",
        }, self.field, rows.join(", "))
    }
}

pub fn standard_symplectic_gram(n: usize) -> Matrix<Rational> {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if i / 2 != j / 2 || i == j {
            Rational::zero()
        } else if i < j {
            Rational::one()
        } else {
            -Rational::one()
        }
    })
}

/// Field operations on integral-or-rational scalars.
#[derive(Clone, Debug)]
enum Ops {
    Q,
    Fp(BigInt),
}

impl Ops {
    fn norm(&self, a: Rational) -> Rational {
        match self {
            Ops::Q => a,
            Ops::Fp(p) => reduce_mod(&a, p).expect("integral entries"),
        }
    }

    fn div(&self, a: &Rational, b: &Rational) -> Rational {
        match self {
            Ops::Q => a / b,
            Ops::Fp(p) => {
                let inv = b.numer().modinv(p).expect("nonzero divisor");
                Rational::from_integer((a.numer() * inv).mod_floor(p))
            }
        }
    }

    /// Right kernel basis (columns), by row reduction.
    fn kernel(&self, m: &Matrix<Rational>) -> Matrix<Rational> {
        if let Ops::Q = self {
            return m.kernel();
        }
        let mut r = m.clone();
        let (rows, cols) = (r.rows(), r.cols());
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..cols {
            if row == rows {
                break;
            }
            let Some(p) = (row..rows).find(|&i| !r[(i, c)].is_zero()) else {
                continue;
            };
            r.swap_rows(row, p);
            let piv = r[(row, c)].clone();
            for j in 0..cols {
                r[(row, j)] = self.div(&r[(row, j)], &piv);
            }
            for i in 0..rows {
                if i != row && !r[(i, c)].is_zero() {
                    let f = r[(i, c)].clone();
                    for j in 0..cols {
                        let v = &r[(i, j)] - &f * &r[(row, j)];
                        r[(i, j)] = self.norm(v);
                    }
                }
            }
            pivots.push(c);
            row += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                basis[(pc, k)] = self.norm(-r[(i, f)].clone());
            }
        }
        basis
    }
}

/// Result of symmetric Gaussian elimination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagonalization {
    #[serde(with = "crate::json::rational_vec")]
    pub entries: Vec<Rational>,
    pub radical_dim: usize,
    #[serde(with = "crate::json::matrix")]
    pub congruence: Matrix<Rational>,
}

impl Diagonalization {
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn diagonal_form(&self) -> BilinearForm {
        BilinearForm::diagonal(&self.entries)
    }
}

/// Symmetric Gaussian elimination. Pivots on the first nonzero diagonal
/// entry; when the remaining diagonal vanishes, the lexicographically first
/// nonzero off-diagonal `(i, j)` is repaired by adding basis vector `j` to
/// basis vector `i`. Over Q each congruence column is finally rescaled to a
/// primitive integer vector whose first nonzero coordinate is positive.
pub fn diagonalize(f: &BilinearForm) -> Result<Diagonalization> {
    if f.symmetry != Symmetry::Symmetric {
        return Err(Error::NotSymmetric);
    }
    let ops = f.ops();
    let n = f.dim();
    let mut m = f.gram.clone();
    let mut p = Matrix::<Rational>::identity(n);
    let mut rank = 0;
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[(i, i)].is_zero());
        let pivot = match pivot {
            Some(i) => i,
            None => {
                let pair = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[(i, j)].is_zero());
                let Some((i, j)) = pair else { break };
                add_basis(&ops, &mut m, &mut p, i, j, &Rational::one());
                i
            }
        };
        m.swap_rows(k, pivot);
        m.swap_cols(k, pivot);
        p.swap_cols(k, pivot);
        for j in k + 1..n {
            if !m[(k, j)].is_zero() {
                let c = ops.div(&m[(k, j)], &m[(k, k)]);
                add_basis(&ops, &mut m, &mut p, j, k, &-c);
            }
        }
        rank += 1;
    }
    if let Ops::Q = ops {
        for j in 0..n {
            normalize_column(&mut p, j);
        }
    }
    let d = match ops {
        Ops::Q => congruent(&f.gram, &p),
        Ops::Fp(_) => f.reduce(&congruent(&f.gram, &p)),
    };
    debug_assert!((0..n).all(|i| (0..n).all(|j| i == j || d[(i, j)].is_zero())));
    Ok(Diagonalization {
        entries: (0..rank).map(|i| d[(i, i)].clone()).collect(),
        radical_dim: n - rank,
        congruence: p,
    })
}

/// basis_i += c * basis_j, updating the Gram matrix by congruence.
fn add_basis(ops: &Ops, m: &mut Matrix<Rational>, p: &mut Matrix<Rational>, i: usize, j: usize, c: &Rational) {
    let n = m.rows();
    for r in 0..n {
        let v = &p[(r, i)] + c * &p[(r, j)];
        p[(r, i)] = ops.norm(v);
    }
    for col in 0..n {
        let v = &m[(i, col)] + c * &m[(j, col)];
        m[(i, col)] = ops.norm(v);
    }
    for row in 0..n {
        let v = &m[(row, i)] + c * &m[(row, j)];
        m[(row, i)] = ops.norm(v);
    }
}

fn normalize_column(p: &mut Matrix<Rational>, j: usize) {
    let col = p.col(j);
    let den = col.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    let ints: Vec<BigInt> = col.iter().map(|a| (a * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a));
    if g.is_zero() {
        return;
    }
    let lead_neg = ints.iter().find(|a| !a.is_zero()).is_some_and(|a| a.is_negative());
    let g = if lead_neg { -g } else { g };
    for (r, a) in ints.into_iter().enumerate() {
        p[(r, j)] = Rational::from_integer(a / &g);
    }
}

/// Classical invariants of a nondegenerate symmetric form over Q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormInvariants {
    pub rank: usize,
    pub signature: (usize, usize),
    pub discriminant: SquareClass,
    /// Places where the Hasse invariant is -1.
    pub hasse: BTreeMap<Place, i8>,
}

impl FormInvariants {
    pub fn signature_value(&self) -> i64 {
        self.signature.0 as i64 - self.signature.1 as i64
    }

    /// Hasse invariant at an arbitrary place; places outside the reported
    /// set carry +1.
    pub fn hasse_at(&self, place: &Place) -> i8 {
        self.hasse.get(place).copied().unwrap_or(1)
    }
}

fn require_rational_symmetric(f: &BilinearForm) -> Result<()> {
    if !f.is_rational() {
        return Err(Error::FieldMismatch(format!("expected a form over Q, got {}", f.field)));
    }
    if f.symmetry != Symmetry::Symmetric {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// Places where a diagonal form's Hasse invariant may differ from +1.
pub fn relevant_places(entries: &[Rational]) -> Result<BTreeSet<Place>> {
    let mut places = BTreeSet::from([Place::Real, Place::prime(2)]);
    for a in entries {
        for p in square_class(a)?.primes()? {
            places.insert(Place::Prime(p));
        }
    }
    Ok(places)
}

/// Hasse invariant ∏_{i<j} (a_i, a_j)_v of a diagonal form.
pub fn hasse_of_diagonal(entries: &[Rational], place: &Place) -> Result<i8> {
    let mut h = 1;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            h *= hilbert_symbol(&entries[i], &entries[j], place)?;
        }
    }
    Ok(h)
}

pub fn invariants_of_diagonal(entries: &[Rational]) -> Result<FormInvariants> {
    let plus = entries.iter().filter(|a| a.is_positive()).count();
    if entries.iter().any(Zero::is_zero) {
        return Err(Error::Degenerate);
    }
    let disc = square_class(&entries.iter().fold(Rational::one(), |acc, a| acc * a))?;
    let mut hasse = BTreeMap::new();
    for place in relevant_places(entries)? {
        if hasse_of_diagonal(entries, &place)? == -1 {
            hasse.insert(place, -1);
        }
    }
    Ok(FormInvariants {
        rank: entries.len(),
        signature: (plus, entries.len() - plus),
        discriminant: disc,
        hasse,
    })
}

pub fn invariants(f: &BilinearForm) -> Result<FormInvariants> {
    require_rational_symmetric(f)?;
    let d = diagonalize(f)?;
    if d.radical_dim > 0 {
        return Err(Error::Degenerate);
    }
    invariants_of_diagonal(&d.entries)
}

/// Nondegenerate part and radical of a form, exhibited by the basis change

/// Numbers of positive and negative entries of a diagonalization of a
/// rational symmetric form; no factoring is involved.
pub fn signature(f: &BilinearForm) -> Result<(usize, usize)> {
    if f.symmetry() != Symmetry::Symmetric || !f.is_rational() {
        return Err(Error::InvalidArgument("signature needs a rational symmetric form".into()));
    }
    let d = diagonalize(f)?;
    let plus = d.entries.iter().filter(|x| x.is_positive()).count();
    Ok((plus, d.entries.len() - plus))
}

/// `congruence = [C | K]` with `K` spanning the radical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalSplit {
    pub nondegenerate: BilinearForm,
    pub radical_dim: usize,
    pub congruence: Matrix<Rational>,
}

pub fn radical_split(f: &BilinearForm) -> RadicalSplit {
    let ops = f.ops();
    let k = ops.kernel(&f.gram);
    let n = f.dim();
    let c = complement_in(&ops, &k, n);
    let congruence = c.hstack(&k);
    RadicalSplit {
        nondegenerate: f.restrict(&c),
        radical_dim: k.cols(),
        congruence,
    }
}

/// Standard basis vectors completing the columns of `k` to a basis.
fn complement_in(ops: &Ops, k: &Matrix<Rational>, n: usize) -> Matrix<Rational> {
    let mut picked = Vec::new();
    let mut acc = k.clone();
    let mut rank = k.cols();
    for i in 0..n {
        if rank == n {
            break;
        }
        let mut e = Matrix::zeros(n, 1);
        e[(i, 0)] = Rational::one();
        let cand = acc.hstack(&e);
        if ops.kernel(&cand).cols() == 0 {
            acc = cand;
            rank += 1;
            picked.push(i);
        }
    }
    Matrix::identity(n).select_cols(&picked)
}

/// Congruence `P` with `P^T G P` the standard symplectic Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticReduction {
    pub hyperbolic_count: usize,
    #[serde(with = "crate::json::matrix")]
    pub congruence: Matrix<Rational>,
}

pub fn symplectic_reduce(f: &BilinearForm) -> Result<SymplecticReduction> {
    if f.symmetry != Symmetry::Skew {
        return Err(Error::NotSkew);
    }
    let n = f.dim();
    if n % 2 == 1 {
        return Err(Error::SkewDegenerate(format!("odd rank {n}")));
    }
    let ops = f.ops();
    let mut pool: Vec<Vec<Rational>> = Matrix::<Rational>::identity(n).columns();
    let mut out: Vec<Vec<Rational>> = Vec::with_capacity(n);
    while !pool.is_empty() {
        let e = pool.remove(0);
        let Some(idx) = pool.iter().position(|v| !f.value(&e, v).is_zero()) else {
            return Err(Error::SkewDegenerate(format!("vector {e:?} lies in the radical")));
        };
        let fv = pool.remove(idx);
        let w = f.value(&e, &fv);
        let fv: Vec<Rational> = fv.iter().map(|a| ops.div(a, &w)).collect();
        for v in pool.iter_mut() {
            let a = f.value(v, &fv);
            let b = f.value(v, &e);
            for i in 0..n {
                let x = &v[i] - &a * &e[i] + &b * &fv[i];
                v[i] = ops.norm(x);
            }
        }
        out.push(e);
        out.push(fv);
    }
    let p = Matrix::from_columns(n, &out);
    Ok(SymplecticReduction { hyperbolic_count: n / 2, congruence: p })
}

/// Block form [[0,0,I],[0,S,B],[I,B^T,A]] in the basis (x, y, z), with
/// `x` and `z` of size `r` and `y` of size `dim S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BlockRepr", into = "BlockRepr")]
pub struct BlockMetabolicForm {
    s: BilinearForm,
    a: Matrix<Rational>,
    b: Matrix<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockRepr {
    #[serde(rename = "S")]
    s: BilinearForm,
    #[serde(rename = "A", with = "crate::json::matrix")]
    a: Matrix<Rational>,
    #[serde(rename = "B", with = "crate::json::shaped_matrix")]
    b: Matrix<Rational>,
}

impl TryFrom<BlockRepr> for BlockMetabolicForm {
    type Error = Error;
    fn try_from(r: BlockRepr) -> Result<Self> {
        BlockMetabolicForm::new(r.s, r.a, r.b)
    }
}

impl From<BlockMetabolicForm> for BlockRepr {
    fn from(m: BlockMetabolicForm) -> Self {
        BlockRepr { s: m.s, a: m.a, b: m.b }
    }
}

/// One elementary congruence E = I + α e_p e_q^T, acting by G ↦ E^T G E.
/// Its effect is `basis_q += α basis_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryCongruence {
    #[serde(with = "crate::json::rational")]
    pub alpha: Rational,
    pub p: usize,
    pub q: usize,
}

impl ElementaryCongruence {
    pub fn matrix(&self, n: usize) -> Matrix<Rational> {
        let mut e = Matrix::identity(n);
        e[(self.p, self.q)] += &self.alpha;
        e
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetabolicReduction {
    pub core: BilinearForm,
    pub hyperbolic_count: usize,
    pub steps: Vec<ElementaryCongruence>,
}

impl BlockMetabolicForm {
    pub fn new(s: BilinearForm, a: Matrix<Rational>, b: Matrix<Rational>) -> Result<Self> {
        require_rational_symmetric(&s)?;
        let k = s.dim();
        let r = a.rows();
        if !a.is_square() {
            return Err(Error::Dimension(format!("A is {}x{}", a.rows(), a.cols())));
        }
        if b.rows() != k || b.cols() != r {
            return Err(Error::Dimension(format!(
                "B is {}x{}, expected {k}x{r}",
                b.rows(),
                b.cols()
            )));
        }
        if !a.is_symmetric() {
            return Err(Error::SymmetryMismatch("+1"));
        }
        if !s.is_nondegenerate() {
            return Err(Error::Degenerate);
        }
        Ok(BlockMetabolicForm { s, a, b })
    }

    pub fn core(&self) -> &BilinearForm {
        &self.s
    }

    pub fn isotropic_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn assemble(&self) -> BilinearForm {
        let (r, k) = (self.a.rows(), self.s.dim());
        let n = 2 * r + k;
        let g = Matrix::from_fn(n, n, |i, j| {
            let block = |t: usize| if t < r { 0 } else if t < r + k { 1 } else { 2 };
            let (bi, bj) = (block(i), block(j));
            let (li, lj) = (i - [0, r, r + k][bi], j - [0, r, r + k][bj]);
            match (bi, bj) {
                (0, 2) | (2, 0) if li == lj => Rational::one(),
                (1, 1) => self.s.gram()[(li, lj)].clone(),
                (1, 2) => self.b[(li, lj)].clone(),
                (2, 1) => self.b[(lj, li)].clone(),
                (2, 2) => self.a[(li, lj)].clone(),
                _ => Rational::zero(),
            }
        });
        BilinearForm { field: Field::Rational, symmetry: Symmetry::Symmetric, gram: g }
    }
}

/// Clears `B` and then `A` by elementary congruences, leaving
/// [[0,0,I],[0,S,0],[I,0,0]].
pub fn metabolic_reduce(m: &BlockMetabolicForm) -> Result<MetabolicReduction> {
    let (r, k) = (m.a.rows(), m.s.dim());
    let (x, y, z) = (0, r, r + k);
    let mut steps = Vec::new();
    for i in 0..k {
        for j in 0..r {
            if !m.b[(i, j)].is_zero() {
                steps.push(ElementaryCongruence { alpha: -m.b[(i, j)].clone(), p: x + j, q: y + i });
            }
        }
    }
    let two = Rational::from_integer(BigInt::from(2));
    for j in 0..r {
        for l in j..r {
            let a = &m.a[(j, l)];
            if a.is_zero() {
                continue;
            }
            let alpha = if l == j { -a / &two } else { -a.clone() };
            steps.push(ElementaryCongruence { alpha, p: x + l, q: z + j });
        }
    }
    let red = MetabolicReduction { core: m.s.clone(), hyperbolic_count: r, steps };
    if !replay(m, &red) {
        return Err(Error::Inconsistent("metabolic reduction failed to replay".into()));
    }
    Ok(red)
}

/// Applies the recorded congruences to the assembled form and checks that
/// the result is [[0,0,I],[0,S,0],[I,0,0]].
pub fn replay(m: &BlockMetabolicForm, red: &MetabolicReduction) -> bool {
    let mut g = m.assemble().gram().clone();
    let n = g.rows();
    for step in &red.steps {
        if step.p >= n || step.q >= n || step.p == step.q {
            return false;
        }
        g = congruent(&g, &step.matrix(n));
    }
    let cleared = BlockMetabolicForm {
        s: red.core.clone(),
        a: Matrix::zeros(red.hyperbolic_count, red.hyperbolic_count),
        b: Matrix::zeros(red.core.dim(), red.hyperbolic_count),
    };
    red.hyperbolic_count == m.a.rows() && &g == cleared.assemble().gram()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn sym(rows: &[&[i64]]) -> BilinearForm {
        BilinearForm::from_int_rows(Symmetry::Symmetric, rows).unwrap()
    }

    fn check_diag(f: &BilinearForm, d: &Diagonalization) {
        let g = congruent(f.gram(), &d.congruence);
        let mut expected = d.entries.clone();
        expected.resize(f.dim(), Rational::zero());
        assert_eq!(g, Matrix::diagonal(&expected));
        assert!(d.congruence.det() != Rational::zero());
    }

    #[test]
    fn diagonalize_examples() {
        let f = sym(&[&[5]]);
        let d = diagonalize(&f).unwrap();
        assert_eq!((d.entries.clone(), d.congruence.clone()), (vec![int(5)], Matrix::identity(1)));

        let f = sym(&[&[0, 1], &[1, 0]]);
        let d = diagonalize(&f).unwrap();
        assert_eq!(d.entries, vec![int(2), int(-2)]);
        assert_eq!(d.congruence.columns(), vec![vec![int(1), int(1)], vec![int(1), int(-1)]]);
        check_diag(&f, &d);

        let f = sym(&[&[1, 2], &[2, 1]]);
        let d = diagonalize(&f).unwrap();
        assert_eq!(d.entries, vec![int(1), int(-3)]);
        check_diag(&f, &d);

        let skew = BilinearForm::from_int_rows(Symmetry::Skew, &[&[0, 1], &[-1, 0]]).unwrap();
        assert_eq!(diagonalize(&skew), Err(Error::NotSymmetric));
    }

    #[test]
    fn diagonalize_with_radical_and_mod_p() {
        let f = sym(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 0]]);
        let d = diagonalize(&f).unwrap();
        assert_eq!((d.rank(), d.radical_dim), (1, 2));
        check_diag(&f, &d);

        let g = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        let f = BilinearForm::new(Field::PrimeField(BigInt::from(5)), Symmetry::Symmetric, g).unwrap();
        let d = diagonalize(&f).unwrap();
        assert_eq!(d.entries, vec![int(2), int(2)]);
    }

    #[test]
    fn invariants_examples() {
        let inv = invariants(&BilinearForm::diagonal_ints(&[1, 1])).unwrap();
        assert_eq!((inv.rank, inv.signature), (2, (2, 0)));
        assert_eq!(inv.discriminant, SquareClass::one());
        assert!(inv.hasse.values().all(|&h| h == 1));

        let inv = invariants(&BilinearForm::diagonal_ints(&[-2])).unwrap();
        assert_eq!((inv.signature, inv.discriminant.representative().clone()), ((0, 1), BigInt::from(-2)));
        assert!(inv.hasse.values().all(|&h| h == 1));

        let inv = invariants(&BilinearForm::diagonal_ints(&[3, 3])).unwrap();
        assert_eq!(inv.discriminant, SquareClass::one());
        assert_eq!(inv.hasse_at(&Place::prime(3)), -1);

        assert_eq!(invariants(&sym(&[&[1, 0], &[0, 0]])), Err(Error::Degenerate));
    }

    #[test]
    fn radical_split_examples() {
        let r = radical_split(&sym(&[&[0, 0], &[0, 0]]));
        assert_eq!((r.nondegenerate.dim(), r.radical_dim), (0, 2));
        let r = radical_split(&sym(&[&[1, 0], &[0, 0]]));
        assert_eq!((r.nondegenerate.gram().clone(), r.radical_dim), (Matrix::diagonal(&[int(1)]), 1));
        let f = sym(&[&[1, 1], &[1, 1]]);
        let r = radical_split(&f);
        assert_eq!((r.nondegenerate.gram().clone(), r.radical_dim), (Matrix::diagonal(&[int(1)]), 1));
        let g = congruent(f.gram(), &r.congruence);
        assert_eq!(g, Matrix::diagonal(&[int(1), int(0)]));
    }

    #[test]
    fn symplectic_examples() {
        for rows in [&[&[0i64, 1][..], &[-1, 0]][..], &[&[0, 2], &[-2, 0]]] {
            let f = BilinearForm::from_int_rows(Symmetry::Skew, rows).unwrap();
            let r = symplectic_reduce(&f).unwrap();
            assert_eq!(r.hyperbolic_count, 1);
            assert_eq!(congruent(f.gram(), &r.congruence), standard_symplectic_gram(1));
        }
        let f = BilinearForm::from_int_rows(
            Symmetry::Skew,
            &[&[0, 3, -1, 2], &[-3, 0, 5, 1], &[1, -5, 0, 4], &[-2, -1, -4, 0]],
        )
        .unwrap();
        let r = symplectic_reduce(&f).unwrap();
        assert_eq!(r.hyperbolic_count, 2);
        assert_eq!(congruent(f.gram(), &r.congruence), standard_symplectic_gram(2));
        let odd = BilinearForm::from_int_rows(Symmetry::Skew, &[&[0]]).unwrap();
        assert!(matches!(symplectic_reduce(&odd), Err(Error::SkewDegenerate(_))));
    }

    #[test]
    fn metabolic_examples() {
        let s = BilinearForm::diagonal_ints(&[1]);
        let m = BlockMetabolicForm::new(s.clone(), Matrix::zeros(1, 1), Matrix::zeros(1, 1)).unwrap();
        let red = metabolic_reduce(&m).unwrap();
        assert_eq!((red.core.clone(), red.hyperbolic_count, red.steps.len()), (s.clone(), 1, 0));

        let m = BlockMetabolicForm::new(
            s.clone(),
            Matrix::diagonal(&[int(4)]),
            Matrix::diagonal(&[int(2)]),
        )
        .unwrap();
        let red = metabolic_reduce(&m).unwrap();
        assert_eq!((red.core.clone(), red.hyperbolic_count), (s, 1));
        assert!(replay(&m, &red));
        let mut broken = red.clone();
        broken.steps[0].alpha += rat(1, 3);
        assert!(!replay(&m, &broken));
        assert!(BlockMetabolicForm::new(
            BilinearForm::diagonal_ints(&[1]),
            Matrix::zeros(1, 1),
            Matrix::zeros(2, 1)
        )
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = sym(&[&[1, 2], &[2, 1]]).scale(&rat(1, 3));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"symmetry":"symmetric","field":"Q","gram":[["1/3","2/3"],["2/3","1/3"]]}"#);
        assert_eq!(serde_json::from_str::<BilinearForm>(&s).unwrap(), f);
        let fp: BilinearForm =
            serde_json::from_str(r#"{"symmetry":"symmetric","field":{"Fp":7},"gram":[[8,"1/2"],["1/2",-1]]}"#).unwrap();
        assert_eq!(fp.gram()[(0, 1)], int(4));
        assert_eq!(serde_json::to_string(fp.field()).unwrap(), r#"{"Fp":7}"#);
        assert!(serde_json::from_str::<BilinearForm>(r#"{"symmetry":"skew","gram":[[1]]}"#).is_err());
    }
}
