//! Exact polarizable Hodge structures of finite dimension at a point.
//!
//! The complexified space is described by bases of the `(p, q)` pieces with
//! entries in Q(i); the real structure is the standard Q^n.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{format_rational, Rational};
use crate::cobordism::CobordismClass;
use crate::error::{Error, Result};
use crate::forms::{signature, symplectic_reduce, BilinearForm, Field, Symmetry};
use crate::genus::epsilon;
use crate::linalg::Matrix;
use crate::poly::{rational_roots, sturm_positive_real_roots, Poly, SturmReport};
use crate::witt::{equivalent, witt_class_of};

pub type Gaussian = Complex<Rational>;

pub fn gaussian(re: Rational, im: Rational) -> Gaussian {
    Complex::new(re, im)
}

fn real(x: &Rational) -> Gaussian {
    Complex::new(x.clone(), Rational::zero())
}

fn i_pow(k: i32) -> Gaussian {
    match k.rem_euclid(4) {
        0 => real(&Rational::one()),
        1 => gaussian(Rational::zero(), Rational::one()),
        2 => real(&-Rational::one()),
        _ => gaussian(Rational::zero(), -Rational::one()),
    }
}

fn complexify(m: &Matrix<Rational>) -> Matrix<Gaussian> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| real(&m[(i, j)]))
}

fn conj(m: &Matrix<Gaussian>) -> Matrix<Gaussian> {
    m.map(|z| z.conj())
}

fn same_span(a: &Matrix<Gaussian>, b: &Matrix<Gaussian>) -> bool {
    a.cols() == b.cols() && a.rank() == a.cols() && a.spans(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgePiece {
    pub p: i32,
    pub q: i32,
    /// Basis vectors as columns.
    pub basis: Matrix<Gaussian>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeStructure {
    weight: i32,
    dim: usize,
    pieces: Vec<HodgePiece>,
}

impl HodgeStructure {
    pub fn new(weight: i32, dim: usize, mut pieces: Vec<HodgePiece>) -> Result<Self> {
        pieces.retain(|pc| pc.basis.cols() > 0);
        pieces.sort_by_key(|pc| std::cmp::Reverse(pc.p));
        let mut seen = BTreeMap::new();
        for pc in &pieces {
            if pc.p + pc.q != weight {
                return Err(Error::InvalidHodge(format!(
                    "piece ({}, {}) does not have weight {weight}",
                    pc.p, pc.q
                )));
            }
            if pc.basis.rows() != dim {
                return Err(Error::InvalidHodge(format!(
                    "piece ({}, {}) has vectors of length {}, expected {dim}",
                    pc.p,
                    pc.q,
                    pc.basis.rows()
                )));
            }
            if seen.insert(pc.p, pc).is_some() {
                return Err(Error::InvalidHodge(format!("piece ({}, {}) listed twice", pc.p, pc.q)));
            }
        }
        let total: usize = pieces.iter().map(|pc| pc.basis.cols()).sum();
        let all = Self::stack(dim, &pieces);
        if total != dim || all.rank() != dim {
            return Err(Error::InvalidHodge(format!(
                "pieces span a space of dimension {} with {total} vectors, expected a basis of dimension {dim}",
                all.rank()
            )));
        }
        for pc in &pieces {
            let mirrored = seen.get(&pc.q).map(|m| &m.basis);
            let ok = mirrored.is_some_and(|m| same_span(m, &conj(&pc.basis)));
            if !ok {
                return Err(Error::InvalidHodge(format!(
                    "conjugate of piece ({}, {}) does not span piece ({}, {})",
                    pc.p, pc.q, pc.q, pc.p
                )));
            }
        }
        Ok(HodgeStructure { weight, dim, pieces })
    }

    fn stack(dim: usize, pieces: &[HodgePiece]) -> Matrix<Gaussian> {
        pieces
            .iter()
            .fold(Matrix::zeros(dim, 0), |acc, pc| acc.hstack(&pc.basis))
    }

    /// Pure structure of type (w/2, w/2) on Q^n.
    pub fn pure_middle(weight: i32, dim: usize) -> Result<Self> {
        if weight % 2 != 0 {
            return Err(Error::InvalidHodge("a pure (p, p) structure needs even weight".into()));
        }
        Self::new(
            weight,
            dim,
            vec![HodgePiece { p: weight / 2, q: weight / 2, basis: complexify(&Matrix::identity(dim)) }],
        )
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[HodgePiece] {
        &self.pieces
    }

    pub fn hodge_numbers(&self) -> BTreeMap<(i32, i32), usize> {
        self.pieces.iter().map(|pc| ((pc.p, pc.q), pc.basis.cols())).collect()
    }

    /// Transport along `x = P y`: the same structure in coordinates `y`.
    pub fn change_basis(&self, p: &Matrix<Rational>) -> Result<Self> {
        let inv = p
            .inverse()
            .ok_or_else(|| Error::InvalidArgument("basis change is singular".into()))?;
        let inv = complexify(&inv);
        let pieces = self
            .pieces
            .iter()
            .map(|pc| HodgePiece { p: pc.p, q: pc.q, basis: &inv * &pc.basis })
            .collect();
        Self::new(self.weight, self.dim, pieces)
    }

    /// Whether a rational endomorphism preserves every piece.
    pub fn is_endomorphism(&self, phi: &Matrix<Rational>) -> bool {
        let phi = complexify(phi);
        self.pieces.iter().all(|pc| pc.basis.spans(&(&phi * &pc.basis)))
    }
}

/// The Weil operator `C`, acting by `i^{p-q}` on `H^{p,q}`; real, with `C^2 = (-1)^w`.
pub fn weil_operator(h: &HodgeStructure) -> Result<Matrix<Rational>> {
    let b = HodgeStructure::stack(h.dim, &h.pieces);
    let eig: Vec<Gaussian> = h
        .pieces
        .iter()
        .flat_map(|pc| std::iter::repeat(i_pow(pc.p - pc.q)).take(pc.basis.cols()))
        .collect();
    let binv = b
        .inverse()
        .ok_or_else(|| Error::InvalidHodge("pieces are not a basis".into()))?;
    let c = &(&b * &Matrix::diagonal(&eig)) * &binv;
    if (0..c.rows()).any(|i| (0..c.cols()).any(|j| !c[(i, j)].im.is_zero())) {
        return Err(Error::InvalidHodge("Weil operator is not real".into()));
    }
    let c = Matrix::from_fn(c.rows(), c.cols(), |i, j| c[(i, j)].re.clone());
    let sign = if h.weight % 2 == 0 { Rational::one() } else { -Rational::one() };
    if &c * &c != Matrix::identity(h.dim).scale(&sign) {
        return Err(Error::InvalidHodge("Weil operator does not square to (-1)^w".into()));
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: if passed { String::new() } else { detail.into() } }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub is_polarization: bool,
    pub checks: Vec<Check>,
    /// Gram matrix of `S_C(u, v) = S(u, C v)`.
    #[serde(with = "crate::json::matrix")]
    pub s_c: Matrix<Rational>,
    #[serde(with = "crate::json::rational_vec")]
    pub leading_minors: Vec<Rational>,
}

pub fn polarization_symmetry(weight: i32) -> Symmetry {
    if weight % 2 == 0 {
        Symmetry::Symmetric
    } else {
        Symmetry::Skew
    }
}

pub fn is_polarization(h: &HodgeStructure, s: &BilinearForm) -> Result<PolarizationReport> {
    if s.field() != &Field::Rational {
        return Err(Error::FieldMismatch("polarizations are rational forms".into()));
    }
    if s.dim() != h.dim() {
        return Err(Error::Dimension(format!(
            "form has dimension {}, Hodge structure {}",
            s.dim(),
            h.dim()
        )));
    }
    let c = weil_operator(h)?;
    let mut checks = Vec::new();
    let want = polarization_symmetry(h.weight);
    checks.push(check(
        "(-1)^w-symmetric",
        s.symmetry() == want,
        format!("weight {} needs a {want:?} form", h.weight),
    ));
    let g = complexify(s.gram());
    let mut bad = None;
    for a in h.pieces() {
        for b in h.pieces() {
            if b.p != h.weight - a.p && bad.is_none() {
                let block = &(&a.basis.transpose() * &g) * &b.basis;
                if !block.is_zero() {
                    bad = Some(((a.p, a.q), (b.p, b.q)));
                }
            }
        }
    }
    checks.push(check(
        "pieces orthogonal unless p' = w - p",
        bad.is_none(),
        format!("S pairs {:?} with {:?}", bad.map(|x| x.0), bad.map(|x| x.1)),
    ));
    checks.push(check("nondegenerate", s.is_nondegenerate(), "det S = 0"));
    let s_c = s.gram() * &c;
    checks.push(check("S_C symmetric", s_c.is_symmetric(), "S(u, Cv) != S(v, Cu)"));
    let minors = s_c.leading_minors();
    let positive = minors.iter().all(|m| m.is_positive());
    checks.push(check(
        "S_C positive definite",
        positive,
        format!(
            "leading minors {:?}",
            minors.iter().map(format_rational).collect::<Vec<_>>()
        ),
    ));
    Ok(PolarizationReport {
        is_polarization: checks.iter().all(|c| c.passed),
        checks,
        s_c,
        leading_minors: minors,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eigenspace {
    #[serde(with = "crate::json::rational")]
    pub eigenvalue: Rational,
    #[serde(with = "crate::json::matrix")]
    pub basis: Matrix<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationComparison {
    /// Endomorphism with `S'(u, v) = S(φ u, v)`.
    #[serde(with = "crate::json::matrix")]
    pub phi: Matrix<Rational>,
    pub charpoly: Poly,
    pub sturm: SturmReport,
    /// The squarefree part of the characteristic polynomial annihilates `φ`.
    pub semisimple: bool,
    pub identity_chain: bool,
    pub hodge_endomorphism: bool,
    /// Present when the characteristic polynomial splits over Q.
    pub eigenspaces: Option<Vec<Eigenspace>>,
    pub eigenspaces_orthogonal: Option<bool>,
    pub signature_s: (usize, usize),
    pub signature_s_prime: (usize, usize),
    pub signatures_equal: bool,
    /// Equality of the classes over Q, which may fail even when the real classes agree.
    pub rational_classes_equal: Option<bool>,
    pub holds: bool,
}

pub fn compare_polarizations(
    h: &HodgeStructure,
    s: &BilinearForm,
    s2: &BilinearForm,
) -> Result<PolarizationComparison> {
    compare_polarizations_with(h, s, s2, false)
}

/// As [`compare_polarizations`], optionally also deciding whether the two
/// forms agree in W(Q), which needs factoring of their discriminants.
pub fn compare_polarizations_with(
    h: &HodgeStructure,
    s: &BilinearForm,
    s2: &BilinearForm,
    rational_classes: bool,
) -> Result<PolarizationComparison> {
    for (name, f) in [("S", s), ("S'", s2)] {
        let r = is_polarization(h, f)?;
        if let Some(c) = r.checks.iter().find(|c| !c.passed) {
            return Err(Error::NotPolarization(format!("{name}: {} ({})", c.name, c.detail)));
        }
    }
    let st_inv = s
        .gram()
        .transpose()
        .inverse()
        .ok_or(Error::Degenerate)?;
    let phi = &st_inv * &s2.gram().transpose();
    let c = weil_operator(h)?;
    let sg = s.gram();
    let m1 = &(&phi.transpose() * sg) * &c;
    let m2 = s2.gram() * &c;
    let m3 = m2.transpose();
    let m4 = m1.transpose();
    let m5 = &(sg * &c) * &phi;
    let identity_chain = m1 == m2 && m2 == m3 && m3 == m4 && m4 == m5 && &phi.transpose() * sg == *s2.gram();

    let charpoly = Poly::charpoly(&phi);
    let sturm = sturm_positive_real_roots(&charpoly)?;
    let sqfree = charpoly.squarefree_part();
    let semisimple = sqfree.eval_matrix(&phi).is_zero();

    let roots = rational_roots(&charpoly)?;
    let split = roots.len() == sqfree.degree().unwrap_or(0) && sqfree.degree().is_some();
    let (eigenspaces, eigenspaces_orthogonal) = if split && semisimple {
        let spaces: Vec<Eigenspace> = roots
            .iter()
            .map(|a| Eigenspace {
                eigenvalue: a.clone(),
                basis: (&phi - &Matrix::identity(h.dim()).scale(a)).kernel(),
            })
            .collect();
        let mut orth = true;
        for (i, a) in spaces.iter().enumerate() {
            for b in &spaces[i + 1..] {
                orth &= (&(&a.basis.transpose() * sg) * &b.basis).is_zero();
            }
        }
        (Some(spaces), Some(orth))
    } else {
        (None, None)
    };

    let (sig1, sig2, rational_classes_equal) = match s.symmetry() {
        Symmetry::Symmetric => (
            signature(s)?,
            signature(s2)?,
            if rational_classes { Some(equivalent(s, s2)?) } else { None },
        ),
        Symmetry::Skew => ((0, 0), (0, 0), None),
    };
    let signatures_equal = sig1 == sig2;
    let holds = sturm.all_real
        && sturm.all_positive
        && semisimple
        && identity_chain
        && signatures_equal
        && eigenspaces_orthogonal.unwrap_or(true);
    Ok(PolarizationComparison {
        hodge_endomorphism: h.is_endomorphism(&phi),
        phi,
        charpoly,
        sturm,
        semisimple,
        identity_chain,
        eigenspaces,
        eigenspaces_orthogonal,
        signature_s: sig1,
        signature_s_prime: sig2,
        signatures_equal,
        rational_classes_equal,
        holds,
    })
}

/// Class of the polarized structure with the normalizing sign `ε_w`:
/// the Witt class of `ε_w S` for even weight, zero for odd weight.
pub fn pol_class(h: &HodgeStructure, s: &BilinearForm) -> Result<CobordismClass> {
    let r = is_polarization(h, s)?;
    if let Some(c) = r.checks.iter().find(|c| !c.passed) {
        return Err(Error::NotPolarization(format!("{} ({})", c.name, c.detail)));
    }
    match s.symmetry() {
        Symmetry::Symmetric => {
            let e = Rational::from_integer(epsilon(h.weight() as i64).into());
            Ok(CobordismClass::Symmetric { class: witt_class_of(&s.scale(&e))? })
        }
        Symmetry::Skew => {
            let red = symplectic_reduce(s)?;
            Ok(CobordismClass::Skew { hyperbolic_pairs: red.hyperbolic_count, certificate: red.congruence })
        }
    }
}

fn gaussian_to_value(z: &Gaussian) -> Value {
    Value::Array(vec![
        Value::String(format_rational(&z.re)),
        Value::String(format_rational(&z.im)),
    ])
}

fn gaussian_from_value(v: &Value) -> std::result::Result<Gaussian, String> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(gaussian(
            crate::json::rational_from_value(&pair[0])?,
            crate::json::rational_from_value(&pair[1])?,
        )),
        Value::Array(_) => Err("expected a [re, im] pair".into()),
        other => crate::json::rational_from_value(other).map(|x| real(&x)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceRepr {
    p: i32,
    q: i32,
    basis: Vec<Vec<Value>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HodgeRepr {
    weight: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    pieces: Vec<PieceRepr>,
}

impl Serialize for HodgeStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HodgeRepr {
            weight: self.weight,
            dim: Some(self.dim),
            pieces: self
                .pieces
                .iter()
                .map(|pc| PieceRepr {
                    p: pc.p,
                    q: pc.q,
                    basis: pc.basis.columns().iter().map(|v| v.iter().map(gaussian_to_value).collect()).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HodgeStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = HodgeRepr::deserialize(d)?;
        let dim = match r.dim {
            Some(n) => n,
            None => r
                .pieces
                .iter()
                .flat_map(|pc| pc.basis.first())
                .map(Vec::len)
                .next()
                .unwrap_or(0),
        };
        let mut pieces = Vec::new();
        for pc in r.pieces {
            let mut cols = Vec::new();
            for (k, v) in pc.basis.iter().enumerate() {
                let col = v
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        gaussian_from_value(x)
                            .map_err(|e| D::Error::custom(format!("piece ({}, {}) vector {k} entry {j}: {e}", pc.p, pc.q)))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                if col.len() != dim {
                    return Err(D::Error::custom(format!(
                        "piece ({}, {}) vector {k} has length {}, expected {dim}",
                        pc.p,
                        pc.q,
                        col.len()
                    )));
                }
                cols.push(col);
            }
            pieces.push(HodgePiece { p: pc.p, q: pc.q, basis: Matrix::from_columns(dim, &cols) });
        }
        HodgeStructure::new(r.weight, dim, pieces).map_err(D::Error::custom)
    }
}

pub mod fixtures {
    //! Random polarized Hodge structures with a second polarization.

    use rand::Rng;

    use super::*;

    /// One orthogonal summand of an adapted real basis: `(p, q)` with `p >= q`.
    fn block(weight: i32, p: i32, scale: i64) -> (Vec<HodgePiece>, Matrix<Rational>, Matrix<Rational>, usize) {
        let q = weight - p;
        let d = p - q;
        let r = |x: i64| Rational::from_integer(x.into());
        if d == 0 {
            let basis = Matrix::from_rows(vec![vec![real(&r(1))]]);
            return (
                vec![HodgePiece { p, q, basis }],
                Matrix::from_rows(vec![vec![r(scale)]]),
                Matrix::identity(1),
                1,
            );
        }
        let i = gaussian(r(0), r(1));
        let v = Matrix::from_columns(2, &[vec![real(&r(1)), i.clone()]]);
        let vbar = conj(&v);
        let j = Matrix::from_rows(vec![vec![r(0), r(1)], vec![r(-1), r(0)]]);
        let (s, c) = if d % 2 == 0 {
            let sign = if d.rem_euclid(4) == 0 { 1 } else { -1 };
            (Matrix::identity(2).scale(&r(sign * scale)), Matrix::identity(2).scale(&r(sign)))
        } else {
            let sign = if d.rem_euclid(4) == 1 { 1 } else { -1 };
            (j.scale(&r(-sign * scale)), j.scale(&r(sign)))
        };
        (
            vec![HodgePiece { p, q, basis: v }, HodgePiece { p: q, q: p, basis: vbar }],
            s,
            c,
            2,
        )
    }

    #[derive(Clone, Debug)]
    pub struct PolarizedFixture {
        pub hodge: HodgeStructure,
        pub s: BilinearForm,
        pub s_prime: BilinearForm,
    }

    fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
        let mut m = Matrix::identity(n);
        for _ in 0..2 * n {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                let f = Rational::from_integer(rng.gen_range(-2i64..=2).into());
                for k in 0..n {
                    let x = &m[(b, k)] * &f;
                    m[(a, k)] = &m[(a, k)] + &x;
                }
            }
        }
        m
    }

    /// Random structure of the given weight and real dimension (at most 6)
    /// with two polarizations `S` and `S' = S(φ ·, ·)`, `φ = ψ*ψ + c`.
    pub fn random<R: Rng>(rng: &mut R, weight: i32, dim: usize) -> Result<PolarizedFixture> {
        let odd = weight.rem_euclid(2) == 1;
        if odd && dim % 2 == 1 {
            return Err(Error::InvalidArgument("odd weight needs even dimension".into()));
        }
        // choose p >= q types; in odd weight every block is 2-dimensional
        let mut types = Vec::new();
        let mut left = dim;
        while left > 0 {
            let p_min = (weight + 1).div_euclid(2);
            let mut p = rng.gen_range(p_min..=weight.max(p_min));
            if left == 1 {
                p = weight / 2;
            }
            let size = if 2 * p == weight { 1 } else { 2 };
            types.push(p);
            left -= size;
        }
        types.sort_unstable();
        let mut pieces_by_type: BTreeMap<(i32, i32), Vec<Vec<Gaussian>>> = BTreeMap::new();
        let mut s = Matrix::zeros(0, 0);
        let mut c = Matrix::zeros(0, 0);
        let mut offsets = Vec::new();
        let mut n = 0;
        for &p in &types {
            let scale = rng.gen_range(1i64..=4);
            let (pcs, sb, cb, size) = block(weight, p, scale);
            for pc in pcs {
                for col in pc.basis.columns() {
                    let mut v = vec![real(&Rational::zero()); n];
                    v.extend(col);
                    pieces_by_type.entry((pc.p, pc.q)).or_default().push(v);
                }
            }
            offsets.push((p, n, size));
            s = s.block_diag(&sb);
            c = c.block_diag(&cb);
            n += size;
        }
        let pieces: Vec<HodgePiece> = pieces_by_type
            .into_iter()
            .map(|((p, q), cols)| {
                let cols: Vec<Vec<Gaussian>> = cols
                    .into_iter()
                    .map(|mut v| {
                        v.resize(dim, real(&Rational::zero()));
                        v
                    })
                    .collect();
                HodgePiece { p, q, basis: Matrix::from_columns(dim, &cols) }
            })
            .collect();
        let h = HodgeStructure::new(weight, dim, pieces)?;

        // ψ mixes blocks of equal type; on 2-dimensional blocks it is complex-linear
        let mut psi = Matrix::zeros(dim, dim);
        for &(p1, o1, s1) in &offsets {
            for &(p2, o2, s2) in &offsets {
                if p1 != p2 {
                    continue;
                }
                let x = Rational::from_integer(rng.gen_range(-3i64..=3).into());
                if s1 == 1 {
                    psi[(o1, o2)] = x;
                } else {
                    debug_assert_eq!(s2, 2);
                    let y = Rational::from_integer(rng.gen_range(-3i64..=3).into());
                    psi[(o1, o2)] = x.clone();
                    psi[(o1 + 1, o2 + 1)] = x;
                    psi[(o1, o2 + 1)] = y.clone();
                    psi[(o1 + 1, o2)] = -y;
                }
            }
        }
        let s_c = &s * &c;
        let s_c_inv = s_c.inverse().expect("S_C is definite");
        let adjoint = &(&s_c_inv * &psi.transpose()) * &s_c;
        let shift = Rational::from_integer(rng.gen_range(1i64..=3).into());
        let phi = &(&adjoint * &psi) + &Matrix::identity(dim).scale(&shift);
        let s2 = &phi.transpose() * &s;

        let sym = polarization_symmetry(weight);
        let p = random_invertible(rng, dim);
        let h = h.change_basis(&p)?;
        let s = BilinearForm::new(Field::Rational, sym, crate::linalg::congruent(&s, &p))?;
        let s2 = BilinearForm::new(Field::Rational, sym, crate::linalg::congruent(&s2, &p))?;
        Ok(PolarizedFixture { hodge: h, s, s_prime: s2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use rand::SeedableRng;

    fn elliptic() -> HodgeStructure {
        let i = gaussian(int(0), int(1));
        let v = Matrix::from_columns(2, &[vec![real(&int(1)), i]]);
        HodgeStructure::new(1, 2, vec![HodgePiece { p: 1, q: 0, basis: v.clone() }, HodgePiece { p: 0, q: 1, basis: conj(&v) }])
            .unwrap()
    }

    #[test]
    fn weil_operator_examples() {
        let h = HodgeStructure::pure_middle(0, 3).unwrap();
        assert_eq!(weil_operator(&h).unwrap(), Matrix::identity(3));
        let c = weil_operator(&elliptic()).unwrap();
        assert_eq!(c, Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(-1), int(0)]]));
    }

    #[test]
    fn elliptic_polarizations() {
        let h = elliptic();
        let good = BilinearForm::from_int_rows(Symmetry::Skew, &[&[0, -1], &[1, 0]]).unwrap();
        let r = is_polarization(&h, &good).unwrap();
        assert!(r.is_polarization);
        assert_eq!(r.s_c, Matrix::identity(2));
        let bad = BilinearForm::from_int_rows(Symmetry::Skew, &[&[0, 1], &[-1, 0]]).unwrap();
        let r = is_polarization(&h, &bad).unwrap();
        assert!(!r.is_polarization);
        assert_eq!(r.s_c, -Matrix::identity(2));
        assert!(pol_class(&h, &good).unwrap().is_zero());
    }

    #[test]
    fn rational_failure_witness() {
        let h = HodgeStructure::pure_middle(0, 1).unwrap();
        let cmp =
            compare_polarizations_with(&h, &BilinearForm::diagonal_ints(&[1]), &BilinearForm::diagonal_ints(&[3]), true)
                .unwrap();
        assert_eq!(cmp.phi, Matrix::from_rows(vec![vec![int(3)]]));
        assert!(cmp.holds);
        assert_eq!(cmp.rational_classes_equal, Some(false));
        assert_eq!(cmp.eigenspaces.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn irreducible_charpoly() {
        let h = HodgeStructure::pure_middle(0, 2).unwrap();
        let s2 = BilinearForm::from_int_rows(Symmetry::Symmetric, &[&[2, 1], &[1, 3]]).unwrap();
        let cmp = compare_polarizations(&h, &BilinearForm::diagonal_ints(&[1, 1]), &s2).unwrap();
        assert_eq!(cmp.charpoly, Poly::from_ints(&[5, -5, 1]));
        assert_eq!(cmp.sturm.positive_roots, 2);
        assert!(cmp.sturm.squarefree);
        assert!(cmp.eigenspaces.is_none());
        assert!(cmp.holds);
    }

    #[test]
    fn weight_two_sign() {
        let i = gaussian(int(0), int(1));
        let v = Matrix::from_columns(3, &[vec![real(&int(1)), i, real(&int(0))]]);
        let e3 = complexify(&Matrix::identity(3).select_cols(&[2]));
        let h = HodgeStructure::new(
            2,
            3,
            vec![
                HodgePiece { p: 2, q: 0, basis: v.clone() },
                HodgePiece { p: 1, q: 1, basis: e3 },
                HodgePiece { p: 0, q: 2, basis: conj(&v) },
            ],
        )
        .unwrap();
        let c = weil_operator(&h).unwrap();
        assert_eq!(c, Matrix::diagonal(&[int(-1), int(-1), int(1)]));
        let s = BilinearForm::diagonal_ints(&[-1, -1, 1]);
        assert!(is_polarization(&h, &s).unwrap().is_polarization);
        let class = pol_class(&h, &s).unwrap();
        let expected = witt_class_of(&BilinearForm::diagonal_ints(&[1, 1, -1])).unwrap();
        assert_eq!(class, CobordismClass::Symmetric { class: expected });
    }

    #[test]
    fn fixtures_are_polarized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for w in 0..4 {
            for dim in [2, 4, 6] {
                let f = fixtures::random(&mut rng, w, dim).unwrap();
                let cmp = compare_polarizations(&f.hodge, &f.s, &f.s_prime).unwrap();
                assert!(cmp.holds, "w = {w}, dim = {dim}: {cmp:?}");
                assert!(cmp.hodge_endomorphism);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let h = elliptic();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<HodgeStructure>(&s).unwrap(), h);
        let loose: HodgeStructure =
            serde_json::from_str(r#"{"weight":0,"pieces":[{"p":0,"q":0,"basis":[[1,0],["0","1/2"]]}]}"#).unwrap();
        assert_eq!(loose.dim(), 2);
    }
}
