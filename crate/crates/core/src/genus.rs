//! χ_y-genus of Hodge diamonds, the sign `ε_m = (-1)^{m(m+1)/2}` and the
//! sign bookkeeping of Lefschetz decompositions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::int;
use crate::error::{Error, Result};
use crate::forms::BilinearForm;
use crate::witt::{psi, witt_class_of, FpPayload, WittClassFp, WittClassQ};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DiamondRepr", into = "DiamondRepr")]
pub struct HodgeDiamond {
    dim: usize,
    h: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiamondRepr {
    dim: usize,
    h: Vec<Vec<u64>>,
}

impl TryFrom<DiamondRepr> for HodgeDiamond {
    type Error = Error;
    fn try_from(r: DiamondRepr) -> Result<Self> {
        HodgeDiamond::new(r.dim, r.h)
    }
}

impl From<HodgeDiamond> for DiamondRepr {
    fn from(d: HodgeDiamond) -> Self {
        DiamondRepr { dim: d.dim, h: d.h }
    }
}

impl HodgeDiamond {
    /// `h[p][q] = h^{p,q}` for `0 <= p, q <= dim`.
    pub fn new(dim: usize, h: Vec<Vec<u64>>) -> Result<Self> {
        let n = dim + 1;
        if h.len() != n || h.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDiamond(format!("table must be {n}x{n}")));
        }
        for p in 0..n {
            for q in 0..n {
                if h[p][q] != h[q][p] {
                    return Err(Error::InvalidDiamond(format!("h^{{{p},{q}}} != h^{{{q},{p}}}")));
                }
                if h[p][q] != h[dim - p][dim - q] {
                    return Err(Error::InvalidDiamond(format!(
                        "h^{{{p},{q}}} != h^{{{},{}}}",
                        dim - p,
                        dim - q
                    )));
                }
            }
        }
        if h[0][0] < 1 {
            return Err(Error::InvalidDiamond("h^{0,0} must be at least 1".into()));
        }
        Ok(HodgeDiamond { dim, h })
    }

    pub fn point() -> Self {
        HodgeDiamond { dim: 0, h: vec![vec![1]] }
    }

    pub fn projective_space(n: usize) -> Self {
        HodgeDiamond {
            dim: n,
            h: (0..=n).map(|p| (0..=n).map(|q| u64::from(p == q)).collect()).collect(),
        }
    }

    /// Surface with the given `h^{1,0}`, `h^{2,0}`, `h^{1,1}`.
    pub fn surface(h10: u64, h20: u64, h11: u64) -> Result<Self> {
        Self::new(2, vec![vec![1, h10, h20], vec![h10, h11, h10], vec![h20, h10, 1]])
    }

    pub fn k3() -> Self {
        Self::surface(0, 1, 20).expect("K3 diamond is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self, p: usize, q: usize) -> u64 {
        self.h[p][q]
    }
}

/// Integer polynomial in `y`, coefficients from degree 0 up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct YPoly(pub Vec<i64>);

impl YPoly {
    pub fn eval(&self, y: i64) -> i64 {
        self.0.iter().rev().fold(0, |acc, c| acc * y + c)
    }

    pub fn coeff(&self, p: usize) -> i64 {
        self.0.get(p).copied().unwrap_or(0)
    }
}

impl fmt::Display for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            first = false;
            match (p, mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, 1) => write!(f, "y")?,
                (1, _) => write!(f, "{mag}y")?,
                (_, 1) => write!(f, "y^{p}")?,
                _ => write!(f, "{mag}y^{p}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `χ_y = Σ_{p,q} (-1)^q h^{p,q} y^p`.
pub fn chi_y(d: &HodgeDiamond) -> YPoly {
    YPoly(
        (0..=d.dim)
            .map(|p| {
                (0..=d.dim)
                    .map(|q| if q % 2 == 0 { d.h[p][q] as i64 } else { -(d.h[p][q] as i64) })
                    .sum()
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Specialization {
    /// `χ_{-1}`, the Euler characteristic.
    pub euler: i64,
    /// `χ_0`, the arithmetic genus.
    pub arithmetic_genus: i64,
    /// `χ_1`; the signature of the middle cohomology when the dimension is even.
    pub signature: i64,
    pub even_dimension: bool,
}

pub fn specialize(chi: &YPoly, dim: usize) -> Specialization {
    Specialization {
        euler: chi.eval(-1),
        arithmetic_genus: chi.eval(0),
        signature: chi.eval(1),
        even_dimension: dim % 2 == 0,
    }
}

/// `ε_m = (-1)^{m(m+1)/2}`.
pub fn epsilon(m: i64) -> i8 {
    let t = (m as i128) * (m as i128 + 1) / 2;
    if t.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `ε_m` through the pairing rule: `(-1)^i` for `m = 2i` or `m = 2i - 1`.
pub fn epsilon_by_pairs(m: i64) -> i8 {
    let i = m.div_euclid(2) + m.rem_euclid(2);
    if i.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Primitive piece of a Lefschetz decomposition, carried by its real Witt
/// datum (a signature).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivePiece {
    pub j: u32,
    pub weight: i32,
    pub signature: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefschetzReport {
    /// Coefficient of each piece `[(P^{-j}, S_p)]` in the double sum.
    pub lhs: BTreeMap<u32, i64>,
    /// Coefficient of each piece in `ε_w Σ_k (-1)^k [(P^{-2k}, S_p)]`.
    pub rhs: BTreeMap<u32, i64>,
    /// Coefficient of each `[(P^{-2k}, f_* S)]` once `ε_w` is stripped; all 1.
    pub converted: BTreeMap<u32, i64>,
    pub lhs_signature: i64,
    pub rhs_signature: i64,
    pub equal: bool,
}

pub fn lefschetz_cancellation_check(pieces: &[PrimitivePiece], w: i64) -> Result<LefschetzReport> {
    let mut seen = std::collections::BTreeSet::new();
    for pc in pieces {
        if !seen.insert(pc.j) {
            return Err(Error::DuplicatePiece(pc.j));
        }
    }
    let ew = epsilon(w) as i64;
    let mut lhs = BTreeMap::new();
    let mut rhs = BTreeMap::new();
    let mut converted = BTreeMap::new();
    for pc in pieces {
        let j = pc.j as i64;
        let inner: i64 = (0..=j).map(|k| epsilon(w - j + 2 * k) as i64).sum();
        lhs.insert(pc.j, sign(j) * inner);
        let r = if j % 2 == 0 { ew * sign(j / 2) } else { 0 };
        rhs.insert(pc.j, r);
        if j % 2 == 0 {
            converted.insert(pc.j, ew * r * sign(j * (j - 1) / 2));
        }
    }
    let value = |m: &BTreeMap<u32, i64>| pieces.iter().map(|pc| m[&pc.j] * pc.signature).sum::<i64>();
    let (ls, rs) = (value(&lhs), value(&rhs));
    let equal = lhs == rhs && converted.values().all(|&c| c == 1) && ls == rs;
    Ok(LefschetzReport { lhs, rhs, converted, lhs_signature: ls, rhs_signature: rs, equal })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignDictionary {
    pub lhs: i128,
    pub rhs: i128,
    pub shift_lhs: i128,
    pub shift_rhs: i128,
    pub holds: bool,
}

/// `(d-d')(d-d'+1)/2 + (d-d')d' = d(d-1)/2 - d'(d'-1)/2 + (d-d')` and
/// `d(d-1)/2 + d = d(d+1)/2`.
pub fn sign_dictionary_check(d: i64, d2: i64) -> SignDictionary {
    let (d, e) = (d as i128, d2 as i128);
    let lhs = (d - e) * (d - e + 1) / 2 + (d - e) * e;
    let rhs = d * (d - 1) / 2 - e * (e - 1) / 2 + (d - e);
    let shift_lhs = d * (d - 1) / 2 + d;
    let shift_rhs = d * (d + 1) / 2;
    SignDictionary { lhs, rhs, shift_lhs, shift_rhs, holds: lhs == rhs && shift_lhs == shift_rhs }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublePointReport {
    /// Class of `⟨1⟩ ⊕ ⟨-2⟩`: the canonical point term plus the exceptional curve term.
    pub class: WittClassQ,
    pub second_residue_at_2: WittClassFp,
    pub first_residue_at_3: WittClassFp,
    pub first_residue_at_3_order: usize,
    pub nonzero_by_residue_at_2: bool,
    pub nonzero_by_residue_at_3: bool,
    pub verdict: bool,
}

/// Surface with an ordinary double point: the point terms `⟨1⟩` and
/// `⟨-2⟩` do not cancel in W(Q).
pub fn double_point_example() -> Result<DoublePointReport> {
    let f = BilinearForm::diagonal_ints(&[1, -2]);
    let class = witt_class_of(&f)?;
    let r2 = psi(&f, &BigInt::from(2), 1)?;
    let r3 = psi(&f, &BigInt::from(3), 0)?;
    let order = r3.order();
    let nz2 = !r2.is_zero() && matches!(r2.payload(), FpPayload::Z2 { rank_parity: 1 });
    let nz3 = matches!(r3.payload(), FpPayload::Z4 { value: 2 }) && order == 2;
    Ok(DoublePointReport {
        verdict: nz2 && nz3 && !class.is_zero(),
        class,
        second_residue_at_2: r2,
        first_residue_at_3: r3,
        first_residue_at_3_order: order,
        nonzero_by_residue_at_2: nz2,
        nonzero_by_residue_at_3: nz3,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceData {
    pub m: u32,
    pub h20: u64,
    pub h11: u64,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceTable {
    pub derivation: String,
    pub surfaces: Vec<SurfaceData>,
}

pub fn bundled_surfaces() -> SurfaceTable {
    serde_json::from_str(include_str!("../data/degree_m_surfaces.json")).expect("bundled surface data parses")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryPointReport {
    pub m: u32,
    /// Signature of the intersection form on `H^2(Z)`: `(2 h20 + 1, h11 - 1)`.
    pub h2_signature: i64,
    pub primitive_signature: i64,
    /// Real signature of `[(Q_P, S)] - [(H^2(Z), S)]`; the hyperplane class cancels the point term.
    pub residual_signature: i64,
    /// Rational class of `⟨1⟩ ⊕ ⟨-m⟩`, the point term against the hyperplane class.
    pub rational_nonprimitive: WittClassQ,
    /// The expression differs from the intersection complex term alone.
    pub residual_nonzero: bool,
}

/// Threefold with an ordinary `m`-fold point whose exceptional surface has
/// the given Hodge numbers.
pub fn ordinary_point_example(s: &SurfaceData) -> Result<OrdinaryPointReport> {
    if s.h11 == 0 {
        return Err(Error::InvalidArgument("h11 of a projective surface is positive".into()));
    }
    let (h20, h11) = (s.h20 as i64, s.h11 as i64);
    let h2_signature = 2 * h20 + 1 - (h11 - 1);
    let primitive_signature = 2 * h20 - (h11 - 1);
    let residual_signature = 1 - h2_signature;
    let rational_nonprimitive =
        witt_class_of(&BilinearForm::diagonal(&[int(1), -int(s.m as i64)]))?;
    Ok(OrdinaryPointReport {
        m: s.m,
        h2_signature,
        primitive_signature,
        residual_signature,
        rational_nonprimitive,
        residual_nonzero: residual_signature != 0 && residual_signature == -primitive_signature,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplesReport {
    pub double_point: DoublePointReport,
    pub ordinary_points: Vec<OrdinaryPointReport>,
    pub verdict: bool,
}

pub fn example_drivers(surfaces: &[SurfaceData]) -> Result<ExamplesReport> {
    let double_point = double_point_example()?;
    let ordinary_points = surfaces.iter().map(ordinary_point_example).collect::<Result<Vec<_>>>()?;
    let verdict = double_point.verdict && ordinary_points.iter().all(|r| r.residual_nonzero);
    Ok(ExamplesReport { double_point, ordinary_points, verdict })
}
