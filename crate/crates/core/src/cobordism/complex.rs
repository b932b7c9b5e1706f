use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::forms::{BilinearForm, Field, Symmetry};
use crate::linalg::{is_nonsingular, rational_rank, Matrix};

pub(crate) fn sign_pow(i: i32) -> Rational {
    if i.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Bounded cochain complex of finite-dimensional Q-vector spaces with
/// differentials `d^i: C^i -> C^{i+1}` stored as `dim C^{i+1} x dim C^i`
/// matrices. Absent degrees are zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Complex {
    spaces: BTreeMap<i32, usize>,
    diffs: BTreeMap<i32, Matrix<Rational>>,
}

/// Cohomology in one degree: cocycle representatives of a basis of H^i and
/// a basis of the coboundaries.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub reps: Matrix<Rational>,
    pub boundaries: Matrix<Rational>,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.reps.cols()
    }

    /// Coordinates in `reps` of the class of each cocycle column of `v`.
    pub fn classes(&self, v: &Matrix<Rational>) -> Matrix<Rational> {
        let basis = self.boundaries.hstack(&self.reps);
        let x = basis
            .solve(v)
            .expect("vectors are cocycles of this complex");
        let b = self.boundaries.cols();
        let rows: Vec<usize> = (b..basis.cols()).collect();
        x.select_rows(&rows)
    }
}

impl Complex {
    pub fn new(spaces: BTreeMap<i32, usize>, diffs: BTreeMap<i32, Matrix<Rational>>) -> Result<Self> {
        let spaces: BTreeMap<i32, usize> = spaces.into_iter().filter(|&(_, n)| n > 0).collect();
        let mut c = Complex { spaces, diffs: BTreeMap::new() };
        for (i, d) in diffs {
            let shape = (c.dim(i + 1), c.dim(i));
            if (d.rows(), d.cols()) != shape {
                if d.rows() * d.cols() == 0 && shape.0 * shape.1 == 0 {
                    continue;
                }
                return Err(Error::Dimension(format!(
                    "d^{i} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    shape.0,
                    shape.1
                )));
            }
            if !d.is_zero() {
                c.diffs.insert(i, d);
            }
        }
        Ok(c)
    }

    /// A single space in degree 0.
    pub fn degree_zero(n: usize) -> Self {
        Complex { spaces: BTreeMap::from([(0, n)]), diffs: BTreeMap::new() }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        self.spaces.retain(|_, n| *n > 0);
        self
    }

    pub fn dim(&self, i: i32) -> usize {
        self.spaces.get(&i).copied().unwrap_or(0)
    }

    pub fn spaces(&self) -> &BTreeMap<i32, usize> {
        &self.spaces
    }

    pub fn diff(&self, i: i32) -> Matrix<Rational> {
        self.diffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(i + 1), self.dim(i)))
    }

    /// Degrees carrying a nonzero space.
    pub fn support(&self) -> Vec<i32> {
        self.spaces.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn is_degree_zero(&self) -> bool {
        self.spaces.keys().all(|&i| i == 0)
    }

    /// First degree `i` with `d^{i+1} d^i != 0`.
    pub fn square_defect(&self) -> Option<(i32, Vec<Rational>)> {
        for &i in self.spaces.keys() {
            let dd = &self.diff(i + 1) * &self.diff(i);
            if let Some(j) = (0..dd.cols()).find(|&j| dd.col(j).iter().any(|x| !x.is_zero())) {
                let mut e = vec![Rational::zero(); self.dim(i)];
                e[j] = Rational::one();
                return Some((i, e));
            }
        }
        None
    }

    pub fn cohomology(&self, i: i32) -> Cohomology {
        let n = self.dim(i);
        let cycles = self.diff(i).kernel();
        let boundaries = self.diff(i - 1).column_basis();
        let b = boundaries.cols();
        let picked: Vec<usize> = boundaries
            .hstack(&cycles)
            .independent_columns()
            .into_iter()
            .filter(|&j| j >= b)
            .map(|j| j - b)
            .collect();
        let reps = if n == 0 { Matrix::zeros(0, 0) } else { cycles.select_cols(&picked) };
        Cohomology { reps, boundaries }
    }

    /// Cohomology in every degree carrying a space.
    pub fn cohomologies(&self) -> BTreeMap<i32, Cohomology> {
        self.spaces.keys().map(|&i| (i, self.cohomology(i))).collect()
    }

    pub fn betti(&self) -> BTreeMap<i32, usize> {
        let ranks: BTreeMap<i32, usize> = self.diffs.iter().map(|(&i, d)| (i, rational_rank(d))).collect();
        let rank = |i: i32| ranks.get(&i).copied().unwrap_or(0);
        self.spaces
            .keys()
            .map(|&i| (i, self.dim(i) - rank(i) - rank(i - 1)))
            .filter(|&(_, h)| h > 0)
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.betti().is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let degrees: BTreeSet<i32> = self.spaces.keys().chain(other.spaces.keys()).copied().collect();
        let spaces = degrees.iter().map(|&i| (i, self.dim(i) + other.dim(i))).collect();
        let diffs = degrees
            .iter()
            .map(|&i| (i, self.diff(i).block_diag(&other.diff(i))))
            .collect();
        Complex::new(spaces, diffs).expect("shapes agree")
    }

    /// Mapping cone of `f: self -> target`, `C^i = self^{i+1} ⊕ target^i`
    /// with differential [[-d, 0], [f, d]].
    pub fn cone(&self, target: &Complex, f: &ChainMap) -> Complex {
        let degrees: BTreeSet<i32> = self
            .spaces
            .keys()
            .map(|i| i - 1)
            .chain(target.spaces.keys().copied())
            .collect();
        let spaces: BTreeMap<i32, usize> =
            degrees.iter().map(|&i| (i, self.dim(i + 1) + target.dim(i))).collect();
        let mut diffs = BTreeMap::new();
        for &i in &degrees {
            let top = (-self.diff(i + 1)).hstack(&Matrix::zeros(self.dim(i + 2), target.dim(i)));
            let bottom = f.at(i + 1, self, target).hstack(&target.diff(i));
            diffs.insert(i, top.vstack(&bottom));
        }
        Complex::new(spaces, diffs).expect("cone shapes agree")
    }
}

/// Family of matrices `f^i: X^i -> Y^i`; absent degrees are zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChainMap {
    maps: BTreeMap<i32, Matrix<Rational>>,
}

impl ChainMap {
    pub fn new(maps: BTreeMap<i32, Matrix<Rational>>) -> Self {
        ChainMap { maps: maps.into_iter().filter(|(_, m)| !m.is_zero()).collect() }
    }

    pub fn identity(c: &Complex) -> Self {
        Self::new(c.spaces.iter().map(|(&i, &n)| (i, Matrix::identity(n))).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn degree_zero(m: Matrix<Rational>) -> Self {
        Self::new(BTreeMap::from([(0, m)]))
    }

    pub fn entries(&self) -> &BTreeMap<i32, Matrix<Rational>> {
        &self.maps
    }

    pub fn at(&self, i: i32, source: &Complex, target: &Complex) -> Matrix<Rational> {
        self.maps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(target.dim(i), source.dim(i)))
    }

    /// At degree `i` as a map of the given shift, e.g. homotopies `X^i -> Y^{i-1}`.
    pub fn at_shifted(&self, i: i32, shift: i32, source: &Complex, target: &Complex) -> Matrix<Rational> {
        self.maps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(target.dim(i + shift), source.dim(i)))
    }

    pub fn check_shapes(&self, name: &str, shift: i32, source: &Complex, target: &Complex) -> Result<()> {
        for (&i, m) in &self.maps {
            let shape = (target.dim(i + shift), source.dim(i));
            if (m.rows(), m.cols()) != shape {
                return Err(Error::Dimension(format!(
                    "{name} in degree {i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &ChainMap, x: &Complex, y: &Complex, z: &Complex) -> ChainMap {
        let degrees: BTreeSet<i32> = x.spaces.keys().copied().collect();
        ChainMap::new(
            degrees
                .into_iter()
                .map(|i| (i, &self.at(i, y, z) * &first.at(i, x, y)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &ChainMap, x: &Complex, y: &Complex) -> ChainMap {
        ChainMap::new(
            x.spaces
                .keys()
                .map(|&i| (i, &self.at(i, x, y) - &other.at(i, x, y)))
                .collect(),
        )
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap::new(self.maps.iter().map(|(&i, m)| (i, -m)).collect())
    }

    /// First degree where `d f != f d`.
    pub fn chain_defect(&self, x: &Complex, y: &Complex) -> Option<i32> {
        let degrees: BTreeSet<i32> = x.spaces.keys().copied().chain(y.spaces.keys().map(|i| i - 1)).collect();
        degrees.into_iter().find(|&i| {
            let lhs = &y.diff(i) * &self.at(i, x, y);
            let rhs = &self.at(i + 1, x, y) * &x.diff(i);
            lhs != rhs
        })
    }

    /// Matrix of the induced map H^i(X) -> H^i(Y) in the chosen bases.
    pub fn on_cohomology(&self, i: i32, x: &Complex, y: &Complex) -> Matrix<Rational> {
        let hx = x.cohomology(i);
        let hy = y.cohomology(i);
        if hx.dim() == 0 || hy.dim() == 0 {
            return Matrix::zeros(hy.dim(), hx.dim());
        }
        hy.classes(&(&self.at(i, x, y) * &hx.reps))
    }

    /// Direct sum of maps `x1 ⊕ x2 -> y1 ⊕ y2`.
    pub fn direct_sum(&self, other: &ChainMap, x: (&Complex, &Complex), y: (&Complex, &Complex)) -> ChainMap {
        let degrees: BTreeSet<i32> = x.0.spaces.keys().chain(x.1.spaces.keys()).copied().collect();
        ChainMap::new(
            degrees
                .into_iter()
                .map(|i| (i, self.at(i, x.0, y.0).block_diag(&other.at(i, x.1, y.1))))
                .collect(),
        )
    }
}

/// Bilinear pairing `X ⊗ Y -> Q` with blocks `S_i: X^i × Y^{-i}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Pairing {
    blocks: BTreeMap<i32, Matrix<Rational>>,
}

impl Pairing {
    pub fn new(blocks: BTreeMap<i32, Matrix<Rational>>) -> Self {
        Pairing { blocks: blocks.into_iter().filter(|(_, m)| !m.is_zero()).collect() }
    }

    pub fn degree_zero(m: Matrix<Rational>) -> Self {
        Self::new(BTreeMap::from([(0, m)]))
    }

    pub fn blocks(&self) -> &BTreeMap<i32, Matrix<Rational>> {
        &self.blocks
    }

    pub fn block(&self, i: i32, x: &Complex, y: &Complex) -> Matrix<Rational> {
        self.blocks
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(x.dim(i), y.dim(-i)))
    }

    pub fn check_shapes(&self, name: &str, x: &Complex, y: &Complex) -> Result<()> {
        for (&i, m) in &self.blocks {
            let shape = (x.dim(i), y.dim(-i));
            if (m.rows(), m.cols()) != shape {
                return Err(Error::Dimension(format!(
                    "{name} block {i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(())
    }

    pub fn neg(&self) -> Pairing {
        Pairing::new(self.blocks.iter().map(|(&i, m)| (i, -m)).collect())
    }

    pub fn direct_sum(&self, other: &Pairing, x: (&Complex, &Complex), y: (&Complex, &Complex)) -> Pairing {
        let degrees: BTreeSet<i32> = x.0.spaces.keys().chain(x.1.spaces.keys()).copied().collect();
        Pairing::new(
            degrees
                .into_iter()
                .map(|i| (i, self.block(i, x.0, y.0).block_diag(&other.block(i, x.1, y.1))))
                .collect(),
        )
    }

    /// First degree `i` where `(d_X^i)^T S_{i+1} + (-1)^i S_i d_Y^{-i-1}`
    /// has a nonzero entry, with that entry's position.
    pub fn chain_defect(&self, x: &Complex, y: &Complex) -> Option<(i32, usize, usize)> {
        let degrees: BTreeSet<i32> = x.spaces.keys().copied().chain(x.spaces.keys().map(|i| i - 1)).collect();
        for i in degrees {
            let lhs = &(&x.diff(i).transpose() * &self.block(i + 1, x, y))
                + &(&self.block(i, x, y) * &y.diff(-i - 1)).scale(&sign_pow(i));
            for a in 0..lhs.rows() {
                for b in 0..lhs.cols() {
                    if !lhs[(a, b)].is_zero() {
                        return Some((i, a, b));
                    }
                }
            }
        }
        None
    }

    /// Gram matrix of the induced pairing H^i(X) × H^{-i}(Y) -> Q.
    pub fn on_cohomology(&self, i: i32, x: &Complex, y: &Complex) -> (Matrix<Rational>, Cohomology, Cohomology) {
        let hx = x.cohomology(i);
        let hy = y.cohomology(-i);
        let g = if hx.dim() == 0 || hy.dim() == 0 {
            Matrix::zeros(hx.dim(), hy.dim())
        } else {
            &(&hx.reps.transpose() * &self.block(i, x, y)) * &hy.reps
        };
        (g, hx, hy)
    }

    /// Whether every induced pairing H^i(X) × H^{-i}(Y) is perfect; on
    /// failure returns the degree and a cocycle of X in the left kernel.
    pub fn perfect_defect(&self, x: &Complex, y: &Complex) -> Option<(i32, Vec<Rational>)> {
        self.perfect_defect_in(x, y, &x.cohomologies(), &y.cohomologies())
    }

    fn perfect_defect_in(
        &self,
        x: &Complex,
        y: &Complex,
        hxs: &BTreeMap<i32, Cohomology>,
        hys: &BTreeMap<i32, Cohomology>,
    ) -> Option<(i32, Vec<Rational>)> {
        let empty = Cohomology { reps: Matrix::zeros(0, 0), boundaries: Matrix::zeros(0, 0) };
        let degrees: BTreeSet<i32> = x.spaces.keys().copied().chain(y.spaces.keys().map(|i| -i)).collect();
        for i in degrees {
            let hx = hxs.get(&i).unwrap_or(&empty);
            let hy = hys.get(&-i).unwrap_or(&empty);
            if hx.dim() == 0 && hy.dim() == 0 {
                continue;
            }
            let g = if hx.dim() == 0 || hy.dim() == 0 {
                Matrix::zeros(hx.dim(), hy.dim())
            } else {
                &(&hx.reps.transpose() * &self.block(i, x, y)) * &hy.reps
            };
            if is_nonsingular(&g) {
                continue;
            }
            let k = g.transpose().kernel();
            let witness = if k.cols() > 0 && hx.dim() > 0 {
                (&hx.reps * &k.select_cols(&[0])).col(0)
            } else {
                Vec::new()
            };
            return Some((i, witness));
        }
        None
    }
}

/// Self-dual complex: a complex with an ε-symmetric pairing into Q[0].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfDualComplex {
    complex: Complex,
    pairing: Pairing,
    symmetry: Symmetry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: String,
    pub degree: i32,
    #[serde(with = "crate::json::rational_vec")]
    pub u: Vec<Rational>,
    #[serde(with = "crate::json::rational_vec")]
    pub v: Vec<Rational>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub symmetry: Symmetry,
    pub cohomology: BTreeMap<i32, usize>,
    #[serde(with = "degree_matrices")]
    pub induced_pairings: BTreeMap<i32, Matrix<Rational>>,
    pub violations: Vec<Violation>,
}

fn unit(n: usize, k: usize) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); n];
    e[k] = Rational::one();
    e
}

impl SelfDualComplex {
    pub fn new(complex: Complex, pairing: Pairing, symmetry: Symmetry) -> Result<Self> {
        pairing.check_shapes("pairing", &complex, &complex)?;
        Ok(SelfDualComplex { complex, pairing, symmetry })
    }

    /// A form viewed as a complex concentrated in degree 0.
    pub fn from_form(f: &BilinearForm) -> Result<Self> {
        if f.field() != &Field::Rational {
            return Err(Error::FieldMismatch("self-dual complexes are over Q".into()));
        }
        Self::new(
            Complex::degree_zero(f.dim()),
            Pairing::degree_zero(f.gram().clone()),
            f.symmetry(),
        )
    }

    pub fn zero(symmetry: Symmetry) -> Self {
        SelfDualComplex { complex: Complex::default(), pairing: Pairing::default(), symmetry }
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn block(&self, i: i32) -> Matrix<Rational> {
        self.pairing.block(i, &self.complex, &self.complex)
    }

    pub fn neg(&self) -> Self {
        SelfDualComplex { complex: self.complex.clone(), pairing: self.pairing.neg(), symmetry: self.symmetry }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.symmetry != other.symmetry {
            return Err(Error::SymmetryMismatch("common"));
        }
        let pairing = self.pairing.direct_sum(
            &other.pairing,
            (&self.complex, &other.complex),
            (&self.complex, &other.complex),
        );
        Self::new(self.complex.direct_sum(&other.complex), pairing, self.symmetry)
    }

    /// Checks dd = 0, ε-symmetry, the chain-map condition of the pairing and
    /// perfectness on cohomology.
    pub fn validate(&self) -> ValidationReport {
        let c = &self.complex;
        let mut violations = Vec::new();
        if let Some((i, u)) = c.square_defect() {
            violations.push(Violation {
                invariant: "d^2 = 0".into(),
                degree: i,
                u,
                v: Vec::new(),
                detail: format!("d^{} d^{i} does not vanish on u", i + 1),
            });
        }
        let eps = Rational::from_integer(self.symmetry.sign().into());
        'sym: for &i in c.spaces.keys() {
            let lhs = self.block(-i).transpose();
            let rhs = self.block(i).scale(&(sign_pow(i) * &eps));
            for a in 0..lhs.rows() {
                for b in 0..lhs.cols() {
                    if lhs[(a, b)] != rhs[(a, b)] {
                        violations.push(Violation {
                            invariant: "symmetry".into(),
                            degree: i,
                            u: unit(c.dim(i), a),
                            v: unit(c.dim(-i), b),
                            detail: format!(
                                "S(v, u) = {} but (-1)^i ε S(u, v) = {}",
                                lhs[(a, b)],
                                rhs[(a, b)]
                            ),
                        });
                        break 'sym;
                    }
                }
            }
        }
        if let Some((i, a, b)) = self.pairing.chain_defect(c, c) {
            violations.push(Violation {
                invariant: "chain map".into(),
                degree: i,
                u: unit(c.dim(i), a),
                v: unit(c.dim(-i - 1), b),
                detail: "S(du, v) + (-1)^i S(u, dv) != 0".into(),
            });
        }
        let mut cohomology = BTreeMap::new();
        let mut induced = BTreeMap::new();
        if violations.is_empty() {
            let hs = c.cohomologies();
            for (&i, h) in &hs {
                if h.dim() == 0 {
                    continue;
                }
                cohomology.insert(i, h.dim());
                let g = match hs.get(&-i) {
                    Some(h2) if h2.dim() > 0 => &(&h.reps.transpose() * &self.pairing.block(i, c, c)) * &h2.reps,
                    _ => Matrix::zeros(h.dim(), 0),
                };
                induced.insert(i, g);
            }
            if let Some((i, u)) = self.pairing.perfect_defect_in(c, c, &hs, &hs) {
                violations.push(Violation {
                    invariant: "perfect on cohomology".into(),
                    degree: i,
                    u,
                    v: Vec::new(),
                    detail: format!("induced pairing H^{i} x H^{} is degenerate", -i),
                });
            }
        }
        ValidationReport {
            valid: violations.is_empty(),
            symmetry: self.symmetry,
            cohomology,
            induced_pairings: induced,
            violations,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        match r.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidComplex(format!(
                "{} fails in degree {}: {}",
                v.invariant, v.degree, v.detail
            ))),
        }
    }

    /// Form induced on H^0, in the basis of chosen cocycle representatives.
    pub fn h0_form(&self) -> Result<BilinearForm> {
        self.ensure_valid()?;
        let (g, _, _) = self.pairing.on_cohomology(0, &self.complex, &self.complex);
        BilinearForm::new(Field::Rational, self.symmetry, g)
    }
}

/// Acyclic self-dual block on `a ∈ F^k, b ∈ F^{k+1}, b* ∈ F^{-k-1},
/// a* ∈ F^{-k}` with `d a = b`, `d b* = a*`, `S(a, a*) = c` and
/// `S(b, b*) = (-1)^{k+1} c`; the remaining values follow from symmetry.
pub fn acyclic_block(k: u32, symmetry: Symmetry, c: &Rational) -> SelfDualComplex {
    let k = k as i32;
    let eps = Rational::from_integer(symmetry.sign().into());
    let one = || Matrix::from_rows(vec![vec![Rational::one()]]);
    let scalar = |x: Rational| Matrix::from_rows(vec![vec![x]]);
    let sigma = sign_pow(k + 1) * c;
    if k == 0 {
        // degree 0 holds (a, a*)
        let spaces = BTreeMap::from([(-1, 1), (0, 2), (1, 1)]);
        let d0 = Matrix::from_rows(vec![vec![Rational::one(), Rational::zero()]]);
        let dm1 = Matrix::from_rows(vec![vec![Rational::zero()], vec![Rational::one()]]);
        let complex = Complex::new(spaces, BTreeMap::from([(0, d0), (-1, dm1)])).unwrap();
        let s0 = Matrix::from_rows(vec![
            vec![Rational::zero(), c.clone()],
            vec![&eps * c, Rational::zero()],
        ]);
        let s1 = scalar(sigma.clone());
        let sm1 = scalar(&sigma * sign_pow(1) * &eps);
        let pairing = Pairing::new(BTreeMap::from([(0, s0), (1, s1), (-1, sm1)]));
        return SelfDualComplex { complex, pairing, symmetry };
    }
    let spaces = BTreeMap::from([(k, 1), (k + 1, 1), (-k - 1, 1), (-k, 1)]);
    let complex = Complex::new(spaces, BTreeMap::from([(k, one()), (-k - 1, one())])).unwrap();
    let pairing = Pairing::new(BTreeMap::from([
        (k, scalar(c.clone())),
        (k + 1, scalar(sigma.clone())),
        (-k, scalar(sign_pow(k) * &eps * c)),
        (-k - 1, scalar(sign_pow(k + 1) * &eps * &sigma)),
    ]));
    SelfDualComplex { complex, pairing, symmetry }
}

pub(crate) mod degree_matrices {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<i32, Matrix<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        struct M<'a>(&'a Matrix<Rational>);
        impl Serialize for M<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                crate::json::matrix::serialize(self.0, s)
            }
        }
        let mut map = s.serialize_map(Some(m.len()))?;
        for (i, mat) in m {
            map.serialize_entry(&i.to_string(), &M(mat))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<i32, Matrix<Rational>>, D::Error> {
        let raw = BTreeMap::<String, Value>::deserialize(d)?;
        parse(&raw).map_err(D::Error::custom)
    }

    pub fn parse(raw: &BTreeMap<String, Value>) -> std::result::Result<BTreeMap<i32, Matrix<Rational>>, String> {
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let i = parse_degree(k)?;
            let m = crate::json::shaped_matrix::from_value(v).map_err(|e| format!("degree {k}: {e}"))?;
            out.insert(i, m);
        }
        Ok(out)
    }
}

pub(crate) fn parse_degree(k: &str) -> std::result::Result<i32, String> {
    k.trim().parse().map_err(|_| format!("degree key {k:?} is not an integer"))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ComplexRepr {
    pub spaces: BTreeMap<String, usize>,
    #[serde(default, with = "degree_matrices")]
    pub differentials: BTreeMap<i32, Matrix<Rational>>,
}

impl ComplexRepr {
    pub fn from_complex(c: &Complex) -> Self {
        ComplexRepr {
            spaces: c.spaces.iter().map(|(i, n)| (i.to_string(), *n)).collect(),
            differentials: c.diffs.clone(),
        }
    }

    pub fn into_complex(self) -> Result<Complex> {
        let mut spaces = BTreeMap::new();
        for (k, n) in self.spaces {
            spaces.insert(parse_degree(&k).map_err(Error::Parse)?, n);
        }
        Complex::new(spaces, self.differentials)
    }
}

impl Serialize for Complex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexRepr::from_complex(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        ComplexRepr::deserialize(d)?.into_complex().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelfDualRepr {
    symmetry: Symmetry,
    spaces: BTreeMap<String, usize>,
    #[serde(default, with = "degree_matrices")]
    differentials: BTreeMap<i32, Matrix<Rational>>,
    #[serde(default, with = "degree_matrices")]
    pairing: BTreeMap<i32, Matrix<Rational>>,
}

impl Serialize for SelfDualComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c = ComplexRepr::from_complex(&self.complex);
        SelfDualRepr {
            symmetry: self.symmetry,
            spaces: c.spaces,
            differentials: c.differentials,
            pairing: self.pairing.blocks.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SelfDualComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SelfDualRepr::deserialize(d)?;
        let complex = ComplexRepr { spaces: r.spaces, differentials: r.differentials }
            .into_complex()
            .map_err(D::Error::custom)?;
        let pairing = reshape_pairing(r.pairing, &complex).map_err(D::Error::custom)?;
        SelfDualComplex::new(complex, pairing, r.symmetry).map_err(D::Error::custom)
    }
}

/// Drops empty placeholder blocks whose true shape has a zero dimension.
pub(crate) fn reshape_pairing(blocks: BTreeMap<i32, Matrix<Rational>>, c: &Complex) -> Result<Pairing> {
    reshape_pairing_between(blocks, c, c)
}

pub(crate) fn reshape_pairing_between(
    blocks: BTreeMap<i32, Matrix<Rational>>,
    x: &Complex,
    y: &Complex,
) -> Result<Pairing> {
    let blocks = blocks
        .into_iter()
        .filter(|(i, m)| !(m.rows() * m.cols() == 0 && x.dim(*i) * y.dim(-*i) == 0))
        .collect();
    let p = Pairing::new(blocks);
    p.check_shapes("pairing", x, y)?;
    Ok(p)
}

pub(crate) fn reshape_map(
    name: &str,
    maps: BTreeMap<i32, Matrix<Rational>>,
    shift: i32,
    x: &Complex,
    y: &Complex,
) -> Result<ChainMap> {
    let maps = maps
        .into_iter()
        .filter(|(i, m)| !(m.rows() * m.cols() == 0 && x.dim(*i) * y.dim(*i + shift) == 0))
        .collect();
    let f = ChainMap::new(maps);
    f.check_shapes(name, shift, x, y)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn degree_zero_form() {
        let c = SelfDualComplex::from_form(&BilinearForm::diagonal_ints(&[-2])).unwrap();
        let r = c.validate();
        assert!(r.valid);
        assert_eq!(c.h0_form().unwrap(), BilinearForm::diagonal_ints(&[-2]));
    }

    #[test]
    fn acyclic_blocks_are_valid() {
        for k in 0..4 {
            for sym in [Symmetry::Symmetric, Symmetry::Skew] {
                let a = acyclic_block(k, sym, &int(3));
                let r = a.validate();
                assert!(r.valid, "k = {k}, {sym:?}: {:?}", r.violations);
                assert!(r.cohomology.is_empty());
                assert_eq!(a.h0_form().unwrap().dim(), 0);
            }
        }
        let a = acyclic_block(0, Symmetry::Symmetric, &int(1));
        assert_eq!(a.complex().spaces(), &BTreeMap::from([(-1, 1), (0, 2), (1, 1)]));
    }

    #[test]
    fn sign_flip_is_reported() {
        let a = acyclic_block(0, Symmetry::Symmetric, &int(1));
        let mut blocks = a.pairing().blocks().clone();
        let b1 = blocks[&1].clone();
        blocks.insert(1, -b1);
        let broken = SelfDualComplex::new(a.complex().clone(), Pairing::new(blocks), Symmetry::Symmetric).unwrap();
        let r = broken.validate();
        assert!(!r.valid);
        let v = &r.violations[0];
        assert_eq!((v.invariant.as_str(), v.degree.abs()), ("symmetry", 1));
        assert_eq!((v.u.len(), v.v.len()), (1, 1));
    }

    #[test]
    fn hyperbolic_h0_through_contractible_extension() {
        let h = SelfDualComplex::from_form(&BilinearForm::hyperbolic(1)).unwrap();
        let c = h.direct_sum(&acyclic_block(0, Symmetry::Symmetric, &int(1))).unwrap();
        assert!(c.validate().valid);
        assert_eq!(c.h0_form().unwrap(), BilinearForm::hyperbolic(1));
    }

    #[test]
    fn json_round_trip() {
        let a = acyclic_block(1, Symmetry::Skew, &int(2));
        let s = serde_json::to_string(&a).unwrap();
        let back: SelfDualComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let c: SelfDualComplex = serde_json::from_str(
            r#"{"symmetry":"symmetric","spaces":{"0":1,"1":0},"differentials":{"0":[]},"pairing":{"0":[["1/2"]]}}"#,
        )
        .unwrap();
        assert_eq!(c.h0_form().unwrap(), BilinearForm::diagonal(&[crate::arith::rat(1, 2)]));
    }
}
