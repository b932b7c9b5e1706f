//! Dense exact linear algebra over fields (Q and Q(i) in practice).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Field elements usable by the elimination routines.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Num + Neg<Output = Self> {}

impl<T: Clone + PartialEq + fmt::Debug + Num + Neg<Output = T>> Scalar for T {}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { T::zero() })
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == rows));
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn column_vector(v: &[T]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * c.clone())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && *self == -self.transpose()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let (r, c) = (self.rows, self.cols);
        Self::from_fn(r + other.rows, c + other.cols, |i, j| match (i < r, j < c) {
            (true, true) => self[(i, j)].clone(),
            (false, false) => other[(i - r, j - c)].clone(),
            _ => T::zero(),
        })
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = T::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = m[(r, j)].clone() * f.clone();
                        m[(i, j)] = m[(i, j)].clone() - v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Rank by forward elimination only.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = T::one() / m[(r, c)].clone();
            for i in r + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone() * inv.clone();
                    for j in c..m.cols {
                        let v = m[(r, j)].clone() * f.clone();
                        m[(i, j)] = m[(i, j)].clone() - v;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Columns form a basis of the right kernel.
    pub fn kernel(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                basis[(pc, k)] = -r[(row, f)].clone();
            }
        }
        basis
    }

    /// Indices of a maximal independent set of columns, chosen greedily left to right.
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().1
    }

    /// Basis (as columns) of the column space, taken from the original columns.
    pub fn column_basis(&self) -> Self {
        self.select_cols(&self.independent_columns())
    }

    /// Solves `self * X = b`, returning one solution if consistent.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows, "solve row mismatch");
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pc, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let x = self.solve(&Self::identity(n))?;
        if self.rank() < n {
            return None;
        }
        Some(x)
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "det of non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return T::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone() / piv.clone();
                    for j in c..n {
                        let v = m[(c, j)].clone() * f.clone();
                        m[(i, j)] = m[(i, j)].clone() - v;
                    }
                }
            }
        }
        det
    }

    /// Whether each column of `v` lies in the column span of `self`.
    pub fn spans(&self, v: &Self) -> bool {
        self.rank() == self.hstack(v).rank()
    }

    /// Standard basis vectors completing the column span of `self` to the
    /// whole space, chosen greedily in index order.
    pub fn complement_basis(&self) -> Self {
        let n = self.rows;
        let mut acc = self.column_basis();
        let mut picked = Vec::new();
        for i in 0..n {
            if acc.cols() == n {
                break;
            }
            let mut e = Self::zeros(n, 1);
            e[(i, 0)] = T::one();
            let cand = acc.hstack(&e);
            if cand.rank() > acc.cols() {
                acc = cand;
                picked.push(i);
            }
        }
        Self::identity(n).select_cols(&picked)
    }

    /// Leading principal minors d_1, ..., d_n.
    pub fn leading_minors(&self) -> Vec<T> {
        (1..=self.rows)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.submatrix(&idx, &idx).det()
            })
            .collect()
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimension mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone())
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimension mismatch");
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - rhs[(i, j)].clone())
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Scalar> Neg for Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        -&self
    }
}

/// Congruence transform `P^T M P`.
/// Primes below 2^62 used for modular rank bounds.
const MODULI: [u64; 3] = [4611686018427387847, 4611686018427387817, 4611686018427387787];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Rank of the reduction mod `p`, or `None` when `p` divides a denominator.
fn rank_mod(m: &Matrix<BigRational>, p: u64) -> Option<usize> {
    let bp = BigInt::from(p);
    let reduce = |x: &BigInt| x.mod_floor(&bp).to_u64().expect("reduced below p");
    let mut a = Vec::with_capacity(m.data.len());
    for x in &m.data {
        let d = reduce(x.denom());
        if d == 0 {
            return None;
        }
        a.push(mul_mod(reduce(x.numer()), pow_mod(d, p - 2, p), p));
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else { continue };
        for j in 0..cols {
            a.swap(r * cols + j, piv * cols + j);
        }
        let inv = pow_mod(a[r * cols + c], p - 2, p);
        for i in r + 1..rows {
            let f = mul_mod(a[i * cols + c], inv, p);
            if f != 0 {
                for j in c..cols {
                    let v = mul_mod(a[r * cols + j], f, p);
                    a[i * cols + j] = (a[i * cols + j] + p - v) % p;
                }
            }
        }
        r += 1;
    }
    Some(r)
}

/// Exact rank of a rational matrix. A full rank mod some prime is already
/// exact; otherwise falls back to rational elimination.
pub fn rational_rank(m: &Matrix<BigRational>) -> usize {
    let full = m.rows.min(m.cols);
    if MODULI.iter().any(|&p| rank_mod(m, p) == Some(full)) {
        return full;
    }
    m.rank()
}

pub fn is_nonsingular(m: &Matrix<BigRational>) -> bool {
    m.is_square() && rational_rank(m) == m.rows
}

pub fn congruent<T: Scalar>(m: &Matrix<T>, p: &Matrix<T>) -> Matrix<T> {
    &(&p.transpose() * m) * p
}
