//! Seeded random fixtures for property suites.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, Rational};
use crate::cobordism::{acyclic_block, SelfDualComplex};
use crate::forms::{BilinearForm, BlockMetabolicForm, Symmetry};
use crate::linalg::Matrix;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nonzero_int<R: Rng>(rng: &mut R, max: i64) -> i64 {
    let v = rng.gen_range(1..=max);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

pub fn nonzero_rational<R: Rng>(rng: &mut R, max: i64) -> Rational {
    let n = nonzero_int(rng, max);
    let d = rng.gen_range(1..=4);
    Rational::new(n.into(), d.into())
}

/// Product of elementary matrices with small integer factors, optionally
/// scaled columns, so always invertible.
pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix<Rational> {
    let mut m = Matrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..2 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            let c = int(nonzero_int(rng, 2));
            for k in 0..n {
                m[(k, a)] = &m[(k, a)] * &c;
            }
        } else {
            let f = int(rng.gen_range(-2i64..=2));
            for k in 0..n {
                let x = &m[(k, b)] * &f;
                m[(k, a)] = &m[(k, a)] + &x;
            }
        }
    }
    m
}

pub fn diagonal_form<R: Rng>(rng: &mut R, rank: usize, max: i64) -> BilinearForm {
    let entries: Vec<i64> = (0..rank).map(|_| nonzero_int(rng, max)).collect();
    BilinearForm::diagonal_ints(&entries)
}

/// Nondegenerate symmetric form: a random diagonal form under a random congruence.
pub fn symmetric_form<R: Rng>(rng: &mut R, rank: usize, max: i64) -> BilinearForm {
    let d = diagonal_form(rng, rank, max);
    d.congruent(&invertible(rng, rank))
}

pub fn skew_form<R: Rng>(rng: &mut R, pairs: usize) -> BilinearForm {
    let base = BilinearForm::standard_symplectic(pairs);
    let scaled = base.congruent(&Matrix::diagonal(
        &(0..2 * pairs).map(|_| nonzero_rational(rng, 5)).collect::<Vec<_>>(),
    ));
    scaled.congruent(&invertible(rng, 2 * pairs))
}

pub fn symmetric_matrix<R: Rng>(rng: &mut R, n: usize, max: i64) -> Matrix<Rational> {
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = int(rng.gen_range(-max..=max));
            a[(i, j)] = x.clone();
            a[(j, i)] = x;
        }
    }
    a
}

pub fn block_metabolic<R: Rng>(rng: &mut R, core: &BilinearForm, r: usize) -> BlockMetabolicForm {
    let a = symmetric_matrix(rng, r, 4);
    let b = Matrix::from_fn(core.dim(), r, |_, _| int(rng.gen_range(-4i64..=4)));
    BlockMetabolicForm::new(core.clone(), a, b).expect("core is nondegenerate")
}

pub fn acyclic<R: Rng>(rng: &mut R, symmetry: Symmetry) -> SelfDualComplex {
    acyclic_block(rng.gen_range(0..=2), symmetry, &nonzero_rational(rng, 5))
}

/// Degreewise invertible basis change for every degree of `c`.
pub fn basis_change<R: Rng>(rng: &mut R, c: &SelfDualComplex) -> BTreeMap<i32, Matrix<Rational>> {
    c.complex()
        .spaces()
        .iter()
        .map(|(&i, &n)| (i, invertible(rng, n)))
        .collect()
}
