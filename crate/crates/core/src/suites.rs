//! Seeded property suites over the whole library, shared by the test
//! targets and the command-line hook.

use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{hilbert_symbol, square_class, Place};
use crate::cobordism::{
    acyclic_extension, cobordism_class, core_reduction, null_witness, orthogonal_split, transport,
    truncation_witness, verify_witness, CobordismClass, CobordismWitness, OrthogonalSplit, SelfDualComplex,
};
use crate::error::Result;
use crate::forms::{invariants, metabolic_reduce, BilinearForm, Symmetry};
use crate::gen;
use crate::genus::{epsilon, epsilon_by_pairs, lefschetz_cancellation_check, sign_dictionary_check, PrimitivePiece};
use crate::hodge::{compare_polarizations, fixtures};
use crate::linalg::Matrix;
use crate::witt::{equivalent, hasse_equivalent, witt_class_of};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<String>,
    pub millis: u128,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.passed == self.cases
    }
}

const MAX_FAILURES: usize = 5;

fn run_suite(name: &str, seed: u64, cases: usize, mut case: impl FnMut(&mut gen::Rng8, usize) -> Result<Option<String>>) -> SuiteReport {
    let start = Instant::now();
    let mut rng = gen::rng(seed);
    let mut passed = 0;
    let mut failures = Vec::new();
    for i in 0..cases {
        match case(&mut rng, i) {
            Ok(None) => passed += 1,
            Ok(Some(msg)) => failures.push(format!("case {i}: {msg}")),
            Err(e) => failures.push(format!("case {i}: error: {e}")),
        }
        failures.truncate(MAX_FAILURES);
    }
    SuiteReport { name: name.into(), seed, cases, passed, failures, millis: start.elapsed().as_millis() }
}

fn verified(w: &CobordismWitness) -> Option<String> {
    verify_witness(w)
        .first_failure()
        .map(|c| format!("witness check {:?} failed: {}", c.name, c.detail))
}

/// Random chains core → metabolic extensions → congruence → acyclic
/// extension → congruence → truncation; every witness verifies and the
/// class never changes.
pub fn witness_chains(seed: u64, cases: usize) -> SuiteReport {
    run_suite("witness chains", seed, cases, |rng, _| {
        let rank = rng.gen_range(1..=5);
        let core = gen::symmetric_form(rng, rank, 30);
        let class = witt_class_of(&core)?;
        let want = CobordismClass::Symmetric { class: class.clone() };
        let mut witnesses = Vec::new();
        let mut form = core.clone();
        for _ in 0..rng.gen_range(1..=2) {
            let r = rng.gen_range(1..=2);
            let block = gen::block_metabolic(rng, &form, r);
            let red = metabolic_reduce(&block)?;
            if witt_class_of(&red.core)? != class {
                return Ok(Some("metabolic reduction changed the class".into()));
            }
            let m = block.assemble();
            let sub = Matrix::identity(m.dim()).select_cols(&(0..block.isotropic_dim()).collect::<Vec<_>>());
            match orthogonal_split(&m, &sub)? {
                OrthogonalSplit::Subquotient { quotient, witness, .. } => {
                    if quotient != form {
                        return Ok(Some("isotropic quotient is not the core".into()));
                    }
                    witnesses.push(witness);
                }
                OrthogonalSplit::Split { .. } => return Ok(Some("isotropic block split".into())),
            }
            form = m;
        }
        let mut x = SelfDualComplex::from_form(&form)?;
        let (y, w) = transport(&x, &gen::basis_change(rng, &x))?;
        witnesses.push(w);
        x = y;
        let (y, w) = acyclic_extension(&x, &gen::acyclic(rng, Symmetry::Symmetric))?;
        witnesses.push(w);
        x = y;
        let (y, w) = transport(&x, &gen::basis_change(rng, &x))?;
        witnesses.push(w);
        x = y;
        witnesses.push(truncation_witness(&x)?);
        for (k, w) in witnesses.iter().enumerate() {
            if let Some(msg) = verified(w) {
                return Ok(Some(format!("step {k}: {msg}")));
            }
        }
        // each witness certifies equality of its two ends, so the chain only
        // needs its endpoints compared
        if cobordism_class(&x)? != want {
            return Ok(Some("class changed along the chain".into()));
        }
        Ok(None)
    })
}

/// Null witnesses, core reductions, exhaustion of block forms and
/// two-step realizations of Witt equality.
pub fn cobordism_properties(seed: u64, cases: usize) -> SuiteReport {
    run_suite("cobordism properties", seed, cases, |rng, _| {
        let n = rng.gen_range(1..=4);
        let f = gen::symmetric_form(rng, n, 20);
        let x = SelfDualComplex::from_form(&f)?;
        let (ext, _) = acyclic_extension(&x, &gen::acyclic(rng, Symmetry::Symmetric))?;
        let (ext, _) = transport(&ext, &gen::basis_change(rng, &ext))?;
        let w = truncation_witness(&ext)?;
        let null = null_witness(&w)?;
        if let Some(msg) = verified(&null) {
            return Ok(Some(format!("null witness: {msg}")));
        }
        if !cobordism_class(&null.f_prime)?.is_zero() {
            return Ok(Some("null witness target has nonzero class".into()));
        }
        let core = core_reduction(&w)?;
        if !core.cores_agree {
            return Ok(Some("core reduction forms disagree".into()));
        }
        for cw in [&core.witness_f, &core.witness_f_prime] {
            if let Some(msg) = verified(cw) {
                return Ok(Some(format!("core witness: {msg}")));
            }
        }

        // exhaustion of a block form one isotropic line at a time
        let r = rng.gen_range(1..=3);
        let block = gen::block_metabolic(rng, &f, r);
        let mut current = block.assemble();
        let mut count = 0;
        while current.dim() > f.dim() {
            match orthogonal_split(&current, &Matrix::identity(current.dim()).select_cols(&[0]))? {
                OrthogonalSplit::Subquotient { quotient, witness, .. } => {
                    if let Some(msg) = verified(&witness) {
                        return Ok(Some(format!("exhaustion: {msg}")));
                    }
                    current = quotient;
                    count += 1;
                }
                OrthogonalSplit::Split { .. } => return Ok(Some("exhaustion hit a split".into())),
            }
        }
        let red = metabolic_reduce(&block)?;
        if current != red.core || count != red.hyperbolic_count {
            return Ok(Some("exhaustion disagrees with metabolic reduction".into()));
        }

        // f ~ f ⊕ H ~ g for g congruent to the stabilization
        let stab = f.direct_sum(&BilinearForm::hyperbolic(1))?;
        let n = f.dim();
        let (g, w2) = transport(&SelfDualComplex::from_form(&stab)?, &[(0, gen::invertible(rng, n + 2))].into())?;
        let w1 = match orthogonal_split(&stab, &Matrix::identity(n + 2).select_cols(&[n]))? {
            OrthogonalSplit::Subquotient { witness, quotient, .. } if quotient == f => witness,
            _ => return Ok(Some("stabilization quotient is not f".into())),
        };
        for cw in [&w1, &w2] {
            if let Some(msg) = verified(cw) {
                return Ok(Some(format!("stabilization chain: {msg}")));
            }
        }
        if !equivalent(&f, &g.h0_form()?)? {
            return Ok(Some("stabilized form is not Witt equivalent".into()));
        }

        // skew complexes have class zero
        let pairs = rng.gen_range(1..=3);
        let s = SelfDualComplex::from_form(&gen::skew_form(rng, pairs))?;
        let (s, _) = acyclic_extension(&s, &gen::acyclic(rng, Symmetry::Skew))?;
        let ws = truncation_witness(&s)?;
        if let Some(msg) = verified(&ws) {
            return Ok(Some(format!("skew truncation: {msg}")));
        }
        if !cobordism_class(&s)?.is_zero() {
            return Ok(Some("skew complex has nonzero class".into()));
        }
        Ok(None)
    })
}

/// Random polarized structures of weight 0..=3 and dimension at most 6.
pub fn polarizations(seed: u64, cases: usize) -> SuiteReport {
    run_suite("polarizations", seed, cases, |rng, i| {
        let weight = (i % 4) as i32;
        let dim = if weight % 2 == 1 { 2 * rng.gen_range(1..=3) } else { rng.gen_range(1..=6) };
        let fx = fixtures::random(rng, weight, dim)?;
        let cmp = compare_polarizations(&fx.hodge, &fx.s, &fx.s_prime)?;
        if !(cmp.sturm.all_real && cmp.sturm.all_positive) {
            return Ok(Some(format!("spectrum not real positive: {}", cmp.charpoly)));
        }
        if !cmp.semisimple {
            return Ok(Some("comparison endomorphism not semisimple".into()));
        }
        if !cmp.identity_chain {
            return Ok(Some("identity chain fails".into()));
        }
        if !cmp.signatures_equal {
            return Ok(Some("signatures differ".into()));
        }
        if !cmp.holds || !cmp.hodge_endomorphism {
            return Ok(Some("verdict false".into()));
        }
        Ok(None)
    })
}

/// ε pairing rule, Lefschetz cancellation on random pieces and the shift identity.
pub fn sign_calculus(seed: u64, cases: usize) -> SuiteReport {
    run_suite("sign calculus", seed, cases, |rng, i| {
        let m = rng.gen_range(-1000i64..=1000);
        if epsilon(m) != epsilon_by_pairs(m) || epsilon(m) != epsilon(m - 1) * if m % 2 == 0 { 1 } else { -1 } {
            return Ok(Some(format!("ε fails at {m}")));
        }
        let w = rng.gen_range(-20i64..=20);
        let k = rng.gen_range(0i64..=10);
        if epsilon(w - 2 * k) != epsilon(w) * if k % 2 == 0 { 1 } else { -1 } {
            return Ok(Some(format!("ε shift fails at ({w}, {k})")));
        }
        let odd_only = i % 4 == 0;
        let mut js: Vec<u32> = (0..=5).filter(|j| !odd_only || j % 2 == 1).filter(|_| rng.gen_bool(0.6)).collect();
        if js.is_empty() {
            js.push(if odd_only { 1 } else { 0 });
        }
        let pieces: Vec<PrimitivePiece> = js
            .iter()
            .map(|&j| PrimitivePiece { j, weight: w as i32 - j as i32, signature: rng.gen_range(-9..=9) })
            .collect();
        let r = lefschetz_cancellation_check(&pieces, w)?;
        if !r.equal {
            return Ok(Some(format!("cancellation fails for {js:?} at weight {w}")));
        }
        if odd_only && (r.lhs_signature != 0 || r.rhs_signature != 0) {
            return Ok(Some("odd pieces contribute".into()));
        }
        Ok(None)
    })
}

pub fn sign_calculus_exhaustive() -> Vec<String> {
    let mut failures = Vec::new();
    for m in -1000..=1000 {
        if epsilon(m) != epsilon_by_pairs(m) {
            failures.push(format!("ε pairing rule fails at {m}"));
        }
    }
    for d in 0..=50 {
        for d2 in 0..=d {
            if !sign_dictionary_check(d, d2).holds {
                failures.push(format!("shift identity fails at ({d}, {d2})"));
            }
        }
    }
    failures
}

/// Invariance of invariants and classes under congruence and hyperbolic
/// stabilization, product formula, skew vanishing and agreement of the two
/// equality tests.
pub fn invariance(seed: u64, cases: usize) -> SuiteReport {
    run_suite("invariance", seed, cases, |rng, _| {
        let n = rng.gen_range(1..=6);
        let f = gen::symmetric_form(rng, n, 25);
        let p = gen::invertible(rng, f.dim());
        let g = f.congruent(&p);
        if invariants(&f)? != invariants(&g)? {
            return Ok(Some("invariants change under congruence".into()));
        }
        let cf = witt_class_of(&f)?;
        if cf != witt_class_of(&g)? {
            return Ok(Some("class changes under congruence".into()));
        }
        let stab = f.direct_sum(&BilinearForm::hyperbolic(rng.gen_range(1..=2)))?;
        if cf != witt_class_of(&stab)? {
            return Ok(Some("class changes under stabilization".into()));
        }

        let a = gen::nonzero_rational(rng, 60);
        let b = gen::nonzero_rational(rng, 60);
        let mut places = vec![Place::Real, Place::Prime(BigInt::from(2))];
        for x in [&a, &b] {
            for q in square_class(x)?.primes()? {
                places.push(Place::Prime(q));
            }
        }
        places.sort();
        places.dedup();
        let mut product = 1i8;
        for v in &places {
            product *= hilbert_symbol(&a, &b, v)?;
        }
        if product != 1 {
            return Ok(Some(format!("product formula fails for ({a}, {b})")));
        }

        let n = rng.gen_range(1..=3);
        let s = gen::skew_form(rng, n);
        let sc = SelfDualComplex::from_form(&s)?;
        if !cobordism_class(&sc)?.is_zero() {
            return Ok(Some("skew form has nonzero class".into()));
        }

        let n = rng.gen_range(1..=6);
        let h = gen::symmetric_form(rng, n, 25);
        let by_residues = witt_class_of(&f)? == witt_class_of(&h)?;
        let by_hasse = hasse_equivalent(&f, &h)?;
        if by_residues != by_hasse {
            return Ok(Some("residue and Hasse tests disagree".into()));
        }
        // a guaranteed-equal pair for the positive branch
        let twin = g.direct_sum(&BilinearForm::hyperbolic(1))?.congruent(&gen::invertible(rng, f.dim() + 2));
        if !(equivalent(&f, &twin)? && hasse_equivalent(&f, &twin)?) {
            return Ok(Some("stabilized twin not recognized as equal".into()));
        }
        Ok(None)
    })
}

/// Every suite with default sizes.
pub fn all(seed: u64, cases: Option<usize>) -> Vec<SuiteReport> {
    let n = |d: usize| cases.unwrap_or(d);
    vec![
        witness_chains(seed, n(500)),
        cobordism_properties(seed, n(100)),
        polarizations(seed, n(200)),
        sign_calculus(seed, n(1000)),
        invariance(seed, n(200)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for r in all(3, Some(4)) {
            assert!(r.ok(), "{r:?}");
        }
        assert!(sign_calculus_exhaustive().is_empty());
    }
}
