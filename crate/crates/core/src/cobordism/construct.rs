use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::complex::{ChainMap, Complex, Pairing, SelfDualComplex};
use super::witness::{solve_homotopy, verify_witness, CobordismWitness, WitnessKind};
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::forms::{symplectic_reduce, BilinearForm, Field, Symmetry};
use crate::linalg::Matrix;
use crate::witt::{equivalent, witt_class_of, WittClassQ};

/// Appends to `current` those columns of `candidates` independent of the
/// span so far, stopping at `target` columns.
fn extend_basis(current: &Matrix<Rational>, candidates: &Matrix<Rational>, target: usize) -> Matrix<Rational> {
    let mut acc = current.clone();
    for j in 0..candidates.cols() {
        if acc.cols() >= target {
            break;
        }
        let next = acc.hstack(&candidates.select_cols(&[j]));
        if next.rank() == next.cols() {
            acc = next;
        }
    }
    acc
}

fn coordinate_rows(basis: &Matrix<Rational>, rows: std::ops::Range<usize>) -> Matrix<Rational> {
    let inv = basis.inverse().expect("basis is invertible");
    inv.select_rows(&rows.collect::<Vec<_>>())
}

/// Witness that `H^0(c)` with its induced form is directly cobordant to `c`,
/// through the truncations `τ≤0 c -> c` and `c -> τ≥0 c`.
pub fn truncation_witness(c: &SelfDualComplex) -> Result<CobordismWitness> {
    c.ensure_valid()?;
    let x = c.complex();
    let n0 = x.dim(0);
    let h = x.cohomology(0);
    let cycles = x.diff(0).kernel();
    let z = if n0 == 0 { 0 } else { cycles.cols() };
    let b = h.boundaries.cols();
    let q = n0 - b;

    // τ≤0: F^i for i < 0, Z^0 in degree 0
    let mut g_spaces: BTreeMap<i32, usize> = x.spaces().range(..0).map(|(&i, &n)| (i, n)).collect();
    g_spaces.insert(0, z);
    let mut g_diffs: BTreeMap<i32, Matrix<Rational>> = BTreeMap::new();
    for (&i, _) in x.spaces().range(..0) {
        if i == -1 {
            let d = x.diff(-1);
            let into_cycles = if z == 0 {
                Matrix::zeros(0, d.cols())
            } else {
                cycles.solve(&d).expect("boundaries are cycles")
            };
            g_diffs.insert(-1, into_cycles);
        } else {
            g_diffs.insert(i, x.diff(i));
        }
    }
    let g = Complex::new(g_spaces, g_diffs)?;

    // τ≥0: F^0 / B^0 in degree 0, F^i for i > 0
    let (quot, section) = if n0 == 0 {
        (Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    } else {
        let basis = h.boundaries.hstack(&h.boundaries.complement_basis());
        let section = basis.select_cols(&(b..n0).collect::<Vec<_>>());
        (coordinate_rows(&basis, b..n0), section)
    };
    let mut gp_spaces: BTreeMap<i32, usize> = x.spaces().range(1..).map(|(&i, &n)| (i, n)).collect();
    gp_spaces.insert(0, q);
    let mut gp_diffs = BTreeMap::new();
    for (&i, _) in x.spaces().range(0..) {
        if i == 0 {
            let d = x.diff(0);
            gp_diffs.insert(0, if q == 0 { Matrix::zeros(d.rows(), 0) } else { &d * &section });
        } else {
            gp_diffs.insert(i, x.diff(i));
        }
    }
    let gp = Complex::new(gp_spaces, gp_diffs)?;

    let h0 = SelfDualComplex::from_form(&c.h0_form()?)?;
    let hd = h.dim();

    let mut rho_prime: BTreeMap<i32, Matrix<Rational>> =
        x.spaces().range(..0).map(|(&i, &n)| (i, Matrix::identity(n))).collect();
    let mut pi_prime: BTreeMap<i32, Matrix<Rational>> =
        x.spaces().range(1..).map(|(&i, &n)| (i, Matrix::identity(n))).collect();
    let mut s_g: BTreeMap<i32, Matrix<Rational>> =
        x.spaces().range(..0).map(|(&i, _)| (i, c.block(i))).collect();
    let mut pi = BTreeMap::new();
    let mut rho = BTreeMap::new();
    if n0 > 0 {
        if z > 0 {
            rho_prime.insert(0, cycles.clone());
        }
        if q > 0 {
            pi_prime.insert(0, quot.clone());
        }
        if z > 0 && q > 0 {
            s_g.insert(0, &(&cycles.transpose() * &c.block(0)) * &section);
        }
        if hd > 0 {
            pi.insert(0, h.classes(&cycles));
            rho.insert(0, &quot * &h.reps);
        }
    }
    Ok(CobordismWitness {
        kind: WitnessKind::Direct,
        f: h0,
        f_prime: c.clone(),
        g,
        g_prime: gp,
        pi: ChainMap::new(pi),
        rho: ChainMap::new(rho),
        rho_prime: ChainMap::new(rho_prime),
        pi_prime: ChainMap::new(pi_prime),
        s_g: Pairing::new(s_g),
        homotopy: Some(ChainMap::zero()),
    })
}

/// From a witness for `F ~ F'`, the witness that `0 ~ F' ⊕ (F, -S)`, with
/// top map `(rho', pi)` and right map `(pi', -rho)`.
pub fn null_witness(w: &CobordismWitness) -> Result<CobordismWitness> {
    let report = verify_witness(w);
    if let Some(c) = report.first_failure() {
        return Err(Error::UnverifiedWitness(format!("{}: {}", c.name, c.detail)));
    }
    let homotopy = w
        .resolve_homotopy()
        .ok_or_else(|| Error::UnverifiedWitness("no homotopy for the square".into()))?;
    let (f, fp) = (w.f.complex(), w.f_prime.complex());
    let target = w.f_prime.direct_sum(&w.f.neg())?;
    let top = ChainMap::new(
        w.g.support()
            .into_iter()
            .map(|i| (i, w.rho_prime.at(i, &w.g, fp).vstack(&w.pi.at(i, &w.g, f))))
            .collect(),
    );
    let right = ChainMap::new(
        target
            .complex()
            .support()
            .into_iter()
            .map(|i| (i, w.pi_prime.at(i, fp, &w.g_prime).hstack(&-w.rho.at(i, f, &w.g_prime))))
            .collect(),
    );
    Ok(CobordismWitness {
        kind: WitnessKind::Direct,
        f: SelfDualComplex::zero(w.f.symmetry()),
        f_prime: target,
        g: w.g.clone(),
        g_prime: w.g_prime.clone(),
        pi: ChainMap::zero(),
        rho: ChainMap::zero(),
        rho_prime: top,
        pi_prime: right,
        s_g: w.s_g.clone(),
        homotopy: Some(homotopy),
    })
}

/// Result of splitting a nondegenerate form along a subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrthogonalSplit {
    /// The subspace is nondegenerate: `f ≅ f|sub ⊥ f|sub^⊥`, with
    /// `congruence = [sub | complement]`.
    Split {
        sub: BilinearForm,
        complement: BilinearForm,
        congruence: Matrix<Rational>,
    },
    /// The subspace is totally isotropic: `sub^⊥ / sub` is directly cobordant to `f`.
    Subquotient {
        quotient: BilinearForm,
        isotropic_dim: usize,
        witness: CobordismWitness,
    },
}

/// Splits `f` along the column span of `sub`, which must be either
/// nondegenerate or totally isotropic for `f`.
pub fn orthogonal_split(f: &BilinearForm, sub: &Matrix<Rational>) -> Result<OrthogonalSplit> {
    if f.field() != &Field::Rational {
        return Err(Error::FieldMismatch("orthogonal splitting is over Q".into()));
    }
    if !f.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let n = f.dim();
    if sub.rows() != n && sub.cols() != 0 {
        return Err(Error::Dimension(format!("subspace vectors have length {}, form has dimension {n}", sub.rows())));
    }
    let v = if sub.cols() == 0 { Matrix::zeros(n, 0) } else { sub.column_basis() };
    let k = v.cols();
    let restricted = f.restrict(&v);
    let gram = f.gram();
    let perp = if k == 0 { Matrix::identity(n) } else { (&v.transpose() * gram).kernel() };

    if k > 0 && restricted.is_nondegenerate() {
        let congruence = v.hstack(&perp);
        return Ok(OrthogonalSplit::Split {
            sub: restricted,
            complement: f.restrict(&perp),
            congruence,
        });
    }
    if !restricted.gram().is_zero() {
        return Err(Error::MixedSubspace);
    }

    // sub^⊥ = [V | C], ambient basis [V | C | D]
    let standard = Matrix::identity(n);
    let in_perp: Vec<usize> = (0..n)
        .filter(|&j| {
            let e = standard.select_cols(&[j]);
            perp.spans(&e)
        })
        .collect();
    let w = extend_basis(&v, &standard.select_cols(&in_perp), n - k);
    let w = extend_basis(&w, &perp, n - k);
    let full = extend_basis(&w, &standard, n);
    let c = w.select_cols(&(k..n - k).collect::<Vec<_>>());
    let cd = full.select_cols(&(k..n).collect::<Vec<_>>());
    let m = n - 2 * k;

    let quotient = f.restrict(&c);
    let eps = f.symmetry();
    let g = Complex::degree_zero(n - k);
    let gp = Complex::degree_zero(n - k);
    let fq = SelfDualComplex::from_form(&quotient)?;
    let ff = SelfDualComplex::from_form(f)?;
    let pi = Matrix::zeros(m, k).hstack(&Matrix::identity(m));
    let rho = Matrix::identity(m).vstack(&Matrix::zeros(k, m));
    let pi_prime = coordinate_rows(&full, k..n);
    let s_g = &(&w.transpose() * gram) * &cd;
    let witness = CobordismWitness {
        kind: WitnessKind::DirectSubquotient,
        f: fq,
        f_prime: ff,
        g,
        g_prime: gp,
        pi: ChainMap::degree_zero(pi),
        rho: ChainMap::degree_zero(rho),
        rho_prime: ChainMap::degree_zero(w.clone()),
        pi_prime: ChainMap::degree_zero(pi_prime),
        s_g: Pairing::degree_zero(s_g),
        homotopy: None,
    };
    debug_assert_eq!(quotient.symmetry(), eps);
    Ok(OrthogonalSplit::Subquotient { quotient, isotropic_dim: k, witness })
}

/// Witness that `y` is directly cobordant to `x`, where `y` is the transport of
/// `x` along degreewise invertible `p^i: Y^i -> X^i`.
pub fn transport(x: &SelfDualComplex, p: &BTreeMap<i32, Matrix<Rational>>) -> Result<(SelfDualComplex, CobordismWitness)> {
    let cx = x.complex();
    let mut inv = BTreeMap::new();
    for (&i, &n) in cx.spaces() {
        let pi = p.get(&i).cloned().unwrap_or_else(|| Matrix::identity(n));
        let qi = pi
            .inverse()
            .ok_or_else(|| Error::InvalidArgument(format!("basis change in degree {i} is singular")))?;
        inv.insert(i, (pi, qi));
    }
    let get = |i: i32| inv.get(&i).cloned().unwrap_or_else(|| (Matrix::zeros(0, 0), Matrix::zeros(0, 0)));
    let diffs = cx
        .spaces()
        .keys()
        .map(|&i| (i, &(&get(i + 1).1 * &cx.diff(i)) * &get(i).0))
        .collect();
    let cy = Complex::new(cx.spaces().clone(), diffs)?;
    let blocks = cx
        .spaces()
        .keys()
        .map(|&i| (i, &(&get(i).0.transpose() * &x.block(i)) * &get(-i).0))
        .collect();
    let y = SelfDualComplex::new(cy.clone(), Pairing::new(blocks), x.symmetry())?;
    let forward = ChainMap::new(inv.iter().map(|(&i, (pi, _))| (i, pi.clone())).collect());
    let backward = ChainMap::new(inv.iter().map(|(&i, (_, qi))| (i, qi.clone())).collect());
    let kind = if cx.is_degree_zero() { WitnessKind::DirectSubquotient } else { WitnessKind::Direct };
    let w = CobordismWitness {
        kind,
        f: x.clone(),
        f_prime: y.clone(),
        g: cy.clone(),
        g_prime: cy.clone(),
        pi: forward,
        rho: backward,
        rho_prime: ChainMap::identity(&cy),
        pi_prime: ChainMap::identity(&cy),
        s_g: y.pairing().clone(),
        homotopy: Some(ChainMap::zero()),
    };
    Ok((y, w))
}

/// Witness that `x` is directly cobordant to `x ⊕ a` for an acyclic self-dual `a`.
pub fn acyclic_extension(x: &SelfDualComplex, a: &SelfDualComplex) -> Result<(SelfDualComplex, CobordismWitness)> {
    if !a.complex().is_acyclic() {
        return Err(Error::InvalidComplex("extension summand has cohomology".into()));
    }
    let sum = x.direct_sum(a)?;
    let cx = x.complex();
    let incl = ChainMap::new(
        cx.support()
            .into_iter()
            .map(|i| (i, Matrix::identity(cx.dim(i)).vstack(&Matrix::zeros(a.complex().dim(i), cx.dim(i)))))
            .collect(),
    );
    let proj = ChainMap::new(
        sum.complex()
            .support()
            .into_iter()
            .map(|i| (i, Matrix::identity(cx.dim(i)).hstack(&Matrix::zeros(cx.dim(i), a.complex().dim(i)))))
            .collect(),
    );
    let w = CobordismWitness {
        kind: WitnessKind::Direct,
        f: x.clone(),
        f_prime: sum.clone(),
        g: cx.clone(),
        g_prime: cx.clone(),
        pi: ChainMap::identity(cx),
        rho: ChainMap::identity(cx),
        rho_prime: incl,
        pi_prime: proj,
        s_g: x.pairing().clone(),
        homotopy: Some(ChainMap::zero()),
    };
    Ok((sum, w))
}

/// Output of the core reduction attached to a verified direct witness.
#[derive(Clone, Debug)]
pub struct CoreReduction {
    /// `Im δ` for `δ = H^0(rho) H^0(pi)`, with the form `(δa, δb) -> S_G(a, δb)`.
    pub image_form: BilinearForm,
    /// `L / L''` inside `H^0(F)`, `L = Im H^0(pi)`, `L'' = Ker H^0(rho)`.
    pub core_f: BilinearForm,
    pub core_f_prime: BilinearForm,
    pub witness_f: CobordismWitness,
    pub witness_f_prime: CobordismWitness,
    pub cores_agree: bool,
}

fn side_core(
    sd: &SelfDualComplex,
    into: &Matrix<Rational>,
    out: &Matrix<Rational>,
) -> Result<(BilinearForm, CobordismWitness)> {
    let h0 = sd.h0_form()?;
    let image = if into.cols() == 0 { Matrix::zeros(into.rows(), 0) } else { into.column_basis() };
    let radical = if out.cols() == 0 { Matrix::zeros(0, 0) } else { out.kernel() };
    let radical = if radical.rows() == 0 { Matrix::zeros(h0.dim(), 0) } else { radical };
    if radical.cols() > 0 && !image.spans(&radical) {
        return Err(Error::Inconsistent("kernel of the outgoing map is not inside the image".into()));
    }
    match orthogonal_split(&h0, &radical)? {
        OrthogonalSplit::Subquotient { quotient, witness, .. } => Ok((quotient, witness)),
        OrthogonalSplit::Split { .. } => Err(Error::Inconsistent("expected an isotropic kernel".into())),
    }
}

pub fn core_reduction(w: &CobordismWitness) -> Result<CoreReduction> {
    let report = verify_witness(w);
    if let Some(c) = report.first_failure() {
        return Err(Error::UnverifiedWitness(format!("{}: {}", c.name, c.detail)));
    }
    let (f, fp, g, gp) = (w.f.complex(), w.f_prime.complex(), &w.g, &w.g_prime);
    let pi0 = w.pi.on_cohomology(0, g, f);
    let rho0 = w.rho.on_cohomology(0, f, gp);
    let rho_p0 = w.rho_prime.on_cohomology(0, g, fp);
    let pi_p0 = w.pi_prime.on_cohomology(0, fp, gp);
    let delta = &rho0 * &pi0;

    let (s0, _, _) = w.s_g.on_cohomology(0, g, gp);
    let idx = if delta.cols() == 0 { Vec::new() } else { delta.independent_columns() };
    let sd = &s0 * &delta;
    let image_gram = sd.submatrix(&idx, &idx);
    let image_form = BilinearForm::new(Field::Rational, w.f.symmetry(), image_gram)?;

    let (core_f, witness_f) = side_core(&w.f, &pi0, &rho0)?;
    let (core_f_prime, witness_f_prime) = side_core(&w.f_prime, &rho_p0, &pi_p0)?;
    let cores_agree = match w.f.symmetry() {
        Symmetry::Symmetric => {
            equivalent(&image_form, &core_f)? && equivalent(&image_form, &core_f_prime)?
        }
        Symmetry::Skew => {
            image_form.is_nondegenerate() && image_form.dim() == core_f.dim() && core_f.dim() == core_f_prime.dim()
        }
    };
    Ok(CoreReduction { image_form, core_f, core_f_prime, witness_f, witness_f_prime, cores_agree })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "symmetry", rename_all = "snake_case")]
pub enum CobordismClass {
    Symmetric { class: WittClassQ },
    /// Skew classes vanish; the certificate reduces `H^0` to hyperbolic pairs.
    Skew {
        hyperbolic_pairs: usize,
        #[serde(with = "crate::json::matrix")]
        certificate: Matrix<Rational>,
    },
}

impl CobordismClass {
    pub fn is_zero(&self) -> bool {
        match self {
            CobordismClass::Symmetric { class } => class.is_zero(),
            CobordismClass::Skew { .. } => true,
        }
    }
}

pub fn cobordism_class(c: &SelfDualComplex) -> Result<CobordismClass> {
    let h0 = c.h0_form()?;
    match c.symmetry() {
        Symmetry::Symmetric => Ok(CobordismClass::Symmetric { class: witt_class_of(&h0)? }),
        Symmetry::Skew => {
            let red = symplectic_reduce(&h0)?;
            Ok(CobordismClass::Skew { hyperbolic_pairs: red.hyperbolic_count, certificate: red.congruence })
        }
    }
}

/// Homotopy for the square of `w`, solved from scratch.
pub fn square_homotopy(w: &CobordismWitness) -> Option<ChainMap> {
    solve_homotopy(&w.defect(), &w.g, &w.g_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::cobordism::complex::acyclic_block;
    use crate::forms::{BlockMetabolicForm, Symmetry};

    fn assert_verified(w: &CobordismWitness) {
        let r = verify_witness(w);
        assert!(r.verified, "{:?}", r.first_failure());
    }

    #[test]
    fn truncation_of_extended_form() {
        let f = SelfDualComplex::from_form(&BilinearForm::diagonal_ints(&[1, -5])).unwrap();
        for k in 0..3 {
            let c = f.direct_sum(&acyclic_block(k, Symmetry::Symmetric, &int(2))).unwrap();
            let w = truncation_witness(&c).unwrap();
            assert_verified(&w);
            assert_eq!(w.f.h0_form().unwrap(), c.h0_form().unwrap());
        }
    }

    #[test]
    fn truncation_of_skew_complex() {
        let f = SelfDualComplex::from_form(&BilinearForm::standard_symplectic(1)).unwrap();
        let c = f.direct_sum(&acyclic_block(0, Symmetry::Skew, &int(1))).unwrap();
        assert_verified(&truncation_witness(&c).unwrap());
        assert!(cobordism_class(&c).unwrap().is_zero());
    }

    #[test]
    fn null_witness_of_truncation() {
        let f = SelfDualComplex::from_form(&BilinearForm::diagonal_ints(&[3])).unwrap();
        let c = f.direct_sum(&acyclic_block(1, Symmetry::Symmetric, &int(1))).unwrap();
        let w = truncation_witness(&c).unwrap();
        let n = null_witness(&w).unwrap();
        assert_verified(&n);
        assert!(cobordism_class(&n.f_prime).unwrap().is_zero());
    }

    #[test]
    fn block_form_quotient_is_the_core() {
        let s = BilinearForm::diagonal_ints(&[2, -7]);
        let a = Matrix::from_rows(vec![vec![int(1), int(4)], vec![int(4), int(-3)]]);
        let b = Matrix::from_rows(vec![vec![int(5), int(0)], vec![int(-2), int(1)]]);
        let m = BlockMetabolicForm::new(s.clone(), a, b).unwrap().assemble();
        let sub = Matrix::identity(6).select_cols(&[0, 1]);
        match orthogonal_split(&m, &sub).unwrap() {
            OrthogonalSplit::Subquotient { quotient, isotropic_dim, witness } => {
                assert_eq!(quotient, s);
                assert_eq!(isotropic_dim, 2);
                assert_verified(&witness);
                let core = core_reduction(&truncation_witness(&witness.f_prime).unwrap());
                assert!(core.is_ok());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nondegenerate_subspace_splits() {
        let f = BilinearForm::diagonal_ints(&[1, 2, 3]);
        let sub = Matrix::from_columns(3, &[vec![int(1), int(1), int(0)]]);
        match orthogonal_split(&f, &sub).unwrap() {
            OrthogonalSplit::Split { sub, complement, congruence } => {
                assert_eq!(sub.dim() + complement.dim(), 3);
                assert_eq!(f.congruent(&congruence), sub.direct_sum(&complement).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
        let mixed = BilinearForm::diagonal_ints(&[1, -1, 1, 1]);
        let sub = Matrix::from_columns(4, &[vec![int(1), int(1), int(0), int(0)], vec![int(0), int(0), int(1), int(0)]]);
        assert_eq!(orthogonal_split(&mixed, &sub), Err(Error::MixedSubspace));
    }

    #[test]
    fn transport_and_core_reduction() {
        let f = SelfDualComplex::from_form(&BilinearForm::diagonal_ints(&[1, 1, -2])).unwrap();
        let p = BTreeMap::from([(
            0,
            Matrix::from_rows(vec![vec![int(1), int(2), int(0)], vec![int(0), int(1), int(0)], vec![int(3), int(0), int(1)]]),
        )]);
        let (y, w) = transport(&f, &p).unwrap();
        assert_verified(&w);
        assert!(equivalent(&y.h0_form().unwrap(), &f.h0_form().unwrap()).unwrap());
        let core = core_reduction(&w).unwrap();
        assert!(core.cores_agree);
        assert_verified(&core.witness_f);
        assert_verified(&core.witness_f_prime);
    }

    #[test]
    fn acyclic_extension_witness() {
        let f = SelfDualComplex::from_form(&BilinearForm::diagonal_ints(&[-1, 6])).unwrap();
        let (sum, w) = acyclic_extension(&f, &acyclic_block(2, Symmetry::Symmetric, &int(-3))).unwrap();
        assert_verified(&w);
        assert_eq!(cobordism_class(&sum).unwrap(), cobordism_class(&f).unwrap());
        let mut bad = w.clone();
        bad.pi = bad.pi.neg();
        assert!(!verify_witness(&bad).verified);
    }
}
