use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::complex::{
    degree_matrices, reshape_map, reshape_pairing_between, ChainMap, Complex, ComplexRepr, Pairing,
    SelfDualComplex,
};
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Direct,
    DirectSubquotient,
}

/// A commutative square
///
/// ```text
///   G  --rho'-->  F'
///   |pi           |pi'
///   v             v
///   F  --rho-->   G'
/// ```
///
/// with a perfect pairing `S_G: G ⊗ G' -> Q` adjoint to both self-dual
/// pairings, exhibiting `F` and `F'` as directly cobordant. The optional
/// homotopy `h^i: G^i -> G'^{i-1}` satisfies `pi' rho' - rho pi = dh + hd`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismWitness {
    pub kind: WitnessKind,
    pub f: SelfDualComplex,
    pub f_prime: SelfDualComplex,
    pub g: Complex,
    pub g_prime: Complex,
    pub pi: ChainMap,
    pub rho: ChainMap,
    pub rho_prime: ChainMap,
    pub pi_prime: ChainMap,
    pub s_g: Pairing,
    pub homotopy: Option<ChainMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub verified: bool,
    pub checks: Vec<WitnessCheck>,
}

impl WitnessReport {
    pub fn first_failure(&self) -> Option<&WitnessCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl CobordismWitness {
    /// Checks that all maps and pairings have shapes matching their complexes.
    pub fn check_shapes(&self) -> Result<()> {
        let (f, fp) = (self.f.complex(), self.f_prime.complex());
        self.pi.check_shapes("pi", 0, &self.g, f)?;
        self.rho.check_shapes("rho", 0, f, &self.g_prime)?;
        self.rho_prime.check_shapes("rho_prime", 0, &self.g, fp)?;
        self.pi_prime.check_shapes("pi_prime", 0, fp, &self.g_prime)?;
        self.s_g.check_shapes("S_G", &self.g, &self.g_prime)?;
        if let Some(h) = &self.homotopy {
            h.check_shapes("homotopy", -1, &self.g, &self.g_prime)?;
        }
        Ok(())
    }

    fn objects_in_degree_zero(&self) -> bool {
        self.f.complex().is_degree_zero()
            && self.f_prime.complex().is_degree_zero()
            && self.g.is_degree_zero()
            && self.g_prime.is_degree_zero()
    }

    /// `pi' rho' - rho pi`, a chain map `G -> G'`.
    pub fn defect(&self) -> ChainMap {
        let (f, fp) = (self.f.complex(), self.f_prime.complex());
        let top = self.pi_prime.compose(&self.rho_prime, &self.g, fp, &self.g_prime);
        let bottom = self.rho.compose(&self.pi, &self.g, f, &self.g_prime);
        top.sub(&bottom, &self.g, &self.g_prime)
    }

    /// The supplied homotopy, or one solved for when the square commutes on cohomology.
    pub fn resolve_homotopy(&self) -> Option<ChainMap> {
        match &self.homotopy {
            Some(h) => Some(h.clone()),
            None => solve_homotopy(&self.defect(), &self.g, &self.g_prime),
        }
    }

    /// Map of cones `C(rho') -> C(rho)` induced by `(pi, pi')` and a homotopy.
    pub fn cone_map(&self, h: &ChainMap) -> (Complex, Complex, ChainMap) {
        let (f, fp) = (self.f.complex(), self.f_prime.complex());
        let c1 = self.g.cone(fp, &self.rho_prime);
        let c2 = f.cone(&self.g_prime, &self.rho);
        let maps = c1
            .support()
            .into_iter()
            .map(|i| {
                let top = self
                    .pi
                    .at(i + 1, &self.g, f)
                    .hstack(&Matrix::zeros(f.dim(i + 1), fp.dim(i)));
                let bottom = h
                    .at_shifted(i + 1, -1, &self.g, &self.g_prime)
                    .hstack(&self.pi_prime.at(i, fp, &self.g_prime));
                (i, top.vstack(&bottom))
            })
            .collect();
        (c1, c2, ChainMap::new(maps))
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> WitnessCheck {
    WitnessCheck { name: name.into(), passed, detail: if passed { String::new() } else { detail.into() } }
}

/// Solves `D = d h + h d` for `h^i: X^i -> Y^{i-1}`.
pub fn solve_homotopy(defect: &ChainMap, x: &Complex, y: &Complex) -> Option<ChainMap> {
    let degrees = x.support();
    let mut var_index = BTreeMap::new();
    let mut nvars = 0usize;
    for &i in &degrees {
        let (r, c) = (y.dim(i - 1), x.dim(i));
        var_index.insert(i, nvars);
        nvars += r * c;
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Vec<Rational>> = Vec::new();
    for &i in &degrees {
        let d_i = defect.at(i, x, y);
        let dy = y.diff(i - 1);
        let dx = x.diff(i);
        for a in 0..y.dim(i) {
            for b in 0..x.dim(i) {
                let mut row = vec![Rational::zero(); nvars];
                // (d_Y^{i-1} h^i)[a, b] = sum_r dy[a, r] h^i[r, b]
                if let Some(&base) = var_index.get(&i) {
                    for r in 0..y.dim(i - 1) {
                        row[base + r * x.dim(i) + b] += &dy[(a, r)];
                    }
                }
                // (h^{i+1} d_X^i)[a, b] = sum_c h^{i+1}[a, c] dx[c, b]
                if let Some(&base) = var_index.get(&(i + 1)) {
                    for c in 0..x.dim(i + 1) {
                        row[base + a * x.dim(i + 1) + c] += &dx[(c, b)];
                    }
                }
                rows.push(row);
                rhs.push(vec![d_i[(a, b)].clone()]);
            }
        }
    }
    if rows.is_empty() {
        return Some(ChainMap::zero());
    }
    if nvars == 0 {
        return rhs.iter().all(|r| r[0].is_zero()).then(ChainMap::zero);
    }
    let sol = Matrix::from_rows(rows).solve(&Matrix::from_rows(rhs))?;
    let mut maps = BTreeMap::new();
    for &i in &degrees {
        let (r, c) = (y.dim(i - 1), x.dim(i));
        let base = var_index[&i];
        if r * c > 0 {
            maps.insert(i, Matrix::from_fn(r, c, |a, b| sol[(base + a * c + b, 0)].clone()));
        }
    }
    Some(ChainMap::new(maps))
}

fn injective(m: &Matrix<Rational>) -> bool {
    m.rank() == m.cols()
}

fn surjective(m: &Matrix<Rational>) -> bool {
    m.rank() == m.rows()
}

pub fn verify_witness(w: &CobordismWitness) -> WitnessReport {
    let mut checks = Vec::new();
    if let Err(e) = w.check_shapes() {
        checks.push(check("shapes", false, e.to_string()));
        return WitnessReport { verified: false, checks };
    }
    let (f, fp) = (w.f.complex(), w.f_prime.complex());
    let (g, gp) = (&w.g, &w.g_prime);

    for (name, c) in [("F is self-dual", &w.f), ("F' is self-dual", &w.f_prime)] {
        let err = c.ensure_valid().err().map(|e| e.to_string()).unwrap_or_default();
        checks.push(check(name, err.is_empty(), err));
    }
    checks.push(check(
        "common symmetry",
        w.f.symmetry() == w.f_prime.symmetry(),
        "F and F' carry different symmetry signs",
    ));
    for (name, c) in [("G is a complex", g), ("G' is a complex", gp)] {
        let d = c.square_defect();
        checks.push(check(name, d.is_none(), format!("d^2 != 0 in degree {:?}", d.map(|x| x.0))));
    }
    for (name, m, x, y) in [
        ("pi is a chain map", &w.pi, g, f),
        ("rho is a chain map", &w.rho, f, gp),
        ("rho' is a chain map", &w.rho_prime, g, fp),
        ("pi' is a chain map", &w.pi_prime, fp, gp),
    ] {
        let d = m.chain_defect(x, y);
        checks.push(check(name, d.is_none(), format!("d f != f d in degree {:?}", d)));
    }
    let sd = w.s_g.chain_defect(g, gp);
    checks.push(check("S_G is a chain map", sd.is_none(), format!("defect at {sd:?}")));
    let sp = w.s_g.perfect_defect(g, gp);
    checks.push(check(
        "S_G is perfect on cohomology",
        sp.is_none(),
        format!("degenerate in degree {:?}", sp.map(|x| x.0)),
    ));

    let mut adj1 = None;
    let mut adj2 = None;
    for i in g.support() {
        let lhs = &w.pi.at(i, g, f).transpose() * &w.f.block(i);
        let rhs = &w.s_g.block(i, g, gp) * &w.rho.at(-i, f, gp);
        if lhs != rhs && adj1.is_none() {
            adj1 = Some(i);
        }
        let lhs = &w.rho_prime.at(i, g, fp).transpose() * &w.f_prime.block(i);
        let rhs = &w.s_g.block(i, g, gp) * &w.pi_prime.at(-i, fp, gp);
        if lhs != rhs && adj2.is_none() {
            adj2 = Some(i);
        }
    }
    checks.push(check(
        "S(pi x, y) = S_G(x, rho y)",
        adj1.is_none(),
        format!("fails in degree {adj1:?}"),
    ));
    checks.push(check(
        "S'(rho' x, y) = S_G(x, pi' y)",
        adj2.is_none(),
        format!("fails in degree {adj2:?}"),
    ));

    let structural_ok = checks.iter().all(|c| c.passed);
    match w.kind {
        WitnessKind::DirectSubquotient => {
            checks.push(check(
                "objects in degree 0",
                w.objects_in_degree_zero(),
                "subquotient witnesses live in degree 0",
            ));
            let defect = w.defect();
            checks.push(check(
                "square commutes",
                defect.entries().is_empty(),
                "pi' rho' != rho pi",
            ));
            let m = |c: &ChainMap, x: &Complex, y: &Complex| c.at(0, x, y);
            let (rp, r) = (m(&w.rho_prime, g, fp), m(&w.rho, f, gp));
            let (p, pp) = (m(&w.pi, g, f), m(&w.pi_prime, fp, gp));
            let pattern_a = injective(&rp) && injective(&r) && surjective(&p) && surjective(&pp);
            let pattern_b = surjective(&rp) && surjective(&r) && injective(&p) && injective(&pp);
            checks.push(check(
                "injective/surjective pattern",
                pattern_a || pattern_b,
                "horizontal maps must be injective with surjective vertical maps, or the reverse",
            ));
        }
        WitnessKind::Direct => {
            if let Some(h) = &w.homotopy {
                let defect = w.defect();
                let bad = g.support().into_iter().find(|&i| {
                    let dh = &gp.diff(i - 1) * &h.at_shifted(i, -1, g, gp);
                    let hd = &h.at_shifted(i + 1, -1, g, gp) * &g.diff(i);
                    defect.at(i, g, gp) != &dh + &hd
                });
                checks.push(check(
                    "pi' rho' - rho pi = dh + hd",
                    bad.is_none(),
                    format!("fails in degree {bad:?}"),
                ));
            } else if structural_ok {
                let defect = w.defect();
                let bad = g
                    .support()
                    .into_iter()
                    .find(|&i| !defect.on_cohomology(i, g, gp).is_zero());
                checks.push(check(
                    "square commutes on cohomology",
                    bad.is_none(),
                    format!("fails in degree {bad:?}"),
                ));
            }
        }
    }

    if checks.iter().all(|c| c.passed) {
        let passed = match w.resolve_homotopy() {
            None => check("cone map is an isomorphism", false, "no homotopy exists"),
            Some(h) => {
                let (c1, c2, phi) = w.cone_map(&h);
                if let Some(i) = phi.chain_defect(&c1, &c2) {
                    check("cone map is an isomorphism", false, format!("cone map is not a chain map in degree {i}"))
                } else {
                    let cone = c1.cone(&c2, &phi);
                    let betti = cone.betti();
                    check(
                        "cone map is an isomorphism",
                        betti.is_empty(),
                        format!("cone of the cone map has cohomology {betti:?}"),
                    )
                }
            }
        };
        checks.push(passed);
    }
    WitnessReport { verified: checks.iter().all(|c| c.passed), checks }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessRepr {
    kind: WitnessKind,
    #[serde(rename = "F")]
    f: SelfDualComplex,
    #[serde(rename = "F_prime")]
    f_prime: SelfDualComplex,
    #[serde(rename = "G")]
    g: ComplexRepr,
    #[serde(rename = "G_prime")]
    g_prime: ComplexRepr,
    #[serde(default, with = "degree_matrices")]
    pi: BTreeMap<i32, Matrix<Rational>>,
    #[serde(default, with = "degree_matrices")]
    rho: BTreeMap<i32, Matrix<Rational>>,
    #[serde(default, with = "degree_matrices")]
    rho_prime: BTreeMap<i32, Matrix<Rational>>,
    #[serde(default, with = "degree_matrices")]
    pi_prime: BTreeMap<i32, Matrix<Rational>>,
    #[serde(rename = "S_G", default, with = "degree_matrices")]
    s_g: BTreeMap<i32, Matrix<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "optional_degree_matrices")]
    homotopy: Option<BTreeMap<i32, Matrix<Rational>>>,
}

mod optional_degree_matrices {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &Option<BTreeMap<i32, Matrix<Rational>>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match m {
            Some(m) => degree_matrices::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<BTreeMap<i32, Matrix<Rational>>>, D::Error> {
        degree_matrices::deserialize(d).map(Some)
    }
}

impl Serialize for CobordismWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessRepr {
            kind: self.kind,
            f: self.f.clone(),
            f_prime: self.f_prime.clone(),
            g: ComplexRepr::from_complex(&self.g),
            g_prime: ComplexRepr::from_complex(&self.g_prime),
            pi: self.pi.entries().clone(),
            rho: self.rho.entries().clone(),
            rho_prime: self.rho_prime.entries().clone(),
            pi_prime: self.pi_prime.entries().clone(),
            s_g: self.s_g.blocks().clone(),
            homotopy: self.homotopy.as_ref().map(|h| h.entries().clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CobordismWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = WitnessRepr::deserialize(d)?;
        let build = || -> Result<CobordismWitness> {
            let g = r.g.into_complex()?;
            let gp = r.g_prime.into_complex()?;
            let (f, fp) = (r.f.complex(), r.f_prime.complex());
            let w = CobordismWitness {
                kind: r.kind,
                pi: reshape_map("pi", r.pi, 0, &g, f)?,
                rho: reshape_map("rho", r.rho, 0, f, &gp)?,
                rho_prime: reshape_map("rho_prime", r.rho_prime, 0, &g, fp)?,
                pi_prime: reshape_map("pi_prime", r.pi_prime, 0, fp, &gp)?,
                s_g: reshape_pairing_between(r.s_g, &g, &gp)?,
                homotopy: r.homotopy.map(|h| reshape_map("homotopy", h, -1, &g, &gp)).transpose()?,
                f: r.f.clone(),
                f_prime: r.f_prime.clone(),
                g,
                g_prime: gp,
            };
            Ok(w)
        };
        build().map_err(|e: Error| D::Error::custom(e))
    }
}
