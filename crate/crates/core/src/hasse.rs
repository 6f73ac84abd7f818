//! Signature (1, n): Verschiebung data, the conjugate subspaces 𝓕₁, 𝓕₂, the
//! invariants b, m, hasse₁, hasse₂, the nine-stratum labeling and the closure
//! posets of the refined stratification.
//!
//! Convention. ℰ has the F_p-rational standard frame, so ℰ^{(p)} is identified
//! with ℰ and a subspace W becomes σ(W) (Frobenius on coordinates). The
//! Verschiebung is stored as its linearization M: ℰ → ℰ^{(p)}; the datum
//! requires im M = σ(ω). F is always derived, as the adjoint F = G⁻¹MᵀG.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldDescriptor, Gf, Matrix};
use crate::forms;
use crate::localmodel::{stratum_leq, LMPoint, StratumLabel};
use crate::pimodule::{hyperbolic_gram, split_gram, Pairing, PiSpace, SpaceDescriptor, Subspace};

/// The nine strata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stratum9Label {
    Xord,
    R1,
    R2,
    B0,
    B1,
    B2,
    P0,
    P1,
    P2,
}

impl Stratum9Label {
    pub const ALL: [Stratum9Label; 9] = [
        Stratum9Label::Xord,
        Stratum9Label::R1,
        Stratum9Label::R2,
        Stratum9Label::B0,
        Stratum9Label::B1,
        Stratum9Label::B2,
        Stratum9Label::P0,
        Stratum9Label::P1,
        Stratum9Label::P2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stratum9Label::Xord => "Xord",
            Stratum9Label::R1 => "R1",
            Stratum9Label::R2 => "R2",
            Stratum9Label::B0 => "B0",
            Stratum9Label::B1 => "B1",
            Stratum9Label::B2 => "B2",
            Stratum9Label::P0 => "P0",
            Stratum9Label::P1 => "P1",
            Stratum9Label::P2 => "P2",
        }
    }

    /// The coarse (h, ℓ) stratum: R-type → (1,1), B-type → (0,0), P-type → (0,1).
    pub fn coarse(self) -> StratumLabel {
        use Stratum9Label::*;
        match self {
            Xord | R1 | R2 => StratumLabel::new(1, 1),
            B0 | B1 | B2 => StratumLabel::new(0, 0),
            P0 | P1 | P2 => StratumLabel::new(0, 1),
        }
    }

    /// R₁ and P₁ only exist for n ≥ 3.
    pub fn exists_for(self, n: usize) -> bool {
        n >= 3 || !matches!(self, Stratum9Label::R1 | Stratum9Label::P1)
    }
}

impl fmt::Display for Stratum9Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stratum9Label {
    type Err = Error;
    fn from_str(s: &str) -> Result<Stratum9Label> {
        Stratum9Label::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown stratum `{s}`")))
    }
}

/// A label together with the signature parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum9 {
    pub label: Stratum9Label,
    pub n: usize,
}

/// Vanishing pattern of (b, m, hasse₁, hasse₂) at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Invariants4 {
    pub b_nonzero: bool,
    pub m_nonzero: bool,
    pub hasse1_zero: bool,
    pub hasse2_zero: bool,
}

impl fmt::Display for Invariants4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = |zero: bool| if zero { "=0" } else { "≠0" };
        write!(
            f,
            "b{} m{} hasse1{} hasse2{}",
            z(!self.b_nonzero),
            z(!self.m_nonzero),
            z(self.hasse1_zero),
            z(self.hasse2_zero)
        )
    }
}

/// Match a vanishing pattern against the nine defining patterns.
pub fn classify_pattern(inv: Invariants4) -> Result<Stratum9Label> {
    use Stratum9Label::*;
    let Invariants4 { b_nonzero: b, m_nonzero: m, hasse1_zero: h1, hasse2_zero: h2 } = inv;
    let label = match (b, m) {
        (true, true) => None,
        (false, true) if !h2 => Some(Xord),
        (false, true) if h1 => Some(R2),
        (false, true) => Some(R1),
        (true, false) => match (h1, h2) {
            (false, false) => Some(B0),
            (false, true) => Some(B1),
            (true, false) => Some(B2),
            (true, true) => None,
        },
        (false, false) => match (h1, h2) {
            (false, false) => Some(P0),
            (false, true) => Some(P1),
            (true, true) => Some(P2),
            (true, false) => None,
        },
    };
    label.ok_or_else(|| Error::NoStratum(inv.to_string()))
}

/// A point ω₁ ⊆ ω of the signature-(1, n) special fibre with a Verschiebung.
#[derive(Debug, Clone)]
pub struct DieudonneDatum {
    space: PiSpace,
    point: LMPoint,
    v: Matrix,
    unit: Option<Elem>,
}

impl DieudonneDatum {
    /// Validate and record the unit of the F∘V condition.
    pub fn new(space: PiSpace, point: LMPoint, v: Matrix) -> Result<DieudonneDatum> {
        let unit = check_datum(&space, &point, &v)?;
        Ok(DieudonneDatum { space, point, v, unit })
    }

    pub fn space(&self) -> &PiSpace {
        &self.space
    }
    pub fn point(&self) -> &LMPoint {
        &self.point
    }
    pub fn v(&self) -> &Matrix {
        &self.v
    }
    /// The unit c with F z ≡ c·Π y mod Π(ker V) (see [`check_datum`]); `None`
    /// when the condition does not involve it.
    pub fn unit(&self) -> Option<Elem> {
        self.unit
    }
    pub fn n(&self) -> usize {
        self.space.b()
    }

    /// F = G⁻¹VᵀG, so that ⟨F x, y⟩ = ⟨x, V y⟩.
    pub fn f(&self) -> Matrix {
        adjoint(&self.space, &self.v)
    }

    pub fn omega2(&self) -> Subspace {
        self.space.orthogonal(&self.point.omega1, Pairing::Modified).expect("ω₁ ⊆ ker Π")
    }

    fn omega_i(&self, i: usize) -> Result<Subspace> {
        match i {
            1 => Ok(self.point.omega1.clone()),
            2 => Ok(self.omega2()),
            _ => Err(Error::Precondition(format!("conjugate index must be 1 or 2, got {i}"))),
        }
    }

    /// 𝓕ᵢ = Π·V⁻¹(σ(ωᵢ)).
    pub fn conjugate_f(&self, i: usize) -> Result<Subspace> {
        let gf = self.space.field();
        let w = self.omega_i(i)?.frobenius(gf);
        Ok(self.space.pi_image(&w.preimage_under(gf, &self.v)?))
    }

    /// 𝓕ᵢ recomputed from F: V⁻¹(W) = (F(W^⊥))^⊥ for the alternating pairing.
    pub fn conjugate_f_dual(&self, i: usize) -> Result<Subspace> {
        let gf = self.space.field();
        let w = self.omega_i(i)?.frobenius(gf);
        let wp = self.space.orthogonal(&w, Pairing::Alternating)?;
        let fw = wp.image_under(gf, &self.f())?;
        Ok(self.space.pi_image(&self.space.orthogonal(&fw, Pairing::Alternating)?))
    }

    /// New datum after x ↦ g x for a Π-linear isometry g: V ↦ σ(g)·V·g⁻¹.
    pub fn transform(&self, g: &Matrix) -> Result<DieudonneDatum> {
        let gf = self.space.field();
        let gi = gf.inverse(g).ok_or_else(|| Error::Precondition("singular transformation".into()))?;
        let v = gf.mat_mul3(&gf.mat_frobenius(g), &self.v, &gi);
        DieudonneDatum::new(self.space.clone(), self.point.transform(&self.space, g), v)
    }

    pub fn to_record(&self) -> DatumRecord {
        DatumRecord {
            space: self.space.descriptor(),
            omega1: self.point.omega1.basis().clone(),
            omega: self.point.omega.basis().clone(),
            v: self.v.clone(),
            unit: self.unit,
        }
    }

    pub fn from_record(r: &DatumRecord) -> Result<DieudonneDatum> {
        let space = r.space.build()?;
        let gf = space.field();
        let point = LMPoint::new(&space, Subspace::span(gf, &r.omega1), Subspace::span(gf, &r.omega))?;
        let d = DieudonneDatum::new(space, point, r.v.clone())?;
        if d.unit != r.unit {
            return Err(Error::InvalidDatum("recorded unit does not match the recomputed one".into()));
        }
        Ok(d)
    }
}

/// Serializable datum; `from_record` revalidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumRecord {
    pub space: SpaceDescriptor,
    pub omega1: Matrix,
    pub omega: Matrix,
    pub v: Matrix,
    pub unit: Option<Elem>,
}

fn adjoint(space: &PiSpace, v: &Matrix) -> Matrix {
    let gf = space.field();
    let g = space.gram();
    let gi = gf.inverse(g).expect("perfect pairing");
    gf.mat_mul3(&gi, &v.transpose(), g)
}

fn invalid(msg: &str) -> Error {
    Error::InvalidDatum(msg.into())
}

/// Check every datum condition and return the unit.
///
/// The unit condition: for y ∈ V⁻¹(ker Π) and z with Π z = V y, the class of
/// F z modulo Π(ker V) equals c·Π y for one c ∈ k^× independent of y.
pub fn check_datum(space: &PiSpace, point: &LMPoint, v: &Matrix) -> Result<Option<Elem>> {
    let gf = space.field();
    let n2 = space.dim();
    if space.a() != 1 {
        return Err(Error::Precondition(format!("signature must be (1,n), got a={}", space.a())));
    }
    if v.shape() != (n2, n2) {
        return Err(Error::Shape(format!("V must be {n2}×{n2}")));
    }
    point.validate(space)?;
    let pi = space.pi();
    if gf.mat_mul(pi, v) != gf.mat_mul(v, pi) {
        return Err(invalid("V does not commute with Π"));
    }
    let image = Subspace::span(gf, v);
    if image != point.omega.frobenius(gf) {
        return Err(invalid("im V ≠ σ(ω)"));
    }
    let ker = Subspace::span(gf, &gf.kernel(v));
    if ker.dim() != space.m() || !space.is_isotropic(&ker) {
        return Err(invalid("ker V is not Lagrangian"));
    }
    let f = adjoint(space, v);
    let k = space.pi_image(&ker);
    let section = space.pi_section();
    let n = space.ker_pi().preimage_under(gf, v)?;
    let mut pairs = Vec::new();
    for y in n.vectors() {
        let z = gf.mat_vec(&section, &gf.mat_vec(v, &y));
        pairs.push((gf.mat_vec(&f, &z), gf.mat_vec(pi, &y)));
    }
    let works = |c: Elem| {
        pairs.iter().all(|(r, s)| {
            let d: Vec<Elem> = r.iter().zip(s).map(|(&x, &y)| gf.sub(x, gf.mul(c, y))).collect();
            k.contains_vec(gf, &d)
        })
    };
    if pairs.iter().all(|(_, s)| k.contains_vec(gf, s)) {
        return if works(0) { Ok(None) } else { Err(invalid("F∘V is not a multiple of Π")) };
    }
    let units: Vec<Elem> = gf.nonzero().filter(|&c| works(c)).collect();
    match units.as_slice() {
        [c] => Ok(Some(*c)),
        [] => Err(invalid("no unit u with F_π∘V_π = u")),
        _ => Err(Error::Inconsistent("unit of the F∘V condition is not unique".into())),
    }
}

/// [`DieudonneDatum::conjugate_f`] as a free function.
pub fn conjugate_f(datum: &DieudonneDatum, i: usize) -> Result<Subspace> {
    datum.conjugate_f(i)
}

/// b ≠ 0 ⇔ ω₁ ⊄ ω₂; m ≠ 0 ⇔ Π ω ≠ 0; hasse₂ = 0 ⇔ ω₁ ⊆ 𝓕₂; hasse₁ = 0 ⇔ ω₁ = 𝓕₁.
pub fn invariants4(datum: &DieudonneDatum) -> Result<Invariants4> {
    let gf = datum.space.field();
    let w1 = &datum.point.omega1;
    let f1 = datum.conjugate_f(1)?;
    let f2 = datum.conjugate_f(2)?;
    Ok(Invariants4 {
        b_nonzero: !datum.omega2().contains(gf, w1)?,
        m_nonzero: datum.space.pi_image(&datum.point.omega).dim() > 0,
        hasse1_zero: *w1 == f1,
        hasse2_zero: f2.contains(gf, w1)?,
    })
}

pub fn stratum9(datum: &DieudonneDatum) -> Result<Stratum9> {
    let n = datum.n();
    let label = classify_pattern(invariants4(datum)?)?;
    if !label.exists_for(n) {
        return Err(Error::NoStratum(format!("{label} is empty for n = {n}")));
    }
    Ok(Stratum9 { label, n })
}

/// Every structural property a datum must satisfy beyond validity; returns
/// the list of failures (empty when all hold).
pub fn datum_property_failures(datum: &DieudonneDatum) -> Result<Vec<String>> {
    let gf = datum.space.field();
    let n = datum.n();
    let mut out = Vec::new();
    let f1 = datum.conjugate_f(1)?;
    let f2 = datum.conjugate_f(2)?;
    if f1.dim() != 1 || f2.dim() != n {
        out.push(format!("dim 𝓕₁ = {}, dim 𝓕₂ = {}", f1.dim(), f2.dim()));
    }
    if !datum.space.in_ker(&f2) {
        out.push("𝓕₂ ⊄ ker Π".into());
    }
    if f1.dim() == 1 && datum.space.orthogonal(&f1, Pairing::Modified)? != f2 {
        out.push("𝓕₂ ≠ 𝓕₁^⊥'".into());
    }
    if datum.conjugate_f_dual(1)? != f1 || datum.conjugate_f_dual(2)? != f2 {
        out.push("𝓕ᵢ disagrees with the computation through F".into());
    }
    let b_zero = datum.omega2().contains(gf, &datum.point.omega1)?;
    if b_zero && !f2.contains(gf, &f1)? {
        out.push("ω₁ ⊆ ω₂ but 𝓕₁ ⊄ 𝓕₂".into());
    }
    let inv = invariants4(datum)?;
    if inv.b_nonzero && inv.m_nonzero {
        out.push("b·m ≠ 0".into());
    }
    if !inv.b_nonzero && inv.hasse1_zero && !inv.hasse2_zero {
        out.push("b = 0 and hasse₁ = 0 but hasse₂ ≠ 0".into());
    }
    if inv.b_nonzero && inv.hasse1_zero && inv.hasse2_zero {
        out.push("b ≠ 0 with hasse₁ = hasse₂ = 0".into());
    }
    match stratum9(datum) {
        Ok(st) => {
            let coarse = datum.point.invariants(&datum.space)?;
            if st.label.coarse() != coarse {
                out.push(format!("{} refines {} but the point lies in {coarse}", st.label, st.label.coarse()));
            }
        }
        Err(e) => out.push(e.to_string()),
    }
    Ok(out)
}

/// Closure sets of the nine-stratum stratification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset9 {
    n: usize,
    closures: BTreeMap<Stratum9Label, BTreeSet<Stratum9Label>>,
}

/// Result of the internal consistency checks on a [`Poset9`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PosetCheck {
    pub reflexive: bool,
    pub transitive: bool,
    pub antisymmetric: bool,
    pub coarse_compatible: bool,
}

impl PosetCheck {
    pub fn passed(&self) -> bool {
        self.reflexive && self.transitive && self.antisymmetric && self.coarse_compatible
    }
}

/// The closure sets stated for n ≥ 2 (before removing the empty strata) and n = 1.
fn closure_table(n: usize) -> Vec<(Stratum9Label, Vec<Stratum9Label>)> {
    use Stratum9Label::*;
    if n == 1 {
        return vec![
            (Xord, vec![Xord, P0]),
            (R2, vec![R2, P2]),
            (B0, vec![B0, B1, B2, P0, P2]),
            (B1, vec![B1]),
            (B2, vec![B2]),
            (P0, vec![P0]),
            (P2, vec![P2]),
        ];
    }
    vec![
        (Xord, vec![Xord, R1, R2, P0, P1, P2]),
        (R1, vec![R1, R2, P1, P2]),
        (R2, vec![R2, P2]),
        (B0, vec![B0, B1, B2, P0, P1, P2]),
        (B1, vec![B1, P1, P2]),
        (B2, vec![B2]),
        (P0, vec![P0, P1, P2]),
        (P1, vec![P1, P2]),
        (P2, vec![P2]),
    ]
}

/// Closure poset over the strata that exist for this n.
pub fn poset9(n: usize) -> Result<Poset9> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let closures = closure_table(n)
        .into_iter()
        .filter(|(l, _)| l.exists_for(n))
        .map(|(l, cl)| (l, cl.into_iter().filter(|x| x.exists_for(n)).collect()))
        .collect();
    Ok(Poset9 { n, closures })
}

impl Poset9 {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Vec<Stratum9Label> {
        self.closures.keys().copied().collect()
    }

    pub fn closure(&self, l: Stratum9Label) -> Option<&BTreeSet<Stratum9Label>> {
        self.closures.get(&l)
    }

    /// `lower` lies in the closure of `upper`.
    pub fn leq(&self, lower: Stratum9Label, upper: Stratum9Label) -> bool {
        self.closures.get(&upper).is_some_and(|c| c.contains(&lower))
    }

    pub fn open_strata(&self) -> Vec<Stratum9Label> {
        self.labels().into_iter().filter(|&l| self.labels().iter().all(|&u| u == l || !self.leq(l, u))).collect()
    }

    pub fn closed_strata(&self) -> Vec<Stratum9Label> {
        self.labels().into_iter().filter(|&l| self.closures[&l].len() == 1).collect()
    }

    /// All non-reflexive relations as [lower, upper], grouped by upper.
    pub fn edges(&self) -> Vec<[Stratum9Label; 2]> {
        let mut out = Vec::new();
        for (&u, cl) in &self.closures {
            for &l in cl {
                if l != u {
                    out.push([l, u]);
                }
            }
        }
        out
    }

    pub fn check(&self) -> PosetCheck {
        let labels = self.labels();
        let reflexive = labels.iter().all(|&l| self.leq(l, l));
        let transitive = labels.iter().all(|&u| {
            self.closures[&u].iter().all(|&mid| self.closures.get(&mid).is_some_and(|c| c.is_subset(&self.closures[&u])))
        });
        let antisymmetric = labels
            .iter()
            .all(|&x| labels.iter().all(|&y| x == y || !(self.leq(x, y) && self.leq(y, x))));
        let coarse_compatible = self.edges().iter().all(|[l, u]| stratum_leq(l.coarse(), u.coarse()));
        PosetCheck { reflexive, transitive, antisymmetric, coarse_compatible }
    }

    /// Fixture layout: one edge per line.
    pub fn to_fixture_json(&self) -> String {
        let mut s = format!("{{\n  \"n\": {},\n  \"edges\": [\n", self.n);
        let edges = self.edges();
        for (i, [l, u]) in edges.iter().enumerate() {
            let sep = if i + 1 < edges.len() { "," } else { "" };
            s.push_str(&format!("    [\"{l}\", \"{u}\"]{sep}\n"));
        }
        s.push_str("  ]\n}\n");
        s
    }
}

/// Serializable view of a poset.
#[derive(Debug, Clone, Serialize)]
pub struct PosetExport {
    pub n: usize,
    pub labels: Vec<Stratum9Label>,
    pub open: Vec<Stratum9Label>,
    pub closed: Vec<Stratum9Label>,
    pub edges: Vec<[Stratum9Label; 2]>,
    pub check: PosetCheck,
}

impl From<&Poset9> for PosetExport {
    fn from(p: &Poset9) -> PosetExport {
        PosetExport {
            n: p.n,
            labels: p.labels(),
            open: p.open_strata(),
            closed: p.closed_strata(),
            edges: p.edges(),
            check: p.check(),
        }
    }
}

/// Modified Gram matrix of the search frame: the hyperbolic form for odd p; in
/// characteristic 2 hyperbolic blocks, with one diagonal 1 when n + 1 is odd.
pub fn search_gram(gf: &Gf, n: usize) -> Matrix {
    let m = n + 1;
    if gf.p() != 2 {
        return hyperbolic_gram(1, n);
    }
    if m % 2 == 0 {
        split_gram(m)
    } else {
        let mut one = Matrix::zeros(1, 1);
        one[(0, 0)] = 1;
        Matrix::block_diag(&[&one, &split_gram(m - 1)])
    }
}

pub fn search_space(gf: Arc<Gf>, n: usize) -> Result<PiSpace> {
    let q = search_gram(&gf, n);
    PiSpace::from_modified_gram(1, n, gf, &q)
}

/// The involution i ↦ τ(i) of a symmetric permutation matrix.
fn pairing_of(q: &Matrix) -> Vec<usize> {
    (0..q.rows()).map(|i| (0..q.cols()).find(|&j| q[(i, j)] != 0).expect("permutation matrix")).collect()
}

fn random_matrix(gf: &Gf, r: usize, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_vec(r, c, (0..r * c).map(|_| rng.gen_range(0..gf.order())).collect())
}

/// g₀ with g₀ᵀ Q g₀ = Q, as R·h⁻¹ where hᵀQh = RᵀQR.
fn random_orthogonal(gf: &Gf, q: &Matrix, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let m = q.rows();
    loop {
        let r = random_matrix(gf, m, m, rng);
        if gf.inverse(&r).is_none() {
            continue;
        }
        let h = forms::isometry(gf, &gf.mat_mul3(&r.transpose(), q, &r), q)?;
        return Ok(gf.mat_mul(&r, &gf.inverse(&h).expect("isometry is invertible")));
    }
}

/// A Π-linear isometry g₀ + πg₀S of ℰ, with QS symmetric.
pub fn random_unitary(gf: &Gf, q: &Matrix, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let m = q.rows();
    let g0 = random_orthogonal(gf, q, rng)?;
    let mut sym = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let x = rng.gen_range(0..gf.order());
            sym[(i, j)] = x;
            sym[(j, i)] = x;
        }
    }
    let s1 = gf.mat_mul(&gf.inverse(q).expect("perfect form"), &sym);
    let mut g = Matrix::zeros(2 * m, 2 * m);
    g.set_block(0, 0, &g0);
    g.set_block(m, m, &g0);
    g.set_block(m, 0, &gf.mat_mul(&g0, &s1));
    Ok(g)
}

/// Diagonal Verschiebung: every τ-pair gets (π, π) except possibly one pair
/// which gets (1, 0) or (0, 1); fixed indices get π.
fn random_diagonal(tau: &[usize], rng: &mut ChaCha8Rng) -> Matrix {
    let m = tau.len();
    let pairs: Vec<usize> = (0..m).filter(|&i| tau[i] > i).collect();
    let mut unit = vec![false; m];
    if !pairs.is_empty() && rng.gen_bool(0.5) {
        let i = pairs[rng.gen_range(0..pairs.len())];
        let j = tau[i];
        if rng.gen_bool(0.5) {
            unit[i] = true;
        } else {
            unit[j] = true;
        }
    }
    let paired_with_unit = |i: usize| unit[i] || unit[tau[i]];
    let mut d = Matrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        if unit[i] {
            d[(i, i)] = 1;
            d[(m + i, m + i)] = 1;
        } else if !paired_with_unit(i) {
            d[(m + i, i)] = 1;
        }
    }
    d
}

fn random_line(gf: &Gf, inside: &Subspace, rng: &mut ChaCha8Rng) -> Subspace {
    loop {
        let c = random_matrix(gf, inside.dim(), 1, rng);
        let v = gf.mat_mul(inside.basis(), &c);
        if !v.is_zero() {
            return Subspace::span(gf, &v);
        }
    }
}

/// One candidate datum: V = g₁·D·g₂, ω = σ⁻¹(im V), ω₁ = Π ω or a random line.
pub fn random_datum(space: &PiSpace, rng: &mut ChaCha8Rng) -> Result<DieudonneDatum> {
    let gf = space.field();
    let q = space.modified_form().gram;
    let tau = pairing_of(&q);
    let g1 = random_unitary(gf, &q, rng)?;
    let g2 = random_unitary(gf, &q, rng)?;
    let v = gf.mat_mul3(&g1, &random_diagonal(&tau, rng), &g2);
    let omega = Subspace::span(gf, &v).frobenius_inv(gf);
    let pw = space.pi_image(&omega);
    let omega1 = if pw.dim() > 0 { pw } else { random_line(gf, &omega, rng) };
    let point = LMPoint::new(space, omega1, omega)?;
    DieudonneDatum::new(space.clone(), point, v)
}

/// A datum with its label.
#[derive(Debug, Clone)]
pub struct LabeledDatum {
    pub datum: DieudonneDatum,
    pub label: Stratum9Label,
}

/// Aggregate of a search run.
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub field: FieldDescriptor,
    pub budget: usize,
    pub seed: u64,
    pub accepted: usize,
    pub rejected: usize,
    pub realized: BTreeMap<Stratum9Label, u64>,
    /// Data failing a structural property; always expected to be zero.
    pub property_failures: usize,
    pub failure_messages: Vec<String>,
    /// Realized labels that cannot occur for this n.
    pub forbidden_labels: Vec<Stratum9Label>,
    /// One datum per realized label.
    pub representatives: BTreeMap<Stratum9Label, DatumRecord>,
}

impl SearchReport {
    pub fn passed(&self) -> bool {
        self.property_failures == 0 && self.forbidden_labels.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub data: Vec<LabeledDatum>,
    pub report: SearchReport,
}

/// Largest n and q accepted by [`search_examples`].
pub const SEARCH_MAX_N: usize = 3;
pub const SEARCH_MAX_Q: u32 = 9;

/// Generate `budget` candidates (attempt i seeded from (seed, i)), keep the
/// valid ones and label them.
pub fn search_examples(n: usize, gf: Arc<Gf>, budget: usize, seed: u64) -> Result<SearchOutcome> {
    if n == 0 || n > SEARCH_MAX_N || gf.order() > SEARCH_MAX_Q {
        return Err(Error::Precondition(format!(
            "search needs 1 ≤ n ≤ {SEARCH_MAX_N} and q ≤ {SEARCH_MAX_Q}, got n={n}, q={}",
            gf.order()
        )));
    }
    let space = search_space(gf.clone(), n)?;
    let results: Vec<Result<Option<(LabeledDatum, Vec<String>)>>> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
            let datum = match random_datum(&space, &mut rng) {
                Ok(d) => d,
                Err(Error::InvalidDatum(_) | Error::InvalidPoint(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let failures = datum_property_failures(&datum)?;
            let label = classify_pattern(invariants4(&datum)?).unwrap_or(Stratum9Label::Xord);
            Ok(Some((LabeledDatum { datum, label }, failures)))
        })
        .collect();
    let mut report = SearchReport {
        n,
        field: gf.descriptor(),
        budget,
        seed,
        accepted: 0,
        rejected: 0,
        realized: BTreeMap::new(),
        property_failures: 0,
        failure_messages: Vec::new(),
        forbidden_labels: Vec::new(),
        representatives: BTreeMap::new(),
    };
    let mut data = Vec::new();
    for r in results {
        match r? {
            None => report.rejected += 1,
            Some((ld, failures)) => {
                report.accepted += 1;
                if !failures.is_empty() {
                    report.property_failures += 1;
                    if report.failure_messages.len() < 10 {
                        report.failure_messages.push(failures.join("; "));
                    }
                    continue;
                }
                *report.realized.entry(ld.label).or_insert(0) += 1;
                report.representatives.entry(ld.label).or_insert_with(|| ld.datum.to_record());
                data.push(ld);
            }
        }
    }
    report.forbidden_labels = report.realized.keys().copied().filter(|l| !l.exists_for(n)).collect();
    Ok(SearchOutcome { data, report })
}
