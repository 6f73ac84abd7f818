//! The ambient k[π]/(π²)-module ℰ with its alternating pairing, the modified
//! symmetric pairing on ker Π, and a calculus of subspaces in canonical form.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldDescriptor, Gf, Matrix};

/// Class of the modified form: always `OddChar` for p odd; in characteristic 2
/// case 1 means q(x) = {x,x} is not identically zero, case 2 that it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormCase {
    #[serde(rename = "odd-char")]
    OddChar,
    #[serde(rename = "char2-case1")]
    Char2Case1,
    #[serde(rename = "char2-case2")]
    Char2Case2,
}

impl FormCase {
    pub fn name(self) -> &'static str {
        match self {
            FormCase::OddChar => "odd-char",
            FormCase::Char2Case1 => "char2-case1",
            FormCase::Char2Case2 => "char2-case2",
        }
    }

    /// Default case for a characteristic: odd-char, or case 1 in characteristic 2.
    pub fn default_for(p: u32) -> FormCase {
        if p == 2 {
            FormCase::Char2Case1
        } else {
            FormCase::OddChar
        }
    }
}

impl fmt::Display for FormCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FormCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<FormCase> {
        match s {
            "odd-char" | "odd" => Ok(FormCase::OddChar),
            "char2-case1" | "case1" | "1" => Ok(FormCase::Char2Case1),
            "char2-case2" | "case2" | "2" => Ok(FormCase::Char2Case2),
            other => Err(Error::Parse(format!("unknown case `{other}`"))),
        }
    }
}

/// A subspace of k^n, stored by a basis whose transpose is in reduced row
/// echelon form. The representation is unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Span of the columns of `m`.
    pub fn span(gf: &Gf, m: &Matrix) -> Subspace {
        let ech = gf.rref(&m.transpose());
        let d = ech.pivots.len();
        let rows = ech.reduced.block(0, 0, d, m.rows());
        Subspace { basis: rows.transpose() }
    }

    pub fn span_vecs(gf: &Gf, n: usize, vecs: &[Vec<Elem>]) -> Subspace {
        Subspace::span(gf, &Matrix::from_cols(n, vecs))
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace { basis: Matrix::zeros(n, 0) }
    }

    pub fn whole(n: usize) -> Subspace {
        Subspace { basis: Matrix::identity(n) }
    }

    /// Wrap a matrix already in canonical form (no check beyond debug builds).
    fn from_canonical(basis: Matrix) -> Subspace {
        Subspace { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
    pub fn ambient(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    pub fn vectors(&self) -> Vec<Vec<Elem>> {
        self.basis.to_cols()
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::AmbientMismatch(self.ambient(), other.ambient()));
        }
        Ok(())
    }

    /// Rows spanning the annihilator: `A` with `A w = 0` exactly for w in the subspace.
    pub fn equations(&self, gf: &Gf) -> Matrix {
        gf.kernel(&self.basis.transpose()).transpose()
    }

    pub fn contains_vec(&self, gf: &Gf, v: &[Elem]) -> bool {
        let eq = self.equations(gf);
        gf.mat_vec(&eq, v).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, gf: &Gf, other: &Subspace) -> Result<bool> {
        self.check(other)?;
        Ok(gf.mat_mul(&self.equations(gf), &other.basis).is_zero())
    }

    pub fn sum(&self, gf: &Gf, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Ok(Subspace::span(gf, &self.basis.hcat(&other.basis)))
    }

    pub fn intersect(&self, gf: &Gf, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let eq = self.equations(gf).vcat(&other.equations(gf));
        Ok(Subspace::span(gf, &gf.kernel(&eq)))
    }

    /// M·W for a linear map M : k^n → k^r.
    pub fn image_under(&self, gf: &Gf, m: &Matrix) -> Result<Subspace> {
        if m.cols() != self.ambient() {
            return Err(Error::AmbientMismatch(m.cols(), self.ambient()));
        }
        Ok(Subspace::span(gf, &gf.mat_mul(m, &self.basis)))
    }

    /// M⁻¹(W) = {x : M x ∈ W} for M : k^r → k^n.
    pub fn preimage_under(&self, gf: &Gf, m: &Matrix) -> Result<Subspace> {
        if m.rows() != self.ambient() {
            return Err(Error::AmbientMismatch(m.rows(), self.ambient()));
        }
        let eq = gf.mat_mul(&self.equations(gf), m);
        Ok(Subspace::span(gf, &gf.kernel(&eq)))
    }

    /// Coordinatewise Frobenius twist W^{(p)}.
    pub fn frobenius(&self, gf: &Gf) -> Subspace {
        Subspace::from_canonical(gf.mat_frobenius(&self.basis))
    }

    pub fn frobenius_inv(&self, gf: &Gf) -> Subspace {
        Subspace::from_canonical(gf.mat_frobenius_inv(&self.basis))
    }

    /// Some complement of `self` inside `outer`, as basis columns.
    pub fn complement_in(&self, gf: &Gf, outer: &Subspace) -> Result<Matrix> {
        self.check(outer)?;
        let mut cur = self.basis.clone();
        let mut rank = self.dim();
        let mut extra = Vec::new();
        for v in outer.vectors() {
            let trial = cur.hcat(&Matrix::from_cols(v.len(), &[v.clone()]));
            let r = gf.rank(&trial);
            if r > rank {
                cur = trial;
                rank = r;
                extra.push(v);
            }
        }
        Ok(Matrix::from_cols(self.ambient(), &extra))
    }
}

/// Which pairing an orthogonal complement is taken for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// The alternating pairing ⟨,⟩ on ℰ.
    Alternating,
    /// The modified symmetric pairing {,} on ker Π.
    Modified,
}

/// The modified pairing {πx, πy} = ⟨πx, y⟩ in a fixed basis of ker Π.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifiedForm {
    pub basis: Matrix,
    pub gram: Matrix,
}

/// The ambient space ℰ of rank m = a + b over k[π]/(π²).
#[derive(Clone)]
pub struct PiSpace {
    gf: Arc<Gf>,
    a: usize,
    b: usize,
    pi: Matrix,
    gram: Matrix,
    case: FormCase,
    ker: Matrix,
    ker_left: Matrix,
    lift: Matrix,
    modified: Matrix,
}

impl fmt::Debug for PiSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiSpace")
            .field("field", &self.gf.descriptor())
            .field("a", &self.a)
            .field("b", &self.b)
            .field("case", &self.case)
            .finish()
    }
}

/// The symmetric matrix [[0,0,I_s],[0,I_{m−2s},0],[I_s,0,0]] with s = min(a,b).
pub fn hyperbolic_gram(a: usize, b: usize) -> Matrix {
    let m = a + b;
    let s = a.min(b);
    let mut q = Matrix::zeros(m, m);
    for i in 0..s {
        q[(i, m - s + i)] = 1;
        q[(m - s + i, i)] = 1;
    }
    for i in s..m - s {
        q[(i, i)] = 1;
    }
    q
}

/// The block-diagonal matrix with blocks [[0,1],[1,0]].
pub fn split_gram(m: usize) -> Matrix {
    let mut q = Matrix::zeros(m, m);
    for i in (0..m).step_by(2) {
        q[(i, i + 1)] = 1;
        q[(i + 1, i)] = 1;
    }
    q
}

/// Π in the frame e_1..e_m, πe_1..πe_m.
pub fn standard_pi(m: usize) -> Matrix {
    let mut pi = Matrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        pi[(m + i, i)] = 1;
    }
    pi
}

/// ⟨,⟩ in the same frame for the modified Gram matrix `q`: [[0,−Q],[Q,0]].
pub fn standard_gram(gf: &Gf, q: &Matrix) -> Matrix {
    let m = q.rows();
    let mut g = Matrix::zeros(2 * m, 2 * m);
    g.set_block(0, m, &gf.mat_neg(q));
    g.set_block(m, 0, q);
    g
}

fn classify_case(gf: &Gf, modified: &Matrix) -> FormCase {
    if gf.p() != 2 {
        FormCase::OddChar
    } else if (0..modified.rows()).any(|i| modified[(i, i)] != 0) {
        FormCase::Char2Case1
    } else {
        FormCase::Char2Case2
    }
}

impl PiSpace {
    /// The standard model: modified Gram [[0,0,I],[0,I,0],[I,0,0]] for odd p,
    /// the identity for char2-case1, blocks [[0,1],[1,0]] for char2-case2.
    pub fn standard(a: usize, b: usize, gf: Arc<Gf>, case: FormCase) -> Result<PiSpace> {
        let odd = gf.p() != 2;
        let q = match case {
            FormCase::OddChar if odd => hyperbolic_gram(a, b),
            FormCase::Char2Case1 if !odd => Matrix::identity(a + b),
            FormCase::Char2Case2 if !odd => {
                if (a + b) % 2 != 0 {
                    return Err(Error::Parity(format!(
                        "char2-case2 needs a+b even, got a+b={}",
                        a + b
                    )));
                }
                split_gram(a + b)
            }
            _ => return Err(Error::CaseMismatch { case: case.name().into(), p: gf.p() }),
        };
        PiSpace::from_modified_gram(a, b, gf, &q)
    }

    /// Standard frame with an arbitrary symmetric invertible modified Gram matrix.
    pub fn from_modified_gram(a: usize, b: usize, gf: Arc<Gf>, q: &Matrix) -> Result<PiSpace> {
        let m = a + b;
        if q.shape() != (m, m) {
            return Err(Error::Shape(format!("modified Gram must be {m}×{m}")));
        }
        let pi = standard_pi(m);
        let gram = standard_gram(&gf, q);
        PiSpace::from_matrices(a, b, gf, pi, gram)
    }

    /// General frame; all structural invariants are checked.
    pub fn from_matrices(a: usize, b: usize, gf: Arc<Gf>, pi: Matrix, gram: Matrix) -> Result<PiSpace> {
        let m = a + b;
        let n = 2 * m;
        if a > b {
            return Err(Error::Precondition(format!("expected a ≤ b, got ({a},{b})")));
        }
        if pi.shape() != (n, n) || gram.shape() != (n, n) {
            return Err(Error::Shape(format!("Π and G must be {n}×{n}")));
        }
        if !gf.mat_mul(&pi, &pi).is_zero() {
            return Err(Error::Precondition("Π² ≠ 0".into()));
        }
        if gf.rank(&pi) != m {
            return Err(Error::Precondition("rank Π ≠ m".into()));
        }
        if !gf.is_alternating(&gram) || gf.inverse(&gram).is_none() {
            return Err(Error::Precondition("G is not a perfect alternating form".into()));
        }
        let compat = gf.mat_add(&gf.mat_mul(&pi.transpose(), &gram), &gf.mat_mul(&gram, &pi));
        if !compat.is_zero() {
            return Err(Error::Precondition("⟨Πx,y⟩ + ⟨x,Πy⟩ ≠ 0".into()));
        }
        let ker = Subspace::span(&gf, &gf.kernel(&pi)).basis().clone();
        if !gf.mat_mul3(&ker.transpose(), &gram, &ker).is_zero() {
            return Err(Error::Precondition("ker Π is not isotropic".into()));
        }
        let lift = gf.solve(&pi, &ker).expect("ker Π = im Π");
        let pivots = gf.rref(&ker.transpose()).pivots;
        let sub_inv = gf.inverse(&ker.select_rows(&pivots)).expect("pivot block invertible");
        let mut ker_left = Matrix::zeros(m, n);
        for (k, &r) in pivots.iter().enumerate() {
            for i in 0..m {
                ker_left[(i, r)] = sub_inv[(i, k)];
            }
        }
        let modified = gf.mat_mul3(&ker.transpose(), &gram, &lift);
        if !gf.is_symmetric(&modified) || gf.inverse(&modified).is_none() {
            return Err(Error::Precondition("modified pairing is not perfect symmetric".into()));
        }
        let case = classify_case(&gf, &modified);
        Ok(PiSpace { gf, a, b, pi, gram, case, ker, ker_left, lift, modified })
    }

    /// Transport along x ↦ g⁻¹x: Π' = g⁻¹Πg, G' = gᵀGg.
    pub fn change_basis(&self, g: &Matrix) -> Result<PiSpace> {
        let gf = &self.gf;
        let gi = gf.inverse(g).ok_or_else(|| Error::Precondition("singular basis change".into()))?;
        let pi = gf.mat_mul3(&gi, &self.pi, g);
        let gram = gf.mat_mul3(&g.transpose(), &self.gram, g);
        PiSpace::from_matrices(self.a, self.b, self.gf.clone(), pi, gram)
    }

    pub fn field(&self) -> &Gf {
        &self.gf
    }
    pub fn field_arc(&self) -> Arc<Gf> {
        self.gf.clone()
    }
    pub fn a(&self) -> usize {
        self.a
    }
    pub fn b(&self) -> usize {
        self.b
    }
    pub fn m(&self) -> usize {
        self.a + self.b
    }
    pub fn dim(&self) -> usize {
        2 * self.m()
    }
    pub fn pi(&self) -> &Matrix {
        &self.pi
    }
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }
    pub fn case(&self) -> FormCase {
        self.case
    }

    pub fn ker_pi(&self) -> Subspace {
        Subspace::from_canonical(self.ker.clone())
    }

    /// A 2m×2m matrix S with Π S v = v for every v ∈ ker Π.
    pub fn pi_section(&self) -> Matrix {
        self.gf.mat_mul(&self.lift, &self.ker_left)
    }

    pub fn modified_form(&self) -> ModifiedForm {
        ModifiedForm { basis: self.ker.clone(), gram: self.modified.clone() }
    }

    /// Coordinates in the fixed basis of ker Π of the columns of `w` (assumed inside ker Π).
    pub fn ker_coords(&self, w: &Matrix) -> Matrix {
        self.gf.mat_mul(&self.ker_left, w)
    }

    pub fn pair(&self, u: &[Elem], v: &[Elem]) -> Elem {
        self.gf.bilinear(&self.gram, u, v)
    }

    /// {u, v} for u, v ∈ ker Π.
    pub fn modified_pair(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let y = self.gf.mat_vec(&self.pi_section(), v);
        self.pair(u, &y)
    }

    /// Gram matrix of {,} on the columns of `w` (inside ker Π).
    pub fn modified_gram_of(&self, w: &Matrix) -> Matrix {
        let c = self.ker_coords(w);
        self.gf.mat_mul3(&c.transpose(), &self.modified, &c)
    }

    pub fn in_ker(&self, w: &Subspace) -> bool {
        self.gf.mat_mul(&self.pi, w.basis()).is_zero()
    }

    pub fn is_isotropic(&self, w: &Subspace) -> bool {
        self.gf.mat_mul3(&w.basis().transpose(), &self.gram, w.basis()).is_zero()
    }

    pub fn orthogonal(&self, w: &Subspace, form: Pairing) -> Result<Subspace> {
        let gf = &*self.gf;
        if w.ambient() != self.dim() {
            return Err(Error::AmbientMismatch(w.ambient(), self.dim()));
        }
        match form {
            Pairing::Alternating => {
                let eq = gf.mat_mul(&w.basis().transpose(), &self.gram);
                Ok(Subspace::span(gf, &gf.kernel(&eq)))
            }
            Pairing::Modified => {
                if !self.in_ker(w) {
                    return Err(Error::NotInDomain);
                }
                let c = self.ker_coords(w.basis());
                let eq = gf.mat_mul(&c.transpose(), &self.modified);
                let coords = gf.kernel(&eq);
                Ok(Subspace::span(gf, &gf.mat_mul(&self.ker, &coords)))
            }
        }
    }

    pub fn pi_image(&self, w: &Subspace) -> Subspace {
        w.image_under(&self.gf, &self.pi).expect("ambient")
    }

    pub fn pi_preimage(&self, w: &Subspace) -> Subspace {
        w.preimage_under(&self.gf, &self.pi).expect("ambient")
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            field: self.gf.descriptor(),
            a: self.a,
            b: self.b,
            case: self.case,
            pi: self.pi.clone(),
            gram: self.gram.clone(),
        }
    }
}

/// Serializable form of a [`PiSpace`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub field: FieldDescriptor,
    pub a: usize,
    pub b: usize,
    pub case: FormCase,
    pub pi: Matrix,
    pub gram: Matrix,
}

impl SpaceDescriptor {
    pub fn build(&self) -> Result<PiSpace> {
        let gf = Arc::new(Gf::from_descriptor(self.field)?);
        let s = PiSpace::from_matrices(self.a, self.b, gf, self.pi.clone(), self.gram.clone())?;
        if s.case != self.case {
            return Err(Error::Precondition("recorded case does not match the form".into()));
        }
        Ok(s)
    }
}
