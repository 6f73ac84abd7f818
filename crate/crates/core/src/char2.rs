//! Symmetric bilinear forms in characteristic 2: normal forms, isotropic
//! normal position, and parity-emptiness of strata in the alternating case.

use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, Gf, Matrix};
use crate::localmodel::{self, Budget, StratumCount, StratumLabel};
use crate::pimodule::{FormCase, PiSpace, Subspace};

/// Case 1: q(x) = ⟨x,x⟩ is not identically zero, normal form I.
/// Case 2: q ≡ 0, normal form blocks [[0,1],[1,0]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub case: u8,
    pub change: Matrix,
}

fn norm(gf: &Gf, g: &Matrix, v: &[Elem]) -> Elem {
    gf.bilinear(g, v, v)
}

fn axpy(gf: &Gf, s: Elem, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
    x.iter().zip(y).map(|(&a, &b)| gf.add(gf.mul(s, a), b)).collect()
}

fn perp_within(gf: &Gf, g: &Matrix, rest: &Subspace, v: &[Elem]) -> Result<Subspace> {
    let eq = Matrix::from_rows(&[gf.mat_vec(&g.transpose(), v)]);
    rest.intersect(gf, &Subspace::span(gf, &gf.kernel(&eq)))
}

fn check_char2(gf: &Gf, g: &Matrix) -> Result<()> {
    if gf.p() != 2 {
        return Err(Error::CaseMismatch { case: "char2".into(), p: gf.p() });
    }
    if !gf.is_symmetric(g) || gf.inverse(g).is_none() {
        return Err(Error::Degenerate);
    }
    Ok(())
}

/// Greedy induction: split off a norm-one vector while one exists, else a
/// hyperbolic pair; hyperbolic pairs following a norm-one vector are then
/// rewritten into three orthonormal vectors.
pub fn classify_form(gf: &Gf, g: &Matrix) -> Result<Classification> {
    check_char2(gf, g)?;
    let d = g.rows();
    let mut ones: Vec<Vec<Elem>> = Vec::new();
    let mut pairs: Vec<(Vec<Elem>, Vec<Elem>)> = Vec::new();
    let mut rest = Subspace::whole(d);
    while rest.dim() > 0 {
        let basis = rest.vectors();
        if let Some(v) = basis.iter().find(|v| norm(gf, g, v) != 0) {
            let s = gf.inv(gf.sqrt(norm(gf, g, v)).unwrap()).unwrap();
            let v: Vec<Elem> = v.iter().map(|&x| gf.mul(s, x)).collect();
            rest = perp_within(gf, g, &rest, &v)?;
            ones.push(v);
            continue;
        }
        let f = basis[0].clone();
        let w = basis
            .iter()
            .find(|w| gf.bilinear(g, &f, w) != 0)
            .ok_or(Error::Degenerate)?;
        let s = gf.inv(gf.bilinear(g, &f, w)).unwrap();
        let w: Vec<Elem> = w.iter().map(|&x| gf.mul(s, x)).collect();
        rest = perp_within(gf, g, &rest, &f)?;
        rest = perp_within(gf, g, &rest, &w)?;
        pairs.push((f, w));
    }
    if ones.is_empty() {
        let cols: Vec<Vec<Elem>> = pairs.into_iter().flat_map(|(f, w)| [f, w]).collect();
        return Ok(Classification { case: 2, change: Matrix::from_cols(d, &cols) });
    }
    for (f2, f3) in pairs {
        let f1 = ones.pop().unwrap();
        let u2: Vec<Elem> = f1.iter().zip(&f2).map(|(&a, &b)| gf.add(a, b)).collect();
        let u3: Vec<Elem> = f1.iter().zip(&f3).map(|(&a, &b)| gf.add(a, b)).collect();
        let u1: Vec<Elem> = u2.iter().zip(&f3).map(|(&a, &b)| gf.add(a, b)).collect();
        ones.extend([u1, u2, u3]);
    }
    Ok(Classification { case: 1, change: Matrix::from_cols(d, &ones) })
}

/// Orthonormal basis e₁..e_d (Gram I) with W = span(e₁+e₂, …, e_{2h−1}+e_{2h}).
pub fn isotropic_normal_basis(gf: &Gf, g: &Matrix, w: &Subspace) -> Result<Matrix> {
    check_char2(gf, g)?;
    let d = g.rows();
    if w.ambient() != d {
        return Err(Error::AmbientMismatch(w.ambient(), d));
    }
    if (0..d).all(|i| g[(i, i)] == 0) {
        return Err(Error::Precondition("the form must be of case 1".into()));
    }
    if !gf.mat_mul3(&w.basis().transpose(), g, w.basis()).is_zero() {
        return Err(Error::Precondition("W is not totally isotropic".into()));
    }
    let h = w.dim();
    if 2 * h > d {
        return Err(Error::Precondition("isotropic subspace too large".into()));
    }
    let f = w.vectors();
    // dual vectors: ⟨g_i, f_j⟩ = δ_ij
    let ft_g = gf.mat_mul(&w.basis().transpose(), g);
    let duals = gf
        .solve(&ft_g, &Matrix::identity(h))
        .ok_or_else(|| Error::Precondition("no dual basis".into()))?;
    let mut gs: Vec<Vec<Elem>> = Vec::new();
    for i in 0..h {
        let mut gi = duals.col(i);
        for (k, gk) in gs.iter().enumerate() {
            let lambda = gf.bilinear(g, &gi, gk);
            gi = axpy(gf, gf.neg(lambda), &f[k], &gi);
        }
        let c = norm(gf, g, &gi);
        if c != 1 {
            let mut span = f.clone();
            span.extend(gs.iter().cloned());
            let fixed = Subspace::span_vecs(gf, d, &span);
            let t = gf.kernel(&gf.mat_mul(&fixed.basis().transpose(), g));
            let t = Subspace::span(gf, &t);
            let v = t
                .vectors()
                .into_iter()
                .find(|v| norm(gf, g, v) != 0)
                .ok_or_else(|| Error::Precondition("no vector of nonzero norm available for repair".into()))?;
            let mu2 = gf.div(gf.sub(1, c), norm(gf, g, &v)).unwrap();
            let mu = gf.sqrt(mu2).unwrap();
            gi = axpy(gf, mu, &v, &gi);
        }
        gs.push(gi);
    }
    let mut cols: Vec<Vec<Elem>> = Vec::with_capacity(d);
    for i in 0..h {
        cols.push(f[i].iter().zip(&gs[i]).map(|(&a, &b)| gf.sub(a, b)).collect());
        cols.push(gs[i].clone());
    }
    let head = Matrix::from_cols(d, &cols);
    let comp = Subspace::span(gf, &gf.kernel(&gf.mat_mul(&head.transpose(), g)));
    if comp.dim() > 0 {
        let cg = gf.mat_mul3(&comp.basis().transpose(), g, comp.basis());
        let c = classify_form(gf, &cg)?;
        if c.case != 1 {
            return Err(Error::Precondition(
                "complement of the normalised part has q ≡ 0; no orthonormal completion".into(),
            ));
        }
        let tail = gf.mat_mul(comp.basis(), &c.change);
        cols.extend(tail.to_cols());
    }
    Ok(Matrix::from_cols(d, &cols))
}

/// Outcome of the alternating-case enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub a: usize,
    pub b: usize,
    pub q: u32,
    pub counts: Vec<StratumCount>,
    pub violations: Vec<StratumLabel>,
    pub total: u64,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Enumerate the case-2 model and list every occupied stratum with ℓ ≢ a (mod 2).
pub fn parity_empty_check(a: usize, b: usize, gf: Arc<Gf>, budget: Budget) -> Result<ParityReport> {
    let q = gf.order();
    let space = PiSpace::standard(a, b, gf, FormCase::Char2Case2)?;
    let counts = localmodel::count_by_stratum(&space, budget)?;
    let violations = counts
        .iter()
        .filter(|(l, &c)| c > 0 && l.l % 2 != a % 2)
        .map(|(l, _)| *l)
        .collect();
    let total = counts.values().sum();
    let counts = StratumCount::list(&counts);
    Ok(ParityReport { a, b, q, counts, violations, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Gf {
        Gf::new(2, 1).unwrap()
    }

    #[test]
    fn classify_examples() {
        let gf = gf2();
        let c = classify_form(&gf, &Matrix::identity(3)).unwrap();
        assert_eq!(c.case, 1);
        assert_eq!(c.change, Matrix::identity(3));
        let a = Matrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let c = classify_form(&gf, &a).unwrap();
        assert_eq!(c.case, 2);
        assert_eq!(c.change, Matrix::identity(2));
        let g = Matrix::from_rows(&[vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        let c = classify_form(&gf, &g).unwrap();
        assert_eq!(c.case, 1);
        assert_eq!(gf.mat_mul3(&c.change.transpose(), &g, &c.change), Matrix::identity(3));
    }

    #[test]
    fn explicit_change_identity_to_split() {
        // e1' = e1+e2+e3, e2' = e1+e2, e3' = e2+e3 turns I into diag(1) ⊕ A
        let gf = gf2();
        let p = Matrix::from_cols(3, &[vec![1, 1, 1], vec![1, 1, 0], vec![0, 1, 1]]);
        let g = Matrix::from_rows(&[vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]);
        assert_eq!(gf.mat_mul3(&p.transpose(), &Matrix::identity(3), &p), g);
    }

    #[test]
    fn degenerate_rejected() {
        let gf = gf2();
        let g = Matrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(classify_form(&gf, &g), Err(Error::Degenerate));
    }

    #[test]
    fn normal_basis_examples() {
        let gf = gf2();
        let e = isotropic_normal_basis(&gf, &Matrix::identity(3), &Subspace::zero(3)).unwrap();
        assert_eq!(gf.mat_mul3(&e.transpose(), &Matrix::identity(3), &e), Matrix::identity(3));
        let w = Subspace::span_vecs(&gf, 3, &[vec![1, 1, 0]]);
        let e = isotropic_normal_basis(&gf, &Matrix::identity(3), &w).unwrap();
        assert_eq!(gf.mat_mul3(&e.transpose(), &Matrix::identity(3), &e), Matrix::identity(3));
        let v: Vec<Elem> = (0..3).map(|r| gf.add(e[(r, 0)], e[(r, 1)])).collect();
        assert_eq!(Subspace::span_vecs(&gf, 3, &[v]), w);
    }
}
