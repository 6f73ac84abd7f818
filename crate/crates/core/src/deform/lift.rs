use serde::Serialize;

use super::{pivot_rows, span_coords, FamilyPoint};
use crate::field::{Elem, Matrix, SeriesMatrix};
use crate::localmodel::LMPoint;
use crate::pimodule::PiSpace;

/// Result of trying to extend a family from R_n to R_{n+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiftOutcome {
    pub solvable: bool,
    /// Dimension of the affine space of extensions (when solvable).
    pub dimension: Option<usize>,
    pub unknowns: usize,
}

struct Layout {
    free_d: Vec<usize>,
    free_d1: Vec<usize>,
    m: usize,
    a: usize,
}

impl Layout {
    fn count(&self) -> usize {
        self.free_d.len() * self.m + self.free_d1.len() * self.a + 2 * self.a * self.m
    }

    /// Split an unknown vector into (D, D1, C_n, E_n).
    fn unpack(&self, n2: usize, x: &[Elem]) -> (Matrix, Matrix, Matrix, Matrix) {
        let (m, a) = (self.m, self.a);
        let mut k = 0;
        let mut d = Matrix::zeros(n2, m);
        for &r in &self.free_d {
            for j in 0..m {
                d[(r, j)] = x[k];
                k += 1;
            }
        }
        let mut d1 = Matrix::zeros(n2, a);
        for &r in &self.free_d1 {
            for j in 0..a {
                d1[(r, j)] = x[k];
                k += 1;
            }
        }
        let cn = Matrix::from_vec(a, m, x[k..k + a * m].to_vec());
        k += a * m;
        let en = Matrix::from_vec(m, a, x[k..k + a * m].to_vec());
        (d, d1, cn, en)
    }
}

fn flatten_into(out: &mut Vec<Elem>, m: &Matrix) {
    out.extend_from_slice(m.data());
}

fn upper(out: &mut Vec<Elem>, m: &Matrix) {
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            out.push(m[(i, j)]);
        }
    }
}

/// Decide whether a valid family over R_n extends to R_{n+1}.
///
/// The new coefficients D (of ω̃) and D₁ (of ω̃₁) at t^n enter linearly,
/// together with the order-n parts C_n, E_n of the coordinate matrices in
/// Π ω̃ = ω̃₁ C and ω̃₁ = ω̃ E. Rows of D, D₁ at the pivot rows of the
/// reduction are fixed to zero, which removes the gauge freedom.
pub fn lift_step(fam: &FamilyPoint) -> LiftOutcome {
    let s = fam.space();
    let gf = s.field();
    let n = fam.order();
    let (m, a, n2) = (s.m(), s.a(), s.dim());
    let b = fam.omega().with_order(n + 1);
    let b1 = fam.omega1().with_order(n + 1);
    let pi = s.pi();
    let g = s.gram();
    let (c_known, _) = span_coords(gf, fam.omega1(), &gf.sm_lmul(pi, fam.omega()));
    let (e_known, _) = span_coords(gf, fam.omega(), fam.omega1());
    let c_known = c_known.with_order(n + 1);
    let e_known = e_known.with_order(n + 1);
    let b0 = b.reduction().clone();
    let b10 = b1.reduction().clone();
    let c0 = c_known.reduction().clone();
    let e0 = e_known.reduction().clone();

    let piv = pivot_rows(gf, &b0);
    let piv1 = pivot_rows(gf, &b10);
    let layout = Layout {
        free_d: (0..n2).filter(|r| !piv.contains(r)).collect(),
        free_d1: (0..n2).filter(|r| !piv1.contains(r)).collect(),
        m,
        a,
    };

    // constant part at order n
    let mut konst: Vec<Elem> = Vec::new();
    let pb1 = gf.sm_lmul(pi, &b1);
    flatten_into(&mut konst, &pb1.coeff(n));
    let rb = gf.sm_sub(&gf.sm_lmul(pi, &b), &gf.sm_mul(&b1, &c_known));
    flatten_into(&mut konst, &rb.coeff(n));
    let rc = gf.sm_sub(&b1, &gf.sm_mul(&b, &e_known));
    flatten_into(&mut konst, &rc.coeff(n));
    let gs = SeriesMatrix::constant(g, n + 1);
    let rd = gf.sm_mul3(&b.transpose(), &gs, &b);
    upper(&mut konst, &rd.coeff(n));

    let linear = |x: &[Elem]| -> Vec<Elem> {
        let (d, d1, cn, en) = layout.unpack(n2, x);
        let mut out = Vec::with_capacity(konst.len());
        flatten_into(&mut out, &gf.mat_mul(pi, &d1));
        let eb = gf.mat_sub(
            &gf.mat_sub(&gf.mat_mul(pi, &d), &gf.mat_mul(&d1, &c0)),
            &gf.mat_mul(&b10, &cn),
        );
        flatten_into(&mut out, &eb);
        let ec = gf.mat_sub(&gf.mat_sub(&d1, &gf.mat_mul(&d, &e0)), &gf.mat_mul(&b0, &en));
        flatten_into(&mut out, &ec);
        let bgd = gf.mat_mul3(&b0.transpose(), g, &d);
        // Dᵀ G B₀ = −(B₀ᵀ G D)ᵀ since G is alternating
        upper(&mut out, &gf.mat_sub(&bgd, &bgd.transpose()));
        out
    };

    let nu = layout.count();
    let rows = konst.len();
    let mut aug = Matrix::zeros(rows, nu + 1);
    let mut unit = vec![0; nu];
    for j in 0..nu {
        unit[j] = 1;
        let col = linear(&unit);
        unit[j] = 0;
        for i in 0..rows {
            aug[(i, j)] = col[i];
        }
    }
    for i in 0..rows {
        aug[(i, nu)] = gf.neg(konst[i]);
    }
    let ech = gf.rref(&aug);
    let solvable = !ech.pivots.contains(&nu);
    let rank = ech.pivots.len() - usize::from(!solvable);
    LiftOutcome { solvable, dimension: solvable.then_some(nu - rank), unknowns: nu }
}

/// Dimension of the space of first-order deformations of x.
pub fn tangent_dim(space: &PiSpace, x: &LMPoint) -> usize {
    let fam = FamilyPoint::constant(space, x, 1);
    lift_step(&fam).dimension.expect("a constant family always extends")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::{family_from_xyz, odd_obstruction_point};
    use crate::field::Gf;
    use crate::localmodel::{enumerate, Budget};
    use crate::pimodule::FormCase;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn tangent_by_label(a: usize, b: usize, q: u32, case: FormCase) -> BTreeMap<(usize, usize), Vec<usize>> {
        let (p, f) = if q == 4 { (2, 2) } else { (q, 1) };
        let s = PiSpace::standard(a, b, Arc::new(Gf::new(p, f).unwrap()), case).unwrap();
        let mut out: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for x in enumerate(&s, Budget::default()).unwrap() {
            let lab = x.invariants(&s).unwrap();
            let t = tangent_dim(&s, &x);
            let v = out.entry((lab.h, lab.l)).or_default();
            if !v.contains(&t) {
                v.push(t);
            }
        }
        out
    }

    #[test]
    fn odd_tangent_is_ab_on_open_strata() {
        for (a, b) in [(1, 1), (1, 2)] {
            for ((h, l), ts) in tangent_by_label(a, b, 3, FormCase::OddChar) {
                if h == l {
                    assert_eq!(ts, vec![a * b], "({h},{l})");
                } else {
                    assert!(ts.iter().all(|&t| t > a * b), "({h},{l}) {ts:?}");
                }
            }
        }
    }

    #[test]
    fn constant_family_lifts_with_tangent_dimension() {
        let s = PiSpace::standard(1, 2, Arc::new(Gf::new(3, 1).unwrap()), FormCase::OddChar).unwrap();
        for x in enumerate(&s, Budget::default()).unwrap().into_iter().take(20) {
            let out = lift_step(&FamilyPoint::constant(&s, &x, 3));
            assert!(out.solvable);
            assert_eq!(out.dimension, Some(tangent_dim(&s, &x)));
        }
    }

    #[test]
    fn constructed_family_truncation_lifts() {
        let gf = Arc::new(Gf::new(3, 1).unwrap());
        let n = 5;
        let t = |k: usize| {
            let mut c = vec![Matrix::zeros(1, 1); n];
            c[k][(0, 0)] = 1;
            SeriesMatrix::from_coeffs(1, 1, c, n)
        };
        let c = family_from_xyz(gf, 1, 2, &t(1), &SeriesMatrix::zeros(1, 1, n), &SeriesMatrix::zeros(1, 1, n)).unwrap();
        for k in 1..n {
            assert!(lift_step(&c.family.truncate(k)).solvable, "order {k}");
        }
    }

    #[test]
    fn obstruction_is_not_liftable() {
        let gf = Arc::new(Gf::new(3, 1).unwrap());
        let fam = odd_obstruction_point(gf, 1, 1, 0, 1).unwrap();
        assert!(!lift_step(&fam).solvable);
    }

    #[test]
    fn char2_case1_smooth_locus_is_x00() {
        for (a, b) in [(1, 1), (1, 2)] {
            for ((h, l), ts) in tangent_by_label(a, b, 2, FormCase::Char2Case1) {
                if (h, l) == (0, 0) {
                    assert_eq!(ts, vec![a * b]);
                } else {
                    assert!(ts.iter().all(|&t| t > a * b), "({h},{l}) {ts:?}");
                }
            }
        }
    }

    #[test]
    fn char2_case2_open_sets_have_dimension_ab_plus_h() {
        for ((h, l), ts) in tangent_by_label(1, 1, 2, FormCase::Char2Case2) {
            assert_eq!(l, 1);
            assert_eq!(ts, vec![1 + l], "({h},{l})");
        }
    }
}
