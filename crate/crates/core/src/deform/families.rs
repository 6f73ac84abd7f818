use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::FamilyPoint;
use crate::error::{Error, Result};
use crate::field::{generic_rank, Gf, Matrix, SeriesMatrix};
use crate::forms;
use crate::localmodel::StratumLabel;
use crate::pimodule::{hyperbolic_gram, FormCase, PiSpace};

fn vcat(parts: &[&SeriesMatrix]) -> SeriesMatrix {
    let mut it = parts.iter();
    let mut acc = it.next().expect("nonempty").transpose();
    for p in it {
        acc = acc.hcat(&p.transpose());
    }
    acc.transpose()
}

fn hcat(parts: &[&SeriesMatrix]) -> SeriesMatrix {
    let mut it = parts.iter();
    let mut acc = (*it.next().expect("nonempty")).clone();
    for p in it {
        acc = acc.hcat(p);
    }
    acc
}

fn zeros(r: usize, c: usize, n: usize) -> SeriesMatrix {
    SeriesMatrix::zeros(r, c, n)
}

fn ident(k: usize, n: usize) -> SeriesMatrix {
    SeriesMatrix::constant(&Matrix::identity(k), n)
}

fn require_odd(gf: &Gf) -> Result<()> {
    if gf.p() == 2 {
        Err(Error::CaseMismatch { case: "odd-char".into(), p: 2 })
    } else {
        Ok(())
    }
}

fn check_shape(name: &str, m: &SeriesMatrix, shape: (usize, usize), n: usize) -> Result<()> {
    if m.shape() != shape {
        return Err(Error::Shape(format!("{name} must be {}×{}, got {}×{}", shape.0, shape.1, m.rows(), m.cols())));
    }
    if m.order() != n {
        return Err(Error::Shape(format!("{name} has truncation order {} ≠ {n}", m.order())));
    }
    if !m.reduction().is_zero() {
        return Err(Error::Precondition(format!("{name} must have entries in t·R_N")));
    }
    Ok(())
}

/// Z = ᵗZ and T Z = 0, reporting the first failing t-order.
fn check_chart_equations(gf: &Gf, t: &SeriesMatrix, z: &SeriesMatrix, tname: &str) -> Result<()> {
    if let Some(k) = gf.sm_sub(z, &z.transpose()).valuation() {
        return Err(Error::Constraint { equation: "Z = ᵗZ".into(), order: k });
    }
    if let Some(k) = gf.sm_mul(t, z).valuation() {
        return Err(Error::Constraint { equation: format!("({tname}) Z = 0"), order: k });
    }
    Ok(())
}

fn series_rank(gf: &Gf, m: &SeriesMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        0
    } else {
        generic_rank(&gf.smith_valuations(m))
    }
}

/// A family together with the generic label read off its chart.
#[derive(Debug, Clone)]
pub struct ChartFamily {
    pub family: FamilyPoint,
    pub predicted: StratumLabel,
}

/// The chart around a point of X_{0,a}: ω̃₁ = π·[I; X; Y], ω̃ adds π·[0; I; −ᵗX]
/// and the vectors πe_{b+j} + Σ_i Z_ij ẽ_i (ẽ_i the e-lifts of ω̃₁'s columns).
/// Valid iff Z = ᵗZ and (Y + ᵗY + ᵗXX) Z = 0; generically h = rank Z and
/// ℓ = nullity(Y + ᵗY + ᵗXX).
pub fn family_from_xyz(
    gf: Arc<Gf>,
    a: usize,
    b: usize,
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    z: &SeriesMatrix,
) -> Result<ChartFamily> {
    require_odd(&gf)?;
    if a > b {
        return Err(Error::Precondition(format!("expected a ≤ b, got ({a},{b})")));
    }
    let n = z.order();
    check_shape("X", x, (b - a, a), n)?;
    check_shape("Y", y, (a, a), n)?;
    check_shape("Z", z, (a, a), n)?;
    let t = gf.sm_add(&gf.sm_add(y, &y.transpose()), &gf.sm_mul(&x.transpose(), x));
    check_chart_equations(&gf, &t, z, "Y + ᵗY + ᵗXX")?;
    let m = a + b;
    let frame = vcat(&[&ident(a, n), x, y]);
    let w1 = vcat(&[&zeros(m, a, n), &frame]);
    let mid = vcat(&[&zeros(m + a, b - a, n), &ident(b - a, n), &gf.sm_neg(&x.transpose())]);
    let w = vcat(&[&gf.sm_mul(&frame, z), &zeros(b, a, n), &ident(a, n)]);
    let omega = hcat(&[&w1, &mid, &w]);
    let space = PiSpace::standard(a, b, gf.clone(), FormCase::OddChar)?;
    let family = FamilyPoint::new(space, w1, omega).map_err(|e| match e {
        Error::Constraint { order, .. } => Error::Constraint { equation: "third isotropy equation".into(), order },
        e => e,
    })?;
    let predicted = StratumLabel::checked(series_rank(&gf, z), a - series_rank(&gf, &t), a)?;
    Ok(ChartFamily { family, predicted })
}

/// Chart data for a family specialising into X_{h,ℓ}. With s = ℓ − h:
/// X is (b−ℓ)×s, Y and Z are s×s, all with entries in t·R_N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralChart {
    pub x: SeriesMatrix,
    pub y: SeriesMatrix,
    pub z: SeriesMatrix,
}

impl GeneralChart {
    pub fn zero(b: usize, h: usize, l: usize, n: usize) -> GeneralChart {
        let s = l - h;
        GeneralChart { x: zeros(b - l, s, n), y: zeros(s, s, n), z: zeros(s, s, n) }
    }
}

/// Modified Gram of the adapted frame, blocks of sizes h, s, a−ℓ, b−ℓ, s, h:
/// the outer and second blocks are paired by identities, block 3 carries I and
/// block 4 carries diag(1, …, 1, (−1)^{a−ℓ}) so that the form is isometric to
/// the standard one.
fn adapted_gram(gf: &Gf, a: usize, b: usize, h: usize, l: usize) -> (Matrix, Matrix) {
    let m = a + b;
    let s = l - h;
    let (o2, o3, o4, o5, o6) = (h, l, a, a + b - l, m - h);
    let mut q = Matrix::zeros(m, m);
    for i in 0..h {
        q[(i, o6 + i)] = 1;
        q[(o6 + i, i)] = 1;
    }
    for i in 0..s {
        q[(o2 + i, o5 + i)] = 1;
        q[(o5 + i, o2 + i)] = 1;
    }
    for i in o3..o4 {
        q[(i, i)] = 1;
    }
    let q4 = q4_matrix(gf, a, b, l);
    q.set_block(o4, o4, &q4);
    (q, q4)
}

/// diag(1, …, 1, (−1)^{a−ℓ}) of size b − ℓ.
pub(super) fn q4_matrix(gf: &Gf, a: usize, b: usize, l: usize) -> Matrix {
    let mut q4 = Matrix::identity(b - l);
    if b > l && (a - l) % 2 == 1 {
        q4[(b - l - 1, b - l - 1)] = gf.neg(1);
    }
    q4
}

/// Family specialising into X_{h,ℓ}: ω̃₁ keeps the blocks h and a−ℓ and
/// deforms the middle block as v = e₂ + e₄X + e₅Y; ω̃ adds e₄ − e₅ᵗ(Q₄X),
/// e₅ + Zᵀ-combinations of the e-lifts of v, and the e-lifts of block 1.
/// Conditions Z = ᵗZ and T Z = 0 with T = Y + ᵗY + ᵗX Q₄ X; generically
/// h' = h + rank Z and ℓ' = h + nullity T. Built in the adapted frame and
/// transported into the standard space by an isometry.
pub fn family_general(
    gf: Arc<Gf>,
    a: usize,
    b: usize,
    h: usize,
    l: usize,
    chart: &GeneralChart,
) -> Result<ChartFamily> {
    require_odd(&gf)?;
    if a > b {
        return Err(Error::Precondition(format!("expected a ≤ b, got ({a},{b})")));
    }
    StratumLabel::checked(h, l, a)?;
    let n = chart.z.order();
    let s = l - h;
    check_shape("X", &chart.x, (b - l, s), n)?;
    check_shape("Y", &chart.y, (s, s), n)?;
    check_shape("Z", &chart.z, (s, s), n)?;
    let (q, q4) = adapted_gram(&gf, a, b, h, l);
    let q4s = SeriesMatrix::constant(&q4, n);
    let (x, y, z) = (&chart.x, &chart.y, &chart.z);
    let t = gf.sm_add(&gf.sm_add(y, &y.transpose()), &gf.sm_mul3(&x.transpose(), &q4s, x));
    check_chart_equations(&gf, &t, z, "Y + ᵗY + ᵗX Q₄ X")?;

    let m = a + b;
    // columns in ker Π coordinates (blocks 1..6)
    let blk1 = vcat(&[&ident(h, n), &zeros(m - h, h, n)]);
    let v = vcat(&[&zeros(h, s, n), &ident(s, n), &zeros(a - l, s, n), x, y, &zeros(h, s, n)]);
    let blk3 = vcat(&[&zeros(l, a - l, n), &ident(a - l, n), &zeros(m - a, a - l, n)]);
    let mk = vcat(&[
        &zeros(a, b - l, n),
        &ident(b - l, n),
        &gf.sm_neg(&gf.sm_mul(&q4s, x).transpose()),
        &zeros(h, b - l, n),
    ]);
    let e5 = vcat(&[&zeros(m - h - s, s, n), &ident(s, n), &zeros(h, s, n)]);
    let w1_ker = hcat(&[&blk1, &v, &blk3]);
    let pi_part = |k: &SeriesMatrix| vcat(&[&zeros(m, k.cols(), n), k]);
    let e_part = |k: &SeriesMatrix| vcat(&[k, &zeros(m, k.cols(), n)]);
    let w1 = pi_part(&w1_ker);
    let w = gf.sm_add(&pi_part(&e5), &e_part(&gf.sm_mul(&v, z)));
    let omega = hcat(&[&w1, &pi_part(&mk), &w, &e_part(&blk1)]);

    let std_q = hyperbolic_gram(a, b);
    let g = forms::isometry(&gf, &q, &std_q)?;
    let big = Matrix::block_diag(&[&g, &g]);
    let space = PiSpace::standard(a, b, gf.clone(), FormCase::OddChar)?;
    let family = FamilyPoint::new(space, gf.sm_lmul(&big, &w1), gf.sm_lmul(&big, &omega))?;
    let predicted = StratumLabel::checked(h + series_rank(&gf, z), h + s - series_rank(&gf, &t), a)?;
    Ok(ChartFamily { family, predicted })
}

/// The first-order family at a point of X_{h,ℓ} (h < ℓ, p odd) that admits no
/// extension to second order: ω₁' = (πe₁ + tπe_{m−ℓ+1}, πe₂, …, πe_a) and
/// ω' adds πe_{a+1}, …, πe_{m−ℓ+1} + te₁, …, πe_{m−h}, e_{ℓ−h+1}, …, e_ℓ,
/// in a frame where the modified Gram pairs i with m−ℓ+i for i ≤ ℓ.
pub fn odd_obstruction_point(gf: Arc<Gf>, a: usize, b: usize, h: usize, l: usize) -> Result<FamilyPoint> {
    require_odd(&gf)?;
    StratumLabel::checked(h, l, a)?;
    if h >= l {
        return Err(Error::Precondition("the obstruction needs h < ℓ".into()));
    }
    let m = a + b;
    let q = hyperbolic_gram(l, m - l);
    let space = PiSpace::from_modified_gram(a, b, gf, &q)?;
    let n = 2;
    let mut w1 = SeriesMatrix::zeros(2 * m, a, n);
    let mut c0 = Matrix::zeros(2 * m, a);
    let mut c1 = Matrix::zeros(2 * m, a);
    for i in 0..a {
        c0[(m + i, i)] = 1;
    }
    c1[(m + m - l, 0)] = 1;
    w1.set_coeff(0, c0.clone());
    w1.set_coeff(1, c1.clone());
    let extra = m - a;
    let mut d0 = Matrix::zeros(2 * m, extra);
    let mut d1 = Matrix::zeros(2 * m, extra);
    let mut col = 0;
    for i in a..m - h {
        d0[(m + i, col)] = 1;
        if i == m - l {
            d1[(0, col)] = 1;
        }
        col += 1;
    }
    for i in l - h..l {
        d0[(i, col)] = 1;
        col += 1;
    }
    let omega = SeriesMatrix::from_coeffs(2 * m, m, vec![c0.hcat(&d0), c1.hcat(&d1)], n);
    FamilyPoint::new(space, w1, omega)
}

/// The characteristic-2, case-1 family over R_2 at a point of X_{1,1} (a = 1):
/// ω₁' = π((1+t)e₁ + e₂), ω' = (ω₁', πe₃, …, πe_m, (1+t)e₁ + e₂) for the
/// identity modified Gram. Its norm ⟨u, w⟩ = (1+t)² + 1 = t² blocks any
/// extension to third order.
pub fn char2_obstruction_point(gf: Arc<Gf>, b: usize) -> Result<FamilyPoint> {
    if gf.p() != 2 {
        return Err(Error::CaseMismatch { case: "char2-case1".into(), p: gf.p() });
    }
    if b < 1 {
        return Err(Error::Precondition("needs b ≥ 1".into()));
    }
    let a = 1;
    let m = a + b;
    let space = PiSpace::from_modified_gram(a, b, gf, &Matrix::identity(m))?;
    let n = 2;
    let mut c0 = Matrix::zeros(2 * m, m);
    let mut c1 = Matrix::zeros(2 * m, m);
    c0[(m, 0)] = 1;
    c0[(m + 1, 0)] = 1;
    c1[(m, 0)] = 1;
    for i in 2..m {
        c0[(m + i, i - 1)] = 1;
    }
    c0[(0, m - 1)] = 1;
    c0[(1, m - 1)] = 1;
    c1[(0, m - 1)] = 1;
    let omega = SeriesMatrix::from_coeffs(2 * m, m, vec![c0, c1], n);
    let w1 = omega.select_cols(&[0]);
    FamilyPoint::new(space, w1, omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::lift_step;

    fn gf(q: u32) -> Arc<Gf> {
        Arc::new(Gf::from_order(q).unwrap())
    }

    fn mono(gf: &Gf, r: usize, c: usize, entries: &[(usize, usize, i64, usize)], n: usize) -> SeriesMatrix {
        let mut coeffs = vec![Matrix::zeros(r, c); n];
        for &(i, j, v, k) in entries {
            coeffs[k][(i, j)] = gf.add(coeffs[k][(i, j)], gf.from_int(v));
        }
        SeriesMatrix::from_coeffs(r, c, coeffs, n)
    }

    #[test]
    fn xyz_examples() {
        let f = gf(3);
        let n = 4;
        // Y = t, (1,1): generic (0,0)
        let y = mono(&f, 1, 1, &[(0, 0, 1, 1)], n);
        let c = family_from_xyz(f.clone(), 1, 1, &zeros(0, 1, n), &y, &zeros(1, 1, n)).unwrap();
        let st = c.family.strata().unwrap();
        assert_eq!(st.special, StratumLabel::new(0, 1));
        assert_eq!(st.generic, StratumLabel::new(0, 0));
        assert_eq!(c.predicted, st.generic);
        // Z = t I, (2,2): generic (2,2)
        let z = mono(&f, 2, 2, &[(0, 0, 1, 1), (1, 1, 1, 1)], n);
        let c = family_from_xyz(f.clone(), 2, 2, &zeros(0, 2, n), &zeros(2, 2, n), &z).unwrap();
        let st = c.family.strata().unwrap();
        assert_eq!((st.special, st.generic), (StratumLabel::new(0, 2), StratumLabel::new(2, 2)));
        // X = t, (1,2): generic (0,0)
        let x = mono(&f, 1, 1, &[(0, 0, 1, 1)], n);
        let c = family_from_xyz(f.clone(), 1, 2, &x, &zeros(1, 1, n), &zeros(1, 1, n)).unwrap();
        assert_eq!(c.family.strata().unwrap().generic, StratumLabel::new(0, 0));
        let x3 = x.with_order(3);
        let c = family_from_xyz(f.clone(), 1, 2, &x3, &zeros(1, 1, 3), &zeros(1, 1, 3)).unwrap();
        assert!(matches!(c.family.strata(), Err(Error::Truncation { .. })));
        // Z = diag(t,0), Y = diag(0, t/2): generic (1,1)
        let half = f.inv(2).unwrap() as i64;
        let z = mono(&f, 2, 2, &[(0, 0, 1, 1)], n);
        let y = mono(&f, 2, 2, &[(1, 1, half, 1)], n);
        let c = family_from_xyz(f.clone(), 2, 2, &zeros(0, 2, n), &y, &z).unwrap();
        assert_eq!(c.family.strata().unwrap().generic, StratumLabel::new(1, 1));
        assert_eq!(c.predicted, StratumLabel::new(1, 1));
    }

    #[test]
    fn xyz_constraint_violation_reports_order() {
        let f = gf(3);
        let n = 4;
        let z = mono(&f, 2, 2, &[(0, 1, 1, 2)], n);
        let e = family_from_xyz(f.clone(), 2, 2, &zeros(0, 2, n), &zeros(2, 2, n), &z).unwrap_err();
        assert_eq!(e, Error::Constraint { equation: "Z = ᵗZ".into(), order: 2 });
        let z = mono(&f, 1, 1, &[(0, 0, 1, 1)], n);
        let y = mono(&f, 1, 1, &[(0, 0, 1, 1)], n);
        let e = family_from_xyz(f, 1, 1, &zeros(0, 1, n), &y, &z).unwrap_err();
        assert!(matches!(e, Error::Constraint { order: 2, .. }));
    }

    #[test]
    fn general_examples() {
        let f = gf(3);
        let n = 4;
        let c = family_general(f.clone(), 2, 2, 1, 2, &GeneralChart::zero(2, 1, 2, n)).unwrap();
        let st = c.family.strata().unwrap();
        assert_eq!((st.special, st.generic), (StratumLabel::new(1, 2), StratumLabel::new(1, 2)));
        let chart = GeneralChart { x: zeros(1, 1, n), y: zeros(1, 1, n), z: mono(&f, 1, 1, &[(0, 0, 1, 1)], n) };
        let c = family_general(f.clone(), 2, 2, 0, 1, &chart).unwrap();
        let st = c.family.strata().unwrap();
        assert_eq!((st.special, st.generic), (StratumLabel::new(0, 1), StratumLabel::new(1, 1)));
        let c = family_general(f, 2, 2, 0, 2, &GeneralChart::zero(2, 0, 2, n)).unwrap();
        assert_eq!(c.family.strata().unwrap().generic, StratumLabel::new(0, 2));
    }

    #[test]
    fn obstruction_points_do_not_lift() {
        for (a, b, h, l) in [(1, 1, 0, 1), (1, 2, 0, 1), (2, 2, 0, 1), (2, 2, 1, 2), (2, 2, 0, 2), (2, 3, 0, 2)] {
            let fam = odd_obstruction_point(gf(3), a, b, h, l).unwrap();
            assert_eq!(fam.special_point().unwrap().invariants(fam.space()).unwrap(), StratumLabel::new(h, l));
            assert!(!lift_step(&fam).solvable, "({a},{b},{h},{l})");
        }
        for q in [2, 4] {
            for b in [1, 2, 3] {
                let fam = char2_obstruction_point(gf(q), b).unwrap();
                assert_eq!(fam.special_point().unwrap().invariants(fam.space()).unwrap(), StratumLabel::new(1, 1));
                assert!(!lift_step(&fam).solvable);
            }
        }
    }
}
