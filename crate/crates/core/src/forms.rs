//! Normal forms of nondegenerate symmetric bilinear forms and isometries
//! between Gram matrices of the same class.

use crate::char2;
use crate::error::{Error, Result};
use crate::field::{Elem, Gf, Matrix};
use crate::pimodule::Subspace;

/// Basis change `P` and the normal form `Pᵀ Q P`.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub change: Matrix,
    pub normal: Matrix,
}

fn col(m: &Matrix, j: usize) -> Vec<Elem> {
    m.col(j)
}

/// Odd characteristic: `Pᵀ Q P = diag(1, …, 1, δ)` with δ ∈ {1, ν}, ν the
/// field's fixed non-square.
pub fn normalize_odd(gf: &Gf, q: &Matrix) -> Result<Normalized> {
    if gf.p() == 2 {
        return Err(Error::CaseMismatch { case: "odd-char".into(), p: 2 });
    }
    let n = q.rows();
    if !gf.is_symmetric(q) || gf.inverse(q).is_none() {
        return Err(Error::Degenerate);
    }
    let norm = |v: &[Elem]| gf.bilinear(q, v, v);
    let mut chosen: Vec<Vec<Elem>> = Vec::new();
    let mut rest = Subspace::whole(n);
    while rest.dim() > 0 {
        let basis = rest.vectors();
        let v = match basis.iter().find(|v| norm(v) != 0) {
            Some(v) => v.clone(),
            None => {
                let mut found = None;
                'outer: for i in 0..basis.len() {
                    for j in i + 1..basis.len() {
                        if gf.bilinear(q, &basis[i], &basis[j]) != 0 {
                            found = Some(basis[i].iter().zip(&basis[j]).map(|(&x, &y)| gf.add(x, y)).collect());
                            break 'outer;
                        }
                    }
                }
                found.ok_or(Error::Degenerate)?
            }
        };
        let eq = Matrix::from_rows(&[gf.mat_vec(&q.transpose(), &v)]);
        let perp = Subspace::span(gf, &gf.kernel(&eq));
        rest = rest.intersect(gf, &perp)?;
        chosen.push(v);
    }
    let mut p = Matrix::from_cols(n, &chosen);
    let mut d: Vec<Elem> = (0..n).map(|i| norm(&col(&p, i))).collect();
    for i in 0..n.saturating_sub(1) {
        if d[i] == 1 {
            continue;
        }
        let (alpha, beta) = (d[i], d[i + 1]);
        let (x, y) = solve_conic(gf, alpha, beta);
        let (u, w) = (col(&p, i), col(&p, i + 1));
        let v1: Vec<Elem> = u.iter().zip(&w).map(|(&a, &b)| gf.add(gf.mul(x, a), gf.mul(y, b))).collect();
        let nb = gf.neg(gf.mul(beta, y));
        let ax = gf.mul(alpha, x);
        let v2: Vec<Elem> = u.iter().zip(&w).map(|(&a, &b)| gf.add(gf.mul(nb, a), gf.mul(ax, b))).collect();
        for r in 0..n {
            p[(r, i)] = v1[r];
            p[(r, i + 1)] = v2[r];
        }
        d[i] = 1;
        d[i + 1] = gf.mul(alpha, beta);
    }
    if n > 0 {
        let last = d[n - 1];
        let target = if gf.is_square(last) { 1 } else { gf.nonsquare().unwrap() };
        let s = gf.sqrt(gf.div(last, target).unwrap()).unwrap();
        let si = gf.inv(s).unwrap();
        for r in 0..n {
            p[(r, n - 1)] = gf.mul(si, p[(r, n - 1)]);
        }
    }
    let normal = gf.mat_mul3(&p.transpose(), q, &p);
    Ok(Normalized { change: p, normal })
}

/// Some (x, y) with αx² + βy² = 1 (α, β ≠ 0, p odd).
fn solve_conic(gf: &Gf, alpha: Elem, beta: Elem) -> (Elem, Elem) {
    for x in gf.elements() {
        let t = gf.div(gf.sub(1, gf.mul(alpha, gf.mul(x, x))), beta).unwrap();
        if let Some(y) = gf.sqrt(t) {
            return (x, y);
        }
    }
    unreachable!("a nondegenerate binary form represents 1")
}

/// Normal form in any characteristic (odd: diagonal; char 2: identity or split blocks).
pub fn normalize(gf: &Gf, q: &Matrix) -> Result<Normalized> {
    if gf.p() == 2 {
        let c = char2::classify_form(gf, q)?;
        let p = c.change;
        let normal = gf.mat_mul3(&p.transpose(), q, &p);
        Ok(Normalized { change: p, normal })
    } else {
        normalize_odd(gf, q)
    }
}

/// `g` with `gᵀ·to·g = from`, when the two forms are isometric.
pub fn isometry(gf: &Gf, from: &Matrix, to: &Matrix) -> Result<Matrix> {
    let nf = normalize(gf, from)?;
    let nt = normalize(gf, to)?;
    if nf.normal != nt.normal {
        return Err(Error::Precondition("forms are not isometric".into()));
    }
    let inv = gf.inverse(&nf.change).expect("invertible change");
    Ok(gf.mat_mul(&nt.change, &inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pimodule::hyperbolic_gram;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn odd_normal_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [3u32, 5, 7, 9, 25] {
            let gf = Gf::from_order(q).unwrap();
            for n in 1..=5 {
                for _ in 0..20 {
                    let mut s = Matrix::zeros(n, n);
                    for i in 0..n {
                        for j in i..n {
                            let x = rng.gen_range(0..q);
                            s[(i, j)] = x;
                            s[(j, i)] = x;
                        }
                    }
                    if gf.inverse(&s).is_none() {
                        continue;
                    }
                    let nf = normalize_odd(&gf, &s).unwrap();
                    assert_eq!(gf.mat_mul3(&nf.change.transpose(), &s, &nf.change), nf.normal);
                    for i in 0..n - 1 {
                        assert_eq!(nf.normal[(i, i)], 1);
                    }
                    let det_class = gf.is_square(gf.det(&s));
                    assert_eq!(det_class, nf.normal[(n - 1, n - 1)] == 1);
                }
            }
        }
    }

    #[test]
    fn isometry_between_hyperbolic_and_diagonal() {
        let gf = Gf::new(3, 1).unwrap();
        let h = hyperbolic_gram(2, 3);
        let nf = normalize_odd(&gf, &h).unwrap();
        let g = isometry(&gf, &nf.normal, &h).unwrap();
        assert_eq!(gf.mat_mul3(&g.transpose(), &h, &g), nf.normal);
    }
}
