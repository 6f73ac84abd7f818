use super::Budget;
use crate::error::{Error, Result};
use crate::field::{Elem, Gf, Matrix};

fn check(a: usize, b: usize, gf: &Gf) -> Result<()> {
    if gf.p() == 2 {
        return Err(Error::CaseMismatch { case: "odd-char".into(), p: 2 });
    }
    if a > b {
        return Err(Error::Shape(format!("chart needs a ≤ b, got a={a}, b={b}")));
    }
    Ok(())
}

/// Odometer over all rows×cols matrices with entries in the field.
fn all_matrices(q: u32, rows: usize, cols: usize, mut f: impl FnMut(&Matrix)) {
    let mut m = Matrix::zeros(rows, cols);
    let n = rows * cols;
    loop {
        f(&m);
        let mut k = 0;
        while k < n {
            let (i, j) = (k / cols, k % cols);
            m[(i, j)] += 1;
            if m[(i, j)] < q {
                break;
            }
            m[(i, j)] = 0;
            k += 1;
        }
        if k == n {
            return;
        }
    }
}

fn all_symmetric(q: u32, a: usize) -> Vec<Matrix> {
    let slots: Vec<(usize, usize)> = (0..a).flat_map(|i| (i..a).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    all_matrices(q, 1, slots.len(), |v| {
        let mut s = Matrix::zeros(a, a);
        for (k, &(i, j)) in slots.iter().enumerate() {
            let x: Elem = v[(0, k)];
            s[(i, j)] = x;
            s[(j, i)] = x;
        }
        out.push(s);
    });
    out
}

/// #{(X, Y, Z) : Z = ᵗZ, (Y + ᵗY + ᵗX X) Z = 0} with X of size (b−a)×a and
/// Y, Z of size a×a. For fixed X the map Y ↦ Y + ᵗY + ᵗX X hits every
/// symmetric T with q^{a(a−1)/2} preimages, so only symmetric pairs (T, Z)
/// need to be enumerated.
pub fn chart_count(a: usize, b: usize, gf: &Gf, budget: Budget) -> Result<u128> {
    check(a, b, gf)?;
    let q = gf.order() as u128;
    let sym = a * (a + 1) / 2;
    budget.check(q.pow(2 * sym as u32))?;
    let syms = all_symmetric(gf.order(), a);
    let mut pairs: u128 = 0;
    for t in &syms {
        for z in &syms {
            if gf.mat_mul(t, z).is_zero() {
                pairs += 1;
            }
        }
    }
    Ok(q.pow(((b - a) * a + a * a.saturating_sub(1) / 2) as u32) * pairs)
}

/// Same count by brute force over all (X, Y, Z); the oracle for `chart_count`.
pub fn chart_count_exhaustive(a: usize, b: usize, gf: &Gf, budget: Budget) -> Result<u128> {
    check(a, b, gf)?;
    let q = gf.order() as u128;
    let sym = a * (a + 1) / 2;
    budget.check(q.pow(((b - a) * a + a * a + sym) as u32))?;
    let syms = all_symmetric(gf.order(), a);
    let mut count: u128 = 0;
    all_matrices(gf.order(), b - a, a, |x| {
        let xtx = gf.mat_mul(&x.transpose(), x);
        all_matrices(gf.order(), a, a, |y| {
            let t = gf.mat_add(&gf.mat_add(y, &y.transpose()), &xtx);
            for z in &syms {
                if gf.mat_mul(&t, z).is_zero() {
                    count += 1;
                }
            }
        });
    });
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a1_b1_is_2q_minus_1() {
        for q in [3u32, 5, 7, 9] {
            let gf = Gf::from_order(q).unwrap();
            let c = chart_count(1, 1, &gf, Budget::default()).unwrap();
            assert_eq!(c, 2 * q as u128 - 1);
            assert_eq!(chart_count_exhaustive(1, 1, &gf, Budget::default()).unwrap(), c);
        }
    }

    #[test]
    fn structured_matches_exhaustive() {
        let gf = Gf::new(3, 1).unwrap();
        for (a, b) in [(1, 2), (1, 3), (2, 2)] {
            assert_eq!(
                chart_count(a, b, &gf, Budget::default()).unwrap(),
                chart_count_exhaustive(a, b, &gf, Budget::default()).unwrap()
            );
        }
    }

    #[test]
    fn char2_rejected() {
        let gf = Gf::new(2, 1).unwrap();
        assert!(chart_count(1, 1, &gf, Budget::default()).is_err());
    }
}
