use rayon::prelude::*;
use std::collections::BTreeMap;

use super::{all_labels, LMPoint, StratumLabel};
use crate::error::{Error, Result};
use crate::field::{Gf, Matrix};
use crate::pimodule::{Pairing, PiSpace, Subspace};

/// Upper bound on the number of points an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_points: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_points: 50_000_000 }
    }
}

impl Budget {
    pub fn new(max_points: u128) -> Budget {
        Budget { max_points }
    }

    pub fn check(&self, estimate: u128) -> Result<()> {
        if estimate > self.max_points {
            Err(Error::Budget { estimate, budget: self.max_points })
        } else {
            Ok(())
        }
    }
}

/// Number of d-dimensional subspaces of F_q^n.
pub fn gaussian_binomial(n: usize, d: usize, q: u128) -> u128 {
    if d > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..d {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// [m choose a]_q · Π_{i ≤ min(a,b)} (q^i + 1): choices of ω₁ times the largest fibre.
pub fn estimate_points(space: &PiSpace) -> u128 {
    let q = space.field().order() as u128;
    let fib: u128 = (1..=space.a().min(space.b())).map(|i| q.pow(i as u32) + 1).product();
    gaussian_binomial(space.m(), space.a(), q) * fib
}

/// Every d-dimensional subspace of F_q^n as an n×d basis in canonical form,
/// in a fixed order (pivot sets lexicographically, then free entries).
pub fn subspaces(gf: &Gf, n: usize, d: usize) -> Vec<Matrix> {
    let q = gf.order();
    let mut out = Vec::new();
    if d > n {
        return out;
    }
    for pivots in itertools::Itertools::combinations(0..n, d) {
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (r, &c) in pivots.iter().enumerate() {
            for j in c + 1..n {
                if !pivots.contains(&j) {
                    free.push((r, j));
                }
            }
        }
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut rows = Matrix::zeros(d, n);
            for (r, &c) in pivots.iter().enumerate() {
                rows[(r, c)] = 1;
            }
            for (k, &(r, j)) in free.iter().enumerate() {
                rows[(r, j)] = digits[k];
            }
            out.push(rows.transpose());
            let mut k = 0;
            loop {
                if k == digits.len() {
                    break;
                }
                digits[k] += 1;
                if digits[k] < q {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                break;
            }
        }
    }
    out
}

/// All ω completing a given ω₁ ⊆ ker Π to a point. They are the preimages of
/// Lagrangians of S/W, where W = ω₁ + ω₂ and S = W^⊥.
pub fn fiber(space: &PiSpace, omega1: &Subspace) -> Vec<LMPoint> {
    let gf = space.field();
    let w2 = space.orthogonal(omega1, Pairing::Modified).expect("ω₁ ⊆ ker Π");
    let w = omega1.sum(gf, &w2).expect("ambient");
    let s = space.orthogonal(&w, Pairing::Alternating).expect("ambient");
    let comp = w.complement_in(gf, &s).expect("ambient");
    let l0 = comp.cols() / 2;
    if l0 == 0 {
        return vec![LMPoint { omega1: omega1.clone(), omega: w }];
    }
    let induced = gf.mat_mul3(&comp.transpose(), space.gram(), &comp);
    subspaces(gf, 2 * l0, l0)
        .into_iter()
        .filter(|c| gf.mat_mul3(&c.transpose(), &induced, c).is_zero())
        .map(|c| {
            let omega = Subspace::span(gf, &w.basis().hcat(&gf.mat_mul(&comp, &c)));
            LMPoint { omega1: omega1.clone(), omega }
        })
        .collect()
}

fn omega1_candidates(space: &PiSpace) -> Vec<Subspace> {
    let gf = space.field();
    let ker = space.ker_pi();
    subspaces(gf, space.m(), space.a())
        .into_iter()
        .map(|c| Subspace::span(gf, &gf.mat_mul(ker.basis(), &c)))
        .collect()
}

/// Every point exactly once, in a deterministic order.
pub fn enumerate(space: &PiSpace, budget: Budget) -> Result<Vec<LMPoint>> {
    budget.check(estimate_points(space))?;
    let cands = omega1_candidates(space);
    let parts: Vec<Vec<LMPoint>> = cands.par_iter().map(|w1| fiber(space, w1)).collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Points per stratum; every label 0 ≤ h ≤ ℓ ≤ a appears, possibly with count 0.
pub fn count_by_stratum(space: &PiSpace, budget: Budget) -> Result<BTreeMap<StratumLabel, u64>> {
    budget.check(estimate_points(space))?;
    let cands = omega1_candidates(space);
    let empty: BTreeMap<StratumLabel, u64> = all_labels(space.a()).into_iter().map(|l| (l, 0)).collect();
    let merged = cands
        .par_iter()
        .fold(
            || empty.clone(),
            |mut acc, w1| {
                for x in fiber(space, w1) {
                    *acc.entry(x.invariants_unchecked(space)).or_insert(0) += 1;
                }
                acc
            },
        )
        .reduce(
            || empty.clone(),
            |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            },
        );
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pimodule::FormCase;
    use std::sync::Arc;

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for q in [2u32, 3, 4] {
            let gf = Gf::from_order(q).unwrap();
            for n in 0..=4 {
                for d in 0..=n {
                    let subs = subspaces(&gf, n, d);
                    assert_eq!(subs.len() as u128, gaussian_binomial(n, d, q as u128));
                    let mut set = std::collections::HashSet::new();
                    for s in &subs {
                        assert_eq!(Subspace::span(&gf, s).basis(), s);
                        set.insert(s.clone());
                    }
                    assert_eq!(set.len(), subs.len());
                }
            }
        }
    }

    #[test]
    fn counts_11_q3() {
        let s = PiSpace::standard(1, 1, Arc::new(Gf::new(3, 1).unwrap()), FormCase::OddChar).unwrap();
        let c = count_by_stratum(&s, Budget::default()).unwrap();
        assert_eq!(c[&StratumLabel::new(0, 1)], 2);
        assert_eq!(c[&StratumLabel::new(0, 0)], 2);
        assert_eq!(c[&StratumLabel::new(1, 1)], 6);
        for x in enumerate(&s, Budget::default()).unwrap() {
            x.validate(&s).unwrap();
        }
    }

    #[test]
    fn case2_11_has_no_l0() {
        let s = PiSpace::standard(1, 1, Arc::new(Gf::new(2, 1).unwrap()), FormCase::Char2Case2).unwrap();
        let c = count_by_stratum(&s, Budget::default()).unwrap();
        assert_eq!(c[&StratumLabel::new(0, 0)], 0);
    }

    #[test]
    fn budget_is_enforced() {
        let s = PiSpace::standard(2, 2, Arc::new(Gf::new(3, 1).unwrap()), FormCase::OddChar).unwrap();
        let e = enumerate(&s, Budget::new(10)).unwrap_err();
        assert!(matches!(e, Error::Budget { .. }));
    }
}
