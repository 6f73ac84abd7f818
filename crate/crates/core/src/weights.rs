//! Weight combinatorics for sections on the closed strata X̄_{h,h}: the
//! index criterion for vanishing, the minimal coset representatives ^PW,
//! and a dominance oracle that searches those representatives directly.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight (k, ℓ, r) with k, ℓ weakly decreasing. The twist r is carried
/// but ignored by every predicate here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    pub r: i64,
}

impl Weight {
    pub fn new(k: Vec<i64>, l: Vec<i64>, r: i64) -> Result<Weight> {
        if !dominant(&k) || !dominant(&l) {
            return Err(Error::Precondition("k and ℓ must be weakly decreasing".into()));
        }
        Ok(Weight { k, l, r })
    }

    pub fn a(&self) -> usize {
        self.k.len()
    }

    pub fn b(&self) -> usize {
        self.l.len()
    }
}

/// Pair of permutations with 1-based images: `w1[i-1] = w₁(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PWElement {
    pub w1: Vec<usize>,
    pub w2: Vec<usize>,
    pub h: usize,
}

fn non_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|p| p[0] >= p[1])
}

impl PWElement {
    /// w₁ decreasing on 1..h and on h+1..a; w₂ decreasing on 1..b−h and on b−h+1..b.
    pub fn satisfies_conditions(&self) -> bool {
        let (a, b, h) = (self.w1.len(), self.w2.len(), self.h);
        h <= a.min(b)
            && non_increasing(&self.w1[..h])
            && non_increasing(&self.w1[h..])
            && non_increasing(&self.w2[..b - h])
            && non_increasing(&self.w2[b - h..])
    }

    /// The permuted weight, split into the three Levi blocks of sizes
    /// h, a+b−2h, h.
    pub fn act(&self, w: &Weight) -> [Vec<i64>; 3] {
        let (a, b, h) = (self.w1.len(), self.w2.len(), self.h);
        let nk = |i: usize| -w.k[i - 1];
        let nl = |j: usize| -w.l[j - 1];
        let first = self.w1[..h].iter().map(|&i| nk(i)).collect();
        let middle = self.w1[h..]
            .iter()
            .rev()
            .map(|&i| nk(i))
            .chain(self.w2[..b - h].iter().map(|&j| nl(j)))
            .collect();
        let last = self.w2[b - h..].iter().map(|&j| nl(j)).collect();
        debug_assert!(a >= h);
        [first, middle, last]
    }
}

/// Weakly decreasing, i.e. dominant for the upper-triangular Borel of GL_n.
pub fn dominant(v: &[i64]) -> bool {
    v.windows(2).all(|p| p[0] >= p[1])
}

/// True iff there are a−h indices with one common k-value v and b−h
/// indices with ℓ_j ≥ v. When false, sections on X̄_{h,h} vanish.
pub fn criterion_indexes(w: &Weight, h: usize) -> Result<bool> {
    let (a, b) = (w.a(), w.b());
    if h >= a || h > b {
        return Err(Error::Precondition(format!("need h < a and h ≤ b, got h={h}, (a,b)=({a},{b})")));
    }
    let ok = w.k.iter().dedup_with_count().any(|(mult, &v)| {
        mult >= a - h && w.l.iter().filter(|&&l| l >= v).count() >= b - h
    });
    Ok(ok)
}

/// The single-bound variant k_{i₁} = … = k_{i_{a−h}} ≤ ℓ_{b−h+1}, for 1 ≤ h < a.
/// Its bound sits one index past the one the ^PW argument produces; it is
/// kept for comparison only.
pub fn criterion_single_bound(w: &Weight, h: usize) -> Result<bool> {
    let (a, b) = (w.a(), w.b());
    if h == 0 || h >= a || h > b {
        return Err(Error::Precondition(format!("single-bound form needs 1 ≤ h < a, h ≤ b; got h={h}")));
    }
    let bound = w.l[b - h];
    Ok(w.k.iter().dedup_with_count().any(|(mult, &v)| mult >= a - h && v <= bound))
}

/// Every element of ^PW for (a, b, h), built by choosing the h-subset of
/// each block; sorted.
pub fn enumerate_pw(a: usize, b: usize, h: usize) -> Result<Vec<PWElement>> {
    if h > a.min(b) {
        return Err(Error::Precondition(format!("h={h} exceeds min(a,b)")));
    }
    let split = |n: usize, front: usize| -> Vec<Vec<usize>> {
        (1..=n)
            .combinations(front)
            .map(|c| {
                let rest: Vec<usize> = (1..=n).filter(|i| !c.contains(i)).collect();
                c.iter().rev().chain(rest.iter().rev()).copied().collect()
            })
            .collect()
    };
    let mut out: Vec<PWElement> = split(a, h)
        .into_iter()
        .cartesian_product(split(b, b - h))
        .map(|(w1, w2)| PWElement { w1, w2, h })
        .collect();
    out.sort();
    Ok(out)
}

/// Largest sizes accepted by the factorial-size oracle.
pub const ORACLE_MAX: usize = 5;

/// Does some ^PW transform of (−k, ℓ^∨) become dominant for the Levi
/// GL_h × GL_{a+b−2h} × GL_h?
pub fn orbit_dominance_oracle(w: &Weight, h: usize) -> Result<bool> {
    let (a, b) = (w.a(), w.b());
    if a > ORACLE_MAX || b > ORACLE_MAX {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        return Err(Error::Budget { estimate: fact(a) * fact(b), budget: fact(ORACLE_MAX).pow(2) });
    }
    let pw = enumerate_pw(a, b, h)?;
    Ok(pw.iter().any(|e| e.act(w).iter().all(|blk| dominant(blk))))
}

/// All weakly decreasing tuples of length n with entries in [lo, hi].
pub fn decreasing_tuples(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    (lo..=hi)
        .rev()
        .combinations_with_replacement(n)
        .collect()
}

/// One line of a weight sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightRow {
    pub a: usize,
    pub b: usize,
    pub h: usize,
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    pub criterion: bool,
    pub oracle: bool,
}

/// Aggregate of an exhaustive sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSweep {
    pub a: usize,
    pub b: usize,
    pub range: (i64, i64),
    pub tested: u64,
    /// criterion false but oracle true; must be zero.
    pub violations: u64,
    /// criterion true but oracle false; the converse is not claimed.
    pub converse_candidates: u64,
    /// h = 0 weights with k₁ > k_a or k_a > ℓ_b on which the oracle is true.
    pub whole_flag_violations: u64,
    /// 1 ≤ h: weights where the single-bound form and the index criterion differ.
    pub single_bound_disagreements: u64,
}

impl WeightSweep {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.whole_flag_violations == 0
    }
}

/// Rows for every weight with entries in [lo, hi] and every h < a.
pub fn sweep_rows(a: usize, b: usize, lo: i64, hi: i64) -> Result<Vec<WeightRow>> {
    let ks = decreasing_tuples(a, lo, hi);
    let ls = decreasing_tuples(b, lo, hi);
    let mut rows = Vec::with_capacity(ks.len() * ls.len() * a);
    for h in 0..a {
        for k in &ks {
            for l in &ls {
                let w = Weight::new(k.clone(), l.clone(), 0)?;
                rows.push(WeightRow {
                    a,
                    b,
                    h,
                    k: k.clone(),
                    l: l.clone(),
                    criterion: criterion_indexes(&w, h)?,
                    oracle: orbit_dominance_oracle(&w, h)?,
                });
            }
        }
    }
    Ok(rows)
}

pub fn weight_sweep(a: usize, b: usize, lo: i64, hi: i64) -> Result<WeightSweep> {
    let mut s = WeightSweep { a, b, range: (lo, hi), ..Default::default() };
    for row in sweep_rows(a, b, lo, hi)? {
        s.tested += 1;
        if !row.criterion && row.oracle {
            s.violations += 1;
        }
        if row.criterion && !row.oracle {
            s.converse_candidates += 1;
        }
        if row.h == 0 && (row.k[0] > row.k[a - 1] || row.k[a - 1] > row.l[b - 1]) && row.oracle {
            s.whole_flag_violations += 1;
        }
        if row.h >= 1 {
            let w = Weight::new(row.k.clone(), row.l.clone(), 0)?;
            if criterion_single_bound(&w, row.h)? != row.criterion {
                s.single_bound_disagreements += 1;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(k: &[i64], l: &[i64]) -> Weight {
        Weight::new(k.to_vec(), l.to_vec(), 0).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominant(&[3, 2, 2, 0]));
        assert!(!dominant(&[0, 1]));
        assert!(dominant(&[4, 4, 4]));
        assert!(Weight::new(vec![0, 1], vec![0], 0).is_err());
    }

    #[test]
    fn criterion_examples() {
        assert!(!criterion_indexes(&w(&[3], &[2, 1]), 0).unwrap());
        assert!(criterion_indexes(&w(&[1], &[2, 1]), 0).unwrap());
        assert!(criterion_indexes(&w(&[5, 0], &[1, 0]), 1).unwrap());
        assert!(criterion_indexes(&w(&[5, 0], &[1, 0]), 2).is_err());
    }

    #[test]
    fn pw_matches_exhaustive_filter() {
        for a in 1..=4 {
            for b in 1..=4 {
                for h in 0..=a.min(b) {
                    let mut brute: Vec<PWElement> = (1..=a)
                        .permutations(a)
                        .cartesian_product((1..=b).permutations(b))
                        .map(|(w1, w2)| PWElement { w1, w2, h })
                        .filter(|e| e.satisfies_conditions())
                        .collect();
                    brute.sort();
                    let got = enumerate_pw(a, b, h).unwrap();
                    assert_eq!(got, brute, "({a},{b},{h})");
                    let binom = |n: usize, r: usize| (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1));
                    assert_eq!(got.len(), binom(a, h) * binom(b, h));
                }
            }
        }
        assert_eq!(enumerate_pw(2, 2, 1).unwrap().len(), 4);
        assert_eq!(enumerate_pw(3, 4, 0).unwrap().len(), 1);
    }

    #[test]
    fn oracle_examples() {
        assert!(!orbit_dominance_oracle(&w(&[3], &[2, 1]), 0).unwrap());
        assert!(orbit_dominance_oracle(&w(&[2, 2], &[2, 2]), 1).unwrap());
        assert!(orbit_dominance_oracle(&w(&[-1], &[-1, -1]), 0).unwrap());
        let big = Weight::new(vec![0; 6], vec![0; 6], 0).unwrap();
        assert!(matches!(orbit_dominance_oracle(&big, 0), Err(Error::Budget { .. })));
    }

    #[test]
    fn whole_flag_case_is_identity_action() {
        let e = &enumerate_pw(2, 3, 0).unwrap()[0];
        let x = w(&[4, 1], &[3, 2, 0]);
        let [f, m, l] = e.act(&x);
        assert!(f.is_empty() && l.is_empty());
        assert_eq!(m, vec![-4, -1, 0, -2, -3]);
    }

    #[test]
    fn small_sweeps_are_sound() {
        for (a, b) in [(1, 1), (1, 2), (2, 2)] {
            let s = weight_sweep(a, b, -2, 2).unwrap();
            assert!(s.passed(), "{s:?}");
            assert!(s.tested > 0);
        }
    }
}
