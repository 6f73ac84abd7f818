//! Points (ω₁ ⊆ ω) of the special fibre, their (h, ℓ) invariants, the
//! stratification order, exhaustive enumeration and point counts.

mod chart;
mod enumerate;
mod interpolate;

pub use chart::{chart_count, chart_count_exhaustive};
pub use enumerate::{
    count_by_stratum, enumerate, estimate_points, fiber, gaussian_binomial, subspaces, Budget,
};
pub use interpolate::interpolate_degree;

use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::pimodule::{Pairing, PiSpace, Subspace};

/// (h, ℓ) = (dim πω, dim ω₁ ∩ ω₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub struct StratumLabel {
    pub h: usize,
    pub l: usize,
}

impl Serialize for StratumLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.h, self.l].serialize(s)
    }
}

impl StratumLabel {
    pub fn new(h: usize, l: usize) -> StratumLabel {
        StratumLabel { h, l }
    }

    pub fn checked(h: usize, l: usize, a: usize) -> Result<StratumLabel> {
        if h <= l && l <= a {
            Ok(StratumLabel { h, l })
        } else {
            Err(Error::LabelOutOfRange { h, l, a })
        }
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.h, self.l)
    }
}

/// A stratum with its number of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StratumCount {
    pub stratum: StratumLabel,
    pub count: u64,
}

impl StratumCount {
    pub fn list(map: &BTreeMap<StratumLabel, u64>) -> Vec<StratumCount> {
        map.iter().map(|(&stratum, &count)| StratumCount { stratum, count }).collect()
    }
}

/// All labels 0 ≤ h ≤ ℓ ≤ a.
pub fn all_labels(a: usize) -> Vec<StratumLabel> {
    let mut v = Vec::new();
    for h in 0..=a {
        for l in h..=a {
            v.push(StratumLabel { h, l });
        }
    }
    v
}

/// ab − (ℓ−h)(ℓ−h+1)/2.
pub fn dim_formula(a: usize, b: usize, h: usize, l: usize) -> Result<usize> {
    StratumLabel::checked(h, l, a)?;
    let d = l - h;
    Ok(a * b - d * (d + 1) / 2)
}

/// c′ lies in the closure of c: h′ ≤ h and ℓ′ ≥ ℓ.
pub fn stratum_leq(lower: StratumLabel, upper: StratumLabel) -> bool {
    lower.h <= upper.h && lower.l >= upper.l
}

/// Covering relations (lower, upper) of the order on labels for a given a.
pub fn hasse_edges(a: usize) -> Vec<(StratumLabel, StratumLabel)> {
    let labels = all_labels(a);
    let mut edges = Vec::new();
    for &x in &labels {
        for &y in &labels {
            if x == y || !stratum_leq(x, y) {
                continue;
            }
            let covered = labels
                .iter()
                .any(|&z| z != x && z != y && stratum_leq(x, z) && stratum_leq(z, y));
            if !covered {
                edges.push((x, y));
            }
        }
    }
    edges
}

/// A point of the special fibre: ω₁ ⊆ ω ⊆ ℰ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LMPoint {
    pub omega1: Subspace,
    pub omega: Subspace,
}

impl LMPoint {
    pub fn new(space: &PiSpace, omega1: Subspace, omega: Subspace) -> Result<LMPoint> {
        let p = LMPoint { omega1, omega };
        p.validate(space)?;
        Ok(p)
    }

    pub fn validate(&self, space: &PiSpace) -> Result<()> {
        let gf = space.field();
        let n = space.dim();
        if self.omega.ambient() != n || self.omega1.ambient() != n {
            return Err(Error::AmbientMismatch(self.omega.ambient(), n));
        }
        if self.omega.dim() != space.m() {
            return Err(Error::InvalidPoint(format!("dim ω = {} ≠ m", self.omega.dim())));
        }
        if self.omega1.dim() != space.a() {
            return Err(Error::InvalidPoint(format!("dim ω₁ = {} ≠ a", self.omega1.dim())));
        }
        if !space.is_isotropic(&self.omega) {
            return Err(Error::InvalidPoint("ω is not totally isotropic".into()));
        }
        if !space.in_ker(&self.omega1) {
            return Err(Error::InvalidPoint("Π ω₁ ≠ 0".into()));
        }
        if !self.omega1.contains(gf, &space.pi_image(&self.omega))? {
            return Err(Error::InvalidPoint("Π ω ⊄ ω₁".into()));
        }
        if !self.omega.contains(gf, &self.omega1)? {
            return Err(Error::InvalidPoint("ω₁ ⊄ ω".into()));
        }
        Ok(())
    }

    /// ω₂ = ω₁^⊥ for the modified pairing.
    pub fn omega2(&self, space: &PiSpace) -> Result<Subspace> {
        self.validate(space)?;
        space.orthogonal(&self.omega1, Pairing::Modified)
    }

    pub fn invariants(&self, space: &PiSpace) -> Result<StratumLabel> {
        let w2 = self.omega2(space)?;
        let gf = space.field();
        let h = space.pi_image(&self.omega).dim();
        let l = self.omega1.intersect(gf, &w2)?.dim();
        StratumLabel::checked(h, l, space.a())
    }

    /// Invariants without revalidation (for trusted enumeration output).
    pub(crate) fn invariants_unchecked(&self, space: &PiSpace) -> StratumLabel {
        let gf = space.field();
        let w2 = space.orthogonal(&self.omega1, Pairing::Modified).expect("ω₁ ⊆ ker Π");
        let h = space.pi_image(&self.omega).dim();
        let l = self.omega1.intersect(gf, &w2).expect("ambient").dim();
        StratumLabel { h, l }
    }

    /// Image under an automorphism g of ℰ (columns transformed as x ↦ g x).
    pub fn transform(&self, space: &PiSpace, g: &crate::field::Matrix) -> LMPoint {
        let gf = space.field();
        LMPoint {
            omega1: self.omega1.image_under(gf, g).expect("ambient"),
            omega: self.omega.image_under(gf, g).expect("ambient"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Gf, Matrix};
    use crate::pimodule::FormCase;
    use std::sync::Arc;

    fn space11() -> PiSpace {
        PiSpace::standard(1, 1, Arc::new(Gf::new(3, 1).unwrap()), FormCase::OddChar).unwrap()
    }

    #[test]
    fn omega2_examples() {
        let s = space11();
        let gf = s.field();
        let w1 = Subspace::span_vecs(gf, 4, &[vec![0, 0, 1, 0]]);
        let x = LMPoint::new(&s, w1.clone(), s.ker_pi()).unwrap();
        assert_eq!(x.omega2(&s).unwrap(), w1);
        assert_eq!(x.invariants(&s).unwrap(), StratumLabel::new(0, 1));
        let w1 = Subspace::span_vecs(gf, 4, &[vec![0, 0, 1, 1]]);
        let x = LMPoint::new(&s, w1.clone(), s.ker_pi()).unwrap();
        let w2 = x.omega2(&s).unwrap();
        assert_eq!(w2.dim(), 1);
        assert_eq!(w1.intersect(gf, &w2).unwrap().dim(), 0);
        assert_eq!(x.invariants(&s).unwrap(), StratumLabel::new(0, 0));
    }

    #[test]
    fn invalid_points_rejected() {
        let s = space11();
        let gf = s.field();
        let w1 = Subspace::span_vecs(gf, 4, &[vec![1, 0, 0, 0]]);
        assert!(LMPoint::new(&s, w1, s.ker_pi()).is_err());
        let omega = Subspace::span(gf, &Matrix::from_cols(4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]));
        let w1 = Subspace::span_vecs(gf, 4, &[vec![0, 0, 1, 0]]);
        assert!(LMPoint::new(&s, w1, omega).is_err());
    }

    #[test]
    fn dim_formula_examples() {
        assert_eq!(dim_formula(2, 2, 0, 2).unwrap(), 1);
        assert_eq!(dim_formula(2, 3, 1, 1).unwrap(), 6);
        assert_eq!(dim_formula(1, 1, 0, 1).unwrap(), 0);
        assert!(dim_formula(1, 1, 1, 0).is_err());
    }

    #[test]
    fn order_examples() {
        assert!(stratum_leq(StratumLabel::new(0, 2), StratumLabel::new(1, 1)));
        assert!(!stratum_leq(StratumLabel::new(1, 1), StratumLabel::new(0, 0)));
        let c = StratumLabel::new(1, 2);
        assert!(stratum_leq(c, c));
    }

    #[test]
    fn hasse_edges_a1() {
        let e = hasse_edges(1);
        let l = StratumLabel::new;
        assert_eq!(e.len(), 2);
        assert!(e.contains(&(l(0, 1), l(0, 0))));
        assert!(e.contains(&(l(0, 1), l(1, 1))));
    }
}
