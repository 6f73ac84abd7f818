//! Families of points over R_N = F_q[t]/(t^N): validity, generic and special
//! strata, first-order deformations and square-zero lifting.

mod families;
mod lift;
mod witness;

pub use families::{
    char2_obstruction_point, family_from_xyz, family_general, odd_obstruction_point, ChartFamily,
    GeneralChart,
};
pub use lift::{lift_step, tangent_dim, LiftOutcome};
pub use witness::{closure_witness_search, random_family, semicontinuity_sweep, SweepReport, WitnessOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{generic_rank, special_rank, Gf, Matrix, SeriesMatrix, Valuation};
use crate::localmodel::{stratum_leq, LMPoint, StratumLabel};
use crate::pimodule::{PiSpace, SpaceDescriptor, Subspace};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 6;

/// Labels at t = 0 and after inverting t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataPair {
    pub special: StratumLabel,
    pub generic: StratumLabel,
}

impl StrataPair {
    pub fn is_semicontinuous(&self) -> bool {
        stratum_leq(self.special, self.generic)
    }
}

/// ω̃₁ ⊆ ω̃ inside ℰ ⊗ R_N, given by basis matrices (2m×a and 2m×m).
#[derive(Debug, Clone)]
pub struct FamilyPoint {
    space: PiSpace,
    omega1: SeriesMatrix,
    omega: SeriesMatrix,
}

/// Pivot rows of a full-column-rank matrix (rows where it is invertible).
pub(crate) fn pivot_rows(gf: &Gf, m: &Matrix) -> Vec<usize> {
    gf.rref(&m.transpose()).pivots
}

/// Express the columns of `v` in the column span of `b` (b(0) of full column rank):
/// returns (C, v − bC) with C read off the pivot rows.
pub(crate) fn span_coords(gf: &Gf, b: &SeriesMatrix, v: &SeriesMatrix) -> (SeriesMatrix, SeriesMatrix) {
    let piv = pivot_rows(gf, b.reduction());
    let inv = gf.sm_inverse(&b.select_rows(&piv)).expect("pivot block invertible");
    let c = gf.sm_mul(&inv, &v.select_rows(&piv));
    let resid = gf.sm_sub(v, &gf.sm_mul(b, &c));
    (c, resid)
}

fn first_failure(m: &SeriesMatrix) -> Option<usize> {
    m.valuation()
}

impl FamilyPoint {
    pub fn new(space: PiSpace, omega1: SeriesMatrix, omega: SeriesMatrix) -> Result<FamilyPoint> {
        let f = FamilyPoint { space, omega1, omega };
        f.validate()?;
        Ok(f)
    }

    /// The family constant in t.
    pub fn constant(space: &PiSpace, x: &LMPoint, n: usize) -> FamilyPoint {
        FamilyPoint {
            space: space.clone(),
            omega1: SeriesMatrix::constant(x.omega1.basis(), n),
            omega: SeriesMatrix::constant(x.omega.basis(), n),
        }
    }

    pub fn space(&self) -> &PiSpace {
        &self.space
    }
    pub fn order(&self) -> usize {
        self.omega.order()
    }
    pub fn omega1(&self) -> &SeriesMatrix {
        &self.omega1
    }
    pub fn omega(&self) -> &SeriesMatrix {
        &self.omega
    }

    /// Every point condition holds identically over R_N and the reduction is a point.
    pub fn validate(&self) -> Result<()> {
        let s = &self.space;
        let gf = s.field();
        let n2 = s.dim();
        if self.omega1.shape() != (n2, s.a()) || self.omega.shape() != (n2, s.m()) {
            return Err(Error::Shape("family bases must be 2m×a and 2m×m".into()));
        }
        if self.omega1.order() != self.omega.order() {
            return Err(Error::Shape("family bases have different truncation orders".into()));
        }
        if gf.rank(self.omega1.reduction()) != s.a() || gf.rank(self.omega.reduction()) != s.m() {
            return Err(Error::InvalidPoint("reduction of a family basis is not of full rank".into()));
        }
        self.special_point()?;
        let pb1 = gf.sm_lmul(s.pi(), &self.omega1);
        if let Some(k) = first_failure(&pb1) {
            return Err(Error::Constraint { equation: "Π ω₁ = 0".into(), order: k });
        }
        let (_, r) = span_coords(gf, &self.omega1, &gf.sm_lmul(s.pi(), &self.omega));
        if let Some(k) = first_failure(&r) {
            return Err(Error::Constraint { equation: "Π ω ⊆ ω₁".into(), order: k });
        }
        let (_, r) = span_coords(gf, &self.omega, &self.omega1);
        if let Some(k) = first_failure(&r) {
            return Err(Error::Constraint { equation: "ω₁ ⊆ ω".into(), order: k });
        }
        let g = SeriesMatrix::constant(s.gram(), self.order());
        let iso = gf.sm_mul3(&self.omega.transpose(), &g, &self.omega);
        if let Some(k) = first_failure(&iso) {
            return Err(Error::Constraint { equation: "ω totally isotropic".into(), order: k });
        }
        Ok(())
    }

    /// The t = 0 point.
    pub fn special_point(&self) -> Result<LMPoint> {
        let gf = self.space.field();
        LMPoint::new(
            &self.space,
            Subspace::span(gf, self.omega1.reduction()),
            Subspace::span(gf, self.omega.reduction()),
        )
    }

    /// Smith valuations of Π ω̃ and of the modified Gram matrix on ω̃₁.
    fn valuations(&self) -> (Vec<Valuation>, Vec<Valuation>) {
        let s = &self.space;
        let gf = s.field();
        let n = self.order();
        let pb = gf.sm_lmul(s.pi(), &self.omega);
        let gs = gf.mat_mul(s.gram(), &s.pi_section());
        let form = gf.sm_mul3(&self.omega1.transpose(), &SeriesMatrix::constant(&gs, n), &self.omega1);
        (gf.smith_valuations(&pb), gf.smith_valuations(&form))
    }

    /// Labels at t = 0 and generically. Valuations must leave headroom
    /// (≤ N − 2) so that a zero of R_N is not mistaken for a zero series.
    pub fn strata(&self) -> Result<StrataPair> {
        let n = self.order();
        let a = self.space.a();
        let (vh, vl) = self.valuations();
        for v in vh.iter().chain(&vl).flatten() {
            if *v + 2 > n {
                return Err(Error::Truncation { valuation: *v, n });
            }
        }
        let special = StratumLabel::checked(special_rank(&vh), a - special_rank(&vl), a)?;
        let generic = StratumLabel::checked(generic_rank(&vh), a - generic_rank(&vl), a)?;
        Ok(StrataPair { special, generic })
    }

    /// Truncate to a smaller order.
    pub fn truncate(&self, n: usize) -> FamilyPoint {
        FamilyPoint {
            space: self.space.clone(),
            omega1: self.omega1.with_order(n),
            omega: self.omega.with_order(n),
        }
    }

    /// Apply x ↦ g x (g a k-rational isometry commuting with Π).
    pub fn transform(&self, g: &Matrix) -> FamilyPoint {
        let gf = self.space.field();
        FamilyPoint {
            space: self.space.clone(),
            omega1: gf.sm_lmul(g, &self.omega1),
            omega: gf.sm_lmul(g, &self.omega),
        }
    }

    pub fn to_record(&self) -> FamilyRecord {
        FamilyRecord {
            space: self.space.descriptor(),
            order: self.order(),
            omega1: self.omega1.clone(),
            omega: self.omega.clone(),
        }
    }

    pub fn from_record(r: &FamilyRecord) -> Result<FamilyPoint> {
        let space = r.space.build()?;
        if r.omega.order() != r.order {
            return Err(Error::Shape("recorded order does not match the bases".into()));
        }
        FamilyPoint::new(space, r.omega1.clone(), r.omega.clone())
    }
}

/// Serializable family; `from_record` revalidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub space: SpaceDescriptor,
    pub order: usize,
    pub omega1: SeriesMatrix,
    pub omega: SeriesMatrix,
}

/// [`FamilyPoint::strata`] as a free function.
pub fn generic_special_strata(fam: &FamilyPoint) -> Result<StrataPair> {
    fam.strata()
}
