//! Stratification index set for a general CM field: one (h, ℓ) per leg (τ, i),
//! ordered as a product of the single-signature orders.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localmodel::{all_labels, dim_formula, stratum_leq, StratumLabel};

/// Signature (a_{τ,i}, b_{τ,i}) of one leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Leg {
    pub a: usize,
    pub b: usize,
}

impl Leg {
    pub fn min(&self) -> usize {
        self.a.min(self.b)
    }
}

/// Legs flattened in (τ, i) order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CMShape {
    legs: Vec<Leg>,
}

/// T(n) = (n+1)(n+2)/2 labels on a leg with min(a,b) = n.
pub fn labels_per_leg(n: usize) -> u128 {
    let n = n as u128;
    (n + 1) * (n + 2) / 2
}

impl CMShape {
    pub fn new(legs: &[(usize, usize)]) -> Result<CMShape> {
        if legs.is_empty() {
            return Err(Error::Precondition("a CM shape needs at least one leg".into()));
        }
        Ok(CMShape { legs: legs.iter().map(|&(a, b)| Leg { a, b }).collect() })
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    /// |C| = Π T(min(a,b)).
    pub fn cardinality(&self) -> u128 {
        self.legs.iter().map(|l| labels_per_leg(l.min())).fold(1u128, |acc, t| acc.saturating_mul(t))
    }

    /// A random shape with |C| ≤ `max_size`.
    pub fn random<R: Rng>(rng: &mut R, max_legs: usize, max_sig: usize, max_size: u128) -> CMShape {
        loop {
            let k = rng.gen_range(1..=max_legs);
            let legs: Vec<(usize, usize)> =
                (0..k).map(|_| (rng.gen_range(0..=max_sig), rng.gen_range(0..=max_sig))).collect();
            let s = CMShape::new(&legs).expect("nonempty");
            if s.cardinality() <= max_size {
                return s;
            }
        }
    }
}

/// One (h, ℓ) per leg.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexC(pub Vec<StratumLabel>);

impl IndexC {
    pub fn validate(&self, shape: &CMShape) -> Result<()> {
        if self.0.len() != shape.legs.len() {
            return Err(Error::Shape(format!("index has {} legs, shape has {}", self.0.len(), shape.legs.len())));
        }
        for (c, leg) in self.0.iter().zip(&shape.legs) {
            StratumLabel::checked(c.h, c.l, leg.min())?;
        }
        Ok(())
    }

    /// Σ over legs of ab − (ℓ−h)(ℓ−h+1)/2. Reported only, never asserted.
    pub fn conjectural_dim(&self, shape: &CMShape) -> Result<usize> {
        self.validate(shape)?;
        self.0
            .iter()
            .zip(&shape.legs)
            .map(|(c, leg)| dim_formula(leg.min(), leg.a.max(leg.b), c.h, c.l))
            .sum()
    }
}

/// Every element of C, in lexicographic order of the legs.
pub fn gen_c(shape: &CMShape, budget: u128) -> Result<Vec<IndexC>> {
    let size = shape.cardinality();
    if size > budget {
        return Err(Error::Budget { estimate: size, budget });
    }
    let mut out = vec![IndexC(Vec::new())];
    for leg in &shape.legs {
        let labels = all_labels(leg.min());
        out = out
            .into_iter()
            .flat_map(|c| {
                labels.iter().map(move |&l| {
                    let mut v = c.0.clone();
                    v.push(l);
                    IndexC(v)
                })
            })
            .collect();
    }
    Ok(out)
}

/// c′ ≤ c iff h′ ≤ h ≤ ℓ ≤ ℓ′ on every leg.
pub fn leq_c(shape: &CMShape, lower: &IndexC, upper: &IndexC) -> Result<bool> {
    lower.validate(shape)?;
    upper.validate(shape)?;
    Ok(leq_unchecked(lower, upper))
}

fn leq_unchecked(lower: &IndexC, upper: &IndexC) -> bool {
    lower.0.iter().zip(&upper.0).all(|(&x, &y)| stratum_leq(x, y))
}

/// {c′ ∈ C : c′ ≤ c}.
pub fn closure_set(shape: &CMShape, c: &IndexC, budget: u128) -> Result<Vec<IndexC>> {
    c.validate(shape)?;
    Ok(gen_c(shape, budget)?.into_iter().filter(|x| leq_unchecked(x, c)).collect())
}

/// Covering relations (lower, upper) as indices into `elems`: the two differ
/// on exactly one leg, where they form a cover of the single-leg order.
pub fn hasse_diagram(elems: &[IndexC]) -> Vec<[usize; 2]> {
    let covers = |x: StratumLabel, y: StratumLabel| {
        x != y && stratum_leq(x, y) && (y.h - x.h) + (x.l - y.l) == 1
    };
    let mut out = Vec::new();
    for (i, x) in elems.iter().enumerate() {
        for (j, y) in elems.iter().enumerate() {
            let diff: Vec<usize> = (0..x.0.len()).filter(|&k| x.0[k] != y.0[k]).collect();
            if let [k] = diff.as_slice() {
                if covers(x.0[*k], y.0[*k]) {
                    out.push([i, j]);
                }
            }
        }
    }
    out
}

/// Covering relations computed from the order alone (no interval in between).
pub fn hasse_diagram_bruteforce(elems: &[IndexC]) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for (i, x) in elems.iter().enumerate() {
        for (j, y) in elems.iter().enumerate() {
            if i == j || !leq_unchecked(x, y) {
                continue;
            }
            let between = elems
                .iter()
                .enumerate()
                .any(|(k, z)| k != i && k != j && leq_unchecked(x, z) && leq_unchecked(z, y));
            if !between {
                out.push([i, j]);
            }
        }
    }
    out
}

/// Outcome of the exhaustive poset-axiom check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub elements: usize,
    pub reflexive: bool,
    pub antisymmetric: bool,
    pub transitive: bool,
    /// c′ ≤ c ⇒ |closure(c′)| ≤ |closure(c)|.
    pub closure_monotone: bool,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.reflexive && self.antisymmetric && self.transitive && self.closure_monotone
    }
}

pub fn check_axioms(shape: &CMShape, budget: u128) -> Result<AxiomCheck> {
    let elems = gen_c(shape, budget)?;
    let n = elems.len();
    let rel: Vec<Vec<bool>> = elems.iter().map(|x| elems.iter().map(|y| leq_unchecked(x, y)).collect()).collect();
    let reflexive = (0..n).all(|i| rel[i][i]);
    let antisymmetric = (0..n).all(|i| (0..n).all(|j| i == j || !(rel[i][j] && rel[j][i])));
    let transitive = (0..n).all(|i| (0..n).all(|j| !rel[i][j] || (0..n).all(|k| !rel[j][k] || rel[i][k])));
    let sizes: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| rel[i][j]).count()).collect();
    let closure_monotone = (0..n).all(|i| (0..n).all(|j| !rel[i][j] || sizes[i] <= sizes[j]));
    Ok(AxiomCheck { elements: n, reflexive, antisymmetric, transitive, closure_monotone })
}

/// An element of C with its reported dimension.
#[derive(Debug, Clone, Serialize)]
pub struct CmElement {
    pub index: IndexC,
    pub conjectural_dim: usize,
}

/// JSON export of C and its Hasse diagram.
#[derive(Debug, Clone, Serialize)]
pub struct CmExport {
    pub shape: CMShape,
    pub size: usize,
    pub product_formula: u128,
    pub elements: Vec<CmElement>,
    /// [lower, upper] positions in `elements`.
    pub hasse: Vec<[usize; 2]>,
    pub axioms: AxiomCheck,
}

pub fn export(shape: &CMShape, budget: u128) -> Result<CmExport> {
    let elems = gen_c(shape, budget)?;
    let elements = elems
        .iter()
        .map(|c| Ok(CmElement { index: c.clone(), conjectural_dim: c.conjectural_dim(shape)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(CmExport {
        shape: shape.clone(),
        size: elems.len(),
        product_formula: shape.cardinality(),
        hasse: hasse_diagram(&elems),
        elements,
        axioms: check_axioms(shape, budget)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn l(h: usize, l: usize) -> StratumLabel {
        StratumLabel::new(h, l)
    }

    #[test]
    fn sizes() {
        assert_eq!(gen_c(&CMShape::new(&[(1, 3)]).unwrap(), 100).unwrap().len(), 3);
        assert_eq!(gen_c(&CMShape::new(&[(1, 1), (2, 1)]).unwrap(), 100).unwrap().len(), 9);
        assert_eq!(gen_c(&CMShape::new(&[(2, 2)]).unwrap(), 100).unwrap().len(), 6);
        assert_eq!(gen_c(&CMShape::new(&[(0, 4), (3, 0)]).unwrap(), 100).unwrap().len(), 1);
        assert!(CMShape::new(&[]).is_err());
        let big = CMShape::new(&[(3, 3); 4]).unwrap();
        assert!(matches!(gen_c(&big, 1000), Err(Error::Budget { estimate: 10000, .. })));
    }

    #[test]
    fn two_leg_comparison() {
        let s = CMShape::new(&[(1, 1), (1, 1)]).unwrap();
        let upper = IndexC(vec![l(1, 1), l(0, 0)]);
        let lower = IndexC(vec![l(0, 1), l(0, 1)]);
        assert!(leq_c(&s, &lower, &upper).unwrap());
        assert!(!leq_c(&s, &upper, &lower).unwrap());
        assert!(leq_c(&s, &upper, &upper).unwrap());
        assert!(leq_c(&CMShape::new(&[(1, 1)]).unwrap(), &lower, &upper).is_err());
    }

    #[test]
    fn top_closure_is_product() {
        let s = CMShape::new(&[(2, 3), (1, 1)]).unwrap();
        let top = IndexC(vec![l(2, 2), l(1, 1)]);
        let cl = closure_set(&s, &top, 100).unwrap();
        let per_leg: Vec<usize> = (0..2)
            .map(|k| cl.iter().map(|c| c.0[k]).collect::<BTreeSet<_>>().len())
            .collect();
        assert_eq!(cl.len(), per_leg[0] * per_leg[1]);
        assert!(cl.contains(&top));
    }

    #[test]
    fn gen_c_is_duplicate_free_and_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let s = CMShape::random(&mut rng, 4, 3, 500);
            let c = gen_c(&s, 500).unwrap();
            assert_eq!(c.len() as u128, s.cardinality());
            assert_eq!(c.iter().collect::<BTreeSet<_>>().len(), c.len());
            assert!(c.iter().all(|x| x.validate(&s).is_ok()));
        }
    }

    #[test]
    fn hasse_diagram_matches_bruteforce() {
        for legs in [vec![(1, 1), (2, 2)], vec![(2, 3)], vec![(1, 2), (1, 1), (1, 5)]] {
            let s = CMShape::new(&legs).unwrap();
            let e = gen_c(&s, 500).unwrap();
            assert_eq!(hasse_diagram(&e), hasse_diagram_bruteforce(&e));
        }
    }

    #[test]
    fn single_leg_matches_local_model_order() {
        for a in 0..4 {
            let s = CMShape::new(&[(a, a + 1)]).unwrap();
            for x in all_labels(a) {
                for y in all_labels(a) {
                    assert_eq!(leq_c(&s, &IndexC(vec![x]), &IndexC(vec![y])).unwrap(), stratum_leq(x, y));
                }
            }
        }
    }

    #[test]
    fn conjectural_dims() {
        let s = CMShape::new(&[(2, 2), (1, 3)]).unwrap();
        assert_eq!(IndexC(vec![l(0, 2), l(0, 0)]).conjectural_dim(&s).unwrap(), 1 + 3);
        assert_eq!(IndexC(vec![l(1, 1), l(1, 1)]).conjectural_dim(&s).unwrap(), 4 + 3);
    }
}
