use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::families::{family_general, q4_matrix, ChartFamily, GeneralChart};
use super::{FamilyRecord, StrataPair};
use crate::error::{Error, Result};
use crate::field::{Gf, Matrix, SeriesMatrix};
use crate::localmodel::{all_labels, stratum_leq, StratumLabel};

/// Outcome of a closure-witness search.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum WitnessOutcome {
    Found { stage: String, attempts: usize, strata: StrataPair, family: FamilyRecord },
    /// The budget ran out; this is not evidence against the closure relation.
    Exhausted { attempts: usize },
}

impl WitnessOutcome {
    pub fn found(&self) -> bool {
        matches!(self, WitnessOutcome::Found { .. })
    }
}

fn mono_diag(s: usize, entries: &[(usize, usize)], unit: u32, n: usize) -> SeriesMatrix {
    let mut coeffs = vec![Matrix::zeros(s, s); n];
    for &(i, k) in entries {
        if k < n {
            coeffs[k][(i, i)] = unit;
        }
    }
    SeriesMatrix::from_coeffs(s, s, coeffs, n)
}

/// A chart with T = diag(0_{nt}, u t^e, …), Z = diag(u t^f, … (r times), 0) and
/// Y = (T − ᵗX Q₄ X)/2 for the given X (Q₄ only enters through X, taken zero here).
fn structured_chart(gf: &Gf, dims: (usize, usize), r: usize, nt: usize, e: usize, f: usize, unit: u32, n: usize) -> GeneralChart {
    let (s, bl) = dims;
    let t = mono_diag(s, &(nt..s).map(|i| (i, e)).collect::<Vec<_>>(), unit, n);
    let z = mono_diag(s, &(0..r).map(|i| (i, f)).collect::<Vec<_>>(), unit, n);
    let half = gf.inv(2).expect("p odd");
    let y = SeriesMatrix::from_coeffs(s, s, t.coeffs().iter().map(|c| gf.mat_scale(half, c)).collect(), n);
    GeneralChart { x: SeriesMatrix::zeros(bl, s, n), y, z }
}

fn random_unit(gf: &Gf, rng: &mut ChaCha8Rng) -> u32 {
    rng.gen_range(1..gf.order())
}

fn random_invertible(gf: &Gf, s: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let m = Matrix::from_vec(s, s, (0..s * s).map(|_| rng.gen_range(0..gf.order())).collect());
        if gf.inverse(&m).is_some() {
            return m;
        }
    }
}

fn random_series(gf: &Gf, r: usize, c: usize, n: usize, max_deg: usize, rng: &mut ChaCha8Rng) -> SeriesMatrix {
    let mut coeffs = vec![Matrix::zeros(r, c)];
    for _ in 1..=max_deg.min(n - 1) {
        coeffs.push(Matrix::from_vec(r, c, (0..r * c).map(|_| rng.gen_range(0..gf.order())).collect()));
    }
    SeriesMatrix::from_coeffs(r, c, coeffs, n)
}

/// Random chart for the requested generic (h', ℓ') over the special (h, ℓ):
/// conjugated diagonal T and Z with random monomial orders, random X.
fn random_chart(
    gf: &Gf,
    a: usize,
    b: usize,
    special: StratumLabel,
    generic: StratumLabel,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> GeneralChart {
    let s = special.l - special.h;
    let bl = b - special.l;
    let r = generic.h - special.h;
    let nt = generic.l - special.h;
    let mut t = SeriesMatrix::zeros(s, s, n);
    let mut z = SeriesMatrix::zeros(s, s, n);
    for i in nt..s {
        let k = rng.gen_range(1..=2);
        let mut c = t.coeff(k);
        c[(i, i)] = random_unit(gf, rng);
        t.set_coeff(k, c);
    }
    for i in 0..r {
        let k = rng.gen_range(1..=2);
        let mut c = z.coeff(k);
        c[(i, i)] = random_unit(gf, rng);
        z.set_coeff(k, c);
    }
    let p = random_invertible(gf, s, rng);
    let pi = gf.inverse(&p).unwrap();
    let ps = SeriesMatrix::constant(&p, n);
    let pis = SeriesMatrix::constant(&pi, n);
    let t = gf.sm_mul3(&ps.transpose(), &t, &ps);
    let z = gf.sm_mul3(&pis, &z, &pis.transpose());
    let x = if rng.gen_bool(0.5) { random_series(gf, bl, s, n, 1, rng) } else { SeriesMatrix::zeros(bl, s, n) };
    let q4 = q4_matrix(gf, a, b, special.l);
    let xtqx = gf.sm_mul3(&x.transpose(), &SeriesMatrix::constant(&q4, n), &x);
    let half = gf.inv(2).expect("p odd");
    let diff = gf.sm_sub(&t, &xtqx);
    let y = SeriesMatrix::from_coeffs(s, s, diff.coeffs().iter().map(|c| gf.mat_scale(half, c)).collect(), n);
    GeneralChart { x, y, z }
}

fn check_request(gf: &Gf, a: usize, special: StratumLabel, generic: StratumLabel) -> Result<()> {
    if gf.p() == 2 {
        return Err(Error::CaseMismatch { case: "odd-char".into(), p: 2 });
    }
    StratumLabel::checked(special.h, special.l, a)?;
    StratumLabel::checked(generic.h, generic.l, a)?;
    if !stratum_leq(special, generic) {
        return Err(Error::Precondition(format!("{special} is not below {generic}")));
    }
    Ok(())
}

fn accept(c: &ChartFamily, want: StrataPair) -> Option<StrataPair> {
    match c.family.strata() {
        Ok(st) if st == want => Some(st),
        _ => None,
    }
}

/// Search for a verified family with special label `special` and generic
/// label `generic`: structured monomial charts first, then seeded random ones.
#[allow(clippy::too_many_arguments)]
pub fn closure_witness_search(
    gf: Arc<Gf>,
    a: usize,
    b: usize,
    special: StratumLabel,
    generic: StratumLabel,
    n: usize,
    budget: usize,
    seed: u64,
) -> Result<WitnessOutcome> {
    check_request(&gf, a, special, generic)?;
    if a > b {
        return Err(Error::Precondition(format!("expected a ≤ b, got ({a},{b})")));
    }
    let want = StrataPair { special, generic };
    let (h, l) = (special.h, special.l);
    let s = l - h;
    let r = generic.h - h;
    let nt = generic.l - h;
    let mut attempts = 0;
    for (e, f) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        for unit in [1, gf.generator()] {
            if attempts >= budget {
                return Ok(WitnessOutcome::Exhausted { attempts });
            }
            attempts += 1;
            let chart = structured_chart(&gf, (s, b - l), r, nt, e, f, unit, n);
            if let Ok(c) = family_general(gf.clone(), a, b, h, l, &chart) {
                if let Some(st) = accept(&c, want) {
                    return Ok(WitnessOutcome::Found {
                        stage: "structured".into(),
                        attempts,
                        strata: st,
                        family: c.family.to_record(),
                    });
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while attempts < budget {
        attempts += 1;
        let chart = random_chart(&gf, a, b, special, generic, n, &mut rng);
        if let Ok(c) = family_general(gf.clone(), a, b, h, l, &chart) {
            if let Some(st) = accept(&c, want) {
                return Ok(WitnessOutcome::Found { stage: "random".into(), attempts, strata: st, family: c.family.to_record() });
            }
        }
    }
    Ok(WitnessOutcome::Exhausted { attempts })
}

/// A random valid family: random special label, random comparable target,
/// random chart. Returns the chart family (its strata are recomputed by callers).
pub fn random_family(gf: Arc<Gf>, a: usize, b: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<ChartFamily> {
    let labels = all_labels(a);
    let special = labels[rng.gen_range(0..labels.len())];
    let ups: Vec<StratumLabel> = labels.iter().copied().filter(|&g| stratum_leq(special, g)).collect();
    let generic = ups[rng.gen_range(0..ups.len())];
    let chart = random_chart(&gf, a, b, special, generic, n, rng);
    family_general(gf, a, b, special.h, special.l, &chart)
}

/// Aggregate of a semicontinuity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub families: usize,
    pub violations: usize,
    pub truncation_skipped: usize,
    pub prediction_mismatches: usize,
    /// (special, generic) → number of families observed.
    pub observed: Vec<(StratumLabel, StratumLabel, u64)>,
}

/// Build `count` random families (seeded per index, so the result does not
/// depend on scheduling) and check stratum_leq(special, generic) on each.
pub fn semicontinuity_sweep(gf: Arc<Gf>, a: usize, b: usize, n: usize, count: usize, seed: u64) -> Result<SweepReport> {
    let results: Vec<Result<(Option<StrataPair>, bool)>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
            let c = random_family(gf.clone(), a, b, n, &mut rng)?;
            match c.family.strata() {
                Ok(st) => Ok((Some(st), st.generic == c.predicted)),
                Err(Error::Truncation { .. }) => Ok((None, true)),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut report = SweepReport { families: count, violations: 0, truncation_skipped: 0, prediction_mismatches: 0, observed: Vec::new() };
    let mut seen: BTreeMap<(StratumLabel, StratumLabel), u64> = BTreeMap::new();
    for r in results {
        let (st, agrees) = r?;
        if !agrees {
            report.prediction_mismatches += 1;
        }
        match st {
            None => report.truncation_skipped += 1,
            Some(st) => {
                if !st.is_semicontinuous() {
                    report.violations += 1;
                }
                *seen.entry((st.special, st.generic)).or_insert(0) += 1;
            }
        }
    }
    report.observed = seen.into_iter().map(|((s, g), c)| (s, g, c)).collect();
    Ok(report)
}
