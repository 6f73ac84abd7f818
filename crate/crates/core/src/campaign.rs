//! Verification campaigns: each runs one family of checks and returns a
//! [`Report`] whose JSON form is canonical (sorted keys, no clock, seed echoed).

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::char2::{classify_form, parity_empty_check};
use crate::cmindex::{self, CMShape, IndexC};
use crate::deform::{char2_obstruction_point, closure_witness_search, lift_step, odd_obstruction_point, semicontinuity_sweep, tangent_dim};
use crate::error::{Error, Result};
use crate::field::{Gf, Matrix};
use crate::hasse::{poset9, search_examples, PosetExport};
use crate::localmodel::{
    all_labels, chart_count, chart_count_exhaustive, count_by_stratum, dim_formula, enumerate, interpolate_degree, stratum_leq,
    Budget, StratumLabel,
};
use crate::pimodule::{split_gram, FormCase, PiSpace};
use crate::weights::weight_sweep;

/// Stable identifiers of the checked statements.
pub const PROPOSITIONS: &[(&str, &str)] = &[
    ("stratum-inequality", "every point satisfies 0 ≤ h ≤ ℓ ≤ a"),
    ("dimension-formula", "count degree of X_{h,ℓ} is ab − (ℓ−h)(ℓ−h+1)/2"),
    ("closure-relations", "a degenerating family exists for every comparable pair"),
    ("semicontinuity", "generic label of a family dominates its special label"),
    ("smooth-locus", "tangent dimension ab exactly on the strata h = ℓ"),
    ("obstruction", "the first-order family at h < ℓ does not extend"),
    ("form-classification", "symmetric forms over F_2^f reduce to I or hyperbolic blocks"),
    ("parity-emptiness", "in char 2 case 2 only strata with ℓ ≡ a mod 2 occur"),
    ("char2-obstruction", "the char 2 case 1 family at X_{1,1} does not extend to third order"),
    ("char2-smooth-locus", "in char 2 case 1 the smooth locus is X_{0,0}"),
    ("weight-vanishing", "criterion false implies no nonzero sections"),
    ("hasse-exclusions", "bm = 0 and the two hasse implications"),
    ("conjugate-orthogonality", "𝓕₁, 𝓕₂ have ranks 1, n and 𝓕₂ = 𝓕₁^⊥'"),
    ("small-n-emptiness", "R1 and P1 are empty for n ≤ 2"),
    ("refined-closure", "the nine-stratum closure sets form a poset refining the coarse order"),
    ("cm-product-formula", "|C| is the product of (n+1)(n+2)/2 over legs"),
    ("cm-order", "the order on C is a partial order, per leg the (h, ℓ) order"),
    ("chart-count", "point count of the chart equations"),
    ("chart-degree", "count degree of the chart equations is ab"),
];

pub fn proposition(id: &str) -> Option<&'static str> {
    PROPOSITIONS.iter().find(|(k, _)| *k == id).map(|(_, d)| *d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Not decidable with the given inputs (e.g. too few samples).
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub statement: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(id: &str, status: Status, detail: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            statement: proposition(id).unwrap_or("").into(),
            status,
            detail: detail.into(),
        }
    }

    fn from_bool(id: &str, ok: bool, detail: impl Into<String>) -> Check {
        Check::new(id, if ok { Status::Pass } else { Status::Fail }, detail)
    }
}

/// Tabular part of a report (for CSV and text output).
#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Table {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub campaign: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub data: Value,
    pub table: Table,
}

impl Report {
    fn new(campaign: &str, config: Value) -> Report {
        Report {
            tool: "splitlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            campaign: campaign.into(),
            config,
            checks: Vec::new(),
            data: Value::Null,
            table: Table::default(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status != Status::Pass).collect()
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }
}

/// Progress sink for long campaigns (the CLI points it at standard error).
pub type Progress<'a> = &'a dyn Fn(&str);

pub fn silent(_: &str) {}

fn field(q: u32) -> Result<Arc<Gf>> {
    Ok(Arc::new(Gf::from_order(q)?))
}

fn case_for(gf: &Gf, case: Option<FormCase>) -> FormCase {
    case.unwrap_or_else(|| FormCase::default_for(gf.p()))
}

fn label_key(l: StratumLabel) -> String {
    l.to_string()
}

#[derive(Debug, Clone, Serialize)]
pub struct CountParams {
    pub a: usize,
    pub b: usize,
    pub qs: Vec<u32>,
    pub case: Option<FormCase>,
    pub budget: u128,
}

/// Stratum counts over each field, the label range, and count degrees for
/// odd characteristic when at least two fields are sampled.
pub fn count(p: &CountParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("count", serde_json::to_value(p).expect("params"));
    let mut table = Table::new(&["q", "case", "h", "l", "count"]);
    let mut per_q: BTreeMap<u32, BTreeMap<StratumLabel, u64>> = BTreeMap::new();
    let mut bad_labels = Vec::new();
    let mut all_odd = true;
    for &q in &p.qs {
        progress(&format!("count: (a,b)=({},{}) q={q}", p.a, p.b));
        let gf = field(q)?;
        all_odd &= gf.p() != 2;
        let case = case_for(&gf, p.case);
        let space = PiSpace::standard(p.a, p.b, gf, case)?;
        let counts = count_by_stratum(&space, Budget::new(p.budget))?;
        for (l, c) in &counts {
            if !(l.h <= l.l && l.l <= p.a) {
                bad_labels.push(format!("q={q} {l}"));
            }
            table.push(vec![q.to_string(), case.to_string(), l.h.to_string(), l.l.to_string(), c.to_string()]);
        }
        per_q.insert(q, counts);
    }
    let points: u64 = per_q.values().flat_map(|m| m.values()).sum();
    report.checks.push(Check::from_bool(
        "stratum-inequality",
        bad_labels.is_empty(),
        if bad_labels.is_empty() { format!("{points} points") } else { bad_labels.join(", ") },
    ));
    let mut degrees = BTreeMap::new();
    if all_odd && per_q.len() >= 2 {
        let mut status = Status::Pass;
        let mut notes = Vec::new();
        for l in all_labels(p.a) {
            let samples: Vec<(u64, u64)> =
                per_q.iter().map(|(&q, m)| (q as u64, m.get(&l).copied().unwrap_or(0))).collect();
            if samples.iter().all(|&(_, c)| c == 0) {
                degrees.insert(label_key(l), json!(null));
                continue;
            }
            let expected = dim_formula(p.a, p.b, l.h, l.l)?;
            match interpolate_degree(&samples) {
                Ok(Some(d)) => {
                    degrees.insert(label_key(l), json!(d));
                    if d != expected {
                        status = Status::Fail;
                        notes.push(format!("{l}: degree {d}, expected {expected}"));
                    }
                }
                Ok(None) => {
                    degrees.insert(label_key(l), json!(null));
                }
                Err(e) => {
                    degrees.insert(label_key(l), json!(null));
                    if status == Status::Pass {
                        status = Status::Inconclusive;
                    }
                    notes.push(format!("{l}: {e}"));
                }
            }
        }
        let detail = if notes.is_empty() { format!("{} samples per stratum", p.qs.len()) } else { notes.join("; ") };
        report.checks.push(Check::new("dimension-formula", status, detail));
    }
    let counts: BTreeMap<String, BTreeMap<String, u64>> = per_q
        .iter()
        .map(|(q, m)| (q.to_string(), m.iter().map(|(l, c)| (label_key(*l), *c)).collect()))
        .collect();
    report.data = json!({ "counts": counts, "degrees": degrees });
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureParams {
    pub a: usize,
    pub b: usize,
    pub q: u32,
    pub order: usize,
    pub budget: usize,
    pub sweep: usize,
    pub seed: u64,
}

/// Witness search for every comparable pair plus a random semicontinuity sweep.
pub fn closure(p: &ClosureParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("closure", serde_json::to_value(p).expect("params"));
    let gf = field(p.q)?;
    let labels = all_labels(p.a);
    let mut table = Table::new(&["special", "generic", "comparable", "witness", "attempts"]);
    let mut missing = Vec::new();
    let mut reached: BTreeMap<(StratumLabel, StratumLabel), bool> = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut idx = 0u64;
    for &s in &labels {
        for &g in &labels {
            let comparable = stratum_leq(s, g);
            if !comparable {
                reached.insert((s, g), false);
                table.push(vec![s.to_string(), g.to_string(), "no".into(), "-".into(), "0".into()]);
                continue;
            }
            progress(&format!("closure: {s} → {g}"));
            let w = closure_witness_search(gf.clone(), p.a, p.b, s, g, p.order, p.budget, p.seed.wrapping_add(idx))?;
            idx += 1;
            let attempts = match &w {
                crate::deform::WitnessOutcome::Found { attempts, .. } => *attempts,
                crate::deform::WitnessOutcome::Exhausted { attempts } => *attempts,
            };
            if !w.found() {
                missing.push(format!("{s}→{g}"));
            }
            reached.insert((s, g), w.found());
            table.push(vec![
                s.to_string(),
                g.to_string(),
                "yes".into(),
                if w.found() { "found" } else { "exhausted" }.into(),
                attempts.to_string(),
            ]);
            witnesses.push(json!({ "special": s, "generic": g, "outcome": w }));
        }
    }
    let pairs = witnesses.len();
    report.checks.push(Check::from_bool(
        "closure-relations",
        missing.is_empty(),
        if missing.is_empty() { format!("{pairs} comparable pairs, all witnessed") } else { format!("no witness: {}", missing.join(", ")) },
    ));
    let mut sweep_json = Value::Null;
    if p.sweep > 0 {
        progress(&format!("closure: semicontinuity sweep of {} families", p.sweep));
        let sw = semicontinuity_sweep(gf, p.a, p.b, p.order, p.sweep, p.seed)?;
        for (s, g, _) in &sw.observed {
            reached.insert((*s, *g), true);
        }
        report.checks.push(Check::from_bool(
            "semicontinuity",
            sw.violations == 0 && sw.prediction_mismatches == 0,
            format!(
                "{} families, {} violations, {} prediction mismatches, {} skipped for truncation",
                sw.families, sw.violations, sw.prediction_mismatches, sw.truncation_skipped
            ),
        ));
        sweep_json = serde_json::to_value(&sw).expect("sweep");
    }
    let reach_ok = reached.iter().all(|(&(s, g), &r)| r == stratum_leq(s, g));
    let matrix: BTreeMap<String, BTreeMap<String, bool>> = labels
        .iter()
        .map(|&s| (label_key(s), labels.iter().map(|&g| (label_key(g), reached[&(s, g)])).collect()))
        .collect();
    report.checks.push(Check::from_bool(
        "closure-relations",
        reach_ok,
        format!("{}×{} reachability table {} the order", labels.len(), labels.len(), if reach_ok { "matches" } else { "differs from" }),
    ));
    report.data = json!({ "reachability": matrix, "witnesses": witnesses, "sweep": sweep_json });
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentParams {
    pub a: usize,
    pub b: usize,
    pub q: u32,
    pub case: Option<FormCase>,
    pub budget: u128,
}

/// Tangent dimensions over a full enumeration, by stratum.
fn tangent_table(space: &PiSpace, budget: u128) -> Result<BTreeMap<StratumLabel, BTreeMap<usize, u64>>> {
    let mut out: BTreeMap<StratumLabel, BTreeMap<usize, u64>> = BTreeMap::new();
    for x in enumerate(space, Budget::new(budget))? {
        let lab = x.invariants(space)?;
        *out.entry(lab).or_default().entry(tangent_dim(space, &x)).or_insert(0) += 1;
    }
    Ok(out)
}

fn smooth_exceptions(
    dims: &BTreeMap<StratumLabel, BTreeMap<usize, u64>>,
    ab: usize,
    smooth: impl Fn(StratumLabel) -> bool,
) -> Vec<String> {
    let mut bad = Vec::new();
    for (l, ts) in dims {
        for (&t, &c) in ts {
            if (t == ab) != smooth(*l) {
                bad.push(format!("{l}: {c} points of tangent dimension {t}"));
            }
        }
    }
    bad
}

fn tangent_json(dims: &BTreeMap<StratumLabel, BTreeMap<usize, u64>>, table: &mut Table) -> Value {
    let mut out = BTreeMap::new();
    for (l, ts) in dims {
        for (t, c) in ts {
            table.push(vec![l.h.to_string(), l.l.to_string(), t.to_string(), c.to_string()]);
        }
        out.insert(label_key(*l), ts.iter().map(|(t, c)| (t.to_string(), *c)).collect::<BTreeMap<_, _>>());
    }
    json!(out)
}

/// Smooth-locus check by tangent dimensions and the obstruction families.
pub fn tangent(p: &TangentParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("tangent", serde_json::to_value(p).expect("params"));
    let gf = field(p.q)?;
    let case = case_for(&gf, p.case);
    let space = PiSpace::standard(p.a, p.b, gf.clone(), case)?;
    progress(&format!("tangent: ({},{}) q={} {case}", p.a, p.b, p.q));
    let dims = tangent_table(&space, p.budget)?;
    let ab = p.a * p.b;
    let mut table = Table::new(&["h", "l", "tangent", "points"]);
    let mut obstructions = Vec::new();
    match case {
        FormCase::OddChar => {
            let bad = smooth_exceptions(&dims, ab, |l| l.h == l.l);
            report.checks.push(Check::from_bool("smooth-locus", bad.is_empty(), if bad.is_empty() { "no exceptions".into() } else { bad.join("; ") }));
            let mut unexpected = Vec::new();
            for l in all_labels(p.a).into_iter().filter(|l| l.h < l.l) {
                let out = lift_step(&odd_obstruction_point(gf.clone(), p.a, p.b, l.h, l.l)?);
                if out.solvable {
                    unexpected.push(l.to_string());
                }
                obstructions.push(json!({ "label": l, "solvable": out.solvable }));
            }
            report.checks.push(Check::from_bool(
                "obstruction",
                unexpected.is_empty(),
                if unexpected.is_empty() { format!("{} families, none extends", obstructions.len()) } else { format!("extends at {}", unexpected.join(", ")) },
            ));
        }
        FormCase::Char2Case1 => {
            let bad = smooth_exceptions(&dims, ab, |l| l == StratumLabel::new(0, 0));
            report.checks.push(Check::from_bool(
                "char2-smooth-locus",
                bad.is_empty(),
                if bad.is_empty() { "no exceptions".into() } else { bad.join("; ") },
            ));
            if p.a == 1 {
                let out = lift_step(&char2_obstruction_point(gf.clone(), p.b)?);
                obstructions.push(json!({ "label": StratumLabel::new(1, 1), "solvable": out.solvable }));
                report.checks.push(Check::from_bool("char2-obstruction", !out.solvable, format!("solvable: {}", out.solvable)));
            }
        }
        FormCase::Char2Case2 => {}
    }
    report.data = json!({ "tangent": tangent_json(&dims, &mut table), "obstructions": obstructions, "ab": ab });
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct Char2Params {
    pub a: usize,
    pub b: usize,
    pub q: u32,
    pub max_d: usize,
    pub budget: u128,
}

/// Every symmetric d×d matrix over the field, d ≤ max_d.
fn classify_exhaustive(gf: &Gf, max_d: usize, budget: u128) -> Result<(u64, u64, Vec<String>)> {
    let q = gf.order() as u128;
    let mut checked = 0u64;
    let mut degenerate = 0u64;
    let mut bad = Vec::new();
    for d in 1..=max_d {
        let slots: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
        let total = q.checked_pow(slots.len() as u32).unwrap_or(u128::MAX);
        Budget::new(budget).check(total)?;
        for code in 0..total {
            let mut g = Matrix::zeros(d, d);
            let mut c = code;
            for &(i, j) in &slots {
                let x = (c % q) as u32;
                c /= q;
                g[(i, j)] = x;
                g[(j, i)] = x;
            }
            checked += 1;
            match classify_form(gf, &g) {
                Err(Error::Degenerate) => {
                    degenerate += 1;
                    if gf.inverse(&g).is_some() {
                        bad.push(format!("{g:?}: rejected but invertible"));
                    }
                }
                Err(e) => return Err(e),
                Ok(cl) => {
                    let case1 = (0..d).any(|i| g[(i, i)] != 0);
                    let normal = if cl.case == 1 { Matrix::identity(d) } else { split_gram(d) };
                    let got = gf.mat_mul3(&cl.change.transpose(), &g, &cl.change);
                    if got != normal || case1 != (cl.case == 1) {
                        bad.push(format!("{g:?}: case {} with normal form {:?}", cl.case, got));
                    }
                }
            }
        }
    }
    Ok((checked, degenerate, bad))
}

/// Characteristic-2 campaign: form classification, parity emptiness (case 2),
/// the case-1 obstruction and the case-1 smooth locus.
pub fn char2(p: &Char2Params, progress: Progress) -> Result<Report> {
    let mut report = Report::new("char2", serde_json::to_value(p).expect("params"));
    let gf = field(p.q)?;
    if gf.p() != 2 {
        return Err(Error::CaseMismatch { case: "char2".into(), p: gf.p() });
    }
    progress(&format!("char2: classifying forms of size ≤ {}", p.max_d));
    let (checked, degenerate, bad) = classify_exhaustive(&gf, p.max_d, p.budget)?;
    report.checks.push(Check::from_bool(
        "form-classification",
        bad.is_empty(),
        format!("{checked} matrices, {degenerate} degenerate, {} mismatches", bad.len()),
    ));
    let mut parity = Value::Null;
    if (p.a + p.b) % 2 == 0 {
        progress(&format!("char2: parity enumeration at ({},{})", p.a, p.b));
        let r = parity_empty_check(p.a, p.b, gf.clone(), Budget::new(p.budget))?;
        report.checks.push(Check::from_bool(
            "parity-emptiness",
            r.passed(),
            format!("{} points, occupied strata with wrong parity: {:?}", r.total, r.violations.iter().map(|l| l.to_string()).collect::<Vec<_>>()),
        ));
        parity = serde_json::to_value(&r).expect("parity");
    }
    let out = lift_step(&char2_obstruction_point(gf.clone(), p.b.max(1))?);
    report.checks.push(Check::from_bool("char2-obstruction", !out.solvable, format!("solvable: {}", out.solvable)));
    progress(&format!("char2: case-1 tangent dimensions at ({},{})", p.a, p.b));
    let space = PiSpace::standard(p.a, p.b, gf, FormCase::Char2Case1)?;
    let dims = tangent_table(&space, p.budget)?;
    let bad = smooth_exceptions(&dims, p.a * p.b, |l| l == StratumLabel::new(0, 0));
    report.checks.push(Check::from_bool("char2-smooth-locus", bad.is_empty(), if bad.is_empty() { "no exceptions".into() } else { bad.join("; ") }));
    let mut table = Table::new(&["h", "l", "tangent", "points"]);
    report.data = json!({
        "classification": { "checked": checked, "degenerate": degenerate, "mismatches": bad },
        "parity": parity,
        "obstruction_solvable": out.solvable,
        "case1_tangent": tangent_json(&dims, &mut table),
    });
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightsParams {
    pub a: usize,
    pub b: usize,
    pub range: i64,
}

pub fn weights(p: &WeightsParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("weights", serde_json::to_value(p).expect("params"));
    progress(&format!("weights: ({},{}) entries in [−{r},{r}]", p.a, p.b, r = p.range));
    let s = weight_sweep(p.a, p.b, -p.range, p.range)?;
    report.checks.push(Check::from_bool(
        "weight-vanishing",
        s.passed(),
        format!("{} weights, {} violations, {} whole-flag violations", s.tested, s.violations, s.whole_flag_violations),
    ));
    let mut table = Table::new(&["tested", "violations", "converse_candidates", "single_bound_disagreements"]);
    table.push(vec![
        s.tested.to_string(),
        s.violations.to_string(),
        s.converse_candidates.to_string(),
        s.single_bound_disagreements.to_string(),
    ]);
    report.data = serde_json::to_value(&s).expect("sweep");
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct HasseParams {
    pub n: usize,
    pub q: u32,
    pub budget: usize,
    pub seed: u64,
    /// Accepted data needed for the checks to count as conclusive.
    pub min_accepted: usize,
}

pub fn hasse(p: &HasseParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("hasse", serde_json::to_value(p).expect("params"));
    progress(&format!("hasse: n={} q={} budget {}", p.n, p.q, p.budget));
    let out = search_examples(p.n, field(p.q)?, p.budget, p.seed)?;
    let r = &out.report;
    let enough = r.accepted >= p.min_accepted;
    let volume = |ok: bool| match (ok, enough) {
        (false, _) => Status::Fail,
        (true, true) => Status::Pass,
        (true, false) => Status::Inconclusive,
    };
    let detail = format!("{} accepted, {} rejected, {} with failures", r.accepted, r.rejected, r.property_failures);
    report.checks.push(Check::new("hasse-exclusions", volume(r.property_failures == 0), detail.clone()));
    report.checks.push(Check::new("conjugate-orthogonality", volume(r.property_failures == 0), detail));
    report.checks.push(Check::from_bool(
        "small-n-emptiness",
        r.forbidden_labels.is_empty(),
        format!("realized: {}", r.realized.keys().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")),
    ));
    let poset = poset9(p.n)?;
    let check = poset.check();
    report.checks.push(Check::from_bool("refined-closure", check.passed(), format!("{check:?}")));
    let mut table = Table::new(&["label", "data"]);
    for (l, c) in &r.realized {
        table.push(vec![l.to_string(), c.to_string()]);
    }
    report.data = json!({ "search": r, "poset": PosetExport::from(&poset) });
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct CmParams {
    /// Explicit legs; when empty, `shapes` random shapes are drawn.
    pub legs: Vec<(usize, usize)>,
    pub shapes: usize,
    pub max_size: u128,
    pub seed: u64,
}

pub fn cm(p: &CmParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("cmindex", serde_json::to_value(p).expect("params"));
    let shapes: Vec<CMShape> = if p.legs.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        (0..p.shapes).map(|_| CMShape::random(&mut rng, 4, 3, p.max_size)).collect()
    } else {
        vec![CMShape::new(&p.legs)?]
    };
    let mut table = Table::new(&["legs", "size", "product_formula", "hasse_edges", "axioms"]);
    let mut size_ok = true;
    let mut axioms_ok = true;
    let mut exports = Vec::new();
    for s in &shapes {
        progress(&format!("cmindex: shape {:?}", s.legs()));
        let e = cmindex::export(s, p.max_size)?;
        size_ok &= e.size as u128 == e.product_formula;
        axioms_ok &= e.axioms.passed();
        let legs: Vec<String> = s.legs().iter().map(|l| format!("{}x{}", l.a, l.b)).collect();
        table.push(vec![
            legs.join(","),
            e.size.to_string(),
            e.product_formula.to_string(),
            e.hasse.len().to_string(),
            e.axioms.passed().to_string(),
        ]);
        exports.push(e);
    }
    // per-leg order against the (h, ℓ) order, for every leg size that occurs
    let mut single_ok = true;
    let mut mins: Vec<usize> = shapes.iter().flat_map(|s| s.legs().iter().map(|l| l.min())).collect();
    mins.sort_unstable();
    mins.dedup();
    for &n in &mins {
        let s = CMShape::new(&[(n, n)])?;
        for x in all_labels(n) {
            for y in all_labels(n) {
                single_ok &= cmindex::leq_c(&s, &IndexC(vec![x]), &IndexC(vec![y]))? == stratum_leq(x, y);
            }
        }
    }
    report.checks.push(Check::from_bool("cm-product-formula", size_ok, format!("{} shapes", shapes.len())));
    report.checks.push(Check::from_bool(
        "cm-order",
        axioms_ok && single_ok,
        format!("axioms: {axioms_ok}, single-leg agreement for min(a,b) ∈ {mins:?}: {single_ok}"),
    ));
    report.data = if p.legs.is_empty() {
        json!({ "shapes": exports.iter().map(|e| json!({ "shape": e.shape, "size": e.size, "axioms": e.axioms })).collect::<Vec<_>>() })
    } else {
        serde_json::to_value(&exports[0]).expect("export")
    };
    report.table = table;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartParams {
    pub a: usize,
    pub b: usize,
    pub qs: Vec<u32>,
    /// Largest number of (X, Y, Z) triples the exhaustive oracle may visit.
    pub budget: u128,
}

pub fn chart(p: &ChartParams, progress: Progress) -> Result<Report> {
    let mut report = Report::new("chart", serde_json::to_value(p).expect("params"));
    let mut table = Table::new(&["q", "count", "exhaustive"]);
    let mut samples = Vec::new();
    let mut mismatches = Vec::new();
    let mut counts = BTreeMap::new();
    for &q in &p.qs {
        progress(&format!("chart: ({},{}) q={q}", p.a, p.b));
        let gf = field(q)?;
        let c = chart_count(p.a, p.b, &gf, Budget::default())?;
        let ex = match chart_count_exhaustive(p.a, p.b, &gf, Budget::new(p.budget)) {
            Ok(e) => Some(e),
            Err(Error::Budget { .. }) => None,
            Err(e) => return Err(e),
        };
        if ex.is_some_and(|e| e != c) {
            mismatches.push(format!("q={q}: {c} vs exhaustive {}", ex.unwrap()));
        }
        if (p.a, p.b) == (1, 1) && c != 2 * q as u128 - 1 {
            mismatches.push(format!("q={q}: {c} ≠ 2q−1"));
        }
        table.push(vec![q.to_string(), c.to_string(), ex.map_or("-".into(), |e| e.to_string())]);
        counts.insert(q.to_string(), json!({ "count": c.to_string(), "exhaustive": ex.map(|e| e.to_string()) }));
        samples.push((q as u64, u64::try_from(c).map_err(|_| Error::Inconsistent("count exceeds 64 bits".into()))?));
    }
    report.checks.push(Check::from_bool(
        "chart-count",
        mismatches.is_empty(),
        if mismatches.is_empty() { format!("{} fields", p.qs.len()) } else { mismatches.join("; ") },
    ));
    let expected = p.a * p.b;
    let (status, degree, detail) = match interpolate_degree(&samples) {
        Ok(Some(d)) => (if d == expected { Status::Pass } else { Status::Fail }, Some(d), format!("degree {d}, expected {expected}")),
        Ok(None) => (Status::Fail, None, "zero polynomial".into()),
        Err(e) => (Status::Inconclusive, None, e.to_string()),
    };
    report.checks.push(Check::new("chart-degree", status, detail));
    report.data = json!({ "counts": counts, "degree": degree, "ab": expected });
    report.table = table;
    Ok(report)
}
