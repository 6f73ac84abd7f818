//! One line per acceptance criterion, printed without the test harness so
//! the lines always appear in `cargo test` output. Each criterion runs the same campaign
//! code as the CLI and fails on any non-passing check.

use std::time::Instant;

use splitlab::campaign::{self, silent, Report};
use splitlab::hasse::poset9;
use splitlab::pimodule::FormCase;

struct Outcome {
    reports: Vec<Report>,
    extra: Vec<(bool, String)>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed) && self.extra.iter().all(|(ok, _)| *ok)
    }

    fn summary(&self) -> String {
        let mut notes: Vec<String> = Vec::new();
        for r in &self.reports {
            for c in &r.checks {
                if c.status != campaign::Status::Pass {
                    notes.push(format!("{} [{}]: {}", c.id, r.campaign, c.detail));
                }
            }
        }
        notes.extend(self.extra.iter().filter(|(ok, _)| !ok).map(|(_, m)| m.clone()));
        notes.join(" | ")
    }
}

fn ac1() -> Outcome {
    let mut reports = Vec::new();
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        for q in [2, 3, 5] {
            let p = campaign::CountParams { a, b, qs: vec![q], case: None, budget: 1 << 40 };
            reports.push(campaign::count(&p, &silent).unwrap());
        }
    }
    Outcome { reports, extra: vec![] }
}

fn ac2() -> Outcome {
    let mut reports = Vec::new();
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        let p = campaign::CountParams { a, b, qs: vec![3, 5, 7, 9, 11, 13], case: None, budget: 1 << 40 };
        reports.push(campaign::count(&p, &silent).unwrap());
    }
    Outcome { reports, extra: vec![] }
}

fn ac3() -> Outcome {
    let p = campaign::ClosureParams { a: 2, b: 2, q: 3, order: 6, budget: 200, sweep: 10_000, seed: 7 };
    let r = campaign::closure(&p, &silent).unwrap();
    let pairs = r.data["witnesses"].as_array().map_or(0, Vec::len);
    Outcome { reports: vec![r], extra: vec![(pairs == 15, format!("{pairs} comparable pairs, expected 15"))] }
}

fn ac4() -> Outcome {
    let mut reports = Vec::new();
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        let p = campaign::TangentParams { a, b, q: 3, case: None, budget: 1 << 40 };
        reports.push(campaign::tangent(&p, &silent).unwrap());
    }
    Outcome { reports, extra: vec![] }
}

fn ac5() -> Outcome {
    let mut reports = Vec::new();
    for (a, b) in [(1, 1), (2, 2)] {
        let p = campaign::Char2Params { a, b, q: 2, max_d: 4, budget: 1 << 40 };
        reports.push(campaign::char2(&p, &silent).unwrap());
    }
    for (a, b) in [(1, 1), (1, 2)] {
        let p = campaign::TangentParams { a, b, q: 2, case: Some(FormCase::Char2Case1), budget: 1 << 40 };
        reports.push(campaign::tangent(&p, &silent).unwrap());
    }
    Outcome { reports, extra: vec![] }
}

fn ac6() -> Outcome {
    let reports = [(1, 1), (1, 2), (2, 2)]
        .into_iter()
        .map(|(a, b)| campaign::weights(&campaign::WeightsParams { a, b, range: 2 }, &silent).unwrap())
        .collect();
    Outcome { reports, extra: vec![] }
}

fn fixture(n: usize) -> String {
    std::fs::read_to_string(format!("{}/tests/fixtures/poset9_n{n}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn ac7() -> Outcome {
    let mut reports = Vec::new();
    for n in [1, 2] {
        for q in [2, 4] {
            let p = campaign::HasseParams { n, q, budget: 1200, seed: 11, min_accepted: 1000 };
            reports.push(campaign::hasse(&p, &silent).unwrap());
        }
    }
    let mut extra = Vec::new();
    for n in 1..=3 {
        let p = poset9(n).unwrap();
        extra.push((p.check().passed(), format!("poset9 n={n} consistency")));
        extra.push((p.to_fixture_json() == fixture(n), format!("poset9 n={n} differs from fixture")));
    }
    Outcome { reports, extra }
}

fn ac8() -> Outcome {
    let p = campaign::CmParams { legs: vec![], shapes: 20, max_size: 500, seed: 8 };
    Outcome { reports: vec![campaign::cm(&p, &silent).unwrap()], extra: vec![] }
}

fn ac9() -> Outcome {
    let r11 = campaign::chart(&campaign::ChartParams { a: 1, b: 1, qs: vec![3, 5, 7], budget: 1 << 24 }, &silent).unwrap();
    let r12 =
        campaign::chart(&campaign::ChartParams { a: 1, b: 2, qs: vec![3, 5, 7, 9, 11], budget: 1 << 24 }, &silent).unwrap();
    Outcome { reports: vec![r11, r12], extra: vec![] }
}

fn ac10() -> Outcome {
    let runs: Vec<Box<dyn Fn() -> String>> = vec![
        Box::new(|| {
            let p = campaign::ClosureParams { a: 1, b: 2, q: 3, order: 6, budget: 100, sweep: 300, seed: 21 };
            campaign::closure(&p, &silent).unwrap().to_json()
        }),
        Box::new(|| {
            let p = campaign::HasseParams { n: 2, q: 4, budget: 300, seed: 21, min_accepted: 1 };
            campaign::hasse(&p, &silent).unwrap().to_json()
        }),
        Box::new(|| {
            let p = campaign::CmParams { legs: vec![], shapes: 5, max_size: 200, seed: 21 };
            campaign::cm(&p, &silent).unwrap().to_json()
        }),
        Box::new(|| {
            let p = campaign::CountParams { a: 1, b: 2, qs: vec![3, 5, 7, 9], case: None, budget: 1 << 30 };
            campaign::count(&p, &silent).unwrap().to_json()
        }),
    ];
    let extra = runs
        .iter()
        .enumerate()
        .map(|(i, f)| (f() == f(), format!("campaign {i} not reproducible")))
        .collect();
    Outcome { reports: vec![], extra }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("stratum-inequality", ac1),
        ("dimension-formula", ac2),
        ("closure-relations", ac3),
        ("smooth-locus", ac4),
        ("char2", ac5),
        ("weights", ac6),
        ("hasse", ac7),
        ("cm-index", ac8),
        ("chart-counts", ac9),
        ("determinism", ac10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let ok = out.passed();
        let secs = t.elapsed().as_secs_f64();
        if ok {
            println!("AC{:<2} PASS {name} ({secs:.1}s)", i + 1);
        } else {
            println!("AC{:<2} FAIL {name} ({secs:.1}s): {}", i + 1, out.summary());
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
