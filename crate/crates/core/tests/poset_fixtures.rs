use splitlab::hasse::poset9;

fn fixture(n: usize) -> String {
    let path = format!("{}/tests/fixtures/poset9_n{n}.json", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn poset9_matches_reviewed_fixtures() {
    for n in 1..=3 {
        assert_eq!(poset9(n).unwrap().to_fixture_json(), fixture(n), "n={n}");
    }
}

#[test]
fn posets_agree_for_large_n() {
    let p3 = poset9(3).unwrap();
    for n in 4..8 {
        assert_eq!(poset9(n).unwrap().edges(), p3.edges());
    }
}
