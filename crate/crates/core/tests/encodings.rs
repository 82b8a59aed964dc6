use std::fs;
use std::path::PathBuf;

use sector_snake::ordering::{
    strict_generate, v2_generate, BitString, GeneratorBudget, StrictOutcome, ValidationMode,
};

fn published(n: u32) -> Vec<String> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/data/strict_n{n}.txt"));
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

fn strict(n: u32) -> sector_snake::ordering::Ordering {
    match strict_generate(n, &GeneratorBudget::unbounded()).unwrap() {
        StrictOutcome::Complete(o) => o,
        StrictOutcome::Incomplete(log) => panic!("n = {n} incomplete: {log:?}"),
    }
}

#[test]
fn strict_matches_published_tables_entry_for_entry() {
    for n in 5..=8 {
        let table = published(n);
        let o = strict(n);
        assert_eq!(table.len(), o.len());
        for (t, expected) in table.iter().enumerate() {
            assert_eq!(&o.state(t).to_string(), expected, "n = {n}, position {t}");
            assert_eq!(BitString::parse(expected, n).unwrap().value(), o.states()[t]);
        }
    }
}

#[test]
fn strict_n8_search_size_and_validation() {
    let o = strict(8);
    assert_eq!(o.search_nodes(), Some(65717));
    let report = o.validate(ValidationMode::Strict);
    assert!(report.passed(), "{report:?}");
    assert_eq!(report.length, 256);
}

#[test]
fn strict_is_reproducible() {
    for n in 1..=7 {
        assert_eq!(strict(n).states(), strict(n).states());
    }
}

#[test]
fn v2_diagnostics_to_three_decimals() {
    let expected = [(5, 1.452, 0.774), (6, 1.603, 0.698), (7, 1.740, 0.630), (8, 1.839, 0.580)];
    for (n, mean, frac) in expected {
        let d = v2_generate(n).unwrap().diagnostics();
        assert_eq!(format!("{:.3}", d.mean_adjacent_dh), format!("{mean:.3}"), "n = {n}");
        assert_eq!(d.max_adjacent_dh, 3);
        assert_eq!(format!("{:.3}", d.fraction_dh1), format!("{frac:.3}"), "n = {n}");
    }
}

#[test]
fn n9_attempt_under_small_budget_is_logged_not_claimed() {
    match strict_generate(9, &GeneratorBudget::nodes(200_000)).unwrap() {
        StrictOutcome::Complete(_) => panic!("a budget of 200k nodes should not complete n = 9"),
        StrictOutcome::Incomplete(log) => {
            assert_eq!(log.n, 9);
            assert_eq!(log.nodes, 200_000);
            assert!(log.deepest_index < 511);
        }
    }
}
