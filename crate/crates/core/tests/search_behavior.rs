//! Behavior of the extremal-ratio search beyond the acceptance brackets:
//! known cell values, the cardinality sweep, and the threshold short-circuit.

use qhm::{feasible_cell, knr_lower_bound_search, knr_monotonicity_probe};

#[test]
fn four_four_sits_at_three_quarters() {
    // the 4-point simplex attains the supremum of its cell
    let res = knr_lower_bound_search(4, 4, 20_000, 44, None).unwrap();
    assert!(res.best_ratio >= 0.75 - 1e-9, "got {}", res.best_ratio);
    assert!(res.best_ratio <= 0.75 + 1e-6, "got {}", res.best_ratio);
}

#[test]
fn two_two_is_the_trivial_half() {
    let res = knr_lower_bound_search(2, 2, 500, 2, None).unwrap();
    assert!((res.best_ratio - 0.5).abs() <= 1e-9);
}

#[test]
fn cardinality_sweep_at_fixed_strict_size() {
    // lower bounds across n = 4..7 at r = 4: the endpoints are the known
    // values 3/4 and 1/2; the flag is informational since deep runs push
    // both middle cells arbitrarily close to their common supremum
    let report = knr_monotonicity_probe(4, &[4, 5, 6, 7], 20_000, 19).unwrap();
    assert_eq!(report.entries.len(), 4);
    let first = &report.entries[0];
    let last = &report.entries[3];
    assert!((first.best_ratio - 0.75).abs() <= 1e-6, "n=4: {}", first.best_ratio);
    assert!((last.best_ratio - 0.5).abs() <= 1e-6, "n=7: {}", last.best_ratio);
    for e in &report.entries[1..3] {
        assert!(e.best_ratio > 0.5 && e.best_ratio < 2.0 / 3.0, "n={}: {}", e.n, e.best_ratio);
    }
}

#[test]
fn threshold_short_circuits_unbounded_cells() {
    // with a low threshold the run stops early instead of spending the
    // whole budget
    let res = knr_lower_bound_search(5, 5, 200_000, 3, Some(1.5)).unwrap();
    assert!(res.best_ratio >= 1.5);
    assert!(res.best_ratio < 50.0, "short-circuit must stop near the threshold");
}

#[test]
fn feasibility_matches_the_window() {
    for n in 2..=10usize {
        for r in 2..=n {
            let feasible = feasible_cell(n, r);
            let in_window = n <= 1 << (r - 1);
            assert_eq!(feasible, in_window, "({n}, {r})");
        }
    }
}
