mod common;

use thresholds::bounds::{BoundVariant, VerifyOptions};
use thresholds::sequence::{
    necessary_conditions_report, summarize, sweep, to_csv, Classification, Family, CSV_HEADER,
};

#[test]
fn connectivity_rows_and_sigma_onset() {
    let rows = sweep(
        Family::Connectivity,
        3..=5,
        &BoundVariant::bell(),
        0,
        &VerifyOptions::default(),
    );
    let counts: Vec<_> = rows.iter().map(|r| r.min_count).collect();
    assert_eq!(counts, [Some(3), Some(16), Some(125)]);
    // K_5 is past the exact cover search; the row keeps the cheap columns.
    assert!(rows[2].q.is_none() && rows[2].error.is_some());
    assert_eq!(rows[2].ell, Some(4));

    let report = necessary_conditions_report(&rows).unwrap();
    assert_eq!(report.sigma_onsets[0].from_n, Some(3));
    assert!(report.min_count_increasing);
    assert!(report.contradictions.is_empty());
    for r in &rows[..2] {
        let k = common::minimal_bits(&Family::Connectivity.instance(r.n).unwrap());
        assert_eq!(common::sigma(&k, k.len()), 0);
    }
}

#[test]
fn principal_rows_have_closed_form() {
    let rows = sweep(
        Family::Principal,
        2..=5,
        &BoundVariant::bell(),
        1,
        &VerifyOptions::default(),
    );
    for r in &rows {
        let expect = 2f64.powf(-1.0 / r.n as f64);
        assert!((r.q.unwrap() - expect).abs() < 1e-8);
        assert!((r.p_c.unwrap() - expect).abs() < 1e-8);
        assert_eq!(r.nontrivial_info, Some(false));
        assert_eq!(r.sigma_empty_at[0], Some(false));
    }
    let summary = summarize(Family::Principal, &rows);
    let classification = summary.classification.unwrap().classification;
    assert_eq!(classification, Classification::NeverNontrivial);
    let report = summary.necessary_conditions.unwrap();
    assert_eq!(report.sigma_onsets[0].from_n, None);
    assert!(report.contradictions.is_empty());
}

#[test]
fn csv_layout() {
    let rows = sweep(
        Family::Triangle,
        3..=4,
        &BoundVariant::bell(),
        2,
        &VerifyOptions::default(),
    );
    let csv = to_csv(&rows, 2);
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        format!("{CSV_HEADER},sigma_empty_t0,sigma_empty_t1,sigma_empty_t2")
    );
    for line in lines {
        assert_eq!(line.split(',').count(), 15, "{line}");
    }
}

#[test]
fn empty_range() {
    #[allow(clippy::reversed_empty_ranges)]
    let range = 3..=2;
    let rows = sweep(
        Family::Connectivity,
        range,
        &BoundVariant::bell(),
        0,
        &VerifyOptions::default(),
    );
    assert!(rows.is_empty());
    assert_eq!(to_csv(&rows, 0).lines().count(), 1);
}
