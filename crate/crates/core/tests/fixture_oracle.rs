//! Values below were computed by an independent spreadsheet-style script
//! (scripts/fixture_oracle.py) and frozen here.

use subscope_core::charts::{cpu_boxes_with_count, histogram_bins};
use subscope_core::decisions::{summarize, SubscribedStatus};
use subscope_core::filters::{slider_bounds, FilterMetric, View};
use subscope_core::ingest::{parse_export, Package};
use subscope_core::metrics::{weighted_usage, Analysis, UsageSource, Weights};

const FIXTURE: &[u8] = include_bytes!("data/fixture_10.csv");

// title, weighted usage, current-year usage, IF%, normalized IF% cost, CPU rank
type Row = (&'static str, f64, f64, f64, Option<f64>, u32);

const ORACLE: [Row; 10] = [
    ("Alpha Letters", 300.0, 210.0, 3.9029829941455256, Some(307.45714285714286), 6),
    ("Beta Reviews", 123.0, 18.45, 0.3429049344856426, Some(7290.650406504065), 8),
    ("Gamma Mathematics", 600.0, 480.0, 8.921103986618345, Some(89.675), 2),
    ("Delta Notes", 0.0, 0.0, 0.0, None, 10),
    ("Epsilon Journal", 2000.0, 1400.0, 26.019886627636836, Some(115.29642857142858), 3),
    ("Zeta Quarterly", 1000.0, 425.0, 7.898894154818326, Some(189.9), 5),
    ("Eta Proceedings", 400.0, 60.0, 1.115137998327293, Some(4483.75), 7),
    ("Theta Bulletin", 600.0, 300.0, 5.575689991636465, Some(161.415), 4),
    ("Iota Letters", 132.5, 119.25, 2.2163367716754947, Some(45.119496855345915), 1),
    ("Kappa Review", 225.0, 213.75, 3.9726791190409814, Some(1762.0350877192982), 9),
];

fn fixture() -> Package {
    parse_export(FIXTURE).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn weighted_usage_matches_exactly() {
    let pkg = fixture();
    for (record, row) in pkg.records().iter().zip(ORACLE) {
        assert_eq!(record.title, row.0);
        assert_eq!(weighted_usage(record, &Weights::default()), row.1, "{}", row.0);
        assert_eq!(record.usage, row.1);
    }
    assert_eq!(pkg.total_weighted_usage(), 5380.5);
}

#[test]
fn per_record_metrics() {
    let pkg = fixture();
    let analysis = Analysis::new(pkg, UsageSource::Exported).unwrap();
    for (m, row) in analysis.metrics().records.iter().zip(ORACLE) {
        assert!(close(m.current_year_usage, row.2), "{}: {}", row.0, m.current_year_usage);
        assert!(close(m.if_percent, row.3), "{}: {}", row.0, m.if_percent);
        match (m.normalized_if_cost, row.4) {
            (Some(a), Some(b)) => assert!(close(a, b), "{}: {a}", row.0),
            (a, b) => assert_eq!(a, b, "{}", row.0),
        }
        assert_eq!(m.cpu_rank, row.5, "{}", row.0);
    }
    assert!(close(analysis.metrics().package_if_percent, 59.96561657838491));
}

#[test]
fn recomputed_usage_agrees_with_export() {
    let pkg = fixture();
    let exported = Analysis::new(pkg.clone(), UsageSource::Exported).unwrap();
    let recomputed = Analysis::new(pkg, UsageSource::Recomputed(Weights::default())).unwrap();
    for (a, b) in exported.metrics().records.iter().zip(&recomputed.metrics().records) {
        assert_eq!(a.usage, b.usage);
        assert_eq!(a.cpu_rank, b.cpu_rank);
    }
}

#[test]
fn summary_table() {
    let pkg = fixture();
    let s = summarize(pkg.records());
    let expect = [
        (SubscribedStatus::True, 4, 5800.0),
        (SubscribedStatus::False, 3, 14500.0),
        (SubscribedStatus::Maybe, 2, 1700.0),
        (SubscribedStatus::Blank, 1, 400.0),
    ];
    for (status, n, dollars) in expect {
        assert_eq!(s.get(status).title_count, n, "{status:?}");
        assert_eq!(s.get(status).dollar_total, dollars, "{status:?}");
    }
    assert_eq!(s.total.title_count, 10);
    assert_eq!(s.total.dollar_total, 22400.0);
}

#[test]
fn slider_extents() {
    let analysis = Analysis::new(fixture(), UsageSource::Exported).unwrap();
    let bounds = slider_bounds(&analysis).unwrap();
    let expect = [
        (FilterMetric::Price, 100.0, 7000.0),
        (FilterMetric::Downloads, 0.0, 1000.0),
        (FilterMetric::Citations, 0.0, 50.0),
        (FilterMetric::Authorships, 0.0, 5.0),
        (FilterMetric::Usage, 0.0, 2000.0),
        (FilterMetric::OaPercent, 0.0, 80.0),
        (FilterMetric::CpuRank, 1.0, 10.0),
    ];
    for (metric, lo, hi) in expect {
        let r = bounds.get(metric).unwrap();
        assert_eq!((r.lo, r.hi), (lo, hi), "{metric}");
    }
}

#[test]
fn binning() {
    let pkg = fixture();
    let authorships: Vec<f64> = pkg.records().iter().map(|r| r.authorships).collect();
    let counts: Vec<usize> = histogram_bins(&authorships, 10).unwrap().iter().map(|b| b.count).collect();
    assert_eq!(counts, vec![4, 2, 1, 0, 1, 1, 0, 0, 0, 1]);

    let analysis = Analysis::new(pkg, UsageSource::Exported).unwrap();
    let grid = cpu_boxes_with_count(&View::all(&analysis), 10).unwrap();
    let counts: Vec<usize> = grid.columns.iter().map(|c| c.boxes.len()).collect();
    assert_eq!(counts, vec![5, 1, 0, 1, 0, 0, 1, 0, 0, 1]);
    let unbinned: Vec<&str> = grid.unbinned.iter().map(|b| b.title.as_str()).collect();
    assert_eq!(unbinned, vec!["Delta Notes"]);
}

#[test]
fn zero_usage_titles() {
    let pkg = fixture();
    let zero: Vec<&str> = pkg
        .records()
        .iter()
        .filter(|r| r.usage == 0.0)
        .map(|r| r.title.as_str())
        .collect();
    assert_eq!(zero, vec!["Delta Notes"]);
}

#[test]
fn keys_and_coercions() {
    let pkg = fixture();
    let r = pkg.records();
    assert_eq!(r[0].key, "1234-5678");
    assert_eq!(r[1].key, "beta-reviews-2");
    assert_eq!(r[1].price, 2500.0);
    assert_eq!(r[2].subjects, vec!["Mathematics", "Physics"]);
    assert!(r[3].subjects.is_empty());
    assert_eq!(r[3].cpu, None);
    assert_eq!(r[7].subscribed, SubscribedStatus::Maybe);
    assert_eq!(r[9].subjects, vec!["Chemistry", "Biology"]);
    let notes = pkg.passthrough(&r[9]);
    assert_eq!(notes, vec![("notes", "check, later")]);
}
