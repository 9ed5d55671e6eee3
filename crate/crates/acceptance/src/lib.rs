//! Shared generators and checkers for the acceptance run.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::Value;

use subscope_core::decisions::SubscribedStatus;
use subscope_core::filters::{FilterMetric, FilterSpec, View};
use subscope_core::ingest::{Package, RecordDraft};
use subscope_core::metrics::Analysis;

pub const FIXTURE: &[u8] = include_bytes!("../../core/tests/data/fixture_10.csv");
const SCHEMA: &str = include_str!("../../core/tests/data/vega-lite-v6.4.1.schema.json");

/// One record with plausible counts. About one in ten has no usage at all,
/// and prices and counts are coarse so cost-per-use ties happen.
pub fn random_draft(rng: &mut impl Rng, title: String) -> RecordDraft {
    let price = (rng.random_range(0..500) * 100) as f64;
    let (d, c, a) = if rng.random_bool(0.1) {
        (0.0, 0.0, 0.0)
    } else {
        (
            rng.random_range(0..20_000) as f64,
            rng.random_range(0..2_000) as f64 / 10.0,
            rng.random_range(0..400) as f64 / 10.0,
        )
    };
    let mut r = RecordDraft::new(title, price, d, c, a);
    r.oa_percent = rng.random_range(0..=1000) as f64 / 10.0;
    r.backfile_percent = ((100.0 - r.oa_percent) * rng.random::<f64>() * 10.0).floor() / 10.0;
    r.subscribed = *SubscribedStatus::ALL.choose(rng).expect("non-empty");
    r
}

/// A package of 1 to `max_len` records with nonzero total usage.
pub fn random_package(rng: &mut impl Rng, max_len: usize) -> Package {
    let n = rng.random_range(1..=max_len);
    let mut drafts: Vec<RecordDraft> = (0..n).map(|i| random_draft(rng, format!("Journal {i}"))).collect();
    drafts[0].downloads += 1.0;
    drafts[0].usage += 1.0;
    Package::from_drafts(&drafts).expect("generated drafts parse")
}

/// Ranges drawn between observed values of each metric, plus an optional
/// status restriction.
pub fn random_spec(rng: &mut impl Rng, analysis: &Analysis) -> FilterSpec {
    let view = View::all(analysis);
    let mut spec = FilterSpec::new();
    for metric in FilterMetric::ALL {
        let values: Vec<f64> = view.iter().filter_map(|(r, m)| metric.value(r, m)).collect();
        if values.is_empty() || !rng.random_bool(0.5) {
            continue;
        }
        let x = *values.choose(rng).expect("non-empty");
        let y = *values.choose(rng).expect("non-empty");
        spec = spec.with_range(metric, x.min(y), x.max(y));
    }
    if rng.random_bool(0.3) {
        let statuses: Vec<SubscribedStatus> =
            SubscribedStatus::ALL.into_iter().filter(|_| rng.random_bool(0.5)).collect();
        spec = spec.with_statuses(statuses);
    }
    spec
}

/// Number of CSV cells that differ between two exports of equal shape.
pub fn cell_diffs(a: &[u8], b: &[u8]) -> Result<usize, String> {
    let read = |bytes: &[u8]| -> Result<Vec<Vec<String>>, String> {
        csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(bytes)
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(|e| e.to_string()))
            .collect()
    };
    let (x, y) = (read(a)?, read(b)?);
    if x.len() != y.len() {
        return Err(format!("row counts differ: {} vs {}", x.len(), y.len()));
    }
    Ok(x.iter()
        .zip(&y)
        .map(|(r, s)| r.iter().zip(s).filter(|(p, q)| p != q).count() + r.len().abs_diff(s.len()))
        .sum())
}

/// The published schema has `<`, `|` and `[` inside `$ref` pointers, which
/// are not valid URI references; percent-encode them before compiling.
fn encode_refs(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, child) in map.iter_mut() {
                match child {
                    Value::String(s) if k == "$ref" => *s = s.chars().map(encode_char).collect(),
                    _ => encode_refs(child),
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(encode_refs),
        _ => {}
    }
}

fn encode_char(c: char) -> String {
    if c.is_ascii_alphanumeric() || "-._~!$&'()*+,;=:@/?#%".contains(c) {
        c.to_string()
    } else {
        let mut buf = [0; 4];
        c.encode_utf8(&mut buf).bytes().map(|b| format!("%{b:02X}")).collect()
    }
}

pub fn vega_lite_validator() -> Result<jsonschema::Validator, String> {
    let mut schema: Value = serde_json::from_str(SCHEMA).map_err(|e| e.to_string())?;
    encode_refs(&mut schema);
    jsonschema::validator_for(&schema).map_err(|e| e.to_string())
}
