//! Conjunctive range filtering, the engine behind the dual-handle sliders.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decisions::{summarize, SubscribedStatus, SummaryTable};
use crate::ingest::JournalRecord;
use crate::metrics::{Analysis, RecordMetrics};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("invalid range for {metric}: {lo} > {hi}")]
    InvalidRange { metric: FilterMetric, lo: f64, hi: f64 },
    #[error("invalid value `{value}` for parameter `{name}`")]
    InvalidParameter { name: String, value: String },
    #[error("package is empty")]
    EmptyPackage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMetric {
    Price,
    CpuRank,
    Downloads,
    Citations,
    Authorships,
    Usage,
    OaPercent,
}

impl FilterMetric {
    pub const ALL: [FilterMetric; 7] = [
        FilterMetric::Price,
        FilterMetric::CpuRank,
        FilterMetric::Downloads,
        FilterMetric::Citations,
        FilterMetric::Authorships,
        FilterMetric::Usage,
        FilterMetric::OaPercent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterMetric::Price => "price",
            FilterMetric::CpuRank => "cpu_rank",
            FilterMetric::Downloads => "downloads",
            FilterMetric::Citations => "citations",
            FilterMetric::Authorships => "authorships",
            FilterMetric::Usage => "usage",
            FilterMetric::OaPercent => "oa_percent",
        }
    }

    /// Value the slider for this metric acts on. Usage and rank come from
    /// the metrics, so they track whichever usage source is active.
    pub fn value(self, record: &JournalRecord, metrics: &RecordMetrics) -> Option<f64> {
        let v = match self {
            FilterMetric::Price => record.price,
            FilterMetric::CpuRank => metrics.cpu_rank as f64,
            FilterMetric::Downloads => record.downloads,
            FilterMetric::Citations => record.citations,
            FilterMetric::Authorships => record.authorships,
            FilterMetric::Usage => metrics.usage,
            FilterMetric::OaPercent => record.oa_percent,
        };
        v.is_finite().then_some(v)
    }
}

impl fmt::Display for FilterMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterMetric {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FilterMetric::ALL.into_iter().find(|m| m.name() == s).ok_or(())
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StatusSet([bool; 4]);

impl StatusSet {
    pub fn all() -> Self {
        StatusSet([true; 4])
    }

    pub fn none() -> Self {
        StatusSet([false; 4])
    }

    fn slot(s: SubscribedStatus) -> usize {
        SubscribedStatus::ALL.iter().position(|x| *x == s).expect("four states")
    }

    pub fn contains(&self, s: SubscribedStatus) -> bool {
        self.0[Self::slot(s)]
    }

    pub fn insert(&mut self, s: SubscribedStatus) {
        self.0[Self::slot(s)] = true;
    }

    pub fn remove(&mut self, s: SubscribedStatus) {
        self.0[Self::slot(s)] = false;
    }

    pub fn is_all(&self) -> bool {
        self.0.iter().all(|b| *b)
    }

    pub fn iter(&self) -> impl Iterator<Item = SubscribedStatus> + '_ {
        SubscribedStatus::ALL.into_iter().filter(|s| self.contains(*s))
    }
}

impl Default for StatusSet {
    fn default() -> Self {
        StatusSet::all()
    }
}

impl FromIterator<SubscribedStatus> for StatusSet {
    fn from_iter<T: IntoIterator<Item = SubscribedStatus>>(iter: T) -> Self {
        let mut set = StatusSet::none();
        for s in iter {
            set.insert(s);
        }
        set
    }
}

/// A conjunction of optional per-metric ranges and an allowed status set.
/// The default constrains nothing and selects every record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterSpec {
    ranges: BTreeMap<FilterMetric, Range>,
    statuses: StatusSet,
}

impl FilterSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// A spec whose ranges sit exactly at the data extent.
    pub fn full_extent(bounds: &SliderBounds) -> Self {
        FilterSpec {
            ranges: bounds.0.clone(),
            statuses: StatusSet::all(),
        }
    }

    pub fn with_range(mut self, metric: FilterMetric, lo: f64, hi: f64) -> Self {
        self.ranges.insert(metric, Range::new(lo, hi));
        self
    }

    pub fn with_statuses<I: IntoIterator<Item = SubscribedStatus>>(mut self, statuses: I) -> Self {
        self.statuses = statuses.into_iter().collect();
        self
    }

    pub fn set_range(&mut self, metric: FilterMetric, range: Option<Range>) {
        match range {
            Some(r) => self.ranges.insert(metric, r),
            None => self.ranges.remove(&metric),
        };
    }

    pub fn range(&self, metric: FilterMetric) -> Option<Range> {
        self.ranges.get(&metric).copied()
    }

    pub fn ranges(&self) -> impl Iterator<Item = (FilterMetric, Range)> + '_ {
        self.ranges.iter().map(|(m, r)| (*m, *r))
    }

    pub fn statuses(&self) -> StatusSet {
        self.statuses
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        for (&metric, r) in &self.ranges {
            if r.lo.is_nan() || r.hi.is_nan() || r.lo > r.hi {
                return Err(FilterError::InvalidRange {
                    metric,
                    lo: r.lo,
                    hi: r.hi,
                });
            }
        }
        Ok(())
    }

    pub fn matches(&self, record: &JournalRecord, metrics: &RecordMetrics) -> bool {
        self.statuses.contains(record.subscribed)
            && self.ranges.iter().all(|(metric, range)| {
                metric
                    .value(record, metrics)
                    .is_some_and(|v| range.contains(v))
            })
    }

    /// Reads `{metric}_min`, `{metric}_max` and `statuses=TRUE,MAYBE` query
    /// parameters. A lone bound leaves the other side open. Unrelated
    /// parameters are ignored.
    pub fn from_query_pairs<I, K, V>(pairs: I) -> Result<Self, FilterError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut spec = FilterSpec::default();
        let mut bounds: BTreeMap<FilterMetric, (Option<f64>, Option<f64>)> = BTreeMap::new();
        for (k, v) in pairs {
            let (name, value) = (k.as_ref(), v.as_ref());
            let invalid = || FilterError::InvalidParameter {
                name: name.to_string(),
                value: value.to_string(),
            };
            if name == "statuses" {
                let mut set = StatusSet::none();
                for token in value.split(',').filter(|t| !t.trim().is_empty()) {
                    set.insert(token.parse().map_err(|_| invalid())?);
                }
                spec.statuses = set;
                continue;
            }
            let (metric, is_min) = if let Some(m) = name.strip_suffix("_min") {
                (m, true)
            } else if let Some(m) = name.strip_suffix("_max") {
                (m, false)
            } else {
                continue;
            };
            let Ok(metric) = metric.parse::<FilterMetric>() else {
                continue;
            };
            let x: f64 = value.trim().parse().map_err(|_| invalid())?;
            if x.is_nan() {
                return Err(invalid());
            }
            let entry = bounds.entry(metric).or_default();
            if is_min {
                entry.0 = Some(x);
            } else {
                entry.1 = Some(x);
            }
        }
        for (metric, (lo, hi)) in bounds {
            spec.ranges.insert(
                metric,
                Range::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)),
            );
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_query_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (metric, r) in &self.ranges {
            if r.lo.is_finite() {
                out.push((format!("{}_min", metric.name()), r.lo.to_string()));
            }
            if r.hi.is_finite() {
                out.push((format!("{}_max", metric.name()), r.hi.to_string()));
            }
        }
        if !self.statuses.is_all() {
            let labels: Vec<&str> = self.statuses.iter().map(|s| s.label()).collect();
            out.push(("statuses".to_string(), labels.join(",")));
        }
        out
    }
}

/// Exact data minimum and maximum of each filterable metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliderBounds(BTreeMap<FilterMetric, Range>);

impl SliderBounds {
    pub fn get(&self, metric: FilterMetric) -> Option<Range> {
        self.0.get(&metric).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FilterMetric, Range)> + '_ {
        self.0.iter().map(|(m, r)| (*m, *r))
    }
}

pub fn slider_bounds(analysis: &Analysis) -> Result<SliderBounds, FilterError> {
    if analysis.package().is_empty() {
        return Err(FilterError::EmptyPackage);
    }
    let mut out = BTreeMap::new();
    for metric in FilterMetric::ALL {
        let mut extent: Option<Range> = None;
        for (record, m) in analysis.package().records().iter().zip(&analysis.metrics().records) {
            if let Some(v) = metric.value(record, m) {
                extent = Some(match extent {
                    None => Range::new(v, v),
                    Some(r) => Range::new(r.lo.min(v), r.hi.max(v)),
                });
            }
        }
        if let Some(r) = extent {
            out.insert(metric, r);
        }
    }
    Ok(SliderBounds(out))
}

/// An ordered subset of an analysis's records.
#[derive(Debug, Clone, PartialEq)]
pub struct View<'a> {
    analysis: &'a Analysis,
    indices: Vec<usize>,
}

impl<'a> View<'a> {
    pub fn all(analysis: &'a Analysis) -> Self {
        View {
            analysis,
            indices: (0..analysis.package().len()).collect(),
        }
    }

    pub fn analysis(&self) -> &'a Analysis {
        self.analysis
    }

    /// Positions of the selected records within the package.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a JournalRecord, &'a RecordMetrics)> + '_ {
        let records = self.analysis.package().records();
        let metrics = &self.analysis.metrics().records;
        self.indices.iter().map(move |&i| (&records[i], &metrics[i]))
    }

    pub fn records(&self) -> impl Iterator<Item = &'a JournalRecord> + '_ {
        self.iter().map(|(r, _)| r)
    }

    pub fn refine(&self, spec: &FilterSpec) -> Result<View<'a>, FilterError> {
        spec.validate()?;
        let records = self.analysis.package().records();
        let metrics = &self.analysis.metrics().records;
        let indices = self
            .indices
            .iter()
            .copied()
            .filter(|&i| spec.matches(&records[i], &metrics[i]))
            .collect();
        Ok(View {
            analysis: self.analysis,
            indices,
        })
    }

    pub fn summary(&self) -> SummaryTable {
        summarize(self.records())
    }
}

pub fn apply<'a>(analysis: &'a Analysis, spec: &FilterSpec) -> Result<View<'a>, FilterError> {
    View::all(analysis).refine(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{load_sample, Package, RecordDraft};
    use crate::metrics::UsageSource;

    fn analysis(prices: &[f64]) -> Analysis {
        let drafts: Vec<_> = prices
            .iter()
            .enumerate()
            .map(|(i, p)| RecordDraft::new(format!("J{i}"), *p, 10.0, 1.0, 0.0))
            .collect();
        Analysis::new(Package::from_drafts(&drafts).unwrap(), UsageSource::Exported).unwrap()
    }

    #[test]
    fn price_bounds() {
        let a = analysis(&[100.0, 250.0, 9000.0]);
        let b = slider_bounds(&a).unwrap();
        assert_eq!(b.get(FilterMetric::Price), Some(Range::new(100.0, 9000.0)));
        assert_eq!(b.get(FilterMetric::CpuRank), Some(Range::new(1.0, 3.0)));
    }

    #[test]
    fn single_record_bounds_are_degenerate() {
        let a = analysis(&[42.0]);
        for (_, r) in slider_bounds(&a).unwrap().iter() {
            assert_eq!(r.lo, r.hi);
        }
    }

    #[test]
    fn empty_package_has_no_bounds() {
        let a = Analysis::new(Package::from_drafts(&[]).unwrap(), UsageSource::Exported).unwrap();
        assert_eq!(slider_bounds(&a), Err(FilterError::EmptyPackage));
    }

    #[test]
    fn default_spec_selects_everything() {
        let a = Analysis::new(load_sample(), UsageSource::Exported).unwrap();
        assert_eq!(apply(&a, &FilterSpec::default()).unwrap().len(), 431);
        let full = FilterSpec::full_extent(&slider_bounds(&a).unwrap());
        assert_eq!(apply(&a, &full).unwrap(), View::all(&a));
    }

    #[test]
    fn inclusive_endpoints() {
        let a = analysis(&[100.0, 250.0, 9000.0]);
        let v = apply(&a, &FilterSpec::new().with_range(FilterMetric::Price, 100.0, 250.0)).unwrap();
        assert_eq!(v.indices(), &[0, 1]);
    }

    #[test]
    fn inverted_range_rejected() {
        let a = analysis(&[1.0]);
        let spec = FilterSpec::new().with_range(FilterMetric::Price, 5.0, 1.0);
        assert!(matches!(apply(&a, &spec), Err(FilterError::InvalidRange { .. })));
    }

    #[test]
    fn status_filter_without_matches() {
        let a = analysis(&[1.0, 2.0]);
        let v = apply(&a, &FilterSpec::new().with_statuses([SubscribedStatus::False])).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn query_round_trip() {
        let spec = FilterSpec::new()
            .with_range(FilterMetric::Price, 10.0, 20.5)
            .with_range(FilterMetric::Usage, 0.0, f64::INFINITY)
            .with_statuses([SubscribedStatus::True, SubscribedStatus::Maybe]);
        let pairs = spec.to_query_pairs();
        assert!(pairs.contains(&("statuses".into(), "TRUE,MAYBE".into())));
        assert!(pairs.contains(&("price_min".into(), "10".into())));
        assert_eq!(FilterSpec::from_query_pairs(pairs).unwrap(), spec);
    }

    #[test]
    fn query_errors() {
        assert!(matches!(
            FilterSpec::from_query_pairs([("price_min", "9"), ("price_max", "1")]),
            Err(FilterError::InvalidRange { .. })
        ));
        assert!(matches!(
            FilterSpec::from_query_pairs([("price_min", "cheap")]),
            Err(FilterError::InvalidParameter { .. })
        ));
        assert!(matches!(
            FilterSpec::from_query_pairs([("statuses", "YES")]),
            Err(FilterError::InvalidParameter { .. })
        ));
        // unrelated keys pass
        assert_eq!(
            FilterSpec::from_query_pairs([("offset", "5"), ("colour_min", "x")]).unwrap(),
            FilterSpec::default()
        );
    }

    #[test]
    fn blank_status_in_query() {
        let spec = FilterSpec::from_query_pairs([("statuses", "BLANK")]).unwrap();
        assert!(spec.statuses().contains(SubscribedStatus::Blank));
        assert!(!spec.statuses().contains(SubscribedStatus::True));
    }
}
