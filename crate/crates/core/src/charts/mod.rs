//! Declarative definitions of the twelve standard charts.
//!
//! A [`ChartSpec`] is self-contained: it carries its own data rows and
//! serializes to a Vega-Lite document (see [`VEGA_LITE_SCHEMA`]) that any
//! compliant renderer can draw.

mod bins;
mod vega;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::decisions::SubscribedStatus;
use crate::filters::View;
use crate::ingest::JournalRecord;
use crate::metrics::RecordMetrics;

pub use bins::{cpu_boxes, cpu_boxes_with_count, histogram_bins, Bin, BoxColumn, BoxGrid, CpuBox};
pub use vega::VEGA_LITE_SCHEMA;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("unknown chart id `{0}`")]
    UnknownChartId(String),
    #[error("no values to bin")]
    EmptyInput,
    #[error("values must be finite")]
    NonFiniteInput,
    #[error("bin count must be at least 1, got {0}")]
    InvalidBinCount(usize),
    #[error("bin width must be positive, got {0}")]
    InvalidBinWidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartId {
    UsageVsCostByStatus,
    UsageVsCostByCpuRank,
    AuthorshipHistogram,
    CitationsVsDownloads,
    UsageVsDownloads,
    UsageVsCitations,
    UsageVsAuthorships,
    UsageVsOaPercent,
    IfVsCost,
    NormalizedIfVsLogCost,
    CpuHistogramBoxes,
    SubjectChart,
}

impl ChartId {
    /// Display order.
    pub const ALL: [ChartId; 12] = [
        ChartId::UsageVsCostByStatus,
        ChartId::UsageVsCostByCpuRank,
        ChartId::AuthorshipHistogram,
        ChartId::CitationsVsDownloads,
        ChartId::UsageVsDownloads,
        ChartId::UsageVsCitations,
        ChartId::UsageVsAuthorships,
        ChartId::UsageVsOaPercent,
        ChartId::IfVsCost,
        ChartId::NormalizedIfVsLogCost,
        ChartId::CpuHistogramBoxes,
        ChartId::SubjectChart,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartId::UsageVsCostByStatus => "usage_vs_cost_by_status",
            ChartId::UsageVsCostByCpuRank => "usage_vs_cost_by_cpu_rank",
            ChartId::AuthorshipHistogram => "authorship_histogram",
            ChartId::CitationsVsDownloads => "citations_vs_downloads",
            ChartId::UsageVsDownloads => "usage_vs_downloads",
            ChartId::UsageVsCitations => "usage_vs_citations",
            ChartId::UsageVsAuthorships => "usage_vs_authorships",
            ChartId::UsageVsOaPercent => "usage_vs_oa_percent",
            ChartId::IfVsCost => "if_vs_cost",
            ChartId::NormalizedIfVsLogCost => "normalized_if_vs_log_cost",
            ChartId::CpuHistogramBoxes => "cpu_histogram_boxes",
            ChartId::SubjectChart => "subject_chart",
        }
    }

    /// 1-based position in the catalog.
    pub fn number(self) -> usize {
        ChartId::ALL.iter().position(|c| *c == self).expect("listed") + 1
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChartId {
    type Err = ChartError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChartId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ChartError::UnknownChartId(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Point,
    Bar,
    Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Quantitative,
    Ordinal,
    Nominal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorEncoding {
    StatusPalette,
    CpuRankGradient,
    None,
}

/// One positional channel. `field` is `None` for a count aggregate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Axis {
    pub field: Option<&'static str>,
    pub kind: FieldKind,
    pub scale: Scale,
    pub title: &'static str,
}

const fn quant(field: &'static str, title: &'static str) -> Axis {
    Axis {
        field: Some(field),
        kind: FieldKind::Quantitative,
        scale: Scale::Linear,
        title,
    }
}

pub const USAGE_LINK_GROUP: &str = "usage_components";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartDescriptor {
    pub id: ChartId,
    pub number: usize,
    pub title: &'static str,
    pub mark: Mark,
    pub x: Axis,
    pub y: Axis,
    pub color: ColorEncoding,
    pub link_group: Option<&'static str>,
}

const COST: Axis = quant("cost", "Subscription cost (USD)");
const USAGE: Axis = quant("usage", "Weighted usage");

pub fn descriptor(id: ChartId) -> ChartDescriptor {
    use ChartId::*;
    let (title, mark, x, y, color, link_group) = match id {
        UsageVsCostByStatus => (
            "Weighted usage vs. cost, by Subscribed status",
            Mark::Point,
            COST,
            USAGE,
            ColorEncoding::StatusPalette,
            None,
        ),
        UsageVsCostByCpuRank => (
            "Weighted usage vs. cost, by CPU rank",
            Mark::Point,
            COST,
            USAGE,
            ColorEncoding::CpuRankGradient,
            None,
        ),
        AuthorshipHistogram => (
            "Authorship count distribution",
            Mark::Bar,
            quant("bin_lo", "Authorships"),
            Axis {
                field: None,
                kind: FieldKind::Quantitative,
                scale: Scale::Linear,
                title: "Titles",
            },
            ColorEncoding::None,
            None,
        ),
        CitationsVsDownloads => (
            "Citations vs. downloads",
            Mark::Point,
            quant("downloads", "Downloads"),
            quant("citations", "Citations"),
            ColorEncoding::StatusPalette,
            None,
        ),
        UsageVsDownloads => (
            "Weighted usage vs. downloads",
            Mark::Point,
            quant("downloads", "Downloads"),
            USAGE,
            ColorEncoding::StatusPalette,
            Some(USAGE_LINK_GROUP),
        ),
        UsageVsCitations => (
            "Weighted usage vs. citations",
            Mark::Point,
            quant("citations", "Citations"),
            USAGE,
            ColorEncoding::StatusPalette,
            Some(USAGE_LINK_GROUP),
        ),
        UsageVsAuthorships => (
            "Weighted usage vs. authorships",
            Mark::Point,
            quant("authorships", "Authorships"),
            USAGE,
            ColorEncoding::StatusPalette,
            Some(USAGE_LINK_GROUP),
        ),
        UsageVsOaPercent => (
            "Weighted usage vs. open access %",
            Mark::Point,
            quant("oa_percent", "Open access %"),
            USAGE,
            ColorEncoding::StatusPalette,
            Some(USAGE_LINK_GROUP),
        ),
        IfVsCost => (
            "Instant Fill % vs. cost",
            Mark::Point,
            COST,
            quant("if_percent", "Instant Fill (percentage points)"),
            ColorEncoding::StatusPalette,
            None,
        ),
        NormalizedIfVsLogCost => (
            "Normalized Instant Fill cost vs. cost",
            Mark::Point,
            Axis {
                scale: Scale::Log,
                ..COST
            },
            quant("normalized_if_cost", "Cost per Instant Fill point (USD)"),
            ColorEncoding::StatusPalette,
            None,
        ),
        CpuHistogramBoxes => (
            "Titles by cost per use",
            Mark::Rect,
            Axis {
                field: Some("cpu_bin"),
                kind: FieldKind::Ordinal,
                scale: Scale::Linear,
                title: "Cost-per-use bin",
            },
            Axis {
                field: Some("stack"),
                kind: FieldKind::Ordinal,
                scale: Scale::Linear,
                title: "Titles",
            },
            ColorEncoding::StatusPalette,
            None,
        ),
        SubjectChart => (
            "Journals by subject area",
            Mark::Point,
            quant("cpu_rank", "CPU rank"),
            Axis {
                field: Some("subject"),
                kind: FieldKind::Nominal,
                scale: Scale::Linear,
                title: "Subject",
            },
            ColorEncoding::StatusPalette,
            None,
        ),
    };
    ChartDescriptor {
        id,
        number: id.number(),
        title,
        mark,
        x,
        y,
        color,
        link_group,
    }
}

pub fn chart_catalog() -> Vec<ChartDescriptor> {
    ChartId::ALL.into_iter().map(descriptor).collect()
}

/// Hover payload carried by every data row.
pub const TOOLTIP_FIELDS: [&str; 9] = [
    "title",
    "downloads",
    "citations",
    "authorships",
    "usage",
    "cost",
    "cpu_rank",
    "oa_percent",
    "status",
];

pub const UNCLASSIFIED: &str = "Unclassified";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChartOptions {
    pub authorship_bins: usize,
    pub cpu_bins: usize,
}

impl Default for ChartOptions {
    fn default() -> Self {
        ChartOptions {
            authorship_bins: 20,
            cpu_bins: 10,
        }
    }
}

pub type Row = Map<String, Value>;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub descriptor: ChartDescriptor,
    /// Second x channel (upper bin edge) for pre-binned bars.
    pub x2: Option<&'static str>,
    pub tooltip: Vec<&'static str>,
    pub data: Vec<Row>,
    /// Rows dropped because a log-scaled axis cannot show non-positive values.
    pub excluded_non_positive: usize,
    /// Rows dropped because a plotted value is undefined.
    pub excluded_undefined: usize,
}

impl ChartSpec {
    pub fn id(&self) -> ChartId {
        self.descriptor.id
    }

    /// Every field an encoding channel refers to.
    pub fn encoded_fields(&self) -> Vec<&'static str> {
        let d = &self.descriptor;
        let mut fields: Vec<&'static str> = [d.x.field, d.y.field, self.x2].into_iter().flatten().collect();
        match d.color {
            ColorEncoding::StatusPalette => fields.push("status"),
            ColorEncoding::CpuRankGradient => fields.push("cpu_rank"),
            ColorEncoding::None => {}
        }
        fields.extend(self.tooltip.iter().copied());
        fields.sort_unstable();
        fields.dedup();
        fields
    }

    pub fn to_vega_lite(&self) -> Value {
        vega::to_vega_lite(self)
    }
}

impl Serialize for ChartSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_vega_lite().serialize(serializer)
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn base_row(record: &JournalRecord, m: &RecordMetrics) -> Row {
    let mut row = Row::new();
    row.insert("title".into(), json!(record.title));
    row.insert("downloads".into(), num(record.downloads));
    row.insert("citations".into(), num(record.citations));
    row.insert("authorships".into(), num(record.authorships));
    row.insert("usage".into(), num(m.usage));
    row.insert("cost".into(), num(record.price));
    row.insert("cpu_rank".into(), json!(m.cpu_rank));
    row.insert("oa_percent".into(), num(record.oa_percent));
    row.insert("status".into(), json!(record.subscribed.label()));
    row
}

/// One `(subject, record)` pair per subject a record carries; records
/// without subjects appear once under [`UNCLASSIFIED`].
pub fn explode_subjects<'a>(view: &View<'a>) -> Vec<(String, &'a JournalRecord)> {
    explode_with_metrics(view)
        .into_iter()
        .map(|(s, r, _)| (s, r))
        .collect()
}

fn explode_with_metrics<'a>(view: &View<'a>) -> Vec<(String, &'a JournalRecord, &'a RecordMetrics)> {
    let mut out = Vec::new();
    for (record, m) in view.iter() {
        if record.subjects.is_empty() {
            out.push((UNCLASSIFIED.to_string(), record, m));
        } else {
            out.extend(record.subjects.iter().map(|s| (s.clone(), record, m)));
        }
    }
    out
}

pub fn build_chart(view: &View<'_>, chart_id: &str) -> Result<ChartSpec, ChartError> {
    Ok(build(view, chart_id.parse()?, &ChartOptions::default()))
}

pub fn build(view: &View<'_>, id: ChartId, options: &ChartOptions) -> ChartSpec {
    let descriptor = descriptor(id);
    let mut spec = ChartSpec {
        tooltip: TOOLTIP_FIELDS.to_vec(),
        x2: None,
        data: Vec::new(),
        excluded_non_positive: 0,
        excluded_undefined: 0,
        descriptor,
    };
    let status_of = |row: &Row| row.get("status").cloned();
    match id {
        ChartId::AuthorshipHistogram => {
            spec.x2 = Some("bin_hi");
            spec.tooltip = Vec::new();
            let values: Vec<f64> = view.records().map(|r| r.authorships).collect();
            if let Ok(edges) = bins::histogram_edges(&values, options.authorship_bins.max(1)) {
                for (record, m) in view.iter() {
                    let i = edges.index(record.authorships);
                    let mut row = base_row(record, m);
                    row.insert("bin_lo".into(), num(edges.lower(i)));
                    row.insert("bin_hi".into(), num(edges.upper(i)));
                    spec.data.push(row);
                }
            }
        }
        ChartId::IfVsCost => {
            for (record, m) in view.iter() {
                let mut row = base_row(record, m);
                row.insert("if_percent".into(), num(m.if_percent));
                spec.data.push(row);
            }
        }
        ChartId::NormalizedIfVsLogCost => {
            for (record, m) in view.iter() {
                let Some(cost) = m.normalized_if_cost else {
                    spec.excluded_undefined += 1;
                    continue;
                };
                if record.price <= 0.0 {
                    spec.excluded_non_positive += 1;
                    continue;
                }
                let mut row = base_row(record, m);
                row.insert("if_percent".into(), num(m.if_percent));
                row.insert("normalized_if_cost".into(), num(cost));
                spec.data.push(row);
            }
        }
        ChartId::CpuHistogramBoxes => {
            let grid = cpu_boxes_with_count(view, options.cpu_bins.max(1)).expect("bin count positive");
            let records: Vec<_> = view.iter().collect();
            let lookup = |key: &str| {
                records
                    .iter()
                    .find(|(r, _)| r.key == key)
                    .copied()
                    .expect("box comes from the view")
            };
            let unbinned_index = grid.columns.len();
            let columns = grid
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| (i, Some((c.lo, c.hi)), &c.boxes))
                .chain(std::iter::once((unbinned_index, None, &grid.unbinned)));
            for (bin, edges, boxes) in columns {
                for b in boxes {
                    let (record, m) = lookup(&b.key);
                    let mut row = base_row(record, m);
                    row.insert("cpu_bin".into(), json!(bin));
                    row.insert("cpu_bin_lo".into(), edges.map(|e| num(e.0)).unwrap_or(Value::Null));
                    row.insert("cpu_bin_hi".into(), edges.map(|e| num(e.1)).unwrap_or(Value::Null));
                    row.insert("stack".into(), json!(b.stack));
                    spec.data.push(row);
                }
            }
        }
        ChartId::SubjectChart => {
            for (subject, record, m) in explode_with_metrics(view) {
                let mut row = base_row(record, m);
                row.insert("subject".into(), json!(subject));
                spec.data.push(row);
            }
        }
        _ => {
            spec.data = view.iter().map(|(r, m)| base_row(r, m)).collect();
        }
    }
    debug_assert!(spec.data.iter().all(|r| status_of(r).is_some()));
    spec
}

/// Every chart in catalog order.
pub fn build_all(view: &View<'_>, options: &ChartOptions) -> Vec<ChartSpec> {
    ChartId::ALL.into_iter().map(|id| build(view, id, options)).collect()
}

pub fn status_palette() -> [(SubscribedStatus, &'static str); 4] {
    SubscribedStatus::ALL.map(|s| (s, s.color()))
}
