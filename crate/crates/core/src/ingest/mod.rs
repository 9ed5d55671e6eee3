//! Reading Unsub export files into [`Package`]s.
//!
//! Every cell of the source file is retained verbatim alongside the decoded
//! values, so an unedited package writes back out byte for byte (see
//! [`crate::decisions::export_csv`]).

mod coerce;
mod columns;
mod sample;
mod validate;

use std::collections::HashSet;
use std::io::Read;

use serde::Serialize;
use thiserror::Error;

use crate::decisions::SubscribedStatus;

pub use coerce::{decode_status, parse_number, slugify, split_subjects};
pub use columns::{map_headers, normalize_header, CanonicalField, ColumnBinding, ColumnMap};
pub use sample::{load_sample, SAMPLE_CSV};
pub use validate::{validate_package, ValidationReport, ValidationWarning};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("the file is empty")]
    EmptyFile,
    #[error("missing required column `{0}`")]
    MissingRequiredColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateHeader(String),
    #[error("line {line}{}: {reason}", column.as_ref().map(|c| format!(", column `{c}`")).unwrap_or_default())]
    RowParseError {
        line: u64,
        column: Option<String>,
        reason: String,
    },
    #[error("failed to read input: {0}")]
    Io(String),
}

/// The untouched text cells of one data row, in header order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RawExportRow {
    cells: Vec<String>,
}

impl RawExportRow {
    pub fn cells(&self) -> &[String] {
        &self.cells
    }

    pub fn get(&self, index: usize) -> Option<&str> {
        self.cells.get(index).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalRecord {
    pub key: String,
    pub issn: Option<String>,
    pub title: String,
    pub price: f64,
    pub downloads: f64,
    pub citations: f64,
    pub authorships: f64,
    /// Weighted usage as exported.
    pub usage: f64,
    pub cpu: Option<f64>,
    pub cpu_rank: Option<u32>,
    pub oa_percent: f64,
    pub backfile_percent: f64,
    pub subjects: Vec<String>,
    pub subscribed: SubscribedStatus,
    /// 1-based line where the row starts in the source file.
    pub line: u64,
    #[serde(skip)]
    pub(crate) raw: RawExportRow,
}

impl JournalRecord {
    pub fn raw(&self) -> &RawExportRow {
        &self.raw
    }
}

/// Byte-level details of the source file needed to write it back faithfully.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SourceLayout {
    pub bom: bool,
    pub crlf: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Package {
    headers: Vec<String>,
    column_map: ColumnMap,
    records: Vec<JournalRecord>,
    total_weighted_usage: f64,
    layout: SourceLayout,
}

impl Package {
    pub fn records(&self) -> &[JournalRecord] {
        &self.records
    }

    pub(crate) fn records_mut(&mut self) -> &mut [JournalRecord] {
        &mut self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Original header row, verbatim.
    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn column_map(&self) -> &ColumnMap {
        &self.column_map
    }

    /// Sum of the exported usage column, in row order.
    pub fn total_weighted_usage(&self) -> f64 {
        self.total_weighted_usage
    }

    pub fn layout(&self) -> SourceLayout {
        self.layout
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.records.iter().position(|r| r.key == key)
    }

    pub fn get(&self, key: &str) -> Option<&JournalRecord> {
        self.records.iter().find(|r| r.key == key)
    }

    /// `(header, cell)` pairs of the columns the analysis does not interpret.
    pub fn passthrough<'a>(&'a self, record: &'a JournalRecord) -> Vec<(&'a str, &'a str)> {
        self.column_map
            .passthrough()
            .iter()
            .map(|b| (b.header.as_str(), record.raw.get(b.index).unwrap_or("")))
            .collect()
    }

    /// Builds a package from decoded values by rendering a canonical export
    /// and parsing it, so drafted packages obey the same invariants as
    /// uploaded ones.
    pub fn from_drafts(drafts: &[RecordDraft]) -> Result<Package, IngestError> {
        parse_export(&render_drafts(drafts))
    }
}

/// Plain values for assembling a package programmatically.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordDraft {
    pub title: String,
    pub issn: Option<String>,
    pub subscribed: SubscribedStatus,
    pub price: f64,
    pub downloads: f64,
    pub citations: f64,
    pub authorships: f64,
    pub usage: f64,
    pub cpu: Option<f64>,
    pub cpu_rank: Option<u32>,
    pub oa_percent: f64,
    pub backfile_percent: f64,
    pub subjects: Vec<String>,
}

impl RecordDraft {
    /// A draft whose usage and cost-per-use follow from the given counts
    /// under the default weights.
    pub fn new(title: impl Into<String>, price: f64, downloads: f64, citations: f64, authorships: f64) -> Self {
        let usage = downloads + 10.0 * citations + 100.0 * authorships;
        RecordDraft {
            title: title.into(),
            issn: None,
            subscribed: SubscribedStatus::Blank,
            price,
            downloads,
            citations,
            authorships,
            usage,
            cpu: (usage > 0.0).then(|| price / usage),
            cpu_rank: None,
            oa_percent: 0.0,
            backfile_percent: 0.0,
            subjects: Vec::new(),
        }
    }
}

const DRAFT_HEADERS: [&str; 13] = [
    "title",
    "issn",
    "subscribed",
    "price",
    "downloads",
    "citations",
    "authorships",
    "usage",
    "cpu",
    "cpu_rank",
    "oa_percent",
    "backfile_percent",
    "subject",
];

fn render_drafts(drafts: &[RecordDraft]) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    // Writing into a Vec cannot fail.
    writer.write_record(DRAFT_HEADERS).expect("in-memory write");
    for d in drafts {
        writer
            .write_record([
                d.title.clone(),
                d.issn.clone().unwrap_or_default(),
                d.subscribed.as_cell().to_string(),
                d.price.to_string(),
                d.downloads.to_string(),
                d.citations.to_string(),
                d.authorships.to_string(),
                d.usage.to_string(),
                opt(d.cpu),
                d.cpu_rank.map(|r| r.to_string()).unwrap_or_default(),
                d.oa_percent.to_string(),
                d.backfile_percent.to_string(),
                d.subjects.join("; "),
            ])
            .expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}

const BOM: &[u8] = b"\xEF\xBB\xBF";

pub fn parse_export_reader<R: Read>(mut reader: R) -> Result<Package, IngestError> {
    let mut buf = Vec::new();
    reader
        .read_to_end(&mut buf)
        .map_err(|e| IngestError::Io(e.to_string()))?;
    parse_export(&buf)
}

pub fn parse_export(bytes: &[u8]) -> Result<Package, IngestError> {
    let (bom, body) = match bytes.strip_prefix(BOM) {
        Some(rest) => (true, rest),
        None => (false, bytes),
    };
    if body.iter().all(u8::is_ascii_whitespace) {
        return Err(IngestError::EmptyFile);
    }
    let crlf = body
        .iter()
        .position(|&b| b == b'\n')
        .is_some_and(|i| i > 0 && body[i - 1] == b'\r');

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(body);
    let mut rows = reader.records();

    let headers: Vec<String> = match rows.next() {
        Some(Ok(rec)) => rec.iter().map(str::to_string).collect(),
        Some(Err(e)) => return Err(csv_error(e)),
        None => return Err(IngestError::EmptyFile),
    };
    let column_map = map_headers(&headers)?;

    let mut records = Vec::new();
    let mut issns: HashSet<String> = HashSet::new();
    for (ordinal, row) in rows.enumerate() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != headers.len() {
            return Err(IngestError::RowParseError {
                line,
                column: None,
                reason: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
        }
        let raw = RawExportRow {
            cells: row.iter().map(str::to_string).collect(),
        };
        let record = decode_row(raw, line, ordinal + 1, &column_map, &mut issns)?;
        records.push(record);
    }

    let total_weighted_usage = records.iter().map(|r| r.usage).sum();
    Ok(Package {
        headers,
        column_map,
        records,
        total_weighted_usage,
        layout: SourceLayout { bom, crlf },
    })
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    IngestError::RowParseError {
        line,
        column: None,
        reason: err.to_string(),
    }
}

struct RowDecoder<'a> {
    raw: &'a RawExportRow,
    map: &'a ColumnMap,
    line: u64,
}

impl RowDecoder<'_> {
    fn cell(&self, field: CanonicalField) -> &str {
        self.map
            .index_of(field)
            .and_then(|i| self.raw.get(i))
            .unwrap_or("")
    }

    fn fail(&self, field: CanonicalField, reason: impl Into<String>) -> IngestError {
        IngestError::RowParseError {
            line: self.line,
            column: Some(
                self.map
                    .source_header(field)
                    .unwrap_or(field.name())
                    .to_string(),
            ),
            reason: reason.into(),
        }
    }

    fn optional(&self, field: CanonicalField) -> Result<Option<f64>, IngestError> {
        match parse_number(self.cell(field)) {
            Ok(Some(v)) if v.is_nan() => Err(self.fail(field, "value is NaN")),
            Ok(v) => Ok(v),
            Err(reason) => Err(self.fail(field, reason)),
        }
    }

    fn required(&self, field: CanonicalField) -> Result<f64, IngestError> {
        match self.optional(field)? {
            Some(v) if v.is_finite() => Ok(v),
            Some(_) => Err(self.fail(field, "value is not finite")),
            None => Err(self.fail(field, "missing value")),
        }
    }

    fn count(&self, field: CanonicalField) -> Result<f64, IngestError> {
        self.required(field).map(|v| coerce::clamp_non_negative(v).value)
    }

    fn percent(&self, field: CanonicalField) -> Result<f64, IngestError> {
        self.required(field).map(|v| coerce::clamp_percent(v).value)
    }
}

fn decode_row(
    raw: RawExportRow,
    line: u64,
    ordinal: usize,
    map: &ColumnMap,
    issns: &mut HashSet<String>,
) -> Result<JournalRecord, IngestError> {
    let d = RowDecoder {
        raw: &raw,
        map,
        line,
    };

    let title = d.cell(CanonicalField::Title).trim().to_string();
    if title.is_empty() {
        return Err(d.fail(CanonicalField::Title, "title is empty"));
    }

    let cpu = d
        .optional(CanonicalField::Cpu)?
        .filter(|v| v.is_finite())
        .map(|v| v.max(0.0));
    let cpu_rank = match d.optional(CanonicalField::CpuRank)? {
        None => None,
        Some(v) if v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => {
            Some(v as u32)
        }
        Some(v) => return Err(d.fail(CanonicalField::CpuRank, format!("invalid rank {v}"))),
    };

    let issn = Some(d.cell(CanonicalField::Issn).trim())
        .filter(|s| !s.is_empty())
        .map(str::to_string);
    let key = match &issn {
        Some(issn) if issns.insert(issn.clone()) => issn.clone(),
        Some(issn) => format!("{issn}-{ordinal}"),
        None => format!("{}-{ordinal}", slugify(&title)),
    };

    let record = JournalRecord {
        key,
        issn,
        title,
        price: d.count(CanonicalField::Price)?,
        downloads: d.count(CanonicalField::Downloads)?,
        citations: d.count(CanonicalField::Citations)?,
        authorships: d.count(CanonicalField::Authorships)?,
        usage: d.count(CanonicalField::Usage)?,
        cpu,
        cpu_rank,
        oa_percent: d.percent(CanonicalField::OaPercent)?,
        backfile_percent: d.percent(CanonicalField::BackfilePercent)?,
        subjects: split_subjects(d.cell(CanonicalField::Subject)),
        subscribed: decode_status(d.cell(CanonicalField::Subscribed)).0,
        line,
        raw,
    };
    Ok(record)
}
