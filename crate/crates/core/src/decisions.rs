//! Subscription decisions: status edits, the running summary table, journal
//! lookup, and export of the modified dataset.

use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};
use std::time::SystemTime;

use rand::distr::{Alphanumeric, SampleString};
use rand::rngs::SmallRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{decode_status, CanonicalField, JournalRecord, Package};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubscribedStatus {
    #[serde(rename = "TRUE")]
    True,
    #[serde(rename = "FALSE")]
    False,
    #[serde(rename = "MAYBE")]
    Maybe,
    #[serde(rename = "BLANK")]
    Blank,
}

impl SubscribedStatus {
    pub const ALL: [SubscribedStatus; 4] = [
        SubscribedStatus::True,
        SubscribedStatus::False,
        SubscribedStatus::Maybe,
        SubscribedStatus::Blank,
    ];

    /// Label used in JSON and charts.
    pub fn label(self) -> &'static str {
        match self {
            SubscribedStatus::True => "TRUE",
            SubscribedStatus::False => "FALSE",
            SubscribedStatus::Maybe => "MAYBE",
            SubscribedStatus::Blank => "BLANK",
        }
    }

    /// CSV cell text; blank is the empty cell.
    pub fn as_cell(self) -> &'static str {
        match self {
            SubscribedStatus::Blank => "",
            other => other.label(),
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            SubscribedStatus::True => "blue",
            SubscribedStatus::False => "red",
            SubscribedStatus::Maybe => "green",
            SubscribedStatus::Blank => "gray",
        }
    }

    fn slot(self) -> usize {
        match self {
            SubscribedStatus::True => 0,
            SubscribedStatus::False => 1,
            SubscribedStatus::Maybe => 2,
            SubscribedStatus::Blank => 3,
        }
    }
}

impl fmt::Display for SubscribedStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid status `{0}` (expected TRUE, FALSE, MAYBE or BLANK)")]
pub struct InvalidStatus(pub String);

impl FromStr for SubscribedStatus {
    type Err = InvalidStatus;

    /// Accepts the four labels case-insensitively; an empty string is blank.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TRUE" => Ok(SubscribedStatus::True),
            "FALSE" => Ok(SubscribedStatus::False),
            "MAYBE" => Ok(SubscribedStatus::Maybe),
            "BLANK" | "" => Ok(SubscribedStatus::Blank),
            _ => Err(InvalidStatus(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("unknown journal key `{0}`")]
    UnknownKey(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EditEntry {
    pub key: String,
    pub old: SubscribedStatus,
    pub new: SubscribedStatus,
    #[serde(with = "unix_millis")]
    pub at: SystemTime,
}

mod unix_millis {
    use std::time::{SystemTime, UNIX_EPOCH};

    use serde::Serializer;

    pub fn serialize<S: Serializer>(t: &SystemTime, s: S) -> Result<S::Ok, S::Error> {
        let ms = t.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0);
        s.serialize_u64(ms as u64)
    }
}

/// Returns a copy of `pkg` with one record's status replaced, plus the edit
/// entry describing the change. Nothing else in the package changes.
pub fn set_status(
    pkg: &Package,
    key: &str,
    status: SubscribedStatus,
) -> Result<(Package, EditEntry), DecisionError> {
    let mut next = pkg.clone();
    let entry = apply_status(&mut next, key, status)?;
    Ok((next, entry))
}

fn apply_status(pkg: &mut Package, key: &str, status: SubscribedStatus) -> Result<EditEntry, DecisionError> {
    let index = pkg
        .index_of(key)
        .ok_or_else(|| DecisionError::UnknownKey(key.to_string()))?;
    let record = &mut pkg.records_mut()[index];
    let old = record.subscribed;
    record.subscribed = status;
    Ok(EditEntry {
        key: key.to_string(),
        old,
        new: status,
        at: SystemTime::now(),
    })
}

/// A package under edit together with its linear edit log.
#[derive(Debug, Clone)]
pub struct DecisionLedger {
    package: Package,
    edits: Vec<EditEntry>,
}

impl DecisionLedger {
    pub fn new(package: Package) -> Self {
        DecisionLedger {
            package,
            edits: Vec::new(),
        }
    }

    pub fn package(&self) -> &Package {
        &self.package
    }

    pub fn edits(&self) -> &[EditEntry] {
        &self.edits
    }

    pub fn set_status(&mut self, key: &str, status: SubscribedStatus) -> Result<&EditEntry, DecisionError> {
        let entry = apply_status(&mut self.package, key, status)?;
        self.edits.push(entry);
        Ok(self.edits.last().expect("just pushed"))
    }

    pub fn into_package(self) -> Package {
        self.package
    }
}

/// Case-insensitive substring search over titles, ordered by where the
/// match starts and then by title.
pub fn find_journal(pkg: &Package, query: &str) -> Vec<(String, String)> {
    let needle = query.trim().to_lowercase();
    if needle.is_empty() {
        return Vec::new();
    }
    let mut hits: Vec<(usize, &JournalRecord)> = pkg
        .records()
        .iter()
        .filter_map(|r| r.title.to_lowercase().find(&needle).map(|pos| (pos, r)))
        .collect();
    hits.sort_by(|(pa, a), (pb, b)| pa.cmp(pb).then_with(|| a.title.cmp(&b.title)).then_with(|| a.key.cmp(&b.key)));
    hits.into_iter()
        .map(|(_, r)| (r.key.clone(), r.title.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StatusTotals {
    pub title_count: usize,
    pub dollar_total: f64,
}

/// Title counts and price sums per decision status.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    #[serde(rename = "TRUE")]
    pub subscribed: StatusTotals,
    #[serde(rename = "FALSE")]
    pub cancelled: StatusTotals,
    #[serde(rename = "MAYBE")]
    pub maybe: StatusTotals,
    #[serde(rename = "BLANK")]
    pub blank: StatusTotals,
    pub total: StatusTotals,
}

impl SummaryTable {
    pub fn get(&self, status: SubscribedStatus) -> StatusTotals {
        match status.slot() {
            0 => self.subscribed,
            1 => self.cancelled,
            2 => self.maybe,
            _ => self.blank,
        }
    }

    fn get_mut(&mut self, status: SubscribedStatus) -> &mut StatusTotals {
        match status.slot() {
            0 => &mut self.subscribed,
            1 => &mut self.cancelled,
            2 => &mut self.maybe,
            _ => &mut self.blank,
        }
    }
}

pub fn summarize<'a, I>(records: I) -> SummaryTable
where
    I: IntoIterator<Item = &'a JournalRecord>,
{
    let mut table = SummaryTable::default();
    for r in records {
        let bucket = table.get_mut(r.subscribed);
        bucket.title_count += 1;
        bucket.dollar_total += r.price;
        table.total.title_count += 1;
        table.total.dollar_total += r.price;
    }
    table
}

/// Serializes the package with its original header row and cells. A
/// Subscribed cell is rewritten only when the decoded status differs from
/// what the source cell said, so unedited rows keep their exact bytes.
pub fn export_bytes(pkg: &Package) -> Vec<u8> {
    let layout = pkg.layout();
    let terminator = if layout.crlf {
        csv::Terminator::CRLF
    } else {
        csv::Terminator::Any(b'\n')
    };
    let mut out = Vec::new();
    if layout.bom {
        out.extend_from_slice(b"\xEF\xBB\xBF");
    }
    let mut writer = csv::WriterBuilder::new().terminator(terminator).from_writer(out);
    let status_col = pkg.column_map().index_of(CanonicalField::Subscribed);

    // Writing into a Vec cannot fail.
    writer.write_record(pkg.headers()).expect("in-memory write");
    for record in pkg.records() {
        let cells = record.raw().cells();
        let row = cells.iter().enumerate().map(|(i, cell)| {
            if Some(i) == status_col && decode_status(cell).0 != record.subscribed {
                record.subscribed.as_cell()
            } else {
                cell.as_str()
            }
        });
        writer.write_record(row).expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}

/// Twelve random alphanumerics plus `.csv`.
pub fn random_export_name() -> String {
    static RNG: OnceLock<Mutex<SmallRng>> = OnceLock::new();
    let rng = RNG.get_or_init(|| Mutex::new(SmallRng::from_os_rng()));
    let mut rng = rng.lock().unwrap_or_else(|e| e.into_inner());
    format!("{}.csv", Alphanumeric.sample_string(&mut *rng, 12))
}

pub fn export_csv(pkg: &Package) -> (String, Vec<u8>) {
    (random_export_name(), export_bytes(pkg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{load_sample, parse_export, RecordDraft};

    fn three() -> Package {
        let mut drafts = vec![
            RecordDraft::new("One", 100.0, 1.0, 0.0, 0.0),
            RecordDraft::new("Two", 200.0, 1.0, 0.0, 0.0),
            RecordDraft::new("Three", 300.0, 1.0, 0.0, 0.0),
        ];
        drafts[0].subscribed = SubscribedStatus::True;
        drafts[1].subscribed = SubscribedStatus::False;
        Package::from_drafts(&drafts).unwrap()
    }

    #[test]
    fn status_parsing() {
        assert_eq!("maybe".parse(), Ok(SubscribedStatus::Maybe));
        assert_eq!("".parse(), Ok(SubscribedStatus::Blank));
        assert_eq!("blank".parse(), Ok(SubscribedStatus::Blank));
        assert!("YES".parse::<SubscribedStatus>().is_err());
        assert_eq!(SubscribedStatus::Blank.as_cell(), "");
    }

    #[test]
    fn palette() {
        let colors: Vec<_> = SubscribedStatus::ALL.iter().map(|s| s.color()).collect();
        assert_eq!(colors, vec!["blue", "red", "green", "gray"]);
    }

    #[test]
    fn summary_buckets() {
        let t = summarize(three().records());
        assert_eq!(t.subscribed, StatusTotals { title_count: 1, dollar_total: 100.0 });
        assert_eq!(t.cancelled, StatusTotals { title_count: 1, dollar_total: 200.0 });
        assert_eq!(t.blank, StatusTotals { title_count: 1, dollar_total: 300.0 });
        assert_eq!(t.maybe, StatusTotals::default());
        assert_eq!(t.total, StatusTotals { title_count: 3, dollar_total: 600.0 });
    }

    #[test]
    fn empty_summary() {
        let none: [JournalRecord; 0] = [];
        assert_eq!(summarize(none.iter()), SummaryTable::default());
    }

    #[test]
    fn scholar_trends_to_maybe() {
        let pkg = load_sample();
        let hits = find_journal(&pkg, "Scholar Trends");
        assert_eq!(hits.len(), 1);
        let (next, entry) = set_status(&pkg, &hits[0].0, SubscribedStatus::Maybe).unwrap();
        assert_eq!(next.get(&hits[0].0).unwrap().subscribed, SubscribedStatus::Maybe);
        assert_eq!(entry.old, SubscribedStatus::True);
        assert_eq!(entry.new, SubscribedStatus::Maybe);
        // original untouched
        assert_eq!(pkg.get(&hits[0].0).unwrap().subscribed, SubscribedStatus::True);
    }

    #[test]
    fn idempotent_write_still_logged() {
        let mut ledger = DecisionLedger::new(three());
        let before = ledger.package().clone();
        let key = before.records()[0].key.clone();
        ledger.set_status(&key, SubscribedStatus::True).unwrap();
        assert_eq!(ledger.package(), &before);
        assert_eq!(ledger.edits().len(), 1);
    }

    #[test]
    fn unknown_key() {
        let err = set_status(&three(), "nope", SubscribedStatus::True).unwrap_err();
        assert_eq!(err, DecisionError::UnknownKey("nope".into()));
    }

    #[test]
    fn set_and_revert_restores_value() {
        let pkg = three();
        let key = pkg.records()[1].key.clone();
        let (edited, _) = set_status(&pkg, &key, SubscribedStatus::Maybe).unwrap();
        let (back, _) = set_status(&edited, &key, SubscribedStatus::False).unwrap();
        assert_eq!(back, pkg);
        assert_eq!(export_bytes(&back), export_bytes(&pkg));
    }

    #[test]
    fn search() {
        let pkg = load_sample();
        let hits = find_journal(&pkg, "science adv");
        assert_eq!(hits.iter().map(|h| h.1.as_str()).collect::<Vec<_>>(), vec!["Science Advance"]);
        assert!(find_journal(&pkg, "").is_empty());
        assert!(find_journal(&pkg, "zzzz-no-match").is_empty());
    }

    #[test]
    fn search_orders_by_position_then_title() {
        let drafts: Vec<_> = ["Applied Optics", "Optics Letters", "Advanced Optics", "Optical Notes"]
            .iter()
            .map(|t| RecordDraft::new(*t, 1.0, 1.0, 0.0, 0.0))
            .collect();
        let pkg = Package::from_drafts(&drafts).unwrap();
        let titles: Vec<_> = find_journal(&pkg, "OPTIC").into_iter().map(|h| h.1).collect();
        assert_eq!(titles, vec!["Optical Notes", "Optics Letters", "Applied Optics", "Advanced Optics"]);
    }

    #[test]
    fn export_without_edits_is_identity() {
        let pkg = load_sample();
        assert_eq!(export_bytes(&pkg), crate::ingest::SAMPLE_CSV.as_bytes());
    }

    #[test]
    fn export_preserves_crlf_and_bom() {
        let src = "\u{feff}title,subscribed,price,downloads,citations,authorships,usage,cpu,cpu_rank,oa_percent,backfile_percent,subject\r\nA,True,1,1,0,0,1,1,1,0,0,X\r\n";
        let pkg = parse_export(src.as_bytes()).unwrap();
        assert_eq!(export_bytes(&pkg), src.as_bytes());
    }

    #[test]
    fn export_name_format() {
        let (a, bytes_a) = export_csv(&three());
        let (b, bytes_b) = export_csv(&three());
        assert_ne!(a, b);
        assert_eq!(bytes_a, bytes_b);
        assert_eq!(a.len(), 16);
        assert!(a.ends_with(".csv"));
        assert!(a[..12].chars().all(|c| c.is_ascii_alphanumeric()));
    }
}
