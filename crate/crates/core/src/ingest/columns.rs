use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use super::IngestError;

/// Fields the analysis understands. Everything else in an export is carried
/// through untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalField {
    Title,
    Issn,
    Subscribed,
    Price,
    Downloads,
    Citations,
    Authorships,
    Usage,
    Cpu,
    CpuRank,
    OaPercent,
    BackfilePercent,
    Subject,
}

impl CanonicalField {
    pub const ALL: [CanonicalField; 13] = [
        CanonicalField::Title,
        CanonicalField::Issn,
        CanonicalField::Subscribed,
        CanonicalField::Price,
        CanonicalField::Downloads,
        CanonicalField::Citations,
        CanonicalField::Authorships,
        CanonicalField::Usage,
        CanonicalField::Cpu,
        CanonicalField::CpuRank,
        CanonicalField::OaPercent,
        CanonicalField::BackfilePercent,
        CanonicalField::Subject,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CanonicalField::Title => "title",
            CanonicalField::Issn => "issn",
            CanonicalField::Subscribed => "subscribed",
            CanonicalField::Price => "price",
            CanonicalField::Downloads => "downloads",
            CanonicalField::Citations => "citations",
            CanonicalField::Authorships => "authorships",
            CanonicalField::Usage => "usage",
            CanonicalField::Cpu => "cpu",
            CanonicalField::CpuRank => "cpu_rank",
            CanonicalField::OaPercent => "oa_percent",
            CanonicalField::BackfilePercent => "backfile_percent",
            CanonicalField::Subject => "subject",
        }
    }

    pub fn is_required(self) -> bool {
        !matches!(self, CanonicalField::Issn)
    }

    /// Accepted header spellings, in priority order. When several aliases of
    /// one field are present, the earliest wins and the rest pass through.
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            CanonicalField::Title => &["title", "journal_title", "journal_name", "journal"],
            CanonicalField::Issn => &["issn", "issn_l", "issnl"],
            CanonicalField::Subscribed => &["subscribed", "subscription_status", "decision"],
            CanonicalField::Price => &["price", "subscription_cost", "subscription_price"],
            CanonicalField::Downloads => &["downloads", "total_downloads"],
            CanonicalField::Citations => &["citations", "total_citations"],
            CanonicalField::Authorships => &["authorships", "total_authorships"],
            CanonicalField::Usage => &["usage", "weighted_usage"],
            CanonicalField::Cpu => &["cpu", "cost_per_use"],
            CanonicalField::CpuRank => &["cpu_rank", "cost_per_use_rank"],
            CanonicalField::OaPercent => &[
                "oa_percent",
                "use_oa_percent",
                "open_access_percent",
                "oa",
                "free_instant_usage_percent",
            ],
            CanonicalField::BackfilePercent => &[
                "backfile_percent",
                "use_backfile_percent",
                "backfile",
            ],
            CanonicalField::Subject => &["subject", "subjects", "era_subjects", "subject_area"],
        }
    }
}

impl fmt::Display for CanonicalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Trim, lowercase, and collapse every run of non-alphanumerics to `_`.
pub fn normalize_header(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_sep = false;
    for ch in raw.trim().chars().flat_map(char::to_lowercase) {
        if ch.is_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.push(ch);
        } else {
            pending_sep = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnBinding {
    pub index: usize,
    pub header: String,
}

/// Resolution of an export's header row onto the canonical fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnMap {
    fields: BTreeMap<CanonicalField, ColumnBinding>,
    passthrough: Vec<ColumnBinding>,
}

impl ColumnMap {
    pub fn get(&self, field: CanonicalField) -> Option<&ColumnBinding> {
        self.fields.get(&field)
    }

    pub fn index_of(&self, field: CanonicalField) -> Option<usize> {
        self.fields.get(&field).map(|b| b.index)
    }

    pub fn source_header(&self, field: CanonicalField) -> Option<&str> {
        self.fields.get(&field).map(|b| b.header.as_str())
    }

    pub fn fields(&self) -> impl Iterator<Item = (CanonicalField, &ColumnBinding)> {
        self.fields.iter().map(|(f, b)| (*f, b))
    }

    /// Unrecognized headers in their original order.
    pub fn passthrough(&self) -> &[ColumnBinding] {
        &self.passthrough
    }

    pub fn passthrough_headers(&self) -> Vec<&str> {
        self.passthrough.iter().map(|b| b.header.as_str()).collect()
    }
}

pub fn map_headers<S: AsRef<str>>(headers: &[S]) -> Result<ColumnMap, IngestError> {
    if headers.is_empty() {
        return Err(IngestError::EmptyFile);
    }

    let normalized: Vec<String> = headers.iter().map(|h| normalize_header(h.as_ref())).collect();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, name) in normalized.iter().enumerate() {
        if seen.insert(name.as_str(), i).is_some() {
            return Err(IngestError::DuplicateHeader(headers[i].as_ref().to_string()));
        }
    }

    let mut fields = BTreeMap::new();
    let mut claimed = vec![false; headers.len()];
    for field in CanonicalField::ALL {
        let hit = field
            .aliases()
            .iter()
            .find_map(|alias| seen.get(alias).copied().filter(|&i| !claimed[i]));
        match hit {
            Some(index) => {
                claimed[index] = true;
                fields.insert(
                    field,
                    ColumnBinding {
                        index,
                        header: headers[index].as_ref().to_string(),
                    },
                );
            }
            None if field.is_required() => {
                return Err(IngestError::MissingRequiredColumn(field.name().to_string()));
            }
            None => {}
        }
    }

    let passthrough = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| !claimed[*i])
        .map(|(index, h)| ColumnBinding {
            index,
            header: h.as_ref().to_string(),
        })
        .collect();

    Ok(ColumnMap {
        fields,
        passthrough,
    })
}
