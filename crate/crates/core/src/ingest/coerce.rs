//! Cell-level decoding shared by parsing and validation.

use crate::decisions::SubscribedStatus;

const STRIPPED: &[char] = &['$', '€', '£', '¥', ',', '%', ' ', '\u{a0}'];

/// Parses a numeric cell. Currency symbols, thousands separators, percent
/// signs and inner spaces are dropped. Blank cells yield `Ok(None)`.
pub fn parse_number(cell: &str) -> Result<Option<f64>, String> {
    let trimmed = cell.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    let cleaned: String = trimmed.chars().filter(|c| !STRIPPED.contains(c)).collect();
    // accounting-style negatives: (1,250.00)
    let (cleaned, negate) = match cleaned.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        Some(inner) => (inner.to_string(), true),
        None => (cleaned, false),
    };
    let value: f64 = cleaned
        .parse()
        .map_err(|_| format!("not a number: {trimmed:?}"))?;
    Ok(Some(if negate { -value } else { value }))
}

/// Outcome of decoding one cell into a clamped, finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coerced {
    pub value: f64,
    pub clamped_from: Option<f64>,
}

pub fn clamp_non_negative(value: f64) -> Coerced {
    if value < 0.0 {
        Coerced {
            value: 0.0,
            clamped_from: Some(value),
        }
    } else {
        Coerced {
            value,
            clamped_from: None,
        }
    }
}

pub fn clamp_percent(value: f64) -> Coerced {
    let clamped = value.clamp(0.0, 100.0);
    Coerced {
        value: clamped,
        clamped_from: (clamped != value).then_some(value),
    }
}

/// Case-insensitive TRUE/FALSE/MAYBE; blank for empty cells. The boolean is
/// false when the token was not recognized (and decoded as blank).
pub fn decode_status(cell: &str) -> (SubscribedStatus, bool) {
    let token = cell.trim();
    if token.is_empty() {
        return (SubscribedStatus::Blank, true);
    }
    match token.to_ascii_uppercase().as_str() {
        "TRUE" => (SubscribedStatus::True, true),
        "FALSE" => (SubscribedStatus::False, true),
        "MAYBE" => (SubscribedStatus::Maybe, true),
        _ => (SubscribedStatus::Blank, false),
    }
}

/// Splits a subject cell on semicolons, falling back to commas when no
/// semicolon is present. Empty entries and repeats are dropped.
pub fn split_subjects(cell: &str) -> Vec<String> {
    let sep = if cell.contains(';') { ';' } else { ',' };
    let mut out: Vec<String> = Vec::new();
    for part in cell.split(sep).map(str::trim).filter(|s| !s.is_empty()) {
        if !out.iter().any(|s| s == part) {
            out.push(part.to_string());
        }
    }
    out
}

pub fn slugify(title: &str) -> String {
    let mut slug = String::with_capacity(title.len());
    let mut dash = false;
    for ch in title.trim().chars().flat_map(char::to_lowercase) {
        if ch.is_ascii_alphanumeric() {
            if dash && !slug.is_empty() {
                slug.push('-');
            }
            dash = false;
            slug.push(ch);
        } else {
            dash = true;
        }
    }
    if slug.is_empty() {
        slug.push_str("journal");
    }
    slug
}
