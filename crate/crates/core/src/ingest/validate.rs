use std::collections::BTreeMap;

use serde::Serialize;

use super::coerce::{clamp_non_negative, clamp_percent, decode_status, parse_number};
use super::{CanonicalField, Package};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationWarning {
    /// Open access and backfile shares add up to more than 100%.
    OverlappingFulfillment { key: String },
    DuplicateRank { rank: u32 },
    RankGap { rank: u32 },
    RankOutOfRange { key: String, rank: u32 },
    /// No record carries a cost-per-use rank; ranks will be computed.
    RanksMissing,
    ValueClamped {
        key: String,
        field: CanonicalField,
        original: f64,
        clamped: f64,
    },
    UnrecognizedStatus { key: String, token: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub warnings: Vec<ValidationWarning>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Inspects a parsed package for data-quality problems. Never fails and
/// never modifies the package.
pub fn validate_package(pkg: &Package) -> ValidationReport {
    let mut warnings = Vec::new();
    let map = pkg.column_map();

    for record in pkg.records() {
        let cell = |field: CanonicalField| {
            map.index_of(field)
                .and_then(|i| record.raw.get(i))
                .unwrap_or("")
        };

        let (_, recognized) = decode_status(cell(CanonicalField::Subscribed));
        if !recognized {
            warnings.push(ValidationWarning::UnrecognizedStatus {
                key: record.key.clone(),
                token: cell(CanonicalField::Subscribed).to_string(),
            });
        }

        for field in [
            CanonicalField::Price,
            CanonicalField::Downloads,
            CanonicalField::Citations,
            CanonicalField::Authorships,
            CanonicalField::Usage,
            CanonicalField::Cpu,
            CanonicalField::OaPercent,
            CanonicalField::BackfilePercent,
        ] {
            let Ok(Some(original)) = parse_number(cell(field)) else {
                continue;
            };
            if !original.is_finite() {
                continue;
            }
            let coerced = match field {
                CanonicalField::OaPercent | CanonicalField::BackfilePercent => clamp_percent(original),
                _ => clamp_non_negative(original),
            };
            if coerced.clamped_from.is_some() {
                warnings.push(ValidationWarning::ValueClamped {
                    key: record.key.clone(),
                    field,
                    original,
                    clamped: coerced.value,
                });
            }
        }

        if record.oa_percent + record.backfile_percent > 100.0 {
            warnings.push(ValidationWarning::OverlappingFulfillment {
                key: record.key.clone(),
            });
        }
    }

    warnings.extend(rank_warnings(pkg));
    ValidationReport { warnings }
}

fn rank_warnings(pkg: &Package) -> Vec<ValidationWarning> {
    let n = pkg.len() as u32;
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for record in pkg.records() {
        if let Some(rank) = record.cpu_rank {
            if rank > n {
                out.push(ValidationWarning::RankOutOfRange {
                    key: record.key.clone(),
                    rank,
                });
            }
            *counts.entry(rank).or_default() += 1;
        }
    }
    if n > 0 && counts.is_empty() {
        out.push(ValidationWarning::RanksMissing);
        return out;
    }
    out.extend(
        counts
            .iter()
            .filter(|(_, &c)| c > 1)
            .map(|(&rank, _)| ValidationWarning::DuplicateRank { rank }),
    );
    if !counts.is_empty() {
        out.extend(
            (1..=n)
                .filter(|r| !counts.contains_key(r))
                .map(|rank| ValidationWarning::RankGap { rank }),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{load_sample, parse_export};

    const HEADER: &str = "title,subscribed,price,downloads,citations,authorships,usage,cpu,cpu_rank,oa_percent,backfile_percent,subject\n";

    fn pkg(rows: &str) -> Package {
        parse_export(format!("{HEADER}{rows}").as_bytes()).unwrap()
    }

    #[test]
    fn sample_is_clean() {
        assert_eq!(validate_package(&load_sample()).warnings, vec![]);
    }

    #[test]
    fn overlapping_fulfillment() {
        let p = pkg("A,TRUE,10,1,0,0,1,10,1,88,20,\n");
        assert_eq!(
            validate_package(&p).warnings,
            vec![ValidationWarning::OverlappingFulfillment { key: "a-1".into() }]
        );
    }

    #[test]
    fn duplicate_and_gap() {
        let p = pkg("A,,10,1,0,0,1,10,1,0,0,\nB,,10,1,0,0,1,10,1,0,0,\nC,,10,1,0,0,1,10,3,0,0,\n");
        assert_eq!(
            validate_package(&p).warnings,
            vec![
                ValidationWarning::DuplicateRank { rank: 1 },
                ValidationWarning::RankGap { rank: 2 }
            ]
        );
    }

    #[test]
    fn duplicate_rank_five() {
        let rows: String = (1..=6)
            .map(|i| {
                let rank = if i == 6 { 5 } else { i };
                format!("T{i},,10,1,0,0,1,10,{rank},0,0,\n")
            })
            .collect();
        let warnings = validate_package(&pkg(&rows)).warnings;
        assert!(warnings.contains(&ValidationWarning::DuplicateRank { rank: 5 }));
    }

    #[test]
    fn clamps_and_bad_status_are_reported() {
        let p = pkg("A,yes,-10,1,0,0,1,10,1,120,0,\n");
        let w = validate_package(&p).warnings;
        assert!(w.contains(&ValidationWarning::UnrecognizedStatus { key: "a-1".into(), token: "yes".into() }));
        assert!(w.contains(&ValidationWarning::ValueClamped {
            key: "a-1".into(),
            field: CanonicalField::Price,
            original: -10.0,
            clamped: 0.0
        }));
        assert!(w.iter().any(|x| matches!(x, ValidationWarning::ValueClamped { field: CanonicalField::OaPercent, .. })));
    }

    #[test]
    fn no_ranks_at_all() {
        let p = pkg("A,,10,1,0,0,1,10,,0,0,\nB,,10,1,0,0,1,10,,0,0,\n");
        assert_eq!(validate_package(&p).warnings, vec![ValidationWarning::RanksMissing]);
    }

    #[test]
    fn validation_does_not_mutate() {
        let p = pkg("A,yes,-10,1,0,0,1,10,1,120,0,\n");
        let before = p.clone();
        validate_package(&p);
        assert_eq!(p, before);
    }
}
