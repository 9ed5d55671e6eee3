use super::{parse_export, Package};

/// Anonymized 431-title package with fictional journal names, in the same
/// 35-column layout as a real export.
pub const SAMPLE_CSV: &str = include_str!("../../data/sample_export.csv");

pub fn load_sample() -> Package {
    parse_export(SAMPLE_CSV.as_bytes()).expect("bundled sample export is valid")
}
