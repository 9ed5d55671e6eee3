//! Demand and fulfillment metrics.
//!
//! Weighted usage combines downloads, citations and authorships. The part of
//! a journal's weighted usage that open access and backfile rights cannot
//! cover is its current-year usage; dividing that by the package's total
//! weighted usage gives the journal's Instant Fill contribution, in
//! percentage points.

mod rank;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{JournalRecord, Package};

pub use rank::{compute_cpu_ranks, rank_by_cpu, ranks_are_complete};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("package has zero total weighted usage")]
    ZeroPackageUsage,
    #[error("sum of {0} is zero")]
    DegenerateDenominator(&'static str),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub download: f64,
    pub citation: f64,
    pub authorship: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            download: 1.0,
            citation: 10.0,
            authorship: 100.0,
        }
    }
}

impl Weights {
    pub fn new(download: f64, citation: f64, authorship: f64) -> Result<Self, MetricsError> {
        let w = Weights {
            download,
            citation,
            authorship,
        };
        if [download, citation, authorship]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
        {
            Ok(w)
        } else {
            Err(MetricsError::InvalidWeights(w.to_string()))
        }
    }

    pub fn scaled(self, k: f64) -> Result<Self, MetricsError> {
        Weights::new(self.download * k, self.citation * k, self.authorship * k)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.download, self.citation, self.authorship)
    }
}

impl FromStr for Weights {
    type Err = MetricsError;

    /// `"d,c,a"`, e.g. `"1,10,100"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || MetricsError::InvalidWeights(s.to_string());
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut v = [0.0; 3];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part.parse().map_err(|_| bad())?;
        }
        Weights::new(v[0], v[1], v[2])
    }
}

pub fn weighted_usage(rec: &JournalRecord, w: &Weights) -> f64 {
    weighted_usage_of(rec.downloads, rec.citations, rec.authorships, w)
}

pub fn weighted_usage_of(downloads: f64, citations: f64, authorships: f64, w: &Weights) -> f64 {
    w.download * downloads + w.citation * citations + w.authorship * authorships
}

/// Package-relative weights: citations and authorships are each worth as
/// many downloads as the package-wide ratio of downloads to that signal.
pub fn dynamic_weights(pkg: &Package) -> Result<Weights, MetricsError> {
    let (mut d, mut c, mut a) = (0.0, 0.0, 0.0);
    for r in pkg.records() {
        d += r.downloads;
        c += r.citations;
        a += r.authorships;
    }
    if c == 0.0 {
        return Err(MetricsError::DegenerateDenominator("citations"));
    }
    if a == 0.0 {
        return Err(MetricsError::DegenerateDenominator("authorships"));
    }
    Weights::new(1.0, d / c, d / a)
}

/// Usage that only a current subscription can satisfy. The fulfilled share
/// is capped at 100%, so the result lies in `[0, usage]`.
pub fn current_year_usage_of(usage: f64, oa_percent: f64, backfile_percent: f64) -> f64 {
    let residual_points = (100.0 - (oa_percent + backfile_percent)).max(0.0);
    residual_points * usage / 100.0
}

pub fn current_year_usage(rec: &JournalRecord) -> f64 {
    current_year_usage_of(rec.usage, rec.oa_percent, rec.backfile_percent)
}

pub fn fulfillment_overlaps(rec: &JournalRecord) -> bool {
    rec.oa_percent + rec.backfile_percent > 100.0
}

/// Instant Fill contribution in percentage points (0.06 means 0.06%).
pub fn instant_fill_percent(rec: &JournalRecord, total_weighted_usage: f64) -> Result<f64, MetricsError> {
    if_percent_of(current_year_usage(rec), total_weighted_usage)
}

pub fn if_percent_of(current_year: f64, total_weighted_usage: f64) -> Result<f64, MetricsError> {
    if total_weighted_usage <= 0.0 {
        return Err(MetricsError::ZeroPackageUsage);
    }
    Ok(100.0 * current_year / total_weighted_usage)
}

/// Dollars per Instant Fill point; undefined when the journal contributes
/// nothing.
pub fn normalized_if_cost(rec: &JournalRecord, if_percent: f64) -> Option<f64> {
    normalized_if_cost_of(rec.price, if_percent)
}

pub fn normalized_if_cost_of(price: f64, if_percent: f64) -> Option<f64> {
    (if_percent > 0.0).then(|| price / if_percent)
}

/// Which usage figure drives the derived metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UsageSource {
    /// The usage column as exported; exported cost-per-use and ranks are kept.
    #[default]
    Exported,
    /// Usage recomputed from the counts under the given weights; cost-per-use
    /// and ranks follow from it.
    Recomputed(Weights),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordMetrics {
    pub key: String,
    pub usage: f64,
    pub cpu: Option<f64>,
    pub cpu_rank: u32,
    pub current_year_usage: f64,
    pub if_percent: f64,
    pub normalized_if_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricWarning {
    /// Fulfillment shares exceed 100%; current-year usage clamped to zero.
    OverlappingFulfillment { key: String },
}

/// Derived values for every record, aligned with the package's record order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackageMetrics {
    pub source: UsageSource,
    pub records: Vec<RecordMetrics>,
    pub total_weighted_usage: f64,
    pub package_if_percent: f64,
    pub warnings: Vec<MetricWarning>,
}

impl PackageMetrics {
    pub fn compute(pkg: &Package, source: UsageSource) -> Result<Self, MetricsError> {
        let records = pkg.records();
        let usages: Vec<f64> = match source {
            UsageSource::Exported => records.iter().map(|r| r.usage).collect(),
            UsageSource::Recomputed(w) => records.iter().map(|r| weighted_usage(r, &w)).collect(),
        };
        // fixed left-to-right order keeps totals bitwise reproducible
        let total: f64 = usages.iter().sum();
        if !records.is_empty() && total <= 0.0 {
            return Err(MetricsError::ZeroPackageUsage);
        }

        let cpus: Vec<Option<f64>> = records
            .iter()
            .zip(&usages)
            .map(|(r, &u)| {
                let derived = (u > 0.0).then(|| r.price / u);
                match source {
                    UsageSource::Exported => r.cpu.or(derived),
                    UsageSource::Recomputed(_) => derived,
                }
            })
            .collect();
        let ranks: Vec<u32> = match source {
            UsageSource::Exported if ranks_are_complete(pkg) => {
                records.iter().map(|r| r.cpu_rank.expect("complete")).collect()
            }
            _ => rank_by_cpu(records, &cpus),
        };

        let mut warnings = Vec::new();
        let mut current_sum = 0.0;
        let mut out = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if fulfillment_overlaps(r) {
                warnings.push(MetricWarning::OverlappingFulfillment { key: r.key.clone() });
            }
            let cy = current_year_usage_of(usages[i], r.oa_percent, r.backfile_percent);
            current_sum += cy;
            let if_percent = if_percent_of(cy, total)?;
            out.push(RecordMetrics {
                key: r.key.clone(),
                usage: usages[i],
                cpu: cpus[i],
                cpu_rank: ranks[i],
                current_year_usage: cy,
                if_percent,
                normalized_if_cost: normalized_if_cost_of(r.price, if_percent),
            });
        }

        let package_if_percent = if records.is_empty() {
            0.0
        } else {
            100.0 * current_sum / total
        };
        Ok(PackageMetrics {
            source,
            records: out,
            total_weighted_usage: total,
            package_if_percent,
            warnings,
        })
    }
}

/// How a caller asks for usage to be derived. Unlike [`UsageSource`], the
/// dynamic scheme is resolved against a concrete package.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum WeightSetting {
    #[default]
    Exported,
    Fixed(Weights),
    Dynamic,
}

impl WeightSetting {
    pub fn resolve(self, pkg: &Package) -> Result<UsageSource, MetricsError> {
        Ok(match self {
            WeightSetting::Exported => UsageSource::Exported,
            WeightSetting::Fixed(w) => UsageSource::Recomputed(w),
            WeightSetting::Dynamic => UsageSource::Recomputed(dynamic_weights(pkg)?),
        })
    }
}

impl FromStr for WeightSetting {
    type Err = MetricsError;

    /// `exported`, `dynamic`, or `d,c,a`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exported" => Ok(WeightSetting::Exported),
            "dynamic" => Ok(WeightSetting::Dynamic),
            other => other.parse().map(WeightSetting::Fixed),
        }
    }
}

/// Full recomputation under explicit weights.
pub fn recompute_all(pkg: &Package, w: &Weights) -> Result<PackageMetrics, MetricsError> {
    PackageMetrics::compute(pkg, UsageSource::Recomputed(*w))
}

/// A package paired with metrics that are guaranteed to describe it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    package: Package,
    metrics: PackageMetrics,
}

impl Analysis {
    pub fn new(package: Package, source: UsageSource) -> Result<Self, MetricsError> {
        let metrics = PackageMetrics::compute(&package, source)?;
        Ok(Analysis { package, metrics })
    }

    pub fn package(&self) -> &Package {
        &self.package
    }

    pub fn metrics(&self) -> &PackageMetrics {
        &self.metrics
    }

    pub fn source(&self) -> UsageSource {
        self.metrics.source
    }

    pub fn into_package(self) -> Package {
        self.package
    }
}
