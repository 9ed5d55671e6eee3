//! Journal subscription analysis over Unsub-style CSV exports.
//!
//! Load a package with [`ingest::parse_export`] (or the bundled
//! [`ingest::load_sample`]), derive metrics with [`metrics::Analysis`],
//! narrow it with [`filters::apply`], edit decisions through
//! [`decisions::DecisionLedger`], and render any of the twelve standard
//! charts with [`charts::build`].

pub mod charts;
pub mod decisions;
pub mod filters;
pub mod ingest;
pub mod metrics;

pub use charts::{build_chart, chart_catalog, ChartId, ChartSpec};
pub use decisions::{DecisionLedger, SubscribedStatus, SummaryTable};
pub use filters::{apply, FilterSpec, View};
pub use ingest::{load_sample, parse_export, JournalRecord, Package};
pub use metrics::{Analysis, PackageMetrics, UsageSource, WeightSetting, Weights};
