use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use subscope_core::charts::{build_all, ChartOptions};
use subscope_core::decisions::{export_bytes, summarize, DecisionLedger, SubscribedStatus, SummaryTable};
use subscope_core::filters::{apply, FilterError, FilterMetric, FilterSpec};
use subscope_core::ingest::{load_sample, parse_export, validate_package, IngestError, Package};
use subscope_core::metrics::{Analysis, MetricsError, WeightSetting};

use crate::args::{Format, RunArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Ingest(#[from] IngestError),
    #[error("{0}")]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Filter(#[from] FilterError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_range(arg: &str) -> Result<(FilterMetric, Option<f64>, Option<f64>), CliError> {
    let bad = || CliError::Usage(format!("--range expects METRIC=LO:HI, got `{arg}`"));
    let (name, bounds) = arg.split_once('=').ok_or_else(bad)?;
    let metric: FilterMetric = name
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("unknown filter metric `{name}`")))?;
    let (lo, hi) = bounds.split_once(':').ok_or_else(bad)?;
    let num = |s: &str| -> Result<Option<f64>, CliError> {
        let s = s.trim();
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| bad())
        }
    };
    Ok((metric, num(lo)?, num(hi)?))
}

fn filter_spec(args: &RunArgs) -> Result<FilterSpec, CliError> {
    let mut pairs = Vec::new();
    for arg in &args.ranges {
        let (metric, lo, hi) = parse_range(arg)?;
        if let Some(lo) = lo {
            pairs.push((format!("{}_min", metric.name()), lo.to_string()));
        }
        if let Some(hi) = hi {
            pairs.push((format!("{}_max", metric.name()), hi.to_string()));
        }
    }
    if !args.statuses.is_empty() {
        pairs.push(("statuses".to_string(), args.statuses.join(",")));
    }
    FilterSpec::from_query_pairs(pairs).map_err(|e| CliError::Usage(e.to_string()))
}

/// Resolves `--set` targets: an exact key, else an exact case-insensitive
/// title that names exactly one record.
fn resolve_key(pkg: &Package, target: &str) -> Result<String, CliError> {
    if pkg.get(target).is_some() {
        return Ok(target.to_string());
    }
    let wanted = target.to_lowercase();
    let hits: Vec<_> = pkg
        .records()
        .iter()
        .filter(|r| r.title.to_lowercase() == wanted)
        .collect();
    match hits.as_slice() {
        [one] => Ok(one.key.clone()),
        [] => Err(CliError::Usage(format!("no journal matches `{target}`"))),
        many => {
            let list: Vec<String> = many.iter().map(|r| format!("  {} ({})", r.key, r.title)).collect();
            Err(CliError::Usage(format!(
                "`{target}` matches {} journals; use a key:\n{}",
                many.len(),
                list.join("\n")
            )))
        }
    }
}

fn load(args: &RunArgs) -> Result<Package, CliError> {
    match (&args.path, args.sample) {
        (_, true) => Ok(load_sample()),
        (Some(path), false) => {
            let bytes = fs::read(path).map_err(io_err(path))?;
            Ok(parse_export(&bytes)?)
        }
        (None, false) => Err(CliError::Usage("give a PATH or --sample".into())),
    }
}

fn table(out: &mut String, heading: &str, s: &SummaryTable) {
    let _ = writeln!(out, "{heading}");
    let _ = writeln!(out, "{:<8}{:>8}{:>16}", "Status", "Titles", "Dollars");
    for status in SubscribedStatus::ALL {
        let t = s.get(status);
        let _ = writeln!(out, "{:<8}{:>8}{:>16.2}", status.label(), t.title_count, t.dollar_total);
    }
    let _ = writeln!(out, "{:<8}{:>8}{:>16.2}", "Total", s.total.title_count, s.total.dollar_total);
}

/// Executes `run` and returns what should go to stdout.
pub fn run(args: &RunArgs) -> Result<String, CliError> {
    let spec = filter_spec(args)?;
    let setting: WeightSetting = match &args.weights {
        Some(w) => w.parse().map_err(|e: MetricsError| CliError::Usage(e.to_string()))?,
        None => WeightSetting::Exported,
    };

    let package = load(args)?;
    for warning in validate_package(&package).warnings {
        eprintln!("warning: {}", serde_json::to_string(&warning).expect("warnings serialize"));
    }

    let mut ledger = DecisionLedger::new(package);
    let mut edits = Vec::new();
    for arg in &args.edits {
        let (target, status) = arg
            .rsplit_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=STATUS, got `{arg}`")))?;
        let status: SubscribedStatus = status
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid status `{status}`")))?;
        let key = resolve_key(ledger.package(), target.trim())?;
        let entry = ledger.set_status(&key, status).expect("key resolved above");
        edits.push(json!({ "key": entry.key, "old": entry.old, "new": entry.new }));
    }

    let package = ledger.into_package();
    let source = setting.resolve(&package)?;
    let analysis = Analysis::new(package, source)?;
    let view = apply(&analysis, &spec)?;

    let mut charts_written = Vec::new();
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for chart in build_all(&view, &ChartOptions::default()) {
            let path = dir.join(format!("{}.json", chart.id()));
            let text = serde_json::to_string_pretty(&chart).expect("charts serialize");
            fs::write(&path, text + "\n").map_err(io_err(&path))?;
            charts_written.push(path);
        }
    }
    if let Some(path) = &args.export {
        fs::write(path, export_bytes(analysis.package())).map_err(io_err(path))?;
    }

    let whole = summarize(analysis.package().records());
    let partial = view.summary();
    let mut out = String::new();
    match args.format {
        Format::Json => {
            let doc = json!({
                "n": analysis.package().len(),
                "view_n": view.len(),
                "usage_source": analysis.source(),
                "total_weighted_usage": analysis.metrics().total_weighted_usage,
                "package_if_percent": analysis.metrics().package_if_percent,
                "package": whole,
                "view": partial,
                "edits": edits,
                "charts": charts_written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "export": args.export.as_ref().map(|p| p.display().to_string()),
            });
            out = serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n";
        }
        Format::Table => {
            let _ = writeln!(out, "total n = {}", analysis.package().len());
            table(&mut out, "Package", &whole);
            if view.len() != analysis.package().len() {
                let _ = writeln!(out);
                table(&mut out, &format!("View ({} titles)", view.len()), &partial);
            }
            if !charts_written.is_empty() {
                let _ = writeln!(out, "\nwrote {} chart documents", charts_written.len());
            }
            if let Some(path) = &args.export {
                let _ = writeln!(out, "wrote {}", path.display());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let (m, lo, hi) = parse_range("price=100:").unwrap();
        assert_eq!((m, lo, hi), (FilterMetric::Price, Some(100.0), None));
        assert!(parse_range("price").is_err());
        assert!(parse_range("colour=1:2").is_err());
    }

    #[test]
    fn title_resolution() {
        let pkg = load_sample();
        let key = resolve_key(&pkg, "science advance").unwrap();
        assert_eq!(pkg.get(&key).unwrap().title, "Science Advance");
        assert_eq!(resolve_key(&pkg, &key).unwrap(), key);
        assert!(matches!(resolve_key(&pkg, "Science"), Err(CliError::Usage(_))));
    }
}
