//! Python bindings. Results cross the boundary as plain dicts and lists,
//! built from the same serde representations the HTTP service returns.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};
use serde::Serialize;

use subscope_core::charts::{self, ChartId, ChartOptions};
use subscope_core::decisions::{self, DecisionLedger, SubscribedStatus};
use subscope_core::filters::{self, FilterSpec};
use subscope_core::ingest::{self, validate_package};
use subscope_core::metrics::{self, WeightSetting, Weights};

create_exception!(subscope, SubscopeError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    SubscopeError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn filter_spec(filter: Option<&Bound<'_, PyDict>>) -> PyResult<FilterSpec> {
    let Some(filter) = filter else {
        return Ok(FilterSpec::new());
    };
    let mut pairs = Vec::new();
    for (k, v) in filter.iter() {
        let key: String = k.extract()?;
        let value = match v.extract::<Vec<String>>() {
            Ok(items) if !v.is_instance_of::<pyo3::types::PyString>() => items.join(","),
            _ => v.str()?.to_string(),
        };
        pairs.push((key, value));
    }
    FilterSpec::from_query_pairs(pairs).map_err(err)
}

/// A parsed export plus its decision edits.
#[pyclass(module = "subscope")]
struct Package {
    ledger: DecisionLedger,
}

#[pymethods]
impl Package {
    /// The bundled 431-title sample.
    #[staticmethod]
    fn sample() -> Self {
        Package {
            ledger: DecisionLedger::new(ingest::load_sample()),
        }
    }

    #[staticmethod]
    fn parse(data: &[u8]) -> PyResult<Self> {
        let pkg = ingest::parse_export(data).map_err(err)?;
        Ok(Package {
            ledger: DecisionLedger::new(pkg),
        })
    }

    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
        Self::parse(&bytes)
    }

    fn __len__(&self) -> usize {
        self.ledger.package().len()
    }

    fn __repr__(&self) -> String {
        format!("<subscope.Package n={} edits={}>", self.ledger.package().len(), self.ledger.edits().len())
    }

    #[getter]
    fn headers(&self) -> Vec<String> {
        self.ledger.package().headers().to_vec()
    }

    #[getter]
    fn total_weighted_usage(&self) -> f64 {
        self.ledger.package().total_weighted_usage()
    }

    fn records<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.ledger.package().records())
    }

    fn warnings<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &validate_package(self.ledger.package()).warnings)
    }

    /// `(key, title)` pairs whose title contains `query`, case-insensitively.
    fn search(&self, query: &str) -> Vec<(String, String)> {
        decisions::find_journal(self.ledger.package(), query)
    }

    fn set_status<'py>(&mut self, py: Python<'py>, key: &str, status: &str) -> PyResult<Bound<'py, PyAny>> {
        let status: SubscribedStatus = status.parse().map_err(err)?;
        let entry = self.ledger.set_status(key, status).map_err(err)?;
        to_py(py, entry)
    }

    fn edits<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.ledger.edits())
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &decisions::summarize(self.ledger.package().records()))
    }

    /// The export with current decisions written into the Subscribed column.
    fn export<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &decisions::export_bytes(self.ledger.package()))
    }

    /// `weights` is "exported", "dynamic", or "d,c,a".
    #[pyo3(signature = (weights="exported"))]
    fn analyze(&self, weights: &str) -> PyResult<Analysis> {
        let pkg = self.ledger.package().clone();
        let setting: WeightSetting = weights.parse().map_err(err)?;
        let source = setting.resolve(&pkg).map_err(err)?;
        let inner = metrics::Analysis::new(pkg, source).map_err(err)?;
        Ok(Analysis { inner })
    }
}

/// Derived metrics for a frozen copy of a package.
#[pyclass(module = "subscope")]
struct Analysis {
    inner: metrics::Analysis,
}

#[pymethods]
impl Analysis {
    #[getter]
    fn total_weighted_usage(&self) -> f64 {
        self.inner.metrics().total_weighted_usage
    }

    #[getter]
    fn package_if_percent(&self) -> f64 {
        self.inner.metrics().package_if_percent
    }

    #[getter]
    fn usage_source<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.source())
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.metrics().records)
    }

    /// Keys of records in the filtered view, in package order.
    #[pyo3(signature = (filter=None))]
    fn view_keys(&self, filter: Option<&Bound<'_, PyDict>>) -> PyResult<Vec<String>> {
        let view = filters::apply(&self.inner, &filter_spec(filter)?).map_err(err)?;
        Ok(view.records().map(|r| r.key.clone()).collect())
    }

    #[pyo3(signature = (filter=None))]
    fn summary<'py>(&self, py: Python<'py>, filter: Option<&Bound<'_, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
        let view = filters::apply(&self.inner, &filter_spec(filter)?).map_err(err)?;
        to_py(py, &view.summary())
    }

    fn bounds<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let bounds = filters::slider_bounds(&self.inner).map_err(err)?;
        let map: std::collections::BTreeMap<&str, (f64, f64)> =
            bounds.iter().map(|(m, r)| (m.name(), (r.lo, r.hi))).collect();
        to_py(py, &map)
    }

    /// A Vega-Lite document for one of the twelve charts.
    #[pyo3(signature = (chart_id, filter=None, authorship_bins=20, cpu_bins=10))]
    fn chart<'py>(
        &self,
        py: Python<'py>,
        chart_id: &str,
        filter: Option<&Bound<'_, PyDict>>,
        authorship_bins: usize,
        cpu_bins: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let id: ChartId = chart_id.parse().map_err(err)?;
        let view = filters::apply(&self.inner, &filter_spec(filter)?).map_err(err)?;
        let options = ChartOptions {
            authorship_bins: authorship_bins.max(1),
            cpu_bins: cpu_bins.max(1),
        };
        to_py(py, &charts::build(&view, id, &options))
    }
}

#[pyfunction]
fn load_sample() -> Package {
    Package::sample()
}

#[pyfunction]
fn parse_export(data: &[u8]) -> PyResult<Package> {
    Package::parse(data)
}

#[pyfunction]
#[pyo3(signature = (downloads, citations, authorships, weights=(1.0, 10.0, 100.0)))]
fn weighted_usage(downloads: f64, citations: f64, authorships: f64, weights: (f64, f64, f64)) -> PyResult<f64> {
    let w = Weights::new(weights.0, weights.1, weights.2).map_err(err)?;
    Ok(metrics::weighted_usage_of(downloads, citations, authorships, &w))
}

#[pyfunction]
fn dynamic_weights(package: &Package) -> PyResult<(f64, f64, f64)> {
    let w = metrics::dynamic_weights(package.ledger.package()).map_err(err)?;
    Ok((w.download, w.citation, w.authorship))
}

#[pyfunction]
fn current_year_usage(usage: f64, oa_percent: f64, backfile_percent: f64) -> f64 {
    metrics::current_year_usage_of(usage, oa_percent, backfile_percent)
}

#[pyfunction]
fn if_percent(current_year_usage: f64, total_weighted_usage: f64) -> PyResult<f64> {
    metrics::if_percent_of(current_year_usage, total_weighted_usage).map_err(err)
}

#[pyfunction]
fn normalized_if_cost(price: f64, if_percent: f64) -> Option<f64> {
    metrics::normalized_if_cost_of(price, if_percent)
}

#[pyfunction]
fn chart_catalog(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &charts::chart_catalog())
}

#[pymodule]
fn subscope(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SubscopeError", m.py().get_type::<SubscopeError>())?;
    m.add_class::<Package>()?;
    m.add_class::<Analysis>()?;
    m.add_function(wrap_pyfunction!(load_sample, m)?)?;
    m.add_function(wrap_pyfunction!(parse_export, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_usage, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_weights, m)?)?;
    m.add_function(wrap_pyfunction!(current_year_usage, m)?)?;
    m.add_function(wrap_pyfunction!(if_percent, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_if_cost, m)?)?;
    m.add_function(wrap_pyfunction!(chart_catalog, m)?)?;
    Ok(())
}
