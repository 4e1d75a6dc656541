//! Python bindings: configs, reference sets, forecasting and metrics.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use simforecast::dataio::{self, CorpusRecord};
use simforecast::{forecaster, metrics, preprocess, similarity};
use simforecast::{
    Aggregator, CalibrationStatus, DistanceMeasure, Frequency, TimeSeries,
};

create_exception!(simforecast, SimforecastError, PyValueError);

fn err(e: simforecast::Error) -> PyErr {
    SimforecastError::new_err(e.to_string())
}

fn frequency(label: &str) -> PyResult<Frequency> {
    Frequency::from_label(label).map_err(err)
}

#[pyclass(name = "PreprocessConfig", module = "simforecast", from_py_object)]
#[derive(Clone)]
struct PyPreprocessConfig {
    inner: simforecast::PreprocessConfig,
}

#[pymethods]
impl PyPreprocessConfig {
    /// Defaults for the given frequency label; keyword arguments override them.
    #[new]
    #[pyo3(signature = (frequency="yearly", *, span_factor=None, acf_confidence_z=None,
        lambda_range=None, seasonal_adjustment=true, smoothing=true))]
    fn new(
        frequency: &str,
        span_factor: Option<f64>,
        acf_confidence_z: Option<f64>,
        lambda_range: Option<(f64, f64)>,
        seasonal_adjustment: bool,
        smoothing: bool,
    ) -> PyResult<Self> {
        let base = simforecast::PreprocessConfig::for_frequency(self::frequency(frequency)?);
        let inner = simforecast::PreprocessConfig {
            span_factor: span_factor.unwrap_or(base.span_factor),
            acf_confidence_z: acf_confidence_z.unwrap_or(base.acf_confidence_z),
            box_cox_lambda_range: lambda_range.unwrap_or(base.box_cox_lambda_range),
            enable_seasonal_adjustment: seasonal_adjustment,
            enable_smoothing: smoothing,
        };
        inner.validate().map_err(err)?;
        Ok(PyPreprocessConfig { inner })
    }

    #[staticmethod]
    fn scaling_only() -> Self {
        PyPreprocessConfig {
            inner: simforecast::PreprocessConfig::scaling_only(),
        }
    }

    #[getter]
    fn span_factor(&self) -> f64 {
        self.inner.span_factor
    }

    #[getter]
    fn acf_confidence_z(&self) -> f64 {
        self.inner.acf_confidence_z
    }

    #[getter]
    fn lambda_range(&self) -> (f64, f64) {
        self.inner.box_cox_lambda_range
    }

    #[getter]
    fn seasonal_adjustment(&self) -> bool {
        self.inner.enable_seasonal_adjustment
    }

    #[getter]
    fn smoothing(&self) -> bool {
        self.inner.enable_smoothing
    }

    fn __repr__(&self) -> String {
        format!(
            "PreprocessConfig(span_factor={}, acf_confidence_z={}, lambda_range={:?}, seasonal_adjustment={}, smoothing={})",
            self.inner.span_factor,
            self.inner.acf_confidence_z,
            self.inner.box_cox_lambda_range,
            self.inner.enable_seasonal_adjustment,
            self.inner.enable_smoothing
        )
    }
}

#[pyclass(name = "ForecastConfig", module = "simforecast", from_py_object)]
#[derive(Clone)]
struct PyForecastConfig {
    inner: simforecast::ForecastConfig,
}

#[pymethods]
impl PyForecastConfig {
    #[new]
    #[pyo3(signature = (*, distance="dtw", k=500, aggregator="median", alpha=0.05, delta_step=0.01))]
    fn new(distance: &str, k: usize, aggregator: &str, alpha: f64, delta_step: f64) -> PyResult<Self> {
        let inner = simforecast::ForecastConfig {
            distance: distance.parse::<DistanceMeasure>().map_err(err)?,
            k,
            aggregator: aggregator.parse::<Aggregator>().map_err(err)?,
            alpha,
            delta_grid_step: delta_step,
        };
        inner.validate().map_err(err)?;
        Ok(PyForecastConfig { inner })
    }

    #[getter]
    fn distance(&self) -> &'static str {
        self.inner.distance.name()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn aggregator(&self) -> &'static str {
        self.inner.aggregator.name()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn delta_step(&self) -> f64 {
        self.inner.delta_grid_step
    }

    fn __repr__(&self) -> String {
        format!(
            "ForecastConfig(distance='{}', k={}, aggregator='{}', alpha={}, delta_step={})",
            self.inner.distance.name(),
            self.inner.k,
            self.inner.aggregator.name(),
            self.inner.alpha,
            self.inner.delta_grid_step
        )
    }
}

/// Immutable set of preprocessed reference windows.
#[pyclass(name = "ReferenceSet", module = "simforecast", frozen)]
struct PyReferenceSet {
    inner: simforecast::ReferenceSet,
    dropped: usize,
}

fn records(series: Vec<(String, Vec<f64>)>, freq: Frequency, h: usize) -> Vec<CorpusRecord> {
    series
        .into_iter()
        .map(|(series_id, values)| CorpusRecord {
            series_id,
            frequency: freq,
            values,
            horizon: h,
        })
        .collect()
}

#[pymethods]
impl PyReferenceSet {
    /// Builds a set from `(id, values)` pairs for targets of length `n`.
    #[staticmethod]
    #[pyo3(signature = (series, n, h, frequency="yearly", config=None))]
    fn build(
        series: Vec<(String, Vec<f64>)>,
        n: usize,
        h: usize,
        frequency: &str,
        config: Option<PyPreprocessConfig>,
    ) -> PyResult<Self> {
        let freq = self::frequency(frequency)?;
        let config = config.map_or_else(|| simforecast::PreprocessConfig::for_frequency(freq), |c| c.inner);
        let corpus = records(series, freq, h);
        let (inner, report) =
            dataio::build_reference_set(&corpus, n, h, freq, &config).map_err(err)?;
        Ok(PyReferenceSet {
            inner,
            dropped: report.dropped(),
        })
    }

    /// Builds a set from a corpus CSV file.
    #[staticmethod]
    #[pyo3(signature = (path, n, h, frequency, config=None))]
    fn from_csv(
        path: &str,
        n: usize,
        h: usize,
        frequency: &str,
        config: Option<PyPreprocessConfig>,
    ) -> PyResult<Self> {
        let freq = self::frequency(frequency)?;
        let config = config.map_or_else(|| simforecast::PreprocessConfig::for_frequency(freq), |c| c.inner);
        let corpus = dataio::read_corpus(path).map_err(err)?;
        let (inner, report) =
            dataio::build_reference_set(&corpus, n, h, freq, &config).map_err(err)?;
        Ok(PyReferenceSet {
            inner,
            dropped: report.dropped(),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, expected_config=None))]
    fn load(path: &str, expected_config: Option<PyPreprocessConfig>) -> PyResult<Self> {
        let inner = dataio::load_reference_set(path, expected_config.as_ref().map(|c| &c.inner))
            .map_err(err)?;
        Ok(PyReferenceSet { inner, dropped: 0 })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        dataio::save_reference_set(&self.inner, path).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        dataio::export_json(&self.inner).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.target_n()
    }

    #[getter]
    fn h(&self) -> usize {
        self.inner.horizon()
    }

    #[getter]
    fn frequency(&self) -> String {
        self.inner.frequency().label()
    }

    /// Series dropped while building (too short or failed preprocessing).
    #[getter]
    fn dropped(&self) -> usize {
        self.dropped
    }

    #[getter]
    fn config(&self) -> PyPreprocessConfig {
        PyPreprocessConfig {
            inner: self.inner.preprocessing_config().clone(),
        }
    }

    fn ids(&self) -> Vec<String> {
        self.inner.entries().iter().map(|e| e.id().to_string()).collect()
    }

    /// `(history, future)` of the reference at `index`.
    fn window(&self, index: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let e = self
            .inner
            .entries()
            .get(index)
            .ok_or_else(|| pyo3::exceptions::PyIndexError::new_err(index))?;
        Ok((e.history().to_vec(), e.future_path().to_vec()))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ReferenceSet(m={}, n={}, h={}, frequency='{}')",
            self.inner.len(),
            self.inner.target_n(),
            self.inner.horizon(),
            self.inner.frequency()
        )
    }
}

fn status(s: CalibrationStatus) -> &'static str {
    match s {
        CalibrationStatus::Calibrated => "calibrated",
        CalibrationStatus::Skipped => "skipped",
    }
}

/// Forecasts `values` with the set's horizon; returns a dict with `point`,
/// `lower`, `upper`, `delta_star`, `calibration`, `neighbor_ids`,
/// `neighbor_distances` and `k_truncated`.
#[pyfunction]
#[pyo3(signature = (values, reference_set, config=None, id="target"))]
fn forecast<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    reference_set: &PyReferenceSet,
    config: Option<PyForecastConfig>,
    id: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let set = &reference_set.inner;
    let config = config.map(|c| c.inner).unwrap_or_default();
    let target = TimeSeries::new(id, set.frequency(), values, set.horizon()).map_err(err)?;
    let r = simforecast::forecast(&target, set, &config).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("point", r.point)?;
    out.set_item("lower", r.lower)?;
    out.set_item("upper", r.upper)?;
    out.set_item("delta_star", r.delta_star)?;
    out.set_item("calibration", status(r.calibration))?;
    out.set_item("neighbor_ids", r.neighbor_ids)?;
    out.set_item("neighbor_distances", r.neighbor_distances)?;
    out.set_item("k_truncated", r.k_truncated)?;
    Ok(out)
}

/// `(delta_star, status, [(delta, msis), ...])` for `values`.
#[pyfunction]
#[pyo3(signature = (values, reference_set, config=None))]
fn calibrate_delta(
    values: Vec<f64>,
    reference_set: &PyReferenceSet,
    config: Option<PyForecastConfig>,
) -> PyResult<(f64, &'static str, Vec<(f64, f64)>)> {
    let set = &reference_set.inner;
    let config = config.map(|c| c.inner).unwrap_or_default();
    let target = TimeSeries::new("target", set.frequency(), values, set.horizon()).map_err(err)?;
    let c = simforecast::calibrate_delta(&target, set, &config).map_err(err)?;
    Ok((c.delta_star, status(c.status), c.scores))
}

#[pyfunction]
#[pyo3(signature = (a, b, measure="dtw"))]
fn distance(a: Vec<f64>, b: Vec<f64>, measure: &str) -> PyResult<f64> {
    let m = measure.parse::<DistanceMeasure>().map_err(err)?;
    similarity::distance(m, &a, &b).map_err(err)
}

#[pyfunction]
fn box_cox(values: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
    preprocess::box_cox(&values, lam).map_err(err)
}

#[pyfunction]
fn inverse_box_cox(values: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
    preprocess::inverse_box_cox(&values, lam).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (values, period, lambda_range=(0.0, 1.0)))]
fn guerrero_lambda(values: Vec<f64>, period: usize, lambda_range: (f64, f64)) -> f64 {
    preprocess::guerrero_lambda(&values, period, lambda_range).lambda
}

#[pyfunction]
#[pyo3(signature = (values, period, z=1.645))]
fn seasonality_test(values: Vec<f64>, period: usize, z: f64) -> bool {
    preprocess::seasonality_test(&values, period, z)
}

/// `(trend, seasonal, remainder)`.
#[pyfunction]
fn stl_decompose(values: Vec<f64>, period: usize) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let d = preprocess::stl_decompose(&values, period).map_err(err)?;
    Ok((d.trend, d.seasonal, d.remainder))
}

#[pyfunction]
fn mase(actuals: Vec<f64>, forecasts: Vec<f64>, insample: Vec<f64>, period: usize) -> PyResult<f64> {
    metrics::mase(&actuals, &forecasts, &insample, period).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (actuals, lower, upper, insample, period, alpha=0.05))]
fn msis(
    actuals: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    insample: Vec<f64>,
    period: usize,
    alpha: f64,
) -> PyResult<f64> {
    metrics::msis(&actuals, &lower, &upper, &insample, period, alpha).map_err(err)
}

/// `(coverage, upper_coverage, spread)`.
#[pyfunction]
fn coverage_stats(
    actuals: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    insample: Vec<f64>,
    period: usize,
) -> PyResult<(f64, f64, f64)> {
    let c = metrics::coverage_stats(&actuals, &lower, &upper, &insample, period).map_err(err)?;
    Ok((c.coverage, c.upper_coverage, c.spread))
}

#[pyfunction]
fn forecastability(values: Vec<f64>) -> PyResult<f64> {
    Ok(metrics::forecastability(&values).map_err(err)?.value)
}

/// `{method: (mean_rank, ci_lower, ci_upper)}` from per-series scores.
#[pyfunction]
fn mcb_ranks<'py>(
    py: Python<'py>,
    scores: Vec<(String, Vec<f64>)>,
) -> PyResult<Bound<'py, PyDict>> {
    let ranks = metrics::mcb_ranks(&scores, metrics::McbOptions::default()).map_err(err)?;
    let out = PyDict::new(py);
    for r in ranks {
        out.set_item(r.method, (r.mean_rank, r.ci_lower, r.ci_upper))?;
    }
    Ok(out)
}

/// `[(id, frequency, values, horizon), ...]` from a corpus CSV.
#[pyfunction]
fn read_corpus(path: &str) -> PyResult<Vec<(String, String, Vec<f64>, usize)>> {
    Ok(dataio::read_corpus(path)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.series_id, r.frequency.label(), r.values, r.horizon))
        .collect())
}

#[pyfunction]
fn delta_grid(step: f64) -> Vec<f64> {
    forecaster::delta_grid(step)
}

#[pymodule]
#[pyo3(name = "simforecast")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("SimforecastError", m.py().get_type::<SimforecastError>())?;
    m.add_class::<PyPreprocessConfig>()?;
    m.add_class::<PyForecastConfig>()?;
    m.add_class::<PyReferenceSet>()?;
    m.add_function(wrap_pyfunction!(forecast, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_delta, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(box_cox, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_box_cox, m)?)?;
    m.add_function(wrap_pyfunction!(guerrero_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(seasonality_test, m)?)?;
    m.add_function(wrap_pyfunction!(stl_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(mase, m)?)?;
    m.add_function(wrap_pyfunction!(msis, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_stats, m)?)?;
    m.add_function(wrap_pyfunction!(forecastability, m)?)?;
    m.add_function(wrap_pyfunction!(mcb_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(read_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(delta_grid, m)?)?;
    Ok(())
}
