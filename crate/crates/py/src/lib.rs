//! Python bindings for the projection engine.
//!
//! Fluents and times use the same S-expression text as the input files.
//! Intervals come back as `(start, end)` tuples of ISO dates.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tproj_core::corpus::{parse_fluent_text, parse_queries, parse_time_text};
use tproj_core::eval;
use tproj_core::hazard::{self, CovariateTrajectory, FluentPattern};
use tproj_core::learner::{self, FitConfig};
use tproj_core::sexpr::parse_one;
use tproj_core::world::{self, WorldConfig};
use tproj_core::{Fluent, Mode, Projector, TimeInterval, TimePoint};

type Span = (String, String);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn span(iv: TimeInterval) -> Span {
    (iv.start().to_string(), iv.end().to_string())
}

fn fluent(text: &str) -> PyResult<Fluent> {
    parse_fluent_text(text).map_err(value_err)
}

fn time(text: &str) -> PyResult<TimeInterval> {
    parse_time_text(text).map_err(value_err)
}

fn date(text: &str) -> PyResult<TimePoint> {
    let iv = time(text)?;
    if iv.start() != iv.end() {
        return Err(PyValueError::new_err(format!("{text} is not a single date")));
    }
    Ok(iv.start())
}

fn pattern(text: &str) -> PyResult<FluentPattern> {
    FluentPattern::from_sexpr(&parse_one(text).map_err(value_err)?).map_err(value_err)
}

/// A loaded knowledge base with its events and hazard specs.
#[pyclass(name = "Corpus", module = "tproj", frozen)]
struct PyCorpus {
    inner: tproj_core::Corpus,
}

#[pymethods]
impl PyCorpus {
    /// Loads every file in order; kind is taken from the file contents.
    #[staticmethod]
    fn from_files(paths: Vec<PathBuf>) -> PyResult<Self> {
        let inner = tproj_core::Corpus::from_files(&paths).map_err(value_err)?;
        Ok(PyCorpus { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (*texts))]
    fn from_str(texts: Vec<String>) -> PyResult<Self> {
        let named: Vec<(String, &str)> = texts.iter().enumerate().map(|(i, t)| (format!("<text {i}>"), t.as_str())).collect();
        let refs: Vec<(&str, &str)> = named.iter().map(|(n, t)| (n.as_str(), *t)).collect();
        let inner = tproj_core::Corpus::from_texts(&refs).map_err(value_err)?;
        Ok(PyCorpus { inner })
    }

    /// Returns `(verdict, interval or None, source or None)`.
    #[pyo3(signature = (fluent_text, at, mode = "m2", alpha = 0.5))]
    fn ask(&self, fluent_text: &str, at: &str, mode: &str, alpha: f64) -> PyResult<(String, Option<Span>, Option<String>)> {
        let f = fluent(fluent_text)?;
        let q = time(at)?;
        let mode: Mode = mode.parse().map_err(value_err)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(PyValueError::new_err(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        self.inner.check_symbols(&f).map_err(PyValueError::new_err)?;
        let a = Projector::new(&self.inner).answer(&f, &q, mode, alpha);
        let source = a.interval.map(|_| a.projected.map_or_else(|| "known".to_string(), |s| s.to_string()));
        Ok((a.verdict.to_string(), a.interval.map(span), source))
    }

    /// Runs the projection procedure; returns a dict with `interval`,
    /// `source`, `truncated` and `trace`.
    #[pyo3(signature = (fluent_text, at, alpha = 0.5))]
    fn project<'py>(&self, py: Python<'py>, fluent_text: &str, at: &str, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = Projector::new(&self.inner)
            .temporally_project(&fluent(fluent_text)?, &time(at)?, alpha)
            .map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("interval", r.interval.map(span))?;
        d.set_item("source", r.source.map(|s| s.to_string()))?;
        d.set_item("truncated", r.truncated)?;
        d.set_item("trace", r.trace)?;
        Ok(d)
    }

    fn prob(&self, fluent_text: &str, at: &str) -> PyResult<f64> {
        Projector::new(&self.inner)
            .prob_holds(&fluent(fluent_text)?, date(at)?)
            .map_err(value_err)
    }

    fn holds_known(&self, fluent_text: &str, at: &str) -> PyResult<bool> {
        Ok(self.inner.kb.holds_known(&fluent(fluent_text)?, &time(at)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Corpus(assertions={}, hazard_specs={})",
            self.inner.kb.assertions().len(),
            self.inner.hazards.specs().count()
        )
    }
}

/// A discrete-time hazard spec.
#[pyclass(name = "HazardSpec", module = "tproj", frozen)]
struct PyHazardSpec {
    inner: hazard::HazardSpec,
}

#[pymethods]
impl PyHazardSpec {
    /// Parses one `(hazard ...)` form.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let e = parse_one(text).map_err(value_err)?;
        let inner = hazard::HazardSpec::from_sexpr(&e).map_err(value_err)?;
        Ok(PyHazardSpec { inner })
    }

    #[getter]
    fn period_days(&self) -> i64 {
        self.inner.period_days
    }

    #[pyo3(signature = (j, x = Vec::new()))]
    fn hazard_at(&self, j: u32, x: Vec<bool>) -> PyResult<f64> {
        hazard::hazard_at(&self.inner, j, &x).map_err(value_err)
    }

    /// `rows[j - 1]` are the covariate indicators for period `j`.
    #[pyo3(signature = (k, rows = Vec::new()))]
    fn survival(&self, k: u32, rows: Vec<Vec<bool>>) -> PyResult<f64> {
        hazard::survival(&self.inner, k, &CovariateTrajectory::from_rows(rows)).map_err(value_err)
    }

    #[pyo3(signature = (k, rows = Vec::new()))]
    fn event_time_pmf(&self, k: u32, rows: Vec<Vec<bool>>) -> PyResult<f64> {
        hazard::event_time_pmf(&self.inner, k, &CovariateTrajectory::from_rows(rows)).map_err(value_err)
    }

    #[pyo3(signature = (start, alpha = 0.5, horizon = 200))]
    fn forward_interval(&self, start: &str, alpha: f64, horizon: u32) -> PyResult<Span> {
        hazard::forward_interval(&self.inner, date(start)?, &CovariateTrajectory::none(), alpha, horizon)
            .map(span)
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        self.inner.to_string()
    }
}

/// Fits a hazard spec to episode CSV text. Returns a dict with the fitted
/// per-period hazards, coefficients, diagnostics and the exported spec text.
#[pyfunction]
#[pyo3(signature = (episodes_csv, pattern_text, period_days = 365, covariates = Vec::new(), pool = true, force = false))]
fn fit_episodes<'py>(
    py: Python<'py>,
    episodes_csv: &str,
    pattern_text: &str,
    period_days: i64,
    covariates: Vec<String>,
    pool: bool,
    force: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let eps = learner::read_episodes(episodes_csv.as_bytes(), "<episodes>").map_err(value_err)?;
    let records = learner::build_person_period(&eps, period_days).map_err(value_err)?;
    let cfg = FitConfig {
        pool_sparse: pool,
        ..FitConfig::default()
    };
    let fit = learner::fit(&records, &cfg).map_err(value_err)?;
    let covs = covariates.iter().map(|c| pattern(c)).collect::<PyResult<Vec<_>>>()?;
    let spec = learner::export_spec(&fit, pattern(pattern_text)?, period_days, &covs, force).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("hazards", (1..=fit.n_periods()).map(|j| fit.period_hazard(j)).collect::<Vec<_>>())?;
    d.set_item("beta", fit.beta.clone())?;
    d.set_item("at_risk", fit.at_risk.clone())?;
    d.set_item("events", fit.events.clone())?;
    d.set_item("log_likelihood", fit.log_likelihood)?;
    d.set_item("converged", fit.converged)?;
    d.set_item("separation", fit.separation)?;
    d.set_item("spec", spec.to_string())?;
    Ok(d)
}

/// Generates a synthetic world; returns file name to contents, and writes
/// the files when `out` is given.
#[pyfunction]
#[pyo3(signature = (seed = 42, individuals = 1000, density = 0.3, event_density = 0.5, queries_per_set = 200, out = None))]
fn generate_world(
    seed: u64,
    individuals: usize,
    density: f64,
    event_density: f64,
    queries_per_set: usize,
    out: Option<PathBuf>,
) -> PyResult<BTreeMap<String, String>> {
    let cfg = WorldConfig {
        seed,
        n_individuals: individuals,
        observation_density: density,
        event_density,
        queries_per_set,
        ..WorldConfig::default()
    };
    let w = world::generate(&cfg).map_err(value_err)?;
    if let Some(dir) = out {
        w.write_dir(&dir).map_err(|e| PyIOError::new_err(e.to_string()))?;
    }
    Ok(w.files().into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Scores a world directory written by `generate_world`; returns the
/// report CSV text.
#[pyfunction]
#[pyo3(signature = (world_dir, alpha = 0.5))]
fn run_eval(py: Python<'_>, world_dir: PathBuf, alpha: f64) -> PyResult<String> {
    let read = |name: &str| std::fs::read_to_string(world_dir.join(name)).map_err(|e| PyIOError::new_err(format!("{name}: {e}")));
    let corpus = tproj_core::Corpus::from_files(&[
        world_dir.join(world::KB_FILE),
        world_dir.join(world::EVENTS_FILE),
        world_dir.join(world::HAZARDS_FILE),
    ])
    .map_err(value_err)?;
    let queries = parse_queries(&read(world::QUERIES_FILE)?, world::QUERIES_FILE).map_err(value_err)?;
    let answers = eval::read_answers(&read(world::ANSWERS_FILE)?, world::ANSWERS_FILE).map_err(value_err)?;
    let report = py
        .detach(|| eval::run_eval(&corpus, &queries, &answers, &[Mode::M1, Mode::M2], alpha))
        .map_err(value_err)?;
    Ok(report.report_csv())
}

#[pymodule]
fn tproj(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyHazardSpec>()?;
    m.add_function(wrap_pyfunction!(fit_episodes, m)?)?;
    m.add_function(wrap_pyfunction!(generate_world, m)?)?;
    m.add_function(wrap_pyfunction!(run_eval, m)?)?;
    Ok(())
}
