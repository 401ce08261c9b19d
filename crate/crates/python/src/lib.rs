use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dynsel::data::{
    apply_standardizer, fit_standardizer, generate_synthetic, ingest_csv, stratified_split,
    write_csv, LabelColumn, SyntheticKind,
};
use dynsel::evaluation::{friedman_ranks, sign_test_critical as critical, Alpha, ResultsTable};
use dynsel::hardness::{kdn as kdn_value, profile_self, HybridClassifier, Route};
use dynsel::harness::{run_experiment as run, ExperimentConfig};
use dynsel::pool::bagging_generate;
use dynsel::{
    ClassifierPool, Dataset, DynamicSelector, Error, PerceptronParams, RuleParams, SplitSpec,
    Technique,
};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse()
        .map_err(|e: T::Err| PyValueError::new_err(e.to_string()))
}

/// Labelled feature matrix with dense class indices.
#[pyclass(name = "Dataset", module = "dynsel", frozen)]
struct PyDataset {
    inner: Dataset,
}

impl PyDataset {
    fn wrap(inner: Dataset) -> Self {
        PyDataset { inner }
    }
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (rows, labels, class_count = None, name = "data"))]
    fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_count: Option<usize>,
        name: &str,
    ) -> PyResult<Self> {
        let m = class_count.unwrap_or_else(|| labels.iter().max().map_or(0, |l| l + 1));
        Dataset::new(name, rows, labels, m)
            .map(Self::wrap)
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (path, label = "class"))]
    fn from_csv(path: PathBuf, label: &str) -> PyResult<Self> {
        let label: LabelColumn = parse(label)?;
        ingest_csv(path, &label)
            .map(|i| Self::wrap(i.dataset))
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (kind, n = 1000, noise = 0.1, seed = 0))]
    fn synthetic(kind: &str, n: usize, noise: f64, seed: u64) -> PyResult<Self> {
        let kind: SyntheticKind = parse(kind)?;
        generate_synthetic(kind, n, noise, seed)
            .map(Self::wrap)
            .map_err(py_err)
    }

    fn to_csv(&self, path: PathBuf) -> PyResult<()> {
        write_csv(&self.inner, path).map_err(py_err)
    }

    /// Stratified train/DSEL/test partitions for one replication.
    #[pyo3(signature = (seed, replication = 0, train = 0.25, dsel = 0.5, test = 0.25))]
    fn split(
        &self,
        seed: u64,
        replication: usize,
        train: f64,
        dsel: f64,
        test: f64,
    ) -> PyResult<(Self, Self, Self)> {
        let spec = SplitSpec {
            train_fraction: train,
            dsel_fraction: dsel,
            test_fraction: test,
            seed,
            ..SplitSpec::default()
        };
        let p = stratified_split(&self.inner, &spec, replication).map_err(py_err)?;
        Ok((Self::wrap(p.train), Self::wrap(p.dsel), Self::wrap(p.test)))
    }

    /// Z-scores `self` and every dataset in `others` with statistics fitted on `self`.
    fn standardize(&self, others: Vec<PyRef<'_, PyDataset>>) -> PyResult<Vec<Self>> {
        let stats = fit_standardizer(&self.inner).map_err(py_err)?;
        std::iter::once(&self.inner)
            .chain(others.iter().map(|d| &d.inner))
            .map(|d| {
                apply_standardizer(&stats, d)
                    .map(Self::wrap)
                    .map_err(py_err)
            })
            .collect()
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    #[getter]
    fn class_count(&self) -> usize {
        self.inner.class_count()
    }

    #[getter]
    fn class_names(&self) -> Vec<String> {
        self.inner.class_names().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<usize> {
        self.inner.labels().to_vec()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows().map(<[f64]>::to_vec).collect()
    }

    fn class_counts(&self) -> Vec<usize> {
        self.inner.class_counts()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(name={:?}, n={}, features={}, classes={})",
            self.inner.name(),
            self.inner.len(),
            self.inner.n_features(),
            self.inner.class_count()
        )
    }
}

/// Bagged perceptron pool.
#[pyclass(name = "Pool", module = "dynsel", frozen)]
struct PyPool {
    inner: ClassifierPool,
}

#[pymethods]
impl PyPool {
    #[staticmethod]
    #[pyo3(signature = (train, size = 100, seed = 0, learning_rate = 1.0, epochs = 100))]
    fn bagging(
        py: Python<'_>,
        train: PyRef<'_, PyDataset>,
        size: usize,
        seed: u64,
        learning_rate: f64,
        epochs: usize,
    ) -> PyResult<Self> {
        let params = PerceptronParams {
            learning_rate,
            epochs,
        };
        let train = &train.inner;
        py.detach(|| bagging_generate(train, size, &params, seed))
            .map(|inner| PyPool { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        ClassifierPool::load_json(path)
            .map(|inner| PyPool { inner })
            .map_err(py_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_json(path).map_err(py_err)
    }

    /// Every member's prediction for one row.
    fn predict_all(&self, row: Vec<f64>) -> PyResult<Vec<usize>> {
        if row.len() != self.inner.n_features() {
            return Err(PyValueError::new_err(format!(
                "expected {} features, got {}",
                self.inner.n_features(),
                row.len()
            )));
        }
        Ok(self.inner.predict_all(&row))
    }

    #[getter]
    fn degenerate_bags(&self) -> Vec<usize> {
        self.inner.degenerate_bags.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// A pool plus DSEL, ready to classify queries with any rule.
#[pyclass(name = "Selector", module = "dynsel", frozen)]
struct PySelector {
    inner: DynamicSelector,
}

#[pymethods]
impl PySelector {
    #[new]
    #[pyo3(signature = (pool, dsel, k = 7, mcb_threshold = 0.7, selection_margin = 0.0, n_frac = 0.5, j_frac = 0.3, clusters = 5))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        pool: PyRef<'_, PyPool>,
        dsel: PyRef<'_, PyDataset>,
        k: usize,
        mcb_threshold: f64,
        selection_margin: f64,
        n_frac: f64,
        j_frac: f64,
        clusters: usize,
    ) -> PyResult<Self> {
        let params = RuleParams {
            k,
            mcb_threshold,
            selection_margin,
            n_frac,
            j_frac,
            clusters,
        };
        DynamicSelector::new(pool.inner.clone(), dsel.inner.clone(), params)
            .map(|inner| PySelector { inner })
            .map_err(py_err)
    }

    /// Full outcome for one query: label, selected members, competences, fallback flag.
    fn classify<'py>(
        &self,
        py: Python<'py>,
        technique: &str,
        query: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let technique: Technique = parse(technique)?;
        let out = self.inner.classify(technique, &query).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("label", out.predicted_label)?;
        d.set_item("selected", out.selected)?;
        d.set_item("competence", out.competence.values)?;
        d.set_item("fallback_used", out.fallback_used)?;
        Ok(d)
    }

    fn predict(
        &self,
        py: Python<'_>,
        technique: &str,
        queries: PyRef<'_, PyDataset>,
    ) -> PyResult<Vec<usize>> {
        let technique: Technique = parse(technique)?;
        let queries = &queries.inner;
        py.detach(|| {
            queries
                .rows()
                .map(|q| self.inner.predict(technique, q))
                .collect::<dynsel::Result<Vec<_>>>()
        })
        .map_err(py_err)
    }
}

/// Identifiers accepted wherever a technique is named.
#[pyfunction]
fn techniques() -> Vec<&'static str> {
    Technique::ALL.iter().map(Technique::key).collect()
}

/// kDN of a labelled query against `reference`.
#[pyfunction]
#[pyo3(signature = (query, label, reference, k = 7))]
fn kdn(query: Vec<f64>, label: usize, reference: PyRef<'_, PyDataset>, k: usize) -> PyResult<f64> {
    kdn_value(&query, label, &reference.inner, k).map_err(py_err)
}

/// Leave-one-out kDN of every row of `data`.
#[pyfunction]
#[pyo3(signature = (data, k = 7))]
fn kdn_profile(data: PyRef<'_, PyDataset>, k: usize) -> PyResult<Vec<f64>> {
    profile_self(&data.inner, k)
        .map(|p| p.values())
        .map_err(py_err)
}

/// Routes each query to K-NN or to `technique` by neighbourhood hardness.
/// Returns the labels and the route names ("knn" or "ds").
#[pyfunction]
#[pyo3(signature = (selector, reference, queries, threshold = 0.4, technique = "knora-u", k = 7))]
fn hybrid_predict(
    py: Python<'_>,
    selector: PyRef<'_, PySelector>,
    reference: PyRef<'_, PyDataset>,
    queries: PyRef<'_, PyDataset>,
    threshold: f64,
    technique: &str,
    k: usize,
) -> PyResult<(Vec<usize>, Vec<&'static str>)> {
    let technique: Technique = parse(technique)?;
    let hybrid =
        HybridClassifier::new(threshold, technique, reference.inner.clone(), k).map_err(py_err)?;
    let (selector, queries) = (&selector.inner, &queries.inner);
    let (labels, routes, _) = py
        .detach(|| hybrid.classify_batch(queries, selector))
        .map_err(py_err)?;
    let routes = routes
        .into_iter()
        .map(|r| match r {
            Route::Knn => "knn",
            Route::Ds => "ds",
        })
        .collect();
    Ok((labels, routes))
}

/// Average Friedman rank per technique; `accuracy[dataset][technique]` in percent.
#[pyfunction]
fn average_ranks(techniques: Vec<String>, accuracy: Vec<Vec<f64>>) -> PyResult<Vec<(String, f64)>> {
    let datasets = (0..accuracy.len()).map(|i| format!("d{i}")).collect();
    let std = accuracy.iter().map(|r| vec![0.0; r.len()]).collect();
    let table = ResultsTable::new(datasets, techniques, accuracy, std).map_err(py_err)?;
    let ranks = friedman_ranks(&table).map_err(py_err)?;
    Ok(ranks
        .into_iter()
        .map(|r| (r.technique, r.average_rank))
        .collect())
}

/// Wins needed out of `n_exp` comparisons for significance at `alpha` (0.10, 0.05 or 0.01).
#[pyfunction]
#[pyo3(signature = (n_exp, alpha = 0.05))]
fn sign_test_critical(n_exp: usize, alpha: f64) -> PyResult<usize> {
    let alpha = Alpha::try_from(alpha).map_err(py_err)?;
    critical(n_exp, alpha).map_err(py_err)
}

/// Built-in config as TOML text.
#[pyfunction]
#[pyo3(signature = (preset = "desk", data_dir = "data"))]
fn preset_config(preset: &str, data_dir: &str) -> PyResult<String> {
    let cfg = match preset {
        "desk" => ExperimentConfig::desk(data_dir),
        "full" => ExperimentConfig::full(data_dir),
        other => return Err(PyValueError::new_err(format!("unknown preset `{other}`"))),
    };
    cfg.to_toml_string().map_err(py_err)
}

/// Runs a sweep from TOML text and returns the report as JSON.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_toml_str(config).map_err(py_err)?;
    py.detach(|| run(&cfg).and_then(|r| r.to_json()))
        .map_err(py_err)
}

#[pymodule]
#[pyo3(name = "dynsel")]
fn dynsel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyPool>()?;
    m.add_class::<PySelector>()?;
    m.add_function(wrap_pyfunction!(techniques, m)?)?;
    m.add_function(wrap_pyfunction!(kdn, m)?)?;
    m.add_function(wrap_pyfunction!(kdn_profile, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_predict, m)?)?;
    m.add_function(wrap_pyfunction!(average_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(sign_test_critical, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
