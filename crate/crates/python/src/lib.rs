//! Python bindings. Structured results come back as plain dicts and lists
//! with the same field names as the JSON bundle files.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use lexatlas::ca::{IncidenceMatrix, DEFAULT_TOLERANCE};
use lexatlas::clique::maximal_cliques as enumerate_maximal;
use lexatlas::ingest::{load_ingest, save_ingest};
use lexatlas::xlink::link_word;
use lexatlas::{CliqueId, IngestConfig, LinkParams, Targets};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

create_exception!(lexatlas_py, AtlasError, PyException, "Integrity, format or numerical failure.");

fn err(e: lexatlas::Error) -> PyErr {
    use lexatlas::Error as E;
    match e {
        E::NotFound(_) | E::UnknownUnit(_) => PyKeyError::new_err(e.to_string()),
        E::InvalidParameter(_) | E::InvalidUnit(_) | E::Config(_) | E::NoSenses => PyValueError::new_err(e.to_string()),
        E::Io(_) => PyOSError::new_err(e.to_string()),
        _ => AtlasError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| AtlasError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

/// A loaded, validated atlas bundle.
#[pyclass(frozen)]
struct Atlas {
    inner: lexatlas::Atlas,
}

#[pymethods]
impl Atlas {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Atlas { inner: lexatlas::load_atlas(&path).map_err(err)? })
    }

    #[getter]
    fn language(&self) -> &str {
        &self.inner.language
    }

    fn __len__(&self) -> usize {
        self.inner.entries.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "<Atlas {} entries={} cliques={}>",
            self.inner.language,
            self.inner.entries.len(),
            self.inner.clique_count()
        )
    }

    /// Entry units as `lemma#POS` strings, sorted.
    fn units(&self) -> Vec<String> {
        self.inner.entries.keys().map(|u| u.to_string()).collect()
    }

    /// Map and cliques of `lemma#POS` or a bare lemma; `None` if absent.
    fn query(&self, py: Python<'_>, unit: &str) -> PyResult<Option<Py<PyAny>>> {
        let Some(u) = self.inner.resolve(unit) else { return Ok(None) };
        let Some(view) = lexatlas::query_word(&self.inner, &u).map_err(err)? else { return Ok(None) };
        let d = PyDict::new(py);
        d.set_item("target", view.target.to_string())?;
        d.set_item("map", to_py(py, view.map)?)?;
        d.set_item("cliques", to_py(py, &view.cliques)?)?;
        Ok(Some(d.into_any().unbind()))
    }

    /// `(sentence_id, text)` pairs supporting a clique.
    fn sentences(&self, clique_id: &str) -> PyResult<Vec<(String, String)>> {
        let rows = lexatlas::sentences_for_clique(&self.inner, &CliqueId(clique_id.to_string())).map_err(err)?;
        Ok(rows.into_iter().map(|(id, text)| (id.to_string(), text)).collect())
    }
}

/// Bilingual dictionary read from `source<TAB>target` lines.
#[pyclass(frozen)]
struct Dictionary {
    inner: lexatlas::BilingualDictionary,
}

#[pymethods]
impl Dictionary {
    #[staticmethod]
    fn load(path: PathBuf, source_lang: &str, target_lang: &str) -> PyResult<Self> {
        let file = File::open(&path).map_err(|e| PyOSError::new_err(format!("{}: {e}", path.display())))?;
        let inner = lexatlas::load_dictionary(BufReader::new(file), source_lang, target_lang).map_err(err)?;
        Ok(Dictionary { inner })
    }

    fn translations(&self, key: &str) -> Vec<String> {
        self.inner.translations(key).map(|s| s.iter().cloned().collect()).unwrap_or_default()
    }

    fn inverse(&self) -> Self {
        Dictionary { inner: self.inner.inverse() }
    }

    fn __len__(&self) -> usize {
        self.inner.translation_count()
    }
}

/// Parses CoNLL-U files, writes an ingest bundle to `out`, returns the
/// lexicon statistics.
#[pyfunction]
#[pyo3(signature = (files, lang, out, lemmatize_nouns = true, lemmatize_verbs = true))]
fn ingest(
    py: Python<'_>,
    files: Vec<PathBuf>,
    lang: &str,
    out: PathBuf,
    lemmatize_nouns: bool,
    lemmatize_verbs: bool,
) -> PyResult<Py<PyAny>> {
    let cfg = IngestConfig { lemmatize_nouns, lemmatize_verbs, ..Default::default() };
    let result = py.detach(|| lexatlas::ingest(&files, lang, &cfg)).map_err(err)?;
    save_ingest(&result, &out).map_err(err)?;
    to_py(py, &result.stats)
}

/// Builds an atlas from an ingest bundle, optionally for selected units
/// only, and returns the build report.
#[pyfunction]
#[pyo3(signature = (ingest_dir, out, targets = None))]
fn build(py: Python<'_>, ingest_dir: PathBuf, out: PathBuf, targets: Option<Vec<String>>) -> PyResult<Py<PyAny>> {
    let data = load_ingest(&ingest_dir).map_err(err)?;
    let targets = match targets {
        None => Targets::All,
        Some(list) => Targets::Units(list.iter().map(|t| t.parse()).collect::<Result<_, _>>().map_err(err)?),
    };
    let atlas = py.detach(|| lexatlas::build_atlas(&data.table, &data.sentences, &targets, &Default::default()));
    lexatlas::save_atlas(&atlas, &out).map_err(err)?;
    to_py(py, &atlas.report)
}

/// Scored sense links from `word` in `source` to `target`.
#[pyfunction]
#[pyo3(signature = (source, target, dictionary, word, theta = 0.5, min_overlap = 3))]
fn link(
    py: Python<'_>,
    source: &Atlas,
    target: &Atlas,
    dictionary: &Dictionary,
    word: &str,
    theta: f64,
    min_overlap: usize,
) -> PyResult<Py<PyAny>> {
    let params = LinkParams { theta, overlap_min: min_overlap };
    let links = link_word(&source.inner, word, &target.inner, &dictionary.inner, &params).map_err(err)?;
    to_py(py, &links)
}

/// Target-language sentences reached from one source clique through its
/// accepted links.
#[pyfunction]
#[pyo3(signature = (source, target, dictionary, clique_id, theta = 0.5, min_overlap = 3))]
fn cross_navigate(
    py: Python<'_>,
    source: &Atlas,
    target: &Atlas,
    dictionary: &Dictionary,
    clique_id: &str,
    theta: f64,
    min_overlap: usize,
) -> PyResult<Py<PyAny>> {
    let params = LinkParams { theta, overlap_min: min_overlap };
    let id = CliqueId(clique_id.to_string());
    let groups =
        lexatlas::cross_navigate(&source.inner, &id, &target.inner, &dictionary.inner, &params).map_err(err)?;
    to_py(py, &groups)
}

/// Maximal cliques of an undirected graph on vertices `0..n`.
#[pyfunction]
#[pyo3(signature = (n, edges, budget = 100_000))]
fn maximal_cliques(n: usize, edges: Vec<(usize, usize)>, budget: usize) -> PyResult<Vec<Vec<usize>>> {
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(PyValueError::new_err(format!("edge ({a}, {b}) out of range for {n} vertices")));
    }
    enumerate_maximal(n, &edges, budget).map_err(err)
}

/// Correspondence analysis of a 0/1 matrix given as a list of rows.
#[pyfunction]
#[pyo3(signature = (rows, tolerance = DEFAULT_TOLERANCE))]
fn correspondence_analysis(py: Python<'_>, rows: Vec<Vec<u8>>, tolerance: f64) -> PyResult<Py<PyAny>> {
    let m = IncidenceMatrix::from_dense(&rows).map_err(err)?;
    let map = lexatlas::correspondence_analysis(&m, tolerance).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("row_coords", &map.clique_coords)?;
    d.set_item("col_coords", &map.context_coords)?;
    d.set_item("inertias", &map.inertias)?;
    d.set_item("total_inertia", map.total_inertia)?;
    d.set_item("singular_values", map.singular_values())?;
    Ok(d.into_any().unbind())
}

#[pymodule]
fn lexatlas_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Atlas>()?;
    m.add_class::<Dictionary>()?;
    m.add_function(wrap_pyfunction!(ingest, m)?)?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(link, m)?)?;
    m.add_function(wrap_pyfunction!(cross_navigate, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_cliques, m)?)?;
    m.add_function(wrap_pyfunction!(correspondence_analysis, m)?)?;
    m.add("AtlasError", m.py().get_type::<AtlasError>())?;
    Ok(())
}
