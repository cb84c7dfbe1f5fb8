//! Python bindings: `import narrex`.

use std::path::{Path, PathBuf};

use narrex_core::analysis::LocationHierarchy;
use narrex_core::corpus;
use narrex_core::preprocess::{self, Abbreviations};
use narrex_core::{
    Engine, EngineConfig, FactRecord, Lexicon, ModifierNode, SemanticRole,
};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: narrex_core::Error) -> PyErr {
    match e {
        narrex_core::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A location, modifier or attribute attached to a fact, with its own nested children.
#[pyclass(name = "Modifier", frozen, from_py_object)]
#[derive(Clone)]
struct PyModifier {
    #[pyo3(get)]
    text: String,
    #[pyo3(get)]
    codes: Vec<String>,
    #[pyo3(get)]
    role: String,
    #[pyo3(get)]
    presence: String,
    #[pyo3(get)]
    children: Vec<PyModifier>,
}

impl From<&ModifierNode> for PyModifier {
    fn from(n: &ModifierNode) -> Self {
        PyModifier {
            text: n.text.clone(),
            codes: n.codes.iter().cloned().collect(),
            role: n.role.to_string(),
            presence: n.presence.to_string(),
            children: n.children.iter().map(PyModifier::from).collect(),
        }
    }
}

#[pymethods]
impl PyModifier {
    fn __repr__(&self) -> String {
        format!("Modifier({:?}, role={:?}, children={})", self.text, self.role, self.children.len())
    }
}

#[pyclass(name = "FactRecord", frozen)]
struct PyFactRecord {
    inner: FactRecord,
}

#[pymethods]
impl PyFactRecord {
    #[getter]
    fn note_id(&self) -> &str {
        &self.inner.note_id
    }

    #[getter]
    fn sentence_index(&self) -> usize {
        self.inner.sentence_index
    }

    #[getter]
    fn text(&self) -> &str {
        &self.inner.text
    }

    #[getter]
    fn codes(&self) -> Vec<String> {
        self.inner.codes.iter().cloned().collect()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn presence(&self) -> String {
        self.inner.presence.to_string()
    }

    #[getter]
    fn experiencer(&self) -> String {
        self.inner.experiencer.to_string()
    }

    #[getter]
    fn ignored(&self) -> bool {
        self.inner.ignored
    }

    #[getter]
    fn synthetic(&self) -> bool {
        self.inner.synthetic
    }

    /// Character offsets `(start, end)` into the note.
    #[getter]
    fn span(&self) -> (usize, usize) {
        (self.inner.span.start, self.inner.span.end)
    }

    #[getter]
    fn modifiers(&self) -> Vec<PyModifier> {
        self.inner.modifiers.iter().map(PyModifier::from).collect()
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        FactRecord::from_json(line)
            .map(|inner| PyFactRecord { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("FactRecord({:?})", self.inner.render())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Phrase dictionary: phrase -> (codes, role).
#[pyclass(name = "Lexicon")]
struct PyLexicon {
    inner: Lexicon,
}

#[pymethods]
impl PyLexicon {
    /// `base=True` starts from the built-in grammatical words and cues.
    #[new]
    #[pyo3(signature = (base = true))]
    fn new(base: bool) -> Self {
        PyLexicon {
            inner: if base { Lexicon::base() } else { Lexicon::new() },
        }
    }

    fn add_phrase(&mut self, phrase: &str, code: &str, role: &str) -> PyResult<()> {
        let role: SemanticRole = role.parse().map_err(to_py_err)?;
        self.inner.add_phrase(phrase, code, role).map_err(to_py_err)
    }

    fn load_terms(&mut self, path: PathBuf) -> PyResult<()> {
        self.inner.load_term_file(path).map_err(to_py_err)
    }

    fn load_terms_str(&mut self, text: &str) -> PyResult<()> {
        self.inner
            .load_terms_str(text, Path::new("<python>"))
            .map_err(to_py_err)
    }

    /// `(codes, role)` for an exact phrase, or None.
    fn lookup(&self, phrase: &str) -> Option<(Vec<String>, String)> {
        let tokens: Vec<String> = preprocess::tokenize_str(phrase, 0, 0)
            .into_iter()
            .map(|t| t.text)
            .collect();
        self.inner
            .lookup(tokens.iter())
            .map(|p| (p.codes.iter().cloned().collect(), p.role.to_string()))
    }

    fn export_tsv(&self) -> String {
        self.inner.export_tsv()
    }

    fn __len__(&self) -> usize {
        self.inner.term_count()
    }
}

/// Dictionary plus analyzer pipeline. Immutable and safe to share between threads.
#[pyclass(name = "Engine", frozen)]
struct PyEngine {
    inner: Engine,
}

#[pymethods]
impl PyEngine {
    /// `dictionaries`: term files; `terms`: term-file text; `config`: TOML text with a
    /// `[pipeline]` table; `hierarchy` / `abbreviations`: file paths.
    #[new]
    #[pyo3(signature = (dictionaries = Vec::new(), terms = None, config = None, hierarchy = None, abbreviations = None))]
    fn new(
        dictionaries: Vec<PathBuf>,
        terms: Option<String>,
        config: Option<&str>,
        hierarchy: Option<PathBuf>,
        abbreviations: Option<PathBuf>,
    ) -> PyResult<Self> {
        let mut builder = Engine::builder();
        for d in dictionaries {
            builder = builder.term_file(d);
        }
        if let Some(t) = terms {
            builder = builder.terms(t);
        }
        if let Some(c) = config {
            builder = builder.config(EngineConfig::parse(c).map_err(to_py_err)?);
        }
        if let Some(h) = hierarchy {
            builder = builder.hierarchy(LocationHierarchy::load(h).map_err(to_py_err)?);
        }
        if let Some(a) = abbreviations {
            builder = builder.abbreviations(Abbreviations::load(a).map_err(to_py_err)?);
        }
        Ok(PyEngine {
            inner: builder.build().map_err(to_py_err)?,
        })
    }

    /// Engine over the bundled sample dictionary and location hierarchy.
    #[staticmethod]
    fn with_fixture() -> PyResult<Self> {
        let inner = Engine::builder()
            .terms(corpus::FIXTURE_TERMS)
            .hierarchy(corpus::fixture_hierarchy())
            .build()
            .map_err(to_py_err)?;
        Ok(PyEngine { inner })
    }

    fn process_note(&self, py: Python<'_>, note_id: &str, text: &str) -> Vec<PyFactRecord> {
        py.detach(|| self.inner.process_note(note_id, text))
            .into_iter()
            .map(|inner| PyFactRecord { inner })
            .collect()
    }

    /// Process `(id, text)` pairs; the GIL is released meanwhile.
    fn process_notes(&self, py: Python<'_>, notes: Vec<(String, String)>) -> Vec<Vec<PyFactRecord>> {
        py.detach(|| {
            notes
                .iter()
                .map(|(id, text)| self.inner.process_note(id, text))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .map(|records| records.into_iter().map(|inner| PyFactRecord { inner }).collect())
        .collect()
    }

    fn render(&self, text: &str) -> Vec<String> {
        self.inner
            .process_note("", text)
            .iter()
            .map(FactRecord::render)
            .collect()
    }

    #[getter]
    fn term_count(&self) -> usize {
        self.inner.lexicon().term_count()
    }

    #[getter]
    fn analyzers(&self) -> Vec<String> {
        self.inner
            .pipeline()
            .analyzers()
            .iter()
            .map(|a| a.name().to_string())
            .collect()
    }
}

/// `(start, end, raw)` character spans of the sentences of `note`.
#[pyfunction]
fn split_sentences(note: &str) -> Vec<(usize, usize, String)> {
    preprocess::split_sentences(note, &Abbreviations::default())
        .into_iter()
        .map(|s| (s.span.start, s.span.end, s.raw))
        .collect()
}

/// Normalized tokens of `text`.
#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    preprocess::tokenize_str(text, 0, 0)
        .into_iter()
        .map(|t| t.text)
        .collect()
}

/// Seeded synthetic notes as `(id, text)` pairs.
#[pyfunction]
#[pyo3(signature = (n_notes, seed = 7))]
fn generate_corpus(n_notes: usize, seed: u64) -> Vec<(String, String)> {
    corpus::generate_synthetic_corpus(n_notes, seed)
        .into_iter()
        .map(|n| (n.id, n.text))
        .collect()
}

/// The bundled sample term file, as text.
#[pyfunction]
fn fixture_terms() -> &'static str {
    corpus::FIXTURE_TERMS
}

#[pymodule]
fn narrex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEngine>()?;
    m.add_class::<PyFactRecord>()?;
    m.add_class::<PyModifier>()?;
    m.add_class::<PyLexicon>()?;
    m.add_function(wrap_pyfunction!(split_sentences, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(generate_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_terms, m)?)?;
    Ok(())
}
