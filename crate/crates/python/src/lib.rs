use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use freeknot::explore::{self, Mode, Verdict};
use freeknot::moves::{enumerate_moves, MoveLimits};
use freeknot::{Conjugacy, Letter};

fn py_err(e: freeknot::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "long" => Ok(Mode::Long),
        "free" => Ok(Mode::Free),
        other => Err(PyValueError::new_err(format!("mode must be 'long' or 'free', got {other:?}"))),
    }
}

fn parse_word(m: usize, letters: Vec<String>) -> PyResult<freeknot::Word> {
    let letters = letters.iter().map(|s| s.parse::<Letter>()).collect::<Result<Vec<_>, _>>().map_err(py_err)?;
    freeknot::Word::new(m, letters).map_err(py_err)
}

fn word_tokens(w: &freeknot::Word) -> Vec<String> {
    w.letters().iter().map(Letter::to_string).collect()
}

/// Based chord diagram, built from a Gauss code.
#[pyclass(name = "ChordDiagram", module = "freeknot_py", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyChordDiagram(freeknot::ChordDiagram);

#[pymethods]
impl PyChordDiagram {
    #[new]
    #[pyo3(signature = (gauss = ""))]
    fn new(gauss: &str) -> PyResult<Self> {
        freeknot::ChordDiagram::parse_gauss_code(gauss).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_chords(chords: Vec<(usize, usize)>) -> PyResult<Self> {
        freeknot::ChordDiagram::new(chords).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn chords(&self) -> Vec<(usize, usize)> {
        self.0.chords().iter().map(|c| (c.p, c.q)).collect()
    }

    fn gauss(&self) -> String {
        self.0.serialize()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn rotate(&self, steps: i64) -> Self {
        Self(self.0.rotate(steps))
    }

    /// Letter tokens of the word at depth `m`.
    fn word(&self, m: usize) -> PyResult<Vec<String>> {
        freeknot::word_of(&self.0, m).map(|w| word_tokens(&w)).map_err(py_err)
    }

    fn invariant(&self, m: usize) -> PyResult<PyNormalForm> {
        explore::invariant(&self.0, m).map(PyNormalForm).map_err(py_err)
    }

    /// Applicable moves as JSON descriptors.
    #[pyo3(signature = (max_chords = None))]
    fn moves(&self, max_chords: Option<usize>) -> PyResult<Vec<String>> {
        let limits = MoveLimits::new(max_chords.unwrap_or(self.0.n() + 2));
        enumerate_moves(&self.0, limits)
            .iter()
            .map(|mv| serde_json::to_string(mv).map_err(json_err))
            .collect()
    }

    /// Applies one move given as a JSON descriptor.
    fn apply_move(&self, descriptor: &str) -> PyResult<Self> {
        let mv: freeknot::Move = serde_json::from_str(descriptor).map_err(json_err)?;
        mv.apply(&self.0).map(Self).map_err(py_err)
    }

    fn scramble(&self, moves: usize, seed: u64, size_cap: usize) -> PyResult<Self> {
        explore::scramble(&self.0, moves, seed, size_cap).map(Self).map_err(py_err)
    }

    fn __str__(&self) -> String {
        self.0.serialize()
    }

    fn __repr__(&self) -> String {
        format!("ChordDiagram({:?})", self.0.serialize())
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }
}

/// Group element as a point `(x_1..x_m; eps)` of the Cayley graph.
#[pyclass(name = "NormalForm", module = "freeknot_py", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyNormalForm(freeknot::NormalForm);

#[pymethods]
impl PyNormalForm {
    #[new]
    fn new(m: usize, x: Vec<i64>, eps: u8) -> PyResult<Self> {
        freeknot::NormalForm::new(m, x, eps).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn identity(m: usize) -> PyResult<Self> {
        freeknot::NormalForm::identity(m).map(Self).map_err(py_err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn x(&self) -> Vec<i64> {
        self.0.x().to_vec()
    }

    #[getter]
    fn eps(&self) -> u8 {
        self.0.eps()
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    fn apply(&self, letters: Vec<String>) -> PyResult<Self> {
        let w = parse_word(self.0.m(), letters)?;
        self.0.apply_word(&w).map(Self).map_err(py_err)
    }

    fn multiply(&self, other: &PyNormalForm) -> PyResult<Self> {
        self.0.multiply(&other.0).map(Self).map_err(py_err)
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn conjugate(&self, by: Vec<String>) -> PyResult<Self> {
        let w = parse_word(self.0.m(), by)?;
        self.0.conjugate(&w).map(Self).map_err(py_err)
    }

    fn to_word(&self) -> Vec<String> {
        word_tokens(&self.0.to_word())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("NormalForm{}", self.0)
    }
}

/// Normal form of a word given as letter tokens.
#[pyfunction]
fn evaluate(m: usize, letters: Vec<String>) -> PyResult<PyNormalForm> {
    Ok(PyNormalForm(freeknot::evaluate(&parse_word(m, letters)?)))
}

/// `("yes", witness)`, `("no", None)` or `("undetermined", None)`.
#[pyfunction]
#[pyo3(signature = (a, b, state_cap = 10_000))]
fn conjugate_equal(a: &PyNormalForm, b: &PyNormalForm, state_cap: usize) -> PyResult<(String, Option<Vec<String>>)> {
    Ok(match freeknot::conjugate_equal(&a.0, &b.0, state_cap).map_err(py_err)? {
        Conjugacy::Yes(w) => ("yes".into(), Some(word_tokens(&w))),
        Conjugacy::No => ("no".into(), None),
        Conjugacy::Undetermined => ("undetermined".into(), None),
    })
}

#[pyfunction]
fn relation_check(m: usize, points: Vec<PyNormalForm>) -> bool {
    let pts: Vec<_> = points.into_iter().map(|p| p.0).collect();
    freeknot::group::relation_check(m, &pts)
}

/// Search report as a JSON string.
#[pyfunction]
#[pyo3(signature = (diagram, max_states = 10_000, max_chords = None, mode = "long"))]
fn reduce(diagram: &PyChordDiagram, max_states: usize, max_chords: Option<usize>, mode: &str) -> PyResult<String> {
    let cap = max_chords.unwrap_or(2 * diagram.0.n());
    let r = explore::reduce(&diagram.0, max_states, cap, parse_mode(mode)?);
    serde_json::to_string(&r).map_err(json_err)
}

/// `"same"`, `"distinct"` or `"undetermined"`.
#[pyfunction]
#[pyo3(signature = (a, b, m_list, state_cap = 10_000, mode = "long"))]
fn distinguish(a: &PyChordDiagram, b: &PyChordDiagram, m_list: Vec<usize>, state_cap: usize, mode: &str) -> PyResult<String> {
    let r = explore::distinguish(&a.0, &b.0, &m_list, state_cap, parse_mode(mode)?).map_err(py_err)?;
    Ok(match r.verdict {
        Verdict::SameInvariant => "same",
        Verdict::CertifiedDistinct { .. } => "distinct",
        Verdict::Undetermined => "undetermined",
    }
    .to_string())
}

/// Diagrams up to rotation with non-identity invariant.
#[pyfunction]
#[pyo3(signature = (max_chords, m = 1, state_cap = 1_000_000))]
fn search_nontrivial(max_chords: usize, m: usize, state_cap: usize) -> PyResult<Vec<(PyChordDiagram, PyNormalForm)>> {
    let s = explore::search_nontrivial(max_chords, m, state_cap).map_err(py_err)?;
    Ok(s.witnesses
        .into_iter()
        .map(|w| (PyChordDiagram(w.diagram), PyNormalForm(w.invariant)))
        .collect())
}

#[pymodule]
fn freeknot_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChordDiagram>()?;
    m.add_class::<PyNormalForm>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_equal, m)?)?;
    m.add_function(wrap_pyfunction!(relation_check, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(distinguish, m)?)?;
    m.add_function(wrap_pyfunction!(search_nontrivial, m)?)?;
    Ok(())
}
