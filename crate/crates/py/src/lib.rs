//! Python bindings: graphs, formulas, pictures, oracles, reductions, the
//! runtime and the acceptance checks. Library errors surface as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lph::arbiter::compile_formula_to_arbiter;
use lph::graph::{enumerate_graphs as enumerate, generate_small_ids, structural_representation};
use lph::io::{parse_graph, write_graph};
use lph::logic::{classify, evaluate_with, nesting_radius, parse, Assignment, EvalOptions, SearchCaps, Strategy};
use lph::oracles::{check_property as oracle, Property};
use lph::pictures;
use lph::reductions::{self as red, ClusterGraph};
use lph::runtime::{execute, AcceptAll, AllSelected, Limits, Machine, Program, Scheduler};
use lph::LabeledGraph;

fn err(e: lph::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A connected graph with bit-string labels, optionally carrying identifiers.
#[pyclass(name = "Graph", module = "lph_py", skip_from_py_object)]
#[derive(Clone)]
struct Graph {
    inner: LabeledGraph,
    ids: Option<Vec<String>>,
}

impl Graph {
    fn of(inner: LabeledGraph) -> Self {
        Graph { inner, ids: None }
    }

    fn ids_or(&self, rho: usize, seed: u64) -> Vec<String> {
        self.ids.clone().unwrap_or_else(|| generate_small_ids(&self.inner, rho, seed))
    }
}

#[pymethods]
impl Graph {
    /// Parses `.lg` text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let file = parse_graph(text).map_err(err)?;
        Ok(Graph { inner: file.graph, ids: file.ids })
    }

    #[staticmethod]
    fn path(n: usize) -> Self {
        Graph::of(LabeledGraph::path(n))
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        Graph::of(LabeledGraph::cycle(n))
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        Graph::of(LabeledGraph::complete(n))
    }

    fn with_labels(&self, labels: Vec<String>) -> PyResult<Self> {
        if labels.len() != self.inner.node_count() {
            return Err(PyValueError::new_err("one label per node"));
        }
        Ok(Graph { inner: self.inner.with_labels(labels), ids: self.ids.clone() })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<(String, String)> {
        self.inner.edges().iter().map(|&(a, b)| (self.inner.name(a).to_string(), self.inner.name(b).to_string())).collect()
    }

    #[getter]
    fn ids(&self) -> Option<Vec<String>> {
        self.ids.clone()
    }

    /// `.lg` text, with identifiers when the graph carries them.
    fn to_lg(&self) -> String {
        write_graph(&self.inner, self.ids.as_deref())
    }

    fn __repr__(&self) -> String {
        format!("Graph({} nodes, {} edges)", self.inner.node_count(), self.inner.edges().len())
    }
}

#[pyclass(name = "Formula", module = "lph_py", skip_from_py_object)]
#[derive(Clone)]
struct Formula {
    inner: lph::logic::Formula,
}

#[pymethods]
impl Formula {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Formula { inner: parse(text).map_err(err)? })
    }

    /// A named sentence from the built-in library.
    #[staticmethod]
    fn library(name: &str) -> PyResult<Self> {
        lph::logic::library::sentence(name)
            .map(|inner| Formula { inner })
            .ok_or_else(|| PyValueError::new_err(format!("no library sentence {name:?}")))
    }

    /// Fragment tag such as `monadic Sigma(1)`.
    fn classify(&self) -> PyResult<String> {
        Ok(classify(&self.inner).map_err(err)?.to_string())
    }

    #[getter]
    fn radius(&self) -> usize {
        nesting_radius(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(name = "Picture", module = "lph_py", skip_from_py_object)]
#[derive(Clone)]
struct Picture {
    inner: pictures::Picture,
}

#[pymethods]
impl Picture {
    /// Parses `.pic` text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Picture { inner: pictures::Picture::parse(text).map_err(err)? })
    }

    #[staticmethod]
    fn blank(height: usize, width: usize) -> Self {
        Picture { inner: pictures::Picture::blank(height, width) }
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    /// The 5-node-per-pixel graph encoding (0-bit pictures only).
    fn encode(&self) -> PyResult<Graph> {
        Ok(Graph::of(pictures::encode_picture_as_graph(&self.inner).map_err(err)?))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(name = "TilingSystem", module = "lph_py", skip_from_py_object)]
#[derive(Clone)]
struct TilingSystem {
    inner: pictures::TilingSystem,
}

#[pymethods]
impl TilingSystem {
    /// Parses `.ts` text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(TilingSystem { inner: pictures::TilingSystem::parse(text).map_err(err)? })
    }

    #[staticmethod]
    fn even_width() -> Self {
        TilingSystem { inner: pictures::TilingSystem::even_width() }
    }

    fn accepts(&self, picture: PyRef<'_, Picture>) -> PyResult<bool> {
        pictures::ts_accepts(&self.inner, &picture.inner).map_err(err)
    }

    /// The equivalent existential monadic sentence over pictures.
    fn to_formula(&self) -> Formula {
        Formula { inner: pictures::ts_to_formula(&self.inner) }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

fn options(exhaustive: bool, no_caps: bool) -> EvalOptions {
    EvalOptions {
        strategy: if exhaustive { Strategy::Exhaustive } else { Strategy::Pruned },
        caps: if no_caps { SearchCaps::unlimited() } else { SearchCaps::default() },
    }
}

/// Truth of a sentence on the structural representation of a graph.
#[pyfunction]
#[pyo3(signature = (graph, formula, exhaustive = false, no_caps = false))]
fn evaluate(graph: PyRef<'_, Graph>, formula: PyRef<'_, Formula>, exhaustive: bool, no_caps: bool) -> PyResult<bool> {
    let s = structural_representation(&graph.inner).map_err(err)?;
    evaluate_with(&s, &formula.inner, &Assignment::new(), &options(exhaustive, no_caps)).map_err(err)
}

/// Truth of a sentence on a picture.
#[pyfunction]
#[pyo3(signature = (picture, formula, exhaustive = false, no_caps = false))]
fn evaluate_picture(picture: PyRef<'_, Picture>, formula: PyRef<'_, Formula>, exhaustive: bool, no_caps: bool) -> PyResult<bool> {
    let s = pictures::picture_structure(&picture.inner);
    evaluate_with(&s, &formula.inner, &Assignment::new(), &options(exhaustive, no_caps)).map_err(err)
}

/// Picture sentence rewritten for encoded graphs.
#[pyfunction]
fn translate_picture_formula(formula: PyRef<'_, Formula>) -> PyResult<Formula> {
    Ok(Formula { inner: pictures::translate_picture_formula(&formula.inner).map_err(err)? })
}

/// Ground-truth verdict of a named property.
#[pyfunction]
fn check_property(name: &str, graph: PyRef<'_, Graph>) -> PyResult<bool> {
    let p: Property = name.parse().map_err(err)?;
    oracle(p, &graph.inner).map_err(err)
}

/// Every connected graph up to renaming with at most `max_nodes` nodes.
#[pyfunction]
fn enumerate_graphs(max_nodes: usize, labels: Vec<String>) -> PyResult<Vec<Graph>> {
    if max_nodes > 7 {
        return Err(PyValueError::new_err("max_nodes is limited to 7"));
    }
    Ok(enumerate(max_nodes, &labels).into_iter().map(Graph::of).collect())
}

/// Copy of the graph carrying small `rho`-locally unique identifiers.
#[pyfunction]
#[pyo3(signature = (graph, rho, seed = 0))]
fn with_small_ids(graph: PyRef<'_, Graph>, rho: usize, seed: u64) -> Graph {
    Graph { inner: graph.inner.clone(), ids: Some(generate_small_ids(&graph.inner, rho, seed)) }
}

/// Applies a named reduction; returns the output and its cluster map as input-node names.
#[pyfunction]
#[pyo3(signature = (name, graph, seed = 0))]
fn reduce(name: &str, graph: PyRef<'_, Graph>, seed: u64) -> PyResult<(Graph, Vec<String>)> {
    let g = &graph.inner;
    let ids = graph.ids_or(1, seed);
    let same = |output: LabeledGraph| ClusterGraph { cluster_map: (0..output.node_count()).collect(), output };
    let cg = match name {
        "as2eul" => red::reduce(red::AllSelectedToEulerian, g, &ids),
        "as2ham" => red::reduce(red::AllSelectedToHamiltonian, g, &ids),
        "nas2ham" => red::reduce(red::NotAllSelectedToHamiltonian, g, &ids),
        "3sat2_3col" => red::reduce(red::ThreeSatToThreeColorable, g, &ids),
        "identity" => red::reduce(red::Identity, g, &ids),
        "sat2_3sat" => red::relabel(red::SatToThreeSat, g, &ids).map(same),
        _ => return Err(PyValueError::new_err(format!("unknown reduction {name:?}"))),
    }
    .map_err(err)?;
    let clusters = cg.cluster_map.iter().map(|&v| g.name(v).to_string()).collect();
    Ok((Graph::of(cg.output), clusters))
}

/// Boolean-graph instance satisfiable iff `formula` holds on the graph.
#[pyfunction]
#[pyo3(signature = (formula, graph, seed = 0))]
fn cook_levin(formula: PyRef<'_, Formula>, graph: PyRef<'_, Graph>, seed: u64) -> PyResult<Graph> {
    let rho = red::CookLevin::new(&formula.inner).map_err(err)?.radius() + 1;
    let ids = graph.ids_or(rho, seed);
    Ok(Graph::of(red::cook_levin_translate(&formula.inner, &graph.inner, &ids).map_err(err)?))
}

/// Executes `.dtm` machine text, or `allselected` / `acceptall`.
/// Returns (verdicts, outputs, rounds).
#[pyfunction]
#[pyo3(signature = (graph, machine, certs = None, seed = 0))]
fn run(graph: PyRef<'_, Graph>, machine: &str, certs: Option<Vec<Vec<String>>>, seed: u64) -> PyResult<(Vec<bool>, Vec<String>, usize)> {
    let prog = match machine {
        "allselected" => Program::node(AllSelected),
        "acceptall" => Program::node(AcceptAll),
        text => Machine::parse(text).map_err(err)?.into(),
    };
    let ids = graph.ids_or(prog.id_radius(), seed);
    let certs = certs.unwrap_or_default();
    let res = execute(&prog, &graph.inner, &ids, &certs, Limits::default(), Scheduler::Sequential).map_err(err)?;
    Ok((res.verdicts, res.outputs, res.rounds))
}

/// Compiles a Sigma/Pi sentence into a distributed arbiter and plays its game.
#[pyfunction]
#[pyo3(signature = (graph, formula, seed = 0))]
fn arbitrate_formula(graph: PyRef<'_, Graph>, formula: PyRef<'_, Formula>, seed: u64) -> PyResult<bool> {
    let arb = compile_formula_to_arbiter(&formula.inner).map_err(err)?;
    let ids = graph.ids_or(arb.id_radius(), seed);
    arb.arbitrate(&graph.inner, &ids, Limits::default()).map_err(err)
}

/// Runs one acceptance criterion; returns (passed, report line).
#[pyfunction]
#[pyo3(signature = (criterion, seed = 0))]
fn acceptance(criterion: usize, seed: u64) -> PyResult<(bool, String)> {
    if !(1..=10).contains(&criterion) {
        return Err(PyValueError::new_err("criteria are numbered 1 to 10"));
    }
    let r = lph::acceptance::run(criterion, seed).map_err(err)?;
    Ok((r.passed, r.to_string()))
}

#[pymodule]
fn lph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Formula>()?;
    m.add_class::<Picture>()?;
    m.add_class::<TilingSystem>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_picture, m)?)?;
    m.add_function(wrap_pyfunction!(translate_picture_formula, m)?)?;
    m.add_function(wrap_pyfunction!(check_property, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_graphs, m)?)?;
    m.add_function(wrap_pyfunction!(with_small_ids, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(cook_levin, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(arbitrate_formula, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance, m)?)?;
    Ok(())
}
