//! Python bindings for the calculus workbench.
//!
//! The surface mirrors the CLI: exact values cross the boundary as rational
//! strings ("-3/4"), structured results as JSON strings, so the Python side
//! needs nothing beyond the standard library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use phcalc_core::approx::{krivine_approximate, ApproxCertificate};
use phcalc_core::calculus::{
    apply_calculus, apply_direct, apply_quotient_calculus, apply_term as core_apply_term,
    contractivity_check, verify_composition as core_verify_composition, Tuple,
};
use phcalc_core::counterexamples::{
    density_construction, finitely_uc_probe, forced_phi1, lex_obstruction, lex_obstruction_sweep,
    not_uniformly_complete_witness, obstruction_grid, ObstructionCandidate,
};
use phcalc_core::lp::nf_sup;
use phcalc_core::models::{LatticeElement, ModelKind, PLFunc};
use phcalc_core::phfn::PHFunction;
use phcalc_core::rat::{parse_rat, rat_int, rat_str};
use phcalc_core::sigma::{
    axiom_suite as core_axiom_suite, kernel_nonclosed_witness,
    reconstruction_fidelity as core_fidelity, Corruption, SigmaOracle,
};
use phcalc_core::sphere::{sup_norm_bound, SphereNet};
use phcalc_core::{normalize as core_normalize, MaxMinNF, Rat, Term as CoreTerm};

fn perr(e: phcalc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn jstr<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_model(name: &str) -> PyResult<ModelKind> {
    match name {
        "finite" => Ok(ModelKind::Finite),
        "pl" => Ok(ModelKind::Pl),
        "evc" => Ok(ModelKind::Evc),
        "lex" => Ok(ModelKind::Lex),
        "germ" => Ok(ModelKind::Germ),
        other => Err(PyValueError::new_err(format!(
            "unknown model {other:?}; expected finite, pl, evc, lex, or germ"
        ))),
    }
}

fn parse_point(point: &[String]) -> PyResult<Vec<Rat>> {
    point.iter().map(|s| parse_rat(s).map_err(perr)).collect()
}

fn tuple_of(x: Vec<Element>) -> PyResult<Tuple> {
    Tuple::new(x.into_iter().map(|e| e.inner).collect()).map_err(perr)
}

/// Interpret a target spec the same way the CLI does: "euclid", "pnorm",
/// "coord:i", or a term in the expression language.
fn build_target(spec: &str, arity: usize, p: f64) -> PyResult<PHFunction> {
    match spec {
        "euclid" => PHFunction::euclidean(arity).map_err(perr),
        "pnorm" => {
            PHFunction::pnorm(arity, p, vec![rat_int(1); arity]).map_err(perr)
        }
        other => {
            if let Some(i) = other.strip_prefix("coord:") {
                let i: usize = i
                    .parse()
                    .map_err(|_| PyValueError::new_err(format!("bad coordinate index {i:?}")))?;
                return PHFunction::coordinate(arity, i).map_err(perr);
            }
            let t = CoreTerm::parse(arity, other).map_err(perr)?;
            PHFunction::from_term(&t).map_err(perr)
        }
    }
}

fn parse_pl(src: &str) -> PyResult<PLFunc> {
    match LatticeElement::parse(ModelKind::Pl, src).map_err(perr)? {
        LatticeElement::Pl(f) => Ok(f),
        _ => unreachable!("pl parse yields pl elements"),
    }
}

/// A lattice-linear expression in variables p1..pn.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Term {
    inner: CoreTerm,
}

#[pymethods]
impl Term {
    #[new]
    fn new(arity: usize, src: &str) -> PyResult<Self> {
        Ok(Term {
            inner: CoreTerm::parse(arity, src).map_err(perr)?,
        })
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn depth(&self) -> usize {
        self.inner.depth()
    }

    /// Exact evaluation at a rational point given as strings.
    fn eval(&self, point: Vec<String>) -> PyResult<String> {
        let x = parse_point(&point)?;
        Ok(rat_str(&self.inner.eval(&x).map_err(perr)?))
    }

    fn eval_f64(&self, point: Vec<f64>) -> PyResult<f64> {
        self.inner.eval_f64(&point).map_err(perr)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({}, {:?})", self.inner.arity(), self.inner.to_string())
    }
}

/// Max-min normal form: a join of meets of exact rational linear forms.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct NormalForm {
    inner: MaxMinNF,
}

#[pymethods]
impl NormalForm {
    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn clause_count(&self) -> usize {
        self.inner.clause_count()
    }

    fn form_count(&self) -> usize {
        self.inner.form_count()
    }

    /// Coefficient matrix as nested lists of rational strings.
    fn clauses(&self) -> Vec<Vec<Vec<String>>> {
        self.inner
            .clauses()
            .iter()
            .map(|clause| {
                clause
                    .iter()
                    .map(|form| form.coeffs.iter().map(rat_str).collect())
                    .collect()
            })
            .collect()
    }

    fn eval(&self, point: Vec<String>) -> PyResult<String> {
        let x = parse_point(&point)?;
        Ok(rat_str(&self.inner.eval(&x).map_err(perr)?))
    }

    fn eval_f64(&self, point: Vec<f64>) -> f64 {
        self.inner.eval_f64(&point)
    }

    /// Exact supremum over the unit sphere of the sup norm.
    fn sup(&self) -> String {
        rat_str(&nf_sup(&self.inner))
    }

    /// Exact supremum of the absolute value over the sphere.
    fn sup_abs(&self) -> PyResult<String> {
        let up = nf_sup(&self.inner);
        let down = nf_sup(&self.inner.negate(u64::MAX).map_err(perr)?);
        Ok(rat_str(&up.max(down)))
    }

    /// Interval bound for the sup over the sphere from a mesh-`mesh` net.
    fn sup_bound(&self, mesh: &str) -> PyResult<(String, String)> {
        let step = parse_rat(mesh).map_err(perr)?;
        let net = SphereNet::new(self.inner.arity(), &step).map_err(perr)?;
        let (lo, hi) = sup_norm_bound(&self.inner, &net).map_err(perr)?;
        Ok((rat_str(&lo), rat_str(&hi)))
    }

    fn to_json(&self) -> PyResult<String> {
        jstr(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "NormalForm(arity={}, clauses={})",
            self.inner.arity(),
            self.inner.clause_count()
        )
    }
}

/// One element of a model: finite vector, PL function, eventually constant
/// PL function, lex-plane point, or germ class.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Element {
    inner: LatticeElement,
}

#[pymethods]
impl Element {
    #[new]
    fn new(model: &str, literal: &str) -> PyResult<Self> {
        let kind = parse_model(model)?;
        Ok(Element {
            inner: LatticeElement::parse(kind, literal).map_err(perr)?,
        })
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn add(&self, other: &Element) -> PyResult<Element> {
        Ok(Element {
            inner: self.inner.add(&other.inner).map_err(perr)?,
        })
    }

    fn sub(&self, other: &Element) -> PyResult<Element> {
        Ok(Element {
            inner: self.inner.sub(&other.inner).map_err(perr)?,
        })
    }

    fn scale(&self, c: &str) -> PyResult<Element> {
        let c = parse_rat(c).map_err(perr)?;
        Ok(Element {
            inner: self.inner.scale(&c),
        })
    }

    fn join(&self, other: &Element) -> PyResult<Element> {
        Ok(Element {
            inner: self.inner.join(&other.inner).map_err(perr)?,
        })
    }

    fn meet(&self, other: &Element) -> PyResult<Element> {
        Ok(Element {
            inner: self.inner.meet(&other.inner).map_err(perr)?,
        })
    }

    fn abs(&self) -> Element {
        Element {
            inner: self.inner.abs(),
        }
    }

    fn leq(&self, other: &Element) -> PyResult<bool> {
        self.inner.leq(&other.inner).map_err(perr)
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn to_json(&self) -> PyResult<String> {
        jstr(&self.inner)
    }

    fn __eq__(&self, other: &Element) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        match jstr(&self.inner) {
            Ok(js) => format!("Element({:?}, {js})", self.model()),
            Err(_) => format!("Element({:?})", self.model()),
        }
    }
}

/// Normalize a term into its max-min normal form.
#[pyfunction]
fn normalize(t: Term) -> PyResult<NormalForm> {
    Ok(NormalForm {
        inner: core_normalize(&t.inner).map_err(perr)?,
    })
}

/// Apply a lattice-linear term to a tuple of elements, exactly.
#[pyfunction]
fn apply_term(x: Vec<Element>, t: Term) -> PyResult<Element> {
    let tuple = tuple_of(x)?;
    Ok(Element {
        inner: core_apply_term(&tuple, &t.inner).map_err(perr)?,
    })
}

/// The function calculus on a tuple. Germ tuples go through the quotient,
/// `eps=None` evaluates pointwise, and a positive `eps` runs the certified
/// approximation. Returns a JSON report.
#[pyfunction]
#[pyo3(signature = (x, g, eps=None, p=2.0))]
fn calculus(x: Vec<Element>, g: &str, eps: Option<f64>, p: f64) -> PyResult<String> {
    let tuple = tuple_of(x)?;
    let gf = build_target(g, tuple.len(), p)?;
    if tuple.model() == ModelKind::Germ {
        let value = apply_quotient_calculus(&tuple, &gf).map_err(perr)?;
        return jstr(&serde_json::json!({ "value": value, "mode": "exact" }));
    }
    match eps {
        Some(eps) => jstr(&apply_calculus(&tuple, &gf, eps).map_err(perr)?),
        None => {
            let value = apply_direct(&tuple, &gf).map_err(perr)?;
            jstr(&serde_json::json!({ "value": value, "mode": "direct" }))
        }
    }
}

/// Check the composition law on a tuple; `fs` are terms in the tuple's
/// variables, `g` a target spec over `len(fs)` variables.
#[pyfunction]
#[pyo3(signature = (x, g, fs, eps=0.01, p=2.0))]
fn verify_composition(
    x: Vec<Element>,
    g: &str,
    fs: Vec<String>,
    eps: f64,
    p: f64,
) -> PyResult<String> {
    let tuple = tuple_of(x)?;
    let inner: Vec<PHFunction> = fs
        .iter()
        .map(|src| {
            let t = CoreTerm::parse(tuple.len(), src).map_err(perr)?;
            PHFunction::from_term(&t).map_err(perr)
        })
        .collect::<PyResult<_>>()?;
    let outer = build_target(g, inner.len(), p)?;
    jstr(&core_verify_composition(&tuple, &outer, &inner, eps).map_err(perr)?)
}

/// Contractivity of the calculus in the order-unit norm of the tuple.
#[pyfunction]
fn contractivity(x: Vec<Element>, t: Term) -> PyResult<String> {
    let tuple = tuple_of(x)?;
    jstr(&contractivity_check(&tuple, &t.inner).map_err(perr)?)
}

/// Run the axiom suite against a model's join oracle, optionally corrupted
/// ("sum", "left", "meet", or "shift").
#[pyfunction]
#[pyo3(signature = (model, trials=1000, seed=0, dim=3, corrupt=None))]
fn axiom_suite(
    model: &str,
    trials: usize,
    seed: u64,
    dim: usize,
    corrupt: Option<&str>,
) -> PyResult<String> {
    let kind = parse_model(model)?;
    let oracle = match corrupt {
        Some(c) => SigmaOracle::corrupted(kind, Corruption::parse(c).map_err(perr)?),
        None => SigmaOracle::from_model(kind),
    };
    jstr(&core_axiom_suite(&oracle, trials, seed, dim).map_err(perr)?)
}

/// Compare the order derived from a sigma oracle with the native one.
#[pyfunction]
#[pyo3(signature = (model, trials=1000, seed=0, dim=3, corrupt=None))]
fn reconstruction_fidelity(
    model: &str,
    trials: usize,
    seed: u64,
    dim: usize,
    corrupt: Option<&str>,
) -> PyResult<String> {
    let kind = parse_model(model)?;
    let oracle = match corrupt {
        Some(c) => SigmaOracle::corrupted(kind, Corruption::parse(c).map_err(perr)?),
        None => SigmaOracle::from_model(kind),
    };
    jstr(&core_fidelity(&oracle, trials, seed, dim).map_err(perr)?)
}

/// Germ-model witness that the calculus kernel is not closed.
#[pyfunction]
fn kernel_witness(ms: Vec<u64>) -> PyResult<String> {
    jstr(&kernel_nonclosed_witness(&ms).map_err(perr)?)
}

/// PL-model witness that the generated sublattice is not uniformly complete.
#[pyfunction]
fn completeness_witness(ms: Vec<u64>) -> PyResult<String> {
    jstr(&not_uniformly_complete_witness(&ms))
}

/// Flat-prefix stability probe for finite uniform completeness; `fs` are PL
/// breakpoint literals.
#[pyfunction]
#[pyo3(signature = (fs, trials=1000, seed=0))]
fn uc_probe(fs: Vec<String>, trials: usize, seed: u64) -> PyResult<String> {
    let members: Vec<PLFunc> = fs
        .iter()
        .map(|s| parse_pl(s))
        .collect::<PyResult<_>>()?;
    jstr(&finitely_uc_probe(&members, trials, seed).map_err(perr)?)
}

/// Clamp construction pushing a PL function within eps of the sublattice.
#[pyfunction]
fn density(f: &str, eps: &str) -> PyResult<String> {
    let f = parse_pl(f)?;
    let eps = parse_rat(eps).map_err(perr)?;
    jstr(&density_construction(&f, &eps).map_err(perr)?)
}

/// The forced first component of any calculus on the lex plane.
#[pyfunction]
fn forced_values() -> PyResult<String> {
    jstr(&forced_phi1())
}

/// Examine one lex-plane candidate `(c2, t)`; returns the rejection or the
/// two-route contradiction certificate.
#[pyfunction]
#[pyo3(signature = (t, c2=None))]
fn lex_certificate(t: &str, c2: Option<&str>) -> PyResult<String> {
    let point = match LatticeElement::parse(ModelKind::Lex, t).map_err(perr)? {
        LatticeElement::Lex(a, b) => (a, b),
        _ => unreachable!("lex parse"),
    };
    let weight = match c2 {
        Some(src) => parse_rat(src).map_err(perr)?,
        None => {
            if point.1 > rat_int(0) {
                rat_int(1) / point.1.clone()
            } else {
                rat_int(1)
            }
        }
    };
    let cand =
        ObstructionCandidate::new(rat_int(1), (rat_int(1), rat_int(0)), weight, point)
            .map_err(perr)?;
    jstr(&lex_obstruction(&cand))
}

/// Sweep a grid of lex-plane candidates; every one must be rejected or
/// refuted.
#[pyfunction]
#[pyo3(signature = (per_face=120))]
fn obstruction_sweep(per_face: usize) -> PyResult<String> {
    jstr(&lex_obstruction_sweep(&obstruction_grid(per_face)))
}

/// Build a certified sublattice approximant of a target function.
#[pyfunction]
#[pyo3(signature = (target="euclid", n=2, eps=0.05, p=2.0))]
fn krivine(target: &str, n: usize, eps: f64, p: f64) -> PyResult<String> {
    let g = build_target(target, n, p)?;
    jstr(&krivine_approximate(&g, eps).map_err(perr)?)
}

/// Re-run the audit of a serialized certificate and report whether the
/// stored bound reproduces.
#[pyfunction]
fn replay_certificate(src: &str) -> PyResult<String> {
    let cert: ApproxCertificate =
        serde_json::from_str(src).map_err(|e| PyValueError::new_err(format!("bad certificate: {e}")))?;
    let g = PHFunction::from_descriptor(&cert.target).map_err(perr)?;
    let replayed = cert.replay(&g).map_err(perr)?;
    jstr(&serde_json::json!({
        "epsilon": cert.epsilon,
        "replayed": replayed,
        "matches": replayed == cert.epsilon,
    }))
}


#[pymodule]
fn phcalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Term>()?;
    m.add_class::<NormalForm>()?;
    m.add_class::<Element>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(apply_term, m)?)?;
    m.add_function(wrap_pyfunction!(calculus, m)?)?;
    m.add_function(wrap_pyfunction!(verify_composition, m)?)?;
    m.add_function(wrap_pyfunction!(contractivity, m)?)?;
    m.add_function(wrap_pyfunction!(axiom_suite, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruction_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_witness, m)?)?;
    m.add_function(wrap_pyfunction!(completeness_witness, m)?)?;
    m.add_function(wrap_pyfunction!(uc_probe, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(forced_values, m)?)?;
    m.add_function(wrap_pyfunction!(lex_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(obstruction_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(krivine, m)?)?;
    m.add_function(wrap_pyfunction!(replay_certificate, m)?)?;
    Ok(())
}
