//! The functional calculus: evaluate positively homogeneous functions on
//! tuples of lattice elements.
//!
//! Lattice terms evaluate structurally in every model, including the
//! non-Archimedean ones. General functions evaluate pointwise where the model
//! is a function space, or through a certified sublattice approximant with
//! the error reported in the order-unit norm of `e = |x_1| v ... v |x_n|`.

use num_traits::Zero;
use serde::Serialize;

use crate::approx::{krivine_approximate, ApproxCertificate};
use crate::error::{Error, Result};
use crate::lp::nf_sup;
use crate::models::{
    quotient_q, quotient_r, LatticeElement, ModelKind, OrderUnitContext,
};
use crate::nf::{normalize, MaxMinNF};
use crate::phfn::{compose_ph, PHFunction, PHKind};
use crate::rat::{rat_from_f64, rat_str, rat_to_f64, rat_zero, Rat};
use crate::term::{Term, TermNode};

/// A tuple of lattice elements from one model, the `x` in `Phi_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuple {
    elements: Vec<LatticeElement>,
}

impl Tuple {
    pub fn new(elements: Vec<LatticeElement>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::Arity("tuple must be non-empty".into()))?;
        for e in &elements[1..] {
            first.shape_check(e)?;
        }
        Ok(Tuple { elements })
    }

    pub fn model(&self) -> ModelKind {
        self.elements[0].kind()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[LatticeElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &LatticeElement {
        &self.elements[i]
    }

    /// The canonical order unit `e = |x_1| v ... v |x_n|`.
    pub fn order_unit(&self) -> Result<LatticeElement> {
        let mut e = self.elements[0].abs();
        for x in &self.elements[1..] {
            e = e.join(&x.abs())?;
        }
        Ok(e)
    }

    fn check_arity(&self, arity: usize) -> Result<()> {
        if arity != self.elements.len() {
            return Err(Error::Arity(format!(
                "arity {} against a tuple of {} elements",
                arity,
                self.elements.len()
            )));
        }
        Ok(())
    }
}

/// Evaluate a lattice-linear term by structural recursion on the model
/// operations. Works in every model.
pub fn apply_term(x: &Tuple, t: &Term) -> Result<LatticeElement> {
    x.check_arity(t.arity())?;
    apply_node(x, t.root())
}

fn apply_node(x: &Tuple, node: &TermNode) -> Result<LatticeElement> {
    Ok(match node {
        TermNode::Var(i) => x.get(*i - 1).clone(),
        TermNode::Scale(c, t) => apply_node(x, t)?.scale(c),
        TermNode::Sum(a, b) => apply_node(x, a)?.add(&apply_node(x, b)?)?,
        TermNode::Join(a, b) => apply_node(x, a)?.join(&apply_node(x, b)?)?,
        TermNode::Meet(a, b) => apply_node(x, a)?.meet(&apply_node(x, b)?)?,
    })
}

/// Evaluate a normal form directly: meet the linear forms inside each clause,
/// join the clauses.
pub fn apply_nf(x: &Tuple, nf: &MaxMinNF) -> Result<LatticeElement> {
    x.check_arity(nf.arity())?;
    let mut joined: Option<LatticeElement> = None;
    for clause in nf.clauses() {
        let mut met: Option<LatticeElement> = None;
        for form in clause {
            let mut acc = x.get(0).zero_like();
            for (c, xi) in form.coeffs.iter().zip(x.elements()) {
                if !c.is_zero() {
                    acc = acc.add(&xi.scale(c))?;
                }
            }
            met = Some(match met {
                None => acc,
                Some(m) => m.meet(&acc)?,
            });
        }
        let clause_val = met.expect("normal form clauses are non-empty");
        joined = Some(match joined {
            None => clause_val,
            Some(j) => j.join(&clause_val)?,
        });
    }
    Ok(joined.expect("normal forms have at least one clause"))
}

/// Pointwise calculus on function-space models.
///
/// Finite vectors admit every function kind: coordinates of the result are
/// the function applied across the tuple at each index, exact whenever the
/// function evaluates exactly. PL models stay inside the model only for the
/// lattice fragment, which is delegated to the exact term machinery.
pub fn apply_direct(x: &Tuple, g: &PHFunction) -> Result<LatticeElement> {
    x.check_arity(g.arity())?;
    match x.model() {
        ModelKind::Finite => {
            let dim = match x.get(0) {
                LatticeElement::Finite(v) => v.len(),
                _ => unreachable!(),
            };
            let mut out = Vec::with_capacity(dim);
            for j in 0..dim {
                let point: Vec<Rat> = x
                    .elements()
                    .iter()
                    .map(|e| match e {
                        LatticeElement::Finite(v) => v[j].clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                match g.eval_exact(&point)? {
                    Some(v) => out.push(v),
                    None => {
                        let pf: Vec<f64> = point.iter().map(rat_to_f64).collect();
                        out.push(rat_from_f64(g.eval_f64(&pf)?)?);
                    }
                }
            }
            Ok(LatticeElement::Finite(out))
        }
        ModelKind::Pl | ModelKind::Evc => match g.kind() {
            PHKind::Coordinate(i) => Ok(x.get(*i - 1).clone()),
            PHKind::LatticeTerm(nf) => apply_nf(x, nf),
            _ => Err(Error::Unsupported(format!(
                "pointwise calculus on the {} model covers only the lattice fragment; \
                 use the certified calculus for {:?}",
                x.model().name(),
                g.kind()
            ))),
        },
        other => Err(Error::Model(format!(
            "pointwise calculus needs a function-space model, not {}",
            other.name()
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalcMode {
    Exact,
    Approximate,
}

/// Result of the certified calculus: a lattice element plus a bound on the
/// distance to the true image, in the order-unit norm of the tuple.
#[derive(Debug, Clone)]
pub struct CalculusResult {
    pub value: LatticeElement,
    pub mode: CalcMode,
    /// Bound on `||value - Phi_x(g)||_e`, zero in exact mode.
    pub error_bound: Rat,
    pub certificate: Option<ApproxCertificate>,
}

impl Serialize for CalculusResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            value: &'a LatticeElement,
            mode: CalcMode,
            error_bound: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            certificate: &'a Option<ApproxCertificate>,
        }
        Wire {
            value: &self.value,
            mode: self.mode,
            error_bound: rat_str(&self.error_bound),
            certificate: &self.certificate,
        }
        .serialize(s)
    }
}

/// The certified calculus `Phi_x(g)` on Archimedean models.
///
/// The function is replaced by a sublattice approximant within `eps` on the
/// sphere; applying a homomorphism of norm at most one (in the order-unit
/// norms) turns that into `||result - Phi_x(g)||_e <= eps`.
pub fn apply_calculus(x: &Tuple, g: &PHFunction, eps: f64) -> Result<CalculusResult> {
    x.check_arity(g.arity())?;
    if !x.model().is_archimedean() {
        return Err(Error::NonArchimedean(format!(
            "the certified calculus needs an Archimedean model, {} is not",
            x.model().name()
        )));
    }
    match g.kind() {
        PHKind::Coordinate(i) => {
            return Ok(CalculusResult {
                value: x.get(*i - 1).clone(),
                mode: CalcMode::Exact,
                error_bound: rat_zero(),
                certificate: None,
            });
        }
        PHKind::LatticeTerm(nf) => {
            return Ok(CalculusResult {
                value: apply_nf(x, nf)?,
                mode: CalcMode::Exact,
                error_bound: rat_zero(),
                certificate: None,
            });
        }
        _ => {}
    }
    let cert = krivine_approximate(g, eps)?;
    let value = apply_nf(x, &cert.approximant)?;
    Ok(CalculusResult {
        value,
        mode: CalcMode::Approximate,
        error_bound: rat_from_f64(cert.epsilon)?,
        certificate: Some(cert),
    })
}

/// The calculus on the germ quotient, for the lattice fragment: lift each
/// class to its canonical representative, compute in the function model,
/// project back. The outcome does not depend on the representatives.
pub fn apply_quotient_calculus(z: &Tuple, g: &PHFunction) -> Result<LatticeElement> {
    z.check_arity(g.arity())?;
    if z.model() != ModelKind::Germ {
        return Err(Error::Model(format!(
            "quotient calculus expects germ classes, got {}",
            z.model().name()
        )));
    }
    match g.kind() {
        PHKind::Coordinate(_) | PHKind::LatticeTerm(_) => {}
        other => {
            return Err(Error::Unsupported(format!(
                "quotient calculus covers only the lattice fragment, not {other:?}"
            )))
        }
    }
    let reps: Vec<LatticeElement> = z
        .elements()
        .iter()
        .map(|e| match e {
            LatticeElement::Germ(gc) => LatticeElement::Pl(quotient_r(gc)),
            _ => unreachable!(),
        })
        .collect();
    let lifted = Tuple::new(reps)?;
    let value = apply_direct(&lifted, g)?;
    match value {
        LatticeElement::Pl(pl) => Ok(LatticeElement::Germ(quotient_q(&pl))),
        _ => unreachable!("pointwise calculus on PL stays PL"),
    }
}

/// Report of a composition-law check `Phi_x(g o (f_1 x ... x f_m))` against
/// `g(Phi_x(f_1), ..., Phi_x(f_m))`.
#[derive(Debug, Clone)]
pub struct CompositionReport {
    pub lhs: LatticeElement,
    pub rhs: LatticeElement,
    pub mode: CalcMode,
    /// Order-unit-norm distance between the two sides, when the model has
    /// one; class equality is reported through `pass` alone otherwise.
    pub discrepancy: Option<Rat>,
    /// Tolerance the discrepancy was held against.
    pub budget: Rat,
    pub pass: bool,
}

impl Serialize for CompositionReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            lhs: &'a LatticeElement,
            rhs: &'a LatticeElement,
            mode: CalcMode,
            #[serde(skip_serializing_if = "Option::is_none")]
            discrepancy: Option<String>,
            budget: String,
            pass: bool,
        }
        Wire {
            lhs: &self.lhs,
            rhs: &self.rhs,
            mode: self.mode,
            discrepancy: self.discrepancy.as_ref().map(rat_str),
            budget: rat_str(&self.budget),
            pass: self.pass,
        }
        .serialize(s)
    }
}

fn is_lattice_fragment(g: &PHFunction) -> bool {
    matches!(g.kind(), PHKind::Coordinate(_) | PHKind::LatticeTerm(_))
}

fn exact_apply(x: &Tuple, g: &PHFunction) -> Result<LatticeElement> {
    match g.kind() {
        PHKind::Coordinate(i) => Ok(x.get(*i - 1).clone()),
        PHKind::LatticeTerm(nf) => apply_nf(x, nf),
        _ => unreachable!("caller checked the lattice fragment"),
    }
}

/// Check the composition law on a tuple. Inside the lattice fragment both
/// sides are computed exactly in any model and must coincide; with general
/// functions (Archimedean models only) both sides are certified and the
/// discrepancy is held against the combined certificate budget.
pub fn verify_composition(
    x: &Tuple,
    g: &PHFunction,
    fs: &[PHFunction],
    eps: f64,
) -> Result<CompositionReport> {
    if fs.len() != g.arity() {
        return Err(Error::Arity(format!(
            "outer arity {} against {} inner functions",
            g.arity(),
            fs.len()
        )));
    }
    for f in fs {
        x.check_arity(f.arity())?;
    }

    if is_lattice_fragment(g) && fs.iter().all(is_lattice_fragment) {
        let inner: Vec<LatticeElement> = fs
            .iter()
            .map(|f| exact_apply(x, f))
            .collect::<Result<_>>()?;
        let lhs = exact_apply(&Tuple::new(inner)?, g)?;
        let rhs = exact_apply(x, &compose_ph(g, fs)?)?;
        let equal = lhs == rhs;
        let discrepancy = if x.model().is_archimedean() {
            let e = x.order_unit()?;
            let ctx = OrderUnitContext::new(e)?;
            Some(ctx.norm(&lhs.sub(&rhs)?)?)
        } else {
            equal.then(rat_zero)
        };
        return Ok(CompositionReport {
            lhs,
            rhs,
            mode: CalcMode::Exact,
            pass: equal,
            discrepancy,
            budget: rat_zero(),
        });
    }

    if !x.model().is_archimedean() {
        return Err(Error::NonArchimedean(format!(
            "general compositions on {} are outside the exact fragment",
            x.model().name()
        )));
    }

    let inner_results: Vec<CalculusResult> = fs
        .iter()
        .map(|f| apply_calculus(x, f, eps))
        .collect::<Result<_>>()?;
    let inner_tuple = Tuple::new(inner_results.iter().map(|r| r.value.clone()).collect())?;
    let lhs_res = apply_calculus(&inner_tuple, g, eps)?;
    let rhs_res = apply_calculus(x, &compose_ph(g, fs)?, eps)?;

    // Error budget, measured in the order-unit norm of x:
    //   rhs carries its own certificate;
    //   the outer certificate of lhs is stated in the unit of the inner
    //     tuple, which is dominated by max Lip(f_i) copies of e;
    //   inner certificates are amplified by the Lipschitz constant of g.
    let max_inner_lip = fs.iter().map(|f| f.lipschitz()).fold(0.0f64, f64::max);
    let inner_sum: f64 = inner_results
        .iter()
        .map(|r| rat_to_f64(&r.error_bound))
        .sum();
    let budget_f = rat_to_f64(&rhs_res.error_bound)
        + rat_to_f64(&lhs_res.error_bound) * max_inner_lip.max(1.0)
        + g.lipschitz() * inner_sum
        + 1e-9;
    let budget = rat_from_f64(budget_f)?;

    let e = x.order_unit()?;
    let ctx = OrderUnitContext::new(e)?;
    let discrepancy = ctx.norm(&lhs_res.value.sub(&rhs_res.value)?)?;
    let pass = discrepancy <= budget;
    Ok(CompositionReport {
        lhs: lhs_res.value,
        rhs: rhs_res.value,
        mode: CalcMode::Approximate,
        discrepancy: Some(discrepancy),
        budget,
        pass,
    })
}

/// Report of a contractivity check: the order-unit norm of a term's image
/// never exceeds the exact sup of the term over the sphere.
#[derive(Debug, Clone)]
pub struct ContractivityReport {
    pub norm: Rat,
    pub bound: Rat,
    pub pass: bool,
}

impl Serialize for ContractivityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            norm: String,
            bound: String,
            pass: bool,
        }
        Wire {
            norm: rat_str(&self.norm),
            bound: rat_str(&self.bound),
            pass: self.pass,
        }
        .serialize(s)
    }
}

/// Verify `||Phi_x(t)||_e <= sup |t|` over the sphere, with
/// `e = Phi_x(|p1| v ... v |pn|)`. A failure here is a bug, not a data
/// error: the calculus is contractive for the order-unit norms.
pub fn contractivity_check(x: &Tuple, t: &Term) -> Result<ContractivityReport> {
    x.check_arity(t.arity())?;
    if !x.model().is_archimedean() {
        return Err(Error::NonArchimedean(format!(
            "order-unit norms need an Archimedean model, {} is not",
            x.model().name()
        )));
    }
    let e = apply_term(x, &Term::unit(t.arity())?)?;
    let value = apply_term(x, t)?;
    let nf = normalize(t)?;
    let bound = nf_sup(&nf).max(nf_sup(&nf.negate(u64::MAX)?));
    let ctx = OrderUnitContext::new(e)?;
    let norm = ctx.norm(&value)?;
    let pass = norm <= bound;
    Ok(ContractivityReport { norm, bound, pass })
}
