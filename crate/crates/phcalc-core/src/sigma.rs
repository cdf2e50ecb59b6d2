//! Order reconstruction from a supremum oracle.
//!
//! A map sigma(x, y) purporting to compute x v y determines the whole order:
//! x <= y exactly when sigma(x, y) = y. This module derives the order from
//! such an oracle, audits the lattice axioms with exact arithmetic (any
//! failure ships a concrete witness), and measures agreement with the native
//! order of a model. It also contains the kernel non-closedness witness on
//! the germ model.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::calculus::{apply_quotient_calculus, apply_term, Tuple};
use crate::error::{Error, Result};
use crate::lp::nf_sup;
use crate::models::{GermClass, LatticeElement, ModelKind, PLFunc};
use crate::nf::normalize_with;
use crate::nf::NormalizeOptions;
use crate::phfn::PHFunction;
use crate::rat::{rat, rat_int, rat_str, Rat};
use crate::sampling::Sampler;
use crate::term::{Term, TermNode};

type SigmaFn = Arc<dyn Fn(&LatticeElement, &LatticeElement) -> Result<LatticeElement> + Send + Sync>;

/// A binary supremum oracle over one model.
pub struct SigmaOracle {
    model: ModelKind,
    label: String,
    sigma: SigmaFn,
}

/// Ways to deliberately break an oracle, for exercising the audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// sigma(x, y) = x + y. Fails reflexivity.
    Sum,
    /// sigma(x, y) = x. Fails symmetry.
    Left,
    /// sigma(x, y) = x ^ y. Satisfies every axiom (it is the supremum of
    /// the reversed order) but disagrees with the native order.
    Meet,
    /// sigma(x, y) = (x v y) + |x - y|. Fails the upper bound check.
    Shift,
}

impl Corruption {
    pub fn parse(s: &str) -> Result<Corruption> {
        match s {
            "sum" => Ok(Corruption::Sum),
            "left" => Ok(Corruption::Left),
            "meet" => Ok(Corruption::Meet),
            "shift" => Ok(Corruption::Shift),
            other => Err(Error::InvalidElement(format!(
                "unknown corruption {other:?}; expected sum, left, meet, or shift"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Corruption::Sum => "sum",
            Corruption::Left => "left",
            Corruption::Meet => "meet",
            Corruption::Shift => "shift",
        }
    }
}

fn join_term() -> Term {
    Term::new(
        2,
        TermNode::Join(Box::new(TermNode::Var(1)), Box::new(TermNode::Var(2))),
    )
    .expect("fixed arity-2 term")
}

impl SigmaOracle {
    /// The honest oracle: route x v y through the term calculus on the pair.
    pub fn from_model(model: ModelKind) -> SigmaOracle {
        let term = join_term();
        SigmaOracle {
            model,
            label: format!("calculus-join@{}", model.name()),
            sigma: Arc::new(move |x, y| {
                let t = Tuple::new(vec![x.clone(), y.clone()])?;
                apply_term(&t, &term)
            }),
        }
    }

    pub fn corrupted(model: ModelKind, c: Corruption) -> SigmaOracle {
        let honest = SigmaOracle::from_model(model);
        let sigma: SigmaFn = match c {
            Corruption::Sum => Arc::new(|x, y| x.add(y)),
            Corruption::Left => Arc::new(|x: &LatticeElement, _: &LatticeElement| Ok(x.clone())),
            Corruption::Meet => Arc::new(|x, y| x.meet(y)),
            Corruption::Shift => {
                let inner = honest.sigma.clone();
                Arc::new(move |x, y| {
                    let j = inner(x, y)?;
                    let diff = x.add(&y.scale(&rat_int(-1)))?;
                    j.add(&diff.abs())
                })
            }
        };
        SigmaOracle {
            model,
            label: format!("corrupted-{}@{}", c.name(), model.name()),
            sigma,
        }
    }

    /// Wrap an arbitrary closure as an oracle.
    pub fn custom<F>(model: ModelKind, label: impl Into<String>, f: F) -> SigmaOracle
    where
        F: Fn(&LatticeElement, &LatticeElement) -> Result<LatticeElement> + Send + Sync + 'static,
    {
        SigmaOracle {
            model,
            label: label.into(),
            sigma: Arc::new(f),
        }
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup(&self, x: &LatticeElement, y: &LatticeElement) -> Result<LatticeElement> {
        (self.sigma)(x, y)
    }
}

/// The order induced by the oracle: x <= y iff sigma(x, y) = y, decided by
/// exact model equality.
pub fn derive_leq(oracle: &SigmaOracle, x: &LatticeElement, y: &LatticeElement) -> Result<bool> {
    Ok(oracle.sup(x, y)? == *y)
}

/// The supremum according to the oracle; named for symmetry with derive_leq.
pub fn derive_sup(
    oracle: &SigmaOracle,
    x: &LatticeElement,
    y: &LatticeElement,
) -> Result<LatticeElement> {
    oracle.sup(x, y)
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub pass: bool,
    pub trials: usize,
    /// Display forms of the elements that broke the axiom, if any.
    pub witness: Option<Vec<String>>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub model: String,
    pub oracle: String,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<AxiomCheck>,
    pub all_pass: bool,
}

struct CheckState {
    name: &'static str,
    witness: Option<(Vec<String>, String)>,
}

impl CheckState {
    fn new(name: &'static str) -> Self {
        CheckState {
            name,
            witness: None,
        }
    }

    fn fail(&mut self, elems: &[&LatticeElement], detail: String) {
        if self.witness.is_none() {
            self.witness = Some((elems.iter().map(|e| e.to_string()).collect(), detail));
        }
    }

    fn into_check(self, trials: usize) -> AxiomCheck {
        let pass = self.witness.is_none();
        let (witness, detail) = match self.witness {
            Some((w, d)) => (Some(w), Some(d)),
            None => (None, None),
        };
        AxiomCheck {
            name: self.name.to_string(),
            pass,
            trials,
            witness,
            detail,
        }
    }
}

/// Audit the lattice axioms with exact arithmetic. Every check runs the full
/// trial count; the first counterexample per axiom is kept as the witness.
pub fn axiom_suite(oracle: &SigmaOracle, trials: usize, seed: u64, dim: usize) -> Result<AxiomReport> {
    let kind = oracle.model();
    let mut s = Sampler::new(seed);

    let mut reflexivity = CheckState::new("reflexivity");
    let mut symmetry = CheckState::new("symmetry");
    let mut associativity = CheckState::new("associativity");
    let mut homogeneity = CheckState::new("positive-homogeneity");
    let mut translation = CheckState::new("translation-invariance");
    let mut upper = CheckState::new("upper-bound");
    let mut least = CheckState::new("least-upper-bound");

    for trial in 0..trials {
        let x = s.element(kind, dim);
        let y = s.element(kind, dim);
        let z = s.element(kind, dim);

        let sxx = oracle.sup(&x, &x)?;
        if sxx != x {
            reflexivity.fail(&[&x], format!("sigma(x, x) = {sxx}"));
        }

        let sxy = oracle.sup(&x, &y)?;
        let syx = oracle.sup(&y, &x)?;
        if sxy != syx {
            symmetry.fail(&[&x, &y], format!("sigma(x, y) = {sxy} but sigma(y, x) = {syx}"));
        }

        let assoc_l = oracle.sup(&sxy, &z)?;
        let assoc_r = oracle.sup(&x, &oracle.sup(&y, &z)?)?;
        if assoc_l != assoc_r {
            associativity.fail(
                &[&x, &y, &z],
                format!("sigma(sigma(x, y), z) = {assoc_l} but sigma(x, sigma(y, z)) = {assoc_r}"),
            );
        }

        let lam = if trial % 4 == 0 {
            Rat::zero()
        } else {
            s.rat_nonneg()
        };
        let scaled = oracle.sup(&x.scale(&lam), &y.scale(&lam))?;
        let expect = sxy.scale(&lam);
        if scaled != expect {
            homogeneity.fail(
                &[&x, &y],
                format!("lambda = {}, sigma(lx, ly) = {scaled}, l sigma(x, y) = {expect}", rat_str(&lam)),
            );
        }

        let shifted = oracle.sup(&x.add(&z)?, &y.add(&z)?)?;
        let expect = sxy.add(&z)?;
        if shifted != expect {
            translation.fail(
                &[&x, &y, &z],
                format!("sigma(x+z, y+z) = {shifted}, sigma(x, y)+z = {expect}"),
            );
        }

        if !derive_leq(oracle, &x, &sxy)? {
            upper.fail(&[&x, &y], format!("sigma(x, y) = {sxy} is not above x in the derived order"));
        } else if !derive_leq(oracle, &y, &sxy)? {
            upper.fail(&[&x, &y], format!("sigma(x, y) = {sxy} is not above y in the derived order"));
        }

        // candidate upper bounds: sigma(x, y) plus a nonnegative perturbation,
        // and sigma with a third element absorbed
        let candidates = [sxy.add(&s.element_nonneg(kind, dim))?, oracle.sup(&sxy, &z)?];
        for cand in candidates {
            let is_ub = derive_leq(oracle, &x, &cand)? && derive_leq(oracle, &y, &cand)?;
            if is_ub && !derive_leq(oracle, &sxy, &cand)? {
                least.fail(
                    &[&x, &y, &cand],
                    format!("z is an upper bound of x and y but sigma(x, y) = {sxy} is not below it"),
                );
                break;
            }
        }
    }

    let checks = vec![
        reflexivity.into_check(trials),
        symmetry.into_check(trials),
        associativity.into_check(trials),
        homogeneity.into_check(trials),
        translation.into_check(trials),
        upper.into_check(trials),
        least.into_check(trials),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(AxiomReport {
        model: kind.name().to_string(),
        oracle: oracle.label().to_string(),
        seed,
        trials,
        checks,
        all_pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub model: String,
    pub oracle: String,
    pub seed: u64,
    pub trials: usize,
    pub agreements: usize,
    pub pass: bool,
    pub witness: Option<Vec<String>>,
}

/// Compare the derived order against the model's native comparison on random
/// pairs. The honest oracle must agree on every pair.
pub fn reconstruction_fidelity(
    oracle: &SigmaOracle,
    trials: usize,
    seed: u64,
    dim: usize,
) -> Result<FidelityReport> {
    let kind = oracle.model();
    let mut s = Sampler::new(seed);
    let mut agreements = 0usize;
    let mut witness = None;
    for i in 0..trials {
        // mix raw pairs with pairs forced to be comparable
        let x = s.element(kind, dim);
        let y = if i % 3 == 0 {
            x.add(&s.element_nonneg(kind, dim))?
        } else {
            s.element(kind, dim)
        };
        let derived = derive_leq(oracle, &x, &y)?;
        let native = x.leq(&y)?;
        if derived == native {
            agreements += 1;
        } else if witness.is_none() {
            witness = Some(vec![
                x.to_string(),
                y.to_string(),
                format!("derived {derived}, native {native}"),
            ]);
        }
    }
    Ok(FidelityReport {
        model: kind.name().to_string(),
        oracle: oracle.label().to_string(),
        seed,
        trials,
        agreements,
        pass: agreements == trials,
        witness,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelStage {
    pub m: u64,
    /// the perturbed function vanishes on the tuple
    pub in_kernel: bool,
    /// exact sup distance to the limit function, as a string
    pub distance: String,
    pub distance_leq_inv_m: bool,
    /// m * (value of the limit function) still sits below the unit
    pub scaled_below_unit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelWitnessReport {
    pub limit_term: String,
    pub family_term: String,
    pub tuple: Vec<String>,
    pub image: String,
    pub image_nonzero: bool,
    pub stages: Vec<KernelStage>,
    pub pass: bool,
}

fn pos_part(n: TermNode) -> TermNode {
    TermNode::Join(Box::new(n), Box::new(TermNode::Scale(Rat::zero(), Box::new(TermNode::Var(1)))))
}

/// The kernel of the evaluation map is not closed: a family of functions
/// vanishing on the tuple converges uniformly to one that does not vanish.
/// Every claim below is checked with exact arithmetic.
pub fn kernel_nonclosed_witness(ms: &[u64]) -> Result<KernelWitnessReport> {
    let h = PLFunc::from_breakpoints(vec![
        (Rat::zero(), Rat::zero()),
        (rat_int(1), rat_int(1)),
    ])?;
    let one = PLFunc::constant(rat_int(1));
    let z = Tuple::new(vec![
        LatticeElement::Germ(GermClass::new(h.clone())),
        LatticeElement::Germ(GermClass::new(one)),
    ])?;

    // f = (t1 v 0) ^ (t2 v 0)
    let f = Term::new(
        2,
        TermNode::Meet(
            Box::new(pos_part(TermNode::Var(1))),
            Box::new(pos_part(TermNode::Var(2))),
        ),
    )?;
    let f_of = |m: u64| -> Result<Term> {
        // f_m = ((t1 - (1/m) t2) v 0) ^ (t2 v 0)
        let shaved = TermNode::Sum(
            Box::new(TermNode::Var(1)),
            Box::new(TermNode::Scale(-rat(1, m as i64), Box::new(TermNode::Var(2)))),
        );
        Term::new(
            2,
            TermNode::Meet(Box::new(pos_part(shaved)), Box::new(pos_part(TermNode::Var(2)))),
        )
    };

    let image = apply_quotient_calculus(&z, &PHFunction::from_term(&f)?)?;
    let image_nonzero = !image.is_zero();
    let unit = z.order_unit()?;

    // exact sup distances need no pruning; the forms stay tiny
    let opts = NormalizeOptions {
        lp_prune_max_clauses: 0,
        ..NormalizeOptions::default()
    };
    let nf_f = normalize_with(&f, &opts)?;

    let mut stages = Vec::with_capacity(ms.len());
    for &m in ms {
        let fm = f_of(m)?;
        let val = apply_quotient_calculus(&z, &PHFunction::from_term(&fm)?)?;
        let in_kernel = val.is_zero();

        let nf_fm = normalize_with(&fm, &opts)?;
        let budget = u64::MAX;
        let diff = nf_f.add(&nf_fm.scale(&rat_int(-1), budget)?, budget)?;
        let dist = nf_sup(&diff).max(nf_sup(&diff.negate(budget)?));
        let inv_m = rat(1, m as i64);

        let scaled = image.scale(&rat_int(m as i64));
        let scaled_below_unit = scaled.leq(&unit)?;

        stages.push(KernelStage {
            m,
            in_kernel,
            distance: rat_str(&dist),
            distance_leq_inv_m: dist <= inv_m,
            scaled_below_unit,
        });
    }

    let pass = image_nonzero
        && stages
            .iter()
            .all(|s| s.in_kernel && s.distance_leq_inv_m && s.scaled_below_unit);

    Ok(KernelWitnessReport {
        limit_term: format!("{f}"),
        family_term: "((p1 - (1/m) p2) v 0) ^ (p2 v 0)".to_string(),
        tuple: z.elements().iter().map(|e| e.to_string()).collect(),
        image: image.to_string(),
        image_nonzero,
        stages,
        pass,
    })
}
