//! Max-min normal form: joins of meets of exact linear forms.
//!
//! Every lattice-linear term equals `max_i min_j <c_ij, x>` for finitely many
//! rational coefficient vectors. The rewrite is purely distributive:
//!
//!   a + (b v c) = (a+b) v (a+c)        lambda * (b v c) = lambda*b v lambda*c   (lambda > 0)
//!   -(b v c)    = (-b) ^ (-c)          meets distribute over joins last
//!
//! Clause counts multiply under sums and negations, so every combining step
//! is guarded by a clause budget (default 100000, `PHCALC_CLAUSE_BUDGET`).

use crate::error::{Error, Result};
use crate::rat::{parse_rat, rat_str, rat_to_f64, rat_zero, Rat};
use crate::term::{Term, TermNode};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub const DEFAULT_CLAUSE_BUDGET: u64 = 100_000;

/// `<c, x> = c_1 x_1 + ... + c_n x_n` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    pub coeffs: Vec<Rat>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        LinearForm { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        LinearForm {
            coeffs: vec![rat_zero(); n],
        }
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut c = vec![rat_zero(); n];
        c[i - 1] = Rat::from_integer(1.into());
        LinearForm { coeffs: c }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = rat_zero();
        for (c, v) in self.coeffs.iter().zip(x) {
            if !c.is_zero() {
                acc += c * v;
            }
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| rat_to_f64(c) * v)
            .sum()
    }

    /// l1 norm of the coefficients: a Lipschitz constant w.r.t. the sup metric.
    pub fn l1_norm(&self) -> Rat {
        let mut acc = rat_zero();
        for c in &self.coeffs {
            acc += c.abs();
        }
        acc
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn negate(&self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

/// Join of meets of linear forms, canonically ordered.
///
/// Invariants: at least one clause, every clause nonempty, forms within a
/// clause sorted and distinct, clauses sorted and distinct. Two normal forms
/// representing the same function through the same clause set compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "NfWire", try_from = "NfWire")]
pub struct MaxMinNF {
    arity: usize,
    clauses: Vec<Vec<LinearForm>>,
}

#[derive(Serialize, Deserialize)]
struct NfWire {
    n: usize,
    clauses: Vec<Vec<Vec<String>>>,
}

impl From<MaxMinNF> for NfWire {
    fn from(nf: MaxMinNF) -> NfWire {
        NfWire {
            n: nf.arity,
            clauses: nf
                .clauses
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|f| f.coeffs.iter().map(rat_str).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<NfWire> for MaxMinNF {
    type Error = Error;

    fn try_from(w: NfWire) -> Result<MaxMinNF> {
        let mut clauses = Vec::with_capacity(w.clauses.len());
        for c in &w.clauses {
            let mut forms = Vec::with_capacity(c.len());
            for f in c {
                if f.len() != w.n {
                    return Err(Error::Dimension(format!(
                        "form has {} coefficients, n is {}",
                        f.len(),
                        w.n
                    )));
                }
                let coeffs: Result<Vec<Rat>> = f.iter().map(|s| parse_rat(s)).collect();
                forms.push(LinearForm::new(coeffs?));
            }
            clauses.push(forms);
        }
        MaxMinNF::from_clauses(w.n, clauses)
    }
}

impl MaxMinNF {
    /// Canonicalizes (sorts, dedups, absorbs superset clauses). Rejects empty
    /// clause lists and empty clauses.
    pub fn from_clauses(arity: usize, clauses: Vec<Vec<LinearForm>>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity("arity must be at least 1".into()));
        }
        if clauses.is_empty() || clauses.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidElement("empty clause in normal form".into()));
        }
        for c in &clauses {
            for f in c {
                if f.coeffs.len() != arity {
                    return Err(Error::Dimension(format!(
                        "form has {} coefficients, arity is {}",
                        f.coeffs.len(),
                        arity
                    )));
                }
            }
        }
        let mut nf = MaxMinNF { arity, clauses };
        nf.canonicalize();
        Ok(nf)
    }

    pub fn single_form(arity: usize, f: LinearForm) -> Result<Self> {
        MaxMinNF::from_clauses(arity, vec![vec![f]])
    }

    pub fn coordinate(arity: usize, i: usize) -> Result<Self> {
        if i == 0 || i > arity {
            return Err(Error::Arity(format!("coordinate {i} out of 1..={arity}")));
        }
        MaxMinNF::single_form(arity, LinearForm::coordinate(arity, i))
    }

    pub fn zero(arity: usize) -> Self {
        MaxMinNF {
            arity,
            clauses: vec![vec![LinearForm::zero(arity)]],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn clauses(&self) -> &[Vec<LinearForm>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn form_count(&self) -> usize {
        self.clauses.iter().map(|c| c.len()).sum()
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.arity {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, arity is {}",
                x.len(),
                self.arity
            )));
        }
        let mut best: Option<Rat> = None;
        for clause in &self.clauses {
            let mut m: Option<Rat> = None;
            for f in clause {
                let v = f.eval(x);
                m = Some(match m {
                    None => v,
                    Some(cur) => cur.min(v),
                });
            }
            let m = m.unwrap();
            best = Some(match best {
                None => m,
                Some(cur) => cur.max(m),
            });
        }
        Ok(best.unwrap())
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for clause in &self.clauses {
            let mut m = f64::INFINITY;
            for f in clause {
                m = m.min(f.eval_f64(x));
            }
            best = best.max(m);
        }
        best
    }

    /// Snapshot the coefficients as f64 once, for evaluation loops over many
    /// points where the per-call rational conversion would dominate.
    pub fn to_float(&self) -> FloatNF {
        FloatNF {
            clauses: self
                .clauses
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|f| f.coeffs.iter().map(rat_to_f64).collect())
                        .collect()
                })
                .collect(),
        }
    }

    /// Largest l1 norm over all forms: a Lipschitz constant for the whole
    /// normal form w.r.t. the sup metric (max/min of L-Lipschitz maps).
    pub fn max_l1(&self) -> Rat {
        let mut best = rat_zero();
        for c in &self.clauses {
            for f in c {
                let l = f.l1_norm();
                if l > best {
                    best = l;
                }
            }
        }
        best
    }

    fn canonicalize(&mut self) {
        for clause in &mut self.clauses {
            clause.sort();
            clause.dedup();
        }
        self.clauses.sort();
        self.clauses.dedup();
        // a clause whose form set contains another clause's is dominated:
        // min over the superset is pointwise <= min over the subset. The
        // quadratic sweep is skipped for bulk normal forms (net-generated
        // approximants), where it would dominate the build time.
        let total_forms: usize = self.clauses.iter().map(|c| c.len()).sum();
        if self.clauses.len() > 1 && self.clauses.len() <= 4096 && total_forms <= 4096 {
            let old = std::mem::take(&mut self.clauses);
            let keep: Vec<bool> = (0..old.len())
                .map(|i| {
                    !(0..old.len()).any(|j| {
                        j != i
                            && old[j].len() <= old[i].len()
                            && (old[j].len() < old[i].len() || j < i)
                            && is_subset(&old[j], &old[i])
                    })
                })
                .collect();
            self.clauses = old
                .into_iter()
                .zip(keep)
                .filter_map(|(c, k)| k.then_some(c))
                .collect();
        }
    }

    /// Join (pointwise max) of two normal forms.
    pub fn join(&self, other: &MaxMinNF, budget: u64) -> Result<MaxMinNF> {
        self.check_same_arity(other)?;
        check_budget(self.clauses.len() as u128 + other.clauses.len() as u128, budget)?;
        let mut clauses = self.clauses.clone();
        clauses.extend(other.clauses.iter().cloned());
        MaxMinNF::from_clauses(self.arity, clauses)
    }

    /// Meet (pointwise min): distributes over the joins, clause pairs merge.
    pub fn meet(&self, other: &MaxMinNF, budget: u64) -> Result<MaxMinNF> {
        self.check_same_arity(other)?;
        check_budget(
            self.clauses.len() as u128 * other.clauses.len() as u128,
            budget,
        )?;
        let mut clauses = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for a in &self.clauses {
            for b in &other.clauses {
                let mut c = a.clone();
                c.extend(b.iter().cloned());
                clauses.push(c);
            }
        }
        MaxMinNF::from_clauses(self.arity, clauses)
    }

    /// Pointwise sum: `min A + min B = min over pairs (a+b)`, clauses cross.
    pub fn add(&self, other: &MaxMinNF, budget: u64) -> Result<MaxMinNF> {
        self.check_same_arity(other)?;
        check_budget(
            self.clauses.len() as u128 * other.clauses.len() as u128,
            budget,
        )?;
        let mut clauses = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for a in &self.clauses {
            for b in &other.clauses {
                let mut c = Vec::with_capacity(a.len() * b.len());
                for fa in a {
                    for fb in b {
                        c.push(fa.add(fb));
                    }
                }
                clauses.push(c);
            }
        }
        MaxMinNF::from_clauses(self.arity, clauses)
    }

    /// Scaling by any rational; negative factors swap join and meet.
    pub fn scale(&self, c: &Rat, budget: u64) -> Result<MaxMinNF> {
        if c.is_zero() {
            return Ok(MaxMinNF::zero(self.arity));
        }
        if c.is_positive() {
            let clauses = self
                .clauses
                .iter()
                .map(|cl| cl.iter().map(|f| f.scale(c)).collect())
                .collect();
            return MaxMinNF::from_clauses(self.arity, clauses);
        }
        self.negate(budget)?.scale(&-c.clone(), budget)
    }

    /// `-(max_i min_j L_ij) = max over selections s of min_i (-L_{i,s(i)})`.
    ///
    /// The selection count is the product of the clause sizes, hence the
    /// budget check before anything is materialized.
    pub fn negate(&self, budget: u64) -> Result<MaxMinNF> {
        let mut selections: u128 = 1;
        for c in &self.clauses {
            selections = selections.saturating_mul(c.len() as u128);
            check_budget(selections, budget)?;
        }
        let mut clauses = Vec::with_capacity(selections as usize);
        let mut idx = vec![0usize; self.clauses.len()];
        loop {
            let clause: Vec<LinearForm> = self
                .clauses
                .iter()
                .zip(&idx)
                .map(|(c, &i)| c[i].negate())
                .collect();
            clauses.push(clause);
            // odometer
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return MaxMinNF::from_clauses(self.arity, clauses);
                }
                idx[k] += 1;
                if idx[k] < self.clauses[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Rebuild a term whose normalization is this normal form (up to pointwise
    /// equality); used for symbolic composition.
    pub fn to_term(&self) -> Term {
        let form_term = |f: &LinearForm| -> TermNode {
            let mut acc: Option<TermNode> = None;
            for (i, c) in f.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let t = TermNode::scale(c.clone(), TermNode::Var(i + 1));
                acc = Some(match acc {
                    None => t,
                    Some(prev) => TermNode::sum(prev, t),
                });
            }
            acc.unwrap_or_else(TermNode::zero)
        };
        let mut join: Option<TermNode> = None;
        for clause in &self.clauses {
            let mut meet: Option<TermNode> = None;
            for f in clause {
                let t = form_term(f);
                meet = Some(match meet {
                    None => t,
                    Some(prev) => TermNode::meet(prev, t),
                });
            }
            let m = meet.unwrap();
            join = Some(match join {
                None => m,
                Some(prev) => TermNode::join(prev, m),
            });
        }
        Term::new(self.arity, join.unwrap()).expect("normal form arity is valid")
    }

    fn check_same_arity(&self, other: &MaxMinNF) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Arity(format!(
                "mixed arities {} and {}",
                self.arity, other.arity
            )));
        }
        Ok(())
    }
}

/// Plain f64 image of a [`MaxMinNF`], produced by [`MaxMinNF::to_float`].
#[derive(Debug, Clone)]
pub struct FloatNF {
    clauses: Vec<Vec<Vec<f64>>>,
}

impl FloatNF {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for clause in &self.clauses {
            let mut m = f64::INFINITY;
            for coeffs in clause {
                m = m.min(coeffs.iter().zip(x).map(|(c, v)| c * v).sum());
            }
            best = best.max(m);
        }
        best
    }
}

fn is_subset(small: &[LinearForm], big: &[LinearForm]) -> bool {
    // both sorted
    let mut i = 0;
    for f in big {
        if i == small.len() {
            return true;
        }
        if &small[i] == f {
            i += 1;
        }
    }
    i == small.len()
}

fn check_budget(count: u128, budget: u64) -> Result<()> {
    if count > budget as u128 {
        return Err(Error::Resource {
            what: "clause budget during normalization".into(),
            count: count.min(u64::MAX as u128) as u64,
            limit: budget,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct NormalizeOptions {
    pub clause_budget: u64,
    /// Dominance pruning via exact face maximization runs only below this
    /// clause count; above it only syntactic pruning applies.
    pub lp_prune_max_clauses: usize,
    pub lp_prune_max_forms: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        let clause_budget = std::env::var("PHCALC_CLAUSE_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_CLAUSE_BUDGET);
        NormalizeOptions {
            clause_budget,
            lp_prune_max_clauses: 64,
            lp_prune_max_forms: 16,
        }
    }
}

pub fn normalize(t: &Term) -> Result<MaxMinNF> {
    normalize_with(t, &NormalizeOptions::default())
}

pub fn normalize_with(t: &Term, opts: &NormalizeOptions) -> Result<MaxMinNF> {
    let nf = normalize_node(t.root(), t.arity(), opts.clause_budget)?;
    Ok(crate::lp::prune_dominated(nf, opts))
}

fn normalize_node(t: &TermNode, arity: usize, budget: u64) -> Result<MaxMinNF> {
    match t {
        TermNode::Var(i) => MaxMinNF::coordinate(arity, *i),
        TermNode::Scale(c, a) => normalize_node(a, arity, budget)?.scale(c, budget),
        TermNode::Sum(a, b) => {
            let na = normalize_node(a, arity, budget)?;
            let nb = normalize_node(b, arity, budget)?;
            na.add(&nb, budget)
        }
        TermNode::Join(a, b) => {
            let na = normalize_node(a, arity, budget)?;
            let nb = normalize_node(b, arity, budget)?;
            na.join(&nb, budget)
        }
        TermNode::Meet(a, b) => {
            let na = normalize_node(a, arity, budget)?;
            let nb = normalize_node(b, arity, budget)?;
            na.meet(&nb, budget)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn forms(nf: &MaxMinNF) -> Vec<Vec<Vec<Rat>>> {
        nf.clauses()
            .iter()
            .map(|c| c.iter().map(|f| f.coeffs.clone()).collect())
            .collect()
    }

    #[test]
    fn join_of_coordinates() {
        let t = Term::parse(2, "p1 v p2").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(
            forms(&nf),
            vec![
                vec![vec![rat_int(0), rat_int(1)]],
                vec![vec![rat_int(1), rat_int(0)]],
            ]
        );
    }

    #[test]
    fn sum_distributes_over_join() {
        let t = Term::parse(2, "p1 + (p2 v 0)").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(
            forms(&nf),
            vec![
                vec![vec![rat_int(1), rat_int(0)]],
                vec![vec![rat_int(1), rat_int(1)]],
            ]
        );
    }

    #[test]
    fn abs_in_one_variable() {
        let t = Term::parse(1, "|p1|").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(
            forms(&nf),
            vec![vec![vec![rat_int(-1)]], vec![vec![rat_int(1)]]]
        );
    }

    #[test]
    fn meet_with_absorbing_branch_prunes() {
        let t = Term::parse(2, "(p1 v p2) ^ p1").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(forms(&nf), vec![vec![vec![rat_int(1), rat_int(0)]]]);
    }

    #[test]
    fn negation_dualizes() {
        let t = Term::parse(2, "-(p1 v p2)").unwrap();
        let nf = normalize(&t).unwrap();
        // -(p1 v p2) = (-p1) ^ (-p2): one clause, two forms
        assert_eq!(
            forms(&nf),
            vec![vec![
                vec![rat_int(-1), rat_int(0)],
                vec![rat_int(0), rat_int(-1)]
            ]]
        );
    }

    #[test]
    fn normalization_is_sound_on_a_grid() {
        let terms = [
            "p1 + (p2 v 0)",
            "(p1 v 2*p2) ^ (p1 - p2)",
            "|p1 - p2| + 1/2 * (p1 ^ p2)",
            "-(p1 v p2) + |p1|",
            "(p1 ^ p2) v (p2 ^ -3/2 * p1)",
        ];
        for src in terms {
            let t = Term::parse(2, src).unwrap();
            let nf = normalize(&t).unwrap();
            for i in -10..=10 {
                for j in -10..=10 {
                    let x = [rat(i, 10), rat(j, 10)];
                    assert_eq!(t.eval(&x).unwrap(), nf.eval(&x).unwrap(), "{src} at {x:?}");
                }
            }
        }
    }

    #[test]
    fn scale_zero_is_zero() {
        let t = Term::parse(2, "0 * (p1 v p2)").unwrap();
        let nf = normalize(&t).unwrap();
        assert_eq!(forms(&nf), vec![vec![vec![rat_int(0), rat_int(0)]]]);
    }

    #[test]
    fn budget_is_enforced() {
        // (p1 v p2) + (p1 v p2) + ... doubles clauses each time
        let mut src = String::from("(p1 v p2)");
        for _ in 0..6 {
            src = format!("({src}) + ({src})");
        }
        let t = Term::parse(2, &src).unwrap();
        let opts = NormalizeOptions {
            clause_budget: 100,
            ..Default::default()
        };
        match normalize_with(&t, &opts) {
            Err(Error::Resource { .. }) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn json_wire_roundtrip() {
        let t = Term::parse(2, "(p1 v -3/2 * p2) ^ |p2|").unwrap();
        let nf = normalize(&t).unwrap();
        let js = serde_json::to_string(&nf).unwrap();
        let back: MaxMinNF = serde_json::from_str(&js).unwrap();
        assert_eq!(nf, back);
        // deterministic bytes
        assert_eq!(js, serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn to_term_roundtrip() {
        let t = Term::parse(3, "(p1 v p2) ^ (p3 + 2 * p1)").unwrap();
        let nf = normalize(&t).unwrap();
        let t2 = nf.to_term();
        let nf2 = normalize(&t2).unwrap();
        for i in -2..=2 {
            for j in -2..=2 {
                for k in -2..=2 {
                    let x = [rat(i, 2), rat(j, 2), rat(k, 2)];
                    assert_eq!(nf.eval(&x).unwrap(), nf2.eval(&x).unwrap());
                }
            }
        }
    }
}
