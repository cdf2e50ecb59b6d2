//! Positively homogeneous continuous functions on R^n.
//!
//! The lattice-term fragment is carried exactly as a [`MaxMinNF`]; everything
//! else (p-norms, user evaluators) lives in floating point with a declared
//! Lipschitz constant relative to the sup norm on the unit sphere.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nf::{normalize, MaxMinNF};
use crate::rat::{parse_rat, rat_str, rat_to_f64, Rat};
use crate::term::Term;

/// Evaluator is deterministic and must be positively homogeneous; both claims
/// are spot-audited at construction time.
pub type BoxedEval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum PHKind {
    /// The coordinate projection `p_i` (1-based).
    Coordinate(usize),
    /// An exact max-min normal form.
    LatticeTerm(MaxMinNF),
    /// `t -> (sum_i w_i |t_i|^p)^(1/p)` with `p >= 1` and `w_i >= 0`.
    PNormCombo { p: f64, weights: Vec<Rat> },
    /// Caller-supplied evaluator with a label for diagnostics.
    BlackBox { label: String, f: BoxedEval },
}

impl fmt::Debug for PHKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PHKind::Coordinate(i) => write!(f, "Coordinate({i})"),
            PHKind::LatticeTerm(nf) => write!(
                f,
                "LatticeTerm({} clauses, {} forms)",
                nf.clause_count(),
                nf.form_count()
            ),
            PHKind::PNormCombo { p, weights } => {
                write!(f, "PNormCombo(p={p}, {} weights)", weights.len())
            }
            PHKind::BlackBox { label, .. } => write!(f, "BlackBox({label})"),
        }
    }
}

/// A positively homogeneous continuous function together with a Lipschitz
/// bound on the unit sphere of the sup norm.
#[derive(Debug, Clone)]
pub struct PHFunction {
    arity: usize,
    kind: PHKind,
    lipschitz: f64,
    nonneg: bool,
}

/// Small relative padding applied when a Lipschitz constant is derived from
/// exact data, so the stored f64 never under-reports.
const LIP_PAD: f64 = 1.0 + 1e-12;

const AUDIT_TRIALS: usize = 16;
const AUDIT_SEED: u64 = 0x5eed_0001;

impl PHFunction {
    pub fn coordinate(arity: usize, i: usize) -> Result<Self> {
        if arity == 0 || i == 0 || i > arity {
            return Err(Error::Arity(format!(
                "coordinate index {i} out of range for arity {arity}"
            )));
        }
        Ok(PHFunction {
            arity,
            kind: PHKind::Coordinate(i),
            lipschitz: 1.0,
            nonneg: false,
        })
    }

    pub fn lattice_term(nf: MaxMinNF) -> Self {
        let lip = rat_to_f64(&nf.max_l1()) * LIP_PAD;
        PHFunction {
            arity: nf.arity(),
            kind: PHKind::LatticeTerm(nf),
            lipschitz: lip,
            nonneg: false,
        }
    }

    /// Normalize a term and wrap the result.
    pub fn from_term(t: &Term) -> Result<Self> {
        Ok(Self::lattice_term(normalize(t)?))
    }

    pub fn pnorm(arity: usize, p: f64, weights: Vec<Rat>) -> Result<Self> {
        if arity == 0 || weights.len() != arity {
            return Err(Error::Arity(format!(
                "{} weights for arity {arity}",
                weights.len()
            )));
        }
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidElement(format!(
                "p-norm exponent must be a finite value >= 1, got {p}"
            )));
        }
        let mut total = 0.0;
        for w in &weights {
            let wf = rat_to_f64(w);
            if wf < 0.0 {
                return Err(Error::InvalidElement(
                    "p-norm weights must be nonnegative".into(),
                ));
            }
            total += wf;
        }
        let lipschitz = total.powf(1.0 / p) * LIP_PAD;
        Ok(PHFunction {
            arity,
            kind: PHKind::PNormCombo { p, weights },
            lipschitz,
            nonneg: true,
        })
    }

    /// The Euclidean norm on R^n.
    pub fn euclidean(arity: usize) -> Result<Self> {
        Self::pnorm(arity, 2.0, vec![Rat::from_integer(1.into()); arity])
    }

    /// Wrap a caller-supplied evaluator. Positive homogeneity and the declared
    /// Lipschitz constant are spot-audited; violations are rejected here
    /// rather than surfacing later as silently wrong certificates.
    pub fn black_box<F>(arity: usize, label: &str, lipschitz: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if arity == 0 {
            return Err(Error::Arity("arity must be at least 1".into()));
        }
        if !lipschitz.is_finite() || lipschitz < 0.0 {
            return Err(Error::Lipschitz(format!(
                "declared Lipschitz constant {lipschitz} is not a finite nonnegative value"
            )));
        }
        let out = PHFunction {
            arity,
            kind: PHKind::BlackBox {
                label: label.to_string(),
                f: Arc::new(f),
            },
            lipschitz,
            nonneg: false,
        };
        out.audit_homogeneity(AUDIT_TRIALS, AUDIT_SEED)?;
        out.audit_lipschitz(AUDIT_TRIALS, AUDIT_SEED ^ 1)?;
        Ok(out)
    }

    /// Record that the function is known to be nonnegative everywhere. The
    /// approximation pipeline can skip its shift step for such targets.
    pub fn assert_nonneg(mut self) -> Self {
        self.nonneg = true;
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &PHKind {
        &self.kind
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    /// The exact normal form, when the function is in the lattice fragment.
    pub fn as_nf(&self) -> Option<&MaxMinNF> {
        match &self.kind {
            PHKind::LatticeTerm(nf) => Some(nf),
            _ => None,
        }
    }

    pub fn eval_f64(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.arity {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, function arity is {}",
                t.len(),
                self.arity
            )));
        }
        Ok(match &self.kind {
            PHKind::Coordinate(i) => t[*i - 1],
            PHKind::LatticeTerm(nf) => nf.eval_f64(t),
            PHKind::PNormCombo { p, weights } => pnorm_eval(*p, weights, t),
            PHKind::BlackBox { f, .. } => f(t),
        })
    }

    /// Exact evaluation, available for the coordinate and lattice-term kinds.
    pub fn eval_exact(&self, t: &[Rat]) -> Result<Option<Rat>> {
        if t.len() != self.arity {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, function arity is {}",
                t.len(),
                self.arity
            )));
        }
        Ok(match &self.kind {
            PHKind::Coordinate(i) => Some(t[*i - 1].clone()),
            PHKind::LatticeTerm(nf) => Some(nf.eval(t)?),
            _ => None,
        })
    }

    /// Check `f(lam * s) = lam * f(s)` for `lam` in `{0, 1/2, 2}` at random
    /// points. Exact kinds are checked in rational arithmetic, floating kinds
    /// within 1e-12 relative tolerance.
    pub fn audit_homogeneity(&self, trials: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambdas = [0.0, 0.5, 2.0];
        for _ in 0..trials {
            let s: Vec<f64> = (0..self.arity)
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect();
            let fs = self.eval_f64(&s)?;
            for lam in lambdas {
                let scaled: Vec<f64> = s.iter().map(|c| lam * c).collect();
                let lhs = self.eval_f64(&scaled)?;
                let rhs = lam * fs;
                let tol = 1e-12 * (1.0 + lhs.abs() + rhs.abs());
                if (lhs - rhs).abs() > tol {
                    return Err(Error::NotHomogeneous(format!(
                        "f(lam*s) = {lhs} but lam*f(s) = {rhs} at lam = {lam}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Check `|f(p) - f(q)| <= lipschitz * ||p - q||_inf` on random sphere
    /// pairs, with a 1e-9 absolute slack for floating evaluation.
    pub fn audit_lipschitz(&self, trials: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let p = random_sphere_point(&mut rng, self.arity);
            let q = random_sphere_point(&mut rng, self.arity);
            let dist = p
                .iter()
                .zip(&q)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let gap = (self.eval_f64(&p)? - self.eval_f64(&q)?).abs();
            if gap > self.lipschitz * dist + 1e-9 {
                return Err(Error::Lipschitz(format!(
                    "observed slope {} exceeds declared constant {}",
                    gap / dist.max(1e-300),
                    self.lipschitz
                )));
            }
        }
        Ok(())
    }

    /// Serializable description. Black boxes keep only their label; the
    /// evaluator itself cannot round-trip.
    pub fn descriptor(&self) -> PHDescriptor {
        match &self.kind {
            PHKind::Coordinate(i) => PHDescriptor::Coordinate {
                n: self.arity,
                i: *i,
            },
            PHKind::LatticeTerm(nf) => PHDescriptor::Term { nf: nf.clone() },
            PHKind::PNormCombo { p, weights } => PHDescriptor::Pnorm {
                n: self.arity,
                p: *p,
                weights: weights.iter().map(rat_str).collect(),
            },
            PHKind::BlackBox { label, .. } => PHDescriptor::Blackbox {
                n: self.arity,
                label: label.clone(),
                lipschitz: self.lipschitz,
            },
        }
    }

    /// Rebuild from a descriptor. Fails for black boxes, whose evaluator is
    /// not serializable.
    pub fn from_descriptor(d: &PHDescriptor) -> Result<Self> {
        match d {
            PHDescriptor::Coordinate { n, i } => Self::coordinate(*n, *i),
            PHDescriptor::Term { nf } => Ok(Self::lattice_term(nf.clone())),
            PHDescriptor::Pnorm { n, p, weights } => {
                let ws = weights
                    .iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<Vec<_>>>()?;
                Self::pnorm(*n, *p, ws)
            }
            PHDescriptor::Blackbox { label, .. } => Err(Error::Unsupported(format!(
                "cannot reconstruct black box '{label}' from its descriptor"
            ))),
        }
    }
}

fn pnorm_eval(p: f64, weights: &[Rat], t: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (w, c) in weights.iter().zip(t) {
        let wf = rat_to_f64(w);
        if wf != 0.0 {
            acc += wf * c.abs().powf(p);
        }
    }
    acc.powf(1.0 / p)
}

fn random_sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let m = v.iter().map(|c| c.abs()).fold(0.0f64, f64::max);
        if m > 1e-3 {
            return v.iter().map(|c| c / m).collect();
        }
    }
}

/// Extend a function given on the unit sphere to all of R^n by positive
/// homogeneity: `t -> ||t||_inf * f(t / ||t||_inf)`, and 0 at the origin.
pub fn extend_by_homogeneity<F>(f: F, t: &[f64]) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let m = t.iter().map(|c| c.abs()).fold(0.0f64, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let unit: Vec<f64> = t.iter().map(|c| c / m).collect();
    m * f(&unit)
}

/// Serializable shape of a [`PHFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PHDescriptor {
    Coordinate { n: usize, i: usize },
    Term { nf: MaxMinNF },
    Pnorm { n: usize, p: f64, weights: Vec<String> },
    Blackbox { n: usize, label: String, lipschitz: f64 },
}

/// The map `t -> (f_1(t), ..., f_m(t))`.
#[derive(Debug, Clone)]
pub struct ProductMap {
    components: Vec<PHFunction>,
}

impl ProductMap {
    pub fn new(components: Vec<PHFunction>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Arity("product map needs at least one component".into()))?;
        let n = first.arity();
        for c in &components {
            if c.arity() != n {
                return Err(Error::Arity(format!(
                    "component arities differ: {} vs {n}",
                    c.arity()
                )));
            }
        }
        Ok(ProductMap { components })
    }

    pub fn arity(&self) -> usize {
        self.components[0].arity()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &[PHFunction] {
        &self.components
    }

    pub fn eval_f64(&self, t: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval_f64(t)).collect()
    }

    /// Exact componentwise evaluation, when every component supports it.
    pub fn eval_exact(&self, t: &[Rat]) -> Result<Option<Vec<Rat>>> {
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            match c.eval_exact(t)? {
                Some(v) => out.push(v),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Compose `g` with the product map of `fs`. When everything lives in the
/// lattice fragment the composition is carried out symbolically and the
/// result is again an exact normal form; otherwise the result is a black box
/// evaluator with Lipschitz bound `Lip(g) * max_i Lip(f_i)`.
pub fn compose_ph(g: &PHFunction, fs: &[PHFunction]) -> Result<PHFunction> {
    if fs.len() != g.arity() {
        return Err(Error::Arity(format!(
            "outer function has arity {} but {} inner functions were given",
            g.arity(),
            fs.len()
        )));
    }
    let inner = ProductMap::new(fs.to_vec())?;
    let n = inner.arity();

    if let PHKind::Coordinate(i) = g.kind() {
        return Ok(fs[*i - 1].clone());
    }

    if let PHKind::LatticeTerm(gnf) = g.kind() {
        let all_terms: Option<Vec<Term>> = fs
            .iter()
            .map(|f| f.as_nf().map(|nf| nf.to_term()))
            .collect();
        if let Some(subs) = all_terms {
            let composed = gnf.to_term().substitute(&subs)?;
            return Ok(PHFunction::lattice_term(normalize(&composed)?));
        }
    }

    let max_inner = fs.iter().map(|f| f.lipschitz()).fold(0.0f64, f64::max);
    let lipschitz = g.lipschitz() * max_inner;
    let gc = g.clone();
    let label = format!("compose({:?})", gc.kind());
    let eval = move |t: &[f64]| {
        let mid = inner.eval_f64(t).expect("arity checked at construction");
        gc.eval_f64(&mid).expect("arity checked at construction")
    };
    // Built directly instead of through `black_box`: the composition of
    // audited functions is positively homogeneous by construction, and
    // re-auditing here would reject nothing the constructors did not.
    Ok(PHFunction {
        arity: n,
        kind: PHKind::BlackBox {
            label,
            f: Arc::new(eval),
        },
        lipschitz,
        nonneg: g.is_nonneg(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use num_traits::Signed;

    #[test]
    fn coordinate_evaluates_and_validates() {
        let f = PHFunction::coordinate(3, 2).unwrap();
        assert_eq!(f.eval_f64(&[5.0, -7.0, 1.0]).unwrap(), -7.0);
        assert_eq!(
            f.eval_exact(&[rat_int(5), rat(-7, 2), rat_int(1)])
                .unwrap()
                .unwrap(),
            rat(-7, 2)
        );
        assert!(PHFunction::coordinate(3, 0).is_err());
        assert!(PHFunction::coordinate(3, 4).is_err());
        assert!(f.eval_f64(&[1.0]).is_err());
    }

    #[test]
    fn euclidean_norm_values() {
        let f = PHFunction::euclidean(2).unwrap();
        assert!((f.eval_f64(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
        assert!((f.eval_f64(&[1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.eval_f64(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(f.is_nonneg());
        assert!(f.lipschitz() >= 2f64.sqrt());
    }

    #[test]
    fn weighted_pnorm_values() {
        let f = PHFunction::pnorm(2, 1.0, vec![rat_int(1), rat_int(1)]).unwrap();
        assert!((f.eval_f64(&[3.0, -4.0]).unwrap() - 7.0).abs() < 1e-12);
        let g = PHFunction::pnorm(2, 2.0, vec![rat_int(4), rat_int(9)]).unwrap();
        let want = (4.0 * 9.0 + 9.0 * 16.0f64).sqrt();
        assert!((g.eval_f64(&[3.0, 4.0]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn pnorm_rejects_bad_parameters() {
        assert!(PHFunction::pnorm(2, 0.5, vec![rat_int(1), rat_int(1)]).is_err());
        assert!(PHFunction::pnorm(2, f64::INFINITY, vec![rat_int(1), rat_int(1)]).is_err());
        assert!(PHFunction::pnorm(2, 2.0, vec![rat_int(-1), rat_int(1)]).is_err());
        assert!(PHFunction::pnorm(2, 2.0, vec![rat_int(1)]).is_err());
    }

    #[test]
    fn builtins_pass_their_own_audits() {
        for f in [
            PHFunction::coordinate(3, 1).unwrap(),
            PHFunction::euclidean(3).unwrap(),
            PHFunction::pnorm(2, 3.0, vec![rat(1, 2), rat_int(2)]).unwrap(),
            PHFunction::from_term(&Term::parse(2, "(p1 v 0) + 1/2 * p2").unwrap()).unwrap(),
        ] {
            f.audit_homogeneity(32, 7).unwrap();
            f.audit_lipschitz(32, 8).unwrap();
        }
    }

    #[test]
    fn black_box_audit_rejects_inhomogeneous() {
        let err = PHFunction::black_box(2, "affine", 2.0, |t| t[0] + 1.0).unwrap_err();
        assert!(matches!(err, Error::NotHomogeneous(_)));
    }

    #[test]
    fn black_box_audit_rejects_bad_lipschitz() {
        let err = PHFunction::black_box(2, "steep", 1.0, |t| 10.0 * t[0]).unwrap_err();
        assert!(matches!(err, Error::Lipschitz(_)));
    }

    #[test]
    fn black_box_accepts_honest_declaration() {
        let f = PHFunction::black_box(2, "maxabs", 1.0, |t| {
            t.iter().map(|c| c.abs()).fold(0.0f64, f64::max)
        })
        .unwrap();
        assert_eq!(f.eval_f64(&[-3.0, 2.0]).unwrap(), 3.0);
    }

    #[test]
    fn product_map_pairs() {
        let id = ProductMap::new(vec![
            PHFunction::coordinate(2, 1).unwrap(),
            PHFunction::coordinate(2, 2).unwrap(),
        ])
        .unwrap();
        assert_eq!(id.eval_f64(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);

        let jm = ProductMap::new(vec![
            PHFunction::from_term(&Term::parse(2, "p1 v p2").unwrap()).unwrap(),
            PHFunction::from_term(&Term::parse(2, "p1 ^ p2").unwrap()).unwrap(),
        ])
        .unwrap();
        assert_eq!(jm.eval_f64(&[3.0, 4.0]).unwrap(), vec![4.0, 3.0]);
        let exact = jm
            .eval_exact(&[rat_int(3), rat_int(4)])
            .unwrap()
            .unwrap();
        assert_eq!(exact, vec![rat_int(4), rat_int(3)]);

        let abs1 = ProductMap::new(vec![
            PHFunction::from_term(&Term::parse(2, "|p1|").unwrap()).unwrap()
        ])
        .unwrap();
        assert_eq!(abs1.eval_f64(&[-2.0, 5.0]).unwrap(), vec![2.0]);

        let mixed = ProductMap::new(vec![
            PHFunction::coordinate(2, 1).unwrap(),
            PHFunction::coordinate(3, 1).unwrap(),
        ]);
        assert!(mixed.is_err());
    }

    #[test]
    fn compose_coordinate_projects() {
        let g = PHFunction::coordinate(2, 2).unwrap();
        let f1 = PHFunction::from_term(&Term::parse(2, "p1 + p2").unwrap()).unwrap();
        let f2 = PHFunction::euclidean(2).unwrap();
        let c = compose_ph(&g, &[f1, f2.clone()]).unwrap();
        assert_eq!(
            c.eval_f64(&[3.0, 4.0]).unwrap(),
            f2.eval_f64(&[3.0, 4.0]).unwrap()
        );
    }

    #[test]
    fn compose_symbolic_gives_absolute_value() {
        let g = PHFunction::from_term(&Term::parse(2, "p1 v p2").unwrap()).unwrap();
        let f1 = PHFunction::from_term(&Term::parse(2, "p1").unwrap()).unwrap();
        let f2 = PHFunction::from_term(&Term::parse(2, "-1 * p1").unwrap()).unwrap();
        let c = compose_ph(&g, &[f1, f2]).unwrap();
        let nf = c.as_nf().expect("symbolic path yields a normal form");
        for x1 in -4..=4 {
            for x2 in -4..=4 {
                let x = [rat(x1, 2), rat(x2, 2)];
                assert_eq!(nf.eval(&x).unwrap(), rat(x1, 2).abs());
            }
        }
    }

    #[test]
    fn compose_euclidean_with_projections() {
        let g = PHFunction::euclidean(2).unwrap();
        let fs = [
            PHFunction::coordinate(2, 1).unwrap(),
            PHFunction::coordinate(2, 2).unwrap(),
        ];
        let c = compose_ph(&g, &fs).unwrap();
        assert!((c.eval_f64(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
        assert!(c.is_nonneg());
        assert!(c.lipschitz() >= g.lipschitz());
    }

    #[test]
    fn compose_checks_arities() {
        let g = PHFunction::euclidean(2).unwrap();
        let f1 = PHFunction::coordinate(2, 1).unwrap();
        assert!(compose_ph(&g, std::slice::from_ref(&f1)).is_err());
    }

    #[test]
    fn homogeneous_extension_from_sphere_data() {
        assert_eq!(extend_by_homogeneity(|_| 1.0, &[2.0, -2.0]), 2.0);
        assert_eq!(extend_by_homogeneity(|_| 1.0, &[0.0, 0.0]), 0.0);
        assert_eq!(extend_by_homogeneity(|u| u[0], &[3.0, 1.0]), 3.0);
        let e = extend_by_homogeneity(|u| (u[0] * u[0] + u[1] * u[1]).sqrt(), &[1.0, 1.0]);
        assert!((e - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn descriptor_round_trip() {
        let f = PHFunction::pnorm(2, 2.0, vec![rat_int(1), rat(1, 3)]).unwrap();
        let d = f.descriptor();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"kind\":\"pnorm\""));
        let back = PHFunction::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        let p = [0.3, -0.9];
        assert!((back.eval_f64(&p).unwrap() - f.eval_f64(&p).unwrap()).abs() < 1e-15);

        let c = PHFunction::coordinate(4, 3).unwrap();
        let back = PHFunction::from_descriptor(&c.descriptor()).unwrap();
        assert_eq!(back.eval_f64(&[0.0, 0.0, 2.5, 0.0]).unwrap(), 2.5);

        let bb = PHFunction::black_box(1, "id", 1.0, |t| t[0]).unwrap();
        assert!(PHFunction::from_descriptor(&bb.descriptor()).is_err());
    }
}
