//! Executable structural counterexamples: the lex plane admits no
//! positively homogeneous calculus, and the eventually-constant sublattice
//! is finitely uniformly complete, sup-norm dense, yet not uniformly
//! complete. Every claim in a report is computed with exact rationals; a
//! contradiction certificate carries both conflicting values and their
//! derivations.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{apply_term, Tuple};
use crate::error::{Error, Result};
use crate::models::{
    membership_x, EventuallyConstPL, LatticeElement, PLFunc,
};
use crate::rat::{rat, rat_int, rat_str, Rat};
use crate::sampling::Sampler;
use crate::term::{Term, TermNode};

fn lex(a: Rat, b: Rat) -> LatticeElement {
    LatticeElement::Lex(a, b)
}

fn lex_int(a: i64, b: i64) -> LatticeElement {
    lex(rat_int(a), rat_int(b))
}

fn on_sphere(p: &(Rat, Rat)) -> bool {
    p.0.abs().max(p.1.abs()) == rat_int(1)
}

#[derive(Debug, Clone, Serialize)]
pub struct ForcedValues {
    pub c1: String,
    pub s: [String; 2],
    pub trace: Vec<String>,
}

/// Replay the forced-value derivation: any candidate first component of a
/// calculus on the lex plane evaluates the unit to 1 and concentrates at
/// (1, 0).
pub fn forced_phi1() -> ForcedValues {
    let x1 = lex_int(1, 0);
    let x2 = lex_int(0, 1);
    let unit = x1.abs().join(&x2.abs()).expect("same model");
    let (c1, s) = match &unit {
        LatticeElement::Lex(a, _) => (
            a.clone(),
            (rat_int(1), rat_int(0)),
        ),
        _ => unreachable!("lex join of lex elements"),
    };
    let trace = vec![
        format!("x1 = {x1}, x2 = {x2}"),
        format!("|x1| v |x2| = {unit} in the lex order"),
        format!("c1 = pi1(|x1| v |x2|) = {}", rat_str(&c1)),
        "c1 * s_i = pi1(x_i) gives s1 = 1, s2 = 0, so s = (1, 0)".to_string(),
    ];
    ForcedValues {
        c1: rat_str(&c1),
        s: [rat_str(&s.0), rat_str(&s.1)],
        trace,
    }
}

/// A hypothesized pair of component functionals for a calculus on the lex
/// plane: phi1 = c1 * evaluation at s, and phi2 restricted to ker phi1 =
/// c2 * evaluation at t.
#[derive(Debug, Clone)]
pub struct ObstructionCandidate {
    pub c1: Rat,
    pub s: (Rat, Rat),
    pub c2: Rat,
    pub t: (Rat, Rat),
}

impl ObstructionCandidate {
    pub fn new(c1: Rat, s: (Rat, Rat), c2: Rat, t: (Rat, Rat)) -> Result<Self> {
        if c1.is_negative() || c2.is_negative() {
            return Err(Error::InvalidElement(
                "candidate weights must be nonnegative".into(),
            ));
        }
        if !on_sphere(&s) || !on_sphere(&t) {
            return Err(Error::InvalidElement(
                "candidate evaluation points must lie on the sup-norm sphere".into(),
            ));
        }
        if t == (rat_int(1), rat_int(0)) {
            return Err(Error::InvalidElement(
                "the second evaluation point must differ from (1, 0)".into(),
            ));
        }
        Ok(ObstructionCandidate { c1, s, c2, t })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionCertificate {
    pub forced: ForcedValues,
    pub c2: String,
    pub t: [String; 2],
    pub lambda: String,
    pub term: String,
    pub route_a: String,
    pub route_a_trace: Vec<String>,
    pub route_b: String,
    pub route_b_trace: Vec<String>,
    /// route A is exactly zero and route B exactly positive
    pub contradiction: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum ObstructionOutcome {
    Rejected { forced_equation: String, detail: String },
    Certified(Box<ContradictionCertificate>),
}

/// Examine one candidate. Total: every candidate is either rejected by a
/// forced value or refuted by a two-route contradiction.
pub fn lex_obstruction(cand: &ObstructionCandidate) -> ObstructionOutcome {
    let forced = forced_phi1();
    let one = Rat::one();
    if cand.c1 != one {
        return ObstructionOutcome::Rejected {
            forced_equation: "c1 = 1".to_string(),
            detail: format!("candidate has c1 = {}", rat_str(&cand.c1)),
        };
    }
    if cand.s != (rat_int(1), rat_int(0)) {
        return ObstructionOutcome::Rejected {
            forced_equation: "s = (1, 0)".to_string(),
            detail: format!(
                "candidate has s = ({}, {})",
                rat_str(&cand.s.0),
                rat_str(&cand.s.1)
            ),
        };
    }
    let c2t2 = &cand.c2 * &cand.t.1;
    if c2t2 != one {
        return ObstructionOutcome::Rejected {
            forced_equation: "c2 * t2 = 1".to_string(),
            detail: format!("candidate has c2 * t2 = {}", rat_str(&c2t2)),
        };
    }

    // t2 > 0 now; any rational strictly above t1/t2 works, take the least
    // integer above it
    let ratio = &cand.t.0 / &cand.t.1;
    let lambda = ratio.floor() + one;

    let f = Term::new(
        2,
        TermNode::Sum(
            Box::new(TermNode::Join(
                Box::new(TermNode::Var(1)),
                Box::new(TermNode::Scale(lambda.clone(), Box::new(TermNode::Var(2)))),
            )),
            Box::new(TermNode::Scale(rat_int(-1), Box::new(TermNode::Var(1)))),
        ),
    )
    .expect("fixed arity-2 term");

    // route A: the term calculus on the defining tuple
    let x = Tuple::new(vec![lex_int(1, 0), lex_int(0, 1)]).expect("lex pair");
    let image = apply_term(&x, &f).expect("lex lattice ops are total");
    let (a1, a2) = match &image {
        LatticeElement::Lex(a, b) => (a.clone(), b.clone()),
        _ => unreachable!("lex tuple image"),
    };
    let kernel_check = f
        .eval(&[rat_int(1), rat_int(0)])
        .expect("arity 2 evaluation");
    let route_a_trace = vec![
        format!(
            "x1 v ({} x2) = {} in the lex order",
            rat_str(&lambda),
            lex_int(1, 0)
                .join(&lex_int(0, 1).scale(&lambda))
                .expect("same model")
        ),
        format!("image of f under the calculus = {image}"),
        format!(
            "f(s) = f(1, 0) = {} so f lies in ker phi1",
            rat_str(&kernel_check)
        ),
        format!("phi2(f) = pi2({image}) = {}", rat_str(&a2)),
    ];

    // route B: the hypothesized point-evaluation form of phi2
    let ft = f
        .eval(&[cand.t.0.clone(), cand.t.1.clone()])
        .expect("arity 2 evaluation");
    let route_b = &cand.c2 * &ft;
    let route_b_trace = vec![
        format!(
            "f(t) = (t1 v {} t2) - t1 = {} since {} > t1/t2",
            rat_str(&lambda),
            rat_str(&ft),
            rat_str(&lambda)
        ),
        format!(
            "phi2(f) = c2 * f(t) = {} * {} = {}",
            rat_str(&cand.c2),
            rat_str(&ft),
            rat_str(&route_b)
        ),
    ];

    let contradiction =
        a1.is_zero() && a2.is_zero() && kernel_check.is_zero() && route_b.is_positive();
    ObstructionOutcome::Certified(Box::new(ContradictionCertificate {
        forced,
        c2: rat_str(&cand.c2),
        t: [rat_str(&cand.t.0), rat_str(&cand.t.1)],
        lambda: rat_str(&lambda),
        term: format!("{f}"),
        route_a: rat_str(&a2),
        route_a_trace,
        route_b: rat_str(&route_b),
        route_b_trace,
        contradiction,
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub candidates: usize,
    pub rejected: usize,
    pub certified: usize,
    /// candidates neither rejected nor refuted; must stay zero
    pub survivors: usize,
}

/// Run the obstruction over a whole grid of candidates.
pub fn lex_obstruction_sweep(cands: &[ObstructionCandidate]) -> SweepSummary {
    let (rejected, certified, survivors) = cands
        .par_iter()
        .map(|c| match lex_obstruction(c) {
            ObstructionOutcome::Rejected { .. } => (1usize, 0usize, 0usize),
            ObstructionOutcome::Certified(cert) => {
                if cert.contradiction {
                    (0, 1, 0)
                } else {
                    (0, 0, 1)
                }
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    SweepSummary {
        candidates: cands.len(),
        rejected,
        certified,
        survivors,
    }
}

/// A rational grid of candidates: second evaluation points swept along all
/// four faces of the sphere, each tried with the forced weight and with a
/// deliberately wrong one, plus a few forced-value violations.
pub fn obstruction_grid(per_face: usize) -> Vec<ObstructionCandidate> {
    let one = rat_int(1);
    let mut points = Vec::new();
    for k in 0..=per_face {
        let u = rat(2 * k as i64, per_face.max(1) as i64) - &one;
        points.push((u.clone(), one.clone()));
        points.push((u.clone(), -one.clone()));
        points.push((one.clone(), u.clone()));
        points.push((-one.clone(), u));
    }
    points.sort();
    points.dedup();

    let s_good = (rat_int(1), rat_int(0));
    let mut out = Vec::new();
    for t in points {
        if t == s_good {
            continue;
        }
        let honest_c2 = if t.1.is_positive() {
            one.clone() / t.1.clone()
        } else {
            one.clone()
        };
        out.push(
            ObstructionCandidate::new(one.clone(), s_good.clone(), honest_c2.clone(), t.clone())
                .expect("grid points are on the sphere"),
        );
        out.push(
            ObstructionCandidate::new(one.clone(), s_good.clone(), &honest_c2 + &one, t.clone())
                .expect("grid points are on the sphere"),
        );
        out.push(
            ObstructionCandidate::new(rat_int(2), s_good.clone(), honest_c2, t)
                .expect("grid points are on the sphere"),
        );
    }
    out.push(
        ObstructionCandidate::new(one.clone(), (rat_int(0), rat_int(1)), one.clone(), (rat_int(0), rat_int(1)))
            .expect("sphere points"),
    );
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessStage {
    pub m: u64,
    pub in_x: bool,
    pub witness_delta: Option<String>,
    /// exact sup distance to the limit slope function
    pub distance: String,
    pub distance_is_inv_m: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyPair {
    pub m: u64,
    pub m_prime: u64,
    pub distance: String,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessReport {
    pub h: String,
    pub h_in_x: bool,
    pub stages: Vec<CompletenessStage>,
    pub cauchy: Vec<CauchyPair>,
    /// every tested member of the sublattice keeps a strictly positive
    /// distance to the limit
    pub sampled_members: usize,
    pub min_sampled_distance: String,
    pub pass: bool,
}

fn flatten_at(m: u64) -> PLFunc {
    if m == 1 {
        return PLFunc::constant(rat_int(1));
    }
    let inv = rat(1, m as i64);
    PLFunc::from_breakpoints(vec![
        (Rat::zero(), inv.clone()),
        (inv.clone(), inv),
        (rat_int(1), rat_int(1)),
    ])
    .expect("strictly increasing grid")
}

/// The sup-norm Cauchy sequence g_m = max(t, 1/m) lives in the sublattice
/// and converges uniformly to the identity, which does not. All distances
/// are exact suprema of piecewise linear functions.
pub fn not_uniformly_complete_witness(ms: &[u64]) -> CompletenessReport {
    let h = PLFunc::identity();
    let h_in_x = membership_x(&h).is_some();

    let gs: Vec<(u64, PLFunc)> = ms.iter().map(|&m| (m, flatten_at(m))).collect();

    let mut stages = Vec::with_capacity(gs.len());
    for (m, g) in &gs {
        let witness = membership_x(g);
        let dist = h.sub(g).sup_abs();
        stages.push(CompletenessStage {
            m: *m,
            in_x: witness.is_some(),
            witness_delta: witness.as_ref().map(rat_str),
            distance: rat_str(&dist),
            distance_is_inv_m: dist == rat(1, *m as i64),
        });
    }

    let mut cauchy = Vec::new();
    for pair in gs.windows(2) {
        let (m, gm) = &pair[0];
        let (mp, gmp) = &pair[1];
        let dist = gm.sub(gmp).sup_abs();
        let bound = rat(1, (*m).min(*mp) as i64);
        cauchy.push(CauchyPair {
            m: *m,
            m_prime: *mp,
            distance: rat_str(&dist),
            within_bound: dist <= bound,
        });
    }

    // no tested member of the sublattice reaches the limit
    let mut sampler = Sampler::new(0xb5e);
    let mut min_dist: Option<Rat> = None;
    let mut sampled = 0usize;
    let mut all_positive = true;
    let mut consider = |x: &PLFunc| {
        let d = h.sub(x).sup_abs();
        if !d.is_positive() {
            all_positive = false;
        }
        min_dist = Some(match min_dist.take() {
            Some(cur) => cur.min(d),
            None => d,
        });
    };
    for (_, g) in &gs {
        consider(g);
        sampled += 1;
    }
    for _ in 0..40 {
        let e = sampler.evc();
        consider(e.pl());
        sampled += 1;
    }

    let pass = !h_in_x
        && stages.iter().all(|s| s.in_x && s.distance_is_inv_m)
        && cauchy.iter().all(|c| c.within_bound)
        && all_positive;
    CompletenessReport {
        h: "t".to_string(),
        h_in_x,
        stages,
        cauchy,
        sampled_members: sampled,
        min_sampled_distance: min_dist.map(|d| rat_str(&d)).unwrap_or_default(),
        pass,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub delta: String,
    pub unit_level: String,
    pub trials: usize,
    pub all_flat: bool,
    pub witness: Option<String>,
    pub pass: bool,
}

/// Finite uniform completeness probe: images of members flat on [0, delta]
/// under arbitrary lattice-linear terms stay flat on [0, delta], so the
/// generated sublattice keeps a common flat prefix.
pub fn finitely_uc_probe(fs: &[PLFunc], trials: usize, seed: u64) -> Result<ProbeReport> {
    if fs.is_empty() {
        return Err(Error::InvalidElement(
            "the probe needs at least one function".into(),
        ));
    }
    let mut delta: Option<Rat> = None;
    for (i, f) in fs.iter().enumerate() {
        match membership_x(f) {
            Some(d) => {
                delta = Some(match delta.take() {
                    Some(cur) => cur.min(d),
                    None => d,
                });
            }
            None => {
                return Err(Error::InvalidElement(format!(
                    "input {} is not constant near zero",
                    i + 1
                )));
            }
        }
    }
    let delta = delta.expect("nonempty inputs");

    let mut c = fs
        .iter()
        .map(|f| f.sup_abs())
        .fold(Rat::zero(), |a, b| a.max(b));
    if c.is_zero() {
        c = Rat::one();
    }

    let elements: Vec<LatticeElement> = fs
        .iter()
        .map(|f| EventuallyConstPL::from_pl(f.clone()).map(LatticeElement::Evc))
        .collect::<Result<_>>()?;
    let tuple = Tuple::new(elements)?;

    let mut sampler = Sampler::new(seed);
    let mut witness = None;
    for _ in 0..trials {
        let term = sampler.term(fs.len(), 4);
        let image = apply_term(&tuple, &term)?;
        let flat = match &image {
            LatticeElement::Evc(e) => e.pl().flat_prefix() >= delta,
            _ => false,
        };
        if !flat && witness.is_none() {
            witness = Some(format!("{term}"));
        }
    }

    let all_flat = witness.is_none();
    Ok(ProbeReport {
        n: fs.len(),
        delta: rat_str(&delta),
        unit_level: rat_str(&c),
        trials,
        all_flat,
        witness,
        pass: all_flat,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub eps: String,
    pub delta: String,
    pub g: Vec<[String; 2]>,
    pub flat_value: String,
    pub sup_error: String,
    pub within_eps: bool,
    pub in_x: bool,
    pub pass: bool,
}

impl DensityReport {
    pub fn g_pl(&self) -> PLFunc {
        let bps = self
            .g
            .iter()
            .map(|[x, y]| {
                (
                    crate::rat::parse_rat(x).expect("report stores valid rationals"),
                    crate::rat::parse_rat(y).expect("report stores valid rationals"),
                )
            })
            .collect();
        PLFunc::from_breakpoints(bps).expect("report stores a valid function")
    }
}

/// Largest x such that |f - f(0)| stays within eps on [0, x].
fn modulus_reach(dev: &PLFunc, eps: &Rat) -> Rat {
    let bps = dev.breakpoints();
    for w in bps.windows(2) {
        let (x0, y0) = &w[0];
        let (x1, y1) = &w[1];
        if y1 <= eps {
            continue;
        }
        if y0 > eps {
            return x0.clone();
        }
        // linear crossing inside the segment
        let tspan = x1 - x0;
        let yspan = y1 - y0;
        return x0 + (eps - y0) * tspan / yspan;
    }
    rat_int(1)
}

/// Approximate an arbitrary piecewise linear function by a member of the
/// sublattice: clamp f into the moving band f(0) +- M(t - delta)^+, which
/// freezes the value f(0) on [0, delta] and releases the band fast enough
/// to restore f exactly past 2 delta.
pub fn density_construction(f: &PLFunc, eps: &Rat) -> Result<DensityReport> {
    if !eps.is_positive() {
        return Err(Error::InvalidElement(
            "the approximation tolerance must be positive".into(),
        ));
    }
    let f0 = f.eval(&Rat::zero());
    let dev = f.sub(&PLFunc::constant(f0.clone())).abs();
    let reach = modulus_reach(&dev, eps);
    let delta = reach / rat_int(2);

    let cap = dev.sup_abs();
    let g = if cap.is_zero() {
        f.clone()
    } else {
        let slope = &cap / &delta;
        let band = PLFunc::from_breakpoints(vec![
            (Rat::zero(), Rat::zero()),
            (delta.clone(), Rat::zero()),
            (rat_int(1), &slope * (rat_int(1) - &delta)),
        ])
        .expect("delta < 1");
        let lower = PLFunc::constant(f0.clone()).sub(&band);
        let upper = PLFunc::constant(f0.clone()).add(&band);
        f.join(&lower).meet(&upper)
    };

    let sup_error = f.sub(&g).sup_abs();
    let within_eps = sup_error <= *eps;
    let in_x = membership_x(&g).is_some();
    let flat_value = g.eval(&Rat::zero());
    let pass = within_eps && in_x && flat_value == f0;
    Ok(DensityReport {
        eps: rat_str(eps),
        delta: rat_str(&delta),
        g: g.breakpoints()
            .iter()
            .map(|(x, y)| [rat_str(x), rat_str(y)])
            .collect(),
        flat_value: rat_str(&flat_value),
        sup_error: rat_str(&sup_error),
        within_eps,
        in_x,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_values_are_one_and_first_basis_vector() {
        let fv = forced_phi1();
        assert_eq!(fv.c1, "1");
        assert_eq!(fv.s, ["1".to_string(), "0".to_string()]);
        assert!(fv.trace.iter().any(|l| l.contains("lex")));
    }

    #[test]
    fn canonical_candidate_yields_unit_contradiction() {
        let c = ObstructionCandidate::new(
            rat_int(1),
            (rat_int(1), rat_int(0)),
            rat_int(1),
            (rat_int(0), rat_int(1)),
        )
        .unwrap();
        match lex_obstruction(&c) {
            ObstructionOutcome::Certified(cert) => {
                assert_eq!(cert.lambda, "1");
                assert_eq!(cert.route_a, "0");
                assert_eq!(cert.route_b, "1");
                assert!(cert.contradiction);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_candidate_needs_lambda_two() {
        let c = ObstructionCandidate::new(
            rat_int(1),
            (rat_int(1), rat_int(0)),
            rat_int(1),
            (rat_int(1), rat_int(1)),
        )
        .unwrap();
        match lex_obstruction(&c) {
            ObstructionOutcome::Certified(cert) => {
                assert_eq!(cert.lambda, "2");
                assert_eq!(cert.route_a, "0");
                assert_eq!(cert.route_b, "1");
                assert!(cert.contradiction);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn wrong_weight_is_rejected_by_forced_value() {
        let c = ObstructionCandidate::new(
            rat_int(2),
            (rat_int(1), rat_int(0)),
            rat_int(1),
            (rat_int(0), rat_int(1)),
        )
        .unwrap();
        match lex_obstruction(&c) {
            ObstructionOutcome::Rejected { forced_equation, .. } => {
                assert_eq!(forced_equation, "c1 = 1");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_second_ordinate_is_rejected() {
        for t in [(rat_int(-1), rat_int(0)), (rat_int(1), rat_int(-1))] {
            let c = ObstructionCandidate::new(
                rat_int(1),
                (rat_int(1), rat_int(0)),
                rat_int(1),
                t,
            )
            .unwrap();
            match lex_obstruction(&c) {
                ObstructionOutcome::Rejected { forced_equation, .. } => {
                    assert_eq!(forced_equation, "c2 * t2 = 1");
                }
                other => panic!("expected rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn off_sphere_candidates_are_unconstructible() {
        assert!(ObstructionCandidate::new(
            rat_int(1),
            (rat(1, 2), rat(1, 2)),
            rat_int(1),
            (rat_int(0), rat_int(1)),
        )
        .is_err());
        assert!(ObstructionCandidate::new(
            rat_int(1),
            (rat_int(1), rat_int(0)),
            rat_int(1),
            (rat_int(1), rat_int(0)),
        )
        .is_err());
    }

    #[test]
    fn sweep_leaves_no_survivors() {
        let grid = obstruction_grid(25);
        assert!(grid.len() >= 100);
        let summary = lex_obstruction_sweep(&grid);
        assert_eq!(summary.survivors, 0);
        assert_eq!(summary.candidates, grid.len());
        assert_eq!(summary.rejected + summary.certified, grid.len());
        assert!(summary.certified > 0);
        assert!(summary.rejected > 0);
    }

    #[test]
    fn empty_sweep_is_vacuous() {
        let summary = lex_obstruction_sweep(&[]);
        assert_eq!(summary.candidates, 0);
        assert_eq!(summary.survivors, 0);
    }

    #[test]
    fn lower_half_sphere_is_fully_rejected() {
        let cands: Vec<ObstructionCandidate> = (0..20i64)
            .map(|k| {
                ObstructionCandidate::new(
                    rat_int(1),
                    (rat_int(1), rat_int(0)),
                    rat_int(1),
                    (rat(k - 10, 10).max(rat_int(-1)).min(rat_int(1)), rat_int(-1)),
                )
                .unwrap()
            })
            .collect();
        let summary = lex_obstruction_sweep(&cands);
        assert_eq!(summary.rejected, cands.len());
        assert_eq!(summary.certified, 0);
    }

    #[test]
    fn cauchy_family_converges_to_an_outsider() {
        let report = not_uniformly_complete_witness(&[1, 2, 3, 4, 8, 16, 64, 256]);
        assert!(report.pass, "{report:?}");
        assert!(!report.h_in_x);
        let g4 = &report.stages[3];
        assert_eq!(g4.m, 4);
        assert!(g4.in_x);
        assert_eq!(g4.witness_delta.as_deref(), Some("1/4"));
        assert_eq!(g4.distance, "1/4");
        assert!(report.cauchy.iter().all(|p| p.within_bound));
    }

    #[test]
    fn g4_has_the_advertised_shape() {
        let g = flatten_at(4);
        assert_eq!(g.eval(&rat(1, 8)), rat(1, 4));
        assert_eq!(g.eval(&rat(1, 4)), rat(1, 4));
        assert_eq!(g.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(g.eval(&rat_int(1)), rat_int(1));
    }

    #[test]
    fn probe_keeps_the_common_flat_prefix() {
        let f1 = PLFunc::from_breakpoints(vec![
            (rat_int(0), rat(1, 3)),
            (rat(1, 2), rat(1, 3)),
            (rat_int(1), rat_int(2)),
        ])
        .unwrap();
        let report = finitely_uc_probe(std::slice::from_ref(&f1), 50, 5).unwrap();
        assert_eq!(report.delta, "1/2");
        assert!(report.all_flat);

        let f2 = PLFunc::from_breakpoints(vec![
            (rat_int(0), rat_int(-1)),
            (rat(1, 4), rat_int(-1)),
            (rat_int(1), rat_int(3)),
        ])
        .unwrap();
        let report = finitely_uc_probe(&[f1, f2], 200, 6).unwrap();
        assert_eq!(report.delta, "1/4");
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn probe_unit_falls_back_for_zero_inputs() {
        let report = finitely_uc_probe(&[PLFunc::constant(rat_int(0))], 10, 1).unwrap();
        assert_eq!(report.unit_level, "1");
        assert!(report.pass);
    }

    #[test]
    fn probe_rejects_nonmembers() {
        let err = finitely_uc_probe(&[PLFunc::identity()], 10, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidElement(_)));
    }

    #[test]
    fn density_flattens_the_identity() {
        let report = density_construction(&PLFunc::identity(), &rat(1, 4)).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.delta, "1/8");
        let g = report.g_pl();
        assert_eq!(g.eval(&rat(1, 16)), rat_int(0));
        assert_eq!(g.eval(&rat(1, 8)), rat_int(0));
        assert!(g.sub(&PLFunc::identity()).sup_abs() <= rat(1, 4));
        // past the release point the original function is restored exactly
        assert_eq!(g.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(g.eval(&rat_int(1)), rat_int(1));
    }

    #[test]
    fn density_of_constants_is_exact() {
        let f = PLFunc::constant(rat(7, 3));
        let report = density_construction(&f, &rat(1, 10)).unwrap();
        assert!(report.pass);
        assert_eq!(report.sup_error, "0");
        assert_eq!(report.g_pl(), f);
    }

    #[test]
    fn density_preserves_existing_flat_prefixes() {
        let f = PLFunc::from_breakpoints(vec![
            (rat_int(0), rat(1, 2)),
            (rat(1, 2), rat(1, 2)),
            (rat_int(1), rat_int(1)),
        ])
        .unwrap();
        let report = density_construction(&f, &rat(1, 8)).unwrap();
        assert!(report.pass);
        let g = report.g_pl();
        let delta = crate::rat::parse_rat(&report.delta).unwrap();
        assert_eq!(g.eval(&(delta.clone() / rat_int(2))), rat(1, 2));
        assert_eq!(g.eval(&delta), rat(1, 2));
    }

    #[test]
    fn density_rejects_nonpositive_tolerance() {
        assert!(density_construction(&PLFunc::identity(), &rat_int(0)).is_err());
    }

    #[test]
    fn certificates_serialize_with_traces() {
        let c = ObstructionCandidate::new(
            rat_int(1),
            (rat_int(1), rat_int(0)),
            rat_int(1),
            (rat(1, 2), rat_int(1)),
        )
        .unwrap();
        match lex_obstruction(&c) {
            ObstructionOutcome::Certified(cert) => {
                assert_eq!(cert.lambda, "1");
                assert_eq!(cert.route_b, "1/2");
            }
            other => panic!("expected certificate, got {other:?}"),
        }
        let out = lex_obstruction(&c);
        let js = serde_json::to_string(&out).unwrap();
        assert!(js.contains("\"outcome\":\"certified\""));
        assert!(js.contains("route_a_trace"));
    }
}
