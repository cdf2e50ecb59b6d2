//! Certified approximation of positively homogeneous functions by max-min
//! normal forms.
//!
//! The construction is the lattice version of Stone-Weierstrass: put a finite
//! net on the unit sphere, interpolate the target through pairs of net points,
//! take a meet per base point and a join over base points. The certificate
//! does not trust the construction: the error bound is measured on a finer
//! audit net and extended to the whole sphere through Lipschitz constants.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nf::{LinearForm, MaxMinNF, NormalizeOptions};
use crate::phfn::{PHDescriptor, PHFunction, PHKind};
use crate::rat::{parse_rat, rat, rat_from_f64, rat_int, rat_str, rat_to_f64, Rat};
use crate::sphere::SphereNet;
use crate::term::Term;

/// Absolute slack folded into every floating certificate, absorbing f64
/// rounding in evaluation and in the coefficient round trip.
const CERT_SLACK: f64 = 1e-9;

/// Multiplicative padding so f64 images of exact Lipschitz data never
/// under-report.
const LIP_PAD: f64 = 1.0 + 1e-12;

#[derive(Debug, Clone)]
pub struct ApproxOptions {
    /// Refinement stops once a construction net would exceed this many
    /// points; if the target error is still out of reach the run fails with
    /// a resource error.
    pub max_construction_points: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            max_construction_points: 4000,
        }
    }
}

/// Outcome of [`krivine_approximate`]: an approximant in the sublattice plus
/// a sup-norm error bound over the sphere, with enough of the construction
/// recorded to recompute the bound.
#[derive(Debug, Clone)]
pub struct ApproxCertificate {
    pub target: PHDescriptor,
    pub target_lipschitz: f64,
    pub approximant: MaxMinNF,
    /// Mesh of the construction net.
    pub net_step: Rat,
    /// Mesh of the audit net the bound was measured on.
    pub audit_step: Rat,
    /// Certified bound on `sup |target - approximant|` over the sphere.
    pub epsilon: f64,
    /// True when the target was already in the sublattice and the bound is
    /// exact zero.
    pub exact: bool,
    pub interpolant_count: usize,
    pub clause_count: usize,
}

impl ApproxCertificate {
    /// Recompute the certified bound from the stored approximant and net
    /// parameters. For inexact certificates this repeats the measurement
    /// that produced `epsilon` and must reproduce it bit for bit.
    pub fn replay(&self, g: &PHFunction) -> Result<f64> {
        if g.arity() != self.approximant.arity() {
            return Err(Error::Arity(format!(
                "certificate is for arity {}, function has arity {}",
                self.approximant.arity(),
                g.arity()
            )));
        }
        if self.exact {
            return Ok(0.0);
        }
        let audit = SphereNet::new(g.arity(), &self.audit_step)?;
        certified_eps(&self.approximant, g, &audit)
    }

    /// Check the certificate against a fresh random sphere sample; returns
    /// the worst observed deviation.
    pub fn spot_check(&self, g: &PHFunction, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.approximant.arity();
        let fast = self.approximant.to_float();
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let p = loop {
                let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let m = v.iter().map(|c| c.abs()).fold(0.0f64, f64::max);
                if m > 1e-3 {
                    break v.iter().map(|c| c / m).collect::<Vec<f64>>();
                }
            };
            let gap = (fast.eval(&p) - g.eval_f64(&p)?).abs();
            worst = worst.max(gap);
        }
        Ok(worst)
    }
}

#[derive(Serialize, Deserialize)]
struct CertWire {
    target: PHDescriptor,
    target_lipschitz: f64,
    approximant: MaxMinNF,
    net_step: String,
    audit_step: String,
    epsilon: f64,
    exact: bool,
    interpolant_count: usize,
    clause_count: usize,
}

impl Serialize for ApproxCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertWire {
            target: self.target.clone(),
            target_lipschitz: self.target_lipschitz,
            approximant: self.approximant.clone(),
            net_step: rat_str(&self.net_step),
            audit_step: rat_str(&self.audit_step),
            epsilon: self.epsilon,
            exact: self.exact,
            interpolant_count: self.interpolant_count,
            clause_count: self.clause_count,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ApproxCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CertWire::deserialize(d)?;
        Ok(ApproxCertificate {
            target: w.target,
            target_lipschitz: w.target_lipschitz,
            approximant: w.approximant,
            net_step: parse_rat(&w.net_step).map_err(serde::de::Error::custom)?,
            audit_step: parse_rat(&w.audit_step).map_err(serde::de::Error::custom)?,
            epsilon: w.epsilon,
            exact: w.exact,
            interpolant_count: w.interpolant_count,
            clause_count: w.clause_count,
        })
    }
}

/// An element of the sublattice through the two prescribed sphere values:
/// `h(s) = a`, `h(t) = b`, exactly.
///
/// Linearly independent points get the minimum-Euclidean-norm linear form
/// solving the two equations. On the sup-norm sphere the only dependent pair
/// with `s != t` is the antipodal one, which no single bounded form can
/// interpolate; there the positive-part construction
/// `a (l v 0) + b ((-l) v 0)` with `l(s) = 1` does the job.
pub fn pairwise_interpolant(s: &[Rat], t: &[Rat], a: &Rat, b: &Rat) -> Result<MaxMinNF> {
    let n = s.len();
    if n == 0 || t.len() != n {
        return Err(Error::Dimension(format!(
            "points have lengths {} and {}",
            s.len(),
            t.len()
        )));
    }
    for (name, p) in [("s", s), ("t", t)] {
        let m = p.iter().map(|c| c.abs()).fold(Rat::zero(), |acc, c| acc.max(c));
        if m != rat_int(1) {
            return Err(Error::InvalidPair(format!(
                "{name} is not on the unit sphere (sup norm {})",
                rat_str(&m)
            )));
        }
    }
    if s == t {
        return Err(Error::InvalidPair("interpolation points coincide".into()));
    }

    let ss = dot(s, s);
    let tt = dot(t, t);
    let st = dot(s, t);
    let det = &ss * &tt - &st * &st;
    let budget = NormalizeOptions::default().clause_budget;

    if det.is_positive() {
        // Minimum-norm solution c = y1 s + y2 t of <c,s> = a, <c,t> = b.
        let y1 = (&tt * a - &st * b) / &det;
        let y2 = (&ss * b - &st * a) / &det;
        let coeffs: Vec<Rat> = (0..n).map(|i| &y1 * &s[i] + &y2 * &t[i]).collect();
        return MaxMinNF::single_form(n, LinearForm::new(coeffs));
    }

    // Dependent, so t = -s on the sphere. Take l = s / <s,s>.
    let l = LinearForm::new(s.iter().map(|c| c / &ss).collect());
    let pos = MaxMinNF::from_clauses(n, vec![vec![l.clone()], vec![LinearForm::zero(n)]])?;
    let neg = MaxMinNF::from_clauses(n, vec![vec![l.negate()], vec![LinearForm::zero(n)]])?;
    pos.scale(a, budget)?.add(&neg.scale(b, budget)?, budget)
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn krivine_approximate(g: &PHFunction, eps: f64) -> Result<ApproxCertificate> {
    krivine_approximate_with(g, eps, &ApproxOptions::default())
}

/// Approximate `g` by a max-min normal form with certified sup-norm error at
/// most `eps` over the unit sphere.
///
/// Lattice-fragment targets return themselves with an exact zero bound. For
/// the rest, construction nets of mesh 1/4, 1/8, ... are tried in order; at
/// each level the deviation is measured on an audit net of a quarter of the
/// mesh and extended by the Lipschitz constants of both sides, and the best
/// certified bound so far is kept, so refining the request never worsens the
/// answer.
pub fn krivine_approximate_with(
    g: &PHFunction,
    eps: f64,
    opts: &ApproxOptions,
) -> Result<ApproxCertificate> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidElement(format!(
            "target error must be positive, got {eps}"
        )));
    }
    let n = g.arity();

    // Already in the sublattice: exact, nothing to measure.
    let exact_nf = match g.kind() {
        PHKind::Coordinate(i) => Some(MaxMinNF::coordinate(n, *i)?),
        PHKind::LatticeTerm(nf) => Some(nf.clone()),
        _ => None,
    };
    if let Some(nf) = exact_nf {
        return Ok(ApproxCertificate {
            target: g.descriptor(),
            target_lipschitz: g.lipschitz(),
            net_step: rat_int(2),
            audit_step: rat_int(2),
            epsilon: 0.0,
            exact: true,
            interpolant_count: 0,
            clause_count: nf.clause_count(),
            approximant: nf,
        });
    }

    // The meet construction needs the (shifted) target nonnegative on the
    // sphere, so that the single fallback form handling all far-side net
    // points stays below the target there.
    let shift = if g.is_nonneg() {
        Rat::zero()
    } else {
        let e1: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let bound = g.eval_f64(&e1)?.abs() + 2.0 * g.lipschitz();
        rat_int(bound.ceil() as i64 + 1)
    };

    let mut best: Option<ApproxCertificate> = None;
    for k in 2u32..=24 {
        let h = rat(1, 1i64 << k);
        let net = SphereNet::new(n, &h)?;
        if net.len() > opts.max_construction_points {
            break;
        }
        let (nf, interpolants) = build_level(g, &shift, &net)?;
        let audit_step = &h / rat_int(4);
        let audit = SphereNet::new(n, &audit_step)?;
        let level_eps = certified_eps(&nf, g, &audit)?;
        if best.as_ref().is_none_or(|b| level_eps < b.epsilon) {
            best = Some(ApproxCertificate {
                target: g.descriptor(),
                target_lipschitz: g.lipschitz(),
                net_step: h,
                audit_step,
                epsilon: level_eps,
                exact: false,
                interpolant_count: interpolants,
                clause_count: nf.clause_count(),
                approximant: nf,
            });
        }
        if best.as_ref().unwrap().epsilon <= eps {
            return Ok(best.unwrap());
        }
    }
    let reached = best.map(|b| b.epsilon).unwrap_or(f64::INFINITY);
    Err(Error::Resource {
        what: format!("approximation net (best certified bound {reached:.3e}, target {eps:.3e})"),
        count: opts.max_construction_points as u64 + 1,
        limit: opts.max_construction_points as u64,
    })
}

/// One ladder level: interpolate through net-point pairs, prune, make the
/// coefficients exact, and undo the nonnegativity shift.
fn build_level(g: &PHFunction, shift: &Rat, net: &SphereNet) -> Result<(MaxMinNF, usize)> {
    let n = net.arity();
    let pts = net.points_f64();
    let shift_f = rat_to_f64(shift);
    let values: Vec<f64> = pts
        .iter()
        .map(|p| g.eval_f64(p).map(|v| v + shift_f))
        .collect::<Result<_>>()?;

    let float_clauses: Vec<Vec<Vec<f64>>> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let clause = build_clause(i, pts, &values);
            if n == 2 {
                envelope_prune_2d(clause)
            } else {
                attainment_prune(clause, pts)
            }
        })
        .collect();

    let mut interpolants = 0usize;
    let mut clauses = Vec::with_capacity(float_clauses.len());
    for fc in float_clauses {
        let mut forms = Vec::with_capacity(fc.len());
        for coeffs in fc {
            let exact: Vec<Rat> = coeffs
                .iter()
                .map(|c| rat_from_f64(*c))
                .collect::<Result<_>>()?;
            forms.push(LinearForm::new(exact));
            interpolants += 1;
        }
        clauses.push(forms);
    }
    let budget = NormalizeOptions::default().clause_budget;
    let mut nf = MaxMinNF::from_clauses(n, clauses)?;
    if shift.is_positive() {
        // Subtract shift * sup-norm, which is the meet of the 2n forms
        // -shift * (+-pi_d).
        let mut forms = Vec::with_capacity(2 * n);
        for d in 0..n {
            let mut c = vec![Rat::zero(); n];
            c[d] = -shift.clone();
            forms.push(LinearForm::new(c.clone()));
            c[d] = shift.clone();
            forms.push(LinearForm::new(c));
        }
        let neg_unit = MaxMinNF::from_clauses(n, vec![forms])?;
        nf = nf.add(&neg_unit, budget)?;
    }
    Ok((nf, interpolants))
}

/// Candidate forms for the clause of base point `s = pts[i]`. Every form
/// passes through `(s, value_s)`; pairs on the same half-sphere get the
/// minimum-norm interpolant, and the entire opposite half-sphere is handled
/// by one form that is nonpositive there.
fn build_clause(i: usize, pts: &[Vec<f64>], values: &[f64]) -> Vec<Vec<f64>> {
    let s = &pts[i];
    let a = values[i];
    let ss: f64 = s.iter().map(|c| c * c).sum();
    let mut forms = Vec::new();
    let mut far_side = false;
    for (j, t) in pts.iter().enumerate() {
        if j == i {
            continue;
        }
        let st: f64 = s.iter().zip(t).map(|(x, y)| x * y).sum();
        if st < 0.0 {
            far_side = true;
            continue;
        }
        let tt: f64 = t.iter().map(|c| c * c).sum();
        let det = ss * tt - st * st;
        if det <= 0.0 {
            continue;
        }
        let b = values[j];
        let y1 = (tt * a - st * b) / det;
        let y2 = (ss * b - st * a) / det;
        forms.push(s.iter().zip(t).map(|(x, y)| y1 * x + y2 * y).collect());
    }
    if far_side {
        forms.push(s.iter().map(|c| a * c / ss).collect());
    }
    forms
}

/// Exact clause pruning for n = 2: on each of the four sphere faces the
/// forms restrict to lines in the free coordinate, and only lines on the
/// lower envelope over [-1, 1] can ever attain the clause minimum. The
/// pruned clause is pointwise identical on the whole sphere.
fn envelope_prune_2d(forms: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if forms.len() <= 2 {
        return forms;
    }
    let mut keep = vec![false; forms.len()];
    for fixed in 0..2 {
        for sigma in [-1.0, 1.0] {
            let lines: Vec<(f64, f64, usize)> = forms
                .iter()
                .enumerate()
                .map(|(idx, c)| (c[1 - fixed], c[fixed] * sigma, idx))
                .collect();
            mark_lower_envelope(lines, &mut keep);
        }
    }
    forms
        .into_iter()
        .zip(keep)
        .filter_map(|(f, k)| if k { Some(f) } else { None })
        .collect()
}

/// Mark the lines `(slope, intercept, idx)` active somewhere on the lower
/// envelope over u in [-1, 1].
fn mark_lower_envelope(mut lines: Vec<(f64, f64, usize)>, keep: &mut [bool]) {
    lines.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    let mut stack: Vec<(f64, f64, usize)> = Vec::new();
    for l in lines {
        if let Some(top) = stack.last() {
            if top.0 == l.0 {
                continue;
            }
        }
        while stack.len() >= 2 {
            let t = stack[stack.len() - 1];
            let p = stack[stack.len() - 2];
            // u where the new line overtakes p, vs where the top did.
            let u_lp = (l.1 - p.1) / (p.0 - l.0);
            let u_tp = (t.1 - p.1) / (p.0 - t.0);
            if u_lp <= u_tp {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(l);
    }
    // Slopes decrease along the stack, so piece m lives between its
    // crossings with the neighbours; clip to the face.
    for (m, line) in stack.iter().enumerate() {
        let left = if m == 0 {
            f64::NEG_INFINITY
        } else {
            let p = stack[m - 1];
            (line.1 - p.1) / (p.0 - line.0)
        };
        let right = if m + 1 == stack.len() {
            f64::INFINITY
        } else {
            let q = stack[m + 1];
            (q.1 - line.1) / (line.0 - q.0)
        };
        if left <= 1.0 + 1e-12 && right >= -1.0 - 1e-12 {
            keep[line.2] = true;
        }
    }
}

/// Fallback pruning for other arities: keep the forms that attain the clause
/// minimum at some net point. Clause values at all net points are unchanged;
/// between net points the clause can only grow, which the audit measures.
fn attainment_prune(forms: Vec<Vec<f64>>, pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if forms.len() <= 2 {
        return forms;
    }
    let mut keep = vec![false; forms.len()];
    for p in pts {
        let vals: Vec<f64> = forms
            .iter()
            .map(|c| c.iter().zip(p).map(|(x, y)| x * y).sum())
            .collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + min.abs());
        for (j, v) in vals.iter().enumerate() {
            if *v <= min + tol {
                keep[j] = true;
            }
        }
    }
    forms
        .into_iter()
        .zip(keep)
        .filter_map(|(f, k)| if k { Some(f) } else { None })
        .collect()
}

/// Measure `sup |nf - g|` on the audit net and extend to the whole sphere:
/// bound = observed defect + (Lip(g) + Lip(nf)) * covering radius + slack.
fn certified_eps(nf: &MaxMinNF, g: &PHFunction, audit: &SphereNet) -> Result<f64> {
    let pts = audit.points_f64();
    let fast = nf.to_float();
    let gvals: Vec<f64> = pts
        .par_iter()
        .map(|p| g.eval_f64(p))
        .collect::<Result<_>>()?;
    let defect = pts
        .par_iter()
        .zip(gvals.par_iter())
        .map(|(p, gv)| (fast.eval(p) - gv).abs())
        .reduce(|| 0.0, f64::max);
    let lip_nf = rat_to_f64(&nf.max_l1()) * LIP_PAD;
    let radius = rat_to_f64(audit.covering_radius());
    Ok(defect + (g.lipschitz() + lip_nf) * radius + CERT_SLACK)
}

/// Convenience wrapper: approximate the natural extension of a term in a
/// possibly larger calculus. Mostly exercised through the CLI.
pub fn approximate_term(t: &Term, eps: f64) -> Result<ApproxCertificate> {
    krivine_approximate(&PHFunction::from_term(t)?, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_zero;

    fn sphere_pt(coords: &[(i64, i64)]) -> Vec<Rat> {
        coords.iter().map(|(n, d)| rat(*n, *d)).collect()
    }

    #[test]
    fn interpolant_independent_pair_is_min_norm_form() {
        let s = sphere_pt(&[(1, 1), (0, 1)]);
        let t = sphere_pt(&[(0, 1), (1, 1)]);
        let h = pairwise_interpolant(&s, &t, &rat_int(2), &rat_int(3)).unwrap();
        assert_eq!(h.clause_count(), 1);
        let clause = &h.clauses()[0];
        assert_eq!(clause.len(), 1);
        assert_eq!(clause[0].coeffs, vec![rat_int(2), rat_int(3)]);
    }

    #[test]
    fn interpolant_antipodal_pair_hits_both_values() {
        let s = sphere_pt(&[(1, 1), (0, 1)]);
        let t = sphere_pt(&[(-1, 1), (0, 1)]);
        let h = pairwise_interpolant(&s, &t, &rat_int(1), &rat_int(1)).unwrap();
        assert_eq!(h.eval(&s).unwrap(), rat_int(1));
        assert_eq!(h.eval(&t).unwrap(), rat_int(1));
        // This instance is the absolute value of the first coordinate.
        for x1 in -6..=6 {
            for x2 in -6..=6 {
                let x = [rat(x1, 3), rat(x2, 3)];
                assert_eq!(h.eval(&x).unwrap(), rat(x1, 3).abs());
            }
        }
    }

    #[test]
    fn interpolant_zero_values_give_zero_form() {
        let s = sphere_pt(&[(1, 1), (0, 1)]);
        let t = sphere_pt(&[(0, 1), (1, 1)]);
        let h = pairwise_interpolant(&s, &t, &rat_zero(), &rat_zero()).unwrap();
        assert_eq!(h.clause_count(), 1);
        assert!(h.clauses()[0][0].coeffs.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn interpolant_is_exact_on_rational_pairs() {
        let cases = [
            (
                sphere_pt(&[(1, 1), (-1, 2)]),
                sphere_pt(&[(-1, 1), (1, 4)]),
                rat(3, 2),
                rat(-2, 1),
            ),
            (
                sphere_pt(&[(1, 1), (1, 1)]),
                sphere_pt(&[(1, 1), (-1, 1)]),
                rat(5, 3),
                rat(0, 1),
            ),
            (
                sphere_pt(&[(2, 3), (1, 1), (0, 1)]),
                sphere_pt(&[(-1, 1), (1, 2), (1, 2)]),
                rat(-1, 7),
                rat(4, 5),
            ),
        ];
        for (s, t, a, b) in cases {
            let h = pairwise_interpolant(&s, &t, &a, &b).unwrap();
            assert_eq!(h.eval(&s).unwrap(), a, "value at s");
            assert_eq!(h.eval(&t).unwrap(), b, "value at t");
        }
    }

    #[test]
    fn interpolant_rejects_bad_pairs() {
        let s = sphere_pt(&[(1, 1), (0, 1)]);
        let err = pairwise_interpolant(&s, &s, &rat_int(1), &rat_int(2)).unwrap_err();
        assert!(matches!(err, Error::InvalidPair(_)));
        let off = sphere_pt(&[(1, 2), (0, 1)]);
        let err = pairwise_interpolant(&s, &off, &rat_int(1), &rat_int(2)).unwrap_err();
        assert!(matches!(err, Error::InvalidPair(_)));
    }

    #[test]
    fn krivine_lattice_fragment_is_exact() {
        let g = PHFunction::coordinate(3, 1).unwrap();
        let cert = krivine_approximate(&g, 0.5).unwrap();
        assert!(cert.exact);
        assert_eq!(cert.epsilon, 0.0);
        assert_eq!(cert.approximant.clause_count(), 1);
        assert_eq!(
            cert.approximant.eval(&[rat_int(7), rat_int(1), rat_int(-2)]).unwrap(),
            rat_int(7)
        );

        let t = Term::parse(2, "(p1 v 0) + 1/2 * (p1 ^ p2)").unwrap();
        let f = PHFunction::from_term(&t).unwrap();
        let cert = krivine_approximate(&f, 1e-6).unwrap();
        assert!(cert.exact);
        assert_eq!(cert.epsilon, 0.0);
        for x1 in -3..=3 {
            for x2 in -3..=3 {
                let x = [rat_int(x1), rat_int(x2)];
                assert_eq!(
                    cert.approximant.eval(&x).unwrap(),
                    t.eval(&x).unwrap()
                );
            }
        }
        assert_eq!(cert.replay(&f).unwrap(), 0.0);
    }

    #[test]
    fn krivine_euclidean_certificate() {
        let g = PHFunction::euclidean(2).unwrap();
        let cert = krivine_approximate(&g, 0.05).unwrap();
        assert!(cert.epsilon <= 0.05, "epsilon = {}", cert.epsilon);
        assert!(cert.epsilon >= 0.0);

        let f = &cert.approximant;
        assert!((f.eval_f64(&[1.0, 1.0]) - 2f64.sqrt()).abs() <= 0.05);
        assert!((f.eval_f64(&[1.0, 0.0]) - 1.0).abs() <= 0.05);

        let worst = cert.spot_check(&g, 100, 42).unwrap();
        assert!(
            worst <= cert.epsilon + 1e-9,
            "sample deviation {worst} above certified {}",
            cert.epsilon
        );
    }

    #[test]
    fn krivine_replay_reproduces_epsilon() {
        let g = PHFunction::euclidean(2).unwrap();
        let cert = krivine_approximate(&g, 0.1).unwrap();
        assert_eq!(cert.replay(&g).unwrap(), cert.epsilon);

        let json = serde_json::to_string(&cert).unwrap();
        let back: ApproxCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.replay(&g).unwrap(), cert.epsilon);
    }

    #[test]
    fn krivine_refinement_is_monotone() {
        let g = PHFunction::pnorm(2, 3.0, vec![rat_int(1), rat_int(2)]).unwrap();
        let mut last = f64::INFINITY;
        for eps in [0.4, 0.2, 0.1, 0.05] {
            let cert = krivine_approximate(&g, eps).unwrap();
            assert!(cert.epsilon <= eps);
            assert!(
                cert.epsilon <= last + 1e-15,
                "bound got worse: {last} then {}",
                cert.epsilon
            );
            last = cert.epsilon;
        }
    }

    #[test]
    fn krivine_signed_black_box_uses_shift() {
        let g = PHFunction::black_box(2, "first-coordinate", 1.0, |t| t[0]).unwrap();
        assert!(!g.is_nonneg());
        let cert = krivine_approximate(&g, 0.1).unwrap();
        assert!(cert.epsilon <= 0.1);
        let f = &cert.approximant;
        for p in [[1.0, 0.3], [-1.0, 0.7], [0.2, 1.0], [-0.4, -1.0]] {
            assert!((f.eval_f64(&p) - p[0]).abs() <= cert.epsilon + 1e-9);
        }
    }

    #[test]
    fn krivine_one_dimensional_sphere_is_two_points() {
        let g = PHFunction::euclidean(1).unwrap();
        let cert = krivine_approximate(&g, 1e-6).unwrap();
        assert!(cert.epsilon <= 1e-6);
        assert!((cert.approximant.eval_f64(&[-3.0]) - 3.0).abs() <= 1e-6 * 3.0);
    }

    #[test]
    fn krivine_rejects_bad_eps_and_exhausts_resources() {
        let g = PHFunction::euclidean(2).unwrap();
        assert!(matches!(
            krivine_approximate(&g, 0.0),
            Err(Error::InvalidElement(_))
        ));
        let tight = ApproxOptions {
            max_construction_points: 40,
        };
        let err = krivine_approximate_with(&g, 1e-9, &tight).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn krivine_three_dimensional_target() {
        let g = PHFunction::euclidean(3).unwrap();
        let cert = krivine_approximate(&g, 0.5).unwrap();
        assert!(cert.epsilon <= 0.5);
        let v = cert.approximant.eval_f64(&[1.0, 1.0, 1.0]);
        assert!((v - 3f64.sqrt()).abs() <= cert.epsilon + 1e-9);
    }
}
