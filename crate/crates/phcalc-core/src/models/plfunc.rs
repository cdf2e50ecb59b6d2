//! Exact piecewise linear functions on [0, 1] with rational breakpoints.
//!
//! The breakpoint list is canonical: abscissae strictly increase from 0 to 1
//! and no interior point is collinear with its neighbours, so two values
//! compare equal exactly when they are the same function. All operations
//! (sum, scale, join, meet, comparison, sup) are exact; join and meet insert
//! the crossing abscissae so the result is again affine between breakpoints.

use crate::error::{Error, Result};
use crate::rat::{rat_str, rat_zero, Rat};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "PlWire", try_from = "PlWire")]
pub struct PLFunc {
    /// (x, y) pairs; invariants enforced by construction.
    bps: Vec<(Rat, Rat)>,
}

#[derive(Serialize, Deserialize)]
struct PlWire {
    breakpoints: Vec<(String, String)>,
}

impl From<PLFunc> for PlWire {
    fn from(f: PLFunc) -> PlWire {
        PlWire {
            breakpoints: f
                .bps
                .iter()
                .map(|(x, y)| (rat_str(x), rat_str(y)))
                .collect(),
        }
    }
}

impl TryFrom<PlWire> for PLFunc {
    type Error = Error;

    fn try_from(w: PlWire) -> Result<PLFunc> {
        let bps: Result<Vec<(Rat, Rat)>> = w
            .breakpoints
            .iter()
            .map(|(x, y)| Ok((crate::rat::parse_rat(x)?, crate::rat::parse_rat(y)?)))
            .collect();
        PLFunc::from_breakpoints(bps?)
    }
}

impl fmt::Display for PLFunc {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bps
            .iter()
            .map(|(x, y)| format!("{}:{}", rat_str(x), rat_str(y)))
            .collect();
        write!(out, "{}", parts.join(","))
    }
}

impl PLFunc {
    pub fn from_breakpoints(bps: Vec<(Rat, Rat)>) -> Result<Self> {
        if bps.len() < 2 {
            return Err(Error::InvalidElement(
                "piecewise linear function needs at least the endpoints 0 and 1".into(),
            ));
        }
        if !bps[0].0.is_zero() || !bps[bps.len() - 1].0.is_one() {
            return Err(Error::InvalidElement(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        for w in bps.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidElement(
                    "breakpoint abscissae must strictly increase".into(),
                ));
            }
        }
        let mut f = PLFunc { bps };
        f.canonicalize();
        Ok(f)
    }

    pub fn constant(c: Rat) -> Self {
        PLFunc {
            bps: vec![(rat_zero(), c.clone()), (Rat::one(), c)],
        }
    }

    pub fn identity() -> Self {
        PLFunc {
            bps: vec![(rat_zero(), rat_zero()), (Rat::one(), Rat::one())],
        }
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.bps
    }

    fn canonicalize(&mut self) {
        // drop interior breakpoints collinear with their neighbours:
        // (y1-y0)(x2-x1) == (y2-y1)(x1-x0)
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(self.bps.len());
        for bp in self.bps.drain(..) {
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let lhs = (&b.1 - &a.1) * (&bp.0 - &b.0);
                let rhs = (&bp.1 - &b.1) * (&b.0 - &a.0);
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(bp);
        }
        self.bps = out;
    }

    /// Value at t; t must lie in [0, 1].
    pub fn eval(&self, t: &Rat) -> Rat {
        assert!(
            !t.is_negative() && *t <= Rat::one(),
            "evaluation point outside [0, 1]"
        );
        let i = match self.bps.binary_search_by(|(x, _)| x.cmp(t)) {
            Ok(i) => return self.bps[i].1.clone(),
            Err(i) => i,
        };
        let (x0, y0) = &self.bps[i - 1];
        let (x1, y1) = &self.bps[i];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    fn union_grid(&self, other: &PLFunc) -> Vec<Rat> {
        let mut xs: Vec<Rat> = self
            .bps
            .iter()
            .map(|(x, _)| x.clone())
            .chain(other.bps.iter().map(|(x, _)| x.clone()))
            .collect();
        xs.sort();
        xs.dedup();
        xs
    }

    fn on_grid(xs: Vec<Rat>, value: impl Fn(&Rat) -> Rat) -> PLFunc {
        let bps = xs
            .into_iter()
            .map(|x| {
                let y = value(&x);
                (x, y)
            })
            .collect();
        let mut f = PLFunc { bps };
        f.canonicalize();
        f
    }

    pub fn add(&self, other: &PLFunc) -> PLFunc {
        PLFunc::on_grid(self.union_grid(other), |x| self.eval(x) + other.eval(x))
    }

    pub fn sub(&self, other: &PLFunc) -> PLFunc {
        PLFunc::on_grid(self.union_grid(other), |x| self.eval(x) - other.eval(x))
    }

    pub fn scale(&self, c: &Rat) -> PLFunc {
        let mut f = PLFunc {
            bps: self.bps.iter().map(|(x, y)| (x.clone(), y * c)).collect(),
        };
        f.canonicalize();
        f
    }

    pub fn neg(&self) -> PLFunc {
        self.scale(&-Rat::one())
    }

    /// Grid refined with the zero crossings of self - other, so max and min
    /// stay affine between breakpoints.
    fn grid_with_crossings(&self, other: &PLFunc) -> Vec<Rat> {
        let mut xs = self.union_grid(other);
        let mut extra = Vec::new();
        for w in xs.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let da = self.eval(a) - other.eval(a);
            let db = self.eval(b) - other.eval(b);
            if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                // affine difference crosses zero strictly inside
                let x = a + (b - a) * &da / (&da - &db);
                extra.push(x);
            }
        }
        xs.extend(extra);
        xs.sort();
        xs.dedup();
        xs
    }

    pub fn join(&self, other: &PLFunc) -> PLFunc {
        PLFunc::on_grid(self.grid_with_crossings(other), |x| {
            self.eval(x).max(other.eval(x))
        })
    }

    pub fn meet(&self, other: &PLFunc) -> PLFunc {
        PLFunc::on_grid(self.grid_with_crossings(other), |x| {
            self.eval(x).min(other.eval(x))
        })
    }

    pub fn abs(&self) -> PLFunc {
        self.join(&self.neg())
    }

    /// Pointwise order, decided exactly at the union breakpoints.
    pub fn leq(&self, other: &PLFunc) -> bool {
        self.union_grid(other)
            .iter()
            .all(|x| self.eval(x) <= other.eval(x))
    }

    pub fn is_zero(&self) -> bool {
        self.bps.iter().all(|(_, y)| y.is_zero())
    }

    /// Exact sup norm: attained at a breakpoint.
    pub fn sup_abs(&self) -> Rat {
        self.bps.iter().map(|(_, y)| y.abs()).max().unwrap()
    }

    /// Largest delta such that the function is constant on [0, delta];
    /// zero when the first segment already moves. Canonical form makes this
    /// the second abscissa or nothing.
    pub fn flat_prefix(&self) -> Rat {
        if self.bps[0].1 == self.bps[1].1 {
            self.bps[1].0.clone()
        } else {
            rat_zero()
        }
    }

    /// Right-hand value structure at 0: (value, slope of the first segment).
    pub fn at_zero(&self) -> (Rat, Rat) {
        let (x0, y0) = &self.bps[0];
        let (x1, y1) = &self.bps[1];
        (y0.clone(), (y1 - y0) / (x1 - x0))
    }
}

/// Exact order-unit norm inf{lambda >= 0 : |x| <= lambda e} for pointwise
/// PL functions with e >= 0. Where e vanishes |x| must vanish too; on a
/// segment where both leave a common zero the ratio is constant and counted
/// at the far endpoint, so the breakpoint maximum is the exact infimum.
pub fn pl_order_unit_norm(x: &PLFunc, e: &PLFunc) -> Result<Rat> {
    let ax = x.abs();
    let mut best = rat_zero();
    for t in ax.union_grid(e) {
        let ev = e.eval(&t);
        let av = ax.eval(&t);
        if ev.is_zero() {
            if !av.is_zero() {
                return Err(Error::NotInIdeal(format!(
                    "|x|({}) = {} but e vanishes there",
                    rat_str(&t),
                    rat_str(&av)
                )));
            }
        } else {
            let ratio = av / ev;
            if ratio > best {
                best = ratio;
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// germ structure at 0 (used by the quotient model)

/// Do f and g agree on some [0, delta], delta > 0?
pub fn germ_eq(f: &PLFunc, g: &PLFunc) -> bool {
    let d = f.sub(g);
    d.bps[0].1.is_zero() && d.bps[1].1.is_zero()
}

/// Is f <= g on some [0, delta], delta > 0?
pub fn germ_leq(f: &PLFunc, g: &PLFunc) -> bool {
    let d = g.sub(f);
    let y0 = &d.bps[0].1;
    if y0.is_positive() {
        return true;
    }
    if y0.is_negative() {
        return false;
    }
    !d.bps[1].1.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn bp(pairs: &[(i64, i64, i64, i64)]) -> PLFunc {
        PLFunc::from_breakpoints(
            pairs
                .iter()
                .map(|&(xn, xd, yn, yd)| (rat(xn, xd), rat(yn, yd)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn collinear_breakpoints_are_merged() {
        let f = bp(&[(0, 1, 0, 1), (1, 2, 1, 2), (1, 1, 1, 1)]);
        assert_eq!(f, PLFunc::identity());
        assert_eq!(f.breakpoints().len(), 2);
    }

    #[test]
    fn join_inserts_the_crossing() {
        // identity v 1/2: flat until they cross at 1/2
        let f = PLFunc::identity().join(&PLFunc::constant(rat(1, 2)));
        assert_eq!(
            f.breakpoints(),
            &[
                (rat(0, 1), rat(1, 2)),
                (rat(1, 2), rat(1, 2)),
                (rat(1, 1), rat(1, 1)),
            ]
        );
    }

    #[test]
    fn arithmetic_matches_pointwise_on_a_grid() {
        let f = bp(&[(0, 1, 1, 1), (1, 3, -1, 2), (1, 1, 2, 1)]);
        let g = bp(&[(0, 1, 0, 1), (3, 4, 1, 1), (1, 1, 0, 1)]);
        for k in 0..=24 {
            let t = rat(k, 24);
            let (fv, gv) = (f.eval(&t), g.eval(&t));
            assert_eq!(f.add(&g).eval(&t), &fv + &gv);
            assert_eq!(f.sub(&g).eval(&t), &fv - &gv);
            assert_eq!(f.join(&g).eval(&t), fv.clone().max(gv.clone()));
            assert_eq!(f.meet(&g).eval(&t), fv.clone().min(gv.clone()));
            assert_eq!(f.abs().eval(&t), fv.abs());
            assert_eq!(f.scale(&rat(-3, 2)).eval(&t), fv * rat(-3, 2));
        }
    }

    #[test]
    fn order_is_pointwise() {
        let f = PLFunc::identity();
        let g = PLFunc::constant(Rat::one());
        assert!(f.leq(&g));
        assert!(!g.leq(&f));
        assert!(f.leq(&f));
    }

    #[test]
    fn flat_prefix_detection() {
        assert_eq!(PLFunc::constant(rat(3, 1)).flat_prefix(), rat(1, 1));
        assert_eq!(PLFunc::identity().flat_prefix(), rat(0, 1));
        let f = bp(&[(0, 1, 1, 4), (1, 4, 1, 4), (1, 1, 1, 1)]);
        assert_eq!(f.flat_prefix(), rat(1, 4));
    }

    #[test]
    fn sup_is_breakpoint_max() {
        let f = bp(&[(0, 1, -3, 1), (1, 2, 1, 4), (1, 1, 0, 1)]);
        assert_eq!(f.sup_abs(), rat(3, 1));
    }

    #[test]
    fn order_unit_norm_cases() {
        // e = (1,2,4)-style scaling on PL: e = 1 everywhere
        let e1 = PLFunc::constant(Rat::one());
        let f = bp(&[(0, 1, -1, 2), (1, 2, 1, 4), (1, 1, 0, 1)]);
        assert_eq!(pl_order_unit_norm(&f, &e1).unwrap(), rat(1, 2));
        // x = e gives exactly 1
        let e = bp(&[(0, 1, 1, 1), (1, 2, 2, 1), (1, 1, 1, 1)]);
        assert_eq!(pl_order_unit_norm(&e, &e).unwrap(), rat(1, 1));
        // shared zero at 0: ratio decided by slopes
        let id = PLFunc::identity();
        assert_eq!(pl_order_unit_norm(&id.scale(&rat(3, 1)), &id).unwrap(), rat(3, 1));
        // e vanishing where x does not: no finite lambda
        match pl_order_unit_norm(&e1, &id) {
            Err(Error::NotInIdeal(_)) => {}
            other => panic!("expected NotInIdeal, got {other:?}"),
        }
    }

    #[test]
    fn germ_relations() {
        // agree on [0, 1/4], differ later: same germ
        let f = bp(&[(0, 1, 1, 1), (1, 4, 1, 1), (1, 1, 5, 1)]);
        let g = bp(&[(0, 1, 1, 1), (1, 4, 1, 1), (1, 1, -2, 1)]);
        assert!(germ_eq(&f, &g));
        // h(t) = t is not germ-zero
        let h = PLFunc::identity();
        assert!(!germ_eq(&h, &PLFunc::constant(rat_zero())));
        // 0 <= germ(h) and h <= 1 near zero
        assert!(germ_leq(&PLFunc::constant(rat_zero()), &h));
        assert!(germ_leq(&h, &PLFunc::constant(Rat::one())));
        assert!(!germ_leq(&PLFunc::constant(Rat::one()), &h));
    }

    #[test]
    fn eval_interpolates() {
        let f = bp(&[(0, 1, 0, 1), (1, 2, 1, 1), (1, 1, 0, 1)]);
        assert_eq!(f.eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(f.eval(&rat(3, 4)), rat(1, 2));
        assert_eq!(f.eval(&rat(1, 2)), rat(1, 1));
    }

    #[test]
    fn wire_roundtrip() {
        let f = bp(&[(0, 1, 1, 3), (2, 5, -1, 2), (1, 1, 4, 1)]);
        let js = serde_json::to_string(&f).unwrap();
        let back: PLFunc = serde_json::from_str(&js).unwrap();
        assert_eq!(f, back);
    }
}
