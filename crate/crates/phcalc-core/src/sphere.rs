//! Finite nets on the unit sphere of the sup norm.
//!
//! The sphere `{t : max_i |t_i| = 1}` is the surface of the cube, i.e. the
//! union of the 2n faces `{t_d = +-1, |t_j| <= 1}`. A net is the grid of
//! step `h' = 2/k` (k = ceil(2/h), so h' <= h) laid over every face, with
//! duplicate edge and corner points removed. Every sphere point is within
//! `h'/2` of a net point in the sup metric, staying inside the same face,
//! which is what turns net maxima into certified sup-norm intervals.

use crate::error::{Error, Result};
use crate::nf::MaxMinNF;
use crate::rat::{rat_int, rat_to_f64, rat_zero, Rat};
use num_traits::{One, Signed, ToPrimitive};

pub const DEFAULT_NET_CAP: usize = 2_000_000;

#[derive(Debug, Clone)]
pub struct SphereNet {
    arity: usize,
    /// Actual grid step used (<= the requested mesh).
    step: Rat,
    covering_radius: Rat,
    points: Vec<Vec<Rat>>,
    points_f64: Vec<Vec<f64>>,
}

impl SphereNet {
    pub fn new(arity: usize, mesh: &Rat) -> Result<Self> {
        SphereNet::with_cap(arity, mesh, DEFAULT_NET_CAP)
    }

    pub fn with_cap(arity: usize, mesh: &Rat, cap: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity("arity must be at least 1".into()));
        }
        if !mesh.is_positive() {
            return Err(Error::InvalidElement("mesh must be positive".into()));
        }
        // k = ceil(2/h), grid values -1 + i * (2/k)
        let two_over_h = Rat::from_integer(2.into()) / mesh;
        let k = two_over_h.ceil().to_integer().to_usize().ok_or_else(|| {
            Error::Resource {
                what: "sphere net subdivision".into(),
                count: u64::MAX,
                limit: cap as u64,
            }
        })?;
        let k = k.max(1);
        let est: u128 = (2 * arity as u128).saturating_mul(((k + 1) as u128).pow(arity as u32 - 1));
        if est > cap as u128 {
            return Err(Error::Resource {
                what: "sphere net points".into(),
                count: est.min(u64::MAX as u128) as u64,
                limit: cap as u64,
            });
        }
        let step = Rat::new(2.into(), (k as u64).into());
        let grid: Vec<Rat> = (0..=k)
            .map(|i| -Rat::one() + &step * rat_int(i as i64))
            .collect();
        let mut points: Vec<Vec<Rat>> = Vec::with_capacity(est as usize);
        let free = arity - 1;
        let mut idx = vec![0usize; free];
        for d in 0..arity {
            for sign in [1i64, -1] {
                idx.iter_mut().for_each(|v| *v = 0);
                loop {
                    let mut p = vec![rat_zero(); arity];
                    p[d] = rat_int(sign);
                    let mut fi = 0;
                    for (j, slot) in p.iter_mut().enumerate() {
                        if j != d {
                            *slot = grid[idx[fi]].clone();
                            fi += 1;
                        }
                    }
                    points.push(p);
                    let mut c = 0;
                    loop {
                        if c == free {
                            break;
                        }
                        idx[c] += 1;
                        if idx[c] <= k {
                            break;
                        }
                        idx[c] = 0;
                        c += 1;
                    }
                    if c == free {
                        break;
                    }
                }
            }
        }
        points.sort();
        points.dedup();
        let points_f64 = points
            .iter()
            .map(|p| p.iter().map(rat_to_f64).collect())
            .collect();
        let covering_radius = if arity == 1 {
            rat_zero()
        } else {
            &step / rat_int(2)
        };
        Ok(SphereNet {
            arity,
            step,
            covering_radius,
            points,
            points_f64,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn step(&self) -> &Rat {
        &self.step
    }

    pub fn covering_radius(&self) -> &Rat {
        &self.covering_radius
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    pub fn points_f64(&self) -> &[Vec<f64>] {
        &self.points_f64
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Interval certified to contain the sup norm of `f` over the sphere:
/// `lo` is the exact net maximum of |f|, `hi` adds the Lipschitz slack
/// `L * r` with L the largest l1 norm among f's forms and r the covering
/// radius.
pub fn sup_norm_bound(f: &MaxMinNF, net: &SphereNet) -> Result<(Rat, Rat)> {
    if f.arity() != net.arity() {
        return Err(Error::Arity(format!(
            "normal form arity {} vs net arity {}",
            f.arity(),
            net.arity()
        )));
    }
    let mut lo = rat_zero();
    for p in net.points() {
        let v = f.eval(p)?.abs();
        if v > lo {
            lo = v;
        }
    }
    let hi = &lo + f.max_l1() * net.covering_radius();
    Ok((lo, hi))
}
