//! Seeded random generation of rationals, terms, and model elements for
//! property checks and diagnostics. Everything is deterministic given the
//! seed.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::models::{EventuallyConstPL, GermClass, LatticeElement, ModelKind, PLFunc};
use crate::rat::{rat, rat_int, Rat};
use crate::term::{Term, TermNode};

/// Coefficient pool: magnitudes at most 8, denominators at most 16.
const MAX_MAG: i64 = 8;
const MAX_DEN: i64 = 16;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A small rational, uniform denominator up to 16, value within +-8.
    pub fn rat(&mut self) -> Rat {
        let den = self.rng.random_range(1..=MAX_DEN);
        let num = self.rng.random_range(-MAX_MAG * den..=MAX_MAG * den);
        rat(num, den)
    }

    /// A small nonnegative rational.
    pub fn rat_nonneg(&mut self) -> Rat {
        let den = self.rng.random_range(1..=MAX_DEN);
        let num = self.rng.random_range(0..=MAX_MAG * den);
        rat(num, den)
    }

    /// A strictly increasing grid 0 = t_0 < ... < t_k = 1 for PL breakpoints.
    fn grid(&mut self, interior: usize) -> Vec<Rat> {
        let mut cuts: Vec<Rat> = (0..interior)
            .map(|_| {
                let den = self.rng.random_range(2..=MAX_DEN);
                rat(self.rng.random_range(1..den), den)
            })
            .collect();
        cuts.sort();
        cuts.dedup();
        let mut xs = vec![Rat::from_integer(0.into())];
        xs.extend(cuts);
        xs.push(Rat::one());
        xs
    }

    pub fn pl(&mut self) -> PLFunc {
        let interior = self.rng.random_range(0..=4);
        let xs = self.grid(interior);
        let bps: Vec<(Rat, Rat)> = xs.into_iter().map(|x| (x, self.rat())).collect();
        PLFunc::from_breakpoints(bps).expect("grid is strictly increasing from 0 to 1")
    }

    /// A PL function constant near zero, i.e. a member of the
    /// eventually-constant sublattice.
    pub fn evc(&mut self) -> EventuallyConstPL {
        let delta = rat(1, self.rng.random_range(2..=8));
        let c = self.rat();
        let tail = self.rng.random_range(0..=3);
        let mut bps = vec![(Rat::from_integer(0.into()), c.clone()), (delta.clone(), c)];
        let mut t = delta;
        for _ in 0..tail {
            let den = self.rng.random_range(2..=MAX_DEN);
            let step = rat(1, den);
            t = &t + &step;
            if t >= Rat::one() {
                break;
            }
            bps.push((t.clone(), self.rat()));
        }
        bps.push((Rat::one(), self.rat()));
        let pl = PLFunc::from_breakpoints(bps).expect("increasing grid");
        EventuallyConstPL::from_pl(pl).expect("constant near zero by construction")
    }

    pub fn element(&mut self, kind: ModelKind, dim: usize) -> LatticeElement {
        match kind {
            ModelKind::Finite => {
                LatticeElement::Finite((0..dim).map(|_| self.rat()).collect())
            }
            ModelKind::Pl => LatticeElement::Pl(self.pl()),
            ModelKind::Evc => LatticeElement::Evc(self.evc()),
            ModelKind::Germ => LatticeElement::Germ(GermClass::new(self.pl())),
            ModelKind::Lex => LatticeElement::Lex(self.rat(), self.rat()),
        }
    }

    /// A nonnegative element, for building order-unit candidates and upper
    /// bound perturbations.
    pub fn element_nonneg(&mut self, kind: ModelKind, dim: usize) -> LatticeElement {
        self.element(kind, dim).abs()
    }

    /// A random term over `arity` variables with depth at most `max_depth`.
    pub fn term(&mut self, arity: usize, max_depth: usize) -> Term {
        let node = self.node(arity, max_depth.max(1));
        Term::new(arity, node).expect("sampled variables are in range")
    }

    fn node(&mut self, arity: usize, depth: usize) -> TermNode {
        if depth <= 1 {
            return TermNode::Var(self.rng.random_range(1..=arity));
        }
        match self.rng.random_range(0..10) {
            0..=2 => TermNode::Var(self.rng.random_range(1..=arity)),
            3 => {
                let c = self.rat();
                TermNode::Scale(c, Box::new(self.node(arity, depth - 1)))
            }
            4..=5 => TermNode::Sum(
                Box::new(self.node(arity, depth - 1)),
                Box::new(self.node(arity, depth - 1)),
            ),
            6..=7 => TermNode::Join(
                Box::new(self.node(arity, depth - 1)),
                Box::new(self.node(arity, depth - 1)),
            ),
            _ => TermNode::Meet(
                Box::new(self.node(arity, depth - 1)),
                Box::new(self.node(arity, depth - 1)),
            ),
        }
    }

    /// A rational point on the unit sphere of the sup norm: one coordinate
    /// is +-1, the others are small rationals in [-1, 1].
    pub fn sphere_point(&mut self, n: usize) -> Vec<Rat> {
        let pivot = self.rng.random_range(0..n);
        let sign = if self.rng.random_bool(0.5) { 1 } else { -1 };
        (0..n)
            .map(|i| {
                if i == pivot {
                    rat_int(sign)
                } else {
                    let den = self.rng.random_range(1..=MAX_DEN);
                    rat(self.rng.random_range(-den..=den), den)
                }
            })
            .collect()
    }
}
