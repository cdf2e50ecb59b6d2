//! Concrete vector lattices behind one tagged value type.
//!
//! Five models: rational vectors with the pointwise order, piecewise linear
//! functions on [0,1], the sublattice of PL functions constant near 0, germ
//! classes of PL functions at 0 (the quotient by functions vanishing near 0),
//! and the plane with the lexicographic order. The first three are
//! Archimedean; the last two are not, which is exactly why they are here.

pub mod plfunc;

use crate::error::{Error, Result};
use crate::rat::{parse_rat, rat_str, rat_zero, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

pub use plfunc::{germ_eq, germ_leq, pl_order_unit_norm, PLFunc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Finite,
    Pl,
    Evc,
    Germ,
    Lex,
}

impl ModelKind {
    pub fn is_archimedean(self) -> bool {
        matches!(self, ModelKind::Finite | ModelKind::Pl | ModelKind::Evc)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Finite => "finite",
            ModelKind::Pl => "pl",
            ModelKind::Evc => "evc",
            ModelKind::Germ => "germ",
            ModelKind::Lex => "lex",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(ModelKind::Finite),
            "pl" => Ok(ModelKind::Pl),
            "evc" => Ok(ModelKind::Evc),
            "germ" => Ok(ModelKind::Germ),
            "lex" => Ok(ModelKind::Lex),
            other => Err(Error::Model(format!("unknown model '{other}'"))),
        }
    }
}

/// A PL function together with a witness that it is constant on [0, delta].
#[derive(Debug, Clone)]
pub struct EventuallyConstPL {
    pl: PLFunc,
    delta: Rat,
}

impl EventuallyConstPL {
    pub fn new(pl: PLFunc, delta: Rat) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::InvalidElement(
                "flatness witness must be positive".into(),
            ));
        }
        if pl.flat_prefix() < delta {
            return Err(Error::InvalidElement(format!(
                "function is not constant on [0, {}]",
                rat_str(&delta)
            )));
        }
        Ok(EventuallyConstPL { pl, delta })
    }

    /// Witness inferred as the maximal flat prefix; rejects functions that
    /// move right away.
    pub fn from_pl(pl: PLFunc) -> Result<Self> {
        let delta = pl.flat_prefix();
        EventuallyConstPL::new(pl, delta)
    }

    pub fn pl(&self) -> &PLFunc {
        &self.pl
    }

    pub fn delta(&self) -> &Rat {
        &self.delta
    }
}

/// Germ of a PL function at 0; the stored representative is not trimmed,
/// equality is agreement on some [0, delta].
#[derive(Debug, Clone)]
pub struct GermClass {
    rep: PLFunc,
}

impl GermClass {
    pub fn new(rep: PLFunc) -> Self {
        GermClass { rep }
    }

    pub fn rep(&self) -> &PLFunc {
        &self.rep
    }
}

#[derive(Debug, Clone)]
pub enum LatticeElement {
    Finite(Vec<Rat>),
    Pl(PLFunc),
    Evc(EventuallyConstPL),
    Germ(GermClass),
    Lex(Rat, Rat),
}

impl PartialEq for LatticeElement {
    fn eq(&self, other: &Self) -> bool {
        use LatticeElement::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a == b,
            (Pl(a), Pl(b)) => a == b,
            (Evc(a), Evc(b)) => a.pl == b.pl,
            (Germ(a), Germ(b)) => germ_eq(&a.rep, &b.rep),
            (Lex(a1, a2), Lex(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}

impl Eq for LatticeElement {}

fn lex_leq(a1: &Rat, a2: &Rat, b1: &Rat, b2: &Rat) -> bool {
    a1 < b1 || (a1 == b1 && a2 <= b2)
}

impl LatticeElement {
    pub fn kind(&self) -> ModelKind {
        match self {
            LatticeElement::Finite(_) => ModelKind::Finite,
            LatticeElement::Pl(_) => ModelKind::Pl,
            LatticeElement::Evc(_) => ModelKind::Evc,
            LatticeElement::Germ(_) => ModelKind::Germ,
            LatticeElement::Lex(..) => ModelKind::Lex,
        }
    }

    pub fn zero_like(&self) -> LatticeElement {
        match self {
            LatticeElement::Finite(v) => LatticeElement::Finite(vec![rat_zero(); v.len()]),
            LatticeElement::Pl(_) => LatticeElement::Pl(PLFunc::constant(rat_zero())),
            LatticeElement::Evc(_) => LatticeElement::Evc(
                EventuallyConstPL::from_pl(PLFunc::constant(rat_zero())).unwrap(),
            ),
            LatticeElement::Germ(_) => {
                LatticeElement::Germ(GermClass::new(PLFunc::constant(rat_zero())))
            }
            LatticeElement::Lex(..) => LatticeElement::Lex(rat_zero(), rat_zero()),
        }
    }

    pub(crate) fn shape_check(&self, other: &LatticeElement) -> Result<()> {
        use LatticeElement::*;
        match (self, other) {
            (Finite(a), Finite(b)) => {
                if a.len() != b.len() {
                    return Err(Error::Dimension(format!(
                        "vector lengths {} and {}",
                        a.len(),
                        b.len()
                    )));
                }
                Ok(())
            }
            (Pl(_), Pl(_)) | (Evc(_), Evc(_)) | (Germ(_), Germ(_)) | (Lex(..), Lex(..)) => Ok(()),
            _ => Err(Error::Model(format!(
                "mixed models {} and {}",
                self.kind().name(),
                other.kind().name()
            ))),
        }
    }

    pub fn add(&self, other: &LatticeElement) -> Result<LatticeElement> {
        self.shape_check(other)?;
        use LatticeElement::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => {
                Finite(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Pl(a), Pl(b)) => Pl(a.add(b)),
            (Evc(a), Evc(b)) => {
                let delta = a.delta.clone().min(b.delta.clone());
                Evc(EventuallyConstPL::new(a.pl.add(&b.pl), delta)?)
            }
            (Germ(a), Germ(b)) => Germ(GermClass::new(a.rep.add(&b.rep))),
            (Lex(a1, a2), Lex(b1, b2)) => Lex(a1 + b1, a2 + b2),
            _ => unreachable!(),
        })
    }

    pub fn scale(&self, c: &Rat) -> LatticeElement {
        use LatticeElement::*;
        match self {
            Finite(a) => Finite(a.iter().map(|x| x * c).collect()),
            Pl(a) => Pl(a.scale(c)),
            Evc(a) => Evc(EventuallyConstPL::new(a.pl.scale(c), a.delta.clone()).unwrap()),
            Germ(a) => Germ(GermClass::new(a.rep.scale(c))),
            Lex(a1, a2) => Lex(a1 * c, a2 * c),
        }
    }

    pub fn neg(&self) -> LatticeElement {
        self.scale(&-Rat::from_integer(1.into()))
    }

    pub fn sub(&self, other: &LatticeElement) -> Result<LatticeElement> {
        self.add(&other.neg())
    }

    pub fn join(&self, other: &LatticeElement) -> Result<LatticeElement> {
        self.shape_check(other)?;
        use LatticeElement::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => Finite(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.clone().max(y.clone()))
                    .collect(),
            ),
            (Pl(a), Pl(b)) => Pl(a.join(b)),
            (Evc(a), Evc(b)) => {
                let delta = a.delta.clone().min(b.delta.clone());
                Evc(EventuallyConstPL::new(a.pl.join(&b.pl), delta)?)
            }
            (Germ(a), Germ(b)) => Germ(GermClass::new(a.rep.join(&b.rep))),
            (Lex(a1, a2), Lex(b1, b2)) => {
                if lex_leq(a1, a2, b1, b2) {
                    Lex(b1.clone(), b2.clone())
                } else {
                    Lex(a1.clone(), a2.clone())
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn meet(&self, other: &LatticeElement) -> Result<LatticeElement> {
        self.shape_check(other)?;
        use LatticeElement::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => Finite(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.clone().min(y.clone()))
                    .collect(),
            ),
            (Pl(a), Pl(b)) => Pl(a.meet(b)),
            (Evc(a), Evc(b)) => {
                let delta = a.delta.clone().min(b.delta.clone());
                Evc(EventuallyConstPL::new(a.pl.meet(&b.pl), delta)?)
            }
            (Germ(a), Germ(b)) => Germ(GermClass::new(a.rep.meet(&b.rep))),
            (Lex(a1, a2), Lex(b1, b2)) => {
                if lex_leq(a1, a2, b1, b2) {
                    Lex(a1.clone(), a2.clone())
                } else {
                    Lex(b1.clone(), b2.clone())
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn abs(&self) -> LatticeElement {
        self.join(&self.neg()).expect("same shape")
    }

    pub fn leq(&self, other: &LatticeElement) -> Result<bool> {
        self.shape_check(other)?;
        use LatticeElement::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => a.iter().zip(b).all(|(x, y)| x <= y),
            (Pl(a), Pl(b)) => a.leq(b),
            (Evc(a), Evc(b)) => a.pl.leq(&b.pl),
            (Germ(a), Germ(b)) => germ_leq(&a.rep, &b.rep),
            (Lex(a1, a2), Lex(b1, b2)) => lex_leq(a1, a2, b1, b2),
            _ => unreachable!(),
        })
    }

    pub fn is_zero(&self) -> bool {
        *self == self.zero_like()
    }

    /// Parse a tuple-literal component: `[3,0,-3]` (finite), `(1,0)` (lex),
    /// `0:0,1/2:1/2,1:1` (pl breakpoints; also evc and germ).
    pub fn parse(kind: ModelKind, s: &str) -> Result<LatticeElement> {
        let s = s.trim();
        match kind {
            ModelKind::Finite => {
                let inner = s
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("expected [a,b,...], got '{s}'")))?;
                let v: Result<Vec<Rat>> = inner.split(',').map(|p| parse_rat(p.trim())).collect();
                let v = v?;
                if v.is_empty() {
                    return Err(Error::Parse("empty vector".into()));
                }
                Ok(LatticeElement::Finite(v))
            }
            ModelKind::Lex => {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("expected (a,b), got '{s}'")))?;
                let parts: Vec<&str> = inner.split(',').collect();
                if parts.len() != 2 {
                    return Err(Error::Parse("lex element needs two coordinates".into()));
                }
                Ok(LatticeElement::Lex(
                    parse_rat(parts[0].trim())?,
                    parse_rat(parts[1].trim())?,
                ))
            }
            ModelKind::Pl | ModelKind::Evc | ModelKind::Germ => {
                let mut bps = Vec::new();
                for part in s.split(',') {
                    let (x, y) = part
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("expected x:y breakpoint, got '{part}'")))?;
                    bps.push((parse_rat(x.trim())?, parse_rat(y.trim())?));
                }
                let pl = PLFunc::from_breakpoints(bps)?;
                Ok(match kind {
                    ModelKind::Pl => LatticeElement::Pl(pl),
                    ModelKind::Evc => LatticeElement::Evc(EventuallyConstPL::from_pl(pl)?),
                    ModelKind::Germ => LatticeElement::Germ(GermClass::new(pl)),
                    _ => unreachable!(),
                })
            }
        }
    }
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeElement::Finite(v) => {
                let parts: Vec<String> = v.iter().map(rat_str).collect();
                write!(out, "[{}]", parts.join(","))
            }
            LatticeElement::Pl(f) => write!(out, "{f}"),
            LatticeElement::Evc(f) => write!(out, "{}", f.pl),
            LatticeElement::Germ(z) => write!(out, "germ({})", z.rep),
            LatticeElement::Lex(a, b) => write!(out, "({},{})", rat_str(a), rat_str(b)),
        }
    }
}

/// Order-unit context: a nonnegative unit e in an Archimedean model.
#[derive(Debug, Clone)]
pub struct OrderUnitContext {
    e: LatticeElement,
}

impl OrderUnitContext {
    pub fn new(e: LatticeElement) -> Result<Self> {
        if !e.kind().is_archimedean() {
            return Err(Error::NonArchimedean(format!(
                "order-unit norm is only a seminorm on the {} model",
                e.kind().name()
            )));
        }
        if !e.zero_like().leq(&e)? {
            return Err(Error::InvalidElement("order unit must be nonnegative".into()));
        }
        Ok(OrderUnitContext { e })
    }

    pub fn e(&self) -> &LatticeElement {
        &self.e
    }

    /// Exact inf{lambda >= 0 : |x| <= lambda e}.
    pub fn norm(&self, x: &LatticeElement) -> Result<Rat> {
        self.e.shape_check(x)?;
        use LatticeElement::*;
        match (&self.e, x) {
            (Finite(e), Finite(v)) => {
                let mut best = rat_zero();
                for (ei, xi) in e.iter().zip(v) {
                    if ei.is_zero() {
                        if !xi.is_zero() {
                            return Err(Error::NotInIdeal(format!(
                                "|x_i| = {} where e_i = 0",
                                rat_str(&xi.abs())
                            )));
                        }
                    } else {
                        let r = xi.abs() / ei;
                        if r > best {
                            best = r;
                        }
                    }
                }
                Ok(best)
            }
            (Pl(e), Pl(x)) => pl_order_unit_norm(x, e),
            (Evc(e), Evc(x)) => pl_order_unit_norm(&x.pl, &e.pl),
            _ => unreachable!("context construction rules out other models"),
        }
    }
}

/// Quotient map onto germ classes.
pub fn quotient_q(f: &PLFunc) -> GermClass {
    GermClass::new(f.clone())
}

/// Right inverse: the stored representative.
pub fn quotient_r(z: &GermClass) -> PLFunc {
    z.rep.clone()
}

/// Membership in the sublattice of functions constant near 0, with the
/// maximal flat prefix as witness.
pub fn membership_x(f: &PLFunc) -> Option<Rat> {
    let d = f.flat_prefix();
    d.is_positive().then_some(d)
}

// --- serialization -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
enum ElemWire {
    Finite {
        v: Vec<String>,
    },
    Pl {
        breakpoints: Vec<(String, String)>,
    },
    Evc {
        breakpoints: Vec<(String, String)>,
        delta: String,
    },
    Germ {
        rep: Vec<(String, String)>,
    },
    Lex {
        v: [String; 2],
    },
}

fn pl_wire(f: &PLFunc) -> Vec<(String, String)> {
    f.breakpoints()
        .iter()
        .map(|(x, y)| (rat_str(x), rat_str(y)))
        .collect()
}

fn pl_unwire(bps: &[(String, String)]) -> Result<PLFunc> {
    let parsed: Result<Vec<(Rat, Rat)>> = bps
        .iter()
        .map(|(x, y)| Ok((parse_rat(x)?, parse_rat(y)?)))
        .collect();
    PLFunc::from_breakpoints(parsed?)
}

impl Serialize for LatticeElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            LatticeElement::Finite(v) => ElemWire::Finite {
                v: v.iter().map(rat_str).collect(),
            },
            LatticeElement::Pl(f) => ElemWire::Pl {
                breakpoints: pl_wire(f),
            },
            LatticeElement::Evc(f) => ElemWire::Evc {
                breakpoints: pl_wire(&f.pl),
                delta: rat_str(&f.delta),
            },
            LatticeElement::Germ(z) => ElemWire::Germ {
                rep: pl_wire(&z.rep),
            },
            LatticeElement::Lex(a, b) => ElemWire::Lex {
                v: [rat_str(a), rat_str(b)],
            },
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LatticeElement {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = ElemWire::deserialize(de)?;
        let conv = |e: Error| serde::de::Error::custom(e.to_string());
        Ok(match wire {
            ElemWire::Finite { v } => {
                let parsed: Result<Vec<Rat>> = v.iter().map(|s| parse_rat(s)).collect();
                LatticeElement::Finite(parsed.map_err(conv)?)
            }
            ElemWire::Pl { breakpoints } => {
                LatticeElement::Pl(pl_unwire(&breakpoints).map_err(conv)?)
            }
            ElemWire::Evc { breakpoints, delta } => {
                let pl = pl_unwire(&breakpoints).map_err(conv)?;
                let delta = parse_rat(&delta).map_err(conv)?;
                LatticeElement::Evc(EventuallyConstPL::new(pl, delta).map_err(conv)?)
            }
            ElemWire::Germ { rep } => {
                LatticeElement::Germ(GermClass::new(pl_unwire(&rep).map_err(conv)?))
            }
            ElemWire::Lex { v } => LatticeElement::Lex(
                parse_rat(&v[0]).map_err(conv)?,
                parse_rat(&v[1]).map_err(conv)?,
            ),
        })
    }
}
