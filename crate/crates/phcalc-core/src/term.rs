//! Lattice-linear terms over variables p1..pn.
//!
//! A term is built from variables with rational scaling, addition, join (`v`)
//! and meet (`^`). Every such term denotes a positively homogeneous, continuous,
//! piecewise linear function on R^n. Absolute value and negation are parser
//! sugar: `|t| = t v (-1)*t`, `-t = (-1)*t`.

use crate::error::{Error, Result};
use crate::rat::{parse_rat, rat_int, rat_str, rat_to_f64, rat_zero, Rat};
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermNode {
    /// 1-based coordinate projection.
    Var(usize),
    Scale(Rat, Box<TermNode>),
    Sum(Box<TermNode>, Box<TermNode>),
    Join(Box<TermNode>, Box<TermNode>),
    Meet(Box<TermNode>, Box<TermNode>),
}

/// A term together with the arity it is read at. Variable indices are
/// validated against the arity on construction, so `eval` cannot go out of
/// bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    arity: usize,
    root: TermNode,
}

impl TermNode {
    pub fn var(i: usize) -> Self {
        TermNode::Var(i)
    }

    pub fn scale(c: Rat, t: TermNode) -> Self {
        TermNode::Scale(c, Box::new(t))
    }

    pub fn sum(a: TermNode, b: TermNode) -> Self {
        TermNode::Sum(Box::new(a), Box::new(b))
    }

    pub fn join(a: TermNode, b: TermNode) -> Self {
        TermNode::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: TermNode, b: TermNode) -> Self {
        TermNode::Meet(Box::new(a), Box::new(b))
    }

    pub fn neg(t: TermNode) -> Self {
        TermNode::scale(rat_int(-1), t)
    }

    pub fn abs(t: TermNode) -> Self {
        TermNode::join(t.clone(), TermNode::neg(t))
    }

    /// The zero term, written as `0 * p1`.
    pub fn zero() -> Self {
        TermNode::scale(rat_zero(), TermNode::Var(1))
    }

    fn max_var(&self) -> usize {
        match self {
            TermNode::Var(i) => *i,
            TermNode::Scale(_, t) => t.max_var(),
            TermNode::Sum(a, b) | TermNode::Join(a, b) | TermNode::Meet(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    fn node_count(&self) -> usize {
        match self {
            TermNode::Var(_) => 1,
            TermNode::Scale(_, t) => 1 + t.node_count(),
            TermNode::Sum(a, b) | TermNode::Join(a, b) | TermNode::Meet(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TermNode::Var(_) => 1,
            TermNode::Scale(_, t) => 1 + t.depth(),
            TermNode::Sum(a, b) | TermNode::Join(a, b) | TermNode::Meet(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}

impl Term {
    pub fn new(arity: usize, root: TermNode) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity("arity must be at least 1".into()));
        }
        let mv = root.max_var();
        if mv > arity {
            return Err(Error::Arity(format!(
                "term uses p{mv} but arity is {arity}"
            )));
        }
        if root.min_var_check() {
            Ok(Term { arity, root })
        } else {
            Err(Error::Arity("variable indices are 1-based".into()))
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &TermNode {
        &self.root
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.arity {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, term arity is {}",
                x.len(),
                self.arity
            )));
        }
        Ok(eval_node(&self.root, x))
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, term arity is {}",
                x.len(),
                self.arity
            )));
        }
        Ok(eval_node_f64(&self.root, x))
    }

    /// Parse the surface syntax, e.g. `"p1 + (p2 v 0)"` or `"|p1| ^ 3/2 * p2"`.
    pub fn parse(arity: usize, src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let node = p.parse_lattice()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!(
                "trailing input at token {:?}",
                p.tokens[p.pos]
            )));
        }
        Term::new(arity, node)
    }

    /// The order unit term `|p1| v ... v |pn|`.
    pub fn unit(arity: usize) -> Result<Self> {
        let mut node = TermNode::abs(TermNode::Var(1));
        for i in 2..=arity {
            node = TermNode::join(node, TermNode::abs(TermNode::Var(i)));
        }
        Term::new(arity, node)
    }

    /// Replace each variable `p_i` with `subs[i-1]`. All substituted terms
    /// must share one arity, which becomes the arity of the result.
    pub fn substitute(&self, subs: &[Term]) -> Result<Term> {
        if subs.len() != self.arity {
            return Err(Error::Arity(format!(
                "term arity {} but {} substitutions given",
                self.arity,
                subs.len()
            )));
        }
        let inner = subs[0].arity;
        for s in subs {
            if s.arity != inner {
                return Err(Error::Arity(
                    "substituted terms must all have the same arity".into(),
                ));
            }
        }
        fn go(node: &TermNode, subs: &[Term]) -> TermNode {
            match node {
                TermNode::Var(i) => subs[*i - 1].root.clone(),
                TermNode::Scale(c, t) => TermNode::Scale(c.clone(), Box::new(go(t, subs))),
                TermNode::Sum(a, b) => {
                    TermNode::Sum(Box::new(go(a, subs)), Box::new(go(b, subs)))
                }
                TermNode::Join(a, b) => {
                    TermNode::Join(Box::new(go(a, subs)), Box::new(go(b, subs)))
                }
                TermNode::Meet(a, b) => {
                    TermNode::Meet(Box::new(go(a, subs)), Box::new(go(b, subs)))
                }
            }
        }
        Term::new(inner, go(&self.root, subs))
    }
}

impl TermNode {
    fn min_var_check(&self) -> bool {
        match self {
            TermNode::Var(i) => *i >= 1,
            TermNode::Scale(_, t) => t.min_var_check(),
            TermNode::Sum(a, b) | TermNode::Join(a, b) | TermNode::Meet(a, b) => {
                a.min_var_check() && b.min_var_check()
            }
        }
    }
}

fn eval_node(t: &TermNode, x: &[Rat]) -> Rat {
    match t {
        TermNode::Var(i) => x[*i - 1].clone(),
        TermNode::Scale(c, a) => c * eval_node(a, x),
        TermNode::Sum(a, b) => eval_node(a, x) + eval_node(b, x),
        TermNode::Join(a, b) => eval_node(a, x).max(eval_node(b, x)),
        TermNode::Meet(a, b) => eval_node(a, x).min(eval_node(b, x)),
    }
}

fn eval_node_f64(t: &TermNode, x: &[f64]) -> f64 {
    match t {
        TermNode::Var(i) => x[*i - 1],
        TermNode::Scale(c, a) => rat_to_f64(c) * eval_node_f64(a, x),
        TermNode::Sum(a, b) => eval_node_f64(a, x) + eval_node_f64(b, x),
        TermNode::Join(a, b) => eval_node_f64(a, x).max(eval_node_f64(b, x)),
        TermNode::Meet(a, b) => eval_node_f64(a, x).min(eval_node_f64(b, x)),
    }
}

// ---------------------------------------------------------------------------
// surface syntax

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(usize),
    Num(Rat),
    Plus,
    Minus,
    Star,
    Vee,
    Wedge,
    Bar,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            'v' => {
                out.push(Tok::Vee);
                i += 1;
            }
            '^' => {
                out.push(Tok::Wedge);
                i += 1;
            }
            '|' => {
                out.push(Tok::Bar);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            'p' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(Error::Parse("variable needs an index, e.g. p1".into()));
                }
                let idx: usize = src[start..j]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad variable index in {src:?}")))?;
                if idx == 0 {
                    return Err(Error::Parse("variables are 1-based (p1, p2, ...)".into()));
                }
                out.push(Tok::Var(idx));
                i = j;
            }
            '0'..='9' => {
                let start = i;
                let mut j = i;
                let mut seen_slash = false;
                let mut seen_dot = false;
                while j < bytes.len() {
                    let d = bytes[j] as char;
                    if d.is_ascii_digit() {
                        j += 1;
                    } else if d == '/' && !seen_slash && !seen_dot {
                        seen_slash = true;
                        j += 1;
                    } else if d == '.' && !seen_dot && !seen_slash {
                        seen_dot = true;
                        j += 1;
                    } else {
                        break;
                    }
                }
                out.push(Tok::Num(parse_rat(&src[start..j])?));
                i = j;
            }
            _ => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    // lattice level: lowest precedence, left-associative joins and meets
    fn parse_lattice(&mut self) -> Result<TermNode> {
        let mut lhs = self.parse_sum()?;
        loop {
            match self.peek() {
                Some(Tok::Vee) => {
                    self.bump();
                    let rhs = self.parse_sum()?;
                    lhs = TermNode::join(lhs, rhs);
                }
                Some(Tok::Wedge) => {
                    self.bump();
                    let rhs = self.parse_sum()?;
                    lhs = TermNode::meet(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_sum(&mut self) -> Result<TermNode> {
        let mut lhs = self.parse_product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.parse_product()?;
                    lhs = TermNode::sum(lhs, rhs);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.parse_product()?;
                    lhs = TermNode::sum(lhs, TermNode::neg(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // products chain scalars with at most one genuine term factor
    fn parse_product(&mut self) -> Result<TermNode> {
        let mut coef: Option<Rat> = None;
        let mut body: Option<TermNode> = None;
        loop {
            let factor = self.parse_factor()?;
            match factor {
                Factor::Num(c) => {
                    coef = Some(match coef {
                        None => c,
                        Some(prev) => prev * c,
                    });
                }
                Factor::Node(t) => {
                    if body.is_some() {
                        return Err(Error::Parse(
                            "product of two terms is not lattice-linear".into(),
                        ));
                    }
                    body = Some(t);
                }
            }
            if matches!(self.peek(), Some(Tok::Star)) {
                self.bump();
            } else {
                break;
            }
        }
        match (coef, body) {
            (None, Some(t)) => Ok(t),
            (Some(c), Some(t)) => Ok(TermNode::scale(c, t)),
            (Some(c), None) => {
                if c.is_zero() {
                    Ok(TermNode::zero())
                } else {
                    Err(Error::Parse(format!(
                        "standalone constant {} breaks positive homogeneity (only 0 is allowed)",
                        rat_str(&c)
                    )))
                }
            }
            (None, None) => Err(Error::Parse("expected a term".into())),
        }
    }

    fn parse_factor(&mut self) -> Result<Factor> {
        match self.bump() {
            Some(Tok::Var(i)) => Ok(Factor::Node(TermNode::Var(i))),
            Some(Tok::Num(c)) => Ok(Factor::Num(c)),
            Some(Tok::Minus) => {
                let inner = self.parse_factor()?;
                Ok(match inner {
                    Factor::Num(c) => Factor::Num(-c),
                    Factor::Node(t) => Factor::Node(TermNode::neg(t)),
                })
            }
            Some(Tok::LParen) => {
                let inner = self.parse_lattice()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(Factor::Node(inner)),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            Some(Tok::Bar) => {
                let inner = self.parse_lattice()?;
                match self.bump() {
                    Some(Tok::Bar) => Ok(Factor::Node(TermNode::abs(inner))),
                    _ => Err(Error::Parse("missing closing |".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

enum Factor {
    Num(Rat),
    Node(TermNode),
}

impl fmt::Display for TermNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermNode::Var(i) => write!(f, "p{i}"),
            TermNode::Scale(c, t) => write!(f, "{} * ({})", rat_str(c), t),
            TermNode::Sum(a, b) => write!(f, "({} + {})", a, b),
            TermNode::Join(a, b) => write!(f, "({} v {})", a, b),
            TermNode::Meet(a, b) => write!(f, "({} ^ {})", a, b),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}
