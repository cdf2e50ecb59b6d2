//! Parsers for the command line literal forms that core does not own:
//! rational points, semicolon-joined tuples, and integer index lists.

use phcalc_core::calculus::Tuple;
use phcalc_core::models::{LatticeElement, ModelKind, PLFunc};
use phcalc_core::rat::{parse_rat, Rat};
use phcalc_core::{Error, Result};

/// "1,2,-1/2" -> vector of rationals.
pub fn parse_point(src: &str) -> Result<Vec<Rat>> {
    let v = src
        .split(',')
        .map(|p| parse_rat(p.trim()))
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty point".into()));
    }
    Ok(v)
}

/// Semicolon-separated elements, e.g. "[3,0,-3];[4,0,4]" or "(1,0);(0,1)".
pub fn parse_tuple(model: ModelKind, src: &str) -> Result<Tuple> {
    let elements = src
        .split(';')
        .map(|e| LatticeElement::parse(model, e))
        .collect::<Result<Vec<_>>>()?;
    Tuple::new(elements)
}

/// "0:0,1/2:1/2,1:1" -> piecewise linear function on [0,1].
pub fn parse_pl(src: &str) -> Result<PLFunc> {
    match LatticeElement::parse(ModelKind::Pl, src)? {
        LatticeElement::Pl(f) => Ok(f),
        _ => unreachable!("PL parse returns a PL element"),
    }
}

/// Semicolon-separated PL functions.
pub fn parse_pl_list(src: &str) -> Result<Vec<PLFunc>> {
    src.split(';').map(|e| parse_pl(e.trim())).collect()
}

/// Comma-separated positive integers.
pub fn parse_ms(src: &str) -> Result<Vec<u64>> {
    src.split(',')
        .map(|p| {
            let m: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("not a positive integer: {p:?}")))?;
            if m == 0 {
                return Err(Error::Parse("indices start at 1".into()));
            }
            Ok(m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use phcalc_core::rat::{rat, rat_int};

    #[test]
    fn finite_tuple_literal() {
        let t = parse_tuple(ModelKind::Finite, "[3,0,-3];[4,0,4]").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(
            t.get(0),
            &LatticeElement::Finite(vec![rat_int(3), rat_int(0), rat_int(-3)])
        );
    }

    #[test]
    fn lex_tuple_literal() {
        let t = parse_tuple(ModelKind::Lex, "(1,0);(0,1)").unwrap();
        assert_eq!(t.get(1), &LatticeElement::Lex(rat_int(0), rat_int(1)));
    }

    #[test]
    fn pl_breakpoint_literal() {
        let f = parse_pl("0:0,1/2:1/2,1:1").unwrap();
        assert_eq!(f.eval(&rat(1, 4)), rat(1, 4));
        assert_eq!(f.eval(&rat(3, 4)), rat(3, 4));
    }

    #[test]
    fn bad_literals_are_parse_errors() {
        assert!(parse_tuple(ModelKind::Finite, "(1,0)").is_err());
        assert!(parse_tuple(ModelKind::Lex, "[1,0]").is_err());
        assert!(parse_pl("0:0,broken").is_err());
        assert!(parse_ms("3,0").is_err());
        assert!(parse_point("").is_err());
    }
}
