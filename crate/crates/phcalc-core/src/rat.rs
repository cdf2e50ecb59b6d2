//! Exact rational scalars.
//!
//! Everything in the lattice-term fragment runs on arbitrary-precision
//! rationals; floating point appears only where a target function is
//! genuinely transcendental (p-norms) and is then tracked by explicit slack.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_zero() -> Rat {
    BigRational::zero()
}

/// Exact conversion of a finite `f64` (every finite double is dyadic).
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    BigRational::from_f64(x).ok_or_else(|| Error::Parse(format!("non-finite float {x}")))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse `"n"`, `"n/d"` or a plain decimal like `"-0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let ip: BigInt = if int.trim() == "-" || int.trim().is_empty() {
            BigInt::zero()
        } else {
            int.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal in {s:?}")));
        }
        let fp: BigInt = frac.parse().unwrap();
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let abs = BigRational::new(ip.abs() * &scale + fp, scale);
        return Ok(if sign < 0 { -abs } else { abs });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational literal {s:?}")))?;
    Ok(BigRational::from_integer(n))
}

/// Canonical string form: integers bare, otherwise `n/d` fully reduced.
pub fn rat_str(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "-3/2", "7", "22/7", "-0.25", "1.5", "0.05"] {
            let r = parse_rat(s).unwrap();
            let back = parse_rat(&rat_str(&r)).unwrap();
            assert_eq!(r, back, "{s}");
        }
        assert_eq!(parse_rat("0.05").unwrap(), rat(1, 20));
        assert_eq!(parse_rat("-3/2").unwrap(), rat(-3, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn f64_conversion_is_exact() {
        let r = rat_from_f64(0.1).unwrap();
        // 0.1 is not 1/10 in binary; the conversion must preserve the actual dyadic
        assert_ne!(r, rat(1, 10));
        assert_eq!(rat_to_f64(&r), 0.1);
    }
}
