//! Exact JSON encodings of rationals: integers are written as JSON numbers of
//! arbitrary size, never through floating point.

use std::str::FromStr;

use num::BigInt;
use serde_json::Number;

use crate::error::{Error, Result};
use crate::series::Q;

pub(crate) fn big_number(n: &BigInt) -> Number {
    Number::from_str(&n.to_string()).expect("decimal integers are valid JSON numbers")
}

pub(crate) fn parse_big(n: &Number) -> Result<BigInt> {
    let s = n.to_string();
    BigInt::from_str(&s).map_err(|_| Error::Parse(format!("expected an integer, got {s}")))
}

pub(crate) fn parse_usize(n: &Number) -> Result<u64> {
    n.as_u64()
        .ok_or_else(|| Error::Parse(format!("expected a non-negative exponent, got {n}")))
}

/// `[exp, num, den]`.
pub(crate) fn term_record(exp: u64, c: &Q) -> Vec<Number> {
    vec![Number::from(exp), big_number(c.numer()), big_number(c.denom())]
}

pub(crate) fn parse_term(t: &[Number]) -> Result<(u64, Q)> {
    match t {
        [e, n, d] => Ok((parse_usize(e)?, rational(n, d)?)),
        _ => Err(Error::Parse(format!("expected [exp, num, den], got {t:?}"))),
    }
}

pub(crate) fn rational(n: &Number, d: &Number) -> Result<Q> {
    let n = parse_big(n)?;
    let d = parse_big(d)?;
    if d == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Q::new(n, d))
}
