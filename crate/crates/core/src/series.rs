//! Truncated power series in one variable with exact rational coefficients.
//!
//! A series carries a truncation order `N`: coefficients of `t^i` for
//! `i < N` are exact, everything from `t^N` on is unknown (not zero).
//! Results of arithmetic are truncated pessimistically, so a coefficient that
//! is reported is always correct.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"7"`, `"-3/4"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Q>,
}

impl TruncatedSeries {
    /// The series that is zero up to `trunc`.
    pub fn zero(trunc: usize) -> Self {
        Self {
            coeffs: vec![Q::zero(); trunc],
        }
    }

    pub fn monomial(c: Q, exp: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if exp < trunc {
            s.coeffs[exp] = c;
        }
        s
    }

    pub fn from_terms<I>(terms: I, trunc: usize) -> Self
    where
        I: IntoIterator<Item = (usize, Q)>,
    {
        let mut s = Self::zero(trunc);
        for (e, c) in terms {
            if e < trunc {
                s.coeffs[e] += c;
            }
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, exp: usize) -> Option<&Q> {
        self.coeffs.get(exp)
    }

    /// Nonzero terms below the truncation, by increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Least exponent with a nonzero coefficient, or `None` when the series
    /// vanishes up to its truncation.
    pub fn order_opt(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn order(&self) -> Result<usize> {
        self.order_opt().ok_or(Error::OrderUnknown(self.trunc()))
    }

    pub fn leading_coeff(&self) -> Result<&Q> {
        let o = self.order()?;
        Ok(&self.coeffs[o])
    }

    pub fn is_zero_to_trunc(&self) -> bool {
        self.order_opt().is_none()
    }

    pub fn truncate(&mut self, trunc: usize) {
        if trunc < self.coeffs.len() {
            self.coeffs.truncate(trunc);
        }
    }

    pub fn truncated(mut self, trunc: usize) -> Self {
        self.truncate(trunc);
        self
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by `t^k`; the truncation grows by `k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![Q::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.trunc().min(other.trunc());
        Self {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.trunc().min(other.trunc());
        Self {
            coeffs: (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let oa = self.order_opt().unwrap_or(self.trunc());
        let ob = other.order_opt().unwrap_or(other.trunc());
        let n = (self.trunc() + ob).min(other.trunc() + oa);
        let mut coeffs = vec![Q::zero(); n];
        for (i, a) in self.terms() {
            if i >= n {
                break;
            }
            for (j, b) in other.terms() {
                if i + j >= n {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        let n = self.trunc().saturating_sub(1);
        Self {
            coeffs: (0..n)
                .map(|i| &self.coeffs[i + 1] * Q::from_integer(BigInt::from(i + 1)))
                .collect(),
        }
    }

    /// `self -= c * t^k * other`, truncating to the smaller window.
    pub fn sub_scaled_shifted(&mut self, c: &Q, k: usize, other: &Self) {
        let n = self.trunc().min(other.trunc() + k);
        self.coeffs.truncate(n);
        for (i, b) in other.terms() {
            if i + k >= n {
                break;
            }
            self.coeffs[i + k] -= c * b;
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::monomial(Q::one(), 0, self.trunc());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            terms: self
                .terms()
                .map(|(e, c)| crate::json::term_record(e as u64, c))
                .collect(),
            trunc: self.trunc(),
        }
    }

    pub fn from_record(rec: &SeriesRecord) -> Result<Self> {
        let mut terms = Vec::new();
        for t in &rec.terms {
            let (e, c) = crate::json::parse_term(t)?;
            if e as usize >= rec.trunc {
                return Err(Error::Parse(format!(
                    "exponent {e} at or above truncation {}",
                    rec.trunc
                )));
            }
            terms.push((e as usize, c));
        }
        Ok(Self::from_terms(terms, rec.trunc))
    }
}

/// JSON form: `{"terms": [[exp, num, den], ...], "trunc": N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub terms: Vec<Vec<serde_json::Number>>,
    pub trunc: usize,
}

pub(crate) fn fmt_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (a.is_one(), e) {
                (_, 0) => write!(f, "{}", fmt_rational(&a))?,
                (true, _) => write!(f, "t^{e}")?,
                (false, _) => write!(f, "{}*t^{e}", fmt_rational(&a))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.trunc())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
