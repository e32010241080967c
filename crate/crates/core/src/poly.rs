//! Polynomials in `ℚ[x][y]`: Weierstrass polynomials, semiroots and the
//! coefficients of differential forms.
//!
//! Storage is one dense coefficient vector in `x` per power of `y`, kept
//! trimmed so that structural equality is polynomial equality.

use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{fmt_rational, TruncatedSeries, Q};

#[derive(Clone, PartialEq, Eq, Default)]
pub struct PlaneCurvePoly {
    rows: Vec<Vec<Q>>,
}

fn trim(row: &mut Vec<Q>) {
    while row.last().is_some_and(|c| c.is_zero()) {
        row.pop();
    }
}

fn row_add(acc: &mut Vec<Q>, other: &[Q], scale: &Q, shift: usize) {
    if acc.len() < other.len() + shift {
        acc.resize(other.len() + shift, Q::zero());
    }
    for (i, c) in other.iter().enumerate() {
        if !c.is_zero() {
            acc[i + shift] += c * scale;
        }
    }
}

fn row_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl PlaneCurvePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Q::one(), 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Q::one(), 0, 1)
    }

    /// `c x^a y^b`.
    pub fn monomial(c: Q, a: usize, b: usize) -> Self {
        Self::from_terms([(a, b, c)])
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Q)>,
    {
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for (a, b, c) in terms {
            if rows.len() <= b {
                rows.resize(b + 1, Vec::new());
            }
            if rows[b].len() <= a {
                rows[b].resize(a + 1, Q::zero());
            }
            rows[b][a] += c;
        }
        Self::from_rows(rows)
    }

    /// `rows[j]` holds the coefficients of `y^j` as a polynomial in `x`.
    pub fn from_rows(mut rows: Vec<Vec<Q>>) -> Self {
        rows.iter_mut().for_each(trim);
        while rows.last().is_some_and(|r| r.is_empty()) {
            rows.pop();
        }
        Self { rows }
    }

    /// Polynomial in `x` alone.
    pub fn from_x_poly(coeffs: Vec<Q>) -> Self {
        Self::from_rows(vec![coeffs])
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn y_degree(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.len().checked_sub(1)).max()
    }

    pub fn coeff(&self, a: usize, b: usize) -> Q {
        self.rows
            .get(b)
            .and_then(|r| r.get(a))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// Nonzero terms `(x_exp, y_exp, coeff)` ordered by `y` then `x`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        self.rows.iter().enumerate().flat_map(|(b, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(a, c)| (a, b, c))
        })
    }

    pub fn num_terms(&self) -> usize {
        self.terms().count()
    }

    /// Leading coefficient in `y`, as a polynomial in `x`.
    pub fn lead_y(&self) -> Option<&[Q]> {
        self.rows.last().map(|r| r.as_slice())
    }

    pub fn is_monic_in_y(&self) -> bool {
        self.lead_y().is_some_and(|r| r.len() == 1 && r[0].is_one())
    }

    /// Leading coefficient in `y` when it is a nonzero constant.
    fn constant_lead(&self) -> Option<&Q> {
        self.lead_y().filter(|r| r.len() == 1).map(|r| &r[0])
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &Q::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &-Q::one())
    }

    pub fn add_scaled(&self, other: &Self, c: &Q) -> Self {
        let mut rows = self.rows.clone();
        if rows.len() < other.rows.len() {
            rows.resize(other.rows.len(), Vec::new());
        }
        for (j, r) in other.rows.iter().enumerate() {
            row_add(&mut rows[j], r, c, 0);
        }
        Self::from_rows(rows)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().map(|a| a * c).collect())
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut rows = vec![Vec::new(); self.rows.len() + other.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in other.rows.iter().enumerate() {
                let p = row_mul(a, b);
                row_add(&mut rows[i + j], &p, &Q::one(), 0);
            }
        }
        Self::from_rows(rows)
    }

    /// Multiplication by `x^a y^b`.
    pub fn shift(&self, a: usize, b: usize) -> Self {
        let mut rows = vec![Vec::new(); b];
        for r in &self.rows {
            let mut s = vec![Q::zero(); a];
            s.extend(r.iter().cloned());
            rows.push(s);
        }
        Self::from_rows(rows)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn dx(&self) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(a, c)| c * Q::from_integer(BigInt::from(a)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .enumerate()
                .skip(1)
                .map(|(b, r)| {
                    let k = Q::from_integer(BigInt::from(b));
                    r.iter().map(|c| c * &k).collect()
                })
                .collect(),
        )
    }

    /// Keeps only terms with `x` exponent below `n`.
    pub fn truncate_x(&self, n: usize) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .map(|r| r.iter().take(n).cloned().collect())
                .collect(),
        )
    }

    /// Division in `y` by a polynomial whose leading `y` coefficient is a
    /// nonzero constant: `self = q * divisor + r` with `deg_y r < deg_y divisor`.
    pub fn div_rem_y(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor.constant_lead().ok_or(Error::NotMonic)?;
        let inv = lead.recip();
        let d = divisor.rows.len() - 1;
        let mut rem = self.rows.clone();
        let mut quot: Vec<Vec<Q>> = vec![Vec::new(); rem.len().saturating_sub(d)];
        while rem.len() > d {
            let top = rem.len() - 1;
            let c: Vec<Q> = rem[top].iter().map(|a| a * &inv).collect();
            if !c.iter().all(|a| a.is_zero()) {
                for (j, drow) in divisor.rows.iter().enumerate() {
                    let p = row_mul(&c, drow);
                    row_add(&mut rem[top - d + j], &p, &-Q::one(), 0);
                }
                quot[top - d] = c;
            }
            rem.pop();
        }
        Ok((Self::from_rows(quot), Self::from_rows(rem)))
    }

    /// `self(x(t), y(t))` with pessimistic truncation.
    pub fn substitute(&self, x_of_t: &TruncatedSeries, y_of_t: &TruncatedSeries) -> TruncatedSeries {
        let trunc = x_of_t.trunc().max(y_of_t.trunc());
        if self.is_zero() {
            return TruncatedSeries::zero(trunc);
        }
        let max_a = self.x_degree().unwrap_or(0);
        let mut x_pows = vec![TruncatedSeries::monomial(Q::one(), 0, trunc)];
        for a in 1..=max_a {
            let next = x_pows[a - 1].mul(x_of_t);
            x_pows.push(next);
        }
        let eval_row = |row: &[Q]| {
            let mut acc = TruncatedSeries::zero(trunc);
            for (a, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&x_pows[a].scale(c));
                }
            }
            acc
        };
        let mut acc = eval_row(self.rows.last().unwrap());
        for row in self.rows.iter().rev().skip(1) {
            acc = acc.mul(y_of_t).add(&eval_row(row));
        }
        acc
    }

    pub fn to_record(&self) -> PolyRecord {
        PolyRecord(
            self.terms()
                .map(|(a, b, c)| {
                    vec![
                        serde_json::Number::from(a as u64),
                        serde_json::Number::from(b as u64),
                        crate::json::big_number(c.numer()),
                        crate::json::big_number(c.denom()),
                    ]
                })
                .collect(),
        )
    }

    pub fn from_record(rec: &PolyRecord) -> Result<Self> {
        let mut terms = Vec::new();
        for t in &rec.0 {
            match t.as_slice() {
                [a, b, n, d] => terms.push((
                    crate::json::parse_usize(a)? as usize,
                    crate::json::parse_usize(b)? as usize,
                    crate::json::rational(n, d)?,
                )),
                _ => {
                    return Err(Error::Parse(format!(
                        "expected [x_exp, y_exp, num, den], got {t:?}"
                    )))
                }
            }
        }
        Ok(Self::from_terms(terms))
    }
}

/// JSON form: `[[x_exp, y_exp, num, den], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyRecord(pub Vec<Vec<serde_json::Number>>);

/// `h = q f + r` with `deg_y r < deg_y f`, for `f` monic in `y`.
pub fn weierstrass_divide(
    h: &PlaneCurvePoly,
    f: &PlaneCurvePoly,
) -> Result<(PlaneCurvePoly, PlaneCurvePoly)> {
    if !f.is_monic_in_y() {
        return Err(Error::NotMonic);
    }
    h.div_rem_y(f)
}

/// The monic polynomial `Res_t(t^n - x, y - φ(t)) = Π_ζ (y - φ(ζ x^{1/n}))`
/// of a parametrization `(t^n, φ(t))` with polynomial `φ`.
///
/// The resultant is the characteristic polynomial of multiplication by `φ`
/// on `ℚ[x][t]/(t^n - x)`. Its power sums are traces, and the trace of
/// multiplication by `t^m` is `n x^{m/n}` when `n | m` and zero otherwise, so
/// the elementary symmetric functions follow from Newton's identities.
pub fn implicitize(n: usize, phi: &[(usize, Q)]) -> Result<PlaneCurvePoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("ramification index must be positive".into()));
    }
    let support_gcd = phi
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .fold(n as i64, |g, &(e, _)| crate::semigroup::gcd(g, e as i64));
    if support_gcd != 1 {
        return Err(Error::NotPrimitive);
    }
    let deg = phi.iter().map(|(e, _)| *e).max().unwrap_or(0);
    let mut phi_dense = vec![Q::zero(); deg + 1];
    for (e, c) in phi {
        phi_dense[*e] += c;
    }
    // Power sums p_k(x) = n Σ_l [t^{nl}] φ^k x^l.
    let mut power = vec![Q::one()];
    let mut power_sums: Vec<Vec<Q>> = Vec::with_capacity(n);
    for _ in 0..n {
        power = row_mul(&power, &phi_dense);
        let nq = Q::from_integer(BigInt::from(n));
        let p: Vec<Q> = power.iter().step_by(n).map(|c| c * &nq).collect();
        power_sums.push(p);
    }
    // Newton: k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} p_i.
    let mut elem: Vec<Vec<Q>> = vec![vec![Q::one()]];
    for k in 1..=n {
        let mut acc = Vec::new();
        for i in 1..=k {
            let sign = if i % 2 == 1 { Q::one() } else { -Q::one() };
            let prod = row_mul(&elem[k - i], &power_sums[i - 1]);
            row_add(&mut acc, &prod, &sign, 0);
        }
        let inv = Q::from_integer(BigInt::from(k)).recip();
        acc.iter_mut().for_each(|c| *c *= &inv);
        elem.push(acc);
    }
    // f = Σ_k (-1)^k e_k y^{n-k}
    let mut rows = vec![Vec::new(); n + 1];
    for (k, e) in elem.into_iter().enumerate() {
        let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
        rows[n - k] = e.into_iter().map(|c| c * &sign).collect();
    }
    Ok(PlaneCurvePoly::from_rows(rows))
}

impl fmt::Display for PlaneCurvePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        // Descending in y, ascending in x.
        terms.sort_by(|l, r| r.1.cmp(&l.1).then(l.0.cmp(&r.0)));
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, b, c)) in terms.into_iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = c.abs();
            let mut parts = Vec::new();
            if !abs.is_one() || (a == 0 && b == 0) {
                parts.push(fmt_rational(&abs));
            }
            match a {
                0 => {}
                1 => parts.push("x".into()),
                _ => parts.push(format!("x^{a}")),
            }
            match b {
                0 => {}
                1 => parts.push("y".into()),
                _ => parts.push(format!("y^{b}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PlaneCurvePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
