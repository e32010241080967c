//! Independent oracles shared by the integration tests. They use only the
//! basic series and polynomial arithmetic of the crate, never the closure
//! engine or the library's own eliminations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use branchinv::branch::sample_seed;
use branchinv::series::q_frac;
use branchinv::{make_branch, CoefficientChoice, PlaneCurvePoly, PuiseuxBranch, TruncatedSeries, Q};
use num::{One, Zero};
use rand::Rng;

/// Classes used for corpus-wide checks, as characteristic sequences.
pub const CORPUS: &[&[i64]] = &[
    &[2, 3],
    &[2, 5],
    &[2, 7],
    &[3, 4],
    &[3, 5],
    &[3, 7],
    &[4, 5],
    &[3, 8],
    &[4, 6, 7],
    &[4, 6, 9],
    &[4, 7],
    &[5, 6],
    &[4, 6, 11],
    &[4, 9],
    &[5, 7],
    &[4, 10, 11],
    &[6, 7],
    &[5, 8],
    &[6, 8, 9],
    &[6, 9, 10],
    &[7, 8],
    &[6, 9, 11],
    &[6, 10, 11],
];

pub fn branch(beta: &[i64], coeffs: &[(usize, i64)]) -> PuiseuxBranch {
    let map = coeffs.iter().map(|&(e, c)| (e, Q::from_integer(c.into()))).collect();
    make_branch(beta, CoefficientChoice::Explicit(map), 1).unwrap()
}

pub fn seeded(beta: &[i64], master: u64, index: u64) -> PuiseuxBranch {
    make_branch(beta, CoefficientChoice::GenericSeeded(sample_seed(master, index)), 1).unwrap()
}

/// Membership table on `[0, len)` by dynamic programming over the generators.
pub fn sieve(gens: &[i64], len: usize) -> Vec<bool> {
    let mut reach = vec![false; len];
    if len > 0 {
        reach[0] = true;
    }
    for r in 1..len {
        reach[r] = gens.iter().any(|&g| g as usize <= r && reach[r - g as usize]);
    }
    reach
}

/// Positions of the leading entries of an echelon basis of the span.
pub fn leading_positions(vectors: Vec<Vec<Q>>) -> BTreeSet<usize> {
    let mut basis: BTreeMap<usize, Vec<Q>> = BTreeMap::new();
    for mut v in vectors {
        while let Some(lead) = v.iter().position(|c| !c.is_zero()) {
            match basis.get(&lead) {
                Some(b) => {
                    let f = &v[lead] / &b[lead];
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= &f * y;
                    }
                }
                None => {
                    basis.insert(lead, v);
                    break;
                }
            }
        }
    }
    basis.into_keys().collect()
}

fn coeff_vector(s: &TruncatedSeries, len: usize) -> Vec<Q> {
    (0..len).map(|i| s.coeff(i).cloned().unwrap_or_else(Q::zero)).collect()
}

/// `t · (h x' + k y')` along the branch, for polynomials `h`, `k`.
fn form_image(b: &PuiseuxBranch, h: &PlaneCurvePoly, k: &PlaneCurvePoly, trunc: usize) -> TruncatedSeries {
    let wide = trunc + 1;
    let x = b.x_series(wide + 1);
    let y = b.y_series(wide + 1);
    let dx = x.derivative().truncated(wide);
    let dy = y.derivative().truncated(wide);
    let a = h.substitute(&x, &y).truncated(wide);
    let c = k.substitute(&x, &y).truncated(wide);
    a.mul(&dx).add(&c.mul(&dy)).truncated(wide).shift(1).truncated(trunc)
}

fn monomial(a: usize, b: usize) -> PlaneCurvePoly {
    PlaneCurvePoly::monomial(Q::one(), a, b)
}

/// Monomials `x^a y^b` with `n a + v_1 b < bound`.
fn monomials_below(b: &PuiseuxBranch, bound: i64) -> Vec<(usize, usize)> {
    let n = b.n() as i64;
    let v1 = b.semigroup().v(1);
    let mut out = Vec::new();
    for a in 0.. {
        if n * a >= bound {
            break;
        }
        for c in 0.. {
            if n * a + v1 * c >= bound {
                break;
            }
            out.push((a as usize, c as usize));
        }
    }
    out
}

/// `Λ \ Γ` below `bound` from the span of the images of monomial forms.
pub fn brute_lambda_minus_gamma(b: &PuiseuxBranch, bound: usize) -> BTreeSet<i64> {
    let n = b.n() as i64;
    let v1 = b.semigroup().v(1);
    let zero = PlaneCurvePoly::zero();
    let mut vectors = Vec::new();
    for (a, c) in monomials_below(b, bound as i64 - n) {
        vectors.push(coeff_vector(&form_image(b, &monomial(a, c), &zero, bound), bound));
    }
    for (a, c) in monomials_below(b, bound as i64 - v1) {
        vectors.push(coeff_vector(&form_image(b, &zero, &monomial(a, c), bound), bound));
    }
    leading_positions(vectors)
        .into_iter()
        .map(|v| v as i64)
        .filter(|&v| v > 0 && !b.semigroup().contains(v))
        .collect()
}

/// The largest `ν(B)` among forms `A dx + B dy` whose image has order
/// `delta`, by linear algebra on `[B-part below b | image below delta + 1]`.
pub fn brute_theta(b: &PuiseuxBranch, delta: i64) -> Option<i64> {
    let n = b.n() as i64;
    let v1 = b.semigroup().v(1);
    let width = delta as usize + 1;
    let zero = PlaneCurvePoly::zero();
    for bb in (0..=delta).rev() {
        let lb = bb as usize;
        let mut vectors = Vec::new();
        for (a, c) in monomials_below(b, delta + 1 - n) {
            let mut v = vec![Q::zero(); lb];
            v.extend(coeff_vector(&form_image(b, &monomial(a, c), &zero, width), width));
            vectors.push(v);
        }
        for (a, c) in monomials_below(b, (delta + 1 - v1).max(bb)) {
            let m = monomial(a, c);
            let mut v = coeff_vector(&b.pullback_to(&m, lb), lb);
            v.extend(coeff_vector(&form_image(b, &zero, &m, width), width));
            vectors.push(v);
        }
        if leading_positions(vectors).contains(&(lb + delta as usize)) {
            return Some(bb);
        }
    }
    None
}

/// Determinant of a square rational matrix by elimination.
pub fn determinant(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[c][c];
            let pivot = m[c].clone();
            for (x, p) in m[r].iter_mut().zip(&pivot).skip(c) {
                *x -= &f * p;
            }
        }
    }
    det
}

/// Sylvester resultant of two univariate polynomials given by coefficient
/// lists in increasing degree.
pub fn sylvester_resultant(p: &[Q], q: &[Q]) -> Q {
    let (dp, dq) = (p.len() - 1, q.len() - 1);
    let size = dp + dq;
    let mut m = vec![vec![Q::zero(); size]; size];
    for i in 0..dq {
        for (j, c) in p.iter().rev().enumerate() {
            m[i][i + j] = c.clone();
        }
    }
    for i in 0..dp {
        for (j, c) in q.iter().rev().enumerate() {
            m[dq + i][i + j] = c.clone();
        }
    }
    determinant(m)
}

/// `(-1)^n Res_t(t^n - x0, φ(t) - y0)`, which equals `f(x0, y0)`.
pub fn implicit_value_by_resultant(b: &PuiseuxBranch, x0: &Q, y0: &Q) -> Q {
    let n = b.n();
    let mut p = vec![Q::zero(); n + 1];
    p[0] = -x0.clone();
    p[n] = Q::one();
    let top = *b.phi().keys().last().unwrap();
    let mut q = vec![Q::zero(); top + 1];
    for (e, c) in b.phi() {
        q[*e] = c.clone();
    }
    q[0] -= y0;
    let r = sylvester_resultant(&p, &q);
    if n.is_multiple_of(2) {
        r
    } else {
        -r
    }
}

pub fn eval(f: &PlaneCurvePoly, x0: &Q, y0: &Q) -> Q {
    f.terms()
        .map(|(a, b, c)| c * num::pow(x0.clone(), a) * num::pow(y0.clone(), b))
        .sum()
}

/// `dim ℚ[x, y] / (⟨f, f_x, f_y⟩ + 𝔪^degree)` by elimination on the space of
/// polynomials of total degree below `degree`.
pub fn jet_tjurina(f: &PlaneCurvePoly, degree: usize) -> i64 {
    let mut index = BTreeMap::new();
    for d in 0..degree {
        for a in 0..=d {
            let next = index.len();
            index.insert((a, d - a), next);
        }
    }
    let cols = index.len();
    let mut vectors = Vec::new();
    for g in [f.clone(), f.dx(), f.dy()] {
        let low = g.terms().map(|(a, b, _)| a + b).min().unwrap_or(degree);
        for d in 0..degree.saturating_sub(low) {
            for a in 0..=d {
                let h = g.mul(&monomial(a, d - a));
                let mut v = vec![Q::zero(); cols];
                for (x, y, c) in h.terms() {
                    if let Some(&i) = index.get(&(x, y)) {
                        v[i] = c.clone();
                    }
                }
                vectors.push(v);
            }
        }
    }
    cols as i64 - leading_positions(vectors).len() as i64
}

/// A polynomial with `terms` random monomials of bounded degrees and small
/// rational coefficients.
pub fn random_poly(rng: &mut impl Rng, max_x: usize, max_y: usize, terms: usize) -> PlaneCurvePoly {
    let mut h = PlaneCurvePoly::zero();
    for _ in 0..terms {
        let c = q_frac(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        h = h.add(&PlaneCurvePoly::monomial(c, rng.gen_range(0..=max_x), rng.gen_range(0..=max_y)));
    }
    if h.is_zero() {
        PlaneCurvePoly::monomial(Q::one(), 0, 0)
    } else {
        h
    }
}
