//! Values of differential forms on a branch.
//!
//! A form is `ω = A dx + B dy` and its image on the branch is
//! `Υ(ω) = t (A(t^n, φ) n t^{n-1} + B(t^n, φ) φ'(t))`. Its order is the value
//! `ν(ω)`; the set `Λ` of values of all non-torsion forms contains
//! `Γ \ {0}` and differs from it only by finitely many gaps.

use std::collections::BTreeSet;

use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::branch::PuiseuxBranch;
use crate::closure::{OrderBasis, ValueClosure};
use crate::error::{Error, Result};
use crate::linalg::{echelon_by_leading_key, nullspace, rank_mod_prime};
use crate::poly::{weierstrass_divide, PlaneCurvePoly, PolyRecord};
use crate::semigroup::{NumericalSemigroup, SemigroupRecord};
use crate::series::{TruncatedSeries, Q};

/// `ω = a dx + b dy`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DifferentialForm {
    pub a: PlaneCurvePoly,
    pub b: PlaneCurvePoly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub a: PolyRecord,
    pub b: PolyRecord,
}

impl DifferentialForm {
    pub fn new(a: PlaneCurvePoly, b: PlaneCurvePoly) -> Self {
        Self { a, b }
    }

    pub fn dx() -> Self {
        Self::new(PlaneCurvePoly::one(), PlaneCurvePoly::zero())
    }

    pub fn dy() -> Self {
        Self::new(PlaneCurvePoly::zero(), PlaneCurvePoly::one())
    }

    /// `dh`.
    pub fn exact(h: &PlaneCurvePoly) -> Self {
        Self::new(h.dx(), h.dy())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.a.add(&other.a), self.b.add(&other.b))
    }

    pub fn scale_by(&self, h: &PlaneCurvePoly) -> Self {
        Self::new(self.a.mul(h), self.b.mul(h))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Membership in `𝓔(f)`: `deg_y a < n` and `deg_y b < n - 1`.
    pub fn in_e_part(&self, n: usize) -> bool {
        self.a.y_degree().is_none_or(|d| d < n) && self.b.y_degree().is_none_or(|d| d + 1 < n)
    }

    pub fn record(&self) -> FormRecord {
        FormRecord {
            a: self.a.to_record(),
            b: self.b.to_record(),
        }
    }

    pub fn from_record(rec: &FormRecord) -> Result<Self> {
        Ok(Self::new(
            PlaneCurvePoly::from_record(&rec.a)?,
            PlaneCurvePoly::from_record(&rec.b)?,
        ))
    }
}

/// `Υ(dx) = n t^n`.
fn upsilon_dx(branch: &PuiseuxBranch, trunc: usize) -> TruncatedSeries {
    TruncatedSeries::monomial(Q::from_integer(BigInt::from(branch.n())), branch.n(), trunc)
}

/// `Υ(dy) = t φ'(t)`.
fn upsilon_dy(branch: &PuiseuxBranch, trunc: usize) -> TruncatedSeries {
    TruncatedSeries::from_terms(
        branch
            .phi()
            .iter()
            .map(|(e, c)| (*e, c * Q::from_integer(BigInt::from(*e)))),
        trunc,
    )
}

/// `Υ(ω)` up to `t^trunc`.
pub fn upsilon_to(branch: &PuiseuxBranch, form: &DifferentialForm, trunc: usize) -> TruncatedSeries {
    let a = branch.pullback_to(&form.a, trunc).mul(&upsilon_dx(branch, trunc));
    let b = branch.pullback_to(&form.b, trunc).mul(&upsilon_dy(branch, trunc));
    a.add(&b).truncated(trunc)
}

pub fn upsilon(branch: &PuiseuxBranch, form: &DifferentialForm) -> TruncatedSeries {
    upsilon_to(branch, form, branch.trunc())
}

/// `ν(ω)` and the leading coefficient of `Υ(ω)`.
pub fn form_value(branch: &PuiseuxBranch, form: &DifferentialForm) -> Result<(usize, Q)> {
    let u = upsilon(branch, form);
    match u.order_opt() {
        Some(o) => Ok((o, u.coeff(o).unwrap().clone())),
        None => Err(Error::TorsionOrTruncation(branch.trunc())),
    }
}

/// `P_f(ω) = A f_y - B f_x`, the coefficient of `ω ∧ df` on `dx ∧ dy`.
pub fn pf_pairing(f: &PlaneCurvePoly, form: &DifferentialForm) -> PlaneCurvePoly {
    form.a.mul(&f.dy()).sub(&form.b.mul(&f.dx()))
}

/// The cofactor `M` with `P_f(ω) = M f` when `ω` is logarithmic along `f = 0`.
pub fn is_logarithmic(f: &PlaneCurvePoly, form: &DifferentialForm) -> Result<Option<PlaneCurvePoly>> {
    let (quot, rem) = weierstrass_divide(&pf_pairing(f, form), f)?;
    Ok(rem.is_zero().then_some(quot))
}

/// `Λ ∩ [1, guarantee)` as the gaps of `Γ` it contains; every integer
/// `>= guarantee` is a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    pub semigroup: NumericalSemigroup,
    pub extra: Vec<i64>,
    pub guarantee: i64,
}

/// JSON form of a value set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSetRecord {
    pub semigroup: SemigroupRecord,
    pub lambda_minus_gamma: Vec<i64>,
    pub tau: i64,
    pub mu: i64,
}

impl ValueSet {
    pub fn mu(&self) -> i64 {
        self.semigroup.milnor()
    }

    pub fn tau(&self) -> i64 {
        self.mu() - self.extra.len() as i64
    }

    pub fn contains(&self, v: i64) -> bool {
        v > 0 && (v >= self.guarantee || self.semigroup.contains(v) || self.extra.binary_search(&v).is_ok())
    }

    /// Positive integers below the guarantee that are not values.
    pub fn non_values(&self) -> Vec<i64> {
        (1..self.guarantee).filter(|&v| !self.contains(v)).collect()
    }

    pub fn record(&self) -> ValueSetRecord {
        ValueSetRecord {
            semigroup: self.semigroup.record(),
            lambda_minus_gamma: self.extra.clone(),
            tau: self.tau(),
            mu: self.mu(),
        }
    }
}

/// The closure of `O Υ(dx) + O Υ(dy)` tracked below `bound`.
pub fn lambda_closure(branch: &PuiseuxBranch, bound: usize) -> ValueClosure {
    let mut basis = OrderBasis::new(branch, bound);
    let seeds = [upsilon_dx(branch, bound), upsilon_dy(branch, bound)];
    ValueClosure::compute(&mut basis, &seeds, bound)
}

/// `Λ` of a branch, exact below the Milnor number.
pub fn lambda_set(branch: &PuiseuxBranch) -> Result<ValueSet> {
    let mu = branch.milnor();
    if (branch.trunc() as i64) < mu {
        return Err(Error::InsufficientTruncation {
            needed: mu as usize,
            available: branch.trunc(),
        });
    }
    let semigroup = branch.semigroup().clone();
    if branch.is_smooth() {
        return Ok(ValueSet {
            semigroup,
            extra: vec![],
            guarantee: 1,
        });
    }
    let closure = lambda_closure(branch, mu as usize);
    let extra = closure
        .values()
        .into_iter()
        .map(|v| v as i64)
        .filter(|&v| v > 0 && !semigroup.contains(v))
        .collect();
    Ok(ValueSet {
        semigroup,
        extra,
        guarantee: mu,
    })
}

/// `Δ \ {0} = {δ ≠ 0 : -δ ∉ Λ}` on the window `[-μ, μ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSet {
    pub window: i64,
    pub members: Vec<i64>,
}

impl DeltaSet {
    pub fn contains(&self, d: i64) -> bool {
        self.members.binary_search(&d).is_ok()
    }
}

pub fn delta_set(lambda: &ValueSet) -> DeltaSet {
    let w = lambda.mu();
    DeltaSet {
        window: w,
        members: (-w..=w).filter(|&d| d != 0 && !lambda.contains(-d)).collect(),
    }
}

/// Values of the Jacobian ideal on `[μ - 1, 2μ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianValues {
    pub mu: i64,
    pub values: Vec<i64>,
}

impl JacobianValues {
    /// `ν(J(f)) - (μ - 1)` on the window.
    pub fn shifted(&self) -> Vec<i64> {
        self.values.iter().map(|v| v - (self.mu - 1)).collect()
    }

    /// Whether `ν(J(f)) - (μ - 1) = Γ \ {0}` on the window.
    pub fn identity_holds(&self, semigroup: &NumericalSemigroup) -> bool {
        let expected: Vec<i64> = (1..=self.mu + 1).filter(|&r| semigroup.contains(r)).collect();
        self.shifted() == expected
    }

    /// Whether `ν(J(f)) - (μ - 1)` equals `Λ` on the window.
    pub fn matches_lambda(&self, lambda: &ValueSet) -> bool {
        let expected: Vec<i64> = (1..=self.mu + 1).filter(|&r| lambda.contains(r)).collect();
        self.shifted() == expected
    }
}

pub fn jacobian_values(branch: &PuiseuxBranch) -> Result<JacobianValues> {
    let mu = branch.milnor();
    let bound = (2 * mu + 1) as usize;
    let f = branch.implicit();
    let seeds = [
        branch.pullback_to(&f.dx(), bound),
        branch.pullback_to(&f.dy(), bound),
    ];
    let mut basis = OrderBasis::new(branch, bound);
    let closure = ValueClosure::compute(&mut basis, &seeds, bound);
    let values = closure
        .values()
        .into_iter()
        .map(|v| v as i64)
        .filter(|&v| v >= mu - 1)
        .collect();
    Ok(JacobianValues { mu, values })
}

/// `τ = μ - #(Λ \ Γ)`.
pub fn tjurina(branch: &PuiseuxBranch) -> Result<i64> {
    Ok(lambda_set(branch)?.tau())
}

fn series_inverse(u: &TruncatedSeries) -> TruncatedSeries {
    let n = u.trunc();
    let u0 = u.coeff(0).expect("unit").recip();
    let mut inv = vec![Q::zero(); n];
    if n > 0 {
        inv[0] = u0.clone();
    }
    for k in 1..n {
        let mut s = Q::zero();
        for (i, c) in u.terms().take_while(|(i, _)| *i <= k) {
            if i > 0 {
                s += c * &inv[k - i];
            }
        }
        inv[k] = -(s * &u0);
    }
    TruncatedSeries::from_terms(inv.into_iter().enumerate(), n)
}

/// `dim_ℚ ℚ[x][y] / (f, f_x, f_y, x^k)` localized at the origin, for a
/// Weierstrass polynomial `f`.
///
/// The quotient by `f` is free over `ℚ[[x]]` on `1, y, ..., y^{n-1}`, and the
/// Jacobian ideal is spanned over `ℚ[[x]]` by the reductions of `y^j f_x` and
/// `y^j f_y`. A triangular basis over `ℚ[x]/(x^k)`, closed under the
/// annihilators of its pivots, gives the codimension as the sum of the pivot
/// orders.
pub fn tjurina_oracle_at(f: &PlaneCurvePoly, k: usize) -> Result<i64> {
    let n = f.y_degree().ok_or(Error::NotMonic)?;
    if !f.is_monic_in_y() {
        return Err(Error::NotMonic);
    }
    let to_row = |h: &PlaneCurvePoly| -> Vec<TruncatedSeries> {
        (0..n)
            .map(|j| {
                let coeffs = h.rows().get(j).cloned().unwrap_or_default();
                TruncatedSeries::from_terms(coeffs.into_iter().enumerate(), k)
            })
            .collect()
    };
    let (fx, fy) = (f.dx(), f.dy());
    let mut rows = Vec::with_capacity(2 * n);
    for j in 0..n {
        let yj = PlaneCurvePoly::monomial(Q::one(), 0, j);
        for h in [&fx, &fy] {
            rows.push(to_row(&weierstrass_divide(&h.mul(&yj), f)?.1));
        }
    }
    let mut total = 0i64;
    for c in 0..n {
        let pivot = rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r[c].order_opt().map(|o| (o, i)))
            .min();
        let Some((d, p)) = pivot else {
            total += k as i64;
            continue;
        };
        total += d as i64;
        let prow = rows.swap_remove(p);
        let unit_inv = series_inverse(&unshift(&prow[c], d));
        for row in rows.iter_mut() {
            if row[c].is_zero_to_trunc() {
                continue;
            }
            let factor = unshift(&row[c], d).mul(&unit_inv).truncated(k);
            for (x, p) in row.iter_mut().zip(&prow) {
                *x = x.sub(&factor.mul(p).truncated(k)).truncated(k);
            }
            debug_assert!(row[c].is_zero_to_trunc());
        }
        // x^{k-d} times the pivot row vanishes in column c but not beyond it.
        let tail: Vec<TruncatedSeries> = prow.iter().map(|e| e.shift(k - d).truncated(k)).collect();
        if tail.iter().any(|e| !e.is_zero_to_trunc()) {
            rows.push(tail);
        }
    }
    Ok(total)
}

/// `t^{-d} s` for a series of order at least `d`, keeping the truncation.
fn unshift(s: &TruncatedSeries, d: usize) -> TruncatedSeries {
    let k = s.trunc();
    TruncatedSeries::from_terms(s.terms().map(|(e, c)| (e - d, c.clone())), k)
}

/// The Tjurina number of a Weierstrass polynomial, by the codimension
/// computation with `x`-truncation raised until it stabilizes.
///
/// The layers `x^i T / x^{i+1} T` of the Tjurina algebra `T` shrink with
/// `i`, so equal codimensions at `k` and `k + 1` imply `x^k T = 0`.
pub fn tjurina_oracle(f: &PlaneCurvePoly) -> Result<i64> {
    let mut k = f.y_degree().unwrap_or(1).max(2);
    loop {
        let a = tjurina_oracle_at(f, k)?;
        if a == tjurina_oracle_at(f, k + 1)? {
            return Ok(a);
        }
        k *= 2;
    }
}

/// The Delorme function: the largest `ν(B)` over forms `A dx + B dy` of value
/// `δ`, for `δ ∈ Λ \ Γ`.
pub fn theta(branch: &PuiseuxBranch, delta: i64) -> Result<i64> {
    let semigroup = branch.semigroup();
    if semigroup.contains(delta) {
        return Err(Error::DeltaInSemigroup(delta));
    }
    if delta <= 0 {
        return Err(Error::DeltaNotValue(delta));
    }
    let bound = delta as usize + 1;
    let mut basis = OrderBasis::new(branch, bound);
    let u1 = upsilon_dx(branch, bound);
    let u2 = upsilon_dy(branch, bound);
    if !ValueClosure::compute(&mut basis, &[u1.clone(), u2.clone()], bound).contains(delta as usize) {
        return Err(Error::DeltaNotValue(delta));
    }
    let v1 = semigroup.v(1);
    let top = delta - v1;
    for b in (0..top).rev().filter(|&b| semigroup.contains(b)) {
        let mut seeds = vec![u1.clone()];
        for gamma in (b..=top).filter(|&c| semigroup.contains(c)) {
            seeds.push(basis.element(gamma).mul(&u2).truncated(bound));
        }
        if ValueClosure::compute(&mut basis, &seeds, bound).contains(delta as usize) {
            return Ok(b);
        }
    }
    Err(Error::DeltaNotValue(delta))
}

/// `ρ_k(δ)` for the k-semiroot branch `semiroot` of a branch whose data at
/// level `k` are `e_k` and `β_{k+1}`.
pub fn rho_with(semiroot: &PuiseuxBranch, e_k: i64, beta_next: i64, delta: i64) -> Result<i64> {
    let th = theta(semiroot, delta)?;
    let d = e_k * (delta - th);
    match d.cmp(&beta_next) {
        std::cmp::Ordering::Less => Ok(e_k * delta),
        std::cmp::Ordering::Greater => Ok(beta_next + e_k * th),
        std::cmp::Ordering::Equal => Err(Error::InvalidArgument(format!(
            "e_k (δ - Θ(δ)) = β_(k+1) = {beta_next} for δ = {delta}"
        ))),
    }
}

/// `ρ_k(δ)` using the semiroot built from the branch's own parametrization.
pub fn rho(branch: &PuiseuxBranch, k: usize, delta: i64) -> Result<i64> {
    let s = branch.semigroup();
    if k == 0 || k >= s.genus() {
        return Err(Error::InvalidArgument(format!("level {k} must lie in 1..g")));
    }
    rho_with(&branch.semiroot_branch(k)?, s.e(k), s.beta(k + 1), delta)
}

/// `ω = (A_1 dx + B_1 dy) + (Q df + P f dx)` with `deg_y A_1 < n` and
/// `deg_y B_1 < n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormDecomposition {
    pub e_part: DifferentialForm,
    pub q: PlaneCurvePoly,
    pub p: PlaneCurvePoly,
}

impl FormDecomposition {
    pub fn reconstruct(&self, f: &PlaneCurvePoly) -> DifferentialForm {
        self.e_part
            .add(&DifferentialForm::exact(f).scale_by(&self.q))
            .add(&DifferentialForm::new(self.p.mul(f), PlaneCurvePoly::zero()))
    }
}

pub fn weierstrass_form_decompose(f: &PlaneCurvePoly, form: &DifferentialForm) -> Result<FormDecomposition> {
    if !f.is_monic_in_y() {
        return Err(Error::NotMonic);
    }
    let (q, b1) = form.b.div_rem_y(&f.dy())?;
    let (p, a1) = weierstrass_divide(&form.a.sub(&q.mul(&f.dx())), f)?;
    Ok(FormDecomposition {
        e_part: DifferentialForm::new(a1, b1),
        q,
        p,
    })
}

/// Witness data for the order and leading-coefficient law of a logarithmic
/// form `ω ∈ 𝓔(f)` with `P_f(ω) = M f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bm1Report {
    pub nu_b: i64,
    pub nu_m: i64,
    pub level: Option<usize>,
    pub lc_b: Q,
    pub lc_m: Q,
    pub expected_lc_m: Option<Q>,
}

impl Bm1Report {
    pub fn holds(&self, n: i64) -> bool {
        self.nu_b == self.nu_m + n && self.expected_lc_m.as_ref() == Some(&self.lc_m)
    }
}

/// Checks `ν(B) = ν(M) + v_0` and `lc(M) = -e_k v_{k+1} lc(B) / n` with
/// `k = max{i : e_i ∤ ν(B) - ν(f_y)}`. The sign reflects `P_f(ω) = A f_y - B f_x`.
/// Orders beyond the truncation are retried with up to eight times the
/// original truncation.
pub fn bm1_check(branch: &PuiseuxBranch, form: &DifferentialForm) -> Result<Bm1Report> {
    let limit = 8 * branch.trunc();
    let mut b = branch.clone();
    loop {
        match bm1_at(&b, form) {
            Err(Error::ValueAboveTruncation(t)) if 2 * t <= limit => b = b.with_trunc(2 * t),
            r => return r,
        }
    }
}

fn bm1_at(branch: &PuiseuxBranch, form: &DifferentialForm) -> Result<Bm1Report> {
    let f = branch.implicit();
    let n = branch.n();
    if !form.in_e_part(n) {
        return Err(Error::InvalidArgument("form is not in the E-part".into()));
    }
    let m = is_logarithmic(&f, form)?.ok_or(Error::NotLogarithmic)?;
    let s = branch.semigroup();
    let (nu_b, lc_b) = branch.valuation(&form.b)?;
    let (nu_m, lc_m) = branch.valuation(&m)?;
    let (nu_fy, _) = branch.valuation(&f.dy())?;
    let level = s.top_nondividing_level(nu_b as i64 - nu_fy as i64);
    let expected_lc_m = level.map(|k| {
        -Q::from_integer(BigInt::from(s.e(k) * s.v(k + 1))) * &lc_b / Q::from_integer(BigInt::from(n))
    });
    Ok(Bm1Report {
        nu_b: nu_b as i64,
        nu_m: nu_m as i64,
        level,
        lc_b,
        lc_m,
        expected_lc_m,
    })
}

/// A logarithmic form in `𝓔(f)` with its cofactor.
#[derive(Debug, Clone, PartialEq)]
pub struct LogForm {
    pub form: DifferentialForm,
    pub cofactor: PlaneCurvePoly,
    pub nu_b: i64,
}

/// Logarithmic forms `A dx + B dy ∈ 𝓔(f)` with `x`-degrees at most
/// `⌈window / v_0⌉`, echelonized so that their `ν(B)` are distinct.
pub fn log_form_search(branch: &PuiseuxBranch, window: i64) -> Result<Vec<LogForm>> {
    let s = branch.semigroup();
    let limit = s.milnor() + s.generators().last().unwrap();
    if window < 0 || window > limit {
        return Err(Error::WindowTooLarge { window, bound: limit });
    }
    let n = branch.n();
    let d = (window as usize).div_ceil(n);
    let f = branch.implicit();
    let (fx, fy) = (f.dx(), f.dy());
    // Unknowns: coefficients of x^a y^j in A (j < n), then in B (j < n - 1).
    let mut unknowns: Vec<(bool, usize, usize)> = Vec::new();
    for j in 0..n {
        for a in 0..=d {
            unknowns.push((false, a, j));
        }
    }
    for j in 0..n.saturating_sub(1) {
        for a in 0..=d {
            unknowns.push((true, a, j));
        }
    }
    let mut images: Vec<PlaneCurvePoly> = Vec::with_capacity(unknowns.len());
    let mut reduced: std::collections::HashMap<(bool, usize), PlaneCurvePoly> = Default::default();
    for &(is_b, a, j) in &unknowns {
        let r = match reduced.get(&(is_b, j)) {
            Some(r) => r.clone(),
            None => {
                let yj = PlaneCurvePoly::monomial(Q::one(), 0, j);
                let h = if is_b { yj.mul(&fx).neg() } else { yj.mul(&fy) };
                let r = weierstrass_divide(&h, &f)?.1;
                reduced.insert((is_b, j), r.clone());
                r
            }
        };
        images.push(r.shift(a, 0));
    }
    let coords: BTreeSet<(usize, usize)> = images
        .iter()
        .flat_map(|p| p.terms().map(|(a, b, _)| (a, b)).collect::<Vec<_>>())
        .collect();
    let equations: Vec<Vec<Q>> = coords
        .iter()
        .map(|&(a, b)| images.iter().map(|p| p.coeff(a, b)).collect())
        .collect();
    if rank_mod_prime(&equations, unknowns.len()) == Some(unknowns.len()) {
        return Ok(Vec::new());
    }
    let kernel = nullspace(&equations, unknowns.len());
    let to_form = |v: &[Q]| {
        let mut a_terms = Vec::new();
        let mut b_terms = Vec::new();
        for (c, &(is_b, a, j)) in v.iter().zip(&unknowns) {
            if !c.is_zero() {
                if is_b { &mut b_terms } else { &mut a_terms }.push((a, j, c.clone()));
            }
        }
        DifferentialForm::new(PlaneCurvePoly::from_terms(a_terms), PlaneCurvePoly::from_terms(b_terms))
    };
    let trunc = d * n + n * s.v(1) as usize + s.milnor() as usize + 1;
    let keyed: Vec<Vec<Q>> = kernel
        .iter()
        .map(|v| {
            let b = to_form(v).b;
            let pb = branch.pullback_to(&b, trunc);
            let mut row: Vec<Q> = (0..trunc).map(|i| pb.coeff(i).unwrap().clone()).collect();
            row.extend(v.iter().cloned());
            row
        })
        .collect();
    let (basis, _) = echelon_by_leading_key(keyed, trunc);
    basis
        .into_iter()
        .map(|(lead, row)| {
            let form = to_form(&row[trunc..]);
            let cofactor = is_logarithmic(&f, &form)?.ok_or(Error::NotLogarithmic)?;
            Ok(LogForm {
                form,
                cofactor,
                nu_b: lead as i64,
            })
        })
        .collect()
}
