//! Plane branches given by Puiseux parametrizations `(t^n, φ(t))` with a
//! polynomial `φ` in normal form, their semiroots and semiroot-adic
//! expansions.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{implicitize, PlaneCurvePoly};
use crate::semigroup::{gcd, NumericalSemigroup};
use crate::series::{q, q_frac, TruncatedSeries, Q};

/// How the coefficients of a new branch are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientChoice {
    /// Pseudo-random coefficients from a small pool, reproducible from the seed.
    GenericSeeded(u64),
    /// Exact coefficients `exponent -> a_exponent`.
    Explicit(BTreeMap<usize, Q>),
}

/// Coefficients used by the seeded sampler.
pub fn coefficient_pool() -> [Q; 6] {
    [q(1), q(-1), q(2), q_frac(1, 2), q(3), q_frac(-1, 3)]
}

/// Seed of sample `index` in a sweep with master seed `seed`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// Default truncation `factor * (μ + 2 v_g)`.
pub fn default_trunc(semigroup: &NumericalSemigroup, factor: usize) -> usize {
    let top = *semigroup.generators().last().unwrap();
    factor.max(1) * (semigroup.milnor() + 2 * top) as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxBranch {
    n: usize,
    phi: BTreeMap<usize, Q>,
    semigroup: NumericalSemigroup,
    trunc: usize,
}

/// Characteristic exponents read off the support of `φ`, or an error when the
/// support is not in normal form.
fn char_from_support(n: usize, phi: &BTreeMap<usize, Q>) -> Result<Vec<i64>> {
    let mut beta = vec![n as i64];
    let mut e = n as i64;
    for (&i, c) in phi {
        if c.is_zero() {
            continue;
        }
        if e == 1 {
            break;
        }
        if (i as i64) % e != 0 {
            beta.push(i as i64);
            e = gcd(e, i as i64);
        } else if beta.len() == 1 {
            return Err(Error::SupportViolation(format!(
                "exponent {i} is divisible by n = {n} and precedes the first characteristic exponent"
            )));
        }
    }
    if e != 1 {
        return Err(Error::NotPrimitive);
    }
    Ok(beta)
}

impl PuiseuxBranch {
    /// A branch from a parametrization, with the semigroup read off the support.
    pub fn from_parametrization(n: usize, phi: BTreeMap<usize, Q>, trunc: Option<usize>) -> Result<Self> {
        let phi: BTreeMap<usize, Q> = phi.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if n == 1 {
            if !phi.is_empty() {
                return Err(Error::SupportViolation(
                    "a smooth branch is represented as (t, 0)".into(),
                ));
            }
            return Ok(Self::smooth());
        }
        let beta = char_from_support(n, &phi)?;
        let semigroup = NumericalSemigroup::from_char(&beta)?;
        let needed = phi.keys().last().map_or(0, |e| e + 1);
        let trunc = trunc.unwrap_or(0).max(default_trunc(&semigroup, 1)).max(needed);
        Ok(Self {
            n,
            phi,
            semigroup,
            trunc,
        })
    }

    /// The smooth branch `(t, 0)`, whose semigroup is `ℕ`.
    pub fn smooth() -> Self {
        Self {
            n: 1,
            phi: BTreeMap::new(),
            semigroup: NumericalSemigroup::naturals(),
            trunc: 2,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &BTreeMap<usize, Q> {
        &self.phi
    }

    pub fn semigroup(&self) -> &NumericalSemigroup {
        &self.semigroup
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn milnor(&self) -> i64 {
        self.semigroup.milnor()
    }

    pub fn is_smooth(&self) -> bool {
        self.n == 1
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        let needed = self.phi.keys().last().map_or(0, |e| e + 1);
        Self {
            trunc: trunc.max(needed),
            ..self.clone()
        }
    }

    pub fn x_series(&self, trunc: usize) -> TruncatedSeries {
        TruncatedSeries::monomial(Q::one(), self.n, trunc)
    }

    pub fn y_series(&self, trunc: usize) -> TruncatedSeries {
        TruncatedSeries::from_terms(self.phi.iter().map(|(e, c)| (*e, c.clone())), trunc)
    }

    /// `h(t^n, φ(t))` up to `t^trunc`.
    pub fn pullback_to(&self, h: &PlaneCurvePoly, trunc: usize) -> TruncatedSeries {
        h.substitute(&self.x_series(trunc), &self.y_series(trunc))
            .truncated(trunc)
    }

    pub fn pullback(&self, h: &PlaneCurvePoly) -> TruncatedSeries {
        self.pullback_to(h, self.trunc)
    }

    /// `ν(h)` and the leading coefficient of the pullback.
    pub fn valuation(&self, h: &PlaneCurvePoly) -> Result<(usize, Q)> {
        let s = self.pullback(h);
        match s.order_opt() {
            Some(o) => Ok((o, s.coeff(o).unwrap().clone())),
            None => Err(Error::ValueAboveTruncation(self.trunc)),
        }
    }

    /// The Weierstrass polynomial of the branch.
    pub fn implicit(&self) -> PlaneCurvePoly {
        let phi: Vec<(usize, Q)> = self.phi.iter().map(|(e, c)| (*e, c.clone())).collect();
        implicitize(self.n, &phi).expect("branches are primitive by construction")
    }

    fn check_level(&self, k: usize) -> Result<()> {
        let g = self.semigroup.genus();
        if k > g {
            return Err(Error::InvalidArgument(format!("semiroot level {k} exceeds g = {g}")));
        }
        Ok(())
    }

    /// The branch `(u^{n/e_k}, ψ(u))` of the k-semiroot obtained by cutting
    /// `φ` below `β_{k+1}` and substituting `t^{e_k} = u`.
    pub fn semiroot_branch(&self, k: usize) -> Result<Self> {
        self.check_level(k)?;
        let g = self.semigroup.genus();
        if k == g {
            return Ok(self.clone());
        }
        if k == 0 {
            return Ok(Self::smooth().with_trunc(self.trunc.div_ceil(self.n).max(2)));
        }
        let e = self.semigroup.e(k) as usize;
        let cut = self.semigroup.beta(k + 1) as usize;
        let psi: BTreeMap<usize, Q> = self
            .phi
            .range(..cut)
            .map(|(i, c)| {
                debug_assert_eq!(i % e, 0);
                (i / e, c.clone())
            })
            .collect();
        Self::from_parametrization(self.n / e, psi, Some(self.trunc.div_ceil(e)))
    }

    /// The k-semiroot `f_k`; `f_g` is the branch's own polynomial.
    pub fn semiroot(&self, k: usize) -> Result<PlaneCurvePoly> {
        Ok(self.semiroot_branch(k)?.implicit())
    }

    pub fn semiroots(&self) -> SemirootSystem {
        let g = self.semigroup.genus();
        SemirootSystem {
            polys: (0..=g).map(|k| self.semiroot(k).unwrap()).collect(),
        }
    }

    pub fn record(&self) -> BranchRecord {
        BranchRecord {
            n: self.n,
            phi: self
                .phi
                .iter()
                .map(|(e, c)| crate::json::term_record(*e as u64, c))
                .collect(),
            char_exponents: self.semigroup.char_exponents().to_vec(),
            trunc: self.trunc,
        }
    }

    pub fn from_record(rec: &BranchRecord) -> Result<Self> {
        let mut phi = BTreeMap::new();
        for t in &rec.phi {
            let (e, c) = crate::json::parse_term(t)?;
            *phi.entry(e as usize).or_insert_with(Q::zero) += c;
        }
        let b = Self::from_parametrization(rec.n, phi, Some(rec.trunc))?;
        if b.semigroup.char_exponents() != rec.char_exponents.as_slice() {
            return Err(Error::SupportViolation(format!(
                "parametrization has characteristic exponents {:?}, record says {:?}",
                b.semigroup.char_exponents(),
                rec.char_exponents
            )));
        }
        Ok(b.with_trunc(rec.trunc))
    }
}

impl std::fmt::Display for PuiseuxBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut y = String::new();
        for (e, c) in &self.phi {
            let a = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if y.is_empty() {
                if c.is_negative() {
                    y.push('-');
                }
            } else {
                y.push_str(&format!(" {sign} "));
            }
            if !a.is_one() {
                y.push_str(&format!("{}*", crate::series::fmt_rational(&a)));
            }
            y.push_str(&format!("t^{e}"));
        }
        if y.is_empty() {
            y.push('0');
        }
        if self.n == 1 {
            write!(f, "(t, {y})")
        } else {
            write!(f, "(t^{}, {y})", self.n)
        }
    }
}

/// JSON form of a branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub n: usize,
    pub phi: Vec<Vec<serde_json::Number>>,
    #[serde(rename = "char")]
    pub char_exponents: Vec<i64>,
    pub trunc: usize,
}

/// Whether `a_i` may be nonzero in the normal form of the class: for
/// `i < β_{k+1}` the exponent must be a multiple of `e_k`.
pub fn exponent_allowed(semigroup: &NumericalSemigroup, i: usize) -> bool {
    let beta = semigroup.char_exponents();
    let i = i as i64;
    if i < beta[1] {
        return false;
    }
    let level = (1..beta.len()).rev().find(|&k| beta[k] <= i).unwrap();
    i % semigroup.e(level) == 0
}

/// Builds a branch in the class with characteristic sequence `beta`.
///
/// Seeded coefficients cover every allowed exponent below the Milnor number,
/// which determines the values of differentials; each non-characteristic
/// coefficient is zero with probability about one third.
pub fn make_branch(beta: &[i64], choice: CoefficientChoice, trunc_factor: usize) -> Result<PuiseuxBranch> {
    let semigroup = NumericalSemigroup::from_char(beta)?;
    let is_char = |i: usize| beta[1..].contains(&(i as i64));
    let coeffs = match choice {
        CoefficientChoice::Explicit(map) => {
            for (&i, c) in &map {
                if !c.is_zero() && !exponent_allowed(&semigroup, i) {
                    return Err(Error::SupportViolation(format!(
                        "exponent {i} is not allowed for characteristic sequence {beta:?}"
                    )));
                }
            }
            for &b in &beta[1..] {
                if map.get(&(b as usize)).is_none_or(|c| c.is_zero()) {
                    return Err(Error::SupportViolation(format!(
                        "coefficient of the characteristic exponent {b} must be nonzero"
                    )));
                }
            }
            map
        }
        CoefficientChoice::GenericSeeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pool = coefficient_pool();
            let mut map = BTreeMap::new();
            let top = semigroup.milnor().max(beta[beta.len() - 1] + 1) as usize;
            for i in beta[1] as usize..top {
                if !exponent_allowed(&semigroup, i) {
                    continue;
                }
                if !is_char(i) && rng.gen_range(0..3) == 0 {
                    continue;
                }
                map.insert(i, pool[rng.gen_range(0..pool.len())].clone());
            }
            map
        }
    };
    let b = PuiseuxBranch::from_parametrization(beta[0] as usize, coeffs, None)?;
    debug_assert_eq!(b.semigroup, semigroup);
    let trunc = default_trunc(&semigroup, trunc_factor);
    Ok(b.with_trunc(trunc))
}

/// Semiroots `f_0, ..., f_g` of a branch, with `f_g` the branch itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SemirootSystem {
    pub polys: Vec<PlaneCurvePoly>,
}

/// `h = Σ_α b_α(x) f_0^{α_0} ... f_g^{α_g}` keyed by `α`, with `b_α` given
/// by its coefficients in `x`.
pub type AdicExpansion = BTreeMap<Vec<usize>, Vec<Q>>;

impl SemirootSystem {
    pub fn genus(&self) -> usize {
        self.polys.len() - 1
    }

    /// Semiroot-adic expansion by repeated division, from `f_g` down to `f_0`.
    pub fn adic_expansion(&self, h: &PlaneCurvePoly) -> Result<AdicExpansion> {
        let mut out = BTreeMap::new();
        let mut alpha = vec![0; self.polys.len()];
        self.expand(h, self.genus(), &mut alpha, &mut out)?;
        Ok(out)
    }

    fn expand(
        &self,
        h: &PlaneCurvePoly,
        level: usize,
        alpha: &mut Vec<usize>,
        out: &mut AdicExpansion,
    ) -> Result<()> {
        let mut rest = h.clone();
        let mut j = 0;
        while !rest.is_zero() {
            let (quot, digit) = crate::poly::weierstrass_divide(&rest, &self.polys[level])?;
            if !digit.is_zero() {
                alpha[level] = j;
                if level == 0 {
                    debug_assert_eq!(digit.y_degree(), Some(0));
                    out.insert(alpha.clone(), digit.rows()[0].clone());
                } else {
                    self.expand(&digit, level - 1, alpha, out)?;
                }
                alpha[level] = 0;
            }
            rest = quot;
            j += 1;
        }
        Ok(())
    }

    pub fn reconstruct(&self, expansion: &AdicExpansion) -> PlaneCurvePoly {
        let mut acc = PlaneCurvePoly::zero();
        for (alpha, b) in expansion {
            let mut term = PlaneCurvePoly::from_x_poly(b.clone());
            for (f, &a) in self.polys.iter().zip(alpha) {
                term = term.mul(&f.pow(a as u32));
            }
            acc = acc.add(&term);
        }
        acc
    }
}
