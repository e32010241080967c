//! Value semigroups of plane branches.
//!
//! A semigroup is stored together with everything derived from its minimal
//! generators `v_0 < ... < v_g`: the characteristic exponents `β_i`, the gcd
//! chain `e_i = gcd(v_0, ..., v_i)`, the quotients `n_i = e_{i-1} / e_i` and
//! the conductor, which for plane branches equals the Milnor number.
//!
//! The semigroup `ℕ` of a smooth branch (`g = 0`) is allowed as a degenerate
//! value; it appears as the semigroup of the 0-semiroot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumericalSemigroup {
    generators: Vec<i64>,
    char_exponents: Vec<i64>,
    gcd_chain: Vec<i64>,
    quotients: Vec<i64>,
    conductor: i64,
}

/// Coordinates `(s_0, ..., s_g)` of an integer in the basis of generators
/// with `0 <= s_i < n_i` for `i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardRepresentation {
    pub s: Vec<i64>,
}

impl StandardRepresentation {
    pub fn is_member(&self) -> bool {
        self.s[0] >= 0
    }

    pub fn value(&self, semigroup: &NumericalSemigroup) -> i64 {
        self.s
            .iter()
            .zip(semigroup.generators())
            .map(|(s, v)| s * v)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupRecord {
    pub generators: Vec<i64>,
    pub char_exponents: Vec<i64>,
    pub conductor: i64,
}

impl NumericalSemigroup {
    /// Builds the semigroup of a branch from its characteristic sequence.
    pub fn from_char(beta: &[i64]) -> Result<Self> {
        if beta.len() < 2 {
            return Err(Error::NotCharSequence(format!(
                "{beta:?}: need at least two exponents"
            )));
        }
        if beta[0] < 2 {
            return Err(Error::NotCharSequence(format!(
                "{beta:?}: multiplicity must be at least 2"
            )));
        }
        if beta.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotCharSequence(format!(
                "{beta:?}: not strictly increasing"
            )));
        }
        let mut gcd_chain = vec![beta[0]];
        for (i, &b) in beta.iter().enumerate().skip(1) {
            let prev = gcd_chain[i - 1];
            if prev == 1 {
                return Err(Error::NotCharSequence(format!(
                    "{beta:?}: exponent {b} follows a completed gcd chain"
                )));
            }
            let e = gcd(prev, b);
            if e == prev {
                return Err(Error::NotCharSequence(format!(
                    "{beta:?}: {b} is divisible by {prev}"
                )));
            }
            gcd_chain.push(e);
        }
        if *gcd_chain.last().unwrap() != 1 {
            return Err(Error::NonPrimitive(beta.to_vec()));
        }
        let quotients: Vec<i64> = gcd_chain.windows(2).map(|w| w[0] / w[1]).collect();
        let mut generators = vec![beta[0], beta[1]];
        for i in 1..beta.len() - 1 {
            generators.push(quotients[i - 1] * generators[i] + beta[i + 1] - beta[i]);
        }
        let g = beta.len() - 1;
        let conductor = quotients[g - 1] * generators[g] - beta[g] - beta[0] + 1;
        Ok(Self {
            generators,
            char_exponents: beta.to_vec(),
            gcd_chain,
            quotients,
            conductor,
        })
    }

    /// Recovers the characteristic sequence from minimal generators, rejecting
    /// generator lists that do not come from a plane branch.
    pub fn from_generators(v: &[i64]) -> Result<Self> {
        let reject = |why: String| Error::NotPlaneBranchSemigroup(format!("{v:?}: {why}"));
        if v.len() < 2 {
            return Err(reject("need at least two generators".into()));
        }
        if v[0] < 2 || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(reject("generators must increase from v_0 >= 2".into()));
        }
        let mut e = vec![v[0]];
        for (i, &x) in v.iter().enumerate().skip(1) {
            let next = gcd(e[i - 1], x);
            if next == e[i - 1] {
                return Err(reject(format!("gcd chain stalls at {x}")));
            }
            e.push(next);
        }
        if *e.last().unwrap() != 1 {
            return Err(reject("generators are not coprime".into()));
        }
        let mut beta = vec![v[0], v[1]];
        for i in 1..v.len() - 1 {
            let n_i = e[i - 1] / e[i];
            if v[i + 1] <= n_i * v[i] {
                return Err(reject(format!(
                    "v_{} = {} must exceed n_{i} v_{i} = {}",
                    i + 1,
                    v[i + 1],
                    n_i * v[i]
                )));
            }
            beta.push(v[i + 1] - n_i * v[i] + beta[i]);
        }
        let s = Self::from_char(&beta).map_err(|e| reject(e.to_string()))?;
        debug_assert_eq!(s.generators, v);
        Ok(s)
    }

    /// The semigroup `ℕ` of a smooth branch.
    pub fn naturals() -> Self {
        Self {
            generators: vec![1],
            char_exponents: vec![1],
            gcd_chain: vec![1],
            quotients: vec![],
            conductor: 0,
        }
    }

    pub fn is_naturals(&self) -> bool {
        self.generators.len() == 1
    }

    pub fn genus(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn generators(&self) -> &[i64] {
        &self.generators
    }

    pub fn char_exponents(&self) -> &[i64] {
        &self.char_exponents
    }

    pub fn gcd_chain(&self) -> &[i64] {
        &self.gcd_chain
    }

    /// `n_1, ..., n_g`.
    pub fn quotients(&self) -> &[i64] {
        &self.quotients
    }

    pub fn v(&self, i: usize) -> i64 {
        self.generators[i]
    }

    pub fn beta(&self, i: usize) -> i64 {
        self.char_exponents[i]
    }

    pub fn e(&self, i: usize) -> i64 {
        self.gcd_chain[i]
    }

    /// `n_i` for `1 <= i <= g`; `n_0 = 1` by convention.
    pub fn n(&self, i: usize) -> i64 {
        if i == 0 {
            1
        } else {
            self.quotients[i - 1]
        }
    }

    pub fn conductor(&self) -> i64 {
        self.conductor
    }

    /// Milnor number, `Σ (n_i - 1) v_i - v_0 + 1`.
    pub fn milnor(&self) -> i64 {
        if self.is_naturals() {
            return 0;
        }
        let g = self.genus();
        (1..=g).map(|i| (self.n(i) - 1) * self.v(i)).sum::<i64>() - self.v(0) + 1
    }

    /// The closed forms for the Milnor number: the generator sum, the
    /// characteristic-exponent form and twice the number of gaps.
    pub fn milnor_closed_forms(&self) -> [i64; 3] {
        if self.is_naturals() {
            return [0, 0, 0];
        }
        let g = self.genus();
        [
            self.milnor(),
            self.n(g) * self.v(g) - self.beta(g) - self.v(0) + 1,
            2 * self.gaps().len() as i64,
        ]
    }

    /// Membership table for `0..len`, by sieving non-negative combinations.
    pub fn sieve(&self, len: usize) -> Vec<bool> {
        let mut member = vec![false; len];
        if len == 0 {
            return member;
        }
        member[0] = true;
        for r in 1..len {
            member[r] = self
                .generators
                .iter()
                .any(|&v| (v as usize) <= r && member[r - v as usize]);
        }
        member
    }

    pub fn gaps(&self) -> Vec<i64> {
        let len = (self.conductor + self.generators.last().copied().unwrap_or(1)) as usize;
        self.sieve(len)
            .iter()
            .enumerate()
            .filter(|(_, &m)| !m)
            .map(|(r, _)| r as i64)
            .collect()
    }

    pub fn standard_form(&self, r: i64) -> StandardRepresentation {
        let g = self.genus();
        let mut s = vec![0; g + 1];
        let mut rest = r;
        for i in (1..=g).rev() {
            let modulus = self.e(i - 1);
            s[i] = (0..self.n(i))
                .find(|&k| (rest - k * self.v(i)).rem_euclid(modulus) == 0)
                .expect("the generator is a unit modulo n_i");
            rest -= s[i] * self.v(i);
        }
        debug_assert_eq!(rest % self.v(0), 0);
        s[0] = rest / self.v(0);
        StandardRepresentation { s }
    }

    pub fn contains(&self, r: i64) -> bool {
        r >= 0 && self.standard_form(r).is_member()
    }

    /// `Γ_k = ⟨v_0/e_k, ..., v_k/e_k⟩`; `k = 0` gives `ℕ`.
    pub fn semiroot_semigroup(&self, k: usize) -> Result<Self> {
        let g = self.genus();
        if k > g {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds g = {g}")));
        }
        if k == 0 {
            return Ok(Self::naturals());
        }
        let e_k = self.e(k);
        let beta: Vec<i64> = self.char_exponents[..=k].iter().map(|b| b / e_k).collect();
        Self::from_char(&beta)
    }

    /// `Σ_{η ∈ G_j \ G_{j+1}} η^α` where `G_i` is the group of `e_i`-th roots
    /// of unity. Each full group sum is `e_i` when `e_i | α` and `0` otherwise.
    pub fn unit_root_sum(&self, j: usize, alpha: i64) -> Result<i64> {
        let g = self.genus();
        if j >= g {
            return Err(Error::InvalidArgument(format!("level {j} must be below g = {g}")));
        }
        let group_sum = |e: i64| if alpha % e == 0 { e } else { 0 };
        Ok(group_sum(self.e(j)) - group_sum(self.e(j + 1)))
    }

    /// `max{i : e_i ∤ α}`, or `None` when every `e_i` divides `α`.
    pub fn top_nondividing_level(&self, alpha: i64) -> Option<usize> {
        (0..=self.genus()).rev().find(|&i| alpha % self.e(i) != 0)
    }

    pub fn record(&self) -> SemigroupRecord {
        SemigroupRecord {
            generators: self.generators.clone(),
            char_exponents: self.char_exponents.clone(),
            conductor: self.conductor,
        }
    }

    pub fn from_record(rec: &SemigroupRecord) -> Result<Self> {
        let s = Self::from_char(&rec.char_exponents)?;
        if s.generators != rec.generators || s.conductor != rec.conductor {
            return Err(Error::Parse(format!(
                "semigroup record is inconsistent with its characteristic exponents {:?}",
                rec.char_exponents
            )));
        }
        Ok(s)
    }
}

/// All characteristic sequences with `β_0 <= max_multiplicity` and
/// `β_g <= max_exponent`.
pub fn enumerate_char_sequences(max_multiplicity: i64, max_exponent: i64) -> Vec<Vec<i64>> {
    fn extend(seq: &mut Vec<i64>, e: i64, max_exp: i64, out: &mut Vec<Vec<i64>>) {
        if e == 1 {
            out.push(seq.clone());
            return;
        }
        let last = *seq.last().unwrap();
        for b in last + 1..=max_exp {
            if b % e != 0 {
                seq.push(b);
                extend(seq, gcd(e, b), max_exp, out);
                seq.pop();
            }
        }
    }
    let mut out = Vec::new();
    for b0 in 2..=max_multiplicity {
        let mut seq = vec![b0];
        extend(&mut seq, b0, max_exponent, &mut out);
    }
    out
}
