//! Value sets of finitely generated modules over the local ring of a branch.
//!
//! A module `M ⊆ ℚ[[t]]` over `O = ℚ[[t^n, φ]]` is described by the set of
//! orders of its elements. This is computed with a standard basis: one
//! element of minimal order per residue class modulo `n`, saturated under
//! the S-processes that cancel leading terms between two basis elements.
//! Only orders below a bound are tracked, so every series can be cut at the
//! bound without affecting any decision.

use std::collections::{HashMap, VecDeque};

use num::Zero;

use crate::branch::PuiseuxBranch;
use crate::semigroup::NumericalSemigroup;
use crate::series::{TruncatedSeries, Q};

/// Elements `p_γ ∈ O` of order `γ` and leading coefficient 1, built as
/// `x^{s_0} f_0^{s_1} ... f_{g-1}^{s_g}` from the standard representation.
pub struct OrderBasis {
    n: usize,
    semigroup: NumericalSemigroup,
    trunc: usize,
    semiroot_pullbacks: Vec<TruncatedSeries>,
    apery: HashMap<i64, TruncatedSeries>,
}

fn normalized(s: TruncatedSeries) -> TruncatedSeries {
    let lc = s.leading_coeff().expect("nonzero below truncation").clone();
    s.scale(&lc.recip())
}

impl OrderBasis {
    pub fn new(branch: &PuiseuxBranch, trunc: usize) -> Self {
        let semigroup = branch.semigroup().clone();
        let g = semigroup.genus();
        let wide = trunc.max(*semigroup.generators().last().unwrap() as usize + 1);
        let semiroot_pullbacks = (0..g)
            .map(|k| {
                let f = branch.semiroot(k).expect("valid level");
                normalized(branch.pullback_to(&f, wide))
            })
            .collect();
        Self {
            n: branch.n(),
            semigroup,
            trunc,
            semiroot_pullbacks,
            apery: HashMap::new(),
        }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn semigroup(&self) -> &NumericalSemigroup {
        &self.semigroup
    }

    pub fn element(&mut self, gamma: i64) -> TruncatedSeries {
        let s = self.semigroup.standard_form(gamma);
        assert!(s.is_member(), "{gamma} is not in the semigroup");
        let base = gamma - s.s[0] * self.semigroup.v(0);
        self.apery_element(&s.s, base)
            .shift(self.n * s.s[0] as usize)
            .truncated(self.trunc)
    }

    fn apery_element(&mut self, s: &[i64], value: i64) -> TruncatedSeries {
        if let Some(e) = self.apery.get(&value) {
            return e.clone();
        }
        let e = match (1..s.len()).rev().find(|&i| s[i] > 0) {
            None => TruncatedSeries::monomial(Q::from_integer(1.into()), 0, self.trunc),
            Some(i) => {
                let mut smaller = s.to_vec();
                smaller[i] -= 1;
                smaller[0] = 0;
                let prev = self.apery_element(&smaller, value - self.semigroup.v(i));
                prev.mul(&self.semiroot_pullbacks[i - 1]).truncated(self.trunc)
            }
        };
        self.apery.insert(value, e.clone());
        e
    }
}

#[derive(Clone)]
struct Rep {
    order: usize,
    series: TruncatedSeries,
}

/// A standard basis below `bound` of the module generated by some seeds.
pub struct ValueClosure {
    semigroup: NumericalSemigroup,
    n: usize,
    bound: usize,
    member: Vec<bool>,
    reps: Vec<Option<Rep>>,
}

impl ValueClosure {
    /// Saturates the `O`-module generated by `seeds`, tracking orders below
    /// `bound`. `bound` must not exceed the truncation of `basis`.
    pub fn compute(basis: &mut OrderBasis, seeds: &[TruncatedSeries], bound: usize) -> Self {
        assert!(bound <= basis.trunc(), "bound {bound} exceeds truncation {}", basis.trunc());
        let semigroup = basis.semigroup().clone();
        let n = basis.n;
        let mut this = Self {
            member: semigroup.sieve(bound + 1),
            semigroup,
            n,
            bound,
            reps: vec![None; n],
        };
        let mut engine = Engine {
            basis,
            products: HashMap::new(),
        };
        let mut queue: VecDeque<TruncatedSeries> = seeds
            .iter()
            .map(|s| s.clone().truncated(bound))
            .collect();
        let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
        loop {
            if let Some(h) = queue.pop_front() {
                if let Some(r) = this.reduce(&mut engine, h) {
                    let order = r.order;
                    let res = order % n;
                    if let Some(old) = this.reps[res].replace(r) {
                        queue.push_back(old.series);
                    }
                    for (other, rep) in this.reps.iter().enumerate() {
                        if other != res && rep.is_some() {
                            pairs.push_back((order, rep.as_ref().unwrap().order));
                        }
                    }
                }
                continue;
            }
            let Some((a, b)) = pairs.pop_front() else {
                break;
            };
            if !this.is_current(a) || !this.is_current(b) {
                continue;
            }
            for gamma in this.critical_orders(a, b) {
                let ra = this.reps[a % n].as_ref().unwrap().series.clone();
                let rb = this.reps[b % n].as_ref().unwrap().series.clone();
                let pa = engine.product(gamma - a, a, &ra);
                let pb = engine.product(gamma - b, b, &rb);
                queue.push_back(pa.sub(&pb).truncated(bound));
            }
        }
        this
    }

    fn is_current(&self, order: usize) -> bool {
        self.reps[order % self.n]
            .as_ref()
            .is_some_and(|r| r.order == order)
    }

    fn in_gamma(&self, r: i64) -> bool {
        r >= 0 && (r as usize >= self.member.len() || self.member[r as usize])
    }

    /// Minimal elements below the bound of `(a + Γ) ∩ (b + Γ)`.
    fn critical_orders(&self, a: usize, b: usize) -> Vec<usize> {
        let both = |g: usize| self.in_gamma(g as i64 - a as i64) && self.in_gamma(g as i64 - b as i64);
        (a.max(b)..self.bound)
            .filter(|&g| both(g))
            .filter(|&g| {
                !self
                    .semigroup
                    .generators()
                    .iter()
                    .any(|&v| g as i64 >= v && both(g - v as usize))
            })
            .collect()
    }

    /// The representative that can cancel the leading term at `order`.
    fn reducer(&self, order: usize) -> Option<usize> {
        if let Some(r) = &self.reps[order % self.n] {
            if r.order <= order {
                return Some(r.order);
            }
        }
        self.reps
            .iter()
            .flatten()
            .filter(|r| r.order <= order && self.in_gamma((order - r.order) as i64))
            .map(|r| r.order)
            .max()
    }

    fn reduce(&self, engine: &mut Engine, mut h: TruncatedSeries) -> Option<Rep> {
        loop {
            let order = h.order_opt().filter(|&o| o < self.bound)?;
            match self.reducer(order) {
                None => {
                    let series = normalized(h);
                    return Some(Rep { order, series });
                }
                Some(ro) => {
                    let rep = &self.reps[ro % self.n].as_ref().unwrap().series;
                    let c = h.coeff(order).unwrap().clone();
                    let p = engine.product(order - ro, ro, rep);
                    h.sub_scaled_shifted(&c, 0, &p);
                    h.truncate(self.bound);
                }
            }
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Orders of the standard basis elements, increasing.
    pub fn basis_orders(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.reps.iter().flatten().map(|r| r.order).collect();
        v.sort_unstable();
        v
    }

    /// Whether some element of the module has order `v`; meaningful for
    /// `v < bound`.
    pub fn contains(&self, v: usize) -> bool {
        self.reps
            .iter()
            .flatten()
            .any(|r| r.order <= v && self.in_gamma((v - r.order) as i64))
    }

    /// All orders below the bound.
    pub fn values(&self) -> Vec<usize> {
        (0..self.bound).filter(|&v| self.contains(v)).collect()
    }
}

struct Engine<'a> {
    basis: &'a mut OrderBasis,
    products: HashMap<(usize, usize), TruncatedSeries>,
}

impl Engine<'_> {
    /// `p_γ · rep`, where `rep` is the current representative of order `ro`.
    fn product(&mut self, gamma: usize, ro: usize, rep: &TruncatedSeries) -> TruncatedSeries {
        if let Some(p) = self.products.get(&(gamma, ro)) {
            return p.clone();
        }
        let n = self.basis.n;
        let p = if gamma.is_multiple_of(n) {
            rep.shift(gamma).truncated(self.basis.trunc)
        } else {
            self.basis
                .element(gamma as i64)
                .mul(rep)
                .truncated(self.basis.trunc)
        };
        debug_assert!(p.coeff(gamma + ro).is_some_and(|c| !c.is_zero()));
        self.products.insert((gamma, ro), p.clone());
        p
    }
}
