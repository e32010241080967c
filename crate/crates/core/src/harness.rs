//! Mechanical checks of the semiroot transfer results on concrete branches
//! and sampled analytic classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::branch::{make_branch, sample_seed, BranchRecord, CoefficientChoice, PuiseuxBranch};
use crate::differentials::{lambda_set, theta, tjurina_oracle, ValueSet};
use crate::error::{Error, Result};
use crate::semigroup::NumericalSemigroup;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Violated,
    Inconclusive,
}

/// Outcome of one check. A violated report carries the offending sets or
/// numbers in `witness`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub subject: String,
    pub status: Status,
    pub witness: serde_json::Value,
}

impl VerificationReport {
    fn new(check: &str, subject: String, ok: bool, witness: serde_json::Value) -> Self {
        Self {
            check: check.to_string(),
            subject,
            status: if ok { Status::Verified } else { Status::Violated },
            witness,
        }
    }

    fn inconclusive(check: &str, subject: String, err: &Error) -> Self {
        Self {
            check: check.to_string(),
            subject,
            status: Status::Inconclusive,
            witness: json!({ "error": err.to_string() }),
        }
    }

    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }
}

fn is_truncation(e: &Error) -> bool {
    matches!(
        e,
        Error::InsufficientTruncation { .. } | Error::ValueAboveTruncation(_) | Error::TorsionOrTruncation(_)
    )
}

/// Runs `f`, retrying once with doubled truncation when it runs out of
/// precision; `Ok(None)` reports the second failure.
fn with_retry<T>(branch: &PuiseuxBranch, f: impl Fn(&PuiseuxBranch) -> Result<T>) -> Result<std::result::Result<T, Error>> {
    match f(branch) {
        Err(e) if is_truncation(&e) => match f(&branch.with_trunc(2 * branch.trunc())) {
            Err(e) if is_truncation(&e) => Ok(Err(e)),
            r => r.map(Ok),
        },
        r => r.map(Ok),
    }
}

fn set_json(s: &BTreeSet<i64>) -> serde_json::Value {
    json!(s.iter().collect::<Vec<_>>())
}

/// Data of a k-semiroot curve used by the transfer maps.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub level: usize,
    pub semiroot: PuiseuxBranch,
    pub lambda: ValueSet,
    /// `δ -> Θ(δ)` on `Λ_k \ Γ_k`.
    pub theta: BTreeMap<i64, i64>,
    pub e_k: i64,
    pub beta_next: i64,
    pub v_next: i64,
}

impl LevelData {
    /// Uses the semiroot built from the branch's own parametrization.
    pub fn new(branch: &PuiseuxBranch, level: usize) -> Result<Self> {
        Self::with_semiroot(branch, level, branch.semiroot_branch(level)?)
    }

    /// Uses an arbitrary semiroot curve, which must have semigroup `Γ_k` and
    /// intersection multiplicity `v_{k+1}` with the branch.
    pub fn with_semiroot(branch: &PuiseuxBranch, level: usize, semiroot: PuiseuxBranch) -> Result<Self> {
        let s = branch.semigroup();
        let g = s.genus();
        if level >= g {
            return Err(Error::InvalidArgument(format!("level {level} must lie in 0..{g}")));
        }
        if semiroot.semigroup() != &s.semiroot_semigroup(level)? {
            return Err(Error::InvalidArgument(format!(
                "semiroot curve has semigroup {:?}, expected the level {level} semigroup",
                semiroot.semigroup().generators()
            )));
        }
        let v_next = s.v(level + 1);
        let (nu, _) = branch.valuation(&semiroot.implicit())?;
        if nu as i64 != v_next {
            return Err(Error::InvalidArgument(format!(
                "semiroot curve meets the branch with multiplicity {nu}, expected {v_next}"
            )));
        }
        let semiroot = semiroot.with_trunc(semiroot.trunc().max(semiroot.milnor() as usize));
        let lambda = lambda_set(&semiroot)?;
        let theta = lambda
            .extra
            .iter()
            .map(|&d| theta(&semiroot, d).map(|t| (d, t)))
            .collect::<Result<_>>()?;
        Ok(Self {
            level,
            semiroot,
            lambda,
            theta,
            e_k: s.e(level),
            beta_next: s.beta(level + 1),
            v_next,
        })
    }

    /// Whether `δ ∈ Λ_k \ Γ_k` falls in the first part of the split.
    fn in_first_part(&self, delta: i64) -> Result<bool> {
        let d = self.e_k * (delta - self.theta[&delta]);
        if d == self.beta_next {
            return Err(Error::InvalidArgument(format!(
                "e_k (δ - Θ(δ)) = β_(k+1) = {d} for δ = {delta}"
            )));
        }
        Ok(d < self.beta_next)
    }

    pub fn rho(&self, delta: i64) -> Result<i64> {
        if !self.theta.contains_key(&delta) {
            return Err(Error::DeltaNotValue(delta));
        }
        Ok(if self.in_first_part(delta)? {
            self.e_k * delta
        } else {
            self.beta_next + self.e_k * self.theta[&delta]
        })
    }

    /// `(L¹, L²)`.
    pub fn split(&self) -> Result<(BTreeSet<i64>, BTreeSet<i64>)> {
        let mut first = BTreeSet::new();
        let mut second = BTreeSet::new();
        for &d in self.theta.keys() {
            if self.in_first_part(d)? {
                first.insert(d);
            } else {
                second.insert(d);
            }
        }
        Ok((first, second))
    }

    /// Positive integers that are not values of differentials on the semiroot.
    pub fn non_values(&self) -> Vec<i64> {
        self.lambda.non_values()
    }

    pub fn gaps(&self) -> Vec<i64> {
        self.semiroot.semigroup().gaps()
    }
}

/// The three families of elements of `Λ \ Γ` produced from level `k`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Families {
    pub level: usize,
    pub f1: BTreeSet<i64>,
    pub f2: BTreeSet<i64>,
    pub f3: BTreeSet<i64>,
}

/// `Σ_{i>k} s_i v_i` over `0 <= s_{k+1} <= n_{k+1} - 2` and
/// `0 <= s_i < n_i` for `i >= k + 2`.
fn upper_combinations(s: &NumericalSemigroup, level: usize) -> Vec<i64> {
    let mut sums = vec![0];
    for i in level + 1..=s.genus() {
        let top = if i == level + 1 { s.n(i) - 2 } else { s.n(i) - 1 };
        sums = sums
            .iter()
            .flat_map(|&acc| (0..=top).map(move |c| acc + c * s.v(i)))
            .collect();
    }
    sums
}

impl Families {
    pub fn compute(branch: &PuiseuxBranch, data: &LevelData) -> Result<Self> {
        let s = branch.semigroup();
        let k = data.level;
        let (first, second) = data.split()?;
        let sums = upper_combinations(s, k);
        let f1 = first.iter().map(|d| data.e_k * d).collect();
        let mut f2 = BTreeSet::new();
        for &d in &second {
            let r = data.rho(d)?;
            f2.extend(sums.iter().map(|c| c + r));
        }
        let shifts: Vec<i64> = data
            .non_values()
            .into_iter()
            .chain(data.gaps().into_iter().map(|a| -a))
            .collect();
        let f3 = shifts
            .iter()
            .flat_map(|&d| sums.iter().map(move |c| c + data.v_next - data.e_k * d))
            .collect();
        Ok(Self { level: k, f1, f2, f3 })
    }

    pub fn union(&self) -> BTreeSet<i64> {
        self.f1.iter().chain(&self.f2).chain(&self.f3).copied().collect()
    }

    /// Checks pairwise disjointness and containment in `Λ \ Γ`.
    pub fn verify(&self, subject: String, lambda: &ValueSet) -> VerificationReport {
        let pairs = [
            ("f1_f2", &self.f1, &self.f2),
            ("f1_f3", &self.f1, &self.f3),
            ("f2_f3", &self.f2, &self.f3),
        ];
        let mut overlaps = serde_json::Map::new();
        for (name, a, b) in pairs {
            let common: BTreeSet<i64> = a.intersection(b).copied().collect();
            if !common.is_empty() {
                overlaps.insert(name.into(), set_json(&common));
            }
        }
        let outside: BTreeSet<i64> = self
            .union()
            .into_iter()
            .filter(|&v| !lambda.extra.contains(&v))
            .collect();
        let ok = overlaps.is_empty() && outside.is_empty();
        VerificationReport::new(
            "families",
            subject,
            ok,
            json!({
                "level": self.level,
                "f1": set_json(&self.f1),
                "f2": set_json(&self.f2),
                "f3": set_json(&self.f3),
                "lambda_minus_gamma": lambda.extra,
                "overlaps": overlaps,
                "not_in_lambda_minus_gamma": set_json(&outside),
            }),
        )
    }
}

/// The families from level `k`, with the branch's own semiroot.
pub fn contagem_families(branch: &PuiseuxBranch, k: usize) -> Result<(Families, VerificationReport)> {
    families_report(branch, k, None)
}

/// The families from level `k` computed with a caller-supplied semiroot curve.
pub fn contagem_families_with(
    branch: &PuiseuxBranch,
    k: usize,
    semiroot: &PuiseuxBranch,
) -> Result<(Families, VerificationReport)> {
    families_report(branch, k, Some(semiroot))
}

fn families_report(
    branch: &PuiseuxBranch,
    k: usize,
    semiroot: Option<&PuiseuxBranch>,
) -> Result<(Families, VerificationReport)> {
    let run = |b: &PuiseuxBranch| -> Result<(Families, ValueSet)> {
        let data = match semiroot {
            Some(sr) => LevelData::with_semiroot(b, k, sr.clone())?,
            None => LevelData::new(b, k)?,
        };
        Ok((Families::compute(b, &data)?, lambda_set(b)?))
    };
    Ok(match with_retry(branch, run)? {
        Ok((fam, lambda)) => {
            let report = fam.verify(branch.to_string(), &lambda);
            (fam, report)
        }
        Err(e) => (
            Families {
                level: k,
                ..Default::default()
            },
            VerificationReport::inconclusive("families", branch.to_string(), &e),
        ),
    })
}

/// Upper and lower bounds on the Tjurina number at one semiroot level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauBounds {
    pub level: usize,
    pub mu: i64,
    pub tau: i64,
    pub mu_k: i64,
    pub tau_k: i64,
    /// `μ - μ_k - e_{k+1}(n_{k+1} - 2) τ_k`.
    pub level_bound: i64,
    pub mu_top: i64,
    /// `4μ - (3 n_g - 2) μ_{g-1}`, to compare with `4τ`.
    pub top_bound_times4: i64,
}

impl TauBounds {
    pub fn level_bound_holds(&self) -> bool {
        self.tau <= self.level_bound
    }

    pub fn top_bound_holds(&self) -> bool {
        4 * self.tau <= self.top_bound_times4
    }

    /// `3μ/4 <= τ`.
    pub fn quarter_bound_holds(&self) -> bool {
        4 * self.tau >= 3 * self.mu
    }

    /// `τ >= 3μ/4 + (√(1 + 4μ) - 1)/8`, as `L >= 0` and `L² >= 1 + 4μ` with
    /// `L = 8τ - 6μ + 1`.
    pub fn refined_lower_bound_holds(&self) -> bool {
        let l = 8 * self.tau - 6 * self.mu + 1;
        l >= 0 && l * l > 4 * self.mu
    }

    pub fn all_hold(&self) -> bool {
        self.level_bound_holds() && self.top_bound_holds() && self.quarter_bound_holds() && self.refined_lower_bound_holds()
    }
}

fn compute_tau_bounds(branch: &PuiseuxBranch, k: usize) -> Result<TauBounds> {
    let s = branch.semigroup();
    let g = s.genus();
    if k >= g {
        return Err(Error::InvalidArgument(format!("level {k} must lie in 0..{g}")));
    }
    let mu = s.milnor();
    let tau = lambda_set(branch)?.tau();
    let semiroot = branch.semiroot_branch(k)?;
    let mu_k = semiroot.milnor();
    let tau_k = lambda_set(&semiroot)?.tau();
    let level_bound = mu - mu_k - s.e(k + 1) * (s.n(k + 1) - 2) * tau_k;
    let mu_top = s.semiroot_semigroup(g - 1)?.milnor();
    let top_bound_times4 = 4 * mu - (3 * s.n(g) - 2) * mu_top;
    Ok(TauBounds {
        level: k,
        mu,
        tau,
        mu_k,
        tau_k,
        level_bound,
        mu_top,
        top_bound_times4,
    })
}

pub fn tau_bounds(branch: &PuiseuxBranch, k: usize) -> Result<(Option<TauBounds>, VerificationReport)> {
    Ok(match with_retry(branch, |b| compute_tau_bounds(b, k))? {
        Ok(tb) => {
            let report = VerificationReport::new(
                "tau_bounds",
                branch.to_string(),
                tb.all_hold(),
                json!({
                    "bounds": tb,
                    "level_bound": tb.level_bound_holds(),
                    "top_bound": tb.top_bound_holds(),
                    "quarter_bound": tb.quarter_bound_holds(),
                    "refined_lower_bound": tb.refined_lower_bound_holds(),
                }),
            );
            (Some(tb), report)
        }
        Err(e) => (None, VerificationReport::inconclusive("tau_bounds", branch.to_string(), &e)),
    })
}

/// Parts of the decomposition of `Λ \ Γ` for classes with `n_g = 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ng2Decomposition {
    pub transferred: BTreeSet<i64>,
    pub below: BTreeSet<i64>,
    pub above: BTreeSet<i64>,
    pub lambda_minus_gamma: BTreeSet<i64>,
    pub mu: i64,
    pub mu_top: i64,
    pub tau: i64,
}

fn ng2_compute(branch: &PuiseuxBranch) -> Result<(Ng2Decomposition, bool)> {
    let s = branch.semigroup();
    let g = s.genus();
    let data = LevelData::new(branch, g - 1)?;
    let transferred: BTreeSet<i64> = data
        .theta
        .keys()
        .map(|&d| data.rho(d))
        .collect::<Result<_>>()?;
    let vg = s.v(g);
    let below: BTreeSet<i64> = data.non_values().into_iter().map(|d| vg - 2 * d).collect();
    let above: BTreeSet<i64> = data.gaps().into_iter().map(|d| vg + 2 * d).collect();
    let lambda = lambda_set(branch)?;
    let lmg: BTreeSet<i64> = lambda.extra.iter().copied().collect();
    let mu_top = data.semiroot.milnor();
    let parts = transferred.len() + below.len() + above.len();
    let union: BTreeSet<i64> = transferred.iter().chain(&below).chain(&above).copied().collect();
    let ok = transferred.len() == data.theta.len()
        && union.len() == parts
        && union == lmg
        && lmg.len() as i64 == mu_top
        && lambda.tau() == s.milnor() - mu_top;
    Ok((
        Ng2Decomposition {
            transferred,
            below,
            above,
            lambda_minus_gamma: lmg,
            mu: s.milnor(),
            mu_top,
            tau: lambda.tau(),
        },
        ok,
    ))
}

/// Checks the three-part decomposition of `Λ \ Γ` and `τ = μ - μ_{g-1}` for a
/// branch whose last characteristic quotient is 2.
pub fn ng2_verify(branch: &PuiseuxBranch) -> Result<VerificationReport> {
    let s = branch.semigroup();
    if branch.is_smooth() || s.n(s.genus()) != 2 {
        return Err(Error::NotNg2Class);
    }
    Ok(match with_retry(branch, ng2_compute)? {
        Ok((d, ok)) => VerificationReport::new("ng2", branch.to_string(), ok, json!(d)),
        Err(e) => VerificationReport::inconclusive("ng2", branch.to_string(), &e),
    })
}

/// Both sides of the description of `{λ ∈ Λ \ Γ : λ < v_{k+1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BelowNextGenerator {
    pub level: usize,
    pub v_next: i64,
    pub left: BTreeSet<i64>,
    pub transferred: BTreeSet<i64>,
    pub shifted: BTreeSet<i64>,
    /// Right-hand elements at or above `v_{k+1}`, dropped by the windowing.
    pub dropped: BTreeSet<i64>,
}

fn prop51_compute(branch: &PuiseuxBranch, k: usize) -> Result<(BelowNextGenerator, bool)> {
    let data = LevelData::new(branch, k)?;
    let lambda = lambda_set(branch)?;
    let v = data.v_next;
    let left: BTreeSet<i64> = lambda.extra.iter().copied().filter(|&l| l < v).collect();
    let transferred_all: Vec<i64> = data.theta.keys().map(|&d| data.rho(d)).collect::<Result<_>>()?;
    let shifted_all: Vec<i64> = data.non_values().into_iter().map(|d| v - data.e_k * d).collect();
    let dropped = transferred_all.iter().chain(&shifted_all).copied().filter(|&x| x >= v).collect();
    let transferred: BTreeSet<i64> = transferred_all.iter().copied().filter(|&x| x < v).collect();
    let shifted: BTreeSet<i64> = shifted_all.iter().copied().filter(|&x| x < v).collect();
    let disjoint = transferred.is_disjoint(&shifted);
    let right: BTreeSet<i64> = transferred.union(&shifted).copied().collect();
    let ok = disjoint && right == left;
    Ok((
        BelowNextGenerator {
            level: k,
            v_next: v,
            left,
            transferred,
            shifted,
            dropped,
        },
        ok,
    ))
}

/// Compares `{λ ∈ Λ \ Γ : λ < v_{k+1}}` with the values transferred from
/// the k-semiroot, for `1 <= k < g`.
pub fn prop51_verify(branch: &PuiseuxBranch, k: usize) -> Result<VerificationReport> {
    let g = branch.semigroup().genus();
    if k == 0 || k >= g {
        return Err(Error::InvalidArgument(format!("level {k} must lie in 1..{g}")));
    }
    Ok(match with_retry(branch, |b| prop51_compute(b, k))? {
        Ok((d, ok)) => VerificationReport::new("below_next_generator", branch.to_string(), ok, json!(d)),
        Err(e) => VerificationReport::inconclusive("below_next_generator", branch.to_string(), &e),
    })
}

/// Every applicable check on one branch, in a fixed order.
pub fn verify_all(branch: &PuiseuxBranch, with_oracle: bool) -> Result<Vec<VerificationReport>> {
    let s = branch.semigroup();
    let g = s.genus();
    let mut reports = Vec::new();
    for k in 0..g {
        reports.push(contagem_families(branch, k)?.1);
        reports.push(tau_bounds(branch, k)?.1);
    }
    for k in 1..g {
        reports.push(prop51_verify(branch, k)?);
    }
    if g >= 1 && s.n(g) == 2 {
        reports.push(ng2_verify(branch)?);
    }
    if with_oracle && g >= 1 {
        reports.push(tjurina_report(branch)?);
    }
    Ok(reports)
}

/// Compares `μ - #(Λ \ Γ)` with the codimension of `⟨f, f_x, f_y⟩`.
pub fn tjurina_report(branch: &PuiseuxBranch) -> Result<VerificationReport> {
    Ok(match with_retry(branch, lambda_set)? {
        Ok(lambda) => {
            let oracle = tjurina_oracle(&branch.implicit())?;
            VerificationReport::new(
                "tjurina",
                branch.to_string(),
                oracle == lambda.tau(),
                json!({ "from_values": lambda.tau(), "from_ideal": oracle }),
            )
        }
        Err(e) => VerificationReport::inconclusive("tjurina", branch.to_string(), &e),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOptions {
    pub trunc_factor: usize,
    /// Worker threads; `None` uses every available processor.
    pub jobs: Option<usize>,
    /// Also compare every τ with the ideal-codimension oracle.
    pub oracle: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            trunc_factor: 1,
            jobs: None,
            oracle: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub index: u64,
    pub seed: u64,
    pub branch: BranchRecord,
    pub lambda_minus_gamma: Vec<i64>,
    pub tau: i64,
    pub reports: Vec<VerificationReport>,
}

/// One distinct `(Λ \ Γ, τ)` outcome of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub lambda_minus_gamma: Vec<i64>,
    pub tau: i64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub generators: Vec<i64>,
    pub char_exponents: Vec<i64>,
    pub mu: i64,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
    pub samples: Vec<SampleReport>,
}

impl SweepReport {
    pub fn violations(&self) -> Vec<&VerificationReport> {
        self.samples
            .iter()
            .flat_map(|s| &s.reports)
            .filter(|r| r.is_violated())
            .collect()
    }

    pub fn inconclusive(&self) -> Vec<&VerificationReport> {
        self.samples
            .iter()
            .flat_map(|s| &s.reports)
            .filter(|r| r.status == Status::Inconclusive)
            .collect()
    }

    /// One row per distinct outcome: the set, τ and the number of samples.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("lambda_minus_gamma\ttau\tcount\n");
        for o in &self.outcomes {
            let set: Vec<String> = o.lambda_minus_gamma.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{{{}}}\t{}\t{}", set.join(","), o.tau, o.count).unwrap();
        }
        out
    }
}

fn sweep_sample(beta: &[i64], seed: u64, index: u64, opts: &SweepOptions) -> Result<SampleReport> {
    let sample = sample_seed(seed, index);
    let branch = make_branch(beta, CoefficientChoice::GenericSeeded(sample), opts.trunc_factor)?;
    let lambda = lambda_set(&branch)?;
    let reports = verify_all(&branch, opts.oracle)?;
    Ok(SampleReport {
        index,
        seed: sample,
        branch: branch.record(),
        lambda_minus_gamma: lambda.extra.clone(),
        tau: lambda.tau(),
        reports,
    })
}

/// Samples `samples` seeded branches of the class and runs every check on
/// each. The result depends only on the arguments, not on the thread count.
pub fn class_sweep(semigroup: &NumericalSemigroup, samples: u64, seed: u64, opts: &SweepOptions) -> Result<SweepReport> {
    let beta = semigroup.char_exponents().to_vec();
    if semigroup.genus() == 0 {
        return Err(Error::InvalidArgument("the smooth class has no branches to sample".into()));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<SampleReport>> = pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| sweep_sample(&beta, seed, i, opts))
            .collect()
    });
    let samples: Vec<SampleReport> = results.into_iter().collect::<Result<_>>()?;
    let mut counts: BTreeMap<(i64, Vec<i64>), usize> = BTreeMap::new();
    for s in &samples {
        *counts.entry((s.tau, s.lambda_minus_gamma.clone())).or_default() += 1;
    }
    let outcomes = counts
        .into_iter()
        .map(|((tau, lambda_minus_gamma), count)| Outcome {
            lambda_minus_gamma,
            tau,
            count,
        })
        .collect();
    Ok(SweepReport {
        generators: semigroup.generators().to_vec(),
        char_exponents: beta,
        mu: semigroup.milnor(),
        seed,
        outcomes,
        samples,
    })
}
