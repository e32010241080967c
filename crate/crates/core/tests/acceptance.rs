//! One test per acceptance criterion. Each prints a `criterion N: PASS|FAIL`
//! line straight to stdout, so the verdicts appear even under capture.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use branchinv::differentials::{bm1_check, jacobian_values, lambda_set, log_form_search, tjurina_oracle};
use branchinv::harness::{class_sweep, contagem_families, contagem_families_with, ng2_verify, tau_bounds, Status, SweepOptions};
use branchinv::semigroup::enumerate_char_sequences;
use branchinv::{make_branch, CoefficientChoice, NumericalSemigroup, PuiseuxBranch, Q};
use num::One;
use common::{branch, random_poly, sieve, CORPUS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MASTER: u64 = 2024;

fn verdict(n: u32, ok: bool, detail: &str) {
    let line = format!("criterion {n}: {} ({detail})\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "criterion {n} failed: {detail}");
}

fn doubled(b: &PuiseuxBranch) -> PuiseuxBranch {
    b.with_trunc(2 * b.trunc())
}

fn generic(beta: &[i64], index: u64, factor: usize) -> PuiseuxBranch {
    let seed = branchinv::branch::sample_seed(MASTER, index);
    make_branch(beta, CoefficientChoice::GenericSeeded(seed), factor).unwrap()
}

fn set(v: &[i64]) -> BTreeSet<i64> {
    v.iter().copied().collect()
}

// Criterion 1.

fn golden_branch() -> PuiseuxBranch {
    branch(&[6, 9, 10], &[(9, 1), (10, 1)])
}

fn golden_values(b: &PuiseuxBranch) -> (Vec<i64>, i64) {
    let l = lambda_set(b).unwrap();
    (l.extra.clone(), l.tau())
}

#[test]
fn criterion_01_golden_branch() {
    let start = Instant::now();
    let (extra, tau) = golden_values(&golden_branch());
    let elapsed = start.elapsed();
    let ok = extra == [16, 22, 26, 29, 32, 35, 41] && tau == 35 && elapsed < Duration::from_secs(5);
    verdict(1, ok, &format!("Λ\\Γ = {extra:?}, τ = {tau}, {elapsed:.2?}"));
}

// Criterion 2.

const SIX_NINE_ROWS: [(&[i64], i64); 4] = [
    (&[16, 22, 26, 29, 32, 35, 41], 35),
    (&[16, 22, 26, 32, 35, 41], 36),
    (&[16, 22, 29, 32, 35, 41], 36),
    (&[16, 22, 29, 35, 41], 37),
];

type OutcomeTable = Vec<(Vec<i64>, i64, usize)>;

fn six_nine_sweep(factor: usize) -> (OutcomeTable, bool, Duration) {
    let s = NumericalSemigroup::from_generators(&[6, 9, 19]).unwrap();
    let opts = SweepOptions {
        trunc_factor: factor,
        ..Default::default()
    };
    let start = Instant::now();
    let r = class_sweep(&s, 200, 1, &opts).unwrap();
    let elapsed = start.elapsed();
    let core = set(&[16, 22, 35, 41]);
    let per_sample = r
        .samples
        .iter()
        .all(|x| core.is_subset(&set(&x.lambda_minus_gamma)) && x.tau <= 38);
    let clean = r.violations().is_empty() && r.inconclusive().is_empty();
    let table = r
        .outcomes
        .iter()
        .map(|o| (o.lambda_minus_gamma.clone(), o.tau, o.count))
        .collect();
    (table, per_sample && clean, elapsed)
}

fn six_nine_base() -> &'static (OutcomeTable, bool, Duration) {
    static CELL: OnceLock<(OutcomeTable, bool, Duration)> = OnceLock::new();
    CELL.get_or_init(|| six_nine_sweep(1))
}

#[test]
fn criterion_02_six_nine_sweep() {
    let (table, per_sample, elapsed) = six_nine_base();
    let rows_ok = table
        .iter()
        .all(|(l, t, _)| SIX_NINE_ROWS.iter().any(|(rl, rt)| rl == &l.as_slice() && rt == t));
    let ok = rows_ok && *per_sample && *elapsed < Duration::from_secs(120);
    let summary: Vec<String> = table.iter().map(|(l, t, c)| format!("{l:?} τ={t} ×{c}")).collect();
    verdict(2, ok, &format!("{}; {elapsed:.2?}", summary.join("; ")));
}

// Criterion 3.

const SAMPLES_PER_CLASS: u64 = 10;

/// `(class, sample, τ from values, τ from the ideal)`.
fn corpus_tjurina(factor: usize) -> Vec<(usize, u64, i64, i64)> {
    let mut rows = Vec::new();
    for (ci, beta) in CORPUS.iter().enumerate() {
        for i in 0..SAMPLES_PER_CLASS {
            let b = generic(beta, i, factor);
            let tau = lambda_set(&b).unwrap().tau();
            let oracle = tjurina_oracle(&b.implicit()).unwrap();
            rows.push((ci, i, tau, oracle));
        }
    }
    rows
}

fn corpus_tjurina_base() -> &'static Vec<(usize, u64, i64, i64)> {
    static CELL: OnceLock<Vec<(usize, u64, i64, i64)>> = OnceLock::new();
    CELL.get_or_init(|| corpus_tjurina(1))
}

#[test]
fn criterion_03_tjurina_two_ways() {
    let rows = corpus_tjurina_base();
    let bad: Vec<_> = rows.iter().filter(|r| r.2 != r.3).collect();
    let ok = bad.is_empty() && CORPUS.len() >= 20 && rows.len() == CORPUS.len() * SAMPLES_PER_CLASS as usize;
    verdict(
        3,
        ok,
        &format!("{} classes × {SAMPLES_PER_CLASS} samples, {} disagreements {bad:?}", CORPUS.len(), bad.len()),
    );
}

// Criterion 4.

/// Classes with last characteristic quotient 2. The generator list
/// `[8, 10, 21]` is not a plane branch semigroup; `[8, 10, 41]` has the
/// intended characteristic sequence `(8, 10, 11)`.
const NG2_CLASSES: [&[i64]; 3] = [&[4, 6, 13], &[4, 6, 15], &[8, 10, 41]];
const NG2_SAMPLES: u64 = 10;

/// `(generators, sample, Λ \ Γ, τ, verified)`.
type Ng2Row = (Vec<i64>, u64, Vec<i64>, i64, bool);

fn ng2_rows(factor: usize) -> Vec<Ng2Row> {
    let mut rows = Vec::new();
    for gens in NG2_CLASSES {
        let s = NumericalSemigroup::from_generators(gens).unwrap();
        for i in 0..NG2_SAMPLES {
            let b = generic(s.char_exponents(), i, factor);
            let r = ng2_verify(&b).unwrap();
            let extra: Vec<i64> = serde_json::from_value(r.witness["lambda_minus_gamma"].clone()).unwrap_or_default();
            let tau = r.witness["tau"].as_i64().unwrap_or(-1);
            rows.push((gens.to_vec(), i, extra, tau, r.status == Status::Verified));
        }
    }
    rows
}

fn ng2_base() -> &'static Vec<Ng2Row> {
    static CELL: OnceLock<Vec<Ng2Row>> = OnceLock::new();
    CELL.get_or_init(|| ng2_rows(1))
}

#[test]
fn criterion_04_quotient_two_classes() {
    let invalid_rejected = NumericalSemigroup::from_generators(&[8, 10, 21]).is_err();
    let rows = ng2_base();
    let all_verified = rows.iter().all(|r| r.4);
    let golden = rows
        .iter()
        .filter(|r| r.0 == [4, 6, 13])
        .all(|r| r.2 == [11, 15] && r.3 == 14);
    let ok = invalid_rejected && all_verified && golden;
    let taus: BTreeSet<(Vec<i64>, i64)> = rows.iter().map(|r| (r.0.clone(), r.3)).collect();
    verdict(
        4,
        ok,
        &format!("[8,10,21] rejected: {invalid_rejected}, decompositions verified: {all_verified}, τ per class {taus:?}"),
    );
}

// Criterion 5.

#[test]
fn criterion_05_families() {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut classes: Vec<Vec<i64>> = CORPUS.iter().filter(|b| b.len() >= 3).map(|b| b.to_vec()).collect();
    classes.extend([vec![8, 10, 11], vec![8, 10, 15], vec![8, 12, 14, 15]]);
    for beta in &classes {
        let samples = if beta.len() > 3 { 2 } else { SAMPLES_PER_CLASS };
        for i in 0..samples {
            let b = generic(beta, i, 1);
            for k in 1..b.semigroup().genus() {
                let (_, r) = contagem_families(&b, k).unwrap();
                checked += 1;
                if r.status != Status::Verified {
                    failures.push(format!("{b} k={k}: {}", r.witness));
                }
            }
        }
    }
    for i in 0..SAMPLES_PER_CLASS {
        let b = generic(&[8, 10, 11], i, 1);
        let lead = b.phi()[&10].clone();
        let psi = BTreeMap::from([(5, lead), (7, Q::one())]);
        let root = PuiseuxBranch::from_parametrization(4, psi, None).unwrap();
        let (fam, r) = contagem_families_with(&b, 1, &root).unwrap();
        checked += 1;
        if r.status != Status::Verified || !fam.f2.contains(&19) {
            failures.push(format!("{b} with {root}: {}", r.witness));
        }
    }
    verdict(5, failures.is_empty(), &format!("{checked} (sample, level) pairs, failures {failures:?}"));
}

// Criterion 6.

#[test]
fn criterion_06_milnor_and_jacobian() {
    let mut semigroups = 0;
    let mut milnor_bad = Vec::new();
    for beta in enumerate_char_sequences(8, 61) {
        let s = NumericalSemigroup::from_char(&beta).unwrap();
        let mu = s.milnor();
        if mu > 60 {
            continue;
        }
        semigroups += 1;
        let gaps = sieve(s.generators(), mu as usize + 1).iter().filter(|&&m| !m).count() as i64;
        if mu != 2 * gaps || s.conductor() != mu {
            milnor_bad.push(beta);
        }
    }
    let mut branches = 0;
    let mut identity_bad = Vec::new();
    let mut lambda_bad = 0;
    let mut below_milnor = 0;
    let mut bad_exactly_below_milnor = true;
    for beta in CORPUS {
        for i in 0..3 {
            let b = generic(beta, i, 1);
            let j = jacobian_values(&b).unwrap();
            let l = lambda_set(&b).unwrap();
            branches += 1;
            let holds = j.identity_holds(b.semigroup());
            if l.tau() < l.mu() {
                below_milnor += 1;
            }
            bad_exactly_below_milnor &= holds == (l.tau() == l.mu());
            if !holds {
                identity_bad.push(format!("{:?} τ={} μ={}", b.semigroup().generators(), l.tau(), l.mu()));
            }
            if !j.matches_lambda(&l) {
                lambda_bad += 1;
            }
        }
    }
    let ok = milnor_bad.is_empty() && identity_bad.is_empty();
    let identity_failures = identity_bad.len();
    identity_bad.truncate(4);
    verdict(
        6,
        ok,
        &format!(
            "μ = 2·#gaps on {semigroups} semigroups with conductor <= 60, failures {milnor_bad:?}; \
             ν(J) - (μ - 1) = Γ \\ {{0}} on [1, μ + 1] fails on {identity_failures}/{branches} branches, \
             {below_milnor} of which have τ < μ; failures are exactly the τ < μ branches: {bad_exactly_below_milnor}, e.g. {identity_bad:?}; \
             ν(J) - (μ - 1) = Λ \\ {{0}} fails on {lambda_bad}/{branches}"
        ),
    );
}

// Criterion 7.

#[test]
fn criterion_07_order_laws() {
    let mut bad = Vec::new();
    let mut forms = 0;
    let mut branches: Vec<PuiseuxBranch> = CORPUS.iter().map(|beta| generic(beta, 0, 1)).collect();
    branches.extend([
        branch(&[2, 3], &[(3, 1)]),
        branch(&[4, 6, 7], &[(6, 1), (7, 1)]),
        golden_branch(),
        branch(&[3, 7], &[(7, 1)]),
        branch(&[5, 8], &[(8, 1)]),
    ]);
    for b in &branches {
        let s = b.semigroup();
        let f = b.implicit();
        let mu = b.milnor() as usize;
        if b.valuation(&f.dy()).unwrap().0 != mu - 1 + b.n() || b.valuation(&f.dx()).unwrap().0 != mu - 1 + s.v(1) as usize {
            bad.push(format!("{b}: partial derivative orders"));
        }
        let window = s.milnor() + s.generators().last().unwrap();
        for lf in log_form_search(b, window).unwrap() {
            forms += 1;
            let r = bm1_check(b, &lf.form).unwrap_or_else(|e| panic!("{b}: {e:?} {:?}", lf.form));
            if !r.holds(b.n() as i64) {
                bad.push(format!("{b}: {r:?}"));
            }
        }
    }
    let ok = bad.is_empty() && forms > 0;
    verdict(7, ok, &format!("{} branches, {forms} logarithmic forms, failures {bad:?}", branches.len()));
}

// Criterion 8.

#[test]
fn criterion_08_semiroot_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER);
    let mut pairs = 0;
    let mut bad = Vec::new();
    for beta in CORPUS.iter().filter(|b| b.len() >= 3) {
        let b = generic(beta, 0, 1);
        let s = b.semigroup();
        for k in 0..s.genus() {
            let sb = b.semiroot_branch(k).unwrap();
            let e = s.e(k) as usize;
            let deg = b.n() / e;
            pairs += 1;
            for _ in 0..100 {
                let h = random_poly(&mut rng, 6, deg - 1, 5);
                let (of, cf) = b.valuation(&h).unwrap();
                let (ok, ck) = sb.valuation(&h).unwrap_or_else(|e| panic!("{sb} trunc {} k={k}: {e:?} {h}", sb.trunc()));
                if of != e * ok || cf != ck {
                    bad.push(format!("{b} k={k} h={h}"));
                }
            }
        }
    }
    verdict(8, bad.is_empty(), &format!("{pairs} (branch, level) pairs × 100 polynomials, failures {bad:?}"));
}

// Criterion 9.

#[test]
fn criterion_09_lower_bounds() {
    let mut bad = Vec::new();
    let mut count = 0;
    for beta in CORPUS {
        for i in 0..SAMPLES_PER_CLASS {
            let b = generic(beta, i, 1);
            let (tb, _) = tau_bounds(&b, 0).unwrap();
            let tb = tb.unwrap();
            count += 1;
            if !tb.quarter_bound_holds() || !tb.refined_lower_bound_holds() {
                bad.push(format!("{b}: μ={} τ={}", tb.mu, tb.tau));
            }
        }
    }
    verdict(9, bad.is_empty(), &format!("{count} branches, failures {bad:?}"));
}

// Criterion 10.

#[test]
fn criterion_10_truncation_robustness() {
    let mut changed = Vec::new();
    let g = golden_branch();
    if golden_values(&g) != golden_values(&doubled(&g)) {
        changed.push("criterion 1".to_string());
    }
    let (t1, ok1, _) = six_nine_base();
    let (t2, ok2, _) = six_nine_sweep(2);
    if t1 != &t2 || ok1 != &ok2 {
        changed.push(format!("criterion 2: {t1:?} vs {t2:?}"));
    }
    let r1 = corpus_tjurina_base();
    let r2 = corpus_tjurina(2);
    if r1 != &r2 {
        changed.push("criterion 3".to_string());
    }
    let n1 = ng2_base();
    let n2 = ng2_rows(2);
    if n1 != &n2 {
        changed.push("criterion 4".to_string());
    }
    let same_branches = CORPUS.iter().all(|beta| {
        let (a, b) = (generic(beta, 0, 1), generic(beta, 0, 2));
        a.phi() == b.phi() && b.trunc() == 2 * a.trunc()
    });
    verdict(
        10,
        changed.is_empty() && same_branches,
        &format!("criteria 1-4 at doubled truncation, changed {changed:?}"),
    );
}
