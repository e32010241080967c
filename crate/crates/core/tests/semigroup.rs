mod common;

use branchinv::semigroup::enumerate_char_sequences;
use branchinv::NumericalSemigroup;
use common::sieve;
use proptest::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Every characteristic sequence with `β_0 <= max_mult` and `β_g <= max_exp`,
/// built by extending prefixes whose gcd has not yet dropped to 1.
fn char_sequences(max_mult: i64, max_exp: i64) -> Vec<Vec<i64>> {
    fn extend(prefix: &mut Vec<i64>, e: i64, max_exp: i64, out: &mut Vec<Vec<i64>>) {
        if e == 1 {
            out.push(prefix.clone());
            return;
        }
        let last = *prefix.last().unwrap();
        for b in last + 1..=max_exp {
            if b % e != 0 {
                prefix.push(b);
                extend(prefix, gcd(e, b), max_exp, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    for n in 2..=max_mult {
        extend(&mut vec![n], n, max_exp, &mut out);
    }
    out
}

#[test]
fn char_sequences_round_trip_through_generators() {
    let all = char_sequences(8, 30);
    let mut lib = enumerate_char_sequences(8, 30);
    let mut mine = all.clone();
    lib.sort();
    mine.sort();
    assert_eq!(lib, mine);
    for beta in &all {
        let s = NumericalSemigroup::from_char(beta).unwrap();
        let back = NumericalSemigroup::from_generators(s.generators()).unwrap();
        assert_eq!(back.char_exponents(), beta.as_slice());
        assert_eq!(back, s);
    }
}

#[test]
fn membership_matches_sieve_and_gap_count() {
    for beta in char_sequences(8, 30) {
        let s = NumericalSemigroup::from_char(&beta).unwrap();
        let mu = s.milnor();
        let table = sieve(s.generators(), 2 * mu as usize + 1);
        for (r, &m) in table.iter().enumerate() {
            assert_eq!(s.contains(r as i64), m, "{beta:?} at {r}");
        }
        let gaps: Vec<i64> = (0..mu).filter(|&r| !table[r as usize]).collect();
        assert_eq!(s.gaps(), gaps);
        assert_eq!(2 * gaps.len() as i64, mu);
        if mu > 0 {
            assert!(!table[mu as usize - 1]);
        }
        let [a, b, c] = s.milnor_closed_forms();
        assert!(a == mu && b == mu && c == mu, "{beta:?}");
        assert_eq!(s.conductor(), mu);
    }
}

#[test]
fn structure_constants() {
    for beta in char_sequences(8, 30) {
        let s = NumericalSemigroup::from_char(&beta).unwrap();
        let g = s.genus();
        assert_eq!(s.e(g), 1);
        for i in 1..=g {
            assert_eq!(s.e(i), s.generators()[..=i].iter().fold(0, |a, &b| gcd(a, b)));
            assert_eq!(s.e(i), beta[..=i].iter().fold(0, |a, &b| gcd(a, b)));
            assert_eq!(s.n(i) * s.e(i), s.e(i - 1));
            assert!(s.n(i) >= 2);
            let below = sieve(&s.generators()[..i], (s.n(i) * s.v(i)) as usize + 1);
            assert!(below[(s.n(i) * s.v(i)) as usize]);
            assert!(!below[((s.n(i) - 1) * s.v(i)) as usize]);
            if i < g {
                assert_eq!(s.v(i + 1), s.n(i) * s.v(i) + beta[i + 1] - beta[i]);
            }
        }
    }
}

#[test]
fn semigroup_is_built_from_semiroot_semigroups() {
    for beta in char_sequences(8, 30) {
        let s = NumericalSemigroup::from_char(&beta).unwrap();
        let mu = s.milnor();
        let len = 2 * mu as usize + 1;
        for k in 0..=s.genus() {
            let sk = s.semiroot_semigroup(k).unwrap();
            let e = s.e(k);
            let mut gens: Vec<i64> = sk.generators().iter().map(|v| v * e).collect();
            if k == 0 {
                gens = vec![e];
            }
            gens.extend_from_slice(&s.generators()[k + 1..]);
            assert_eq!(sieve(&gens, len), s.sieve(len), "{beta:?} level {k}");
            let tail: i64 = (k + 1..=s.genus()).map(|j| (s.n(j) - 1) * s.v(j)).sum();
            assert_eq!(mu - 1, e * (sk.milnor() - 1) + tail, "{beta:?} level {k}");
        }
    }
}

/// `Σ η^α` over primitive-or-not roots of unity of order dividing `e_j` but
/// not `e_{j+1}`, summed numerically.
fn literal_root_sum(e_j: i64, e_next: i64, alpha: i64) -> i64 {
    let mut re = 0.0f64;
    for k in 0..e_j {
        if (k * e_next) % e_j == 0 {
            continue;
        }
        let angle = 2.0 * std::f64::consts::PI * (k * alpha) as f64 / e_j as f64;
        re += angle.cos();
    }
    re.round() as i64
}

#[test]
fn unit_root_sums_match_literal_sums() {
    let s = NumericalSemigroup::from_generators(&[6, 9, 19]).unwrap();
    assert_eq!(s.unit_root_sum(1, 3).unwrap(), 2);
    for beta in [vec![6, 9, 10], vec![8, 12, 14, 15], vec![4, 6, 7]] {
        let s = NumericalSemigroup::from_char(&beta).unwrap();
        for j in 0..s.genus() {
            for alpha in -30..=30 {
                assert_eq!(
                    s.unit_root_sum(j, alpha).unwrap(),
                    literal_root_sum(s.e(j), s.e(j + 1), alpha),
                    "{beta:?} j={j} α={alpha}"
                );
            }
        }
    }
}

#[test]
fn json_record() {
    let s = NumericalSemigroup::from_generators(&[6, 9, 19]).unwrap();
    let text = serde_json::to_string(&s.record()).unwrap();
    assert_eq!(text, r#"{"generators":[6,9,19],"char_exponents":[6,9,10],"conductor":42}"#);
    let back: branchinv::semigroup::SemigroupRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(NumericalSemigroup::from_record(&back).unwrap(), s);
}

proptest! {
    #[test]
    fn standard_form_is_unique_and_decides_membership(idx in 0usize..200, r in -80i64..200) {
        let all = char_sequences(8, 30);
        let s = NumericalSemigroup::from_char(&all[idx % all.len()]).unwrap();
        let rep = s.standard_form(r);
        prop_assert_eq!(rep.value(&s), r);
        for i in 1..=s.genus() {
            prop_assert!(rep.s[i] >= 0 && rep.s[i] < s.n(i));
        }
        let table = sieve(s.generators(), 200);
        prop_assert_eq!(rep.is_member(), r >= 0 && table[r as usize]);
        prop_assert_eq!(s.contains(r), rep.is_member());
    }
}
