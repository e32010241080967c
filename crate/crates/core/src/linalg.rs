//! Exact Gaussian elimination over `ℚ` on dense row vectors.

use num::{One, Zero};

use crate::series::Q;

/// Reduces `rows` in place to reduced row echelon form and returns the
/// pivot column of each surviving row. Zero rows are dropped.
pub fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{v : M v = 0}` for the matrix whose rows are `equations`.
pub fn nullspace(equations: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut rows = equations.to_vec();
    let pivots = rref(&mut rows, ncols);
    let mut is_pivot = vec![false; ncols];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Q::zero(); ncols];
            v[free] = Q::one();
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = -row[free].clone();
            }
            v
        })
        .collect()
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(x: &Q) -> Option<u64> {
    let p = num::BigInt::from(PRIME);
    let modp = |v: &num::BigInt| -> u64 {
        let r = ((v % &p) + &p) % &p;
        r.try_into().expect("residue below the prime")
    };
    let d = modp(x.denom());
    (d != 0).then(|| mul_mod(modp(x.numer()), pow_mod(d, PRIME - 2)))
}

/// Rank modulo `2^61 - 1`, a lower bound for the rank over `ℚ`. `None` when
/// some denominator is divisible by the prime.
pub fn rank_mod_prime(rows: &[Vec<Q>], ncols: usize) -> Option<usize> {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(reduce).collect::<Option<Vec<u64>>>())
        .collect::<Option<_>>()?;
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = pow_mod(m[rank][c], PRIME - 2);
        let pivot: Vec<u64> = m[rank].iter().map(|&x| mul_mod(x, inv)).collect();
        for row in m.iter_mut().skip(rank + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&pivot).skip(c) {
                *x = (*x + PRIME - mul_mod(f, y)) % PRIME;
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Echelon rows keyed by leading column, and the rows with a vanishing key.
pub type KeyedEchelon = (Vec<(usize, Vec<Q>)>, Vec<Vec<Q>>);

/// Echelonizes rows by the position of their first nonzero entry among the
/// leading `key_len` columns. The remaining columns ride along as payload.
/// Rows whose key part vanishes are returned separately.
pub fn echelon_by_leading_key(
    rows: Vec<Vec<Q>>,
    key_len: usize,
) -> KeyedEchelon {
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new();
    let mut degenerate = Vec::new();
    for mut row in rows {
        loop {
            match row[..key_len].iter().position(|c| !c.is_zero()) {
                None => {
                    if row.iter().any(|c| !c.is_zero()) {
                        degenerate.push(row);
                    }
                    break;
                }
                Some(lead) => match basis.iter().find(|(l, _)| *l == lead) {
                    Some((_, b)) => {
                        let factor = &row[lead] / &b[lead];
                        for (x, y) in row.iter_mut().zip(b) {
                            if !y.is_zero() {
                                *x -= &factor * y;
                            }
                        }
                    }
                    None => {
                        basis.push((lead, row));
                        break;
                    }
                },
            }
        }
    }
    basis.sort_by_key(|(l, _)| *l);
    (basis, degenerate)
}
