//! Rank computations over `F_p` and `Q`.

use std::collections::BTreeMap;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::rational::Rational;

/// A prime just below `2^61`; products fit in `u128`.
pub const PRIME: u64 = 2_305_843_009_213_693_951;

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "no inverse of zero");
    powmod(a, p - 2, p)
}

/// Rank of a dense matrix over `F_p`.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod(rows[rank][col], p);
        for x in rows[rank].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot).skip(col) {
                *x = (*x + p - mulmod(f, y, p)) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Exact rank over `Q` of sparse rows.
pub fn rank_rational(rows: &[FxHashMap<usize, Rational>]) -> usize {
    let mut basis: Vec<(usize, FxHashMap<usize, Rational>)> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (pc, b) in &basis {
            if let Some(c) = v.get(pc).cloned() {
                for (k, x) in b {
                    let e = v.entry(*k).or_insert(Rational::ZERO);
                    *e = &*e - &(&c * x);
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            }
        }
        if let Some(&pc) = v.keys().min() {
            let inv = v[&pc].recip();
            for x in v.values_mut() {
                *x = &*x * &inv;
            }
            basis.push((pc, v));
        }
    }
    basis.len()
}

/// Incremental echelon form over `F_p` for sparse rows.
#[derive(Clone, Debug, Default)]
pub struct EchelonModP {
    /// Leading column -> monic row sorted by column.
    pivots: FxHashMap<usize, Vec<(usize, u64)>>,
}

impl EchelonModP {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `row` and keep it if it is independent; returns whether it was kept.
    pub fn insert(&mut self, row: &[(usize, u64)]) -> bool {
        let mut v: BTreeMap<usize, u64> = BTreeMap::new();
        for &(c, x) in row {
            let x = x % PRIME;
            if x != 0 {
                let e = v.entry(c).or_insert(0);
                *e = (*e + x) % PRIME;
                if *e == 0 {
                    v.remove(&c);
                }
            }
        }
        while let Some((&c, &x)) = v.iter().next() {
            let Some(piv) = self.pivots.get(&c) else {
                let inv = inv_mod(x, PRIME);
                let monic = v.into_iter().map(|(k, y)| (k, mulmod(y, inv, PRIME))).collect();
                self.pivots.insert(c, monic);
                return true;
            };
            for &(k, y) in piv {
                let e = v.entry(k).or_insert(0);
                *e = (*e + PRIME - mulmod(x, y, PRIME)) % PRIME;
                if *e == 0 {
                    v.remove(&k);
                }
            }
        }
        false
    }
}

/// Rank of sparse rational rows: try `F_p` first and fall back to exact
/// elimination only when the modular rank is deficient.
pub fn rank(rows: &[FxHashMap<usize, Rational>]) -> usize {
    let mut ech = EchelonModP::new();
    let mut modular = true;
    for r in rows {
        let Some(row) = r.iter().map(|(&k, v)| v.mod_prime(PRIME).map(|x| (k, x))).collect::<Option<Vec<_>>>() else {
            modular = false;
            break;
        };
        ech.insert(&row);
    }
    // A modular rank never exceeds the rational one.
    if modular && ech.rank() == rows.len() {
        return rows.len();
    }
    rank_rational(rows)
}

/// Rank of rows whose columns are labelled by arbitrary keys.
pub fn rank_keyed<K: Hash + Eq>(rows: &[Vec<(K, Rational)>]) -> usize {
    let mut cols: FxHashMap<&K, usize> = FxHashMap::default();
    let indexed: Vec<FxHashMap<usize, Rational>> = rows
        .iter()
        .map(|r| {
            let mut out = FxHashMap::default();
            for (k, v) in r {
                let n = cols.len();
                let c = *cols.entry(k).or_insert(n);
                out.insert(c, v.clone());
            }
            out
        })
        .collect();
    rank(&indexed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sparse(rows: &[&[i64]]) -> Vec<FxHashMap<usize, Rational>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(k, &x)| (k, Rational::from_int(x)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn ranks_agree() {
        let m = sparse(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank_rational(&m), 2);
        assert_eq!(rank(&m), 2);
        let id = sparse(&[&[1, 0], &[0, 1]]);
        assert_eq!(rank(&id), 2);
    }

    #[test]
    fn echelon_rank() {
        let mut e = EchelonModP::new();
        assert!(!e.insert(&[]));
        assert!(e.insert(&[(3, 1), (5, 2)]));
        assert!(!e.insert(&[(3, 2), (5, 4)]));
        assert!(e.insert(&[(5, 1)]));
        assert!(!e.insert(&[(3, 7)]));
        assert_eq!(e.rank(), 2);
        let keyed = vec![vec![("x", Rational::from_int(1))], vec![("x", Rational::from_int(2))]];
        assert_eq!(rank_keyed(&keyed), 1);
    }

    #[test]
    fn inverse() {
        let p = 101;
        for a in 1..p {
            assert_eq!(mulmod(a, inv_mod(a, p), p), 1);
        }
    }
}
