#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use superw::algebra::SuperElement;
use superw::pyramid::{Label, Row};
use superw::{Pyramid, ShiftMatrix, SuperAlgebra, ZeroOneSequence};

pub fn rows(spec: &[(usize, char, usize)]) -> Pyramid {
    let rows = spec
        .iter()
        .map(|&(length, l, offset)| Row { length, label: if l == '+' { Label::Plus } else { Label::Minus }, offset })
        .collect();
    Pyramid::from_rows(rows).unwrap()
}

pub fn triple(ell: usize, ups: &str, shift: Vec<Vec<usize>>) -> Pyramid {
    Pyramid::from_triple(&ShiftMatrix::new(shift).unwrap(), ell, &ZeroOneSequence::parse(ups).unwrap()).unwrap()
}

pub fn p1() -> Pyramid {
    triple(2, "01", vec![vec![0, 1], vec![0, 0]])
}

pub fn c3() -> Pyramid {
    triple(3, "011", vec![vec![0, 1, 1], vec![0, 0, 0], vec![1, 1, 0]])
}

pub fn check_eq(alg: &SuperAlgebra, got: &SuperElement, want: &SuperElement, what: &str) {
    if got != want {
        let mut d = got.clone();
        d.sub_assign(want);
        panic!("{what}\n got  {}\n want {}\n diff {}", alg.format(got), alg.format(want), alg.format(&d));
    }
}

/// Rank of a list of sparse rows over `Q`, by plain elimination.
pub fn exact_rank(rows: Vec<Vec<(usize, BigRational)>>, width: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .into_iter()
        .map(|r| {
            let mut v = vec![BigRational::zero(); width];
            for (k, c) in r {
                v[k] += c;
            }
            v
        })
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let inv = BigRational::one() / m[rank][col].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone() * inv.clone();
                for c in col..width {
                    let d = f.clone() * m[rank][c].clone();
                    m[r][c] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}
