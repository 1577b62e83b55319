//! Independent oracles: literal definitions evaluated the slow way, and small
//! hand-derived values.

mod common;

use common::{c3, check_eq, exact_rank, p1, rows, triple};
use num_rational::BigRational;
use superw::algebra::SuperElement;
use superw::dump::{generator_dump, parse_dump};
use superw::exec::Mode;
use superw::invariants::{
    d_block, d_prime_by_inversion, higher_e, t_element, ComputedGenerators, Family, GenKey, GeneratorSource, SignVector,
    TCache,
};
use superw::pyramid::Label;
use superw::verify::PsiMap;
use superw::{CompositionShape, Pyramid, Rational, ShiftMatrix, SuperAlgebra, ZeroOneSequence};

fn left_case() -> Pyramid {
    rows(&[(1, '+', 1), (2, '+', 0), (2, '-', 0)])
}

fn small_pyramids() -> Vec<Pyramid> {
    vec![
        p1(),
        c3(),
        left_case(),
        rows(&[(1, '+', 0), (2, '+', 0), (2, '-', 0)]),
        rows(&[(2, '-', 0), (2, '+', 0)]),
        rows(&[(1, '-', 1), (3, '+', 0)]),
    ]
}

/// Sum over box sequences `i_1 j_1 ... i_s j_s`, enumerated directly from the
/// six conditions on the sequence.
fn t_by_paths(p: &Pyramid, alg: &SuperAlgebra, i: usize, j: usize, minus: &[bool], r: usize) -> SuperElement {
    struct Walk<'a> {
        p: &'a Pyramid,
        alg: &'a SuperAlgebra,
        minus: &'a [bool],
        target: usize,
        r: usize,
        out: SuperElement,
    }
    impl Walk<'_> {
        // `prev`: the last `j_t` so far, or `None` before the first step.
        fn step(&mut self, row: usize, prev: Option<usize>, deg: usize, acc: SuperElement) {
            let cells = self.p.cells();
            for (a, ca) in cells.iter().enumerate() {
                if ca.row != row {
                    continue;
                }
                if let Some(pj) = prev {
                    let cj = cells[pj].col;
                    let ok = if self.minus[cells[pj].row - 1] { cj >= ca.col } else { cj < ca.col };
                    if !ok {
                        continue;
                    }
                }
                for (b, cb) in cells.iter().enumerate() {
                    if cb.col < ca.col {
                        continue;
                    }
                    let d = deg + (cb.col - ca.col + 1);
                    if d > self.r {
                        continue;
                    }
                    let mut next = self.alg.mul(&acc, &self.alg.e_tilde(a, b));
                    if ca.odd {
                        next.negate();
                    }
                    if d == self.r {
                        if cb.row == self.target {
                            self.out.add_assign(&next);
                        }
                    } else {
                        if self.minus[cb.row - 1] {
                            next.negate();
                        }
                        self.step(cb.row, Some(b), d, next);
                    }
                }
            }
        }
    }
    if r == 0 {
        let s = if minus[i - 1] { -1 } else { 1 };
        return if i == j { SuperElement::scalar(Rational::from_int(s)) } else { SuperElement::zero() };
    }
    let mut w = Walk { p, alg, minus, target: j, r, out: SuperElement::zero() };
    w.step(i, None, 0, SuperElement::one());
    w.out
}

#[test]
fn t_elements_match_the_path_sum_for_every_sign_vector() {
    for p in small_pyramids() {
        let alg = SuperAlgebra::for_pyramid(&p);
        let h = p.height();
        let rmax = if p.cells().len() <= 3 { 4 } else { 3 };
        for bits in 0..(1u32 << h) {
            let minus: Vec<bool> = (0..h).map(|k| bits >> k & 1 == 1).collect();
            let signs = SignVector::new(minus.clone());
            for i in 1..=h {
                for j in 1..=h {
                    for r in 0..=rmax {
                        let want = t_by_paths(&p, &alg, i, j, &minus, r);
                        let got = t_element(&p, &alg, i, j, &signs, r);
                        check_eq(&alg, &got, &want, &format!("T {i},{j} r={r} signs={minus:?} rows={:?}", p.p_tuple()));
                    }
                }
            }
        }
    }
}

/// `ρ` from the column census, counting `h` over rows.
fn rho_census(p: &Pyramid) -> Vec<i64> {
    let ell = p.ell();
    let mut q = vec![0i64; ell + 1];
    for c in p.cells() {
        q[c.col] += if c.odd { -1 } else { 1 };
    }
    let h = p.rows().iter().map(|r| if r.label == Label::Plus { 1 } else { -1 }).sum::<i64>();
    (1..=ell).map(|r| h - q[r..].iter().sum::<i64>()).collect()
}

fn e_tilde_oracle(p: &Pyramid, alg: &SuperAlgebra, rho: &[i64], i: usize, j: usize) -> SuperElement {
    let (ci, cj) = (p.cell(i), p.cell(j));
    let mut x = alg.e(i, j);
    if i == j {
        let s = if ci.odd { -1 } else { 1 };
        x.add_scalar(&Rational::from_int(s * rho[ci.col - 1]));
    }
    if (cj.col as i64 - ci.col as i64).rem_euclid(2) == 1 {
        x.negate();
    }
    x
}

#[test]
fn e_tilde_bracket_identity() {
    for p in small_pyramids() {
        let alg = SuperAlgebra::for_pyramid(&p);
        let rho = rho_census(&p);
        assert_eq!(rho, p.rho());
        let n = p.cells().len();
        let pa = |x: usize| p.cell(x).odd as i64;
        let shifted = |a: usize, b: usize, at: usize| {
            let mut x = e_tilde_oracle(&p, &alg, &rho, a, b);
            if a == b {
                let s = if p.cell(at).odd { -1 } else { 1 };
                x.add_scalar(&Rational::from_int(-s * rho[p.cell(at).col - 1]));
            }
            x
        };
        for i in 0..n {
            for j in 0..n {
                check_eq(&alg, &alg.e_tilde(i, j), &e_tilde_oracle(&p, &alg, &rho, i, j), "e_tilde");
                for h in 0..n {
                    for k in 0..n {
                        let lhs = alg.supercommutator(&alg.e_tilde(i, j), &alg.e_tilde(h, k));
                        let mut rhs = SuperElement::zero();
                        if h == j {
                            rhs.add_assign(&shifted(i, k, i));
                        }
                        if i == k {
                            let s = if ((pa(i) + pa(j)) * (pa(h) + pa(k))) % 2 == 1 { -1 } else { 1 };
                            rhs.add_scaled(&shifted(h, j, j), &Rational::from_int(-s));
                        }
                        check_eq(&alg, &lhs, &rhs, &format!("[e~{i},{j}, e~{h},{k}]"));
                    }
                }
            }
        }
    }
}

#[test]
fn p1_triple_and_grading() {
    let p = rows(&[(1, '+', 0), (2, '-', 0)]);
    assert_eq!(p, p1());
    let (sigma, ell, ups) = p.to_triple();
    assert_eq!(sigma.rows(), &[vec![0, 1], vec![0, 0]]);
    assert_eq!(ell, 2);
    assert_eq!(ups, ZeroOneSequence::parse("01").unwrap());
    assert_eq!(p.h_diagonal(), vec![1, 1, -1]);
    assert_eq!(p.adjacent_pairs(), vec![(1, 2)]);
    let table: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| p.kazhdan_degree(i, j)).collect()).collect();
    assert_eq!(table, vec![vec![1, 1, 2], vec![1, 1, 2], vec![0, 0, 1]]);
    // h counted over rows gives zero here, so ρ is (1,1) rather than (0,0).
    assert_eq!(p.rho(), vec![1, 1]);
    assert_eq!(p.p_tuple(), vec![1, 2]);
}

#[test]
fn zero_shift_rectangle() {
    let p = triple(1, "01", vec![vec![0, 0], vec![0, 0]]);
    assert!(p.is_rectangle());
    assert_eq!(p.rows()[0].label, Label::Plus);
    assert_eq!(p.rows()[1].label, Label::Minus);
    assert!(p.adjacent_pairs().is_empty());
    assert_eq!(p.h_diagonal(), vec![0, 0]);
    assert_eq!(p.centralizer_basis().len(), 4);
    assert_eq!(triple(3, "0101", vec![vec![0; 4]; 4]).rho(), vec![0, 0, 0]);
}

#[test]
fn six_row_triple_round_trips() {
    let sigma = vec![
        vec![0, 1, 2, 2, 3, 3],
        vec![0, 0, 1, 1, 2, 2],
        vec![1, 1, 0, 0, 1, 1],
        vec![1, 1, 0, 0, 1, 1],
        vec![3, 3, 2, 2, 0, 0],
        vec![4, 4, 3, 3, 1, 0],
    ];
    let p = triple(8, "010110", sigma.clone());
    assert_eq!(p.shift_matrix().rows(), sigma.as_slice());
    let last_col: Vec<usize> = sigma.iter().map(|r| r[5]).collect();
    let rebuilt = ShiftMatrix::from_border(&last_col, &sigma[5]).unwrap();
    assert_eq!(rebuilt.rows(), sigma.as_slice());
    assert_eq!(p.shift_matrix().minimal_shape().parts(), &[1, 1, 2, 1, 1]);
}

/// Brute force over all compositions of `n`.
fn brute_admissible(sigma: &ShiftMatrix) -> Vec<Vec<usize>> {
    let n = sigma.size();
    let mut out = Vec::new();
    for cuts in 0..(1u32 << (n - 1)) {
        let mut parts = Vec::new();
        let mut len = 1;
        for k in 0..n - 1 {
            if cuts >> k & 1 == 1 {
                parts.push(len);
                len = 1;
            } else {
                len += 1;
            }
        }
        parts.push(len);
        let mut start = 1;
        let ok = parts.iter().all(|&q| {
            let r = start..start + q;
            start += q;
            r.clone().all(|i| r.clone().all(|j| sigma.get(i, j) == 0))
        });
        if ok {
            out.push(parts);
        }
    }
    out
}

#[test]
fn minimal_shapes_by_brute_force() {
    let cases = [
        (ShiftMatrix::new(vec![vec![0, 1], vec![0, 0]]).unwrap(), vec![1, 1]),
        (ShiftMatrix::zero(4), vec![4]),
        (p1().shift_matrix(), vec![1, 1]),
        (c3().shift_matrix(), vec![1, 1, 1]),
    ];
    for (sigma, want) in cases {
        let all = brute_admissible(&sigma);
        let min = all.iter().min_by_key(|s| s.len()).unwrap();
        assert_eq!(min, &want);
        assert_eq!(sigma.minimal_shape().parts(), want.as_slice());
        let mut got: Vec<Vec<usize>> = sigma.admissible_shapes().iter().map(|s| s.parts().to_vec()).collect();
        let mut all = all;
        got.sort();
        all.sort();
        assert_eq!(got, all);
    }
}

/// Coordinates of a linear element in the `e_{i,j}` basis.
fn linear_coords(alg: &SuperAlgebra, x: &SuperElement) -> Vec<(usize, BigRational)> {
    x.iter()
        .map(|(m, c)| {
            assert_eq!(m.len(), 1, "not linear: {}", alg.format(x));
            (m[0] as usize, c.to_big())
        })
        .collect()
}

fn e_pi(p: &Pyramid, alg: &SuperAlgebra) -> SuperElement {
    let mut e = SuperElement::zero();
    for (i, j) in p.adjacent_pairs() {
        e.add_assign(&alg.e(i, j));
    }
    e
}

fn centralizer_dimension_by_kernel(p: &Pyramid) -> usize {
    let alg = SuperAlgebra::for_pyramid(p);
    let e = e_pi(p, &alg);
    let n = p.cells().len();
    let images: Vec<_> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| linear_coords(&alg, &alg.supercommutator(&e, &alg.e(i, j))))
        .collect();
    n * n - exact_rank(images, alg.num_gens())
}

#[test]
fn centralizer_of_p1() {
    let p = p1();
    let mut got: Vec<(usize, usize, usize, Vec<(usize, usize)>)> =
        p.centralizer_basis().into_iter().map(|c| (c.i, c.j, c.r, c.terms)).collect();
    got.sort();
    // Boxes: 0 = 1, 1 = ~1, 2 = ~2.
    let want = vec![
        (1, 1, 1, vec![(0, 0)]),
        (1, 2, 2, vec![(0, 2)]),
        (2, 1, 1, vec![(1, 0)]),
        (2, 2, 1, vec![(1, 1), (2, 2)]),
        (2, 2, 2, vec![(1, 2)]),
    ];
    assert_eq!(got, want);
    assert_eq!(centralizer_dimension_by_kernel(&p), 5);
}

#[test]
fn centralizer_commutes_and_has_full_rank() {
    let mut ps = small_pyramids();
    ps.push(rows(&[(2, '-', 1), (3, '+', 1), (4, '+', 1), (5, '-', 0)]));
    ps.push(rows(&[(2, '-', 1), (2, '+', 1), (3, '+', 1), (4, '-', 0)]));
    for p in ps {
        let alg = SuperAlgebra::for_pyramid(&p);
        let e = e_pi(&p, &alg);
        let basis = p.centralizer_basis();
        let mut coords = Vec::new();
        for c in &basis {
            let mut x = SuperElement::zero();
            for &(i, j) in &c.terms {
                x.add_assign(&alg.e(i, j));
            }
            assert!(alg.supercommutator(&e, &x).is_zero(), "c_{},{}^({}) does not commute", c.i, c.j, c.r);
            coords.push(linear_coords(&alg, &x));
        }
        assert_eq!(exact_rank(coords, alg.num_gens()), basis.len());
        assert_eq!(basis.len(), centralizer_dimension_by_kernel(&p));
        let sigma = p.shift_matrix();
        let pt = p.p_tuple();
        let h = p.height();
        let card: usize = (1..=h).flat_map(|i| (1..=h).map(move |j| (i, j))).map(|(i, j)| pt[i.min(j) - 1]).sum();
        assert_eq!(basis.len(), card);
        for c in &basis {
            let s = sigma.get(c.i, c.j);
            assert!(s < c.r && c.r <= s + pt[c.i.min(c.j) - 1]);
        }
    }
}

#[test]
fn grading_is_even_and_good() {
    for p in small_pyramids() {
        let alg = SuperAlgebra::for_pyramid(&p);
        let e = e_pi(&p, &alg);
        let hd = p.h_diagonal();
        let mut h = SuperElement::zero();
        for (i, &v) in hd.iter().enumerate() {
            h.add_scaled(&alg.e(i, i), &Rational::from_int(v));
        }
        check_eq(&alg, &alg.supercommutator(&h, &e), &e.scaled(&Rational::from_int(2)), "[h,e] = 2e");
        for i in 0..hd.len() {
            assert_eq!(p.col_x(i), 2 * p.cell(i).col as i64 - (p.ell() as i64 + 1));
            for j in 0..hd.len() {
                let ev = hd[i] - hd[j];
                assert_eq!(ev, p.col_x(j) - p.col_x(i));
                assert_eq!(ev % 2, 0);
                check_eq(&alg, &alg.supercommutator(&h, &alg.e(i, j)), &alg.e(i, j).scaled(&Rational::from_int(ev)), "ad h");
            }
        }
    }
}

#[test]
fn character_and_projection_on_p1() {
    let p = p1();
    let alg = SuperAlgebra::for_pyramid(&p);
    // ẽ_{~2,~1} sits on a row, one column to the left.
    assert_eq!(alg.chi(&alg.e_tilde(2, 1)).unwrap(), Rational::ONE);
    assert_eq!(alg.chi(&alg.e_tilde(2, 0)).unwrap(), Rational::ZERO);
    assert!(alg.chi(&alg.e(0, 0)).is_err());
    let x = alg.mul(&alg.e(2, 0), &alg.e(0, 0));
    assert!(alg.pr_chi(&x).is_zero());
    // pr_χ([ẽ_{~2,~1}, ẽ_{~1,~2}]) = e_{~2,~2} - e_{~1,~1}
    let got = alg.twisted_action(&alg.e_tilde(2, 1), &alg.e_tilde(1, 2)).unwrap();
    let mut want = alg.e(2, 2);
    want.sub_assign(&alg.e(1, 1));
    check_eq(&alg, &got, &want, "twisted action");
}

#[test]
fn character_vanishes_on_brackets_in_m() {
    for p in small_pyramids() {
        let alg = SuperAlgebra::for_pyramid(&p);
        let n = p.cells().len();
        let m: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p.cell(i).col > p.cell(j).col)
            .collect();
        for &(a, b) in &m {
            let chi = alg.chi(&alg.e(a, b)).unwrap();
            let (ca, cb) = (p.cell(a), p.cell(b));
            let want = if ca.row == cb.row && ca.col == cb.col + 1 { Rational::sign(ca.odd) } else { Rational::ZERO };
            assert_eq!(chi, want);
            for &(c, d) in &m {
                let br = alg.supercommutator(&alg.e(a, b), &alg.e(c, d));
                assert_eq!(alg.chi(&br).unwrap(), Rational::ZERO);
            }
        }
    }
}

#[test]
fn rank_small_cases() {
    use rustc_hash::FxHashMap;
    use superw::linalg::rank;
    assert_eq!(rank(&[FxHashMap::default()]), 0);
    let x: FxHashMap<usize, Rational> = [(0, Rational::from_int(1)), (3, Rational::new(1, 2))].into_iter().collect();
    let y: FxHashMap<usize, Rational> = x.iter().map(|(&k, v)| (k, v * &Rational::from_int(2))).collect();
    assert_eq!(rank(&[x, y]), 1);
}

#[test]
fn p1_generators() {
    let p = p1();
    let src = ComputedGenerators::minimal(&p).unwrap();
    let alg = src.algebra();
    let g = |f, a, i, j, r| alg.format(&src.generator(&GenKey::new(f, a, i, j, r)));
    assert_eq!(g(Family::D, 1, 1, 1, 1), "1 + 1 * e(1,1)");
    assert_eq!(g(Family::D, 2, 1, 1, 1), "2 - 1 * e(~1,~1) - 1 * e(~2,~2)");
    // By hand: three paths; the two lone e(1,~1) terms cancel through ρ_2 = 1.
    assert_eq!(g(Family::E, 1, 1, 1, 2), "-1 * e(1,~2) - 1 * e(1,1)*e(1,~1) - 1 * e(1,~1)*e(~2,~2)");
    assert_eq!(g(Family::F, 1, 1, 1, 1), "-1 * e(~1,1)");
}

#[test]
fn ones_shape_generators_are_t_elements() {
    let p = c3();
    let src = ComputedGenerators::new(&p, CompositionShape::ones(3)).unwrap();
    let cache = TCache::new(p.clone(), SuperAlgebra::for_pyramid(&p));
    let alg = cache.algebra();
    for r in 1..=3 {
        for a in 1..=3 {
            let d = src.generator(&GenKey::new(Family::D, a, 1, 1, r));
            check_eq(alg, &d, &cache.get(a, a, a - 1, r), "D");
            let mut dp = cache.get(a, a, a, r);
            dp.negate();
            check_eq(alg, &src.generator(&GenKey::new(Family::DPrime, a, 1, 1, r)), &dp, "D'");
        }
        for b in 1..3 {
            let s = p.shift_matrix();
            if r > s.get(b, b + 1) {
                check_eq(alg, &src.generator(&GenKey::new(Family::E, b, 1, 1, r)), &cache.get(b, b + 1, b, r), "E");
            }
            if r > s.get(b + 1, b) {
                check_eq(alg, &src.generator(&GenKey::new(Family::F, b, 1, 1, r)), &cache.get(b + 1, b, b, r), "F");
            }
        }
    }
}

#[test]
fn inverse_block_matches_closed_form() {
    let p = triple(2, "0011", vec![vec![0; 4]; 4]);
    let src = ComputedGenerators::new(&p, CompositionShape::new(vec![2, 2], 4).unwrap()).unwrap();
    let alg = src.algebra();
    for a in 1..=2 {
        let inv = d_prime_by_inversion(&src, a, 3).unwrap();
        let closed = d_block(&src, a, 3, true);
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..=3 {
                    check_eq(alg, inv[i][j].coeff(r), closed[i][j].coeff(r), &format!("D'_{a};{i},{j} r={r}"));
                }
            }
        }
    }
}

#[test]
fn adjacent_higher_root_is_e() {
    let p = c3();
    let src = ComputedGenerators::new(&p, CompositionShape::ones(3)).unwrap();
    for r in 2..=3 {
        let e = src.generator(&GenKey::new(Family::E, 1, 1, 1, r));
        assert!(higher_e(&src, 1, 2, 1, 1, r, 1).unwrap() == *e);
    }
}

#[test]
fn psi_kills_columns_past_the_cut() {
    let p = p1();
    let alg = SuperAlgebra::for_pyramid(&p);
    let psi = PsiMap::new(&p).unwrap();
    assert!(psi.apply(&alg.e(1, 2)).is_zero());
    assert!(!psi.apply(&alg.e(1, 1)).is_zero());
}

#[test]
fn generator_dump_round_trips() {
    for p in [p1(), c3(), left_case()] {
        let src = ComputedGenerators::minimal(&p).unwrap();
        let dump = generator_dump(&src, 3, Mode::Sequential);
        let text = serde_json::to_string(&dump).unwrap();
        let back = parse_dump(&src, &text).unwrap();
        assert_eq!(back.len(), dump.len());
        for e in &dump {
            assert!(back[&e.key()] == *src.generator(&e.key()), "{}", e.key().label());
        }
    }
}
