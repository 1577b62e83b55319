mod common;

use common::{c3, check_eq, exact_rank, p1, rows, triple};
use num_rational::BigRational;
use proptest::prelude::*;
use rustc_hash::FxHashMap;
use superw::algebra::{GenId, SuperElement};
use superw::exec::Mode;
use superw::invariants::{t_element, ComputedGenerators, SignVector};
use superw::linalg::rank;
use superw::pyramid::{Label, Row};
use superw::verify;
use superw::{Pyramid, Rational, ShiftMatrix, SuperAlgebra};

fn algebras() -> Vec<(Pyramid, SuperAlgebra)> {
    // gl(1|2) graded by P1, gl(2|2) with no grading, gl(1|2) graded by C3's rows.
    [p1(), triple(1, "0011", vec![vec![0; 4]; 4]), c3()]
        .into_iter()
        .map(|p| {
            let a = SuperAlgebra::for_pyramid(&p);
            (p, a)
        })
        .collect()
}

fn word(alg: &SuperAlgebra, raw: &[u16]) -> Vec<GenId> {
    raw.iter().map(|&g| g % alg.num_gens() as u16).collect()
}

fn nf(alg: &SuperAlgebra, w: &[GenId]) -> SuperElement {
    alg.normal_form(w, &Rational::ONE).unwrap()
}

/// Nested rows, built from the bottom up.
fn pyramid_strategy() -> impl Strategy<Value = Pyramid> {
    (1usize..=4, prop::collection::vec((any::<bool>(), 0usize..8, 0usize..8), 1..=4)).prop_map(|(ell, spec)| {
        let mut out = Vec::new();
        let (mut lo, mut len) = (0, ell);
        for (k, &(odd, a, b)) in spec.iter().enumerate() {
            if k > 0 {
                let nl = 1 + b % len;
                lo += a % (len - nl + 1);
                len = nl;
            }
            out.push(Row { length: len, label: if odd { Label::Minus } else { Label::Plus }, offset: lo });
        }
        out.reverse();
        Pyramid::from_rows(out).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_confluent(which in 0usize..3, raw in prop::collection::vec(any::<u16>(), 0..=5), cut in 0usize..=5) {
        let (_, alg) = &algebras()[which];
        let w = word(alg, &raw);
        let k = cut.min(w.len());
        let whole = nf(alg, &w);
        let split = alg.mul(&nf(alg, &w[..k]), &nf(alg, &w[k..]));
        prop_assert!(whole == split, "{} vs {}", alg.format(&whole), alg.format(&split));
        // Normal forms are fixed points.
        for (m, c) in whole.iter() {
            prop_assert!(alg.normal_form(m, c).unwrap() == SuperElement::monomial(m.clone(), c.clone()));
        }
    }

    #[test]
    fn super_jacobi(which in 0usize..3, a in prop::collection::vec(any::<u16>(), 1..=2), b in prop::collection::vec(any::<u16>(), 1..=2), c in prop::collection::vec(any::<u16>(), 1..=2)) {
        let (_, alg) = &algebras()[which];
        let (x, y, z) = (nf(alg, &word(alg, &a)), nf(alg, &word(alg, &b)), nf(alg, &word(alg, &c)));
        let par = |w: &[u16]| alg.monomial_odd(&word(alg, w));
        let (px, py, pz) = (par(&a), par(&b), par(&c));
        let s = |u: bool, v: bool| Rational::sign(u && v);
        let br = |u: &SuperElement, v: &SuperElement| alg.supercommutator(u, v);
        let mut total = SuperElement::zero();
        total.add_scaled(&br(&x, &br(&y, &z)), &s(px, pz));
        total.add_scaled(&br(&y, &br(&z, &x)), &s(py, px));
        total.add_scaled(&br(&z, &br(&x, &y)), &s(pz, py));
        prop_assert!(total.is_zero(), "{}", alg.format(&total));
    }

    #[test]
    fn kazhdan_degree_is_additive_on_leading_terms(which in 0usize..3, raw in prop::collection::vec(any::<u16>(), 1..=4), raw2 in prop::collection::vec(any::<u16>(), 1..=3)) {
        let (_, alg) = &algebras()[which];
        let (w, v) = (word(alg, &raw), word(alg, &raw2));
        let x = nf(alg, &w);
        if let Some(d) = alg.degree(&x) {
            prop_assert!(d <= alg.monomial_degree(&w));
        }
        let y = nf(alg, &v);
        if let (Some(dx), Some(dy), Some(dxy)) = (alg.degree(&x), alg.degree(&y), alg.degree(&alg.mul(&x, &y))) {
            prop_assert!(dxy <= dx + dy);
        }
    }

    #[test]
    fn chi_kernel_is_a_left_ideal(which in 0usize..3, raw in prop::collection::vec(any::<u16>(), 0..=3), pick in any::<u16>()) {
        let (p, alg) = &algebras()[which];
        let n = p.cells().len();
        let m: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| p.cell(i).col > p.cell(j).col).collect();
        prop_assume!(!m.is_empty());
        let (i, j) = m[pick as usize % m.len()];
        let mut a = alg.e(i, j);
        a.add_scalar(&-alg.chi(&a).unwrap());
        let x = nf(alg, &word(alg, &raw));
        prop_assert!(alg.pr_chi(&alg.mul(&x, &a)).is_zero());
    }

    #[test]
    fn t_elements_are_filtered_and_homogeneous(p in pyramid_strategy(), i in 1usize..=4, j in 1usize..=4, bits in any::<u8>(), r in 0usize..=3) {
        let h = p.height();
        let (i, j) = ((i - 1) % h + 1, (j - 1) % h + 1);
        let alg = SuperAlgebra::for_pyramid(&p);
        let signs = SignVector::new((0..h).map(|k| bits >> k & 1 == 1).collect());
        let t = t_element(&p, &alg, i, j, &signs, r);
        if let Some(d) = alg.degree(&t) {
            prop_assert!(d <= r as i64);
        }
        if !t.is_zero() {
            prop_assert_eq!(alg.parity(&t), Some(p.row_parity(i) != p.row_parity(j)));
        }
    }

    #[test]
    fn pyramid_triple_round_trip(p in pyramid_strategy()) {
        let (sigma, ell, ups) = p.to_triple();
        let back = Pyramid::from_triple(&sigma, ell, &ups).unwrap();
        prop_assert_eq!(&back, &p);
        let n = sigma.size();
        let last_col: Vec<usize> = (1..=n).map(|i| sigma.get(i, n)).collect();
        let last_row: Vec<usize> = (1..=n).map(|i| sigma.get(n, i)).collect();
        prop_assert_eq!(ShiftMatrix::from_border(&last_col, &last_row).unwrap(), sigma.clone());
        let pt = p.p_tuple();
        prop_assert_eq!(pt[n - 1], ell);
        prop_assert!(pt.iter().all(|&x| x > 0));
        // s_{i,j} + s_{j,k} = s_{i,k} along monotone index paths.
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if (i <= j && j <= k) || (i >= j && j >= k) {
                        prop_assert_eq!(sigma.get(i, j) + sigma.get(j, k), sigma.get(i, k));
                    }
                }
            }
        }
    }

    #[test]
    fn minimal_shape_is_the_shortest_admissible(p in pyramid_strategy()) {
        let sigma = p.shift_matrix();
        let n = sigma.size();
        let mut best: Option<Vec<usize>> = None;
        let mut count = 0;
        for cuts in 0..(1u32 << (n - 1)) {
            let mut parts = vec![1usize];
            for k in 0..n - 1 {
                if cuts >> k & 1 == 1 { parts.push(1) } else { *parts.last_mut().unwrap() += 1 }
            }
            let mut start = 1;
            let ok = parts.iter().all(|&q| {
                let r = start..start + q;
                start += q;
                r.clone().all(|i| r.clone().all(|j| sigma.get(i, j) == 0))
            });
            if ok {
                count += 1;
                if best.as_ref().map_or(true, |b| parts.len() < b.len()) {
                    best = Some(parts);
                }
            }
        }
        prop_assert_eq!(sigma.minimal_shape().parts().to_vec(), best.unwrap());
        prop_assert_eq!(sigma.admissible_shapes().len(), count);
    }

    #[test]
    fn centralizer_is_independent_and_commutes(p in pyramid_strategy()) {
        let alg = SuperAlgebra::for_pyramid(&p);
        let mut e = SuperElement::zero();
        for (i, j) in p.adjacent_pairs() {
            e.add_assign(&alg.e(i, j));
        }
        let basis = p.centralizer_basis();
        let mut coords = Vec::new();
        for c in &basis {
            let mut x = SuperElement::zero();
            for &(i, j) in &c.terms {
                x.add_assign(&alg.e(i, j));
            }
            prop_assert!(alg.supercommutator(&e, &x).is_zero());
            coords.push(x.iter().map(|(m, c)| (m[0] as usize, c.to_big())).collect());
        }
        prop_assert_eq!(exact_rank(coords, alg.num_gens()), basis.len());
    }

    #[test]
    fn sparse_rank_matches_exact_rank(
        rows_in in prop::collection::vec(prop::collection::vec((0usize..6, -3i64..=3, prop::bool::ANY), 0..5), 0..7),
    ) {
        // Entries are small or near 2^62 to exercise both arithmetic paths.
        let big = 1i64 << 61;
        let rows_q: Vec<FxHashMap<usize, Rational>> = rows_in
            .iter()
            .map(|r| {
                let mut m: FxHashMap<usize, Rational> = FxHashMap::default();
                for &(k, v, huge) in r {
                    let x = if huge { Rational::from_int(v * big) } else { Rational::new(v, 1 + k as i64) };
                    let e = m.entry(k).or_default();
                    *e += &x;
                }
                m.retain(|_, v| !v.is_zero());
                m
            })
            .collect();
        let rows_b: Vec<Vec<(usize, BigRational)>> = rows_q.iter().map(|m| m.iter().map(|(&k, v)| (k, v.to_big())).collect()).collect();
        prop_assert_eq!(rank(&rows_q), exact_rank(rows_b, 6));
    }

    #[test]
    fn rational_arithmetic_matches_bigrational(a in any::<i64>(), b in 1i64..=i64::MAX, c in any::<i64>(), d in 1i64..=i64::MAX) {
        let (x, y) = (Rational::new(a, b), Rational::new(c, d));
        let (bx, by) = (BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()));
        prop_assert_eq!(x.to_big(), bx.clone());
        prop_assert_eq!((&x + &y).to_big(), &bx + &by);
        prop_assert_eq!((&x - &y).to_big(), &bx - &by);
        prop_assert_eq!((&x * &y).to_big(), &bx * &by);
        if c != 0 {
            prop_assert_eq!((&x / &y).to_big(), &bx / &by);
        }
        prop_assert_eq!(x == y, bx == by);
        prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        prop_assert_eq!(Rational::from(bx.clone() + by.clone()), &x + &y);
    }
}

#[test]
fn modes_give_identical_reports() {
    for p in [p1(), c3(), rows(&[(1, '+', 0), (2, '-', 0), (3, '+', 0)])] {
        let src = ComputedGenerators::minimal(&p).unwrap();
        let ones = ComputedGenerators::new(&p, superw::CompositionShape::ones(p.height())).unwrap();
        let run = |mode: Mode| {
            let mut v: Vec<_> = verify::verify_p_family(&src, 4, mode).iter().map(|c| c.to_json()).collect();
            v.extend(verify::verify_d_family(&ones, 4, mode).iter().map(|c| c.to_json()));
            v.extend(verify::verify_m_invariance(&src, 3, mode).iter().map(|c| c.to_json()));
            v
        };
        assert_eq!(run(Mode::Parallel), run(Mode::Sequential));
    }
}

#[test]
fn scaled_words_normalise_linearly() {
    for (_, alg) in algebras() {
        let w: Vec<GenId> = (0..alg.num_gens().min(4) as GenId).rev().collect();
        let two = Rational::from_int(2);
        let x = alg.normal_form(&w, &two).unwrap();
        check_eq(&alg, &x, &nf(&alg, &w).scaled(&two), "2·w");
    }
}
