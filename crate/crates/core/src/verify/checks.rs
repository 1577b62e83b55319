//! Invariance, dimension, series and consistency checks on the generators.

use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};

use super::relations::{enumerate, run_instances, verify_d_family, verify_p_family, RelId};
use super::{int_params, key_params, CheckResult, VerificationReport, VerifyError};
use crate::algebra::{Monomial, SuperAlgebra, SuperElement};
use crate::exec::Mode;
use crate::invariants::{
    higher_e, higher_f, ComputedGenerators, Family, GenKey, GeneratorError, GeneratorSource, ReindexedGenerators,
    TCache,
};
use crate::linalg::{rank_keyed, EchelonModP, PRIME};
use crate::pyramid::{CompositionShape, Pyramid};
use crate::rational::Rational;

/// `pr_χ([a, w]) = 0` for every `m` basis vector `a` and every generator `w`
/// with superscript at most `r_bound`. One entry per generator.
pub fn verify_m_invariance(src: &dyn GeneratorSource, r_bound: usize, mode: Mode) -> Vec<CheckResult> {
    let alg = src.algebra();
    let keys = src.data().all_keys(r_bound);
    src.prefetch(&keys, mode);
    let m: Vec<SuperElement> = (0..alg.num_gens())
        .filter(|&g| !alg.gen(g as u16).in_p)
        .map(|g| SuperElement::monomial(Monomial::from_slice(&[g as u16]), Rational::ONE))
        .collect();
    mode.map(&keys, |k| {
        let w = src.generator(k);
        let mut params = key_params(k);
        params.push(("m_dim".into(), json!(m.len())));
        for a in &m {
            let res = alg.twisted_action(a, &w).expect("m basis vector");
            if !res.is_zero() {
                params.push(("m".into(), json!(alg.format(a))));
                return CheckResult::new("invariance", params).with_residual(alg, &res);
            }
        }
        CheckResult::new("invariance", params)
    })
}

/// One letter of the PBW alphabet: a generator or higher root of fixed degree.
#[derive(Clone, Debug)]
pub struct PbwLetter {
    pub name: String,
    pub degree: usize,
    pub odd: bool,
    pub value: Arc<SuperElement>,
}

/// `D_{a;i,j}^{(r)}` for `0 < r <= p_a`, and `E_{a,b}`, `F_{b,a}` for
/// `s < r <= s + p_a`, with `p_a` the length of the last row of block `a`.
pub fn pbw_alphabet(src: &dyn GeneratorSource, row_lengths: &[usize]) -> Result<Vec<PbwLetter>, GeneratorError> {
    let d = src.data();
    let z = d.z();
    let pa = |a: usize| row_lengths[d.shape.prefix(a) - 1];
    let mut out = Vec::new();
    for a in 1..=z {
        for i in 1..=d.part(a) {
            for j in 1..=d.part(a) {
                for r in 1..=pa(a) {
                    let k = GenKey::new(Family::D, a, i, j, r);
                    out.push(PbwLetter {
                        name: k.label(),
                        degree: r,
                        odd: d.key_parity(&k),
                        value: src.generator(&k),
                    });
                }
            }
        }
    }
    for a in 1..z {
        for b in a + 1..=z {
            for (e, s) in [(true, d.s(a, b)), (false, d.s(b, a))] {
                let (rows, cols) = if e { (d.part(a), d.part(b)) } else { (d.part(b), d.part(a)) };
                for i in 1..=rows {
                    for j in 1..=cols {
                        for r in s + 1..=s + pa(a) {
                            let (value, name, odd) = if e {
                                (higher_e(src, a, b, i, j, r, 1)?, format!("E_{{{a},{b};{i},{j}}}^{{({r})}}"), d.parity(a, i) != d.parity(b, j))
                            } else {
                                (higher_f(src, b, a, i, j, r, 1)?, format!("F_{{{b},{a};{i},{j}}}^{{({r})}}"), d.parity(b, i) != d.parity(a, j))
                            };
                            out.push(PbwLetter { name, degree: r, odd, value: Arc::new(value) });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Ordered supermonomials of total degree `<= dmax`, with their products in `U(p)`.
/// Odd letters appear at most once.
pub(crate) fn supermonomials(
    alg: &SuperAlgebra,
    letters: &[PbwLetter],
    dmax: usize,
    mode: Mode,
) -> Vec<(usize, Vec<usize>, SuperElement)> {
    fn grow(
        alg: &SuperAlgebra,
        letters: &[PbwLetter],
        dmax: usize,
        word: &mut Vec<usize>,
        deg: usize,
        value: &SuperElement,
        out: &mut Vec<(usize, Vec<usize>, SuperElement)>,
    ) {
        out.push((deg, word.clone(), value.clone()));
        let from = word.last().map_or(0, |&l| if letters[l].odd { l + 1 } else { l });
        for n in from..letters.len() {
            let d = deg + letters[n].degree;
            if d > dmax {
                continue;
            }
            word.push(n);
            let next = alg.mul(value, &letters[n].value);
            grow(alg, letters, dmax, word, d, &next, out);
            word.pop();
        }
    }
    let starts: Vec<usize> = (0..letters.len()).filter(|&n| letters[n].degree <= dmax).collect();
    let mut out = vec![(0, Vec::new(), SuperElement::one())];
    for part in mode.map(&starts, |&n| {
        let mut acc = Vec::new();
        let mut word = vec![n];
        let value = (*letters[n].value).clone();
        // Restrict the first letter to `n` by growing from it directly.
        grow(alg, letters, dmax, &mut word, letters[n].degree, &value, &mut acc);
        acc
    }) {
        out.extend(part);
    }
    out
}

/// Cumulative dimensions `dim F_d` for `d = 0..=dmax` of a free
/// supercommutative algebra on generators of the given degrees and parities.
pub fn filtered_dims(gens: impl IntoIterator<Item = (usize, bool)>, dmax: usize) -> Vec<u64> {
    let mut c = vec![0u64; dmax + 1];
    c[0] = 1;
    for (r, odd) in gens {
        if r == 0 || r > dmax {
            continue;
        }
        if odd {
            for k in (r..=dmax).rev() {
                c[k] += c[k - r];
            }
        } else {
            for k in r..=dmax {
                c[k] += c[k - r];
            }
        }
    }
    let mut acc = 0;
    c.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// Ranks of rows grouped by degree: entry `d` is the rank of all rows of degree `<= d`.
pub(crate) fn ranks_by_degree<K: std::hash::Hash + Eq + Clone>(rows: &[(usize, Vec<(K, Rational)>)], dmax: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&n| rows[n].0);
    let mut cols: rustc_hash::FxHashMap<K, usize> = rustc_hash::FxHashMap::default();
    let mut ech = EchelonModP::new();
    let mut modular_ok = true;
    let mut out = Vec::with_capacity(dmax + 1);
    let mut pos = 0;
    for d in 0..=dmax {
        while pos < order.len() && rows[order[pos]].0 <= d {
            let mut sparse = Vec::new();
            for (k, v) in &rows[order[pos]].1 {
                let n = cols.len();
                let c = *cols.entry(k.clone()).or_insert(n);
                match v.mod_prime(PRIME) {
                    Some(x) => sparse.push((c, x)),
                    None => modular_ok = false,
                }
            }
            ech.insert(&sparse);
            pos += 1;
        }
        // A modular rank is a lower bound; exact elimination settles any deficit.
        if modular_ok && ech.rank() == pos {
            out.push(pos);
        } else {
            let subset: Vec<Vec<(K, Rational)>> = order[..pos].iter().map(|&n| rows[n].1.clone()).collect();
            out.push(rank_keyed(&subset));
        }
    }
    out
}

fn element_row(x: &SuperElement) -> Vec<(Monomial, Rational)> {
    x.iter().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// For each `d <= dmax`: the rank of the PBW supermonomials of degree `<= d`
/// against `dim F_d S(g^e)` from the centralizer basis.
pub fn pbw_rank_table(
    src: &dyn GeneratorSource,
    p: &Pyramid,
    dmax: usize,
    mode: Mode,
) -> Result<Vec<CheckResult>, GeneratorError> {
    let letters = pbw_alphabet(src, &p.p_tuple())?;
    let expected = filtered_dims(p.centralizer_basis().iter().map(|c| (c.r, c.odd)), dmax);
    let alphabet = filtered_dims(letters.iter().map(|l| (l.degree, l.odd)), dmax);
    let monos = supermonomials(src.algebra(), &letters, dmax, mode);
    let rows: Vec<(usize, Vec<(Monomial, Rational)>)> = monos.iter().map(|(d, _, x)| (*d, element_row(x))).collect();
    let ranks = ranks_by_degree(&rows, dmax);
    Ok((0..=dmax)
        .map(|d| {
            let count = monos.iter().filter(|m| m.0 <= d).count();
            let params = vec![
                ("d".into(), json!(d)),
                ("rank".into(), json!(ranks[d])),
                ("monomials".into(), json!(count)),
                ("expected".into(), json!(expected[d])),
            ];
            let ok = ranks[d] as u64 == expected[d] && count as u64 == expected[d] && alphabet[d] == expected[d];
            CheckResult::new("pbw_rank", params).with_outcome(
                ok,
                format!("rank {} from {} monomials, dim F_d S(g^e) = {}", ranks[d], count, expected[d]),
            )
        })
        .collect())
}

/// `pbw_rank_table` for a pyramid and shape (minimal when `None`).
pub fn pbw_rank_check(
    p: &Pyramid,
    shape: Option<CompositionShape>,
    dmax: usize,
    mode: Mode,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let shape = shape.unwrap_or_else(|| p.shift_matrix().minimal_shape());
    let src = ComputedGenerators::new(p, shape)?;
    let mut rep = VerificationReport::new(p, dmax);
    rep.checks = pbw_rank_table(&src, p, dmax, mode)?;
    rep.timing.push(("pbw".into(), start.elapsed()));
    Ok(rep)
}

fn series_diff(a: &[SuperElement], b: &[SuperElement]) -> Option<(usize, SuperElement)> {
    for (r, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            let mut d = x.clone();
            d.sub_assign(y);
            return Some((r, d));
        }
    }
    None
}

/// `Σ_k A_k(u) B_k(u)` truncated at `order`.
fn conv_sum(alg: &SuperAlgebra, pairs: &[(Vec<SuperElement>, Vec<SuperElement>)], order: usize) -> Vec<SuperElement> {
    let mut out = vec![SuperElement::zero(); order + 1];
    for (a, b) in pairs {
        for r in 0..=order {
            for t in 0..=r {
                if !a[t].is_zero() && !b[r - t].is_zero() {
                    alg.mul_into(&a[t], &b[r - t], &Rational::ONE, &mut out[r]);
                }
            }
        }
    }
    out
}

/// The four series identities among the `T_{i,j;x}(u)` for every `x < y`,
/// compared coefficientwise up to `order`.
pub fn t_series_check(cache: &TCache, order: usize, mode: Mode) -> Vec<CheckResult> {
    let n = cache.pyramid().height();
    let alg = cache.algebra();
    let mut wants = Vec::new();
    for i in 1..=n {
        for x in 0..=n {
            wants.push((i, x, order));
        }
    }
    cache.warm(&wants, mode);
    let t = |i: usize, j: usize, x: usize| -> Vec<SuperElement> { (0..=order).map(|r| cache.get(i, j, x, r)).collect() };
    let mut tasks = Vec::new();
    for x in 0..=n {
        for y in x + 1..=n {
            for i in 1..=n {
                for j in 1..=n {
                    let cases = [
                        x < i && i <= y && y < j,
                        x < j && j <= y && y < i,
                        y < i && y < j,
                        x < i && i <= y && x < j && j <= y,
                    ];
                    for (c, &on) in cases.iter().enumerate() {
                        if on {
                            tasks.push((c + 1, x, y, i, j));
                        }
                    }
                }
            }
        }
    }
    mode.map(&tasks, |&(case, x, y, i, j)| {
        let ks = x + 1..=y;
        let (lhs, rhs) = match case {
            1 => (t(i, j, x), conv_sum(alg, &ks.map(|k| (t(i, k, x), t(k, j, y))).collect::<Vec<_>>(), order)),
            2 => (t(i, j, x), conv_sum(alg, &ks.map(|k| (t(i, k, y), t(k, j, x))).collect::<Vec<_>>(), order)),
            3 => {
                let mut pairs = Vec::new();
                for k in ks.clone() {
                    let tik = t(i, k, y);
                    // Σ_l T_{k,l;x} T_{l,j;y} first, then T_{i,k;y} times that.
                    let inner = conv_sum(alg, &ks.clone().map(|l| (t(k, l, x), t(l, j, y))).collect::<Vec<_>>(), order);
                    pairs.push((tik, inner));
                }
                let mut rhs = conv_sum(alg, &pairs, order);
                for (acc, v) in rhs.iter_mut().zip(t(i, j, y)) {
                    acc.add_assign(&v);
                }
                (t(i, j, x), rhs)
            }
            _ => {
                let lhs = conv_sum(alg, &ks.map(|k| (t(i, k, x), t(k, j, y))).collect::<Vec<_>>(), order);
                let mut rhs = vec![SuperElement::zero(); order + 1];
                if i == j {
                    rhs[0] = SuperElement::scalar(Rational::from_int(-1));
                }
                (lhs, rhs)
            }
        };
        let params = int_params(&[("case", case), ("x", x), ("y", y), ("i", i), ("j", j), ("order", order)]);
        match series_diff(&lhs, &rhs) {
            None => CheckResult::new("tseries", params),
            Some((r, d)) => {
                let mut params = params;
                params.push(("r".into(), json!(r)));
                CheckResult::new("tseries", params).with_residual(alg, &d)
            }
        }
    })
}

/// Coefficients `0..=order` of `E_{a,b;i,j}(u)` (`e == true`) or `F_{a,b;i,j}(u)`,
/// zero at and below the shift.
fn root_series(src: &dyn GeneratorSource, e: bool, a: usize, b: usize, i: usize, j: usize, order: usize) -> Vec<SuperElement> {
    let d = src.data();
    let s = d.s(a, b);
    (0..=order)
        .map(|r| {
            if r <= s {
                SuperElement::zero()
            } else if e {
                higher_e(src, a, b, i, j, r, 1).expect("indices in range")
            } else {
                higher_f(src, a, b, i, j, r, 1).expect("indices in range")
            }
        })
        .collect()
}

/// Splitting block `p` of `mu` as `x + (mu_p - x)`: each `E_{a,b}(u)` and
/// `F_{b,a}(u)` of the coarse shape against the refined shape's series.
pub fn shape_refinement_check(
    pyr: &Pyramid,
    mu: &CompositionShape,
    p: usize,
    x: usize,
    order: usize,
    mode: Mode,
) -> Result<Vec<CheckResult>, VerifyError> {
    if p == 0 || p > mu.len() || x == 0 || x >= mu.part(p) {
        return Err(VerifyError::Unsupported(format!("cannot split block {p} of {mu} at {x}")));
    }
    let y = mu.part(p) - x;
    let mut parts = mu.parts().to_vec();
    parts.splice(p - 1..p, [x, y]);
    let nu = CompositionShape::new(parts, mu.total())?;
    let cache = Arc::new(TCache::new(pyr.clone(), SuperAlgebra::for_pyramid(pyr)));
    let cmu = ComputedGenerators::with_cache(cache.clone(), mu.clone())?;
    let cnu = ComputedGenerators::with_cache(cache, nu)?;
    let rmax = order + 1;
    cmu.prefetch(&cmu.data().all_keys(rmax), mode);
    cnu.prefetch(&cnu.data().all_keys(rmax), mode);
    let alg = cmu.algebra();
    let z = mu.len();
    let mut tasks = Vec::new();
    for e in [true, false] {
        for a in 1..z {
            for b in a + 1..=z {
                for i in 1..=mu.part(a) {
                    for j in 1..=mu.part(b) {
                        tasks.push((e, a, b, i, j));
                    }
                }
            }
        }
    }
    Ok(mode.map(&tasks, |&(e, a, b, i, j)| {
        // Series of the refined shape; for `F` the block pair is read as (row block, column block).
        let nser = |a2: usize, b2: usize, i2: usize, j2: usize| {
            if e {
                root_series(&cnu, true, a2, b2, i2, j2, order)
            } else {
                root_series(&cnu, false, b2, a2, j2, i2, order)
            }
        };
        let (branch, rhs) = if b < p {
            (1, nser(a, b, i, j))
        } else if b == p && j <= x {
            (2, nser(a, b, i, j))
        } else if b == p {
            (3, nser(a, b + 1, i, j - x))
        } else if a < p {
            (4, nser(a, b + 1, i, j))
        } else if a == p && i <= x {
            let mut v = nser(a, b + 1, i, j);
            let pairs: Vec<_> = (1..=y)
                .map(|q| {
                    if e {
                        (nser(a, a + 1, i, q), nser(a + 1, b + 1, q, j))
                    } else {
                        (nser(a + 1, b + 1, q, j), nser(a, a + 1, i, q))
                    }
                })
                .collect();
            for (acc, w) in v.iter_mut().zip(conv_sum(alg, &pairs, order)) {
                acc.sub_assign(&w);
            }
            (5, v)
        } else if a == p {
            (6, nser(a + 1, b + 1, i - x, j))
        } else {
            (7, nser(a + 1, b + 1, i, j))
        };
        let lhs = if e { root_series(&cmu, true, a, b, i, j, order) } else { root_series(&cmu, false, b, a, j, i, order) };
        let id = if e { "refine_e" } else { "refine_f" };
        let params = int_params(&[("a", a), ("b", b), ("i", i), ("j", j), ("branch", branch), ("order", order)]);
        match series_diff(&lhs, &rhs) {
            None => CheckResult::new(id, params),
            Some((r, d)) => {
                let mut params = params;
                params.push(("r".into(), json!(r)));
                CheckResult::new(id, params).with_residual(alg, &d)
            }
        }
    }))
}

/// Level-one rectangles: `T(u)` and the one-block `D(u)` are
/// `δ_{ij} + (-1)^{|i|} e_{ij} u^{-1}`, and `(p703)` holds for the one-block shape.
pub fn evaluation_consistency(p: &Pyramid, order: usize, mode: Mode) -> Result<VerificationReport, VerifyError> {
    if p.ell() != 1 || !p.shift_matrix().is_zero() {
        return Err(VerifyError::Unsupported("evaluation needs a rectangle of level 1".into()));
    }
    let start = Instant::now();
    let n = p.height();
    let one_block = CompositionShape::new(vec![n], n)?;
    let src = ComputedGenerators::new(p, one_block)?;
    let alg = src.algebra();
    let mut rep = VerificationReport::new(p, order);
    let expect = |i: usize, j: usize, r: usize| -> SuperElement {
        match r {
            0 if i == j => SuperElement::one(),
            1 => {
                let (bi, bj) = (p.cell_at(i, 1).unwrap(), p.cell_at(j, 1).unwrap());
                alg.e(bi, bj).scaled(&Rational::sign(p.row_parity(i)))
            }
            _ => SuperElement::zero(),
        }
    };
    for i in 1..=n {
        for j in 1..=n {
            for r in 0..=order {
                let params = int_params(&[("i", i), ("j", j), ("r", r)]);
                let mut t = src.cache().get(i, j, 0, r);
                t.sub_assign(&expect(i, j, r));
                rep.push(CheckResult::new("eval_t", params.clone()).with_residual(alg, &t));
                let mut d = (*src.generator(&GenKey::new(Family::D, 1, i, j, r))).clone();
                d.sub_assign(&expect(i, j, r));
                rep.push(CheckResult::new("eval_d", params).with_residual(alg, &d));
            }
        }
    }
    let insts: Vec<_> = enumerate(src.data(), order, false).into_iter().filter(|x| x.id == RelId::P703).collect();
    rep.checks.extend(run_instances(&src, &insts, mode));
    rep.timing.push(("eval".into(), start.elapsed()));
    Ok(rep)
}

/// Relations of `Y(σ)` for the generators of a row-shifted pyramid with
/// superscripts moved by the difference of the two shift matrices.
pub fn iota_consistency(p: &Pyramid, shifted: &Pyramid, bound: usize, mode: Mode) -> Result<VerificationReport, VerifyError> {
    let same = p.height() == shifted.height()
        && p.rows().iter().zip(shifted.rows()).all(|(a, b)| a.length == b.length && a.label == b.label);
    if !same {
        return Err(VerifyError::Unsupported("the two pyramids have different row lengths or labels".into()));
    }
    let start = Instant::now();
    let sigma = p.shift_matrix();
    let arrow = shifted.shift_matrix();
    let min = sigma.minimal_shape();
    let shape = if arrow.is_admissible(&min) { min } else { CompositionShape::ones(p.height()) };
    let cache = Arc::new(TCache::new(shifted.clone(), SuperAlgebra::for_pyramid(shifted)));
    let ones = ReindexedGenerators::new(
        ComputedGenerators::with_cache(cache.clone(), CompositionShape::ones(p.height()))?,
        sigma.clone(),
    )?;
    let par = ReindexedGenerators::new(ComputedGenerators::with_cache(cache, shape)?, sigma)?;
    let mut rep = VerificationReport::new(p, bound);
    rep.checks.extend(verify_d_family(&ones, bound, mode));
    rep.checks.extend(verify_p_family(&par, bound, mode));
    rep.timing.push(("iota".into(), start.elapsed()));
    Ok(rep)
}

/// `D_{1;i,j}^{(r)} = 0` for `p_1 < r <= p_1 + extra`.
pub fn truncation_check(src: &dyn GeneratorSource, row_lengths: &[usize], extra: usize) -> Vec<CheckResult> {
    let d = src.data();
    let p1 = row_lengths[d.part(1) - 1];
    let alg = src.algebra();
    let mut out = Vec::new();
    for i in 1..=d.part(1) {
        for j in 1..=d.part(1) {
            for r in p1 + 1..=p1 + extra {
                let x = src.generator(&GenKey::new(Family::D, 1, i, j, r));
                let params = int_params(&[("i", i), ("j", j), ("r", r), ("p1", p1)]);
                out.push(CheckResult::new("truncation", params).with_residual(alg, &x));
            }
        }
    }
    out
}

/// Higher roots computed through every intermediate index `k` agree.
pub fn k_independence_check(src: &dyn GeneratorSource, order: usize, mode: Mode) -> Vec<CheckResult> {
    let d = src.data();
    let z = d.z();
    let mut tasks = Vec::new();
    for e in [true, false] {
        for a in 1..z {
            for b in a + 2..=z {
                if d.part(b - 1) < 2 {
                    continue;
                }
                let s = if e { d.s(a, b) } else { d.s(b, a) };
                let (rows, cols) = if e { (d.part(a), d.part(b)) } else { (d.part(b), d.part(a)) };
                for i in 1..=rows {
                    for j in 1..=cols {
                        for r in s + 1..=order {
                            tasks.push((e, a, b, i, j, r));
                        }
                    }
                }
            }
        }
    }
    if tasks.is_empty() {
        return vec![CheckResult::skip("k_independence", "no higher root has an interior block of size 2 or more")];
    }
    src.prefetch(&d.all_keys(order + 1), mode);
    let alg = src.algebra();
    mode.map(&tasks, |&(e, a, b, i, j, r)| {
        let get = |k: usize| if e { higher_e(src, a, b, i, j, r, k) } else { higher_f(src, b, a, i, j, r, k) };
        let base = get(1).expect("indices in range");
        let mut params: Vec<(String, Value)> = vec![("family".into(), json!(if e { "E" } else { "F" }))];
        params.extend(int_params(&[("a", a), ("b", b), ("i", i), ("j", j), ("r", r)]));
        for k in 2..=d.part(b - 1) {
            let mut x = get(k).expect("indices in range");
            x.sub_assign(&base);
            if !x.is_zero() {
                params.push(("k".into(), json!(k)));
                return CheckResult::new("k_independence", params).with_residual(alg, &x);
            }
        }
        CheckResult::new("k_independence", params)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filtered_dims_counts() {
        // One even generator of degree 1 and one odd of degree 1: 1, 1 + 2, then 3 + 2.
        assert_eq!(filtered_dims([(1, false), (1, true)], 2), vec![1, 3, 5]);
        assert_eq!(filtered_dims([], 3), vec![1, 1, 1, 1]);
    }
}
