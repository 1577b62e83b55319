//! Splitting one column off a pyramid: the maps `ψ_R`, `ψ_L`, the identities
//! relating generators of `π` and of the smaller pyramid, and the baby
//! comultiplication formulas they realise.

use std::time::Instant;

use serde_json::json;

use super::checks::{pbw_alphabet, ranks_by_degree, supermonomials};
use super::{int_params, key_params, CheckResult, VerificationReport, VerifyError};
use crate::algebra::{Monomial, SuperAlgebra, SuperElement, TensorAlgebra, TensorElement};
use crate::exec::Mode;
use crate::invariants::{higher_e, higher_f, ComputedGenerators, Family, GenKey, GeneratorSource};
use crate::pyramid::{Pyramid, ShiftMatrix};
use crate::rational::Rational;

/// Which column is split off: the rightmost when it is no taller than the
/// leftmost, otherwise the leftmost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    Right,
    Left,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::Right => "R",
            Case::Left => "L",
        }
    }
}

pub fn detect_case(p: &Pyramid) -> Result<Case, VerifyError> {
    if p.ell() < 2 {
        return Err(VerifyError::Unsupported("a pyramid with one column has nothing to split off".into()));
    }
    let h = p.column_heights();
    Ok(if h[p.ell() - 1] <= h[0] { Case::Right } else { Case::Left })
}

/// `ψ: U(p) → U(ṗ) ⊗ U(gl_{p|q})` (right case) or `U(gl_{p|q}) ⊗ U(ṗ)` (left case).
pub struct PsiMap {
    case: Case,
    dot: Pyramid,
    alg: SuperAlgebra,
    tensor: TensorAlgebra,
    /// Boxes of the removed column in the bottom rows, top to bottom.
    col_box: Vec<usize>,
    /// Their neighbours in the adjacent column.
    next_box: Vec<usize>,
    parities: Vec<bool>,
    images: Vec<Option<TensorElement>>,
    embed_images: Vec<SuperElement>,
}

fn unit() -> TensorElement {
    let mut t = TensorElement::zero();
    t.add_term(Monomial::new(), Monomial::new(), &Rational::ONE);
    t
}

impl PsiMap {
    pub fn new(p: &Pyramid) -> Result<Self, VerifyError> {
        let case = detect_case(p)?;
        let ell = p.ell();
        let n = p.height();
        let (c0, c1) = match case {
            Case::Right => (ell, ell - 1),
            Case::Left => (1, 2),
        };
        let h = p.column_heights()[c0 - 1];
        let rows: Vec<usize> = (n - h + 1..=n).collect();
        let mut col_box = Vec::new();
        let mut next_box = Vec::new();
        for &r in &rows {
            match (p.cell_at(r, c0), p.cell_at(r, c1)) {
                (Some(a), Some(b)) => {
                    col_box.push(a);
                    next_box.push(b);
                }
                _ => return Err(VerifyError::Unsupported(format!("row {r} does not span the last two columns"))),
            }
        }
        let dot = p.remove_column(case == Case::Right)?;
        let alg = SuperAlgebra::for_pyramid(p);
        let dot_alg = SuperAlgebra::for_pyramid(&dot);
        let parities: Vec<bool> = rows.iter().map(|&r| p.row_parity(r)).collect();
        let gl = SuperAlgebra::plain(&parities, col_box.iter().map(|&b| alg.tilde_shift(b).clone()).collect());
        let tensor = match case {
            Case::Right => TensorAlgebra::new(dot_alg, gl),
            Case::Left => TensorAlgebra::new(gl, dot_alg),
        };
        let shift = if case == Case::Left { 1 } else { 0 };
        let to_dot = |b: usize| {
            let c = p.cell(b);
            if c.col == c0 {
                None
            } else {
                dot.cell_at(c.row, c.col - shift)
            }
        };
        let mut me = Self { case, dot: dot.clone(), alg, tensor, col_box, next_box, parities, images: Vec::new(), embed_images: Vec::new() };
        let mut images = Vec::with_capacity(me.alg.num_gens());
        for g in 0..me.alg.num_gens() {
            let info = me.alg.gen(g as u16).clone();
            if !info.in_p {
                images.push(None);
                continue;
            }
            let (i, j) = (info.i, info.j);
            let img = match (to_dot(i), to_dot(j)) {
                (Some(di), Some(dj)) => {
                    let mut x = me.lift_dot(&me.dot_alg().e(di, dj));
                    if i == j {
                        let c = me.dot_alg().tilde_shift(di) - me.alg.tilde_shift(i);
                        x.add_term(Monomial::new(), Monomial::new(), &c);
                    }
                    x
                }
                (None, None) => {
                    let fi = me.col_box.iter().position(|&b| b == i).expect("removed box");
                    let fj = me.col_box.iter().position(|&b| b == j).expect("removed box");
                    // The gl shift equals the tilde shift of the box, so no constant survives.
                    me.lift_gl(&me.gl_alg().e(fi, fj))
                }
                _ => TensorElement::zero(),
            };
            images.push(Some(img));
        }
        me.images = images;
        let dalg = me.dot_alg().clone();
        me.embed_images = (0..dalg.num_gens())
            .map(|g| {
                let info = dalg.gen(g as u16);
                let cell = |b: usize| {
                    let c = dot.cell(b);
                    p.cell_at(c.row, c.col + shift).expect("box survives")
                };
                let (i, j) = (cell(info.i), cell(info.j));
                let mut x = me.alg.e(i, j);
                if i == j {
                    x.add_scalar(&(me.alg.tilde_shift(i) - dalg.tilde_shift(info.i)));
                }
                x
            })
            .collect();
        Ok(me)
    }

    pub fn case(&self) -> Case {
        self.case
    }

    /// Height `H` of the removed column.
    pub fn h(&self) -> usize {
        self.col_box.len()
    }

    pub fn dot_pyramid(&self) -> &Pyramid {
        &self.dot
    }

    pub fn algebra(&self) -> &SuperAlgebra {
        &self.alg
    }

    pub fn tensor(&self) -> &TensorAlgebra {
        &self.tensor
    }

    pub fn dot_alg(&self) -> &SuperAlgebra {
        match self.case {
            Case::Right => &self.tensor.left,
            Case::Left => &self.tensor.right,
        }
    }

    pub fn gl_alg(&self) -> &SuperAlgebra {
        match self.case {
            Case::Right => &self.tensor.right,
            Case::Left => &self.tensor.left,
        }
    }

    /// Parity of the `f`-th (1-based) box of the removed column.
    pub fn parity(&self, f: usize) -> bool {
        self.parities[f - 1]
    }

    /// `x` placed in the `U(ṗ)` factor.
    pub fn lift_dot(&self, x: &SuperElement) -> TensorElement {
        match self.case {
            Case::Right => self.tensor.tensor(x, &SuperElement::one()),
            Case::Left => self.tensor.tensor(&SuperElement::one(), x),
        }
    }

    /// `x` placed in the `U(gl_{p|q})` factor.
    pub fn lift_gl(&self, x: &SuperElement) -> TensorElement {
        match self.case {
            Case::Right => self.tensor.tensor(&SuperElement::one(), x),
            Case::Left => self.tensor.tensor(x, &SuperElement::one()),
        }
    }

    /// The pure tensor of a `U(ṗ)` element and a `U(gl_{p|q})` element, in the factor order of the case.
    pub fn pair(&self, dot: &SuperElement, gl: &SuperElement) -> TensorElement {
        match self.case {
            Case::Right => self.tensor.tensor(dot, gl),
            Case::Left => self.tensor.tensor(gl, dot),
        }
    }

    /// `ẽ'_{f,g}` in `U(gl_{p|q})`, 1-based.
    pub fn gl_tilde(&self, f: usize, g: usize) -> SuperElement {
        self.gl_alg().e_tilde(f - 1, g - 1)
    }

    /// `ψ(x)` for `x ∈ U(p)`.
    pub fn apply(&self, x: &SuperElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (m, c) in x.iter() {
            let mut acc = unit();
            for &g in m {
                let img = self.images[g as usize].as_ref().expect("element of U(p)");
                if img.is_zero() {
                    acc = TensorElement::zero();
                    break;
                }
                acc = self.tensor.mul(&acc, img);
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// The embedding `U(ṗ) → U(p)` identifying the `ẽ` generators.
    pub fn embed(&self, x: &SuperElement) -> SuperElement {
        let mut out = SuperElement::zero();
        for (m, c) in x.iter() {
            let mut acc = SuperElement::scalar(c.clone());
            for &g in m {
                acc = self.alg.mul(&acc, &self.embed_images[g as usize]);
            }
            out.add_assign(&acc);
        }
        out
    }

    /// `ẽ_{i,j}` of `π` for the `f`-th box of the removed column and the
    /// `g`-th box of the removed (`second == false`) or adjacent column.
    fn corner(&self, f: usize, g: usize, second: bool) -> SuperElement {
        let b = if second { self.next_box[g - 1] } else { self.col_box[g - 1] };
        self.alg.e_tilde(self.col_box[f - 1], b)
    }
}

struct Split<'a> {
    psi: &'a PsiMap,
    src: &'a ComputedGenerators,
    dsrc: &'a ComputedGenerators,
}

impl Split<'_> {
    fn g(&self, f: Family, a: usize, i: usize, j: usize, r: usize) -> SuperElement {
        (*self.src.generator(&GenKey::new(f, a, i, j, r))).clone()
    }

    fn dg(&self, f: Family, a: usize, i: usize, j: usize, r: usize) -> SuperElement {
        (*self.dsrc.generator(&GenKey::new(f, a, i, j, r))).clone()
    }

    fn z(&self) -> usize {
        self.src.data().z()
    }
}

fn tensor_check(id: &str, params: Vec<(String, serde_json::Value)>, t: &TensorAlgebra, lhs: &TensorElement, rhs: &TensorElement) -> CheckResult {
    let mut d = lhs.clone();
    d.sub_assign(rhs);
    CheckResult::new(id, params).with_tensor_residual(t, &d)
}

/// Expected `ψ` image of a parabolic generator.
fn generator_image(sp: &Split, k: &GenKey) -> TensorElement {
    let psi = sp.psi;
    let z = sp.z();
    let d = sp.src.data();
    let h = psi.h();
    let mut out = psi.lift_dot(&sp.dg(k.family, k.a, k.i, k.j, k.r));
    let sgn = |odd: bool| Rational::sign(odd);
    match (psi.case, k.family) {
        (Case::Right, Family::D) if k.a == z => {
            for f in 1..=h {
                let t = psi.pair(&sp.dg(Family::D, z, k.i, f, k.r - 1), &psi.gl_tilde(f, k.j));
                out.add_scaled(&t, &sgn(d.parity(z, f)));
            }
        }
        (Case::Right, Family::E) if k.a + 1 == z => {
            for f in 1..=h {
                let t = psi.pair(&sp.dg(Family::E, k.a, k.i, f, k.r - 1), &psi.gl_tilde(f, k.j));
                out.add_scaled(&t, &sgn(d.parity(z, f)));
            }
        }
        (Case::Left, Family::D) if k.a == z => {
            for f in 1..=h {
                let t = psi.pair(&sp.dg(Family::D, z, f, k.j, k.r - 1), &psi.gl_tilde(k.i, f));
                out.add_scaled(&t, &sgn(d.parity(z, k.i)));
            }
        }
        (Case::Left, Family::F) if k.a + 1 == z => {
            for f in 1..=h {
                let t = psi.pair(&sp.dg(Family::F, k.a, f, k.j, k.r - 1), &psi.gl_tilde(k.i, f));
                out.add_scaled(&t, &sgn(d.parity(z, k.i)));
            }
        }
        _ => {}
    }
    out
}

/// Right-hand side of the identity expressing a generator of `π` through
/// generators of `π̇` inside `U(p)`, for the auxiliary index `g`.
fn split_identity(sp: &Split, k: &GenKey, g: usize) -> SuperElement {
    let psi = sp.psi;
    let alg = psi.algebra();
    let z = sp.z();
    let d = sp.src.data();
    let h = psi.h();
    let emb = |x: SuperElement| psi.embed(&x);
    let mut out = emb(sp.dg(k.family, k.a, k.i, k.j, k.r));
    let sgn = |odd: bool| Rational::sign(odd);
    match (psi.case, k.family) {
        (Case::Right, Family::D | Family::E) if (k.family == Family::D && k.a == z) || (k.family == Family::E && k.a + 1 == z) => {
            for f in 1..=h {
                let x = emb(sp.dg(k.family, k.a, k.i, f, k.r - 1));
                alg.mul_into(&x, &psi.corner(f, k.j, false), &sgn(d.parity(z, f)), &mut out);
            }
            let x = emb(sp.dg(k.family, k.a, k.i, g, k.r - 1));
            out.add_assign(&alg.supercommutator(&x, &psi.alg.e_tilde(psi.next_box[g - 1], psi.col_box[k.j - 1])));
        }
        (Case::Left, Family::D | Family::F) if (k.family == Family::D && k.a == z) || (k.family == Family::F && k.a + 1 == z) => {
            let mut corr = SuperElement::zero();
            for f in 1..=h {
                let x = emb(sp.dg(k.family, k.a, f, k.j, k.r - 1));
                alg.mul_into(&psi.corner(k.i, f, false), &x, &Rational::ONE, &mut corr);
            }
            let x = emb(sp.dg(k.family, k.a, g, k.j, k.r - 1));
            // the commutator term carries (-1)^{|g|}
            corr.add_scaled(&alg.supercommutator(&psi.corner(k.i, g, true), &x), &sgn(d.parity(z, g)));
            out.add_scaled(&corr, &sgn(d.parity(z, k.i)));
        }
        _ => {}
    }
    out
}

fn keys_to(src: &ComputedGenerators, order: usize) -> Vec<GenKey> {
    src.data().all_keys(order).into_iter().filter(|k| k.family != Family::DPrime).collect()
}

/// Set up `ψ`, the generators of `π` and of `π̇` for the minimal shape.
fn setup(p: &Pyramid) -> Result<(PsiMap, ComputedGenerators, ComputedGenerators), VerifyError> {
    let psi = PsiMap::new(p)?;
    let mu = p.shift_matrix().minimal_shape();
    if mu.part(mu.len()) != psi.h() {
        return Err(VerifyError::Unsupported(format!(
            "last block of the minimal shape {mu} does not match the removed column height {}",
            psi.h()
        )));
    }
    let src = ComputedGenerators::new(p, mu.clone())?;
    let dsrc = ComputedGenerators::new(psi.dot_pyramid(), mu)?;
    Ok((psi, src, dsrc))
}

/// Rank of `ψ` on the PBW supermonomials of degree `<= d`, for every `d <= dmax`.
fn injectivity(sp: &Split, p: &Pyramid, dmax: usize, mode: Mode, id: &str) -> Result<Vec<CheckResult>, VerifyError> {
    let letters = pbw_alphabet(sp.src, &p.p_tuple())?;
    let monos = supermonomials(sp.src.algebra(), &letters, dmax, mode);
    let rows: Vec<(usize, Vec<((Monomial, Monomial), Rational)>)> = mode.map(&monos, |(d, _, x)| {
        (*d, sp.psi.apply(x).iter().map(|(k, c)| (k.clone(), c.clone())).collect())
    });
    let ranks = ranks_by_degree(&rows, dmax);
    Ok((0..=dmax)
        .map(|d| {
            let count = monos.iter().filter(|m| m.0 <= d).count();
            let params = vec![("d".into(), json!(d)), ("rank".into(), json!(ranks[d])), ("monomials".into(), json!(count))];
            CheckResult::new(id, params).with_outcome(ranks[d] == count, format!("rank {} of {} images", ranks[d], count))
        })
        .collect())
}

/// `ψ` on the pyramid's own case: vanishing branch, homomorphism on pairs of
/// generators, generator images, the splitting identities for every `g`, and
/// rank-injectivity up to `dmax`.
pub fn psi_check(p: &Pyramid, order: usize, dmax: usize, mode: Mode) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let (psi, src, dsrc) = setup(p)?;
    let sp = Split { psi: &psi, src: &src, dsrc: &dsrc };
    let alg = psi.algebra();
    let mut rep = VerificationReport::new(p, order);
    let case = psi.case().name();

    let pgens: Vec<u16> = (0..alg.num_gens() as u16).filter(|&g| alg.gen(g).in_p).collect();
    for &g in &pgens {
        let info = alg.gen(g);
        let (ci, cj) = (p.cell(info.i).col, p.cell(info.j).col);
        let killed = match psi.case() {
            Case::Right => ci < p.ell() && cj == p.ell(),
            Case::Left => ci == 1 && cj > 1,
        };
        if killed {
            let img = psi.apply(&alg.e_tilde(info.i, info.j));
            let params = vec![("case".into(), json!(case)), ("e".into(), json!(alg.gen_name(g)))];
            rep.push(CheckResult::new("psi_kill", params).with_tensor_residual(psi.tensor(), &img));
        }
    }
    let pairs: Vec<(u16, u16)> = pgens.iter().flat_map(|&a| pgens.iter().map(move |&b| (a, b))).collect();
    rep.checks.extend(mode.map(&pairs, |&(a, b)| {
        let x = SuperElement::monomial(Monomial::from_slice(&[a]), Rational::ONE);
        let y = SuperElement::monomial(Monomial::from_slice(&[b]), Rational::ONE);
        let lhs = psi.apply(&alg.mul(&x, &y));
        let rhs = psi.tensor().mul(&psi.apply(&x), &psi.apply(&y));
        let params = vec![("x".into(), json!(alg.gen_name(a))), ("y".into(), json!(alg.gen_name(b)))];
        tensor_check("psi_hom", params, psi.tensor(), &lhs, &rhs)
    }));

    let keys = keys_to(&src, order);
    src.prefetch(&src.data().all_keys(order), mode);
    dsrc.prefetch(&dsrc.data().all_keys(order), mode);
    rep.checks.extend(mode.map(&keys, |k| {
        let lhs = psi.apply(&sp.g(k.family, k.a, k.i, k.j, k.r));
        let rhs = generator_image(&sp, k);
        let mut params = key_params(k);
        params.insert(0, ("case".into(), json!(case)));
        tensor_check("psi_image", params, psi.tensor(), &lhs, &rhs)
    }));

    let z = src.data().z();
    let mut tasks = Vec::new();
    for k in &keys {
        let corrected = match (psi.case(), k.family) {
            (Case::Right, Family::D) | (Case::Left, Family::D) => k.a == z,
            (Case::Right, Family::E) | (Case::Left, Family::F) => k.a + 1 == z,
            _ => false,
        };
        if corrected {
            for g in 1..=psi.h() {
                tasks.push((*k, g));
            }
        } else {
            tasks.push((*k, 0));
        }
    }
    let id = if psi.case() == Case::Right { "split_r" } else { "split_l" };
    rep.checks.extend(mode.map(&tasks, |&(k, g)| {
        let mut res = sp.g(k.family, k.a, k.i, k.j, k.r);
        res.sub_assign(&split_identity(&sp, &k, g.max(1)));
        let mut params = key_params(&k);
        if g > 0 {
            params.push(("g".into(), json!(g)));
        }
        CheckResult::new(id, params).with_residual(alg, &res)
    }));
    rep.checks.extend(injectivity(&sp, p, dmax, mode, "psi_injective")?);
    rep.timing.push(("psi".into(), start.elapsed()));
    Ok(rep)
}

/// `σ̇`: the shift matrix after removing one column, read off `σ`.
fn sigma_dot(sigma: &ShiftMatrix, last: usize, right: bool) -> ShiftMatrix {
    let n = sigma.size();
    let cut = n - last;
    let rows = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let s = sigma.get(i, j);
                    let hit = if right { i <= cut && cut < j } else { j <= cut && cut < i };
                    if hit {
                        s - 1
                    } else {
                        s
                    }
                })
                .collect()
        })
        .collect();
    ShiftMatrix::new(rows).expect("a shift matrix")
}

/// The baby comultiplication realised by `ψ`: generator formulas, the
/// higher-root formulas, and rank-injectivity up to `dmax`.
pub fn baby_comult_consistency(p: &Pyramid, r_bound: usize, dmax: usize, mode: Mode) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let sigma = p.shift_matrix();
    let mut rep = VerificationReport::new(p, r_bound);
    if sigma.is_zero() {
        rep.push(CheckResult::skip("baby", "zero shift matrix: no baby comultiplication"));
        return Ok(rep);
    }
    let (psi, src, dsrc) = setup(p)?;
    let sp = Split { psi: &psi, src: &src, dsrc: &dsrc };
    let d = src.data();
    let z = d.z();
    let n = sigma.size();
    let last = d.part(z);
    let right = sigma.get(n - last, n - last + 1) != 0;
    let left = sigma.get(n - last + 1, n - last) != 0;
    let side_ok = (psi.case() == Case::Right && right) || (psi.case() == Case::Left && left);
    let case = psi.case().name();
    rep.push(CheckResult::new("baby_side", vec![("case".into(), json!(case))]).with_outcome(
        side_ok,
        "the shift matrix entry next to the last block does not allow this side",
    ));
    let sd = sigma_dot(&sigma, last, psi.case() == Case::Right);
    rep.push(
        CheckResult::new("baby_sigma_dot", vec![]).with_outcome(sd == psi.dot_pyramid().shift_matrix(), "shift matrix of the smaller pyramid differs"),
    );

    let keys = keys_to(&src, r_bound);
    src.prefetch(&src.data().all_keys(r_bound + 1), mode);
    dsrc.prefetch(&dsrc.data().all_keys(r_bound + 1), mode);
    rep.checks.extend(mode.map(&keys, |k| {
        let lhs = psi.apply(&sp.g(k.family, k.a, k.i, k.j, k.r));
        let rhs = generator_image(&sp, k);
        tensor_check("baby_generator", key_params(k), psi.tensor(), &lhs, &rhs)
    }));

    // Higher roots.
    let mut tasks = Vec::new();
    for a in 1..z {
        for b in a + 2..=z {
            for e in [true, false] {
                let s = if e { d.s(a, b) } else { d.s(b, a) };
                let (rows, cols) = if e { (d.part(a), d.part(b)) } else { (d.part(b), d.part(a)) };
                for i in 1..=rows {
                    for j in 1..=cols {
                        for r in s + 1..=r_bound {
                            tasks.push((e, a, b, i, j, r));
                        }
                    }
                }
            }
        }
    }
    let sgn = |odd: bool| Rational::sign(odd);
    let dalg = psi.dot_alg();
    let results: Vec<Vec<CheckResult>> = mode.map(&tasks, |&(e, a, b, i, j, r)| {
        let lhs = if e { higher_e(&src, a, b, i, j, r, 1) } else { higher_f(&src, b, a, i, j, r, 1) }.expect("in range");
        let lhs = psi.apply(&lhs);
        let mut params = vec![("family".into(), json!(if e { "E" } else { "F" }))];
        params.extend(int_params(&[("a", a), ("b", b), ("i", i), ("j", j), ("r", r)]));
        let corrected = b == z && ((e && psi.case() == Case::Right) || (!e && psi.case() == Case::Left));
        if !corrected {
            let dot = if e { higher_e(&dsrc, a, b, i, j, r, 1) } else { higher_f(&dsrc, b, a, i, j, r, 1) }.expect("in range");
            return vec![tensor_check("baby_root", params, psi.tensor(), &lhs, &psi.lift_dot(&dot))];
        }
        (1..=d.part(z - 1))
            .map(|hh| {
                let mut rhs;
                if e {
                    let s = d.s(z - 1, z);
                    let x = higher_e(&dsrc, a, z - 1, i, hh, r - s, 1).expect("in range");
                    let y = sp.dg(Family::E, z - 1, hh, j, s + 1);
                    rhs = psi.lift_dot(&dalg.supercommutator(&x, &y).scaled(&sgn(d.parity(z - 1, hh))));
                    for f in 1..=last {
                        let t = higher_e(&dsrc, a, z, i, f, r - 1, 1).expect("in range");
                        rhs.add_scaled(&psi.pair(&t, &psi.gl_tilde(f, j)), &sgn(d.parity(z, f)));
                    }
                } else {
                    let s = d.s(z, z - 1);
                    let x = sp.dg(Family::F, z - 1, i, hh, s + 1);
                    let y = higher_f(&dsrc, z - 1, a, hh, j, r - s, 1).expect("in range");
                    rhs = psi.lift_dot(&dalg.supercommutator(&x, &y).scaled(&sgn(d.parity(z - 1, hh))));
                    for f in 1..=last {
                        let t = higher_f(&dsrc, z, a, f, j, r - 1, 1).expect("in range");
                        rhs.add_scaled(&psi.pair(&t, &psi.gl_tilde(i, f)), &sgn(d.parity(z, i)));
                    }
                }
                let mut params = params.clone();
                params.push(("h".into(), json!(hh)));
                tensor_check("baby_root", params, psi.tensor(), &lhs, &rhs)
            })
            .collect()
    });
    rep.checks.extend(results.into_iter().flatten());
    rep.checks.extend(injectivity(&sp, p, dmax, mode, "baby_injective")?);
    rep.timing.push(("baby".into(), start.elapsed()));
    Ok(rep)
}
