//! Instances of the defining relations, their residuals, and the suites that run them.

use std::sync::Arc;
use std::time::Instant;

use serde_json::json;
use smallvec::SmallVec;

use super::{CheckResult, VerificationReport};
use crate::algebra::{SuperAlgebra, SuperElement};
use crate::exec::Mode;
use crate::invariants::{ComputedGenerators, Family, GenKey, GeneratorSource, ShapeData, TCache};
use crate::pyramid::{CompositionShape, Pyramid};
use crate::rational::Rational;

macro_rules! rel_ids {
    ($($v:ident => $s:literal : [$($p:literal),*]),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RelId { $($v),* }

        impl RelId {
            pub const ALL: &'static [RelId] = &[$(RelId::$v),*];

            pub fn name(self) -> &'static str {
                match self { $(RelId::$v => $s),* }
            }

            pub fn param_names(self) -> &'static [&'static str] {
                match self { $(RelId::$v => &[$($p),*]),* }
            }
        }
    };
}

rel_ids! {
    D401 => "d401": ["a", "prime"],
    D402 => "d402": ["a", "r"],
    D403 => "d403": ["a", "r", "b", "s"],
    D404 => "d404": ["a", "r", "b", "s"],
    D405 => "d405": ["a", "r", "b", "s"],
    D406 => "d406": ["a", "r", "b", "s"],
    D407 => "d407": ["a", "r", "s"],
    D408 => "d408": ["a", "r", "s"],
    D409 => "d409": ["a", "r", "s"],
    D410 => "d410": ["a", "r", "s"],
    D411 => "d411": ["a", "r", "b", "s"],
    D412 => "d412": ["a", "r", "b", "s"],
    D413 => "d413": ["a", "b", "r", "s", "t"],
    D414 => "d414": ["a", "b", "r", "s", "t"],
    D415 => "d415": ["a", "r", "s"],
    D416 => "d416": ["a", "r", "s"],
    P701 => "p701": ["a", "i", "j", "prime"],
    P702 => "p702": ["a", "i", "j", "r"],
    P703 => "p703": ["a", "i", "j", "r", "b", "h", "k", "s"],
    P704 => "p704": ["a", "i", "j", "r", "b", "h", "k", "s"],
    P705 => "p705": ["a", "i", "j", "r", "b", "h", "k", "s"],
    P706 => "p706": ["a", "i", "j", "r", "b", "h", "k", "s"],
    P707 => "p707": ["a", "i", "j", "r", "h", "k", "s"],
    P708 => "p708": ["a", "i", "j", "r", "h", "k", "s"],
    P709 => "p709": ["a", "i", "j", "r", "h", "k", "s"],
    P710 => "p710": ["a", "i", "j", "r", "h", "k", "s"],
    P711 => "p711": ["a", "i", "j", "r", "b", "h", "k", "s"],
    P712 => "p712": ["a", "i", "j", "r", "b", "h", "k", "s"],
    P713 => "p713": ["a", "i", "j", "h", "k", "b", "f", "g", "r", "s", "t"],
    P714 => "p714": ["a", "i", "j", "h", "k", "b", "f", "g", "r", "s", "t"],
    P715 => "p715": ["a", "i", "f1", "f2", "j", "h", "g1", "g2", "k", "r", "s"],
    P716 => "p716": ["a", "i", "f1", "f2", "j", "h", "g1", "g2", "k", "r", "s"],
}

impl RelId {
    pub fn is_d(self) -> bool {
        self.name().starts_with('d')
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelationInstance {
    pub id: RelId,
    pub v: SmallVec<[usize; 12]>,
}

impl RelationInstance {
    fn new(id: RelId, v: &[usize]) -> Self {
        debug_assert_eq!(v.len(), id.param_names().len());
        Self { id, v: SmallVec::from_slice(v) }
    }

    pub fn check_id(&self) -> String {
        self.id.name().to_string()
    }

    pub fn params(&self) -> Vec<(String, serde_json::Value)> {
        let mut out: Vec<(String, serde_json::Value)> =
            self.id.param_names().iter().zip(&self.v).map(|(k, v)| (k.to_string(), json!(v))).collect();
        if matches!(self.id, RelId::P715 | RelId::P716) {
            out.push(("reduced".into(), json!(self.v[2] == self.v[3] && self.v[6] == self.v[7])));
        }
        out
    }

    pub fn label(&self) -> String {
        let p: Vec<String> = self.id.param_names().iter().zip(&self.v).map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}[{}]", self.id.name(), p.join(","))
    }
}

/// All `(r, s)` with `r > r0`, `s > s0`, `r + s <= bound`.
fn pairs(r0: usize, s0: usize, bound: usize, r_from_zero: bool, s_from_zero: bool) -> Vec<(usize, usize)> {
    let rs = if r_from_zero { 0 } else { r0 + 1 };
    let ss = if s_from_zero { 0 } else { s0 + 1 };
    let mut out = Vec::new();
    for r in rs..=bound {
        for s in ss..=bound {
            if r + s <= bound {
                out.push((r, s));
            }
        }
    }
    out
}

fn range(n: usize) -> std::ops::RangeInclusive<usize> {
    1..=n
}

/// Every instance of the parabolic relations (`d` ones when `drinfeld`,
/// which requires the shape `1^{m+n}`) with free superscripts summing to at most `bound`.
pub fn enumerate(d: &ShapeData, bound: usize, drinfeld: bool) -> Vec<RelationInstance> {
    if drinfeld {
        enumerate_d(d, bound)
    } else {
        enumerate_p(d, bound)
    }
}

fn enumerate_d(d: &ShapeData, bound: usize) -> Vec<RelationInstance> {
    use RelId::*;
    let n = d.z();
    let mut out = Vec::new();
    let se = |a: usize| d.s(a, a + 1);
    let sf = |a: usize| d.s(a + 1, a);
    for a in 1..=n {
        out.push(RelationInstance::new(D401, &[a, 0]));
        out.push(RelationInstance::new(D401, &[a, 1]));
        for r in 0..=bound {
            out.push(RelationInstance::new(D402, &[a, r]));
        }
        for b in 1..=n {
            for (r, s) in pairs(0, 0, bound, true, true) {
                out.push(RelationInstance::new(D403, &[a, r, b, s]));
            }
        }
        for b in 1..n {
            for (r, s) in pairs(0, se(b), bound, true, false) {
                out.push(RelationInstance::new(D404, &[a, r, b, s]));
            }
            for (r, s) in pairs(0, sf(b), bound, true, false) {
                out.push(RelationInstance::new(D405, &[a, r, b, s]));
            }
        }
    }
    for a in 1..n {
        for b in 1..n {
            for (r, s) in pairs(se(a), sf(b), bound, false, false) {
                out.push(RelationInstance::new(D406, &[a, r, b, s]));
            }
            if a.abs_diff(b) > 1 {
                for (r, s) in pairs(se(a), se(b), bound, false, false) {
                    out.push(RelationInstance::new(D411, &[a, r, b, s]));
                }
                for (r, s) in pairs(sf(a), sf(b), bound, false, false) {
                    out.push(RelationInstance::new(D412, &[a, r, b, s]));
                }
            }
            if a.abs_diff(b) == 1 {
                for (r, s) in pairs(se(a), se(a), bound, false, false) {
                    for t in se(b) + 1..=bound.saturating_sub(r + s) {
                        out.push(RelationInstance::new(D413, &[a, b, r, s, t]));
                    }
                }
                for (r, s) in pairs(sf(a), sf(a), bound, false, false) {
                    for t in sf(b) + 1..=bound.saturating_sub(r + s) {
                        out.push(RelationInstance::new(D414, &[a, b, r, s, t]));
                    }
                }
            }
        }
        for (r, s) in pairs(se(a), se(a), bound, false, false) {
            out.push(RelationInstance::new(D407, &[a, r, s]));
        }
        for (r, s) in pairs(sf(a), sf(a), bound, false, false) {
            out.push(RelationInstance::new(D408, &[a, r, s]));
        }
        if a + 1 < n {
            for (r, s) in pairs(se(a), se(a + 1), bound, false, false) {
                out.push(RelationInstance::new(D409, &[a, r, s]));
            }
            for (r, s) in pairs(sf(a), sf(a + 1), bound, false, false) {
                out.push(RelationInstance::new(D410, &[a, r, s]));
            }
        }
    }
    if n >= 4 {
        for a in 2..=n - 2 {
            if d.parity(a, 1) != d.parity(a + 1, 1) {
                for (r, s) in pairs(se(a - 1), se(a + 1), bound, false, false) {
                    out.push(RelationInstance::new(D415, &[a, r, s]));
                }
                for (r, s) in pairs(sf(a - 1), sf(a + 1), bound, false, false) {
                    out.push(RelationInstance::new(D416, &[a, r, s]));
                }
            }
        }
    }
    out
}

fn enumerate_p(d: &ShapeData, bound: usize) -> Vec<RelationInstance> {
    use RelId::*;
    let z = d.z();
    let mu = |a: usize| d.part(a);
    let se = |a: usize| d.s(a, a + 1);
    let sf = |a: usize| d.s(a + 1, a);
    let mut out = Vec::new();
    for a in 1..=z {
        for i in range(mu(a)) {
            for j in range(mu(a)) {
                out.push(RelationInstance::new(P701, &[a, i, j, 0]));
                out.push(RelationInstance::new(P701, &[a, i, j, 1]));
                for r in 0..=bound {
                    out.push(RelationInstance::new(P702, &[a, i, j, r]));
                }
                for b in 1..=z {
                    for h in range(mu(b)) {
                        for k in range(mu(b)) {
                            for (r, s) in pairs(0, 0, bound, true, true) {
                                out.push(RelationInstance::new(P703, &[a, i, j, r, b, h, k, s]));
                            }
                        }
                    }
                }
                for b in 1..z {
                    for h in range(mu(b)) {
                        for k in range(mu(b + 1)) {
                            for (r, s) in pairs(0, se(b), bound, true, false) {
                                out.push(RelationInstance::new(P704, &[a, i, j, r, b, h, k, s]));
                            }
                        }
                    }
                    for h in range(mu(b + 1)) {
                        for k in range(mu(b)) {
                            for (r, s) in pairs(0, sf(b), bound, true, false) {
                                out.push(RelationInstance::new(P705, &[a, i, j, r, b, h, k, s]));
                            }
                        }
                    }
                }
            }
        }
    }
    for a in 1..z {
        for b in 1..z {
            // E_{a;i,j} against F_{b;h,k}
            for i in range(mu(a)) {
                for j in range(mu(a + 1)) {
                    for h in range(mu(b + 1)) {
                        for k in range(mu(b)) {
                            for (r, s) in pairs(se(a), sf(b), bound, false, false) {
                                out.push(RelationInstance::new(P706, &[a, i, j, r, b, h, k, s]));
                            }
                        }
                    }
                }
            }
            let far = a.abs_diff(b) > 1;
            // E_{a;i,j}, E_{b;h,k}
            for i in range(mu(a)) {
                for j in range(mu(a + 1)) {
                    for h in range(mu(b)) {
                        for k in range(mu(b + 1)) {
                            if far || (b == a + 1 && h != j) {
                                for (r, s) in pairs(se(a), se(b), bound, false, false) {
                                    out.push(RelationInstance::new(P711, &[a, i, j, r, b, h, k, s]));
                                }
                            }
                        }
                    }
                }
            }
            // F_{a;i,j}, F_{b;h,k}
            for i in range(mu(a + 1)) {
                for j in range(mu(a)) {
                    for h in range(mu(b + 1)) {
                        for k in range(mu(b)) {
                            if far || (b == a + 1 && i != k) {
                                for (r, s) in pairs(sf(a), sf(b), bound, false, false) {
                                    out.push(RelationInstance::new(P712, &[a, i, j, r, b, h, k, s]));
                                }
                            }
                        }
                    }
                }
            }
            if a != b {
                for i in range(mu(a)) {
                    for j in range(mu(a + 1)) {
                        for h in range(mu(a)) {
                            for k in range(mu(a + 1)) {
                                for f in range(mu(b)) {
                                    for g in range(mu(b + 1)) {
                                        for (r, s) in pairs(se(a), se(a), bound, false, false) {
                                            for t in se(b) + 1..=bound.saturating_sub(r + s) {
                                                out.push(RelationInstance::new(
                                                    P713,
                                                    &[a, i, j, h, k, b, f, g, r, s, t],
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                for i in range(mu(a + 1)) {
                    for j in range(mu(a)) {
                        for h in range(mu(a + 1)) {
                            for k in range(mu(a)) {
                                for f in range(mu(b + 1)) {
                                    for g in range(mu(b)) {
                                        for (r, s) in pairs(sf(a), sf(a), bound, false, false) {
                                            for t in sf(b) + 1..=bound.saturating_sub(r + s) {
                                                out.push(RelationInstance::new(
                                                    P714,
                                                    &[a, i, j, h, k, b, f, g, r, s, t],
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for i in range(mu(a)) {
            for j in range(mu(a + 1)) {
                for h in range(mu(a)) {
                    for k in range(mu(a + 1)) {
                        for (r, s) in pairs(se(a), se(a), bound, false, false) {
                            out.push(RelationInstance::new(P707, &[a, i, j, r, h, k, s]));
                        }
                    }
                }
            }
        }
        for i in range(mu(a + 1)) {
            for j in range(mu(a)) {
                for h in range(mu(a + 1)) {
                    for k in range(mu(a)) {
                        for (r, s) in pairs(sf(a), sf(a), bound, false, false) {
                            out.push(RelationInstance::new(P708, &[a, i, j, r, h, k, s]));
                        }
                    }
                }
            }
        }
        if a + 1 < z {
            for i in range(mu(a)) {
                for j in range(mu(a + 1)) {
                    for h in range(mu(a + 1)) {
                        for k in range(mu(a + 2)) {
                            for (r, s) in pairs(se(a), se(a + 1), bound, false, false) {
                                out.push(RelationInstance::new(P709, &[a, i, j, r, h, k, s]));
                            }
                        }
                    }
                }
            }
            for i in range(mu(a + 1)) {
                for j in range(mu(a)) {
                    for h in range(mu(a + 2)) {
                        for k in range(mu(a + 1)) {
                            for (r, s) in pairs(sf(a), sf(a + 1), bound, false, false) {
                                out.push(RelationInstance::new(P710, &[a, i, j, r, h, k, s]));
                            }
                        }
                    }
                }
            }
        }
    }
    if z >= 4 {
        for a in 2..=z - 2 {
            // E: i∈a-1, f1,f2,h∈a, j,g1,g2∈a+1, k∈a+2
            for i in range(mu(a - 1)) {
                for f1 in range(mu(a)) {
                    for f2 in range(mu(a)) {
                        for j in range(mu(a + 1)) {
                            for h in range(mu(a)) {
                                if d.parity(a, h) == d.parity(a + 1, j) {
                                    continue;
                                }
                                for g1 in range(mu(a + 1)) {
                                    for g2 in range(mu(a + 1)) {
                                        for k in range(mu(a + 2)) {
                                            for (r, s) in pairs(se(a - 1), se(a + 1), bound, false, false) {
                                                out.push(RelationInstance::new(
                                                    P715,
                                                    &[a, i, f1, f2, j, h, g1, g2, k, r, s],
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            // F: i,j,g1∈a, f1∈a-1, f2,h,k∈a+1, g2∈a+2
            for i in range(mu(a)) {
                for f1 in range(mu(a - 1)) {
                    for f2 in range(mu(a + 1)) {
                        for j in range(mu(a)) {
                            for h in range(mu(a + 1)) {
                                if d.parity(a, j) == d.parity(a + 1, h) {
                                    continue;
                                }
                                for g1 in range(mu(a)) {
                                    for g2 in range(mu(a + 2)) {
                                        for k in range(mu(a + 1)) {
                                            for (r, s) in pairs(sf(a - 1), sf(a + 1), bound, false, false) {
                                                out.push(RelationInstance::new(
                                                    P716,
                                                    &[a, i, f1, f2, j, h, g1, g2, k, r, s],
                                                ));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Generator lookups and arithmetic over a source.
struct Ctx<'a> {
    src: &'a dyn GeneratorSource,
    alg: &'a SuperAlgebra,
    d: &'a ShapeData,
}

fn sign(odd: bool) -> Rational {
    Rational::sign(odd)
}

impl<'a> Ctx<'a> {
    fn g(&self, f: Family, a: usize, i: usize, j: usize, r: usize) -> Arc<SuperElement> {
        self.src.generator(&GenKey::new(f, a, i, j, r))
    }

    fn br(&self, x: &SuperElement, y: &SuperElement) -> SuperElement {
        self.alg.supercommutator(x, y)
    }

    /// `out += c · x · y`.
    fn mac(&self, out: &mut SuperElement, x: &SuperElement, y: &SuperElement, c: &Rational) {
        self.alg.mul_into(x, y, c, out);
    }

    fn p(&self, a: usize, i: usize) -> bool {
        self.d.parity(a, i)
    }
}

fn odd_sum(bits: &[bool]) -> bool {
    bits.iter().filter(|&&b| b).count() % 2 == 1
}

/// `LHS - RHS` of an instance.
pub fn evaluate(src: &dyn GeneratorSource, inst: &RelationInstance) -> SuperElement {
    use Family::*;
    use RelId::*;
    let ctx = Ctx { src, alg: src.algebra(), d: src.data() };
    let v = &inst.v;
    let one = Rational::ONE;
    let neg = Rational::from_int(-1);
    match inst.id {
        D401 | P701 => {
            let (a, i, j, prime) = if inst.id == D401 { (v[0], 1, 1, v[1]) } else { (v[0], v[1], v[2], v[3]) };
            let f = if prime == 1 { DPrime } else { D };
            let mut x = (*ctx.g(f, a, i, j, 0)).clone();
            if i == j {
                x.add_scalar(&neg);
            }
            x
        }
        D402 | P702 => {
            let (a, i, j, r) = if inst.id == D402 { (v[0], 1, 1, v[1]) } else { (v[0], v[1], v[2], v[3]) };
            let mut x = SuperElement::zero();
            for p in range(ctx.d.part(a)) {
                for t in 0..=r {
                    ctx.mac(&mut x, &ctx.g(D, a, i, p, t), &ctx.g(DPrime, a, p, j, r - t), &one);
                }
            }
            if r == 0 && i == j {
                x.add_scalar(&neg);
            }
            x
        }
        D403 => {
            let (a, r, b, s) = (v[0], v[1], v[2], v[3]);
            ctx.br(&ctx.g(D, a, 1, 1, r), &ctx.g(D, b, 1, 1, s))
        }
        P703 => {
            let (a, i, j, r, b, h, k, s) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
            let mut x = ctx.br(&ctx.g(D, a, i, j, r), &ctx.g(D, b, h, k, s));
            if a == b && r.min(s) > 0 {
                let (pi, pj, ph) = (ctx.p(a, i), ctx.p(a, j), ctx.p(a, h));
                let c = -sign(odd_sum(&[pi && pj, pi && ph, pj && ph]));
                for t in 0..r.min(s) {
                    ctx.mac(&mut x, &ctx.g(D, a, h, j, t), &ctx.g(D, a, i, k, r + s - 1 - t), &c);
                    ctx.mac(&mut x, &ctx.g(D, a, h, j, r + s - 1 - t), &ctx.g(D, a, i, k, t), &-c.clone());
                }
            }
            x
        }
        D404 => {
            let (a, r, b, s) = (v[0], v[1], v[2], v[3]);
            let mut x = ctx.br(&ctx.g(D, a, 1, 1, r), &ctx.g(E, b, 1, 1, s));
            let delta = (a == b) as i64 - (a == b + 1) as i64;
            if delta != 0 {
                let c = -(&sign(ctx.p(a, 1)) * &Rational::from_int(delta));
                for t in 0..r {
                    ctx.mac(&mut x, &ctx.g(D, a, 1, 1, t), &ctx.g(E, b, 1, 1, r + s - 1 - t), &c);
                }
            }
            x
        }
        P704 => {
            let (a, i, j, r, b, h, k, s) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
            let mut x = ctx.br(&ctx.g(D, a, i, j, r), &ctx.g(E, b, h, k, s));
            if a == b && h == j {
                let c = -sign(ctx.p(a, h) && ctx.p(a, j));
                for p in range(ctx.d.part(a)) {
                    for t in 0..r {
                        ctx.mac(&mut x, &ctx.g(D, a, i, p, t), &ctx.g(E, b, p, k, r + s - 1 - t), &c);
                    }
                }
            }
            if a == b + 1 {
                let (hb, ka, ja) = (ctx.p(b, h), ctx.p(a, k), ctx.p(a, j));
                let c = sign(odd_sum(&[hb && ka, hb && ja, ja && ka]));
                for t in 0..r {
                    ctx.mac(&mut x, &ctx.g(D, a, i, k, t), &ctx.g(E, b, h, j, r + s - 1 - t), &c);
                }
            }
            x
        }
        D405 => {
            let (a, r, b, s) = (v[0], v[1], v[2], v[3]);
            let mut x = ctx.br(&ctx.g(D, a, 1, 1, r), &ctx.g(F, b, 1, 1, s));
            let delta = (a == b + 1) as i64 - (a == b) as i64;
            if delta != 0 {
                let c = -(&sign(ctx.p(a, 1)) * &Rational::from_int(delta));
                for t in 0..r {
                    ctx.mac(&mut x, &ctx.g(F, b, 1, 1, r + s - 1 - t), &ctx.g(D, a, 1, 1, t), &c);
                }
            }
            x
        }
        P705 => {
            let (a, i, j, r, b, h, k, s) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
            let mut x = ctx.br(&ctx.g(D, a, i, j, r), &ctx.g(F, b, h, k, s));
            // The first term carries δ_{i,k}: its gl-level shadow is -δ_{k,i} e_{h,j}.
            if a == b && i == k {
                let (ia, ja, h1) = (ctx.p(a, i), ctx.p(a, j), ctx.p(a + 1, h));
                let c = sign(odd_sum(&[ia && ja, h1 && ia, h1 && ja]));
                for p in range(ctx.d.part(a)) {
                    for t in 0..r {
                        ctx.mac(&mut x, &ctx.g(F, b, h, p, r + s - 1 - t), &ctx.g(D, a, p, j, t), &c);
                    }
                }
            }
            if a == b + 1 {
                let (ha, kb, ja) = (ctx.p(a, h), ctx.p(b, k), ctx.p(a, j));
                let c = -sign(odd_sum(&[ha && kb, ha && ja, ja && kb]));
                for t in 0..r {
                    ctx.mac(&mut x, &ctx.g(F, b, i, k, r + s - 1 - t), &ctx.g(D, a, h, j, t), &c);
                }
            }
            x
        }
        D406 => {
            let (a, r, b, s) = (v[0], v[1], v[2], v[3]);
            let mut x = ctx.br(&ctx.g(E, a, 1, 1, r), &ctx.g(F, b, 1, 1, s));
            if a == b {
                let c = -sign(!ctx.p(a + 1, 1));
                for t in 0..r + s {
                    ctx.mac(&mut x, &ctx.g(DPrime, a, 1, 1, r + s - 1 - t), &ctx.g(D, a + 1, 1, 1, t), &c);
                }
            }
            x
        }
        P706 => {
            let (a, i, j, r, b, h, k, s) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
            let mut x = ctx.br(&ctx.g(E, a, i, j, r), &ctx.g(F, b, h, k, s));
            if a == b {
                let (h1, ka, j1) = (ctx.p(a + 1, h), ctx.p(a, k), ctx.p(a + 1, j));
                let c = -sign(!odd_sum(&[h1 && ka, j1 && ka, h1 && j1]));
                for t in 0..r + s {
                    ctx.mac(&mut x, &ctx.g(DPrime, a, i, k, r + s - 1 - t), &ctx.g(D, a + 1, h, j, t), &c);
                }
            }
            x
        }
        D407 | P707 => {
            let (a, i, j, r, h, k, s) =
                if inst.id == D407 { (v[0], 1, 1, v[1], 1, 1, v[2]) } else { (v[0], v[1], v[2], v[3], v[4], v[5], v[6]) };
            let mut x = ctx.br(&ctx.g(E, a, i, j, r), &ctx.g(E, a, h, k, s));
            let (ha, j1, k1) = (ctx.p(a, h), ctx.p(a + 1, j), ctx.p(a + 1, k));
            let c = sign(odd_sum(&[ha && j1, j1 && k1, ha && k1]));
            let lo = ctx.d.s(a, a + 1) + 1;
            for t in lo..s {
                ctx.mac(&mut x, &ctx.g(E, a, i, k, r + s - 1 - t), &ctx.g(E, a, h, j, t), &-c.clone());
            }
            for t in lo..r {
                ctx.mac(&mut x, &ctx.g(E, a, i, k, r + s - 1 - t), &ctx.g(E, a, h, j, t), &c);
            }
            x
        }
        D408 | P708 => {
            let (a, i, j, r, h, k, s) =
                if inst.id == D408 { (v[0], 1, 1, v[1], 1, 1, v[2]) } else { (v[0], v[1], v[2], v[3], v[4], v[5], v[6]) };
            let mut x = ctx.br(&ctx.g(F, a, i, j, r), &ctx.g(F, a, h, k, s));
            let (h1, ja, ka) = (ctx.p(a + 1, h), ctx.p(a, j), ctx.p(a, k));
            let c = sign(odd_sum(&[h1 && ja, ja && ka, h1 && ka]));
            let lo = ctx.d.s(a + 1, a) + 1;
            for t in lo..r {
                ctx.mac(&mut x, &ctx.g(F, a, i, k, r + s - 1 - t), &ctx.g(F, a, h, j, t), &-c.clone());
            }
            for t in lo..s {
                ctx.mac(&mut x, &ctx.g(F, a, i, k, r + s - 1 - t), &ctx.g(F, a, h, j, t), &c);
            }
            x
        }
        D409 | P709 => {
            let (a, i, j, r, h, k, s) =
                if inst.id == D409 { (v[0], 1, 1, v[1], 1, 1, v[2]) } else { (v[0], v[1], v[2], v[3], v[4], v[5], v[6]) };
            let mut x = ctx.br(&ctx.g(E, a, i, j, r + 1), &ctx.g(E, a + 1, h, k, s));
            x.sub_assign(&ctx.br(&ctx.g(E, a, i, j, r), &ctx.g(E, a + 1, h, k, s + 1)));
            if h == j {
                let c = -sign(ctx.p(a + 1, j) && ctx.p(a + 1, h));
                for q in range(ctx.d.part(a + 1)) {
                    ctx.mac(&mut x, &ctx.g(E, a, i, q, r), &ctx.g(E, a + 1, q, k, s), &c);
                }
            }
            x
        }
        D410 | P710 => {
            let (a, i, j, r, h, k, s) =
                if inst.id == D410 { (v[0], 1, 1, v[1], 1, 1, v[2]) } else { (v[0], v[1], v[2], v[3], v[4], v[5], v[6]) };
            let mut x = ctx.br(&ctx.g(F, a, i, j, r + 1), &ctx.g(F, a + 1, h, k, s));
            x.sub_assign(&ctx.br(&ctx.g(F, a, i, j, r), &ctx.g(F, a + 1, h, k, s + 1)));
            if i == k {
                let (i1, ja, h2) = (ctx.p(a + 1, i), ctx.p(a, j), ctx.p(a + 2, h));
                let c = sign(odd_sum(&[i1 && (ja != h2), ja && h2]));
                // The Drinfeld form is read with F_{a+1}^{(s)} on the left, as in the parabolic one.
                for q in range(ctx.d.part(a + 1)) {
                    ctx.mac(&mut x, &ctx.g(F, a + 1, h, q, s), &ctx.g(F, a, q, j, r), &c);
                }
            }
            x
        }
        D411 => ctx.br(&ctx.g(E, v[0], 1, 1, v[1]), &ctx.g(E, v[2], 1, 1, v[3])),
        D412 => ctx.br(&ctx.g(F, v[0], 1, 1, v[1]), &ctx.g(F, v[2], 1, 1, v[3])),
        P711 => ctx.br(&ctx.g(E, v[0], v[1], v[2], v[3]), &ctx.g(E, v[4], v[5], v[6], v[7])),
        P712 => ctx.br(&ctx.g(F, v[0], v[1], v[2], v[3]), &ctx.g(F, v[4], v[5], v[6], v[7])),
        D413 | D414 | P713 | P714 => {
            let fam = if matches!(inst.id, D413 | P713) { E } else { F };
            let (a, i, j, h, k, b, f, g, r, s, t) = if inst.id.is_d() {
                (v[0], 1, 1, 1, 1, v[1], 1, 1, v[2], v[3], v[4])
            } else {
                (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10])
            };
            let third = ctx.g(fam, b, f, g, t);
            let mut x = ctx.br(&ctx.g(fam, a, i, j, r), &ctx.br(&ctx.g(fam, a, h, k, s), &third));
            x.add_assign(&ctx.br(&ctx.g(fam, a, i, j, s), &ctx.br(&ctx.g(fam, a, h, k, r), &third)));
            x
        }
        D415 | D416 | P715 | P716 => {
            let fam = if matches!(inst.id, D415 | P715) { E } else { F };
            let (a, i, f1, f2, j, h, g1, g2, k, r, s) = if inst.id.is_d() {
                (v[0], 1, 1, 1, 1, 1, 1, 1, 1, v[1], v[2])
            } else {
                (v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10])
            };
            let mid = if fam == E { ctx.d.s(a, a + 1) + 1 } else { ctx.d.s(a + 1, a) + 1 };
            let left = ctx.br(&ctx.g(fam, a - 1, i, f1, r), &ctx.g(fam, a, f2, j, mid));
            if left.is_zero() {
                return left;
            }
            let right = ctx.br(&ctx.g(fam, a, h, g1, mid), &ctx.g(fam, a + 1, g2, k, s));
            ctx.br(&left, &right)
        }
    }
}

/// Largest superscript any instance at this bound asks for.
fn needed_rmax(d: &ShapeData, bound: usize) -> usize {
    let mut m = 0;
    for a in 1..d.z() {
        m = m.max(d.s(a, a + 1)).max(d.s(a + 1, a));
    }
    bound + m + 1
}

/// Evaluate instances (in parallel when asked) and merge in instance order.
pub fn run_instances(src: &dyn GeneratorSource, insts: &[RelationInstance], mode: Mode) -> Vec<CheckResult> {
    let alg = src.algebra();
    mode.map(insts, |inst| {
        let res = evaluate(src, inst);
        CheckResult::new(inst.check_id(), inst.params()).with_residual(alg, &res)
    })
}

fn family_coverage(insts: &[RelationInstance], drinfeld: bool, out: &mut Vec<CheckResult>) {
    for &id in RelId::ALL {
        if id.is_d() == drinfeld && !insts.iter().any(|x| x.id == id) {
            out.push(CheckResult::skip(id.name(), "no instance within the index ranges and degree bound"));
        }
    }
}

/// Relations `(p701)-(p716)` for the source's shape.
pub fn verify_p_family(src: &dyn GeneratorSource, bound: usize, mode: Mode) -> Vec<CheckResult> {
    let d = src.data();
    src.prefetch(&d.all_keys(needed_rmax(d, bound)), mode);
    let insts = enumerate_p(d, bound);
    let mut out = run_instances(src, &insts, mode);
    family_coverage(&insts, false, &mut out);
    out
}

/// Relations `(d401)-(d416)`; the source must use the shape `1^{m+n}`.
pub fn verify_d_family(src: &dyn GeneratorSource, bound: usize, mode: Mode) -> Vec<CheckResult> {
    let d = src.data();
    assert!(d.shape.parts().iter().all(|&p| p == 1), "Drinfeld relations need the shape 1^(m+n)");
    src.prefetch(&d.all_keys(needed_rmax(d, bound)), mode);
    let insts = enumerate_d(d, bound);
    let mut out = run_instances(src, &insts, mode);
    family_coverage(&insts, true, &mut out);
    out
}

/// Both relation families on a pyramid: parabolic ones for `shape`
/// (minimal when `None`), Drinfeld ones for `1^{m+n}`.
pub fn verify_all_relations(
    p: &Pyramid,
    shape: Option<CompositionShape>,
    bound: usize,
    mode: Mode,
) -> Result<VerificationReport, crate::invariants::GeneratorError> {
    let start = Instant::now();
    let cache = Arc::new(TCache::new(p.clone(), SuperAlgebra::for_pyramid(p)));
    let shape = shape.unwrap_or_else(|| p.shift_matrix().minimal_shape());
    let par = ComputedGenerators::with_cache(cache.clone(), shape)?;
    let ones = ComputedGenerators::with_cache(cache, CompositionShape::ones(p.height()))?;
    let mut rep = VerificationReport::new(p, bound);
    rep.checks.extend(verify_d_family(&ones, bound, mode));
    rep.checks.extend(verify_p_family(&par, bound, mode));
    rep.timing.push(("relations".into(), start.elapsed()));
    Ok(rep)
}
