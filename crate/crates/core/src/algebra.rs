//! Exact arithmetic in `U(gl_{M|N})` with a PBW normal form.
//!
//! Generators `e_{i,j}` are numbered so that every generator of `p`
//! (`col(i) <= col(j)`) precedes every generator of `m`; within each part the
//! order is lexicographic in `(i, j)`. A monomial is a nondecreasing list of
//! generator ids, so `pr_χ` only has to read off the `m`-tail.

use std::fmt;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::pyramid::Pyramid;
use crate::rational::Rational;

pub type GenId = u16;
pub type Monomial = SmallVec<[GenId; 8]>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("generator id {0} does not belong to this algebra")]
    ForeignGenerator(usize),
    #[error("factor {0} of a monomial is not in m")]
    NotInM(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A basis vector of the natural module `C^{M|N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisVector {
    pub odd: bool,
    pub col: usize,
    pub row: usize,
    pub name: String,
}

#[derive(Clone, Debug)]
pub struct GenInfo {
    pub i: usize,
    pub j: usize,
    pub odd: bool,
    pub in_p: bool,
    pub degree: i64,
    /// `χ(e_{i,j})` for generators of `m`, zero otherwise.
    pub chi: i8,
}

/// `U(gl_{M|N})` together with the data fixing `p`, `m`, `χ` and the `ẽ` shift.
#[derive(Clone, Debug)]
pub struct SuperAlgebra {
    basis: Vec<BasisVector>,
    gens: Vec<GenInfo>,
    index: Vec<GenId>,
    /// Constant added to `e_{i,i}` inside `ẽ_{i,i}` (before the column sign).
    tilde_shift: Vec<Rational>,
}

impl SuperAlgebra {
    /// Build from basis data; `chi_pairs` lists `(i, j)` with `χ(e_{i,j}) = (-1)^{pa(i)}`.
    pub fn new(basis: Vec<BasisVector>, tilde_shift: Vec<Rational>, chi_pairs: &[(usize, usize)]) -> Self {
        let n = basis.len();
        assert!(n * n < GenId::MAX as usize, "algebra too large");
        assert_eq!(tilde_shift.len(), n);
        let mut pairs: Vec<(bool, usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (basis[i].col > basis[j].col, i, j))
            .collect();
        pairs.sort();
        let mut index = vec![0; n * n];
        let mut gens = Vec::with_capacity(n * n);
        for (id, &(in_m, i, j)) in pairs.iter().enumerate() {
            index[i * n + j] = id as GenId;
            let chi = if chi_pairs.contains(&(i, j)) {
                if basis[i].odd {
                    -1
                } else {
                    1
                }
            } else {
                0
            };
            gens.push(GenInfo {
                i,
                j,
                odd: basis[i].odd != basis[j].odd,
                in_p: !in_m,
                degree: basis[j].col as i64 - basis[i].col as i64 + 1,
                chi,
            });
        }
        Self { basis, gens, index, tilde_shift }
    }

    /// `U(gl_{M|N})` for a pyramid, with `ρ`-shifted `ẽ` and the character `χ`.
    pub fn for_pyramid(p: &Pyramid) -> Self {
        let rho = p.rho();
        let basis: Vec<BasisVector> = p
            .cells()
            .iter()
            .map(|c| BasisVector { odd: c.odd, col: c.col, row: c.row, name: c.name() })
            .collect();
        let shift = p
            .cells()
            .iter()
            .map(|c| {
                let r = rho[c.col - 1];
                Rational::from_int(if c.odd { -r } else { r })
            })
            .collect();
        // χ(e_{i,j}) = str(e_{i,j} e_π) is nonzero exactly when i is the right neighbour of j.
        let chi: Vec<(usize, usize)> = p.adjacent_pairs().into_iter().map(|(l, r)| (r, l)).collect();
        Self::new(basis, shift, &chi)
    }

    /// `U(gl_{p|q})` with all generators in `p`; `ẽ_{f,f} = e_{f,f} + shift[f]`.
    pub fn plain(parities: &[bool], shift: Vec<Rational>) -> Self {
        let basis = parities
            .iter()
            .enumerate()
            .map(|(k, &odd)| BasisVector { odd, col: 1, row: k + 1, name: (k + 1).to_string() })
            .collect();
        Self::new(basis, shift, &[])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisVector] {
        &self.basis
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn gen(&self, id: GenId) -> &GenInfo {
        &self.gens[id as usize]
    }

    /// Id of `e_{i,j}`.
    pub fn gen_id(&self, i: usize, j: usize) -> GenId {
        self.index[i * self.basis.len() + j]
    }

    pub fn e(&self, i: usize, j: usize) -> SuperElement {
        SuperElement::monomial(Monomial::from_slice(&[self.gen_id(i, j)]), Rational::ONE)
    }

    /// `ẽ_{i,j} = (-1)^{col(j)-col(i)} (e_{i,j} + δ_{i,j} shift_i)`.
    pub fn e_tilde(&self, i: usize, j: usize) -> SuperElement {
        let mut x = self.e(i, j);
        if i == j {
            x.add_scalar(&self.tilde_shift[i]);
        }
        let flip = (self.basis[j].col as i64 - self.basis[i].col as i64).rem_euclid(2) == 1;
        if flip {
            x.negate();
        }
        x
    }

    pub fn tilde_shift(&self, i: usize) -> &Rational {
        &self.tilde_shift[i]
    }

    fn check(&self, g: GenId) -> Result<(), AlgebraError> {
        if (g as usize) < self.gens.len() {
            Ok(())
        } else {
            Err(AlgebraError::ForeignGenerator(g as usize))
        }
    }

    /// `[g1, g2]` as a short list of `(generator, ±1)`.
    fn bracket_gens(&self, a: GenId, b: GenId) -> SmallVec<[(GenId, i8); 2]> {
        let (x, y) = (&self.gens[a as usize], &self.gens[b as usize]);
        let mut out: SmallVec<[(GenId, i8); 2]> = SmallVec::new();
        if x.j == y.i {
            out.push((self.gen_id(x.i, y.j), 1));
        }
        if y.j == x.i {
            let s = if x.odd && y.odd { 1 } else { -1 };
            out.push((self.gen_id(y.i, x.j), s));
        }
        // Two terms coincide only on the diagonal; merge them.
        if out.len() == 2 && out[0].0 == out[1].0 {
            let c = out[0].1 + out[1].1;
            out.clear();
            if c != 0 {
                out.push((self.gen_id(x.i, y.j), c));
            }
        }
        out
    }

    pub fn monomial_odd(&self, m: &[GenId]) -> bool {
        m.iter().filter(|&&g| self.gens[g as usize].odd).count() % 2 == 1
    }

    pub fn monomial_degree(&self, m: &[GenId]) -> i64 {
        m.iter().map(|&g| self.gens[g as usize].degree).sum()
    }

    /// `out += coeff * (prefix · g)` in normal form; `prefix` must be sorted.
    fn push_right(&self, prefix: &[GenId], g: GenId, coeff: &Rational, out: &mut SuperElement) {
        let k = prefix.len();
        if k == 0 || prefix[k - 1] < g {
            let mut m = Monomial::from_slice(prefix);
            m.push(g);
            out.add_term(m, coeff);
            return;
        }
        let x = prefix[k - 1];
        let rest = &prefix[..k - 1];
        if x == g {
            if !self.gens[g as usize].odd {
                let mut m = Monomial::from_slice(prefix);
                m.push(g);
                out.add_term(m, coeff);
            } else {
                // x·x = ½[x,x]
                let half = coeff * &Rational::new(1, 2);
                for (y, c) in self.bracket_gens(x, x) {
                    self.push_right(rest, y, &(&half * &Rational::from_int(c as i64)), out);
                }
            }
            return;
        }
        // rest·x·g = ± rest·g·x + rest·[x,g]
        let both_odd = self.gens[x as usize].odd && self.gens[g as usize].odd;
        let swapped = if both_odd { -coeff.clone() } else { coeff.clone() };
        let mut tmp = SuperElement::zero();
        self.push_right(rest, g, &swapped, &mut tmp);
        for (m, c) in tmp.terms {
            self.push_right(&m, x, &c, out);
        }
        for (y, c) in self.bracket_gens(x, g) {
            self.push_right(rest, y, &(coeff * &Rational::from_int(c as i64)), out);
        }
    }

    fn mul_monomials(&self, a: &[GenId], b: &[GenId], coeff: &Rational, out: &mut SuperElement) {
        if b.is_empty() {
            out.add_term(Monomial::from_slice(a), coeff);
            return;
        }
        if a.is_empty() || a[a.len() - 1] < b[0] {
            let mut m = Monomial::from_slice(a);
            m.extend_from_slice(b);
            out.add_term(m, coeff);
            return;
        }
        let mut tmp = SuperElement::zero();
        self.push_right(a, b[0], coeff, &mut tmp);
        for (m, c) in tmp.terms {
            self.mul_monomials(&m, &b[1..], &c, out);
        }
    }

    /// Normal form of `coeff · w_1 w_2 ... w_k`.
    pub fn normal_form(&self, word: &[GenId], coeff: &Rational) -> Result<SuperElement, AlgebraError> {
        for &g in word {
            self.check(g)?;
        }
        let mut acc = SuperElement::scalar(coeff.clone());
        for &g in word {
            let mut next = SuperElement::zero();
            for (m, c) in &acc.terms {
                self.push_right(m, g, c, &mut next);
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn mul(&self, x: &SuperElement, y: &SuperElement) -> SuperElement {
        let mut out = SuperElement::zero();
        for (a, ca) in &x.terms {
            for (b, cb) in &y.terms {
                self.mul_monomials(a, b, &(ca * cb), &mut out);
            }
        }
        out
    }

    /// `out += coeff · x · y`.
    pub fn mul_into(&self, x: &SuperElement, y: &SuperElement, coeff: &Rational, out: &mut SuperElement) {
        for (a, ca) in &x.terms {
            let c1 = ca * coeff;
            for (b, cb) in &y.terms {
                self.mul_monomials(a, b, &(&c1 * cb), out);
            }
        }
    }

    /// `out += coeff · x · e_g`.
    pub fn mul_gen_into(&self, x: &SuperElement, g: GenId, coeff: &Rational, out: &mut SuperElement) {
        for (m, c) in &x.terms {
            self.push_right(m, g, &(c * coeff), out);
        }
    }

    pub fn product(&self, xs: &[&SuperElement]) -> SuperElement {
        let mut acc = SuperElement::one();
        for x in xs {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// Split into even and odd parts.
    pub fn parity_parts(&self, x: &SuperElement) -> (SuperElement, SuperElement) {
        let mut even = SuperElement::zero();
        let mut odd = SuperElement::zero();
        for (m, c) in &x.terms {
            if self.monomial_odd(m) {
                odd.add_term(m.clone(), c);
            } else {
                even.add_term(m.clone(), c);
            }
        }
        (even, odd)
    }

    /// Parity of a homogeneous element (`None` if mixed; zero counts as even).
    pub fn parity(&self, x: &SuperElement) -> Option<bool> {
        let mut seen = None;
        for m in x.terms.keys() {
            let p = self.monomial_odd(m);
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        Some(seen.unwrap_or(false))
    }

    /// `[x, y] = xy - (-1)^{|x||y|} yx`, extended bilinearly over parity parts.
    pub fn supercommutator(&self, x: &SuperElement, y: &SuperElement) -> SuperElement {
        let (x0, x1) = self.parity_parts(x);
        let (y0, y1) = self.parity_parts(y);
        let mut out = SuperElement::zero();
        for (xp, px) in [(&x0, false), (&x1, true)] {
            if xp.is_zero() {
                continue;
            }
            for (yp, py) in [(&y0, false), (&y1, true)] {
                if yp.is_zero() {
                    continue;
                }
                self.mul_into(xp, yp, &Rational::ONE, &mut out);
                let s = Rational::sign(!(px && py));
                self.mul_into(yp, xp, &s, &mut out);
            }
        }
        out
    }

    /// Kazhdan degree: the maximum summed generator degree, `None` for zero.
    pub fn degree(&self, x: &SuperElement) -> Option<i64> {
        x.terms.keys().map(|m| self.monomial_degree(m)).max()
    }

    /// `χ` on an element of `U(m)`.
    pub fn chi(&self, x: &SuperElement) -> Result<Rational, AlgebraError> {
        let mut total = Rational::ZERO;
        for (m, c) in &x.terms {
            let mut v = c.clone();
            for &g in m {
                let info = &self.gens[g as usize];
                if info.in_p {
                    return Err(AlgebraError::NotInM(self.gen_name(g)));
                }
                v = &v * &Rational::from_int(info.chi as i64);
            }
            total += &v;
        }
        Ok(total)
    }

    /// `pr_χ`: each normal-ordered `p·m̄` maps to `χ(m̄)·p`.
    pub fn pr_chi(&self, x: &SuperElement) -> SuperElement {
        let mut out = SuperElement::zero();
        for (m, c) in &x.terms {
            let split = m.iter().position(|&g| !self.gens[g as usize].in_p).unwrap_or(m.len());
            let mut v = c.clone();
            for &g in &m[split..] {
                let chi = self.gens[g as usize].chi;
                if chi == 0 {
                    v = Rational::ZERO;
                    break;
                }
                if chi < 0 {
                    v = -v;
                }
            }
            if !v.is_zero() {
                out.add_term(Monomial::from_slice(&m[..split]), &v);
            }
        }
        out
    }

    /// `a · y = pr_χ([a, y])` for `a ∈ m`.
    pub fn twisted_action(&self, a: &SuperElement, y: &SuperElement) -> Result<SuperElement, AlgebraError> {
        for m in a.terms.keys() {
            if m.len() != 1 || self.gens[m[0] as usize].in_p {
                return Err(AlgebraError::NotInM(self.monomial_name(m)));
            }
        }
        Ok(self.pr_chi(&self.supercommutator(a, y)))
    }

    /// Every monomial lies in `U(p)`.
    pub fn in_p(&self, x: &SuperElement) -> bool {
        x.terms.keys().all(|m| m.iter().all(|&g| self.gens[g as usize].in_p))
    }

    pub fn gen_name(&self, g: GenId) -> String {
        let info = &self.gens[g as usize];
        format!("e({},{})", self.basis[info.i].name, self.basis[info.j].name)
    }

    pub fn monomial_name(&self, m: &[GenId]) -> String {
        m.iter().map(|&g| self.gen_name(g)).collect::<Vec<_>>().join("*")
    }

    /// Deterministic text rendering: `coeff * e(i,j)*e(h,k) + ...`.
    pub fn format(&self, x: &SuperElement) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in x.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                out.push_str(&format!("{} * {}", mag, self.monomial_name(&m)));
            }
        }
        out
    }

    fn basis_by_name(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// Parse the text format produced by [`SuperAlgebra::format`]; products are normalized.
    pub fn parse(&self, s: &str) -> Result<SuperElement, AlgebraError> {
        let err = |m: &str| AlgebraError::Parse(format!("{m} in `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut depth = 0;
        for (k, ch) in compact.chars().enumerate() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch)
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch)
                }
                '+' | '-' if depth == 0 => {
                    if cur.is_empty() && terms.is_empty() && k == 0 {
                        neg = ch == '-';
                    } else if cur.is_empty() {
                        return Err(err("dangling sign"));
                    } else {
                        terms.push((neg, std::mem::take(&mut cur)));
                        neg = ch == '-';
                    }
                }
                _ => cur.push(ch),
            }
        }
        if cur.is_empty() {
            return Err(err("dangling sign"));
        }
        terms.push((neg, cur));
        let mut out = SuperElement::zero();
        for (neg, t) in terms {
            let mut coeff = Rational::ONE;
            let mut word = Vec::new();
            for factor in t.split('*') {
                if let Some(inner) = factor.strip_prefix("e(").and_then(|f| f.strip_suffix(')')) {
                    let (a, b) = inner.split_once(',').ok_or_else(|| err("bad factor"))?;
                    let i = self.basis_by_name(a).ok_or_else(|| err("unknown index"))?;
                    let j = self.basis_by_name(b).ok_or_else(|| err("unknown index"))?;
                    word.push(self.gen_id(i, j));
                } else {
                    let q: Rational = factor.parse().map_err(|_| err("bad coefficient"))?;
                    coeff = &coeff * &q;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_assign(&self.normal_form(&word, &coeff)?);
        }
        Ok(out)
    }
}

/// A finite linear combination of PBW monomials.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SuperElement {
    terms: FxHashMap<Monomial, Rational>,
}

impl SuperElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Rational::ONE)
    }

    pub fn scalar(c: Rational) -> Self {
        Self::monomial(Monomial::new(), c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut x = Self::zero();
        x.add_term(m, &c);
        x
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn add_scalar(&mut self, c: &Rational) {
        self.add_term(Monomial::new(), c);
    }

    pub fn add_assign(&mut self, other: &SuperElement) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &SuperElement, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &(c * s));
        }
    }

    pub fn sub_assign(&mut self, other: &SuperElement) {
        self.add_scaled(other, &Rational::from_int(-1));
    }

    pub fn negate(&mut self) {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
    }

    pub fn scaled(&self, s: &Rational) -> SuperElement {
        let mut out = SuperElement::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn coeff(&self, m: &[GenId]) -> Rational {
        self.terms.get(m).cloned().unwrap_or(Rational::ZERO)
    }

    pub fn constant(&self) -> Rational {
        self.coeff(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms ordered by `(length, monomial)`.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        v
    }

    /// Rewrite every monomial through `f` (used by embeddings between algebras).
    pub fn map_terms(&self, f: impl Fn(&Monomial) -> Monomial) -> SuperElement {
        let mut out = SuperElement::zero();
        for (m, c) in &self.terms {
            out.add_term(f(m), c);
        }
        out
    }
}

impl fmt::Debug for SuperElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| format!("{c}*{m:?}"))
            .collect();
        write!(f, "[{}]", parts.join(" + "))
    }
}

/// `U(left) ⊗ U(right)` with the super sign rule.
#[derive(Clone, Debug)]
pub struct TensorAlgebra {
    pub left: SuperAlgebra,
    pub right: SuperAlgebra,
}

#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct TensorElement {
    terms: FxHashMap<(Monomial, Monomial), Rational>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: Monomial, b: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let v = self.terms.get(&key).map(|x| x + c).unwrap_or_else(|| c.clone());
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn add_assign(&mut self, other: &TensorElement) {
        for ((a, b), c) in &other.terms {
            self.add_term(a.clone(), b.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &TensorElement, s: &Rational) {
        for ((a, b), c) in &other.terms {
            self.add_term(a.clone(), b.clone(), &(c * s));
        }
    }

    pub fn sub_assign(&mut self, other: &TensorElement) {
        self.add_scaled(other, &Rational::from_int(-1));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &Rational)> {
        self.terms.iter()
    }
}

impl TensorAlgebra {
    pub fn new(left: SuperAlgebra, right: SuperAlgebra) -> Self {
        Self { left, right }
    }

    /// `x ⊗ y`.
    pub fn tensor(&self, x: &SuperElement, y: &SuperElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_term(a.clone(), b.clone(), &(ca * cb));
            }
        }
        out
    }

    /// `(a ⊗ b)(c ⊗ d) = (-1)^{|b||c|} ac ⊗ bd`.
    pub fn mul(&self, x: &TensorElement, y: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((a, b), c1) in &x.terms {
            let bo = self.right.monomial_odd(b);
            for ((c, d), c2) in &y.terms {
                let co = self.left.monomial_odd(c);
                let coeff = &(c1 * c2) * &Rational::sign(bo && co);
                let mut ac = SuperElement::zero();
                self.left.mul_monomials(a, c, &coeff, &mut ac);
                if ac.is_zero() {
                    continue;
                }
                let mut bd = SuperElement::zero();
                self.right.mul_monomials(b, d, &Rational::ONE, &mut bd);
                for (m1, k1) in ac.iter() {
                    for (m2, k2) in bd.iter() {
                        out.add_term(m1.clone(), m2.clone(), &(k1 * k2));
                    }
                }
            }
        }
        out
    }

    pub fn parity_parts(&self, x: &TensorElement) -> (TensorElement, TensorElement) {
        let mut even = TensorElement::zero();
        let mut odd = TensorElement::zero();
        for ((a, b), c) in &x.terms {
            if self.left.monomial_odd(a) != self.right.monomial_odd(b) {
                odd.add_term(a.clone(), b.clone(), c);
            } else {
                even.add_term(a.clone(), b.clone(), c);
            }
        }
        (even, odd)
    }

    pub fn supercommutator(&self, x: &TensorElement, y: &TensorElement) -> TensorElement {
        let (x0, x1) = self.parity_parts(x);
        let (y0, y1) = self.parity_parts(y);
        let mut out = TensorElement::zero();
        for (xp, px) in [(&x0, false), (&x1, true)] {
            for (yp, py) in [(&y0, false), (&y1, true)] {
                if xp.is_zero() || yp.is_zero() {
                    continue;
                }
                out.add_assign(&self.mul(xp, yp));
                out.add_scaled(&self.mul(yp, xp), &Rational::sign(!(px && py)));
            }
        }
        out
    }

    pub fn format(&self, x: &TensorElement) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut v: Vec<_> = x.terms.iter().collect();
        v.sort_by(|p, q| p.0.cmp(q.0));
        v.iter()
            .map(|((a, b), c)| {
                let l = if a.is_empty() { "1".into() } else { self.left.monomial_name(a) };
                let r = if b.is_empty() { "1".into() } else { self.right.monomial_name(b) };
                format!("{c} * {l} (x) {r}")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pyramid::{ShiftMatrix, ZeroOneSequence};

    fn p1() -> SuperAlgebra {
        let s = ShiftMatrix::new(vec![vec![0, 1], vec![0, 0]]).unwrap();
        let p = Pyramid::from_triple(&s, 2, &ZeroOneSequence::parse("01").unwrap()).unwrap();
        SuperAlgebra::for_pyramid(&p)
    }

    #[test]
    fn spec_normal_form_examples() {
        let a = p1();
        // indices: 0 = 1, 1 = ~1, 2 = ~2
        let x = a.normal_form(&[a.gen_id(0, 0), a.gen_id(1, 1)], &Rational::ONE).unwrap();
        assert_eq!(a.format(&x), "1 * e(1,1)*e(~1,~1)");
        let sq = a.normal_form(&[a.gen_id(0, 1), a.gen_id(0, 1)], &Rational::ONE).unwrap();
        assert!(sq.is_zero());
        let y = a.normal_form(&[a.gen_id(1, 0), a.gen_id(0, 1)], &Rational::ONE).unwrap();
        let expect = a.parse("-e(1,~1)*e(~1,1) + e(~1,~1) + e(1,1)").unwrap();
        assert_eq!(y, expect);
    }

    #[test]
    fn format_parse_round_trip() {
        let a = p1();
        let x = a.parse("3/2 * e(~1,~2)*e(1,1) - 2 + e(~2,~1)").unwrap();
        let s = a.format(&x);
        assert_eq!(a.parse(&s).unwrap(), x);
        assert!(a.parse("e(1,~9)").is_err());
        assert!(a.parse("2 * e(1,1) +").is_err());
    }

    #[test]
    fn p_before_m() {
        let a = p1();
        for id in 0..a.num_gens() as GenId {
            let g = a.gen(id);
            if id > 0 {
                assert!(a.gen(id - 1).in_p || !g.in_p);
            }
            assert_eq!(g.in_p, a.basis()[g.i].col <= a.basis()[g.j].col);
        }
    }

    #[test]
    fn chi_values_p1() {
        let a = p1();
        // χ(e_{~2,~1}) = (-1)^{pa(~2)} = -1, so χ(ẽ_{~2,~1}) = +1.
        assert_eq!(a.chi(&a.e_tilde(2, 1)).unwrap(), Rational::ONE);
        assert_eq!(a.chi(&a.e_tilde(2, 0)).unwrap(), Rational::ZERO);
        assert!(a.chi(&a.e(0, 0)).is_err());
        let prod = a.mul(&a.e_tilde(2, 1), &a.e_tilde(2, 0));
        assert_eq!(a.chi(&prod).unwrap(), Rational::ZERO);
        let y = a.mul(&a.e(2, 0), &a.e(0, 0));
        assert!(a.pr_chi(&y).is_zero());
        assert!(a.twisted_action(&a.e(2, 1), &SuperElement::one()).unwrap().is_zero());
        assert!(a.twisted_action(&a.e(0, 0), &SuperElement::one()).is_err());
    }

    #[test]
    fn foreign_generator_rejected() {
        let a = p1();
        assert!(a.normal_form(&[99], &Rational::ONE).is_err());
    }

    #[test]
    fn tensor_sign_rule() {
        let a = SuperAlgebra::plain(&[false, true], vec![Rational::ZERO; 2]);
        let t = TensorAlgebra::new(a.clone(), a.clone());
        let odd = a.e(0, 1);
        let x = t.tensor(&SuperElement::one(), &odd);
        let y = t.tensor(&odd, &SuperElement::one());
        let xy = t.mul(&x, &y);
        let yx = t.mul(&y, &x);
        let mut s = xy.clone();
        s.add_assign(&yx);
        assert!(s.is_zero());
        assert!(t.supercommutator(&x, &y).is_zero());
    }
}
