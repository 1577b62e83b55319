//! JSON surfaces: pyramid summaries and generator dumps that can be read back.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraError, SuperAlgebra, SuperElement};
use crate::exec::Mode;
use crate::invariants::{Family, GenKey, GeneratorSource};
use crate::pyramid::Pyramid;

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error("malformed dump: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {index} ({label}): {source}")]
    Element { index: usize, label: String, source: AlgebraError },
    #[error("entry {index}: {reason}")]
    Key { index: usize, reason: String },
}

/// One dumped generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub family: Family,
    pub a: usize,
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub element: String,
}

impl DumpEntry {
    pub fn key(&self) -> GenKey {
        GenKey::new(self.family, self.a, self.i, self.j, self.r)
    }
}

/// Every generator with superscript `<= rmax`, in key order.
pub fn generator_dump(src: &dyn GeneratorSource, rmax: usize, mode: Mode) -> Vec<DumpEntry> {
    let keys = src.data().all_keys(rmax);
    src.prefetch(&keys, mode);
    let alg = src.algebra();
    mode.map(&keys, |k| DumpEntry {
        family: k.family,
        a: k.a,
        i: k.i,
        j: k.j,
        r: k.r,
        element: alg.format(&src.generator(k)),
    })
}

/// Read a dump back against `src`'s shape, rejecting keys the shape does not have.
pub fn parse_dump(src: &dyn GeneratorSource, text: &str) -> Result<FxHashMap<GenKey, SuperElement>, DumpError> {
    let entries: Vec<DumpEntry> = serde_json::from_str(text)?;
    let alg = src.algebra();
    let mut out = FxHashMap::default();
    for (index, e) in entries.iter().enumerate() {
        let k = e.key();
        src.data().check(&k).map_err(|err| DumpError::Key { index, reason: err.to_string() })?;
        let x = alg
            .parse(&e.element)
            .map_err(|source| DumpError::Element { index, label: k.label(), source })?;
        out.insert(k, x);
    }
    Ok(out)
}

fn sum_of(alg: &SuperAlgebra, pairs: &[(usize, usize)]) -> SuperElement {
    let mut x = SuperElement::zero();
    for &(i, j) in pairs {
        x.add_assign(&alg.e(i, j));
    }
    x
}

/// Triple, `e_π`, `h_π`, `ρ`, row lengths and the centralizer dimension.
pub fn describe(p: &Pyramid) -> Value {
    let alg = SuperAlgebra::for_pyramid(p);
    let e = sum_of(&alg, &p.adjacent_pairs());
    let basis = p.centralizer_basis();
    let mu = p.shift_matrix().minimal_shape();
    json!({
        "pyramid": p.to_json(),
        "rows": p.rows().iter().map(|r| json!({"length": r.length, "label": r.label.to_string(), "offset": r.offset})).collect::<Vec<_>>(),
        "m": p.m(),
        "n": p.n(),
        "M": p.big_m(),
        "N": p.big_n(),
        "e": alg.format(&e),
        "h": p.h_diagonal(),
        "rho": p.rho(),
        "p": p.p_tuple(),
        "minimal_shape": mu.parts(),
        "centralizer_dim": basis.len(),
    })
}
