//! Verification suites and their reports.

mod checks;
mod psi;
mod relations;

use std::time::Duration;

use serde_json::{json, Map, Value};

use crate::algebra::{SuperAlgebra, SuperElement, TensorAlgebra, TensorElement};
use crate::invariants::{GenKey, GeneratorError};
use crate::pyramid::{Pyramid, PyramidError};

pub use checks::{
    evaluation_consistency, iota_consistency, k_independence_check, t_series_check, pbw_alphabet, pbw_rank_check,
    pbw_rank_table, shape_refinement_check, truncation_check, verify_m_invariance, PbwLetter,
};
pub use psi::{baby_comult_consistency, detect_case, psi_check, Case, PsiMap};
pub use relations::{
    enumerate, evaluate, run_instances, verify_all_relations, verify_d_family, verify_p_family, RelId,
    RelationInstance,
};

/// Inputs a suite refuses to run on.
#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Pyramid(#[from] PyramidError),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub params: Vec<(String, Value)>,
    pub status: Status,
    pub residual: Option<String>,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, params: Vec<(String, Value)>) -> Self {
        Self { id: id.into(), params, status: Status::Pass, residual: None }
    }

    pub fn skip(id: impl Into<String>, reason: &str) -> Self {
        let mut c = Self::new(id, vec![("reason".into(), json!(reason))]);
        c.status = Status::Skip;
        c
    }

    /// Pass iff `residual` is zero.
    pub fn with_residual(mut self, alg: &SuperAlgebra, residual: &SuperElement) -> Self {
        if residual.is_zero() {
            self.status = Status::Pass;
            self.residual = None;
        } else {
            self.status = Status::Fail;
            self.residual = Some(leading_terms(alg, residual));
        }
        self
    }

    pub fn with_tensor_residual(mut self, alg: &TensorAlgebra, residual: &TensorElement) -> Self {
        if residual.is_zero() {
            self.status = Status::Pass;
            self.residual = None;
        } else {
            self.status = Status::Fail;
            let text = alg.format(residual);
            self.residual = Some(format!("{} terms: {}", residual.len(), truncate(&text, 600)));
        }
        self
    }

    pub fn with_outcome(mut self, ok: bool, detail: impl Into<String>) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self.residual = if ok { None } else { Some(detail.into()) };
        self
    }

    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), v.clone());
        }
        json!({
            "id": self.id,
            "params": Value::Object(params),
            "status": self.status.as_str(),
            "residual": self.residual,
        })
    }
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        let t: String = s.chars().take(n).collect();
        format!("{t} ...")
    }
}

/// The five highest-degree terms of a nonzero residual.
fn leading_terms(alg: &SuperAlgebra, x: &SuperElement) -> String {
    let mut terms = x.sorted_terms();
    terms.sort_by(|(a, _), (b, _)| alg.monomial_degree(b).cmp(&alg.monomial_degree(a)).then(a.cmp(b)));
    let total = terms.len();
    let mut lead = SuperElement::zero();
    for (m, c) in terms.into_iter().take(5) {
        lead.add_term(m, &c);
    }
    format!("{} terms, leading: {}", total, alg.format(&lead))
}

/// `params` naming a generator.
pub fn key_params(k: &GenKey) -> Vec<(String, Value)> {
    vec![
        ("family".into(), json!(k.family.name())),
        ("a".into(), json!(k.a)),
        ("i".into(), json!(k.i)),
        ("j".into(), json!(k.j)),
        ("r".into(), json!(k.r)),
    ]
}

/// Build `params` from `(name, integer)` pairs.
pub fn int_params(pairs: &[(&str, usize)]) -> Vec<(String, Value)> {
    pairs.iter().map(|(k, v)| (k.to_string(), json!(v))).collect()
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub pyramid: Value,
    pub bound: usize,
    pub checks: Vec<CheckResult>,
    pub timing: Vec<(String, Duration)>,
}

impl VerificationReport {
    pub fn new(p: &Pyramid, bound: usize) -> Self {
        Self { pyramid: p.to_json(), bound, checks: Vec::new(), timing: Vec::new() }
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.timing.extend(other.timing);
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    /// No failures (skips allowed).
    pub fn ok(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    /// At least one pass and no failures.
    pub fn all_pass(&self) -> bool {
        self.ok() && self.count(Status::Pass) > 0
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    /// Checks whose id starts with `prefix`.
    pub fn with_prefix(&self, prefix: &str) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.id.starts_with(prefix)).collect()
    }

    /// The diffable part, without timing.
    pub fn to_json(&self) -> Value {
        json!({
            "pyramid": self.pyramid,
            "bound": self.bound,
            "checks": self.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn timing_json(&self) -> Value {
        let mut m = Map::new();
        for (k, d) in &self.timing {
            m.insert(k.clone(), json!(d.as_secs_f64()));
        }
        Value::Object(m)
    }

    pub fn summary(&self) -> String {
        format!(
            "{} checks: {} pass, {} fail, {} skip",
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        )
    }
}
