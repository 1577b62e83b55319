//! Pyramids, shift matrices, 01-sequences and the combinatorics derived from them.
//!
//! Rows and columns are numbered from 1 (rows top to bottom, columns left to
//! right). Boxes ("cells") are stored in the order of the index set
//! `1 < ... < M < ~1 < ... < ~N`: `+` boxes first, then `-` boxes, each group
//! numbered down columns from left to right.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PyramidError {
    #[error("01-sequence contains a character other than 0 or 1: {0:?}")]
    BadSequence(String),
    #[error("shift matrix must be square of size {expected}, got {got}")]
    BadSize { expected: usize, got: usize },
    #[error("shift matrix violates additivity at ({i},{j},{k})")]
    NotShift { i: usize, j: usize, k: usize },
    #[error("level {ell} must exceed s(1,{n}) + s({n},1) = {bound}")]
    LevelTooSmall { ell: usize, n: usize, bound: usize },
    #[error("pyramid has no rows")]
    Empty,
    #[error("row {0} is empty or sticks out of the bottom row")]
    BadRow(usize),
    #[error("bottom row must have offset 0")]
    BottomOffset,
    #[error("row {0} is not supported by the row below it")]
    Unsupported(usize),
    #[error("composition {0:?} does not sum to {1}")]
    BadComposition(Vec<usize>, usize),
    #[error("shape {0:?} is not admissible")]
    NotAdmissible(Vec<usize>),
    #[error("invalid pyramid JSON: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Label {
    pub fn is_odd(self) -> bool {
        self == Label::Minus
    }
    pub fn from_digit(odd: bool) -> Self {
        if odd {
            Label::Minus
        } else {
            Label::Plus
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_odd() { "-" } else { "+" })
    }
}

/// A word in `{0,1}`; digit `i` (1-based) is the parity `|i|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZeroOneSequence {
    digits: Vec<bool>,
}

impl ZeroOneSequence {
    pub fn new(digits: Vec<bool>) -> Self {
        Self { digits }
    }

    pub fn parse(s: &str) -> Result<Self, PyramidError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(PyramidError::BadSequence(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `|i|` for 1-based `i`.
    pub fn parity(&self, i: usize) -> bool {
        self.digits[i - 1]
    }

    pub fn zeros(&self) -> usize {
        self.digits.iter().filter(|d| !**d).count()
    }

    pub fn ones(&self) -> usize {
        self.digits.iter().filter(|d| **d).count()
    }

    pub fn digits(&self) -> &[bool] {
        &self.digits
    }
}

impl fmt::Display for ZeroOneSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.digits {
            f.write_str(if d { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShiftMatrix {
    s: Vec<Vec<usize>>,
}

impl ShiftMatrix {
    pub fn new(s: Vec<Vec<usize>>) -> Result<Self, PyramidError> {
        let n = s.len();
        for row in &s {
            if row.len() != n {
                return Err(PyramidError::BadSize { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let between = i.abs_diff(j) + j.abs_diff(k) == i.abs_diff(k);
                    if between && s[i][j] + s[j][k] != s[i][k] {
                        return Err(PyramidError::NotShift { i: i + 1, j: j + 1, k: k + 1 });
                    }
                }
            }
        }
        Ok(Self { s })
    }

    pub fn zero(n: usize) -> Self {
        Self { s: vec![vec![0; n]; n] }
    }

    pub fn size(&self) -> usize {
        self.s.len()
    }

    /// `s_{i,j}`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.s[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    pub fn transpose(&self) -> Self {
        let n = self.size();
        Self { s: (0..n).map(|i| (0..n).map(|j| self.s[j][i]).collect()).collect() }
    }

    /// Rebuild from the last column and last row alone.
    pub fn from_border(last_col: &[usize], last_row: &[usize]) -> Result<Self, PyramidError> {
        let n = last_col.len();
        let mut s = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                s[i][j] = if i < j {
                    last_col[i].checked_sub(last_col[j]).ok_or(PyramidError::Unsupported(i + 1))?
                } else if i > j {
                    last_row[j].checked_sub(last_row[i]).ok_or(PyramidError::Unsupported(j + 1))?
                } else {
                    0
                };
            }
        }
        Self::new(s)
    }

    pub fn is_admissible(&self, shape: &CompositionShape) -> bool {
        if shape.total() != self.size() {
            return false;
        }
        (1..=shape.len()).all(|a| {
            let r = shape.block_range(a);
            r.clone().all(|i| r.clone().all(|j| self.get(i, j) == 0))
        })
    }

    /// Every composition of the size that is admissible, in lexicographic order of parts.
    pub fn admissible_shapes(&self) -> Vec<CompositionShape> {
        compositions(self.size())
            .into_iter()
            .map(CompositionShape::new_unchecked)
            .filter(|c| self.is_admissible(c))
            .collect()
    }

    /// Greedy maximal zero diagonal blocks from the top-left.
    pub fn minimal_shape(&self) -> CompositionShape {
        let n = self.size();
        let mut parts = Vec::new();
        let mut start = 1;
        while start <= n {
            let mut end = start;
            while end < n && self.get(end, end + 1) == 0 && self.get(end + 1, end) == 0 {
                end += 1;
            }
            parts.push(end - start + 1);
            start = end + 1;
        }
        CompositionShape::new_unchecked(parts)
    }

    /// `s^μ_{a,b}` for an admissible shape.
    pub fn block_shift(&self, shape: &CompositionShape, a: usize, b: usize) -> usize {
        self.get(shape.prefix(a), shape.prefix(b))
    }
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A composition `μ = (μ_1, ..., μ_z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompositionShape {
    parts: Vec<usize>,
}

impl CompositionShape {
    pub fn new(parts: Vec<usize>, total: usize) -> Result<Self, PyramidError> {
        if parts.iter().any(|&p| p == 0) || parts.iter().sum::<usize>() != total {
            return Err(PyramidError::BadComposition(parts, total));
        }
        Ok(Self { parts })
    }

    fn new_unchecked(parts: Vec<usize>) -> Self {
        Self { parts }
    }

    pub fn ones(n: usize) -> Self {
        Self { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of blocks `z`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `μ_a`, 1-based.
    pub fn part(&self, a: usize) -> usize {
        self.parts[a - 1]
    }

    /// `μ_1 + ... + μ_a`.
    pub fn prefix(&self, a: usize) -> usize {
        self.parts[..a].iter().sum()
    }

    /// Global row of local index `i` in block `a`.
    pub fn row(&self, a: usize, i: usize) -> usize {
        self.prefix(a - 1) + i
    }

    pub fn block_range(&self, a: usize) -> std::ops::RangeInclusive<usize> {
        self.prefix(a - 1) + 1..=self.prefix(a)
    }

    /// Restricted parity `|i|_a`.
    pub fn parity(&self, upsilon: &ZeroOneSequence, a: usize, i: usize) -> bool {
        upsilon.parity(self.row(a, i))
    }
}

impl fmt::Display for CompositionShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Row {
    pub length: usize,
    pub label: Label,
    pub offset: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub odd: bool,
    /// Position within its sign class, 1-based (`k` or `~k`).
    pub number: usize,
}

impl Cell {
    pub fn name(&self) -> String {
        if self.odd {
            format!("~{}", self.number)
        } else {
            self.number.to_string()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pyramid {
    ell: usize,
    rows: Vec<Row>,
    cells: Vec<Cell>,
    grid: Vec<Vec<Option<usize>>>,
    plus: usize,
}

impl Pyramid {
    pub fn from_rows(rows: Vec<Row>) -> Result<Self, PyramidError> {
        let bottom = *rows.last().ok_or(PyramidError::Empty)?;
        if bottom.offset != 0 {
            return Err(PyramidError::BottomOffset);
        }
        let ell = bottom.length;
        for (i, r) in rows.iter().enumerate() {
            if r.length == 0 || r.offset + r.length > ell {
                return Err(PyramidError::BadRow(i + 1));
            }
        }
        for i in 0..rows.len() - 1 {
            let (a, b) = (rows[i], rows[i + 1]);
            if a.offset < b.offset || a.offset + a.length > b.offset + b.length {
                return Err(PyramidError::Unsupported(i + 1));
            }
        }
        let h = rows.len();
        let mut grid = vec![vec![None; ell + 1]; h + 1];
        let mut cells = Vec::new();
        let mut plus = 0;
        for odd in [false, true] {
            let mut number = 0;
            for col in 1..=ell {
                for (ri, r) in rows.iter().enumerate() {
                    if r.label.is_odd() == odd && col > r.offset && col <= r.offset + r.length {
                        number += 1;
                        grid[ri + 1][col] = Some(cells.len());
                        cells.push(Cell { row: ri + 1, col, odd, number });
                    }
                }
            }
            if !odd {
                plus = number;
            }
        }
        Ok(Self { ell, rows, cells, grid, plus })
    }

    pub fn from_triple(
        sigma: &ShiftMatrix,
        ell: usize,
        upsilon: &ZeroOneSequence,
    ) -> Result<Self, PyramidError> {
        let n = sigma.size();
        if upsilon.len() != n {
            return Err(PyramidError::BadSize { expected: n, got: upsilon.len() });
        }
        if n == 0 {
            return Err(PyramidError::Empty);
        }
        let bound = sigma.get(1, n) + sigma.get(n, 1);
        if ell <= bound {
            return Err(PyramidError::LevelTooSmall { ell, n, bound });
        }
        let rows = (1..=n)
            .map(|i| Row {
                length: ell - sigma.get(i, n) - sigma.get(n, i),
                label: Label::from_digit(upsilon.parity(i)),
                offset: sigma.get(n, i),
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn to_triple(&self) -> (ShiftMatrix, usize, ZeroOneSequence) {
        let last_col: Vec<usize> =
            self.rows.iter().map(|r| self.ell - r.offset - r.length).collect();
        let last_row: Vec<usize> = self.rows.iter().map(|r| r.offset).collect();
        let sigma = ShiftMatrix::from_border(&last_col, &last_row)
            .expect("a validated pyramid always yields a shift matrix");
        (sigma, self.ell, self.upsilon())
    }

    pub fn shift_matrix(&self) -> ShiftMatrix {
        self.to_triple().0
    }

    pub fn upsilon(&self) -> ZeroOneSequence {
        ZeroOneSequence::new(self.rows.iter().map(|r| r.label.is_odd()).collect())
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Number of rows, `m + n`.
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Rows labelled `+`.
    pub fn m(&self) -> usize {
        self.rows.iter().filter(|r| !r.label.is_odd()).count()
    }

    /// Rows labelled `-`.
    pub fn n(&self) -> usize {
        self.height() - self.m()
    }

    /// Boxes labelled `+`.
    pub fn big_m(&self) -> usize {
        self.plus
    }

    /// Boxes labelled `-`.
    pub fn big_n(&self) -> usize {
        self.cells.len() - self.plus
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, idx: usize) -> &Cell {
        &self.cells[idx]
    }

    /// Box at `(row, col)`, if present.
    pub fn cell_at(&self, row: usize, col: usize) -> Option<usize> {
        self.grid.get(row).and_then(|r| r.get(col)).copied().flatten()
    }

    pub fn row_parity(&self, row: usize) -> bool {
        self.rows[row - 1].label.is_odd()
    }

    /// Column range of a row, inclusive.
    pub fn row_cols(&self, row: usize) -> std::ops::RangeInclusive<usize> {
        let r = self.rows[row - 1];
        r.offset + 1..=r.offset + r.length
    }

    pub fn col_x(&self, idx: usize) -> i64 {
        2 * self.cells[idx].col as i64 - (self.ell as i64 + 1)
    }

    /// Kazhdan degree of `e_{i,j}`: `col(j) - col(i) + 1`.
    pub fn kazhdan_degree(&self, i: usize, j: usize) -> i64 {
        self.cells[j].col as i64 - self.cells[i].col as i64 + 1
    }

    /// Horizontally adjacent pairs `(left, right)`; `e_π` is their sum.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (idx, c) in self.cells.iter().enumerate() {
            if let Some(r) = self.cell_at(c.row, c.col + 1) {
                out.push((idx, r));
            }
        }
        out
    }

    /// Diagonal of `h_π`, in index-set order.
    pub fn h_diagonal(&self) -> Vec<i64> {
        (0..self.cells.len()).map(|i| -self.col_x(i)).collect()
    }

    /// Signed column heights `q̌_c` (index `c - 1`).
    pub fn super_column_heights(&self) -> Vec<i64> {
        let mut q = vec![0i64; self.ell];
        for c in &self.cells {
            q[c.col - 1] += if c.odd { -1 } else { 1 };
        }
        q
    }

    /// Absolute column heights.
    pub fn column_heights(&self) -> Vec<usize> {
        let mut q = vec![0usize; self.ell];
        for c in &self.cells {
            q[c.col - 1] += 1;
        }
        q
    }

    /// `ρ_r = h - q̌_r - ... - q̌_ℓ` with `h = m - n` counted over rows.
    pub fn rho(&self) -> Vec<i64> {
        let q = self.super_column_heights();
        let h = self.m() as i64 - self.n() as i64;
        let mut rho = vec![0i64; self.ell];
        let mut tail = 0;
        for c in (0..self.ell).rev() {
            tail += q[c];
            rho[c] = h - tail;
        }
        rho
    }

    /// Row lengths `p_i = ℓ - s_{i,m+n} - s_{m+n,i}`.
    pub fn p_tuple(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.length).collect()
    }

    pub fn is_rectangle(&self) -> bool {
        self.rows.iter().all(|r| r.length == self.ell)
    }

    /// Drop the rightmost (`right == true`) or leftmost column.
    pub fn remove_column(&self, right: bool) -> Result<Pyramid, PyramidError> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let touches = if right { r.offset + r.length == self.ell } else { r.offset == 0 };
                let length = if touches { r.length - 1 } else { r.length };
                let offset = if right || touches { r.offset } else { r.offset - 1 };
                Row { length, label: r.label, offset }
            })
            .collect();
        Pyramid::from_rows(rows)
    }

    /// The centralizer basis elements `c^{(r)}_{i,j}` as lists of box pairs.
    pub fn centralizer_basis(&self) -> Vec<CentralizerElement> {
        let sigma = self.shift_matrix();
        let p = self.p_tuple();
        let h = self.height();
        let mut out = Vec::new();
        for i in 1..=h {
            for j in 1..=h {
                let s = sigma.get(i, j);
                for r in s + 1..=s + p[i.min(j) - 1] {
                    let mut terms = Vec::new();
                    for hc in self.row_cols(i) {
                        let kc = hc + r - 1;
                        if let Some(k) = self.cell_at(j, kc) {
                            terms.push((self.cell_at(i, hc).unwrap(), k));
                        }
                    }
                    out.push(CentralizerElement {
                        i,
                        j,
                        r,
                        odd: self.row_parity(i) != self.row_parity(j),
                        terms,
                    });
                }
            }
        }
        out
    }

    pub fn spec(&self) -> PyramidSpec {
        let (sigma, ell, ups) = self.to_triple();
        PyramidSpec::Triple { ell, upsilon: ups.to_string(), shift: sigma.rows().to_vec() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.spec()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, PyramidError> {
        let spec: PyramidSpec =
            serde_json::from_str(s).map_err(|e| PyramidError::Json(e.to_string()))?;
        spec.build()
    }
}

/// `c^{(r)}_{i,j} = Σ e_{h,k}` over the listed box pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralizerElement {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub odd: bool,
    pub terms: Vec<(usize, usize)>,
}

/// On-disk pyramid description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PyramidSpec {
    Triple { ell: usize, upsilon: String, shift: Vec<Vec<usize>> },
    Rows { rows: Vec<Row> },
}

impl PyramidSpec {
    pub fn build(&self) -> Result<Pyramid, PyramidError> {
        match self {
            PyramidSpec::Triple { ell, upsilon, shift } => {
                let sigma = ShiftMatrix::new(shift.clone())?;
                let ups = ZeroOneSequence::parse(upsilon)?;
                Pyramid::from_triple(&sigma, *ell, &ups)
            }
            PyramidSpec::Rows { rows } => Pyramid::from_rows(rows.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Pyramid {
        let s = ShiftMatrix::new(vec![vec![0, 1], vec![0, 0]]).unwrap();
        Pyramid::from_triple(&s, 2, &ZeroOneSequence::parse("01").unwrap()).unwrap()
    }

    #[test]
    fn p1_rows_and_cells() {
        let p = p1();
        assert_eq!(
            p.rows(),
            &[
                Row { length: 1, label: Label::Plus, offset: 0 },
                Row { length: 2, label: Label::Minus, offset: 0 }
            ]
        );
        let names: Vec<_> = p.cells().iter().map(|c| (c.name(), c.row, c.col)).collect();
        assert_eq!(
            names,
            vec![("1".into(), 1, 1), ("~1".into(), 2, 1), ("~2".into(), 2, 2)]
        );
        assert_eq!(p.h_diagonal(), vec![1, 1, -1]);
        assert_eq!(p.adjacent_pairs(), vec![(1, 2)]);
    }

    #[test]
    fn rejects_bad_input() {
        let s = ShiftMatrix::new(vec![vec![0, 1], vec![0, 0]]).unwrap();
        let u = ZeroOneSequence::parse("01").unwrap();
        assert!(matches!(Pyramid::from_triple(&s, 1, &u), Err(PyramidError::LevelTooSmall { .. })));
        assert!(ShiftMatrix::new(vec![vec![1, 0], vec![0, 0]]).is_err());
        assert!(ZeroOneSequence::parse("012").is_err());
        let bad = vec![
            Row { length: 2, label: Label::Plus, offset: 1 },
            Row { length: 2, label: Label::Plus, offset: 0 },
            Row { length: 3, label: Label::Plus, offset: 0 },
        ];
        assert_eq!(Pyramid::from_rows(bad), Err(PyramidError::Unsupported(1)));
    }

    #[test]
    fn json_forms_agree() {
        let a = Pyramid::from_json_str(r#"{"ell":2,"upsilon":"01","shift":[[0,1],[0,0]]}"#).unwrap();
        let b = Pyramid::from_json_str(
            r#"{"rows":[{"length":1,"label":"+","offset":0},{"length":2,"label":"-","offset":0}]}"#,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json().to_string(), r#"{"ell":2,"upsilon":"01","shift":[[0,1],[0,0]]}"#);
    }

    #[test]
    fn remove_columns() {
        let p = p1();
        let r = p.remove_column(true).unwrap();
        assert_eq!(r.p_tuple(), vec![1, 1]);
        let l = p.remove_column(false);
        assert!(l.is_err());
    }
}
