//! Selector gadgets and the lifts built from them.
//!
//! Every base variable `e_i` is replaced by a block of fresh variables: a
//! data part `X_i` with one variable per cell and a selector part `Y_i`.
//! Blocks are laid out in order `i = 1..m`; inside a block the cells of
//! `X_i` come first (lexicographic order), then `Y_i` ordered by `(p, a)`.
//!
//! Three encodings are supported:
//!
//! * tensor (`k` coordinates over `[ℓ]`, one-hot selector groups),
//! * parity (`k` bit-vectors of length `a`, cell = XOR of the vectors),
//! * gap mode, the one-coordinate, two-cell tensor lift with a single
//!   selector bit per block and no selector clauses.

mod construct;
mod sidecar;

use std::fmt;

use thiserror::Error;

use crate::cnf::{Assignment, Clause, CnfFormula, Literal};

pub use construct::{lift_gap_mode, lift_parity, lift_tensor};
pub use sidecar::{parse_sidecar, write_sidecar, SidecarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("base clause {index} is empty")]
    EmptyBaseClause { index: usize },
    #[error("invalid selector in block {block}, coordinate {coord}")]
    InvalidSelector { block: u32, coord: u32 },
    #[error("selector index out of range")]
    IndexOutOfRange,
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("lift parameters out of range: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorParams {
    pub k: u32,
    pub ell: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParityParams {
    pub k: u32,
    pub a: u32,
}

impl TensorParams {
    pub fn new(k: u32, ell: u32) -> Result<Self, LiftError> {
        if k == 0 || ell < 2 {
            return Err(LiftError::BadParams(format!("k = {k}, ell = {ell}")));
        }
        let cells = u64::from(ell).checked_pow(k).filter(|&c| c <= 1 << 24);
        if cells.is_none() {
            return Err(LiftError::BadParams(format!(
                "ell^k too large for k = {k}, ell = {ell}"
            )));
        }
        Ok(TensorParams { k, ell })
    }

    pub fn num_cells(&self) -> u32 {
        self.ell.pow(self.k)
    }

    /// Queries per base variable of the binary-search lifted tree.
    pub fn per_variable_cost(&self) -> u32 {
        self.k * ceil_log2(self.ell) + 1
    }
}

impl ParityParams {
    pub fn new(k: u32, a: u32) -> Result<Self, LiftError> {
        if k == 0 || a == 0 || a > 24 || k * a > 32 {
            return Err(LiftError::BadParams(format!("k = {k}, a = {a}")));
        }
        Ok(ParityParams { k, a })
    }

    pub fn num_cells(&self) -> u32 {
        1 << self.a
    }
}

pub fn ceil_log2(x: u32) -> u32 {
    if x <= 1 {
        0
    } else {
        32 - (x - 1).leading_zeros()
    }
}

/// Which selector encoding a lifted formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiftKind {
    Tensor(TensorParams),
    Parity(ParityParams),
    GapMode,
}

/// A cell of `X_i`. Tensor and gap-mode coordinates lie in `1..=ℓ`; parity
/// coordinates are the bits `c_1..c_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub Vec<u32>);

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Origin of a lifted clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// `y_{i,p,1} ∨ … ∨ y_{i,p,ℓ}`.
    TypeI { block: u32, coord: u32 },
    /// `¬y_{i,p,a} ∨ ¬y_{i,p,a2}` with `a < a2`.
    TypeII {
        block: u32,
        coord: u32,
        a: u32,
        a2: u32,
    },
    /// Base clause `source` (1-based) with one cell per literal.
    TypeIII { source: usize, cells: Vec<Cell> },
    /// Parity clause for `source`, one cell per literal, and the selector
    /// bits (`t·k·a` of them, ordered by literal, coordinate, bit) that the
    /// clause rules out.
    Star {
        source: usize,
        cells: Vec<Cell>,
        pattern: Vec<bool>,
    },
}

/// A lifted formula with its variable layout and per-clause provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedFormula {
    formula: CnfFormula,
    base: CnfFormula,
    kind: LiftKind,
    provenance: Vec<Provenance>,
}

impl LiftedFormula {
    pub(crate) fn assemble(
        base: &CnfFormula,
        kind: LiftKind,
        clauses: Vec<Clause>,
        provenance: Vec<Provenance>,
    ) -> Self {
        let num_vars = base.num_vars() * block_size(kind);
        LiftedFormula {
            formula: CnfFormula::new(num_vars, clauses).expect("layout keeps variables in range"),
            base: base.clone(),
            kind,
            provenance,
        }
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn base(&self) -> &CnfFormula {
        &self.base
    }

    pub fn kind(&self) -> LiftKind {
        self.kind
    }

    pub fn num_base_vars(&self) -> u32 {
        self.base.num_vars()
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Provenance of lifted clause `index` (1-based).
    pub fn tag(&self, index: usize) -> Option<&Provenance> {
        index.checked_sub(1).and_then(|i| self.provenance.get(i))
    }

    /// Index of the first clause carrying `tag`.
    pub fn clause_index_of(&self, tag: &Provenance) -> Option<usize> {
        self.provenance.iter().position(|p| p == tag).map(|i| i + 1)
    }

    pub fn block_size(&self) -> u32 {
        block_size(self.kind)
    }

    pub fn num_cells(&self) -> u32 {
        match self.kind {
            LiftKind::Tensor(p) => p.num_cells(),
            LiftKind::Parity(p) => p.num_cells(),
            LiftKind::GapMode => 2,
        }
    }

    fn offset(&self, block: u32) -> u32 {
        (block - 1) * self.block_size()
    }

    /// Variable `x_{i,c}`.
    pub fn x_var(&self, block: u32, cell: &Cell) -> u32 {
        self.offset(block) + 1 + self.cell_index(cell)
    }

    /// Variables of `X_i` in cell order.
    pub fn x_vars(&self, block: u32) -> std::ops::RangeInclusive<u32> {
        let start = self.offset(block) + 1;
        start..=start + self.num_cells() - 1
    }

    /// Variables of `Y_i` in layout order.
    pub fn y_vars(&self, block: u32) -> std::ops::RangeInclusive<u32> {
        let start = self.offset(block) + self.num_cells() + 1;
        start..=self.offset(block) + self.block_size()
    }

    /// Tensor selector `y_{i,p,a}`, or parity selector bit `y_{i,p,b}`.
    pub fn y_var(&self, block: u32, coord: u32, index: u32) -> u32 {
        let group = match self.kind {
            LiftKind::Tensor(p) => p.ell,
            LiftKind::Parity(p) => p.a,
            LiftKind::GapMode => 1,
        };
        self.offset(block) + self.num_cells() + (coord - 1) * group + index
    }

    /// Base variable whose block contains lifted variable `var`.
    pub fn block_of(&self, var: u32) -> u32 {
        (var - 1) / self.block_size() + 1
    }

    /// Position of `cell` in the lexicographic order of `X_i`.
    pub fn cell_index(&self, cell: &Cell) -> u32 {
        match self.kind {
            LiftKind::Tensor(p) => cell.0.iter().fold(0, |acc, &c| acc * p.ell + (c - 1)),
            LiftKind::Parity(_) => cell.0.iter().fold(0, |acc, &b| acc * 2 + b),
            LiftKind::GapMode => cell.0[0] - 1,
        }
    }

    pub fn cell_from_index(&self, index: u32) -> Cell {
        match self.kind {
            LiftKind::Tensor(p) => Cell(
                digits(index, p.ell, p.k)
                    .into_iter()
                    .map(|d| d + 1)
                    .collect(),
            ),
            LiftKind::Parity(p) => Cell(digits(index, 2, p.a)),
            LiftKind::GapMode => Cell(vec![index + 1]),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.num_cells()).map(|r| self.cell_from_index(r))
    }

    /// Cell selected by `Y_i` under `beta`.
    pub fn selected_cell(&self, block: u32, beta: &Assignment) -> Result<Cell, LiftError> {
        match self.kind {
            LiftKind::Tensor(p) => {
                let mut coords = Vec::with_capacity(p.k as usize);
                for coord in 1..=p.k {
                    let ones: Vec<u32> = (1..=p.ell)
                        .filter(|&a| beta.value(self.y_var(block, coord, a)))
                        .collect();
                    if ones.len() != 1 {
                        return Err(LiftError::InvalidSelector { block, coord });
                    }
                    coords.push(ones[0]);
                }
                Ok(Cell(coords))
            }
            LiftKind::Parity(p) => Ok(Cell(
                (1..=p.a)
                    .map(|b| {
                        (1..=p.k).fold(0, |acc, coord| {
                            acc ^ u32::from(beta.value(self.y_var(block, coord, b)))
                        })
                    })
                    .collect(),
            )),
            LiftKind::GapMode => Ok(Cell(vec![
                1 + u32::from(beta.value(self.y_var(block, 1, 1))),
            ])),
        }
    }

    /// Base assignment read off the selected cells.
    pub fn decode(&self, beta: &Assignment) -> Result<Assignment, LiftError> {
        self.check_lifted_len(beta)?;
        let mut values = Vec::with_capacity(self.num_base_vars() as usize);
        for i in 1..=self.num_base_vars() {
            let cell = self.selected_cell(i, beta)?;
            values.push(beta.value(self.x_var(i, &cell)));
        }
        Ok(Assignment::new(values))
    }

    /// Canonical valid encoding: every cell of `X_i` is `alpha(e_i)` and `Y_i`
    /// is `y_choice[i - 1]` verbatim.
    pub fn encode_valid(
        &self,
        alpha: &Assignment,
        y_choice: &[Vec<bool>],
    ) -> Result<Assignment, LiftError> {
        let m = self.num_base_vars() as usize;
        if alpha.num_vars() as usize != m {
            return Err(LiftError::LengthMismatch {
                expected: m,
                got: alpha.num_vars() as usize,
            });
        }
        if y_choice.len() != m {
            return Err(LiftError::LengthMismatch {
                expected: m,
                got: y_choice.len(),
            });
        }
        let mut beta = Assignment::all_false(self.formula.num_vars());
        for i in 1..=m as u32 {
            let ys = self.y_vars(i);
            let bits = &y_choice[i as usize - 1];
            let expected = ys.clone().count();
            if bits.len() != expected {
                return Err(LiftError::LengthMismatch {
                    expected,
                    got: bits.len(),
                });
            }
            for (var, &bit) in ys.zip(bits) {
                beta.set(var, bit);
            }
            for var in self.x_vars(i) {
                beta.set(var, alpha.value(i));
            }
            if let LiftKind::Tensor(_) = self.kind {
                self.selected_cell(i, &beta)?;
            }
        }
        Ok(beta)
    }

    /// True iff every tensor selector group has exactly one variable set.
    /// Always true for the parity and gap-mode encodings.
    pub fn is_selector_valid(&self, beta: &Assignment) -> bool {
        match self.kind {
            LiftKind::Tensor(_) => {
                (1..=self.num_base_vars()).all(|i| self.selected_cell(i, beta).is_ok())
            }
            _ => true,
        }
    }

    /// Every selector-valid assignment of the lifted formula, in a fixed
    /// order. Intended for desk-scale enumeration only.
    pub fn selector_valid_assignments(&self) -> Vec<Assignment> {
        let m = self.num_base_vars();
        let mut block_settings: Vec<Vec<bool>> = Vec::new();
        let x_len = self.num_cells() as usize;
        let y_settings: Vec<Vec<bool>> = match self.kind {
            LiftKind::Tensor(p) => {
                let mut out = vec![Vec::new()];
                for _ in 0..p.k {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for a in 0..p.ell {
                            let mut v: Vec<bool> = prefix.clone();
                            v.extend((0..p.ell).map(|b| b == a));
                            next.push(v);
                        }
                    }
                    out = next;
                }
                out
            }
            _ => {
                let len = self.y_vars(1).count();
                (0..1u64 << len)
                    .map(|bits| (0..len).map(|j| (bits >> j) & 1 == 1).collect())
                    .collect()
            }
        };
        for y in &y_settings {
            for xbits in 0..1u64 << x_len {
                let mut v: Vec<bool> = (0..x_len).map(|j| (xbits >> j) & 1 == 1).collect();
                v.extend_from_slice(y);
                block_settings.push(v);
            }
        }
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            let mut next = Vec::with_capacity(out.len() * block_settings.len());
            for prefix in &out {
                for s in &block_settings {
                    let mut v: Vec<bool> = prefix.clone();
                    v.extend_from_slice(s);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(Assignment::new).collect()
    }

    fn check_lifted_len(&self, beta: &Assignment) -> Result<(), LiftError> {
        if beta.num_vars() != self.formula.num_vars() {
            return Err(LiftError::LengthMismatch {
                expected: self.formula.num_vars() as usize,
                got: beta.num_vars() as usize,
            });
        }
        Ok(())
    }

    /// The clause a provenance tag stands for.
    pub fn clause_from_provenance(&self, tag: &Provenance) -> Clause {
        let lits = match tag {
            Provenance::TypeI { block, coord } => {
                let ell = self.tensor_params().ell;
                (1..=ell)
                    .map(|a| Literal::pos(self.y_var(*block, *coord, a)))
                    .collect()
            }
            Provenance::TypeII {
                block,
                coord,
                a,
                a2,
            } => vec![
                Literal::neg(self.y_var(*block, *coord, *a)),
                Literal::neg(self.y_var(*block, *coord, *a2)),
            ],
            Provenance::TypeIII { source, cells } => {
                let base = self.base.clause(*source).expect("valid source clause");
                let mut lits = Vec::new();
                for (lit, cell) in base.literals().iter().zip(cells) {
                    match self.kind {
                        LiftKind::GapMode => {
                            let y = self.y_var(lit.var(), 1, 1);
                            lits.push(Literal::new(y, cell.0[0] == 1).expect("y >= 1"));
                        }
                        _ => {
                            for (p, &a) in cell.0.iter().enumerate() {
                                lits.push(Literal::neg(self.y_var(lit.var(), p as u32 + 1, a)));
                            }
                        }
                    }
                }
                for (lit, cell) in base.literals().iter().zip(cells) {
                    let x = self.x_var(lit.var(), cell);
                    lits.push(Literal::new(x, lit.is_positive()).expect("x >= 1"));
                }
                lits
            }
            Provenance::Star {
                source,
                cells,
                pattern,
            } => {
                let p = self.parity_params();
                let base = self.base.clause(*source).expect("valid source clause");
                let mut lits = Vec::new();
                let mut bits = pattern.iter();
                for lit in base.literals() {
                    for coord in 1..=p.k {
                        for b in 1..=p.a {
                            let y = self.y_var(lit.var(), coord, b);
                            let set = *bits.next().expect("pattern length t*k*a");
                            lits.push(Literal::new(y, !set).expect("y >= 1"));
                        }
                    }
                }
                for (lit, cell) in base.literals().iter().zip(cells) {
                    let x = self.x_var(lit.var(), cell);
                    lits.push(Literal::new(x, lit.is_positive()).expect("x >= 1"));
                }
                lits
            }
        };
        Clause::new(lits).expect("lifted literals use distinct variables")
    }

    /// True iff regenerating every clause from its tag reproduces the formula.
    pub fn provenance_consistent(&self) -> bool {
        self.provenance.len() == self.formula.num_clauses()
            && self
                .provenance
                .iter()
                .zip(self.formula.clauses())
                .all(|(tag, clause)| &self.clause_from_provenance(tag) == clause)
    }

    pub fn tensor_params(&self) -> TensorParams {
        match self.kind {
            LiftKind::Tensor(p) => p,
            LiftKind::GapMode => TensorParams { k: 1, ell: 2 },
            LiftKind::Parity(_) => panic!("parity lift has no tensor parameters"),
        }
    }

    pub fn parity_params(&self) -> ParityParams {
        match self.kind {
            LiftKind::Parity(p) => p,
            _ => panic!("not a parity lift"),
        }
    }
}

/// Variables per block for a lift kind.
pub fn block_size(kind: LiftKind) -> u32 {
    match kind {
        LiftKind::Tensor(p) => p.num_cells() + p.k * p.ell,
        LiftKind::Parity(p) => p.num_cells() + p.k * p.a,
        LiftKind::GapMode => 3,
    }
}

/// Base-`radix` digits of `value`, most significant first, `len` of them.
fn digits(mut value: u32, radix: u32, len: u32) -> Vec<u32> {
    let mut out = vec![0; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = value % radix;
        value /= radix;
    }
    out
}

/// Tensor selector: the bit of `x` at the cell with 1-based coordinates `y`.
pub fn psi_tensor(x: &[bool], y: &[u32], ell: u32) -> Result<bool, LiftError> {
    let k = y.len() as u32;
    if ell.checked_pow(k) != Some(x.len() as u32) {
        return Err(LiftError::LengthMismatch {
            expected: ell.checked_pow(k).unwrap_or(u32::MAX) as usize,
            got: x.len(),
        });
    }
    let mut index = 0u32;
    for &c in y {
        if c == 0 || c > ell {
            return Err(LiftError::IndexOutOfRange);
        }
        index = index * ell + (c - 1);
    }
    Ok(x[index as usize])
}

/// Parity selector: the bit of `x` at the XOR of the vectors in `y`, first
/// bit most significant.
pub fn psi_parity(x: &[bool], y: &[Vec<bool>]) -> Result<bool, LiftError> {
    let a = x.len().trailing_zeros() as usize;
    if !x.len().is_power_of_two() {
        return Err(LiftError::LengthMismatch {
            expected: 1 << a,
            got: x.len(),
        });
    }
    let mut index = 0usize;
    for b in 0..a {
        let mut bit = false;
        for v in y {
            if v.len() != a {
                return Err(LiftError::LengthMismatch {
                    expected: a,
                    got: v.len(),
                });
            }
            bit ^= v[b];
        }
        index = index * 2 + usize::from(bit);
    }
    Ok(x[index])
}
