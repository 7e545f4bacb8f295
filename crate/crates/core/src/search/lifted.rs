//! Search trees for lifted formulas built from a search tree for the base.
//!
//! Each base query `e_i` is simulated by first learning the cell selected by
//! `Y_i` and then reading that cell of `X_i`; each base leaf (a clause that
//! the base path falsifies) becomes the lifted clause for the same source
//! clause and the cells found along the path.

use std::collections::HashMap;

use crate::lifting::{Cell, LiftKind, LiftedFormula, Provenance};

use super::consistent::SearchError;
use super::tree::{DecisionTree, Node, TreeBuilder};

/// How a tensor-lifted tree learns selector values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorMode {
    /// Binary search with interval nodes; correct on selector-valid
    /// assignments, `k⌈log₂ℓ⌉ + 1` queries per base query.
    SelectorValid,
    /// Plain variable queries scanning every selector group, ending at a
    /// violated (I)/(II) clause when the group is not one-hot; correct on all
    /// assignments, `kℓ + 1` queries per base query.
    Total,
}

struct Ctx<'a> {
    base_tree: &'a DecisionTree,
    lifted: &'a LiftedFormula,
    index: HashMap<&'a Provenance, usize>,
    known: HashMap<u32, bool>,
    decoded: HashMap<u32, (Cell, bool)>,
    b: TreeBuilder,
}

impl<'a> Ctx<'a> {
    fn new(base_tree: &'a DecisionTree, lifted: &'a LiftedFormula) -> Self {
        let mut index = HashMap::new();
        for (i, tag) in lifted.provenance().iter().enumerate() {
            index.entry(tag).or_insert(i + 1);
        }
        Ctx {
            base_tree,
            lifted,
            index,
            known: HashMap::new(),
            decoded: HashMap::new(),
            b: TreeBuilder::new(),
        }
    }

    fn lookup(&self, tag: &Provenance) -> Result<usize, SearchError> {
        self.index.get(tag).copied().ok_or(SearchError::LeafLookup)
    }

    /// Queries `var` (unless known) and continues with `next` on each value.
    fn branch(
        &mut self,
        var: u32,
        next: &mut dyn FnMut(&mut Self) -> Result<usize, SearchError>,
    ) -> Result<usize, SearchError> {
        if self.known.contains_key(&var) {
            return next(self);
        }
        let mut kids = [0; 2];
        for (slot, value) in kids.iter_mut().zip([false, true]) {
            self.known.insert(var, value);
            let r = next(self);
            self.known.remove(&var);
            *slot = r?;
        }
        Ok(self.b.query(var, kids[0], kids[1]))
    }

    fn base_leaf(&mut self, clause: usize) -> Result<usize, SearchError> {
        let base_clause = self
            .lifted
            .base()
            .clause(clause)
            .ok_or(SearchError::LeafLookup)?;
        let mut cells = Vec::new();
        let mut pattern = Vec::new();
        for lit in base_clause.literals() {
            let (cell, _) = self
                .decoded
                .get(&lit.var())
                .ok_or(SearchError::LeafLookup)?;
            cells.push(cell.clone());
            if let LiftKind::Parity(_) = self.lifted.kind() {
                for y in self.lifted.y_vars(lit.var()) {
                    pattern.push(self.known[&y]);
                }
            }
        }
        let tag = match self.lifted.kind() {
            LiftKind::Parity(_) => Provenance::Star {
                source: clause,
                cells,
                pattern,
            },
            _ => Provenance::TypeIII {
                source: clause,
                cells,
            },
        };
        let idx = self.lookup(&tag)?;
        Ok(self.b.leaf(idx))
    }

    /// Reads the selected cell of block `i` and continues in the base tree.
    fn read_cell(
        &mut self,
        i: u32,
        cell: Cell,
        zero: usize,
        one: usize,
        mode: Option<TensorMode>,
    ) -> Result<usize, SearchError> {
        let x = self.lifted.x_var(i, &cell);
        let mut kids = [0; 2];
        for (slot, value) in kids.iter_mut().zip([false, true]) {
            self.known.insert(x, value);
            self.decoded.insert(i, (cell.clone(), value));
            let r = self.walk(if value { one } else { zero }, mode);
            self.decoded.remove(&i);
            self.known.remove(&x);
            *slot = r?;
        }
        Ok(self.b.query(x, kids[0], kids[1]))
    }

    fn walk(&mut self, idx: usize, mode: Option<TensorMode>) -> Result<usize, SearchError> {
        match self.base_tree.node(idx) {
            Node::Leaf(clause) => self.base_leaf(clause),
            Node::Interval { .. } => Err(SearchError::UnsupportedNode),
            Node::Query { var: i, zero, one } => {
                if let Some((_, value)) = self.decoded.get(&i) {
                    return self.walk(if *value { one } else { zero }, mode);
                }
                match (self.lifted.kind(), mode) {
                    (LiftKind::Parity(_), _) | (LiftKind::GapMode, _) => {
                        let ys: Vec<u32> = self.lifted.y_vars(i).collect();
                        self.parity_bits(i, &ys, zero, one)
                    }
                    (LiftKind::Tensor(_), Some(TensorMode::SelectorValid)) => {
                        self.tensor_search(i, Vec::new(), zero, one)
                    }
                    (LiftKind::Tensor(_), _) => {
                        self.tensor_scan(i, Vec::new(), Vec::new(), zero, one)
                    }
                }
            }
        }
    }

    fn parity_bits(
        &mut self,
        i: u32,
        ys: &[u32],
        zero: usize,
        one: usize,
    ) -> Result<usize, SearchError> {
        match ys.split_first() {
            None => {
                let mut beta = crate::cnf::Assignment::all_false(self.lifted.formula().num_vars());
                for y in self.lifted.y_vars(i) {
                    beta.set(y, self.known[&y]);
                }
                let cell = self
                    .lifted
                    .selected_cell(i, &beta)
                    .expect("parity selectors always decode");
                self.read_cell(i, cell, zero, one, None)
            }
            Some((&y, rest)) => {
                let rest = rest.to_vec();
                self.branch(y, &mut |ctx| ctx.parity_bits(i, &rest, zero, one))
            }
        }
    }

    fn tensor_search(
        &mut self,
        i: u32,
        coords: Vec<u32>,
        zero: usize,
        one: usize,
    ) -> Result<usize, SearchError> {
        let p = self.lifted.tensor_params();
        if coords.len() == p.k as usize {
            return self.read_cell(i, Cell(coords), zero, one, Some(TensorMode::SelectorValid));
        }
        self.interval(i, coords, 1, p.ell, zero, one)
    }

    fn interval(
        &mut self,
        i: u32,
        coords: Vec<u32>,
        lo: u32,
        hi: u32,
        zero: usize,
        one: usize,
    ) -> Result<usize, SearchError> {
        if lo == hi {
            let mut coords = coords;
            coords.push(lo);
            return self.tensor_search(i, coords, zero, one);
        }
        let mid = lo + (hi - lo + 1).div_ceil(2) - 1;
        let coord = coords.len() as u32 + 1;
        let yes = self.interval(i, coords.clone(), lo, mid, zero, one)?;
        let no = self.interval(i, coords, mid + 1, hi, zero, one)?;
        Ok(self.b.interval(i, coord, lo, mid, yes, no))
    }

    fn tensor_scan(
        &mut self,
        i: u32,
        coords: Vec<u32>,
        ones: Vec<u32>,
        zero: usize,
        one: usize,
    ) -> Result<usize, SearchError> {
        let p = self.lifted.tensor_params();
        let coord = coords.len() as u32 + 1;
        if coords.len() == p.k as usize {
            return self.read_cell(i, Cell(coords), zero, one, Some(TensorMode::Total));
        }
        let scanned = self
            .lifted
            .y_vars(i)
            .skip(((coord - 1) * p.ell) as usize)
            .take(p.ell as usize)
            .filter(|y| self.known.contains_key(y))
            .count() as u32;
        if scanned == p.ell {
            let mut coords = coords;
            return match ones.as_slice() {
                [] => {
                    let idx = self.lookup(&Provenance::TypeI { block: i, coord })?;
                    Ok(self.b.leaf(idx))
                }
                [a] => {
                    coords.push(*a);
                    self.tensor_scan(i, coords, Vec::new(), zero, one)
                }
                _ => unreachable!("scan stops at the second selected value"),
            };
        }
        let a = scanned + 1;
        let y = self.lifted.y_var(i, coord, a);
        let mut kids = [0; 2];
        for (slot, value) in kids.iter_mut().zip([false, true]) {
            self.known.insert(y, value);
            let r = if value && !ones.is_empty() {
                self.lookup(&Provenance::TypeII {
                    block: i,
                    coord,
                    a: ones[0],
                    a2: a,
                })
                .map(|idx| self.b.leaf(idx))
            } else {
                let mut ones = ones.clone();
                if value {
                    ones.push(a);
                }
                self.tensor_scan(i, coords.clone(), ones, zero, one)
            };
            self.known.remove(&y);
            *slot = r?;
        }
        Ok(self.b.query(y, kids[0], kids[1]))
    }
}

/// Lifted search tree for a parity (or gap-mode) lift: each base query costs
/// `k·a` selector queries plus one data query.
pub fn lifted_search_tree_parity(
    base_tree: &DecisionTree,
    lifted: &LiftedFormula,
) -> Result<DecisionTree, SearchError> {
    if let LiftKind::Tensor(_) = lifted.kind() {
        return Err(SearchError::WrongLiftKind);
    }
    let mut ctx = Ctx::new(base_tree, lifted);
    let root = ctx.walk(base_tree.root(), None)?;
    Ok(ctx.b.finish(root))
}

/// Lifted search tree for a tensor lift.
pub fn lifted_search_tree_tensor(
    base_tree: &DecisionTree,
    lifted: &LiftedFormula,
    mode: TensorMode,
) -> Result<DecisionTree, SearchError> {
    let LiftKind::Tensor(params) = lifted.kind() else {
        return Err(SearchError::WrongLiftKind);
    };
    let mut ctx = Ctx::new(base_tree, lifted);
    let root = ctx.walk(base_tree.root(), Some(mode))?;
    let tree = ctx.b.finish(root);
    Ok(match mode {
        TensorMode::SelectorValid => tree.with_tensor_layout(params),
        TensorMode::Total => tree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::CnfFormula;
    use crate::lifting::{lift_parity, lift_tensor, ParityParams, TensorParams};
    use crate::search::depth::{optimal_tree, DepthProblem};
    use crate::search::verify::{verify_search_tree, Domain};

    fn php21() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]])
    }

    #[test]
    fn parity_identity_case() {
        let base = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let (h, t) = optimal_tree(DepthProblem::Search(&base)).unwrap();
        assert_eq!(h, 1);
        let l = lift_parity(&base, ParityParams::new(1, 1).unwrap()).unwrap();
        let lt = lifted_search_tree_parity(&t, &l).unwrap();
        assert_eq!(lt.height(), 2);
        verify_search_tree(&lt, l.formula(), Domain::All).unwrap();
    }

    #[test]
    fn parity_php_k2() {
        let base = php21();
        let (h, t) = optimal_tree(DepthProblem::Search(&base)).unwrap();
        let l = lift_parity(&base, ParityParams::new(2, 1).unwrap()).unwrap();
        let lt = lifted_search_tree_parity(&t, &l).unwrap();
        assert!(lt.height() <= 3 * h);
        verify_search_tree(&lt, l.formula(), Domain::All).unwrap();
    }

    #[test]
    fn tensor_modes() {
        let base = php21();
        let (h, t) = optimal_tree(DepthProblem::Search(&base)).unwrap();
        let p = TensorParams::new(1, 3).unwrap();
        let l = lift_tensor(&base, p).unwrap();
        let valid = lifted_search_tree_tensor(&t, &l, TensorMode::SelectorValid).unwrap();
        assert!(valid.height() <= h * p.per_variable_cost());
        verify_search_tree(&valid, l.formula(), Domain::SelectorValid(&l)).unwrap();
        let total = lifted_search_tree_tensor(&t, &l, TensorMode::Total).unwrap();
        assert!(total.height() <= h * (p.k * p.ell + 1));
        verify_search_tree(&total, l.formula(), Domain::All).unwrap();
    }
}
