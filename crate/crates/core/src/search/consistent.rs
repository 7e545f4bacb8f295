//! The consistent system of functions induced by the first-falsified rule,
//! and the binary-search composition of its members into a search tree.

use std::ops::RangeInclusive;

use thiserror::Error;

use crate::cnf::{all_assignments, Assignment, CnfFormula};

use super::depth::{BooleanFunction, DepthError};
use super::tree::{DecisionTree, TreeBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the assignment satisfies every clause")]
    NoFalsifiedClause,
    #[error("oracle tree for clauses {lo}..={hi} disagrees with f_S at {assignment:?}")]
    InconsistentOracle {
        lo: usize,
        hi: usize,
        assignment: Vec<bool>,
    },
    #[error("formula has no clauses")]
    EmptyFormula,
    #[error("base leaf has no matching lifted clause")]
    LeafLookup,
    #[error("base trees must use variable queries only")]
    UnsupportedNode,
    #[error("lift kind does not match the requested construction")]
    WrongLiftKind,
    #[error(transparent)]
    Depth(#[from] DepthError),
}

/// Smallest index of a clause falsified by `alpha`.
pub fn first_falsified(formula: &CnfFormula, alpha: &Assignment) -> Result<usize, SearchError> {
    formula
        .falsified(alpha)
        .next()
        .ok_or(SearchError::NoFalsifiedClause)
}

/// `f_S` for the canonical rule: 1 iff the first falsified clause lies in
/// `subset` (1-based indices).
pub fn f_subset(
    formula: &CnfFormula,
    subset: &[usize],
    alpha: &Assignment,
) -> Result<bool, SearchError> {
    Ok(subset.contains(&first_falsified(formula, alpha)?))
}

/// Truth table of `f_S` for a contiguous clause interval.
pub fn f_interval_function(
    formula: &CnfFormula,
    interval: RangeInclusive<usize>,
) -> Result<BooleanFunction, SearchError> {
    let mut table = Vec::with_capacity(1 << formula.num_vars());
    for alpha in all_assignments(formula.num_vars()) {
        table.push(interval.contains(&first_falsified(formula, &alpha)?));
    }
    Ok(BooleanFunction::new(formula.num_vars(), table)?)
}

/// The clause intervals queried by [`binary_search_tree`], in query order.
pub fn halving_intervals(num_clauses: usize) -> Vec<RangeInclusive<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![(1, num_clauses)];
    while let Some((lo, hi)) = stack.pop() {
        if lo >= hi {
            continue;
        }
        let mid = split(lo, hi);
        out.push(lo..=mid);
        stack.push((mid + 1, hi));
        stack.push((lo, mid));
    }
    out
}

fn split(lo: usize, hi: usize) -> usize {
    let size = hi - lo + 1;
    lo + size.div_ceil(2) - 1
}

/// Builds a tree for the search problem by binary search over clause
/// intervals. `oracle(lo, hi)` must return a tree computing `f_S` for
/// `S = lo..=hi`; each oracle tree is checked exhaustively before use.
pub fn binary_search_tree(
    formula: &CnfFormula,
    oracle: &mut dyn FnMut(usize, usize) -> DecisionTree,
) -> Result<DecisionTree, SearchError> {
    if formula.num_clauses() == 0 {
        return Err(SearchError::EmptyFormula);
    }
    let mut b = TreeBuilder::new();
    let root = build(formula, oracle, &mut b, 1, formula.num_clauses())?;
    Ok(b.finish(root))
}

fn build(
    formula: &CnfFormula,
    oracle: &mut dyn FnMut(usize, usize) -> DecisionTree,
    b: &mut TreeBuilder,
    lo: usize,
    hi: usize,
) -> Result<usize, SearchError> {
    if lo == hi {
        return Ok(b.leaf(lo));
    }
    let mid = split(lo, hi);
    let tree = oracle(lo, mid);
    for alpha in all_assignments(formula.num_vars()) {
        let expected = (lo..=mid).contains(&first_falsified(formula, &alpha)?);
        if (tree.eval(&alpha) == 1) != expected {
            return Err(SearchError::InconsistentOracle {
                lo,
                hi: mid,
                assignment: alpha.values().to_vec(),
            });
        }
    }
    let left = build(formula, oracle, b, lo, mid)?;
    let right = build(formula, oracle, b, mid + 1, hi)?;
    let root = tree.root();
    Ok(b.graft(&tree, root, &mut |_, label| {
        if label == 1 {
            left
        } else {
            right
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::depth::{optimal_tree, DepthProblem};

    fn php21() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]])
    }

    #[test]
    fn first_falsified_examples() {
        let f = php21();
        assert_eq!(
            first_falsified(&f, &Assignment::new(vec![true, true])),
            Ok(3)
        );
        assert_eq!(
            first_falsified(&f, &Assignment::new(vec![false, false])),
            Ok(1)
        );
        let sat = CnfFormula::from_dimacs_clauses(1, &[&[1]]);
        assert_eq!(
            first_falsified(&sat, &Assignment::new(vec![true])),
            Err(SearchError::NoFalsifiedClause)
        );
    }

    #[test]
    fn subsets_are_monotone() {
        let f = php21();
        for alpha in all_assignments(2) {
            for s in 0u32..8 {
                for t in 0u32..8 {
                    if s & !t != 0 {
                        continue;
                    }
                    let set = |m: u32| {
                        (1..=3)
                            .filter(|i| m & (1 << (i - 1)) != 0)
                            .collect::<Vec<_>>()
                    };
                    if f_subset(&f, &set(s), &alpha).unwrap() {
                        assert!(f_subset(&f, &set(t), &alpha).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn single_clause_needs_no_queries() {
        let f = CnfFormula::new(1, vec![crate::cnf::Clause::empty()]).unwrap();
        let mut calls = 0;
        let t = binary_search_tree(&f, &mut |_, _| {
            calls += 1;
            DecisionTree::leaf(0)
        })
        .unwrap();
        assert_eq!(calls, 0);
        assert_eq!(t.height(), 0);
        assert_eq!(t.eval(&Assignment::new(vec![false])), 1);
    }

    #[test]
    fn php_binary_search_solves_search() {
        let f = php21();
        assert_eq!(halving_intervals(3), vec![1..=2, 1..=1]);
        let mut max_h = 0;
        let t = binary_search_tree(&f, &mut |lo, hi| {
            let g = f_interval_function(&f, lo..=hi).unwrap();
            let (d, tree) = optimal_tree(DepthProblem::Function(&g)).unwrap();
            max_h = max_h.max(d);
            tree
        })
        .unwrap();
        assert!(t.height() <= max_h * 2);
        for alpha in all_assignments(2) {
            assert!(!f.clause(t.eval(&alpha)).unwrap().eval(&alpha));
        }
    }

    #[test]
    fn wrong_oracle_is_detected() {
        let f = php21();
        let err = binary_search_tree(&f, &mut |_, _| DecisionTree::leaf(1)).unwrap_err();
        assert!(matches!(
            err,
            SearchError::InconsistentOracle { lo: 1, hi: 2, .. }
        ));
    }
}
