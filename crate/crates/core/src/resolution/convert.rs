//! Conversions between clause-search trees and tree-like resolution, the
//! refutation-guided walk to a falsified clause, and lifted refutations.

use thiserror::Error;

use crate::cnf::{Assignment, Clause, CnfFormula};
use crate::lifting::LiftedFormula;
use crate::search::{
    lifted_search_tree_parity, lifted_search_tree_tensor, DecisionTree, Node, SearchError,
    TensorMode,
};

use super::{resolve, Justification, ResolutionProof};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("leaf names clause {clause}, which is not falsified along its path")]
    LeafNotFalsified { clause: usize },
    #[error("tree uses interval nodes; only variable queries convert to resolution")]
    IntervalNode,
    #[error("proof is not tree-like")]
    NotTreeLike,
    #[error("proof is empty")]
    EmptyProof,
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Tree-like refutation from a clause-search tree. Each leaf becomes the
/// axiom it names; each query resolves its children's clauses on the queried
/// variable, or reuses a child clause that does not mention it. Every line's
/// clause is falsified by the path to its node, so rank is at most the
/// tree's height. The tree is checked structurally along the way.
pub fn dt_to_resolution(
    tree: &DecisionTree,
    formula: &CnfFormula,
) -> Result<ResolutionProof, ConvertError> {
    if tree.has_interval_nodes() {
        return Err(ConvertError::IntervalNode);
    }
    let tree = tree.prune_repeated_queries();
    let mut proof = ResolutionProof::default();
    let mut path = Assignment::all_false(formula.num_vars());
    let mut fixed = vec![false; formula.num_vars() as usize + 1];
    convert(
        &tree,
        tree.root(),
        formula,
        &mut path,
        &mut fixed,
        &mut proof,
    )?;
    Ok(proof.prune_unused())
}

fn convert(
    tree: &DecisionTree,
    idx: usize,
    formula: &CnfFormula,
    path: &mut Assignment,
    fixed: &mut Vec<bool>,
    proof: &mut ResolutionProof,
) -> Result<usize, ConvertError> {
    match tree.node(idx) {
        Node::Leaf(label) => {
            let clause = formula
                .clause(label)
                .ok_or(ConvertError::LeafNotFalsified { clause: label })?;
            let falsified = clause
                .literals()
                .iter()
                .all(|l| fixed[l.var() as usize] && !l.value_under(path.value(l.var())));
            if !falsified {
                return Err(ConvertError::LeafNotFalsified { clause: label });
            }
            Ok(proof.push(clause.clone(), Justification::Axiom(label)))
        }
        Node::Interval { .. } => Err(ConvertError::IntervalNode),
        Node::Query { var, zero, one } => {
            fixed[var as usize] = true;
            path.set(var, false);
            let l0 = convert(tree, zero, formula, path, fixed, proof);
            let l0 = match l0 {
                Ok(l) if !proof.line(l).clause.contains_var(var) => {
                    fixed[var as usize] = false;
                    return Ok(l);
                }
                other => other,
            };
            path.set(var, true);
            let l1 = convert(tree, one, formula, path, fixed, proof);
            fixed[var as usize] = false;
            let (l0, l1) = (l0?, l1?);
            if !proof.line(l1).clause.contains_var(var) {
                return Ok(l1);
            }
            let c = resolve(&proof.line(l0).clause, &proof.line(l1).clause, var)
                .expect("both children are falsified along the same path");
            Ok(proof.push(
                c,
                Justification::Resolvent {
                    p1: l0,
                    p2: l1,
                    pivot: var,
                },
            ))
        }
    }
}

/// Search tree read off a tree-like refutation: starting from the empty
/// clause, query each pivot and move to the parent falsified by the answer.
pub fn resolution_to_dt(proof: &ResolutionProof) -> Result<DecisionTree, ConvertError> {
    if proof.is_empty() {
        return Err(ConvertError::EmptyProof);
    }
    if !proof.is_tree_like() {
        return Err(ConvertError::NotTreeLike);
    }
    let mut b = crate::search::TreeBuilder::new();
    let mut fixed: std::collections::HashMap<u32, bool> = std::collections::HashMap::new();
    let root = walk(proof, proof.len(), &mut fixed, &mut b);
    Ok(b.finish(root))
}

fn falsified_parent(
    proof: &ResolutionProof,
    p1: usize,
    p2: usize,
    pivot: u32,
    value: bool,
) -> usize {
    // The parent whose pivot literal is false under `value`.
    let lit = proof
        .line(p1)
        .clause
        .literal_on(pivot)
        .expect("checked proof");
    if lit.value_under(value) {
        p2
    } else {
        p1
    }
}

fn walk(
    proof: &ResolutionProof,
    line: usize,
    fixed: &mut std::collections::HashMap<u32, bool>,
    b: &mut crate::search::TreeBuilder,
) -> usize {
    match proof.line(line).just {
        Justification::Axiom(idx) => b.leaf(idx),
        Justification::Resolvent { p1, p2, pivot } => {
            if let Some(&v) = fixed.get(&pivot) {
                return walk(proof, falsified_parent(proof, p1, p2, pivot, v), fixed, b);
            }
            let mut kids = [0; 2];
            for (slot, v) in kids.iter_mut().zip([false, true]) {
                fixed.insert(pivot, v);
                *slot = walk(proof, falsified_parent(proof, p1, p2, pivot, v), fixed, b);
            }
            fixed.remove(&pivot);
            b.query(pivot, kids[0], kids[1])
        }
    }
}

/// Walks back from the last line, always stepping to a parent falsified by
/// `alpha` (the first parent when both are), and returns the input clause
/// index of the axiom reached.
pub fn refutation_guided_search(proof: &ResolutionProof, alpha: &Assignment) -> usize {
    let mut line = proof.len();
    loop {
        match proof.line(line).just {
            Justification::Axiom(idx) => return idx,
            Justification::Resolvent { p1, p2, .. } => {
                line = if falsifies(alpha, &proof.line(p1).clause) {
                    p1
                } else {
                    p2
                };
            }
        }
    }
}

fn falsifies(alpha: &Assignment, clause: &Clause) -> bool {
    !clause.eval(alpha)
}

/// Refutation of a parity lift obtained from a base search tree: lift the
/// tree and convert it. Rank is at most `(k·a + 1)` times the tree height.
pub fn lift_refutation_parity(
    base_tree: &DecisionTree,
    lifted: &LiftedFormula,
) -> Result<ResolutionProof, ConvertError> {
    let tree = lifted_search_tree_parity(base_tree, lifted)?;
    dt_to_resolution(&tree, lifted.formula())
}

/// Refutation of a tensor lift via the selector-scanning lifted tree. Rank
/// is at most `(k·ℓ + 1)` times the tree height.
pub fn lift_refutation_tensor(
    base_tree: &DecisionTree,
    lifted: &LiftedFormula,
) -> Result<ResolutionProof, ConvertError> {
    let tree = lifted_search_tree_tensor(base_tree, lifted, TensorMode::Total)?;
    dt_to_resolution(&tree, lifted.formula())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::all_assignments;
    use crate::lifting::{lift_parity, lift_tensor, ParityParams, TensorParams};
    use crate::resolution::{check_resolution, proof_rank};
    use crate::search::{optimal_tree, verify_search_tree, DepthProblem, Domain};

    fn php21() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]])
    }

    #[test]
    fn optimal_tree_gives_rank_two() {
        let f = php21();
        let (d, t) = optimal_tree(DepthProblem::Search(&f)).unwrap();
        let p = dt_to_resolution(&t, &f).unwrap();
        assert_eq!(check_resolution(&f, &p), Ok(()));
        assert_eq!(proof_rank(&p), d);
        assert!(p.is_tree_like());
        let back = resolution_to_dt(&p).unwrap();
        assert!(back.height() <= d);
        verify_search_tree(&back, &f, Domain::All).unwrap();
    }

    #[test]
    fn trivial_refutation() {
        let f = CnfFormula::new(1, vec![Clause::empty()]).unwrap();
        let p = dt_to_resolution(&DecisionTree::leaf(1), &f).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(check_resolution(&f, &p), Ok(()));
        let t = resolution_to_dt(&p).unwrap();
        assert_eq!(t.height(), 0);
    }

    #[test]
    fn wrong_leaf_is_rejected() {
        let f = php21();
        let err = dt_to_resolution(&DecisionTree::leaf(1), &f).unwrap_err();
        assert_eq!(err, ConvertError::LeafNotFalsified { clause: 1 });
    }

    #[test]
    fn guided_search_traces() {
        let p = crate::resolution::tests::php21_refutation();
        assert_eq!(
            refutation_guided_search(&p, &Assignment::new(vec![true, true])),
            3
        );
        assert_eq!(
            refutation_guided_search(&p, &Assignment::new(vec![false, false])),
            1
        );
        let f = php21();
        for a in all_assignments(2) {
            let c = refutation_guided_search(&p, &a);
            assert!(!f.clause(c).unwrap().eval(&a));
        }
    }

    #[test]
    fn parity_lift_refutation() {
        let f = php21();
        let (d, t) = optimal_tree(DepthProblem::Search(&f)).unwrap();
        for (k, a) in [(1, 1), (2, 1), (1, 2)] {
            let l = lift_parity(&f, ParityParams::new(k, a).unwrap()).unwrap();
            let p = lift_refutation_parity(&t, &l).unwrap();
            assert_eq!(check_resolution(l.formula(), &p), Ok(()));
            assert!(proof_rank(&p) <= (k * a + 1) * d);
        }
    }

    #[test]
    fn tensor_lift_refutation() {
        let f = php21();
        let (d, t) = optimal_tree(DepthProblem::Search(&f)).unwrap();
        let p = TensorParams::new(2, 2).unwrap();
        let l = lift_tensor(&f, p).unwrap();
        let proof = lift_refutation_tensor(&t, &l).unwrap();
        assert_eq!(check_resolution(l.formula(), &proof), Ok(()));
        assert!(proof_rank(&proof) <= (p.k * p.ell + 1) * d);
    }
}
