//! Exhaustive verification of clause-search trees.

use crate::cnf::{all_assignments, Assignment, CnfFormula};
use crate::lifting::LiftedFormula;

use super::tree::DecisionTree;

/// Assignments over which a search tree is required to be correct.
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    All,
    /// Assignments whose tensor selector groups are all one-hot.
    SelectorValid(&'a LiftedFormula),
    List(&'a [Assignment]),
}

/// An assignment on which the tree's leaf names a clause that is not
/// falsified (or no clause at all).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub assignment: Assignment,
    pub label: usize,
}

/// Checks that the leaf reached by every in-domain assignment names a clause
/// of `formula` falsified by that assignment.
pub fn verify_search_tree(
    tree: &DecisionTree,
    formula: &CnfFormula,
    domain: Domain<'_>,
) -> Result<(), Counterexample> {
    let check = |alpha: &Assignment| {
        let label = tree.eval(alpha);
        match formula.clause(label) {
            Some(c) if !c.eval(alpha) => Ok(()),
            _ => Err(Counterexample {
                assignment: alpha.clone(),
                label,
            }),
        }
    };
    match domain {
        Domain::All => all_assignments(formula.num_vars()).try_for_each(|a| check(&a)),
        Domain::SelectorValid(lifted) => lifted
            .selector_valid_assignments()
            .iter()
            .try_for_each(check),
        Domain::List(list) => list.iter().try_for_each(check),
    }
}
