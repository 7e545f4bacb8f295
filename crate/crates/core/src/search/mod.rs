//! Decision trees, exact depth oracles, consistent systems and lifted
//! search trees.

pub mod consistent;
pub mod depth;
pub mod lifted;
pub mod tree;
pub mod verify;

pub use consistent::{
    binary_search_tree, f_interval_function, f_subset, first_falsified, halving_intervals,
    SearchError,
};
pub use depth::{
    exact_decision_depth, exact_depth_restricted, optimal_tree, BooleanFunction, DepthError,
    DepthProblem, Restriction, FUNCTION_VAR_CAP, SEARCH_VAR_CAP,
};
pub use lifted::{lifted_search_tree_parity, lifted_search_tree_tensor, TensorMode};
pub use tree::{DecisionTree, Node, Step, TreeBuilder, TreeError};
pub use verify::{verify_search_tree, Counterexample, Domain};
