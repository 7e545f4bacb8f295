//! Cutting planes over integer multilinear polynomial inequalities `p ≥ 0`,
//! with multiplication by variables up to degree `k` (CP(k)).

mod builder;
mod lifted;
mod php;
mod poly;
mod proof;

pub use builder::{factor_product, pairwise_to_sum, telescope, BuildsCp, CpBuilder, Factor};
pub use lifted::{
    derive_h_type, derive_lifted_axioms, derive_p_type, lift_cp_refutation, CpLiftError,
    LiftedAxiomRanks, LiftedCpRefutation, LiftedDeriver, LiftedPolyBundle,
};
pub use php::cp_php_refutation;
pub use poly::{translate_clause, Monomial, Polynomial};
pub use proof::{
    apply_rule, check_cpk, check_cpk_derivation, cpk_rank, CpCheckError, CpFailure, CpLine,
    CpParseError, CpProof, CpRule,
};
