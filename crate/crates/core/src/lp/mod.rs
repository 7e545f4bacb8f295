//! Linear programming: a small simplex solver, the MAX-SAT relaxation with
//! the integrality-gap experiment, and ε-approximate degree.

mod degree;
mod maxsat;
mod simplex;

pub use degree::{approx_degree, best_error, pm1_table, APPROX_DEGREE_VAR_CAP};
pub use maxsat::{
    build_maxsat_lp, gap_experiment, local_search_maxsat, maxsat_lp_optimum,
    random_assignment_fraction, GapError, GapReport, IntegralMethod,
};
pub use simplex::{ratio, solve_lp, LinearProgram, LpSolution, LpStatus, Scalar, F64_TOLERANCE};
