//! The MAX-SAT linear relaxation and the integrality-gap experiment.

use std::fmt;

use rand::Rng;

use crate::brute::{brute_maxsat, count_satisfied, BRUTE_FORCE_CAP};
use crate::cnf::{Assignment, CnfFormula};
use crate::generate::{gen_random_tcnf, rng_from_seed, GenError};
use crate::lifting::{lift_gap_mode, LiftError};

use super::simplex::{solve_lp, LinearProgram, LpStatus};

/// Relaxation with `x_1..x_n` (columns `0..n`) and `z_1..z_m` (columns
/// `n..n+m`) in `[0, 1]`: each clause `C_i` gives `(1 − z_i) + Σ ℓ′ ≥ 1`, and
/// the objective is `Σ z_i`.
pub fn build_maxsat_lp(formula: &CnfFormula) -> LinearProgram {
    let n = formula.num_vars() as usize;
    let mut lp = LinearProgram::new(n + formula.num_clauses());
    for (i, clause) in formula.clauses().iter().enumerate() {
        let z = n + i;
        // z − Σ_pos x + Σ_neg x ≤ #neg
        let mut coefs = vec![(z, 1)];
        let mut negatives = 0;
        for lit in clause.literals() {
            let col = lit.var() as usize - 1;
            if lit.is_positive() {
                coefs.push((col, -1));
            } else {
                coefs.push((col, 1));
                negatives += 1;
            }
        }
        lp.add_le(coefs, negatives);
        lp.set_objective(z, 1);
    }
    lp
}

/// Optimum of the MAX-SAT relaxation, solved in floating point.
pub fn maxsat_lp_optimum(formula: &CnfFormula) -> f64 {
    let lp = build_maxsat_lp(formula);
    let s = solve_lp::<f64>(&lp);
    assert_eq!(
        s.status,
        LpStatus::Optimal,
        "the all-zero point is always feasible"
    );
    s.objective
}

/// Mean fraction of clauses satisfied by `trials` uniform assignments.
pub fn random_assignment_fraction(formula: &CnfFormula, trials: usize, seed: u64) -> f64 {
    assert!(trials >= 1, "need at least one trial");
    let m = formula.num_clauses();
    if m == 0 {
        return 1.0;
    }
    let mut rng = rng_from_seed(seed);
    let mut total = 0usize;
    for _ in 0..trials {
        let a = Assignment::new((0..formula.num_vars()).map(|_| rng.gen::<bool>()).collect());
        total += count_satisfied(formula, &a);
    }
    total as f64 / (trials * m) as f64
}

/// How the integral side of a [`GapReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    /// Exhaustive enumeration.
    Exact,
    /// Best of random restarts with greedy flips; a lower bound only.
    LowerBound,
}

impl fmt::Display for IntegralMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntegralMethod::Exact => "exact",
            IntegralMethod::LowerBound => "lower-bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub t: u32,
    pub n: u32,
    pub delta: u32,
    pub seed: u64,
    /// Clauses of the random base formula `F`.
    pub base_clauses: usize,
    /// Clauses of the lifted formula `G` the relaxation is built over.
    pub lifted_clauses: usize,
    pub lp_optimum: f64,
    pub integral_optimum: usize,
    pub method: IntegralMethod,
    /// `lp_optimum / integral_optimum`.
    pub gap: f64,
}

impl GapReport {
    /// Single-line `key=value` record.
    pub fn to_record(&self) -> String {
        format!(
            "t={} n={} delta={} seed={} base_clauses={} lifted_clauses={} lp_optimum={:.6} integral_optimum={} method={} gap={:.6}",
            self.t,
            self.n,
            self.delta,
            self.seed,
            self.base_clauses,
            self.lifted_clauses,
            self.lp_optimum,
            self.integral_optimum,
            self.method,
            self.gap
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GapError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Samples `F` with `Δ·n` random width-`t` clauses, lifts it with the
/// two-cell gap mode, and compares the relaxation optimum of the lift with
/// its integral optimum (exact when the lift has at most
/// [`BRUTE_FORCE_CAP`] variables).
pub fn gap_experiment(t: u32, n: u32, delta: u32, seed: u64) -> Result<GapReport, GapError> {
    let base = gen_random_tcnf(t, n, (delta * n) as usize, seed)?;
    let lifted = lift_gap_mode(&base)?;
    let g = lifted.formula();
    let lp_optimum = maxsat_lp_optimum(g);
    let (integral_optimum, method) = if g.num_vars() <= BRUTE_FORCE_CAP {
        (brute_maxsat(g).expect("within cap"), IntegralMethod::Exact)
    } else {
        (local_search_maxsat(g, 64, seed), IntegralMethod::LowerBound)
    };
    Ok(GapReport {
        t,
        n,
        delta,
        seed,
        base_clauses: base.num_clauses(),
        lifted_clauses: g.num_clauses(),
        lp_optimum,
        integral_optimum,
        method,
        gap: lp_optimum / integral_optimum.max(1) as f64,
    })
}

/// Best clause count over random restarts, each improved by single flips
/// until no flip helps.
pub fn local_search_maxsat(formula: &CnfFormula, restarts: usize, seed: u64) -> usize {
    let mut rng = rng_from_seed(seed);
    let mut best = 0;
    for _ in 0..restarts {
        let mut a = Assignment::new((0..formula.num_vars()).map(|_| rng.gen::<bool>()).collect());
        let mut score = count_satisfied(formula, &a);
        loop {
            let mut improved = false;
            for v in 1..=formula.num_vars() {
                a.set(v, !a.value(v));
                let s = count_satisfied(formula, &a);
                if s > score {
                    score = s;
                    improved = true;
                } else {
                    a.set(v, !a.value(v));
                }
            }
            if !improved {
                break;
            }
        }
        best = best.max(score);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::lift_gap_mode;

    #[test]
    fn contradiction_translation() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        let lp = build_maxsat_lp(&f);
        assert_eq!(lp.num_vars(), 3);
        assert_eq!(lp.num_constraints(), 2);
        // z1 ≤ x1 and z2 ≤ 1 − x1.
        assert_eq!(lp.rows()[0], (vec![(1, 1), (0, -1)], 0));
        assert_eq!(lp.rows()[1], (vec![(2, 1), (0, 1)], 1));
        assert!((maxsat_lp_optimum(&f) - 1.0).abs() < 1e-9);
        assert_eq!(brute_maxsat(&f).unwrap(), 1);
    }

    #[test]
    fn relaxation_dominates_integral_optimum() {
        for seed in 0..10 {
            let f = gen_random_tcnf(3, 6, 30, seed).unwrap();
            let lp = maxsat_lp_optimum(&f);
            assert!(lp + 1e-9 >= brute_maxsat(&f).unwrap() as f64);
            let g = CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]]);
            assert_eq!(brute_maxsat(&g).unwrap(), 2);
        }
    }

    #[test]
    fn lifted_relaxation_is_all_clauses() {
        let f = gen_random_tcnf(3, 4, 20, 7).unwrap();
        let g = lift_gap_mode(&f).unwrap();
        let m = g.formula().num_clauses() as f64;
        assert!((maxsat_lp_optimum(g.formula()) - m).abs() < 1e-6);
    }

    #[test]
    fn random_fraction_expectations() {
        let unit = CnfFormula::from_dimacs_clauses(1, &[&[1]]);
        assert!((random_assignment_fraction(&unit, 100_000, 1) - 0.5).abs() < 0.01);
        let f = gen_random_tcnf(3, 8, 40, 3).unwrap();
        assert!((random_assignment_fraction(&f, 100_000, 2) - 7.0 / 8.0).abs() < 0.01);
        assert_eq!(
            random_assignment_fraction(&f, 1000, 9),
            random_assignment_fraction(&f, 1000, 9)
        );
    }

    #[test]
    fn small_gap_experiment() {
        let r = gap_experiment(3, 4, 10, 1).unwrap();
        assert_eq!(r.method, IntegralMethod::Exact);
        assert_eq!(r.lifted_clauses, 8 * r.base_clauses);
        assert!((r.lp_optimum - r.lifted_clauses as f64).abs() < 1e-6);
        assert!(r.integral_optimum <= r.lifted_clauses);
        assert!(r.gap >= 1.0);
        assert!(r
            .to_record()
            .starts_with("t=3 n=4 delta=10 seed=1 base_clauses=40 lifted_clauses=320 "));
    }

    #[test]
    fn local_search_is_a_lower_bound() {
        let f = gen_random_tcnf(3, 10, 60, 4).unwrap();
        assert!(local_search_maxsat(&f, 8, 1) <= brute_maxsat(&f).unwrap());
    }
}
