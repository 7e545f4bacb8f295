//! Exhaustive satisfiability and MAX-SAT at desk scale.
//!
//! The variables are split into a low and a high half. For every assignment
//! to each half we precompute the bitset of clauses that half already
//! satisfies; a full assignment satisfies the union, so each of the `2^n`
//! assignments costs one pass of word-wise OR and popcount.

use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula};

/// Largest variable count accepted by the exhaustive routines.
pub const BRUTE_FORCE_CAP: u32 = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteError {
    #[error("{num_vars} variables exceed the exhaustive-search cap of {cap}")]
    TooManyVars { num_vars: u32, cap: u32 },
}

struct HalfTables {
    lo_bits: u32,
    words: usize,
    lo: Vec<u64>,
    hi: Vec<u64>,
}

impl HalfTables {
    fn new(formula: &CnfFormula) -> Self {
        let n = formula.num_vars();
        let lo_bits = n / 2;
        let hi_bits = n - lo_bits;
        let words = formula.num_clauses().div_ceil(64).max(1);
        let masks: Vec<(u64, u64)> = formula
            .clauses()
            .iter()
            .map(|c| {
                c.literals().iter().fold((0u64, 0u64), |(p, q), l| {
                    let bit = 1u64 << (l.var() - 1);
                    if l.is_positive() {
                        (p | bit, q)
                    } else {
                        (p, q | bit)
                    }
                })
            })
            .collect();
        let table = |shift: u32, bits: u32| {
            let width = 1usize << bits;
            let range = if bits == 0 { 0 } else { (1u64 << bits) - 1 };
            let mut out = vec![0u64; width * words];
            for a in 0..width as u64 {
                let row = &mut out[a as usize * words..(a as usize + 1) * words];
                for (ci, &(p, q)) in masks.iter().enumerate() {
                    let p = (p >> shift) & range;
                    let q = (q >> shift) & range;
                    if (a & p) | (!a & q) != 0 {
                        row[ci / 64] |= 1 << (ci % 64);
                    }
                }
            }
            out
        };
        HalfTables {
            lo_bits,
            words,
            lo: table(0, lo_bits),
            hi: table(lo_bits, hi_bits),
        }
    }

    fn rows(&self, table: &[u64]) -> usize {
        table.len() / self.words
    }

    fn row<'a>(&self, table: &'a [u64], idx: usize) -> &'a [u64] {
        &table[idx * self.words..(idx + 1) * self.words]
    }

    /// Visits `(bits, satisfied count)` for every assignment until `visit`
    /// returns false.
    fn scan(&self, mut visit: impl FnMut(u64, u32) -> bool) {
        for h in 0..self.rows(&self.hi) {
            let hrow = self.row(&self.hi, h);
            for l in 0..self.rows(&self.lo) {
                let lrow = self.row(&self.lo, l);
                let count: u32 = lrow
                    .iter()
                    .zip(hrow)
                    .map(|(a, b)| (a | b).count_ones())
                    .sum();
                let bits = ((h as u64) << self.lo_bits) | l as u64;
                if !visit(bits, count) {
                    return;
                }
            }
        }
    }
}

fn check_cap(formula: &CnfFormula) -> Result<(), BruteError> {
    if formula.num_vars() > BRUTE_FORCE_CAP {
        return Err(BruteError::TooManyVars {
            num_vars: formula.num_vars(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    Ok(())
}

/// Some satisfying assignment, or `None` when the formula is unsatisfiable.
pub fn find_satisfying(formula: &CnfFormula) -> Result<Option<Assignment>, BruteError> {
    check_cap(formula)?;
    if formula.has_empty_clause() {
        return Ok(None);
    }
    let m = formula.num_clauses() as u32;
    let tables = HalfTables::new(formula);
    let mut found = None;
    tables.scan(|bits, count| {
        if count == m {
            found = Some(bits);
            false
        } else {
            true
        }
    });
    Ok(found.map(|bits| Assignment::from_bits(formula.num_vars(), bits)))
}

/// Exhaustive satisfiability. Panics beyond [`BRUTE_FORCE_CAP`] variables.
pub fn is_satisfiable(formula: &CnfFormula) -> bool {
    find_satisfying(formula)
        .expect("formula too large for exhaustive search")
        .is_some()
}

/// Maximum number of simultaneously satisfiable clauses.
pub fn brute_maxsat(formula: &CnfFormula) -> Result<usize, BruteError> {
    check_cap(formula)?;
    let m = formula.num_clauses() as u32;
    let tables = HalfTables::new(formula);
    let mut best = 0;
    tables.scan(|_, count| {
        best = best.max(count);
        best < m
    });
    Ok(best as usize)
}

/// Number of clauses satisfied by `assignment`.
pub fn count_satisfied(formula: &CnfFormula, assignment: &Assignment) -> usize {
    formula
        .clauses()
        .iter()
        .filter(|c| c.eval(assignment))
        .count()
}
