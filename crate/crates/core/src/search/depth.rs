//! Exact decision-tree depth by memoised minimax over restrictions.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula};

use super::tree::{DecisionTree, TreeBuilder};

/// Variable cap for truth-table problems.
pub const FUNCTION_VAR_CAP: u32 = 16;
/// Variable cap for clause-search problems.
pub const SEARCH_VAR_CAP: u32 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepthError {
    #[error("{num_vars} variables exceed the cap of {cap}")]
    CapExceeded { num_vars: u32, cap: u32 },
    #[error("formula is satisfiable; the search problem is not total")]
    Satisfiable,
    #[error("truth table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },
}

/// A Boolean function given by its truth table; entry `bits` is the value
/// at the assignment where variable `i` takes bit `i - 1` of `bits`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    num_vars: u32,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(num_vars: u32, table: Vec<bool>) -> Result<Self, DepthError> {
        if num_vars > FUNCTION_VAR_CAP {
            return Err(DepthError::CapExceeded {
                num_vars,
                cap: FUNCTION_VAR_CAP,
            });
        }
        let expected = 1usize << num_vars;
        if table.len() != expected {
            return Err(DepthError::TableLength {
                expected,
                got: table.len(),
            });
        }
        Ok(BooleanFunction { num_vars, table })
    }

    pub fn from_fn(num_vars: u32, f: impl Fn(&Assignment) -> bool) -> Result<Self, DepthError> {
        if num_vars > FUNCTION_VAR_CAP {
            return Err(DepthError::CapExceeded {
                num_vars,
                cap: FUNCTION_VAR_CAP,
            });
        }
        let table = (0..1u64 << num_vars)
            .map(|bits| f(&Assignment::from_bits(num_vars, bits)))
            .collect();
        BooleanFunction::new(num_vars, table)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn value(&self, bits: u64) -> bool {
        self.table[bits as usize]
    }

    pub fn eval(&self, alpha: &Assignment) -> bool {
        self.value(alpha.to_bits())
    }
}

/// A problem whose decision-tree depth can be computed exactly.
#[derive(Debug, Clone, Copy)]
pub enum DepthProblem<'a> {
    Function(&'a BooleanFunction),
    Search(&'a CnfFormula),
}

impl DepthProblem<'_> {
    fn num_vars(&self) -> u32 {
        match self {
            DepthProblem::Function(f) => f.num_vars,
            DepthProblem::Search(f) => f.num_vars(),
        }
    }
}

/// A partial assignment: variable `i` is fixed iff bit `i - 1` of `mask` is
/// set, and then takes bit `i - 1` of `values`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Restriction {
    pub mask: u32,
    pub values: u32,
}

impl Restriction {
    pub fn fix(self, var: u32, value: bool) -> Restriction {
        let bit = 1 << (var - 1);
        Restriction {
            mask: self.mask | bit,
            values: if value {
                self.values | bit
            } else {
                self.values & !bit
            },
        }
    }
}

struct Solver<'a> {
    problem: DepthProblem<'a>,
    n: u32,
    clause_masks: Vec<(u32, u32)>,
    depth_memo: HashMap<Restriction, u32>,
    const_memo: HashMap<Restriction, Option<bool>>,
}

impl<'a> Solver<'a> {
    fn new(problem: DepthProblem<'a>) -> Result<Self, DepthError> {
        let n = problem.num_vars();
        let cap = match problem {
            DepthProblem::Function(_) => FUNCTION_VAR_CAP,
            DepthProblem::Search(_) => SEARCH_VAR_CAP,
        };
        if n > cap {
            return Err(DepthError::CapExceeded { num_vars: n, cap });
        }
        let clause_masks = match problem {
            DepthProblem::Search(f) => f
                .clauses()
                .iter()
                .map(|c| {
                    c.literals().iter().fold((0u32, 0u32), |(m, v), l| {
                        let bit = 1 << (l.var() - 1);
                        (m | bit, if l.is_positive() { v } else { v | bit })
                    })
                })
                .collect(),
            DepthProblem::Function(_) => Vec::new(),
        };
        Ok(Solver {
            problem,
            n,
            clause_masks,
            depth_memo: HashMap::new(),
            const_memo: HashMap::new(),
        })
    }

    /// Leaf label if `r` already determines an answer.
    fn answer(&mut self, r: Restriction) -> Option<usize> {
        match self.problem {
            DepthProblem::Search(_) => self
                .clause_masks
                .iter()
                .position(|&(m, v)| m & !r.mask == 0 && r.values & m == v)
                .map(|i| i + 1),
            DepthProblem::Function(_) => self.constant(r).map(usize::from),
        }
    }

    fn constant(&mut self, r: Restriction) -> Option<bool> {
        let DepthProblem::Function(f) = self.problem else {
            unreachable!()
        };
        let full = if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        };
        if r.mask == full {
            return Some(f.value(u64::from(r.values)));
        }
        if let Some(&c) = self.const_memo.get(&r) {
            return c;
        }
        let v = (!r.mask).trailing_zeros() + 1;
        let a = self.constant(r.fix(v, false));
        let c = if a.is_some() && a == self.constant(r.fix(v, true)) {
            a
        } else {
            None
        };
        self.const_memo.insert(r, c);
        c
    }

    fn free_vars(&self, r: Restriction) -> impl Iterator<Item = u32> {
        let mask = r.mask;
        (1..=self.n).filter(move |v| mask & (1 << (v - 1)) == 0)
    }

    fn depth(&mut self, r: Restriction) -> Result<u32, DepthError> {
        if self.answer(r).is_some() {
            return Ok(0);
        }
        if let Some(&d) = self.depth_memo.get(&r) {
            return Ok(d);
        }
        let free: Vec<u32> = self.free_vars(r).collect();
        if free.is_empty() {
            return Err(DepthError::Satisfiable);
        }
        let mut best = u32::MAX;
        for v in free {
            let a = self.depth(r.fix(v, false))?;
            if 1 + a >= best {
                continue;
            }
            let b = self.depth(r.fix(v, true))?;
            best = best.min(1 + a.max(b));
            if best == 1 {
                break;
            }
        }
        self.depth_memo.insert(r, best);
        Ok(best)
    }

    fn build(&mut self, r: Restriction, b: &mut TreeBuilder) -> Result<usize, DepthError> {
        if let Some(label) = self.answer(r) {
            return Ok(b.leaf(label));
        }
        let target = self.depth(r)?;
        let free: Vec<u32> = self.free_vars(r).collect();
        for v in free {
            let z = self.depth(r.fix(v, false))?;
            let o = self.depth(r.fix(v, true))?;
            if 1 + z.max(o) == target {
                let zero = self.build(r.fix(v, false), b)?;
                let one = self.build(r.fix(v, true), b)?;
                return Ok(b.query(v, zero, one));
            }
        }
        unreachable!("minimax value is attained by some variable")
    }
}

/// Exact decision-tree depth of `problem`.
pub fn exact_decision_depth(problem: DepthProblem<'_>) -> Result<u32, DepthError> {
    Solver::new(problem)?.depth(Restriction::default())
}

/// Exact depth of `problem` restricted by `restriction`.
pub fn exact_depth_restricted(
    problem: DepthProblem<'_>,
    restriction: Restriction,
) -> Result<u32, DepthError> {
    Solver::new(problem)?.depth(restriction)
}

/// Exact depth together with a tree attaining it. Search trees are labelled
/// with 1-based clause indices, function trees with 0/1.
pub fn optimal_tree(problem: DepthProblem<'_>) -> Result<(u32, DecisionTree), DepthError> {
    let mut solver = Solver::new(problem)?;
    let depth = solver.depth(Restriction::default())?;
    let mut b = TreeBuilder::new();
    let root = solver.build(Restriction::default(), &mut b)?;
    Ok((depth, b.finish(root)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::all_assignments;
    use proptest::prelude::*;

    fn php21() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]])
    }

    #[test]
    fn constant_and_xor() {
        let c = BooleanFunction::new(3, vec![true; 8]).unwrap();
        assert_eq!(exact_decision_depth(DepthProblem::Function(&c)).unwrap(), 0);
        let xor = BooleanFunction::from_fn(2, |a| a.value(1) ^ a.value(2)).unwrap();
        assert_eq!(
            exact_decision_depth(DepthProblem::Function(&xor)).unwrap(),
            2
        );
        let dictator = BooleanFunction::from_fn(3, |a| a.value(2)).unwrap();
        assert_eq!(
            exact_decision_depth(DepthProblem::Function(&dictator)).unwrap(),
            1
        );
    }

    #[test]
    fn php_search_depth() {
        let f = php21();
        assert_eq!(exact_decision_depth(DepthProblem::Search(&f)).unwrap(), 2);
        let (d, t) = optimal_tree(DepthProblem::Search(&f)).unwrap();
        assert_eq!(d, t.height());
        for a in all_assignments(2) {
            assert!(!f.clause(t.eval(&a)).unwrap().eval(&a));
        }
    }

    #[test]
    fn satisfiable_search_is_rejected() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1]]);
        assert_eq!(
            exact_decision_depth(DepthProblem::Search(&f)),
            Err(DepthError::Satisfiable)
        );
    }

    #[test]
    fn caps_are_enforced() {
        let f = CnfFormula::new(SEARCH_VAR_CAP + 1, vec![crate::cnf::Clause::empty()]).unwrap();
        assert!(matches!(
            exact_decision_depth(DepthProblem::Search(&f)),
            Err(DepthError::CapExceeded { .. })
        ));
    }

    proptest! {
        #[test]
        fn optimal_tree_computes_function(table in proptest::collection::vec(any::<bool>(), 16)) {
            let f = BooleanFunction::new(4, table).unwrap();
            let (d, t) = optimal_tree(DepthProblem::Function(&f)).unwrap();
            prop_assert_eq!(d, t.height());
            for a in all_assignments(4) {
                prop_assert_eq!(t.eval(&a) == 1, f.eval(&a));
            }
        }

        #[test]
        fn restriction_never_increases_depth(
            table in proptest::collection::vec(any::<bool>(), 16),
            var in 1u32..=4,
            value in any::<bool>(),
        ) {
            let f = BooleanFunction::new(4, table).unwrap();
            let p = DepthProblem::Function(&f);
            let full = exact_decision_depth(p).unwrap();
            let restricted = exact_depth_restricted(p, Restriction::default().fix(var, value)).unwrap();
            prop_assert!(restricted <= full);
        }
    }
}
