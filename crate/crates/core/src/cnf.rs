//! Literals, clauses, CNF formulas and total assignments.
//!
//! Variables are numbered from 1. Clauses are addressed by 1-based indices,
//! matching DIMACS and every proof format in this crate.

use std::fmt;

use thiserror::Error;

/// Errors raised when constructing formula objects.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("variable index 0 is not allowed")]
    ZeroVariable,
    #[error("variable {var} occurs more than once in a clause")]
    DuplicateVariable { var: u32 },
    #[error("literal on variable {var} exceeds the declared {num_vars} variables")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("assignment covers {got} variables, formula has {expected}")]
    AssignmentLength { got: usize, expected: usize },
}

/// A variable together with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Result<Self, CnfError> {
        if var == 0 {
            return Err(CnfError::ZeroVariable);
        }
        Ok(Literal { var, positive })
    }

    /// Positive literal on `var`. Panics on `var == 0`.
    pub fn pos(var: u32) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal {
            var,
            positive: true,
        }
    }

    /// Negative literal on `var`. Panics on `var == 0`.
    pub fn neg(var: u32) -> Self {
        assert!(var >= 1, "variable indices start at 1");
        Literal {
            var,
            positive: false,
        }
    }

    pub fn from_dimacs(lit: i64) -> Result<Self, CnfError> {
        if lit == 0 || lit.unsigned_abs() > u64::from(u32::MAX) {
            return Err(CnfError::ZeroVariable);
        }
        Literal::new(lit.unsigned_abs() as u32, lit > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Truth value of the literal under a value for its variable.
    pub fn value_under(self, var_value: bool) -> bool {
        var_value == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals over pairwise distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self, CnfError> {
        for (i, lit) in literals.iter().enumerate() {
            if literals[..i].iter().any(|l| l.var == lit.var) {
                return Err(CnfError::DuplicateVariable { var: lit.var });
            }
        }
        Ok(Clause { literals })
    }

    pub fn empty() -> Self {
        Clause::default()
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Self, CnfError> {
        let literals = lits
            .iter()
            .map(|&l| Literal::from_dimacs(l))
            .collect::<Result<Vec<_>, _>>()?;
        Clause::new(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn max_var(&self) -> u32 {
        self.literals.iter().map(|l| l.var).max().unwrap_or(0)
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.literals.contains(&lit)
    }

    pub fn contains_var(&self, var: u32) -> bool {
        self.literals.iter().any(|l| l.var == var)
    }

    /// Literal on `var`, if the clause mentions it.
    pub fn literal_on(&self, var: u32) -> Option<Literal> {
        self.literals.iter().copied().find(|l| l.var == var)
    }

    pub fn eval(&self, assignment: &Assignment) -> bool {
        self.literals
            .iter()
            .any(|l| l.value_under(assignment.value(l.var)))
    }

    /// Same literal set, sorted by variable. Used for equality up to order.
    pub fn sorted(&self) -> Clause {
        let mut literals = self.literals.clone();
        literals.sort();
        Clause { literals }
    }

    pub fn same_literals(&self, other: &Clause) -> bool {
        self.width() == other.width() && self.literals.iter().all(|l| other.contains(*l))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∨ ")?;
            }
            if l.positive {
                write!(f, "x{}", l.var)?;
            } else {
                write!(f, "¬x{}", l.var)?;
            }
        }
        write!(f, ")")
    }
}

/// Clauses over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for c in &clauses {
            let var = c.max_var();
            if var > num_vars {
                return Err(CnfError::VariableOutOfRange { var, num_vars });
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Builds a formula from DIMACS-style integer clauses. Panics on invalid
    /// input; meant for literals written in code.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i64]]) -> Self {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c).expect("invalid clause literal"))
            .collect();
        CnfFormula::new(num_vars, clauses).expect("invalid formula")
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clause by 1-based index.
    pub fn clause(&self, index: usize) -> Option<&Clause> {
        index.checked_sub(1).and_then(|i| self.clauses.get(i))
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn eval(&self, assignment: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    /// 1-based indices of the clauses falsified by `assignment`.
    pub fn falsified(&self, assignment: &Assignment) -> impl Iterator<Item = usize> + '_ {
        let assignment = assignment.clone();
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(_, c)| !c.eval(&assignment))
            .map(|(i, _)| i + 1)
    }
}

/// A total assignment to variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all_false(num_vars: u32) -> Self {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    /// Variable `i` takes bit `i - 1` of `bits`.
    pub fn from_bits(num_vars: u32, bits: u64) -> Self {
        assert!(num_vars <= 64);
        Assignment {
            values: (0..num_vars).map(|i| (bits >> i) & 1 == 1).collect(),
        }
    }

    pub fn to_bits(&self) -> u64 {
        assert!(self.values.len() <= 64);
        self.values
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &v)| acc | (u64::from(v) << i))
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    /// Value of variable `var` (1-based). Panics when out of range.
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn check_covers(&self, formula: &CnfFormula) -> Result<(), CnfError> {
        if self.values.len() != formula.num_vars as usize {
            return Err(CnfError::AssignmentLength {
                got: self.values.len(),
                expected: formula.num_vars as usize,
            });
        }
        Ok(())
    }
}

/// Every assignment over `num_vars` variables, in binary counting order.
pub fn all_assignments(num_vars: u32) -> impl Iterator<Item = Assignment> {
    assert!(num_vars < 63, "enumeration over {num_vars} variables");
    (0..1u64 << num_vars).map(move |bits| Assignment::from_bits(num_vars, bits))
}

pub fn eval_clause(clause: &Clause, assignment: &Assignment) -> bool {
    clause.eval(assignment)
}
