//! DIMACS CNF reading and writing.
//!
//! The writer emits the canonical form `p cnf <n> <m>` followed by one clause
//! per line, literals separated by single spaces and terminated by `0`. The
//! parser accepts comment lines (`c ...`), blank lines and clauses spread
//! over several lines.

use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: literal {literal} is out of range for {num_vars} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: u32,
    },
    #[error("line {line}: variable {var} appears twice in one clause")]
    DuplicateVariable { line: usize, var: u32 },
    #[error("line {line}: expected {expected} clauses, found {found}")]
    ClauseCount {
        line: usize,
        expected: usize,
        found: usize,
    },
}

fn malformed(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Malformed {
        line,
        message: message.into(),
    }
}

/// Parses a DIMACS CNF byte stream. Line numbers in errors are 1-based.
pub fn parse_dimacs(input: &[u8]) -> Result<CnfFormula, DimacsError> {
    let text = std::str::from_utf8(input).map_err(|e| {
        let line = input[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        malformed(line, "input is not valid UTF-8")
    })?;

    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let Some((num_vars, num_clauses)) = header else {
            header = Some(parse_header(trimmed, line)?);
            continue;
        };
        if trimmed.starts_with('p') {
            return Err(malformed(line, "duplicate problem line"));
        }
        for token in trimmed.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| malformed(line, format!("invalid literal `{token}`")))?;
            if lit == 0 {
                if clauses.len() == num_clauses {
                    return Err(DimacsError::ClauseCount {
                        line,
                        expected: num_clauses,
                        found: clauses.len() + 1,
                    });
                }
                clauses.push(Clause::new(std::mem::take(&mut pending)).expect("checked"));
                continue;
            }
            if lit.unsigned_abs() > u64::from(num_vars) {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    literal: lit,
                    num_vars,
                });
            }
            let literal = Literal::from_dimacs(lit).expect("nonzero, in range");
            if pending.iter().any(|l| l.var() == literal.var()) {
                return Err(DimacsError::DuplicateVariable {
                    line,
                    var: literal.var(),
                });
            }
            pending.push(literal);
        }
    }

    let Some((num_vars, num_clauses)) = header else {
        return Err(malformed(last_line.max(1), "missing `p cnf` problem line"));
    };
    if !pending.is_empty() {
        return Err(malformed(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != num_clauses {
        return Err(DimacsError::ClauseCount {
            line: last_line,
            expected: num_clauses,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(num_vars, clauses).expect("literals range-checked"))
}

fn parse_header(line_text: &str, line: usize) -> Result<(u32, usize), DimacsError> {
    let fields: Vec<&str> = line_text.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
        return Err(malformed(line, "expected `p cnf <vars> <clauses>`"));
    }
    let num_vars = fields[2]
        .parse()
        .map_err(|_| malformed(line, format!("invalid variable count `{}`", fields[2])))?;
    let num_clauses = fields[3]
        .parse()
        .map_err(|_| malformed(line, format!("invalid clause count `{}`", fields[3])))?;
    Ok((num_vars, num_clauses))
}

/// Canonical DIMACS bytes for `formula`.
pub fn write_dimacs(formula: &CnfFormula) -> Vec<u8> {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.num_clauses());
    for clause in formula.clauses() {
        for lit in clause.literals() {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out.into_bytes()
}
