//! CP(k) proofs: lines, rule application, checking, rank and text format.

use std::fmt;

use thiserror::Error;

use crate::cnf::CnfFormula;

use super::poly::{translate_clause, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CpRule {
    /// `x ≥ 0`, or `1 − x ≥ 0` when `upper`.
    VarBound { var: u32, upper: bool },
    /// Translation of the input clause with this 1-based index.
    ClauseAxiom(usize),
    /// `Σ λ_i p_i ≥ 0` with `λ_i ≥ 0`.
    LinComb(Vec<(usize, i64)>),
    /// Divide by `divisor`, rounding the constant down.
    Division { premise: usize, divisor: i64 },
    /// `p ≥ 0 ⊢ x·p ≥ 0`.
    MultLow { premise: usize, var: u32 },
    /// `p ≥ 0 ⊢ p − x·p ≥ 0`.
    MultHigh { premise: usize, var: u32 },
}

impl CpRule {
    pub fn premises(&self) -> Vec<usize> {
        match self {
            CpRule::VarBound { .. } | CpRule::ClauseAxiom(_) => Vec::new(),
            CpRule::LinComb(terms) => terms.iter().map(|&(p, _)| p).collect(),
            CpRule::Division { premise, .. }
            | CpRule::MultLow { premise, .. }
            | CpRule::MultHigh { premise, .. } => {
                vec![*premise]
            }
        }
    }

    pub fn is_axiom(&self) -> bool {
        matches!(self, CpRule::VarBound { .. } | CpRule::ClauseAxiom(_))
    }

    pub fn is_mult(&self) -> bool {
        matches!(self, CpRule::MultLow { .. } | CpRule::MultHigh { .. })
    }
}

/// A proof line: the polynomial `p` of `p ≥ 0` and its justification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpLine {
    pub poly: Polynomial,
    pub rule: CpRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpProof {
    degree: u32,
    lines: Vec<CpLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpFailure {
    #[error("premise {0} does not precede the line")]
    BadPremise(usize),
    #[error("negative multiplier {0}")]
    NegativeMultiplier(i64),
    #[error("divisor {0} is not positive")]
    BadDivisor(i64),
    #[error("coefficients are not divisible by {0}")]
    NotDivisible(i64),
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeExceeded { degree: usize, bound: u32 },
    #[error("multiplied premise has degree {degree}, bound is {bound}")]
    PremiseDegree { degree: usize, bound: u32 },
    #[error("variable {0} is out of range")]
    BadVariable(u32),
    #[error("clause index {0} is out of range")]
    BadAxiomIndex(usize),
    #[error("coefficient overflow")]
    Overflow,
    #[error("stated polynomial `{stated}` differs from derived `{derived}`")]
    Mismatch { stated: String, derived: String },
    #[error("last line is not -1 >= 0")]
    NotRefutation,
    #[error("proof is empty")]
    EmptyProof,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct CpCheckError {
    pub line: usize,
    pub reason: CpFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CpParseError {
    pub line: usize,
    pub message: String,
}

/// Conclusion of `rule` given the lines before it (1-based premise indices).
pub fn apply_rule(
    formula: &CnfFormula,
    degree: u32,
    earlier: &[CpLine],
    rule: &CpRule,
) -> Result<Polynomial, CpFailure> {
    let premise = |i: usize| -> Result<&Polynomial, CpFailure> {
        if i == 0 || i > earlier.len() {
            Err(CpFailure::BadPremise(i))
        } else {
            Ok(&earlier[i - 1].poly)
        }
    };
    let check_var = |v: u32| {
        if v == 0 || v > formula.num_vars() {
            Err(CpFailure::BadVariable(v))
        } else {
            Ok(())
        }
    };
    let mult_premise = |i: usize| -> Result<&Polynomial, CpFailure> {
        let p = premise(i)?;
        if p.degree() + 1 > degree as usize {
            return Err(CpFailure::PremiseDegree {
                degree: p.degree(),
                bound: degree,
            });
        }
        Ok(p)
    };
    let out = match rule {
        CpRule::VarBound { var, upper } => {
            check_var(*var)?;
            if *upper {
                Polynomial::constant(1)
                    .sub(&Polynomial::var(*var))
                    .ok_or(CpFailure::Overflow)?
            } else {
                Polynomial::var(*var)
            }
        }
        CpRule::ClauseAxiom(idx) => {
            translate_clause(formula.clause(*idx).ok_or(CpFailure::BadAxiomIndex(*idx))?)
        }
        CpRule::LinComb(terms) => {
            let mut acc = Polynomial::default();
            for &(i, lambda) in terms {
                if lambda < 0 {
                    return Err(CpFailure::NegativeMultiplier(lambda));
                }
                acc = acc
                    .add_scaled(premise(i)?, lambda)
                    .ok_or(CpFailure::Overflow)?;
            }
            acc
        }
        CpRule::Division {
            premise: i,
            divisor,
        } => {
            if *divisor < 1 {
                return Err(CpFailure::BadDivisor(*divisor));
            }
            premise(*i)?
                .divide_round(*divisor)
                .ok_or(CpFailure::NotDivisible(*divisor))?
        }
        CpRule::MultLow { premise: i, var } => {
            check_var(*var)?;
            mult_premise(*i)?.mul_var(*var).ok_or(CpFailure::Overflow)?
        }
        CpRule::MultHigh { premise: i, var } => {
            check_var(*var)?;
            let p = mult_premise(*i)?;
            p.sub(&p.mul_var(*var).ok_or(CpFailure::Overflow)?)
                .ok_or(CpFailure::Overflow)?
        }
    };
    if out.degree() > degree as usize {
        return Err(CpFailure::DegreeExceeded {
            degree: out.degree(),
            bound: degree,
        });
    }
    Ok(out)
}

impl CpProof {
    pub fn new(degree: u32) -> Self {
        CpProof {
            degree,
            lines: Vec::new(),
        }
    }

    pub fn from_lines(degree: u32, lines: Vec<CpLine>) -> Self {
        CpProof { degree, lines }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn lines(&self) -> &[CpLine] {
        &self.lines
    }

    pub fn lines_mut(&mut self) -> &mut Vec<CpLine> {
        &mut self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Line by 1-based index.
    pub fn line(&self, i: usize) -> &CpLine {
        &self.lines[i - 1]
    }

    /// Appends a line without checking it; returns its 1-based index.
    pub fn push(&mut self, poly: Polynomial, rule: CpRule) -> usize {
        self.lines.push(CpLine { poly, rule });
        self.lines.len()
    }

    /// Rank of each line: 0 for axioms, else one more than its deepest
    /// premise. Premises must precede their lines.
    pub fn line_ranks(&self) -> Vec<u32> {
        let mut ranks: Vec<u32> = Vec::with_capacity(self.lines.len());
        for line in &self.lines {
            let r = if line.rule.is_axiom() {
                0
            } else {
                1 + line
                    .rule
                    .premises()
                    .iter()
                    .filter_map(|&p| ranks.get(p.wrapping_sub(1)).copied())
                    .max()
                    .unwrap_or(0)
            };
            ranks.push(r);
        }
        ranks
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("cpk {} {}\n", self.degree, self.lines.len());
        for line in &self.lines {
            out.push_str(&line.rule.to_string());
            out.push_str(" : ");
            out.push_str(&line.poly.to_text());
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<CpProof, CpParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, message: &str| CpParseError {
            line,
            message: message.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (degree, count) = match h.as_slice() {
            ["cpk", k, n] => (
                k.parse::<u32>().map_err(|_| err(hl, "invalid degree"))?,
                n.parse::<usize>()
                    .map_err(|_| err(hl, "invalid line count"))?,
            ),
            _ => return Err(err(hl, "expected `cpk <k> <num_lines>`")),
        };
        let mut proof = CpProof::new(degree);
        for (ln, text) in lines {
            let (rule, poly) = text.split_once(':').ok_or_else(|| err(ln, "missing `:`"))?;
            let rule = parse_rule(rule).map_err(|m| err(ln, &m))?;
            let poly = Polynomial::parse_text(poly).map_err(|m| err(ln, &m))?;
            proof.push(poly, rule);
        }
        if proof.len() != count {
            return Err(err(
                hl,
                &format!("header declares {count} lines, found {}", proof.len()),
            ));
        }
        Ok(proof)
    }
}

fn parse_rule(text: &str) -> Result<CpRule, String> {
    let tok: Vec<&str> = text.split_whitespace().collect();
    let num = |s: &str| {
        s.parse::<i64>()
            .map_err(|_| format!("invalid number `{s}`"))
    };
    let idx = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("invalid index `{s}`"))
    };
    let var = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| format!("invalid variable `{s}`"))
    };
    Ok(match tok.as_slice() {
        ["B", v, "lo"] => CpRule::VarBound {
            var: var(v)?,
            upper: false,
        },
        ["B", v, "hi"] => CpRule::VarBound {
            var: var(v)?,
            upper: true,
        },
        ["A", i] => CpRule::ClauseAxiom(idx(i)?),
        ["D", p, c] => CpRule::Division {
            premise: idx(p)?,
            divisor: num(c)?,
        },
        ["ML", p, v] => CpRule::MultLow {
            premise: idx(p)?,
            var: var(v)?,
        },
        ["MH", p, v] => CpRule::MultHigh {
            premise: idx(p)?,
            var: var(v)?,
        },
        ["L", n, rest @ ..] => {
            let n = idx(n)?;
            if rest.len() != 2 * n {
                return Err(format!(
                    "LinComb declares {n} premises, found {} tokens",
                    rest.len()
                ));
            }
            let terms = rest
                .chunks(2)
                .map(|c| Ok((idx(c[0])?, num(c[1])?)))
                .collect::<Result<Vec<_>, String>>()?;
            CpRule::LinComb(terms)
        }
        _ => return Err(format!("unknown rule `{}`", text.trim())),
    })
}

impl fmt::Display for CpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpRule::VarBound { var, upper } => {
                write!(f, "B {var} {}", if *upper { "hi" } else { "lo" })
            }
            CpRule::ClauseAxiom(i) => write!(f, "A {i}"),
            CpRule::LinComb(terms) => {
                write!(f, "L {}", terms.len())?;
                for (p, l) in terms {
                    write!(f, " {p} {l}")?;
                }
                Ok(())
            }
            CpRule::Division { premise, divisor } => write!(f, "D {premise} {divisor}"),
            CpRule::MultLow { premise, var } => write!(f, "ML {premise} {var}"),
            CpRule::MultHigh { premise, var } => write!(f, "MH {premise} {var}"),
        }
    }
}

/// Checks every line of `proof` against `formula` without requiring a
/// contradiction at the end.
pub fn check_cpk_derivation(formula: &CnfFormula, proof: &CpProof) -> Result<(), CpCheckError> {
    for (i, line) in proof.lines.iter().enumerate() {
        let fail = |reason| CpCheckError {
            line: i + 1,
            reason,
        };
        let derived =
            apply_rule(formula, proof.degree, &proof.lines[..i], &line.rule).map_err(fail)?;
        if derived != line.poly {
            return Err(fail(CpFailure::Mismatch {
                stated: line.poly.to_text(),
                derived: derived.to_text(),
            }));
        }
    }
    Ok(())
}

/// Checks `proof` as a CP(k) refutation of `formula`: every line must follow
/// by its rule and the last line must be `−1 ≥ 0`.
pub fn check_cpk(formula: &CnfFormula, proof: &CpProof) -> Result<(), CpCheckError> {
    if proof.is_empty() {
        return Err(CpCheckError {
            line: 0,
            reason: CpFailure::EmptyProof,
        });
    }
    check_cpk_derivation(formula, proof)?;
    if proof.lines.last().map(|l| &l.poly) != Some(&Polynomial::constant(-1)) {
        return Err(CpCheckError {
            line: proof.len(),
            reason: CpFailure::NotRefutation,
        });
    }
    Ok(())
}

/// Longest justification path; LinComb of any arity counts as one step.
pub fn cpk_rank(proof: &CpProof) -> u32 {
    proof.line_ranks().into_iter().max().unwrap_or(0)
}
