//! Resolution proofs: representation, checking, rank and text I/O.
//!
//! Text form, one proof line per text line, lines numbered from 1:
//!
//! ```text
//! A <input clause index> <literals> 0
//! R <parent 1> <parent 2> <pivot variable> <literals> 0
//! ```

mod convert;

use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};

pub use convert::{
    dt_to_resolution, lift_refutation_parity, lift_refutation_tensor, refutation_guided_search,
    resolution_to_dt, ConvertError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Justification {
    /// Copy of input clause `index` (1-based).
    Axiom(usize),
    /// Resolvent of lines `p1` and `p2` (1-based, earlier lines) on `pivot`.
    Resolvent { p1: usize, p2: usize, pivot: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResLine {
    pub clause: Clause,
    pub just: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResolutionProof {
    lines: Vec<ResLine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResFailure {
    EmptyProof,
    BadAxiomIndex(usize),
    AxiomMismatch,
    BadParent(usize),
    PivotMissing,
    Tautology,
    ResolventMismatch,
    NotRefutation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resolution check failed at line {line}: {reason:?}")]
pub struct ResCheckError {
    pub line: usize,
    pub reason: ResFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proof line {line}: {message}")]
pub struct ResParseError {
    pub line: usize,
    pub message: String,
}

impl ResolutionProof {
    pub fn new(lines: Vec<ResLine>) -> Self {
        ResolutionProof { lines }
    }

    pub fn lines(&self) -> &[ResLine] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Line by 1-based index.
    pub fn line(&self, index: usize) -> &ResLine {
        &self.lines[index - 1]
    }

    pub fn push(&mut self, clause: Clause, just: Justification) -> usize {
        self.lines.push(ResLine { clause, just });
        self.lines.len()
    }

    /// Longest justification path ending at each line; axioms have rank 0.
    pub fn line_ranks(&self) -> Vec<u32> {
        let mut ranks: Vec<u32> = Vec::with_capacity(self.lines.len());
        for line in &self.lines {
            let r = match line.just {
                Justification::Axiom(_) => 0,
                Justification::Resolvent { p1, p2, .. } => 1 + ranks[p1 - 1].max(ranks[p2 - 1]),
            };
            ranks.push(r);
        }
        ranks
    }

    /// True iff every line is used as a premise at most once.
    pub fn is_tree_like(&self) -> bool {
        let mut uses = vec![0u32; self.lines.len()];
        for line in &self.lines {
            if let Justification::Resolvent { p1, p2, .. } = line.just {
                uses[p1 - 1] += 1;
                uses[p2 - 1] += 1;
            }
        }
        uses.iter().all(|&u| u <= 1)
    }

    /// Equivalent tree-like proof: every line reached more than once from the
    /// last line is duplicated. Lines unreachable from the last are dropped.
    pub fn tree_expand(&self) -> ResolutionProof {
        let mut out = ResolutionProof::default();
        if !self.lines.is_empty() {
            self.expand_into(self.lines.len(), &mut out);
        }
        out
    }

    fn expand_into(&self, index: usize, out: &mut ResolutionProof) -> usize {
        let line = self.line(index);
        let just = match line.just {
            Justification::Axiom(i) => Justification::Axiom(i),
            Justification::Resolvent { p1, p2, pivot } => {
                let a = self.expand_into(p1, out);
                let b = self.expand_into(p2, out);
                Justification::Resolvent {
                    p1: a,
                    p2: b,
                    pivot,
                }
            }
        };
        out.push(line.clause.clone(), just)
    }

    /// Drops lines that the last line does not depend on.
    pub fn prune_unused(&self) -> ResolutionProof {
        let n = self.lines.len();
        if n == 0 {
            return self.clone();
        }
        let mut needed = vec![false; n];
        needed[n - 1] = true;
        for i in (0..n).rev() {
            if needed[i] {
                if let Justification::Resolvent { p1, p2, .. } = self.lines[i].just {
                    needed[p1 - 1] = true;
                    needed[p2 - 1] = true;
                }
            }
        }
        let mut renumber = vec![0; n];
        let mut out = ResolutionProof::default();
        for i in 0..n {
            if !needed[i] {
                continue;
            }
            let just = match self.lines[i].just {
                Justification::Resolvent { p1, p2, pivot } => Justification::Resolvent {
                    p1: renumber[p1 - 1],
                    p2: renumber[p2 - 1],
                    pivot,
                },
                a => a,
            };
            renumber[i] = out.push(self.lines[i].clause.clone(), just);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            match line.just {
                Justification::Axiom(i) => out.push_str(&format!("A {i}")),
                Justification::Resolvent { p1, p2, pivot } => {
                    out.push_str(&format!("R {p1} {p2} {pivot}"))
                }
            }
            for lit in line.clause.literals() {
                out.push_str(&format!(" {}", lit.to_dimacs()));
            }
            out.push_str(" 0\n");
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<ResolutionProof, ResParseError> {
        let mut proof = ResolutionProof::default();
        for (i, raw) in text.lines().enumerate() {
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.is_empty() || fields[0] == "c" {
                continue;
            }
            let line = i + 1;
            let err = |message: String| ResParseError { line, message };
            let ints: Vec<i64> = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<i64>()
                        .map_err(|_| err(format!("invalid integer `{f}`")))
                })
                .collect::<Result<_, _>>()?;
            let header = match fields[0] {
                "A" => 1,
                "R" => 3,
                other => return Err(err(format!("unknown line kind `{other}`"))),
            };
            if ints.len() < header + 1 || *ints.last().unwrap() != 0 {
                return Err(err("line must end with 0".into()));
            }
            if ints[..header].iter().any(|&v| v <= 0) {
                return Err(err("indices must be positive".into()));
            }
            let lits = &ints[header..ints.len() - 1];
            let clause = Clause::new(
                lits.iter()
                    .map(|&l| Literal::from_dimacs(l).map_err(|e| err(e.to_string())))
                    .collect::<Result<_, _>>()?,
            )
            .map_err(|e| err(e.to_string()))?;
            let just = if header == 1 {
                Justification::Axiom(ints[0] as usize)
            } else {
                Justification::Resolvent {
                    p1: ints[0] as usize,
                    p2: ints[1] as usize,
                    pivot: ints[2] as u32,
                }
            };
            proof.push(clause, just);
        }
        Ok(proof)
    }
}

/// Resolvent of `a` and `b` on `pivot`, accepting either orientation.
pub fn resolve(a: &Clause, b: &Clause, pivot: u32) -> Result<Clause, ResFailure> {
    let (la, lb) = match (a.literal_on(pivot), b.literal_on(pivot)) {
        (Some(x), Some(y)) if x.is_positive() != y.is_positive() => (x, y),
        _ => return Err(ResFailure::PivotMissing),
    };
    let mut lits: Vec<Literal> = a.literals().iter().copied().filter(|&l| l != la).collect();
    for &l in b.literals() {
        if l == lb || lits.contains(&l) {
            continue;
        }
        if lits.contains(&l.negated()) {
            return Err(ResFailure::Tautology);
        }
        lits.push(l);
    }
    Ok(Clause::new(lits).expect("tautologies rejected above"))
}

/// Checks every line and that the proof ends with the empty clause.
pub fn check_resolution(
    formula: &CnfFormula,
    proof: &ResolutionProof,
) -> Result<(), ResCheckError> {
    if proof.is_empty() {
        return Err(ResCheckError {
            line: 0,
            reason: ResFailure::EmptyProof,
        });
    }
    for (i, line) in proof.lines().iter().enumerate() {
        let no = i + 1;
        let fail = |reason| ResCheckError { line: no, reason };
        match line.just {
            Justification::Axiom(idx) => {
                let input = formula
                    .clause(idx)
                    .ok_or(fail(ResFailure::BadAxiomIndex(idx)))?;
                if !input.same_literals(&line.clause) {
                    return Err(fail(ResFailure::AxiomMismatch));
                }
            }
            Justification::Resolvent { p1, p2, pivot } => {
                for p in [p1, p2] {
                    if p == 0 || p >= no {
                        return Err(fail(ResFailure::BadParent(p)));
                    }
                }
                let r =
                    resolve(&proof.line(p1).clause, &proof.line(p2).clause, pivot).map_err(fail)?;
                if !r.same_literals(&line.clause) {
                    return Err(fail(ResFailure::ResolventMismatch));
                }
            }
        }
    }
    if !proof.lines().last().unwrap().clause.is_empty() {
        return Err(ResCheckError {
            line: proof.len(),
            reason: ResFailure::NotRefutation,
        });
    }
    Ok(())
}

/// Longest justification path; 0 for axiom-only proofs.
pub fn proof_rank(proof: &ResolutionProof) -> u32 {
    proof.line_ranks().into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn php21() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]])
    }

    pub(crate) fn php21_refutation() -> ResolutionProof {
        ResolutionProof::parse_text("A 1 1 0\nA 2 2 0\nA 3 -1 -2 0\nR 3 2 2 -1 0\nR 4 1 1 0\n")
            .unwrap()
    }

    #[test]
    fn php_refutation_checks() {
        let f = php21();
        let p = php21_refutation();
        assert_eq!(check_resolution(&f, &p), Ok(()));
        assert_eq!(proof_rank(&p), 2);
        assert!(p.is_tree_like());
    }

    #[test]
    fn wrong_pivot_fails_at_line() {
        let f = php21();
        let p =
            ResolutionProof::parse_text("A 1 1 0\nA 2 2 0\nA 3 -1 -2 0\nR 3 2 1 -1 0\nR 4 1 1 0\n")
                .unwrap();
        assert_eq!(
            check_resolution(&f, &p),
            Err(ResCheckError {
                line: 4,
                reason: ResFailure::PivotMissing
            })
        );
    }

    #[test]
    fn missing_empty_clause_fails() {
        let f = php21();
        let p =
            ResolutionProof::parse_text("A 1 1 0\nA 2 2 0\nA 3 -1 -2 0\nR 3 2 2 -1 0\n").unwrap();
        assert_eq!(
            check_resolution(&f, &p).unwrap_err().reason,
            ResFailure::NotRefutation
        );
        let axioms = ResolutionProof::parse_text("A 1 1 0\n").unwrap();
        assert_eq!(proof_rank(&axioms), 0);
    }

    #[test]
    fn tautological_resolvent_rejected() {
        let a = Clause::from_dimacs(&[1, 2]).unwrap();
        let b = Clause::from_dimacs(&[-1, -2]).unwrap();
        assert_eq!(resolve(&a, &b, 1), Err(ResFailure::Tautology));
        let c = Clause::from_dimacs(&[-1, 2]).unwrap();
        assert_eq!(
            resolve(&a, &c, 1).unwrap(),
            Clause::from_dimacs(&[2]).unwrap()
        );
    }

    #[test]
    fn tree_expansion_preserves_rank() {
        let f = php21();
        // Line 4 is used twice.
        let p =
            ResolutionProof::parse_text("A 1 1 0\nA 2 2 0\nA 3 -1 -2 0\nR 3 2 2 -1 0\nR 4 1 1 0\n")
                .unwrap();
        let mut dag = p.clone();
        let reuse = dag.push(
            Clause::empty(),
            Justification::Resolvent {
                p1: 4,
                p2: 1,
                pivot: 1,
            },
        );
        assert_eq!(reuse, 6);
        assert!(!dag.is_tree_like());
        let tree = dag.tree_expand();
        assert!(tree.is_tree_like());
        assert_eq!(proof_rank(&tree), proof_rank(&dag));
        assert_eq!(check_resolution(&f, &tree), Ok(()));
    }

    #[test]
    fn text_round_trip() {
        let p = php21_refutation();
        assert_eq!(ResolutionProof::parse_text(&p.to_text()).unwrap(), p);
        assert!(ResolutionProof::parse_text("R 1 2 0\n").is_err());
        assert_eq!(ResolutionProof::parse_text("A 1 1\n").unwrap_err().line, 1);
    }
}
