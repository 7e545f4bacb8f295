use crate::cnf::CnfFormula;

use super::{Cell, LiftError, LiftKind, LiftedFormula, ParityParams, Provenance, TensorParams};

fn reject_empty(base: &CnfFormula) -> Result<(), LiftError> {
    match base.clauses().iter().position(|c| c.is_empty()) {
        Some(i) => Err(LiftError::EmptyBaseClause { index: i + 1 }),
        None => Ok(()),
    }
}

/// Every `t`-tuple of cell indices in `0..num_cells`, lexicographic.
fn cell_tuples(num_cells: u32, t: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = u64::from(num_cells).pow(t as u32);
    (0..total).map(move |mut r| {
        let mut tuple = vec![0; t];
        for slot in tuple.iter_mut().rev() {
            *slot = (r % u64::from(num_cells)) as u32;
            r /= u64::from(num_cells);
        }
        tuple
    })
}

fn build(base: &CnfFormula, kind: LiftKind, provenance: Vec<Provenance>) -> LiftedFormula {
    let shell = LiftedFormula::assemble(base, kind, Vec::new(), Vec::new());
    let clauses = provenance
        .iter()
        .map(|tag| shell.clause_from_provenance(tag))
        .collect();
    LiftedFormula::assemble(base, kind, clauses, provenance)
}

/// Tensor lift: all (I) clauses, then all (II) clauses, then one (III)
/// clause per base clause and cell tuple.
pub fn lift_tensor(base: &CnfFormula, params: TensorParams) -> Result<LiftedFormula, LiftError> {
    reject_empty(base)?;
    let kind = LiftKind::Tensor(params);
    let shell = LiftedFormula::assemble(base, kind, Vec::new(), Vec::new());
    let m = base.num_vars();
    let mut tags = Vec::new();
    for block in 1..=m {
        for coord in 1..=params.k {
            tags.push(Provenance::TypeI { block, coord });
        }
    }
    for block in 1..=m {
        for coord in 1..=params.k {
            for a in 1..=params.ell {
                for a2 in a + 1..=params.ell {
                    tags.push(Provenance::TypeII {
                        block,
                        coord,
                        a,
                        a2,
                    });
                }
            }
        }
    }
    push_type_iii(&shell, base, &mut tags);
    Ok(build(base, kind, tags))
}

fn push_type_iii(shell: &LiftedFormula, base: &CnfFormula, tags: &mut Vec<Provenance>) {
    for (idx, clause) in base.clauses().iter().enumerate() {
        for tuple in cell_tuples(shell.num_cells(), clause.width()) {
            let cells = tuple
                .into_iter()
                .map(|r| shell.cell_from_index(r))
                .collect();
            tags.push(Provenance::TypeIII {
                source: idx + 1,
                cells,
            });
        }
    }
}

/// Simplified two-cell lift: blocks `x_{i,1}, x_{i,2}, y_i`, where `y_i = 1`
/// selects cell 2. Each width-`t` clause yields `2^t` clauses of width `2t`.
pub fn lift_gap_mode(base: &CnfFormula) -> Result<LiftedFormula, LiftError> {
    reject_empty(base)?;
    let kind = LiftKind::GapMode;
    let shell = LiftedFormula::assemble(base, kind, Vec::new(), Vec::new());
    let mut tags = Vec::new();
    push_type_iii(&shell, base, &mut tags);
    Ok(build(base, kind, tags))
}

/// Parity lift: for each base clause, cell tuple and selector pattern that
/// selects the tuple, one clause excluding that pattern. There are no
/// selector-only clauses.
pub fn lift_parity(base: &CnfFormula, params: ParityParams) -> Result<LiftedFormula, LiftError> {
    reject_empty(base)?;
    let kind = LiftKind::Parity(params);
    let shell = LiftedFormula::assemble(base, kind, Vec::new(), Vec::new());
    let (k, a) = (params.k as usize, params.a as usize);
    let mut tags = Vec::new();
    for (idx, clause) in base.clauses().iter().enumerate() {
        let t = clause.width();
        let free_bits = t * (k - 1) * a;
        for tuple in cell_tuples(shell.num_cells(), t) {
            let cells: Vec<Cell> = tuple.iter().map(|&r| shell.cell_from_index(r)).collect();
            for free in 0..1u64 << free_bits {
                let mut pattern = Vec::with_capacity(t * k * a);
                let mut pos = 0;
                for cell in &cells {
                    let mut parity = vec![false; a];
                    for _ in 0..k - 1 {
                        for par in parity.iter_mut() {
                            let bit = (free >> (free_bits - 1 - pos)) & 1 == 1;
                            pos += 1;
                            *par ^= bit;
                            pattern.push(bit);
                        }
                    }
                    for (b, par) in parity.iter().enumerate() {
                        pattern.push((cell.0[b] == 1) ^ par);
                    }
                }
                tags.push(Provenance::Star {
                    source: idx + 1,
                    cells: cells.clone(),
                    pattern,
                });
            }
        }
    }
    Ok(build(base, kind, tags))
}
