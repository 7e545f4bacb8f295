//! Logarithmic-rank cutting-planes refutation of the graph pigeonhole
//! principle.

use std::collections::HashMap;

use crate::cnf::CnfFormula;
use crate::generate::{gen_php, GenError};
use crate::graph::BipartiteGraph;

use super::builder::{pairwise_to_sum, CpBuilder, Factor};
use super::poly::Polynomial;
use super::proof::CpProof;

/// Index of each hole clause `¬e ∨ ¬e′`, keyed by the sorted variable pair.
pub(crate) fn hole_clause_index(formula: &CnfFormula) -> HashMap<(u32, u32), usize> {
    let mut index = HashMap::new();
    for (i, c) in formula.clauses().iter().enumerate() {
        if let [a, b] = c.literals() {
            if !a.is_positive() && !b.is_positive() {
                let (x, y) = (a.var().min(b.var()), a.var().max(b.var()));
                index.entry((x, y)).or_insert(i + 1);
            }
        }
    }
    index
}

/// CP refutation (degree 1) of `gen_php(graph)`: each hole's pairwise
/// clauses are merged into `Σ_u e_(u,v) ≤ 1`, and one combination with the
/// pigeon clauses gives `|U| ≤ |V|`, i.e. `−1 ≥ 0`.
pub fn cp_php_refutation(graph: &BipartiteGraph) -> Result<(CnfFormula, CpProof), GenError> {
    let formula = gen_php(graph)?;
    let proof = {
        let index = hole_clause_index(&formula);
        let mut b = CpBuilder::new(&formula, 1);
        let mut terms = Vec::new();
        for u in 1..=graph.u_count() {
            terms.push((b.axiom(u as usize), 1));
        }
        for v in 1..=graph.v_count() {
            let vars = graph.hole_vars(v);
            let line = match vars.len() {
                0 => continue,
                1 => b.bound(Factor::Neg(vars[0])),
                _ => {
                    let items: Vec<Polynomial> = vars.iter().map(|&x| Polynomial::var(x)).collect();
                    pairwise_to_sum(&mut b, &items, &mut |b, i, j| {
                        let key = (vars[i].min(vars[j]), vars[i].max(vars[j]));
                        b.axiom(index[&key])
                    })
                }
            };
            terms.push((line, 1));
        }
        let sum = b.lincomb(&terms);
        let c = b.poly(sum).constant_term();
        assert!(
            b.poly(sum).is_constant() && c < 0,
            "pigeon and hole bounds must cancel"
        );
        b.divide(sum, -c);
        b.finish()
    };
    Ok((formula, proof))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::{check_cpk, cpk_rank};
    use crate::generate::gen_bipartite;
    use crate::lifting::ceil_log2;

    #[test]
    fn two_pigeons_rank_one() {
        let (f, p) = cp_php_refutation(&BipartiteGraph::complete(2)).unwrap();
        assert_eq!(check_cpk(&f, &p), Ok(()));
        assert_eq!(cpk_rank(&p), 1);
    }

    #[test]
    fn complete_graphs() {
        for n in 2..=12u32 {
            let (f, p) = cp_php_refutation(&BipartiteGraph::complete(n)).unwrap();
            assert_eq!(check_cpk(&f, &p), Ok(()));
            assert!(cpk_rank(&p) <= 4 * ceil_log2(n) + 2, "n = {n}");
        }
        let (_, p) = cp_php_refutation(&BipartiteGraph::complete(8)).unwrap();
        assert!(cpk_rank(&p) <= 14);
    }

    #[test]
    fn sparse_graphs_with_empty_holes() {
        let g = BipartiteGraph::new(3, 2, vec![(1, 1), (2, 1), (3, 1)]).unwrap();
        let (f, p) = cp_php_refutation(&g).unwrap();
        assert_eq!(check_cpk(&f, &p), Ok(()));
        for seed in 0..5 {
            let g = gen_bipartite(6, 2, seed).unwrap();
            let (f, p) = cp_php_refutation(&g).unwrap();
            assert_eq!(check_cpk(&f, &p), Ok(()));
        }
    }
}
