//! Formula-family generators: graph pigeonhole formulas, random t-CNFs and
//! random bounded-degree pigeon/hole graphs.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so every
//! generator is a pure function of its arguments.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::graph::BipartiteGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("pigeonhole formulas need |U| = |V| + 1, got |U| = {u}, |V| = {v}")]
    NotPigeonhole { u: u32, v: u32 },
    #[error("clause width {t} exceeds the {n} available variables")]
    WidthTooLarge { t: u32, n: u32 },
    #[error("random graphs need at least 2 pigeons and degree at least 1")]
    GraphTooSmall,
}

/// The seeded generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Graph pigeonhole formula: pigeon clauses in pigeon order, then hole
/// clauses ordered by `(v, u, u′)`.
pub fn gen_php(graph: &BipartiteGraph) -> Result<CnfFormula, GenError> {
    if graph.u_count() != graph.v_count() + 1 {
        return Err(GenError::NotPigeonhole {
            u: graph.u_count(),
            v: graph.v_count(),
        });
    }
    let mut clauses = Vec::new();
    for u in 1..=graph.u_count() {
        let vars = graph.pigeon_vars(u);
        if vars.is_empty() {
            log::warn!("pigeon {u} has no edges; its clause is empty");
        }
        let lits = vars.into_iter().map(Literal::pos).collect();
        clauses.push(Clause::new(lits).expect("distinct edge variables"));
    }
    for v in 1..=graph.v_count() {
        let vars = graph.hole_vars(v);
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                clauses.push(Clause::new(vec![Literal::neg(a), Literal::neg(b)]).expect("a != b"));
            }
        }
    }
    Ok(CnfFormula::new(graph.num_edges() as u32, clauses).expect("edge variables in range"))
}

/// Number of distinct width-`t` clauses over `n` variables, `2^t * C(n, t)`.
pub fn tcnf_universe_size(t: u32, n: u32) -> u128 {
    if t > n {
        return 0;
    }
    let mut binom: u128 = 1;
    for i in 0..t {
        binom = binom * u128::from(n - i) / u128::from(i + 1);
    }
    binom << t
}

/// `m` independent uniform draws from the width-exactly-`t` clauses over `n`
/// variables. Literals inside a clause are sorted by variable.
pub fn gen_random_tcnf(t: u32, n: u32, m: usize, seed: u64) -> Result<CnfFormula, GenError> {
    if t > n {
        return Err(GenError::WidthTooLarge { t, n });
    }
    let mut rng = rng_from_seed(seed);
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let mut vars: Vec<u32> = sample(&mut rng, n as usize, t as usize)
            .into_iter()
            .map(|v| v as u32 + 1)
            .collect();
        vars.sort_unstable();
        let lits = vars
            .into_iter()
            .map(|v| Literal::new(v, rng.gen()).expect("v >= 1"))
            .collect();
        clauses.push(Clause::new(lits).expect("distinct sampled variables"));
    }
    Ok(CnfFormula::new(n, clauses).expect("variables in range"))
}

/// `pigeons` pigeons and `pigeons - 1` holes; each pigeon is joined to
/// `min(degree, pigeons - 1)` holes chosen uniformly without replacement.
pub fn gen_bipartite(pigeons: u32, degree: u32, seed: u64) -> Result<BipartiteGraph, GenError> {
    if pigeons < 2 || degree < 1 {
        return Err(GenError::GraphTooSmall);
    }
    let holes = pigeons - 1;
    let d = degree.min(holes);
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 1..=pigeons {
        for v in sample(&mut rng, holes as usize, d as usize) {
            edges.push((u, v as u32 + 1));
        }
    }
    Ok(BipartiteGraph::new(pigeons, holes, edges).expect("sampled edges are distinct"))
}
