//! Degree-(κ+1) cutting-planes derivations over a tensor lift of arity κ.
//!
//! For block `i` and cell `c`, `**y**_{i,c} = Π_p y_{i,p,c_p}` and
//! `**e**_i = Σ_c x_{i,c}·**y**_{i,c}`. Substituting `**e**_i` for `e_i`
//! turns a linear refutation of the base formula into a refutation of the
//! lift once the base axioms have been rederived for the new polynomials.

use std::collections::HashMap;

use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::lifting::{Cell, LiftKind, LiftedFormula, Provenance, TensorParams};

use super::builder::{factor_product, pairwise_to_sum, telescope, BuildsCp, CpBuilder, Factor};
use super::poly::{Monomial, Polynomial};
use super::proof::{CpProof, CpRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpLiftError {
    #[error("derivations need a tensor lift")]
    NotTensor,
    #[error("lifted formula was built from a different base formula")]
    BaseMismatch,
    #[error("base line {line} uses a multiplication rule")]
    UnsupportedRule { line: usize },
    #[error("base line {line} is not linear")]
    NonLinear { line: usize },
    #[error("base clause {index} is neither all-positive nor a negative pair")]
    UnsupportedClause { index: usize },
}

/// The polynomials `**y**_{i,c}` and `**e**_i` of a tensor lift.
#[derive(Debug, Clone, Copy)]
pub struct LiftedPolyBundle<'a> {
    lifted: &'a LiftedFormula,
    params: TensorParams,
}

impl<'a> LiftedPolyBundle<'a> {
    pub fn new(lifted: &'a LiftedFormula) -> Result<Self, CpLiftError> {
        match lifted.kind() {
            LiftKind::Tensor(params) => Ok(LiftedPolyBundle { lifted, params }),
            _ => Err(CpLiftError::NotTensor),
        }
    }

    pub fn lifted(&self) -> &'a LiftedFormula {
        self.lifted
    }

    pub fn kappa(&self) -> u32 {
        self.params.k
    }

    pub fn ell(&self) -> u32 {
        self.params.ell
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.lifted.cells().collect()
    }

    pub fn y_factors(&self, block: u32, cell: &Cell) -> Vec<Factor> {
        cell.0
            .iter()
            .enumerate()
            .map(|(p, &a)| Factor::Pos(self.lifted.y_var(block, p as u32 + 1, a)))
            .collect()
    }

    pub fn y_monomial(&self, block: u32, cell: &Cell) -> Monomial {
        Monomial::new(
            self.y_factors(block, cell)
                .iter()
                .map(|f| f.var())
                .collect(),
        )
    }

    /// `x_{i,c}·**y**_{i,c}` as factors.
    pub fn z_factors(&self, block: u32, cell: &Cell) -> Vec<Factor> {
        let mut f = self.y_factors(block, cell);
        f.push(Factor::Pos(self.lifted.x_var(block, cell)));
        f
    }

    pub fn z_poly(&self, block: u32, cell: &Cell) -> Polynomial {
        factor_product(&self.z_factors(block, cell))
    }

    pub fn e_poly(&self, block: u32) -> Polynomial {
        self.lifted.cells().fold(Polynomial::default(), |acc, c| {
            acc.add(&self.z_poly(block, &c)).expect("small")
        })
    }

    /// `Σ a_i **e**_i + b` for a linear base polynomial `Σ a_i e_i + b`.
    pub fn substitute(&self, p: &Polynomial) -> Option<Polynomial> {
        let mut out = Polynomial::constant(p.constant_term());
        for (m, c) in p.terms() {
            let [v] = m.vars() else { return None };
            out = out.add_scaled(&self.e_poly(*v), c)?;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Target {
    IPrime(u32),
    IIPrime(u32, u32, u32),
    IIIPrime(usize, Vec<u32>),
    YUpper(u32, u32),
    ELower(u32),
    EUpper(u32),
    PType(usize),
    HType(usize),
}

/// Builds derivations over a tensor lift in CP(κ+1), sharing lines between
/// targets.
pub struct LiftedDeriver<'a> {
    b: CpBuilder<'a>,
    bundle: LiftedPolyBundle<'a>,
    memo: HashMap<Target, usize>,
}

impl<'a> BuildsCp<'a> for LiftedDeriver<'a> {
    fn builder(&mut self) -> &mut CpBuilder<'a> {
        &mut self.b
    }
}

impl<'a> LiftedDeriver<'a> {
    pub fn new(lifted: &'a LiftedFormula) -> Result<Self, CpLiftError> {
        let bundle = LiftedPolyBundle::new(lifted)?;
        Ok(LiftedDeriver {
            b: CpBuilder::new(lifted.formula(), bundle.kappa() + 1),
            bundle,
            memo: HashMap::new(),
        })
    }

    pub fn bundle(&self) -> &LiftedPolyBundle<'a> {
        &self.bundle
    }

    pub fn poly(&self, line: usize) -> &Polynomial {
        self.b.poly(line)
    }

    pub fn rank(&self, line: usize) -> u32 {
        self.b.rank(line)
    }

    pub fn finish(self) -> CpProof {
        self.b.finish()
    }

    fn lifted(&self) -> &'a LiftedFormula {
        self.bundle.lifted
    }

    fn tagged(&mut self, tag: Provenance) -> usize {
        let idx = self
            .lifted()
            .clause_index_of(&tag)
            .expect("tensor lift contains every tagged clause");
        self.b.axiom(idx)
    }

    fn memoized(&mut self, t: Target, f: impl FnOnce(&mut Self) -> usize) -> usize {
        if let Some(&l) = self.memo.get(&t) {
            return l;
        }
        let l = f(self);
        self.memo.insert(t, l);
        l
    }

    /// Lines `Π factors · line` for each `(λ, line, factors)`, combined.
    fn flat(&mut self, terms: &[(i64, usize, Vec<Factor>)]) -> usize {
        let lines: Vec<(usize, i64)> = terms
            .iter()
            .map(|(l, line, f)| (self.b.times(*line, f), *l))
            .collect();
        self.b.lincomb(&lines)
    }

    fn products(&mut self, lists: Vec<Vec<Factor>>) -> Vec<(usize, i64)> {
        lists.into_iter().map(|f| (self.b.product(&f), 1)).collect()
    }

    fn cell_of(&self, index: u32) -> Cell {
        self.lifted().cell_from_index(index)
    }

    /// `(I′)`: `Σ_c **y**_{i,c} − 1 ≥ 0`, as the telescoped product of the
    /// `(I)` clauses of block `i`.
    pub fn i_prime(&mut self, block: u32) -> usize {
        self.memoized(Target::IPrime(block), |d| {
            let (kappa, ell) = (d.bundle.kappa(), d.bundle.ell());
            let mut terms = Vec::new();
            for p in 1..=kappa {
                let axiom = d.tagged(Provenance::TypeI { block, coord: p });
                for prefix in tuples(ell, p - 1) {
                    let f: Vec<Factor> = prefix
                        .iter()
                        .enumerate()
                        .map(|(q, &a)| Factor::Pos(d.lifted().y_var(block, q as u32 + 1, a)))
                        .collect();
                    terms.push((1, axiom, f));
                }
            }
            let l = d.flat(&terms);
            let expected = d
                .bundle
                .cells()
                .iter()
                .fold(Polynomial::constant(-1), |acc, c| {
                    acc.add(&Polynomial::term(1, d.bundle.y_monomial(block, c)))
                        .unwrap()
                });
            d.b.expect_poly(l, &expected);
            l
        })
    }

    /// `(II′)`: `1 − **y**_{i,c} − **y**_{i,c′} ≥ 0` for distinct cells.
    pub fn ii_prime(&mut self, block: u32, c: &Cell, c2: &Cell) -> usize {
        let (i, j) = (self.lifted().cell_index(c), self.lifted().cell_index(c2));
        assert_ne!(i, j, "(II′) needs distinct cells");
        let (i, j) = (i.min(j), i.max(j));
        self.memoized(Target::IIPrime(block, i, j), |d| {
            let (c, c2) = (d.cell_of(i), d.cell_of(j));
            let p =
                c.0.iter()
                    .zip(&c2.0)
                    .position(|(a, b)| a != b)
                    .expect("distinct cells") as u32
                    + 1;
            let (a, a2) = (c.0[p as usize - 1], c2.0[p as usize - 1]);
            let axiom = d.tagged(Provenance::TypeII {
                block,
                coord: p,
                a: a.min(a2),
                a2: a.max(a2),
            });
            let mut terms = vec![(axiom, 1)];
            for cell in [&c, &c2] {
                let ys = d.bundle.y_factors(block, cell);
                let lead = ys[p as usize - 1];
                let rest: Vec<Factor> = ys.iter().copied().filter(|&f| f != lead).collect();
                terms.extend(d.products(telescope(&[lead], &rest)));
            }
            let l = d.b.lincomb(&terms);
            let expected = Polynomial::constant(1)
                .sub(&Polynomial::term(1, d.bundle.y_monomial(block, &c)))
                .and_then(|q| q.sub(&Polynomial::term(1, d.bundle.y_monomial(block, &c2))))
                .unwrap();
            d.b.expect_poly(l, &expected);
            l
        })
    }

    /// `(III′)` for base clause `source` and one cell per literal:
    /// `t − 1 − Σ_j **y**_j·f_j ≥ 0` with `f_j = x` for a negative literal
    /// and `1 − x` for a positive one.
    pub fn iii_prime(&mut self, source: usize, cells: &[Cell]) -> usize {
        let key: Vec<u32> = cells.iter().map(|c| self.lifted().cell_index(c)).collect();
        self.memoized(Target::IIIPrime(source, key), |d| {
            let base = d
                .lifted()
                .base()
                .clause(source)
                .expect("valid base clause")
                .clone();
            let axiom = d.tagged(Provenance::TypeIII {
                source,
                cells: cells.to_vec(),
            });
            let t = base.width() as i64;
            let k = d.bundle.kappa() as i64 + 1;
            let mut groups = Vec::new();
            for (lit, cell) in base.literals().iter().zip(cells) {
                let x = d.lifted().x_var(lit.var(), cell);
                let mut u = d.bundle.y_factors(lit.var(), cell);
                u.push(if lit.is_positive() {
                    Factor::Neg(x)
                } else {
                    Factor::Pos(x)
                });
                groups.push(u);
            }
            let l = if t == 1 {
                let ys = groups[0][..groups[0].len() - 1].to_vec();
                d.b.times(axiom, &ys)
            } else {
                // Σ_r u_r − K·Π u telescoped for every literal, then divide.
                let mut terms = vec![(axiom, 1)];
                for u in &groups {
                    for (r, &lead) in u.iter().enumerate() {
                        let rest: Vec<Factor> = u
                            .iter()
                            .enumerate()
                            .filter(|&(s, _)| s != r)
                            .map(|(_, &f)| f)
                            .collect();
                        terms.extend(d.products(telescope(&[lead], &rest)));
                    }
                }
                let sum = d.b.lincomb(&terms);
                d.b.divide(sum, k)
            };
            let expected = groups.iter().fold(Polynomial::constant(t - 1), |acc, u| {
                acc.sub(&factor_product(u)).unwrap()
            });
            d.b.expect_poly(l, &expected);
            l
        })
    }

    /// `**y**_{i,c} ≥ 0`.
    pub fn y_lower(&mut self, block: u32, cell: &Cell) -> usize {
        let f = self.bundle.y_factors(block, cell);
        self.b.product(&f)
    }

    /// `1 − **y**_{i,c} ≥ 0`.
    pub fn y_upper(&mut self, block: u32, cell: &Cell) -> usize {
        let idx = self.lifted().cell_index(cell);
        self.memoized(Target::YUpper(block, idx), |d| {
            let ys = d.bundle.y_factors(block, cell);
            let terms = d.products(telescope(&[], &ys));
            d.b.lincomb(&terms)
        })
    }

    /// `**e**_i ≥ 0`.
    pub fn e_lower(&mut self, block: u32) -> usize {
        self.memoized(Target::ELower(block), |d| {
            let lists = d
                .bundle
                .cells()
                .iter()
                .map(|c| d.bundle.z_factors(block, c))
                .collect();
            let terms = d.products(lists);
            let l = d.b.lincomb(&terms);
            d.b.expect_poly(l, &d.bundle.e_poly(block));
            l
        })
    }

    /// Certificate for `1 − Σ_a y_{i,p,a} ≥ 0` as `(λ, line, factors)`.
    fn coordinate_at_most_one(&mut self, block: u32, p: u32) -> Vec<(i64, usize, Vec<Factor>)> {
        let ell = self.bundle.ell();
        let y = |d: &Self, a: u32| d.lifted().y_var(block, p, a);
        let ii = |d: &mut Self, a: u32, a2: u32| {
            d.tagged(Provenance::TypeII {
                block,
                coord: p,
                a,
                a2,
            })
        };
        match ell {
            2 => vec![(1, ii(self, 1, 2), Vec::new())],
            3 => vec![
                (1, ii(self, 1, 2), vec![Factor::Neg(y(self, 3))]),
                (1, ii(self, 1, 3), vec![Factor::Pos(y(self, 1))]),
                (1, ii(self, 2, 3), vec![Factor::Pos(y(self, 2))]),
            ],
            _ => {
                let items: Vec<Polynomial> =
                    (1..=ell).map(|a| Polynomial::var(y(self, a))).collect();
                let l = pairwise_to_sum(self, &items, &mut |d, i, j| {
                    d.tagged(Provenance::TypeII {
                        block,
                        coord: p,
                        a: i as u32 + 1,
                        a2: j as u32 + 1,
                    })
                });
                vec![(1, l, Vec::new())]
            }
        }
    }

    /// `1 − **e**_i ≥ 0`, from `Σ_c **y**_{i,c} ≤ 1` (the telescoped product of
    /// per-coordinate bounds) and `**y**_{i,c}·(1 − x_{i,c}) ≥ 0`.
    pub fn e_upper(&mut self, block: u32) -> usize {
        self.memoized(Target::EUpper(block), |d| {
            let (kappa, ell) = (d.bundle.kappa(), d.bundle.ell());
            let mut terms = Vec::new();
            for p in 1..=kappa {
                let cert = d.coordinate_at_most_one(block, p);
                for prefix in tuples(ell, p - 1) {
                    let pf: Vec<Factor> = prefix
                        .iter()
                        .enumerate()
                        .map(|(q, &a)| Factor::Pos(d.lifted().y_var(block, q as u32 + 1, a)))
                        .collect();
                    for (lambda, line, f) in &cert {
                        let mut all = pf.clone();
                        all.extend_from_slice(f);
                        terms.push((*lambda, *line, all));
                    }
                }
            }
            for c in d.bundle.cells() {
                let mut f = d.bundle.y_factors(block, &c);
                f.push(Factor::Neg(d.lifted().x_var(block, &c)));
                let b = d.b.bound(f[0]);
                terms.push((1, b, f[1..].to_vec()));
            }
            let l = d.flat(&terms);
            d.b.expect_poly(
                l,
                &Polynomial::constant(1)
                    .sub(&d.bundle.e_poly(block))
                    .unwrap(),
            );
            l
        })
    }

    /// `Σ_j **e**_{i_j} − 1 ≥ 0` for an all-positive base clause, by summing
    /// out one literal's cells at a time and dividing by `ℓ^κ`.
    pub fn p_type(&mut self, source: usize) -> usize {
        self.memoized(Target::PType(source), |d| {
            let base = d
                .lifted()
                .base()
                .clause(source)
                .expect("valid base clause")
                .clone();
            assert!(
                base.literals().iter().all(|l| l.is_positive()),
                "(P) clauses are all positive"
            );
            let vars: Vec<u32> = base.literals().iter().map(|l| l.var()).collect();
            let t = vars.len();
            let n_cells = d.lifted().num_cells();
            let big_l = n_cells as i64;
            let mut current: HashMap<Vec<u32>, usize> = HashMap::new();
            for tuple in index_tuples(n_cells, t) {
                let cells: Vec<Cell> = tuple.iter().map(|&i| d.cell_of(i)).collect();
                let l = d.iii_prime(source, &cells);
                current.insert(tuple, l);
            }
            for (j, &var) in vars.iter().enumerate() {
                let i_line = d.i_prime(var);
                let last_single = t == 1;
                let e_line = if last_single {
                    None
                } else {
                    Some(d.e_lower(var))
                };
                let mut next = HashMap::new();
                for rest in index_tuples(n_cells, t - j - 1) {
                    let mut terms: Vec<(usize, i64)> = (0..n_cells)
                        .map(|c| {
                            let mut key = vec![c];
                            key.extend_from_slice(&rest);
                            (current[&key], 1)
                        })
                        .collect();
                    terms.push((i_line, 1));
                    let l = match e_line {
                        None => d.b.lincomb(&terms),
                        Some(e) => {
                            terms.push((e, big_l - 1));
                            let s = d.b.lincomb(&terms);
                            d.b.divide(s, big_l)
                        }
                    };
                    next.insert(rest, l);
                }
                current = next;
            }
            let l = current[&Vec::new()];
            let expected = vars.iter().fold(Polynomial::constant(-1), |acc, &v| {
                acc.add(&d.bundle.e_poly(v)).unwrap()
            });
            d.b.expect_poly(l, &expected);
            l
        })
    }

    /// `1 − **e**_{i_1} − **e**_{i_2} ≥ 0` for a base clause `¬e_{i_1} ∨ ¬e_{i_2}`,
    /// merging the pairwise bounds on the monomials `x·**y**`.
    pub fn h_type(&mut self, source: usize) -> usize {
        self.memoized(Target::HType(source), |d| {
            let base = d
                .lifted()
                .base()
                .clause(source)
                .expect("valid base clause")
                .clone();
            let [l1, l2] = base.literals() else {
                panic!("(H) clauses have width two")
            };
            assert!(
                !l1.is_positive() && !l2.is_positive(),
                "(H) clauses are negative"
            );
            let blocks = [l1.var(), l2.var()];
            let cells = d.bundle.cells();
            let n = cells.len();
            let items: Vec<Polynomial> = blocks
                .iter()
                .flat_map(|&b| cells.iter().map(move |c| (b, c)))
                .map(|(b, c)| d.bundle.z_poly(b, c))
                .collect();
            pairwise_to_sum(d, &items, &mut |d, i, j| {
                d.h_pair(source, &blocks, &cells, i, j, n)
            })
        })
    }

    fn h_pair(
        &mut self,
        source: usize,
        blocks: &[u32; 2],
        cells: &[Cell],
        i: usize,
        j: usize,
        n: usize,
    ) -> usize {
        let (bi, ci) = (i / n, &cells[i % n]);
        let (bj, cj) = (j / n, &cells[j % n]);
        if bi == bj {
            let block = blocks[bi];
            let ii = self.ii_prime(block, ci, cj);
            let mut terms = vec![(ii, 1)];
            for c in [ci, cj] {
                let mut f = self.bundle.y_factors(block, c);
                f.push(Factor::Neg(self.lifted().x_var(block, c)));
                terms.push((self.b.product(&f), 1));
            }
            self.b.lincomb(&terms)
        } else {
            self.iii_prime(source, &[ci.clone(), cj.clone()])
        }
    }
}

/// All tuples in `[1..=ell]^len`, first coordinate most significant.
fn tuples(ell: u32, len: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=ell).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// All tuples in `[0..n)^len`.
fn index_tuples(n: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Ranks of each family derived by [`derive_lifted_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LiftedAxiomRanks {
    pub i_prime: u32,
    pub ii_prime: u32,
    pub iii_prime: u32,
    pub y_bounds: u32,
    pub e_lower: u32,
    pub e_upper: u32,
}

impl LiftedAxiomRanks {
    pub fn max(&self) -> u32 {
        [
            self.i_prime,
            self.ii_prime,
            self.iii_prime,
            self.y_bounds,
            self.e_lower,
            self.e_upper,
        ]
        .into_iter()
        .max()
        .unwrap_or(0)
    }
}

/// Derives every `(I′)`, `(II′)` and `(III′)` inequality of a tensor lift
/// together with `0 ≤ **y**_{i,c} ≤ 1` and `0 ≤ **e**_i ≤ 1`.
pub fn derive_lifted_axioms(
    lifted: &LiftedFormula,
) -> Result<(CpProof, LiftedAxiomRanks), CpLiftError> {
    let mut d = LiftedDeriver::new(lifted)?;
    let mut r = LiftedAxiomRanks::default();
    let cells = d.bundle.cells();
    let base = lifted.base().clone();
    for block in 1..=base.num_vars() {
        let l = d.i_prime(block);
        r.i_prime = r.i_prime.max(d.rank(l));
        for (i, c) in cells.iter().enumerate() {
            for c2 in &cells[i + 1..] {
                let l = d.ii_prime(block, c, c2);
                r.ii_prime = r.ii_prime.max(d.rank(l));
            }
            let lo = d.y_lower(block, c);
            let hi = d.y_upper(block, c);
            r.y_bounds = r.y_bounds.max(d.rank(lo)).max(d.rank(hi));
        }
        let l = d.e_lower(block);
        r.e_lower = r.e_lower.max(d.rank(l));
        let l = d.e_upper(block);
        r.e_upper = r.e_upper.max(d.rank(l));
    }
    for source in 1..=base.num_clauses() {
        let t = base.clause(source).expect("in range").width();
        for tuple in index_tuples(lifted.num_cells(), t) {
            let cs: Vec<Cell> = tuple.iter().map(|&i| lifted.cell_from_index(i)).collect();
            let l = d.iii_prime(source, &cs);
            r.iii_prime = r.iii_prime.max(d.rank(l));
        }
    }
    Ok((d.finish(), r))
}

/// Segment deriving `Σ_j **e**_{i_j} ≥ 1` for the all-positive base clause
/// `source`; returns the proof, the target line and its rank.
pub fn derive_p_type(
    lifted: &LiftedFormula,
    source: usize,
) -> Result<(CpProof, usize, u32), CpLiftError> {
    let mut d = LiftedDeriver::new(lifted)?;
    check_clause(lifted, source, true)?;
    let l = d.p_type(source);
    let r = d.rank(l);
    Ok((d.finish(), l, r))
}

/// Segment deriving `**e**_{i_1} + **e**_{i_2} ≤ 1` for the base clause
/// `¬e_{i_1} ∨ ¬e_{i_2}`.
pub fn derive_h_type(
    lifted: &LiftedFormula,
    source: usize,
) -> Result<(CpProof, usize, u32), CpLiftError> {
    let mut d = LiftedDeriver::new(lifted)?;
    check_clause(lifted, source, false)?;
    let l = d.h_type(source);
    let r = d.rank(l);
    Ok((d.finish(), l, r))
}

fn clause_kind(base: &CnfFormula, index: usize) -> Option<bool> {
    let c = base.clause(index)?;
    if !c.is_empty() && c.literals().iter().all(|l| l.is_positive()) {
        Some(true)
    } else if c.width() == 2 && c.literals().iter().all(|l| !l.is_positive()) {
        Some(false)
    } else {
        None
    }
}

fn check_clause(lifted: &LiftedFormula, index: usize, positive: bool) -> Result<(), CpLiftError> {
    match clause_kind(lifted.base(), index) {
        Some(p) if p == positive => Ok(()),
        _ => Err(CpLiftError::UnsupportedClause { index }),
    }
}

/// A lifted refutation and the largest rank among the lines standing in for
/// base axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedCpRefutation {
    pub proof: CpProof,
    pub max_segment_rank: u32,
}

/// Lifts a linear refutation of `base` (using only bounds, clause axioms,
/// combinations and divisions) to a CP(κ+1) refutation of the tensor lift by
/// substituting `**e**_i` for `e_i`.
pub fn lift_cp_refutation(
    base: &CnfFormula,
    proof: &CpProof,
    lifted: &LiftedFormula,
) -> Result<LiftedCpRefutation, CpLiftError> {
    if lifted.base() != base {
        return Err(CpLiftError::BaseMismatch);
    }
    let mut d = LiftedDeriver::new(lifted)?;
    let mut map = Vec::with_capacity(proof.len());
    let mut seg = 0;
    for (i, line) in proof.lines().iter().enumerate() {
        let n = i + 1;
        if line.rule.is_mult() {
            return Err(CpLiftError::UnsupportedRule { line: n });
        }
        let target = d
            .bundle
            .substitute(&line.poly)
            .ok_or(CpLiftError::NonLinear { line: n })?;
        let l = match &line.rule {
            CpRule::VarBound { var, upper: false } => d.e_lower(*var),
            CpRule::VarBound { var, upper: true } => d.e_upper(*var),
            CpRule::ClauseAxiom(idx) => match clause_kind(base, *idx) {
                Some(true) => d.p_type(*idx),
                Some(false) => d.h_type(*idx),
                None => return Err(CpLiftError::UnsupportedClause { index: *idx }),
            },
            CpRule::LinComb(terms) => {
                let mapped: Vec<(usize, i64)> =
                    terms.iter().map(|&(p, l)| (map[p - 1], l)).collect();
                d.b.add(CpRule::LinComb(mapped))
            }
            CpRule::Division { premise, divisor } => d.b.add(CpRule::Division {
                premise: map[premise - 1],
                divisor: *divisor,
            }),
            CpRule::MultLow { .. } | CpRule::MultHigh { .. } => unreachable!("rejected above"),
        };
        if line.rule.is_axiom() {
            seg = seg.max(d.rank(l));
        }
        d.b.expect_poly(l, &target);
        map.push(l);
    }
    let mut out = d.finish();
    // The refutation must end on the image of the base proof's last line.
    if let Some(&last) = map.last() {
        if last != out.len() {
            let l = out.line(last).clone();
            out.push(l.poly, CpRule::LinComb(vec![(last, 1)]));
        }
    }
    Ok(LiftedCpRefutation {
        proof: out,
        max_segment_rank: seg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::all_assignments;
    use crate::cp::{check_cpk, check_cpk_derivation, cp_php_refutation, cpk_rank};
    use crate::graph::BipartiteGraph;
    use crate::lifting::{lift_tensor, TensorParams};

    fn php21() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1], &[2], &[-1, -2]])
    }

    fn lift(f: &CnfFormula, k: u32, ell: u32) -> LiftedFormula {
        lift_tensor(f, TensorParams::new(k, ell).unwrap()).unwrap()
    }

    /// Every line whose clause-axiom ancestors are all satisfied evaluates
    /// to a non-negative value.
    fn semantically_sound(
        formula: &CnfFormula,
        proof: &CpProof,
        alpha: &crate::cnf::Assignment,
    ) -> bool {
        let value = |v: u32| alpha.value(v);
        let mut ok = Vec::with_capacity(proof.len());
        for line in proof.lines() {
            let supported = match &line.rule {
                CpRule::ClauseAxiom(i) => formula.clause(*i).unwrap().eval(alpha),
                CpRule::VarBound { .. } => true,
                r => r.premises().iter().all(|&p| ok[p - 1]),
            };
            if supported && line.poly.eval(&value) < 0 {
                return false;
            }
            ok.push(supported);
        }
        true
    }

    #[test]
    fn i_prime_small_cases() {
        let l = lift(&php21(), 1, 2);
        let mut d = LiftedDeriver::new(&l).unwrap();
        let line = d.i_prime(1);
        assert_eq!(d.rank(line), 0);
        assert!(matches!(d.finish().line(line).rule, CpRule::ClauseAxiom(_)));
        let l = lift(&php21(), 2, 2);
        let mut d = LiftedDeriver::new(&l).unwrap();
        let line = d.i_prime(1);
        assert!(d.rank(line) <= 2);
        assert_eq!(d.poly(line).num_terms(), 4);
        assert_eq!(d.poly(line).degree(), 2);
    }

    #[test]
    fn lifted_axioms_check_and_are_sound() {
        let base = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]);
        for (k, ell) in [(1, 2), (1, 3), (2, 2)] {
            let l = lift(&base, k, ell);
            let (proof, ranks) = derive_lifted_axioms(&l).unwrap();
            assert_eq!(check_cpk_derivation(l.formula(), &proof), Ok(()));
            assert_eq!(ranks.i_prime, if k == 1 { 0 } else { k });
            assert!(
                ranks.ii_prime <= k
                    && ranks.y_bounds <= k
                    && ranks.e_lower <= k + 1
                    && ranks.e_upper <= k + 1
            );
            assert_eq!(ranks.iii_prime, k + 2);
            if l.formula().num_vars() <= 20 {
                for alpha in l.selector_valid_assignments() {
                    assert!(semantically_sound(l.formula(), &proof, &alpha));
                }
            }
        }
    }

    #[test]
    fn p_and_h_segments() {
        let f = php21();
        let l = lift(&f, 1, 2);
        let (p, line, r) = derive_p_type(&l, 1).unwrap();
        assert_eq!(check_cpk_derivation(l.formula(), &p), Ok(()));
        assert!(r <= 2);
        let b = LiftedPolyBundle::new(&l).unwrap();
        assert_eq!(
            p.line(line).poly,
            b.e_poly(1).sub(&Polynomial::constant(1)).unwrap()
        );
        let (h, line, r) = derive_h_type(&l, 3).unwrap();
        assert_eq!(check_cpk_derivation(l.formula(), &h), Ok(()));
        assert!(r <= 8, "rank {r}");
        let expected = Polynomial::constant(1)
            .sub(&b.e_poly(1))
            .unwrap()
            .sub(&b.e_poly(2))
            .unwrap();
        assert_eq!(h.line(line).poly, expected);
        assert!(derive_p_type(&l, 3).is_err());
        for alpha in all_assignments(l.formula().num_vars()).step_by(7) {
            assert!(semantically_sound(l.formula(), &p, &alpha));
            assert!(semantically_sound(l.formula(), &h, &alpha));
        }
    }

    #[test]
    fn wide_positive_clause() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2]]);
        let l = lift(&f, 1, 2);
        let (p, _, _) = derive_p_type(&l, 1).unwrap();
        assert_eq!(check_cpk_derivation(l.formula(), &p), Ok(()));
    }

    #[test]
    fn lifted_php_refutations() {
        for (n, k) in [(2, 1), (3, 1), (2, 2)] {
            let (f, base) = cp_php_refutation(&BipartiteGraph::complete(n)).unwrap();
            let l = lift(&f, k, 2);
            let out = lift_cp_refutation(&f, &base, &l).unwrap();
            assert_eq!(check_cpk(l.formula(), &out.proof), Ok(()));
            assert!(cpk_rank(&out.proof) <= cpk_rank(&base) + out.max_segment_rank + 1);
        }
    }

    #[test]
    fn mult_rules_are_rejected() {
        let f = php21();
        let mut p = CpProof::new(2);
        p.push(
            Polynomial::var(1),
            CpRule::VarBound {
                var: 1,
                upper: false,
            },
        );
        p.push(
            Polynomial::parse_text("1 1*2; 0").unwrap(),
            CpRule::MultLow { premise: 1, var: 2 },
        );
        let l = lift(&f, 1, 2);
        assert_eq!(
            lift_cp_refutation(&f, &p, &l).unwrap_err(),
            CpLiftError::UnsupportedRule { line: 2 }
        );
    }

    /// For κ = 1 and a width-2 clause, `1 − u₁u₂ − v₁v₂ ≥ 0` is outside the
    /// degree-2 cone spanned by the clause inequality times at most one
    /// literal and products of at most two literals: the linear functional
    /// below is non-negative on every generator and negative on the target.
    /// So `(III′)` needs a Division on top of degree-2 products.
    #[test]
    fn iii_prime_needs_division() {
        let (u1, u2, v1, v2) = (1, 2, 3, 4);
        // Scaled by 3: E[1] = 3, E[x] = 2, E[u₁u₂] = E[v₁v₂] = 2, cross pairs 1.
        let functional = |p: &Polynomial| -> i64 {
            let mut total = 3 * p.constant_term();
            for (m, c) in p.terms() {
                let w = match m.vars() {
                    [_] => 2,
                    [a, b] if (*a == u1 && *b == u2) || (*a == v1 && *b == v2) => 2,
                    [_, _] => 1,
                    _ => unreachable!("degree at most 2"),
                };
                total += w * c;
            }
            total
        };
        let lits: Vec<Polynomial> = [u1, u2, v1, v2]
            .into_iter()
            .flat_map(|v| {
                [
                    Polynomial::var(v),
                    Polynomial::constant(1).sub(&Polynomial::var(v)).unwrap(),
                ]
            })
            .collect();
        let axiom = lits
            .iter()
            .skip(1)
            .step_by(2)
            .fold(Polynomial::constant(-1), |acc, l| acc.add(l).unwrap());
        let mut generators = vec![Polynomial::constant(1), axiom.clone()];
        for (i, a) in lits.iter().enumerate() {
            generators.push(a.clone());
            generators.push(axiom.mul(a).unwrap());
            for b in &lits[i + 1..] {
                if a.max_var() != b.max_var() {
                    generators.push(a.mul(b).unwrap());
                }
            }
        }
        assert!(generators.iter().all(|g| functional(g) >= 0));
        let target = Polynomial::parse_text("-1 1*2; -1 3*4; 1").unwrap();
        assert_eq!(functional(&target), -1);
    }
}
