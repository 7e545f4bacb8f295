//! Incremental construction of CP(k) derivations.
//!
//! Every line added through [`CpBuilder`] is computed with the same rule
//! semantics the checker uses, so a builder only ever produces lines that
//! follow from their premises. Failures here are construction bugs and
//! panic with the offending rule.

use std::collections::HashMap;

use crate::cnf::CnfFormula;

use super::poly::Polynomial;
use super::proof::{apply_rule, CpProof, CpRule};

/// A literal factor: `x` or `1 − x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Pos(u32),
    Neg(u32),
}

impl Factor {
    pub fn var(self) -> u32 {
        match self {
            Factor::Pos(v) | Factor::Neg(v) => v,
        }
    }

    pub fn complement(self) -> Factor {
        match self {
            Factor::Pos(v) => Factor::Neg(v),
            Factor::Neg(v) => Factor::Pos(v),
        }
    }

    pub fn poly(self) -> Polynomial {
        match self {
            Factor::Pos(v) => Polynomial::var(v),
            Factor::Neg(v) => Polynomial::constant(1)
                .sub(&Polynomial::var(v))
                .expect("small"),
        }
    }
}

/// Product of the factor polynomials.
pub fn factor_product(factors: &[Factor]) -> Polynomial {
    factors.iter().fold(Polynomial::constant(1), |acc, f| {
        acc.mul(&f.poly()).expect("products of literals stay small")
    })
}

/// Factor lists whose products sum to `Π lead · (1 − Π rest)`.
pub fn telescope(lead: &[Factor], rest: &[Factor]) -> Vec<Vec<Factor>> {
    (0..rest.len())
        .map(|j| {
            let mut f = lead.to_vec();
            f.extend_from_slice(&rest[..j]);
            f.push(rest[j].complement());
            f
        })
        .collect()
}

pub struct CpBuilder<'a> {
    formula: &'a CnfFormula,
    proof: CpProof,
    ranks: Vec<u32>,
    axioms: HashMap<usize, usize>,
    bounds: HashMap<Factor, usize>,
    products: HashMap<(usize, Vec<Factor>), usize>,
}

impl<'a> CpBuilder<'a> {
    pub fn new(formula: &'a CnfFormula, degree: u32) -> Self {
        CpBuilder {
            formula,
            proof: CpProof::new(degree),
            ranks: Vec::new(),
            axioms: HashMap::new(),
            bounds: HashMap::new(),
            products: HashMap::new(),
        }
    }

    pub fn formula(&self) -> &'a CnfFormula {
        self.formula
    }

    pub fn degree(&self) -> u32 {
        self.proof.degree()
    }

    pub fn proof(&self) -> &CpProof {
        &self.proof
    }

    pub fn finish(self) -> CpProof {
        self.proof
    }

    pub fn poly(&self, line: usize) -> &Polynomial {
        &self.proof.line(line).poly
    }

    pub fn rank(&self, line: usize) -> u32 {
        self.ranks[line - 1]
    }

    /// Appends the conclusion of `rule`; returns its 1-based index.
    pub fn add(&mut self, rule: CpRule) -> usize {
        let poly = apply_rule(self.formula, self.proof.degree(), self.proof.lines(), &rule)
            .unwrap_or_else(|e| panic!("cannot apply {rule}: {e}"));
        let rank = if rule.is_axiom() {
            0
        } else {
            1 + rule
                .premises()
                .iter()
                .map(|&p| self.ranks[p - 1])
                .max()
                .unwrap_or(0)
        };
        self.ranks.push(rank);
        self.proof.push(poly, rule)
    }

    pub fn axiom(&mut self, idx: usize) -> usize {
        if let Some(&l) = self.axioms.get(&idx) {
            return l;
        }
        let l = self.add(CpRule::ClauseAxiom(idx));
        self.axioms.insert(idx, l);
        l
    }

    /// `x ≥ 0` for `Pos(x)`, `1 − x ≥ 0` for `Neg(x)`.
    pub fn bound(&mut self, f: Factor) -> usize {
        if let Some(&l) = self.bounds.get(&f) {
            return l;
        }
        let l = self.add(CpRule::VarBound {
            var: f.var(),
            upper: matches!(f, Factor::Neg(_)),
        });
        self.bounds.insert(f, l);
        l
    }

    /// Non-negative combination; zero multipliers are dropped and a lone
    /// unit term returns its line unchanged.
    pub fn lincomb(&mut self, terms: &[(usize, i64)]) -> usize {
        let terms: Vec<(usize, i64)> = terms.iter().copied().filter(|&(_, l)| l != 0).collect();
        if let [(l, 1)] = terms.as_slice() {
            return *l;
        }
        self.add(CpRule::LinComb(terms))
    }

    pub fn divide(&mut self, line: usize, divisor: i64) -> usize {
        if divisor == 1 {
            return line;
        }
        self.add(CpRule::Division {
            premise: line,
            divisor,
        })
    }

    /// `Π factors · p ≥ 0` from line `p ≥ 0` by a chain of multiplications.
    pub fn times(&mut self, line: usize, factors: &[Factor]) -> usize {
        if factors.is_empty() {
            return line;
        }
        let key = (line, factors.to_vec());
        if let Some(&l) = self.products.get(&key) {
            return l;
        }
        let (last, init) = factors.split_last().expect("non-empty");
        let prev = self.times(line, init);
        let l = match *last {
            Factor::Pos(v) => self.add(CpRule::MultLow {
                premise: prev,
                var: v,
            }),
            Factor::Neg(v) => self.add(CpRule::MultHigh {
                premise: prev,
                var: v,
            }),
        };
        self.products.insert(key, l);
        l
    }

    /// `Π factors ≥ 0`, rank `|factors| − 1`.
    pub fn product(&mut self, factors: &[Factor]) -> usize {
        let (first, rest) = factors.split_first().expect("at least one factor");
        let b = self.bound(*first);
        self.times(b, rest)
    }

    /// Panics unless line `line` states `expected ≥ 0`.
    pub fn expect_poly(&self, line: usize, expected: &Polynomial) {
        assert_eq!(
            self.poly(line),
            expected,
            "line {line} does not state the intended inequality"
        );
    }
}

/// Anything that owns a [`CpBuilder`] and can lend it out.
pub trait BuildsCp<'a> {
    fn builder(&mut self) -> &mut CpBuilder<'a>;
}

impl<'a> BuildsCp<'a> for CpBuilder<'a> {
    fn builder(&mut self) -> &mut CpBuilder<'a> {
        self
    }
}

/// Derives `1 − Σ items ≥ 0` from the pairwise bounds `1 − item_i − item_j
/// ≥ 0` supplied by `pair(ctx, i, j)` with `i < j`, by balanced merging.
/// Each merge adds at most four rule applications, so the derived line has
/// rank at most `4⌈log₂N⌉` above the pairwise premises.
pub fn pairwise_to_sum<'a, C: BuildsCp<'a>>(
    ctx: &mut C,
    items: &[Polynomial],
    pair: &mut dyn FnMut(&mut C, usize, usize) -> usize,
) -> usize {
    assert!(items.len() >= 2, "pairwise_to_sum needs at least two items");
    merge(ctx, items, 0, items.len(), pair).expect("two or more items")
}

fn one_minus_sum(items: &[Polynomial]) -> Polynomial {
    items
        .iter()
        .fold(Polynomial::constant(1), |acc, p| acc.sub(p).expect("small"))
}

fn merge<'a, C: BuildsCp<'a>>(
    ctx: &mut C,
    items: &[Polynomial],
    lo: usize,
    hi: usize,
    pair: &mut dyn FnMut(&mut C, usize, usize) -> usize,
) -> Option<usize> {
    let size = hi - lo;
    if size < 2 {
        return None;
    }
    let mid = lo + size.div_ceil(2);
    let la = merge(ctx, items, lo, mid, pair);
    let lb = merge(ctx, items, mid, hi, pair);
    let (sa, sb) = ((mid - lo) as i64, (hi - mid) as i64);
    let mut step1 = Vec::new();
    for j in mid..hi {
        let line = if sa == 1 {
            pair(ctx, lo, j)
        } else {
            let mut terms: Vec<(usize, i64)> = (lo..mid).map(|i| (pair(ctx, i, j), 1)).collect();
            terms.push((la.expect("|A| ≥ 2"), sa - 1));
            let b = ctx.builder();
            let l = b.lincomb(&terms);
            b.divide(l, sa)
        };
        let mut covered: Vec<Polynomial> = items[lo..mid].to_vec();
        covered.push(items[j].clone());
        ctx.builder().expect_poly(line, &one_minus_sum(&covered));
        step1.push(line);
    }
    let b = ctx.builder();
    let out = if sb == 1 {
        step1[0]
    } else {
        let mut terms: Vec<(usize, i64)> = step1.iter().map(|&l| (l, 1)).collect();
        terms.push((lb.expect("|B| ≥ 2"), sb - 1));
        let l = b.lincomb(&terms);
        b.divide(l, sb)
    };
    b.expect_poly(out, &one_minus_sum(&items[lo..hi]));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::check_cpk_derivation;

    /// Formula whose clauses are all pairs `¬x_i ∨ ¬x_j`, in lexicographic order.
    fn at_most_one(n: u32) -> (CnfFormula, HashMap<(usize, usize), usize>) {
        let mut clauses: Vec<Vec<i64>> = Vec::new();
        let mut index = HashMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                clauses.push(vec![-i64::from(i), -i64::from(j)]);
                index.insert((i as usize - 1, j as usize - 1), clauses.len());
            }
        }
        let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
        (CnfFormula::from_dimacs_clauses(n, &refs), index)
    }

    fn run(n: u32) -> (CpProof, usize, u32) {
        let (f, index) = at_most_one(n);
        let mut b = CpBuilder::new(&f, 1);
        let items: Vec<Polynomial> = (1..=n).map(Polynomial::var).collect();
        let l = pairwise_to_sum(&mut b, &items, &mut |b, i, j| b.axiom(index[&(i, j)]));
        let r = b.rank(l);
        let proof = b.finish();
        assert_eq!(check_cpk_derivation(&f, &proof), Ok(()));
        (proof, l, r)
    }

    #[test]
    fn two_items_is_the_premise() {
        let (proof, l, r) = run(2);
        assert_eq!(r, 0);
        assert_eq!(proof.len(), 1);
        assert_eq!(proof.line(l).rule, CpRule::ClauseAxiom(1));
    }

    #[test]
    fn three_items() {
        let (proof, l, r) = run(3);
        let derived = proof
            .lines()
            .iter()
            .filter(|line| !line.rule.is_axiom())
            .count();
        assert!(derived <= 4);
        assert!(r <= 4);
        assert_eq!(
            proof.line(l).poly,
            Polynomial::parse_text("-1 1; -1 2; -1 3; 1").unwrap()
        );
    }

    #[test]
    fn rank_is_logarithmic() {
        for n in 2..=16u32 {
            let (_, _, r) = run(n);
            let log = 32 - (n - 1).leading_zeros();
            assert!(r <= 4 * log, "n = {n}: rank {r}");
        }
        assert!(run(8).2 <= 12);
    }

    #[test]
    fn products_and_telescopes() {
        let f = CnfFormula::from_dimacs_clauses(3, &[&[1, 2, 3]]);
        let mut b = CpBuilder::new(&f, 3);
        let fs = [Factor::Pos(1), Factor::Neg(2), Factor::Pos(3)];
        let l = b.product(&fs);
        assert_eq!(b.rank(l), 2);
        b.expect_poly(l, &factor_product(&fs));
        let terms = telescope(&[Factor::Pos(1)], &[Factor::Pos(2), Factor::Neg(3)]);
        let sum = terms.iter().fold(Polynomial::default(), |acc, t| {
            acc.add(&factor_product(t)).unwrap()
        });
        let expected = Polynomial::var(1)
            .mul(
                &Polynomial::constant(1)
                    .sub(&factor_product(&[Factor::Pos(2), Factor::Neg(3)]))
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(sum, expected);
        assert_eq!(check_cpk_derivation(&f, b.proof()), Ok(()));
    }
}
