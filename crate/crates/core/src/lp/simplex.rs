//! Dense bounded-variable primal simplex with Bland's rule.
//!
//! Works over any [`Scalar`]: `f64` with a `1e-9` tolerance, or exact
//! `BigRational`. Problems are small enough that a full tableau is fine.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Number type the simplex runs over.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn is_zero_tol(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

pub const F64_TOLERANCE: f64 = 1e-9;

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_pos(&self) -> bool {
        *self > F64_TOLERANCE
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOLERANCE
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `maximize Σ c_j x_j` subject to rows `Σ a_ij x_j ≤ b_i` and finite
/// bounds `lo_j ≤ x_j ≤ hi_j`, all with integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    lower: Vec<i64>,
    upper: Vec<i64>,
    rows: Vec<(Vec<(usize, i64)>, i64)>,
    objective: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub values: Vec<T>,
    pub objective: T,
}

impl LinearProgram {
    /// `n` variables with bounds `[0, 1]` and zero objective.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            lower: vec![0; n],
            upper: vec![1; n],
            rows: Vec::new(),
            objective: vec![0; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn set_bounds(&mut self, var: usize, lo: i64, hi: i64) {
        assert!(lo <= hi, "empty bound interval");
        self.lower[var] = lo;
        self.upper[var] = hi;
    }

    pub fn bounds(&self, var: usize) -> (i64, i64) {
        (self.lower[var], self.upper[var])
    }

    pub fn set_objective(&mut self, var: usize, c: i64) {
        self.objective[var] = c;
    }

    pub fn objective(&self) -> &[i64] {
        &self.objective
    }

    /// Adds `Σ coef·x ≤ rhs`.
    pub fn add_le(&mut self, coefs: Vec<(usize, i64)>, rhs: i64) {
        assert!(
            coefs.iter().all(|&(j, _)| j < self.num_vars()),
            "variable out of range"
        );
        self.rows.push((coefs, rhs));
    }

    /// Adds `Σ coef·x ≥ rhs`.
    pub fn add_ge(&mut self, coefs: Vec<(usize, i64)>, rhs: i64) {
        self.add_le(coefs.into_iter().map(|(j, a)| (j, -a)).collect(), -rhs);
    }

    pub fn rows(&self) -> &[(Vec<(usize, i64)>, i64)] {
        &self.rows
    }

    /// Largest violation of any row or bound at `x`, in `f64`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst
                .max(self.lower[j] as f64 - v)
                .max(v - self.upper[j] as f64);
        }
        for (coefs, rhs) in &self.rows {
            let lhs: f64 = coefs.iter().map(|&(j, a)| a as f64 * x[j]).sum();
            worst = worst.max(lhs - *rhs as f64);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as f64 * v)
            .sum()
    }
}

/// Solves `lp` over `T`. Bland's rule makes the pivot sequence, and hence
/// the returned vertex, a deterministic function of the input.
pub fn solve_lp<T: Scalar>(lp: &LinearProgram) -> LpSolution<T> {
    Tableau::<T>::build(lp).solve(lp)
}

struct Tableau<T> {
    /// `m` rows over `cols` columns: structurals, slacks, artificials.
    t: Vec<Vec<T>>,
    beta: Vec<T>,
    basis: Vec<usize>,
    upper: Vec<Option<T>>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
    n: usize,
    artificial_from: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let needs_art: Vec<bool> = lp
            .rows
            .iter()
            .map(|(coefs, rhs)| {
                let shift: i128 = coefs
                    .iter()
                    .map(|&(j, a)| i128::from(a) * i128::from(lp.lower[j]))
                    .sum();
                i128::from(*rhs) - shift < 0
            })
            .collect();
        let n_art = needs_art.iter().filter(|&&b| b).count();
        let cols = n + m + n_art;
        let zero = T::from_i64(0);
        let mut t = vec![vec![zero.clone(); cols]; m];
        let mut beta = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut art = n + m;
        for (i, (coefs, rhs)) in lp.rows.iter().enumerate() {
            let shift: i64 = coefs.iter().map(|&(j, a)| a * lp.lower[j]).sum();
            let b = rhs - shift;
            let sign = if needs_art[i] { -1 } else { 1 };
            for &(j, a) in coefs {
                t[i][j] = t[i][j].clone() + T::from_i64(sign * a);
            }
            t[i][n + i] = T::from_i64(sign);
            if needs_art[i] {
                t[i][art] = T::from_i64(1);
                basis.push(art);
                art += 1;
            } else {
                basis.push(n + i);
            }
            beta.push(T::from_i64(sign * b));
        }
        let mut upper: Vec<Option<T>> = (0..n)
            .map(|j| Some(T::from_i64(lp.upper[j] - lp.lower[j])))
            .collect();
        upper.extend((0..m + n_art).map(|_| None));
        let mut is_basic = vec![false; cols];
        for &b in &basis {
            is_basic[b] = true;
        }
        Tableau {
            t,
            beta,
            basis,
            upper,
            at_upper: vec![false; cols],
            is_basic,
            n,
            artificial_from: n + m,
        }
    }

    fn cols(&self) -> usize {
        self.upper.len()
    }

    fn reduced_costs(&self, c: &[T]) -> Vec<T> {
        let mut d = c.to_vec();
        for (i, row) in self.t.iter().enumerate() {
            let cb = &c[self.basis[i]];
            if cb.is_zero_tol() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero_tol() {
                    d[j] = d[j].clone() - cb.clone() * v.clone();
                }
            }
        }
        d
    }

    /// Maximises `c` from the current basic feasible solution.
    fn optimise(&mut self, c: &[T]) {
        let mut d = self.reduced_costs(c);
        loop {
            let entering = (0..self.cols()).find(|&j| {
                !self.is_basic[j]
                    && ((d[j].is_pos() && !self.at_upper[j] && self.can_move(j))
                        || (d[j].is_neg() && self.at_upper[j]))
            });
            let Some(j) = entering else { return };
            let increase = !self.at_upper[j];
            // Ratio test; ties broken by the smallest basic variable index.
            let mut best: Option<(T, Option<usize>, bool)> =
                self.upper[j].clone().map(|u| (u, None, false));
            for i in 0..self.t.len() {
                let a = if increase {
                    self.t[i][j].clone()
                } else {
                    -self.t[i][j].clone()
                };
                let (limit, to_upper) = if a.is_pos() {
                    (self.beta[i].clone() / a, false)
                } else if a.is_neg() {
                    match &self.upper[self.basis[i]] {
                        Some(u) => ((u.clone() - self.beta[i].clone()) / -a, true),
                        None => continue,
                    }
                } else {
                    continue;
                };
                let better = match &best {
                    None => true,
                    Some((b, row, _)) => {
                        let diff = limit.clone() - b.clone();
                        diff.is_neg()
                            || (diff.is_zero_tol()
                                && match row {
                                    None => false,
                                    Some(r) => self.basis[i] < self.basis[*r],
                                })
                    }
                };
                if better {
                    best = Some((limit, Some(i), to_upper));
                }
            }
            let (theta, row, to_upper) = best.expect("bounded variables");
            let step = if increase {
                theta.clone()
            } else {
                -theta.clone()
            };
            for i in 0..self.t.len() {
                if !self.t[i][j].is_zero_tol() {
                    self.beta[i] = self.beta[i].clone() - step.clone() * self.t[i][j].clone();
                }
            }
            match row {
                None => self.at_upper[j] = !self.at_upper[j],
                Some(r) => {
                    let entering_value = if self.at_upper[j] {
                        self.upper[j].clone().expect("at upper") + step
                    } else {
                        step
                    };
                    let leaving = self.basis[r];
                    self.is_basic[leaving] = false;
                    self.at_upper[leaving] = to_upper;
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.basis[r] = j;
                    self.is_basic[j] = true;
                    self.at_upper[j] = false;
                    let dj = d[j].clone();
                    for (k, v) in self.t[r].iter().enumerate() {
                        if !v.is_zero_tol() {
                            d[k] = d[k].clone() - dj.clone() * v.clone();
                        }
                    }
                }
            }
        }
    }

    fn can_move(&self, j: usize) -> bool {
        match &self.upper[j] {
            Some(u) => u.is_pos(),
            None => true,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.t[r][j].clone();
        for v in self.t[r].iter_mut() {
            if !v.is_zero_tol() {
                *v = v.clone() / p.clone();
            }
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[j].is_zero_tol() {
                continue;
            }
            let f = row[j].clone();
            for (k, v) in pivot_row.iter().enumerate() {
                if !v.is_zero_tol() {
                    row[k] = row[k].clone() - f.clone() * v.clone();
                }
            }
            row[j] = T::from_i64(0);
        }
    }

    fn value(&self, j: usize) -> T {
        if self.is_basic[j] {
            let r = self.basis.iter().position(|&b| b == j).expect("basic");
            self.beta[r].clone()
        } else if self.at_upper[j] {
            self.upper[j].clone().expect("at upper")
        } else {
            T::from_i64(0)
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> LpSolution<T> {
        let cols = self.cols();
        if self.artificial_from < cols {
            let c: Vec<T> = (0..cols)
                .map(|j| T::from_i64(if j >= self.artificial_from { -1 } else { 0 }))
                .collect();
            self.optimise(&c);
            let infeasibility =
                (self.artificial_from..cols).fold(T::from_i64(0), |acc, j| acc + self.value(j));
            if infeasibility.is_pos() {
                return LpSolution {
                    status: LpStatus::Infeasible,
                    values: Vec::new(),
                    objective: T::from_i64(0),
                };
            }
            for j in self.artificial_from..cols {
                self.upper[j] = Some(T::from_i64(0));
            }
        }
        let c: Vec<T> = (0..cols)
            .map(|j| T::from_i64(if j < self.n { lp.objective[j] } else { 0 }))
            .collect();
        self.optimise(&c);
        let values: Vec<T> = (0..self.n)
            .map(|j| self.value(j) + T::from_i64(lp.lower[j]))
            .collect();
        let objective = values
            .iter()
            .zip(&lp.objective)
            .fold(T::from_i64(0), |acc, (v, &c)| {
                acc + v.clone() * T::from_i64(c)
            });
        LpSolution {
            status: LpStatus::Optimal,
            values,
            objective,
        }
    }
}

/// `BigRational` from a ratio of integers.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    /// Optimum by enumerating every basic solution: pick `n` tight
    /// constraints among rows and bounds, solve exactly, keep feasible ones.
    fn vertex_oracle(lp: &LinearProgram) -> Option<BigRational> {
        let n = lp.num_vars();
        let mut planes: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for (coefs, rhs) in lp.rows() {
            let mut a = vec![ratio(0, 1); n];
            for &(j, c) in coefs {
                a[j] = a[j].clone() + ratio(c, 1);
            }
            planes.push((a, ratio(*rhs, 1)));
        }
        for j in 0..n {
            let (lo, hi) = lp.bounds(j);
            for b in [lo, hi] {
                let mut a = vec![ratio(0, 1); n];
                a[j] = ratio(1, 1);
                planes.push((a, ratio(b, 1)));
            }
        }
        let mut best: Option<BigRational> = None;
        let total = planes.len();
        let mut pick = vec![0usize; n];
        fn rec(
            k: usize,
            start: usize,
            total: usize,
            pick: &mut Vec<usize>,
            f: &mut dyn FnMut(&[usize]),
        ) {
            if k == pick.len() {
                f(pick);
                return;
            }
            for s in start..total {
                pick[k] = s;
                rec(k + 1, s + 1, total, pick, f);
            }
        }
        rec(0, 0, total, &mut pick, &mut |idx| {
            let mut m: Vec<Vec<BigRational>> = idx
                .iter()
                .map(|&i| {
                    let mut r = planes[i].0.clone();
                    r.push(planes[i].1.clone());
                    r
                })
                .collect();
            for c in 0..n {
                let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                    return;
                };
                m.swap(c, p);
                let pv = m[c][c].clone();
                for v in m[c].iter_mut() {
                    *v = v.clone() / pv.clone();
                }
                for r in 0..n {
                    if r != c && !m[r][c].is_zero() {
                        let f = m[r][c].clone();
                        let row_c = m[c].clone();
                        for (v, w) in m[r].iter_mut().zip(row_c) {
                            *v = v.clone() - f.clone() * w;
                        }
                    }
                }
            }
            let x: Vec<BigRational> = (0..n).map(|r| m[r][n].clone()).collect();
            let feasible = (0..n).all(|j| {
                let (lo, hi) = lp.bounds(j);
                x[j] >= ratio(lo, 1) && x[j] <= ratio(hi, 1)
            }) && lp.rows().iter().all(|(coefs, rhs)| {
                coefs
                    .iter()
                    .fold(ratio(0, 1), |acc, &(j, c)| acc + ratio(c, 1) * x[j].clone())
                    <= ratio(*rhs, 1)
            });
            if feasible {
                let obj = lp
                    .objective()
                    .iter()
                    .enumerate()
                    .fold(ratio(0, 1), |acc, (j, &c)| acc + ratio(c, 1) * x[j].clone());
                if best.as_ref().is_none_or(|b| obj > *b) {
                    best = Some(obj);
                }
            }
        });
        best
    }

    fn contradiction_lp() -> LinearProgram {
        // (x1) ∧ (¬x1) relaxation: variables x1, z1, z2.
        let mut lp = LinearProgram::new(3);
        lp.add_le(vec![(1, 1), (0, -1)], 0);
        lp.add_le(vec![(2, 1), (0, 1)], 1);
        lp.set_objective(1, 1);
        lp.set_objective(2, 1);
        lp
    }

    #[test]
    fn contradiction_relaxation() {
        let lp = contradiction_lp();
        assert_eq!(vertex_oracle(&lp), Some(ratio(1, 1)));
        let s = solve_lp::<f64>(&lp);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!(lp.max_violation(&s.values) <= 1e-9);
        let e = solve_lp::<BigRational>(&lp);
        assert_eq!(e.objective, ratio(1, 1));
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new(1);
        lp.add_ge(vec![(0, 1)], 1);
        lp.add_le(vec![(0, 1)], 0);
        assert_eq!(solve_lp::<f64>(&lp).status, LpStatus::Infeasible);
        assert_eq!(solve_lp::<BigRational>(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn general_bounds_and_phase_one() {
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, -2, 2);
        lp.set_bounds(1, -3, 1);
        lp.add_ge(vec![(0, 1), (1, 1)], 1);
        lp.add_le(vec![(0, 2), (1, -1)], 2);
        lp.set_objective(0, -1);
        lp.set_objective(1, -2);
        let s = solve_lp::<BigRational>(&lp);
        assert_eq!(Some(s.objective.clone()), vertex_oracle(&lp));
    }

    fn arb_lp() -> impl Strategy<Value = LinearProgram> {
        let row = (proptest::collection::vec(-3i64..=3, 3), -3i64..=4);
        (
            proptest::collection::vec(row, 1..4),
            proptest::collection::vec(-3i64..=3, 3),
        )
            .prop_map(|(rows, obj)| {
                let mut lp = LinearProgram::new(3);
                for (a, b) in rows {
                    lp.add_le(a.into_iter().enumerate().collect(), b);
                }
                for (j, c) in obj.into_iter().enumerate() {
                    lp.set_objective(j, c);
                }
                lp
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_vertex_enumeration(lp in arb_lp()) {
            let oracle = vertex_oracle(&lp);
            let exact = solve_lp::<BigRational>(&lp);
            let float = solve_lp::<f64>(&lp);
            match oracle {
                None => {
                    prop_assert_eq!(exact.status, LpStatus::Infeasible);
                    prop_assert_eq!(float.status, LpStatus::Infeasible);
                }
                Some(best) => {
                    prop_assert_eq!(exact.status, LpStatus::Optimal);
                    prop_assert_eq!(&exact.objective, &best);
                    prop_assert!((float.objective - Scalar::to_f64(&best)).abs() < 1e-9);
                    prop_assert!(lp.max_violation(&float.values) <= 1e-9);
                }
            }
        }

        #[test]
        fn solving_is_deterministic(lp in arb_lp()) {
            let a = solve_lp::<f64>(&lp);
            let b = solve_lp::<f64>(&lp);
            prop_assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }
}
