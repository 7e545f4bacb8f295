//! ε-approximate degree of ±1-valued Boolean functions by exact LP.

use num_rational::BigRational;

use crate::search::BooleanFunction;

use super::simplex::{ratio, solve_lp, LinearProgram, LpStatus};

/// Largest arity accepted by [`approx_degree`].
pub const APPROX_DEGREE_VAR_CAP: u32 = 4;

/// `±1` table of a Boolean function: `0 ↦ +1`, `1 ↦ −1`.
pub fn pm1_table(f: &BooleanFunction) -> Vec<i64> {
    f.table().iter().map(|&b| if b { -1 } else { 1 }).collect()
}

/// Least `max_x |f(x) − p(x)|` over multilinear `p` of degree at most `d`,
/// computed exactly. `table[r]` is `f` at the point whose bit `i` is `x_{i+1}`.
pub fn best_error(table: &[i64], num_vars: u32, d: u32) -> BigRational {
    let points = 1usize << num_vars;
    assert_eq!(table.len(), points, "table length must be 2^n");
    let subsets: Vec<u32> = (0..1u32 << num_vars)
        .filter(|s| s.count_ones() <= d)
        .collect();
    // Columns: one coefficient per character χ_S, then the error bound.
    let err = subsets.len();
    let mut lp = LinearProgram::new(err + 1);
    for j in 0..err {
        lp.set_bounds(j, -2, 2);
    }
    lp.set_bounds(err, 0, 2);
    lp.set_objective(err, -1);
    for (x, &fx) in table.iter().enumerate() {
        let chi: Vec<(usize, i64)> = subsets
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                (
                    j,
                    if (x as u32 & s).count_ones().is_multiple_of(2) {
                        1
                    } else {
                        -1
                    },
                )
            })
            .collect();
        // p(x) − ε′ ≤ f(x) and −p(x) − ε′ ≤ −f(x)
        let mut up = chi.clone();
        up.push((err, -1));
        lp.add_le(up, fx);
        let mut down: Vec<(usize, i64)> = chi.into_iter().map(|(j, c)| (j, -c)).collect();
        down.push((err, -1));
        lp.add_le(down, -fx);
    }
    let s = solve_lp::<BigRational>(&lp);
    assert_eq!(
        s.status,
        LpStatus::Optimal,
        "p = 0 with error 1 is feasible"
    );
    -s.objective
}

/// Smallest `d` such that some degree-`d` multilinear polynomial is within
/// `eps` of the ±1-valued `table` everywhere.
pub fn approx_degree(table: &[i64], num_vars: u32, eps: &BigRational) -> u32 {
    assert!(
        num_vars <= APPROX_DEGREE_VAR_CAP,
        "approx_degree supports at most 4 variables"
    );
    assert!(
        table.iter().all(|&v| v == 1 || v == -1),
        "table must be ±1-valued"
    );
    assert!(*eps >= ratio(0, 1) && *eps < ratio(1, 1), "need 0 ≤ ε < 1");
    (0..=num_vars)
        .find(|&d| best_error(table, num_vars, d) <= *eps)
        .expect("degree n interpolates exactly")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_parity() {
        let five_sixths = ratio(5, 6);
        assert_eq!(approx_degree(&[1, 1, 1, 1], 2, &five_sixths), 0);
        assert_eq!(approx_degree(&[-1; 8], 3, &five_sixths), 0);
        let parity = [1, -1, -1, 1];
        assert_eq!(best_error(&parity, 2, 1), ratio(1, 1));
        assert_eq!(approx_degree(&parity, 2, &five_sixths), 2);
    }

    #[test]
    fn dictator_and_and() {
        let dictator = [1, -1, 1, -1];
        assert_eq!(approx_degree(&dictator, 2, &ratio(0, 1)), 1);
        // AND on two bits in ±1 form: 1 everywhere except x = 11.
        let and = [1, 1, 1, -1];
        assert_eq!(best_error(&and, 2, 1), ratio(1, 2));
        assert_eq!(approx_degree(&and, 2, &ratio(1, 2)), 1);
        assert_eq!(approx_degree(&and, 2, &ratio(1, 3)), 2);
    }

    #[test]
    fn monotone_in_eps_and_bounded() {
        let table = [1, -1, -1, -1, 1, 1, -1, 1];
        let mut last = u32::MAX;
        for k in 0..6 {
            let d = approx_degree(&table, 3, &ratio(k, 6));
            assert!(d <= 3 && d <= last);
            last = d;
        }
    }
}
