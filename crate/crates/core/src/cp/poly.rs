//! Multilinear polynomials with integer coefficients.
//!
//! Monomials are sorted sets of variables, so `x·x = x` holds by
//! construction. Arithmetic is checked: any `i64` overflow yields `None`.

use std::collections::BTreeMap;
use std::fmt;

use crate::cnf::Clause;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut vars: Vec<u32>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Monomial(vars)
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![v])
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut vars = self.0.clone();
        vars.extend_from_slice(&other.0);
        Monomial::new(vars)
    }

    pub fn with_var(&self, v: u32) -> Monomial {
        match self.0.binary_search(&v) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut vars = self.0.clone();
                vars.insert(pos, v);
                Monomial(vars)
            }
        }
    }

    pub fn eval(&self, value: &dyn Fn(u32) -> bool) -> bool {
        self.0.iter().all(|&v| value(v))
    }
}

/// `Σ coef·monomial + constant`, read as the inequality `p ≥ 0` in proofs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, i64>,
    constant: i64,
}

impl Polynomial {
    pub fn constant(c: i64) -> Self {
        Polynomial {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: u32) -> Self {
        Polynomial::term(1, Monomial::var(v))
    }

    pub fn term(coef: i64, m: Monomial) -> Self {
        let mut p = Polynomial::default();
        p.add_term(coef, m).expect("single term cannot overflow");
        p
    }

    /// Builds `Σ coef·monomial + constant`; `None` on overflow.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (i64, Monomial)>,
        constant: i64,
    ) -> Option<Self> {
        let mut p = Polynomial::constant(constant);
        for (c, m) in terms {
            p.add_term(c, m)?;
        }
        Some(p)
    }

    fn add_term(&mut self, coef: i64, m: Monomial) -> Option<()> {
        if m.degree() == 0 {
            self.constant = self.constant.checked_add(coef)?;
            return Some(());
        }
        let slot = self.terms.entry(m).or_insert(0);
        *slot = slot.checked_add(coef)?;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Some(())
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    /// Non-constant terms in canonical order; coefficients are never zero.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> i64 {
        if m.degree() == 0 {
            self.constant
        } else {
            self.terms.get(m).copied().unwrap_or(0)
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// `self + lambda·other`.
    pub fn add_scaled(&self, other: &Polynomial, lambda: i64) -> Option<Polynomial> {
        let mut out = self.clone();
        out.constant = out
            .constant
            .checked_add(other.constant.checked_mul(lambda)?)?;
        for (m, &c) in &other.terms {
            out.add_term(c.checked_mul(lambda)?, m.clone())?;
        }
        Some(out)
    }

    pub fn add(&self, other: &Polynomial) -> Option<Polynomial> {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Polynomial) -> Option<Polynomial> {
        self.add_scaled(other, -1)
    }

    pub fn scale(&self, lambda: i64) -> Option<Polynomial> {
        Polynomial::default().add_scaled(self, lambda)
    }

    /// `x_v · self`, multilinearised.
    pub fn mul_var(&self, v: u32) -> Option<Polynomial> {
        let mut out = Polynomial::default();
        if self.constant != 0 {
            out.add_term(self.constant, Monomial::var(v))?;
        }
        for (m, &c) in &self.terms {
            out.add_term(c, m.with_var(v))?;
        }
        Some(out)
    }

    /// Product of two polynomials, multilinearised.
    pub fn mul(&self, other: &Polynomial) -> Option<Polynomial> {
        let mut out = Polynomial::constant(self.constant.checked_mul(other.constant)?);
        for (m, &c) in &other.terms {
            out.add_term(c.checked_mul(self.constant)?, m.clone())?;
        }
        for (m, &c) in &self.terms {
            out.add_term(c.checked_mul(other.constant)?, m.clone())?;
            for (m2, &c2) in &other.terms {
                out.add_term(c.checked_mul(c2)?, m.times(m2))?;
            }
        }
        Some(out)
    }

    /// True iff every non-constant coefficient is a multiple of `c`.
    pub fn divisible_by(&self, c: i64) -> bool {
        c > 0 && self.terms.values().all(|&a| a % c == 0)
    }

    /// Division with rounding for `p ≥ 0`: non-constant coefficients are
    /// divided exactly and the constant is rounded down. `None` if some
    /// coefficient is not divisible.
    pub fn divide_round(&self, c: i64) -> Option<Polynomial> {
        if !self.divisible_by(c) {
            return None;
        }
        Some(Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, &a)| (m.clone(), a / c))
                .collect(),
            constant: self.constant.div_euclid(c),
        })
    }

    /// Value at a 0/1 point given by `value(var)`.
    pub fn eval(&self, value: &dyn Fn(u32) -> bool) -> i128 {
        let mut total = i128::from(self.constant);
        for (m, &c) in &self.terms {
            if m.eval(value) {
                total += i128::from(c);
            }
        }
        total
    }

    /// Text form `coef v1*v2; …; constant`.
    pub fn to_text(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m.vars().iter().map(u32::to_string).collect();
                format!("{c} {}", vars.join("*"))
            })
            .collect();
        parts.push(self.constant.to_string());
        parts.join("; ")
    }

    pub fn parse_text(text: &str) -> Result<Polynomial, String> {
        let parts: Vec<&str> = text.split(';').map(str::trim).collect();
        let (last, terms) = parts.split_last().expect("split yields at least one part");
        let constant = last
            .parse::<i64>()
            .map_err(|_| format!("invalid constant `{last}`"))?;
        let mut p = Polynomial::constant(constant);
        for part in terms {
            let mut it = part.split_whitespace();
            let (Some(c), Some(vars), None) = (it.next(), it.next(), it.next()) else {
                return Err(format!("invalid term `{part}`"));
            };
            let c = c
                .parse::<i64>()
                .map_err(|_| format!("invalid coefficient `{c}`"))?;
            let vars = vars
                .split('*')
                .map(|v| match v.parse::<u32>() {
                    Ok(v) if v > 0 => Ok(v),
                    _ => Err(format!("invalid variable `{v}`")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if c == 0 {
                return Err(format!("zero coefficient in `{part}`"));
            }
            p.add_term(c, Monomial::new(vars))
                .ok_or("coefficient overflow")?;
        }
        Ok(p)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, &c) in &self.terms {
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            if !first {
                write!(f, " ")?;
            }
            let vars: Vec<String> = m.vars().iter().map(|v| format!("x{v}")).collect();
            if c.abs() == 1 {
                write!(f, "{sign}{}", vars.join("·"))?;
            } else {
                write!(f, "{sign}{}·{}", c.abs(), vars.join("·"))?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0 {
            write!(
                f,
                " {} {}",
                if self.constant < 0 { "-" } else { "+" },
                self.constant.abs()
            )
        } else {
            Ok(())
        }
    }
}

/// Clause `ℓ_1 ∨ … ∨ ℓ_t` as `ℓ′_1 + … + ℓ′_t − 1 ≥ 0`, where `x′ = x` and
/// `(¬x)′ = 1 − x`.
pub fn translate_clause(clause: &Clause) -> Polynomial {
    let mut p = Polynomial::constant(-1);
    for lit in clause.literals() {
        let sign = if lit.is_positive() { 1 } else { -1 };
        if !lit.is_positive() {
            p.constant += 1;
        }
        p.add_term(sign, Monomial::var(lit.var()))
            .expect("clause sizes fit in i64");
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(text: &str) -> Polynomial {
        Polynomial::parse_text(text).unwrap()
    }

    #[test]
    fn clause_translation() {
        let c = Clause::from_dimacs(&[1, -2]).unwrap();
        assert_eq!(translate_clause(&c), poly("1 1; -1 2; 0"));
        assert_eq!(
            translate_clause(&Clause::from_dimacs(&[1]).unwrap()),
            poly("1 1; -1")
        );
        assert_eq!(translate_clause(&Clause::empty()), Polynomial::constant(-1));
    }

    #[test]
    fn division_rounds_constant_down() {
        let p = poly("2 1; 2 2; -3");
        assert_eq!(p.divide_round(2).unwrap(), poly("1 1; 1 2; -2"));
        assert!(poly("2 1; 3 2; -3").divide_round(2).is_none());
        assert_eq!(
            Polynomial::constant(-3).divide_round(3).unwrap(),
            Polynomial::constant(-1)
        );
    }

    #[test]
    fn multiplication_is_multilinear() {
        let p = poly("1 1; -1 2; 1");
        assert_eq!(p.mul_var(1).unwrap(), poly("2 1; -1 1*2; 0"));
        let q = poly("1 1; 1");
        assert_eq!(q.mul(&q).unwrap(), poly("3 1; 1"));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let p = poly("3 1*2; -1 4; -2");
        assert_eq!(p.to_text(), "3 1*2; -1 4; -2");
        assert_eq!(
            Polynomial::parse_text("-1").unwrap(),
            Polynomial::constant(-1)
        );
        assert!(Polynomial::parse_text("0 1; 1").is_err());
        assert!(Polynomial::parse_text("1 x; 1").is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let p = Polynomial::term(i64::MAX, Monomial::var(1));
        assert!(p.add(&p).is_none());
        assert!(p.scale(2).is_none());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        let term = (-5i64..=5, proptest::collection::vec(1u32..=5, 0..4));
        (proptest::collection::vec(term, 0..6), -5i64..=5).prop_map(|(terms, c)| {
            Polynomial::from_terms(terms.into_iter().map(|(k, v)| (k, Monomial::new(v))), c)
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalisation_is_idempotent(p in arb_poly()) {
            let again = Polynomial::from_terms(p.terms().map(|(m, c)| (c, Monomial::new(m.vars().to_vec()))), p.constant_term()).unwrap();
            prop_assert_eq!(&again, &p);
            prop_assert!(again.degree() <= p.degree());
        }

        #[test]
        fn products_agree_with_evaluation(p in arb_poly(), q in arb_poly(), bits in 0u32..32) {
            let value = |v: u32| (bits >> (v - 1)) & 1 == 1;
            let pq = p.mul(&q).unwrap();
            prop_assert_eq!(pq.eval(&value), p.eval(&value) * q.eval(&value));
            prop_assert_eq!(p.mul_var(3).unwrap().eval(&value), if value(3) { p.eval(&value) } else { 0 });
            prop_assert_eq!(p.add_scaled(&q, 3).unwrap().eval(&value), p.eval(&value) + 3 * q.eval(&value));
        }
    }
}
