use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AnfPoly, Monomial};
use crate::assign::Assignment;
use crate::error::{Error, Result};

/// Multilinear polynomial with unbounded integer coefficients (x² = x).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct IntPoly {
    coeffs: BTreeMap<Monomial, BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c · m` in place.
    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: std::collections::HashMap<Monomial, BigInt> =
            std::collections::HashMap::with_capacity(self.len() * other.len());
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                *acc.entry(a.union(b)).or_default() += ca * cb;
            }
        }
        Self {
            coeffs: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Keeps the odd-coefficient monomials.
    pub fn reduce_mod2(&self) -> AnfPoly {
        let two = BigInt::from(2);
        AnfPoly::from_monomials(
            self.coeffs
                .iter()
                .filter(|(_, c)| !(*c % &two).is_zero())
                .map(|(m, _)| m.clone()),
        )
    }

    pub fn eval(&self, x: &Assignment) -> Result<BigInt> {
        if let Some(v) = self.coeffs.keys().filter_map(Monomial::max_var).max() {
            if v >= x.len() {
                return Err(Error::UncoveredVariable {
                    var: v + 1,
                    len: x.len(),
                });
            }
        }
        Ok(self
            .coeffs
            .iter()
            .filter(|(m, _)| m.is_subset(x.ones()))
            .map(|(_, c)| c)
            .sum())
    }

    pub fn to_text(&self, prefix: char) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mag = c.abs();
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&m.to_text(prefix));
            } else {
                out.push_str(&format!("{mag}*{}", m.to_text(prefix)));
            }
        }
        out
    }
}

/// Lifts each monomial to coefficient 1.
pub fn int_lift(p: &AnfPoly) -> IntPoly {
    IntPoly {
        coeffs: p
            .terms()
            .iter()
            .map(|m| (m.clone(), BigInt::one()))
            .collect(),
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('x'))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('x'))
    }
}

/// JSON: list of `[coefficient-as-string, [1-based indices]]`.
impl serde::Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(String, Vec<usize>)> = self
            .coeffs
            .iter()
            .map(|(m, c)| (c.to_string(), m.vars().map(|v| v + 1).collect()))
            .collect();
        v.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_two_example_value() {
        // 1 + x1 + 3 x1x2 + 7 x1x2x3 at (1,1,0)
        let p = IntPoly::from_terms([
            (Monomial::one(), BigInt::from(1)),
            (Monomial::var(0), BigInt::from(1)),
            (Monomial::from_vars([0, 1]), BigInt::from(3)),
            (Monomial::from_vars([0, 1, 2]), BigInt::from(7)),
        ]);
        let x = Assignment::from_bits(&[true, true, false]);
        assert_eq!(p.eval(&x).unwrap(), BigInt::from(5));
        assert_eq!(p.reduce_mod2().eval(&x).unwrap(), true);
    }

    #[test]
    fn cancellation_drops_entries() {
        let mut p = IntPoly::one();
        p.add_term(Monomial::one(), BigInt::from(-1));
        assert!(p.is_zero());
    }

    #[test]
    fn idempotent_product() {
        let x1 = int_lift(&AnfPoly::var(0));
        let p = x1.add(&IntPoly::one());
        // (1 + x1)^2 = 1 + 3 x1 under x² = x
        let sq = p.mul(&p);
        assert_eq!(sq.coefficient(&Monomial::var(0)), BigInt::from(3));
        assert_eq!(sq.coefficient(&Monomial::one()), BigInt::from(1));
    }
}
