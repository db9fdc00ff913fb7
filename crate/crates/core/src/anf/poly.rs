use std::fmt;
use std::ops::{Add, Mul};

use super::Monomial;
use crate::assign::Assignment;
use crate::error::{Error, Result};

/// Multilinear polynomial over GF(2): a set of monomials.
///
/// Terms are kept sorted in graded-lex order without duplicates, so two
/// polynomials are equal iff they are the same function.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AnfPoly {
    terms: Vec<Monomial>,
}

impl AnfPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self {
            terms: vec![Monomial::one()],
        }
    }

    pub fn constant(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    /// The variable with 0-based index `i`.
    pub fn var(i: usize) -> Self {
        Self {
            terms: vec![Monomial::var(i)],
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        Self { terms: vec![m] }
    }

    /// Sums the given monomials mod 2 (repeated monomials cancel pairwise).
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(ms: I) -> Self {
        let mut terms: Vec<Monomial> = ms.into_iter().collect();
        cancel_pairs(&mut terms);
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.binary_search(m).is_ok()
    }

    pub fn has_constant(&self) -> bool {
        self.terms.first().is_some_and(Monomial::is_one)
    }

    /// Union of the variables of all terms.
    pub fn support(&self) -> Monomial {
        self.terms
            .iter()
            .fold(Monomial::one(), |acc, m| acc.union(m))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(Monomial::max_var).max()
    }

    pub fn mentions(&self, i: usize) -> bool {
        self.terms.iter().any(|m| m.contains(i))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self { terms: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut prod = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                prod.push(a.union(b));
            }
        }
        cancel_pairs(&mut prod);
        Self { terms: prod }
    }

    /// `self + 1`.
    pub fn add_one(&self) -> Self {
        self.add(&Self::one())
    }

    /// Splits as `p0 + α_i · p1` with neither part mentioning α_i.
    pub fn split(&self, i: usize) -> (Self, Self) {
        let mut p0 = Vec::new();
        let mut p1 = Vec::new();
        for m in &self.terms {
            if m.contains(i) {
                p1.push(m.without(i));
            } else {
                p0.push(m.clone());
            }
        }
        // Removing one variable from distinct monomials that all contained it
        // keeps them distinct, but the graded order can change.
        p1.sort_unstable();
        (Self { terms: p0 }, Self { terms: p1 })
    }

    /// Fixes α_i := b.
    pub fn restrict(&self, i: usize, b: bool) -> Self {
        let (p0, p1) = self.split(i);
        if b {
            p0.add(&p1)
        } else {
            p0
        }
    }

    /// Replaces α_i by `q`.
    pub fn substitute(&self, i: usize, q: &Self) -> Self {
        if !self.mentions(i) {
            return self.clone();
        }
        let (p0, p1) = self.split(i);
        p0.add(&p1.mul(q))
    }

    /// Renames variables through `map` (old 0-based index to new).
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Self {
        Self::from_monomials(self.terms.iter().map(|m| m.rename(&map)))
    }

    /// Evaluates at `x`, failing when `x` is shorter than the support.
    pub fn eval(&self, x: &Assignment) -> Result<bool> {
        if let Some(v) = self.max_var() {
            if v >= x.len() {
                return Err(Error::UncoveredVariable {
                    var: v + 1,
                    len: x.len(),
                });
            }
        }
        Ok(self.eval_ones(x.ones()))
    }

    /// Evaluates at the point whose true coordinates are `ones`.
    pub fn eval_ones(&self, ones: &Monomial) -> bool {
        self.terms.iter().filter(|m| m.is_subset(ones)).count() % 2 == 1
    }

    /// Text form with variable prefix `prefix`, e.g. `1 + a1 + a1*a2`.
    pub fn to_text(&self, prefix: char) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|m| m.to_text(prefix))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// 1-based index lists in canonical order.
    pub fn to_index_lists(&self) -> Vec<Vec<usize>> {
        self.terms
            .iter()
            .map(|m| m.vars().map(|v| v + 1).collect())
            .collect()
    }

    pub fn from_index_lists(lists: &[Vec<usize>]) -> Result<Self> {
        let mut ms = Vec::with_capacity(lists.len());
        for l in lists {
            if l.contains(&0) {
                return Err(Error::PolyText("variable index 0".into()));
            }
            ms.push(Monomial::from_vars(l.iter().map(|v| v - 1)));
        }
        Ok(Self::from_monomials(ms))
    }
}

/// Sorts and removes monomials that occur an even number of times.
fn cancel_pairs(v: &mut Vec<Monomial>) {
    v.sort_unstable();
    let mut w = 0;
    let mut r = 0;
    while r < v.len() {
        let mut e = r + 1;
        while e < v.len() && v[e] == v[r] {
            e += 1;
        }
        if (e - r) % 2 == 1 {
            v.swap(w, r);
            w += 1;
        }
        r = e;
    }
    v.truncate(w);
}

impl Add for &AnfPoly {
    type Output = AnfPoly;
    fn add(self, rhs: &AnfPoly) -> AnfPoly {
        AnfPoly::add(self, rhs)
    }
}

impl Mul for &AnfPoly {
    type Output = AnfPoly;
    fn mul(self, rhs: &AnfPoly) -> AnfPoly {
        AnfPoly::mul(self, rhs)
    }
}

impl fmt::Display for AnfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('a'))
    }
}

impl fmt::Debug for AnfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('a'))
    }
}

impl serde::Serialize for AnfPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_index_lists().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for AnfPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lists = Vec::<Vec<usize>>::deserialize(d)?;
        Self::from_index_lists(&lists).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: usize) -> AnfPoly {
        AnfPoly::var(i - 1)
    }

    #[test]
    fn cancel_pairs_keeps_odd_runs() {
        let m = |v: &[usize]| Monomial::from_vars(v.iter().copied());
        let p = AnfPoly::from_monomials(vec![m(&[0]), m(&[1]), m(&[0]), m(&[0]), m(&[1]), m(&[])]);
        assert_eq!(p.terms(), &[m(&[]), m(&[0])]);
    }

    #[test]
    fn characteristic_two() {
        let p = &(&a(1) * &a(2)) + &a(3);
        assert!((&p + &p).is_zero());
        assert!((&AnfPoly::one() + &AnfPoly::one()).is_zero());
    }

    #[test]
    fn idempotent_variables() {
        assert_eq!(&a(1) * &a(1), a(1));
        let p = a(1).add_one();
        assert_eq!(&p * &p, p);
    }

    #[test]
    fn split_reorders_quotient() {
        // a1*a3 and a2 both exist; dividing a1*a2*a3 + a2*a3 by a3 must
        // come out sorted.
        let p = AnfPoly::from_monomials(vec![
            Monomial::from_vars([0, 1, 2]),
            Monomial::from_vars([1, 2]),
        ]);
        let (p0, p1) = p.split(2);
        assert!(p0.is_zero());
        assert_eq!(p1.to_text('a'), "a2 + a1*a2");
    }

    #[test]
    fn uncovered_variable() {
        let x = Assignment::zeros(2);
        assert_eq!(
            a(3).eval(&x),
            Err(Error::UncoveredVariable { var: 3, len: 2 })
        );
    }
}
