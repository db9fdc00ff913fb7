use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A set of variables (0-based), stored as a growable bitset.
///
/// Used both as a multilinear monomial and as the set of true coordinates
/// of an assignment. Trailing zero words are trimmed so equality and
/// hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    words: SmallVec<[u64; 1]>,
}

impl Monomial {
    /// The empty monomial, i.e. the constant 1.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(i: usize) -> Self {
        let mut m = Self::default();
        m.insert(i);
        m
    }

    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        let mut m = Self::default();
        for v in vars {
            m.insert(v);
        }
        m
    }

    /// Variables `0..n`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 1]> = SmallVec::new();
        words.resize(n / 64, u64::MAX);
        if n % 64 != 0 {
            words.push((1u64 << (n % 64)) - 1);
        }
        Self { words }
    }

    pub fn is_one(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(w) = self.words.get_mut(i / 64) {
            *w &= !(1 << (i % 64));
            self.trim();
        }
    }

    pub fn with(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.insert(i);
        m
    }

    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.remove(i);
        m
    }

    pub fn union(&self, other: &Self) -> Self {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w |= s;
        }
        Self { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut words: SmallVec<[u64; 1]> = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        Self { words }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (w, o) in m.words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
        m.trim();
        m
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        if self.words.len() > other.words.len() {
            return false;
        }
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn degree(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    /// Variables in ascending order.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Renames every variable through `map` (old index to new index).
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Self {
        Self::from_vars(self.vars().map(map))
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

/// Graded-lexicographic: lower degree first, then the monomial whose
/// ascending variable list is lexicographically smaller.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let n = self.words.len().max(other.words.len());
        for i in 0..n {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            let x = a ^ b;
            if x != 0 {
                let low = x & x.wrapping_neg();
                return if a & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('a'))
    }
}

impl Monomial {
    /// Text form such as `a1*a3`, or `1` for the empty monomial.
    pub fn to_text(&self, prefix: char) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        self.vars()
            .map(|v| format!("{prefix}{}", v + 1))
            .collect::<Vec<_>>()
            .join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_beyond_one_word() {
        let m = Monomial::from_vars([3, 70, 129]);
        assert_eq!(m.vars().collect::<Vec<_>>(), vec![3, 70, 129]);
        assert_eq!(m.max_var(), Some(129));
        assert_eq!(m.without(129).max_var(), Some(70));
        assert_eq!(m.without(129).without(70), Monomial::var(3));
        assert!(Monomial::var(70).is_subset(&m));
        assert!(!m.is_subset(&Monomial::var(70)));
    }

    #[test]
    fn graded_lex_order() {
        let a12 = Monomial::from_vars([0, 1]);
        let a13 = Monomial::from_vars([0, 2]);
        let a23 = Monomial::from_vars([1, 2]);
        let a3 = Monomial::var(2);
        let mut v = vec![
            a23.clone(),
            a3.clone(),
            Monomial::one(),
            a13.clone(),
            a12.clone(),
        ];
        v.sort();
        assert_eq!(v, vec![Monomial::one(), a3, a12, a13, a23]);
        assert!(Monomial::var(1) < Monomial::var(100));
    }

    #[test]
    fn full_mask() {
        assert_eq!(Monomial::full(0), Monomial::one());
        assert_eq!(Monomial::full(64).degree(), 64);
        assert_eq!(Monomial::full(65).max_var(), Some(64));
    }
}
