use std::cmp::Ordering;
use std::fmt;

use crate::anf::Monomial;

/// A point of {0,1}^n. Ordered in ascending binary order with x1 as the
/// most significant coordinate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    ones: Monomial,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            ones: Monomial::one(),
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Self {
            n: bits.len(),
            ones: Monomial::from_vars(bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)),
        }
    }

    /// Decodes `index` with x1 as the most significant bit (n <= 63).
    pub fn from_index(n: usize, index: u64) -> Self {
        debug_assert!(n < 64);
        let ones = Monomial::from_vars((0..n).filter(|&i| (index >> (n - 1 - i)) & 1 == 1));
        Self { n, ones }
    }

    pub fn from_ones(n: usize, ones: Monomial) -> Self {
        debug_assert!(ones.max_var().map_or(true, |v| v < n));
        Self { n, ones }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.ones.contains(i)
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.n);
        if b {
            self.ones.insert(i);
        } else {
            self.ones.remove(i);
        }
    }

    /// Appends one coordinate.
    pub fn push(&mut self, b: bool) {
        self.n += 1;
        if b {
            self.ones.insert(self.n - 1);
        }
    }

    /// Drops the last coordinate.
    pub fn pop(&mut self) {
        if self.n > 0 {
            self.n -= 1;
            self.ones.remove(self.n);
        }
    }

    /// The set of coordinates equal to 1.
    pub fn ones(&self) -> &Monomial {
        &self.ones
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    /// Inverse of [`Assignment::from_index`].
    pub fn index(&self) -> u64 {
        self.ones
            .vars()
            .fold(0, |acc, i| acc | 1 << (self.n - 1 - i))
    }

    /// DIMACS `v` line: signed literals terminated by 0.
    pub fn to_v_line(&self) -> String {
        let mut s = String::from("v");
        for i in 0..self.n {
            let lit = (i + 1) as i64;
            s.push_str(&format!(" {}", if self.get(i) { lit } else { -lit }));
        }
        s.push_str(" 0");
        s
    }

    /// Bit string such as `011010`.
    pub fn to_bit_string(&self) -> String {
        (0..self.n)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.n.min(other.n);
        for i in 0..n {
            match self.get(i).cmp(&other.get(i)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.n.cmp(&other.n)
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_bit_string())
    }
}

impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let bits: Vec<u8> = (0..self.n).map(|i| self.get(i) as u8).collect();
        bits.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip_and_order() {
        let all: Vec<_> = (0..8).map(|i| Assignment::from_index(3, i)).collect();
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.index(), i as u64);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[3].to_bit_string(), "011");
        assert_eq!(all[3].to_v_line(), "v -1 2 3 0");
    }
}
