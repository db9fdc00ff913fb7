//! Independent ground truth: exhaustive enumeration and full expansion.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::anf::{AnfPoly, IntPoly};
use crate::assign::Assignment;
use crate::cnf::{Clause3, Formula, Literal};
use crate::error::{Error, Result};
use crate::indicator::{Arith, Expanded, FactorSequence};
use crate::solutions::SolutionSet;

pub const BRUTE_LIMIT: usize = 25;
pub const EXPAND_LIMIT: usize = 14;

/// All satisfying assignments by a clause loop over every point.
pub fn brute_solutions(f: &Formula) -> Result<SolutionSet> {
    let n = f.n();
    if n > BRUTE_LIMIT {
        return Err(Error::TooLarge {
            what: "brute force",
            n,
            limit: BRUTE_LIMIT,
        });
    }
    let sols = (0..1u64 << n)
        .map(|i| Assignment::from_index(n, i))
        .filter(|x| f.eval(|v| x.get(v)))
        .collect();
    Ok(SolutionSet::from_sorted(n, sols))
}

/// Solution count by folding each clause's falsifying cube into a bit
/// table; shares no code with [`brute_solutions`].
pub fn truth_table_count(f: &Formula) -> Result<u64> {
    let n = f.n();
    if n > 22 {
        return Err(Error::TooLarge {
            what: "truth table",
            n,
            limit: 22,
        });
    }
    let size = 1usize << n;
    let mut dead = vec![false; size];
    for c in f.clauses() {
        // index bit (n-1-v) holds x_v
        let mut fixed_mask = 0usize;
        let mut fixed_val = 0usize;
        for l in c.lits() {
            let bit = 1usize << (n - 1 - l.var);
            fixed_mask |= bit;
            if l.negated {
                fixed_val |= bit;
            }
        }
        for (idx, d) in dead.iter_mut().enumerate() {
            if idx & fixed_mask == fixed_val {
                *d = true;
            }
        }
    }
    Ok(dead.iter().filter(|d| !**d).count() as u64)
}

/// Multiplies every factor out.
pub fn expand_product(fs: &FactorSequence, mode: Arith) -> Result<Expanded> {
    if fs.n > EXPAND_LIMIT {
        return Err(Error::TooLarge {
            what: "expansion",
            n: fs.n,
            limit: EXPAND_LIMIT,
        });
    }
    Ok(match mode {
        Arith::Gf2 => Expanded::Gf2(
            fs.factors
                .iter()
                .fold(AnfPoly::one(), |acc, f| acc.mul(&f.gf2())),
        ),
        Arith::Int => Expanded::Int(
            fs.factors
                .iter()
                .fold(IntPoly::one(), |acc, f| acc.mul(&f.int())),
        ),
    })
}

/// `m` distinct clauses over `n` variables, each with three distinct
/// variables and independent polarities, from a ChaCha8 stream.
pub fn random_formula(n: usize, m: usize, seed: u64) -> Result<Formula> {
    let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
    if n < 3 || m > 8 * triples {
        return Err(Error::GenerationInfeasible { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let vars = sample(&mut rng, n, 3);
        let lits = [0, 1, 2].map(|k| Literal::new(vars.index(k), rng.gen::<bool>()));
        let c = Clause3::new(lits).expect("sampled variables are distinct");
        if seen.insert(c) {
            clauses.push(c);
        }
    }
    Formula::new(n, clauses)
}

/// Clause count for a target ratio, rounded to nearest.
pub fn clauses_for_ratio(n: usize, ratio: f64) -> usize {
    (n as f64 * ratio).round().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_formula_has_all_points() {
        let s = brute_solutions(&Formula::empty(3)).unwrap();
        assert_eq!(s.count(), 8);
        assert_eq!(truth_table_count(&Formula::empty(3)).unwrap(), 8);
    }

    #[test]
    fn generator_is_seed_stable() {
        assert_eq!(
            random_formula(10, 43, 7).unwrap(),
            random_formula(10, 43, 7).unwrap()
        );
        assert_ne!(
            random_formula(10, 43, 7).unwrap(),
            random_formula(10, 43, 8).unwrap()
        );
    }

    #[test]
    fn generator_limits() {
        assert!(random_formula(3, 8, 0).is_ok());
        assert_eq!(
            random_formula(3, 9, 0),
            Err(Error::GenerationInfeasible { n: 3, m: 9 })
        );
        assert!(random_formula(2, 1, 0).is_err());
    }

    #[test]
    fn ratio_target() {
        assert_eq!(clauses_for_ratio(50, 4.26), 213);
    }
}
