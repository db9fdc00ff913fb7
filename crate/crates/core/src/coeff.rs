//! Coefficients of `∏ g_t` by backward recursion over the factors, and the
//! bounded-solution satisfiability sweep.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::anf::Monomial;
use crate::cnf::{relabel_by_frequency, sort_clauses, Formula};
use crate::descriptor::BuildConfig;
use crate::error::{Error, Result};
use crate::indicator::{factor_sequence, Arith, Expanded, FactorSequence};

/// Default bound on memoized frontier entries.
pub const DEFAULT_FRONTIER_CAP: usize = 1 << 22;

/// Sparse monomial -> coefficient map of one factor.
pub fn clause_coeffs(g: &Expanded) -> Vec<(Monomial, BigInt)> {
    match g {
        Expanded::Gf2(p) => p
            .terms()
            .iter()
            .map(|m| (m.clone(), BigInt::one()))
            .collect(),
        Expanded::Int(p) => p.terms().map(|(m, c)| (m.clone(), c.clone())).collect(),
    }
}

/// Work counters of a coefficient engine.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug, Serialize)]
pub struct Work {
    pub queries: usize,
    pub memo_entries: usize,
    /// Largest number of memoized entries at one level.
    pub max_level_entries: usize,
    pub factor_terms: usize,
}

/// Memoized evaluator of `C^{[1:i]}_δ`.
pub struct CoeffEngine {
    mode: Arith,
    n: usize,
    /// `c^i` for factor i (0-based).
    coeffs: Vec<Vec<(Monomial, BigInt)>>,
    /// Union of the supports of factors `0..=i`.
    reach: Vec<Monomial>,
    memo: Vec<HashMap<Monomial, BigInt>>,
    cap: usize,
    work: Work,
}

impl CoeffEngine {
    pub fn new(fs: &FactorSequence, mode: Arith, cap: usize) -> Self {
        let coeffs = fs
            .factors
            .iter()
            .map(|f| clause_coeffs(&f.expanded(mode)))
            .collect();
        Self::with_coeffs(coeffs, mode, cap)
    }

    /// Engine over arbitrary factors; factor `t` may only mention
    /// variables `0..=t`.
    pub fn from_factors(factors: &[Expanded], mode: Arith, cap: usize) -> Result<Self> {
        for (t, g) in factors.iter().enumerate() {
            let top = match g {
                Expanded::Gf2(p) => p.max_var(),
                Expanded::Int(p) => p.terms().filter_map(|(m, _)| m.max_var()).max(),
            };
            if top.is_some_and(|v| v > t) {
                return Err(Error::InvariantViolation(format!(
                    "factor {} mentions x{}",
                    t + 1,
                    top.unwrap() + 1
                )));
            }
        }
        Ok(Self::with_coeffs(
            factors.iter().map(clause_coeffs).collect(),
            mode,
            cap,
        ))
    }

    fn with_coeffs(coeffs: Vec<Vec<(Monomial, BigInt)>>, mode: Arith, cap: usize) -> Self {
        let n = coeffs.len();
        let mut reach = Vec::with_capacity(n);
        let mut acc = Monomial::one();
        for c in &coeffs {
            for (m, _) in c {
                acc = acc.union(m);
            }
            reach.push(acc.clone());
        }
        let factor_terms = coeffs.iter().map(Vec::len).sum();
        Self {
            mode,
            n,
            coeffs,
            reach,
            memo: vec![HashMap::new(); n + 1],
            cap,
            work: Work {
                factor_terms,
                ..Work::default()
            },
        }
    }

    pub fn work(&self) -> Work {
        self.work
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn reduce(&self, c: BigInt) -> BigInt {
        match self.mode {
            Arith::Gf2 => BigInt::from(c.bit(0) as u8),
            Arith::Int => c,
        }
    }

    /// Coefficient of the monomial `delta` in `∏ g_t`.
    pub fn coefficient(&mut self, delta: &Monomial) -> Result<BigInt> {
        if delta.max_var().is_some_and(|v| v >= self.n) {
            return Err(Error::VarOutOfRange {
                var: delta.max_var().unwrap() as i64 + 1,
                n: self.n,
            });
        }
        self.work.queries += 1;
        self.level(self.n, delta)
    }

    /// `C^{[1:i]}_δ` with δ ⊆ {0..i-1}.
    fn level(&mut self, i: usize, delta: &Monomial) -> Result<BigInt> {
        if i == 0 {
            return Ok(if delta.is_one() {
                BigInt::one()
            } else {
                BigInt::zero()
            });
        }
        if !delta.is_subset(&self.reach[i - 1]) {
            return Ok(BigInt::zero());
        }
        if let Some(c) = self.memo[i].get(delta) {
            return Ok(c.clone());
        }
        let var = i - 1;
        let top = delta.contains(var);
        let rest = delta.without(var);
        let mut sum = BigInt::zero();
        for k in 0..self.coeffs[var].len() {
            let (xi, c) = &self.coeffs[var][k];
            if xi.contains(var) != top || !xi.is_subset(delta) {
                continue;
            }
            let (xi, c) = (xi.without(var), c.clone());
            let base = rest.difference(&xi);
            let free: Vec<usize> = xi.vars().collect();
            let mut inner = BigInt::zero();
            for s in 0u64..1 << free.len() {
                let mut zeta = base.clone();
                for (b, &v) in free.iter().enumerate() {
                    if (s >> b) & 1 == 1 {
                        zeta.insert(v);
                    }
                }
                inner += self.level(i - 1, &zeta)?;
            }
            sum += c * inner;
        }
        let sum = self.reduce(sum);
        let entries = &mut self.memo[i];
        entries.insert(delta.clone(), sum.clone());
        self.work.memo_entries += 1;
        self.work.max_level_entries = self.work.max_level_entries.max(entries.len());
        if self.work.memo_entries > self.cap {
            return Err(Error::ResourceCap {
                t: i,
                len: self.work.memo_entries,
            });
        }
        Ok(sum)
    }
}

/// One-shot coefficient query.
pub fn coefficient(fs: &FactorSequence, delta: &Monomial, mode: Arith) -> Result<BigInt> {
    CoeffEngine::new(fs, mode, DEFAULT_FRONTIER_CAP).coefficient(delta)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    Sat,
    UnsatUnderAssumption,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Witness {
    /// 1-based variables of the monomial.
    pub mask: Vec<usize>,
    /// Decimal coefficient.
    pub coefficient: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SweepVerdict {
    pub k: usize,
    pub n: usize,
    pub mode: Arith,
    pub verdict: Verdict,
    pub found: Option<Witness>,
    pub masks_checked: usize,
    pub work: Work,
}

/// Masks over `0..n` with at most `k` zeros: fewest zeros first, and
/// within a grade by the ascending list of zero positions.
pub fn sweep_masks(n: usize, k: usize) -> impl Iterator<Item = Monomial> {
    let full = Monomial::full(n);
    (0..=k.min(n)).flat_map(move |z| {
        let full = full.clone();
        combinations(n, z).map(move |zeros| full.difference(&Monomial::from_vars(zeros)))
    })
}

/// z-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, z: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if z <= n { Some((0..z).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = z;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < n - z + i {
                next[i] += 1;
                for j in i + 1..z {
                    next[j] = next[j - 1] + 1;
                }
                cur = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Satisfiable under `#S ≤ 2^k` iff some monomial with at most k missing
/// variables has an odd coefficient. Stops at the first witness.
pub fn sweep(
    fs: &FactorSequence,
    k: usize,
    mode: Arith,
    frontier_cap: usize,
) -> Result<SweepVerdict> {
    let mut eng = CoeffEngine::new(fs, mode, frontier_cap);
    let mut checked = 0;
    let mut found = None;
    for mask in sweep_masks(fs.n, k) {
        checked += 1;
        let c = eng.coefficient(&mask)?;
        if c.bit(0) {
            found = Some(Witness {
                mask: mask.vars().map(|v| v + 1).collect(),
                coefficient: c.to_string(),
            });
            break;
        }
    }
    Ok(SweepVerdict {
        k,
        n: fs.n,
        mode,
        verdict: if found.is_some() {
            Verdict::Sat
        } else {
            Verdict::UnsatUnderAssumption
        },
        found,
        masks_checked: checked,
        work: eng.work(),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct DecideConfig {
    pub mode: Arith,
    pub build: BuildConfig,
    pub frontier_cap: usize,
}

impl Default for DecideConfig {
    fn default() -> Self {
        Self {
            mode: Arith::Gf2,
            build: BuildConfig::default(),
            frontier_cap: DEFAULT_FRONTIER_CAP,
        }
    }
}

/// Relabel by frequency, sort, build the factors and sweep. The witness
/// mask is reported in the caller's variable numbering.
pub fn decide_sat_bounded(f: &Formula, k: usize, cfg: DecideConfig) -> Result<SweepVerdict> {
    let (relabeled, new_to_old) = relabel_by_frequency(f);
    let sorted = sort_clauses(&relabeled);
    let fs = factor_sequence(&sorted, cfg.build)?;
    let mut v = sweep(&fs, k, cfg.mode, cfg.frontier_cap)?;
    if let Some(w) = &mut v.found {
        w.mask = w.mask.iter().map(|&new| new_to_old[new - 1] + 1).collect();
        w.mask.sort_unstable();
    }
    Ok(v)
}
