//! 3-CNF instances: parsing, normalization, sorting and the static
//! structural sets over a sorted formula.
//!
//! Variables are 0-based in memory and 1-based in every external form.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn new(var: usize, negated: bool) -> Self {
        Self { var, negated }
    }

    /// From a signed, 1-based DIMACS literal.
    pub fn from_dimacs(l: i64) -> Self {
        debug_assert!(l != 0);
        Self {
            var: l.unsigned_abs() as usize - 1,
            negated: l < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Truth value under `x_var = value`.
    pub fn holds(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Three literals over distinct variables with `r < s < t`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause3 {
    lits: [Literal; 3],
}

impl Clause3 {
    /// Sorts the literals by variable; rejects repeated variables.
    pub fn new(mut lits: [Literal; 3]) -> std::result::Result<Self, &'static str> {
        lits.sort_by_key(|l| l.var);
        if lits[0].var == lits[1].var || lits[1].var == lits[2].var {
            let tautology = lits
                .windows(2)
                .any(|w| w[0].var == w[1].var && w[0].negated != w[1].negated);
            return Err(if tautology {
                "tautology"
            } else {
                "duplicate variable"
            });
        }
        Ok(Self { lits })
    }

    pub fn from_dimacs(l: [i64; 3]) -> std::result::Result<Self, &'static str> {
        if l.contains(&0) {
            return Err("literal 0");
        }
        Self::new(l.map(Literal::from_dimacs))
    }

    pub fn lits(&self) -> &[Literal; 3] {
        &self.lits
    }

    pub fn r(&self) -> usize {
        self.lits[0].var
    }

    pub fn s(&self) -> usize {
        self.lits[1].var
    }

    pub fn t(&self) -> usize {
        self.lits[2].var
    }

    pub fn vars(&self) -> [usize; 3] {
        self.lits.map(|l| l.var)
    }

    /// Whether x_t occurs positively.
    pub fn positive_in_t(&self) -> bool {
        !self.lits[2].negated
    }

    /// The unique falsifying values of (x_r, x_s, x_t).
    pub fn forbidden(&self) -> [bool; 3] {
        self.lits.map(|l| l.negated)
    }

    pub fn eval(&self, value: impl Fn(usize) -> bool) -> bool {
        self.lits.iter().any(|l| l.holds(value(l.var)))
    }

    pub fn to_dimacs(&self) -> [i64; 3] {
        self.lits.map(Literal::to_dimacs)
    }

    /// Renames variables and re-sorts.
    pub fn rename(&self, map: impl Fn(usize) -> usize) -> Self {
        Self::new(self.lits.map(|l| Literal::new(map(l.var), l.negated)))
            .expect("renaming is injective")
    }
}

impl fmt::Debug for Clause3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_dimacs())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Formula {
    n: usize,
    clauses: Vec<Clause3>,
}

impl Formula {
    pub fn new(n: usize, clauses: Vec<Clause3>) -> Result<Self> {
        for c in &clauses {
            if c.t() >= n {
                return Err(Error::VarOutOfRange {
                    var: c.t() as i64 + 1,
                    n,
                });
            }
        }
        Ok(Self { n, clauses })
    }

    /// From signed 1-based literal triples.
    pub fn from_dimacs_clauses(n: usize, clauses: &[[i64; 3]]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (k, c) in clauses.iter().enumerate() {
            for &l in c {
                if l.unsigned_abs() as usize > n {
                    return Err(Error::VarOutOfRange { var: l.abs(), n });
                }
            }
            let cl = Clause3::from_dimacs(*c).map_err(|reason| Error::MalformedClause {
                line: k + 1,
                lits: c.to_vec(),
                reason,
            })?;
            out.push(cl);
        }
        Self::new(n, out)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            clauses: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause3] {
        &self.clauses
    }

    /// Clause-to-variable ratio m/n as (numerator, denominator).
    pub fn delta(&self) -> (usize, usize) {
        (self.m(), self.n)
    }

    pub fn delta_f64(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m() as f64 / self.n as f64
        }
    }

    pub fn eval(&self, value: impl Fn(usize) -> bool) -> bool {
        self.clauses.iter().all(|c| c.eval(&value))
    }

    /// Keeps the clauses at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Formula {
        Formula {
            n: self.n,
            clauses: positions.iter().map(|&k| self.clauses[k]).collect(),
        }
    }

    /// Renumbers variables to `0..n'` keeping only those that occur,
    /// in ascending order.
    pub fn compact(&self) -> Formula {
        let used: BTreeSet<usize> = self.clauses.iter().flat_map(|c| c.vars()).collect();
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in used.iter().enumerate() {
            map[old] = new;
        }
        Formula {
            n: used.len(),
            clauses: self.clauses.iter().map(|c| c.rename(|v| map[v])).collect(),
        }
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.m());
        for c in &self.clauses {
            let [a, b, d] = c.to_dimacs();
            s.push_str(&format!("{a} {b} {d} 0\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FormulaJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: FormulaJson = serde_json::from_str(text)?;
        Self::from_dimacs_clauses(j.n, &j.clauses)
    }
}

#[derive(Serialize, Deserialize)]
struct FormulaJson {
    n: usize,
    clauses: Vec<[i64; 3]>,
}

impl From<&Formula> for FormulaJson {
    fn from(f: &Formula) -> Self {
        Self {
            n: f.n,
            clauses: f.clauses.iter().map(Clause3::to_dimacs).collect(),
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormulaJson::from(self).serialize(s)
    }
}

/// Parses DIMACS CNF. Comment lines start with `c`; a `%` token ends the
/// clause section (SATLIB trailer).
pub fn parse_dimacs(text: &str) -> Result<Formula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut clause_line = 0;
    'lines: for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "second header".into(),
                });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let bad = || Error::Parse {
                line: line_no,
                msg: format!("bad header {trimmed:?}"),
            };
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(bad());
            }
            let n = parts[2].parse().map_err(|_| bad())?;
            let m = parts[3].parse().map_err(|_| bad())?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::Parse {
                line: line_no,
                msg: "clause before header".into(),
            });
        };
        for tok in trimmed.split_whitespace() {
            if tok == "%" {
                break 'lines;
            }
            let l: i64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad literal {tok:?}"),
            })?;
            if current.is_empty() {
                clause_line = line_no;
            }
            if l == 0 {
                clauses.push(finish_clause(&current, n, clause_line)?);
                current.clear();
            } else {
                if l.unsigned_abs() as usize > n {
                    return Err(Error::VarOutOfRange { var: l.abs(), n });
                }
                current.push(l);
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        });
    };
    if !current.is_empty() {
        clauses.push(finish_clause(&current, n, clause_line)?);
    }
    if clauses.len() != m {
        return Err(Error::HeaderMismatch {
            declared: m,
            found: clauses.len(),
        });
    }
    Formula::new(n, clauses)
}

fn finish_clause(lits: &[i64], _n: usize, line: usize) -> Result<Clause3> {
    let malformed = |reason| Error::MalformedClause {
        line,
        lits: lits.to_vec(),
        reason,
    };
    let arr: [i64; 3] = lits
        .try_into()
        .map_err(|_| malformed("clause must have exactly three literals"))?;
    Clause3::from_dimacs(arr).map_err(malformed)
}

/// A formula whose clauses are in sorted order, with the permutation that
/// produced it: `clauses[k] = original[witness[k]]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SortedFormula {
    formula: Formula,
    witness: Vec<usize>,
}

impl SortedFormula {
    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn witness(&self) -> &[usize] {
        &self.witness
    }

    pub fn n(&self) -> usize {
        self.formula.n
    }

    pub fn m(&self) -> usize {
        self.formula.m()
    }

    pub fn clauses(&self) -> &[Clause3] {
        &self.formula.clauses
    }

    pub fn is_sorted(&self) -> bool {
        self.clauses()
            .windows(2)
            .all(|w| sort_key(&w[0]) <= sort_key(&w[1]))
    }
}

fn sort_key(c: &Clause3) -> (usize, bool) {
    (c.t(), c.positive_in_t())
}

/// Stable sort by highest variable, negated-in-x_t before positive.
pub fn sort_clauses(f: &Formula) -> SortedFormula {
    let mut witness: Vec<usize> = (0..f.m()).collect();
    witness.sort_by_key(|&k| sort_key(&f.clauses[k]));
    SortedFormula {
        formula: f.select(&witness),
        witness,
    }
}

/// Renames variables so occurrence counts are non-increasing in index,
/// ties by old index. Returns the new formula and the map new -> old.
pub fn relabel_by_frequency(f: &Formula) -> (Formula, Vec<usize>) {
    let mut count = vec![0usize; f.n];
    for c in &f.clauses {
        for v in c.vars() {
            count[v] += 1;
        }
    }
    let mut new_to_old: Vec<usize> = (0..f.n).collect();
    new_to_old.sort_by_key(|&v| std::cmp::Reverse(count[v]));
    let mut old_to_new = vec![0; f.n];
    for (new, &old) in new_to_old.iter().enumerate() {
        old_to_new[old] = new;
    }
    let clauses = f
        .clauses
        .iter()
        .map(|c| c.rename(|v| old_to_new[v]))
        .collect();
    (Formula { n: f.n, clauses }, new_to_old)
}

/// Clauses of Cl(x_t) positive in x_t, and those negated in x_t.
pub fn split_plus_minus(f: &SortedFormula, t: usize) -> (Formula, Formula) {
    let (plus, minus): (Vec<Clause3>, Vec<Clause3>) = f
        .clauses()
        .iter()
        .filter(|c| c.t() == t)
        .partition(|c| c.positive_in_t());
    (
        Formula {
            n: f.n(),
            clauses: plus,
        },
        Formula {
            n: f.n(),
            clauses: minus,
        },
    )
}

/// The clauses at positions `l` (0-based), order preserved.
pub fn subproblem(f: &SortedFormula, l: &BTreeSet<usize>) -> SortedFormula {
    let positions: Vec<usize> = l.iter().copied().filter(|&k| k < f.m()).collect();
    SortedFormula {
        formula: f.formula.select(&positions),
        witness: positions.iter().map(|&k| f.witness[k]).collect(),
    }
}

/// Per-variable structural sets over a sorted formula.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StaticSets {
    /// Clause positions whose highest variable is t.
    pub cl: Vec<Vec<usize>>,
    /// Variables occurring in the clauses of `cl[t]`.
    pub v: Vec<BTreeSet<usize>>,
    pub m_plus: Vec<usize>,
    pub m_minus: Vec<usize>,
}

impl StaticSets {
    /// V(x_t) restricted to variables up to and including `i`.
    pub fn v_upto(&self, t: usize, i: usize) -> BTreeSet<usize> {
        self.v[t].range(..=i).copied().collect()
    }
}

pub fn static_sets(f: &SortedFormula) -> StaticSets {
    let n = f.n();
    let mut s = StaticSets {
        cl: vec![Vec::new(); n],
        v: vec![BTreeSet::new(); n],
        m_plus: vec![0; n],
        m_minus: vec![0; n],
    };
    for (k, c) in f.clauses().iter().enumerate() {
        let t = c.t();
        s.cl[t].push(k);
        s.v[t].extend(c.vars());
        if c.positive_in_t() {
            s.m_plus[t] += 1;
        } else {
            s.m_minus[t] += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_clause() {
        let f = parse_dimacs("p cnf 3 1\n-1 -2 -3 0").unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.clauses()[0].to_dimacs(), [-1, -2, -3]);
    }

    #[test]
    fn normalizes_literal_order() {
        let f = parse_dimacs("c hi\np cnf 4 2\n1 2 -3 0\n-4 3\n -2 0\n").unwrap();
        assert_eq!(f.clauses()[1].to_dimacs(), [-2, 3, -4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_dimacs("p cnf 3 1\n1 1 2 0"),
            Err(Error::MalformedClause {
                reason: "duplicate variable",
                ..
            })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 3 1\n1 -1 2 0"),
            Err(Error::MalformedClause {
                reason: "tautology",
                ..
            })
        ));
        assert!(matches!(
            parse_dimacs("p cnf 3 1\n1 2 0"),
            Err(Error::MalformedClause { .. })
        ));
        assert_eq!(
            parse_dimacs("p cnf 3 1\n1 2 4 0"),
            Err(Error::VarOutOfRange { var: 4, n: 3 })
        );
        assert_eq!(
            parse_dimacs("p cnf 3 2\n1 2 3 0"),
            Err(Error::HeaderMismatch {
                declared: 2,
                found: 1
            })
        );
        assert!(parse_dimacs("1 2 3 0").is_err());
    }

    #[test]
    fn satlib_trailer() {
        let f = parse_dimacs("p cnf 3 1\n 1 2 3 0\n%\n0\n\n").unwrap();
        assert_eq!(f.m(), 1);
    }

    #[test]
    fn sort_puts_lower_t_and_negatives_first() {
        let f = Formula::from_dimacs_clauses(5, &[[1, 2, -5], [1, 2, 4], [1, 3, 5], [2, 3, -5]])
            .unwrap();
        let s = sort_clauses(&f);
        assert_eq!(s.witness(), &[1, 0, 3, 2]);
        assert!(s.is_sorted());
        assert_eq!(sort_clauses(s.formula()).witness(), &[0, 1, 2, 3]);
    }

    #[test]
    fn relabel_example() {
        // x3 five times, x1 twice, x2 once; x4..x10 once each
        let f = Formula::from_dimacs_clauses(
            10,
            &[[3, 1, 2], [3, 1, 4], [3, 5, 6], [3, 7, 8], [3, 9, 10]],
        )
        .unwrap();
        let (g, perm) = relabel_by_frequency(&f);
        assert_eq!(&perm[..3], &[2, 0, 1]);
        assert_eq!(g.clauses()[0].to_dimacs(), [1, 2, 3]);
    }

    #[test]
    fn compact_renumbers() {
        let f = Formula::from_dimacs_clauses(9, &[[2, -5, 9]])
            .unwrap()
            .compact();
        assert_eq!(f.n(), 3);
        assert_eq!(f.clauses()[0].to_dimacs(), [1, -2, 3]);
    }

    #[test]
    fn json_round_trip() {
        let f = Formula::from_dimacs_clauses(4, &[[1, 2, -3], [-2, 3, -4]]).unwrap();
        assert_eq!(f.to_json(), r#"{"n":4,"clauses":[[1,2,-3],[-2,3,-4]]}"#);
        assert_eq!(Formula::from_json(&f.to_json()).unwrap(), f);
    }
}
