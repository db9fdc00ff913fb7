//! Ternary solution matrices and their lattice operations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::anf::AnfPoly;
use crate::assign::Assignment;
use crate::descriptor::Descriptor;
use crate::error::{Error, Result};

/// Largest descriptor size [`image`] will sweep exhaustively.
pub const IMAGE_LIMIT: usize = 25;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Cell {
    Zero,
    One,
    /// Either value.
    Neutral,
}

impl Cell {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Cell::One
        } else {
            Cell::Zero
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Cell::Zero => '0',
            Cell::One => '1',
            Cell::Neutral => '.',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Cell::Zero),
            '1' => Some(Cell::One),
            '.' => Some(Cell::Neutral),
            _ => None,
        }
    }

    fn admits(self, b: bool) -> bool {
        self == Cell::Neutral || self == Cell::from_bool(b)
    }

    fn meet(self, other: Cell) -> Option<Cell> {
        match (self, other) {
            (a, b) if a == b => Some(a),
            (Cell::Neutral, b) => Some(b),
            (a, Cell::Neutral) => Some(a),
            _ => None,
        }
    }
}

pub type TernaryRow = Vec<Cell>;

/// A set of assignments over `support` written as ternary rows.
///
/// Zero rows denote the empty set; a single all-neutral row denotes the
/// full space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SMatrix {
    support: Vec<usize>,
    rows: Vec<TernaryRow>,
}

impl SMatrix {
    /// `support` must be strictly ascending and every row that long.
    pub fn new(support: Vec<usize>, rows: Vec<TernaryRow>) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvariantViolation("support not ascending".into()));
        }
        if rows.iter().any(|r| r.len() != support.len()) {
            return Err(Error::InvariantViolation(
                "row width differs from support".into(),
            ));
        }
        Ok(Self { support, rows })
    }

    /// Over variables `0..n`.
    pub fn over(n: usize, rows: Vec<TernaryRow>) -> Result<Self> {
        Self::new((0..n).collect(), rows)
    }

    pub fn empty(support: Vec<usize>) -> Self {
        Self {
            support,
            rows: Vec::new(),
        }
    }

    pub fn full(support: Vec<usize>) -> Self {
        let w = support.len();
        Self {
            support,
            rows: vec![vec![Cell::Neutral; w]],
        }
    }

    /// Concrete rows over `0..n`, sorted.
    pub fn from_assignments<'a, I: IntoIterator<Item = &'a Assignment>>(n: usize, xs: I) -> Self {
        let set: BTreeSet<&Assignment> = xs.into_iter().collect();
        Self {
            support: (0..n).collect(),
            rows: set
                .into_iter()
                .map(|x| (0..n).map(|i| Cell::from_bool(x.get(i))).collect())
                .collect(),
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn rows(&self) -> &[TernaryRow] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.canonicalize()
            .rows
            .iter()
            .any(|r| r.iter().all(|&c| c == Cell::Neutral))
    }

    /// Represented assignments, coordinates in support order.
    pub fn expand(&self) -> BTreeSet<Assignment> {
        let mut out = BTreeSet::new();
        for r in &self.rows {
            expand_row(r, &mut out);
        }
        out
    }

    /// Number of represented assignments.
    pub fn count(&self) -> usize {
        self.expand().len()
    }

    /// Adds neutral columns for `vars \ support`.
    pub fn extend(&self, vars: &[usize]) -> Result<Self> {
        let mut target: Vec<usize> = vars.to_vec();
        target.sort_unstable();
        target.dedup();
        if !self.support.iter().all(|v| target.binary_search(v).is_ok()) {
            return Err(Error::InvariantViolation(
                "extension must contain the current support".into(),
            ));
        }
        let pos: Vec<Option<usize>> = target
            .iter()
            .map(|v| self.support.binary_search(v).ok())
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                pos.iter()
                    .map(|p| p.map_or(Cell::Neutral, |i| r[i]))
                    .collect()
            })
            .collect();
        Ok(Self {
            support: target,
            rows,
        })
    }

    fn joint_support(&self, other: &Self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.support.iter().chain(&other.support).copied().collect();
        s.into_iter().collect()
    }

    /// Union of the represented sets, canonicalized.
    pub fn join(&self, other: &Self) -> Self {
        let sup = self.joint_support(other);
        let a = self.extend(&sup).expect("superset");
        let b = other.extend(&sup).expect("superset");
        let mut rows = a.rows;
        rows.extend(b.rows);
        Self { support: sup, rows }.canonicalize()
    }

    /// Row-pairwise cell merge; conflicting pairs are dropped.
    pub fn meet(&self, other: &Self) -> Self {
        let sup = self.joint_support(other);
        let a = self.extend(&sup).expect("superset");
        let b = other.extend(&sup).expect("superset");
        let mut rows = BTreeSet::new();
        for ra in &a.rows {
            for rb in &b.rows {
                let merged: Option<TernaryRow> =
                    ra.iter().zip(rb).map(|(x, y)| x.meet(*y)).collect();
                if let Some(r) = merged {
                    rows.insert(r);
                }
            }
        }
        let mut rows: Vec<TernaryRow> = rows.into_iter().collect();
        rows.sort_by(row_order);
        Self { support: sup, rows }
    }

    /// Disjoint cover in ascending binary order: rows are expanded to
    /// concrete assignments, then pairs differing in one concrete cell are
    /// merged into a neutral, highest variable first, until nothing changes.
    pub fn canonicalize(&self) -> Self {
        let w = self.width();
        if let Some(r) = self
            .rows
            .iter()
            .find(|r| r.iter().all(|&c| c == Cell::Neutral))
        {
            return Self {
                support: self.support.clone(),
                rows: vec![r.clone()],
            };
        }
        let mut rows: HashSet<TernaryRow> = self
            .expand()
            .into_iter()
            .map(|x| (0..w).map(|i| Cell::from_bool(x.get(i))).collect())
            .collect();
        loop {
            let mut changed = false;
            for var in (0..w).rev() {
                let mut next = HashSet::with_capacity(rows.len());
                for r in &rows {
                    match r[var] {
                        Cell::Zero => {
                            let mut partner = r.clone();
                            partner[var] = Cell::One;
                            if rows.contains(&partner) {
                                partner[var] = Cell::Neutral;
                                next.insert(partner);
                                changed = true;
                            } else {
                                next.insert(r.clone());
                            }
                        }
                        Cell::One => {
                            let mut partner = r.clone();
                            partner[var] = Cell::Zero;
                            if !rows.contains(&partner) {
                                next.insert(r.clone());
                            }
                        }
                        Cell::Neutral => {
                            next.insert(r.clone());
                        }
                    }
                }
                rows = next;
            }
            if !changed {
                break;
            }
        }
        let mut rows: Vec<TernaryRow> = rows.into_iter().collect();
        rows.sort_by(row_order);
        Self {
            support: self.support.clone(),
            rows,
        }
    }

    /// Header of variable names, then one `0|1|.` line per row.
    pub fn to_text(&self) -> String {
        let mut s = self
            .support
            .iter()
            .map(|v| format!("x{}", v + 1))
            .collect::<Vec<_>>()
            .join(" ");
        s.push('\n');
        for r in &self.rows {
            s.push_str(
                &r.iter()
                    .map(|c| c.to_char().to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().unwrap_or("");
        let mut support = Vec::new();
        for name in header.split_whitespace() {
            let idx: usize = name
                .strip_prefix('x')
                .and_then(|d| d.parse().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    msg: format!("bad column {name:?}"),
                })?;
            support.push(idx - 1);
        }
        let mut rows = Vec::new();
        for (k, l) in lines.enumerate() {
            let row: Option<TernaryRow> = l
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(Cell::from_char)
                .collect();
            rows.push(row.ok_or_else(|| Error::Parse {
                line: k + 2,
                msg: format!("bad row {l:?}"),
            })?);
        }
        Self::new(support, rows)
    }
}

/// Compares rows by their smallest member, then lexicographically.
fn row_order(a: &TernaryRow, b: &TernaryRow) -> std::cmp::Ordering {
    let lo = |r: &TernaryRow| -> Vec<bool> { r.iter().map(|&c| c == Cell::One).collect() };
    lo(a).cmp(&lo(b)).then_with(|| a.cmp(b))
}

fn expand_row(r: &TernaryRow, out: &mut BTreeSet<Assignment>) {
    let free: Vec<usize> = (0..r.len()).filter(|&i| r[i] == Cell::Neutral).collect();
    let base: Vec<bool> = r.iter().map(|&c| c == Cell::One).collect();
    for mask in 0u64..(1u64 << free.len()) {
        let mut bits = base.clone();
        for (k, &i) in free.iter().enumerate() {
            bits[i] = (mask >> k) & 1 == 1;
        }
        out.insert(Assignment::from_bits(&bits));
    }
}

/// JSON: `{"support": [1-based], "rows": ["01.", ...]}`.
impl Serialize for SMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct J {
            support: Vec<usize>,
            rows: Vec<String>,
        }
        J {
            support: self.support.iter().map(|v| v + 1).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|c| c.to_char()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl fmt::Display for SMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Descriptor whose image is the represented set, by recursive split on the
/// lowest-index column. Indices are positions in the support.
pub fn descriptor_from_smatrix(a: &SMatrix) -> Result<Descriptor> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let rows: Vec<&[Cell]> = a.rows.iter().map(|r| r.as_slice()).collect();
    let h = split_descriptor(&rows, 0, a.width());
    Descriptor::new(h)
}

fn split_descriptor(rows: &[&[Cell]], l: usize, n: usize) -> Vec<AnfPoly> {
    if l == n {
        return Vec::new();
    }
    let s0: Vec<&[Cell]> = rows
        .iter()
        .copied()
        .filter(|r| r[l].admits(false))
        .collect();
    let s1: Vec<&[Cell]> = rows.iter().copied().filter(|r| r[l].admits(true)).collect();
    let mut out = Vec::with_capacity(n - l);
    match (s0.is_empty(), s1.is_empty()) {
        (false, true) => {
            out.push(AnfPoly::zero());
            out.extend(split_descriptor(&s0, l + 1, n));
        }
        (true, false) => {
            out.push(AnfPoly::one());
            out.extend(split_descriptor(&s1, l + 1, n));
        }
        (false, false) => {
            let f = split_descriptor(&s0, l + 1, n);
            let g = split_descriptor(&s1, l + 1, n);
            let al = AnfPoly::var(l);
            out.push(al.clone());
            for (fi, gi) in f.iter().zip(&g) {
                out.push(fi.add(&al.mul(&fi.add(gi))));
            }
        }
        (true, true) => unreachable!("rows is non-empty"),
    }
    out
}

/// `{H(α) : α ∈ {0,1}^n}`.
pub fn image_set(h: &Descriptor) -> Result<BTreeSet<Assignment>> {
    let n = h.n();
    if n > IMAGE_LIMIT {
        return Err(Error::TooLarge {
            what: "image",
            n,
            limit: IMAGE_LIMIT,
        });
    }
    Ok((0..1u64 << n)
        .map(|i| h.apply(&Assignment::from_index(n, i)))
        .collect())
}

/// The image as concrete rows in ascending order.
pub fn image(h: &Descriptor) -> Result<SMatrix> {
    let set = image_set(h)?;
    Ok(SMatrix::from_assignments(h.n(), &set))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str], n: usize) -> SMatrix {
        let rows = rows
            .iter()
            .map(|r| r.chars().map(|c| Cell::from_char(c).unwrap()).collect())
            .collect();
        SMatrix::over(n, rows).unwrap()
    }

    #[test]
    fn absorption_of_covered_row() {
        let c = m(&["0.", "01"], 2).canonicalize();
        assert_eq!(c, m(&["0."], 2));
    }

    #[test]
    fn canonicalize_is_idempotent_and_sorted() {
        let c = m(&[".0", "11"], 2).canonicalize();
        assert_eq!(c.expand(), m(&["00", "10", "11"], 2).expand());
        assert_eq!(c.canonicalize(), c);
        assert_eq!(c, m(&["00", "1."], 2));
    }

    #[test]
    fn extend_inserts_neutral_column() {
        let a = SMatrix::new(vec![0, 1, 3], vec![vec![Cell::One, Cell::Zero, Cell::One]]).unwrap();
        let e = a.extend(&[0, 1, 2, 3]).unwrap();
        assert_eq!(
            e.rows()[0],
            vec![Cell::One, Cell::Zero, Cell::Neutral, Cell::One]
        );
        assert_eq!(a.extend(&[0, 1, 3]).unwrap(), a);
    }

    #[test]
    fn text_round_trip() {
        let a = m(&["0.1", "110"], 3);
        assert_eq!(SMatrix::from_text(&a.to_text()).unwrap(), a);
    }
}
