//! Fixed-point enumeration of descriptors by prefix search.

use serde::Serialize;

use crate::assign::Assignment;
use crate::descriptor::Descriptor;
use crate::error::{Error, Result};

/// Bounds on emitted solutions and visited tree nodes.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub solutions: usize,
    pub nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            solutions: 1 << 20,
            nodes: 1 << 26,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Truncation {
    Solutions,
    Nodes,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SolutionSet {
    pub n: usize,
    /// Ascending binary order.
    pub solutions: Vec<Assignment>,
    pub truncated: Option<Truncation>,
    /// Prefixes accepted during the search (the root excluded).
    pub nodes_visited: usize,
}

impl SolutionSet {
    pub fn from_sorted(n: usize, solutions: Vec<Assignment>) -> Self {
        debug_assert!(solutions.windows(2).all(|w| w[0] < w[1]));
        Self {
            n,
            solutions,
            truncated: None,
            nodes_visited: 0,
        }
    }

    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn contains(&self, x: &Assignment) -> bool {
        self.solutions.binary_search(x).is_ok()
    }

    /// DIMACS `v` lines.
    pub fn to_v_lines(&self) -> String {
        self.solutions
            .iter()
            .map(|x| x.to_v_line() + "\n")
            .collect()
    }
}

/// Fixed points of H: x with h_t(x_1..x_t) = x_t for every t.
pub fn list_solutions(h: &Descriptor, caps: Caps) -> SolutionSet {
    intersect_images(std::slice::from_ref(h), caps).expect("a single descriptor has one size")
}

pub fn count_solutions(h: &Descriptor, caps: Caps) -> usize {
    list_solutions(h, caps).count()
}

/// Common fixed points: a prefix is extended only when every descriptor
/// admits it.
pub fn intersect_images(hs: &[Descriptor], caps: Caps) -> Result<SolutionSet> {
    let n = hs.first().map_or(0, Descriptor::n);
    if hs.iter().any(|h| h.n() != n) {
        return Err(Error::InvariantViolation(
            "descriptors differ in size".into(),
        ));
    }
    let mut out = SolutionSet {
        n,
        solutions: Vec::new(),
        truncated: None,
        nodes_visited: 0,
    };
    if hs.is_empty() {
        return Ok(out);
    }
    let mut prefix = Assignment::zeros(0);
    dfs(hs, &mut prefix, caps, &mut out);
    Ok(out)
}

fn dfs(hs: &[Descriptor], prefix: &mut Assignment, caps: Caps, out: &mut SolutionSet) {
    let t = prefix.len();
    if t == out.n {
        if out.solutions.len() >= caps.solutions {
            out.truncated = Some(Truncation::Solutions);
            return;
        }
        out.solutions.push(prefix.clone());
        return;
    }
    for b in [false, true] {
        if out.truncated.is_some() {
            return;
        }
        prefix.push(b);
        if hs.iter().all(|h| h.get(t).eval_ones(prefix.ones()) == b) {
            if out.nodes_visited >= caps.nodes {
                out.truncated = Some(Truncation::Nodes);
                prefix.pop();
                return;
            }
            out.nodes_visited += 1;
            dfs(hs, prefix, caps, out);
        }
        prefix.pop();
    }
}
