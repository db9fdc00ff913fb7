//! Descriptor functions: construction by successive clause merges, with a
//! trace of every merge for profiling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::anf::AnfPoly;
use crate::assign::Assignment;
use crate::cnf::{static_sets, Clause3, SortedFormula};
use crate::error::{Error, Result};

/// Default bound on the number of monomials of any h_i.
pub const DEFAULT_CAP: usize = 1 << 20;

/// Triangular vector `[h_1 .. h_n]` with `support(h_i) ⊆ {α_1 .. α_i}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Descriptor {
    h: Vec<AnfPoly>,
}

impl Descriptor {
    pub fn new(h: Vec<AnfPoly>) -> Result<Self> {
        let d = Self { h };
        if let Some(i) = d.first_non_triangular() {
            return Err(Error::InvariantViolation(format!(
                "h_{} mentions a later variable",
                i + 1
            )));
        }
        Ok(d)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            h: (0..n).map(AnfPoly::var).collect(),
        }
    }

    /// The descriptor with the single image point `x`.
    pub fn constant(x: &Assignment) -> Self {
        Self {
            h: (0..x.len()).map(|i| AnfPoly::constant(x.get(i))).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[AnfPoly] {
        &self.h
    }

    pub fn get(&self, i: usize) -> &AnfPoly {
        &self.h[i]
    }

    pub fn is_identity(&self) -> bool {
        self.h
            .iter()
            .enumerate()
            .all(|(i, p)| *p == AnfPoly::var(i))
    }

    /// H(α).
    pub fn apply(&self, alpha: &Assignment) -> Assignment {
        let mut out = Assignment::zeros(self.n());
        for (i, p) in self.h.iter().enumerate() {
            out.set(i, p.eval_ones(alpha.ones()));
        }
        out
    }

    pub fn is_fixed_point(&self, x: &Assignment) -> bool {
        self.apply(x) == *x
    }

    fn first_non_triangular(&self) -> Option<usize> {
        self.h
            .iter()
            .enumerate()
            .find(|(i, p)| p.max_var().is_some_and(|v| v > *i))
            .map(|(i, _)| i)
    }

    /// Largest `len(h_i)`.
    pub fn max_len(&self) -> usize {
        self.h.iter().map(AnfPoly::len).max().unwrap_or(0)
    }

    pub fn to_texts(&self) -> Vec<String> {
        self.h.iter().map(|p| p.to_text('a')).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_texts()).expect("strings serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let texts: Vec<String> = serde_json::from_str(text)?;
        let h = texts
            .iter()
            .map(|t| t.parse())
            .collect::<Result<Vec<AnfPoly>>>()?;
        Self::new(h)
    }
}

/// Descriptor of a single clause over `n` variables: identity except
/// `h_t = α_t + ∏ (α_v + α*_v + 1)` over the clause's three variables.
pub fn clause_descriptor(c: &Clause3, n: usize) -> Descriptor {
    let mut d = Descriptor::identity(n);
    let t = c.t();
    d.h[t] = AnfPoly::var(t).add(&forbidden_indicator(c, |v| AnfPoly::var(v)));
    d
}

/// `∏ (p_v + α*_v + 1)`: 1 exactly where the clause's variables take the
/// forbidden values, with each variable replaced by `p(v)`.
fn forbidden_indicator(c: &Clause3, p: impl Fn(usize) -> AnfPoly) -> AnfPoly {
    let mut prod = AnfPoly::one();
    for (v, forb) in c.vars().into_iter().zip(c.forbidden()) {
        let factor = if forb { p(v) } else { p(v).add_one() };
        prod = prod.mul(&factor);
    }
    prod
}

/// Merges two cells of index `l`. Returns `h_l` and the residual `g*`
/// over `α_1 .. α_{l-1}` (zero when nothing propagates).
pub fn merge_poly(f: &AnfPoly, g: &AnfPoly, l: usize) -> (AnfPoly, AnfPoly) {
    let (f0, f1) = (f.restrict(l, false), f.restrict(l, true));
    let (g0, g1) = (g.restrict(l, false), g.restrict(l, true));
    let s0 = f0.add(&g0);
    let s1 = f1.add(&g1);
    let p0 = f0.mul(&g0);
    let p1 = f1.mul(&g1);
    let b0 = s0.mul(&p1).add(&p0);
    let b1 = s1.mul(&s0).add(&s1.mul(&p0)).add(&p1);
    let al = AnfPoly::var(l);
    let h = b0.add(&al.mul(&b0.add(&b1)));
    let gstar = s0.mul(&s1);
    (h, gstar)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Situation {
    /// The clause changes nothing.
    A,
    /// h_t changes and nothing propagates.
    B,
    /// A residual propagates to lower variables.
    C,
}

impl Situation {
    pub fn tag(self) -> char {
        match self {
            Situation::A => 'A',
            Situation::B => 'B',
            Situation::C => 'C',
        }
    }
}

/// One merge of the build.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MergeStep {
    /// Position of the clause in the merged sequence (0-based).
    pub clause_index: usize,
    /// Highest variable of the clause (0-based).
    pub t: usize,
    pub situation: Situation,
    /// Variables j successively reached by the residual (0-based).
    pub chain: Vec<usize>,
    /// `len(h_i)` for every i after the step.
    pub lens: Vec<usize>,
    pub unsat: bool,
}

/// How a build ended.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum TraceEnd {
    Running,
    Descriptor,
    Unsat { clause_index: usize },
    ResourceCap { t: usize, len: usize },
    Failed(String),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct MergeTrace {
    pub n: usize,
    /// V(x_t) of the merged formula (0-based).
    pub v: Vec<BTreeSet<usize>>,
    pub steps: Vec<MergeStep>,
    pub end: TraceEnd,
}

impl MergeTrace {
    pub fn new(n: usize, v: Vec<BTreeSet<usize>>) -> Self {
        Self {
            n,
            v,
            steps: Vec::new(),
            end: TraceEnd::Running,
        }
    }

    /// Pairs `(t, pred(t))` seen in any chain.
    pub fn pred_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut e = BTreeSet::new();
        for s in &self.steps {
            let mut from = s.t;
            for &j in &s.chain {
                e.insert((from, j));
                from = j;
            }
        }
        e
    }

    /// P(t): every j reachable from t through pred.
    pub fn predecessors(&self) -> Vec<BTreeSet<usize>> {
        let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (t, j) in self.pred_edges() {
            succ.entry(t).or_default().push(j);
        }
        (0..self.n)
            .map(|t| {
                let mut seen = BTreeSet::new();
                let mut stack = vec![t];
                while let Some(u) = stack.pop() {
                    for &j in succ.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                        if seen.insert(j) {
                            stack.push(j);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// W*(x_t) = V(x_t) ∪ ⋃ { V(x_u) : u > t, t ∈ P(u) }.
    pub fn w_star(&self) -> Vec<BTreeSet<usize>> {
        let p = self.predecessors();
        (0..self.n)
            .map(|t| {
                let mut w = self.v[t].clone();
                for u in t + 1..self.n {
                    if p[u].contains(&t) {
                        w.extend(self.v[u].iter().copied());
                    }
                }
                w
            })
            .collect()
    }

    /// W(x_t) = W*(x_t) without variables above t, and W(x_n) = V(x_n).
    pub fn w(&self) -> Vec<BTreeSet<usize>> {
        let ws = self.w_star();
        (0..self.n)
            .map(|t| {
                if t + 1 == self.n {
                    self.v[t].clone()
                } else {
                    ws[t].range(..=t).copied().collect()
                }
            })
            .collect()
    }
}

/// Limits for a build.
#[derive(Clone, Copy, Debug)]
pub struct BuildConfig {
    pub cap: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

/// Result of a single merge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Merged {
    Descriptor(Descriptor),
    Unsat,
}

fn guard(p: &AnfPoly, i: usize, cap: usize) -> Result<()> {
    if p.len() > cap {
        Err(Error::ResourceCap {
            t: i + 1,
            len: p.len(),
        })
    } else {
        Ok(())
    }
}

/// Merges descriptor `f` with clause `c`. The step record is filled in
/// `step` (its `clause_index` is left to the caller).
pub fn merge_step(f: &Descriptor, c: &Clause3, cap: usize, step: &mut MergeStep) -> Result<Merged> {
    let n = f.n();
    let t = c.t();
    if t >= n {
        return Err(Error::VarOutOfRange {
            var: t as i64 + 1,
            n,
        });
    }
    if let Some(i) = f.first_non_triangular() {
        return Err(Error::InvariantViolation(format!(
            "input h_{} is not triangular",
            i + 1
        )));
    }
    let mut h = f.h.clone();
    step.t = t;
    step.chain.clear();
    step.unsat = false;

    // g_t composed with α_v <- f_v for the clause's variables.
    let comp = h[t].add(&forbidden_indicator(c, |v| h[v].clone()));
    guard(&comp, t, cap)?;
    let (ht, mut gstar) = merge_poly(&h[t], &comp, t);
    guard(&ht, t, cap)?;
    step.situation = if !gstar.is_zero() {
        Situation::C
    } else if ht == h[t] {
        Situation::A
    } else {
        Situation::B
    };
    h[t] = ht;

    let mut last = t;
    while !gstar.is_zero() {
        if gstar.is_one() {
            step.unsat = true;
            step.lens = h.iter().map(AnfPoly::len).collect();
            return Ok(Merged::Unsat);
        }
        let j = gstar.max_var().expect("non-constant residual");
        if j >= last {
            return Err(Error::InvariantViolation(format!(
                "residual from x{} reaches x{}",
                last + 1,
                j + 1
            )));
        }
        step.chain.push(j);
        let target = h[j].add(&gstar);
        let (hj, next) = merge_poly(&h[j], &target, j);
        guard(&hj, j, cap)?;
        h[j] = hj;
        gstar = next;
        last = j;
    }

    // α_i <- h_i into every later h_j, ascending i.
    for i in 0..n {
        if h[i] == AnfPoly::var(i) {
            continue;
        }
        let (lo, hi) = h.split_at_mut(i + 1);
        let hi_poly = &lo[i];
        for hj in hi.iter_mut() {
            if hj.mentions(i) {
                *hj = hj.substitute(i, hi_poly);
            }
        }
        for (k, hj) in hi.iter().enumerate() {
            guard(hj, i + 1 + k, cap)?;
        }
    }

    let d = Descriptor { h };
    if let Some(i) = d.first_non_triangular() {
        return Err(Error::InvariantViolation(format!(
            "merge produced non-triangular h_{}",
            i + 1
        )));
    }
    step.lens = d.h.iter().map(AnfPoly::len).collect();
    Ok(Merged::Descriptor(d))
}

/// Merges `f` with `c` without recording a trace.
pub fn merge(f: &Descriptor, c: &Clause3, cap: usize) -> Result<Merged> {
    let mut step = blank_step(0);
    merge_step(f, c, cap, &mut step)
}

fn blank_step(clause_index: usize) -> MergeStep {
    MergeStep {
        clause_index,
        t: 0,
        situation: Situation::A,
        chain: Vec::new(),
        lens: Vec::new(),
        unsat: false,
    }
}

/// Outcome of a build.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    Descriptor(Descriptor),
    /// The merge of clause `clause_index` (0-based) left no solution.
    Unsat {
        clause_index: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Build {
    pub result: Result<Outcome>,
    pub trace: MergeTrace,
}

/// Folds merges over the clauses in the given order, starting from the
/// identity descriptor.
pub fn build_clauses(n: usize, clauses: &[Clause3], cfg: BuildConfig) -> Build {
    let mut v = vec![BTreeSet::new(); n];
    for c in clauses {
        if c.t() < n {
            v[c.t()].extend(c.vars());
        }
    }
    let mut trace = MergeTrace::new(n, v);
    let mut h = Descriptor::identity(n);
    for (k, c) in clauses.iter().enumerate() {
        let mut step = blank_step(k);
        let r = merge_step(&h, c, cfg.cap, &mut step);
        match r {
            Ok(Merged::Descriptor(d)) => {
                trace.steps.push(step);
                h = d;
            }
            Ok(Merged::Unsat) => {
                trace.steps.push(step);
                trace.end = TraceEnd::Unsat { clause_index: k };
                return Build {
                    result: Ok(Outcome::Unsat { clause_index: k }),
                    trace,
                };
            }
            Err(e) => {
                trace.end = match &e {
                    Error::ResourceCap { t, len } => TraceEnd::ResourceCap { t: *t, len: *len },
                    other => TraceEnd::Failed(other.to_string()),
                };
                return Build {
                    result: Err(e),
                    trace,
                };
            }
        }
    }
    trace.end = TraceEnd::Descriptor;
    Build {
        result: Ok(Outcome::Descriptor(h)),
        trace,
    }
}

/// Builds H_φ for a sorted formula.
pub fn build(f: &SortedFormula, cfg: BuildConfig) -> Build {
    let mut b = build_clauses(f.n(), f.clauses(), cfg);
    b.trace.v = static_sets(f).v;
    b
}

pub const PROFILE_HEADER: &str = "# anf-sat-lab profile v1";

/// One row per merge step; columns are 1-based where they name variables
/// or clauses.
pub fn profile_csv(trace: &MergeTrace) -> String {
    let mut s = String::new();
    s.push_str(PROFILE_HEADER);
    s.push('\n');
    s.push_str("step,clause_index,t,len_h_t,log2_len_h_t,situation,recursion_depth\n");
    for (k, st) in trace.steps.iter().enumerate() {
        let len = st.lens.get(st.t).copied().unwrap_or(0);
        let log2 = if len == 0 {
            "-inf".to_string()
        } else {
            format!("{:.6}", (len as f64).log2())
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            k + 1,
            st.clause_index + 1,
            st.t + 1,
            len,
            log2,
            st.situation.tag(),
            st.chain.len()
        );
    }
    let _ = match &trace.end {
        TraceEnd::Running => writeln!(s, "# end running"),
        TraceEnd::Descriptor => writeln!(s, "# end descriptor"),
        TraceEnd::Unsat { clause_index } => writeln!(s, "# end unsat clause={}", clause_index + 1),
        TraceEnd::ResourceCap { t, len } => writeln!(s, "# end resource_cap t={t} len={len}"),
        TraceEnd::Failed(msg) => writeln!(s, "# end failed {msg}"),
    };
    s
}

/// Per-variable table of V(x_t), P(t) and W(x_t); sets are 1-based and
/// space separated.
pub fn summary_csv(trace: &MergeTrace) -> String {
    let fmt_set = |s: &BTreeSet<usize>| {
        s.iter()
            .map(|v| (v + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let p = trace.predecessors();
    let w = trace.w();
    let mut s = String::from("# anf-sat-lab summary v1\nt,len_v,v,p,w\n");
    for t in 0..trace.n {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            t + 1,
            trace.v[t].len(),
            fmt_set(&trace.v[t]),
            fmt_set(&p[t]),
            fmt_set(&w[t])
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> AnfPoly {
        s.parse().unwrap()
    }

    #[test]
    fn merging_equal_cells_is_neutral() {
        let f = p("a1 + a1*a3 + a2*a3");
        let (h, g) = merge_poly(&f, &f, 2);
        assert_eq!(h, f);
        assert!(g.is_zero());
    }

    #[test]
    fn situation_four_example() {
        let (h, g) = merge_poly(&p("a4"), &p("a2*a3*a4 + a2*a4 + a4"), 3);
        assert_eq!(h, p("a2*a3*a4 + a2*a4 + a4"));
        assert!(g.is_zero());
    }

    #[test]
    fn repeated_clause_is_situation_a() {
        let c = Clause3::from_dimacs([1, 2, -3]).unwrap();
        let d = clause_descriptor(&c, 3);
        let mut step = blank_step(0);
        let r = merge_step(&d, &c, DEFAULT_CAP, &mut step).unwrap();
        assert_eq!(r, Merged::Descriptor(d));
        assert_eq!(step.situation, Situation::A);
    }

    #[test]
    fn rejects_non_triangular() {
        assert!(Descriptor::new(vec![p("a2"), p("a2")]).is_err());
    }

    #[test]
    fn cap_is_reported() {
        let c = Clause3::from_dimacs([1, 2, 3]).unwrap();
        let b = build_clauses(3, &[c], BuildConfig { cap: 1 });
        assert!(matches!(b.result, Err(Error::ResourceCap { t: 3, .. })));
        assert!(matches!(b.trace.end, TraceEnd::ResourceCap { .. }));
    }
}
