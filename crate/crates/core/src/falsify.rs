//! Monitored claims, checked against the oracle on seeded instances, with
//! divergent instances shrunk to clause-minimal reproducers.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::cnf::{sort_clauses, Clause3, Formula};
use crate::coeff::{decide_sat_bounded, DecideConfig, Verdict};
use crate::descriptor::{build, BuildConfig, Outcome};
use crate::error::Error;
use crate::indicator::factor_sequence;
use crate::oracle::{brute_solutions, clauses_for_ratio, random_formula};
use crate::smatrix::image_set;

/// Registered claim identifiers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClaimId {
    /// The built descriptor's image is the solution set, and UNSAT is
    /// reported exactly when it is empty.
    MergeSoundness,
    /// The product of the per-variable factors is the indicator of the
    /// solution set.
    Indicator6,
    /// The bounded sweep decides satisfiability when `#S ≤ 2^k`.
    SweepDecides,
}

impl ClaimId {
    pub const ALL: [ClaimId; 3] = [
        ClaimId::MergeSoundness,
        ClaimId::Indicator6,
        ClaimId::SweepDecides,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClaimId::MergeSoundness => "MERGE_SOUNDNESS",
            ClaimId::Indicator6 => "INDICATOR6",
            ClaimId::SweepDecides => "SWEEP_DECIDES",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of checking one claim on one formula.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Check {
    Agree,
    Diverge {
        expected: String,
        got: String,
    },
    /// Not applicable; the reason is recorded.
    Skip(SkipReason),
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum SkipReason {
    ResourceCap,
    TooLarge,
    /// `#S > 2^k`; `disagrees` tells whether the verdict was also wrong.
    AssumptionViolated {
        disagrees: bool,
    },
}

/// A checkable statement about formulas.
pub trait Claim: Sync {
    fn name(&self) -> String;
    fn check(&self, f: &Formula) -> Check;
}

#[derive(Clone, Copy, Debug)]
pub struct ClaimParams {
    pub k: usize,
    pub cap: usize,
}

impl Default for ClaimParams {
    fn default() -> Self {
        Self {
            k: 2,
            cap: crate::descriptor::DEFAULT_CAP,
        }
    }
}

/// Every registered id resolves to an implementation.
pub fn builtin_claim(id: ClaimId, p: ClaimParams) -> Box<dyn Claim> {
    match id {
        ClaimId::MergeSoundness => Box::new(MergeSoundness { cap: p.cap }),
        ClaimId::Indicator6 => Box::new(Indicator6 { cap: p.cap }),
        ClaimId::SweepDecides => Box::new(SweepDecides { k: p.k, cap: p.cap }),
    }
}

fn describe_count(c: usize) -> String {
    if c == 0 {
        "unsat".into()
    } else {
        format!("{c} solutions")
    }
}

fn skip_or_diverge(e: Error, expected: String) -> Check {
    match e {
        Error::ResourceCap { .. } => Check::Skip(SkipReason::ResourceCap),
        Error::TooLarge { .. } => Check::Skip(SkipReason::TooLarge),
        other => Check::Diverge {
            expected,
            got: format!("error: {other}"),
        },
    }
}

pub struct MergeSoundness {
    pub cap: usize,
}

impl Claim for MergeSoundness {
    fn name(&self) -> String {
        ClaimId::MergeSoundness.name().into()
    }

    fn check(&self, f: &Formula) -> Check {
        let truth = match brute_solutions(f) {
            Ok(s) => s,
            Err(_) => return Check::Skip(SkipReason::TooLarge),
        };
        let expected = describe_count(truth.count());
        let b = build(&sort_clauses(f), BuildConfig { cap: self.cap });
        match b.result {
            Err(e) => skip_or_diverge(e, expected),
            Ok(Outcome::Unsat { clause_index }) => {
                if truth.is_empty() {
                    Check::Agree
                } else {
                    Check::Diverge {
                        expected,
                        got: format!("unsat at clause {}", clause_index + 1),
                    }
                }
            }
            Ok(Outcome::Descriptor(d)) => {
                let img = match image_set(&d) {
                    Ok(s) => s,
                    Err(_) => return Check::Skip(SkipReason::TooLarge),
                };
                let same = img.len() == truth.count()
                    && img.iter().zip(&truth.solutions).all(|(a, b)| a == b);
                if same {
                    Check::Agree
                } else {
                    let extra = img.iter().find(|x| !truth.contains(x));
                    let missing = truth.solutions.iter().find(|x| !img.contains(x));
                    Check::Diverge {
                        expected,
                        got: format!(
                            "image of {} points (extra {:?}, missing {:?})",
                            img.len(),
                            extra.map(|x| x.to_bit_string()),
                            missing.map(|x| x.to_bit_string())
                        ),
                    }
                }
            }
        }
    }
}

pub struct Indicator6 {
    pub cap: usize,
}

impl Claim for Indicator6 {
    fn name(&self) -> String {
        ClaimId::Indicator6.name().into()
    }

    fn check(&self, f: &Formula) -> Check {
        let n = f.n();
        if n > 20 {
            return Check::Skip(SkipReason::TooLarge);
        }
        let fs = match factor_sequence(&sort_clauses(f), BuildConfig { cap: self.cap }) {
            Ok(fs) => fs,
            Err(e) => return skip_or_diverge(e, "factors".into()),
        };
        let mut wrong = 0u64;
        let mut first = None;
        for i in 0..1u64 << n {
            let x = crate::assign::Assignment::from_index(n, i);
            if fs.eval_ones(x.ones()) != f.eval(|v| x.get(v)) {
                wrong += 1;
                first.get_or_insert(x);
            }
        }
        if wrong == 0 {
            Check::Agree
        } else {
            Check::Diverge {
                expected: "product equals the CNF truth table".into(),
                got: format!(
                    "{wrong} points differ, first {}",
                    first.map(|x| x.to_bit_string()).unwrap_or_default()
                ),
            }
        }
    }
}

pub struct SweepDecides {
    pub k: usize,
    pub cap: usize,
}

impl Claim for SweepDecides {
    fn name(&self) -> String {
        ClaimId::SweepDecides.name().into()
    }

    fn check(&self, f: &Formula) -> Check {
        let count = match brute_solutions(f) {
            Ok(s) => s.count(),
            Err(_) => return Check::Skip(SkipReason::TooLarge),
        };
        let sat = count > 0;
        let expected = if sat { "SAT" } else { "UNSAT" }.to_string();
        let cfg = DecideConfig {
            build: BuildConfig { cap: self.cap },
            ..DecideConfig::default()
        };
        let v = match decide_sat_bounded(f, self.k, cfg) {
            Ok(v) => v,
            Err(e) => return skip_or_diverge(e, expected),
        };
        let got_sat = v.verdict == Verdict::Sat;
        if (count as u128) > 1u128 << self.k.min(127) {
            return Check::Skip(SkipReason::AssumptionViolated {
                disagrees: got_sat != sat,
            });
        }
        if got_sat == sat {
            Check::Agree
        } else {
            Check::Diverge {
                expected,
                got: if got_sat { "SAT" } else { "UNSAT" }.into(),
            }
        }
    }
}

/// Zeller's ddmin followed by a single-removal pass, so the result is
/// 1-minimal with respect to `test`.
pub fn ddmin<T: Clone>(items: &[T], test: &mut dyn FnMut(&[T]) -> bool) -> Vec<T> {
    let mut cur: Vec<T> = items.to_vec();
    let mut parts = 2usize;
    while cur.len() >= 2 {
        let chunks = split(&cur, parts);
        let mut reduced = false;
        for c in &chunks {
            if test(c) {
                cur = c.clone();
                parts = 2;
                reduced = true;
                break;
            }
        }
        if !reduced && chunks.len() > 2 {
            for i in 0..chunks.len() {
                let comp: Vec<T> = chunks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .flat_map(|(_, c)| c.iter().cloned())
                    .collect();
                if test(&comp) {
                    cur = comp;
                    parts = (parts - 1).max(2);
                    reduced = true;
                    break;
                }
            }
        }
        if !reduced {
            if parts >= cur.len() {
                break;
            }
            parts = (parts * 2).min(cur.len());
        }
    }
    loop {
        let mut changed = false;
        for i in 0..cur.len() {
            let mut shorter = cur.clone();
            shorter.remove(i);
            if test(&shorter) {
                cur = shorter;
                changed = true;
                break;
            }
        }
        if !changed {
            return cur;
        }
    }
}

fn split<T: Clone>(v: &[T], parts: usize) -> Vec<Vec<T>> {
    let parts = parts.min(v.len()).max(1);
    let base = v.len() / parts;
    let rem = v.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for i in 0..parts {
        let end = start + base + usize::from(i < rem);
        out.push(v[start..end].to_vec());
        start = end;
    }
    out
}

/// The clause subset as a formula with its variables renumbered.
fn sub_formula(n: usize, clauses: &[Clause3]) -> Formula {
    Formula::new(n, clauses.to_vec())
        .expect("subset of a valid formula")
        .compact()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FalsificationReport {
    pub claim: String,
    pub instance_index: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// DIMACS text.
    pub instance: String,
    pub expected: String,
    pub got: String,
    /// DIMACS text of the clause-minimal reproducer.
    pub minimized: String,
    pub minimized_m: usize,
    pub minimized_expected: String,
    pub minimized_got: String,
    /// The reproducer still diverges and no single removal does.
    pub one_minimal: bool,
}

/// Shrinks a divergent formula and re-verifies 1-minimality.
pub fn minimize(claim: &dyn Claim, f: &Formula) -> (Formula, bool) {
    let n = f.n();
    let mut test =
        |cs: &[Clause3]| matches!(claim.check(&sub_formula(n, cs)), Check::Diverge { .. });
    let min = ddmin(f.clauses(), &mut test);
    let reproduces = test(&min);
    let minimal = reproduces
        && (0..min.len()).all(|i| {
            let mut s = min.clone();
            s.remove(i);
            !test(&s)
        });
    (sub_formula(n, &min), minimal)
}

/// Seeded random instances.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub n: usize,
    pub m: usize,
    pub count: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn with_ratio(n: usize, ratio: f64, count: usize, seed: u64) -> Self {
        Self {
            n,
            m: clauses_for_ratio(n, ratio),
            count,
            seed,
        }
    }
}

/// Seed of instance `i` derived from the run seed (splitmix64).
pub fn instance_seed(seed: u64, i: usize) -> u64 {
    let mut z = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize)]
pub struct ClaimStats {
    pub claim: String,
    pub checked: usize,
    pub agree: usize,
    pub diverge: usize,
    pub skipped_cap: usize,
    pub skipped_too_large: usize,
    pub assumption_violated: usize,
    /// Assumption violated and the verdict was also wrong.
    pub assumption_violated_disagreeing: usize,
}

#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize)]
pub struct FalsifyRun {
    pub stats: Vec<ClaimStats>,
    pub reports: Vec<FalsificationReport>,
}

/// An instance to check, labelled for reporting.
#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub formula: Formula,
}

pub fn generate(cfg: &GenConfig) -> crate::error::Result<Vec<Instance>> {
    (0..cfg.count)
        .map(|i| {
            let seed = instance_seed(cfg.seed, i);
            Ok(Instance {
                index: i,
                seed,
                formula: random_formula(cfg.n, cfg.m, seed)?,
            })
        })
        .collect()
}

/// Checks every claim on every instance in parallel; reports come back
/// ordered by instance index, then claim order.
pub fn falsify(claims: &[&dyn Claim], instances: &[Instance]) -> FalsifyRun {
    let per_instance: Vec<Vec<(Check, Option<FalsificationReport>)>> = instances
        .par_iter()
        .map(|inst| {
            claims
                .iter()
                .map(|claim| {
                    let chk = claim.check(&inst.formula);
                    let report = match &chk {
                        Check::Diverge { expected, got } => {
                            let (min, one_minimal) = minimize(*claim, &inst.formula);
                            let (me, mg) = match claim.check(&min) {
                                Check::Diverge { expected, got } => (expected, got),
                                _ => (String::new(), String::new()),
                            };
                            Some(FalsificationReport {
                                claim: claim.name(),
                                instance_index: inst.index,
                                seed: inst.seed,
                                n: inst.formula.n(),
                                m: inst.formula.m(),
                                instance: inst.formula.to_dimacs(),
                                expected: expected.clone(),
                                got: got.clone(),
                                minimized: min.to_dimacs(),
                                minimized_m: min.m(),
                                minimized_expected: me,
                                minimized_got: mg,
                                one_minimal,
                            })
                        }
                        _ => None,
                    };
                    (chk, report)
                })
                .collect()
        })
        .collect();

    let mut run = FalsifyRun {
        stats: claims
            .iter()
            .map(|c| ClaimStats {
                claim: c.name(),
                ..ClaimStats::default()
            })
            .collect(),
        reports: Vec::new(),
    };
    for row in per_instance {
        for (ci, (chk, report)) in row.into_iter().enumerate() {
            let s = &mut run.stats[ci];
            s.checked += 1;
            match chk {
                Check::Agree => s.agree += 1,
                Check::Diverge { .. } => s.diverge += 1,
                Check::Skip(SkipReason::ResourceCap) => s.skipped_cap += 1,
                Check::Skip(SkipReason::TooLarge) => s.skipped_too_large += 1,
                Check::Skip(SkipReason::AssumptionViolated { disagrees }) => {
                    s.assumption_violated += 1;
                    if disagrees {
                        s.assumption_violated_disagreeing += 1;
                    }
                }
            }
            run.reports.extend(report);
        }
    }
    run
}

/// Writes `reports.jsonl` plus one original and one minimized DIMACS file
/// per report into `dir`.
pub fn write_reports(dir: &Path, reports: &[FalsificationReport]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut jl = std::fs::File::create(dir.join("reports.jsonl"))?;
    for r in reports {
        writeln!(
            jl,
            "{}",
            serde_json::to_string(r).expect("report serializes")
        )?;
        let stem = format!("{:05}-{}", r.instance_index, r.claim);
        std::fs::write(dir.join(format!("{stem}.cnf")), &r.instance)?;
        std::fs::write(dir.join(format!("{stem}-min.cnf")), &r.minimized)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_exhaustive() {
        for id in ClaimId::ALL {
            assert_eq!(builtin_claim(id, ClaimParams::default()).name(), id.name());
            assert_eq!(ClaimId::parse(id.name()), Some(id));
        }
    }

    #[test]
    fn ddmin_finds_pair() {
        let items: Vec<u32> = (0..20).collect();
        let mut test = |s: &[u32]| s.contains(&3) && s.contains(&17);
        let m = ddmin(&items, &mut test);
        assert_eq!(m, vec![3, 17]);
    }

    #[test]
    fn ddmin_empty_reproducer() {
        let items = vec![1, 2, 3];
        let mut test = |_: &[i32]| true;
        assert!(ddmin(&items, &mut test).is_empty());
    }

    #[test]
    fn split_is_even() {
        let v: Vec<usize> = (0..7).collect();
        let s = split(&v, 3);
        assert_eq!(s, vec![vec![0, 1, 2], vec![3, 4], vec![5, 6]]);
    }
}
