//! Indicator polynomials of solution sets and the per-variable factor
//! sequence built from the positive and negative sub-formulas.

use rayon::prelude::*;
use serde::Serialize;

use crate::anf::{int_lift, AnfPoly, IntPoly, Monomial};
use crate::cnf::{split_plus_minus, Clause3, Formula, SortedFormula};
use crate::descriptor::{build_clauses, BuildConfig, Descriptor, Outcome};
use crate::error::{Error, Result};
use crate::solutions::SolutionSet;

/// Coefficient arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub enum Arith {
    #[default]
    Gf2,
    Int,
}

impl std::str::FromStr for Arith {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gf2" => Ok(Arith::Gf2),
            "int" => Ok(Arith::Int),
            _ => Err(format!("unknown mode {s:?} (gf2|int)")),
        }
    }
}

/// A polynomial in one of the two arithmetics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expanded {
    Gf2(AnfPoly),
    Int(IntPoly),
}

impl Expanded {
    pub fn len(&self) -> usize {
        match self {
            Expanded::Gf2(p) => p.len(),
            Expanded::Int(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_text(&self) -> String {
        match self {
            Expanded::Gf2(p) => p.to_text('x'),
            Expanded::Int(p) => p.to_text('x'),
        }
    }

    pub fn reduce_mod2(&self) -> AnfPoly {
        match self {
            Expanded::Gf2(p) => p.clone(),
            Expanded::Int(p) => p.reduce_mod2(),
        }
    }
}

fn capped(len: usize, t: usize, cap: usize) -> Result<()> {
    if len > cap {
        Err(Error::ResourceCap { t: t + 1, len })
    } else {
        Ok(())
    }
}

/// `∏ (h_i + x_i + 1)`, with variables read in solution space.
pub fn indicator_from_descriptor(h: &Descriptor, cap: usize) -> Result<AnfPoly> {
    let mut acc = AnfPoly::one();
    for (i, hi) in h.h().iter().enumerate() {
        let factor = hi.add(&AnfPoly::var(i)).add_one();
        acc = acc.mul(&factor);
        capped(acc.len(), i, cap)?;
    }
    Ok(acc)
}

/// `1 + ∏ (x_v + x*_v + 1)`: the clause as a polynomial.
pub fn clause_factor(c: &Clause3) -> AnfPoly {
    let mut forb = AnfPoly::one();
    for (v, neg) in c.vars().into_iter().zip(c.forbidden()) {
        let lit = if neg {
            AnfPoly::var(v)
        } else {
            AnfPoly::var(v).add_one()
        };
        forb = forb.mul(&lit);
    }
    forb.add_one()
}

/// Product of the clause factors. In integer mode each factor's GF(2)
/// form is lifted to coefficients 1 before multiplying.
pub fn indicator_from_clauses(f: &Formula, mode: Arith, cap: usize) -> Result<Expanded> {
    match mode {
        Arith::Gf2 => {
            let mut acc = AnfPoly::one();
            for c in f.clauses() {
                acc = acc.mul(&clause_factor(c));
                capped(acc.len(), c.t(), cap)?;
            }
            Ok(Expanded::Gf2(acc))
        }
        Arith::Int => {
            let mut acc = IntPoly::one();
            for c in f.clauses() {
                acc = acc.mul(&int_lift(&clause_factor(c)));
                capped(acc.len(), c.t(), cap)?;
            }
            Ok(Expanded::Int(acc))
        }
    }
}

/// Σ over solutions of `∏ x_i^{s_i} (x_i + 1)^{s_i + 1}`, mod 2.
pub fn indicator_from_solutions(s: &SolutionSet) -> AnfPoly {
    let mut acc = AnfPoly::zero();
    for x in &s.solutions {
        acc = acc.add(&point_indicator(x.ones(), s.n));
    }
    acc
}

/// Indicator of the single point whose true coordinates are `ones`.
pub fn point_indicator(ones: &Monomial, n: usize) -> AnfPoly {
    let mut p = AnfPoly::one();
    for i in 0..n {
        let f = if ones.contains(i) {
            AnfPoly::var(i)
        } else {
            AnfPoly::var(i).add_one()
        };
        p = p.mul(&f);
    }
    p
}

/// The two sub-descriptor cells for one variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Factor {
    /// 0-based variable.
    pub t: usize,
    /// Descriptor of the clauses of Cl(x_t) positive in x_t, over
    /// `x_1 .. x_t`; `None` when there are none.
    pub plus: Option<Descriptor>,
    /// Same for the clauses negated in x_t.
    pub minus: Option<Descriptor>,
}

impl Factor {
    /// `h_{t,⊕}`, or `None` for an empty sub-problem.
    pub fn h_plus(&self) -> Option<&AnfPoly> {
        self.plus.as_ref().map(|d| d.get(self.t))
    }

    pub fn h_minus(&self) -> Option<&AnfPoly> {
        self.minus.as_ref().map(|d| d.get(self.t))
    }

    fn bracket(&self, h: Option<&AnfPoly>) -> AnfPoly {
        match h {
            Some(h) => h.add(&AnfPoly::var(self.t)).add_one(),
            None => AnfPoly::one(),
        }
    }

    /// `h_{t,⊕} + x_t + 1`, or 1.
    pub fn plus_bracket(&self) -> AnfPoly {
        self.bracket(self.h_plus())
    }

    pub fn minus_bracket(&self) -> AnfPoly {
        self.bracket(self.h_minus())
    }

    pub fn gf2(&self) -> AnfPoly {
        self.plus_bracket().mul(&self.minus_bracket())
    }

    /// Integer product of the two lifted brackets.
    pub fn int(&self) -> IntPoly {
        int_lift(&self.plus_bracket()).mul(&int_lift(&self.minus_bracket()))
    }

    pub fn expanded(&self, mode: Arith) -> Expanded {
        match mode {
            Arith::Gf2 => Expanded::Gf2(self.gf2()),
            Arith::Int => Expanded::Int(self.int()),
        }
    }
}

/// `g_1 .. g_n`, stored unexpanded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactorSequence {
    pub n: usize,
    pub factors: Vec<Factor>,
}

impl FactorSequence {
    /// Evaluates `∏ g_t` at a point, in GF(2).
    pub fn eval_ones(&self, ones: &Monomial) -> bool {
        self.factors.iter().all(|f| f.gf2().eval_ones(ones))
    }
}

/// Builds each sub-descriptor and checks its closed form:
/// `h_i = α_i` for `i < t`, and `h_t` restricted at `α_t = 1` (resp. 0) is
/// the constant 1 (resp. 0).
pub fn factor_sequence(f: &SortedFormula, cfg: BuildConfig) -> Result<FactorSequence> {
    let factors = (0..f.n())
        .into_par_iter()
        .map(|t| {
            let (plus, minus) = split_plus_minus(f, t);
            Ok(Factor {
                t,
                plus: sub_descriptor(&plus, t, true, cfg)?,
                minus: sub_descriptor(&minus, t, false, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FactorSequence { n: f.n(), factors })
}

fn sub_descriptor(
    part: &Formula,
    t: usize,
    positive: bool,
    cfg: BuildConfig,
) -> Result<Option<Descriptor>> {
    if part.m() == 0 {
        return Ok(None);
    }
    let name = if positive { "positive" } else { "negative" };
    let b = build_clauses(t + 1, part.clauses(), cfg);
    let d = match b.result? {
        Outcome::Descriptor(d) => d,
        // Any such sub-problem is satisfied by x_t = 1 (resp. 0).
        Outcome::Unsat { .. } => {
            return Err(Error::Property2Violation {
                t: t + 1,
                part: name,
            })
        }
    };
    for i in 0..t {
        if *d.get(i) != AnfPoly::var(i) {
            return Err(Error::Property2Violation {
                t: i + 1,
                part: name,
            });
        }
    }
    let ht = d.get(t);
    let closed = ht.restrict(t, positive);
    if closed != AnfPoly::constant(positive) {
        return Err(Error::Property2Violation {
            t: t + 1,
            part: name,
        });
    }
    Ok(Some(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::Assignment;

    #[test]
    fn clause_factor_truth_table() {
        let c = Clause3::from_dimacs([1, 2, -3]).unwrap();
        let p = clause_factor(&c);
        for i in 0..8 {
            let x = Assignment::from_index(3, i);
            assert_eq!(p.eval(&x).unwrap(), c.eval(|v| x.get(v)));
        }
        let expect: AnfPoly = "1 + (x1+1)(x2+1)x3".parse().unwrap();
        assert_eq!(p, expect);
    }

    #[test]
    fn empty_formula_indicator_is_one() {
        let f = Formula::empty(3);
        assert_eq!(
            indicator_from_clauses(&f, Arith::Gf2, 10).unwrap(),
            Expanded::Gf2(AnfPoly::one())
        );
    }

    #[test]
    fn identity_descriptor_indicator_is_one() {
        let p = indicator_from_descriptor(&Descriptor::identity(4), 10).unwrap();
        assert!(p.is_one());
    }
}
