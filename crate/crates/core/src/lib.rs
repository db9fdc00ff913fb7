//! Descriptor functions for 3-CNF satisfiability.
//!
//! A formula's solution set is described by a triangular vector of GF(2)
//! polynomials built clause by clause. From it the crate derives solution
//! listings, indicator polynomials and coefficient-based satisfiability
//! tests, and checks each of these against a brute-force oracle.

pub mod anf;
pub mod assign;
pub mod cnf;
pub mod coeff;
pub mod descriptor;
pub mod error;
pub mod falsify;
pub mod indicator;
pub mod oracle;
pub mod smatrix;
pub mod solutions;

pub use anf::{int_lift, AnfPoly, IntPoly, Monomial};
pub use assign::Assignment;
pub use cnf::{
    parse_dimacs, relabel_by_frequency, sort_clauses, split_plus_minus, static_sets, subproblem,
    Clause3, Formula, Literal, SortedFormula, StaticSets,
};
pub use coeff::{coefficient, decide_sat_bounded, sweep, CoeffEngine, SweepVerdict, Verdict};
pub use descriptor::{
    build, build_clauses, clause_descriptor, merge, merge_poly, BuildConfig, Descriptor,
    MergeTrace, Merged, Outcome,
};
pub use error::{Error, Result};
pub use indicator::{
    factor_sequence, indicator_from_clauses, indicator_from_descriptor, indicator_from_solutions,
    Arith, Expanded, FactorSequence,
};
pub use smatrix::{descriptor_from_smatrix, image, image_set, Cell, SMatrix};
pub use solutions::{count_solutions, intersect_images, list_solutions, Caps, SolutionSet};
