use anf_sat_core::indicator::Factor;
use anf_sat_core::*;
use num_bigint::BigInt;

fn p(s: &str) -> AnfPoly {
    s.parse().unwrap()
}

fn desc(hs: &[&str]) -> Descriptor {
    Descriptor::new(hs.iter().map(|s| p(s)).collect()).unwrap()
}

fn clause(l: [i64; 3]) -> Clause3 {
    Clause3::from_dimacs(l).unwrap()
}

fn bits(s: &SolutionSet) -> Vec<String> {
    s.solutions.iter().map(|x| x.to_bit_string()).collect()
}

fn mat(n: usize, rows: &[&str]) -> SMatrix {
    let rows = rows
        .iter()
        .map(|r| r.chars().map(|c| Cell::from_char(c).unwrap()).collect())
        .collect();
    SMatrix::over(n, rows).unwrap()
}

const SIX_VAR: [[i64; 3]; 17] = [
    [6, 2, 1],
    [6, 3, -2],
    [-6, -5, 1],
    [-6, -4, 1],
    [-6, -3, -1],
    [-6, 3, -2],
    [5, 4, 1],
    [5, -4, -1],
    [5, -3, -1],
    [-5, 2, -1],
    [-5, 4, -1],
    [-5, 3, -1],
    [4, -2, 1],
    [-4, -2, 1],
    [-4, -3, -2],
    [3, 2, -1],
    [-3, 2, -1],
];

fn six_var(drop_thirteenth: bool) -> Formula {
    let cs: Vec<[i64; 3]> = SIX_VAR
        .iter()
        .enumerate()
        .filter(|(k, _)| !(drop_thirteenth && *k == 12))
        .map(|(_, c)| *c)
        .collect();
    Formula::from_dimacs_clauses(6, &cs).unwrap()
}

fn eight_clause() -> Formula {
    Formula::from_dimacs_clauses(
        3,
        &[
            [1, -2, -3],
            [1, 2, -3],
            [-1, -2, -3],
            [-1, 2, -3],
            [1, -2, 3],
            [1, 2, 3],
            [-1, -2, 3],
            [-1, 2, 3],
        ],
    )
    .unwrap()
}

#[test]
fn clause_table_all_eight_polarities() {
    let table = [
        ([1, 2, 3], "(a1+1)(a2+1)(a3+1) + a3"),
        ([1, 2, -3], "(a1+1)(a2+1)a3 + a3"),
        ([1, -2, 3], "(a1+1)a2(a3+1) + a3"),
        ([1, -2, -3], "(a1+1)a2 a3 + a3"),
        ([-1, 2, 3], "a1(a2+1)(a3+1) + a3"),
        ([-1, 2, -3], "a1(a2+1)a3 + a3"),
        ([-1, -2, 3], "a1 a2 (a3+1) + a3"),
        ([-1, -2, -3], "a1 a2 a3 + a3"),
    ];
    for (lits, h3) in table {
        let c = clause(lits);
        let d = clause_descriptor(&c, 3);
        assert_eq!(d, desc(&["a1", "a2", h3]), "{lits:?}");
        let img = image_set(&d).unwrap();
        assert_eq!(img.len(), 7);
        assert!(img.iter().all(|x| c.eval(|v| x.get(v))));
    }
}

#[test]
fn single_clause_descriptor_image() {
    let d = clause_descriptor(&clause([-1, -2, -3]), 3);
    let m = image(&d).unwrap();
    assert_eq!(m.rows().len(), 7);
    assert!(!m
        .expand()
        .contains(&Assignment::from_bits(&[true, true, true])));
    let fixed = list_solutions(&d, Caps::default());
    assert_eq!(fixed.count(), 7);
    // H(1,1,1) = (1,1,0)
    let x = Assignment::from_bits(&[true, true, true]);
    assert_eq!(d.get(2).eval(&x).unwrap(), false);
}

#[test]
fn two_clause_merge() {
    let f = Formula::from_dimacs_clauses(4, &[[1, 2, -3], [-2, 3, -4]]).unwrap();
    let b = build(&sort_clauses(&f), BuildConfig::default());
    let Ok(Outcome::Descriptor(h)) = b.result else {
        panic!("expected a descriptor")
    };
    assert_eq!(
        h,
        desc(&["a1", "a2", "(a1+1)(a2+1)a3 + a3", "a2(a3+1)a4 + a4"])
    );
    assert_eq!(image(&h).unwrap().rows().len(), 12);
    assert_eq!(brute_count(&f), 12);
}

fn brute_count(f: &Formula) -> usize {
    oracle::brute_solutions(f).unwrap().count()
}

#[test]
fn composed_cell_of_two_clause_merge() {
    let f3 = p("(a1+1)(a2+1)a3 + a3");
    let g4 = p("a2 a4 + a4").add(&p("a2 a4").mul(&f3));
    assert_eq!(g4, p("a2 a3 a4 + a2 a4 + a4"));
    assert_eq!(g4.len(), 3);
}

#[test]
fn nearest_line_example() {
    // Image rows 001 001 011 011 100 101 111 111, merged with x1 ∨ x2 ∨ ¬x3.
    let f = desc(&["a1", "a2", "1 + a1 + a1 a2 + a1 a3 + a1 a2 a3"]);
    let c = clause([1, 2, -3]);
    let g3 = clause_descriptor(&c, 3).get(2).clone();
    assert_eq!(g3, p("a1 a3 + a2 a3 + a1 a2 a3"));
    let comp = f.get(2).add(&{
        let mut prod = AnfPoly::one();
        for v in 0..2 {
            prod = prod.mul(&f.get(v).add_one());
        }
        prod.mul(f.get(2))
    });
    let (_, gstar) = merge_poly(f.get(2), &comp, 2);
    assert!(!gstar.is_zero());
    assert!(gstar.max_var().unwrap() < 2);
    let Merged::Descriptor(h) = merge(&f, &c, 1 << 20).unwrap() else {
        panic!("satisfiable")
    };
    let img: Vec<String> = image_set(&h)
        .unwrap()
        .iter()
        .map(|x| x.to_bit_string())
        .collect();
    assert_eq!(img, ["011", "100", "101", "111"]);
}

#[test]
fn eight_clause_progression() {
    let f = eight_clause();
    let sorted = sort_clauses(&f);
    assert_eq!(sorted.witness(), &[0, 1, 2, 3, 4, 5, 6, 7]);
    let table: [[&str; 3]; 7] = [
        ["a1", "a2", "(a1+1) a2 a3 + a3"],
        ["a1", "a2", "a1 a3"],
        ["a1", "a2", "a1 a2 a3 + a1 a3"],
        ["a1", "a2", "0"],
        ["a1", "a1 a2", "0"],
        ["1", "a2", "0"],
        ["1", "0", "0"],
    ];
    let mut h = Descriptor::identity(3);
    for (k, row) in table.iter().enumerate() {
        let Merged::Descriptor(next) = merge(&h, &f.clauses()[k], 1 << 20).unwrap() else {
            panic!("step {} must be satisfiable", k + 1)
        };
        assert_eq!(next, desc(row), "step {}", k + 1);
        assert_eq!(image_set(&next).unwrap().len(), 7 - k);
        h = next;
    }
    assert_eq!(merge(&h, &f.clauses()[7], 1 << 20).unwrap(), Merged::Unsat);
    let b = build(&sorted, BuildConfig::default());
    assert!(matches!(b.result, Ok(Outcome::Unsat { clause_index: 7 })));
    assert_eq!(brute_count(&f), 0);
}

#[test]
fn eight_clause_subproblem() {
    let s = sort_clauses(&eight_clause());
    let sub = subproblem(&s, &[0, 1].into_iter().collect());
    assert_eq!(sub.m(), 2);
    let b = build(&sub, BuildConfig::default());
    let Ok(Outcome::Descriptor(h)) = b.result else {
        panic!()
    };
    assert_eq!(h.get(2), &p("a1 a3"));
    let csv = descriptor::profile_csv(&build(&s, BuildConfig::default()).trace);
    let rows: Vec<&str> = csv
        .lines()
        .skip(2)
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(csv.lines().last(), Some("# end unsat clause=8"));
    assert_eq!(rows.len(), 8);
    assert!(rows
        .iter()
        .all(|r| r.split(',').nth(3).unwrap().parse::<usize>().unwrap() <= 8));
}

fn factor_of(fs: &FactorSequence, t: usize) -> &Factor {
    &fs.factors[t - 1]
}

#[test]
fn six_variable_sub_descriptors() {
    let fs = factor_sequence(&sort_clauses(&six_var(false)), BuildConfig::default()).unwrap();
    let plus = [
        "x1",
        "x2",
        "x1 + x3 + x1 x2 + x1 x3 + x1 x2 x3",
        "x2 + x4 + x1 x2 + x2 x4 + x1 x2 x4",
        "1 + x1 + x4 + x1 x3 + x1 x5 + x4 x5 + x1 x3 x4 + x1 x3 x5 + x1 x3 x4 x5",
        "1 + x1 + x1 x2 + x1 x6 + x2 x3 + x1 x2 x6 + x2 x3 x6",
    ];
    let minus = [
        "x1",
        "x2",
        "x3 + x1 x3 + x1 x2 x3",
        "x4 + x2 x4 + x1 x2 x4 + x1 x2 x3 x4",
        "x5 + x1 x5 + x1 x2 x3 x4 x5",
        "x6 + x5 x6 + x4 x6 + x4 x5 x6 + x2 x6 + x2 x5 x6 + x2 x4 x6 + x2 x4 x5 x6 + x2 x3 x6 + \
         x2 x3 x5 x6 + x2 x3 x4 x6 + x2 x3 x4 x5 x6 + x1 x5 x6 + x1 x4 x6 + x1 x4 x5 x6 + x1 x3 x6 + \
         x1 x2 x5 x6 + x1 x2 x4 x6 + x1 x2 x4 x5 x6 + x1 x2 x3 x5 x6 + x1 x2 x3 x4 x6 + x1 x2 x3 x4 x5 x6",
    ];
    for t in 1..=6 {
        let f = factor_of(&fs, t);
        // Variables with no clause of that sign keep the identity cell.
        let hp = f.h_plus().cloned().unwrap_or_else(|| AnfPoly::var(t - 1));
        let hm = f.h_minus().cloned().unwrap_or_else(|| AnfPoly::var(t - 1));
        assert_eq!(hp, p(plus[t - 1]), "plus t={t}");
        assert_eq!(hm, p(minus[t - 1]), "minus t={t}");
    }
}

#[test]
fn six_variable_parity_and_solution() {
    let phi = six_var(false);
    let fs = factor_sequence(&sort_clauses(&phi), BuildConfig::default()).unwrap();
    let gf2 = oracle::expand_product(&fs, Arith::Gf2).unwrap();
    assert_eq!(gf2, Expanded::Gf2(AnfPoly::zero()));
    let int = oracle::expand_product(&fs, Arith::Int).unwrap();
    assert_eq!(int.reduce_mod2(), AnfPoly::zero());

    let phi2 = six_var(true);
    let fs2 = factor_sequence(&sort_clauses(&phi2), BuildConfig::default()).unwrap();
    let expect = p("(1+x1) x2 x3 (1+x4) x5 (1+x6)");
    assert_eq!(
        oracle::expand_product(&fs2, Arith::Gf2).unwrap(),
        Expanded::Gf2(expect.clone())
    );
    assert_eq!(
        oracle::expand_product(&fs2, Arith::Int)
            .unwrap()
            .reduce_mod2(),
        expect
    );
    let sols = oracle::brute_solutions(&phi2).unwrap();
    assert_eq!(bits(&sols), ["011010"]);
    assert_eq!(indicator_from_solutions(&sols), expect);
}

#[test]
fn six_variable_integer_product() {
    let fs = factor_sequence(&sort_clauses(&six_var(false)), BuildConfig::default()).unwrap();
    let Expanded::Int(q) = oracle::expand_product(&fs, Arith::Int).unwrap() else {
        panic!()
    };
    // Terms shared with the printed display.
    assert_eq!(q.coefficient(&Monomial::var(0)), BigInt::from(2));
    assert_eq!(
        q.coefficient(&Monomial::from_vars([0, 1])),
        BigInt::from(16)
    );
    assert_eq!(
        q.coefficient(&Monomial::from_vars([0, 1, 2])),
        BigInt::from(242)
    );
    assert_eq!(q.len(), 44);
    let total: BigInt = q.terms().map(|(_, c)| c.clone()).sum();
    assert_eq!(total, BigInt::from(1_247_400));
}

#[test]
fn six_variable_sweep() {
    let phi = six_var(false);
    let fs = factor_sequence(&sort_clauses(&phi), BuildConfig::default()).unwrap();
    let v = sweep(&fs, 0, Arith::Gf2, 1 << 20).unwrap();
    assert_eq!(v.verdict, Verdict::UnsatUnderAssumption);
    let phi2 = six_var(true);
    let fs2 = factor_sequence(&sort_clauses(&phi2), BuildConfig::default()).unwrap();
    let v = sweep(&fs2, 0, Arith::Gf2, 1 << 20).unwrap();
    assert_eq!(v.verdict, Verdict::Sat);
    assert_eq!(v.found.unwrap().mask, vec![1, 2, 3, 4, 5, 6]);
}

#[test]
fn six_variable_split_at_three() {
    let s = sort_clauses(&six_var(false));
    let (plus, minus) = split_plus_minus(&s, 2);
    assert_eq!(
        plus.clauses()
            .iter()
            .map(|c| c.to_dimacs())
            .collect::<Vec<_>>(),
        [[-1, 2, 3]]
    );
    assert_eq!(
        minus
            .clauses()
            .iter()
            .map(|c| c.to_dimacs())
            .collect::<Vec<_>>(),
        [[-1, 2, -3]]
    );
    let st = static_sets(&s);
    assert_eq!((st.m_plus[2], st.m_minus[2]), (1, 1));
    let total: usize = (0..6).map(|t| st.m_plus[t] + st.m_minus[t]).sum();
    assert_eq!(total, 17);
}

#[test]
fn six_variable_relabel_is_identity_on_most_frequent() {
    let (_, perm) = relabel_by_frequency(&six_var(false));
    // x1 occurs in 14 of the 17 clauses
    assert_eq!(perm[0], 0);
}

#[test]
fn static_sets_of_two_clause_formula() {
    let f = Formula::from_dimacs_clauses(4, &[[1, 2, -3], [-2, 3, -4]]).unwrap();
    let st = static_sets(&sort_clauses(&f));
    assert_eq!(st.cl[2], vec![0]);
    assert_eq!(st.v[2], [0, 1, 2].into_iter().collect());
    assert_eq!(st.cl[3], vec![1]);
    assert_eq!(st.v[3], [1, 2, 3].into_iter().collect());
    assert!(st.cl[0].is_empty() && st.cl[1].is_empty());
}

#[test]
fn windowed_static_sets() {
    let n = 7;
    let cs: Vec<[i64; 3]> = (3..=n as i64).map(|i| [i - 2, i - 1, i]).collect();
    let st = static_sets(&sort_clauses(
        &Formula::from_dimacs_clauses(n, &cs).unwrap(),
    ));
    for i in 2..n {
        assert_eq!(st.v[i], [i - 2, i - 1, i].into_iter().collect());
    }
}

#[test]
fn meet_of_two_clause_matrices() {
    let s1 = image(&clause_descriptor(&clause([1, 2, -3]), 3)).unwrap();
    let s2 = SMatrix::new(
        vec![1, 2, 3],
        image(&clause_descriptor(&clause([-1, 2, -3]), 3))
            .unwrap()
            .rows()
            .to_vec(),
    )
    .unwrap();
    assert_eq!(s1.rows().len(), 7);
    assert_eq!(s2.rows().len(), 7);
    let m = s1.meet(&s2);
    assert_eq!(m.support(), &[0, 1, 2, 3]);
    assert_eq!(m.rows().len(), 12);
    let f = Formula::from_dimacs_clauses(4, &[[1, 2, -3], [-2, 3, -4]]).unwrap();
    let truth = oracle::brute_solutions(&f).unwrap();
    assert_eq!(m.expand().into_iter().collect::<Vec<_>>(), truth.solutions);
}

#[test]
fn descriptor_from_clause_matrix() {
    let m = image(&clause_descriptor(&clause([-1, -2, -3]), 3)).unwrap();
    assert_eq!(
        descriptor_from_smatrix(&m).unwrap(),
        desc(&["a1", "a2", "a1 a2 a3 + a3"])
    );
    assert_eq!(
        descriptor_from_smatrix(&mat(3, &["101"])).unwrap(),
        desc(&["1", "0", "1"])
    );
    assert_eq!(
        descriptor_from_smatrix(&mat(3, &["..."])).unwrap(),
        Descriptor::identity(3)
    );
    assert_eq!(
        descriptor_from_smatrix(&SMatrix::empty(vec![0, 1])),
        Err(Error::EmptySet)
    );
}

#[test]
fn solution_tree_examples() {
    let h = clause_descriptor(&clause([-1, -2, -3]), 3);
    let s = list_solutions(&h, Caps::default());
    assert_eq!(s.count(), 7);
    assert!(!bits(&s).contains(&"111".to_string()));
    let k = Descriptor::constant(&Assignment::from_bits(&[true, false, true]));
    assert_eq!(bits(&list_solutions(&k, Caps::default())), ["101"]);
}

#[test]
fn intersect_two_clause_descriptors() {
    let a = clause_descriptor(&clause([1, 2, -3]), 4);
    let b = clause_descriptor(&clause([-2, 3, -4]), 4);
    let s = intersect_images(&[a.clone(), b], Caps::default()).unwrap();
    assert_eq!(s.count(), 12);
    assert_eq!(
        intersect_images(&[a.clone(), a.clone()], Caps::default())
            .unwrap()
            .solutions,
        list_solutions(&a, Caps::default()).solutions
    );
    assert_eq!(
        intersect_images(&[a.clone(), Descriptor::identity(4)], Caps::default())
            .unwrap()
            .solutions,
        list_solutions(&a, Caps::default()).solutions
    );
}

#[test]
fn indicator_forms_agree_on_examples() {
    let h = clause_descriptor(&clause([-1, -2, -3]), 3);
    let ind = indicator_from_descriptor(&h, 1 << 10).unwrap();
    assert_eq!(ind, p("1 + x1 x2 x3"));
    let x = Assignment::from_bits(&[false, true, true, false, true, false]);
    let one = indicator_from_descriptor(&Descriptor::constant(&x), 1 << 10).unwrap();
    assert_eq!(one, p("(1+x1) x2 x3 (1+x4) x5 (1+x6)"));
    // Two points differing only in x2 collapse that coordinate.
    let pair = SolutionSet::from_sorted(
        3,
        vec![
            Assignment::from_bits(&[true, false, true]),
            Assignment::from_bits(&[true, true, true]),
        ],
    );
    assert_eq!(indicator_from_solutions(&pair), p("x1 x3"));
    assert_eq!(
        indicator_from_solutions(&SolutionSet::from_sorted(3, vec![])),
        AnfPoly::zero()
    );
}

#[test]
fn step_two_polynomial_coefficients() {
    let g: IntPoly = "1 + x1 + 3 x1 x2 + 7 x1 x2 x3".parse().unwrap();
    assert_eq!(coeff::clause_coeffs(&Expanded::Int(g)).len(), 4);
    assert_eq!(
        coeff::clause_coeffs(&Expanded::Gf2(AnfPoly::one())).len(),
        1
    );
}
