//! Ready-made problems used by tests, benchmarks and documentation
//! examples: the bitwise loop grammar with the xor example set, a
//! kitchen-sink imperative grammar exercising every operator, small linear
//! arithmetic grammars for the counterexample-guided solver, and regex
//! problem assembly.

use super::{
    build_impv_semantics, build_regex_semantics, regex_example_input, BuiltinSemantics, Example,
    ExampleOutput, Problem, RegexParams, Specification, Transforms,
};
use crate::interp::{Valuation, Value};
use crate::lang::{Formula, Grammar, ProdId, Production, Sort, Term};

fn prod(id: ProdId, lhs: &str, op: &str, rhs: &[&str], g: &[(&str, Sort)]) -> Production {
    let sort_of = |nt: &str| {
        g.iter()
            .find(|(n, _)| *n == nt)
            .map(|(_, s)| s.clone())
            .expect("nonterminal declared")
    };
    Production {
        id,
        lhs: lhs.into(),
        op: op.into(),
        rhs: rhs.iter().map(|s| s.to_string()).collect(),
        lhs_sort: sort_of(lhs),
        rhs_sorts: rhs.iter().map(|s| sort_of(s)).collect(),
    }
}

fn grammar(nts: &[(&str, Sort)], start: &str, prods: &[(ProdId, &str, &str, &[&str])]) -> Grammar {
    Grammar {
        nonterminals: nts.iter().map(|(n, s)| (n.to_string(), s.clone())).collect(),
        start: start.into(),
        productions: prods
            .iter()
            .map(|(id, lhs, op, rhs)| prod(*id, lhs, op, rhs, nts))
            .collect(),
    }
}

/// Assemble a problem from an imperative subgrammar using the builtin
/// big-step semantics.
pub fn impv_problem(g: Grammar, input: &Sort, spec: Specification) -> Problem {
    let semantics = build_impv_semantics(&g, input).expect("grammar is an imperative subgrammar");
    let signatures = Problem::standard_signatures(&g, input, |nt| {
        g.nonterminal_sort(nt).cloned().expect("declared")
    });
    Problem {
        name: None,
        grammar: g,
        semantics,
        signatures,
        spec,
        builtin: Some(BuiltinSemantics::Impv),
        transforms: Transforms::default(),
    }
}

/// The shared state of the bitwise loop grammar: two 32-bit variables.
pub fn xy_state() -> Sort {
    Sort::State(vec![
        ("x".into(), Sort::BitVec(32)),
        ("y".into(), Sort::BitVec(32)),
    ])
}

/// An input state for [`xy_state`].
pub fn xy_input(x: u64, y: u64) -> Valuation {
    Valuation::new(
        &xy_state(),
        vec![
            ("x".into(), Value::bitvec(x, 32)),
            ("y".into(), Value::bitvec(y, 32)),
        ],
    )
    .unwrap()
}

/// The nine-production loop grammar over `and`/`or` assignments:
///
/// ```text
/// Start -> while(B, S)            (1)
/// B     -> bvult(E, E)            (2)
/// S     -> seq(S, S)              (3)
///        | assign_x(E)            (4)
///        | assign_y(E)            (5)
/// E     -> x | y                  (6, 7)
///        | bvand(E, E)            (8)
///        | bvor(E, E)             (9)
/// ```
pub fn loop_or_grammar() -> Grammar {
    let st = xy_state();
    let nts = [
        ("Start", st.clone()),
        ("B", Sort::Bool),
        ("S", st),
        ("E", Sort::BitVec(32)),
    ];
    grammar(
        &nts,
        "Start",
        &[
            (1, "Start", "while", &["B", "S"]),
            (2, "B", "bvult", &["E", "E"]),
            (3, "S", "seq", &["S", "S"]),
            (4, "S", "assign_x", &["E"]),
            (5, "S", "assign_y", &["E"]),
            (6, "E", "x", &[]),
            (7, "E", "y", &[]),
            (8, "E", "bvand", &["E", "E"]),
            (9, "E", "bvor", &["E", "E"]),
        ],
    )
}

/// The xor example set: pairs whose bitwise xor the output variable `x`
/// must hold.
pub fn xor_examples() -> Vec<Example> {
    [(6u64, 9u64, 15u64), (44, 247, 219), (14, 15, 1)]
        .into_iter()
        .map(|(x, y, out)| Example {
            input: xy_input(x, y),
            output: ExampleOutput::Partial(vec![("x".into(), Value::bitvec(out, 32))]),
        })
        .collect()
}

/// The loop grammar against all three xor examples (unrealizable).
pub fn xor_problem() -> Problem {
    impv_problem(
        loop_or_grammar(),
        &xy_state(),
        Specification::Examples(xor_examples()),
    )
}

/// The loop grammar against only the first xor example (realizable).
pub fn xor_singleton_problem() -> Problem {
    impv_problem(
        loop_or_grammar(),
        &xy_state(),
        Specification::Examples(xor_examples().into_iter().take(1).collect()),
    )
}

/// The canonical solution of the singleton problem:
/// `while (x < y) { x := x | y }`.
pub fn xor_witness() -> Term {
    Term::new(
        1,
        vec![
            Term::new(2, vec![Term::leaf(6), Term::leaf(7)]),
            Term::new(4, vec![Term::new(9, vec![Term::leaf(6), Term::leaf(7)])]),
        ],
    )
}

/// State of the kitchen-sink grammar: two Ints, an 8-bit vector, an array.
pub fn kitchen_state() -> Sort {
    Sort::State(vec![
        ("x".into(), Sort::Int),
        ("y".into(), Sort::Int),
        ("u".into(), Sort::BitVec(8)),
        ("a".into(), Sort::IntArray),
    ])
}

/// A 28-production imperative grammar that uses every operator the
/// imperative language offers: loops, branching at statement and
/// expression level, array store/select, and both Int and BitVec
/// arithmetic. Used to fuzz the interpreters.
pub fn kitchen_grammar() -> Grammar {
    let st = kitchen_state();
    let nts = [
        ("S", st),
        ("E", Sort::Int),
        ("C", Sort::BitVec(8)),
        ("B", Sort::Bool),
    ];
    grammar(
        &nts,
        "S",
        &[
            (1, "S", "while", &["B", "S"]),
            (2, "S", "seq", &["S", "S"]),
            (3, "S", "ite", &["B", "S", "S"]),
            (4, "S", "assign_x", &["E"]),
            (5, "S", "assign_y", &["E"]),
            (6, "S", "assign_u", &["C"]),
            (7, "S", "store_a", &["E", "E"]),
            (8, "E", "x", &[]),
            (9, "E", "y", &[]),
            (10, "E", "0", &[]),
            (11, "E", "1", &[]),
            (12, "E", "+", &["E", "E"]),
            (13, "E", "ite", &["B", "E", "E"]),
            (14, "E", "select_a", &["E"]),
            (15, "C", "u", &[]),
            (16, "C", "bv0", &[]),
            (17, "C", "bv1", &[]),
            (18, "C", "bvand", &["C", "C"]),
            (19, "C", "bvor", &["C", "C"]),
            (20, "C", "bvnot", &["C"]),
            (21, "C", "bvadd", &["C", "C"]),
            (22, "C", "ite", &["B", "C", "C"]),
            (23, "B", "true", &[]),
            (24, "B", "false", &[]),
            (25, "B", "not", &["B"]),
            (26, "B", "and", &["B", "B"]),
            (27, "B", "<", &["E", "E"]),
            (28, "B", "bvult", &["C", "C"]),
        ],
    )
}

/// A finite linear-arithmetic expression grammar whose language is exactly
/// `{x, y, 0, 1, x + 1, y + 1}`:
///
/// ```text
/// E -> x | y | 0 | 1 | +(L, R)    (1..5)
/// L -> x | y                      (6, 7)
/// R -> 1                          (8)
/// ```
pub fn lia_limited_grammar() -> Grammar {
    let nts = [("E", Sort::Int), ("L", Sort::Int), ("R", Sort::Int)];
    grammar(
        &nts,
        "E",
        &[
            (1, "E", "x", &[]),
            (2, "E", "y", &[]),
            (3, "E", "0", &[]),
            (4, "E", "1", &[]),
            (5, "E", "+", &["L", "R"]),
            (6, "L", "x", &[]),
            (7, "L", "y", &[]),
            (8, "R", "1", &[]),
        ],
    )
}

/// Input state of the linear arithmetic grammars.
pub fn lia_state() -> Sort {
    Sort::State(vec![("x".into(), Sort::Int), ("y".into(), Sort::Int)])
}

/// The limited grammar against a formula spec over inputs `x`, `y` and the
/// synthesized output `out`.
pub fn lia_limited_problem(formula: Formula) -> Problem {
    impv_problem(
        lia_limited_grammar(),
        &lia_state(),
        Specification::Formula {
            formula,
            verifiable: true,
        },
    )
}

/// `out > x /\ out > y`: unrealizable over the limited grammar.
pub fn lia_spec_gt_both() -> Formula {
    let out = Formula::var("out", Sort::Int);
    Formula::and_all(vec![
        Formula::lt(Formula::var("x", Sort::Int), out.clone()),
        Formula::lt(Formula::var("y", Sort::Int), out),
    ])
}

/// `out > x`: realizable over the limited grammar (by `x + 1`).
pub fn lia_spec_gt_x() -> Formula {
    Formula::lt(
        Formula::var("x", Sort::Int),
        Formula::var("out", Sort::Int),
    )
}

/// Assemble a regex problem over `alphabet` characters and strings of
/// length at most `max_len`, from (word, should-accept) pairs. Acceptance
/// of a word of length n is the matrix entry for the substring `[0, n)`.
pub fn regex_problem(alphabet: usize, max_len: usize, cases: &[(&[i64], bool)]) -> Problem {
    let params = RegexParams { alphabet, max_len };
    let (grammar, semantics, signatures) = build_regex_semantics(alphabet, max_len);
    let examples = cases
        .iter()
        .map(|(word, accept)| Example {
            input: regex_example_input(params, word),
            output: ExampleOutput::Partial(vec![(
                RegexParams::entry(0, word.len()),
                Value::Bool(*accept),
            )]),
        })
        .collect();
    Problem {
        name: None,
        grammar,
        semantics,
        signatures,
        spec: Specification::Examples(examples),
        builtin: Some(BuiltinSemantics::Regex(params)),
        transforms: Transforms::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{term_to_listing, validate_grammar};
    use crate::problem::{expression_grammar, subgrammar_of_impv};

    #[test]
    fn sample_grammars_validate() {
        for g in [loop_or_grammar(), kitchen_grammar(), lia_limited_grammar()] {
            let report = validate_grammar(&g);
            assert!(report.is_valid(), "{report:?}");
        }
    }

    #[test]
    fn sample_grammars_are_impv() {
        assert!(subgrammar_of_impv(&loop_or_grammar(), &xy_state()));
        assert!(subgrammar_of_impv(&kitchen_grammar(), &kitchen_state()));
        assert!(subgrammar_of_impv(&lia_limited_grammar(), &lia_state()));
        assert!(expression_grammar(&lia_limited_grammar(), &lia_state()));
        assert!(!expression_grammar(&loop_or_grammar(), &xy_state()));
    }

    #[test]
    fn witness_listing_is_frozen() {
        let listing = term_to_listing(&loop_or_grammar(), &xor_witness()).unwrap();
        assert_eq!(listing.ids, vec![1, 2, 6, 7, 4, 9, 6, 7]);
    }

    #[test]
    fn xor_problem_shape() {
        let p = xor_problem();
        assert_eq!(p.grammar.productions.len(), 9);
        assert_eq!(p.spec.examples().unwrap().len(), 3);
        assert_eq!(p.semantics.values().map(Vec::len).sum::<usize>(), 10);
        assert_eq!(
            p.start_input_sort(),
            Some(&xy_state()),
            "examples are states over x and y"
        );
    }

    #[test]
    fn regex_problem_marks_acceptance_entry() {
        let p = regex_problem(2, 3, &[(&[0, 1], true), (&[], false)]);
        let ex = p.spec.examples().unwrap();
        match &ex[0].output {
            ExampleOutput::Partial(c) => {
                assert_eq!(c[0].0, "m_0_2");
                assert_eq!(c[0].1, Value::Bool(true));
            }
            other => panic!("unexpected output {other:?}"),
        }
        match &ex[1].output {
            ExampleOutput::Partial(c) => assert_eq!(c[0].0, "m_0_0"),
            other => panic!("unexpected output {other:?}"),
        }
    }
}
