//! Builtin regular-expression semantics over bounded-length strings.
//!
//! Strings are integer sequences (characters 0..alphabet-1) padded to a
//! fixed maximum length. A regex term denotes an upper-triangular boolean
//! matrix: entry `m_i_j` says whether the term matches the substring
//! `w[i..j)`. Concatenation is boolean matrix product; star unrolls through
//! a countdown variable `k` in the input state, with a dedicated rule for
//! the exhausted case (identity matrix). The countdown is reset to the
//! string length when descending into a starred subterm, so nested stars
//! unroll far enough.

use crate::interp::{Valuation, Value};
use crate::lang::{
    Formula, Grammar, ProdId, Production, RelArg, RelArgSort, RelationApp, SemanticRule, Sort,
    TermRef,
};
use crate::problem::sem_relation;
use std::collections::BTreeMap;

/// Parameters of a regex problem: alphabet size and maximum string length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegexParams {
    pub alphabet: usize,
    pub max_len: usize,
}

impl RegexParams {
    /// Name of the matrix entry for substring `[i, j)`.
    pub fn entry(i: usize, j: usize) -> String {
        format!("m_{i}_{j}")
    }

    /// All (i, j) with 0 <= i <= j <= max_len, row-major.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.max_len {
            for j in i..=self.max_len {
                out.push((i, j));
            }
        }
        out
    }

    /// Input state: characters `w0..`, the string length `len`, and the
    /// star countdown `k`.
    pub fn input_sort(&self) -> Sort {
        let mut fields: Vec<(String, Sort)> = (0..self.max_len)
            .map(|i| (format!("w{i}"), Sort::Int))
            .collect();
        fields.push(("len".into(), Sort::Int));
        fields.push(("k".into(), Sort::Int));
        Sort::State(fields)
    }

    /// Output state: one boolean per upper-triangular matrix entry.
    pub fn output_sort(&self) -> Sort {
        Sort::State(
            self.entries()
                .into_iter()
                .map(|(i, j)| (Self::entry(i, j), Sort::Bool))
                .collect(),
        )
    }
}

/// Classified regex operator of one production.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegexOp {
    Char(usize),
    Epsilon,
    Empty,
    Union,
    Concat,
    Star,
}

/// Recognize a regex production by operator name and arity.
pub fn regex_op(p: &Production) -> Option<RegexOp> {
    let op = match p.op.as_str() {
        "epsilon" if p.rhs.is_empty() => RegexOp::Epsilon,
        "empty" if p.rhs.is_empty() => RegexOp::Empty,
        "union" if p.rhs.len() == 2 => RegexOp::Union,
        "concat" if p.rhs.len() == 2 => RegexOp::Concat,
        "star" if p.rhs.len() == 1 => RegexOp::Star,
        name => {
            let c = name.strip_prefix("char_")?.parse().ok()?;
            if p.rhs.is_empty() {
                RegexOp::Char(c)
            } else {
                return None;
            }
        }
    };
    Some(op)
}

/// Encode one example string as an input state: unused character slots are
/// zero and the star countdown starts at the string length.
pub fn regex_example_input(params: RegexParams, word: &[i64]) -> Valuation {
    assert!(word.len() <= params.max_len, "string longer than max_len");
    let mut bindings: Vec<(String, Value)> = (0..params.max_len)
        .map(|i| {
            (
                format!("w{i}"),
                Value::Int(word.get(i).copied().unwrap_or(0)),
            )
        })
        .collect();
    bindings.push(("len".into(), Value::Int(word.len() as i64)));
    bindings.push(("k".into(), Value::Int(word.len() as i64)));
    Valuation::new(&params.input_sort(), bindings).expect("input matches its own sort")
}

fn mat(name: &str, i: usize, j: usize, sort: &Sort) -> Formula {
    Formula::field_get(RegexParams::entry(i, j), Formula::var(name, sort.clone()))
}

/// Build the regex grammar and semantics: productions 1..=alphabet are the
/// character literals, then epsilon, empty, union, concat, star.
pub fn build_regex_semantics(
    alphabet: usize,
    max_len: usize,
) -> (
    Grammar,
    BTreeMap<ProdId, Vec<SemanticRule>>,
    BTreeMap<String, Vec<RelArgSort>>,
) {
    assert!(alphabet >= 1 && max_len >= 1);
    let params = RegexParams { alphabet, max_len };
    let isort = params.input_sort();
    let osort = params.output_sort();

    let leaf = |id: ProdId, op: String| Production {
        id,
        lhs: "R".into(),
        op,
        rhs: vec![],
        lhs_sort: osort.clone(),
        rhs_sorts: vec![],
    };
    let node = |id: ProdId, op: &str, arity: usize| Production {
        id,
        lhs: "R".into(),
        op: op.into(),
        rhs: vec!["R".into(); arity],
        lhs_sort: osort.clone(),
        rhs_sorts: vec![osort.clone(); arity],
    };

    let a = alphabet as ProdId;
    let mut productions: Vec<Production> = (0..alphabet)
        .map(|c| leaf(c as ProdId + 1, format!("char_{c}")))
        .collect();
    productions.push(leaf(a + 1, "epsilon".into()));
    productions.push(leaf(a + 2, "empty".into()));
    productions.push(node(a + 3, "union", 2));
    productions.push(node(a + 4, "concat", 2));
    productions.push(node(a + 5, "star", 1));

    let grammar = Grammar {
        nonterminals: vec![("R".into(), osort.clone())],
        start: "R".into(),
        productions,
    };

    let rel = sem_relation("R");
    let w = || Formula::var("W", isort.clone());
    let len = || Formula::field_get("len", w());
    let k = || Formula::field_get("k", w());
    let premise = |input: Formula, term: TermRef, output: &str| {
        RelationApp::new(
            rel.clone(),
            vec![
                RelArg::F(input),
                RelArg::T(term),
                RelArg::var(output, osort.clone()),
            ],
        )
    };
    let head = |out: &str| premise(w(), TermRef::SelfTerm, out);
    // Output matrix defined entry-wise: m_i_j(Mo) = <formula>.
    let matrix_def = |defs: Vec<Formula>| {
        Formula::and_all(
            params
                .entries()
                .iter()
                .zip(defs)
                .map(|(&(i, j), d)| Formula::eq(mat("Mo", i, j, &osort), d))
                .collect(),
        )
    };
    let base_vars = |extra: &[&str]| {
        let mut vars = vec![("W".to_string(), isort.clone())];
        for m in extra {
            vars.push((m.to_string(), osort.clone()));
        }
        vars.push(("Mo".to_string(), osort.clone()));
        vars
    };
    let rule = |production: ProdId,
                vars: Vec<(String, Sort)>,
                body: Vec<RelationApp>,
                constraint: Formula| SemanticRule {
        production,
        vars,
        body,
        constraint,
        head: head("Mo"),
    };

    let mut semantics: BTreeMap<ProdId, Vec<SemanticRule>> = BTreeMap::new();

    for c in 0..alphabet {
        let defs = params
            .entries()
            .iter()
            .map(|&(i, j)| {
                if j == i + 1 {
                    Formula::and_all(vec![
                        Formula::Le(
                            Box::new(Formula::IntConst(j as i64)),
                            Box::new(len()),
                        ),
                        Formula::eq(
                            Formula::field_get(format!("w{i}"), w()),
                            Formula::IntConst(c as i64),
                        ),
                    ])
                } else {
                    Formula::BoolConst(false)
                }
            })
            .collect();
        semantics.insert(
            c as ProdId + 1,
            vec![rule(c as ProdId + 1, base_vars(&[]), vec![], matrix_def(defs))],
        );
    }

    let identity = || {
        params
            .entries()
            .iter()
            .map(|&(i, j)| Formula::BoolConst(i == j))
            .collect::<Vec<_>>()
    };
    semantics.insert(
        a + 1,
        vec![rule(a + 1, base_vars(&[]), vec![], matrix_def(identity()))],
    );
    semantics.insert(
        a + 2,
        vec![rule(
            a + 2,
            base_vars(&[]),
            vec![],
            matrix_def(
                params
                    .entries()
                    .iter()
                    .map(|_| Formula::BoolConst(false))
                    .collect(),
            ),
        )],
    );

    let union_defs = params
        .entries()
        .iter()
        .map(|&(i, j)| {
            Formula::or_all(vec![mat("M1", i, j, &osort), mat("M2", i, j, &osort)])
        })
        .collect();
    semantics.insert(
        a + 3,
        vec![rule(
            a + 3,
            base_vars(&["M1", "M2"]),
            vec![
                premise(w(), TermRef::Child(0), "M1"),
                premise(w(), TermRef::Child(1), "M2"),
            ],
            matrix_def(union_defs),
        )],
    );

    // Boolean matrix product over the shared midpoint.
    let product = |left: &str, right: &str| -> Vec<Formula> {
        params
            .entries()
            .iter()
            .map(|&(i, j)| {
                Formula::or_all(
                    (i..=j)
                        .map(|t| {
                            Formula::and_all(vec![
                                mat(left, i, t, &osort),
                                mat(right, t, j, &osort),
                            ])
                        })
                        .collect(),
                )
            })
            .collect()
    };
    semantics.insert(
        a + 4,
        vec![rule(
            a + 4,
            base_vars(&["M1", "M2"]),
            vec![
                premise(w(), TermRef::Child(0), "M1"),
                premise(w(), TermRef::Child(1), "M2"),
            ],
            matrix_def(product("M1", "M2")),
        )],
    );

    // star, exhausted: countdown hit zero, contribute exactly epsilon.
    let star_eps = rule(
        a + 5,
        base_vars(&[]),
        vec![],
        Formula::and_all(vec![
            Formula::eq(k(), Formula::IntConst(0)),
            matrix_def(identity()),
        ]),
    );
    // star, unrolling: Mo = M1 * Mp + Mp where M1 is the body matrix
    // (countdown reset to len for nested stars) and Mp is one less
    // unrolling of this star.
    let unroll_defs: Vec<Formula> = product("M1", "Mp")
        .into_iter()
        .zip(params.entries())
        .map(|(prod, (i, j))| Formula::or_all(vec![prod, mat("Mp", i, j, &osort)]))
        .collect();
    let star_unroll = rule(
        a + 5,
        base_vars(&["M1", "Mp"]),
        vec![
            premise(
                Formula::field_set("k", w(), len()),
                TermRef::Child(0),
                "M1",
            ),
            premise(
                Formula::field_set(
                    "k",
                    w(),
                    Formula::Sub(Box::new(k()), Box::new(Formula::IntConst(1))),
                ),
                TermRef::SelfTerm,
                "Mp",
            ),
        ],
        Formula::and_all(vec![
            Formula::lt(Formula::IntConst(0), k()),
            matrix_def(unroll_defs),
        ]),
    );
    semantics.insert(a + 5, vec![star_eps, star_unroll]);

    let signatures = BTreeMap::from([(
        rel,
        vec![
            RelArgSort::Value(isort),
            RelArgSort::TermOf("R".into()),
            RelArgSort::Value(osort),
        ],
    )]);

    (grammar, semantics, signatures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::validate_grammar;

    #[test]
    fn grammar_shape_and_ids() {
        let (g, sem, sigs) = build_regex_semantics(2, 3);
        assert_eq!(g.productions.len(), 7);
        assert_eq!(g.productions[0].op, "char_0");
        assert_eq!(g.productions[6].op, "star");
        assert_eq!(g.productions[6].id, 7);
        assert!(validate_grammar(&g).is_valid());
        assert_eq!(sem[&7].len(), 2, "star has exhausted + unrolling rules");
        assert_eq!(sem.values().map(Vec::len).sum::<usize>(), 8);
        assert!(sigs.contains_key("sem_R"));
    }

    #[test]
    fn rules_are_closed() {
        let (_, sem, _) = build_regex_semantics(2, 3);
        for rules in sem.values() {
            for r in rules {
                r.check_closed().unwrap();
            }
        }
    }

    #[test]
    fn example_input_pads_and_seeds_countdown() {
        let params = RegexParams {
            alphabet: 2,
            max_len: 4,
        };
        let v = regex_example_input(params, &[1, 0]);
        assert_eq!(v.get("w0"), Some(&Value::Int(1)));
        assert_eq!(v.get("w1"), Some(&Value::Int(0)));
        assert_eq!(v.get("w2"), Some(&Value::Int(0)));
        assert_eq!(v.get("len"), Some(&Value::Int(2)));
        assert_eq!(v.get("k"), Some(&Value::Int(2)));
    }

    #[test]
    fn matrix_state_is_upper_triangular() {
        let params = RegexParams {
            alphabet: 1,
            max_len: 2,
        };
        let fields = params.output_sort();
        let names: Vec<String> = fields
            .state_fields()
            .unwrap()
            .iter()
            .map(|(n, _)| n.clone())
            .collect();
        assert_eq!(names, ["m_0_0", "m_0_1", "m_0_2", "m_1_1", "m_1_2", "m_2_2"]);
    }
}
