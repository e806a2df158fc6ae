//! Syntax clauses: for each nonterminal a relation `syn_N` recognizing
//! exactly the valid N-terms under the chosen representation.
//!
//! Tree: `syn_N` takes one term-datatype argument and every constructor
//! application of valid children is valid. List: `syn_N(L_in, L_out)`
//! holds when `L_out` is a pre-order listing of an N-term prepended to
//! `L_in`; children are chained right to left so the listing comes out in
//! pre-order. Array: `syn_N(A, i, j)` holds when `A[i..j)` is a pre-order
//! listing of an N-term; children occupy consecutive cursor ranges left
//! to right.

use crate::lang::Grammar;
use crate::problem::syn_relation;

use super::ir::{
    ctor_name, term_sort_name, ChcApp, ChcExpr, ChcProgram, ChcSort, Clause, DatatypeDecl,
    EncodeError, Representation, LIST_SORT,
};

fn lst() -> ChcSort {
    ChcSort::Datatype(LIST_SORT.into())
}

pub fn cons(head: ChcExpr, tail: ChcExpr) -> ChcExpr {
    ChcExpr::app("cons", vec![head, tail])
}

pub fn nil() -> ChcExpr {
    ChcExpr::app("nil", vec![])
}

fn plus_one(e: ChcExpr) -> ChcExpr {
    ChcExpr::app("+", vec![e, ChcExpr::Int(1)])
}

/// Declare the term datatypes of the tree representation, one per
/// nonterminal, mutually recursive in one block.
pub fn declare_term_datatypes(g: &Grammar, prog: &mut ChcProgram) {
    for (nt, _) in &g.nonterminals {
        let ctors = g
            .productions_of(nt)
            .iter()
            .map(|p| {
                let fields = p
                    .rhs
                    .iter()
                    .enumerate()
                    .map(|(k, child)| {
                        (
                            format!("{}_{k}", ctor_name(p.id)),
                            ChcSort::Datatype(term_sort_name(child)),
                        )
                    })
                    .collect();
                (ctor_name(p.id), fields)
            })
            .collect();
        prog.add_datatype(DatatypeDecl {
            name: term_sort_name(nt),
            ctors,
        });
    }
}

/// Declare `syn_N` for every nonterminal and register supporting
/// datatypes. Idempotent.
pub fn declare_syntax_relations(g: &Grammar, prog: &mut ChcProgram) {
    match prog.representation {
        Representation::Tree => declare_term_datatypes(g, prog),
        Representation::List => prog.add_list_datatype(),
        Representation::Array => {}
    }
    for (nt, _) in &g.nonterminals {
        let args = match prog.representation {
            Representation::Tree => vec![ChcSort::Datatype(term_sort_name(nt))],
            Representation::List => vec![lst(), lst()],
            Representation::Array => vec![ChcSort::IntArray, ChcSort::Int, ChcSort::Int],
        };
        prog.declare(syn_relation(nt), args);
    }
}

/// Emit the syntax clause of every production.
pub fn encode_syntax(g: &Grammar, prog: &mut ChcProgram) -> Result<(), EncodeError> {
    declare_syntax_relations(g, prog);
    for p in &g.productions {
        let clause = match prog.representation {
            Representation::Tree => {
                let vars: Vec<(String, ChcSort)> = p
                    .rhs
                    .iter()
                    .enumerate()
                    .map(|(k, child)| (format!("t@{k}"), ChcSort::Datatype(term_sort_name(child))))
                    .collect();
                let body = p
                    .rhs
                    .iter()
                    .enumerate()
                    .map(|(k, child)| ChcApp {
                        relation: syn_relation(child),
                        args: vec![ChcExpr::sym(format!("t@{k}"))],
                    })
                    .collect();
                let term = ChcExpr::app(
                    ctor_name(p.id),
                    (0..p.arity())
                        .map(|k| ChcExpr::sym(format!("t@{k}")))
                        .collect(),
                );
                Clause {
                    vars,
                    body,
                    constraint: ChcExpr::Bool(true),
                    head: Some(ChcApp {
                        relation: syn_relation(&p.lhs),
                        args: vec![term],
                    }),
                }
            }
            Representation::List => {
                // Boundaries b@0 .. b@k with b@k the incoming listing;
                // child m (1-based) builds b@m from b@{m+1}, so the head
                // prepends the production id to child 1's output.
                let k = p.arity();
                let mut vars = vec![(format!("b@{k}"), lst())];
                let mut body = Vec::new();
                for m in (1..=k).rev() {
                    vars.push((format!("b@{}", m - 1), lst()));
                    body.push(ChcApp {
                        relation: syn_relation(&p.rhs[m - 1]),
                        args: vec![
                            ChcExpr::sym(format!("b@{m}")),
                            ChcExpr::sym(format!("b@{}", m - 1)),
                        ],
                    });
                }
                Clause {
                    vars,
                    body,
                    constraint: ChcExpr::Bool(true),
                    head: Some(ChcApp {
                        relation: syn_relation(&p.lhs),
                        args: vec![
                            ChcExpr::sym(format!("b@{k}")),
                            cons(ChcExpr::Int(p.id as i64), ChcExpr::sym("b@0")),
                        ],
                    }),
                }
            }
            Representation::Array => {
                // Cursors: production id at i, child m spans [c@{m-1}, c@m)
                // with c@0 = i + 1; the head out-cursor is the last bound.
                let mut vars = vec![
                    ("A@".to_string(), ChcSort::IntArray),
                    ("i@".to_string(), ChcSort::Int),
                ];
                let mut body = Vec::new();
                let mut cursor = plus_one(ChcExpr::sym("i@"));
                for (m, child) in p.rhs.iter().enumerate() {
                    let out = format!("c@{}", m + 1);
                    vars.push((out.clone(), ChcSort::Int));
                    body.push(ChcApp {
                        relation: syn_relation(child),
                        args: vec![ChcExpr::sym("A@"), cursor, ChcExpr::sym(&out)],
                    });
                    cursor = ChcExpr::sym(&out);
                }
                let constraint = ChcExpr::app(
                    "=",
                    vec![
                        ChcExpr::app("select", vec![ChcExpr::sym("A@"), ChcExpr::sym("i@")]),
                        ChcExpr::Int(p.id as i64),
                    ],
                );
                Clause {
                    vars,
                    body,
                    constraint,
                    head: Some(ChcApp {
                        relation: syn_relation(&p.lhs),
                        args: vec![ChcExpr::sym("A@"), ChcExpr::sym("i@"), cursor],
                    }),
                }
            }
        };
        prog.clauses.push(clause);
        debug_assert!(g.nonterminal_sort(&p.lhs).is_some());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::loop_or_grammar;

    #[test]
    fn tree_syntax_declares_one_datatype_per_nonterminal() {
        let g = loop_or_grammar();
        let mut prog = ChcProgram::new(Representation::Tree);
        encode_syntax(&g, &mut prog).unwrap();
        let names: Vec<&str> = prog.datatypes.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["T_Start", "T_B", "T_S", "T_E"]);
        // Start has the single while production, id 1, two children.
        let start = &prog.datatypes[0];
        assert_eq!(start.ctors.len(), 1);
        assert_eq!(start.ctors[0].0, "c1");
        assert_eq!(start.ctors[0].1.len(), 2);
        assert_eq!(start.ctors[0].1[0].1, ChcSort::Datatype("T_B".into()));
        assert_eq!(prog.clauses.len(), g.productions.len());
    }

    #[test]
    fn list_syntax_chains_children_right_to_left() {
        let g = loop_or_grammar();
        let mut prog = ChcProgram::new(Representation::List);
        encode_syntax(&g, &mut prog).unwrap();
        // Production 1: Start -> while(B, S).
        let c = &prog.clauses[0];
        assert_eq!(c.body.len(), 2);
        // Child 2 (S) consumes the incoming listing first.
        assert_eq!(c.body[0].relation, "syn_S");
        assert_eq!(c.body[0].args[0], ChcExpr::sym("b@2"));
        assert_eq!(c.body[0].args[1], ChcExpr::sym("b@1"));
        // Child 1 (B) builds on top of it.
        assert_eq!(c.body[1].relation, "syn_B");
        assert_eq!(c.body[1].args[0], ChcExpr::sym("b@1"));
        assert_eq!(c.body[1].args[1], ChcExpr::sym("b@0"));
        let head = c.head.as_ref().unwrap();
        assert_eq!(head.relation, "syn_Start");
        assert_eq!(head.args[0], ChcExpr::sym("b@2"));
        assert_eq!(head.args[1], cons(ChcExpr::Int(1), ChcExpr::sym("b@0")));
        // Leaf production 6: E -> x.
        let leaf = &prog.clauses[5];
        assert!(leaf.body.is_empty());
        let head = leaf.head.as_ref().unwrap();
        assert_eq!(head.args[1], cons(ChcExpr::Int(6), ChcExpr::sym("b@0")));
        assert_eq!(head.args[0], ChcExpr::sym("b@0"));
    }

    #[test]
    fn array_syntax_threads_cursors_left_to_right() {
        let g = loop_or_grammar();
        let mut prog = ChcProgram::new(Representation::Array);
        encode_syntax(&g, &mut prog).unwrap();
        let c = &prog.clauses[0];
        assert_eq!(c.body.len(), 2);
        assert_eq!(c.body[0].relation, "syn_B");
        assert_eq!(c.body[0].args[1], plus_one(ChcExpr::sym("i@")));
        assert_eq!(c.body[0].args[2], ChcExpr::sym("c@1"));
        assert_eq!(c.body[1].relation, "syn_S");
        assert_eq!(c.body[1].args[1], ChcExpr::sym("c@1"));
        assert_eq!(c.body[1].args[2], ChcExpr::sym("c@2"));
        let head = c.head.as_ref().unwrap();
        assert_eq!(head.args[2], ChcExpr::sym("c@2"));
        // Leaf: out-cursor is i + 1 inline.
        let leaf = &prog.clauses[5];
        assert!(leaf.body.is_empty());
        assert_eq!(
            leaf.head.as_ref().unwrap().args[2],
            plus_one(ChcExpr::sym("i@"))
        );
    }
}
