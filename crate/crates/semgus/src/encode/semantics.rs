//! Semantic clauses: each semantic rule becomes one Horn clause whose
//! term argument is realized under the chosen representation.
//!
//! Listing layout mirrors the syntax clauses but in consuming direction:
//! the head receives `prodId :: tail`, child `c` consumes its own segment
//! left to right, and the head's leftover is what the last child leaves.
//! A recursive premise (the whole-term reference of a loop rule) reuses
//! the head's listing arguments. A child that no premise consumes still
//! occupies its listing segment, so a `syn` premise advances past it;
//! under the tree representation the sort system already guarantees the
//! unused subterm is well formed and no premise is needed.

use std::collections::BTreeSet;

use crate::lang::{Formula, Production, RelArg, RelArgSort, SemanticRule, Sort, TermRef};
use crate::problem::{syn_relation, Problem};

use super::ir::{
    ctor_name, term_sort_name, ChcApp, ChcExpr, ChcProgram, ChcSort, Clause, EncodeError,
    Representation, LIST_SORT,
};
use super::lower::{flat_vars, flatten_sort, lower, project};
use super::syntax::{cons, encode_syntax};

/// Whether clauses are generated for the plain semantic relations or the
/// fused syntax-and-semantics relations. Fused listings run in building
/// direction and child premises target the fused relations; recursive
/// premises stay on the plain semantic relations over the completed
/// listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleMode {
    Sem,
    Fuse,
}

/// Flattened solver sorts of a relation signature. The term argument
/// contributes its representation at its position; listing
/// representations append the leftover (list tail or cursor) after all
/// value arguments.
pub fn flatten_signature(
    args: &[RelArgSort],
    rep: Representation,
) -> Result<Vec<ChcSort>, EncodeError> {
    let mut out = Vec::new();
    let mut trailing = Vec::new();
    for a in args {
        match a {
            RelArgSort::Value(s) => {
                out.extend(flatten_sort(s)?.into_iter().map(|(_, cs)| cs));
            }
            RelArgSort::TermOf(nt) => match rep {
                Representation::Tree => out.push(ChcSort::Datatype(term_sort_name(nt))),
                Representation::List => {
                    out.push(ChcSort::Datatype(LIST_SORT.into()));
                    trailing.push(ChcSort::Datatype(LIST_SORT.into()));
                }
                Representation::Array => {
                    out.push(ChcSort::IntArray);
                    out.push(ChcSort::Int);
                    trailing.push(ChcSort::Int);
                }
            },
        }
    }
    out.extend(trailing);
    Ok(out)
}

/// Declare the flattened semantic relations of a problem.
pub fn declare_semantic_relations(p: &Problem, prog: &mut ChcProgram) -> Result<(), EncodeError> {
    if prog.representation == Representation::List {
        prog.add_list_datatype();
    }
    if prog.representation == Representation::Tree {
        super::syntax::declare_term_datatypes(&p.grammar, prog);
    }
    for (name, sig) in &p.signatures {
        prog.declare(name.clone(), flatten_signature(sig, prog.representation)?);
    }
    Ok(())
}

fn sort_of(f: &Formula) -> Result<Sort, EncodeError> {
    f.sort()
        .map_err(|e| EncodeError::UnsupportedRule(e.to_string()))
}

/// Flattened clause expressions of one formula argument: states expand to
/// per-field projections.
fn flat_formula_args(f: &Formula) -> Result<Vec<ChcExpr>, EncodeError> {
    match sort_of(f)? {
        Sort::State(fields) => fields.iter().map(|(name, _)| project(f, name)).collect(),
        _ => Ok(vec![lower(f)?]),
    }
}

/// Assemble flattened relation arguments: formula args in place, the term
/// argument spliced at its position with trailing parts appended last.
fn app_args(
    args: &[RelArg],
    term_in: &[ChcExpr],
    term_out: &[ChcExpr],
) -> Result<Vec<ChcExpr>, EncodeError> {
    let mut out = Vec::new();
    let mut trailing = Vec::new();
    for a in args {
        match a {
            RelArg::F(f) => out.extend(flat_formula_args(f)?),
            RelArg::T(_) => {
                debug_assert!(trailing.is_empty(), "multiple term arguments in one app");
                out.extend_from_slice(term_in);
                trailing.extend_from_slice(term_out);
            }
        }
    }
    out.extend(trailing);
    Ok(out)
}

fn fuse_name(relation: &str) -> Result<String, EncodeError> {
    relation
        .strip_prefix("sem_")
        .map(|nt| crate::problem::fuse_relation(nt))
        .ok_or_else(|| {
            EncodeError::UnsupportedRule(format!("cannot fuse non-semantic relation {relation}"))
        })
}

/// In-position and trailing term arguments for one term reference.
struct TermArgs {
    inputs: Vec<ChcExpr>,
    outputs: Vec<ChcExpr>,
}

struct Plumbing {
    vars: Vec<(String, ChcSort)>,
    head: TermArgs,
    children: Vec<TermArgs>,
    self_term: TermArgs,
    /// Extra constraint conjunct (the array production check).
    constraint: Option<ChcExpr>,
}

fn lst() -> ChcSort {
    ChcSort::Datatype(LIST_SORT.into())
}

fn plumbing(prod: &Production, rep: Representation, mode: RuleMode) -> Plumbing {
    let k = prod.arity();
    let pid = ChcExpr::Int(prod.id as i64);
    match rep {
        Representation::Tree => {
            let vars = (0..k)
                .map(|c| {
                    (
                        format!("t@{c}"),
                        ChcSort::Datatype(term_sort_name(&prod.rhs[c])),
                    )
                })
                .collect();
            let term = ChcExpr::app(
                ctor_name(prod.id),
                (0..k).map(|c| ChcExpr::sym(format!("t@{c}"))).collect(),
            );
            Plumbing {
                vars,
                head: TermArgs {
                    inputs: vec![term.clone()],
                    outputs: vec![],
                },
                children: (0..k)
                    .map(|c| TermArgs {
                        inputs: vec![ChcExpr::sym(format!("t@{c}"))],
                        outputs: vec![],
                    })
                    .collect(),
                self_term: TermArgs {
                    inputs: vec![term],
                    outputs: vec![],
                },
                constraint: None,
            }
        }
        Representation::List => {
            let vars = (0..=k).map(|b| (format!("b@{b}"), lst())).collect();
            let b = |i: usize| ChcExpr::sym(format!("b@{i}"));
            let whole = cons(pid, b(0));
            // Consuming: in = whole term ++ leftover. Building: out = it.
            let (head_in, head_out) = match mode {
                RuleMode::Sem => (whole.clone(), b(k)),
                RuleMode::Fuse => (b(k), whole.clone()),
            };
            let children = (0..k)
                .map(|c| {
                    let (i, o) = match mode {
                        RuleMode::Sem => (b(c), b(c + 1)),
                        RuleMode::Fuse => (b(c + 1), b(c)),
                    };
                    TermArgs {
                        inputs: vec![i],
                        outputs: vec![o],
                    }
                })
                .collect();
            Plumbing {
                vars,
                head: TermArgs {
                    inputs: vec![head_in],
                    outputs: vec![head_out],
                },
                children,
                // The recursive premise always consumes the whole listing.
                self_term: TermArgs {
                    inputs: vec![whole],
                    outputs: vec![b(k)],
                },
                constraint: None,
            }
        }
        Representation::Array => {
            let mut vars = vec![
                ("A@".to_string(), ChcSort::IntArray),
                ("i@".to_string(), ChcSort::Int),
            ];
            vars.extend((1..=k).map(|c| (format!("c@{c}"), ChcSort::Int)));
            let arr = ChcExpr::sym("A@");
            let start = ChcExpr::sym("i@");
            let bound = |c: usize| {
                if c == 0 {
                    ChcExpr::app("+", vec![ChcExpr::sym("i@"), ChcExpr::Int(1)])
                } else {
                    ChcExpr::sym(format!("c@{c}"))
                }
            };
            let end = bound(k);
            let children = (0..k)
                .map(|c| TermArgs {
                    inputs: vec![arr.clone(), bound(c)],
                    outputs: vec![bound(c + 1)],
                })
                .collect();
            let check = ChcExpr::app(
                "=",
                vec![ChcExpr::app("select", vec![arr.clone(), start.clone()]), pid],
            );
            Plumbing {
                vars,
                head: TermArgs {
                    inputs: vec![arr.clone(), start.clone()],
                    outputs: vec![end.clone()],
                },
                children,
                self_term: TermArgs {
                    inputs: vec![arr, start],
                    outputs: vec![end],
                },
                constraint: Some(check),
            }
        }
    }
}

/// Translate one semantic rule to a clause. Sets `need_syn` when the
/// clause relies on syntax relations for unused children.
pub fn translate_rule(
    prod: &Production,
    rule: &SemanticRule,
    rep: Representation,
    mode: RuleMode,
    need_syn: &mut bool,
) -> Result<Clause, EncodeError> {
    let pl = plumbing(prod, rep, mode);

    let mut vars = Vec::new();
    for (name, sort) in &rule.vars {
        debug_assert!(!name.contains('@'), "rule variable collides with plumbing");
        vars.extend(flat_vars(name, sort)?);
    }
    vars.extend(pl.vars.iter().cloned());

    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut body = Vec::new();
    for premise in &rule.body {
        let (relation, term) = match premise.term_ref() {
            Some(TermRef::Child(c)) => {
                if c >= prod.arity() {
                    return Err(EncodeError::UnsupportedRule(format!(
                        "premise references child {c} of arity-{} production {}",
                        prod.arity(),
                        prod.id
                    )));
                }
                used.insert(c);
                let name = match mode {
                    RuleMode::Sem => premise.relation.clone(),
                    RuleMode::Fuse => fuse_name(&premise.relation)?,
                };
                (name, &pl.children[c])
            }
            Some(TermRef::SelfTerm) => (premise.relation.clone(), &pl.self_term),
            None => {
                return Err(EncodeError::UnsupportedRule(format!(
                    "premise on {} has no term argument",
                    premise.relation
                )))
            }
        };
        body.push(ChcApp {
            relation,
            args: app_args(&premise.args, &term.inputs, &term.outputs)?,
        });
    }

    if rep != Representation::Tree {
        for c in 0..prod.arity() {
            if !used.contains(&c) {
                *need_syn = true;
                let seg = &pl.children[c];
                // syn builds: out = child listing ++ in, which is the
                // consuming segment read backwards; under the array
                // representation the same forward range works directly.
                let args = match rep {
                    Representation::List => vec![seg.outputs[0].clone(), seg.inputs[0].clone()],
                    Representation::Array => {
                        vec![
                            seg.inputs[0].clone(),
                            seg.inputs[1].clone(),
                            seg.outputs[0].clone(),
                        ]
                    }
                    Representation::Tree => unreachable!(),
                };
                body.push(ChcApp {
                    relation: syn_relation(&prod.rhs[c]),
                    args,
                });
            }
        }
    }

    let mut conjuncts = vec![lower(&rule.constraint)?];
    conjuncts.extend(pl.constraint.clone());
    let constraint = ChcExpr::and_all(conjuncts);

    let head_relation = match mode {
        RuleMode::Sem => rule.head.relation.clone(),
        RuleMode::Fuse => fuse_name(&rule.head.relation)?,
    };
    let head = ChcApp {
        relation: head_relation,
        args: app_args(&rule.head.args, &pl.head.inputs, &pl.head.outputs)?,
    };

    Ok(Clause {
        vars,
        body,
        constraint,
        head: Some(head),
    })
}

/// Emit semantic clauses for every rule of the problem. Returns whether
/// any clause needs the syntax relations (the caller adds them once).
pub fn encode_semantics(p: &Problem, prog: &mut ChcProgram) -> Result<bool, EncodeError> {
    declare_semantic_relations(p, prog)?;
    let mut need_syn = false;
    for (pid, rules) in &p.semantics {
        let prod = p.grammar.production(*pid).ok_or_else(|| {
            EncodeError::UnsupportedRule(format!("rules for unknown production {pid}"))
        })?;
        for rule in rules {
            let clause = translate_rule(prod, rule, prog.representation, RuleMode::Sem, &mut need_syn)?;
            prog.clauses.push(clause);
        }
    }
    Ok(need_syn)
}

/// Standard encoding: syntax plus semantics, as used by the plain query.
pub fn encode_standard(p: &Problem, prog: &mut ChcProgram) -> Result<(), EncodeError> {
    encode_semantics(p, prog)?;
    encode_syntax(&p.grammar, prog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::xor_problem;

    fn clauses_for(rep: Representation) -> ChcProgram {
        let p = xor_problem();
        let mut prog = ChcProgram::new(rep);
        encode_semantics(&p, &mut prog).unwrap();
        prog
    }

    fn find_clause<'a>(prog: &'a ChcProgram, relation: &str, n: usize) -> &'a Clause {
        prog.clauses
            .iter()
            .filter(|c| c.head.as_ref().map(|h| h.relation.as_str()) == Some(relation))
            .nth(n)
            .unwrap()
    }

    #[test]
    fn list_while_rule_reuses_head_listing_for_recursion() {
        let prog = clauses_for(Representation::List);
        // Production 1 = while(B, S); first rule is the entered one.
        let c = find_clause(&prog, "sem_Start", 0);
        assert_eq!(c.body.len(), 3);
        let whole = cons(ChcExpr::Int(1), ChcExpr::sym("b@0"));
        // Guard consumes segment 0, body statement segment 1.
        assert_eq!(c.body[0].relation, "sem_B");
        assert_eq!(c.body[0].args[2], ChcExpr::sym("b@0"));
        assert_eq!(c.body[0].args[4], ChcExpr::sym("b@1"));
        assert_eq!(c.body[1].relation, "sem_S");
        assert_eq!(c.body[1].args[2], ChcExpr::sym("b@1"));
        assert_eq!(c.body[1].args[5], ChcExpr::sym("b@2"));
        // Recursion re-reads the whole listing and shares the head's
        // leftover.
        assert_eq!(c.body[2].relation, "sem_Start");
        assert_eq!(c.body[2].args[2], whole);
        assert_eq!(c.body[2].args[5], ChcExpr::sym("b@2"));
        let head = c.head.as_ref().unwrap();
        assert_eq!(head.args[2], whole);
        assert_eq!(head.args[5], ChcExpr::sym("b@2"));
    }

    #[test]
    fn list_while_exit_rule_advances_past_unused_body() {
        let prog = clauses_for(Representation::List);
        let c = find_clause(&prog, "sem_Start", 1);
        // Guard premise plus a syntax advance over the unused child 1.
        assert_eq!(c.body.len(), 2);
        assert_eq!(c.body[0].relation, "sem_B");
        assert_eq!(c.body[1].relation, "syn_S");
        assert_eq!(c.body[1].args[0], ChcExpr::sym("b@2"));
        assert_eq!(c.body[1].args[1], ChcExpr::sym("b@1"));
        // Head still consumes both segments.
        let head = c.head.as_ref().unwrap();
        assert_eq!(head.args[5], ChcExpr::sym("b@2"));
    }

    #[test]
    fn leaf_rule_consumes_only_its_own_id() {
        let prog = clauses_for(Representation::List);
        // Production 6: E -> x, a leaf.
        let c = prog
            .clauses
            .iter()
            .find(|c| {
                c.head.as_ref().map(|h| h.relation.as_str()) == Some("sem_E")
                    && c.head.as_ref().unwrap().args[2]
                        == cons(ChcExpr::Int(6), ChcExpr::sym("b@0"))
            })
            .unwrap();
        assert!(c.body.is_empty());
        let head = c.head.as_ref().unwrap();
        assert_eq!(head.args[4], ChcExpr::sym("b@0"));
        // v = G.x
        assert_eq!(
            c.constraint,
            ChcExpr::app("=", vec![ChcExpr::sym("v"), ChcExpr::sym("G.x")])
        );
    }

    #[test]
    fn array_rules_check_the_production_id() {
        let prog = clauses_for(Representation::Array);
        let c = find_clause(&prog, "sem_Start", 0);
        let select = ChcExpr::app(
            "=",
            vec![
                ChcExpr::app("select", vec![ChcExpr::sym("A@"), ChcExpr::sym("i@")]),
                ChcExpr::Int(1),
            ],
        );
        match &c.constraint {
            ChcExpr::App(op, parts) if op == "and" => assert!(parts.contains(&select)),
            one => assert_eq!(one, &select),
        }
        // Recursion spans the head's whole range.
        let rec = c.body.iter().find(|b| b.relation == "sem_Start").unwrap();
        assert_eq!(rec.args[2], ChcExpr::sym("A@"));
        assert_eq!(rec.args[3], ChcExpr::sym("i@"));
        assert_eq!(rec.args[6], ChcExpr::sym("c@2"));
    }

    #[test]
    fn tree_rules_construct_terms_and_skip_unused_children_silently() {
        let prog = clauses_for(Representation::Tree);
        let c = find_clause(&prog, "sem_Start", 1);
        // Only the guard premise; the unused child stays a free datatype
        // variable in the head constructor.
        assert_eq!(c.body.len(), 1);
        assert_eq!(c.body[0].relation, "sem_B");
        let head = c.head.as_ref().unwrap();
        assert_eq!(
            head.args[2],
            ChcExpr::app("c1", vec![ChcExpr::sym("t@0"), ChcExpr::sym("t@1")])
        );
        assert!(c.vars.iter().any(|(n, _)| n == "t@1"));
    }

    #[test]
    fn signatures_flatten_states_and_append_listing_outputs() {
        let p = xor_problem();
        let sig = &p.signatures["sem_Start"];
        let flat = flatten_signature(sig, Representation::Array).unwrap();
        assert_eq!(
            flat,
            vec![
                ChcSort::BitVec(32),
                ChcSort::BitVec(32),
                ChcSort::IntArray,
                ChcSort::Int,
                ChcSort::BitVec(32),
                ChcSort::BitVec(32),
                ChcSort::Int,
            ]
        );
    }
}
