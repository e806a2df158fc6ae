//! The realizability query: one clause deriving `Realizable` from a
//! single term that satisfies every example, plus the goal clause that
//! makes the solver decide it.
//!
//! The polarity is fixed here once and used everywhere: the clause system
//! is satisfiable exactly when no term meets the specification, because a
//! model must refute `Realizable` and therefore every candidate
//! derivation. Output values are never baked into relation arguments;
//! each example gets fresh output variables constrained only on the
//! fields its output actually pins down, so don't-care fields stay
//! universal.

use crate::lang::{Formula, Sort};
use crate::problem::{fuse_relation, sem_relation, syn_relation, Example, ExampleOutput, Problem};

use super::fuse::encode_fused;
use super::ir::{
    term_sort_name, ChcApp, ChcExpr, ChcProgram, ChcSort, Clause, EncodeError, EncodeMeta,
    Representation, LIST_SORT, QUERY_RELATION,
};
use super::lower::{flat_vars, lower, value_expr, value_formula};
use super::semantics::encode_standard;
use super::syntax::nil;

/// Term-argument plumbing of the query clause: variables to declare, an
/// optional syntax premise, and the term arguments each semantic premise
/// receives.
struct QueryTerm {
    vars: Vec<(String, ChcSort)>,
    syn: Option<ChcApp>,
    term_in: Vec<ChcExpr>,
    term_out: Vec<ChcExpr>,
}

fn query_term(start: &str, rep: Representation, fused: bool) -> QueryTerm {
    match rep {
        Representation::Tree => QueryTerm {
            vars: vec![(
                "t@q".to_string(),
                ChcSort::Datatype(term_sort_name(start)),
            )],
            syn: Some(ChcApp {
                relation: syn_relation(start),
                args: vec![ChcExpr::sym("t@q")],
            }),
            term_in: vec![ChcExpr::sym("t@q")],
            term_out: vec![],
        },
        Representation::List => {
            let vars = vec![("L@q".to_string(), ChcSort::Datatype(LIST_SORT.into()))];
            if fused {
                // Building: start from nil, the shared output is the term.
                QueryTerm {
                    vars,
                    syn: None,
                    term_in: vec![nil()],
                    term_out: vec![ChcExpr::sym("L@q")],
                }
            } else {
                // Consuming: the checked listing must be used up entirely.
                QueryTerm {
                    vars,
                    syn: Some(ChcApp {
                        relation: syn_relation(start),
                        args: vec![nil(), ChcExpr::sym("L@q")],
                    }),
                    term_in: vec![ChcExpr::sym("L@q")],
                    term_out: vec![nil()],
                }
            }
        }
        Representation::Array => {
            let vars = vec![
                ("A@q".to_string(), ChcSort::IntArray),
                ("n@q".to_string(), ChcSort::Int),
            ];
            let syn = (!fused).then(|| ChcApp {
                relation: syn_relation(start),
                args: vec![ChcExpr::sym("A@q"), ChcExpr::Int(0), ChcExpr::sym("n@q")],
            });
            QueryTerm {
                vars,
                syn,
                term_in: vec![ChcExpr::sym("A@q"), ChcExpr::Int(0)],
                term_out: vec![ChcExpr::sym("n@q")],
            }
        }
    }
}

/// Flattened literal arguments of one example input.
fn input_args(ex: &Example, in_sort: &Sort) -> Result<Vec<ChcExpr>, EncodeError> {
    let fields = in_sort.state_fields().ok_or_else(|| {
        EncodeError::UnsupportedValue("example input needs a state input sort".into())
    })?;
    fields
        .iter()
        .map(|(name, _)| {
            let v = ex.input.get(name).ok_or_else(|| {
                EncodeError::UnsupportedValue(format!("example input missing field {name}"))
            })?;
            value_expr(v)
        })
        .collect()
}

/// Condition pinning the output variables under `base` to the example's
/// output. Unmentioned fields are left unconstrained.
fn output_condition(
    ex: &Example,
    base: &str,
    out_sort: &Sort,
) -> Result<ChcExpr, EncodeError> {
    match &ex.output {
        ExampleOutput::Exact(v) => match (v, out_sort.state_fields()) {
            (crate::interp::Value::State(val), Some(fields)) => Ok(ChcExpr::and_all(
                fields
                    .iter()
                    .map(|(name, _)| {
                        let fv = val.get(name).ok_or_else(|| {
                            EncodeError::UnsupportedValue(format!(
                                "exact output missing field {name}"
                            ))
                        })?;
                        Ok(ChcExpr::app(
                            "=",
                            vec![ChcExpr::sym(format!("{base}.{name}")), value_expr(fv)?],
                        ))
                    })
                    .collect::<Result<_, EncodeError>>()?,
            )),
            (v, None) => Ok(ChcExpr::app(
                "=",
                vec![ChcExpr::sym(base), value_expr(v)?],
            )),
            _ => Err(EncodeError::UnsupportedValue(
                "exact output does not match the output sort".into(),
            )),
        },
        ExampleOutput::Partial(pairs) => {
            let fields = out_sort.state_fields().ok_or_else(|| {
                EncodeError::UnsupportedValue("partial output needs a state output sort".into())
            })?;
            Ok(ChcExpr::and_all(
                pairs
                    .iter()
                    .map(|(name, v)| {
                        if !fields.iter().any(|(f, _)| f == name) {
                            return Err(EncodeError::UnsupportedValue(format!(
                                "partial output names unknown field {name}"
                            )));
                        }
                        Ok(ChcExpr::app(
                            "=",
                            vec![ChcExpr::sym(format!("{base}.{name}")), value_expr(v)?],
                        ))
                    })
                    .collect::<Result<_, EncodeError>>()?,
            ))
        }
        ExampleOutput::Constraint(f) => {
            let mut map = std::collections::BTreeMap::new();
            for (name, v) in ex.input.iter() {
                map.insert(name.to_string(), value_formula(v)?);
            }
            map.insert(
                "out".to_string(),
                Formula::var(base, out_sort.clone()),
            );
            lower(&f.subst(&map))
        }
    }
}

/// Build the complete clause program asking whether any start-symbol term
/// satisfies every example.
pub fn build_query(p: &Problem, rep: Representation, fused: bool) -> Result<ChcProgram, EncodeError> {
    let examples = p.spec.examples().ok_or(EncodeError::SpecNotExamples)?;
    if examples.is_empty() {
        return Err(EncodeError::SpecNotExamples);
    }

    let mut prog = ChcProgram::new(rep);
    prog.meta = EncodeMeta {
        vectorized: p.transforms.vector_width,
        fused,
        abstracted: p.transforms.abstracted.is_some(),
        bounded: p.transforms.bounded,
    };

    if fused {
        encode_fused(p, &mut prog)?;
    } else {
        encode_standard(p, &mut prog)?;
    }

    let start = p.grammar.start.clone();
    let start_sem = sem_relation(&start);
    let premise_relation = if fused { fuse_relation(&start) } else { start_sem.clone() };
    let (ins, outs) = p
        .relation_io(&start_sem)
        .ok_or_else(|| EncodeError::UnsupportedRule(format!("no signature for {start_sem}")))?;

    let plumb = query_term(&start, rep, fused);
    let mut vars = plumb.vars.clone();
    let mut body: Vec<ChcApp> = plumb.syn.clone().into_iter().collect();
    let mut conditions = Vec::new();

    if let Some(n) = p.transforms.vector_width {
        if examples.len() != n {
            return Err(EncodeError::WidthMismatch {
                width: n,
                examples: examples.len(),
            });
        }
        let entry_in = match ins.first() {
            Some(Sort::Vector(inner, w)) if *w == n => inner.as_ref(),
            _ => {
                return Err(EncodeError::UnsupportedRule(
                    "vectorized start relation lacks a vector input".into(),
                ))
            }
        };
        let entry_out = match outs.first() {
            Some(Sort::Vector(inner, w)) if *w == n => inner.as_ref(),
            _ => {
                return Err(EncodeError::UnsupportedRule(
                    "vectorized start relation lacks a vector output".into(),
                ))
            }
        };
        let in_flags = matches!(ins.get(1), Some(Sort::Vector(inner, w)) if *w == n && **inner == Sort::Bool);
        let out_flags = matches!(outs.get(1), Some(Sort::Vector(inner, w)) if *w == n && **inner == Sort::Bool);

        let mut args = Vec::new();
        for ex in examples {
            args.extend(input_args(ex, entry_in)?);
        }
        if in_flags {
            args.extend(std::iter::repeat(ChcExpr::Bool(true)).take(n));
        }
        args.extend(plumb.term_in.iter().cloned());
        for (i, ex) in examples.iter().enumerate() {
            let base = format!("o@{i}");
            let out_vars = flat_vars(&base, entry_out)?;
            args.extend(out_vars.iter().map(|(v, _)| ChcExpr::sym(v.clone())));
            vars.extend(out_vars);
            conditions.push(output_condition(ex, &base, entry_out)?);
        }
        if out_flags {
            for i in 0..n {
                let flag = format!("lo@{i}");
                args.push(ChcExpr::sym(flag.clone()));
                vars.push((flag.clone(), ChcSort::Bool));
                conditions.push(ChcExpr::app(
                    "=",
                    vec![ChcExpr::sym(flag), ChcExpr::Bool(true)],
                ));
            }
        }
        args.extend(plumb.term_out.iter().cloned());
        body.push(ChcApp {
            relation: premise_relation,
            args,
        });
    } else {
        let in_sort = *ins.first().ok_or_else(|| {
            EncodeError::UnsupportedRule(format!("{start_sem} has no input argument"))
        })?;
        let out_sort = *outs.first().ok_or_else(|| {
            EncodeError::UnsupportedRule(format!("{start_sem} has no output argument"))
        })?;
        for (i, ex) in examples.iter().enumerate() {
            let base = format!("o@{i}");
            let out_vars = flat_vars(&base, out_sort)?;
            let mut args = input_args(ex, in_sort)?;
            args.extend(plumb.term_in.iter().cloned());
            args.extend(out_vars.iter().map(|(v, _)| ChcExpr::sym(v.clone())));
            args.extend(plumb.term_out.iter().cloned());
            vars.extend(out_vars);
            conditions.push(output_condition(ex, &base, out_sort)?);
            body.push(ChcApp {
                relation: premise_relation.clone(),
                args,
            });
        }
    }

    prog.declare(QUERY_RELATION, vec![]);
    prog.clauses.push(Clause {
        vars,
        body,
        constraint: ChcExpr::and_all(conditions),
        head: Some(ChcApp {
            relation: QUERY_RELATION.into(),
            args: vec![],
        }),
    });
    prog.clauses.push(Clause {
        vars: vec![],
        body: vec![ChcApp {
            relation: QUERY_RELATION.into(),
            args: vec![],
        }],
        constraint: ChcExpr::Bool(true),
        head: None,
    });
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::{xor_problem, xor_singleton_problem};

    fn query_clause(prog: &ChcProgram) -> &Clause {
        prog.clauses
            .iter()
            .find(|c| c.head.as_ref().map(|h| h.relation.as_str()) == Some(QUERY_RELATION))
            .unwrap()
    }

    #[test]
    fn standard_list_query_checks_each_example_on_one_listing() {
        let p = xor_problem();
        let prog = build_query(&p, Representation::List, false).unwrap();
        let q = query_clause(&prog);
        assert_eq!(q.body.len(), 4);
        assert_eq!(q.body[0].relation, "syn_Start");
        assert_eq!(q.body[0].args, vec![nil(), ChcExpr::sym("L@q")]);
        for (i, (x, y)) in [(6u64, 9u64), (44, 247), (14, 15)].iter().enumerate() {
            let app = &q.body[i + 1];
            assert_eq!(app.relation, "sem_Start");
            assert_eq!(app.args[0], ChcExpr::BitVec(*x, 32));
            assert_eq!(app.args[1], ChcExpr::BitVec(*y, 32));
            assert_eq!(app.args[2], ChcExpr::sym("L@q"));
            assert_eq!(app.args[5], nil());
        }
        // Only x is pinned; y stays a free output variable.
        let cond = format!("{:?}", q.constraint);
        assert!(cond.contains("o@0.x"));
        assert!(!cond.contains("o@0.y"));
        // Goal clause closes the system.
        assert!(prog
            .clauses
            .iter()
            .any(|c| c.head.is_none() && c.body.len() == 1));
    }

    #[test]
    fn fused_array_query_shares_the_term_range_without_syntax() {
        let p = xor_problem();
        let prog = build_query(&p, Representation::Array, true).unwrap();
        let q = query_clause(&prog);
        assert_eq!(q.body.len(), 3);
        for app in &q.body {
            assert_eq!(app.relation, "fuse_Start");
            assert_eq!(app.args[2], ChcExpr::sym("A@q"));
            assert_eq!(app.args[3], ChcExpr::Int(0));
            assert_eq!(app.args[6], ChcExpr::sym("n@q"));
        }
    }

    #[test]
    fn singleton_query_pins_the_single_example() {
        let p = xor_singleton_problem();
        let prog = build_query(&p, Representation::Tree, false).unwrap();
        let q = query_clause(&prog);
        assert_eq!(q.body.len(), 2);
        assert_eq!(q.body[1].args[2], ChcExpr::sym("t@q"));
        assert_eq!(
            q.constraint,
            ChcExpr::app(
                "=",
                vec![ChcExpr::sym("o@0.x"), ChcExpr::BitVec(15, 32)]
            )
        );
    }

    #[test]
    fn formula_specifications_are_rejected() {
        let mut p = xor_problem();
        p.spec = crate::problem::Specification::Formula {
            formula: Formula::BoolConst(true),
            verifiable: false,
        };
        assert_eq!(
            build_query(&p, Representation::List, false).unwrap_err(),
            EncodeError::SpecNotExamples
        );
    }

    #[test]
    fn stale_vector_width_is_rejected() {
        let mut p = xor_problem();
        p.transforms.vector_width = Some(2);
        assert_eq!(
            build_query(&p, Representation::List, false).unwrap_err(),
            EncodeError::WidthMismatch {
                width: 2,
                examples: 3
            }
        );
    }
}
