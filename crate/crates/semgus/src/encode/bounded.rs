//! Bounded (under-approximating) semantics: the state carries a fuel
//! counter and recursive rules burn one unit per unrolling, so every
//! relation becomes finite-depth. A term satisfying the bounded relations
//! satisfies the originals, which makes `unsat` on the bounded query a
//! realizability proof; `sat` only means no witness exists within the
//! bound.
//!
//! The counter rides along as an extra `_bound` state field. Rules of
//! recursive productions fire only while it is positive; a recursive
//! premise runs on fuel decremented by one, and the rule's output
//! restores the caller's fuel so the counter is invisible across calls.
//! Non-recursive rules thread it untouched (their outputs are field
//! updates of the input state). Fuel is spent even on the non-recursive
//! exit rules of a recursive production, so fuel k admits k - 1 loop
//! iterations; the interpreter's bound counts iterations directly and
//! sits one below.

use std::collections::{BTreeMap, BTreeSet};

use crate::lang::{Formula, ProdId, RelArg, RelArgSort, SemanticRule, Sort, TermRef};
use crate::problem::{Example, ExampleOutput, Problem, Specification, Transforms};

use super::ir::EncodeError;

pub const BOUND_FIELD: &str = "_bound";

fn conjoin(a: Formula, b: Formula) -> Formula {
    match a {
        Formula::BoolConst(true) => b,
        a => Formula::And(vec![a, b]),
    }
}

fn swap_sort(s: &Sort, old: &Sort, new: &Sort) -> Sort {
    if s == old {
        new.clone()
    } else {
        s.clone()
    }
}

/// Split a relation application's argument list at its term argument.
fn term_position(args: &[RelArg]) -> Option<usize> {
    args.iter().position(|a| matches!(a, RelArg::T(_)))
}

/// Add a fuel counter to every state so recursion depth is capped at `k`.
pub fn make_bounded(p: &Problem, k: u32) -> Result<Problem, EncodeError> {
    if p.transforms != Transforms::default() {
        return Err(EncodeError::UnsupportedRule(
            "bounding applies to the untransformed problem".into(),
        ));
    }
    let examples = p.spec.examples().ok_or(EncodeError::SpecNotExamples)?;
    let old_state = p
        .start_input_sort()
        .ok_or_else(|| {
            EncodeError::UnsupportedRule("problem has no start input sort".into())
        })?
        .clone();
    let Some(fields) = old_state.state_fields() else {
        return Err(EncodeError::UnsupportedSort(format!(
            "bounding needs a state input, got {old_state}"
        )));
    };
    if fields.iter().any(|(n, _)| n == BOUND_FIELD) {
        return Err(EncodeError::UnsupportedSort(format!(
            "state already has a {BOUND_FIELD} field"
        )));
    }
    let mut new_fields = fields.to_vec();
    new_fields.push((BOUND_FIELD.to_string(), Sort::Int));
    let new_state = Sort::State(new_fields);

    let mut signatures = BTreeMap::new();
    for (rel, sig) in &p.signatures {
        let swapped = sig
            .iter()
            .map(|a| match a {
                RelArgSort::Value(s) => {
                    RelArgSort::Value(swap_sort(s, &old_state, &new_state))
                }
                t => t.clone(),
            })
            .collect();
        signatures.insert(rel.clone(), swapped);
    }

    let recursive: BTreeSet<ProdId> = p
        .semantics
        .iter()
        .filter(|(_, rules)| {
            rules.iter().any(|r| {
                r.body
                    .iter()
                    .any(|a| a.term_ref() == Some(TermRef::SelfTerm))
            })
        })
        .map(|(pid, _)| *pid)
        .collect();

    let mut semantics = BTreeMap::new();
    for (pid, rules) in &p.semantics {
        let mut out_rules = Vec::new();
        for r in rules {
            out_rules.push(bound_rule(r, recursive.contains(pid), &old_state, &new_state)?);
        }
        semantics.insert(*pid, out_rules);
    }

    let mut bounded_examples = Vec::new();
    for ex in examples {
        let mut bindings: Vec<(String, crate::interp::Value)> = ex
            .input
            .iter()
            .map(|(n, v)| (n.to_string(), v.clone()))
            .collect();
        bindings.push((BOUND_FIELD.to_string(), crate::interp::Value::Int(k as i64)));
        let input = crate::interp::Valuation::new(&new_state, bindings).map_err(|e| {
            EncodeError::UnsupportedValue(format!("example input: {e}"))
        })?;
        // An exact state output would now also pin the fuel field; demand
        // only the original fields instead.
        let output = match &ex.output {
            ExampleOutput::Exact(crate::interp::Value::State(val)) => ExampleOutput::Partial(
                val.iter().map(|(n, v)| (n.to_string(), v.clone())).collect(),
            ),
            other => other.clone(),
        };
        bounded_examples.push(Example { input, output });
    }

    Ok(Problem {
        name: p.name.clone(),
        grammar: p.grammar.clone(),
        semantics,
        signatures,
        spec: Specification::Examples(bounded_examples),
        builtin: None,
        transforms: Transforms {
            bounded: Some(k),
            ..Transforms::default()
        },
    })
}

fn bound_rule(
    r: &SemanticRule,
    recursive: bool,
    old_state: &Sort,
    new_state: &Sort,
) -> Result<SemanticRule, EncodeError> {
    let mut vars = Vec::new();
    let mut resort = BTreeMap::new();
    for (name, sort) in &r.vars {
        let swapped = swap_sort(sort, old_state, new_state);
        if &swapped != sort {
            resort.insert(name.clone(), Formula::var(name.clone(), swapped.clone()));
        }
        vars.push((name.clone(), swapped));
    }
    let fix = |f: &Formula| f.subst(&resort);
    let fix_app = |app: &crate::lang::RelationApp| crate::lang::RelationApp {
        relation: app.relation.clone(),
        args: app
            .args
            .iter()
            .map(|a| match a {
                RelArg::F(f) => RelArg::F(fix(f)),
                t => t.clone(),
            })
            .collect(),
    };

    let mut body: Vec<_> = r.body.iter().map(&fix_app).collect();
    let mut head = fix_app(&r.head);
    let mut constraint = fix(&r.constraint);

    if recursive {
        let t = term_position(&head.args).ok_or_else(|| {
            EncodeError::UnsupportedRule("rule head has no term argument".into())
        })?;
        if t != 1 {
            return Err(EncodeError::UnsupportedRule(
                "bounding needs a single-input relation".into(),
            ));
        }
        let RelArg::F(Formula::Var(g_name, g_sort)) = &head.args[0] else {
            return Err(EncodeError::UnsupportedRule(
                "bounding needs a plain state variable as the rule input".into(),
            ));
        };
        if g_sort != new_state {
            return Err(EncodeError::UnsupportedRule(
                "bounding needs a state-sorted rule input".into(),
            ));
        }
        let g = Formula::var(g_name.clone(), g_sort.clone());
        let fuel = || Formula::field_get(BOUND_FIELD, g.clone());
        constraint = conjoin(constraint, Formula::lt(Formula::IntConst(0), fuel()));

        let mut has_self = false;
        for app in &mut body {
            if app.term_ref() != Some(TermRef::SelfTerm) {
                continue;
            }
            has_self = true;
            let tp = term_position(&app.args).expect("self premise has a term");
            if tp != 1 {
                return Err(EncodeError::UnsupportedRule(
                    "bounding needs a single-input recursive premise".into(),
                ));
            }
            let RelArg::F(arg_in) = &app.args[0] else {
                unreachable!("term position is 1");
            };
            let spent = Formula::Sub(
                Box::new(fuel()),
                Box::new(Formula::IntConst(1)),
            );
            app.args[0] =
                RelArg::F(Formula::field_set(BOUND_FIELD, arg_in.clone(), spent));
        }
        // The recursive call's output carries its own (smaller) fuel;
        // put the caller's back so the counter threads transparently.
        if has_self && head.args.len() == t + 2 {
            if let RelArg::F(out) = &head.args[t + 1] {
                if out.sort().ok().as_ref() == Some(new_state) {
                    head.args[t + 1] = RelArg::F(Formula::field_set(
                        BOUND_FIELD,
                        out.clone(),
                        fuel(),
                    ));
                }
            }
        }
    }

    Ok(SemanticRule {
        production: r.production,
        vars,
        body,
        constraint,
        head,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::{xor_problem, xor_singleton_problem};

    #[test]
    fn fuel_guards_only_recursive_productions() {
        let b = make_bounded(&xor_problem(), 4).unwrap();
        assert_eq!(b.transforms.bounded, Some(4));
        for r in b.semantics.values().flatten() {
            r.check_closed().unwrap();
        }
        // Both while rules demand fuel.
        for r in &b.semantics[&1] {
            let c = format!("{:?}", r.constraint);
            assert!(c.contains("Lt(IntConst(0)"), "missing guard: {c}");
        }
        // Straight-line rules are untouched apart from the state sort:
        // no fuel guard and no fuel reads or writes.
        let assign = format!("{:?}", b.semantics[&4][0].constraint);
        assert!(!assign.contains("Lt(IntConst(0)"));
        assert!(!assign.contains(&format!("FieldGet(\"{BOUND_FIELD}\"")));
        assert!(!assign.contains(&format!("FieldSet(\"{BOUND_FIELD}\"")));
    }

    #[test]
    fn recursion_spends_fuel_and_the_head_restores_it() {
        let b = make_bounded(&xor_singleton_problem(), 2).unwrap();
        let entered = &b.semantics[&1][0];
        let rec = entered
            .body
            .iter()
            .find(|a| a.term_ref() == Some(TermRef::SelfTerm))
            .unwrap();
        let rec_in = format!("{:?}", rec.args[0]);
        assert!(rec_in.contains("Sub"), "no decrement: {rec_in}");
        let head_out = format!("{:?}", entered.head.args[2]);
        assert!(
            head_out.contains("FieldSet") && head_out.contains(BOUND_FIELD),
            "no restore: {head_out}"
        );
    }

    #[test]
    fn examples_gain_fuel_and_keep_only_named_fields() {
        let b = make_bounded(&xor_problem(), 7).unwrap();
        let ex = &b.spec.examples().unwrap()[0];
        assert_eq!(
            ex.input.get(BOUND_FIELD),
            Some(&crate::interp::Value::Int(7))
        );
        match &ex.output {
            ExampleOutput::Partial(pairs) => {
                assert!(pairs.iter().all(|(n, _)| n != BOUND_FIELD))
            }
            other => panic!("unexpected output {other:?}"),
        }
    }

    #[test]
    fn transformed_problems_are_rejected() {
        let once = make_bounded(&xor_problem(), 3).unwrap();
        assert!(matches!(
            make_bounded(&once, 3),
            Err(EncodeError::UnsupportedRule(_))
        ));
    }
}
