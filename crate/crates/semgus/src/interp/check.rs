//! Example checking: does a candidate term satisfy every input/output
//! example of the problem? This is the verifier behind enumeration and
//! witness post-checks, so every evaluation failure counts as "no".

use std::collections::BTreeMap;

use super::eval::{eval, eval_formula};
use super::regexmat::regex_matrix;
use super::value::Value;
use crate::lang::Term;
use crate::problem::{Example, ExampleOutput, Problem, RegexParams};

/// True iff `t` satisfies every example of `p`'s specification. A formula
/// specification has no examples to check and yields false; callers decide
/// realizability for formulas by other means.
pub fn check_examples(p: &Problem, t: &Term, fuel: u64) -> bool {
    let Some(examples) = p.spec.examples() else {
        return false;
    };
    debug_assert!(!examples.is_empty(), "example specifications are nonempty");
    examples.iter().all(|ex| check_example(p, t, ex, fuel))
}

/// Single-example variant, for counterexample-guided loops that accumulate
/// examples one at a time.
pub fn check_example(p: &Problem, t: &Term, ex: &Example, fuel: u64) -> bool {
    if let Some(params) = p.regex_params() {
        if let Some(verdict) = check_regex(p, params, t, ex) {
            return verdict;
        }
    }
    check_by_eval(p, t, ex, fuel)
}

/// Fast path for regex problems: match matrices are polynomial where the
/// rule-level interpreter re-derives every matrix entry. Only handles
/// partial outputs whose constrained entries lie inside the live region
/// `i <= j <= len` of the word; anything else falls back to `eval`.
fn check_regex(p: &Problem, params: RegexParams, t: &Term, ex: &Example) -> Option<bool> {
    let ExampleOutput::Partial(fields) = &ex.output else {
        return None;
    };
    let word = word_of(&ex.input, params)?;
    let mut wanted = Vec::with_capacity(fields.len());
    for (name, value) in fields {
        let (i, j) = entry_of(name)?;
        if j > word.len() || i > j {
            return None;
        }
        let Value::Bool(b) = value else { return None };
        wanted.push((i, j, *b));
    }
    let m = regex_matrix(p, t, &word).ok()?;
    Some(wanted.into_iter().all(|(i, j, b)| m[i][j] == b))
}

fn word_of(input: &super::value::Valuation, params: RegexParams) -> Option<Vec<i64>> {
    let Value::Int(len) = input.get("len")? else {
        return None;
    };
    let len = usize::try_from(*len).ok()?;
    if len > params.max_len {
        return None;
    }
    (0..len)
        .map(|i| match input.get(&format!("w{i}")) {
            Some(Value::Int(c)) => Some(*c),
            _ => None,
        })
        .collect()
}

fn entry_of(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("m_")?;
    let (i, j) = rest.split_once('_')?;
    Some((i.parse().ok()?, j.parse().ok()?))
}

fn check_by_eval(p: &Problem, t: &Term, ex: &Example, fuel: u64) -> bool {
    let Ok(out) = eval(p, t, &ex.input, fuel) else {
        return false;
    };
    match &ex.output {
        ExampleOutput::Exact(want) => out == *want,
        ExampleOutput::Partial(fields) => match &out {
            Value::State(st) => fields.iter().all(|(name, want)| st.get(name) == Some(want)),
            _ => false,
        },
        ExampleOutput::Constraint(f) => {
            let mut env: BTreeMap<String, Value> = ex
                .input
                .iter()
                .map(|(name, v)| (name.to_string(), v.clone()))
                .collect();
            env.insert("out".into(), out);
            matches!(eval_formula(&env, f), Ok(Value::Bool(true)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::DEFAULT_FUEL;
    use crate::lang::{Formula, Sort};
    use crate::problem::samples::{
        impv_problem, kitchen_grammar, kitchen_state, regex_problem, xor_problem,
        xor_singleton_problem, xor_witness, xy_input,
    };
    use crate::problem::Specification;

    #[test]
    fn witness_passes_the_singleton_and_fails_the_full_suite() {
        let t = xor_witness();
        assert!(check_examples(&xor_singleton_problem(), &t, DEFAULT_FUEL));
        assert!(!check_examples(&xor_problem(), &t, DEFAULT_FUEL));
    }

    #[test]
    fn divergence_counts_as_failure() {
        // while (true) { x := x } never terminates on any input.
        let p = impv_problem(
            kitchen_grammar(),
            &kitchen_state(),
            xor_problem().spec.clone(),
        );
        let t = Term::new(1, vec![Term::leaf(23), Term::new(4, vec![Term::leaf(8)])]);
        assert!(!check_examples(&p, &t, 10_000));
    }

    #[test]
    fn formula_specifications_have_no_examples_to_pass() {
        let mut p = xor_singleton_problem();
        p.spec = Specification::Formula {
            formula: Formula::BoolConst(true),
            verifiable: true,
        };
        assert!(!check_examples(&p, &xor_witness(), DEFAULT_FUEL));
    }

    #[test]
    fn constraint_outputs_bind_inputs_and_out() {
        use crate::problem::{Example, ExampleOutput};
        // Output constraint: out.x = in.x | in.y.
        let constraint = Formula::eq(
            Formula::field_get("x", Formula::var("out", kitchen_state())),
            Formula::BvAnd(
                Box::new(Formula::var("x", Sort::BitVec(32))),
                Box::new(Formula::var("y", Sort::BitVec(32))),
            ),
        );
        let sort = crate::problem::samples::xy_state();
        let mk = |x: u64, y: u64| Example {
            input: xy_input(x, y),
            output: ExampleOutput::Constraint(constraint.clone()),
        };
        let p = impv_problem(
            crate::problem::samples::loop_or_grammar(),
            &sort,
            Specification::Examples(vec![mk(6, 9), mk(12, 10)]),
        );
        // x := x & y satisfies it; x := x | y fails on (6, 9).
        let and_term = Term::new(4, vec![Term::new(8, vec![Term::leaf(6), Term::leaf(7)])]);
        let or_term = Term::new(4, vec![Term::new(9, vec![Term::leaf(6), Term::leaf(7)])]);
        assert!(check_examples(&p, &and_term, DEFAULT_FUEL));
        assert!(!check_examples(&p, &or_term, DEFAULT_FUEL));
    }

    #[test]
    fn regex_examples_use_the_matrix_path() {
        // Accepts exactly the words ending in b.
        let p = regex_problem(
            2,
            4,
            &[
                (&[], false),
                (&[0], false),
                (&[1], true),
                (&[0, 1], true),
                (&[1, 0], false),
            ],
        );
        let b_final = Term::new(
            6,
            vec![
                Term::new(7, vec![Term::new(5, vec![Term::leaf(1), Term::leaf(2)])]),
                Term::leaf(2),
            ],
        );
        let a_final = Term::new(
            6,
            vec![
                Term::new(7, vec![Term::new(5, vec![Term::leaf(1), Term::leaf(2)])]),
                Term::leaf(1),
            ],
        );
        assert!(check_examples(&p, &b_final, DEFAULT_FUEL));
        assert!(!check_examples(&p, &a_final, DEFAULT_FUEL));
    }
}
