//! Inverse of the parser: render a [`Problem`] back to the file format.
//! `parse_problem(print_problem(p))` reproduces `p` for every problem the
//! parser or the builtin builders can produce.

use super::{
    sem_relation, BuiltinSemantics, Example, ExampleOutput, Problem, RegexParams, Specification,
};
use crate::interp::{Valuation, Value};
use crate::lang::RelArgSort;
use std::fmt::Write;

fn value_sexpr(v: &Value) -> String {
    match v {
        Value::State(s) => bindings_sexpr(s),
        other => other.to_string(),
    }
}

fn bindings_sexpr(v: &Valuation) -> String {
    let mut out = String::from("(");
    for (i, (name, value)) in v.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({name} {})", value_sexpr(value));
    }
    out.push(')');
    out
}

fn example_sexpr(e: &Example, regex: Option<RegexParams>) -> String {
    if let Some(_params) = regex {
        // Reconstruct the (w (...)) shorthand from the padded input state.
        let len = match e.input.get("len") {
            Some(Value::Int(n)) => *n as usize,
            _ => 0,
        };
        let word: Vec<String> = (0..len)
            .map(|i| match e.input.get(&format!("w{i}")) {
                Some(Value::Int(c)) => c.to_string(),
                _ => "0".into(),
            })
            .collect();
        if let ExampleOutput::Partial(pairs) = &e.output {
            if let [(entry, Value::Bool(accept))] = pairs.as_slice() {
                if *entry == RegexParams::entry(0, len) {
                    return format!(
                        "(constraint (example :input ((w ({}))) :output {accept}))",
                        word.join(" ")
                    );
                }
            }
        }
    }
    let output = match &e.output {
        ExampleOutput::Exact(v) => value_sexpr(v),
        ExampleOutput::Partial(pairs) => {
            let inner: Vec<String> = pairs
                .iter()
                .map(|(n, v)| format!("({n} {})", value_sexpr(v)))
                .collect();
            format!("({})", inner.join(" "))
        }
        ExampleOutput::Constraint(f) => f.to_string(),
    };
    format!(
        "(constraint (example :input {} :output {output}))",
        bindings_sexpr(&e.input)
    )
}

/// Render a problem to the s-expression file format.
pub fn print_problem(p: &Problem) -> String {
    let mut out = String::from("(set-info :format 1)\n");
    if let Some(name) = &p.name {
        let escaped = name.replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "(set-info :name \"{escaped}\")");
    }

    let regex = p.regex_params();
    if let Some(params) = regex {
        let _ = writeln!(
            out,
            "(builtin-semantics regex :alphabet {} :maxlen {})",
            params.alphabet, params.max_len
        );
    } else {
        for (nt, _) in &p.grammar.nonterminals {
            let sig = &p.signatures[&sem_relation(nt)];
            let (input, output) = match sig.as_slice() {
                [RelArgSort::Value(i), RelArgSort::TermOf(_), RelArgSort::Value(o)] => (i, o),
                _ => unreachable!("frontend signatures are input/term/output"),
            };
            let _ = writeln!(
                out,
                "(declare-nonterminal {nt} :input {input} :output {output})"
            );
        }
        for prod in &p.grammar.productions {
            let mut shape = prod.op.clone();
            for r in &prod.rhs {
                let _ = write!(shape, " {r}");
            }
            let _ = writeln!(out, "(production {} {} ({shape}))", prod.id, prod.lhs);
        }
        if p.builtin == Some(BuiltinSemantics::Impv) {
            out.push_str("(builtin-semantics impv)\n");
        } else {
            for rules in p.semantics.values() {
                for rule in rules {
                    let vars: Vec<String> = rule
                        .vars
                        .iter()
                        .map(|(n, s)| format!("({n} {s})"))
                        .collect();
                    let body: Vec<String> = rule.body.iter().map(|a| a.to_string()).collect();
                    let _ = writeln!(
                        out,
                        "(rule {} :vars ({}) :body ({}) :constraint {} :head {})",
                        rule.production,
                        vars.join(" "),
                        body.join(" "),
                        rule.constraint,
                        rule.head
                    );
                }
            }
        }
    }

    match &p.spec {
        Specification::Examples(examples) => {
            for e in examples {
                let _ = writeln!(out, "{}", example_sexpr(e, regex));
            }
        }
        Specification::Formula { formula, .. } => {
            let _ = writeln!(out, "(constraint (formula {formula}))");
        }
    }
    if regex.is_none() {
        let _ = writeln!(out, "(synth-start {})", p.grammar.start);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{parse_problem, samples};

    fn round_trip(p: &Problem) {
        let text = print_problem(p);
        let back = parse_problem(&text).unwrap_or_else(|e| panic!("{e}\nin:\n{text}"));
        assert_eq!(back.name, p.name);
        assert_eq!(back.grammar, p.grammar);
        assert_eq!(back.semantics, p.semantics);
        assert_eq!(back.signatures, p.signatures);
        assert_eq!(back.spec, p.spec);
        assert_eq!(back.builtin, p.builtin);
    }

    #[test]
    fn builtin_problems_round_trip() {
        round_trip(&samples::xor_problem());
        round_trip(&samples::xor_singleton_problem());
        round_trip(&samples::regex_problem(2, 3, &[(&[0, 1], true), (&[], false)]));
        round_trip(&samples::lia_limited_problem(samples::lia_spec_gt_both()));
    }

    #[test]
    fn printed_output_uses_first_variable_shorthand() {
        let text = print_problem(&samples::xor_problem());
        assert!(text.contains(":output ((x 15))"), "{text}");
        assert!(text.contains("(builtin-semantics impv)"));
    }
}
