//! Deterministic SMT-LIB 2 printing of a clause program in the HORN
//! fragment. Identical programs print byte-identically: datatypes in
//! registration order, relations in name order, clauses in generation
//! order, and no environment-dependent content anywhere.

use std::fmt::Write;

use super::ir::{ChcApp, ChcExpr, ChcProgram, ChcSort, Clause, DatatypeDecl, EncodeError};

fn write_sort(out: &mut String, s: &ChcSort) -> Result<(), EncodeError> {
    match s {
        ChcSort::Int => out.push_str("Int"),
        ChcSort::Bool => out.push_str("Bool"),
        ChcSort::BitVec(w) => {
            if *w == 0 {
                return Err(EncodeError::UnsupportedSort("zero-width bitvector".into()));
            }
            let _ = write!(out, "(_ BitVec {w})");
        }
        ChcSort::IntArray => out.push_str("(Array Int Int)"),
        ChcSort::Datatype(name) => out.push_str(name),
    }
    Ok(())
}

fn write_expr(out: &mut String, e: &ChcExpr) {
    match e {
        ChcExpr::Sym(s) => out.push_str(s),
        ChcExpr::Int(k) => {
            if *k < 0 {
                let _ = write!(out, "(- {})", k.unsigned_abs());
            } else {
                let _ = write!(out, "{k}");
            }
        }
        ChcExpr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ChcExpr::BitVec(v, w) => {
            let _ = write!(out, "(_ bv{v} {w})");
        }
        ChcExpr::ConstArray(d) => {
            if *d < 0 {
                let _ = write!(out, "((as const (Array Int Int)) (- {}))", d.unsigned_abs());
            } else {
                let _ = write!(out, "((as const (Array Int Int)) {d})");
            }
        }
        ChcExpr::App(op, args) => {
            if args.is_empty() {
                out.push_str(op);
                return;
            }
            out.push('(');
            out.push_str(op);
            for a in args {
                out.push(' ');
                write_expr(out, a);
            }
            out.push(')');
        }
    }
}

fn write_app(out: &mut String, app: &ChcApp) {
    if app.args.is_empty() {
        out.push_str(&app.relation);
        return;
    }
    out.push('(');
    out.push_str(&app.relation);
    for a in &app.args {
        out.push(' ');
        write_expr(out, a);
    }
    out.push(')');
}

fn write_datatypes(out: &mut String, dts: &[DatatypeDecl]) -> Result<(), EncodeError> {
    out.push_str("(declare-datatypes (");
    for (i, dt) in dts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} 0)", dt.name);
    }
    out.push_str(") (");
    for (i, dt) in dts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('(');
        for (j, (ctor, sels)) in dt.ctors.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push('(');
            out.push_str(ctor);
            for (sel, sort) in sels {
                let _ = write!(out, " ({sel} ");
                write_sort(out, sort)?;
                out.push(')');
            }
            out.push(')');
        }
        out.push(')');
    }
    out.push_str("))\n");
    Ok(())
}

fn write_clause(out: &mut String, c: &Clause) {
    out.push_str("(assert ");
    let close_forall = if c.vars.is_empty() {
        false
    } else {
        out.push_str("(forall (");
        for (i, (name, sort)) in c.vars.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "({name} ");
            let mut sort_buf = String::new();
            // Zero-width bitvectors are rejected before clauses are built.
            let _ = write_sort(&mut sort_buf, sort);
            out.push_str(&sort_buf);
            out.push(')');
        }
        out.push_str(") ");
        true
    };

    let mut parts: Vec<String> = Vec::new();
    for app in &c.body {
        let mut s = String::new();
        write_app(&mut s, app);
        parts.push(s);
    }
    if !c.constraint.is_true() {
        let mut s = String::new();
        write_expr(&mut s, &c.constraint);
        parts.push(s);
    }

    let head = match &c.head {
        Some(app) => {
            let mut s = String::new();
            write_app(&mut s, app);
            s
        }
        None => "false".to_string(),
    };

    match parts.len() {
        0 => out.push_str(&head),
        1 => {
            let _ = write!(out, "(=> {} {head})", parts[0]);
        }
        _ => {
            let _ = write!(out, "(=> (and {}) {head})", parts.join(" "));
        }
    }

    if close_forall {
        out.push(')');
    }
    out.push_str(")\n");
}

/// Print the program as a standalone HORN script ending in `(check-sat)`.
pub fn emit_smtlib(prog: &ChcProgram) -> Result<String, EncodeError> {
    let mut out = String::new();
    out.push_str("(set-logic HORN)\n");
    if !prog.datatypes.is_empty() {
        write_datatypes(&mut out, &prog.datatypes)?;
    }
    for (name, args) in &prog.relations {
        out.push_str("(declare-fun ");
        out.push_str(name);
        out.push_str(" (");
        for (i, s) in args.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write_sort(&mut out, s)?;
        }
        out.push_str(") Bool)\n");
    }
    for c in &prog.clauses {
        for (_, sort) in &c.vars {
            // Surface sort errors before any clause text is committed.
            let mut probe = String::new();
            write_sort(&mut probe, sort)?;
        }
        write_clause(&mut out, c);
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::ir::Representation;
    use crate::encode::query::build_query;
    use crate::problem::samples::{xor_problem, xor_singleton_problem};

    #[test]
    fn literals_print_in_smtlib_syntax() {
        let mut s = String::new();
        write_expr(&mut s, &ChcExpr::Int(-5));
        s.push(' ');
        write_expr(&mut s, &ChcExpr::BitVec(6, 32));
        s.push(' ');
        write_expr(
            &mut s,
            &ChcExpr::app("store", vec![ChcExpr::ConstArray(0), ChcExpr::Int(0), ChcExpr::Int(7)]),
        );
        assert_eq!(
            s,
            "(- 5) (_ bv6 32) (store ((as const (Array Int Int)) 0) 0 7)"
        );
    }

    #[test]
    fn goal_clause_prints_quantifier_free() {
        let prog = build_query(&xor_problem(), Representation::List, false).unwrap();
        let text = emit_smtlib(&prog).unwrap();
        assert!(text.starts_with("(set-logic HORN)\n"));
        assert!(text.contains("(assert (=> Realizable false))\n"));
        assert!(text.ends_with("(check-sat)\n"));
        assert!(text.contains("(declare-fun Realizable () Bool)"));
        assert!(text.contains("(declare-datatypes ((Lst 0))"));
    }

    #[test]
    fn emission_is_deterministic() {
        let a = emit_smtlib(&build_query(&xor_problem(), Representation::Array, true).unwrap())
            .unwrap();
        let b = emit_smtlib(&build_query(&xor_problem(), Representation::Array, true).unwrap())
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_relation_mentioned_is_declared() {
        for rep in [
            Representation::Tree,
            Representation::List,
            Representation::Array,
        ] {
            let prog = build_query(&xor_singleton_problem(), rep, false).unwrap();
            for c in &prog.clauses {
                for app in c.body.iter().chain(c.head.as_ref()) {
                    assert!(
                        prog.relations.contains_key(&app.relation),
                        "{} undeclared under {:?}",
                        app.relation,
                        rep
                    );
                }
            }
        }
    }
}
