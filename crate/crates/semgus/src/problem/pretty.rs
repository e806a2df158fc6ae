//! Human-readable rendering of synthesized terms: imperative terms as
//! statement/expression syntax, regex terms as pattern notation, anything
//! else as plain operator trees.

use super::{impv_op, regex_op, ImpvOp, Problem, RegexOp};
use crate::lang::{Sort, Term};

fn generic(p: &Problem, t: &Term) -> String {
    let op = p
        .grammar
        .production(t.prod_id)
        .map(|prod| prod.op.clone())
        .unwrap_or_else(|| format!("#{}", t.prod_id));
    if t.children.is_empty() {
        op
    } else {
        let children: Vec<String> = t.children.iter().map(|c| generic(p, c)).collect();
        format!("{op}({})", children.join(", "))
    }
}

fn regex_char(c: usize) -> String {
    if c < 26 {
        ((b'a' + c as u8) as char).to_string()
    } else {
        format!("c{c}")
    }
}

fn regex(p: &Problem, t: &Term) -> Option<String> {
    let prod = p.grammar.production(t.prod_id)?;
    let op = regex_op(prod)?;
    let child = |i: usize| regex(p, t.children.get(i)?);
    Some(match op {
        RegexOp::Char(c) => regex_char(c),
        RegexOp::Epsilon => "eps".into(),
        RegexOp::Empty => "phi".into(),
        RegexOp::Union => format!("({}|{})", child(0)?, child(1)?),
        RegexOp::Concat => format!("({}.{})", child(0)?, child(1)?),
        RegexOp::Star => {
            let inner = child(0)?;
            let atomic = inner.len() == 1 || inner.starts_with('(') || inner == "eps" || inner == "phi";
            if atomic {
                format!("{inner}*")
            } else {
                format!("({inner})*")
            }
        }
    })
}

fn impv(p: &Problem, input: &Sort, t: &Term) -> Option<String> {
    let prod = p.grammar.production(t.prod_id)?;
    let op = impv_op(prod, input).ok()?;
    let child = |i: usize| impv(p, input, t.children.get(i)?);
    Some(match op {
        ImpvOp::While => format!("while ({}) {{ {} }}", child(0)?, child(1)?),
        ImpvOp::Seq => format!("{}; {}", child(0)?, child(1)?),
        ImpvOp::IteStmt => format!(
            "if ({}) {{ {} }} else {{ {} }}",
            child(0)?,
            child(1)?,
            child(2)?
        ),
        ImpvOp::Assign(x) => format!("{x} := {}", child(0)?),
        ImpvOp::Store(a) => format!("{a}[{}] := {}", child(0)?, child(1)?),
        ImpvOp::VarRef(x) => x,
        ImpvOp::IntConst(k) => k.to_string(),
        ImpvOp::BvConst { value, .. } => value.to_string(),
        ImpvOp::BoolConst(b) => b.to_string(),
        ImpvOp::Add | ImpvOp::BvAdd => format!("({} + {})", child(0)?, child(1)?),
        ImpvOp::Sub => format!("({} - {})", child(0)?, child(1)?),
        ImpvOp::IteExpr => format!(
            "(if {} then {} else {})",
            child(0)?,
            child(1)?,
            child(2)?
        ),
        ImpvOp::Select(a) => format!("{a}[{}]", child(0)?),
        ImpvOp::Lt | ImpvOp::BvUlt => format!("({} < {})", child(0)?, child(1)?),
        ImpvOp::Eq => format!("({} = {})", child(0)?, child(1)?),
        ImpvOp::BvAnd => format!("({} & {})", child(0)?, child(1)?),
        ImpvOp::BvOr => format!("({} | {})", child(0)?, child(1)?),
        ImpvOp::BvNot => format!("~{}", child(0)?),
        ImpvOp::Not => format!("!{}", child(0)?),
        ImpvOp::And => format!("({} && {})", child(0)?, child(1)?),
        ImpvOp::Or => format!("({} || {})", child(0)?, child(1)?),
    })
}

/// Render a term the way a user would write it: imperative syntax for
/// imperative grammars, pattern notation for regexes, an operator tree
/// otherwise.
pub fn term_surface(p: &Problem, t: &Term) -> String {
    if p.regex_params().is_some() {
        if let Some(s) = regex(p, t) {
            return s;
        }
    }
    if let Some(input) = p.start_input_sort() {
        let input = input.clone();
        if let Some(s) = impv(p, &input, t) {
            return s;
        }
    }
    generic(p, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples;

    #[test]
    fn witness_prints_as_a_loop() {
        let p = samples::xor_singleton_problem();
        assert_eq!(
            term_surface(&p, &samples::xor_witness()),
            "while ((x < y)) { x := (x | y) }"
        );
    }

    #[test]
    fn regex_terms_print_as_patterns() {
        let p = samples::regex_problem(2, 3, &[(&[0], true)]);
        // (a|b)* with ids: chars 1..2, union 5, star 7.
        let t = Term::new(7, vec![Term::new(5, vec![Term::leaf(1), Term::leaf(2)])]);
        assert_eq!(term_surface(&p, &t), "(a|b)*");
        let ab = Term::new(6, vec![Term::leaf(1), Term::leaf(2)]);
        assert_eq!(term_surface(&p, &ab), "(a.b)");
    }

    #[test]
    fn unknown_ops_fall_back_to_trees() {
        let p = samples::lia_limited_problem(samples::lia_spec_gt_x());
        let t = Term::new(5, vec![Term::leaf(6), Term::leaf(8)]);
        assert_eq!(term_surface(&p, &t), "(x + 1)");
        let unknown = Term::leaf(77);
        assert_eq!(term_surface(&p, &unknown), "#77");
    }
}
