//! Fused clauses: one relation `fuse_N` per nonterminal that constrains
//! syntax and semantics together, so the solver never enumerates a
//! listing without simultaneously evaluating it.
//!
//! `fuse_N(ins, L_in, outs, L_out)` holds when `L_out` is the listing of
//! some N-term prepended to `L_in` and that term maps `ins` to `outs`.
//! Children chain right to left like the syntax clauses, so the clause
//! both builds the listing and evaluates it in one derivation. Loop
//! productions recurse through the plain semantic relation over the
//! completed listing (the recursion consumes a term that is only finished
//! at the head), so their presence pulls the full semantic clause set in
//! as support; unused children likewise pull in the syntax clauses.

use crate::lang::TermRef;
use crate::problem::{fuse_relation, Problem};

use super::ir::{ChcProgram, EncodeError, Representation};
use super::semantics::{encode_semantics, flatten_signature, translate_rule, RuleMode};
use super::syntax::encode_syntax;

/// Emit the fused clause system: fused clauses for every rule plus
/// whatever plain semantic and syntax support they reference.
pub fn encode_fused(p: &Problem, prog: &mut ChcProgram) -> Result<(), EncodeError> {
    if !prog.representation.is_listing() {
        return Err(EncodeError::NotListingRep("fused encoding"));
    }
    if prog.representation == Representation::List {
        prog.add_list_datatype();
    }
    for (name, sig) in &p.signatures {
        let nt = name.strip_prefix("sem_").ok_or_else(|| {
            EncodeError::UnsupportedRule(format!("cannot fuse non-semantic relation {name}"))
        })?;
        prog.declare(fuse_relation(nt), flatten_signature(sig, prog.representation)?);
    }

    let mut need_syn = false;
    let mut need_sem = false;
    for (pid, rules) in &p.semantics {
        let prod = p.grammar.production(*pid).ok_or_else(|| {
            EncodeError::UnsupportedRule(format!("rules for unknown production {pid}"))
        })?;
        for rule in rules {
            if rule
                .body
                .iter()
                .any(|pr| pr.term_ref() == Some(TermRef::SelfTerm))
            {
                need_sem = true;
            }
            let clause = translate_rule(prod, rule, prog.representation, RuleMode::Fuse, &mut need_syn)?;
            prog.clauses.push(clause);
        }
    }

    if need_sem {
        need_syn |= encode_semantics(p, prog)?;
    }
    if need_syn {
        encode_syntax(&p.grammar, prog)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::ir::ChcExpr;
    use crate::encode::syntax::cons;
    use crate::problem::samples::xor_problem;

    #[test]
    fn tree_representation_cannot_fuse() {
        let p = xor_problem();
        let mut prog = ChcProgram::new(Representation::Tree);
        assert_eq!(
            encode_fused(&p, &mut prog),
            Err(EncodeError::NotListingRep("fused encoding"))
        );
    }

    #[test]
    fn fused_while_recurses_through_the_plain_relation() {
        let p = xor_problem();
        let mut prog = ChcProgram::new(Representation::List);
        encode_fused(&p, &mut prog).unwrap();
        let c = prog
            .clauses
            .iter()
            .find(|c| {
                c.head.as_ref().map(|h| h.relation.as_str()) == Some("fuse_Start")
                    && c.body.len() == 3
            })
            .unwrap();
        // Children target the fused relations; recursion stays on sem.
        assert_eq!(c.body[0].relation, "fuse_B");
        assert_eq!(c.body[1].relation, "fuse_S");
        assert_eq!(c.body[2].relation, "sem_Start");
        let whole = cons(ChcExpr::Int(1), ChcExpr::sym("b@0"));
        // The head builds the listing; the recursion consumes it whole,
        // leaving exactly the head's incoming listing.
        let head = c.head.as_ref().unwrap();
        assert_eq!(head.args[2], ChcExpr::sym("b@2"));
        assert_eq!(head.args[5], whole);
        assert_eq!(c.body[2].args[2], whole);
        assert_eq!(c.body[2].args[5], ChcExpr::sym("b@2"));
        // Child listings chain right to left: B innermost, S after it.
        assert_eq!(c.body[0].args[2], ChcExpr::sym("b@1"));
        assert_eq!(c.body[0].args[4], ChcExpr::sym("b@0"));
        assert_eq!(c.body[1].args[2], ChcExpr::sym("b@2"));
        assert_eq!(c.body[1].args[5], ChcExpr::sym("b@1"));
        // Loop support: the plain semantic and syntax clauses came along.
        assert!(prog.relations.contains_key("sem_Start"));
        assert!(prog
            .clauses
            .iter()
            .any(|c| c.head.as_ref().map(|h| h.relation.as_str()) == Some("syn_S")));
    }

    #[test]
    fn fused_exit_rule_is_generated_for_the_skipped_body() {
        let p = xor_problem();
        let mut prog = ChcProgram::new(Representation::Array);
        encode_fused(&p, &mut prog).unwrap();
        // The while-skip rule has only the guard premise plus a syntax
        // advance over the body segment, fused like any other rule.
        let c = prog
            .clauses
            .iter()
            .find(|c| {
                c.head.as_ref().map(|h| h.relation.as_str()) == Some("fuse_Start")
                    && c.body.iter().any(|b| b.relation == "syn_S")
            })
            .unwrap();
        assert_eq!(c.body.len(), 2);
        assert_eq!(c.body[0].relation, "fuse_B");
    }
}
