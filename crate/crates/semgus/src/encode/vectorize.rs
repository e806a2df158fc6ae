//! Vectorized semantics: one relation application carries all examples at
//! once, so the realizability query has a single premise instead of one
//! per example and the solver reasons about the example vector jointly.
//!
//! Every value argument becomes an n-entry vector, flattened by the
//! clause encoders. State vectors travel with a parallel vector of
//! liveness flags; a dead entry stands for the absorbing bottom value and
//! its state and outputs are simply left unconstrained (every constraint
//! conjunct is guarded by the entry's flag). Branch and loop bodies run
//! on flags restricted to the entries whose guard selects them, and the
//! merged output picks per entry between the body result and the
//! untouched input. Statements never change liveness, so rules thread the
//! same flag variables through; expression relations return bare value
//! vectors whose dead entries are unconstrained.

use std::collections::BTreeMap;

use crate::lang::{Formula, Production, RelArg, RelArgSort, SemanticRule, Sort, TermRef};
use crate::problem::{impv_op, sem_relation, ImpvOp, Problem, Transforms};

use super::ir::EncodeError;

struct VecBuilder<'a> {
    prod: &'a Production,
    state: &'a Sort,
    n: usize,
}

impl VecBuilder<'_> {
    fn names(&self, base: &str) -> Vec<String> {
        (0..self.n).map(|i| format!("{base}{i}")).collect()
    }

    fn vars(&self, base: &str, sort: &Sort) -> Vec<Formula> {
        self.names(base)
            .into_iter()
            .map(|name| Formula::var(name, sort.clone()))
            .collect()
    }

    fn states(&self, base: &str) -> Vec<Formula> {
        self.vars(base, self.state)
    }

    fn flags(&self, base: &str) -> Vec<Formula> {
        self.vars(base, &Sort::Bool)
    }

    fn decls(&self, base: &str, sort: &Sort) -> Vec<(String, Sort)> {
        self.names(base)
            .into_iter()
            .map(|name| (name, sort.clone()))
            .collect()
    }

    /// Relation arguments in vector layout: input states, input flags,
    /// the term, outputs, and (for statements) output flags.
    fn args(
        ins: &[Formula],
        in_flags: &[Formula],
        t: TermRef,
        outs: &[Formula],
        out_flags: Option<&[Formula]>,
    ) -> Vec<RelArg> {
        let mut args: Vec<RelArg> = ins.iter().cloned().map(RelArg::F).collect();
        args.extend(in_flags.iter().cloned().map(RelArg::F));
        args.push(RelArg::T(t));
        args.extend(outs.iter().cloned().map(RelArg::F));
        if let Some(fs) = out_flags {
            args.extend(fs.iter().cloned().map(RelArg::F));
        }
        args
    }

    fn child(
        &self,
        i: usize,
        ins: &[Formula],
        in_flags: &[Formula],
        outs: &[Formula],
        out_flags: Option<&[Formula]>,
    ) -> crate::lang::RelationApp {
        crate::lang::RelationApp::new(
            sem_relation(&self.prod.rhs[i]),
            Self::args(ins, in_flags, TermRef::Child(i), outs, out_flags),
        )
    }

    fn head_or_recurse(
        &self,
        ins: &[Formula],
        in_flags: &[Formula],
        outs: &[Formula],
        out_flags: Option<&[Formula]>,
    ) -> crate::lang::RelationApp {
        crate::lang::RelationApp::new(
            sem_relation(&self.prod.lhs),
            Self::args(ins, in_flags, TermRef::SelfTerm, outs, out_flags),
        )
    }

    /// Conjunction of per-entry conditions, each guarded by its flag.
    fn guarded(flags: &[Formula], conds: Vec<Formula>) -> Formula {
        Formula::And(
            flags
                .iter()
                .zip(conds)
                .map(|(l, c)| Formula::implies(l.clone(), c))
                .collect(),
        )
    }

    fn rule(
        &self,
        vars: Vec<(String, Sort)>,
        body: Vec<crate::lang::RelationApp>,
        constraint: Formula,
        head: crate::lang::RelationApp,
    ) -> SemanticRule {
        SemanticRule {
            production: self.prod.id,
            vars,
            body,
            constraint,
            head,
        }
    }

    /// Expression rule: evaluate every child on the input vector, then
    /// pin each live output entry to `expr(i, state_i, child_values_i)`.
    fn expr_rule(
        &self,
        expr: impl Fn(usize, &Formula, &[Formula]) -> Formula,
    ) -> SemanticRule {
        let g = self.states("G");
        let l = self.flags("l");
        let mut vars = self.decls("G", self.state);
        vars.extend(self.decls("l", &Sort::Bool));
        let mut body = Vec::new();
        let mut child_vals: Vec<Vec<Formula>> = Vec::new();
        for (j, cs) in self.prod.rhs_sorts.iter().enumerate() {
            let base = format!("v{}_", j + 1);
            let vals = self.vars(&base, cs);
            vars.extend(self.decls(&base, cs));
            body.push(self.child(j, &g, &l, &vals, None));
            child_vals.push(vals);
        }
        let out = self.vars("v", &self.prod.lhs_sort);
        vars.extend(self.decls("v", &self.prod.lhs_sort));
        let conds = (0..self.n)
            .map(|i| {
                let per_child: Vec<Formula> =
                    child_vals.iter().map(|vals| vals[i].clone()).collect();
                Formula::eq(out[i].clone(), expr(i, &g[i], &per_child))
            })
            .collect();
        self.rule(
            vars,
            body,
            Self::guarded(&l, conds),
            self.head_or_recurse(&g, &l, &out, None),
        )
    }
}

fn vec_rules(
    prod: &Production,
    op: &ImpvOp,
    state: &Sort,
    n: usize,
) -> Vec<SemanticRule> {
    let b = VecBuilder { prod, state, n };
    let g = b.states("G");
    let l = b.flags("l");
    let base_vars = || {
        let mut vars = b.decls("G", state);
        vars.extend(b.decls("l", &Sort::Bool));
        vars
    };
    let per_entry = |f: &dyn Fn(usize) -> Formula| (0..n).map(f).collect::<Vec<_>>();

    match op {
        ImpvOp::While => {
            let bv = b.flags("b");
            let g1 = b.states("G1_");
            let g2 = b.states("G2_");
            // Body and recursion see only entries whose guard held.
            let proj: Vec<Formula> = (0..n)
                .map(|i| Formula::And(vec![l[i].clone(), bv[i].clone()]))
                .collect();
            let go = b.states("Go");
            let mut vars = base_vars();
            vars.extend(b.decls("b", &Sort::Bool));
            vars.extend(b.decls("G1_", state));
            vars.extend(b.decls("G2_", state));
            vars.extend(b.decls("Go", state));
            let merge = per_entry(&|i| {
                Formula::eq(
                    go[i].clone(),
                    Formula::ite(bv[i].clone(), g2[i].clone(), g[i].clone()),
                )
            });
            let entered = b.rule(
                vars,
                vec![
                    b.child(0, &g, &l, &bv, None),
                    b.child(1, &g, &proj, &g1, Some(&proj)),
                    b.head_or_recurse(&g1, &proj, &g2, Some(&proj)),
                ],
                Formula::And(vec![
                    Formula::Or(proj.clone()),
                    VecBuilder::guarded(&l, merge),
                ]),
                b.head_or_recurse(&g, &l, &go, Some(&l)),
            );

            let mut skip_vars = base_vars();
            skip_vars.extend(b.decls("b", &Sort::Bool));
            let all_false = per_entry(&|i| {
                Formula::eq(bv[i].clone(), Formula::BoolConst(false))
            });
            let skipped = b.rule(
                skip_vars,
                vec![b.child(0, &g, &l, &bv, None)],
                VecBuilder::guarded(&l, all_false),
                b.head_or_recurse(&g, &l, &g, Some(&l)),
            );
            vec![entered, skipped]
        }
        ImpvOp::Seq => {
            let m = b.states("M");
            let go = b.states("Go");
            let mut vars = base_vars();
            vars.extend(b.decls("M", state));
            vars.extend(b.decls("Go", state));
            vec![b.rule(
                vars,
                vec![
                    b.child(0, &g, &l, &m, Some(&l)),
                    b.child(1, &m, &l, &go, Some(&l)),
                ],
                Formula::BoolConst(true),
                b.head_or_recurse(&g, &l, &go, Some(&l)),
            )]
        }
        ImpvOp::IteStmt => {
            let bv = b.flags("b");
            let g1 = b.states("G1_");
            let g2 = b.states("G2_");
            let go = b.states("Go");
            let taken: Vec<Formula> = (0..n)
                .map(|i| Formula::And(vec![l[i].clone(), bv[i].clone()]))
                .collect();
            let other: Vec<Formula> = (0..n)
                .map(|i| Formula::And(vec![l[i].clone(), Formula::not(bv[i].clone())]))
                .collect();
            let mut vars = base_vars();
            vars.extend(b.decls("b", &Sort::Bool));
            vars.extend(b.decls("G1_", state));
            vars.extend(b.decls("G2_", state));
            vars.extend(b.decls("Go", state));
            let merge = per_entry(&|i| {
                Formula::eq(
                    go[i].clone(),
                    Formula::ite(bv[i].clone(), g1[i].clone(), g2[i].clone()),
                )
            });
            vec![b.rule(
                vars,
                vec![
                    b.child(0, &g, &l, &bv, None),
                    b.child(1, &g, &taken, &g1, Some(&taken)),
                    b.child(2, &g, &other, &g2, Some(&other)),
                ],
                VecBuilder::guarded(&l, merge),
                b.head_or_recurse(&g, &l, &go, Some(&l)),
            )]
        }
        ImpvOp::Assign(x) => {
            let fs = &prod.rhs_sorts[0];
            let v = b.vars("v", fs);
            let go = b.states("Go");
            let mut vars = base_vars();
            vars.extend(b.decls("v", fs));
            vars.extend(b.decls("Go", state));
            let conds = per_entry(&|i| {
                Formula::eq(
                    go[i].clone(),
                    Formula::field_set(x, g[i].clone(), v[i].clone()),
                )
            });
            vec![b.rule(
                vars,
                vec![b.child(0, &g, &l, &v, None)],
                VecBuilder::guarded(&l, conds),
                b.head_or_recurse(&g, &l, &go, Some(&l)),
            )]
        }
        ImpvOp::Store(a) => {
            let idx = b.vars("i", &Sort::Int);
            let v = b.vars("v", &Sort::Int);
            let go = b.states("Go");
            let mut vars = base_vars();
            vars.extend(b.decls("i", &Sort::Int));
            vars.extend(b.decls("v", &Sort::Int));
            vars.extend(b.decls("Go", state));
            let conds = per_entry(&|i| {
                let stored = Formula::Store(
                    Box::new(Formula::field_get(a, g[i].clone())),
                    Box::new(idx[i].clone()),
                    Box::new(v[i].clone()),
                );
                Formula::eq(
                    go[i].clone(),
                    Formula::field_set(a, g[i].clone(), stored),
                )
            });
            vec![b.rule(
                vars,
                vec![
                    b.child(0, &g, &l, &idx, None),
                    b.child(1, &g, &l, &v, None),
                ],
                VecBuilder::guarded(&l, conds),
                b.head_or_recurse(&g, &l, &go, Some(&l)),
            )]
        }
        ImpvOp::VarRef(x) => {
            vec![b.expr_rule(|_, gi, _| Formula::field_get(x, gi.clone()))]
        }
        ImpvOp::IntConst(k) => vec![b.expr_rule(|_, _, _| Formula::IntConst(*k))],
        ImpvOp::BvConst { value, width } => {
            vec![b.expr_rule(|_, _, _| Formula::BitVecConst(*value, *width))]
        }
        ImpvOp::BoolConst(c) => vec![b.expr_rule(|_, _, _| Formula::BoolConst(*c))],
        ImpvOp::Select(a) => vec![b.expr_rule(|_, gi, vs| {
            Formula::Select(
                Box::new(Formula::field_get(a, gi.clone())),
                Box::new(vs[0].clone()),
            )
        })],
        ImpvOp::IteExpr => vec![b.expr_rule(|_, _, vs| {
            Formula::ite(vs[0].clone(), vs[1].clone(), vs[2].clone())
        })],
        op => {
            let op = op.clone();
            vec![b.expr_rule(move |_, _, vs| {
                let a1 = || Box::new(vs[0].clone());
                let a2 = || Box::new(vs[1].clone());
                match &op {
                    ImpvOp::Add => Formula::Add(a1(), a2()),
                    ImpvOp::Sub => Formula::Sub(a1(), a2()),
                    ImpvOp::Lt | ImpvOp::BvUlt => Formula::Lt(a1(), a2()),
                    ImpvOp::Eq => Formula::Eq(a1(), a2()),
                    ImpvOp::BvAnd => Formula::BvAnd(a1(), a2()),
                    ImpvOp::BvOr => Formula::BvOr(a1(), a2()),
                    ImpvOp::BvAdd => Formula::BvAdd(a1(), a2()),
                    ImpvOp::BvNot => Formula::BvNot(a1()),
                    ImpvOp::Not => Formula::Not(a1()),
                    ImpvOp::And => Formula::And(vec![*a1(), *a2()]),
                    ImpvOp::Or => Formula::Or(vec![*a1(), *a2()]),
                    other => unreachable!("{other:?} handled above"),
                }
            })]
        }
    }
}

/// Rebuild an imperative problem so its relations carry all `n` examples
/// at once. The result is meant for the clause encoders; the
/// interpreter's vector evaluation works on the original problem.
pub fn vectorize(p: &Problem, n: usize) -> Result<Problem, EncodeError> {
    if n == 0 {
        return Err(EncodeError::WidthMismatch {
            width: 0,
            examples: p.spec.examples().map(|e| e.len()).unwrap_or(0),
        });
    }
    if p.transforms != Transforms::default() {
        return Err(EncodeError::UnsupportedRule(
            "vectorization applies to the untransformed problem".into(),
        ));
    }
    let examples = p.spec.examples().ok_or(EncodeError::SpecNotExamples)?;
    if examples.len() != n {
        return Err(EncodeError::WidthMismatch {
            width: n,
            examples: examples.len(),
        });
    }
    let state = p
        .start_input_sort()
        .ok_or_else(|| {
            EncodeError::UnsupportedRule("problem has no start input sort".into())
        })?
        .clone();

    let mut semantics = BTreeMap::new();
    for prod in &p.grammar.productions {
        let op = impv_op(prod, &state)
            .map_err(|_| EncodeError::NotImpvSubgrammar(prod.id))?;
        semantics.insert(prod.id, vec_rules(prod, &op, &state, n));
    }

    let mut signatures = BTreeMap::new();
    for (nt, _) in &p.grammar.nonterminals {
        let rel = sem_relation(nt);
        let (ins, outs) = p
            .relation_io(&rel)
            .ok_or_else(|| EncodeError::UnsupportedRule(format!("no signature for {rel}")))?;
        if ins.len() != 1 || outs.len() != 1 {
            return Err(EncodeError::UnsupportedRule(format!(
                "{rel} is not a one-input one-output relation"
            )));
        }
        let out = outs[0].clone();
        let mut sig = vec![
            RelArgSort::Value(Sort::Vector(Box::new(ins[0].clone()), n)),
            RelArgSort::Value(Sort::Vector(Box::new(Sort::Bool), n)),
            RelArgSort::TermOf(nt.clone()),
            RelArgSort::Value(Sort::Vector(Box::new(out.clone()), n)),
        ];
        if out.is_state() {
            sig.push(RelArgSort::Value(Sort::Vector(Box::new(Sort::Bool), n)));
        }
        signatures.insert(rel, sig);
    }

    Ok(Problem {
        name: p.name.clone(),
        grammar: p.grammar.clone(),
        semantics,
        signatures,
        spec: p.spec.clone(),
        builtin: None,
        transforms: Transforms {
            vector_width: Some(n),
            ..Transforms::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::{xor_problem, xor_singleton_problem};

    #[test]
    fn rules_are_closed_and_one_per_production_except_while() {
        let v = vectorize(&xor_problem(), 3).unwrap();
        assert_eq!(v.semantics.values().map(Vec::len).sum::<usize>(), 10);
        for rules in v.semantics.values() {
            for r in rules {
                r.check_closed().unwrap();
            }
        }
        assert_eq!(v.transforms.vector_width, Some(3));
    }

    #[test]
    fn signatures_carry_vector_sorts_with_state_flags() {
        let v = vectorize(&xor_problem(), 3).unwrap();
        let sig = &v.signatures["sem_Start"];
        assert_eq!(sig.len(), 5);
        assert!(matches!(
            &sig[1],
            RelArgSort::Value(Sort::Vector(inner, 3)) if **inner == Sort::Bool
        ));
        // Expression relations return bare value vectors.
        let sig_e = &v.signatures["sem_E"];
        assert_eq!(sig_e.len(), 4);
        assert!(matches!(
            &sig_e[3],
            RelArgSort::Value(Sort::Vector(inner, 3)) if **inner == Sort::BitVec(32)
        ));
    }

    #[test]
    fn while_body_runs_on_guard_restricted_flags() {
        let v = vectorize(&xor_singleton_problem(), 1).unwrap();
        let entered = &v.semantics[&1][0];
        assert_eq!(entered.body.len(), 3);
        let proj = Formula::And(vec![
            Formula::var("l0", Sort::Bool),
            Formula::var("b0", Sort::Bool),
        ]);
        // Body statement premise: input flags are the projection.
        match &entered.body[1].args[1] {
            RelArg::F(f) => assert_eq!(f, &proj),
            other => panic!("unexpected arg {other:?}"),
        }
        // Recursion keeps the projected flags and must see some live
        // entry with a true guard.
        match &entered.body[2].term_ref() {
            Some(TermRef::SelfTerm) => {}
            other => panic!("unexpected term ref {other:?}"),
        }
        let cons = format!("{:?}", entered.constraint);
        assert!(cons.starts_with("And([Or("));
    }

    #[test]
    fn width_must_match_the_example_count() {
        assert_eq!(
            vectorize(&xor_problem(), 2).unwrap_err(),
            EncodeError::WidthMismatch {
                width: 2,
                examples: 3
            }
        );
    }

    #[test]
    fn transformed_problems_are_rejected() {
        let mut p = xor_problem();
        p.transforms.bounded = Some(3);
        assert!(matches!(
            vectorize(&p, 3),
            Err(EncodeError::UnsupportedRule(_))
        ));
    }
}
