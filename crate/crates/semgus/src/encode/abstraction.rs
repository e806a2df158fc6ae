//! Single-bit boolean abstraction of imperative semantics, encoded over
//! integers: 0 = definitely clear, 1 = definitely set, 2 = unknown. The
//! transformed system over-approximates the concrete one, so an
//! unrealizability verdict (`sat`, no satisfying term) transfers back
//! while a `unsat` answer does not.
//!
//! Transformers mirror the abstract interpreter: bitwise and/or/not are
//! exact on definite operands, arithmetic and comparisons give the bit
//! up, boolean connectives are Kleene, equality decides only definite
//! disequality. Loops lose their guard: they may exit whenever the guard
//! is not definitely true, and an entered loop either havocs the state
//! or joins the recursive result with the input, per [`WhileMode`].
//! Conditionals with a definite guard take one branch; an unknown guard
//! joins both.

use std::collections::BTreeMap;

use crate::interp::{Valuation, Value};
use crate::lang::{
    Formula, Grammar, Production, RelArg, RelArgSort, RelationApp, SemanticRule, Sort, TermRef,
};
use crate::problem::{
    impv_op, sem_relation, Example, ExampleOutput, ImpvOp, Problem, Specification, Transforms,
    WhileMode,
};

use super::ir::EncodeError;

const TOP: i64 = 2;

fn int(k: i64) -> Formula {
    Formula::IntConst(k)
}

fn is(v: &Formula, k: i64) -> Formula {
    Formula::eq(v.clone(), int(k))
}

/// Join of two abstract values: equal stays, different gives the bit up.
fn def_join(a: Formula, b: Formula) -> Formula {
    Formula::ite(Formula::eq(a.clone(), b.clone()), a, int(TOP))
}

/// The abstract counterpart of a concrete sort: every trackable scalar
/// becomes the three-valued integer.
fn abs_sort(s: &Sort) -> Result<Sort, EncodeError> {
    match s {
        Sort::Bool | Sort::BitVec(_) => Ok(Sort::Int),
        Sort::State(fields) => {
            let mapped = fields
                .iter()
                .map(|(n, f)| match f {
                    Sort::Bool | Sort::BitVec(_) => Ok((n.clone(), Sort::Int)),
                    other => Err(EncodeError::UnsupportedSort(format!(
                        "cannot abstract state field {n} of sort {other}"
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Sort::State(mapped))
        }
        other => Err(EncodeError::UnsupportedSort(format!(
            "cannot abstract sort {other}"
        ))),
    }
}

/// The tracked bit of a concrete value, as an abstract constant.
fn alpha_value(v: &Value, bit: u32) -> Result<i64, EncodeError> {
    match v {
        Value::BitVec(value, width) => {
            if bit == 0 || bit > *width {
                return Err(EncodeError::UnsupportedValue(format!(
                    "bit {bit} outside width {width}"
                )));
            }
            Ok(((value >> (bit - 1)) & 1) as i64)
        }
        Value::Bool(b) => Ok(*b as i64),
        other => Err(EncodeError::UnsupportedValue(format!(
            "cannot abstract value of sort {}",
            other.sort()
        ))),
    }
}

struct AbsBuilder<'a> {
    prod: &'a Production,
    state: Sort,
}

impl AbsBuilder<'_> {
    fn g(&self) -> Formula {
        Formula::var("G", self.state.clone())
    }

    fn child(&self, i: usize, input: Formula, out: Formula) -> RelationApp {
        RelationApp::new(
            sem_relation(&self.prod.rhs[i]),
            vec![RelArg::F(input), RelArg::T(TermRef::Child(i)), RelArg::F(out)],
        )
    }

    fn head(&self, out: Formula) -> RelationApp {
        RelationApp::new(
            sem_relation(&self.prod.lhs),
            vec![
                RelArg::F(self.g()),
                RelArg::T(TermRef::SelfTerm),
                RelArg::F(out),
            ],
        )
    }

    fn recurse(&self, input: Formula, out: Formula) -> RelationApp {
        RelationApp::new(
            sem_relation(&self.prod.lhs),
            vec![RelArg::F(input), RelArg::T(TermRef::SelfTerm), RelArg::F(out)],
        )
    }

    fn rule(
        &self,
        vars: Vec<(String, Sort)>,
        body: Vec<RelationApp>,
        constraint: Formula,
        head: RelationApp,
    ) -> SemanticRule {
        SemanticRule {
            production: self.prod.id,
            vars,
            body,
            constraint,
            head,
        }
    }

    /// Evaluate every child, then pin the fresh output `v` to `expr`.
    fn expr_rule(&self, expr: Formula) -> SemanticRule {
        let mut vars = vec![("G".to_string(), self.state.clone())];
        let mut body = Vec::new();
        for j in 0..self.prod.arity() {
            let name = format!("v{}", j + 1);
            vars.push((name.clone(), Sort::Int));
            body.push(self.child(j, self.g(), Formula::var(name, Sort::Int)));
        }
        vars.push(("v".to_string(), Sort::Int));
        let v = Formula::var("v", Sort::Int);
        self.rule(vars, body, Formula::eq(v.clone(), expr), self.head(v))
    }

    /// Overwrite every field of the input state with `per_field`'s value.
    fn set_all_fields(&self, per_field: impl Fn(&str) -> Formula) -> Formula {
        let fields = self.state.state_fields().expect("state sort");
        let mut out = self.g();
        for (name, _) in fields {
            out = Formula::field_set(name, out, per_field(name));
        }
        out
    }
}

fn abs_rules(
    prod: &Production,
    op: &ImpvOp,
    state: &Sort,
    bit: u32,
    mode: WhileMode,
) -> Result<Vec<SemanticRule>, EncodeError> {
    let b = AbsBuilder {
        prod,
        state: state.clone(),
    };
    let v1 = Formula::var("v1", Sort::Int);
    let v2 = Formula::var("v2", Sort::Int);
    let v3 = Formula::var("v3", Sort::Int);
    let either_top = Formula::Or(vec![is(&v1, TOP), is(&v2, TOP)]);

    let rules = match op {
        ImpvOp::VarRef(x) => vec![b.expr_rule(Formula::field_get(x, b.g()))],
        ImpvOp::BvConst { value, .. } => {
            vec![b.expr_rule(int(((value >> (bit - 1)) & 1) as i64))]
        }
        ImpvOp::BoolConst(c) => vec![b.expr_rule(int(*c as i64))],
        ImpvOp::BvAnd => vec![b.expr_rule(Formula::ite(
            either_top,
            int(TOP),
            Formula::ite(
                Formula::And(vec![is(&v1, 1), is(&v2, 1)]),
                int(1),
                int(0),
            ),
        ))],
        ImpvOp::BvOr => vec![b.expr_rule(Formula::ite(
            either_top,
            int(TOP),
            Formula::ite(
                Formula::Or(vec![is(&v1, 1), is(&v2, 1)]),
                int(1),
                int(0),
            ),
        ))],
        ImpvOp::BvNot | ImpvOp::Not => vec![b.expr_rule(Formula::ite(
            is(&v1, TOP),
            int(TOP),
            Formula::ite(is(&v1, 1), int(0), int(1)),
        ))],
        // A single bit says nothing about a carry chain or an ordering.
        ImpvOp::BvAdd | ImpvOp::BvUlt => vec![b.expr_rule(int(TOP))],
        ImpvOp::Eq => vec![b.expr_rule(Formula::ite(
            Formula::And(vec![
                Formula::not(is(&v1, TOP)),
                Formula::not(is(&v2, TOP)),
                Formula::not(Formula::eq(v1.clone(), v2.clone())),
            ]),
            int(0),
            int(TOP),
        ))],
        ImpvOp::And => vec![b.expr_rule(Formula::ite(
            Formula::Or(vec![is(&v1, 0), is(&v2, 0)]),
            int(0),
            Formula::ite(
                Formula::And(vec![is(&v1, 1), is(&v2, 1)]),
                int(1),
                int(TOP),
            ),
        ))],
        ImpvOp::Or => vec![b.expr_rule(Formula::ite(
            Formula::Or(vec![is(&v1, 1), is(&v2, 1)]),
            int(1),
            Formula::ite(
                Formula::And(vec![is(&v1, 0), is(&v2, 0)]),
                int(0),
                int(TOP),
            ),
        ))],
        ImpvOp::IteExpr => vec![b.expr_rule(Formula::ite(
            is(&v1, 1),
            v2.clone(),
            Formula::ite(is(&v1, 0), v3.clone(), def_join(v2.clone(), v3.clone())),
        ))],
        ImpvOp::Assign(x) => {
            let vars = vec![
                ("G".to_string(), state.clone()),
                ("v".to_string(), Sort::Int),
            ];
            let v = Formula::var("v", Sort::Int);
            vec![b.rule(
                vars,
                vec![b.child(0, b.g(), v.clone())],
                Formula::BoolConst(true),
                b.head(Formula::field_set(x, b.g(), v)),
            )]
        }
        ImpvOp::Seq => {
            let vars = vec![
                ("G".to_string(), state.clone()),
                ("M".to_string(), state.clone()),
                ("Go".to_string(), state.clone()),
            ];
            let m = Formula::var("M", state.clone());
            let go = Formula::var("Go", state.clone());
            vec![b.rule(
                vars,
                vec![b.child(0, b.g(), m.clone()), b.child(1, m, go.clone())],
                Formula::BoolConst(true),
                b.head(go),
            )]
        }
        ImpvOp::IteStmt => {
            let bv = Formula::var("b", Sort::Int);
            let g1 = Formula::var("G1", state.clone());
            let g2 = Formula::var("G2", state.clone());
            let guard_vars = |extra: &[(&str, &Sort)]| {
                let mut vars = vec![
                    ("G".to_string(), state.clone()),
                    ("b".to_string(), Sort::Int),
                ];
                vars.extend(extra.iter().map(|(n, s)| (n.to_string(), (*s).clone())));
                vars
            };
            let taken = b.rule(
                guard_vars(&[("G1", state)]),
                vec![b.child(0, b.g(), bv.clone()), b.child(1, b.g(), g1.clone())],
                is(&bv, 1),
                b.head(g1.clone()),
            );
            let skipped = b.rule(
                guard_vars(&[("G2", state)]),
                vec![b.child(0, b.g(), bv.clone()), b.child(2, b.g(), g2.clone())],
                is(&bv, 0),
                b.head(g2.clone()),
            );
            let joined = b.rule(
                guard_vars(&[("G1", state), ("G2", state)]),
                vec![
                    b.child(0, b.g(), bv.clone()),
                    b.child(1, b.g(), g1.clone()),
                    b.child(2, b.g(), g2.clone()),
                ],
                is(&bv, TOP),
                b.head(b.set_all_fields(|f| {
                    def_join(
                        Formula::field_get(f, g1.clone()),
                        Formula::field_get(f, g2.clone()),
                    )
                })),
            );
            vec![taken, skipped, joined]
        }
        ImpvOp::While => {
            let bv = Formula::var("b", Sort::Int);
            let g1 = Formula::var("G1", state.clone());
            let g2 = Formula::var("G2", state.clone());
            // The guard may concretely be false whenever it is not
            // definitely true; without this exit rule an abstractly-dead
            // loop would have no tuples at all and the encoding would
            // miss concrete behaviors.
            let exit = b.rule(
                vec![
                    ("G".to_string(), state.clone()),
                    ("b".to_string(), Sort::Int),
                ],
                vec![b.child(0, b.g(), bv.clone())],
                Formula::not(is(&bv, 1)),
                b.head(b.g()),
            );
            let entered_vars = vec![
                ("G".to_string(), state.clone()),
                ("b".to_string(), Sort::Int),
                ("G1".to_string(), state.clone()),
                ("G2".to_string(), state.clone()),
            ];
            let entered_body = vec![
                b.child(0, b.g(), bv.clone()),
                b.child(1, b.g(), g1.clone()),
                b.recurse(g1.clone(), g2.clone()),
            ];
            let out = match mode {
                WhileMode::Havoc => b.set_all_fields(|_| int(TOP)),
                WhileMode::Join => b.set_all_fields(|f| {
                    def_join(
                        Formula::field_get(f, b.g()),
                        Formula::field_get(f, g2.clone()),
                    )
                }),
            };
            let entered = b.rule(
                entered_vars,
                entered_body,
                Formula::BoolConst(true),
                b.head(out),
            );
            vec![exit, entered]
        }
        _ => return Err(EncodeError::NotImpvSubgrammar(prod.id)),
    };
    Ok(rules)
}

/// Replace the problem's semantics by the single-bit abstraction of bit
/// `bit` (1-based), with loops handled per `mode`. Example inputs are
/// abstracted pointwise; outputs become constraints admitting either the
/// abstracted bit or unknown.
pub fn make_abstract(p: &Problem, bit: u32, mode: WhileMode) -> Result<Problem, EncodeError> {
    if p.transforms != Transforms::default() {
        return Err(EncodeError::UnsupportedRule(
            "abstraction applies to the untransformed problem".into(),
        ));
    }
    if bit == 0 {
        return Err(EncodeError::UnsupportedValue("bit numbering is 1-based".into()));
    }
    let examples = p.spec.examples().ok_or(EncodeError::SpecNotExamples)?;
    let old_state = p
        .start_input_sort()
        .ok_or_else(|| {
            EncodeError::UnsupportedRule("problem has no start input sort".into())
        })?
        .clone();
    let abs_state = abs_sort(&old_state)?;

    let nonterminals = p
        .grammar
        .nonterminals
        .iter()
        .map(|(n, s)| Ok((n.clone(), abs_sort(s)?)))
        .collect::<Result<Vec<_>, EncodeError>>()?;
    let productions = p
        .grammar
        .productions
        .iter()
        .map(|prod| {
            Ok(Production {
                id: prod.id,
                lhs: prod.lhs.clone(),
                op: prod.op.clone(),
                rhs: prod.rhs.clone(),
                lhs_sort: abs_sort(&prod.lhs_sort)?,
                rhs_sorts: prod
                    .rhs_sorts
                    .iter()
                    .map(abs_sort)
                    .collect::<Result<Vec<_>, _>>()?,
            })
        })
        .collect::<Result<Vec<_>, EncodeError>>()?;
    let grammar = Grammar {
        nonterminals,
        start: p.grammar.start.clone(),
        productions,
    };

    let mut semantics = BTreeMap::new();
    for (orig, abst) in p.grammar.productions.iter().zip(&grammar.productions) {
        let op = impv_op(orig, &old_state)
            .map_err(|_| EncodeError::NotImpvSubgrammar(orig.id))?;
        if matches!(
            op,
            ImpvOp::IntConst(_)
                | ImpvOp::Add
                | ImpvOp::Sub
                | ImpvOp::Lt
                | ImpvOp::Select(_)
                | ImpvOp::Store(_)
        ) {
            return Err(EncodeError::NotImpvSubgrammar(orig.id));
        }
        semantics.insert(abst.id, abs_rules(abst, &op, &abs_state, bit, mode)?);
    }

    let mut signatures = BTreeMap::new();
    for (nt, _) in &grammar.nonterminals {
        let rel = sem_relation(nt);
        let (ins, outs) = p
            .relation_io(&rel)
            .ok_or_else(|| EncodeError::UnsupportedRule(format!("no signature for {rel}")))?;
        if ins.len() != 1 || outs.len() != 1 {
            return Err(EncodeError::UnsupportedRule(format!(
                "{rel} is not a one-input one-output relation"
            )));
        }
        signatures.insert(
            rel,
            vec![
                RelArgSort::Value(abs_sort(ins[0])?),
                RelArgSort::TermOf(nt.clone()),
                RelArgSort::Value(abs_sort(outs[0])?),
            ],
        );
    }

    let out_sort = abs_sort(
        p.relation_io(&sem_relation(&grammar.start))
            .expect("start signature checked above")
            .1[0],
    )?;
    let mut abs_examples = Vec::new();
    for ex in examples {
        let bindings = ex
            .input
            .iter()
            .map(|(n, v)| Ok((n.to_string(), Value::Int(alpha_value(v, bit)?))))
            .collect::<Result<Vec<_>, EncodeError>>()?;
        let input = Valuation::new(&abs_state, bindings)
            .map_err(|e| EncodeError::UnsupportedValue(format!("example input: {e}")))?;
        let out_var = Formula::var("out", out_sort.clone());
        let admit = |get: Formula, concrete: &Value| -> Result<Formula, EncodeError> {
            Ok(Formula::Or(vec![
                Formula::eq(get.clone(), int(TOP)),
                Formula::eq(get, int(alpha_value(concrete, bit)?)),
            ]))
        };
        let conds = match &ex.output {
            ExampleOutput::Exact(Value::State(val)) => val
                .iter()
                .map(|(n, v)| admit(Formula::field_get(n, out_var.clone()), v))
                .collect::<Result<Vec<_>, _>>()?,
            ExampleOutput::Exact(scalar) => vec![admit(out_var.clone(), scalar)?],
            ExampleOutput::Partial(pairs) => pairs
                .iter()
                .map(|(n, v)| admit(Formula::field_get(n, out_var.clone()), v))
                .collect::<Result<Vec<_>, _>>()?,
            ExampleOutput::Constraint(_) => {
                return Err(EncodeError::UnsupportedValue(
                    "cannot abstract a constraint output".into(),
                ))
            }
        };
        let formula = match conds.len() {
            1 => conds.into_iter().next().unwrap(),
            _ => Formula::And(conds),
        };
        abs_examples.push(Example {
            input,
            output: ExampleOutput::Constraint(formula),
        });
    }

    Ok(Problem {
        name: p.name.clone(),
        grammar,
        semantics,
        signatures,
        spec: Specification::Examples(abs_examples),
        builtin: None,
        transforms: Transforms {
            abstracted: Some((bit, mode)),
            ..Transforms::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples::{
        impv_problem, kitchen_grammar, kitchen_state, xor_problem,
    };

    #[test]
    fn while_gets_exit_and_one_mode_rule() {
        let a = make_abstract(&xor_problem(), 3, WhileMode::Havoc).unwrap();
        assert_eq!(a.semantics.values().map(Vec::len).sum::<usize>(), 10);
        for r in a.semantics.values().flatten() {
            r.check_closed().unwrap();
        }
        let exit = &a.semantics[&1][0];
        assert_eq!(format!("{}", exit.constraint), "(not (= b 1))");
        let havoc = format!("{:?}", a.semantics[&1][1].head.args[2]);
        assert!(havoc.contains("IntConst(2)"), "havoc head writes top: {havoc}");
        let join = make_abstract(&xor_problem(), 3, WhileMode::Join).unwrap();
        let merged = format!("{:?}", join.semantics[&1][1].head.args[2]);
        assert!(merged.contains("Ite"), "join head merges: {merged}");
    }

    #[test]
    fn sorts_become_three_valued_integers() {
        let a = make_abstract(&xor_problem(), 1, WhileMode::Join).unwrap();
        for (_, s) in &a.grammar.nonterminals {
            match s {
                Sort::Int => {}
                Sort::State(fields) => {
                    assert!(fields.iter().all(|(_, f)| *f == Sort::Int))
                }
                other => panic!("unexpected sort {other}"),
            }
        }
        assert_eq!(a.transforms.abstracted, Some((1, WhileMode::Join)));
    }

    #[test]
    fn examples_are_abstracted_to_the_tracked_bit() {
        // Bit 3 of 6, 9, 15: 1, 0, 1.
        let a = make_abstract(&xor_problem(), 3, WhileMode::Havoc).unwrap();
        let ex = &a.spec.examples().unwrap()[0];
        assert_eq!(ex.input.get("x"), Some(&Value::Int(1)));
        assert_eq!(ex.input.get("y"), Some(&Value::Int(0)));
        match &ex.output {
            ExampleOutput::Constraint(f) => assert_eq!(
                format!("{f}"),
                "(or (= (fieldGet x out) 2) (= (fieldGet x out) 1))"
            ),
            other => panic!("unexpected output {other:?}"),
        }
    }

    #[test]
    fn arithmetic_grammars_are_rejected() {
        // Integer and array state fields have no single-bit meaning, so
        // the kitchen-sink grammar is turned away at the state sort.
        let p = impv_problem(
            kitchen_grammar(),
            &kitchen_state(),
            Specification::Examples(vec![]),
        );
        assert!(matches!(
            make_abstract(&p, 1, WhileMode::Havoc),
            Err(EncodeError::UnsupportedSort(_))
        ));
    }

    #[test]
    fn bit_zero_and_wide_bits_are_rejected() {
        assert!(make_abstract(&xor_problem(), 0, WhileMode::Havoc).is_err());
        assert!(make_abstract(&xor_problem(), 33, WhileMode::Havoc).is_err());
    }
}
