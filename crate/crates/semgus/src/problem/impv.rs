//! The imperative language family: operator recognition and the builtin
//! big-step semantics for its subgrammars.
//!
//! A grammar is an imperative subgrammar when every production matches one
//! of a fixed set of operators over statements (state to state), expressions
//! (state to Int/BitVec) and booleans, with sorts that agree with the input
//! State sort. The vectorizing, abstracting and bounding passes all pattern
//! match on [`ImpvOp`], so the recognizer is the single place that fixes
//! operator spellings.

use super::FrontendError;
use crate::lang::{
    Formula, Grammar, ProdId, Production, RelArg, RelationApp, SemanticRule, Sort, TermRef,
};
use crate::problem::sem_relation;
use std::collections::BTreeMap;

/// Classified imperative operator of one production.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImpvOp {
    /// `while(B, S)`: guarded loop.
    While,
    /// `seq(S, S)`: sequential composition.
    Seq,
    /// `ite(B, S, S)`: statement conditional (only the taken branch runs).
    IteStmt,
    /// `assign_<v>(E)`: write a scalar state variable.
    Assign(String),
    /// `store_<a>(E, E)`: write one cell of an array state variable.
    Store(String),
    /// Nullary reference to a scalar state variable.
    VarRef(String),
    IntConst(i64),
    BvConst { value: u64, width: u32 },
    BoolConst(bool),
    /// `+` on Int.
    Add,
    /// `-` on Int.
    Sub,
    /// `ite(B, E, E)` at a scalar sort (both branches evaluate).
    IteExpr,
    /// `select_<a>(E)`: read one cell of an array state variable.
    Select(String),
    /// `<` on Int.
    Lt,
    /// `=` on a scalar sort.
    Eq,
    BvUlt,
    BvAnd,
    BvOr,
    BvAdd,
    BvNot,
    Not,
    And,
    Or,
}

fn scalar_field(input: &Sort, name: &str) -> Option<Sort> {
    match input.field_sort(name)? {
        s @ (Sort::Int | Sort::BitVec(_)) => Some(s.clone()),
        _ => None,
    }
}

fn array_field(input: &Sort, name: &str) -> bool {
    matches!(input.field_sort(name), Some(Sort::IntArray))
}

fn is_scalar(s: &Sort) -> bool {
    matches!(s, Sort::Int | Sort::BitVec(_) | Sort::Bool)
}

/// Classify one production against the imperative operator set, checking
/// its sort assignment. `input` is the shared input State sort.
pub fn impv_op(p: &Production, input: &Sort) -> Result<ImpvOp, FrontendError> {
    let fail = || Err(FrontendError::NotImpvSubgrammar(p.id));
    let lhs = &p.lhs_sort;
    let rhs = p.rhs_sorts.as_slice();
    let state = input;

    let op = match p.op.as_str() {
        "while" if lhs == state && rhs == [Sort::Bool, state.clone()] => ImpvOp::While,
        "seq" if lhs == state && rhs == [state.clone(), state.clone()] => ImpvOp::Seq,
        "ite" if lhs == state && rhs == [Sort::Bool, state.clone(), state.clone()] => {
            ImpvOp::IteStmt
        }
        "ite" if is_scalar(lhs) && rhs == [Sort::Bool, lhs.clone(), lhs.clone()] => {
            ImpvOp::IteExpr
        }
        "0" if *lhs == Sort::Int && rhs.is_empty() => ImpvOp::IntConst(0),
        "1" if *lhs == Sort::Int && rhs.is_empty() => ImpvOp::IntConst(1),
        "bv0" | "bv1" => match (lhs, rhs.is_empty()) {
            (Sort::BitVec(w), true) => ImpvOp::BvConst {
                value: u64::from(p.op == "bv1"),
                width: *w,
            },
            _ => return fail(),
        },
        "true" if *lhs == Sort::Bool && rhs.is_empty() => ImpvOp::BoolConst(true),
        "false" if *lhs == Sort::Bool && rhs.is_empty() => ImpvOp::BoolConst(false),
        "+" if *lhs == Sort::Int && rhs == [Sort::Int, Sort::Int] => ImpvOp::Add,
        "-" if *lhs == Sort::Int && rhs == [Sort::Int, Sort::Int] => ImpvOp::Sub,
        "<" if *lhs == Sort::Bool && rhs == [Sort::Int, Sort::Int] => ImpvOp::Lt,
        "=" if *lhs == Sort::Bool
            && rhs.len() == 2
            && rhs[0] == rhs[1]
            && is_scalar(&rhs[0])
            && rhs[0] != Sort::Bool =>
        {
            ImpvOp::Eq
        }
        "bvult" => match rhs {
            [Sort::BitVec(a), Sort::BitVec(b)] if a == b && *lhs == Sort::Bool => ImpvOp::BvUlt,
            _ => return fail(),
        },
        "bvand" | "bvor" | "bvadd" => match (lhs, rhs) {
            (Sort::BitVec(w), [Sort::BitVec(a), Sort::BitVec(b)]) if a == w && b == w => {
                match p.op.as_str() {
                    "bvand" => ImpvOp::BvAnd,
                    "bvor" => ImpvOp::BvOr,
                    _ => ImpvOp::BvAdd,
                }
            }
            _ => return fail(),
        },
        "bvnot" => match (lhs, rhs) {
            (Sort::BitVec(w), [Sort::BitVec(a)]) if a == w => ImpvOp::BvNot,
            _ => return fail(),
        },
        "not" if *lhs == Sort::Bool && rhs == [Sort::Bool] => ImpvOp::Not,
        "and" if *lhs == Sort::Bool && rhs == [Sort::Bool, Sort::Bool] => ImpvOp::And,
        "or" if *lhs == Sort::Bool && rhs == [Sort::Bool, Sort::Bool] => ImpvOp::Or,
        name => {
            if let Some(var) = name.strip_prefix("assign_") {
                match scalar_field(state, var) {
                    Some(fs) if lhs == state && rhs.len() == 1 && rhs[0] == fs => {
                        ImpvOp::Assign(var.to_string())
                    }
                    _ => return fail(),
                }
            } else if let Some(arr) = name.strip_prefix("store_") {
                if array_field(state, arr) && lhs == state && rhs == [Sort::Int, Sort::Int] {
                    ImpvOp::Store(arr.to_string())
                } else {
                    return fail();
                }
            } else if let Some(arr) = name.strip_prefix("select_") {
                if array_field(state, arr) && *lhs == Sort::Int && rhs == [Sort::Int] {
                    ImpvOp::Select(arr.to_string())
                } else {
                    return fail();
                }
            } else {
                match scalar_field(state, name) {
                    Some(fs) if fs == *lhs && rhs.is_empty() => ImpvOp::VarRef(name.to_string()),
                    _ => return fail(),
                }
            }
        }
    };
    Ok(op)
}

/// True iff every production of `g` matches an imperative operator with a
/// consistent sort assignment over input state `input`.
pub fn subgrammar_of_impv(g: &Grammar, input: &Sort) -> bool {
    input.is_state() && g.productions.iter().all(|p| impv_op(p, input).is_ok())
}

/// True iff `g` is a pure expression grammar: imperative operators only, no
/// statements and no array accesses, over a scalar-field input state. Such
/// grammars admit a term-by-term translation to formulas, which the
/// counterexample-guided verifier requires.
pub fn expression_grammar(g: &Grammar, input: &Sort) -> bool {
    let scalar_input = input
        .state_fields()
        .is_some_and(|fs| fs.iter().all(|(_, s)| is_scalar(s)));
    scalar_input
        && g.productions.iter().all(|p| {
            matches!(
                impv_op(p, input),
                Ok(ImpvOp::VarRef(_)
                    | ImpvOp::IntConst(_)
                    | ImpvOp::BvConst { .. }
                    | ImpvOp::BoolConst(_)
                    | ImpvOp::Add
                    | ImpvOp::Sub
                    | ImpvOp::IteExpr
                    | ImpvOp::Lt
                    | ImpvOp::Eq
                    | ImpvOp::BvUlt
                    | ImpvOp::BvAnd
                    | ImpvOp::BvOr
                    | ImpvOp::BvAdd
                    | ImpvOp::BvNot
                    | ImpvOp::Not
                    | ImpvOp::And
                    | ImpvOp::Or)
            )
        })
}

/// Translate an expression-grammar term into the formula it computes over
/// the input state variables. Only valid when [`expression_grammar`] holds.
pub fn expr_term_formula(
    g: &Grammar,
    input: &Sort,
    t: &crate::lang::Term,
) -> Result<Formula, FrontendError> {
    let p = g
        .production(t.prod_id)
        .ok_or(FrontendError::UnknownProduction(t.prod_id))?;
    let op = impv_op(p, input)?;
    let mut c = t
        .children
        .iter()
        .map(|ch| expr_term_formula(g, input, ch))
        .collect::<Result<Vec<_>, _>>()?;
    let not_expr = || FrontendError::NotImpvSubgrammar(p.id);
    if c.len() != p.arity() {
        return Err(not_expr());
    }
    let mut pop = || Box::new(c.remove(0));
    Ok(match op {
        ImpvOp::VarRef(x) => Formula::Var(x, p.lhs_sort.clone()),
        ImpvOp::IntConst(k) => Formula::IntConst(k),
        ImpvOp::BvConst { value, width } => Formula::BitVecConst(value, width),
        ImpvOp::BoolConst(b) => Formula::BoolConst(b),
        ImpvOp::Add => Formula::Add(pop(), pop()),
        ImpvOp::Sub => Formula::Sub(pop(), pop()),
        ImpvOp::IteExpr => Formula::Ite(pop(), pop(), pop()),
        ImpvOp::Lt | ImpvOp::BvUlt => Formula::Lt(pop(), pop()),
        ImpvOp::Eq => Formula::Eq(pop(), pop()),
        ImpvOp::BvAnd => Formula::BvAnd(pop(), pop()),
        ImpvOp::BvOr => Formula::BvOr(pop(), pop()),
        ImpvOp::BvAdd => Formula::BvAdd(pop(), pop()),
        ImpvOp::BvNot => Formula::BvNot(pop()),
        ImpvOp::Not => Formula::Not(pop()),
        ImpvOp::And => Formula::And(vec![*pop(), *pop()]),
        ImpvOp::Or => Formula::Or(vec![*pop(), *pop()]),
        _ => return Err(not_expr()),
    })
}

struct RuleBuilder<'a> {
    p: &'a Production,
    input: &'a Sort,
}

impl RuleBuilder<'_> {
    fn state_var(&self, name: &str) -> Formula {
        Formula::var(name, self.input.clone())
    }

    /// Premise `sem_<rhs[i]>(in, @i, out)`.
    fn child(&self, i: usize, input: Formula, output: Formula) -> RelationApp {
        RelationApp::new(
            sem_relation(&self.p.rhs[i]),
            vec![
                RelArg::F(input),
                RelArg::T(TermRef::Child(i)),
                RelArg::F(output),
            ],
        )
    }

    /// Premise `sem_<lhs>(in, @self, out)`: the recursive looping premise.
    fn recurse(&self, input: Formula, output: Formula) -> RelationApp {
        RelationApp::new(
            sem_relation(&self.p.lhs),
            vec![
                RelArg::F(input),
                RelArg::T(TermRef::SelfTerm),
                RelArg::F(output),
            ],
        )
    }

    fn head(&self, input: Formula, output: Formula) -> RelationApp {
        RelationApp::new(
            sem_relation(&self.p.lhs),
            vec![
                RelArg::F(input),
                RelArg::T(TermRef::SelfTerm),
                RelArg::F(output),
            ],
        )
    }

    fn rule(
        &self,
        vars: Vec<(&str, Sort)>,
        body: Vec<RelationApp>,
        constraint: Formula,
        head: RelationApp,
    ) -> SemanticRule {
        SemanticRule {
            production: self.p.id,
            vars: vars.into_iter().map(|(n, s)| (n.to_string(), s)).collect(),
            body,
            constraint,
            head,
        }
    }

    /// Rule for an expression whose value is `expr` over child values
    /// `v1..vk` (already referenced inside `expr`).
    fn expr_rule(&self, child_sorts: &[Sort], expr: Formula) -> SemanticRule {
        let g = self.state_var("G");
        let names = ["v1", "v2", "v3"];
        let mut vars = vec![("G", self.input.clone())];
        let mut body = Vec::new();
        for (i, cs) in child_sorts.iter().enumerate() {
            vars.push((names[i], cs.clone()));
            body.push(self.child(i, g.clone(), Formula::var(names[i], cs.clone())));
        }
        vars.push(("v", self.p.lhs_sort.clone()));
        let v = Formula::var("v", self.p.lhs_sort.clone());
        self.rule(
            vars,
            body,
            Formula::eq(v.clone(), expr),
            self.head(g, v),
        )
    }
}

/// Build the standard big-step semantics for an imperative subgrammar:
/// one rule per production, two for `while` (loop entered / loop skipped)
/// giving ten rules for the nine-production loop grammar. Fails with the
/// first offending production id otherwise.
pub fn build_impv_semantics(
    g: &Grammar,
    input: &Sort,
) -> Result<BTreeMap<ProdId, Vec<SemanticRule>>, FrontendError> {
    if !input.is_state() {
        return Err(FrontendError::NotImpvSubgrammar(
            g.productions.first().map(|p| p.id).unwrap_or(0),
        ));
    }
    let mut semantics = BTreeMap::new();
    for p in &g.productions {
        let op = impv_op(p, input)?;
        let b = RuleBuilder { p, input };
        let tau = input.clone();
        let g_in = b.state_var("G");
        let var = Formula::var;

        let rules = match op {
            ImpvOp::While => {
                let (g1, g2) = (b.state_var("G1"), b.state_var("G2"));
                let bv = var("b", Sort::Bool);
                let entered = b.rule(
                    vec![
                        ("G", tau.clone()),
                        ("b", Sort::Bool),
                        ("G1", tau.clone()),
                        ("G2", tau.clone()),
                    ],
                    vec![
                        b.child(0, g_in.clone(), bv.clone()),
                        b.child(1, g_in.clone(), g1.clone()),
                        b.recurse(g1, g2.clone()),
                    ],
                    Formula::eq(bv.clone(), Formula::BoolConst(true)),
                    b.head(g_in.clone(), g2),
                );
                let skipped = b.rule(
                    vec![("G", tau.clone()), ("b", Sort::Bool)],
                    vec![b.child(0, g_in.clone(), bv.clone())],
                    Formula::eq(bv, Formula::BoolConst(false)),
                    b.head(g_in.clone(), g_in),
                );
                vec![entered, skipped]
            }
            ImpvOp::Seq => {
                let (g1, g2) = (b.state_var("G1"), b.state_var("G2"));
                vec![b.rule(
                    vec![("G", tau.clone()), ("G1", tau.clone()), ("G2", tau.clone())],
                    vec![
                        b.child(0, g_in.clone(), g1.clone()),
                        b.child(1, g1, g2.clone()),
                    ],
                    Formula::BoolConst(true),
                    b.head(g_in, g2),
                )]
            }
            ImpvOp::IteStmt => {
                let bv = var("b", Sort::Bool);
                let mk_branch = |taken: usize, guard: bool| {
                    let go = b.state_var("Go");
                    b.rule(
                        vec![
                            ("G", tau.clone()),
                            ("b", Sort::Bool),
                            ("Go", tau.clone()),
                        ],
                        vec![
                            b.child(0, g_in.clone(), bv.clone()),
                            b.child(taken, g_in.clone(), go.clone()),
                        ],
                        Formula::eq(bv.clone(), Formula::BoolConst(guard)),
                        b.head(g_in.clone(), go),
                    )
                };
                vec![mk_branch(1, true), mk_branch(2, false)]
            }
            ImpvOp::Assign(x) => {
                let fs = p.rhs_sorts[0].clone();
                let (v, go) = (var("v", fs.clone()), b.state_var("Go"));
                vec![b.rule(
                    vec![("G", tau.clone()), ("v", fs), ("Go", tau.clone())],
                    vec![b.child(0, g_in.clone(), v.clone())],
                    Formula::eq(go.clone(), Formula::field_set(&x, g_in.clone(), v)),
                    b.head(g_in, go),
                )]
            }
            ImpvOp::Store(a) => {
                let (i, v, go) = (
                    var("i", Sort::Int),
                    var("v", Sort::Int),
                    b.state_var("Go"),
                );
                let stored = Formula::Store(
                    Box::new(Formula::field_get(&a, g_in.clone())),
                    Box::new(i.clone()),
                    Box::new(v.clone()),
                );
                vec![b.rule(
                    vec![
                        ("G", tau.clone()),
                        ("i", Sort::Int),
                        ("v", Sort::Int),
                        ("Go", tau.clone()),
                    ],
                    vec![
                        b.child(0, g_in.clone(), i),
                        b.child(1, g_in.clone(), v),
                    ],
                    Formula::eq(go.clone(), Formula::field_set(&a, g_in.clone(), stored)),
                    b.head(g_in, go),
                )]
            }
            ImpvOp::VarRef(x) => {
                vec![b.expr_rule(&[], Formula::field_get(&x, g_in))]
            }
            ImpvOp::IntConst(k) => vec![b.expr_rule(&[], Formula::IntConst(k))],
            ImpvOp::BvConst { value, width } => {
                vec![b.expr_rule(&[], Formula::BitVecConst(value, width))]
            }
            ImpvOp::BoolConst(c) => vec![b.expr_rule(&[], Formula::BoolConst(c))],
            ImpvOp::Select(a) => {
                let i = var("v1", Sort::Int);
                vec![b.expr_rule(
                    &[Sort::Int],
                    Formula::Select(Box::new(Formula::field_get(&a, g_in)), Box::new(i)),
                )]
            }
            op => {
                // Pure operators on child values.
                let cs = p.rhs_sorts.clone();
                let a1 = || Box::new(var("v1", cs[0].clone()));
                let a2 = || Box::new(var("v2", cs.get(1).cloned().unwrap_or(Sort::Bool)));
                let expr = match op {
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
                    ImpvOp::IteExpr => Formula::ite(
                        var("v1", Sort::Bool),
                        var("v2", cs[1].clone()),
                        var("v3", cs[2].clone()),
                    ),
                    _ => unreachable!("handled above"),
                };
                vec![b.expr_rule(&cs, expr)]
            }
        };
        semantics.insert(p.id, rules);
    }
    Ok(semantics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::samples;

    #[test]
    fn loop_grammar_is_impv_and_gets_ten_rules() {
        let g = samples::loop_or_grammar();
        let input = samples::xy_state();
        assert!(subgrammar_of_impv(&g, &input));
        let sem = build_impv_semantics(&g, &input).unwrap();
        assert_eq!(sem.len(), 9);
        let total: usize = sem.values().map(Vec::len).sum();
        assert_eq!(total, 10);
        assert_eq!(sem[&1].len(), 2);
    }

    #[test]
    fn rules_are_closed_and_well_sorted() {
        let g = samples::loop_or_grammar();
        let sem = build_impv_semantics(&g, &samples::xy_state()).unwrap();
        for rules in sem.values() {
            for r in rules {
                r.check_closed().unwrap();
            }
        }
    }

    #[test]
    fn division_is_rejected_with_the_production_id() {
        let mut g = samples::loop_or_grammar();
        let mut p = g.productions.last().unwrap().clone();
        p.id = 10;
        p.op = "bvdiv".into();
        g.productions.push(p);
        let err = build_impv_semantics(&g, &samples::xy_state()).unwrap_err();
        assert!(matches!(err, FrontendError::NotImpvSubgrammar(10)));
        assert!(!subgrammar_of_impv(&g, &samples::xy_state()));
    }

    #[test]
    fn constant_production_gets_value_equality_constraint() {
        use crate::lang::{Grammar, Production};
        let g = Grammar {
            nonterminals: vec![("E".into(), Sort::Int)],
            start: "E".into(),
            productions: vec![Production {
                id: 1,
                lhs: "E".into(),
                op: "0".into(),
                rhs: vec![],
                lhs_sort: Sort::Int,
                rhs_sorts: vec![],
            }],
        };
        let input = Sort::State(vec![("x".into(), Sort::Int)]);
        let sem = build_impv_semantics(&g, &input).unwrap();
        let rule = &sem[&1][0];
        assert!(rule.body.is_empty());
        assert_eq!(
            rule.constraint,
            Formula::eq(Formula::var("v", Sort::Int), Formula::IntConst(0))
        );
    }

    #[test]
    fn regex_grammar_is_not_impv() {
        let (g, _, sigs) = crate::problem::build_regex_semantics(2, 3);
        let input = match &sigs[&sem_relation("R")][0] {
            crate::lang::RelArgSort::Value(s) => s.clone(),
            _ => unreachable!(),
        };
        assert!(!subgrammar_of_impv(&g, &input));
    }
}
