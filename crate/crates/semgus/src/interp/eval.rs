//! Big-step evaluation of terms under CHC semantic rules.
//!
//! Rules are executed, not searched: premises are evaluated left to right,
//! and constraint conjuncts are processed eagerly as soon as their variables
//! are bound, so a failing guard cuts a rule off before its recursive
//! premises run. This executes exactly the deterministic subset; rules that
//! need real constraint solving fail with [`EvalError::Unsupported`].

use crate::lang::{Formula, ProdId, RelArg, SemanticRule, Sort, Term, TermRef};
use crate::problem::Problem;
use crate::interp::{Valuation, Value};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default evaluation budget: loops are unbounded, the interpreter is not.
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation exceeded its fuel budget")]
    Diverged,
    #[error("bounded evaluation ran out of loop budget")]
    Undefined,
    #[error("no semantic rule applies for production {0}")]
    StuckNoRule(ProdId),
    #[error("more than one semantic rule applies for production {0}")]
    NondeterministicRules(ProdId),
    #[error("array index {index} out of bounds for length {len}")]
    ArrayBounds { index: i64, len: usize },
    #[error("not interpreter-executable: {0}")]
    Unsupported(String),
}

/// Counters from one evaluation, for bound estimation and diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Successfully applied rules.
    pub rule_applications: u64,
    /// Successfully applied rules that recurse on their own term
    /// (loop iterations, star unrollings).
    pub loop_entries: u64,
}

fn unsupported(msg: impl Into<String>) -> EvalError {
    EvalError::Unsupported(msg.into())
}

/// Evaluate a closed formula under an environment of variable values.
pub(crate) fn eval_formula(
    env: &BTreeMap<String, Value>,
    f: &Formula,
) -> Result<Value, EvalError> {
    use Formula::*;
    let int = |f: &Formula| -> Result<i64, EvalError> {
        match eval_formula(env, f)? {
            Value::Int(v) => Ok(v),
            other => Err(unsupported(format!("expected Int, got {other}"))),
        }
    };
    let boolean = |f: &Formula| -> Result<bool, EvalError> {
        match eval_formula(env, f)? {
            Value::Bool(v) => Ok(v),
            other => Err(unsupported(format!("expected Bool, got {other}"))),
        }
    };
    let bv = |f: &Formula| -> Result<(u64, u32), EvalError> {
        match eval_formula(env, f)? {
            Value::BitVec(v, w) => Ok((v, w)),
            other => Err(unsupported(format!("expected BitVec, got {other}"))),
        }
    };
    let overflow = || unsupported("integer overflow".to_string());
    Ok(match f {
        Var(name, _) => env
            .get(name)
            .cloned()
            .ok_or_else(|| unsupported(format!("unbound variable {name}")))?,
        IntConst(v) => Value::Int(*v),
        BoolConst(v) => Value::Bool(*v),
        BitVecConst(v, w) => Value::BitVec(*v, *w),
        Add(a, b) => Value::Int(int(a)?.checked_add(int(b)?).ok_or_else(overflow)?),
        Sub(a, b) => Value::Int(int(a)?.checked_sub(int(b)?).ok_or_else(overflow)?),
        MulConst(c, a) => Value::Int(int(a)?.checked_mul(*c).ok_or_else(overflow)?),
        Lt(a, b) => match eval_formula(env, a)? {
            Value::Int(x) => Value::Bool(x < int(b)?),
            Value::BitVec(x, _) => Value::Bool(x < bv(b)?.0),
            other => return Err(unsupported(format!("< on {other}"))),
        },
        Le(a, b) => match eval_formula(env, a)? {
            Value::Int(x) => Value::Bool(x <= int(b)?),
            Value::BitVec(x, _) => Value::Bool(x <= bv(b)?.0),
            other => return Err(unsupported(format!("<= on {other}"))),
        },
        Eq(a, b) => Value::Bool(eval_formula(env, a)? == eval_formula(env, b)?),
        And(parts) => {
            let mut v = true;
            for p in parts {
                if !boolean(p)? {
                    v = false;
                    break;
                }
            }
            Value::Bool(v)
        }
        Or(parts) => {
            let mut v = false;
            for p in parts {
                if boolean(p)? {
                    v = true;
                    break;
                }
            }
            Value::Bool(v)
        }
        Not(a) => Value::Bool(!boolean(a)?),
        Implies(a, b) => Value::Bool(!boolean(a)? || boolean(b)?),
        Ite(c, t, e) => {
            if boolean(c)? {
                eval_formula(env, t)?
            } else {
                eval_formula(env, e)?
            }
        }
        BvAnd(a, b) => {
            let (x, w) = bv(a)?;
            Value::BitVec(x & bv(b)?.0, w)
        }
        BvOr(a, b) => {
            let (x, w) = bv(a)?;
            Value::BitVec(x | bv(b)?.0, w)
        }
        BvAdd(a, b) => {
            let (x, w) = bv(a)?;
            Value::bitvec(x.wrapping_add(bv(b)?.0), w)
        }
        BvNot(a) => {
            let (x, w) = bv(a)?;
            Value::bitvec(!x, w)
        }
        Select(arr, idx) => {
            let a = match eval_formula(env, arr)? {
                Value::Array(a) => a,
                other => return Err(unsupported(format!("select on {other}"))),
            };
            let i = int(idx)?;
            match usize::try_from(i).ok().and_then(|i| a.elems.get(i)) {
                Some(v) => Value::Int(*v),
                None => {
                    return Err(EvalError::ArrayBounds {
                        index: i,
                        len: a.elems.len(),
                    })
                }
            }
        }
        Store(arr, idx, val) => {
            let mut a = match eval_formula(env, arr)? {
                Value::Array(a) => a,
                other => return Err(unsupported(format!("store on {other}"))),
            };
            let i = int(idx)?;
            let v = int(val)?;
            match usize::try_from(i).ok().filter(|i| *i < a.elems.len()) {
                Some(i) => {
                    a.elems[i] = v;
                    Value::Array(a)
                }
                None => {
                    return Err(EvalError::ArrayBounds {
                        index: i,
                        len: a.elems.len(),
                    })
                }
            }
        }
        FieldGet(field, state) => match eval_formula(env, state)? {
            Value::State(s) => s
                .get(field)
                .cloned()
                .ok_or_else(|| unsupported(format!("no field {field}")))?,
            other => return Err(unsupported(format!("fieldGet on {other}"))),
        },
        FieldSet(field, state, value) => match eval_formula(env, state)? {
            Value::State(s) => {
                let v = eval_formula(env, value)?;
                let updated = s
                    .with(field, v)
                    .map_err(|e| unsupported(e.to_string()))?;
                Value::State(updated)
            }
            other => return Err(unsupported(format!("fieldSet on {other}"))),
        },
    })
}

struct Ctx<'a> {
    problem: &'a Problem,
    fuel: u64,
    stats: EvalStats,
}

/// Outcome of attempting one rule.
enum Attempt {
    /// All premises derivable, constraint satisfied.
    Applied(Vec<Value>),
    /// Constraint unsatisfied or a premise underivable.
    Failed,
    /// A recursive premise was cut off by the loop bound.
    BoundBlocked,
}

/// Environment under construction for one rule attempt. State-sorted
/// variables can be determined field by field through
/// `(= (fieldGet f M) v)` conjuncts before they are fully bound.
struct RuleEnv<'r> {
    rule: &'r SemanticRule,
    env: BTreeMap<String, Value>,
    partial: BTreeMap<String, BTreeMap<String, Value>>,
    pending: Vec<Formula>,
}

enum Progress {
    Consistent,
    Unsat,
}

impl<'r> RuleEnv<'r> {
    fn new(rule: &'r SemanticRule) -> Self {
        RuleEnv {
            rule,
            env: BTreeMap::new(),
            partial: BTreeMap::new(),
            pending: rule.constraint.conjuncts().into_iter().cloned().collect(),
        }
    }

    fn is_closed(&self, f: &Formula) -> bool {
        let mut free = BTreeMap::new();
        f.free_vars(&mut free);
        free.keys().all(|name| self.env.contains_key(name))
    }

    /// Bind a variable, or check consistency if it is already bound.
    fn bind(&mut self, name: &str, value: Value) -> Progress {
        match self.env.get(name) {
            Some(existing) if *existing == value => Progress::Consistent,
            Some(_) => Progress::Unsat,
            None => {
                self.env.insert(name.to_string(), value);
                Progress::Consistent
            }
        }
    }

    /// Record one field of a state variable; binds the variable once every
    /// field of its sort is known.
    fn bind_field(&mut self, var: &str, field: &str, value: Value) -> Result<Progress, EvalError> {
        let fields = self.partial.entry(var.to_string()).or_default();
        match fields.get(field) {
            Some(existing) if *existing == value => return Ok(Progress::Consistent),
            Some(_) => return Ok(Progress::Unsat),
            None => {
                fields.insert(field.to_string(), value);
            }
        }
        let sort = match self.rule.vars.iter().find(|(n, _)| n == var) {
            Some((_, s)) => s.clone(),
            None => return Err(unsupported(format!("undeclared rule variable {var}"))),
        };
        let declared = sort
            .state_fields()
            .ok_or_else(|| unsupported(format!("fieldGet target {var} is not State-sorted")))?;
        let fields = &self.partial[var];
        if declared.iter().all(|(n, _)| fields.contains_key(n)) {
            let bindings: Vec<(String, Value)> = declared
                .iter()
                .map(|(n, _)| (n.clone(), fields[n].clone()))
                .collect();
            let complete = Value::State(Valuation::from_ordered(bindings));
            self.partial.remove(var);
            return Ok(self.bind(var, complete));
        }
        Ok(Progress::Consistent)
    }

    /// Process every constraint conjunct that has become decidable: closed
    /// conjuncts are checked, equations with exactly one unknown side bind
    /// it. Runs to fixpoint.
    fn settle(&mut self) -> Result<Progress, EvalError> {
        loop {
            let mut progressed = false;
            let mut remaining = Vec::new();
            for c in std::mem::take(&mut self.pending) {
                if self.is_closed(&c) {
                    match eval_formula(&self.env, &c)? {
                        Value::Bool(true) => {}
                        Value::Bool(false) => return Ok(Progress::Unsat),
                        other => {
                            return Err(unsupported(format!("non-Bool constraint value {other}")))
                        }
                    }
                    progressed = true;
                    continue;
                }
                if let Formula::Eq(a, b) = &c {
                    let oriented = match (self.is_closed(a), self.is_closed(b)) {
                        (true, false) => Some((&**b, &**a)),
                        (false, true) => Some((&**a, &**b)),
                        _ => None,
                    };
                    if let Some((open, closed)) = oriented {
                        match open {
                            Formula::Var(name, _) => {
                                let v = eval_formula(&self.env, closed)?;
                                if matches!(self.bind(name, v), Progress::Unsat) {
                                    return Ok(Progress::Unsat);
                                }
                                progressed = true;
                                continue;
                            }
                            Formula::FieldGet(field, target) => {
                                if let Formula::Var(name, _) = &**target {
                                    if !self.env.contains_key(name) {
                                        let v = eval_formula(&self.env, closed)?;
                                        if matches!(
                                            self.bind_field(name, field, v)?,
                                            Progress::Unsat
                                        ) {
                                            return Ok(Progress::Unsat);
                                        }
                                        progressed = true;
                                        continue;
                                    }
                                }
                            }
                            _ => {}
                        }
                    }
                }
                remaining.push(c);
            }
            self.pending = remaining;
            if !progressed {
                return Ok(Progress::Consistent);
            }
        }
    }
}

impl<'a> Ctx<'a> {
    /// Evaluate `sem_N(inputs, t, outputs)` top-down and return the outputs.
    fn eval_term(
        &mut self,
        t: &Term,
        inputs: &[Value],
        bound: Option<u64>,
    ) -> Result<Vec<Value>, EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::Diverged);
        }
        self.fuel -= 1;
        let rules = self.problem.rules_of(t.prod_id);
        if rules.is_empty() {
            return Err(EvalError::StuckNoRule(t.prod_id));
        }
        let mut applied: Vec<Vec<Value>> = Vec::new();
        let mut bound_blocked = false;
        for rule in rules {
            match self.try_rule(rule, t, inputs, bound)? {
                Attempt::Applied(outs) => applied.push(outs),
                Attempt::Failed => {}
                Attempt::BoundBlocked => bound_blocked = true,
            }
        }
        match applied.len() {
            0 if bound_blocked => Err(EvalError::Undefined),
            0 => Err(EvalError::StuckNoRule(t.prod_id)),
            1 => Ok(applied.pop().unwrap()),
            _ => Err(EvalError::NondeterministicRules(t.prod_id)),
        }
    }

    fn try_rule(
        &mut self,
        rule: &SemanticRule,
        t: &Term,
        inputs: &[Value],
        bound: Option<u64>,
    ) -> Result<Attempt, EvalError> {
        let mut renv = RuleEnv::new(rule);

        let (head_ins, head_outs) = rule.head.split_io();
        if head_ins.len() != inputs.len() {
            return Err(unsupported(format!(
                "relation {} applied to {} inputs, head declares {}",
                rule.head.relation,
                inputs.len(),
                head_ins.len()
            )));
        }
        for (arg, value) in head_ins.iter().zip(inputs) {
            match arg {
                Formula::Var(name, _) => {
                    if matches!(renv.bind(name, value.clone()), Progress::Unsat) {
                        return Ok(Attempt::Failed);
                    }
                }
                _ => {
                    return Err(unsupported(
                        "head input arguments must be plain variables".to_string(),
                    ))
                }
            }
        }

        let mut recursed = false;
        for premise in &rule.body {
            if matches!(renv.settle()?, Progress::Unsat) {
                return Ok(Attempt::Failed);
            }
            let Some(tref) = premise.term_ref() else {
                return Err(unsupported(format!(
                    "premise {} has no term argument",
                    premise.relation
                )));
            };
            let sub = match tref {
                TermRef::SelfTerm => t,
                TermRef::Child(i) => t.children.get(i).ok_or_else(|| {
                    unsupported(format!(
                        "production {} term has no child {i}",
                        t.prod_id
                    ))
                })?,
            };
            let (in_fs, out_fs) = premise.split_io();
            let mut in_vals = Vec::with_capacity(in_fs.len());
            for f in in_fs {
                if !renv.is_closed(f) {
                    return Err(unsupported(format!(
                        "premise input {f} is not determined by earlier premises"
                    )));
                }
                in_vals.push(eval_formula(&renv.env, f)?);
            }
            let sub_bound = if matches!(tref, TermRef::SelfTerm) {
                recursed = true;
                match bound {
                    Some(0) => return Ok(Attempt::BoundBlocked),
                    Some(b) => Some(b - 1),
                    None => None,
                }
            } else {
                bound
            };
            let out_vals = match self.eval_term(sub, &in_vals, sub_bound) {
                Ok(vs) => vs,
                Err(EvalError::StuckNoRule(_)) => return Ok(Attempt::Failed),
                Err(EvalError::Undefined) => return Ok(Attempt::BoundBlocked),
                Err(e) => return Err(e),
            };
            if out_vals.len() != out_fs.len() {
                return Err(unsupported(format!(
                    "premise {} expects {} outputs, rule head produced {}",
                    premise.relation,
                    out_fs.len(),
                    out_vals.len()
                )));
            }
            for (f, v) in out_fs.iter().zip(out_vals) {
                match f {
                    Formula::Var(name, _) => {
                        if matches!(renv.bind(name, v), Progress::Unsat) {
                            return Ok(Attempt::Failed);
                        }
                    }
                    other if renv.is_closed(other) => {
                        if eval_formula(&renv.env, other)? != v {
                            return Ok(Attempt::Failed);
                        }
                    }
                    other => {
                        return Err(unsupported(format!(
                            "premise output {other} is neither a variable nor determined"
                        )))
                    }
                }
            }
        }

        if matches!(renv.settle()?, Progress::Unsat) {
            return Ok(Attempt::Failed);
        }
        if !renv.pending.is_empty() {
            return Err(unsupported(format!(
                "constraint {} cannot be decided by substitution",
                renv.pending[0]
            )));
        }
        let mut outs = Vec::with_capacity(head_outs.len());
        for f in head_outs {
            if !renv.is_closed(f) {
                return Err(unsupported(format!(
                    "head output {f} is not determined by the rule"
                )));
            }
            outs.push(eval_formula(&renv.env, f)?);
        }
        // Count a successful recursive application as one loop entry. The
        // count must only reflect applied rules, so recheck success here.
        self.stats.rule_applications += 1;
        if recursed {
            self.stats.loop_entries += 1;
        }
        Ok(Attempt::Applied(outs))
    }
}

fn start_eval(
    p: &Problem,
    t: &Term,
    input: &Valuation,
    fuel: u64,
    bound: Option<u64>,
) -> (Result<Value, EvalError>, EvalStats) {
    let mut ctx = Ctx {
        problem: p,
        fuel,
        stats: EvalStats::default(),
    };
    let result = (|| {
        let prod = p
            .grammar
            .production(t.prod_id)
            .ok_or_else(|| unsupported(format!("unknown production {}", t.prod_id)))?;
        let relation = crate::problem::sem_relation(&prod.lhs);
        let (ins, outs) = p
            .relation_io(&relation)
            .ok_or_else(|| unsupported(format!("no signature for {relation}")))?;
        if ins.len() != 1 || outs.len() != 1 {
            return Err(unsupported(format!(
                "{relation} does not have the one-input one-output shape"
            )));
        }
        if input.sort() != *ins[0] {
            return Err(unsupported(format!(
                "input sort {} does not match {relation}",
                input.sort()
            )));
        }
        let mut vals = ctx.eval_term(t, &[Value::State(input.clone())], bound)?;
        Ok(vals.pop().unwrap())
    })();
    (result, ctx.stats)
}

/// Rule-based evaluation with caller-managed fuel, for the structural
/// evaluators that fall back to rules for expression subterms.
pub(crate) fn eval_values(
    p: &Problem,
    t: &Term,
    inputs: &[Value],
    fuel: &mut u64,
) -> Result<Vec<Value>, EvalError> {
    let mut ctx = Ctx {
        problem: p,
        fuel: *fuel,
        stats: EvalStats::default(),
    };
    let result = ctx.eval_term(t, inputs, None);
    *fuel = ctx.fuel;
    result
}

/// Evaluate term `t` on `input`, returning the unique derivable output of
/// its semantic relation.
pub fn eval(p: &Problem, t: &Term, input: &Valuation, fuel: u64) -> Result<Value, EvalError> {
    start_eval(p, t, input, fuel, None).0
}

/// [`eval`], also reporting how many rules were applied along the way.
pub fn eval_with_stats(
    p: &Problem,
    t: &Term,
    input: &Valuation,
    fuel: u64,
) -> (Result<Value, EvalError>, EvalStats) {
    start_eval(p, t, input, fuel, None)
}

/// Evaluate under the bounded semantics: entering a loop iteration requires
/// a positive remaining bound and recursion proceeds with one less; loop
/// exit is free. `Err(Undefined)` means some entry was cut off, never that
/// the term misbehaved.
pub fn eval_bounded(
    p: &Problem,
    t: &Term,
    input: &Valuation,
    bound: u64,
    fuel: u64,
) -> Result<Value, EvalError> {
    start_eval(p, t, input, fuel, Some(bound)).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{RelationApp, Term};
    use crate::problem::samples::{
        impv_problem, kitchen_grammar, kitchen_state, xor_problem, xor_witness, xy_input,
    };
    use crate::problem::Specification;

    fn bv32(v: u64) -> Value {
        Value::BitVec(v, 32)
    }

    fn state_xy(x: u64, y: u64) -> Value {
        Value::State(xy_input(x, y))
    }

    #[test]
    fn witness_runs_match_the_concrete_semantics() {
        let p = xor_problem();
        let w = xor_witness();
        for ((x, y), (ox, oy)) in [
            ((6, 9), (15, 9)),
            ((44, 247), (255, 247)),
            ((14, 15), (15, 15)),
        ] {
            let got = eval(&p, &w, &xy_input(x, y), DEFAULT_FUEL).unwrap();
            assert_eq!(got, state_xy(ox, oy), "input ({x},{y})");
        }
    }

    #[test]
    fn variable_lookup_reads_the_input_state() {
        let p = xor_problem();
        let got = eval(&p, &Term::leaf(6), &xy_input(6, 9), DEFAULT_FUEL).unwrap();
        assert_eq!(got, bv32(6));
    }

    #[test]
    fn nonterminating_loop_diverges() {
        // while(true) { x := x } in the kitchen grammar.
        let p = impv_problem(
            kitchen_grammar(),
            &kitchen_state(),
            Specification::Examples(vec![]),
        );
        let t = Term::new(1, vec![Term::leaf(23), Term::new(4, vec![Term::leaf(8)])]);
        let input = Valuation::new(
            &kitchen_state(),
            vec![
                ("x".into(), Value::Int(0)),
                ("y".into(), Value::Int(0)),
                ("u".into(), Value::BitVec(0, 8)),
                ("a".into(), Value::Array(crate::interp::IntArrayVal { elems: vec![0, 0] })),
            ],
        )
        .unwrap();
        assert_eq!(eval(&p, &t, &input, 1000), Err(EvalError::Diverged));
    }

    #[test]
    fn fuel_is_monotone_on_the_witness() {
        let p = xor_problem();
        let w = xor_witness();
        let input = xy_input(6, 9);
        assert_eq!(eval(&p, &w, &input, 3), Err(EvalError::Diverged));
        let v = eval(&p, &w, &input, 40).unwrap();
        for fuel in [41, 100, 10_000] {
            assert_eq!(eval(&p, &w, &input, fuel).unwrap(), v);
        }
    }

    #[test]
    fn bounded_evaluation_charges_loop_entries_only() {
        let p = xor_problem();
        let w = xor_witness();
        let input = xy_input(6, 9);
        assert_eq!(
            eval_bounded(&p, &w, &input, 0, DEFAULT_FUEL),
            Err(EvalError::Undefined)
        );
        assert_eq!(
            eval_bounded(&p, &w, &input, 1, DEFAULT_FUEL).unwrap(),
            state_xy(15, 9)
        );
        // Straight-line term: x := x | y needs no bound at all.
        let straight = Term::new(4, vec![Term::new(9, vec![Term::leaf(6), Term::leaf(7)])]);
        assert_eq!(
            eval_bounded(&p, &straight, &input, 0, DEFAULT_FUEL).unwrap(),
            state_xy(15, 9)
        );
    }

    #[test]
    fn stats_count_loop_entries() {
        let p = xor_problem();
        let w = xor_witness();
        let (r, stats) = eval_with_stats(&p, &w, &xy_input(6, 9), DEFAULT_FUEL);
        r.unwrap();
        assert_eq!(stats.loop_entries, 1);
        let (r, stats) = eval_with_stats(&p, &w, &xy_input(9, 6), DEFAULT_FUEL);
        r.unwrap();
        assert_eq!(stats.loop_entries, 0);
    }

    #[test]
    fn partial_state_constraints_determine_matrix_outputs() {
        // The regex rules only pin the output state down field by field.
        let p = crate::problem::samples::regex_problem(1, 1, &[(&[0], true)]);
        let params = p.regex_params().unwrap();
        let input = crate::problem::regex_example_input(params, &[0]);
        // epsilon has id alphabet+1 = 2; its matrix is the identity.
        let out = eval(&p, &Term::leaf(2), &input, DEFAULT_FUEL).unwrap();
        let Value::State(m) = out else { panic!("expected state, got {out}") };
        assert_eq!(m.get("m_0_0"), Some(&Value::Bool(true)));
        assert_eq!(m.get("m_0_1"), Some(&Value::Bool(false)));
        assert_eq!(m.get("m_1_1"), Some(&Value::Bool(true)));
    }

    fn toy_problem(rules: Vec<SemanticRule>) -> Problem {
        let g = crate::lang::Grammar {
            nonterminals: vec![("E".into(), Sort::Int)],
            start: "E".into(),
            productions: vec![crate::lang::Production {
                id: 1,
                lhs: "E".into(),
                op: "zero".into(),
                rhs: vec![],
                lhs_sort: Sort::Int,
                rhs_sorts: vec![],
            }],
        };
        let input = Sort::State(vec![("x".into(), Sort::Int)]);
        let signatures = Problem::standard_signatures(&g, &input, |_| Sort::Int);
        let mut semantics = BTreeMap::new();
        semantics.insert(1, rules);
        Problem {
            name: Some("toy".into()),
            grammar: g,
            semantics,
            signatures,
            spec: Specification::Examples(vec![]),
            builtin: None,
            transforms: Default::default(),
        }
    }

    fn toy_rule(constraint: Formula) -> SemanticRule {
        let input = Sort::State(vec![("x".into(), Sort::Int)]);
        SemanticRule {
            production: 1,
            vars: vec![("G".into(), input.clone()), ("v".into(), Sort::Int)],
            body: vec![],
            constraint,
            head: RelationApp::new(
                "sem_E",
                vec![
                    RelArg::var("G", input),
                    RelArg::T(TermRef::SelfTerm),
                    RelArg::var("v", Sort::Int),
                ],
            ),
        }
    }

    #[test]
    fn no_satisfiable_rule_reports_stuck() {
        let v = Formula::var("v", Sort::Int);
        let p = toy_problem(vec![toy_rule(Formula::and_all(vec![
            Formula::eq(v, Formula::IntConst(0)),
            Formula::BoolConst(false),
        ]))]);
        let input = Valuation::new(
            &Sort::State(vec![("x".into(), Sort::Int)]),
            vec![("x".into(), Value::Int(0))],
        )
        .unwrap();
        assert_eq!(
            eval(&p, &Term::leaf(1), &input, DEFAULT_FUEL),
            Err(EvalError::StuckNoRule(1))
        );
    }

    #[test]
    fn two_applicable_rules_report_nondeterminism() {
        let v = || Formula::var("v", Sort::Int);
        let p = toy_problem(vec![
            toy_rule(Formula::eq(v(), Formula::IntConst(0))),
            toy_rule(Formula::eq(v(), Formula::IntConst(1))),
        ]);
        let input = Valuation::new(
            &Sort::State(vec![("x".into(), Sort::Int)]),
            vec![("x".into(), Value::Int(0))],
        )
        .unwrap();
        assert_eq!(
            eval(&p, &Term::leaf(1), &input, DEFAULT_FUEL),
            Err(EvalError::NondeterministicRules(1))
        );
    }
}
