//! Three-valued abstract evaluation tracking a single bit of every
//! bitvector variable. The domain per variable is {False, True, Top};
//! bitwise and/or are exact when both operands are definite, arithmetic
//! and comparisons give the bit up. Loops whose guard is indefinite either
//! havoc the whole state or iterate a join to its fixpoint, per
//! [`WhileMode`].

use super::eval::EvalError;
use super::Valuation;
use crate::interp::Value;
use crate::lang::{ProdId, Sort, Term};
use crate::problem::{impv_op, ImpvOp, Problem, WhileMode};
use std::collections::BTreeMap;
use std::fmt;

fn unsupported(msg: impl Into<String>) -> EvalError {
    EvalError::Unsupported(msg.into())
}

/// One abstract bit or boolean: definite, or unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AbsVal {
    False,
    True,
    Top,
}

impl AbsVal {
    pub fn from_bool(b: bool) -> AbsVal {
        if b {
            AbsVal::True
        } else {
            AbsVal::False
        }
    }

    /// The chosen bit of a concrete bitvector value; `bit` is 1-based.
    pub fn from_bit(value: u64, bit: u32) -> AbsVal {
        AbsVal::from_bool((value >> (bit - 1)) & 1 == 1)
    }

    pub fn join(self, other: AbsVal) -> AbsVal {
        if self == other {
            self
        } else {
            AbsVal::Top
        }
    }

    /// Whether the concrete bit lies in this abstract value's meaning.
    pub fn admits(self, concrete: bool) -> bool {
        self == AbsVal::Top || self == AbsVal::from_bool(concrete)
    }

    /// `a ⊑ b`: everything `a` admits, `b` admits too.
    pub fn refines(self, other: AbsVal) -> bool {
        self == other || other == AbsVal::Top
    }

    fn definite(self) -> Option<bool> {
        match self {
            AbsVal::False => Some(false),
            AbsVal::True => Some(true),
            AbsVal::Top => None,
        }
    }
}

impl fmt::Display for AbsVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsVal::False => write!(f, "false"),
            AbsVal::True => write!(f, "true"),
            AbsVal::Top => write!(f, "top"),
        }
    }
}

/// Bitwise-and transformer: any indefinite operand spoils the result.
fn abs_and(a: AbsVal, b: AbsVal) -> AbsVal {
    match (a.definite(), b.definite()) {
        (Some(x), Some(y)) => AbsVal::from_bool(x && y),
        _ => AbsVal::Top,
    }
}

fn abs_or(a: AbsVal, b: AbsVal) -> AbsVal {
    match (a.definite(), b.definite()) {
        (Some(x), Some(y)) => AbsVal::from_bool(x || y),
        _ => AbsVal::Top,
    }
}

fn abs_not(a: AbsVal) -> AbsVal {
    match a {
        AbsVal::False => AbsVal::True,
        AbsVal::True => AbsVal::False,
        AbsVal::Top => AbsVal::Top,
    }
}

/// Boolean Kleene connectives: a definite dominating operand decides.
fn kleene_and(a: AbsVal, b: AbsVal) -> AbsVal {
    match (a, b) {
        (AbsVal::False, _) | (_, AbsVal::False) => AbsVal::False,
        (AbsVal::True, AbsVal::True) => AbsVal::True,
        _ => AbsVal::Top,
    }
}

fn kleene_or(a: AbsVal, b: AbsVal) -> AbsVal {
    match (a, b) {
        (AbsVal::True, _) | (_, AbsVal::True) => AbsVal::True,
        (AbsVal::False, AbsVal::False) => AbsVal::False,
        _ => AbsVal::Top,
    }
}

/// Abstract state: one [`AbsVal`] per state variable, in state-sort order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsValuation {
    bindings: Vec<(String, AbsVal)>,
}

impl AbsValuation {
    pub fn new(bindings: Vec<(String, AbsVal)>) -> Self {
        AbsValuation { bindings }
    }

    pub fn get(&self, name: &str) -> Option<AbsVal> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn with(&self, name: &str, value: AbsVal) -> Result<Self, EvalError> {
        let mut bindings = self.bindings.clone();
        match bindings.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => return Err(unsupported(format!("no state variable {name}"))),
        }
        Ok(AbsValuation { bindings })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, AbsVal)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn join(&self, other: &AbsValuation) -> AbsValuation {
        let bindings = self
            .bindings
            .iter()
            .map(|(n, v)| {
                let o = other.get(n).unwrap_or(AbsVal::Top);
                (n.clone(), v.join(o))
            })
            .collect();
        AbsValuation { bindings }
    }

    pub fn all_top(&self) -> AbsValuation {
        let bindings = self
            .bindings
            .iter()
            .map(|(n, _)| (n.clone(), AbsVal::Top))
            .collect();
        AbsValuation { bindings }
    }

    /// Pointwise refinement: `self ⊑ other`.
    pub fn refines(&self, other: &AbsValuation) -> bool {
        self.bindings
            .iter()
            .all(|(n, v)| matches!(other.get(n), Some(o) if v.refines(o)))
    }
}

/// Abstract a concrete input state to bit `bit` (1-based) of each variable.
pub fn alpha(input: &Valuation, bit: u32) -> Result<AbsValuation, EvalError> {
    let bindings = input
        .iter()
        .map(|(name, value)| {
            let v = match value {
                Value::BitVec(v, w) => {
                    if bit == 0 || bit > *w {
                        return Err(unsupported(format!(
                            "bit {bit} outside width {w} of {name}"
                        )));
                    }
                    AbsVal::from_bit(*v, bit)
                }
                Value::Bool(b) => AbsVal::from_bool(*b),
                other => {
                    return Err(unsupported(format!(
                        "cannot abstract {name} of sort {}",
                        other.sort()
                    )))
                }
            };
            Ok((name.to_string(), v))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(AbsValuation::new(bindings))
}

/// Result of abstract evaluation: a state for statements, a single
/// abstract value for expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsOut {
    State(AbsValuation),
    Val(AbsVal),
}

impl AbsOut {
    pub fn as_state(&self) -> Option<&AbsValuation> {
        match self {
            AbsOut::State(s) => Some(s),
            AbsOut::Val(_) => None,
        }
    }

    pub fn as_val(&self) -> Option<AbsVal> {
        match self {
            AbsOut::Val(v) => Some(*v),
            AbsOut::State(_) => None,
        }
    }
}

struct Ctx {
    ops: BTreeMap<ProdId, ImpvOp>,
    bit: u32,
    mode: WhileMode,
    fuel: u64,
}

impl Ctx {
    fn charge(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::Diverged);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn op(&self, t: &Term) -> Result<ImpvOp, EvalError> {
        self.ops
            .get(&t.prod_id)
            .cloned()
            .ok_or_else(|| unsupported(format!("unknown production {}", t.prod_id)))
    }

    fn expr(&mut self, t: &Term, st: &AbsValuation) -> Result<AbsVal, EvalError> {
        self.charge()?;
        match self.op(t)? {
            ImpvOp::VarRef(x) => st
                .get(&x)
                .ok_or_else(|| unsupported(format!("no state variable {x}"))),
            ImpvOp::BvConst { value, .. } => Ok(AbsVal::from_bit(value, self.bit)),
            ImpvOp::BoolConst(b) => Ok(AbsVal::from_bool(b)),
            ImpvOp::BvAnd => Ok(abs_and(
                self.expr(&t.children[0], st)?,
                self.expr(&t.children[1], st)?,
            )),
            ImpvOp::BvOr => Ok(abs_or(
                self.expr(&t.children[0], st)?,
                self.expr(&t.children[1], st)?,
            )),
            ImpvOp::BvNot => Ok(abs_not(self.expr(&t.children[0], st)?)),
            // A single bit says nothing about a carry chain or an ordering.
            ImpvOp::BvAdd => {
                self.expr(&t.children[0], st)?;
                self.expr(&t.children[1], st)?;
                Ok(AbsVal::Top)
            }
            ImpvOp::Lt | ImpvOp::BvUlt => {
                self.expr(&t.children[0], st)?;
                self.expr(&t.children[1], st)?;
                Ok(AbsVal::Top)
            }
            // Differing definite bits decide disequality; nothing else is
            // decidable from one bit.
            ImpvOp::Eq => {
                let a = self.expr(&t.children[0], st)?;
                let b = self.expr(&t.children[1], st)?;
                Ok(match (a.definite(), b.definite()) {
                    (Some(x), Some(y)) if x != y => AbsVal::False,
                    _ => AbsVal::Top,
                })
            }
            ImpvOp::Not => Ok(abs_not(self.expr(&t.children[0], st)?)),
            ImpvOp::And => Ok(kleene_and(
                self.expr(&t.children[0], st)?,
                self.expr(&t.children[1], st)?,
            )),
            ImpvOp::Or => Ok(kleene_or(
                self.expr(&t.children[0], st)?,
                self.expr(&t.children[1], st)?,
            )),
            ImpvOp::IteExpr => match self.expr(&t.children[0], st)?.definite() {
                Some(true) => self.expr(&t.children[1], st),
                Some(false) => self.expr(&t.children[2], st),
                None => {
                    let a = self.expr(&t.children[1], st)?;
                    let b = self.expr(&t.children[2], st)?;
                    Ok(a.join(b))
                }
            },
            other => Err(unsupported(format!(
                "{other:?} has no single-bit abstract transformer"
            ))),
        }
    }

    fn stmt(&mut self, t: &Term, st: &AbsValuation) -> Result<AbsValuation, EvalError> {
        self.charge()?;
        match self.op(t)? {
            ImpvOp::Seq => {
                let first = self.stmt(&t.children[0], st)?;
                self.stmt(&t.children[1], &first)
            }
            ImpvOp::Assign(x) => {
                let v = self.expr(&t.children[0], st)?;
                st.with(&x, v)
            }
            ImpvOp::IteStmt => match self.expr(&t.children[0], st)?.definite() {
                Some(true) => self.stmt(&t.children[1], st),
                Some(false) => self.stmt(&t.children[2], st),
                None => {
                    let a = self.stmt(&t.children[1], st)?;
                    let b = self.stmt(&t.children[2], st)?;
                    Ok(a.join(&b))
                }
            },
            ImpvOp::While => match self.expr(&t.children[0], st)?.definite() {
                Some(false) => Ok(st.clone()),
                Some(true) => {
                    let once = self.stmt(&t.children[1], st)?;
                    self.stmt(t, &once)
                }
                None => match self.mode {
                    WhileMode::Havoc => Ok(st.all_top()),
                    WhileMode::Join => {
                        // Least fixpoint of "stay, or run one more body
                        // iteration"; the two-level lattice makes the chain
                        // short.
                        let mut acc = st.clone();
                        loop {
                            let next = acc.join(&self.stmt(&t.children[1], &acc)?);
                            if next == acc {
                                return Ok(acc);
                            }
                            acc = next;
                        }
                    }
                },
            },
            other => Err(unsupported(format!(
                "{other:?} is not a statement operator"
            ))),
        }
    }
}

/// Abstractly evaluate `t` from `input`, tracking bit `bit` (1-based) of
/// every variable. Statement terms yield states, expression terms values.
pub fn eval_abstract(
    p: &Problem,
    t: &Term,
    input: &AbsValuation,
    bit: u32,
    mode: WhileMode,
    fuel: u64,
) -> Result<AbsOut, EvalError> {
    let Some(state) = p.start_input_sort().cloned() else {
        return Err(unsupported("problem has no start input sort".to_string()));
    };
    let mut ops = BTreeMap::new();
    for prod in &p.grammar.productions {
        let op = impv_op(prod, &state)
            .map_err(|_| unsupported(format!("production {} is not imperative", prod.id)))?;
        ops.insert(prod.id, op);
    }
    let root = p
        .grammar
        .production(t.prod_id)
        .ok_or_else(|| unsupported(format!("unknown production {}", t.prod_id)))?;
    let mut ctx = Ctx {
        ops,
        bit,
        mode,
        fuel,
    };
    if matches!(root.lhs_sort, Sort::State(_)) {
        Ok(AbsOut::State(ctx.stmt(t, input)?))
    } else {
        Ok(AbsOut::Val(ctx.expr(t, input)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{eval, DEFAULT_FUEL};
    use crate::problem::samples::{xor_problem, xor_witness, xy_input};

    fn xy_abs(x: AbsVal, y: AbsVal) -> AbsValuation {
        AbsValuation::new(vec![("x".into(), x), ("y".into(), y)])
    }

    #[test]
    fn bitwise_and_is_exact_only_on_definite_operands() {
        let p = xor_problem();
        let and_xy = Term::new(8, vec![Term::leaf(6), Term::leaf(7)]);
        let run = |st: &AbsValuation| {
            eval_abstract(&p, &and_xy, st, 3, WhileMode::Havoc, DEFAULT_FUEL)
                .unwrap()
                .as_val()
                .unwrap()
        };
        assert_eq!(run(&xy_abs(AbsVal::True, AbsVal::Top)), AbsVal::Top);
        assert_eq!(run(&xy_abs(AbsVal::True, AbsVal::True)), AbsVal::True);
        assert_eq!(run(&xy_abs(AbsVal::True, AbsVal::False)), AbsVal::False);
    }

    #[test]
    fn alpha_reads_the_requested_bit() {
        let a = alpha(&xy_input(14, 15), 3).unwrap();
        assert_eq!(a, xy_abs(AbsVal::True, AbsVal::True));
        let b = alpha(&xy_input(14, 15), 1).unwrap();
        assert_eq!(b, xy_abs(AbsVal::False, AbsVal::True));
    }

    #[test]
    fn witness_modes_match_the_frozen_runs() {
        let p = xor_problem();
        let w = xor_witness();
        let a0 = alpha(&xy_input(14, 15), 3).unwrap();
        let havoc = eval_abstract(&p, &w, &a0, 3, WhileMode::Havoc, DEFAULT_FUEL).unwrap();
        assert_eq!(
            havoc.as_state().unwrap(),
            &xy_abs(AbsVal::Top, AbsVal::Top)
        );
        let join = eval_abstract(&p, &w, &a0, 3, WhileMode::Join, DEFAULT_FUEL).unwrap();
        assert_eq!(
            join.as_state().unwrap(),
            &xy_abs(AbsVal::True, AbsVal::True)
        );
        assert!(join.as_state().unwrap().refines(havoc.as_state().unwrap()));
    }

    #[test]
    fn abstract_runs_admit_the_concrete_bit() {
        let p = xor_problem();
        let w = xor_witness();
        let conc = eval(&p, &w, &xy_input(6, 9), DEFAULT_FUEL).unwrap();
        let conc = conc.as_state().unwrap();
        for bit in 1..=5 {
            let a0 = alpha(&xy_input(6, 9), bit).unwrap();
            for mode in [WhileMode::Havoc, WhileMode::Join] {
                let out = eval_abstract(&p, &w, &a0, bit, mode, DEFAULT_FUEL).unwrap();
                for (name, abs) in out.as_state().unwrap().iter() {
                    let Some(Value::BitVec(v, _)) = conc.get(name) else {
                        panic!("missing {name}")
                    };
                    assert!(abs.admits((v >> (bit - 1)) & 1 == 1), "{mode:?} bit {bit} {name}");
                }
            }
        }
    }
}
