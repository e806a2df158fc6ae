//! Evaluation over a whole example vector at once. Statements carry the
//! vector structurally; a Bottom entry absorbs all computation. Loop and
//! branch bodies see only the entries their guard selects (`Proj`), and
//! results are recombined per guard (`Merge`), so one traversal of the term
//! serves every example.

use super::eval::{eval_values, EvalError};
use super::{Valuation, Value, VecEntry, VecValuation};
use crate::lang::{ProdId, Sort, Term};
use crate::problem::{impv_op, ImpvOp, Problem};
use std::collections::BTreeMap;

fn unsupported(msg: impl Into<String>) -> EvalError {
    EvalError::Unsupported(msg.into())
}

struct Ctx<'a> {
    problem: &'a Problem,
    ops: BTreeMap<ProdId, ImpvOp>,
    fuel: u64,
}

/// Per-entry guard values; `None` marks a Bottom entry.
type GuardVec = Vec<Option<bool>>;

impl<'a> Ctx<'a> {
    fn op(&self, t: &Term) -> Result<&ImpvOp, EvalError> {
        self.ops
            .get(&t.prod_id)
            .ok_or_else(|| unsupported(format!("unknown production {}", t.prod_id)))
    }

    fn charge(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::Diverged);
        }
        self.fuel -= 1;
        Ok(())
    }

    /// Evaluate an expression subterm on one entry state through its rules.
    fn expr(&mut self, t: &Term, entry: &Valuation) -> Result<Value, EvalError> {
        let mut outs = eval_values(
            self.problem,
            t,
            &[Value::State(entry.clone())],
            &mut self.fuel,
        )?;
        match outs.len() {
            1 => Ok(outs.pop().unwrap()),
            n => Err(unsupported(format!("expression produced {n} outputs"))),
        }
    }

    fn guards(&mut self, t: &Term, v: &VecValuation) -> Result<GuardVec, EvalError> {
        v.entries
            .iter()
            .map(|e| match e {
                VecEntry::Bottom => Ok(None),
                VecEntry::Val(s) => match self.expr(t, s)? {
                    Value::Bool(b) => Ok(Some(b)),
                    other => Err(unsupported(format!("guard evaluated to {other}"))),
                },
            })
            .collect()
    }

    fn stmt(&mut self, t: &Term, v: &VecValuation) -> Result<VecValuation, EvalError> {
        self.charge()?;
        match self.op(t)?.clone() {
            ImpvOp::Seq => {
                let first = self.stmt(&t.children[0], v)?;
                self.stmt(&t.children[1], &first)
            }
            ImpvOp::Assign(x) => self.map_entries(v, |ctx, s| {
                let val = ctx.expr(&t.children[0], s)?;
                s.with(&x, val).map_err(|e| unsupported(e.to_string()))
            }),
            ImpvOp::Store(a) => self.map_entries(v, |ctx, s| {
                let idx = match ctx.expr(&t.children[0], s)? {
                    Value::Int(i) => i,
                    other => return Err(unsupported(format!("store index {other}"))),
                };
                let val = match ctx.expr(&t.children[1], s)? {
                    Value::Int(i) => i,
                    other => return Err(unsupported(format!("store value {other}"))),
                };
                let mut arr = match s.get(&a) {
                    Some(Value::Array(arr)) => arr.clone(),
                    _ => return Err(unsupported(format!("no array variable {a}"))),
                };
                match usize::try_from(idx).ok().filter(|i| *i < arr.elems.len()) {
                    Some(i) => arr.elems[i] = val,
                    None => {
                        return Err(EvalError::ArrayBounds {
                            index: idx,
                            len: arr.elems.len(),
                        })
                    }
                }
                s.with(&a, Value::Array(arr))
                    .map_err(|e| unsupported(e.to_string()))
            }),
            ImpvOp::IteStmt => {
                let g = self.guards(&t.children[0], v)?;
                let taken = self.stmt(&t.children[1], &proj(v, &g, true))?;
                let other = self.stmt(&t.children[2], &proj(v, &g, false))?;
                Ok(merge(&g, &taken, &other))
            }
            ImpvOp::While => {
                let g = self.guards(&t.children[0], v)?;
                if !g.iter().any(|b| *b == Some(true)) {
                    return Ok(v.clone());
                }
                let body = self.stmt(&t.children[1], &proj(v, &g, true))?;
                let looped = self.stmt(t, &body)?;
                Ok(merge(&g, &looped, v))
            }
            other => Err(unsupported(format!(
                "{other:?} is not a statement operator"
            ))),
        }
    }

    fn map_entries(
        &mut self,
        v: &VecValuation,
        mut f: impl FnMut(&mut Self, &Valuation) -> Result<Valuation, EvalError>,
    ) -> Result<VecValuation, EvalError> {
        let entries = v
            .entries
            .iter()
            .map(|e| match e {
                VecEntry::Bottom => Ok(VecEntry::Bottom),
                VecEntry::Val(s) => Ok(VecEntry::Val(f(self, s)?)),
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(VecValuation::new(entries))
    }
}

/// Keep entries whose guard equals `keep`; everything else becomes Bottom.
fn proj(v: &VecValuation, guards: &GuardVec, keep: bool) -> VecValuation {
    let entries = v
        .entries
        .iter()
        .zip(guards)
        .map(|(e, g)| match (e, g) {
            (VecEntry::Val(s), Some(b)) if *b == keep => VecEntry::Val(s.clone()),
            _ => VecEntry::Bottom,
        })
        .collect();
    VecValuation::new(entries)
}

/// Recombine: guard-true entries from `taken`, the rest from `fallback`.
fn merge(guards: &GuardVec, taken: &VecValuation, fallback: &VecValuation) -> VecValuation {
    let entries = guards
        .iter()
        .enumerate()
        .map(|(i, g)| match g {
            Some(true) => taken.entries[i].clone(),
            _ => fallback.entries[i].clone(),
        })
        .collect();
    VecValuation::new(entries)
}

/// Evaluate a statement term over a vector of example states in one pass.
pub fn eval_vectorized(
    p: &Problem,
    t: &Term,
    input: &VecValuation,
    fuel: u64,
) -> Result<VecValuation, EvalError> {
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
    if !matches!(root.lhs_sort, Sort::State(_)) {
        return Err(unsupported(
            "vectorized evaluation takes a statement term".to_string(),
        ));
    }
    let mut ctx = Ctx {
        problem: p,
        ops,
        fuel,
    };
    ctx.stmt(t, input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{eval, DEFAULT_FUEL};
    use crate::problem::samples::{xor_problem, xor_witness, xy_input};

    fn vec_of(states: &[(u64, u64)]) -> VecValuation {
        VecValuation::new(
            states
                .iter()
                .map(|(x, y)| VecEntry::Val(xy_input(*x, *y)))
                .collect(),
        )
    }

    #[test]
    fn matches_the_single_example_run() {
        let p = xor_problem();
        let w = xor_witness();
        let got = eval_vectorized(&p, &w, &vec_of(&[(6, 9)]), DEFAULT_FUEL).unwrap();
        assert_eq!(got, vec_of(&[(15, 9)]));
    }

    #[test]
    fn bottom_entries_absorb_every_statement() {
        let p = xor_problem();
        let w = xor_witness();
        let input = VecValuation::new(vec![VecEntry::Bottom, VecEntry::Bottom]);
        let got = eval_vectorized(&p, &w, &input, DEFAULT_FUEL).unwrap();
        assert_eq!(got, input);
    }

    #[test]
    fn mixed_vector_agrees_with_entrywise_evaluation() {
        let p = xor_problem();
        let w = xor_witness();
        let inputs = [(6, 9), (14, 15), (44, 247), (9, 6)];
        let got = eval_vectorized(&p, &w, &vec_of(&inputs), DEFAULT_FUEL).unwrap();
        for (i, (x, y)) in inputs.iter().enumerate() {
            let single = eval(&p, &w, &xy_input(*x, *y), DEFAULT_FUEL).unwrap();
            assert_eq!(got.entries[i], VecEntry::Val(single.as_state().unwrap().clone()));
        }
    }

    #[test]
    fn diverging_entries_exhaust_fuel() {
        let p = xor_problem();
        // while(x < y) { y := x | y }: keeps y fixed whenever x < y, so the
        // guard never flips for (6, 9).
        let forever = Term::new(
            1,
            vec![
                Term::new(2, vec![Term::leaf(6), Term::leaf(7)]),
                Term::new(5, vec![Term::new(9, vec![Term::leaf(6), Term::leaf(7)])]),
            ],
        );
        assert_eq!(
            eval_vectorized(&p, &forever, &vec_of(&[(6, 9)]), 1000),
            Err(EvalError::Diverged)
        );
    }
}
