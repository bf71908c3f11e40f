//! Set-transformer semantics for MiniIVL statements and the verifier built
//! on it.
//!
//! `strongest_post` realizes the axiomatic rules over extensional state
//! sets: inhale produces the separating product with a framedness side
//! condition, exhale splits every state and returns the stabilize-closure
//! of the frames (the weakest self-framing choice derivable from per-state
//! splits), havoc rebinds a variable over the space's value set, and
//! conditionals branch with a definedness check. `assert A` is `exhale A`.

use serde::Serialize;
use thiserror::Error;

use crate::ivl::ast::{Assertion, Expr, PermExpr, Statement, Value};
use crate::ivl::eval::Evaluator;
use crate::ivl::sat::{self, SatCtx};
use crate::ivl::space::{SemSet, StateSpace};
use crate::ivl::state::{IvlState, Loc};
use crate::scalar::Scalar;

/// Verification-relevant failures; each carries the witness state rendered
/// against the active type context.
#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize)]
pub enum Failure {
    #[error("exhale found no valid split at state {state}")]
    ExhaleNoSplit { state: String },
    #[error("assertion is not framed at state {state}")]
    AssertionIllFramed { state: String },
    #[error("expression evaluation failed at state {state}")]
    ExprUndefined { state: String },
    #[error("insufficient permission at state {state}")]
    PermissionMissing { state: String },
    #[error("computed state left the bounded space: {state}")]
    OutOfSpace { state: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Ok,
    Fail {
        failure: Option<Failure>,
        /// A reachable state violating the postcondition, when that is the
        /// cause of failure.
        post_witness: Option<String>,
    },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

fn index_or_oos(space: &StateSpace, s: &IvlState) -> Result<u32, Failure> {
    space
        .index_of(s)
        .ok_or_else(|| Failure::OutOfSpace { state: s.display(&space.ctx) })
}

/// Stabilize-closure of a set of (stable) states, as a self-framing set.
fn stabilize_closure(space: &StateSpace, stable_members: &SemSet) -> SemSet {
    let mut out = SemSet::empty(space.len());
    for i in 0..space.len() as u32 {
        let stab = space.state(i).stabilize();
        if let Some(j) = space.index_of(&stab) {
            if stable_members.contains(j) {
                out.insert(i);
            }
        }
    }
    out
}

pub struct Executor<'a> {
    pub sat: SatCtx<'a>,
}

impl<'a> Executor<'a> {
    pub fn new(space: &'a StateSpace) -> Self {
        Executor { sat: SatCtx::new(space) }
    }

    fn space(&self) -> &'a StateSpace {
        self.sat.space
    }

    fn eval(&mut self, w: &IvlState, e: &Expr) -> Option<Value> {
        let space = self.space();
        let env = Vec::new();
        Evaluator {
            ctx: &space.ctx,
            view: w,
            env: &env,
            int_witness_bound: space.bounds.int_witness_bound,
        }
        .eval(e, &mut self.sat.flags)
    }

    /// The strongest postcondition of `p` under `stmt`. The precondition is
    /// required to be self-framing; the violation is itself a failure.
    pub fn strongest_post(&mut self, p: &SemSet, stmt: &Statement) -> Result<SemSet, Failure> {
        let space = self.space();
        if let Some(i) = sat::self_framing_witness(space, p) {
            return Err(Failure::AssertionIllFramed {
                state: space.state(i).display(&space.ctx),
            });
        }
        self.post(p, stmt)
    }

    fn post(&mut self, p: &SemSet, stmt: &Statement) -> Result<SemSet, Failure> {
        let space = self.space();
        match stmt {
            Statement::Skip => Ok(p.clone()),
            Statement::Assign { var, expr } => {
                let slot = space
                    .ctx
                    .var_slot(var)
                    .unwrap_or_else(|| panic!("undeclared variable {var}"));
                let mut out = SemSet::empty(space.len());
                for i in p.iter() {
                    let w = space.state(i).clone();
                    let v = self.eval(&w, expr).ok_or_else(|| Failure::ExprUndefined {
                        state: w.display(&space.ctx),
                    })?;
                    let next = w.with_var(slot, v);
                    out.insert(index_or_oos(space, &next)?);
                }
                Ok(out)
            }
            Statement::FieldAssign { recv, field, expr } => {
                let mut out = SemSet::empty(space.len());
                for i in p.iter() {
                    let w = space.state(i).clone();
                    let addr = match self.eval(&w, recv) {
                        Some(Value::Addr(a)) => a,
                        Some(Value::Null) => {
                            return Err(Failure::PermissionMissing {
                                state: w.display(&space.ctx),
                            })
                        }
                        _ => {
                            return Err(Failure::ExprUndefined {
                                state: w.display(&space.ctx),
                            })
                        }
                    };
                    let loc = Loc::new(addr, *field);
                    if w.heap.perm(loc) < Scalar::one() {
                        return Err(Failure::PermissionMissing {
                            state: w.display(&space.ctx),
                        });
                    }
                    let v = self.eval(&w, expr).ok_or_else(|| Failure::ExprUndefined {
                        state: w.display(&space.ctx),
                    })?;
                    let mut next = w.clone();
                    next.heap.set(loc, Some(v), Scalar::one());
                    out.insert(index_or_oos(space, &next)?);
                }
                Ok(out)
            }
            Statement::Havoc { var } => {
                let slot = space
                    .ctx
                    .var_slot(var)
                    .unwrap_or_else(|| panic!("undeclared variable {var}"));
                let ty = space.ctx.var_ty(var).unwrap();
                let values = space.values(ty).to_vec();
                let mut out = SemSet::empty(space.len());
                for i in p.iter() {
                    let w = space.state(i);
                    for v in &values {
                        let next = w.with_var(slot, *v);
                        out.insert(index_or_oos(space, &next)?);
                    }
                }
                Ok(out)
            }
            Statement::Inhale(a) => {
                let a_set = self.sat.sem_set(a);
                let mut out = SemSet::empty(space.len());
                for i in p.iter() {
                    for j in a_set.iter() {
                        if let Some(sum) = space.state(i).oplus(space.state(j)) {
                            out.insert(index_or_oos(space, &sum)?);
                        }
                    }
                }
                // Framedness side condition: the produced set must be
                // self-framing for the rule to apply.
                if let Some(i) = sat::self_framing_witness(space, &out) {
                    return Err(Failure::AssertionIllFramed {
                        state: space.state(i).display(&space.ctx),
                    });
                }
                Ok(out)
            }
            Statement::Exhale(a) | Statement::Assert(a) => self.exhale(p, a),
            Statement::Seq(c1, c2) => {
                let mid = self.post(p, c1)?;
                self.post(&mid, c2)
            }
            Statement::If { cond, then_branch, else_branch } => {
                let mut p_true = SemSet::empty(space.len());
                let mut p_false = SemSet::empty(space.len());
                for i in p.iter() {
                    let w = space.state(i).clone();
                    match self.eval(&w, cond) {
                        Some(Value::Bool(true)) => p_true.insert(i),
                        Some(Value::Bool(false)) => p_false.insert(i),
                        _ => {
                            return Err(Failure::ExprUndefined {
                                state: w.display(&space.ctx),
                            })
                        }
                    }
                }
                let mut b1 = self.post(&p_true, then_branch)?;
                let b2 = self.post(&p_false, else_branch)?;
                b1.union_with(&b2);
                Ok(b1)
            }
        }
    }

    /// Exhale: every state must decompose into a part satisfying `a` and a
    /// frame. Only the ⪰-maximal frames are kept (the split consumes no
    /// more than the assertion demands, the way a verifier removes exactly
    /// the stated amount); the result is the stabilize-closure of those
    /// frames, which is the weakest self-framing choice for the rule's
    /// existentially quantified postcondition derivable from per-state
    /// splits. Wildcard amounts consume the smallest positive lattice
    /// amount, so a positive remainder survives whenever more than the
    /// minimum is held.
    fn exhale(&mut self, p: &SemSet, a: &Assertion) -> Result<SemSet, Failure> {
        let space = self.space();
        let masks = space.masks.clone();
        let min_positive = masks
            .iter()
            .copied()
            .find(|m| m.signum() > 0)
            .unwrap_or_else(Scalar::one);
        let mut frames = SemSet::empty(space.len());
        for i in p.iter() {
            let w = space.state(i).clone();
            let a_inst = self.instantiate_wildcards(&w, a, min_positive)?;
            let mut valid: Vec<IvlState> = Vec::new();
            for (part, frame) in w.splits(&masks) {
                if self.sat.sat(&part, &a_inst) {
                    valid.push(frame);
                }
            }
            if valid.is_empty() {
                return Err(Failure::ExhaleNoSplit { state: w.display(&space.ctx) });
            }
            valid.sort();
            valid.dedup();
            for f in &valid {
                let maximal = !valid.iter().any(|g| g != f && g.geq(f));
                if maximal {
                    frames.insert(index_or_oos(space, &f.stabilize())?);
                }
            }
        }
        Ok(stabilize_closure(space, &frames))
    }

    /// Replace each wildcard accessibility amount by the concrete amount to
    /// consume from this state.
    fn instantiate_wildcards(
        &mut self,
        w: &IvlState,
        a: &Assertion,
        min_positive: Scalar,
    ) -> Result<Assertion, Failure> {
        Ok(match a {
            Assertion::Acc { recv, field, amount: PermExpr::Wildcard } => {
                let space = self.space();
                let addr = match self.eval(w, recv) {
                    Some(Value::Addr(ad)) => ad,
                    _ => {
                        return Err(Failure::ExprUndefined { state: w.display(&space.ctx) });
                    }
                };
                let held = w.heap.perm(Loc::new(addr, *field));
                // No permission held: leave the wildcard in place; no split
                // can satisfy it and the exhale will report the witness.
                let amt = if held.signum() > 0 { held.min(min_positive) } else { return Ok(a.clone()) };
                Assertion::Acc {
                    recv: recv.clone(),
                    field: *field,
                    amount: PermExpr::Exact(Expr::Lit(Value::Num(amt))),
                }
            }
            Assertion::Star(l, r) => Assertion::Star(
                Box::new(self.instantiate_wildcards(w, l, min_positive)?),
                Box::new(self.instantiate_wildcards(w, r, min_positive)?),
            ),
            Assertion::Or(l, r) => Assertion::Or(
                Box::new(self.instantiate_wildcards(w, l, min_positive)?),
                Box::new(self.instantiate_wildcards(w, r, min_positive)?),
            ),
            Assertion::Implies(c, b) => Assertion::Implies(
                c.clone(),
                Box::new(self.instantiate_wildcards(w, b, min_positive)?),
            ),
            Assertion::Exists { var, ty, guard, body } => Assertion::Exists {
                var: var.clone(),
                ty: *ty,
                guard: guard.clone(),
                body: Box::new(self.instantiate_wildcards(w, body, min_positive)?),
            },
            _ => a.clone(),
        })
    }
}

/// Check the triple `[P] C [Q]` over the space: both contract assertions
/// must be self-framing, the strongest post must be computable, and every
/// reachable state must satisfy the postcondition.
pub fn verify(
    space: &StateSpace,
    pre: &Assertion,
    stmt: &Statement,
    post: &Assertion,
) -> Verdict {
    let mut exec = Executor::new(space);
    let p = exec.sat.sem_set(pre);
    let q = exec.sat.sem_set(post);
    for (name, set) in [("precondition", &p), ("postcondition", &q)] {
        if let Some(i) = sat::self_framing_witness(space, set) {
            let _ = name;
            return Verdict::Fail {
                failure: Some(Failure::AssertionIllFramed {
                    state: space.state(i).display(&space.ctx),
                }),
                post_witness: None,
            };
        }
    }
    match exec.strongest_post(&p, stmt) {
        Err(failure) => Verdict::Fail { failure: Some(failure), post_witness: None },
        Ok(sp) => match sp.first_not_in(&q) {
            None => Verdict::Ok,
            Some(i) => Verdict::Fail {
                failure: None,
                post_witness: Some(space.state(i).display(&space.ctx)),
            },
        },
    }
}

/// Check only that execution from `⊤` cannot fail; used for auxiliary
/// statements whose postcondition is existentially quantified.
pub fn verify_from_top(space: &StateSpace, stmt: &Statement) -> Verdict {
    let mut exec = Executor::new(space);
    let top = space.top();
    match exec.strongest_post(&top, stmt) {
        Err(failure) => Verdict::Fail { failure: Some(failure), post_witness: None },
        Ok(_) => Verdict::Ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivl::ast::{FieldId, Ty, TypeCtx};
    use crate::ivl::space::SpaceBounds;

    fn space() -> StateSpace {
        let ctx = TypeCtx {
            vars: vec![("x".into(), Ty::Ref), ("y".into(), Ty::Int)],
            fields: vec![("f".into(), Ty::Int)],
            imm_fields: vec![],
        };
        StateSpace::new(ctx, SpaceBounds { addrs: 1, ..Default::default() }).unwrap()
    }

    fn acc(amount_num: i64, amount_den: i64) -> Assertion {
        Assertion::Acc {
            recv: Expr::var("x"),
            field: FieldId(0),
            amount: PermExpr::Exact(Expr::Lit(Value::Num(Scalar::ratio(
                amount_num, amount_den,
            )))),
        }
    }

    #[test]
    fn skip_preserves_acc() {
        let space = space();
        let v = verify(&space, &acc(1, 1), &Statement::Skip, &acc(1, 1));
        assert_eq!(v, Verdict::Ok);
    }

    #[test]
    fn exhale_half_keeps_half_with_value() {
        let space = space();
        let mut exec = Executor::new(&space);
        let p = exec.sat.sem_set(&acc(1, 1));
        let q = exec
            .strongest_post(&p, &Statement::Exhale(acc(1, 2)))
            .unwrap();
        // Every stable surviving state holds exactly half with the value kept.
        let half = Scalar::ratio(1, 2);
        let mut saw_stable = false;
        for i in q.iter() {
            let w = space.state(i);
            if w.is_stable() && w.store[0] == Some(Value::Addr(0)) {
                saw_stable = true;
                assert_eq!(w.heap.perm(Loc::new(0, FieldId(0))), half);
                assert!(w.heap.value(Loc::new(0, FieldId(0))).is_some());
            }
        }
        assert!(saw_stable);
        // Oracle: independent split enumeration on one sample state,
        // keeping the frames no other valid frame dominates.
        let sample = space
            .states
            .iter()
            .find(|s| {
                s.store[0] == Some(Value::Addr(0))
                    && s.heap.perm(Loc::new(0, FieldId(0))) == Scalar::one()
            })
            .unwrap();
        let mut sat_ctx = SatCtx::new(&space);
        let mut frames = Vec::new();
        for (part, frame) in sample.splits(&space.masks) {
            if sat_ctx.sat(&part, &acc(1, 2)) {
                frames.push(frame);
            }
        }
        frames.sort();
        frames.dedup();
        let maximal: Vec<_> = frames
            .iter()
            .filter(|f| !frames.iter().any(|g| &g != f && g.geq(f)))
            .collect();
        for f in &maximal {
            assert!(q.contains(space.index_of(&f.stabilize()).unwrap()));
            assert_eq!(f.heap.perm(Loc::new(0, FieldId(0))), half);
        }
        // Over-consumed frames (e.g. nothing left) are not in Q.
        let drained = sample.unit_of();
        assert!(!q.contains(space.index_of(&drained).unwrap()));
    }

    #[test]
    fn exhale_without_permission_reports_witness() {
        let space = space();
        let mut exec = Executor::new(&space);
        let p = exec.sat.sem_set(&acc(0, 1));
        let r = exec.strongest_post(&p, &Statement::Exhale(acc(1, 2)));
        assert!(matches!(r, Err(Failure::ExhaleNoSplit { .. })));
    }

    #[test]
    fn inhale_true_is_identity_up_to_core() {
        let space = space();
        let mut exec = Executor::new(&space);
        let p = exec.sat.sem_set(&acc(1, 1));
        let q = exec
            .strongest_post(&p, &Statement::Inhale(Assertion::lit_true()))
            .unwrap();
        // P ⊆ Q and Q only adds core (zero-permission) resources.
        assert!(p.is_subset(&q));
        for i in q.iter() {
            let w = space.state(i);
            assert!(exec.sat.sat(w, &acc(1, 1)));
        }
    }

    #[test]
    fn exhale_post_is_self_framing_and_rejoins(){
        let space = space();
        let mut exec = Executor::new(&space);
        let p = exec.sat.sem_set(&acc(1, 1));
        let a = acc(1, 2);
        let q = exec.strongest_post(&p, &Statement::Exhale(a.clone())).unwrap();
        assert!(sat::self_framing(&space, &q));
        // P ⊆ Q * ⟦A⟧.
        let a_set = exec.sat.sem_set(&a);
        let mut product = SemSet::empty(space.len());
        for i in q.iter() {
            for j in a_set.iter() {
                if let Some(sum) = space.state(i).oplus(space.state(j)) {
                    product.insert(space.index_of(&sum).unwrap());
                }
            }
        }
        assert!(p.is_subset(&product));
    }

    #[test]
    fn wildcard_exhale_retains_positive_permission() {
        let space = space();
        let mut exec = Executor::new(&space);
        let p = exec.sat.sem_set(&acc(1, 1));
        let wild = Assertion::Acc {
            recv: Expr::var("x"),
            field: FieldId(0),
            amount: PermExpr::Wildcard,
        };
        let q = exec.strongest_post(&p, &Statement::Exhale(wild)).unwrap();
        // The read x.f must still be defined afterwards: 3/4 remains.
        let read = Statement::Assign {
            var: "y".into(),
            expr: Expr::Field(Box::new(Expr::var("x")), FieldId(0)),
        };
        assert!(exec.strongest_post(&q, &read).is_ok());
        for i in q.iter() {
            let w = space.state(i);
            if w.is_stable() && w.store[0] == Some(Value::Addr(0)) {
                assert_eq!(w.heap.perm(Loc::new(0, FieldId(0))), Scalar::ratio(3, 4));
            }
        }
    }

    #[test]
    fn verify_monotone_in_postcondition() {
        // Enlarging Q never flips ok to fail: compare Q against Q ∨ extra.
        let space = space();
        let pre = acc(1, 1);
        let c = Statement::Exhale(acc(1, 2));
        let q1 = acc(1, 2);
        let q2 = Assertion::Or(Box::new(q1.clone()), Box::new(acc(1, 1)));
        let v1 = verify(&space, &pre, &c, &q1);
        let v2 = verify(&space, &pre, &c, &q2);
        assert_eq!(v1, Verdict::Ok);
        assert_eq!(v2, Verdict::Ok);
    }

    #[test]
    fn havoc_rebinds_over_value_set() {
        let space = space();
        let mut exec = Executor::new(&space);
        let p = exec.sat.sem_set(&Assertion::Expr(Expr::eq(
            Expr::var("y"),
            Expr::Lit(Value::Int(0)),
        )));
        let q = exec
            .strongest_post(&p, &Statement::Havoc { var: "y".into() })
            .unwrap();
        let vals: std::collections::BTreeSet<_> =
            q.iter().filter_map(|i| space.state(i).store[1]).collect();
        assert_eq!(vals.len(), 2);
    }
}
