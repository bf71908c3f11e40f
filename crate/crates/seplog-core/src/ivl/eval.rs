//! Partial evaluation of expressions over states.
//!
//! Evaluation reads whatever values a state holds, independent of the
//! permissions held for them (framing is enforced separately, through
//! stabilization). A heap read of a location with no value is undefined,
//! and undefinedness propagates except through `defined(e)` and the lazy
//! boolean connectives.

use num_traits::Signed;

use crate::ivl::ast::{BinOp, Expr, FieldId, TypeCtx, UnOp, Value};
use crate::ivl::state::{store_get, IvlState};
use crate::scalar::Scalar;

/// Bound-variable environment for quantifier bodies; shadows the store.
pub type Env = Vec<(String, Value)>;

#[derive(Debug, Default, Clone)]
pub struct EvalFlags {
    /// Set when a rationality witness test depended on the integer bound.
    pub bound_sensitive: bool,
}

/// How an evaluator resolves variable and heap reads.
pub trait EvalView {
    fn read_var(&self, ctx: &TypeCtx, name: &str) -> Option<Value>;
    fn read_field(&self, addr: u32, field: FieldId) -> Option<Value>;
    fn read_imm_field(&self, _addr: u32, _field: FieldId) -> Option<Value> {
        None
    }
}

impl EvalView for IvlState {
    fn read_var(&self, ctx: &TypeCtx, name: &str) -> Option<Value> {
        store_get(ctx, &self.store, name).copied()
    }

    fn read_field(&self, addr: u32, field: FieldId) -> Option<Value> {
        self.heap.value(crate::ivl::state::Loc::new(addr, field)).copied()
    }
}

pub struct Evaluator<'a, V: EvalView> {
    pub ctx: &'a TypeCtx,
    pub view: &'a V,
    pub env: &'a Env,
    pub int_witness_bound: i64,
}

impl<'a, V: EvalView> Evaluator<'a, V> {
    pub fn eval(&self, e: &Expr, flags: &mut EvalFlags) -> Option<Value> {
        match e {
            Expr::Lit(v) => Some(*v),
            Expr::NumLit(s) => Some(Value::Num(*s)),
            Expr::Var(name) => {
                if let Some((_, v)) = self.env.iter().rev().find(|(n, _)| n == name) {
                    return Some(*v);
                }
                self.view.read_var(self.ctx, name)
            }
            Expr::Field(recv, f) => match self.eval(recv, flags)? {
                Value::Addr(a) => self.view.read_field(a, *f),
                _ => None,
            },
            Expr::ImmField(recv, f) => match self.eval(recv, flags)? {
                Value::Addr(a) => self.view.read_imm_field(a, *f),
                _ => None,
            },
            Expr::Unary(op, inner) => {
                let v = self.eval(inner, flags)?;
                match (op, v) {
                    (UnOp::Not, Value::Bool(b)) => Some(Value::Bool(!b)),
                    (UnOp::Neg, Value::Int(i)) => Some(Value::Int(-i)),
                    (UnOp::Neg, Value::Num(s)) => Some(Value::Num(-s)),
                    _ => None,
                }
            }
            Expr::Binary(op, l, r) => self.eval_binary(*op, l, r, flags),
            Expr::RatWitness(inner) => {
                let v = self.eval(inner, flags)?;
                match v {
                    Value::Num(s) => {
                        if !s.is_rational() {
                            return Some(Value::Bool(false));
                        }
                        let in_bound = s.rat.numer().abs() <= self.int_witness_bound
                            && *s.rat.denom() <= self.int_witness_bound;
                        if !in_bound {
                            flags.bound_sensitive = true;
                        }
                        Some(Value::Bool(in_bound))
                    }
                    _ => None,
                }
            }
            Expr::Defined(inner) => Some(Value::Bool(self.eval(inner, flags).is_some())),
        }
    }

    fn eval_binary(
        &self,
        op: BinOp,
        l: &Expr,
        r: &Expr,
        flags: &mut EvalFlags,
    ) -> Option<Value> {
        // Lazy boolean connectives short-circuit on a defined left operand.
        match op {
            BinOp::And => {
                return match self.eval(l, flags)? {
                    Value::Bool(false) => Some(Value::Bool(false)),
                    Value::Bool(true) => match self.eval(r, flags)? {
                        Value::Bool(b) => Some(Value::Bool(b)),
                        _ => None,
                    },
                    _ => None,
                };
            }
            BinOp::Or => {
                return match self.eval(l, flags)? {
                    Value::Bool(true) => Some(Value::Bool(true)),
                    Value::Bool(false) => match self.eval(r, flags)? {
                        Value::Bool(b) => Some(Value::Bool(b)),
                        _ => None,
                    },
                    _ => None,
                };
            }
            BinOp::Implies => {
                return match self.eval(l, flags)? {
                    Value::Bool(false) => Some(Value::Bool(true)),
                    Value::Bool(true) => match self.eval(r, flags)? {
                        Value::Bool(b) => Some(Value::Bool(b)),
                        _ => None,
                    },
                    _ => None,
                };
            }
            _ => {}
        }
        let lv = self.eval(l, flags)?;
        let rv = self.eval(r, flags)?;
        match op {
            BinOp::Eq => eq_values(lv, rv).map(Value::Bool),
            BinOp::Ne => eq_values(lv, rv).map(|b| Value::Bool(!b)),
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let ord = cmp_values(lv, rv)?;
                Some(Value::Bool(match op {
                    BinOp::Lt => ord == std::cmp::Ordering::Less,
                    BinOp::Le => ord != std::cmp::Ordering::Greater,
                    BinOp::Gt => ord == std::cmp::Ordering::Greater,
                    _ => ord != std::cmp::Ordering::Less,
                }))
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul => arith(op, lv, rv),
            BinOp::Div => match (lv, rv) {
                (Value::Num(a), Value::Num(b)) if !b.is_zero() => Some(Value::Num(a / b)),
                (Value::Int(a), Value::Int(b)) if b != 0 => {
                    Some(Value::Num(Scalar::from_int(a) / Scalar::from_int(b)))
                }
                _ => None,
            },
            _ => unreachable!(),
        }
    }
}

fn eq_values(l: Value, r: Value) -> Option<bool> {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => Some(a == b),
        (Value::Bool(a), Value::Bool(b)) => Some(a == b),
        (Value::Num(a), Value::Num(b)) => Some(a == b),
        (Value::Null | Value::Addr(_), Value::Null | Value::Addr(_)) => Some(l == r),
        // Mixed numeric literals appear when Int literals meet Rat/Real.
        (Value::Int(a), Value::Num(b)) | (Value::Num(b), Value::Int(a)) => {
            Some(Scalar::from_int(a) == b)
        }
        _ => None,
    }
}

fn cmp_values(l: Value, r: Value) -> Option<std::cmp::Ordering> {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => Some(a.cmp(&b)),
        (Value::Num(a), Value::Num(b)) => Some(a.cmp(&b)),
        (Value::Int(a), Value::Num(b)) => Some(Scalar::from_int(a).cmp(&b)),
        (Value::Num(a), Value::Int(b)) => Some(a.cmp(&Scalar::from_int(b))),
        _ => None,
    }
}

fn arith(op: BinOp, l: Value, r: Value) -> Option<Value> {
    match (l, r) {
        (Value::Int(a), Value::Int(b)) => Some(Value::Int(match op {
            BinOp::Add => a.checked_add(b)?,
            BinOp::Sub => a.checked_sub(b)?,
            _ => a.checked_mul(b)?,
        })),
        (Value::Num(a), Value::Num(b)) => Some(Value::Num(match op {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            _ => a * b,
        })),
        (Value::Int(a), Value::Num(b)) => arith(op, Value::Num(Scalar::from_int(a)), Value::Num(b)),
        (Value::Num(a), Value::Int(b)) => arith(op, Value::Num(a), Value::Num(Scalar::from_int(b))),
        _ => None,
    }
}

/// Evaluate on an IVL state without extra environment.
pub fn eval_ivl(
    ctx: &TypeCtx,
    state: &IvlState,
    env: &Env,
    int_witness_bound: i64,
    e: &Expr,
    flags: &mut EvalFlags,
) -> Option<Value> {
    Evaluator { ctx, view: state, env, int_witness_bound }.eval(e, flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivl::ast::Ty;
    use crate::ivl::state::{Heap, Loc};
    use smallvec::smallvec;

    fn ctx() -> TypeCtx {
        TypeCtx {
            vars: vec![("x".into(), Ty::Ref), ("y".into(), Ty::Int)],
            fields: vec![("f".into(), Ty::Int)],
            imm_fields: vec![],
        }
    }

    #[test]
    fn heap_read_without_value_is_undefined() {
        let ctx = ctx();
        let state = IvlState::new(smallvec![Some(Value::Addr(0)), Some(Value::Int(1))], Heap::empty());
        let mut flags = EvalFlags::default();
        let read = Expr::Field(Box::new(Expr::var("x")), FieldId(0));
        assert_eq!(eval_ivl(&ctx, &state, &vec![], 64, &read, &mut flags), None);
        let defined = Expr::Defined(Box::new(read));
        assert_eq!(
            eval_ivl(&ctx, &state, &vec![], 64, &defined, &mut flags),
            Some(Value::Bool(false))
        );
    }

    #[test]
    fn dangling_values_remain_readable() {
        let ctx = ctx();
        let heap = Heap::empty().with(Loc::new(0, FieldId(0)), Value::Int(7), Scalar::zero());
        let state = IvlState::new(smallvec![Some(Value::Addr(0)), Some(Value::Int(1))], heap);
        let mut flags = EvalFlags::default();
        let read = Expr::Field(Box::new(Expr::var("x")), FieldId(0));
        assert_eq!(
            eval_ivl(&ctx, &state, &vec![], 64, &read, &mut flags),
            Some(Value::Int(7))
        );
    }

    #[test]
    fn rat_witness_distinguishes_radicals() {
        let ctx = ctx();
        let state = IvlState::new(smallvec![Some(Value::Null), Some(Value::Int(0))], Heap::empty());
        let mut flags = EvalFlags::default();
        let env = vec![("q".to_string(), Value::Num(Scalar::ratio(1, 2)))];
        let test = Expr::RatWitness(Box::new(Expr::var("q")));
        assert_eq!(eval_ivl(&ctx, &state, &env, 64, &test, &mut flags), Some(Value::Bool(true)));
        let env = vec![("q".to_string(), Value::Num(Scalar::inv_sqrt2()))];
        assert_eq!(eval_ivl(&ctx, &state, &env, 64, &test, &mut flags), Some(Value::Bool(false)));
        assert!(!flags.bound_sensitive);
        let env = vec![("q".to_string(), Value::Num(Scalar::ratio(1, 129)))];
        assert_eq!(eval_ivl(&ctx, &state, &env, 64, &test, &mut flags), Some(Value::Bool(false)));
        assert!(flags.bound_sensitive);
    }

    #[test]
    fn lazy_connectives_absorb_undefined_right() {
        let ctx = ctx();
        let state = IvlState::new(smallvec![Some(Value::Null), Some(Value::Int(1))], Heap::empty());
        let mut flags = EvalFlags::default();
        let bad_read = Expr::Field(Box::new(Expr::var("x")), FieldId(0));
        let guarded = Expr::and(Expr::lit_false(), Expr::eq(bad_read.clone(), Expr::NumLit(Scalar::zero())));
        assert_eq!(
            eval_ivl(&ctx, &state, &vec![], 64, &guarded, &mut flags),
            Some(Value::Bool(false))
        );
        let strict = Expr::eq(bad_read, Expr::NumLit(Scalar::zero()));
        assert_eq!(eval_ivl(&ctx, &state, &vec![], 64, &strict, &mut flags), None);
    }
}
