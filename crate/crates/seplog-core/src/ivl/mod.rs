//! MiniIVL: syntax, bounded state spaces, assertion satisfaction, and an
//! enumerative verifier for the inhale/exhale/havoc statement family.

pub mod ast;
pub mod eval;
pub mod exec;
pub mod sat;
pub mod space;
pub mod state;

pub use ast::{Assertion, BinOp, Expr, FieldId, PermExpr, Statement, Ty, TypeCtx, UnOp, Value};
pub use exec::{verify, verify_from_top, Executor, Failure, Verdict};
pub use sat::{
    assertion_frames, frames_expr, frames_state, monotonize_set, self_framing, stable_under,
    SatCtx,
};
pub use space::{SemSet, SpaceBounds, SpaceError, StateSpace};
pub use state::{Heap, HeapCarrier, IvlState, IvlStateCarrier, Loc, Store};
