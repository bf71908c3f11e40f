//! Front-end syntax shared by the five source languages.
//!
//! The composite layer (sequencing, conditionals, annotated loops and
//! parallel composition, and the assertion connectives) is common; each
//! language contributes its own input atoms and primitive statements, and
//! a legality check restricts which of them a given language admits.

use crate::ivl::ast::{Expr, FieldId, Ty, VarName};

/// Which front-end language is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrontendKind {
    /// Rational fractional permissions.
    RatPerm,
    /// Lazy field creation: fields exist but hold a "not yet added" marker
    /// until first assignment; reading an unadded field is a runtime error.
    LazyFields,
    /// A mutable fractional heap plus a separate immutable heap whose
    /// resources are duplicable.
    ImmHeap,
    /// All-or-nothing permissions; exists for the unsound-encoding suite.
    Binary,
    /// Counting permissions (1 - k·ε / k·ε); unsound-encoding suite.
    Counting,
}

impl FrontendKind {
    pub fn tag(self) -> &'static str {
        match self {
            FrontendKind::RatPerm => "fea",
            FrontendKind::LazyFields => "feb",
            FrontendKind::ImmHeap => "fec",
            FrontendKind::Binary => "febin",
            FrontendKind::Counting => "fecnt",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "fea" => FrontendKind::RatPerm,
            "feb" => FrontendKind::LazyFields,
            "fec" => FrontendKind::ImmHeap,
            "febin" => FrontendKind::Binary,
            "fecnt" => FrontendKind::Counting,
            _ => return None,
        })
    }
}

/// Input assertion atoms. Legality per language is checked by `wf`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeAtom {
    /// `acc(x.f, p)` — fractional ownership (RatPerm, LazyFields, ImmHeap;
    /// Binary with amounts 0 and 1).
    Acc { recv: Expr, field: FieldId, amount: Expr },
    /// `x.f |-> e` / `x.f |-> _` — full ownership, optionally with a value
    /// constraint. The primitive points-to of the binary language.
    PointsTo { recv: Expr, field: FieldId, rhs: Option<Expr> },
    /// `readable(x.f)` — binary full ownership recorded as read-intent; the
    /// unsound encoding translates it as an arbitrary positive fraction.
    ReadToken { recv: Expr, field: FieldId },
    /// `init(x.f)` — the lazy field has been created.
    Init { recv: Expr, field: FieldId },
    /// `uninit(x.f)` — the lazy field exists but was never assigned.
    Uninit { recv: Expr, field: FieldId },
    /// `immInit(x.f)` — the immutable location is allocated (duplicable).
    ImmInit { recv: Expr, field: FieldId },
    /// `eps(x.f)` — one counting-permission unit.
    CountUnit { recv: Expr, field: FieldId },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeAssertion {
    Atom(FeAtom),
    Expr(Expr),
    Star(Box<FeAssertion>, Box<FeAssertion>),
    Or(Box<FeAssertion>, Box<FeAssertion>),
    Implies(Expr, Box<FeAssertion>),
    Exists { var: VarName, ty: Ty, body: Box<FeAssertion> },
    /// Magic wand; admitted as an input assertion for the soundness lab.
    Wand(Box<FeAssertion>, Box<FeAssertion>),
}

impl FeAssertion {
    pub fn lit_true() -> FeAssertion {
        FeAssertion::Expr(Expr::lit_true())
    }

    pub fn star(a: FeAssertion, b: FeAssertion) -> FeAssertion {
        FeAssertion::Star(Box::new(a), Box::new(b))
    }
}

/// Primitive statements; legality per language is checked by `wf`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FePrim {
    Assign { var: VarName, expr: Expr },
    FieldAssign { recv: Expr, field: FieldId, expr: Expr },
    Alloc { var: VarName, fields: Vec<FieldId> },
    Free { recv: Expr, field: FieldId },
    /// `x := initImm(f, v)`: allocate and initialize an immutable location.
    InitImm { var: VarName, field: FieldId, src: VarName },
    /// Runtime boolean check; aborts when false (counting language).
    Assert { expr: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeStatement {
    Skip,
    Prim(FePrim),
    Seq(Box<FeStatement>, Box<FeStatement>),
    If {
        cond: Expr,
        then_branch: Box<FeStatement>,
        else_branch: Box<FeStatement>,
    },
    While {
        cond: Expr,
        invariant: FeAssertion,
        body: Box<FeStatement>,
    },
    Par {
        pre1: FeAssertion,
        c1: Box<FeStatement>,
        post1: FeAssertion,
        pre2: FeAssertion,
        c2: Box<FeStatement>,
        post2: FeAssertion,
    },
}

impl FeStatement {
    pub fn seq_all(stmts: Vec<FeStatement>) -> FeStatement {
        let mut it = stmts.into_iter();
        let first = it.next().unwrap_or(FeStatement::Skip);
        it.fold(first, |acc, s| FeStatement::Seq(Box::new(acc), Box::new(s)))
    }

    /// Number of loop and parallel-composition nodes; the translation emits
    /// exactly one auxiliary statement set entry per such node.
    pub fn loop_par_count(&self) -> usize {
        match self {
            FeStatement::Skip | FeStatement::Prim(_) => 0,
            FeStatement::Seq(a, b) => a.loop_par_count() + b.loop_par_count(),
            FeStatement::If { then_branch, else_branch, .. } => {
                then_branch.loop_par_count() + else_branch.loop_par_count()
            }
            FeStatement::While { body, .. } => 1 + body.loop_par_count(),
            FeStatement::Par { c1, c2, .. } => {
                1 + c1.loop_par_count() + c2.loop_par_count()
            }
        }
    }
}

/// A front-end program with its contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeProgram {
    pub kind: FrontendKind,
    pub ctx: crate::ivl::ast::TypeCtx,
    pub requires: FeAssertion,
    pub ensures: FeAssertion,
    pub body: FeStatement,
}
