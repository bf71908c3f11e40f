//! MiniIVL syntax: a Viper-like verification language with accessibility
//! predicates, guarded typed existentials, and magic wands.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Int,
    Bool,
    Ref,
    /// Rational numbers; the front-end numeric type.
    Rat,
    /// Real numbers, modeled exactly as Q(√2); the IVL numeric type.
    Real,
}

impl Ty {
    pub fn name(self) -> &'static str {
        match self {
            Ty::Int => "Int",
            Ty::Bool => "Bool",
            Ty::Ref => "Ref",
            Ty::Rat => "Rat",
            Ty::Real => "Real",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Null,
    Addr(u32),
    Num(Scalar),
}

impl Value {
    pub fn has_ty(&self, ty: Ty) -> bool {
        match (self, ty) {
            (Value::Int(_), Ty::Int) => true,
            (Value::Bool(_), Ty::Bool) => true,
            (Value::Null | Value::Addr(_), Ty::Ref) => true,
            (Value::Num(s), Ty::Rat) => s.is_rational(),
            (Value::Num(_), Ty::Real) => true,
            _ => false,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<Scalar> {
        match self {
            Value::Num(s) => Some(*s),
            _ => None,
        }
    }
}

/// Index into the active type context's field table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldId(pub u16);

/// Variables are referenced by name; contexts resolve them to store slots.
pub type VarName = String;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

/// Expressions are shared between the front-ends and the IVL; evaluation is
/// partial (heap reads of absent values fail).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Lit(Value),
    /// An integer-or-numeric literal before type inference; the checker
    /// resolves it to `Lit`.
    NumLit(Scalar),
    Var(VarName),
    /// Mutable-heap field read `e.f`.
    Field(Box<Expr>, FieldId),
    /// Immutable-heap field read `imm(e.f)`; front-end C only.
    ImmField(Box<Expr>, FieldId),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// True iff the operand denotes a rational with small numerator and
    /// denominator; realizes the value invariant for Rat-typed witnesses.
    RatWitness(Box<Expr>),
    /// True iff the operand expression evaluates successfully.
    Defined(Box<Expr>),
}

impl Expr {
    pub fn lit_true() -> Expr {
        Expr::Lit(Value::Bool(true))
    }

    pub fn lit_false() -> Expr {
        Expr::Lit(Value::Bool(false))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Eq, Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::And, Box::new(a), Box::new(b))
    }

    pub fn not(a: Expr) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(a))
    }
}

/// Permission amount in an accessibility predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PermExpr {
    Exact(Expr),
    /// `acc(e.f, _)`: any strictly positive amount.
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    /// Pure boolean expression; unsatisfied when evaluation fails.
    Expr(Expr),
    Acc {
        recv: Expr,
        field: FieldId,
        amount: PermExpr,
    },
    Star(Box<Assertion>, Box<Assertion>),
    Or(Box<Assertion>, Box<Assertion>),
    Implies(Expr, Box<Assertion>),
    /// Typed existential; the guard slot is always present and constrains
    /// admissible witnesses (trivially true when no constraint applies).
    Exists {
        var: VarName,
        ty: Ty,
        guard: Expr,
        body: Box<Assertion>,
    },
    /// Magic wand; used by the counterexample suite.
    Wand(Box<Assertion>, Box<Assertion>),
}

impl Assertion {
    pub fn lit_true() -> Assertion {
        Assertion::Expr(Expr::lit_true())
    }

    pub fn star(a: Assertion, b: Assertion) -> Assertion {
        Assertion::Star(Box::new(a), Box::new(b))
    }

    pub fn star_all(parts: Vec<Assertion>) -> Assertion {
        let mut it = parts.into_iter();
        let first = it.next().unwrap_or_else(Assertion::lit_true);
        it.fold(first, Assertion::star)
    }

    pub fn acc_full(recv: Expr, field: FieldId) -> Assertion {
        Assertion::Acc {
            recv,
            field,
            amount: PermExpr::Exact(Expr::Lit(Value::Num(Scalar::one()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Skip,
    Assign {
        var: VarName,
        expr: Expr,
    },
    FieldAssign {
        recv: Expr,
        field: FieldId,
        expr: Expr,
    },
    Havoc {
        var: VarName,
    },
    Inhale(Assertion),
    Exhale(Assertion),
    /// `assert A` is `exhale A`; kept as separate syntax for readability.
    Assert(Assertion),
    Seq(Box<Statement>, Box<Statement>),
    If {
        cond: Expr,
        then_branch: Box<Statement>,
        else_branch: Box<Statement>,
    },
}

impl Statement {
    pub fn seq_all(stmts: Vec<Statement>) -> Statement {
        let mut it = stmts.into_iter();
        let first = it.next().unwrap_or(Statement::Skip);
        it.fold(first, |acc, s| Statement::Seq(Box::new(acc), Box::new(s)))
    }
}

/// Declared variables and fields. Field identifiers index `fields`;
/// front-end C additionally declares immutable fields indexed separately.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeCtx {
    pub vars: Vec<(String, Ty)>,
    pub fields: Vec<(String, Ty)>,
    pub imm_fields: Vec<(String, Ty)>,
}

impl TypeCtx {
    pub fn var_ty(&self, name: &str) -> Option<Ty> {
        self.vars.iter().find(|(n, _)| n == name).map(|(_, t)| *t)
    }

    pub fn var_slot(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn field_ty(&self, id: FieldId) -> Ty {
        self.fields[id.0 as usize].1
    }

    pub fn field_name(&self, id: FieldId) -> &str {
        &self.fields[id.0 as usize].0
    }

    pub fn field_id(&self, name: &str) -> Option<FieldId> {
        self.fields
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| FieldId(i as u16))
    }

    pub fn imm_field_ty(&self, id: FieldId) -> Ty {
        self.imm_fields[id.0 as usize].1
    }

    pub fn imm_field_name(&self, id: FieldId) -> &str {
        &self.imm_fields[id.0 as usize].0
    }

    pub fn imm_field_id(&self, name: &str) -> Option<FieldId> {
        self.imm_fields
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| FieldId(i as u16))
    }
}
