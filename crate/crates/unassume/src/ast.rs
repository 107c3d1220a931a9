//! MiniC abstract syntax: programs, expressions, conditions and lvalues.
//!
//! Conditions may contain negation in the source; `to_nnf` pushes all
//! negations down into comparisons before any abstract evaluation sees them.

use std::fmt;

/// 1-based line/column position in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourcePos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    /// `int x;`
    Int,
    /// `int *p;` — pointer to integer variable.
    PtrInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub ty: VarType,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lval {
    Var(String),
    /// `*x` where `x` is a pointer variable.
    Deref(String),
}

impl fmt::Display for Lval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lval::Var(x) => write!(f, "{x}"),
            Lval::Deref(x) => write!(f, "*{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exp {
    Const(i64),
    /// `&x` — address of a declared integer variable.
    AddrOf(String),
    Lval(Lval),
    Neg(Box<Exp>),
    Bin(BinOp, Box<Exp>, Box<Exp>),
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exp::Const(k) => write!(f, "{k}"),
            Exp::AddrOf(x) => write!(f, "&{x}"),
            Exp::Lval(l) => write!(f, "{l}"),
            Exp::Neg(e) => write!(f, "-({e})"),
            Exp::Bin(op, a, b) => write!(f, "({a} {op} {b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    /// The comparison equivalent to the negation of `self`.
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cond {
    Cmp(CmpOp, Exp, Exp),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    /// Only present before `to_nnf`.
    Not(Box<Cond>),
}

impl Cond {
    /// The trivially true condition `1 == 1`.
    pub fn truth() -> Cond {
        Cond::Cmp(CmpOp::Eq, Exp::Const(1), Exp::Const(1))
    }

    /// The contradictory condition `0 == 1`.
    pub fn falsity() -> Cond {
        Cond::Cmp(CmpOp::Eq, Exp::Const(0), Exp::Const(1))
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Cond::Cmp(..) => true,
            Cond::And(a, b) | Cond::Or(a, b) => a.is_nnf() && b.is_nnf(),
            Cond::Not(_) => false,
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Cmp(op, a, b) => write!(f, "{a} {op} {b}"),
            Cond::And(a, b) => write!(f, "({a} && {b})"),
            Cond::Or(a, b) => write!(f, "({a} || {b})"),
            Cond::Not(c) => write!(f, "!({c})"),
        }
    }
}

/// Push negations down into comparisons (De Morgan plus comparison duality).
/// The result contains no `Not` nodes and is concretely equivalent.
pub fn to_nnf(c: &Cond) -> Cond {
    fn pos(c: &Cond) -> Cond {
        match c {
            Cond::Cmp(..) => c.clone(),
            Cond::And(a, b) => Cond::And(Box::new(pos(a)), Box::new(pos(b))),
            Cond::Or(a, b) => Cond::Or(Box::new(pos(a)), Box::new(pos(b))),
            Cond::Not(inner) => neg(inner),
        }
    }
    fn neg(c: &Cond) -> Cond {
        match c {
            Cond::Cmp(op, a, b) => Cond::Cmp(op.negate(), a.clone(), b.clone()),
            Cond::And(a, b) => Cond::Or(Box::new(neg(a)), Box::new(neg(b))),
            Cond::Or(a, b) => Cond::And(Box::new(neg(a)), Box::new(neg(b))),
            Cond::Not(inner) => pos(inner),
        }
    }
    pos(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign(Lval, Exp, SourcePos),
    /// `lval = nondet();`
    Nondet(Lval, SourcePos),
    If(Cond, Vec<Stmt>, Vec<Stmt>, SourcePos),
    While(Cond, Vec<Stmt>, SourcePos),
    Assert(Cond, SourcePos),
}

impl Stmt {
    pub fn pos(&self) -> SourcePos {
        match self {
            Stmt::Assign(_, _, p)
            | Stmt::Nondet(_, p)
            | Stmt::If(_, _, _, p)
            | Stmt::While(_, _, p)
            | Stmt::Assert(_, p) => *p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(x: &str) -> Exp {
        Exp::Lval(Lval::Var(x.into()))
    }

    #[test]
    fn nnf_comparison_duality() {
        // !(x <= 2) -> x > 2
        let c = Cond::Not(Box::new(Cond::Cmp(CmpOp::Le, var("x"), Exp::Const(2))));
        assert_eq!(to_nnf(&c), Cond::Cmp(CmpOp::Gt, var("x"), Exp::Const(2)));
    }

    #[test]
    fn nnf_de_morgan() {
        // !(a < b || c == d) -> a >= b && c != d
        let c = Cond::Not(Box::new(Cond::Or(
            Box::new(Cond::Cmp(CmpOp::Lt, var("a"), var("b"))),
            Box::new(Cond::Cmp(CmpOp::Eq, var("c"), var("d"))),
        )));
        let expected = Cond::And(
            Box::new(Cond::Cmp(CmpOp::Ge, var("a"), var("b"))),
            Box::new(Cond::Cmp(CmpOp::Ne, var("c"), var("d"))),
        );
        assert_eq!(to_nnf(&c), expected);
    }

    #[test]
    fn nnf_fixpoint_on_nnf_input() {
        let c = Cond::Or(
            Box::new(Cond::Cmp(CmpOp::Eq, var("x"), Exp::Const(1))),
            Box::new(Cond::Cmp(CmpOp::Eq, var("x"), Exp::Const(2))),
        );
        assert_eq!(to_nnf(&c), c);
        assert!(to_nnf(&c).is_nnf());
    }

    #[test]
    fn nnf_double_negation() {
        let inner = Cond::Cmp(CmpOp::Lt, var("x"), Exp::Const(0));
        let c = Cond::Not(Box::new(Cond::Not(Box::new(inner.clone()))));
        assert_eq!(to_nnf(&c), inner);
    }
}
