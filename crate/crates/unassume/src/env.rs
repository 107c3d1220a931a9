//! Non-relational environment domain: maps from variables to abstract
//! values with heterogeneous (partial-environment) lattice operations,
//! forward expression and condition evaluation, lvalue resolution, havoc
//! and assignment.
//!
//! An `Env` carries an explicit domain: its key set. Partial environments
//! appear only inside the propagating unassume; solver states are total
//! over the declared variables. The heterogeneous operations supply the
//! defaults for absent variables (bottom for the join, top for the meet)
//! at use sites — defaults are never stored.

use crate::ast::{Cond, Exp, Lval, Program, VarType};
use crate::value::{
    backward_cmp, forward_bin, forward_cmp, DomainError, FlatBool, Interval, PointsTo, Value,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Declared variables and their types; shared context for all
/// environment operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    types: BTreeMap<String, VarType>,
}

impl VarTable {
    pub fn from_program(p: &Program) -> VarTable {
        VarTable {
            types: p.decls.iter().map(|d| (d.name.clone(), d.ty)).collect(),
        }
    }

    pub fn from_pairs(pairs: &[(&str, VarType)]) -> VarTable {
        VarTable {
            types: pairs.iter().map(|(n, t)| (n.to_string(), *t)).collect(),
        }
    }

    pub fn ty(&self, x: &str) -> Option<VarType> {
        self.types.get(x).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.types.keys()
    }

    pub fn int_vars(&self) -> impl Iterator<Item = &String> {
        self.types.iter().filter(|(_, t)| **t == VarType::Int).map(|(n, _)| n)
    }

    pub fn has_pointers(&self) -> bool {
        self.types.values().any(|t| *t == VarType::PtrInt)
    }

    pub fn top_value(&self, x: &str) -> Value {
        match self.types[x] {
            VarType::Int => Value::Int(Interval::top()),
            VarType::PtrInt => Value::Ptr(PointsTo::Top),
        }
    }

    pub fn bottom_value(&self, x: &str) -> Value {
        match self.types[x] {
            VarType::Int => Value::Int(Interval::Bottom),
            VarType::PtrInt => Value::Ptr(PointsTo::bottom()),
        }
    }

    /// The total top environment over all declared variables.
    pub fn top_env(&self) -> Env {
        Env::Map(self.types.keys().map(|x| (x.clone(), self.top_value(x))).collect())
    }
}

/// Abstract environment. `Bottom` is the unreachable element; a `Map`'s
/// key set is its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Env {
    Bottom,
    Map(BTreeMap<String, Value>),
}

impl Env {
    pub fn empty() -> Env {
        Env::Map(BTreeMap::new())
    }

    pub fn of(pairs: &[(&str, Value)]) -> Env {
        Env::Map(pairs.iter().map(|(n, v)| (n.to_string(), v.clone())).collect())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Env::Bottom)
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        match self {
            Env::Bottom => None,
            Env::Map(m) => m.get(x),
        }
    }

    pub fn set(&mut self, x: impl Into<String>, v: Value) {
        if let Env::Map(m) = self {
            m.insert(x.into(), v);
        }
    }

    pub fn dom(&self) -> BTreeSet<&String> {
        match self {
            Env::Bottom => BTreeSet::new(),
            Env::Map(m) => m.keys().collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        match self {
            Env::Bottom => None,
            Env::Map(m) => Some(m.iter()),
        }
        .into_iter()
        .flatten()
    }

    /// Collapse a total environment containing a bottom value to the
    /// unreachable element. Only valid for total (solver) environments;
    /// partial environments keep explicit bottoms.
    pub fn normalize(self) -> Env {
        match &self {
            Env::Map(m) if m.values().any(Value::is_bottom) => Env::Bottom,
            _ => self,
        }
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Env::Bottom => f.write_str("bot"),
            Env::Map(m) => {
                write!(f, "{{")?;
                for (i, (x, v)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x} -> {v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Environment-aware order: dom(d1) ⊆ dom(d2) and pointwise ordering on
/// dom(d1).
pub fn env_leq_star(d1: &Env, d2: &Env) -> Result<bool, DomainError> {
    match (d1, d2) {
        (Env::Bottom, _) => Ok(true),
        (_, Env::Bottom) => Ok(false),
        (Env::Map(m1), Env::Map(m2)) => {
            for (x, v1) in m1 {
                match m2.get(x) {
                    None => return Ok(false),
                    Some(v2) => {
                        if !v1.leq(v2)? {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Heterogeneous join: union domain, pointwise join with bottom for
/// absentees (so a one-sided variable keeps its value).
pub fn hetero_join(d1: &Env, d2: &Env) -> Result<Env, DomainError> {
    match (d1, d2) {
        (Env::Bottom, d) | (d, Env::Bottom) => Ok(d.clone()),
        (Env::Map(m1), Env::Map(m2)) => {
            let mut out = m1.clone();
            for (x, v2) in m2 {
                match out.get(x) {
                    Some(v1) => {
                        let j = v1.join(v2)?;
                        out.insert(x.clone(), j);
                    }
                    None => {
                        out.insert(x.clone(), v2.clone());
                    }
                }
            }
            Ok(Env::Map(out))
        }
    }
}

/// Heterogeneous meet: union domain, pointwise meet with top for
/// absentees. Deliberately not the greatest lower bound of the
/// heterogeneous order — one-sided variables survive.
pub fn hetero_meet(d1: &Env, d2: &Env) -> Result<Env, DomainError> {
    match (d1, d2) {
        (Env::Bottom, _) | (_, Env::Bottom) => Ok(Env::Bottom),
        (Env::Map(m1), Env::Map(m2)) => {
            let mut out = m1.clone();
            for (x, v2) in m2 {
                match out.get(x) {
                    Some(v1) => {
                        let m = v1.meet(v2)?;
                        out.insert(x.clone(), m);
                    }
                    None => {
                        out.insert(x.clone(), v2.clone());
                    }
                }
            }
            Ok(Env::Map(out))
        }
    }
}

fn pointwise(
    d1: &Env,
    d2: &Env,
    f: impl Fn(&Value, &Value) -> Result<Value, DomainError>,
) -> Result<Env, DomainError> {
    match (d1, d2) {
        (Env::Bottom, d) | (d, Env::Bottom) => Ok(d.clone()),
        (Env::Map(m1), Env::Map(m2)) => {
            debug_assert_eq!(m1.len(), m2.len(), "pointwise ops expect total envs");
            let mut out = BTreeMap::new();
            for (x, v1) in m1 {
                let v2 = m2.get(x).unwrap_or(v1);
                out.insert(x.clone(), f(v1, v2)?);
            }
            Ok(Env::Map(out))
        }
    }
}

/// Total-environment pointwise join.
pub fn env_join(d1: &Env, d2: &Env) -> Result<Env, DomainError> {
    pointwise(d1, d2, Value::join)
}

/// Total-environment pointwise meet, normalized.
pub fn env_meet(d1: &Env, d2: &Env) -> Result<Env, DomainError> {
    match (d1, d2) {
        (Env::Bottom, _) | (_, Env::Bottom) => Ok(Env::Bottom),
        _ => Ok(pointwise(d1, d2, Value::meet)?.normalize()),
    }
}

pub fn env_widen(d1: &Env, d2: &Env) -> Result<Env, DomainError> {
    pointwise(d1, d2, Value::widen)
}

pub fn env_narrow(d1: &Env, d2: &Env) -> Result<Env, DomainError> {
    match (d1, d2) {
        (Env::Bottom, _) => Ok(Env::Bottom),
        (_, Env::Bottom) => Ok(d1.clone()),
        _ => Ok(pointwise(d1, d2, Value::narrow)?.normalize()),
    }
}

pub fn env_leq(d1: &Env, d2: &Env) -> Result<bool, DomainError> {
    match (d1, d2) {
        (Env::Bottom, _) => Ok(true),
        (_, Env::Bottom) => Ok(false),
        (Env::Map(m1), Env::Map(m2)) => {
            for (x, v1) in m1 {
                if let Some(v2) = m2.get(x) {
                    if !v1.leq(v2)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Resolve an lvalue to its set of may-targets. Top points-to resolves
/// to all declared integer variables; bottom resolves to the empty set
/// (an unreachable access).
pub fn resolve_lval(l: &Lval, d: &Env, vt: &VarTable) -> BTreeSet<String> {
    match l {
        Lval::Var(x) => BTreeSet::from([x.clone()]),
        Lval::Deref(x) => match d.get(x) {
            Some(Value::Ptr(PointsTo::Set(s))) => s.clone(),
            Some(Value::Ptr(PointsTo::Top)) => vt.int_vars().cloned().collect(),
            _ => BTreeSet::new(),
        },
    }
}

/// Forward abstract evaluation of an expression in a total environment.
pub fn eval_exp(e: &Exp, d: &Env, vt: &VarTable) -> Result<Value, DomainError> {
    if d.is_bottom() {
        return Ok(match exp_tag(e, vt) {
            VarType::Int => Value::Int(Interval::Bottom),
            VarType::PtrInt => Value::Ptr(PointsTo::bottom()),
        });
    }
    match e {
        Exp::Const(k) => Ok(Value::Int(Interval::constant(*k))),
        Exp::AddrOf(x) => Ok(Value::Ptr(PointsTo::singleton(x.clone()))),
        Exp::Lval(l) => {
            // join of the values of all may-targets
            let targets = resolve_lval(l, d, vt);
            let mut acc: Option<Value> = None;
            for x in &targets {
                let v = d.get(x).cloned().unwrap_or_else(|| vt.top_value(x));
                acc = Some(match acc {
                    None => v,
                    Some(a) => a.join(&v)?,
                });
            }
            Ok(acc.unwrap_or(match exp_tag(e, vt) {
                VarType::Int => Value::Int(Interval::Bottom),
                VarType::PtrInt => Value::Ptr(PointsTo::bottom()),
            }))
        }
        Exp::Neg(a) => {
            let v = eval_exp(a, d, vt)?;
            match v {
                Value::Int(i) => Ok(Value::Int(i.neg())),
                v => Err(DomainError::TagMismatch(v.tag(), "int")),
            }
        }
        Exp::Bin(op, a, b) => {
            let va = eval_exp(a, d, vt)?;
            let vb = eval_exp(b, d, vt)?;
            match (va, vb) {
                (Value::Int(x), Value::Int(y)) => Ok(Value::Int(forward_bin(*op, &x, &y))),
                (a, b) => Err(DomainError::TagMismatch(a.tag(), b.tag())),
            }
        }
    }
}

/// Static type of an expression (used for bottom tagging).
pub fn exp_tag(e: &Exp, vt: &VarTable) -> VarType {
    match e {
        Exp::Const(_) | Exp::Neg(_) | Exp::Bin(..) => VarType::Int,
        Exp::AddrOf(_) => VarType::PtrInt,
        Exp::Lval(Lval::Var(x)) => vt.ty(x).unwrap_or(VarType::Int),
        Exp::Lval(Lval::Deref(_)) => VarType::Int,
    }
}

/// Forward abstract evaluation of an NNF condition.
pub fn eval_cond(c: &Cond, d: &Env, vt: &VarTable) -> Result<FlatBool, DomainError> {
    if d.is_bottom() {
        return Ok(FlatBool::Bot);
    }
    match c {
        Cond::Cmp(op, a, b) => {
            let va = eval_exp(a, d, vt)?;
            let vb = eval_exp(b, d, vt)?;
            forward_cmp(*op, &va, &vb)
        }
        Cond::And(a, b) => Ok(eval_cond(a, d, vt)?.and(eval_cond(b, d, vt)?)),
        Cond::Or(a, b) => Ok(eval_cond(a, d, vt)?.or(eval_cond(b, d, vt)?)),
        Cond::Not(inner) => {
            // callers normalize to NNF; handle residual negation soundly
            Ok(match eval_cond(inner, d, vt)? {
                FlatBool::True => FlatBool::False,
                FlatBool::False => FlatBool::True,
                x => x,
            })
        }
    }
}

/// Set every variable in `vars` to the top of its type.
pub fn havoc<'a>(vars: impl IntoIterator<Item = &'a String>, d: &Env, vt: &VarTable) -> Env {
    match d {
        Env::Bottom => Env::Bottom,
        Env::Map(m) => {
            let mut m = m.clone();
            for x in vars {
                m.insert(x.clone(), vt.top_value(x));
            }
            Env::Map(m)
        }
    }
}

/// Abstract assignment: strong update for a unique target, weak update
/// (join with the old value) when the target is ambiguous, unreachable
/// when the target set is empty.
pub fn assign(l: &Lval, e: &Exp, d: &Env, vt: &VarTable) -> Result<Env, DomainError> {
    if d.is_bottom() {
        return Ok(Env::Bottom);
    }
    let v = eval_exp(e, d, vt)?;
    assign_value(l, v, d, vt)
}

/// Assignment of an already-evaluated value (shared with nondet and the
/// unassume leaf rule).
pub fn assign_value(l: &Lval, v: Value, d: &Env, vt: &VarTable) -> Result<Env, DomainError> {
    if d.is_bottom() {
        return Ok(Env::Bottom);
    }
    let targets = resolve_lval(l, d, vt);
    let mut out = d.clone();
    match targets.len() {
        0 => return Ok(Env::Bottom),
        1 => {
            let x = targets.iter().next().unwrap();
            out.set(x.clone(), v);
        }
        _ => {
            for x in &targets {
                let old = d.get(x).cloned().unwrap_or_else(|| vt.top_value(x));
                out.set(x.clone(), old.join(&v)?);
            }
        }
    }
    Ok(out.normalize())
}

/// One backward refinement step for a comparison inside assume: computes
/// backward values and meets them with the forward values explicitly.
pub fn assume_cmp_values(
    op: crate::ast::CmpOp,
    va: &Value,
    vb: &Value,
) -> Result<(Value, Value), DomainError> {
    let (ba, bb) = backward_cmp(op, va, vb)?;
    Ok((va.meet(&ba)?, vb.meet(&bb)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::CmpOp;
    use crate::parser::{parse_condition, parse_program};

    fn vt_xy() -> VarTable {
        VarTable::from_pairs(&[("x", VarType::Int), ("y", VarType::Int)])
    }

    fn vt_pij() -> VarTable {
        VarTable::from_pairs(&[("p", VarType::PtrInt), ("i", VarType::Int), ("j", VarType::Int)])
    }

    fn iv(lo: i64, hi: i64) -> Value {
        Value::Int(Interval::of(lo, hi))
    }

    #[test]
    fn leq_star_examples() {
        let vt = vt_xy();
        let d1 = Env::of(&[("x", iv(0, 0))]);
        let d2 = Env::of(&[("x", iv(0, 5)), ("y", vt.top_value("y"))]);
        assert!(env_leq_star(&d1, &d2).unwrap());
        let d3 = Env::of(&[("x", iv(0, 0)), ("y", iv(0, 0))]);
        let d4 = Env::of(&[("x", iv(0, 5))]);
        assert!(!env_leq_star(&d3, &d4).unwrap());
        assert!(env_leq_star(&d1, &d1).unwrap());
    }

    #[test]
    fn hetero_join_examples() {
        let pi = Env::of(&[("p", Value::Ptr(PointsTo::singleton("i")))]);
        let pj = Env::of(&[("p", Value::Ptr(PointsTo::singleton("j")))]);
        let joined = hetero_join(&pi, &pj).unwrap();
        assert_eq!(
            joined.get("p"),
            Some(&Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j"))))
        );
        // disjoint domains extend with the other side's value
        let a = Env::of(&[("x", iv(0, 0))]);
        let b = Env::of(&[("y", iv(1, 1))]);
        let ab = hetero_join(&a, &b).unwrap();
        assert_eq!(ab, Env::of(&[("x", iv(0, 0)), ("y", iv(1, 1))]));
        // bottom is neutral
        assert_eq!(hetero_join(&a, &Env::Bottom).unwrap(), a);
    }

    #[test]
    fn hetero_meet_examples() {
        let pij = Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j")));
        let a = Env::of(&[("p", pij.clone())]);
        let b = Env::of(&[("i", Value::Int(Interval::new(
            crate::value::Bound::Int(0),
            crate::value::Bound::PosInf,
        )))]);
        let m = hetero_meet(&a, &b).unwrap();
        assert_eq!(m.get("p"), Some(&pij));
        assert_eq!(m.get("i"), b.get("i"));
        // {i -> [-inf,1]} meet {i -> [-1,inf]} = {i -> [-1,1]}
        let l = Env::of(&[("i", Value::Int(Interval::new(
            crate::value::Bound::NegInf,
            crate::value::Bound::Int(1),
        )))]);
        let r = Env::of(&[("i", Value::Int(Interval::new(
            crate::value::Bound::Int(-1),
            crate::value::Bound::PosInf,
        )))]);
        assert_eq!(hetero_meet(&l, &r).unwrap(), Env::of(&[("i", iv(-1, 1))]));
        assert_eq!(hetero_meet(&a, &a).unwrap(), a);
    }

    #[test]
    fn resolve_lval_examples() {
        let vt = vt_pij();
        let d = Env::of(&[
            ("p", Value::Ptr(PointsTo::singleton("i"))),
            ("i", iv(0, 0)),
            ("j", iv(0, 0)),
        ]);
        assert_eq!(
            resolve_lval(&Lval::Deref("p".into()), &d, &vt),
            BTreeSet::from(["i".to_string()])
        );
        assert_eq!(
            resolve_lval(&Lval::Var("x".into()), &d, &vt),
            BTreeSet::from(["x".to_string()])
        );
        let d2 = Env::of(&[
            ("p", Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j")))),
            ("i", iv(0, 0)),
            ("j", iv(0, 0)),
        ]);
        assert_eq!(
            resolve_lval(&Lval::Deref("p".into()), &d2, &vt),
            BTreeSet::from(["i".to_string(), "j".to_string()])
        );
        // top points-to resolves to all declared integer variables
        let d3 = Env::of(&[("p", Value::Ptr(PointsTo::Top))]);
        assert_eq!(
            resolve_lval(&Lval::Deref("p".into()), &d3, &vt),
            BTreeSet::from(["i".to_string(), "j".to_string()])
        );
    }

    #[test]
    fn eval_exp_examples() {
        let vt = vt_pij();
        let star_p = Exp::Lval(Lval::Deref("p".into()));
        let d = Env::of(&[
            ("p", Value::Ptr(PointsTo::singleton("i"))),
            ("i", iv(0, 0)),
            ("j", iv(0, 0)),
        ]);
        assert_eq!(eval_exp(&star_p, &d, &vt).unwrap(), iv(0, 0));
        assert_eq!(eval_exp(&Exp::Const(40), &d, &vt).unwrap(), iv(40, 40));
        let d2 = Env::of(&[
            ("p", Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j")))),
            ("i", iv(0, 0)),
            ("j", iv(5, 5)),
        ]);
        assert_eq!(eval_exp(&star_p, &d2, &vt).unwrap(), iv(0, 5));
    }

    #[test]
    fn eval_cond_examples() {
        let vt = vt_xy();
        let d = Env::of(&[("x", iv(1, 2)), ("y", iv(0, 0))]);
        let c1 = parse_condition("1 <= x && x <= 2").unwrap();
        assert_eq!(eval_cond(&c1, &d, &vt).unwrap(), FlatBool::True);
        let c2 = parse_condition("x == 1 || x == 2").unwrap();
        assert_eq!(eval_cond(&c2, &d, &vt).unwrap(), FlatBool::Top);
        assert_eq!(eval_cond(&c1, &Env::Bottom, &vt).unwrap(), FlatBool::Bot);
    }

    #[test]
    fn havoc_examples() {
        let vt = vt_xy();
        let d = Env::of(&[("x", iv(0, 0)), ("y", iv(0, 0))]);
        let xs = ["x".to_string()];
        let h = havoc(&xs, &d, &vt);
        assert_eq!(h.get("x"), Some(&Value::Int(Interval::top())));
        assert_eq!(h.get("y"), Some(&iv(0, 0)));
        let none: [String; 0] = [];
        assert_eq!(havoc(&none, &d, &vt), d);
    }

    #[test]
    fn assign_examples() {
        // x = x - 1 on {x -> [40,40]} -> {x -> [39,39]}
        let p = parse_program("int x; x = 40; x = x - 1;").unwrap();
        let vt = VarTable::from_program(&p);
        let d = Env::of(&[("x", iv(40, 40))]);
        let e = Exp::Bin(
            BinOp::Sub,
            Box::new(Exp::Lval(Lval::Var("x".into()))),
            Box::new(Exp::Const(1)),
        );
        assert_eq!(assign(&Lval::Var("x".into()), &e, &d, &vt).unwrap(), Env::of(&[("x", iv(39, 39))]));

        // weak update through an ambiguous pointer
        let vt = vt_pij();
        let d = Env::of(&[
            ("p", Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j")))),
            ("i", iv(0, 0)),
            ("j", iv(0, 0)),
        ]);
        let post = assign(&Lval::Deref("p".into()), &Exp::Const(5), &d, &vt).unwrap();
        assert_eq!(post.get("i"), Some(&iv(0, 5)));
        assert_eq!(post.get("j"), Some(&iv(0, 5)));
        assert_eq!(post.get("p"), d.get("p"));

        // strong update of a pointer with a constant address
        let d = Env::of(&[("p", Value::Ptr(PointsTo::Top)), ("i", iv(0, 0)), ("j", iv(0, 0))]);
        let post = assign(&Lval::Var("p".into()), &Exp::AddrOf("i".into()), &d, &vt).unwrap();
        assert_eq!(post.get("p"), Some(&Value::Ptr(PointsTo::singleton("i"))));
    }

    #[test]
    fn assume_cmp_meets_forward_values() {
        // x >= 0 with x -> top: backward [0,inf] met with top
        let (a, b) = assume_cmp_values(
            CmpOp::Ge,
            &Value::Int(Interval::top()),
            &Value::Int(Interval::of(0, 0)),
        )
        .unwrap();
        assert_eq!(a, Value::Int(Interval::new(crate::value::Bound::Int(0), crate::value::Bound::PosInf)));
        assert_eq!(b, Value::Int(Interval::of(0, 0)));
    }

    use crate::ast::BinOp;
}
