//! Brute-force ground truth for the test suite: concrete MiniC
//! interpretation with bounded enumeration, and finite concretization of
//! abstract environments. Never used by the analyzer itself.
//!
//! Enumeration clips unbounded intervals to a small box, which
//! under-approximates ⊤; that is the right direction for checking
//! soundness (every concrete state must lie inside the abstract one).

use crate::ast::{BinOp, CmpOp, Cond, Exp, Lval};
use crate::cfg::{Action, Cfg, NodeId};
use crate::env::{Env, VarTable};
use crate::value::{Bound, Interval, PointsTo, Value};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub const DEFAULT_CLIP: i64 = 4;
pub const DEFAULT_STEP_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CVal {
    Int(i64),
    /// Pointer to a declared integer variable.
    Ptr(String),
}

pub type ConcreteState = BTreeMap<String, CVal>;

/// All concrete values a single abstract value denotes within the clip
/// box.
fn gamma_value(v: &Value, vt: &VarTable, bound: i64) -> Vec<CVal> {
    match v {
        Value::Int(Interval::Bottom) => Vec::new(),
        Value::Int(iv) => {
            let (lo, hi) = iv.bounds().expect("non-bottom interval");
            let lo = match lo {
                Bound::Int(k) => k.max(-bound),
                Bound::NegInf => -bound,
                Bound::PosInf => return Vec::new(),
            };
            let hi = match hi {
                Bound::Int(k) => k.min(bound),
                Bound::PosInf => bound,
                Bound::NegInf => return Vec::new(),
            };
            (lo..=hi).map(CVal::Int).collect()
        }
        Value::Ptr(PointsTo::Top) => vt.int_vars().map(|x| CVal::Ptr(x.clone())).collect(),
        Value::Ptr(PointsTo::Set(s)) => s.iter().map(|x| CVal::Ptr(x.clone())).collect(),
    }
}

/// Exact finite concretization of `d` within the clip box: the cartesian
/// product of per-variable concretizations over all declared variables.
pub fn enumerate_gamma(d: &Env, vt: &VarTable, bound: i64) -> Vec<ConcreteState> {
    if d.is_bottom() {
        return Vec::new();
    }
    let mut states = vec![ConcreteState::new()];
    for x in vt.names() {
        let v = d.get(x).cloned().unwrap_or_else(|| vt.top_value(x));
        let choices = gamma_value(&v, vt, bound);
        if choices.is_empty() {
            return Vec::new();
        }
        states = states
            .into_iter()
            .flat_map(|s| {
                choices.iter().map(move |c| {
                    let mut s2 = s.clone();
                    s2.insert(x.clone(), c.clone());
                    s2
                })
            })
            .collect();
    }
    states
}

/// Membership of a concrete state in the concretization of an abstract
/// environment (no clipping; used for containment checks).
pub fn state_in_gamma(s: &ConcreteState, d: &Env) -> bool {
    if d.is_bottom() {
        return false;
    }
    s.iter().all(|(x, cv)| match (cv, d.get(x)) {
        (_, None) => true,
        (CVal::Int(k), Some(Value::Int(iv))) => iv.contains(*k),
        (CVal::Ptr(_), Some(Value::Ptr(PointsTo::Top))) => true,
        (CVal::Ptr(t), Some(Value::Ptr(PointsTo::Set(set)))) => set.contains(t),
        _ => false,
    })
}

fn read_lval(l: &Lval, s: &ConcreteState) -> Option<String> {
    match l {
        Lval::Var(x) => Some(x.clone()),
        Lval::Deref(p) => match s.get(p) {
            Some(CVal::Ptr(t)) => Some(t.clone()),
            _ => None,
        },
    }
}

fn eval_exp(e: &Exp, s: &ConcreteState) -> Option<CVal> {
    match e {
        Exp::Const(k) => Some(CVal::Int(*k)),
        Exp::AddrOf(x) => Some(CVal::Ptr(x.clone())),
        Exp::Lval(l) => s.get(&read_lval(l, s)?).cloned(),
        Exp::Neg(a) => match eval_exp(a, s)? {
            CVal::Int(k) => Some(CVal::Int(k.saturating_neg())),
            CVal::Ptr(_) => None,
        },
        Exp::Bin(op, a, b) => match (eval_exp(a, s)?, eval_exp(b, s)?) {
            (CVal::Int(x), CVal::Int(y)) => Some(CVal::Int(match op {
                BinOp::Add => x.saturating_add(y),
                BinOp::Sub => x.saturating_sub(y),
                BinOp::Mul => x.saturating_mul(y),
            })),
            _ => None,
        },
    }
}

fn eval_cmp(op: CmpOp, a: &CVal, b: &CVal) -> Option<bool> {
    match (a, b) {
        (CVal::Int(x), CVal::Int(y)) => Some(match op {
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
            CmpOp::Lt => x < y,
            CmpOp::Le => x <= y,
            CmpOp::Gt => x > y,
            CmpOp::Ge => x >= y,
        }),
        (CVal::Ptr(x), CVal::Ptr(y)) => match op {
            CmpOp::Eq => Some(x == y),
            CmpOp::Ne => Some(x != y),
            _ => None,
        },
        _ => None,
    }
}

pub fn eval_cond(c: &Cond, s: &ConcreteState) -> Option<bool> {
    match c {
        Cond::Cmp(op, a, b) => eval_cmp(*op, &eval_exp(a, s)?, &eval_exp(b, s)?),
        Cond::And(a, b) => Some(eval_cond(a, s)? && eval_cond(b, s)?),
        Cond::Or(a, b) => Some(eval_cond(a, s)? || eval_cond(b, s)?),
        Cond::Not(a) => Some(!eval_cond(a, s)?),
    }
}

/// All initial concrete states: every integer variable over the grid,
/// every pointer over all declared integer targets (uninitialized
/// variables range over their whole clipped concretization).
pub fn initial_states(vt: &VarTable, bound: i64) -> Vec<ConcreteState> {
    enumerate_gamma(&vt.top_env(), vt, bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconclusive;

/// Exhaustive concrete interpretation of the CFG: returns every
/// (location, state) pair reached from the initial states within
/// `step_cap` configuration expansions. Unassume actions are concrete
/// no-ops; nondet draws from the grid.
pub fn concrete_run(
    cfg: &Cfg,
    vt: &VarTable,
    bound: i64,
    step_cap: u64,
) -> Result<BTreeSet<(NodeId, ConcreteState)>, Inconclusive> {
    let mut reached: BTreeSet<(NodeId, ConcreteState)> = BTreeSet::new();
    let mut queue: VecDeque<(NodeId, ConcreteState)> = VecDeque::new();
    for s in initial_states(vt, bound) {
        let cfgn = (cfg.entry, s);
        if reached.insert(cfgn.clone()) {
            queue.push_back(cfgn);
        }
    }
    let mut steps: u64 = 0;
    while let Some((n, s)) = queue.pop_front() {
        steps += 1;
        if steps > step_cap {
            return Err(Inconclusive);
        }
        for e in cfg.out_edges(n) {
            let succs: Vec<ConcreteState> = match &e.action {
                Action::Assign(lv, rhs) => {
                    match (read_lval(lv, &s), eval_exp(rhs, &s)) {
                        (Some(x), Some(v)) => {
                            let mut s2 = s.clone();
                            s2.insert(x, v);
                            vec![s2]
                        }
                        _ => vec![], // stuck configuration (e.g. type-confused deref)
                    }
                }
                Action::Nondet(lv) => match read_lval(lv, &s) {
                    Some(x) => (-bound..=bound)
                        .map(|k| {
                            let mut s2 = s.clone();
                            s2.insert(x.clone(), CVal::Int(k));
                            s2
                        })
                        .collect(),
                    None => vec![],
                },
                Action::Assume(c) => match eval_cond(c, &s) {
                    Some(true) => vec![s.clone()],
                    _ => vec![],
                },
                // concretely a no-op; the abstraction contract demands it
                Action::Unassume(..) => vec![s.clone()],
                Action::AssertCheck(_) => vec![s.clone()],
            };
            for s2 in succs {
                let cfgn = (e.to, s2);
                if reached.insert(cfgn.clone()) {
                    queue.push_back(cfgn);
                }
            }
        }
    }
    Ok(reached)
}

/// Concrete states reaching a specific node.
pub fn states_at<'a>(
    reached: &'a BTreeSet<(NodeId, ConcreteState)>,
    n: NodeId,
) -> impl Iterator<Item = &'a ConcreteState> {
    reached.iter().filter(move |(m, _)| *m == n).map(|(_, s)| s)
}
