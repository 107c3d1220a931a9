//! Syntax-directed condition transformers: assume (HC4-revise) and the
//! propagating unassume (a modified HC4-revise), plus the naive unassume
//! combinator.
//!
//! Both transformers make one forward pass per iteration, caching the
//! abstract value of every subexpression, then one backward pass. They
//! differ in what the backward pass does with the pushed-down values:
//!
//! * assume meets them with the forward values and refines leaf lvalues
//!   in place (reductive);
//! * unassume pushes them down unmodified and collects a *partial*
//!   environment at the leaves, which is then joined onto the input
//!   (extensive). Conjuncts and sibling arguments combine with the
//!   heterogeneous meet, disjuncts with the heterogeneous join.
//!
//! The unassume pass is iterated locally: the partial relaxations of
//! successive iterations are widened per variable to force termination.

use crate::ast::{to_nnf, Cond, Exp, Lval};
use crate::env::{
    env_join, env_narrow, eval_exp, havoc, hetero_join, hetero_meet, resolve_lval, Env, VarTable,
};
use crate::value::{
    backward_bin, backward_cmp, backward_neg, DomainError, Interval, PointsTo, Value,
};
use std::collections::BTreeSet;

/// Hard cap on local unassume iterations; on overflow the affected
/// variables are relaxed to top (defense in depth beyond the widening
/// termination argument).
const MAX_ITERATIONS: u32 = 64;

/// Forward-value cache mirroring an expression tree: one forward
/// evaluation per iteration, consulted (never recomputed) by the
/// backward pass.
struct FCache {
    val: Value,
    kids: Vec<FCache>,
}

fn forward_cache(e: &Exp, d: &Env, vt: &VarTable) -> Result<FCache, DomainError> {
    let kids = match e {
        Exp::Const(_) | Exp::AddrOf(_) | Exp::Lval(_) => Vec::new(),
        Exp::Neg(a) => vec![forward_cache(a, d, vt)?],
        Exp::Bin(_, a, b) => vec![forward_cache(a, d, vt)?, forward_cache(b, d, vt)?],
    };
    Ok(FCache { val: eval_exp(e, d, vt)?, kids })
}

fn as_interval(v: &Value) -> Interval {
    v.as_interval().copied().unwrap_or(Interval::Bottom)
}

/// All variable names occurring syntactically in a condition, including
/// pointer variables under `&` and `*`.
pub fn syntactic_vars(c: &Cond) -> BTreeSet<String> {
    fn exp_vars(e: &Exp, out: &mut BTreeSet<String>) {
        match e {
            Exp::Const(_) => {}
            Exp::AddrOf(x) => {
                out.insert(x.clone());
            }
            Exp::Lval(Lval::Var(x)) | Exp::Lval(Lval::Deref(x)) => {
                out.insert(x.clone());
            }
            Exp::Neg(a) => exp_vars(a, out),
            Exp::Bin(_, a, b) => {
                exp_vars(a, out);
                exp_vars(b, out);
            }
        }
    }
    fn cond_vars(c: &Cond, out: &mut BTreeSet<String>) {
        match c {
            Cond::Cmp(_, a, b) => {
                exp_vars(a, out);
                exp_vars(b, out);
            }
            Cond::And(a, b) | Cond::Or(a, b) => {
                cond_vars(a, out);
                cond_vars(b, out);
            }
            Cond::Not(a) => cond_vars(a, out),
        }
    }
    let mut out = BTreeSet::new();
    cond_vars(c, &mut out);
    out
}

// ---------------------------------------------------------------------
// assume

/// Refine a total environment with a condition. Reductive and sound:
/// every concrete state of `d` satisfying `c` survives.
pub fn assume_cond(c: &Cond, d: &Env, vt: &VarTable) -> Result<Env, DomainError> {
    let c = to_nnf(c);
    let d1 = assume_pass(&c, d, vt)?;
    if d1.is_bottom() {
        return Ok(d1);
    }
    // local iteration: a second pass, then narrowing if still shrinking
    let d2 = assume_pass(&c, &d1, vt)?;
    if d2 == d1 {
        Ok(d1)
    } else {
        env_narrow(&d1, &d2)
    }
}

fn assume_pass(c: &Cond, d: &Env, vt: &VarTable) -> Result<Env, DomainError> {
    if d.is_bottom() {
        return Ok(Env::Bottom);
    }
    match c {
        Cond::Cmp(op, a, b) => {
            let ca = forward_cache(a, d, vt)?;
            let cb = forward_cache(b, d, vt)?;
            let (ra, rb) = backward_cmp(*op, &ca.val, &cb.val)?;
            let va = ca.val.meet(&ra)?;
            let vb = cb.val.meet(&rb)?;
            if va.is_bottom() || vb.is_bottom() {
                return Ok(Env::Bottom);
            }
            let d1 = assume_refine(a, &ca, &va, d, vt)?;
            assume_refine(b, &cb, &vb, &d1, vt)
        }
        Cond::And(a, b) => assume_pass(b, &assume_pass(a, d, vt)?, vt),
        Cond::Or(a, b) => env_join(&assume_pass(a, d, vt)?, &assume_pass(b, d, vt)?),
        Cond::Not(_) => unreachable!("assume_cond normalizes to NNF"),
    }
}

/// Backward descent of assume: `v` is the refined (already met with
/// forward) value the expression must take.
fn assume_refine(e: &Exp, cache: &FCache, v: &Value, d: &Env, vt: &VarTable) -> Result<Env, DomainError> {
    if d.is_bottom() {
        return Ok(Env::Bottom);
    }
    match e {
        Exp::Const(k) => {
            if !as_interval(v).contains(*k) {
                return Ok(Env::Bottom);
            }
            Ok(d.clone())
        }
        Exp::AddrOf(x) => {
            let pt = v.as_points_to().cloned().unwrap_or_else(PointsTo::bottom);
            if pt.meet(&PointsTo::singleton(x.clone())).is_bottom() {
                return Ok(Env::Bottom);
            }
            Ok(d.clone())
        }
        Exp::Lval(l) => {
            let targets = resolve_lval(l, d, vt);
            match targets.len() {
                0 => Ok(Env::Bottom),
                1 => {
                    let x = targets.iter().next().unwrap();
                    let old = d.get(x).cloned().unwrap_or_else(|| vt.top_value(x));
                    let nv = old.meet(v)?;
                    if nv.is_bottom() {
                        return Ok(Env::Bottom);
                    }
                    let mut out = d.clone();
                    out.set(x.clone(), nv);
                    Ok(out)
                }
                // ambiguous target: no refinement
                _ => Ok(d.clone()),
            }
        }
        Exp::Neg(a) => {
            let back = backward_neg(&as_interval(v));
            let refined = as_interval(&cache.kids[0].val).meet(&back);
            if refined.is_bottom() {
                return Ok(Env::Bottom);
            }
            assume_refine(a, &cache.kids[0], &Value::Int(refined), d, vt)
        }
        Exp::Bin(op, a, b) => {
            let fa = as_interval(&cache.kids[0].val);
            let fb = as_interval(&cache.kids[1].val);
            let (ba, bb) = backward_bin(*op, &as_interval(v), &fa, &fb);
            let va = fa.meet(&ba);
            let vb = fb.meet(&bb);
            if va.is_bottom() || vb.is_bottom() {
                return Ok(Env::Bottom);
            }
            let d1 = assume_refine(a, &cache.kids[0], &Value::Int(va), d, vt)?;
            assume_refine(b, &cache.kids[1], &Value::Int(vb), &d1, vt)
        }
    }
}

// ---------------------------------------------------------------------
// propagating unassume

/// Relax a total environment up to a condition. Extensive: the input is
/// contained in the result. Returns the result together with the number
/// of relaxing iterations (iterations that changed the environment).
pub fn unassume_cond(c: &Cond, d: &Env, vt: &VarTable) -> Result<(Env, u32), DomainError> {
    if d.is_bottom() {
        return Ok((Env::Bottom, 0));
    }
    let c = to_nnf(c);
    let mut cur = d.clone();
    let mut prev_partial: Option<Env> = None;
    let mut relaxing = 0u32;
    for _ in 0..MAX_ITERATIONS {
        let raw = unassume_partial(&c, &cur, vt)?;
        let partial = match &prev_partial {
            None => raw,
            Some(p) => widen_partial(p, &raw)?,
        };
        let next = hetero_join(&cur, &partial)?;
        if next == cur {
            return Ok((cur, relaxing));
        }
        cur = next;
        relaxing += 1;
        prev_partial = Some(partial);
    }
    // overflow fallback: relax every possibly-affected variable to top
    let mut vars = syntactic_vars(&c);
    for x in syntactic_vars(&c) {
        if let Some(Value::Ptr(_)) = cur.get(&x) {
            vars.extend(resolve_lval(&Lval::Deref(x.clone()), &cur, vt));
        }
    }
    Ok((havoc(&vars, &cur, vt), relaxing + 1))
}

/// Per-variable widening of successive partial relaxations; variables
/// new to the current partial are taken as-is.
fn widen_partial(prev: &Env, cur: &Env) -> Result<Env, DomainError> {
    let mut out = Env::empty();
    for (x, v) in cur.iter() {
        let w = match prev.get(x) {
            Some(p) => p.widen(v)?,
            None => v.clone(),
        };
        out.set(x.clone(), w);
    }
    Ok(out)
}

/// One backward pass of the propagating unassume: builds the partial
/// relaxation environment for `c` in the current environment.
fn unassume_partial(c: &Cond, cur: &Env, vt: &VarTable) -> Result<Env, DomainError> {
    match c {
        Cond::Cmp(op, a, b) => {
            let ca = forward_cache(a, cur, vt)?;
            let cb = forward_cache(b, cur, vt)?;
            // pushed-down values are NOT met with the forward values
            let (ra, rb) = backward_cmp(*op, &ca.val, &cb.val)?;
            let pa = unassume_back(a, &ca, &ra, cur, vt)?;
            let pb = unassume_back(b, &cb, &rb, cur, vt)?;
            hetero_meet(&pa, &pb)
        }
        Cond::And(a, b) => {
            hetero_meet(&unassume_partial(a, cur, vt)?, &unassume_partial(b, cur, vt)?)
        }
        Cond::Or(a, b) => {
            hetero_join(&unassume_partial(a, cur, vt)?, &unassume_partial(b, cur, vt)?)
        }
        Cond::Not(_) => unreachable!("unassume_cond normalizes to NNF"),
    }
}

/// Backward descent of unassume: emit partial maps at leaf lvalues
/// (a special case of abstract assignment), combine sibling arguments
/// with the heterogeneous meet. Bottom pushed-down values yield no
/// relaxation.
fn unassume_back(
    e: &Exp,
    cache: &FCache,
    v: &Value,
    cur: &Env,
    vt: &VarTable,
) -> Result<Env, DomainError> {
    if v.is_bottom() {
        return Ok(Env::empty());
    }
    match e {
        Exp::Const(_) | Exp::AddrOf(_) => Ok(Env::empty()),
        Exp::Lval(l) => {
            let mut out = Env::empty();
            for x in resolve_lval(l, cur, vt) {
                out.set(x, v.clone());
            }
            Ok(out)
        }
        Exp::Neg(a) => {
            let back = Value::Int(backward_neg(&as_interval(v)));
            unassume_back(a, &cache.kids[0], &back, cur, vt)
        }
        Exp::Bin(op, a, b) => {
            let fa = as_interval(&cache.kids[0].val);
            let fb = as_interval(&cache.kids[1].val);
            let (ba, bb) = backward_bin(*op, &as_interval(v), &fa, &fb);
            let pa = unassume_back(a, &cache.kids[0], &Value::Int(ba), cur, vt)?;
            let pb = unassume_back(b, &cache.kids[1], &Value::Int(bb), cur, vt)?;
            hetero_meet(&pa, &pb)
        }
    }
}

// ---------------------------------------------------------------------
// naive unassume

/// Naive unassume: d joined with assume(c) after havocing V. Sound by
/// construction and extensive.
pub fn naive_unassume(
    c: &Cond,
    vars: &BTreeSet<String>,
    d: &Env,
    vt: &VarTable,
) -> Result<Env, DomainError> {
    let relaxed = assume_cond(c, &havoc(vars, d, vt), vt)?;
    env_join(d, &relaxed)
}
