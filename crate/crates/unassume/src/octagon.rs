//! Integer octagon domain: conjunctions of ±x ±y ≤ c constraints in a
//! difference-bound-matrix (DBM) representation, with tight integer
//! closure, projection, a strengthening heterogeneous join, and the
//! naive and dual-narrowing unassume operators.
//!
//! DBM layout: variable k owns the signed copies v(2k) = +x_k and
//! v(2k+1) = −x_k; entry m[i][j] bounds v_i − v_j ≤ m[i][j]. The
//! coherent mirror of (i, j) is (j ^ 1, i ^ 1).

use crate::ast::{to_nnf, BinOp, Cond, Exp, Lval};
use crate::value::{Bound, FlatBool, Interval};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// DBM entry: a finite bound or +∞ (unconstrained).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OctBound {
    Fin(i64),
    Inf,
}

use OctBound::{Fin, Inf};

impl OctBound {
    fn add(self, o: OctBound) -> OctBound {
        match (self, o) {
            (Fin(a), Fin(b)) => Fin(a.saturating_add(b)),
            _ => Inf,
        }
    }

    fn half_floor(self) -> OctBound {
        match self {
            Fin(a) => Fin(a.div_euclid(2)),
            Inf => Inf,
        }
    }
}

impl fmt::Display for OctBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(a) => write!(f, "{a}"),
            Inf => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Octagon {
    /// Ordered variable environment; index k owns DBM rows 2k and 2k+1.
    env: Vec<String>,
    /// (2n)×(2n) bounds; empty when bottom.
    dbm: Vec<Vec<OctBound>>,
    bottom: bool,
    closed: bool,
}

fn bar(i: usize) -> usize {
    i ^ 1
}

impl Octagon {
    pub fn top(env: &[String]) -> Octagon {
        let n = 2 * env.len();
        let mut dbm = vec![vec![Inf; n]; n];
        for (i, row) in dbm.iter_mut().enumerate() {
            row[i] = Fin(0);
        }
        Octagon { env: env.to_vec(), dbm, bottom: false, closed: true }
    }

    pub fn bottom(env: &[String]) -> Octagon {
        Octagon { env: env.to_vec(), dbm: Vec::new(), bottom: true, closed: true }
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn environment(&self) -> &[String] {
        &self.env
    }

    fn idx(&self, x: &str) -> Option<usize> {
        self.env.iter().position(|v| v == x)
    }

    fn dim(&self) -> usize {
        2 * self.env.len()
    }

    /// Tighten entry (i, j) to at most `c`, keeping coherence.
    fn tighten(&mut self, i: usize, j: usize, c: OctBound) {
        if c < self.dbm[i][j] {
            self.dbm[i][j] = c;
            self.closed = false;
        }
        let (mi, mj) = (bar(j), bar(i));
        if c < self.dbm[mi][mj] {
            self.dbm[mi][mj] = c;
            self.closed = false;
        }
    }

    /// Add a constraint `sa·x_a + sb·x_b ≤ c` (signs ±1). For a unary
    /// constraint pass the same variable twice with the same sign,
    /// meaning `2·sa·x_a ≤ 2c` is tightened from `sa·x_a ≤ c`.
    fn add_term_constraint(&mut self, a: usize, sa: i64, b: usize, sb: i64, c: i64) {
        let pos = |k: usize, s: i64| if s > 0 { 2 * k } else { 2 * k + 1 };
        if a == b && sa == sb {
            // sa·x ≤ c  ≡  v(pos) − v(bar pos) ≤ 2c
            let i = pos(a, sa);
            self.tighten(i, bar(i), Fin(c.saturating_mul(2)));
        } else {
            // sa·x_a + sb·x_b ≤ c  ≡  v(pos a) − v(bar(pos b)) ≤ c
            let i = pos(a, sa);
            let j = bar(pos(b, sb));
            self.tighten(i, j, Fin(c));
        }
    }

    /// Tight integer closure: all-pairs shortest paths, unary-bound
    /// halving, and the strengthening step; detects inconsistency.
    pub fn close(&self) -> Octagon {
        if self.bottom {
            return self.clone();
        }
        if self.closed {
            return self.clone();
        }
        let mut o = self.clone();
        let n = o.dim();
        let m = &mut o.dbm;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = m[i][k].add(m[k][j]);
                    if via < m[i][j] {
                        m[i][j] = via;
                    }
                }
            }
        }
        for i in 0..n {
            if m[i][i] < Fin(0) {
                return Octagon::bottom(&self.env);
            }
            m[i][i] = Fin(0);
        }
        // integer tightening of unary bounds (2x ≤ c ⇒ 2x ≤ 2⌊c/2⌋)
        for i in 0..n {
            if let Fin(c) = m[i][bar(i)] {
                m[i][bar(i)] = Fin(2 * c.div_euclid(2));
            }
        }
        for i in 0..n {
            if m[i][bar(i)].add(m[bar(i)][i]) < Fin(0) {
                return Octagon::bottom(&self.env);
            }
        }
        // strengthening: v_i − v_j ≤ ⌊m[i][ī]/2⌋ + ⌊m[ȷ̄][j]/2⌋
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let s = m[i][bar(i)].half_floor().add(m[bar(j)][j].half_floor());
                if s < m[i][j] {
                    m[i][j] = s;
                }
            }
        }
        o.closed = true;
        o
    }

    /// Finite constraints of the closed form as sorted strings in the
    /// paper's set notation, redundant ones included.
    pub fn constraints(&self) -> Vec<String> {
        if self.bottom {
            return vec!["bot".to_string()];
        }
        let o = self.close();
        if o.bottom {
            return vec!["bot".to_string()];
        }
        let mut out = Vec::new();
        let n = o.env.len();
        for a in 0..n {
            let x = &o.env[a];
            if let Fin(c) = o.dbm[2 * a][2 * a + 1] {
                out.push(format!("{x} <= {}", c.div_euclid(2)));
            }
            if let Fin(c) = o.dbm[2 * a + 1][2 * a] {
                out.push(format!("-{x} <= {}", c.div_euclid(2)));
            }
            for b in a + 1..n {
                let y = &o.env[b];
                if let Fin(c) = o.dbm[2 * a][2 * b + 1] {
                    out.push(format!("{x} + {y} <= {c}"));
                }
                if let Fin(c) = o.dbm[2 * a][2 * b] {
                    out.push(format!("{x} - {y} <= {c}"));
                }
                if let Fin(c) = o.dbm[2 * a + 1][2 * b + 1] {
                    out.push(format!("-{x} + {y} <= {c}"));
                }
                if let Fin(c) = o.dbm[2 * a + 1][2 * b] {
                    out.push(format!("-{x} - {y} <= {c}"));
                }
            }
        }
        out.sort();
        out
    }

    /// Interval of a single variable read off the closed DBM.
    fn var_interval(&self, k: usize) -> Interval {
        if self.bottom {
            return Interval::Bottom;
        }
        let hi = match self.dbm[2 * k][2 * k + 1] {
            Fin(c) => Bound::Int(c.div_euclid(2)),
            Inf => Bound::PosInf,
        };
        let lo = match self.dbm[2 * k + 1][2 * k] {
            Fin(c) => Bound::Int((-c).div_euclid(2) + if (-c).rem_euclid(2) != 0 { 1 } else { 0 }),
            Inf => Bound::NegInf,
        };
        Interval::new(lo, hi)
    }

    /// Concrete membership: does the valuation satisfy every DBM
    /// constraint? Variables missing from the valuation are rejected.
    pub fn contains(&self, vals: &BTreeMap<String, i64>) -> bool {
        if self.bottom {
            return false;
        }
        let v: Option<Vec<i64>> = self.env.iter().map(|x| vals.get(x).copied()).collect();
        let Some(v) = v else { return false };
        let signed = |i: usize| if i % 2 == 0 { v[i / 2] } else { -v[i / 2] };
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if let Fin(c) = self.dbm[i][j] {
                    if signed(i) - signed(j) > c {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for Octagon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.constraints().join(", "))
    }
}

fn same_env(o1: &Octagon, o2: &Octagon) -> Result<(), OctError> {
    if o1.env == o2.env {
        Ok(())
    } else {
        Err(OctError::EnvMismatch)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OctError {
    #[error("octagon environments differ")]
    EnvMismatch,
}

pub fn oct_leq(o1: &Octagon, o2: &Octagon) -> Result<bool, OctError> {
    same_env(o1, o2)?;
    if o1.is_bottom() {
        return Ok(true);
    }
    let c1 = o1.close();
    if c1.is_bottom() {
        return Ok(true);
    }
    if o2.is_bottom() {
        return Ok(false);
    }
    let n = c1.dim();
    for i in 0..n {
        for j in 0..n {
            if !(c1.dbm[i][j] <= o2.dbm[i][j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn oct_join(o1: &Octagon, o2: &Octagon) -> Result<Octagon, OctError> {
    same_env(o1, o2)?;
    if o1.is_bottom() {
        return Ok(o2.clone());
    }
    if o2.is_bottom() {
        return Ok(o1.clone());
    }
    let (c1, c2) = (o1.close(), o2.close());
    if c1.is_bottom() {
        return Ok(c2);
    }
    if c2.is_bottom() {
        return Ok(c1);
    }
    let mut out = c1.clone();
    let n = out.dim();
    for i in 0..n {
        for j in 0..n {
            out.dbm[i][j] = out.dbm[i][j].max(c2.dbm[i][j]);
        }
    }
    out.closed = true; // pointwise max of closed DBMs stays closed
    Ok(out)
}

pub fn oct_meet(o1: &Octagon, o2: &Octagon) -> Result<Octagon, OctError> {
    same_env(o1, o2)?;
    if o1.is_bottom() || o2.is_bottom() {
        return Ok(Octagon::bottom(&o1.env));
    }
    let mut out = o1.clone();
    let n = out.dim();
    for i in 0..n {
        for j in 0..n {
            out.dbm[i][j] = out.dbm[i][j].min(o2.dbm[i][j]);
        }
    }
    out.closed = false;
    Ok(out.close())
}

/// Standard octagon widening: keep stable bounds, drop the rest. The
/// right argument is taken as-is (closing it would break the
/// termination guarantee in general; callers pass joined updates).
pub fn oct_widen(o1: &Octagon, o2: &Octagon) -> Result<Octagon, OctError> {
    same_env(o1, o2)?;
    if o1.is_bottom() {
        return Ok(o2.clone());
    }
    if o2.is_bottom() {
        return Ok(o1.clone());
    }
    let mut out = o1.clone();
    let n = out.dim();
    for i in 0..n {
        for j in 0..n {
            out.dbm[i][j] = if o2.dbm[i][j] <= o1.dbm[i][j] { o1.dbm[i][j] } else { Inf };
        }
    }
    out.closed = false;
    Ok(out)
}

/// Standard octagon narrowing: refine only infinite bounds.
pub fn oct_narrow(o1: &Octagon, o2: &Octagon) -> Result<Octagon, OctError> {
    same_env(o1, o2)?;
    if o1.is_bottom() {
        return Ok(Octagon::bottom(&o1.env));
    }
    if o2.is_bottom() {
        return Ok(o2.clone());
    }
    let mut out = o1.clone();
    let n = out.dim();
    for i in 0..n {
        for j in 0..n {
            if out.dbm[i][j] == Inf {
                out.dbm[i][j] = o2.dbm[i][j];
                out.closed = false;
            }
        }
    }
    Ok(out.close())
}

/// Projection d|V: environment becomes `vars` (in their original
/// order); bounds are the closed bounds among the kept copies.
pub fn oct_restrict(o: &Octagon, vars: &BTreeSet<String>) -> Octagon {
    let kept: Vec<String> = o.env.iter().filter(|x| vars.contains(*x)).cloned().collect();
    if o.is_bottom() {
        return Octagon::bottom(&kept);
    }
    let c = o.close();
    if c.is_bottom() {
        return Octagon::bottom(&kept);
    }
    let mut out = Octagon::top(&kept);
    for (a, x) in kept.iter().enumerate() {
        let oa = c.idx(x).unwrap();
        for (b, y) in kept.iter().enumerate() {
            let ob = c.idx(y).unwrap();
            for si in 0..2 {
                for sj in 0..2 {
                    out.dbm[2 * a + si][2 * b + sj] = c.dbm[2 * oa + si][2 * ob + sj];
                }
            }
        }
    }
    out.closed = true;
    out
}

/// Extend an octagon with unconstrained fresh dimensions to a larger
/// environment.
fn oct_extend(o: &Octagon, env: &[String]) -> Octagon {
    if o.is_bottom() {
        return Octagon::bottom(env);
    }
    let mut out = Octagon::top(env);
    for (a, x) in o.env.iter().enumerate() {
        let na = out.idx(x).expect("extension environment must contain the original");
        for (b, y) in o.env.iter().enumerate() {
            let nb = out.idx(y).unwrap();
            for si in 0..2 {
                for sj in 0..2 {
                    out.dbm[2 * na + si][2 * nb + sj] = o.dbm[2 * a + si][2 * b + sj];
                }
            }
        }
    }
    out.closed = false;
    out
}

/// Environment-aware order on octagons: dom(o1) ⊆ dom(o2) and o1 is
/// below o2's projection onto dom(o1).
pub fn oct_leq_star(o1: &Octagon, o2: &Octagon) -> bool {
    let d1: BTreeSet<String> = o1.env.iter().cloned().collect();
    let d2: BTreeSet<String> = o2.env.iter().cloned().collect();
    if !d1.is_subset(&d2) {
        return false;
    }
    let p2 = oct_restrict(o2, &d1);
    // align environments by name
    let p2 = reorder(&p2, &o1.env);
    oct_leq(o1, &p2).unwrap_or(false)
}

fn reorder(o: &Octagon, env: &[String]) -> Octagon {
    if o.env == env {
        return o.clone();
    }
    if o.is_bottom() {
        return Octagon::bottom(env);
    }
    let mut out = Octagon::top(env);
    for (a, x) in env.iter().enumerate() {
        let oa = o.idx(x).expect("reorder expects equal variable sets");
        for (b, y) in env.iter().enumerate() {
            let ob = o.idx(y).unwrap();
            for si in 0..2 {
                for sj in 0..2 {
                    out.dbm[2 * a + si][2 * b + sj] = o.dbm[2 * oa + si][2 * ob + sj];
                }
            }
        }
    }
    out.closed = o.closed;
    out
}

/// Strengthening heterogeneous join ⋆⊔: join on the common environment
/// extended to the union, then add back each finite constraint of the
/// closed arguments (argument 1 first, constraints in signed-index
/// order) iff both arguments stay ⊑⋆ the candidate.
pub fn strengthen_join(o1: &Octagon, o2: &Octagon) -> Octagon {
    let d1: BTreeSet<String> = o1.env.iter().cloned().collect();
    let d2: BTreeSet<String> = o2.env.iter().cloned().collect();
    let common: BTreeSet<String> = d1.intersection(&d2).cloned().collect();
    // union environment: o1's order, then o2's extras in o2 order
    let mut union_env = o1.env.clone();
    for x in &o2.env {
        if !union_env.contains(x) {
            union_env.push(x.clone());
        }
    }
    if o1.is_bottom() && o2.is_bottom() {
        return Octagon::bottom(&union_env);
    }
    let base = if o1.is_bottom() {
        oct_extend(&oct_restrict(o2, &common), &union_env)
    } else if o2.is_bottom() {
        oct_extend(&oct_restrict(o1, &common), &union_env)
    } else {
        let p1 = oct_restrict(o1, &common);
        let p2 = reorder(&oct_restrict(o2, &common), p1.environment());
        oct_extend(&oct_join(&p1, &p2).expect("aligned environments"), &union_env)
    };
    let mut cand = base.close();
    for o in [o1, o2] {
        if o.is_bottom() {
            continue;
        }
        let c = o.close();
        if c.is_bottom() {
            continue;
        }
        let n = c.dim();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let Fin(b) = c.dbm[i][j] else { continue };
                // translate signed indices into the union environment
                let gi = 2 * cand.idx(&c.env[i / 2]).unwrap() + i % 2;
                let gj = 2 * cand.idx(&c.env[j / 2]).unwrap() + j % 2;
                let mut trial = cand.clone();
                trial.tighten(gi, gj, Fin(b));
                let trial = trial.close();
                if oct_leq_star(o1, &trial) && oct_leq_star(o2, &trial) {
                    cand = trial;
                }
            }
        }
    }
    cand.close()
}

// ---------------------------------------------------------------------
// condition translation

/// Linear form: variable coefficients plus a constant. Only forms with
/// at most two ±1 variable terms translate to octagon constraints.
fn linearize(e: &Exp) -> Option<(BTreeMap<String, i64>, i64)> {
    match e {
        Exp::Const(k) => Some((BTreeMap::new(), *k)),
        Exp::Lval(Lval::Var(x)) => Some((BTreeMap::from([(x.clone(), 1)]), 0)),
        Exp::Lval(Lval::Deref(_)) | Exp::AddrOf(_) => None,
        Exp::Neg(a) => {
            let (m, k) = linearize(a)?;
            Some((m.into_iter().map(|(x, c)| (x, -c)).collect(), -k))
        }
        Exp::Bin(op, a, b) => {
            let (ma, ka) = linearize(a)?;
            let (mb, kb) = linearize(b)?;
            match op {
                BinOp::Add | BinOp::Sub => {
                    let sign = if *op == BinOp::Add { 1 } else { -1 };
                    let mut m = ma;
                    for (x, c) in mb {
                        *m.entry(x).or_insert(0) += sign * c;
                    }
                    m.retain(|_, c| *c != 0);
                    Some((m, ka + sign * kb))
                }
                BinOp::Mul => {
                    // only multiplication by a constant stays linear
                    if ma.is_empty() {
                        let mut m = mb;
                        for c in m.values_mut() {
                            *c *= ka;
                        }
                        m.retain(|_, c| *c != 0);
                        Some((m, ka * kb))
                    } else if mb.is_empty() {
                        let mut m = ma;
                        for c in m.values_mut() {
                            *c *= kb;
                        }
                        m.retain(|_, c| *c != 0);
                        Some((m, ka * kb))
                    } else {
                        None
                    }
                }
            }
        }
    }
}

/// `e1 − e2` as an octagonal left-hand side: at most two variables with
/// ±1 coefficients, plus the constant moved to the right.
fn octagonal_diff(e1: &Exp, e2: &Exp) -> Option<(Vec<(String, i64)>, i64)> {
    let (m1, k1) = linearize(e1)?;
    let (mut m, mut k) = (m1, k1);
    let (m2, k2) = linearize(e2)?;
    for (x, c) in m2 {
        *m.entry(x).or_insert(0) -= c;
    }
    k -= k2;
    m.retain(|_, c| *c != 0);
    let unit = m.values().all(|c| c.abs() == 1);
    let doubled = m.len() == 1 && m.values().all(|c| c.abs() == 2);
    if m.len() > 2 || !(unit || doubled) {
        return None;
    }
    Some((m.into_iter().collect(), k))
}

/// Tighten `o` with the octagonal reading of `terms + k ≤ 0`.
fn assume_linear_le(o: &mut Octagon, terms: &[(String, i64)], k: i64) -> bool {
    // sum(s_i x_i) ≤ −k
    let c = -k;
    match terms {
        [] => c >= 0, // constant condition: false means contradiction
        [(x, s)] if s.abs() == 1 => {
            if let Some(a) = o.idx(x) {
                o.add_term_constraint(a, *s, a, *s, c);
            }
            true
        }
        [(x, s)] => {
            // 2·sign(s)·x ≤ c directly tightens the unary entry
            if let Some(a) = o.idx(x) {
                let i = if *s > 0 { 2 * a } else { 2 * a + 1 };
                o.tighten(i, bar(i), Fin(c));
            }
            true
        }
        [(x, sx), (y, sy)] => {
            if let (Some(a), Some(b)) = (o.idx(x), o.idx(y)) {
                o.add_term_constraint(a, *sx, b, *sy, c);
            }
            true
        }
        _ => true,
    }
}

/// Refine an octagon with an NNF condition. Non-octagonal comparisons
/// are soundly skipped; conjunctions distribute; disjunctions join.
pub fn oct_assume(c: &Cond, o: &Octagon) -> Octagon {
    let c = to_nnf(c);
    assume_rec(&c, o)
}

fn assume_rec(c: &Cond, o: &Octagon) -> Octagon {
    if o.is_bottom() {
        return o.clone();
    }
    match c {
        Cond::And(a, b) => assume_rec(b, &assume_rec(a, o)),
        Cond::Or(a, b) => {
            oct_join(&assume_rec(a, o), &assume_rec(b, o)).expect("same environment")
        }
        Cond::Not(_) => unreachable!("oct_assume normalizes to NNF"),
        Cond::Cmp(op, e1, e2) => {
            use crate::ast::CmpOp::*;
            if *op == Ne {
                // e1 != e2 is exactly (e1 < e2) ∨ (e1 > e2) over integers
                let lt = assume_rec(&Cond::Cmp(Lt, e1.clone(), e2.clone()), o);
                let gt = assume_rec(&Cond::Cmp(Gt, e1.clone(), e2.clone()), o);
                return oct_join(&lt, &gt).expect("same environment");
            }
            let Some((terms, k)) = octagonal_diff(e1, e2) else { return o.clone() };
            let mut out = o.clone();
            let neg =
                |terms: &[(String, i64)]| terms.iter().map(|(x, s)| (x.clone(), -s)).collect::<Vec<_>>();
            let feasible = match op {
                Le => assume_linear_le(&mut out, &terms, k),
                Lt => assume_linear_le(&mut out, &terms, k + 1),
                Ge => assume_linear_le(&mut out, &neg(&terms), -k),
                Gt => assume_linear_le(&mut out, &neg(&terms), -k + 1),
                Eq => {
                    assume_linear_le(&mut out, &terms, k)
                        && assume_linear_le(&mut out, &neg(&terms), -k)
                }
                Ne => unreachable!("handled above"),
            };
            if !feasible {
                return Octagon::bottom(&o.env);
            }
            out.close()
        }
    }
}

/// Forget everything about the variables in `vars` (closing first so
/// information among the others survives).
pub fn oct_havoc(vars: &BTreeSet<String>, o: &Octagon) -> Octagon {
    if o.is_bottom() {
        return o.clone();
    }
    let mut out = o.close();
    if out.is_bottom() {
        return out;
    }
    let n = out.dim();
    for (k, x) in out.env.clone().iter().enumerate() {
        if !vars.contains(x) {
            continue;
        }
        for r in [2 * k, 2 * k + 1] {
            for j in 0..n {
                if j != r {
                    out.dbm[r][j] = Inf;
                    out.dbm[j][r] = Inf;
                }
            }
        }
    }
    out.closed = true; // removing rows/columns of a closed DBM keeps closure
    out
}

/// Abstract assignment `x := e`. Linear right-hand sides are handled
/// exactly through a temporary dimension; anything else falls back to
/// the interval bounds of `e`.
pub fn oct_assign(x: &str, e: &Exp, o: &Octagon) -> Octagon {
    if o.is_bottom() {
        return o.clone();
    }
    let tmp = "__assign_tmp".to_string();
    let mut env = o.env.clone();
    env.push(tmp.clone());
    let mut ext = oct_extend(o, &env);
    let linear = linearize(e).filter(|(m, _)| {
        m.len() <= 2 && m.values().all(|c| c.abs() == 1) && !m.contains_key(&tmp)
    });
    match linear {
        Some(_) => {
            // tmp == e, then x := tmp
            let c = Cond::Cmp(
                crate::ast::CmpOp::Eq,
                Exp::Lval(Lval::Var(tmp.clone())),
                e.clone(),
            );
            ext = oct_assume(&c, &ext);
        }
        None => {
            // interval fallback: bound tmp by the interval value of e
            let iv = oct_eval_exp(e, o);
            if iv.is_bottom() {
                return Octagon::bottom(&o.env);
            }
            if let Interval::Range(lo, hi) = iv {
                let a = ext.idx(&tmp).unwrap();
                if let Bound::Int(h) = hi {
                    ext.add_term_constraint(a, 1, a, 1, h);
                }
                if let Bound::Int(l) = lo {
                    ext.add_term_constraint(a, -1, a, -1, -l);
                }
            }
        }
    }
    let xs = BTreeSet::from([x.to_string()]);
    let havocked = oct_havoc(&xs, &ext);
    let eq = Cond::Cmp(
        crate::ast::CmpOp::Eq,
        Exp::Lval(Lval::Var(x.to_string())),
        Exp::Lval(Lval::Var(tmp.clone())),
    );
    let bound = oct_assume(&eq, &havocked);
    let keep: BTreeSet<String> = o.env.iter().cloned().collect();
    reorder(&oct_restrict(&bound, &keep), &o.env)
}

/// Interval of an expression over the octagon's variable bounds (used
/// as the nonlinear fallback and by condition evaluation).
pub fn oct_eval_exp(e: &Exp, o: &Octagon) -> Interval {
    if o.is_bottom() {
        return Interval::Bottom;
    }
    let c = o.close();
    if c.is_bottom() {
        return Interval::Bottom;
    }
    fn go(e: &Exp, c: &Octagon) -> Interval {
        match e {
            Exp::Const(k) => Interval::constant(*k),
            Exp::AddrOf(_) | Exp::Lval(Lval::Deref(_)) => Interval::top(),
            Exp::Lval(Lval::Var(x)) => match c.idx(x) {
                Some(k) => c.var_interval(k),
                None => Interval::top(),
            },
            Exp::Neg(a) => go(a, c).neg(),
            Exp::Bin(op, a, b) => crate::value::forward_bin(*op, &go(a, c), &go(b, c)),
        }
    }
    go(e, &c)
}

/// Tightest bounds of `e1 − e2` using relational DBM entries when the
/// difference is octagonal, interval arithmetic otherwise.
fn diff_interval(e1: &Exp, e2: &Exp, o: &Octagon) -> Interval {
    if o.is_bottom() {
        return Interval::Bottom;
    }
    let c = o.close();
    if c.is_bottom() {
        return Interval::Bottom;
    }
    if let Some((terms, k)) = octagonal_diff(e1, e2) {
        // bounds of sum(s_i x_i) + k from the closed DBM; `ub` bounds the
        // term sum from above, `neg_lb` bounds its negation
        let pos = |x: &str, s: i64| c.idx(x).map(|a| if s > 0 { 2 * a } else { 2 * a + 1 });
        let (ub, neg_lb): (OctBound, OctBound) = match terms.as_slice() {
            [] => (Fin(0), Fin(0)),
            [(x, s)] if s.abs() == 1 => match pos(x, *s) {
                Some(i) => (c.dbm[i][bar(i)].half_floor(), c.dbm[bar(i)][i].half_floor()),
                None => (Inf, Inf),
            },
            [(x, s)] => match pos(x, s.signum()) {
                Some(i) => (c.dbm[i][bar(i)], c.dbm[bar(i)][i]),
                None => (Inf, Inf),
            },
            [(x, sx), (y, sy)] => match (pos(x, *sx), pos(y, *sy)) {
                (Some(i), Some(j)) => (c.dbm[i][bar(j)], c.dbm[bar(i)][j]),
                _ => (Inf, Inf),
            },
            _ => (Inf, Inf),
        };
        let hi = match ub {
            Fin(u) => Bound::Int(u.saturating_add(k)),
            Inf => Bound::PosInf,
        };
        let lo = match neg_lb {
            Fin(nl) => Bound::Int((-nl).saturating_add(k)),
            Inf => Bound::NegInf,
        };
        return Interval::new(lo, hi);
    }
    oct_eval_exp(e1, o).sub(&oct_eval_exp(e2, o))
}

/// Abstract truth of an NNF condition over an octagon.
pub fn oct_eval_cond(c: &Cond, o: &Octagon) -> FlatBool {
    if o.is_bottom() {
        return FlatBool::Bot;
    }
    match c {
        Cond::And(a, b) => oct_eval_cond(a, o).and(oct_eval_cond(b, o)),
        Cond::Or(a, b) => oct_eval_cond(a, o).or(oct_eval_cond(b, o)),
        Cond::Not(a) => match oct_eval_cond(a, o) {
            FlatBool::True => FlatBool::False,
            FlatBool::False => FlatBool::True,
            x => x,
        },
        Cond::Cmp(op, e1, e2) => {
            use crate::ast::CmpOp::*;
            let d = diff_interval(e1, e2, o);
            let Interval::Range(lo, hi) = d else { return FlatBool::Bot };
            let zero = Bound::Int(0);
            match op {
                Le => {
                    if hi <= zero {
                        FlatBool::True
                    } else if lo > zero {
                        FlatBool::False
                    } else {
                        FlatBool::Top
                    }
                }
                Lt => {
                    if hi < zero {
                        FlatBool::True
                    } else if lo >= zero {
                        FlatBool::False
                    } else {
                        FlatBool::Top
                    }
                }
                Ge => {
                    if lo >= zero {
                        FlatBool::True
                    } else if hi < zero {
                        FlatBool::False
                    } else {
                        FlatBool::Top
                    }
                }
                Gt => {
                    if lo > zero {
                        FlatBool::True
                    } else if hi <= zero {
                        FlatBool::False
                    } else {
                        FlatBool::Top
                    }
                }
                Eq => {
                    if lo == zero && hi == zero {
                        FlatBool::True
                    } else if lo > zero || hi < zero {
                        FlatBool::False
                    } else {
                        FlatBool::Top
                    }
                }
                Ne => {
                    if lo > zero || hi < zero {
                        FlatBool::True
                    } else if lo == zero && hi == zero {
                        FlatBool::False
                    } else {
                        FlatBool::Top
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// unassume

/// Naive octagon unassume: o joined with assume(c) after havocing V.
pub fn oct_naive_unassume(c: &Cond, vars: &BTreeSet<String>, o: &Octagon) -> Octagon {
    let relaxed = oct_assume(c, &oct_havoc(vars, o));
    oct_join(o, &relaxed).expect("same environment")
}

/// Dual-narrowing unassume: the naive result restricted to V is joined
/// back onto o with the strengthening join, recovering relational
/// constraints between V and the rest.
pub fn dual_narrowing_unassume(c: &Cond, vars: &BTreeSet<String>, o: &Octagon) -> Octagon {
    let naive = oct_naive_unassume(c, vars, o);
    let projected = oct_restrict(&naive, vars);
    let result = strengthen_join(o, &projected);
    reorder(&result, &o.env)
}
