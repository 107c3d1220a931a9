//! Abstract value lattices: integer intervals, flat booleans and
//! may-point-to sets, with forward and backward abstract operators.
//!
//! Backward comparison and expression operators follow the explicit-meet
//! convention: they never intersect an argument's backward value with its
//! forward value. The assume path performs that meet itself; the unassume
//! path deliberately does not.

use crate::ast::{BinOp, CmpOp};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("operation on mismatched value tags ({0} vs {1})")]
    TagMismatch(&'static str, &'static str),
    #[error("comparison `{0}` is not supported on pointer values")]
    PtrComparison(CmpOp),
}

/// Interval endpoint over the integers extended with both infinities.
///
/// Finite endpoints live in `i64`; arithmetic goes through `i128` and
/// results outside the `i64` range are clamped in the sound direction
/// (lower bounds downward, upper bounds upward).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    Int(i64),
    PosInf,
}

impl Bound {
    fn ext(self) -> Ext {
        match self {
            Bound::NegInf => Ext::NegInf,
            Bound::Int(k) => Ext::Val(k as i128),
            Bound::PosInf => Ext::PosInf,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Int(k) => write!(f, "{k}"),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

/// Exact extended-integer arithmetic used internally for endpoint math.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ext {
    NegInf,
    Val(i128),
    PosInf,
}

impl Ext {
    fn add(self, o: Ext) -> Ext {
        match (self, o) {
            (Ext::Val(a), Ext::Val(b)) => Ext::Val(a + b),
            (Ext::PosInf, Ext::NegInf) | (Ext::NegInf, Ext::PosInf) => {
                unreachable!("inf - inf in endpoint arithmetic")
            }
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
        }
    }

    fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Val(v) => Ext::Val(-v),
            Ext::PosInf => Ext::NegInf,
        }
    }

    fn mul(self, o: Ext) -> Ext {
        let sign = |e: Ext| match e {
            Ext::NegInf => -1,
            Ext::Val(v) => v.signum(),
            Ext::PosInf => 1,
        };
        match (self, o) {
            (Ext::Val(a), Ext::Val(b)) => Ext::Val(a * b),
            _ => match sign(self) * sign(o) {
                // 0 * inf = 0 for integer intervals
                0 => Ext::Val(0),
                1 => Ext::PosInf,
                _ => Ext::NegInf,
            },
        }
    }

    /// Lower bound of `self / d` for a nonzero finite or infinite divisor
    /// endpoint, rounded toward minus infinity.
    fn div_floor(self, d: Ext) -> Ext {
        match (self, d) {
            (Ext::Val(a), Ext::Val(b)) => {
                let (q, r) = (a / b, a % b);
                Ext::Val(if r != 0 && (r < 0) != (b < 0) { q - 1 } else { q })
            }
            (_, Ext::Val(_)) => self.mul(d), // inf / finite: keep the sign
            (Ext::Val(_), _) => Ext::Val(0), // finite / inf tends to 0
            _ => self.mul(d),
        }
    }

    fn div_ceil(self, d: Ext) -> Ext {
        self.neg().div_floor(d).neg()
    }

    fn clamp_lo(self) -> Bound {
        match self {
            Ext::NegInf => Bound::NegInf,
            Ext::Val(v) if v < i64::MIN as i128 => Bound::NegInf,
            Ext::Val(v) if v > i64::MAX as i128 => Bound::Int(i64::MAX),
            Ext::Val(v) => Bound::Int(v as i64),
            Ext::PosInf => Bound::Int(i64::MAX),
        }
    }

    fn clamp_hi(self) -> Bound {
        match self {
            Ext::PosInf => Bound::PosInf,
            Ext::Val(v) if v > i64::MAX as i128 => Bound::PosInf,
            Ext::Val(v) if v < i64::MIN as i128 => Bound::Int(i64::MIN),
            Ext::Val(v) => Bound::Int(v as i64),
            Ext::NegInf => Bound::Int(i64::MIN),
        }
    }
}

/// Integer interval; `Bottom` is the empty interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interval {
    Bottom,
    Range(Bound, Bound),
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Interval {
        if lo > hi || lo == Bound::PosInf || hi == Bound::NegInf {
            Interval::Bottom
        } else {
            Interval::Range(lo, hi)
        }
    }

    pub fn top() -> Interval {
        Interval::Range(Bound::NegInf, Bound::PosInf)
    }

    pub fn constant(k: i64) -> Interval {
        Interval::Range(Bound::Int(k), Bound::Int(k))
    }

    pub fn of(lo: i64, hi: i64) -> Interval {
        Interval::new(Bound::Int(lo), Bound::Int(hi))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Interval::Bottom)
    }

    pub fn bounds(&self) -> Option<(Bound, Bound)> {
        match self {
            Interval::Bottom => None,
            Interval::Range(lo, hi) => Some((*lo, *hi)),
        }
    }

    pub fn join(&self, o: &Interval) -> Interval {
        match (self.bounds(), o.bounds()) {
            (None, _) => *o,
            (_, None) => *self,
            (Some((a, b)), Some((c, d))) => Interval::Range(a.min(c), b.max(d)),
        }
    }

    pub fn meet(&self, o: &Interval) -> Interval {
        match (self.bounds(), o.bounds()) {
            (None, _) | (_, None) => Interval::Bottom,
            (Some((a, b)), Some((c, d))) => Interval::new(a.max(c), b.min(d)),
        }
    }

    pub fn leq(&self, o: &Interval) -> bool {
        match (self.bounds(), o.bounds()) {
            (None, _) => true,
            (_, None) => false,
            (Some((a, b)), Some((c, d))) => c <= a && b <= d,
        }
    }

    /// Standard interval widening: unstable bounds go to infinity.
    pub fn widen(&self, o: &Interval) -> Interval {
        match (self.bounds(), o.bounds()) {
            (None, _) => *o,
            (_, None) => *self,
            (Some((a, b)), Some((c, d))) => Interval::Range(
                if c < a { Bound::NegInf } else { a },
                if d > b { Bound::PosInf } else { b },
            ),
        }
    }

    /// Standard interval narrowing: only infinite bounds are refined.
    pub fn narrow(&self, o: &Interval) -> Interval {
        match (self.bounds(), o.bounds()) {
            (None, _) | (_, None) => *self,
            (Some((a, b)), Some((c, d))) => Interval::new(
                if a == Bound::NegInf { c } else { a },
                if b == Bound::PosInf { d } else { b },
            ),
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        match (self.bounds(), o.bounds()) {
            (Some((a, b)), Some((c, d))) => Interval::Range(
                a.ext().add(c.ext()).clamp_lo(),
                b.ext().add(d.ext()).clamp_hi(),
            ),
            _ => Interval::Bottom,
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Interval {
        match self.bounds() {
            None => Interval::Bottom,
            Some((a, b)) => Interval::Range(b.ext().neg().clamp_lo(), a.ext().neg().clamp_hi()),
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        match (self.bounds(), o.bounds()) {
            (Some((a, b)), Some((c, d))) => {
                let cands =
                    [a.ext().mul(c.ext()), a.ext().mul(d.ext()), b.ext().mul(c.ext()), b.ext().mul(d.ext())];
                let lo = *cands.iter().min().unwrap();
                let hi = *cands.iter().max().unwrap();
                Interval::Range(lo.clamp_lo(), hi.clamp_hi())
            }
            _ => Interval::Bottom,
        }
    }

    pub fn contains(&self, k: i64) -> bool {
        match self.bounds() {
            None => false,
            Some((lo, hi)) => lo <= Bound::Int(k) && Bound::Int(k) <= hi,
        }
    }

    fn singleton(&self) -> Option<i64> {
        match self.bounds() {
            Some((Bound::Int(a), Bound::Int(b))) if a == b => Some(a),
            _ => None,
        }
    }

    /// Outward-rounded division, used by `backward_mul`. The divisor must
    /// not contain zero.
    fn div_outward(&self, d: &Interval) -> Interval {
        match (self.bounds(), d.bounds()) {
            (Some((a, b)), Some((c, e))) => {
                let pairs = [(a, c), (a, e), (b, c), (b, e)];
                let lo = pairs.iter().map(|(x, y)| x.ext().div_floor(y.ext())).min().unwrap();
                let hi = pairs.iter().map(|(x, y)| x.ext().div_ceil(y.ext())).max().unwrap();
                Interval::new(lo.clamp_lo(), hi.clamp_hi())
            }
            _ => Interval::Bottom,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Bottom => f.write_str("bot"),
            Interval::Range(lo, hi) => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// Four-element flat boolean lattice used for abstract condition results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatBool {
    Bot,
    True,
    False,
    Top,
}

impl FlatBool {
    pub fn from_bool(b: bool) -> FlatBool {
        if b {
            FlatBool::True
        } else {
            FlatBool::False
        }
    }

    pub fn join(self, o: FlatBool) -> FlatBool {
        match (self, o) {
            (FlatBool::Bot, x) | (x, FlatBool::Bot) => x,
            (a, b) if a == b => a,
            _ => FlatBool::Top,
        }
    }

    /// Kleene conjunction, with bottom propagating.
    pub fn and(self, o: FlatBool) -> FlatBool {
        match (self, o) {
            (FlatBool::Bot, _) | (_, FlatBool::Bot) => FlatBool::Bot,
            (FlatBool::False, _) | (_, FlatBool::False) => FlatBool::False,
            (FlatBool::True, FlatBool::True) => FlatBool::True,
            _ => FlatBool::Top,
        }
    }

    /// Kleene disjunction, with bottom propagating.
    pub fn or(self, o: FlatBool) -> FlatBool {
        match (self, o) {
            (FlatBool::Bot, _) | (_, FlatBool::Bot) => FlatBool::Bot,
            (FlatBool::True, _) | (_, FlatBool::True) => FlatBool::True,
            (FlatBool::False, FlatBool::False) => FlatBool::False,
            _ => FlatBool::Top,
        }
    }
}

/// May-point-to set over declared integer variables; `Top` may point anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointsTo {
    Set(BTreeSet<String>),
    Top,
}

impl PointsTo {
    pub fn bottom() -> PointsTo {
        PointsTo::Set(BTreeSet::new())
    }

    pub fn singleton(x: impl Into<String>) -> PointsTo {
        PointsTo::Set(BTreeSet::from([x.into()]))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, PointsTo::Set(s) if s.is_empty())
    }

    pub fn join(&self, o: &PointsTo) -> PointsTo {
        match (self, o) {
            (PointsTo::Top, _) | (_, PointsTo::Top) => PointsTo::Top,
            (PointsTo::Set(a), PointsTo::Set(b)) => PointsTo::Set(a.union(b).cloned().collect()),
        }
    }

    pub fn meet(&self, o: &PointsTo) -> PointsTo {
        match (self, o) {
            (PointsTo::Top, x) | (x, PointsTo::Top) => x.clone(),
            (PointsTo::Set(a), PointsTo::Set(b)) => {
                PointsTo::Set(a.intersection(b).cloned().collect())
            }
        }
    }

    pub fn leq(&self, o: &PointsTo) -> bool {
        match (self, o) {
            (_, PointsTo::Top) => true,
            (PointsTo::Top, _) => false,
            (PointsTo::Set(a), PointsTo::Set(b)) => a.is_subset(b),
        }
    }

    fn as_singleton(&self) -> Option<&String> {
        match self {
            PointsTo::Set(s) if s.len() == 1 => s.iter().next(),
            _ => None,
        }
    }
}

impl fmt::Display for PointsTo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointsTo::Top => f.write_str("top"),
            PointsTo::Set(s) => {
                write!(f, "{{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "&{x}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Tagged abstract value stored in environments. Flat booleans only ever
/// appear as comparison results, never here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(Interval),
    Ptr(PointsTo),
}

impl Value {
    pub fn tag(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Ptr(_) => "ptr",
        }
    }

    pub fn is_bottom(&self) -> bool {
        match self {
            Value::Int(i) => i.is_bottom(),
            Value::Ptr(p) => p.is_bottom(),
        }
    }

    pub fn top_like(&self) -> Value {
        match self {
            Value::Int(_) => Value::Int(Interval::top()),
            Value::Ptr(_) => Value::Ptr(PointsTo::Top),
        }
    }

    pub fn bottom_like(&self) -> Value {
        match self {
            Value::Int(_) => Value::Int(Interval::Bottom),
            Value::Ptr(_) => Value::Ptr(PointsTo::bottom()),
        }
    }

    fn mismatch(&self, o: &Value) -> DomainError {
        DomainError::TagMismatch(self.tag(), o.tag())
    }

    pub fn join(&self, o: &Value) -> Result<Value, DomainError> {
        match (self, o) {
            (Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.join(b))),
            (Value::Ptr(a), Value::Ptr(b)) => Ok(Value::Ptr(a.join(b))),
            // bottom is neutral for join across tags
            (a, b) if a.is_bottom() => Ok(b.clone()),
            (a, b) if b.is_bottom() => Ok(a.clone()),
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn meet(&self, o: &Value) -> Result<Value, DomainError> {
        match (self, o) {
            (Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.meet(b))),
            (Value::Ptr(a), Value::Ptr(b)) => Ok(Value::Ptr(a.meet(b))),
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn leq(&self, o: &Value) -> Result<bool, DomainError> {
        match (self, o) {
            (Value::Int(a), Value::Int(b)) => Ok(a.leq(b)),
            (Value::Ptr(a), Value::Ptr(b)) => Ok(a.leq(b)),
            (a, _) if a.is_bottom() => Ok(true),
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn widen(&self, o: &Value) -> Result<Value, DomainError> {
        match (self, o) {
            (Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.widen(b))),
            // the points-to lattice is finite, so join suffices
            (Value::Ptr(a), Value::Ptr(b)) => Ok(Value::Ptr(a.join(b))),
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn narrow(&self, o: &Value) -> Result<Value, DomainError> {
        match (self, o) {
            (Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.narrow(b))),
            (Value::Ptr(a), Value::Ptr(_)) => Ok(Value::Ptr(a.clone())),
            _ => Err(self.mismatch(o)),
        }
    }

    pub fn as_interval(&self) -> Option<&Interval> {
        match self {
            Value::Int(i) => Some(i),
            Value::Ptr(_) => None,
        }
    }

    pub fn as_points_to(&self) -> Option<&PointsTo> {
        match self {
            Value::Ptr(p) => Some(p),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Ptr(p) => write!(f, "{p}"),
        }
    }
}

/// Sound abstract forward evaluation of an n-ary operator.
pub fn forward_bin(op: BinOp, a: &Interval, b: &Interval) -> Interval {
    match op {
        BinOp::Add => a.add(b),
        BinOp::Sub => a.sub(b),
        BinOp::Mul => a.mul(b),
    }
}

/// Abstract comparison: true iff the comparison holds for all
/// concretization pairs, false iff it holds for none.
pub fn forward_cmp(cmp: CmpOp, a: &Value, b: &Value) -> Result<FlatBool, DomainError> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Ok(forward_cmp_interval(cmp, x, y)),
        (Value::Ptr(x), Value::Ptr(y)) => forward_cmp_ptr(cmp, x, y),
        _ => Err(a.mismatch(b)),
    }
}

fn forward_cmp_interval(cmp: CmpOp, a: &Interval, b: &Interval) -> FlatBool {
    let (Some((alo, ahi)), Some((blo, bhi))) = (a.bounds(), b.bounds()) else {
        return FlatBool::Bot;
    };
    match cmp {
        CmpOp::Le => {
            if ahi <= blo {
                FlatBool::True
            } else if alo > bhi {
                FlatBool::False
            } else {
                FlatBool::Top
            }
        }
        CmpOp::Lt => {
            if ahi < blo {
                FlatBool::True
            } else if alo >= bhi {
                FlatBool::False
            } else {
                FlatBool::Top
            }
        }
        CmpOp::Ge => forward_cmp_interval(CmpOp::Le, b, a),
        CmpOp::Gt => forward_cmp_interval(CmpOp::Lt, b, a),
        CmpOp::Eq => {
            if a.meet(b).is_bottom() {
                FlatBool::False
            } else if a.singleton().is_some() && a == b {
                FlatBool::True
            } else {
                FlatBool::Top
            }
        }
        CmpOp::Ne => match forward_cmp_interval(CmpOp::Eq, a, b) {
            FlatBool::True => FlatBool::False,
            FlatBool::False => FlatBool::True,
            x => x,
        },
    }
}

fn forward_cmp_ptr(cmp: CmpOp, a: &PointsTo, b: &PointsTo) -> Result<FlatBool, DomainError> {
    if a.is_bottom() || b.is_bottom() {
        return Ok(FlatBool::Bot);
    }
    let eq = match (a, b) {
        // equal singletons are definitely equal, disjoint sets definitely not
        _ if a.as_singleton().is_some() && a == b => FlatBool::True,
        (PointsTo::Set(x), PointsTo::Set(y)) if x.is_disjoint(y) => FlatBool::False,
        _ => FlatBool::Top,
    };
    match cmp {
        CmpOp::Eq => Ok(eq),
        CmpOp::Ne => Ok(match eq {
            FlatBool::True => FlatBool::False,
            FlatBool::False => FlatBool::True,
            x => x,
        }),
        _ => Err(DomainError::PtrComparison(cmp)),
    }
}

/// Backward comparison assuming the expected result true. Returns values
/// for both arguments without meeting them with the forward values.
pub fn backward_cmp(cmp: CmpOp, a: &Value, b: &Value) -> Result<(Value, Value), DomainError> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => {
            let (x2, y2) = backward_cmp_interval(cmp, x, y);
            Ok((Value::Int(x2), Value::Int(y2)))
        }
        (Value::Ptr(x), Value::Ptr(y)) => {
            let (x2, y2) = backward_cmp_ptr(cmp, x, y)?;
            Ok((Value::Ptr(x2), Value::Ptr(y2)))
        }
        _ => Err(a.mismatch(b)),
    }
}

fn bound_pred(b: Bound) -> Bound {
    match b {
        Bound::Int(k) => Bound::Int(k.saturating_sub(1)),
        b => b,
    }
}

fn bound_succ(b: Bound) -> Bound {
    match b {
        Bound::Int(k) => Bound::Int(k.saturating_add(1)),
        b => b,
    }
}

fn backward_cmp_interval(cmp: CmpOp, a: &Interval, b: &Interval) -> (Interval, Interval) {
    let (Some((alo, _)), Some((_, bhi))) = (a.bounds(), b.bounds()) else {
        return (Interval::Bottom, Interval::Bottom);
    };
    match cmp {
        CmpOp::Le => (
            Interval::new(Bound::NegInf, bhi),
            Interval::new(alo, Bound::PosInf),
        ),
        CmpOp::Lt => (
            Interval::new(Bound::NegInf, bound_pred(bhi)),
            Interval::new(bound_succ(alo), Bound::PosInf),
        ),
        CmpOp::Ge => {
            let (b2, a2) = backward_cmp_interval(CmpOp::Le, b, a);
            (a2, b2)
        }
        CmpOp::Gt => {
            let (b2, a2) = backward_cmp_interval(CmpOp::Lt, b, a);
            (a2, b2)
        }
        CmpOp::Eq => (*b, *a),
        CmpOp::Ne => (strip_endpoint(a, b), strip_endpoint(b, a)),
    }
}

/// Refinement for `!=`: when the other side is a singleton touching an
/// endpoint, that endpoint is stripped off.
fn strip_endpoint(a: &Interval, other: &Interval) -> Interval {
    let Some((lo, hi)) = a.bounds() else {
        return Interval::Bottom;
    };
    match other.singleton() {
        Some(k) => {
            if lo == Bound::Int(k) && hi == Bound::Int(k) {
                Interval::Bottom
            } else if lo == Bound::Int(k) {
                Interval::new(bound_succ(lo), hi)
            } else if hi == Bound::Int(k) {
                Interval::new(lo, bound_pred(hi))
            } else {
                *a
            }
        }
        None => *a,
    }
}

fn backward_cmp_ptr(
    cmp: CmpOp,
    a: &PointsTo,
    b: &PointsTo,
) -> Result<(PointsTo, PointsTo), DomainError> {
    if a.is_bottom() || b.is_bottom() {
        return Ok((PointsTo::bottom(), PointsTo::bottom()));
    }
    match cmp {
        CmpOp::Eq => Ok((b.clone(), a.clone())),
        CmpOp::Ne => {
            let strip = |x: &PointsTo, other: &PointsTo| match (x, other.as_singleton()) {
                (PointsTo::Set(s), Some(t)) => {
                    let mut s = s.clone();
                    s.remove(t);
                    PointsTo::Set(s)
                }
                _ => x.clone(),
            };
            Ok((strip(a, b), strip(b, a)))
        }
        _ => Err(DomainError::PtrComparison(cmp)),
    }
}

/// Backward binary operator: values for both arguments given the expected
/// result and the forward values of the arguments (explicit-meet convention).
pub fn backward_bin(
    op: BinOp,
    expected: &Interval,
    a: &Interval,
    b: &Interval,
) -> (Interval, Interval) {
    if expected.is_bottom() || a.is_bottom() || b.is_bottom() {
        return (Interval::Bottom, Interval::Bottom);
    }
    match op {
        BinOp::Add => (expected.sub(b), expected.sub(a)),
        BinOp::Sub => (expected.add(b), a.sub(expected)),
        BinOp::Mul => (backward_mul_arg(expected, b), backward_mul_arg(expected, a)),
    }
}

/// One argument of a backward multiplication. When the co-argument may be
/// zero no useful bound exists, so the result is top.
fn backward_mul_arg(expected: &Interval, co: &Interval) -> Interval {
    if co.contains(0) {
        Interval::top()
    } else {
        expected.div_outward(co)
    }
}

pub fn backward_neg(expected: &Interval) -> Interval {
    expected.neg()
}
