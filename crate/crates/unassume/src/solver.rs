//! Worklist fixpoint engine: widening at loop heads, a bounded
//! descending (narrowing) phase, witness-token-delayed widening,
//! guidance modes, and effort statistics.
//!
//! Guidance modes: `TotalInit`/`PartialInit` seed or join witness
//! initial values; `Unassume` expects a CFG instrumented with unassume
//! edges. Soundness never depends on the witness: a final sweep checks
//! that the result is a post-fixpoint of the abstract semantics.

use crate::ast::Cond;
use crate::cfg::{Action, Cfg, NodeId};
use crate::env::{
    assign_value, env_join, env_leq, env_narrow, env_widen, hetero_join, resolve_lval, Env,
    VarTable,
};
use crate::hc4::{assume_cond, naive_unassume, syntactic_vars, unassume_cond};
use crate::octagon::{
    dual_narrowing_unassume, oct_assign, oct_assume, oct_eval_cond, oct_havoc, oct_join, oct_leq,
    oct_naive_unassume, oct_narrow, oct_restrict, oct_widen, strengthen_join, OctError, Octagon,
};
use crate::value::{DomainError, FlatBool};
use crate::witness::{initial_values, BoundWitness, InitMode};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    None,
    TotalInit,
    PartialInit,
    Unassume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Propagating,
    Naive,
    DualNarrowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Interval,
    Octagon,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub transfer_evaluations: u64,
    pub widenings_applied: u64,
    pub widenings_delayed: u64,
    pub narrowing_iterations: u64,
    pub unassume_applications: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("solver iteration cap exceeded")]
    IterationCap,
    #[error("configuration error: {0}")]
    Config(String),
}

impl From<DomainError> for SolveError {
    fn from(e: DomainError) -> SolveError {
        SolveError::Domain(e.to_string())
    }
}

impl From<OctError> for SolveError {
    fn from(e: OctError) -> SolveError {
        SolveError::Domain(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct TaggedState<S> {
    pub state: S,
    pub tokens: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct SolverResult<S> {
    pub states: Vec<TaggedState<S>>,
    pub stats: SolverStats,
}

const ITERATION_CAP: u64 = 10_000;
const MAX_DESCENDING_SWEEPS: u32 = 3;

/// Domain plug-in for the generic worklist: lattice operations plus the
/// per-action transfer and the witness seed/join hooks.
trait DomainOps {
    type S: Clone;
    fn entry_state(&self) -> Self::S;
    fn bottom(&self) -> Self::S;
    fn is_bottom(&self, s: &Self::S) -> bool;
    fn join(&self, a: &Self::S, b: &Self::S) -> Result<Self::S, SolveError>;
    fn widen(&self, a: &Self::S, b: &Self::S) -> Result<Self::S, SolveError>;
    fn narrow(&self, a: &Self::S, b: &Self::S) -> Result<Self::S, SolveError>;
    fn leq(&self, a: &Self::S, b: &Self::S) -> Result<bool, SolveError>;
    fn transfer(
        &self,
        a: &Action,
        s: &Self::S,
        strategy: Strategy,
        stats: &mut SolverStats,
    ) -> Result<Self::S, SolveError>;
    fn seeds(&self, bw: &BoundWitness, mode: InitMode) -> Result<BTreeMap<NodeId, Self::S>, SolveError>;
    /// Heterogeneous join used by partial initialization.
    fn hjoin(&self, arriving: &Self::S, seed: &Self::S) -> Result<Self::S, SolveError>;

    fn same(&self, a: &Self::S, b: &Self::S) -> Result<bool, SolveError> {
        Ok(self.leq(a, b)? && self.leq(b, a)?)
    }
}

struct IntervalDomain<'a> {
    vt: &'a VarTable,
}

impl DomainOps for IntervalDomain<'_> {
    type S = Env;

    fn entry_state(&self) -> Env {
        self.vt.top_env()
    }

    fn bottom(&self) -> Env {
        Env::Bottom
    }

    fn is_bottom(&self, s: &Env) -> bool {
        s.is_bottom()
    }

    fn join(&self, a: &Env, b: &Env) -> Result<Env, SolveError> {
        Ok(env_join(a, b)?)
    }

    fn widen(&self, a: &Env, b: &Env) -> Result<Env, SolveError> {
        Ok(env_widen(a, b)?)
    }

    fn narrow(&self, a: &Env, b: &Env) -> Result<Env, SolveError> {
        Ok(env_narrow(a, b)?)
    }

    fn leq(&self, a: &Env, b: &Env) -> Result<bool, SolveError> {
        Ok(env_leq(a, b)?)
    }

    fn transfer(
        &self,
        a: &Action,
        s: &Env,
        strategy: Strategy,
        stats: &mut SolverStats,
    ) -> Result<Env, SolveError> {
        Ok(match a {
            Action::Assign(lv, e) => crate::env::assign(lv, e, s, self.vt)?,
            Action::Nondet(lv) => {
                let targets = resolve_lval(lv, s, self.vt);
                let v = match targets.iter().next() {
                    Some(x) => self.vt.top_value(x),
                    None => return Ok(Env::Bottom),
                };
                assign_value(lv, v, s, self.vt)?
            }
            Action::Assume(c) => assume_cond(c, s, self.vt)?,
            Action::Unassume(c, _) => {
                stats.unassume_applications += 1;
                match strategy {
                    Strategy::Naive => naive_unassume(c, &syntactic_vars(c), s, self.vt)?,
                    _ => unassume_cond(c, s, self.vt)?.0,
                }
            }
            Action::AssertCheck(_) => s.clone(),
        })
    }

    fn seeds(&self, bw: &BoundWitness, mode: InitMode) -> Result<BTreeMap<NodeId, Env>, SolveError> {
        Ok(initial_values(bw, mode, self.vt))
    }

    fn hjoin(&self, arriving: &Env, seed: &Env) -> Result<Env, SolveError> {
        Ok(hetero_join(arriving, seed)?)
    }
}

struct OctagonDomain {
    vars: Vec<String>,
}

impl DomainOps for OctagonDomain {
    type S = Octagon;

    fn entry_state(&self) -> Octagon {
        Octagon::top(&self.vars)
    }

    fn bottom(&self) -> Octagon {
        Octagon::bottom(&self.vars)
    }

    fn is_bottom(&self, s: &Octagon) -> bool {
        s.close().is_bottom()
    }

    fn join(&self, a: &Octagon, b: &Octagon) -> Result<Octagon, SolveError> {
        Ok(oct_join(a, b)?)
    }

    fn widen(&self, a: &Octagon, b: &Octagon) -> Result<Octagon, SolveError> {
        Ok(oct_widen(a, b)?)
    }

    fn narrow(&self, a: &Octagon, b: &Octagon) -> Result<Octagon, SolveError> {
        Ok(oct_narrow(a, b)?)
    }

    fn leq(&self, a: &Octagon, b: &Octagon) -> Result<bool, SolveError> {
        Ok(oct_leq(a, b)?)
    }

    fn transfer(
        &self,
        a: &Action,
        s: &Octagon,
        strategy: Strategy,
        stats: &mut SolverStats,
    ) -> Result<Octagon, SolveError> {
        Ok(match a {
            Action::Assign(lv, e) => match lv {
                crate::ast::Lval::Var(x) => oct_assign(x, e, s),
                crate::ast::Lval::Deref(_) => {
                    return Err(SolveError::Config("octagon domain requires a pointer-free program".into()))
                }
            },
            Action::Nondet(lv) => match lv {
                crate::ast::Lval::Var(x) => oct_havoc(&BTreeSet::from([x.clone()]), s),
                crate::ast::Lval::Deref(_) => {
                    return Err(SolveError::Config("octagon domain requires a pointer-free program".into()))
                }
            },
            Action::Assume(c) => oct_assume(c, s),
            Action::Unassume(c, _) => {
                stats.unassume_applications += 1;
                match strategy {
                    Strategy::Naive => oct_naive_unassume(c, &syntactic_vars(c), s),
                    _ => dual_narrowing_unassume(c, &syntactic_vars(c), s),
                }
            }
            Action::AssertCheck(_) => s.clone(),
        })
    }

    fn seeds(&self, bw: &BoundWitness, mode: InitMode) -> Result<BTreeMap<NodeId, Octagon>, SolveError> {
        let mut out = BTreeMap::new();
        for (n, invs) in &bw.by_node {
            let mut total = Octagon::top(&self.vars);
            let mut mentioned = BTreeSet::new();
            for (c, _) in invs {
                total = oct_assume(c, &total);
                mentioned.extend(syntactic_vars(c));
            }
            out.insert(
                *n,
                match mode {
                    InitMode::Total => total,
                    InitMode::Partial => oct_restrict(&total, &mentioned),
                },
            );
        }
        Ok(out)
    }

    fn hjoin(&self, arriving: &Octagon, seed: &Octagon) -> Result<Octagon, SolveError> {
        // ⋆⊔ keeps the first argument's environment order, so the result
        // stays aligned with the solver's uniform environment
        Ok(strengthen_join(arriving, seed))
    }
}

fn run_worklist<D: DomainOps>(
    dom: &D,
    cfg: &Cfg,
    mode: Mode,
    bw: &BoundWitness,
    strategy: Strategy,
) -> Result<SolverResult<D::S>, SolveError> {
    let seeds = match mode {
        Mode::TotalInit => dom.seeds(bw, InitMode::Total)?,
        Mode::PartialInit => dom.seeds(bw, InitMode::Partial)?,
        _ => BTreeMap::new(),
    };
    let n = cfg.nodes.len();
    let mut states: Vec<TaggedState<D::S>> = (0..n)
        .map(|_| TaggedState { state: dom.bottom(), tokens: BTreeSet::new() })
        .collect();
    let mut stats = SolverStats::default();

    let mut queue: VecDeque<NodeId> = VecDeque::new();
    let mut queued = vec![false; n];
    let enqueue = |q: &mut VecDeque<NodeId>, queued: &mut Vec<bool>, id: NodeId| {
        if !queued[id.0] {
            queued[id.0] = true;
            q.push_back(id);
        }
    };

    states[cfg.entry.0].state = dom.entry_state();
    enqueue(&mut queue, &mut queued, cfg.entry);
    if mode == Mode::TotalInit {
        for (id, s) in &seeds {
            states[id.0].state = s.clone();
            states[id.0].tokens = bw.by_node[id].iter().map(|(_, u)| u.clone()).collect();
            enqueue(&mut queue, &mut queued, *id);
        }
    }

    let mut dequeues: u64 = 0;
    while let Some(id) = queue.pop_front() {
        queued[id.0] = false;
        dequeues += 1;
        if dequeues > ITERATION_CAP {
            return Err(SolveError::IterationCap);
        }
        let src = states[id.0].clone();
        if dom.is_bottom(&src.state) {
            continue;
        }
        for e in cfg.out_edges(id) {
            stats.transfer_evaluations += 1;
            let mut new = dom.transfer(&e.action, &src.state, strategy, &mut stats)?;
            let mut tok_new = src.tokens.clone();
            if let Action::Unassume(_, uuid) = &e.action {
                tok_new.insert(uuid.clone());
            }
            if mode == Mode::PartialInit {
                if let Some(seed) = seeds.get(&e.to) {
                    if !dom.is_bottom(&new) {
                        new = dom.hjoin(&new, seed)?;
                        tok_new.extend(bw.by_node[&e.to].iter().map(|(_, u)| u.clone()));
                    }
                }
            }
            let old = &states[e.to.0];
            let tokens_grew = !tok_new.is_subset(&old.tokens);
            let merged_tokens: BTreeSet<String> = old.tokens.union(&tok_new).cloned().collect();
            let cand = if dom.is_bottom(&old.state) {
                if dom.is_bottom(&new) {
                    if merged_tokens != old.tokens {
                        states[e.to.0].tokens = merged_tokens;
                    }
                    continue;
                }
                new
            } else if dom.leq(&new, &old.state)? {
                if merged_tokens != old.tokens {
                    states[e.to.0].tokens = merged_tokens;
                    enqueue(&mut queue, &mut queued, e.to);
                }
                continue;
            } else if cfg.node(e.to).loop_head {
                let j = dom.join(&old.state, &new)?;
                if tokens_grew {
                    stats.widenings_delayed += 1;
                    j
                } else {
                    stats.widenings_applied += 1;
                    dom.widen(&old.state, &j)?
                }
            } else {
                dom.join(&old.state, &new)?
            };
            states[e.to.0] = TaggedState { state: cand, tokens: merged_tokens };
            enqueue(&mut queue, &mut queued, e.to);
        }
    }

    // descending phase: bounded narrowing sweeps, reverted wholesale if
    // they ever leave a non-post-fixpoint (defense in depth; the
    // ascending result is always a post-fixpoint)
    if stats.widenings_applied > 0 {
        let ascending: Vec<TaggedState<D::S>> = states.clone();
        for _ in 0..MAX_DESCENDING_SWEEPS {
            stats.narrowing_iterations += 1;
            let mut changed = false;
            for id in cfg.node_ids() {
                if id == cfg.entry {
                    continue;
                }
                let mut acc = dom.bottom();
                let mut has_in = false;
                for e in cfg.in_edges(id) {
                    has_in = true;
                    let src = &states[e.from.0];
                    if dom.is_bottom(&src.state) {
                        continue;
                    }
                    stats.transfer_evaluations += 1;
                    let mut new = dom.transfer(&e.action, &src.state, strategy, &mut stats)?;
                    if mode == Mode::PartialInit {
                        if let Some(seed) = seeds.get(&id) {
                            if !dom.is_bottom(&new) {
                                new = dom.hjoin(&new, seed)?;
                            }
                        }
                    }
                    acc = dom.join(&acc, &new)?;
                }
                if !has_in {
                    continue;
                }
                let old = &states[id.0].state;
                let cand = if cfg.node(id).loop_head && !dom.is_bottom(old) {
                    dom.narrow(old, &acc)?
                } else {
                    acc
                };
                if !dom.same(&cand, old)? {
                    states[id.0].state = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !post_fixpoint(dom, cfg, mode, &seeds, strategy, &states)? {
            states = ascending;
        }
    }

    debug_assert!(post_fixpoint(dom, cfg, mode, &seeds, strategy, &states)?);
    Ok(SolverResult { states, stats })
}

/// One verification sweep: for every edge, transfer(source) ⊑ target.
fn post_fixpoint<D: DomainOps>(
    dom: &D,
    cfg: &Cfg,
    mode: Mode,
    seeds: &BTreeMap<NodeId, D::S>,
    strategy: Strategy,
    states: &[TaggedState<D::S>],
) -> Result<bool, SolveError> {
    let mut scratch = SolverStats::default();
    for e in &cfg.edges {
        let src = &states[e.from.0];
        if dom.is_bottom(&src.state) {
            continue;
        }
        let mut new = dom.transfer(&e.action, &src.state, strategy, &mut scratch)?;
        if mode == Mode::PartialInit {
            if let Some(seed) = seeds.get(&e.to) {
                if !dom.is_bottom(&new) {
                    new = dom.hjoin(&new, seed)?;
                }
            }
        }
        if !dom.leq(&new, &states[e.to.0].state)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub enum AnyResult {
    Interval(SolverResult<Env>),
    Octagon(SolverResult<Octagon>),
}

/// A completed analysis: the CFG actually solved (instrumented when mode
/// is `Unassume`) plus per-node states and statistics.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub cfg: Cfg,
    pub result: AnyResult,
}

impl SolverRun {
    pub fn stats(&self) -> &SolverStats {
        match &self.result {
            AnyResult::Interval(r) => &r.stats,
            AnyResult::Octagon(r) => &r.stats,
        }
    }

    pub fn is_bottom_at(&self, n: NodeId) -> bool {
        match &self.result {
            AnyResult::Interval(r) => r.states[n.0].state.is_bottom(),
            AnyResult::Octagon(r) => r.states[n.0].state.close().is_bottom(),
        }
    }

    pub fn tokens_at(&self, n: NodeId) -> &BTreeSet<String> {
        match &self.result {
            AnyResult::Interval(r) => &r.states[n.0].tokens,
            AnyResult::Octagon(r) => &r.states[n.0].tokens,
        }
    }

    pub fn env_at(&self, n: NodeId) -> Option<&Env> {
        match &self.result {
            AnyResult::Interval(r) => Some(&r.states[n.0].state),
            AnyResult::Octagon(_) => None,
        }
    }

    pub fn octagon_at(&self, n: NodeId) -> Option<&Octagon> {
        match &self.result {
            AnyResult::Octagon(r) => Some(&r.states[n.0].state),
            AnyResult::Interval(_) => None,
        }
    }

    pub fn eval_cond_at(&self, c: &Cond, n: NodeId, vt: &VarTable) -> Result<FlatBool, SolveError> {
        match &self.result {
            AnyResult::Interval(r) => Ok(crate::env::eval_cond(c, &r.states[n.0].state, vt)?),
            AnyResult::Octagon(r) => Ok(oct_eval_cond(c, &r.states[n.0].state)),
        }
    }

    /// Human-readable state at a node, for summaries and diagnostics.
    pub fn describe_state(&self, n: NodeId) -> String {
        match &self.result {
            AnyResult::Interval(r) => format!("{}", r.states[n.0].state),
            AnyResult::Octagon(r) => {
                let o = &r.states[n.0].state;
                if o.close().is_bottom() {
                    "⊥".to_string()
                } else {
                    format!("{{{}}}", o.close().constraints().join(", "))
                }
            }
        }
    }
}

/// Solve the program's abstract semantics under the given guidance mode.
/// The input CFG is cloned; in mode `Unassume` the clone is instrumented
/// with the witness's unassume actions first.
pub fn solve(
    cfg: &Cfg,
    bw: &BoundWitness,
    mode: Mode,
    domain: DomainKind,
    strategy: Strategy,
    vt: &VarTable,
) -> Result<SolverRun, SolveError> {
    match (domain, strategy) {
        (DomainKind::Interval, Strategy::DualNarrowing) => {
            return Err(SolveError::Config("dual-narrowing strategy requires the octagon domain".into()))
        }
        (DomainKind::Octagon, Strategy::Propagating) => {
            return Err(SolveError::Config("propagating strategy requires the interval domain".into()))
        }
        _ => {}
    }
    let mut cfg = cfg.clone();
    if mode == Mode::Unassume {
        bw.instrument(&mut cfg);
    }
    match domain {
        DomainKind::Interval => {
            let dom = IntervalDomain { vt };
            let result = run_worklist(&dom, &cfg, mode, bw, strategy)?;
            Ok(SolverRun { cfg, result: AnyResult::Interval(result) })
        }
        DomainKind::Octagon => {
            if vt.has_pointers() {
                return Err(SolveError::Config("octagon domain requires a pointer-free program".into()));
            }
            let dom = OctagonDomain { vars: vt.int_vars().cloned().collect() };
            let result = run_worklist(&dom, &cfg, mode, bw, strategy)?;
            Ok(SolverRun { cfg, result: AnyResult::Octagon(result) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyVerdict {
    Verified,
    Unknown,
}

/// The property holds iff every assertion's condition evaluates to
/// abstract true on the state flowing into its check (unreachable
/// checks pass vacuously). Never reports violation: the analysis is
/// sound for proofs only.
pub fn check_asserts(run: &SolverRun, vt: &VarTable) -> Result<PropertyVerdict, SolveError> {
    for e in &run.cfg.edges {
        if let Action::AssertCheck(c) = &e.action {
            if run.is_bottom_at(e.from) {
                continue;
            }
            if run.eval_cond_at(c, e.from, vt)? != FlatBool::True {
                return Ok(PropertyVerdict::Unknown);
            }
        }
    }
    Ok(PropertyVerdict::Verified)
}
