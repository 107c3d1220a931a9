//! Witness validation: confirm the safety property and abstractly check
//! every bound invariant against the fixpoint states, producing the
//! JSON-serializable report.
//!
//! An invariant is confirmed when it evaluates to abstract true on the
//! post-unassume state at its node (vacuously on an unreachable node).
//! The witness is validated only when the property is verified, every
//! matched invariant is confirmed, and no entry was dropped because its
//! text failed to parse. Unassume never trusts invariants, so a
//! validated verdict carries the soundness of the analysis itself.

use crate::cfg::NodeId;
use crate::env::VarTable;
use crate::solver::{check_asserts, PropertyVerdict, SolveError, SolverRun};
use crate::value::FlatBool;
use crate::witness::{BoundWitness, UnmatchedReason, WitnessEntry};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct InvariantReport {
    pub uuid: String,
    pub line: u32,
    pub text: String,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct StatsReport {
    pub transfer_evaluations: u64,
    pub widenings_applied: u64,
    pub widenings_delayed: u64,
    pub narrowing_iterations: u64,
    pub unassume_applications: u64,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct ConfigReport {
    pub program: String,
    pub witness: Option<String>,
    pub mode: String,
    pub domain: String,
    pub strategy: String,
}

/// Field order matches the documented report schema.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Report {
    pub property: String,
    pub witness_verdict: String,
    pub invariants: Vec<InvariantReport>,
    pub stats: StatsReport,
    pub config: ConfigReport,
}

/// Check every witness entry against the solved states and combine the
/// verdicts per Theorem 1. `entries` is the full parsed witness in file
/// order; `bw` is its binding against the solved CFG.
pub fn validate(
    run: &SolverRun,
    bw: &BoundWitness,
    entries: &[WitnessEntry],
    vt: &VarTable,
    config: ConfigReport,
) -> Result<Report, SolveError> {
    let property = check_asserts(run, vt)?;

    let mut node_of: BTreeMap<&str, NodeId> = BTreeMap::new();
    let mut cond_of = BTreeMap::new();
    for (n, invs) in &bw.by_node {
        for (c, uuid) in invs {
            node_of.insert(uuid.as_str(), *n);
            cond_of.insert(uuid.as_str(), c);
        }
    }
    let unmatched: BTreeMap<&str, &UnmatchedReason> =
        bw.unmatched.iter().map(|(e, r)| (e.uuid.as_str(), r)).collect();
    let trivial: std::collections::BTreeSet<&str> =
        bw.trivial.iter().map(|e| e.uuid.as_str()).collect();

    let mut invariants = Vec::new();
    let mut all_matched_confirmed = true;
    let mut any_parse_failure = false;
    for e in entries {
        let verdict = if let Some(reason) = unmatched.get(e.uuid.as_str()) {
            if matches!(reason, UnmatchedReason::ParseFailure(_)) {
                any_parse_failure = true;
            }
            "unmatched"
        } else if trivial.contains(e.uuid.as_str()) {
            "confirmed"
        } else {
            let n = node_of[e.uuid.as_str()];
            let confirmed = run.is_bottom_at(n)
                || run.eval_cond_at(cond_of[e.uuid.as_str()], n, vt)? == FlatBool::True;
            if !confirmed {
                all_matched_confirmed = false;
            }
            if confirmed {
                "confirmed"
            } else {
                "unconfirmed"
            }
        };
        invariants.push(InvariantReport {
            uuid: e.uuid.clone(),
            line: e.line,
            text: e.invariant_text.clone(),
            verdict: verdict.to_string(),
        });
    }

    let verified = property == PropertyVerdict::Verified;
    let validated = verified && all_matched_confirmed && !any_parse_failure;
    let s = run.stats();
    Ok(Report {
        property: if verified { "verified" } else { "unknown" }.to_string(),
        witness_verdict: if validated { "validated" } else { "not-validated" }.to_string(),
        invariants,
        stats: StatsReport {
            transfer_evaluations: s.transfer_evaluations,
            widenings_applied: s.widenings_applied,
            widenings_delayed: s.widenings_delayed,
            narrowing_iterations: s.narrowing_iterations,
            unassume_applications: s.unassume_applications,
        },
        config,
    })
}
