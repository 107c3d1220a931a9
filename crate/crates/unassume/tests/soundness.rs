//! Corpus-wide soundness: every state reached by exhaustive concrete
//! execution must lie in the concretization of the abstract state
//! computed at the same location, for every guidance mode, strategy and
//! domain — including deliberately wrong witnesses, which may cost
//! precision but must never be trusted. A validated report additionally
//! promises that all assertions and all bound invariants hold on every
//! explored execution.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use unassume::cfg::{build_cfg, Action, Cfg, NodeId};
use unassume::env::VarTable;
use unassume::oracle::{concrete_run, eval_cond, state_in_gamma, CVal, ConcreteState};
use unassume::parser::parse_program;
use unassume::solver::{solve, AnyResult, DomainKind, Mode, SolverRun, Strategy};
use unassume::validator::{validate, ConfigReport};
use unassume::witness::{bind_to_cfg, parse_witness, BoundWitness, WitnessEntry};

const CLIP: i64 = 4;
const STEP_CAP: u64 = 2_000_000;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("corpus")
}

struct Case {
    name: String,
    cfg: Cfg,
    vt: VarTable,
    /// (witness file stem, parsed entries, binding)
    witnesses: Vec<(String, Vec<WitnessEntry>, BoundWitness)>,
}

fn load_corpus() -> Vec<Case> {
    let dir = corpus_dir();
    let mut programs: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "mc"))
        .collect();
    programs.sort();
    assert!(programs.len() >= 20, "corpus too small: {}", programs.len());

    let mut cases = Vec::new();
    for path in programs {
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        let src = fs::read_to_string(&path).unwrap();
        let program = parse_program(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let cfg = build_cfg(&program);
        let vt = VarTable::from_program(&program);

        // every witness whose stem starts with the program's stem, so
        // countdown.mc also picks up its wrong/exact/trivial variants
        let mut witnesses = Vec::new();
        let mut ymls: Vec<PathBuf> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "yml"))
            .filter(|p| {
                let ws = p.file_stem().unwrap().to_str().unwrap();
                ws == stem || ws.starts_with(&format!("{stem}_"))
            })
            .collect();
        ymls.sort();
        for w in ymls {
            let wname = w.file_stem().unwrap().to_str().unwrap().to_string();
            let parsed = parse_witness(&fs::read_to_string(&w).unwrap())
                .unwrap_or_else(|e| panic!("{wname}: {e}"));
            let bw = bind_to_cfg(&parsed.entries, &cfg, &program, &name);
            witnesses.push((wname, parsed.entries, bw));
        }
        cases.push(Case { name, cfg, vt, witnesses });
    }
    cases
}

fn contained(run: &SolverRun, n: NodeId, s: &ConcreteState) -> bool {
    match &run.result {
        AnyResult::Interval(_) => state_in_gamma(s, run.env_at(n).unwrap()),
        AnyResult::Octagon(_) => {
            let vals: BTreeMap<String, i64> = s
                .iter()
                .map(|(x, v)| match v {
                    CVal::Int(k) => (x.clone(), *k),
                    CVal::Ptr(_) => panic!("pointer value under octagon domain"),
                })
                .collect();
            run.octagon_at(n).unwrap().close().contains(&vals)
        }
    }
}

fn combos(vt: &VarTable) -> Vec<(DomainKind, Strategy)> {
    let mut v = vec![
        (DomainKind::Interval, Strategy::Propagating),
        (DomainKind::Interval, Strategy::Naive),
    ];
    if !vt.has_pointers() {
        v.push((DomainKind::Octagon, Strategy::DualNarrowing));
        v.push((DomainKind::Octagon, Strategy::Naive));
    }
    v
}

fn check_containment(
    label: &str,
    run: &SolverRun,
    reached: &BTreeSet<(NodeId, ConcreteState)>,
) {
    for (n, s) in reached {
        assert!(
            contained(run, *n, s),
            "{label}: concrete state {s:?} at node {n:?} escapes abstract {}",
            run.describe_state(*n)
        );
    }
}

/// γ-containment for every program, every witness variant, every mode,
/// and every compatible domain/strategy pair.
#[test]
fn abstract_states_cover_all_concrete_executions() {
    let mut checked = 0usize;
    for case in load_corpus() {
        // one concrete reach set per CFG shape: plain, and one per
        // instrumented variant (unassume edges are concrete no-ops but
        // change node numbering)
        let plain = match concrete_run(&case.cfg, &case.vt, CLIP, STEP_CAP) {
            Ok(r) => r,
            Err(_) => panic!("{}: concrete oracle hit the step cap", case.name),
        };

        for (domain, strategy) in combos(&case.vt) {
            let empty = BoundWitness::default();
            let run = solve(&case.cfg, &empty, Mode::None, domain, strategy, &case.vt).unwrap();
            check_containment(
                &format!("{} none {domain:?} {strategy:?}", case.name),
                &run,
                &plain,
            );
            checked += 1;

            for (wname, _, bw) in &case.witnesses {
                for mode in [Mode::TotalInit, Mode::PartialInit, Mode::Unassume] {
                    let run = solve(&case.cfg, bw, mode, domain, strategy, &case.vt).unwrap();
                    let reached = if mode == Mode::Unassume {
                        concrete_run(&run.cfg, &case.vt, CLIP, STEP_CAP)
                            .unwrap_or_else(|_| panic!("{wname}: oracle step cap"))
                    } else {
                        plain.clone()
                    };
                    check_containment(
                        &format!("{} {wname} {mode:?} {domain:?} {strategy:?}", case.name),
                        &run,
                        &reached,
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 100, "only {checked} combinations exercised");
}

/// A validated verdict means the property and every matched invariant
/// actually hold on all explored executions.
#[test]
fn validated_reports_are_concretely_truthful() {
    let mut validated_runs = 0usize;
    for case in load_corpus() {
        for (wname, entries, bw) in &case.witnesses {
            for (domain, strategy) in combos(&case.vt) {
                let run =
                    solve(&case.cfg, bw, Mode::Unassume, domain, strategy, &case.vt).unwrap();
                let report =
                    validate(&run, bw, entries, &case.vt, ConfigReport::default()).unwrap();
                if report.witness_verdict != "validated" {
                    continue;
                }
                validated_runs += 1;
                let reached = concrete_run(&run.cfg, &case.vt, CLIP, STEP_CAP)
                    .unwrap_or_else(|_| panic!("{wname}: oracle step cap"));

                // all assertions hold on every state flowing into them
                for e in &run.cfg.edges {
                    if let Action::AssertCheck(c) = &e.action {
                        for (n, s) in &reached {
                            if *n == e.from {
                                assert_eq!(
                                    eval_cond(c, s),
                                    Some(true),
                                    "{} {wname}: assertion fails concretely on {s:?}",
                                    case.name
                                );
                            }
                        }
                    }
                }
                // every bound invariant holds at its location
                for (node, invs) in &bw.by_node {
                    for (n, s) in &reached {
                        if n == node {
                            for (c, uuid) in invs {
                                assert_eq!(
                                    eval_cond(c, s),
                                    Some(true),
                                    "{} {wname}: invariant {uuid} fails concretely on {s:?}",
                                    case.name
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(validated_runs >= 10, "only {validated_runs} validated runs found");
}

/// Instrumentation must not change concrete behavior: the reach set of
/// the instrumented CFG, restricted to original nodes, equals the plain
/// reach set.
#[test]
fn unassume_edges_are_concrete_noops() {
    for case in load_corpus() {
        let plain = concrete_run(&case.cfg, &case.vt, CLIP, STEP_CAP).unwrap();
        for (wname, _, bw) in &case.witnesses {
            let mut inst = case.cfg.clone();
            bw.instrument(&mut inst);
            let reached = concrete_run(&inst, &case.vt, CLIP, STEP_CAP).unwrap();
            let original: BTreeSet<_> = reached
                .into_iter()
                .filter(|(n, _)| n.0 < case.cfg.nodes.len())
                .collect();
            assert_eq!(original, plain, "{} {wname}", case.name);
        }
    }
}
