//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single PASS line (visible with `--nocapture`); a failed assertion
//! fails the corresponding criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use unassume::ast::{to_nnf, VarType};
use unassume::cfg::{build_cfg, Cfg};
use unassume::env::{env_leq, eval_cond, havoc, hetero_join, Env, VarTable};
use unassume::hc4::{assume_cond, naive_unassume, syntactic_vars, unassume_cond};
use unassume::octagon::{
    dual_narrowing_unassume, oct_assume, oct_havoc, oct_naive_unassume, Octagon,
};
use unassume::oracle;
use unassume::parser::{parse_condition, parse_program};
use unassume::solver::{
    check_asserts, solve, DomainKind, Mode, PropertyVerdict, SolverRun, Strategy,
};
use unassume::validator::{validate, ConfigReport};
use unassume::value::{Bound, FlatBool, Interval, PointsTo, Value};
use unassume::witness::{bind_to_cfg, parse_witness, BoundWitness, InitMode};

fn corpus(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("corpus").join(file)
}

struct Loaded {
    cfg: Cfg,
    vt: VarTable,
    bw: BoundWitness,
    entries: Vec<unassume::witness::WitnessEntry>,
}

fn load(program: &str, witness: Option<&str>) -> Loaded {
    let p = parse_program(&fs::read_to_string(corpus(program)).unwrap()).unwrap();
    let cfg = build_cfg(&p);
    let vt = VarTable::from_program(&p);
    let (bw, entries) = match witness {
        Some(w) => {
            let parsed = parse_witness(&fs::read_to_string(corpus(w)).unwrap()).unwrap();
            (bind_to_cfg(&parsed.entries, &cfg, &p, program), parsed.entries)
        }
        None => (BoundWitness::default(), Vec::new()),
    };
    Loaded { cfg, vt, bw, entries }
}

fn env_x(lo: Bound, hi: Bound) -> Env {
    Env::of(&[("x", Value::Int(Interval::new(lo, hi)))])
}

/// Introductory example end-to-end: the witness turns the widened
/// loop-head state into the exact invariant, validates, and costs fewer
/// transfer evaluations with zero widenings.
#[test]
fn criterion_1_introductory_example_end_to_end() {
    let l = load("countdown.mc", Some("countdown.yml"));
    let head = l.cfg.loop_heads()[0];

    let base = solve(&l.cfg, &l.bw, Mode::None, DomainKind::Interval, Strategy::Propagating, &l.vt)
        .unwrap();
    assert_eq!(base.env_at(head).unwrap(), &env_x(Bound::NegInf, Bound::Int(40)));

    let guided =
        solve(&l.cfg, &l.bw, Mode::Unassume, DomainKind::Interval, Strategy::Propagating, &l.vt)
            .unwrap();
    assert_eq!(guided.env_at(head).unwrap(), &env_x(Bound::Int(0), Bound::Int(40)));
    assert_eq!(guided.stats().widenings_applied, 0);
    assert!(guided.stats().transfer_evaluations < base.stats().transfer_evaluations);

    let report = validate(&guided, &l.bw, &l.entries, &l.vt, ConfigReport::default()).unwrap();
    assert_eq!(report.property, "verified");
    assert_eq!(report.witness_verdict, "validated");

    println!("ACCEPTANCE 1 (introductory example end-to-end): PASS");
}

/// Golden reproduction of the worked operation examples: naive
/// unassume, the octagon trace, the pointer-dependent propagating
/// trace, tautology and disjunctive relaxations, abstract validity, and
/// the partial-initialization joins.
#[test]
fn criterion_2_golden_operation_examples() {
    let c = |s: &str| to_nnf(&parse_condition(s).unwrap());
    let iv = |lo: i64, hi: i64| Value::Int(Interval::of(lo, hi));
    let lo_inf = |lo: i64| Value::Int(Interval::new(Bound::Int(lo), Bound::PosInf));
    let hi_inf = |hi: i64| Value::Int(Interval::new(Bound::NegInf, Bound::Int(hi)));
    let vset = |xs: &[&str]| -> BTreeSet<String> { xs.iter().map(|s| s.to_string()).collect() };

    // naive unassume worked computations
    let vt = VarTable::from_pairs(&[("x", VarType::Int), ("y", VarType::Int)]);
    let d = Env::of(&[("x", iv(0, 0)), ("y", iv(0, 0))]);
    assert_eq!(
        havoc(&vset(&["x"]), &d, &vt),
        Env::of(&[("x", Value::Int(Interval::top())), ("y", iv(0, 0))])
    );
    assert_eq!(
        naive_unassume(&c("x >= 0"), &vset(&["x"]), &d, &vt).unwrap(),
        Env::of(&[("x", lo_inf(0)), ("y", iv(0, 0))])
    );
    let vt_in = VarTable::from_pairs(&[("i", VarType::Int), ("n", VarType::Int)]);
    let d = Env::of(&[("i", iv(0, 0)), ("n", iv(10, 10))]);
    assert_eq!(
        naive_unassume(&c("i <= n"), &vset(&["i"]), &d, &vt_in).unwrap(),
        Env::of(&[("i", hi_inf(10)), ("n", iv(10, 10))])
    );

    // octagon havoc/assume trace and dual-narrowing example
    let oenv = vec!["x".to_string(), "y".to_string()];
    let oct = oct_assume(&c("x == 0 && y >= 0"), &Octagon::top(&oenv)).close();
    let havoced = oct_havoc(&vset(&["x"]), &oct);
    assert_eq!(havoced.constraints(), vec!["-y <= 0"]);
    assert_eq!(
        oct_assume(&c("x >= 0"), &havoced).constraints(),
        vec!["-x - y <= 0", "-x <= 0", "-y <= 0"]
    );
    assert_eq!(
        dual_narrowing_unassume(&c("x >= 0"), &vset(&["x"]), &oct).constraints(),
        vec!["-x - y <= 0", "-x <= 0", "-y <= 0", "x - y <= 0"]
    );

    // pointer-dependent propagating unassume: exactly 2 relaxing iterations
    let vt_pij = VarTable::from_pairs(&[
        ("p", VarType::PtrInt),
        ("i", VarType::Int),
        ("j", VarType::Int),
    ]);
    let d = Env::of(&[
        ("p", Value::Ptr(PointsTo::singleton("i"))),
        ("i", iv(0, 0)),
        ("j", iv(0, 0)),
    ]);
    let inv = c("(p == &i || p == &j) && *p >= 0");
    let (relaxed, iters) = unassume_cond(&inv, &d, &vt_pij).unwrap();
    let both = PointsTo::singleton("i").join(&PointsTo::singleton("j"));
    assert_eq!(
        relaxed,
        Env::of(&[("p", Value::Ptr(both.clone())), ("i", lo_inf(0)), ("j", lo_inf(0))])
    );
    assert_eq!(iters, 2);

    // tautology widens to top; disjunctive invariant relaxes [1,1] to [1,2]
    let vt_i = VarTable::from_pairs(&[("i", VarType::Int)]);
    let (r, _) = unassume_cond(&c("i <= i + 1"), &Env::of(&[("i", iv(0, 0))]), &vt_i).unwrap();
    assert_eq!(r, Env::of(&[("i", Value::Int(Interval::top()))]));
    let vt_x = VarTable::from_pairs(&[("x", VarType::Int)]);
    let (r, _) =
        unassume_cond(&c("x == 1 || x == 2"), &Env::of(&[("x", iv(1, 1))]), &vt_x).unwrap();
    assert_eq!(r, Env::of(&[("x", iv(1, 2))]));

    // abstract validity: the conjunctive phrasing is true on {x ↦ [1,2]},
    // the disjunctive one only unknown
    let dx = Env::of(&[("x", iv(1, 2))]);
    assert_eq!(eval_cond(&c("1 <= x && x <= 2"), &dx, &vt_x).unwrap(), FlatBool::True);
    assert_eq!(eval_cond(&c("x == 1 || x == 2"), &dx, &vt_x).unwrap(), FlatBool::Top);

    // partial-initialization joins against the reaching pointer state
    let src = "int *p; int i; int j;\ni = 0;\nj = 0;\n";
    let prog = parse_program(src).unwrap();
    let cfg = build_cfg(&prog);
    let reaching = Env::of(&[("p", Value::Ptr(both.clone())), ("i", iv(0, 0)), ("j", iv(0, 0))]);
    let bind = |invariant: &str| {
        let yaml = format!(
            "- entry_type: location_invariant\n  metadata:\n    uuid: \"a-1\"\n  location:\n    file_name: prog.mc\n    line: 2\n  location_invariant:\n    string: \"{invariant}\"\n    type: assertion\n    format: c_expression\n"
        );
        bind_to_cfg(&parse_witness(&yaml).unwrap().entries, &cfg, &prog, "prog.mc")
    };
    let w = unassume::witness::initial_values(&bind("i >= 0 && j >= 0"), InitMode::Partial, &vt_pij);
    let joined = hetero_join(&reaching, w.values().next().unwrap()).unwrap();
    assert_eq!(
        joined,
        Env::of(&[("p", Value::Ptr(both)), ("i", lo_inf(0)), ("j", lo_inf(0))])
    );
    let w = unassume::witness::initial_values(&bind("*p >= 0"), InitMode::Partial, &vt_pij);
    let joined = hetero_join(&reaching, w.values().next().unwrap()).unwrap();
    assert_eq!(
        joined,
        Env::of(&[("p", Value::Ptr(PointsTo::Top)), ("i", iv(0, 0)), ("j", iv(0, 0))])
    );

    println!("ACCEPTANCE 2 (golden operation examples): PASS");
}

fn gamma_check(run: &SolverRun, vt: &VarTable, label: &str) {
    let reached = oracle::concrete_run(&run.cfg, vt, 4, 2_000_000).unwrap();
    for (n, s) in &reached {
        let inside = match run.env_at(*n) {
            Some(env) => oracle::state_in_gamma(s, env),
            None => {
                let vals: BTreeMap<String, i64> = s
                    .iter()
                    .filter_map(|(x, v)| match v {
                        oracle::CVal::Int(k) => Some((x.clone(), *k)),
                        oracle::CVal::Ptr(_) => None,
                    })
                    .collect();
                run.octagon_at(*n).unwrap().close().contains(&vals)
            }
        };
        assert!(inside, "{label}: state {s:?} at {n:?} not covered");
    }
}

/// Soundness suite: γ-containment on a representative corpus slice for
/// all modes and strategies, including wrong witnesses, plus the
/// invariant-truth check behind every validated verdict. The full-corpus
/// version runs as the `soundness` test target.
#[test]
fn criterion_3_soundness_oracle() {
    let slices = [
        ("countdown.mc", Some("countdown.yml")),
        ("countdown.mc", Some("countdown_wrong.yml")),
        ("pointer_choice.mc", Some("pointer_choice.yml")),
        ("disjunctive.mc", Some("disjunctive.yml")),
        ("relational.mc", Some("relational.yml")),
        ("nested.mc", Some("nested.yml")),
    ];
    for (prog, wit) in slices {
        let l = load(prog, wit);
        let mut combos = vec![
            (DomainKind::Interval, Strategy::Propagating),
            (DomainKind::Interval, Strategy::Naive),
        ];
        if !l.vt.has_pointers() {
            combos.push((DomainKind::Octagon, Strategy::DualNarrowing));
            combos.push((DomainKind::Octagon, Strategy::Naive));
        }
        for (domain, strategy) in combos {
            for mode in [Mode::None, Mode::TotalInit, Mode::PartialInit, Mode::Unassume] {
                let run = solve(&l.cfg, &l.bw, mode, domain, strategy, &l.vt).unwrap();
                gamma_check(&run, &l.vt, &format!("{prog} {mode:?} {domain:?} {strategy:?}"));

                if mode == Mode::Unassume {
                    let report =
                        validate(&run, &l.bw, &l.entries, &l.vt, ConfigReport::default()).unwrap();
                    if report.witness_verdict == "validated" {
                        let reached = oracle::concrete_run(&run.cfg, &l.vt, 4, 2_000_000).unwrap();
                        for (node, invs) in &l.bw.by_node {
                            for s in oracle::states_at(&reached, *node) {
                                for (cond, uuid) in invs {
                                    assert_eq!(
                                        oracle::eval_cond(cond, s),
                                        Some(true),
                                        "{prog}: validated invariant {uuid} false on {s:?}"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    println!("ACCEPTANCE 3 (soundness oracle, representative slice): PASS");
}

/// Quantified property laws at reduced volume; the full fixed-seed
/// suites run as the `properties` test target.
#[test]
fn criterion_4_property_laws() {
    // deterministic case list: all small intervals over a fixed grid
    let mut ivs = vec![Interval::Bottom, Interval::top()];
    for lo in -4..=4 {
        for hi in lo..=4 {
            ivs.push(Interval::of(lo, hi));
        }
    }
    let mut cases = 0;
    for a in &ivs {
        for b in &ivs {
            assert_eq!(a.join(b), b.join(a));
            assert!(a.leq(&a.join(b)) && b.leq(&a.join(b)));
            assert!(a.meet(b).leq(a));
            let w = a.widen(&a.join(b));
            assert!(a.leq(&w) && b.leq(&w));
            let n = a.narrow(&a.meet(b));
            assert!(n.leq(a) && a.meet(b).leq(&n));
            cases += 1;
        }
    }
    assert!(cases >= 1000, "only {cases} interval cases");

    // extensiveness and reductiveness over a deterministic condition set
    let vt = VarTable::from_pairs(&[("x", VarType::Int), ("y", VarType::Int)]);
    let conds = [
        "x >= 0", "x <= 2", "x == y", "x != y", "x + y <= 3", "x - y >= -1",
        "x == 1 || y == 2", "x >= 0 && y >= 0", "x * 2 <= y", "y * -3 < -6",
    ];
    let mut cases = 0;
    for cs in conds {
        let c = to_nnf(&parse_condition(cs).unwrap());
        for xlo in -2..=2i64 {
            for ylo in -2..=2i64 {
                let d = Env::of(&[
                    ("x", Value::Int(Interval::of(xlo, xlo + 2))),
                    ("y", Value::Int(Interval::of(ylo, ylo + 2))),
                ]);
                let a = assume_cond(&c, &d, &vt).unwrap();
                assert!(env_leq(&a, &d).unwrap(), "assume({cs}) not reductive");
                for s in oracle::enumerate_gamma(&d, &vt, 4) {
                    if oracle::eval_cond(&c, &s) == Some(true) {
                        assert!(oracle::state_in_gamma(&s, &a), "assume({cs}) dropped {s:?}");
                    }
                }
                let (prop, _) = unassume_cond(&c, &d, &vt).unwrap();
                assert!(env_leq(&d, &prop).unwrap(), "propagating unassume({cs}) shrank");
                let nv = naive_unassume(&c, &syntactic_vars(&c), &d, &vt).unwrap();
                assert!(env_leq(&d, &nv).unwrap(), "naive unassume({cs}) shrank");
                cases += 1;
            }
        }
    }
    assert!(cases >= 250, "only {cases} condition cases");

    println!("ACCEPTANCE 4 (property laws): PASS");
}

/// Negative-precision demonstration: naive octagon unassume loses the
/// relational constraint x - y <= 0 that dual-narrowing retains.
#[test]
fn criterion_5_naive_vs_dual_narrowing_precision() {
    let oenv = vec!["x".to_string(), "y".to_string()];
    let c = to_nnf(&parse_condition("x >= 0").unwrap());
    let v: BTreeSet<String> = ["x".to_string()].into();
    let oct = oct_assume(
        &to_nnf(&parse_condition("x == 0 && y >= 0").unwrap()),
        &Octagon::top(&oenv),
    )
    .close();

    let naive: BTreeSet<String> = oct_naive_unassume(&c, &v, &oct).constraints().into_iter().collect();
    let dual: BTreeSet<String> = dual_narrowing_unassume(&c, &v, &oct).constraints().into_iter().collect();
    assert!(!naive.contains("x - y <= 0"));
    assert!(dual.contains("x - y <= 0"));
    assert!(naive.is_subset(&dual) && naive != dual, "expected strict constraint-set difference");

    println!("ACCEPTANCE 5 (naive loses x - y <= 0, dual-narrowing retains): PASS");
}

/// Performance proxy: guided analysis needs strictly fewer transfer
/// evaluations on the introductory program and on at least 3 of the 5
/// bundled loop benchmarks.
#[test]
fn criterion_6_transfer_evaluation_ratio() {
    let ratio = |prog: &str, wit: &str| {
        let l = load(prog, Some(wit));
        let base =
            solve(&l.cfg, &l.bw, Mode::None, DomainKind::Interval, Strategy::Propagating, &l.vt)
                .unwrap();
        let guided =
            solve(&l.cfg, &l.bw, Mode::Unassume, DomainKind::Interval, Strategy::Propagating, &l.vt)
                .unwrap();
        assert_eq!(check_asserts(&guided, &l.vt).unwrap(), PropertyVerdict::Verified, "{prog}");
        base.stats().transfer_evaluations as f64 / guided.stats().transfer_evaluations as f64
    };

    assert!(ratio("countdown.mc", "countdown.yml") > 1.0);

    let benches = [
        ("upcount.mc", "upcount.yml"),
        ("down50.mc", "down50.yml"),
        ("clampcount.mc", "clampcount.yml"),
        ("nested.mc", "nested.yml"),
        ("step3.mc", "step3.yml"),
    ];
    let wins = benches.iter().filter(|(p, w)| ratio(p, w) > 1.0).count();
    assert!(wins >= 3, "only {wins} of 5 benchmarks improved");

    println!("ACCEPTANCE 6 (evaluation-count ratio > 1.0 on {wins}/5 benchmarks): PASS");
}
