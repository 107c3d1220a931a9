//! YAML correctness witnesses: parsing, binding location invariants to
//! CFG nodes, unassume instrumentation, and initial-value extraction
//! for the initialization-based guidance modes.
//!
//! Witness schema: a top-level YAML sequence; each entry has
//! `entry_type` (`loop_invariant` or `location_invariant`), `metadata:
//! {uuid}`, `location: {file_name, line, column?}` (1-based line and
//! character column) and a body under the entry-type key: `{string:
//! <expr>, type: assertion, format: c_expression}`. Unknown entry types
//! are skipped with a warning; witnesses are untrusted, so binding
//! problems are collected per entry rather than aborting.

use crate::ast::{Cond, Program};
use crate::cfg::{Cfg, NodeId};
use crate::env::{eval_cond, Env, VarTable};
use crate::hc4::{assume_cond, syntactic_vars};
use crate::parser::{check_condition, parse_condition};
use crate::value::FlatBool;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    LoopInvariant,
    LocationInvariant,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::LoopInvariant => "loop_invariant",
            EntryKind::LocationInvariant => "location_invariant",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessEntry {
    pub kind: EntryKind,
    pub uuid: String,
    pub file_name: String,
    pub line: u32,
    pub column: Option<u32>,
    pub invariant_text: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("malformed witness YAML: {0}")]
    Yaml(String),
    #[error("witness entry {index}: {msg}")]
    Entry { index: usize, msg: String },
    #[error("duplicate witness uuid `{0}`")]
    DuplicateUuid(String),
    #[error("witness entry {index}: unsupported invariant format `{format}` (expected c_expression)")]
    UnsupportedFormat { index: usize, format: String },
}

#[derive(Debug, Clone, Default)]
pub struct ParsedWitness {
    pub entries: Vec<WitnessEntry>,
    /// Entry types we do not consume, reported as warnings.
    pub skipped: Vec<String>,
}

pub fn parse_witness(text: &str) -> Result<ParsedWitness, WitnessError> {
    let doc: serde_yaml::Value =
        serde_yaml::from_str(text).map_err(|e| WitnessError::Yaml(e.to_string()))?;
    if doc.is_null() {
        return Ok(ParsedWitness::default());
    }
    let seq = doc
        .as_sequence()
        .ok_or_else(|| WitnessError::Yaml("expected a top-level sequence of entries".into()))?;
    let mut out = ParsedWitness::default();
    let mut seen = std::collections::BTreeSet::new();
    for (index, item) in seq.iter().enumerate() {
        let entry = |msg: &str| WitnessError::Entry { index, msg: msg.to_string() };
        let map = item.as_mapping().ok_or_else(|| entry("entry is not a mapping"))?;
        let get = |key: &str| map.get(serde_yaml::Value::from(key));
        let kind_str = get("entry_type")
            .and_then(|v| v.as_str())
            .ok_or_else(|| entry("missing entry_type"))?;
        let kind = match kind_str {
            "loop_invariant" => EntryKind::LoopInvariant,
            "location_invariant" => EntryKind::LocationInvariant,
            other => {
                out.skipped.push(format!("entry {index}: skipping unsupported entry_type `{other}`"));
                continue;
            }
        };
        let uuid = get("metadata")
            .and_then(|m| m.get("uuid"))
            .and_then(|v| v.as_str())
            .ok_or_else(|| entry("missing metadata.uuid"))?
            .to_string();
        if uuid.is_empty() {
            return Err(entry("empty metadata.uuid"));
        }
        if !seen.insert(uuid.clone()) {
            return Err(WitnessError::DuplicateUuid(uuid));
        }
        let loc = get("location").ok_or_else(|| entry("missing location"))?;
        let file_name = loc
            .get("file_name")
            .and_then(|v| v.as_str())
            .ok_or_else(|| entry("missing location.file_name"))?
            .to_string();
        let line = loc
            .get("line")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| entry("missing or non-positive location.line"))? as u32;
        if line == 0 {
            return Err(entry("location.line must be >= 1"));
        }
        let column = loc.get("column").and_then(|v| v.as_u64()).map(|c| c as u32);
        let body = get(kind_str).ok_or_else(|| entry("missing invariant body"))?;
        let invariant_text = body
            .get("string")
            .and_then(|v| v.as_str())
            .ok_or_else(|| entry("missing invariant string"))?
            .to_string();
        let format = body.get("format").and_then(|v| v.as_str()).unwrap_or("c_expression");
        if format != "c_expression" {
            return Err(WitnessError::UnsupportedFormat { index, format: format.to_string() });
        }
        out.entries.push(WitnessEntry { kind, uuid, file_name, line, column, invariant_text });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnmatchedReason {
    /// No CFG node (of the required kind) at the entry's location.
    NoLocation,
    /// The entry names a different file than the analyzed program.
    FileMismatch,
    /// The invariant text does not parse or binds undeclared variables.
    ParseFailure(String),
}

impl fmt::Display for UnmatchedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnmatchedReason::NoLocation => f.write_str("no location"),
            UnmatchedReason::FileMismatch => f.write_str("file mismatch"),
            UnmatchedReason::ParseFailure(e) => write!(f, "parse failure: {e}"),
        }
    }
}

/// Witness entries resolved against a CFG: per-node invariants in
/// witness order, plus the entries that could not be bound.
#[derive(Debug, Clone, Default)]
pub struct BoundWitness {
    pub by_node: BTreeMap<NodeId, Vec<(Cond, String)>>,
    pub unmatched: Vec<(WitnessEntry, UnmatchedReason)>,
    /// Syntactically trivial invariants (e_true); never instrumented.
    pub trivial: Vec<WitnessEntry>,
}

impl BoundWitness {
    pub fn is_empty(&self) -> bool {
        self.by_node.is_empty()
    }

    /// Insert the unassume actions into the CFG.
    pub fn instrument(&self, cfg: &mut Cfg) {
        for (n, actions) in &self.by_node {
            cfg.instrument(*n, actions);
        }
    }

    /// Total entry count: bound + unmatched + trivial.
    pub fn total(&self) -> usize {
        self.by_node.values().map(Vec::len).sum::<usize>() + self.unmatched.len() + self.trivial.len()
    }
}

/// A condition without variables that abstractly evaluates to true is
/// the trivial invariant e_true.
fn is_trivially_true(c: &Cond) -> bool {
    if !syntactic_vars(c).is_empty() {
        return false;
    }
    let vt = VarTable::from_pairs(&[]);
    eval_cond(c, &Env::empty(), &vt) == Ok(FlatBool::True)
}

/// Bind witness entries to CFG nodes. `file_name` is the name under
/// which the program was read; entries naming other files are
/// unmatched. Problems never abort: the witness is untrusted input.
pub fn bind_to_cfg(
    entries: &[WitnessEntry],
    cfg: &Cfg,
    program: &Program,
    file_name: &str,
) -> BoundWitness {
    let mut out = BoundWitness::default();
    for e in entries {
        if e.file_name != file_name {
            out.unmatched.push((e.clone(), UnmatchedReason::FileMismatch));
            continue;
        }
        let cond = match parse_condition(&e.invariant_text)
            .and_then(|c| check_condition(&c, program).map(|()| c))
        {
            Ok(c) => c,
            Err(err) => {
                out.unmatched.push((e.clone(), UnmatchedReason::ParseFailure(err.to_string())));
                continue;
            }
        };
        if is_trivially_true(&cond) {
            out.trivial.push(e.clone());
            continue;
        }
        let node = match e.kind {
            EntryKind::LoopInvariant => cfg
                .node_at_line(e.line)
                .filter(|&n| cfg.node(n).loop_head)
                .or_else(|| cfg.loop_heads().into_iter().find(|&n| {
                    cfg.node(n).pos.is_some_and(|p| p.line == e.line)
                })),
            EntryKind::LocationInvariant => match e.column {
                Some(col) => cfg.node_at(e.line, col).or_else(|| cfg.node_at_line(e.line)),
                None => cfg.node_at_line(e.line),
            },
        };
        match node {
            Some(n) => {
                out.by_node.entry(n).or_default().push((crate::ast::to_nnf(&cond), e.uuid.clone()));
            }
            None => out.unmatched.push((e.clone(), UnmatchedReason::NoLocation)),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    Total,
    Partial,
}

/// Initial abstract values per bound node: the invariant assumed on the
/// top environment; in partial mode every variable the invariant does
/// not mention is set to an explicit bottom.
pub fn initial_values(
    bw: &BoundWitness,
    mode: InitMode,
    vt: &VarTable,
) -> BTreeMap<NodeId, Env> {
    let mut out = BTreeMap::new();
    for (n, invs) in &bw.by_node {
        let mut w = vt.top_env();
        let mut mentioned = std::collections::BTreeSet::new();
        for (c, _) in invs {
            w = match assume_cond(c, &w, vt) {
                Ok(r) => r,
                Err(_) => w, // ill-typed against this domain: keep top (sound)
            };
            mentioned.extend(syntactic_vars(c));
        }
        if mode == InitMode::Partial {
            if let Env::Map(_) = w {
                for x in vt.names() {
                    if !mentioned.contains(x) {
                        w.set(x.clone(), vt.bottom_value(x));
                    }
                }
            }
        }
        out.insert(*n, w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::VarType;
    use crate::cfg::build_cfg;
    use crate::env::hetero_join;
    use crate::parser::parse_program;
    use crate::value::{Bound, Interval, PointsTo, Value};

    const COUNTDOWN: &str = "int x; x = 40;\nwhile (x != 0) {\n  x = x - 1;\n}\n";

    fn witness_yaml(kind: &str, line: u32, inv: &str) -> String {
        format!(
            "- entry_type: {kind}\n  metadata:\n    uuid: \"w-1\"\n  location:\n    file_name: prog.mc\n    line: {line}\n  {kind}:\n    string: \"{inv}\"\n    type: assertion\n    format: c_expression\n"
        )
    }

    #[test]
    fn parses_loop_invariant_entry() {
        let w = parse_witness(&witness_yaml("loop_invariant", 2, "0 <= x && x <= 40")).unwrap();
        assert_eq!(w.entries.len(), 1);
        let e = &w.entries[0];
        assert_eq!(e.kind, EntryKind::LoopInvariant);
        assert_eq!(e.line, 2);
        assert_eq!(e.invariant_text, "0 <= x && x <= 40");
        assert!(w.skipped.is_empty());
    }

    #[test]
    fn empty_witness_has_no_entries() {
        assert!(parse_witness("[]").unwrap().entries.is_empty());
        assert!(parse_witness("").unwrap().entries.is_empty());
    }

    #[test]
    fn unsupported_format_is_error() {
        let y = witness_yaml("loop_invariant", 2, "x >= 0").replace("c_expression", "acsl");
        assert!(matches!(
            parse_witness(&y),
            Err(WitnessError::UnsupportedFormat { format, .. }) if format == "acsl"
        ));
    }

    #[test]
    fn unknown_entry_type_is_skipped_with_warning() {
        let y = witness_yaml("ghost_update", 2, "x >= 0");
        let w = parse_witness(&y).unwrap();
        assert!(w.entries.is_empty());
        assert_eq!(w.skipped.len(), 1);
    }

    #[test]
    fn duplicate_uuid_is_error() {
        let y = format!(
            "{}{}",
            witness_yaml("loop_invariant", 2, "x >= 0"),
            witness_yaml("loop_invariant", 2, "x <= 40")
        );
        assert!(matches!(parse_witness(&y), Err(WitnessError::DuplicateUuid(_))));
    }

    #[test]
    fn binds_loop_invariant_to_loop_head() {
        let p = parse_program(COUNTDOWN).unwrap();
        let cfg = build_cfg(&p);
        let w = parse_witness(&witness_yaml("loop_invariant", 2, "0 <= x && x <= 40")).unwrap();
        let bw = bind_to_cfg(&w.entries, &cfg, &p, "prog.mc");
        assert_eq!(bw.by_node.len(), 1);
        let (&n, invs) = bw.by_node.iter().next().unwrap();
        assert!(cfg.node(n).loop_head);
        assert_eq!(invs.len(), 1);
        assert!(bw.unmatched.is_empty());
        assert_eq!(bw.total(), 1);
    }

    #[test]
    fn unmatched_reasons() {
        let p = parse_program(COUNTDOWN).unwrap();
        let cfg = build_cfg(&p);
        // no node at line 9
        let w = parse_witness(&witness_yaml("location_invariant", 9, "x >= 0")).unwrap();
        let bw = bind_to_cfg(&w.entries, &cfg, &p, "prog.mc");
        assert_eq!(bw.unmatched[0].1, UnmatchedReason::NoLocation);
        // wrong file
        let w = parse_witness(&witness_yaml("loop_invariant", 2, "x >= 0")).unwrap();
        let bw = bind_to_cfg(&w.entries, &cfg, &p, "other.mc");
        assert_eq!(bw.unmatched[0].1, UnmatchedReason::FileMismatch);
        // unparseable invariant text
        let w = parse_witness(&witness_yaml("loop_invariant", 2, "x >=")).unwrap();
        let bw = bind_to_cfg(&w.entries, &cfg, &p, "prog.mc");
        assert!(matches!(bw.unmatched[0].1, UnmatchedReason::ParseFailure(_)));
        // undeclared variable
        let w = parse_witness(&witness_yaml("loop_invariant", 2, "z >= 0")).unwrap();
        let bw = bind_to_cfg(&w.entries, &cfg, &p, "prog.mc");
        assert!(matches!(bw.unmatched[0].1, UnmatchedReason::ParseFailure(_)));
    }

    #[test]
    fn trivial_invariant_is_not_bound() {
        let p = parse_program(COUNTDOWN).unwrap();
        let mut cfg = build_cfg(&p);
        let w = parse_witness(&witness_yaml("loop_invariant", 2, "1 == 1")).unwrap();
        let bw = bind_to_cfg(&w.entries, &cfg, &p, "prog.mc");
        assert!(bw.by_node.is_empty());
        assert!(bw.unmatched.is_empty());
        assert_eq!(bw.trivial.len(), 1);
        // instrumentation leaves the CFG action-identical
        let edges_before = cfg.edges.len();
        bw.instrument(&mut cfg);
        assert_eq!(cfg.edges.len(), edges_before);
    }

    fn vt_pij() -> VarTable {
        VarTable::from_pairs(&[("p", VarType::PtrInt), ("i", VarType::Int), ("j", VarType::Int)])
    }

    fn pij_witness(cfg: &Cfg, p: &Program, inv: &str) -> BoundWitness {
        let y = witness_yaml("location_invariant", 2, inv);
        let w = parse_witness(&y).unwrap();
        bind_to_cfg(&w.entries, cfg, p, "prog.mc")
    }

    #[test]
    fn initial_values_examples() {
        let src = "int *p; int i; int j;\ni = 0;\nj = 0;\n";
        let p = parse_program(src).unwrap();
        let cfg = build_cfg(&p);
        let vt = vt_pij();
        let lo_inf = Value::Int(Interval::new(Bound::Int(0), Bound::PosInf));

        // partial for i >= 0 && j >= 0 -> {p -> bot, i -> [0,inf], j -> [0,inf]}
        let bw = pij_witness(&cfg, &p, "i >= 0 && j >= 0");
        let w = initial_values(&bw, InitMode::Partial, &vt);
        let env = w.values().next().unwrap();
        assert_eq!(env.get("p"), Some(&Value::Ptr(PointsTo::bottom())));
        assert_eq!(env.get("i"), Some(&lo_inf));
        assert_eq!(env.get("j"), Some(&lo_inf));

        // partial for *p >= 0 -> {p -> top, i -> bot, j -> bot}
        let bw = pij_witness(&cfg, &p, "*p >= 0");
        let w = initial_values(&bw, InitMode::Partial, &vt);
        let env = w.values().next().unwrap();
        assert_eq!(env.get("p"), Some(&Value::Ptr(PointsTo::Top)));
        assert_eq!(env.get("i"), Some(&Value::Int(Interval::Bottom)));
        assert_eq!(env.get("j"), Some(&Value::Int(Interval::Bottom)));

        // total for *p >= 0 with no points-to info -> top env
        let w = initial_values(&bw, InitMode::Total, &vt);
        assert_eq!(w.values().next().unwrap(), &vt.top_env());
    }

    #[test]
    fn partial_initial_value_joins_reproduce_paper_states() {
        let src = "int *p; int i; int j;\ni = 0;\nj = 0;\n";
        let p = parse_program(src).unwrap();
        let cfg = build_cfg(&p);
        let vt = vt_pij();
        let reaching = Env::of(&[
            ("p", Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j")))),
            ("i", Value::Int(Interval::of(0, 0))),
            ("j", Value::Int(Interval::of(0, 0))),
        ]);
        let lo_inf = Value::Int(Interval::new(Bound::Int(0), Bound::PosInf));

        let bw = pij_witness(&cfg, &p, "i >= 0 && j >= 0");
        let w = initial_values(&bw, InitMode::Partial, &vt);
        let joined = hetero_join(&reaching, w.values().next().unwrap()).unwrap();
        assert_eq!(
            joined,
            Env::of(&[
                ("p", Value::Ptr(PointsTo::singleton("i").join(&PointsTo::singleton("j")))),
                ("i", lo_inf.clone()),
                ("j", lo_inf),
            ])
        );

        let bw = pij_witness(&cfg, &p, "*p >= 0");
        let w = initial_values(&bw, InitMode::Partial, &vt);
        let joined = hetero_join(&reaching, w.values().next().unwrap()).unwrap();
        assert_eq!(
            joined,
            Env::of(&[
                ("p", Value::Ptr(PointsTo::Top)),
                ("i", Value::Int(Interval::of(0, 0))),
                ("j", Value::Int(Interval::of(0, 0))),
            ])
        );
    }
}
