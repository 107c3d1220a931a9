//! Control-flow graph: program locations with stable identities, edges
//! carrying actions, loop-head detection, and unassume instrumentation.

use crate::ast::{to_nnf, Cond, Exp, Lval, Program, SourcePos, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Assign(Lval, Exp),
    Nondet(Lval),
    Assume(Cond),
    /// Injected from a witness invariant; the uuid becomes a widening token.
    Unassume(Cond, String),
    AssertCheck(Cond),
}

#[derive(Debug, Clone)]
pub struct Node {
    /// Source position of the originating statement; synthetic merge and
    /// instrumentation nodes have none.
    pub pos: Option<SourcePos>,
    pub loop_head: bool,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub from: NodeId,
    pub action: Action,
    pub to: NodeId,
}

#[derive(Debug, Clone)]
pub struct Cfg {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub entry: NodeId,
    pub exit: NodeId,
}

impl Cfg {
    fn add_node(&mut self, pos: Option<SourcePos>) -> NodeId {
        self.nodes.push(Node { pos, loop_head: false });
        NodeId(self.nodes.len() - 1)
    }

    fn add_edge(&mut self, from: NodeId, action: Action, to: NodeId) {
        self.edges.push(Edge { from, action, to });
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n.0]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn out_edges(&self, n: NodeId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == n)
    }

    pub fn in_edges(&self, n: NodeId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.to == n)
    }

    /// The node representing the statement at `line` (smallest column on
    /// that line when several statements share it).
    pub fn node_at_line(&self, line: u32) -> Option<NodeId> {
        self.node_ids()
            .filter(|&n| self.nodes[n.0].pos.is_some_and(|p| p.line == line))
            .min_by_key(|&n| self.nodes[n.0].pos.unwrap().col)
    }

    pub fn node_at(&self, line: u32, col: u32) -> Option<NodeId> {
        self.node_ids()
            .find(|&n| self.nodes[n.0].pos == Some(SourcePos { line, col }))
    }

    pub fn loop_heads(&self) -> Vec<NodeId> {
        self.node_ids().filter(|&n| self.nodes[n.0].loop_head).collect()
    }

    /// Splice an unassume action chain in front of node `n`: every edge
    /// into `n` is redirected through fresh nodes carrying the unassume
    /// edges, so the relaxation applies to each arriving state before it
    /// is combined at `n`.
    pub fn instrument(&mut self, n: NodeId, actions: &[(Cond, String)]) {
        if actions.is_empty() {
            return;
        }
        let incoming: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].to == n).collect();
        for i in incoming {
            let mut cur = self.add_node(None);
            self.edges[i].to = cur;
            for (k, (c, uuid)) in actions.iter().enumerate() {
                let next = if k + 1 == actions.len() { n } else { self.add_node(None) };
                self.add_edge(cur, Action::Unassume(c.clone(), uuid.clone()), next);
                cur = next;
            }
        }
    }
}

/// Build the CFG of a type-checked program. Branches emit `Assume` edges
/// for the condition and its NNF negation; `while` places the loop-head
/// node at the condition's position; `assert(c)` emits an `AssertCheck`
/// edge followed by an `Assume(c)` refinement.
pub fn build_cfg(p: &Program) -> Cfg {
    let mut cfg = Cfg { nodes: Vec::new(), edges: Vec::new(), entry: NodeId(0), exit: NodeId(0) };
    let entry = cfg.add_node(p.body.first().map(Stmt::pos));
    cfg.entry = entry;
    let exit = lower_block(&mut cfg, &p.body, entry);
    cfg.exit = exit;
    mark_loop_heads(&mut cfg);
    cfg
}

/// Lower a statement list starting at `cur`, returning the node reached
/// after the last statement.
fn lower_block(cfg: &mut Cfg, stmts: &[Stmt], mut cur: NodeId) -> NodeId {
    for (i, s) in stmts.iter().enumerate() {
        // ensure the node we are about to leave carries this statement's
        // position (entry/merge nodes may still be unpositioned)
        if cfg.nodes[cur.0].pos.is_none() {
            cfg.nodes[cur.0].pos = Some(s.pos());
        }
        let next_pos = stmts.get(i + 1).map(Stmt::pos);
        cur = match s {
            Stmt::Assign(lv, e, _) => {
                let next = cfg.add_node(next_pos);
                cfg.add_edge(cur, Action::Assign(lv.clone(), e.clone()), next);
                next
            }
            Stmt::Nondet(lv, _) => {
                let next = cfg.add_node(next_pos);
                cfg.add_edge(cur, Action::Nondet(lv.clone()), next);
                next
            }
            Stmt::If(c, then_b, else_b, _) => {
                let pos_c = to_nnf(c);
                let neg_c = to_nnf(&Cond::Not(Box::new(c.clone())));
                let merge = cfg.add_node(next_pos);
                let then_entry = cfg.add_node(then_b.first().map(Stmt::pos));
                cfg.add_edge(cur, Action::Assume(pos_c), then_entry);
                let then_exit = lower_block(cfg, then_b, then_entry);
                cfg.add_edge(then_exit, Action::Assume(Cond::truth()), merge);
                if else_b.is_empty() {
                    cfg.add_edge(cur, Action::Assume(neg_c), merge);
                } else {
                    let else_entry = cfg.add_node(else_b.first().map(Stmt::pos));
                    cfg.add_edge(cur, Action::Assume(neg_c), else_entry);
                    let else_exit = lower_block(cfg, else_b, else_entry);
                    cfg.add_edge(else_exit, Action::Assume(Cond::truth()), merge);
                }
                merge
            }
            Stmt::While(c, body, _) => {
                // `cur` is the loop head: control re-enters it from the body
                let pos_c = to_nnf(c);
                let neg_c = to_nnf(&Cond::Not(Box::new(c.clone())));
                let after = cfg.add_node(next_pos);
                if body.is_empty() {
                    cfg.add_edge(cur, Action::Assume(pos_c), cur);
                } else {
                    let body_entry = cfg.add_node(body.first().map(Stmt::pos));
                    cfg.add_edge(cur, Action::Assume(pos_c), body_entry);
                    let body_exit = lower_block(cfg, body, body_entry);
                    cfg.add_edge(body_exit, Action::Assume(Cond::truth()), cur);
                }
                cfg.add_edge(cur, Action::Assume(neg_c), after);
                after
            }
            Stmt::Assert(c, _) => {
                let nnf = to_nnf(c);
                let mid = cfg.add_node(None);
                let next = cfg.add_node(next_pos);
                cfg.add_edge(cur, Action::AssertCheck(nnf.clone()), mid);
                cfg.add_edge(mid, Action::Assume(nnf), next);
                next
            }
        };
    }
    cur
}

/// Flag loop heads: targets of back edges under depth-first order from
/// the entry node.
fn mark_loop_heads(cfg: &mut Cfg) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        Active,
        Done,
    }
    let mut marks = vec![Mark::Unvisited; cfg.nodes.len()];
    let mut heads = Vec::new();
    // explicit stack: (node, next out-edge index to try)
    let mut stack = vec![(cfg.entry, 0usize)];
    marks[cfg.entry.0] = Mark::Active;
    let succs: Vec<Vec<NodeId>> = (0..cfg.nodes.len())
        .map(|n| cfg.edges.iter().filter(|e| e.from == NodeId(n)).map(|e| e.to).collect())
        .collect();
    while let Some(&mut (n, ref mut i)) = stack.last_mut() {
        if *i < succs[n.0].len() {
            let t = succs[n.0][*i];
            *i += 1;
            match marks[t.0] {
                Mark::Active => heads.push(t),
                Mark::Unvisited => {
                    marks[t.0] = Mark::Active;
                    stack.push((t, 0));
                }
                Mark::Done => {}
            }
        } else {
            marks[n.0] = Mark::Done;
            stack.pop();
        }
    }
    for h in heads {
        cfg.nodes[h.0].loop_head = true;
    }
}
