//! The resolution graph recorded during solving, and extraction of an
//! unsatisfiable core of starting clauses by backward reachability from the
//! empty clause.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::snf::{AtomTable, Clause, Literal};

/// Production rules. Each knows which premises get an edge into the
/// conclusion and whether it creates a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    InitII,
    InitIN,
    StepNN,
    StepNX,
    StepXX,
    Aug1,
    Aug2,
    LoopInitX,
    LoopInitN,
    LoopInitC,
    LoopSub,
    Conclusion1,
    Conclusion2,
}

impl Rule {
    pub const ALL: [Rule; 13] = [
        Rule::InitII,
        Rule::InitIN,
        Rule::StepNN,
        Rule::StepNX,
        Rule::StepXX,
        Rule::Aug1,
        Rule::Aug2,
        Rule::LoopInitX,
        Rule::LoopInitN,
        Rule::LoopInitC,
        Rule::LoopSub,
        Rule::Conclusion1,
        Rule::Conclusion2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::InitII => "init-ii",
            Rule::InitIN => "init-in",
            Rule::StepNN => "step-nn",
            Rule::StepNX => "step-nx",
            Rule::StepXX => "step-xx",
            Rule::Aug1 => "aug1",
            Rule::Aug2 => "aug2",
            Rule::LoopInitX => "BFS-loop-it-init-x",
            Rule::LoopInitN => "BFS-loop-it-init-n",
            Rule::LoopInitC => "BFS-loop-it-init-c",
            Rule::LoopSub => "BFS-loop-it-sub",
            Rule::Conclusion1 => "BFS-loop-conclusion1",
            Rule::Conclusion2 => "BFS-loop-conclusion2",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Whether premise 1 and premise 2 get an edge into the conclusion.
    pub fn edge_pattern(self) -> (bool, bool) {
        match self {
            Rule::InitII | Rule::InitIN | Rule::StepNN | Rule::StepNX | Rule::StepXX | Rule::Conclusion1 => {
                (true, true)
            }
            Rule::Aug1 | Rule::LoopInitX | Rule::LoopInitN | Rule::LoopSub => (true, false),
            Rule::Conclusion2 => (true, false),
            Rule::Aug2 | Rule::LoopInitC => (false, false),
        }
    }

    pub fn creates_vertex(self) -> bool {
        self != Rule::LoopSub
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The main partition, or the partition of one loop search iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionId {
    Main,
    Loop { search: usize, iteration: usize },
}

impl PartitionId {
    pub fn is_main(self) -> bool {
        self == PartitionId::Main
    }
}

impl fmt::Display for PartitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionId::Main => f.write_str("M"),
            PartitionId::Loop { search, iteration } => write!(f, "L{search}.{iteration}"),
        }
    }
}

pub type VertexId = usize;

#[derive(Clone, Debug)]
pub struct Vertex {
    pub id: VertexId,
    pub clause: Clause,
    pub partition: PartitionId,
    /// `None` for starting clauses.
    pub rule: Option<Rule>,
    /// Index into the starting clause list, for starting clauses.
    pub starting: Option<usize>,
    /// For init-c vertices: the body the clause was built from.
    pub origin_body: Option<Vec<Literal>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub rule: Rule,
    /// 1 or 2.
    pub slot: u8,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("the graph has no empty-clause vertex")]
    NoEmptyClause,
    #[error("rule {rule} given {given} premise(s) but needs {needed} for its edges")]
    EdgePattern { rule: Rule, given: usize, needed: usize },
}

#[derive(Clone, Debug, Default)]
pub struct ResolutionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    incoming: Vec<Vec<usize>>,
    empty: Option<VertexId>,
}

impl ResolutionGraph {
    pub fn new() -> ResolutionGraph {
        ResolutionGraph::default()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, id: VertexId) -> &Vertex {
        &self.vertices[id]
    }

    /// Edges into `v`, in creation order.
    pub fn incoming(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.incoming[v].iter().map(|&e| &self.edges[e])
    }

    pub fn empty_vertex(&self) -> Option<VertexId> {
        self.empty
    }

    /// Partitions in order of first appearance; main first.
    pub fn partitions(&self) -> Vec<PartitionId> {
        let mut out = vec![PartitionId::Main];
        for v in &self.vertices {
            if !out.contains(&v.partition) {
                out.push(v.partition);
            }
        }
        out
    }

    fn push_vertex(&mut self, v: Vertex) -> VertexId {
        let id = self.vertices.len();
        self.vertices.push(Vertex { id, ..v });
        self.incoming.push(Vec::new());
        id
    }

    pub fn add_starting(&mut self, clause: Clause, index: usize) -> VertexId {
        self.push_vertex(Vertex {
            id: 0,
            clause,
            partition: PartitionId::Main,
            rule: None,
            starting: Some(index),
            origin_body: None,
        })
    }

    /// Record one application of `rule` with conclusion `clause` in
    /// `partition`. `premises` lists the premise vertices that get an edge,
    /// in slot order; it must match the rule's edge pattern.
    pub fn record(
        &mut self,
        rule: Rule,
        premises: &[VertexId],
        clause: Clause,
        partition: PartitionId,
    ) -> Result<VertexId, GraphError> {
        let (p1, p2) = rule.edge_pattern();
        let needed = usize::from(p1) + usize::from(p2);
        if premises.len() != needed || !rule.creates_vertex() {
            return Err(GraphError::EdgePattern {
                rule,
                given: premises.len(),
                needed,
            });
        }
        let v = self.push_vertex(Vertex {
            id: 0,
            clause,
            partition,
            rule: Some(rule),
            starting: None,
            origin_body: None,
        });
        for (i, &p) in premises.iter().enumerate() {
            self.add_edge(p, v, rule, i as u8 + 1);
        }
        Ok(v)
    }

    /// Record an init-c conclusion together with the body it was built from.
    pub fn record_init_c(&mut self, clause: Clause, partition: PartitionId, origin_body: Vec<Literal>) -> VertexId {
        let v = self
            .record(Rule::LoopInitC, &[], clause, partition)
            .expect("init-c takes no edges");
        self.vertices[v].origin_body = Some(origin_body);
        v
    }

    /// A loop-it-sub application: an edge from the subsumer into an existing
    /// init-c vertex, no new vertex.
    pub fn record_sub(&mut self, subsumer: VertexId, init_c: VertexId) {
        self.add_edge(subsumer, init_c, Rule::LoopSub, 1);
    }

    fn add_edge(&mut self, from: VertexId, to: VertexId, rule: Rule, slot: u8) {
        self.incoming[to].push(self.edges.len());
        self.edges.push(Edge { from, to, rule, slot });
    }

    /// Mark `v` as the empty-clause vertex. Only the first call counts.
    pub fn set_empty(&mut self, v: VertexId) {
        if self.empty.is_none() {
            self.empty = Some(v);
        }
    }

    /// Vertices from which `target` is reachable (including `target`).
    pub fn backward_reachable(&self, target: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut work = vec![target];
        seen[target] = true;
        while let Some(v) = work.pop() {
            for e in self.incoming(v) {
                if !seen[e.from] {
                    seen[e.from] = true;
                    work.push(e.from);
                }
            }
        }
        seen
    }

    /// Backward-reachable set from the empty-clause vertex.
    pub fn core_vertices(&self) -> Result<Vec<bool>, GraphError> {
        let empty = self.empty.ok_or(GraphError::NoEmptyClause)?;
        Ok(self.backward_reachable(empty))
    }

    /// Indices of the starting clauses labeling some main-partition vertex
    /// that reaches the empty clause.
    pub fn extract_core_snf(&self) -> Result<BTreeSet<usize>, GraphError> {
        let reach = self.core_vertices()?;
        let starting: HashMap<&Clause, usize> = self
            .vertices
            .iter()
            .filter_map(|v| v.starting.map(|i| (&v.clause, i)))
            .collect();
        let mut core = BTreeSet::new();
        for v in &self.vertices {
            if !reach[v.id] || !v.partition.is_main() {
                continue;
            }
            if let Some(i) = v.starting {
                core.insert(i);
            } else if let Some(&i) = starting.get(&v.clause) {
                core.insert(i);
            }
        }
        Ok(core)
    }

    /// One `from rule to` line per edge.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.from, e.rule, e.to);
        }
        out
    }

    /// Graphviz rendering with one cluster per partition. Vertices and edges
    /// reaching the empty clause are drawn blue and dashed.
    pub fn to_dot(&self, atoms: &AtomTable) -> String {
        let reach = self.core_vertices().ok();
        let in_core = |v: VertexId| reach.as_ref().is_some_and(|r| r[v]);
        let mut out = String::from("digraph resolution {\n");
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
        for (k, p) in self.partitions().into_iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{k} {{");
            let _ = writeln!(out, "    label=\"{p}\";");
            if !p.is_main() {
                out.push_str("    style=filled; color=lightgrey;\n");
            }
            for v in self.vertices.iter().filter(|v| v.partition == p) {
                let mut label = v.clause.label(atoms).to_string();
                if let Some(i) = v.starting {
                    let _ = write!(label, " [C{i}]");
                }
                let _ = write!(out, "    v{} [label=\"{}: {}\"", v.id, v.id, escape(&label));
                if in_core(v.id) {
                    out.push_str(", color=blue, style=dashed");
                }
                out.push_str("];\n");
            }
            out.push_str("  }\n");
        }
        for e in &self.edges {
            let _ = write!(out, "  v{} -> v{} [label=\"{}\"", e.from, e.to, e.rule);
            if in_core(e.from) && in_core(e.to) {
                out.push_str(", color=blue, style=dashed");
            }
            out.push_str("];\n");
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
