//! Explicit-state satisfiability check for SNF clause sets.
//!
//! A clause set induces a transition system over valuations: vertices
//! satisfy the invariants, edges satisfy the step clauses, and initial
//! vertices satisfy the initial clauses. The check extends the atoms with one
//! waitfor proposition per eventuality literal and then prunes the system
//! until it either loses all initial vertices (unsat) or stabilizes (sat).

use std::collections::HashMap;

use thiserror::Error;

use crate::engine::Verdict;
use crate::snf::{AtomId, Clause, Literal, SnfProblem};

pub const DEFAULT_MAX_ATOMS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("problem needs {needed} propositions (waitfor ones included), bound is {bound}")]
    TooManyAtoms { needed: usize, bound: usize },
}

/// A disjunction of literals over valuation bits.
#[derive(Clone, Copy, Debug, Default)]
struct Disj {
    pos: u32,
    neg: u32,
}

impl Disj {
    fn holds(self, v: u32) -> bool {
        v & self.pos != 0 || !v & self.neg != 0
    }

    fn add(&mut self, bit: u32, positive: bool) {
        if positive {
            self.pos |= 1 << bit;
        } else {
            self.neg |= 1 << bit;
        }
    }
}

/// One eventuality clause `G(P | F l)` with its waitfor bit.
#[derive(Clone, Copy, Debug)]
struct Event {
    body: Disj,
    l: Disj,
    w: u32,
}

/// Transition system over valuations `0..2^bits`.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    bits: u32,
    alive: Vec<bool>,
    initial: Vec<bool>,
    succ: Vec<Vec<u32>>,
}

impl TransitionSystem {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.alive.len() as u32).filter(|&v| self.alive[v as usize])
    }

    pub fn initial(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices().filter(|&v| self.initial[v as usize])
    }

    pub fn successors(&self, v: u32) -> &[u32] {
        &self.succ[v as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().map(|v| self.succ[v as usize].len()).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().count()
    }

    pub fn has_initial(&self) -> bool {
        self.initial().next().is_some()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.alive.get(v as usize).copied().unwrap_or(false)
    }

    fn retain_vertices(&mut self, keep: impl Fn(u32) -> bool) {
        for v in 0..self.alive.len() as u32 {
            if self.alive[v as usize] && !keep(v) {
                self.alive[v as usize] = false;
                self.succ[v as usize].clear();
            }
        }
        self.drop_dead_edges();
    }

    fn retain_edges(&mut self, keep: impl Fn(u32, u32) -> bool) {
        for v in 0..self.alive.len() as u32 {
            self.succ[v as usize].retain(|&t| keep(v, t));
        }
    }

    fn drop_dead_edges(&mut self) {
        let alive = &self.alive;
        for s in &mut self.succ {
            s.retain(|&t| alive[t as usize]);
        }
    }

    fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut pred = vec![Vec::new(); self.alive.len()];
        for v in self.vertices() {
            for &t in &self.succ[v as usize] {
                pred[t as usize].push(v);
            }
        }
        pred
    }

    /// Remove vertices that do not start an infinite path.
    pub fn prune_infinite(&mut self) {
        self.drop_dead_edges();
        let pred = self.predecessors();
        let mut count: Vec<usize> = self.succ.iter().map(Vec::len).collect();
        let mut work: Vec<u32> = self.vertices().filter(|&v| count[v as usize] == 0).collect();
        while let Some(v) = work.pop() {
            if !self.alive[v as usize] {
                continue;
            }
            self.alive[v as usize] = false;
            for &p in &pred[v as usize] {
                if self.alive[p as usize] {
                    count[p as usize] -= 1;
                    if count[p as usize] == 0 {
                        work.push(p);
                    }
                }
            }
        }
        self.drop_dead_edges();
        for v in 0..self.alive.len() {
            if !self.alive[v] {
                self.succ[v].clear();
            }
        }
    }

    /// Vertices from which some vertex in `target` is reachable in zero or
    /// more steps.
    fn can_reach(&self, target: impl Fn(u32) -> bool) -> Vec<bool> {
        let pred = self.predecessors();
        let mut seen = vec![false; self.alive.len()];
        let mut work: Vec<u32> = self.vertices().filter(|&v| target(v)).collect();
        for &v in &work {
            seen[v as usize] = true;
        }
        while let Some(v) = work.pop() {
            for &p in &pred[v as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    work.push(p);
                }
            }
        }
        seen
    }

    fn size(&self) -> (usize, usize) {
        (self.vertex_count(), self.edge_count())
    }
}

/// The valuation encoding of a problem: input atoms first, then one waitfor
/// bit per distinct eventuality literal.
struct Encoding {
    bit: HashMap<AtomId, u32>,
    bits: u32,
    events: Vec<Event>,
}

impl Encoding {
    fn new(problem: &SnfProblem, max_atoms: usize) -> Result<Encoding, OracleError> {
        let mut bit = HashMap::new();
        let mut order: Vec<AtomId> = problem.clauses.iter().flat_map(Clause::atoms).collect();
        order.sort();
        order.dedup();
        for a in order {
            let next = bit.len() as u32;
            bit.insert(a, next);
        }
        let literals = problem.eventuality_literals();
        let needed = bit.len() + literals.len();
        if needed > max_atoms.min(31) {
            return Err(OracleError::TooManyAtoms {
                needed,
                bound: max_atoms,
            });
        }
        let mut enc = Encoding {
            bits: needed as u32,
            bit,
            events: Vec::new(),
        };
        let base = enc.bit.len() as u32;
        for c in problem.clauses.iter().filter(|c| c.is_eventuality()) {
            let l = c.ev().expect("eventuality");
            let k = literals.iter().position(|&m| m == l).expect("listed");
            enc.events.push(Event {
                body: enc.disj(c.now()),
                l: enc.disj(&[l]),
                w: base + k as u32,
            });
        }
        Ok(enc)
    }

    fn disj(&self, lits: &[Literal]) -> Disj {
        let mut d = Disj::default();
        for l in lits {
            d.add(self.bit[&l.atom()], l.is_positive());
        }
        d
    }
}

fn induced(problem: &SnfProblem, enc: &Encoding) -> TransitionSystem {
    let mut invariants = Vec::new();
    let mut steps = Vec::new();
    let mut initials = Vec::new();
    for c in &problem.clauses {
        if c.is_initial() {
            initials.push(enc.disj(c.now()));
        } else if c.is_invariant() {
            invariants.push(enc.disj(c.now()));
        } else if c.is_step() {
            steps.push((enc.disj(c.now()), enc.disj(c.next())));
        }
    }
    let n = 1usize << enc.bits;
    let alive: Vec<bool> = (0..n as u32).map(|v| invariants.iter().all(|d| d.holds(v))).collect();
    let initial = (0..n as u32)
        .map(|v| alive[v as usize] && initials.iter().all(|d| d.holds(v)))
        .collect();
    let vertices: Vec<u32> = (0..n as u32).filter(|&v| alive[v as usize]).collect();
    let mut succ = vec![Vec::new(); n];
    for &u in &vertices {
        let pending: Vec<Disj> = steps
            .iter()
            .filter(|(now, _)| !now.holds(u))
            .map(|&(_, next)| next)
            .collect();
        succ[u as usize] = vertices
            .iter()
            .copied()
            .filter(|&t| pending.iter().all(|d| d.holds(t)))
            .collect();
    }
    TransitionSystem {
        bits: enc.bits,
        alive,
        initial,
        succ,
    }
}

/// The transition system induced by the problem's clauses over its own
/// atoms (no waitfor bits; eventuality clauses ignored).
pub fn induced_ts(problem: &SnfProblem, max_atoms: usize) -> Result<TransitionSystem, OracleError> {
    let mut plain = problem.clone();
    plain.clauses.retain(|c| !c.is_eventuality());
    let enc = Encoding::new(&plain, max_atoms)?;
    Ok(induced(&plain, &enc))
}

/// Restrict to the waitfor semantics of every eventuality clause.
fn augment(ts: &mut TransitionSystem, events: &[Event]) {
    for e in events {
        let (body, l, w) = (e.body, e.l, 1u32 << e.w);
        ts.retain_vertices(|v| body.holds(v) || l.holds(v) || v & w != 0);
        ts.retain_edges(|u, t| u & w == 0 || l.holds(t) || t & w != 0);
    }
}

/// Decide satisfiability by pruning the induced transition system.
pub fn check_sat(problem: &SnfProblem, max_atoms: usize) -> Result<Verdict, OracleError> {
    let enc = Encoding::new(problem, max_atoms)?;
    if problem.clauses.iter().any(Clause::is_empty_clause) {
        return Ok(Verdict::Unsat);
    }
    let mut ts = induced(problem, &enc);
    ts.prune_infinite();
    if !ts.has_initial() {
        return Ok(Verdict::Unsat);
    }
    augment(&mut ts, &enc.events);
    ts.prune_infinite();
    if !ts.has_initial() {
        return Ok(Verdict::Unsat);
    }
    loop {
        let before = ts.size();
        for e in &enc.events {
            let (body, l, w) = (e.body, e.l, 1u32 << e.w);
            let reach = ts.can_reach(|v| l.holds(v));
            let good: Vec<bool> = (0..ts.alive.len() as u32)
                .map(|v| ts.successors(v).iter().any(|&t| reach[t as usize]))
                .collect();
            if ts.vertices().all(|v| good[v as usize]) {
                continue;
            }
            ts.retain_vertices(|v| body.holds(v) || l.holds(v) || good[v as usize]);
            ts.retain_edges(|u, t| u & w == 0 || l.holds(t) || good[t as usize]);
            ts.prune_infinite();
            if !ts.has_initial() {
                return Ok(Verdict::Unsat);
            }
        }
        if ts.size() == before {
            return Ok(Verdict::Sat);
        }
    }
}

/// A second decision procedure: the waitfor-augmented system is searched
/// for a reachable strongly connected component that is a proper cycle and
/// meets `l | ~w_l` for every eventuality literal.
pub fn check_fair_cycle(problem: &SnfProblem, max_atoms: usize) -> Result<Verdict, OracleError> {
    let enc = Encoding::new(problem, max_atoms)?;
    if problem.clauses.iter().any(Clause::is_empty_clause) {
        return Ok(Verdict::Unsat);
    }
    let mut ts = induced(problem, &enc);
    augment(&mut ts, &enc.events);

    let n = ts.alive.len();
    let mut reachable = vec![false; n];
    let mut work: Vec<u32> = ts.initial().collect();
    for &v in &work {
        reachable[v as usize] = true;
    }
    while let Some(v) = work.pop() {
        for &t in ts.successors(v) {
            if !reachable[t as usize] {
                reachable[t as usize] = true;
                work.push(t);
            }
        }
    }
    ts.retain_vertices(|v| reachable[v as usize]);

    let fair: Vec<(Disj, u32)> = enc.events.iter().map(|e| (e.l, 1u32 << e.w)).collect();
    for scc in strongly_connected(&ts) {
        let cyclic = scc.len() > 1 || ts.successors(scc[0]).contains(&scc[0]);
        let meets_all = fair.iter().all(|&(l, w)| scc.iter().any(|&v| l.holds(v) || v & w == 0));
        if cyclic && meets_all {
            return Ok(Verdict::Sat);
        }
    }
    Ok(Verdict::Unsat)
}

/// Kosaraju's algorithm with explicit stacks.
fn strongly_connected(ts: &TransitionSystem) -> Vec<Vec<u32>> {
    let n = ts.alive.len();
    let mut visited = vec![false; n];
    let mut order = Vec::new();
    for root in ts.vertices() {
        if visited[root as usize] {
            continue;
        }
        visited[root as usize] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((v, i)) = stack.pop() {
            let succ = ts.successors(v);
            if i < succ.len() {
                stack.push((v, i + 1));
                let t = succ[i];
                if !visited[t as usize] {
                    visited[t as usize] = true;
                    stack.push((t, 0));
                }
            } else {
                order.push(v);
            }
        }
    }
    let pred = ts.predecessors();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for &root in order.iter().rev() {
        if assigned[root as usize] {
            continue;
        }
        assigned[root as usize] = true;
        let mut comp = vec![root];
        let mut work = vec![root];
        while let Some(v) = work.pop() {
            for &p in &pred[v as usize] {
                if !assigned[p as usize] {
                    assigned[p as usize] = true;
                    comp.push(p);
                    work.push(p);
                }
            }
        }
        out.push(comp);
    }
    out
}
