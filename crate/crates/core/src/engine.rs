//! Temporal resolution: saturation of the main partition, augmentation
//! with waitfor propositions, and breadth-first loop search, with every
//! retained inference reported to a [`ResolutionGraph`].
//!
//! By default inferences are ordered: a clause is resolved only on literals
//! of its largest atom, taken from the X part when that is non-empty. Input
//! atoms rank lowest, then subformula propositions (a parent above its
//! subformulas), then waitfor propositions.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::proofgraph::{PartitionId, ResolutionGraph, Rule, VertexId};
use crate::snf::{is_subset, AtomId, AtomOrigin, AtomTable, Clause, ClauseKind, Literal, SnfProblem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Discard tautological conclusions before they get a vertex.
    pub tautology_deletion: bool,
    /// Forward and backward subsumption within a partition.
    pub subsumption: bool,
    /// Record the resolution graph. Without it no core can be extracted.
    pub record_graph: bool,
    /// Maximum number of generated conclusions.
    pub step_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Resolve only on maximal literals. Without it saturation is exhaustive.
    pub ordered: bool,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            tautology_deletion: true,
            subsumption: true,
            record_graph: true,
            step_limit: None,
            time_limit: None,
            ordered: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
    ResourceLimit,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::ResourceLimit => "resource-limit",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Retained applications per rule (loop-it-sub counts recorded edges).
    pub rule_counts: BTreeMap<Rule, u64>,
    pub loop_searches: usize,
    /// Number of iterations of each loop search, in order.
    pub loop_iterations: Vec<usize>,
    pub wall: Duration,
    /// Largest number of simultaneously active clauses.
    pub peak_clauses: usize,
    /// Conclusions generated, retained or not.
    pub steps: u64,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub verdict: Verdict,
    pub graph: Option<ResolutionGraph>,
    pub stats: Stats,
    /// The problem's atoms plus the waitfor propositions added by augmentation.
    pub atoms: AtomTable,
}

impl SolverResult {
    /// Indices of the starting clauses in the unsatisfiable core, if the
    /// verdict is unsat and the graph was recorded.
    pub fn core(&self) -> Option<BTreeSet<usize>> {
        self.graph.as_ref()?.extract_core_snf().ok()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("{0}: premise kinds do not fit the rule")]
    Kinds(Rule),
    #[error("{0}: pivot not found in the required positions")]
    Pivot(Rule),
}

fn without(lits: &[Literal], l: Literal) -> impl Iterator<Item = Literal> + '_ {
    lits.iter().copied().filter(move |&m| m != l)
}

fn contains(lits: &[Literal], l: Literal) -> bool {
    lits.binary_search(&l).is_ok()
}

fn max_rank(rank: &[u32], lits: &[Literal]) -> Option<u32> {
    lits.iter().map(|l| rank[l.atom().0 as usize]).max()
}

/// `l` has the largest atom of `lits` under `rank`.
fn is_max(rank: &[u32], lits: &[Literal], l: Literal) -> bool {
    max_rank(rank, lits) == Some(rank[l.atom().0 as usize])
}

/// Index key of a literal: its code, doubled, with the low bit set under X.
fn key(l: Literal, next: bool) -> u32 {
    l.code() << 1 | next as u32
}

/// Key of the empty clause, which has no literal to index.
const EMPTY_KEY: u32 = u32::MAX;

fn keys(c: &Clause) -> impl Iterator<Item = u32> + '_ {
    let now = c.now().iter().map(|&l| key(l, false));
    now.chain(c.next().iter().map(|&l| key(l, true)))
}

/// Keys of the literals an ordered inference may resolve on.
fn pivot_keys(rank: &[u32], c: &Clause) -> Vec<u32> {
    let (lits, next) = match c.kind() {
        ClauseKind::Eventuality => return Vec::new(),
        ClauseKind::Global if !c.next().is_empty() => (c.next(), true),
        _ => (c.now(), false),
    };
    let Some(max) = max_rank(rank, lits) else {
        return Vec::new();
    };
    lits.iter()
        .filter(|l| rank[l.atom().0 as usize] == max)
        .map(|&l| key(l, next))
        .collect()
}

fn check(rule: Rule, kinds: bool, pivot: bool) -> Result<(), RuleError> {
    if !kinds {
        Err(RuleError::Kinds(rule))
    } else if !pivot {
        Err(RuleError::Pivot(rule))
    } else {
        Ok(())
    }
}

/// `I(P | l)`, `I(Q | ~l)` gives `I(P | Q)`.
pub fn resolve_init_ii(c1: &Clause, c2: &Clause, pivot: Literal) -> Result<Clause, RuleError> {
    check(
        Rule::InitII,
        c1.is_initial() && c2.is_initial(),
        contains(c1.now(), pivot) && contains(c2.now(), pivot.complement()),
    )?;
    Ok(now_resolvent(ClauseKind::Initial, c1, c2, pivot))
}

/// `I(P | l)`, `G(Q | ~l)` gives `I(P | Q)`.
pub fn resolve_init_in(c1: &Clause, c2: &Clause, pivot: Literal) -> Result<Clause, RuleError> {
    check(
        Rule::InitIN,
        c1.is_initial() && c2.is_invariant(),
        contains(c1.now(), pivot) && contains(c2.now(), pivot.complement()),
    )?;
    Ok(now_resolvent(ClauseKind::Initial, c1, c2, pivot))
}

/// `G(P | l)`, `G(Q | ~l)` gives `G(P | Q)`.
pub fn resolve_step_nn(c1: &Clause, c2: &Clause, pivot: Literal) -> Result<Clause, RuleError> {
    check(
        Rule::StepNN,
        c1.is_invariant() && c2.is_invariant(),
        contains(c1.now(), pivot) && contains(c2.now(), pivot.complement()),
    )?;
    Ok(now_resolvent(ClauseKind::Global, c1, c2, pivot))
}

/// `G(P | l)`, `G(Q | X(~l | R))` gives `G(Q | X(P | R))`.
pub fn resolve_step_nx(c1: &Clause, c2: &Clause, pivot: Literal) -> Result<Clause, RuleError> {
    check(
        Rule::StepNX,
        c1.is_invariant() && c2.is_step(),
        contains(c1.now(), pivot) && contains(c2.next(), pivot.complement()),
    )?;
    Ok(nx_resolvent(c1, c2, pivot))
}

/// `G(P | X(Q | l))`, `G(R | X(~l | S))` gives `G(P | R | X(Q | S))`.
pub fn resolve_step_xx(c1: &Clause, c2: &Clause, pivot: Literal) -> Result<Clause, RuleError> {
    check(
        Rule::StepXX,
        c1.is_step() && c2.is_step(),
        contains(c1.next(), pivot) && contains(c2.next(), pivot.complement()),
    )?;
    Ok(xx_resolvent(c1, c2, pivot))
}

fn now_resolvent(kind: ClauseKind, c1: &Clause, c2: &Clause, pivot: Literal) -> Clause {
    let lits = without(c1.now(), pivot).chain(without(c2.now(), pivot.complement()));
    match kind {
        ClauseKind::Initial => Clause::initial(lits),
        _ => Clause::global(lits, []),
    }
}

fn nx_resolvent(c1: &Clause, c2: &Clause, pivot: Literal) -> Clause {
    Clause::global(
        c2.now().iter().copied(),
        without(c1.now(), pivot).chain(without(c2.next(), pivot.complement())),
    )
}

fn xx_resolvent(c1: &Clause, c2: &Clause, pivot: Literal) -> Clause {
    Clause::global(
        c1.now().iter().chain(c2.now()).copied(),
        without(c1.next(), pivot).chain(without(c2.next(), pivot.complement())),
    )
}

/// `s` makes `c` redundant: same or stronger clause of a compatible kind.
fn subsumes(s: &Clause, c: &Clause) -> bool {
    match (s.kind(), c.kind()) {
        (ClauseKind::Eventuality, _) | (_, ClauseKind::Eventuality) => false,
        (ClauseKind::Initial, ClauseKind::Initial) => is_subset(s.now(), c.now()),
        (ClauseKind::Global, ClauseKind::Initial) => s.is_invariant() && is_subset(s.now(), c.now()),
        (ClauseKind::Global, ClauseKind::Global) => is_subset(s.now(), c.now()) && is_subset(s.next(), c.next()),
        (ClauseKind::Initial, ClauseKind::Global) => false,
    }
}

/// Bloom-style literal signatures for cheap rejection of pairs.
#[derive(Clone, Copy, Default)]
struct Sig {
    now: u64,
    now_c: u64,
    next: u64,
    next_c: u64,
}

impl Sig {
    fn of(c: &Clause) -> Sig {
        let bits = |lits: &[Literal], flip: bool| {
            lits.iter().fold(0u64, |acc, l| {
                let l = if flip { l.complement() } else { *l };
                acc | 1 << (l.code() & 63)
            })
        };
        Sig {
            now: bits(c.now(), false),
            now_c: bits(c.now(), true),
            next: bits(c.next(), false),
            next_c: bits(c.next(), true),
        }
    }

    fn may_subsume(self, other: Sig) -> bool {
        self.now & !other.now == 0 && self.next & !other.next == 0
    }
}

type ClauseId = usize;

struct Entry {
    clause: Clause,
    sig: Sig,
    active: bool,
    vertex: Option<VertexId>,
    init_c_body: Option<Vec<Literal>>,
}

#[derive(Default)]
struct Part {
    /// Every clause ever created here, active or not.
    seen: HashMap<Clause, ClauseId>,
    members: Vec<ClauseId>,
    /// Clauses by their first key; a subsumer's first key occurs in what it subsumes.
    first: HashMap<u32, Vec<ClauseId>>,
    /// Clauses by every key, for backward subsumption.
    occurs: HashMap<u32, Vec<ClauseId>>,
    processed: Vec<ClauseId>,
    /// Processed clauses by pivot key, for ordered partner lookup.
    pivots: HashMap<u32, Vec<ClauseId>>,
    queue: VecDeque<ClauseId>,
    active: usize,
}

enum Stop {
    Empty,
    Limit,
}

struct Solver<'a> {
    config: &'a SolverConfig,
    db: Vec<Entry>,
    main: Part,
    lp: Part,
    lp_id: PartitionId,
    atoms: AtomTable,
    graph: Option<ResolutionGraph>,
    stats: Stats,
    start: Instant,
    waitfor: HashMap<Literal, Literal>,
    /// Atom precedence for ordered inferences.
    rank: Vec<u32>,
}

/// Run temporal resolution on `problem`.
pub fn solve(problem: &SnfProblem, config: &SolverConfig) -> SolverResult {
    let mut s = Solver {
        config,
        db: Vec::new(),
        main: Part::default(),
        lp: Part::default(),
        lp_id: PartitionId::Main,
        atoms: problem.atoms.clone(),
        graph: config.record_graph.then(ResolutionGraph::new),
        stats: Stats::default(),
        start: Instant::now(),
        waitfor: HashMap::new(),
        rank: Vec::new(),
    };
    s.rank = (0..s.atoms.len()).map(|i| s.atom_rank(AtomId(i as u32))).collect();
    let verdict = match s.run(&problem.clauses) {
        Ok(()) => Verdict::Sat,
        Err(Stop::Empty) => Verdict::Unsat,
        Err(Stop::Limit) => Verdict::ResourceLimit,
    };
    s.stats.wall = s.start.elapsed();
    SolverResult {
        verdict,
        graph: s.graph,
        stats: s.stats,
        atoms: s.atoms,
    }
}

impl Solver<'_> {
    fn run(&mut self, clauses: &[Clause]) -> Result<(), Stop> {
        let events = self.add_starting(clauses)?;
        self.saturate(PartitionId::Main)?;
        self.augment(&events)?;
        self.saturate(PartitionId::Main)?;
        loop {
            let before = self.main.seen.len();
            for &ev in &events {
                if let Some(bodies) = self.loop_search(ev)? {
                    self.conclude(ev, &bodies)?;
                    self.saturate(PartitionId::Main)?;
                }
            }
            if self.main.seen.len() == before {
                return Ok(());
            }
        }
    }

    /// Give every starting clause a vertex; returns the eventuality clauses.
    fn add_starting(&mut self, clauses: &[Clause]) -> Result<Vec<ClauseId>, Stop> {
        let mut events = Vec::new();
        let mut empty = None;
        for (i, c) in clauses.iter().enumerate() {
            let vertex = self.graph.as_mut().map(|g| g.add_starting(c.clone(), i));
            if c.is_empty_clause() && empty.is_none() {
                empty = Some(vertex);
            }
            let id = self.db.len();
            let dup = self.main.seen.contains_key(c);
            let redundant = dup
                || (self.config.tautology_deletion && c.is_tautology())
                || (self.config.subsumption && self.forward_subsumed(PartitionId::Main, c));
            self.db.push(Entry {
                clause: c.clone(),
                sig: Sig::of(c),
                active: !redundant,
                vertex,
                init_c_body: None,
            });
            if !dup {
                self.main.seen.insert(c.clone(), id);
            }
            self.main.members.push(id);
            if c.is_eventuality() {
                events.push(id);
            }
            if !redundant {
                self.activate(PartitionId::Main, id);
            }
        }
        if let Some(v) = empty {
            if let (Some(g), Some(v)) = (self.graph.as_mut(), v) {
                g.set_empty(v);
            }
            return Err(Stop::Empty);
        }
        Ok(events)
    }

    fn part(&mut self, pid: PartitionId) -> &mut Part {
        if pid.is_main() {
            &mut self.main
        } else {
            &mut self.lp
        }
    }

    fn part_ref(&self, pid: PartitionId) -> &Part {
        if pid.is_main() {
            &self.main
        } else {
            &self.lp
        }
    }

    fn forward_subsumed(&self, pid: PartitionId, c: &Clause) -> bool {
        let sig = Sig::of(c);
        let part = self.part_ref(pid);
        keys(c).chain([EMPTY_KEY]).any(|k| {
            part.first.get(&k).is_some_and(|ids| {
                ids.iter().any(|&m| {
                    let e = &self.db[m];
                    e.active && e.sig.may_subsume(sig) && subsumes(&e.clause, c)
                })
            })
        })
    }

    /// Add `id` to the subsumption indexes of `pid`.
    fn index(&mut self, pid: PartitionId, id: ClauseId) {
        let clause = &self.db[id].clause;
        if clause.is_eventuality() {
            return;
        }
        let all: Vec<u32> = keys(clause).collect();
        let part = if pid.is_main() { &mut self.main } else { &mut self.lp };
        part.first
            .entry(all.first().copied().unwrap_or(EMPTY_KEY))
            .or_default()
            .push(id);
        for k in all {
            part.occurs.entry(k).or_default().push(id);
        }
    }

    /// Mark `id` active, deactivate what it subsumes, and queue it.
    fn activate(&mut self, pid: PartitionId, id: ClauseId) {
        if self.config.subsumption && !self.db[id].clause.is_eventuality() {
            let sig = self.db[id].sig;
            let db = &mut self.db;
            let part = if pid.is_main() { &mut self.main } else { &mut self.lp };
            // Anything subsumed contains every key of the subsumer; scan the rarest.
            let rarest = keys(&db[id].clause).min_by_key(|k| part.occurs.get(k).map_or(0, Vec::len));
            let candidates: Vec<ClauseId> = match rarest {
                Some(k) => part.occurs.get_mut(&k).map_or_else(Vec::new, |ids| {
                    ids.retain(|&m| db[m].active);
                    ids.clone()
                }),
                None => part.members.clone(),
            };
            let mut dropped = 0;
            for m in candidates {
                let e = &db[m];
                if m != id && e.active && sig.may_subsume(e.sig) && subsumes(&db[id].clause, &e.clause) {
                    db[m].active = false;
                    dropped += 1;
                }
            }
            part.active -= dropped;
        }
        self.index(pid, id);
        self.db[id].active = true;
        let part = self.part(pid);
        part.active += 1;
        if !self.db[id].clause.is_eventuality() {
            self.part(pid).queue.push_back(id);
        }
        let total = self.main.active + if self.lp_id.is_main() { 0 } else { self.lp.active };
        self.stats.peak_clauses = self.stats.peak_clauses.max(total);
    }

    fn check_limits(&self) -> Result<(), Stop> {
        if self.config.step_limit.is_some_and(|n| self.stats.steps > n) {
            return Err(Stop::Limit);
        }
        if self.config.time_limit.is_some_and(|t| self.start.elapsed() > t) {
            return Err(Stop::Limit);
        }
        Ok(())
    }

    /// Add a conclusion of `rule` to partition `pid`. `premises` are the
    /// clauses that get an edge. Returns the new clause id, or `None` if the
    /// conclusion was redundant and discarded.
    fn insert(
        &mut self,
        pid: PartitionId,
        rule: Rule,
        premises: &[ClauseId],
        clause: Clause,
        init_c_body: Option<Vec<Literal>>,
    ) -> Result<Option<ClauseId>, Stop> {
        self.stats.steps += 1;
        self.check_limits()?;
        let edges: Vec<VertexId> = premises.iter().filter_map(|&p| self.db[p].vertex).collect();
        if pid.is_main() && clause.is_empty_clause() {
            if let Some(g) = self.graph.as_mut() {
                let v = g.record(rule, &edges, clause, pid).expect("edge pattern");
                g.set_empty(v);
            }
            *self.stats.rule_counts.entry(rule).or_default() += 1;
            return Err(Stop::Empty);
        }
        let keep = init_c_body.is_some();
        let taut = self.config.tautology_deletion && clause.is_tautology();
        let dup = self.part_ref(pid).seen.contains_key(&clause);
        if (taut || dup) && !keep {
            return Ok(None);
        }
        let subsumed = self.config.subsumption && !taut && !dup && self.forward_subsumed(pid, &clause);
        if subsumed && !keep {
            return Ok(None);
        }
        let vertex = self.graph.as_mut().map(|g| match &init_c_body {
            Some(body) => g.record_init_c(clause.clone(), pid, body.clone()),
            None => g.record(rule, &edges, clause.clone(), pid).expect("edge pattern"),
        });
        *self.stats.rule_counts.entry(rule).or_default() += 1;
        let id = self.db.len();
        self.db.push(Entry {
            sig: Sig::of(&clause),
            clause: clause.clone(),
            active: false,
            vertex,
            init_c_body,
        });
        let part = self.part(pid);
        if !dup {
            part.seen.insert(clause, id);
        }
        part.members.push(id);
        if !(taut || dup || subsumed) {
            self.activate(pid, id);
        }
        Ok(Some(id))
    }

    /// Given-clause loop over `pid`. Loop partitions use step-xx only.
    fn saturate(&mut self, pid: PartitionId) -> Result<(), Stop> {
        let xx_only = !pid.is_main();
        while let Some(g) = self.part(pid).queue.pop_front() {
            if !self.db[g].active {
                continue;
            }
            self.check_limits()?;
            let partners = self.partners(pid, g);
            for p in partners {
                if !self.db[g].active {
                    break;
                }
                if !self.db[p].active {
                    continue;
                }
                for (rule, c1, c2, clause) in self.resolvents(g, p, xx_only) {
                    self.insert(pid, rule, &[c1, c2], clause, None)?;
                }
            }
            if self.db[g].active {
                let db = &self.db;
                let part = if pid.is_main() { &mut self.main } else { &mut self.lp };
                if self.config.ordered {
                    for k in pivot_keys(&self.rank, &db[g].clause) {
                        part.pivots.entry(k).or_default().push(g);
                    }
                } else {
                    part.processed.retain(|&p| db[p].active);
                    part.processed.push(g);
                }
            }
        }
        Ok(())
    }

    /// Processed clauses that may resolve with `g`, oldest first.
    fn partners(&mut self, pid: PartitionId, g: ClauseId) -> Vec<ClauseId> {
        let db = &self.db;
        let part = if pid.is_main() { &mut self.main } else { &mut self.lp };
        if !self.config.ordered {
            return part.processed.clone();
        }
        let mut out = Vec::new();
        for k in pivot_keys(&self.rank, &db[g].clause) {
            let c = (k >> 1) ^ 1;
            for k in [c << 1, c << 1 | 1] {
                if let Some(ids) = part.pivots.get_mut(&k) {
                    ids.retain(|&p| db[p].active);
                    out.extend_from_slice(ids);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All conclusions between given clause `g` and partner `p`.
    fn resolvents(&self, g: ClauseId, p: ClauseId, xx_only: bool) -> Vec<(Rule, ClauseId, ClauseId, Clause)> {
        let (eg, ep) = (&self.db[g], &self.db[p]);
        let (cg, cp) = (&eg.clause, &ep.clause);
        let mut out = Vec::new();
        let class = |c: &Clause| match c.kind() {
            ClauseKind::Initial => 0,
            ClauseKind::Global if c.next().is_empty() => 1,
            ClauseKind::Global => 2,
            ClauseKind::Eventuality => 3,
        };
        // (rule, c1, c2, pivots from c1.now or c1.next, against c2.now or c2.next)
        let (rule, a, b, a_next, b_next) = match (class(cg), class(cp)) {
            (2, 2) => (Rule::StepXX, g, p, true, true),
            _ if xx_only => return out,
            (0, 0) => (Rule::InitII, g, p, false, false),
            (0, 1) => (Rule::InitIN, g, p, false, false),
            (1, 0) => (Rule::InitIN, p, g, false, false),
            (1, 1) => (Rule::StepNN, g, p, false, false),
            (1, 2) => (Rule::StepNX, g, p, false, true),
            (2, 1) => (Rule::StepNX, p, g, false, true),
            _ => return out,
        };
        let (ea, eb) = (&self.db[a], &self.db[b]);
        let sa = if a_next { ea.sig.next } else { ea.sig.now };
        let sb = if b_next { eb.sig.next_c } else { eb.sig.now_c };
        if sa & sb == 0 {
            return out;
        }
        let (c1, c2) = (&ea.clause, &eb.clause);
        let src = if a_next { c1.next() } else { c1.now() };
        let dst = if b_next { c2.next() } else { c2.now() };
        for &l in src {
            if !contains(dst, l.complement()) {
                continue;
            }
            if self.config.ordered && !(is_max(&self.rank, src, l) && is_max(&self.rank, dst, l.complement())) {
                continue;
            }
            let clause = match rule {
                Rule::InitII | Rule::InitIN => now_resolvent(ClauseKind::Initial, c1, c2, l),
                Rule::StepNN => now_resolvent(ClauseKind::Global, c1, c2, l),
                Rule::StepNX => nx_resolvent(c1, c2, l),
                _ => xx_resolvent(c1, c2, l),
            };
            out.push((rule, a, b, clause));
        }
        out
    }

    /// Input atoms lowest, then subformula propositions with parents above
    /// their subformulas, then waitfor atoms.
    fn atom_rank(&self, a: AtomId) -> u32 {
        let band = 1u32 << 30;
        match self.atoms.origin(a) {
            AtomOrigin::Input => a.0,
            AtomOrigin::Occurrence(_) => 2 * band - 1 - a.0,
            AtomOrigin::Waitfor(_) => 2 * band + a.0,
        }
    }

    fn waitfor_literal(&mut self, l: Literal) -> Literal {
        if let Some(&w) = self.waitfor.get(&l) {
            return w;
        }
        let base = format!(
            "w_{}{}",
            if l.is_positive() { "" } else { "not_" },
            self.atoms.name(l.atom())
        );
        let w = Literal::pos(self.atoms.fresh(&base, AtomOrigin::Waitfor(l)));
        let r = self.atom_rank(w.atom());
        self.rank.push(r);
        self.waitfor.insert(l, w);
        w
    }

    /// aug2 once per eventuality literal, then aug1 per eventuality clause.
    fn augment(&mut self, events: &[ClauseId]) -> Result<(), Stop> {
        for &ev in events {
            let l = self.db[ev].clause.ev().expect("eventuality");
            if self.waitfor.contains_key(&l) {
                continue;
            }
            let w = self.waitfor_literal(l);
            self.insert(
                PartitionId::Main,
                Rule::Aug2,
                &[],
                Clause::global([w.complement()], [l, w]),
                None,
            )?;
        }
        for &ev in events {
            let c = &self.db[ev].clause;
            let l = c.ev().expect("eventuality");
            let w = self.waitfor[&l];
            let body: Vec<Literal> = c.now().iter().copied().chain([l, w]).collect();
            self.insert(PartitionId::Main, Rule::Aug1, &[ev], Clause::global(body, []), None)?;
        }
        Ok(())
    }

    /// Breadth-first loop search for eventuality clause `ev`. On success
    /// returns the empty-X clauses of the final iteration.
    fn loop_search(&mut self, ev: ClauseId) -> Result<Option<Vec<ClauseId>>, Stop> {
        let search = self.stats.loop_searches;
        self.stats.loop_searches += 1;
        self.stats.loop_iterations.push(0);
        let l = self.db[ev].clause.ev().expect("eventuality");
        let mut previous: Vec<Vec<Literal>> = vec![Vec::new()];
        for iteration in 0.. {
            self.stats.loop_iterations[search] += 1;
            let pid = PartitionId::Loop { search, iteration };
            self.lp = Part::default();
            self.lp_id = pid;

            let main: Vec<ClauseId> = self
                .main
                .members
                .iter()
                .copied()
                .filter(|&m| self.db[m].active && self.db[m].clause.is_global())
                .collect();
            for m in main {
                let c = &self.db[m].clause;
                let (rule, copy) = if c.is_step() {
                    (Rule::LoopInitX, c.clone())
                } else {
                    (Rule::LoopInitN, Clause::global([], c.now().iter().copied()))
                };
                self.insert(pid, rule, &[m], copy, None)?;
            }
            for body in &previous {
                let next = body.iter().copied().chain([l]);
                self.insert(pid, Rule::LoopInitC, &[], Clause::global([], next), Some(body.clone()))?;
            }
            self.saturate(pid)?;

            let found_bodies: Vec<ClauseId> = self
                .lp
                .members
                .iter()
                .copied()
                .filter(|&m| self.db[m].active && self.db[m].clause.is_invariant())
                .collect();
            let mut witnesses = Vec::new();
            let found = self.lp.members.iter().all(|&m| {
                let Some(body) = &self.db[m].init_c_body else {
                    return true;
                };
                let hit = found_bodies
                    .iter()
                    .copied()
                    .find(|&p| is_subset(self.db[p].clause.now(), body));
                if let Some(p) = hit {
                    witnesses.push((p, m));
                }
                hit.is_some()
            });
            if found {
                for (p, m) in witnesses {
                    if let (Some(g), Some(vp), Some(vm)) = (self.graph.as_mut(), self.db[p].vertex, self.db[m].vertex) {
                        g.record_sub(vp, vm);
                    }
                    *self.stats.rule_counts.entry(Rule::LoopSub).or_default() += 1;
                }
            }
            self.lp_id = PartitionId::Main;
            self.lp.active = 0;
            if found {
                return Ok(Some(found_bodies));
            }
            if found_bodies.is_empty() {
                return Ok(None);
            }
            previous = found_bodies.iter().map(|&p| self.db[p].clause.now().to_vec()).collect();
        }
        unreachable!()
    }

    fn conclude(&mut self, ev: ClauseId, bodies: &[ClauseId]) -> Result<(), Stop> {
        let c = self.db[ev].clause.clone();
        let l = c.ev().expect("eventuality");
        let w = self.waitfor[&l];
        for &p in bodies {
            let body = self.db[p].clause.now().iter().chain(c.now()).copied().chain([l]);
            self.insert(
                PartitionId::Main,
                Rule::Conclusion1,
                &[p, ev],
                Clause::global(body, []),
                None,
            )?;
        }
        for &p in bodies {
            let next = self.db[p].clause.now().iter().copied().chain([l]);
            self.insert(
                PartitionId::Main,
                Rule::Conclusion2,
                &[p],
                Clause::global([w.complement()], next),
                None,
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snf::parse_snf;

    fn lits(p: &SnfProblem, s: &str) -> Clause {
        let q = parse_snf(s).unwrap();
        // re-express over p's atom ids
        let map = |l: &Literal| Literal::new(p.atoms.lookup(q.atoms.name(l.atom())).unwrap(), l.is_positive());
        let c = &q.clauses[0];
        match c.kind() {
            ClauseKind::Initial => Clause::initial(c.now().iter().map(map)),
            ClauseKind::Global => Clause::global(c.now().iter().map(map), c.next().iter().map(map)),
            ClauseKind::Eventuality => Clause::eventuality(c.now().iter().map(map), map(&c.ev().unwrap())),
        }
    }

    fn problem() -> SnfProblem {
        parse_snf("global: a | b | l | p | q | r | s").unwrap()
    }

    #[test]
    fn init_rules() {
        let p = problem();
        let [a, b, l] = ["a", "b", "l"].map(|n| Literal::pos(p.atoms.lookup(n).unwrap()));
        let c = resolve_init_ii(&Clause::initial([a]), &Clause::initial([a.complement()]), a).unwrap();
        assert!(c.is_empty_clause());
        let c = resolve_init_ii(&Clause::initial([a, l]), &Clause::initial([l.complement(), b]), l).unwrap();
        assert_eq!(c, Clause::initial([a, b]));
        let c = resolve_init_ii(&Clause::initial([a, l]), &Clause::initial([l.complement(), a]), l).unwrap();
        assert_eq!(c, Clause::initial([a]));
        let c = resolve_init_in(&Clause::initial([a, l]), &Clause::global([l.complement()], []), l).unwrap();
        assert_eq!(c, Clause::initial([a]));
        assert_eq!(
            resolve_init_ii(&Clause::initial([a]), &Clause::initial([b]), a),
            Err(RuleError::Pivot(Rule::InitII))
        );
        assert_eq!(
            resolve_init_in(&Clause::initial([a]), &Clause::initial([a.complement()]), a),
            Err(RuleError::Kinds(Rule::InitIN))
        );
        let c = resolve_step_nn(&Clause::global([a, l], []), &Clause::global([l.complement()], []), l).unwrap();
        assert_eq!(c, Clause::global([a], []));
    }

    #[test]
    fn step_nx_examples() {
        let p = problem();
        let c = resolve_step_nx(
            &lits(&p, "global: a | ~b"),
            &lits(&p, "global: a | b | X (a | b)"),
            Literal::neg(p.atoms.lookup("b").unwrap()),
        )
        .unwrap();
        assert_eq!(c, lits(&p, "global: a | b | X a"));
        let na = Literal::neg(p.atoms.lookup("a").unwrap());
        let c = resolve_step_nx(&lits(&p, "global: ~a"), &lits(&p, "global: a | b | X a"), na).unwrap();
        assert_eq!(c, lits(&p, "global: a | b"));
        assert!(c.is_invariant());
        let l = Literal::pos(p.atoms.lookup("l").unwrap());
        let c = resolve_step_nx(&lits(&p, "global: l"), &lits(&p, "global: X ~l"), l).unwrap();
        assert!(c.is_empty_clause());
        assert_eq!(
            resolve_step_nx(&lits(&p, "global: X l"), &lits(&p, "global: X ~l"), l),
            Err(RuleError::Kinds(Rule::StepNX))
        );
    }

    #[test]
    fn step_xx_examples() {
        let p = problem();
        let a = Literal::pos(p.atoms.lookup("a").unwrap());
        let c = resolve_step_xx(&lits(&p, "global: ~a | X a"), &lits(&p, "global: X ~a"), a).unwrap();
        assert_eq!(c, lits(&p, "global: ~a"));
        let c = resolve_step_xx(&lits(&p, "global: a | b | X a"), &lits(&p, "global: X ~a"), a).unwrap();
        assert_eq!(c, lits(&p, "global: a | b"));
        let c = resolve_step_xx(&lits(&p, "global: X a"), &lits(&p, "global: X ~a"), a).unwrap();
        assert!(c.is_empty_clause());
        let c = resolve_step_xx(
            &lits(&p, "global: p | X (q | l)"),
            &lits(&p, "global: r | X (~l | s)"),
            Literal::pos(p.atoms.lookup("l").unwrap()),
        )
        .unwrap();
        assert_eq!(c, lits(&p, "global: p | r | X (q | s)"));
    }

    #[test]
    fn subsumption_between_kinds() {
        let p = problem();
        assert!(subsumes(&lits(&p, "global: a"), &lits(&p, "global: a | b | X p")));
        assert!(subsumes(&lits(&p, "global: a"), &lits(&p, "initial: a | b")));
        assert!(subsumes(&lits(&p, "initial: a"), &lits(&p, "initial: a | b")));
        assert!(!subsumes(&lits(&p, "initial: a"), &lits(&p, "global: a | b")));
        assert!(!subsumes(&lits(&p, "global: X a"), &lits(&p, "global: a")));
        assert!(!subsumes(&lits(&p, "global: a | X b"), &lits(&p, "initial: a")));
        assert!(!subsumes(&lits(&p, "global: a"), &lits(&p, "eventually: a | F b")));
    }

    fn run(text: &str, config: &SolverConfig) -> SolverResult {
        solve(&parse_snf(text).unwrap(), config)
    }

    const TWO_LOOPS: &str = "global: a | ~b\n\
                        global: a | b | X (a | b)\n\
                        global: ~a | X a\n\
                        eventually: ~a | F ~a\n";

    #[test]
    fn two_loops_is_unsat_with_full_core() {
        let r = run(TWO_LOOPS, &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.core(), Some(BTreeSet::from([0, 1, 2, 3])));
    }

    #[test]
    fn two_loops_graph_without_redundancy_elimination() {
        let config = SolverConfig {
            tautology_deletion: false,
            subsumption: false,
            ..SolverConfig::default()
        };
        let r = run(TWO_LOOPS, &config);
        assert_eq!(r.verdict, Verdict::Unsat);
        let g = r.graph.as_ref().unwrap();
        let labels: Vec<(String, PartitionId, Option<Rule>)> = g
            .vertices()
            .iter()
            .map(|v| (v.clause.label(&r.atoms).to_string(), v.partition, v.rule))
            .collect();
        let has = |label: &str, rule: Rule| labels.iter().any(|(l, _, r)| l == label && *r == Some(rule));
        assert!(has("G(a | b | X a)", Rule::StepNX), "{labels:?}");
        assert!(has("G(~a | w_not_a)", Rule::Aug1));
        assert!(has("G(~w_not_a | X (~a | w_not_a))", Rule::Aug2));
        assert!(has("G(~a)", Rule::Conclusion1));
        assert!(has("G(a | ~a | b)", Rule::Conclusion1));
        assert!(has("G(~w_not_a | X ~a)", Rule::Conclusion2));
        assert!(has("G(~w_not_a | X (a | ~a | b))", Rule::Conclusion2));
        let empty = g.vertex(g.empty_vertex().unwrap());
        assert!(empty.clause.is_empty_clause() && empty.partition.is_main());
        // two loop search iterations for the one eventuality
        assert_eq!(r.stats.loop_iterations, vec![2]);
        assert_eq!(g.partitions().len(), 3);
        // iteration 1 derives G(~a) and G(a | b)
        let l0 = PartitionId::Loop {
            search: 0,
            iteration: 0,
        };
        for want in ["G(~a)", "G(a | b)", "G(X ~a)"] {
            assert!(labels.iter().any(|(l, p, _)| l == want && *p == l0), "{want} in L0.0");
        }
        let l1 = PartitionId::Loop {
            search: 0,
            iteration: 1,
        };
        for want in ["G(X ~a)", "G(X (a | ~a | b))"] {
            assert!(
                labels
                    .iter()
                    .any(|(l, p, r)| l == want && *p == l1 && *r == Some(Rule::LoopInitC)),
                "{want} init-c in L0.1"
            );
        }
        assert_eq!(r.stats.rule_counts[&Rule::LoopSub], 2);
        assert_eq!(r.core(), Some(BTreeSet::from([0, 1, 2, 3])));
    }

    #[test]
    fn trivial_verdicts() {
        let r = run("initial: p", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.core(), None);
        let r = run("initial: p\ninitial: ~p\nglobal: q", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.core(), Some(BTreeSet::from([0, 1])));
        let r = run("global: q\ninitial: false", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.core(), Some(BTreeSet::from([1])));
        let r = run("", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Sat);
    }

    #[test]
    fn eventuality_against_invariant() {
        let r = run("global: ~p\neventually: F p\nglobal: q", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.core(), Some(BTreeSet::from([0, 1])));
        let r = run("global: ~p | X p\neventually: F p", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Sat);
    }

    #[test]
    fn limits_stop_the_run() {
        let config = SolverConfig {
            step_limit: Some(3),
            ..SolverConfig::default()
        };
        let r = run(TWO_LOOPS, &config);
        assert_eq!(r.verdict, Verdict::ResourceLimit);
        assert_eq!(r.core(), None);
    }

    #[test]
    fn graph_can_be_disabled() {
        let config = SolverConfig {
            record_graph: false,
            ..SolverConfig::default()
        };
        let r = run(TWO_LOOPS, &config);
        assert_eq!(r.verdict, Verdict::Unsat);
        assert!(r.graph.is_none());
        assert_eq!(r.core(), None);
    }

    #[test]
    fn augmentation_once_per_literal() {
        let r = run("eventually: a | F p\neventually: b | F p", &SolverConfig::default());
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.stats.rule_counts[&Rule::Aug2], 1);
        assert_eq!(r.stats.rule_counts[&Rule::Aug1], 2);
        let w = r.atoms.lookup("w_p").unwrap();
        assert_eq!(r.atoms.origin(w), &AtomOrigin::Waitfor(Literal::pos(AtomId(1))));
    }
}
