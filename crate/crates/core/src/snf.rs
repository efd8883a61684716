//! Separated normal form: clauses over a shared atom table, the
//! structure-preserving translation from LTL, and a line-based text format.
//!
//! A clause is one of
//!
//! * `I(P)`: an initial clause, the disjunction `P` holds at time 0;
//! * `G(P | X Q)`: a global clause, at every time `P` holds now or `Q` next
//!   (an empty `Q` makes it a plain invariant `G(P)`);
//! * `G(P | F l)`: an eventuality clause.
//!
//! The empty clause is `I(false)` or `G(false)`; both spellings compare equal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::ltl::{Formula, OccId, Op, Polarity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A possibly negated atom, packed as `atom << 1 | negated`. The derived
/// order sorts by atom first, positive before negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    pub fn new(atom: AtomId, positive: bool) -> Literal {
        Literal(atom.0 << 1 | u32::from(!positive))
    }

    pub fn pos(atom: AtomId) -> Literal {
        Literal::new(atom, true)
    }

    pub fn neg(atom: AtomId) -> Literal {
        Literal::new(atom, false)
    }

    pub fn atom(self) -> AtomId {
        AtomId(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn complement(self) -> Literal {
        Literal(self.0 ^ 1)
    }

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn display<'a>(&self, atoms: &'a AtomTable) -> LiteralDisplay<'a> {
        LiteralDisplay { lit: *self, atoms }
    }
}

pub struct LiteralDisplay<'a> {
    lit: Literal,
    atoms: &'a AtomTable,
}

impl fmt::Display for LiteralDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.lit.is_positive() {
            f.write_str("~")?;
        }
        f.write_str(self.atoms.name(self.lit.atom()))
    }
}

/// Where an atom came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomOrigin {
    /// An atomic proposition of the input.
    Input,
    /// The fresh proposition standing for an LTL subformula occurrence.
    Occurrence(OccId),
    /// The fresh proposition tracking a pending eventuality literal.
    Waitfor(Literal),
}

#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    names: Vec<String>,
    origins: Vec<AtomOrigin>,
    index: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> AtomTable {
        AtomTable::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, atom: AtomId) -> &str {
        &self.names[atom.index()]
    }

    pub fn origin(&self, atom: AtomId) -> &AtomOrigin {
        &self.origins[atom.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> {
        (0..self.names.len() as u32).map(AtomId)
    }

    /// The input atom called `name`, created on first use.
    pub fn input(&mut self, name: &str) -> AtomId {
        if let Some(id) = self.lookup(name) {
            return id;
        }
        self.push(name.to_string(), AtomOrigin::Input)
    }

    /// A new atom named `base`, or `base` followed by underscores when the
    /// name is taken.
    pub fn fresh(&mut self, base: &str, origin: AtomOrigin) -> AtomId {
        let mut name = base.to_string();
        while self.index.contains_key(&name) {
            name.push('_');
        }
        self.push(name, origin)
    }

    fn push(&mut self, name: String, origin: AtomOrigin) -> AtomId {
        let id = AtomId(self.names.len() as u32);
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.origins.push(origin);
        id
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseKind {
    Initial,
    Global,
    Eventuality,
}

/// An SNF clause. Literal sets are kept sorted and duplicate-free.
#[derive(Clone, Debug)]
pub struct Clause {
    kind: ClauseKind,
    now: Vec<Literal>,
    next: Vec<Literal>,
    ev: Option<Literal>,
}

fn normalize(mut lits: Vec<Literal>) -> Vec<Literal> {
    lits.sort_unstable();
    lits.dedup();
    lits
}

impl Clause {
    pub fn initial(now: impl IntoIterator<Item = Literal>) -> Clause {
        Clause {
            kind: ClauseKind::Initial,
            now: normalize(now.into_iter().collect()),
            next: Vec::new(),
            ev: None,
        }
    }

    pub fn global(now: impl IntoIterator<Item = Literal>, next: impl IntoIterator<Item = Literal>) -> Clause {
        Clause {
            kind: ClauseKind::Global,
            now: normalize(now.into_iter().collect()),
            next: normalize(next.into_iter().collect()),
            ev: None,
        }
    }

    pub fn eventuality(now: impl IntoIterator<Item = Literal>, ev: Literal) -> Clause {
        Clause {
            kind: ClauseKind::Eventuality,
            now: normalize(now.into_iter().collect()),
            next: Vec::new(),
            ev: Some(ev),
        }
    }

    /// The empty clause `G(false)`.
    pub fn empty() -> Clause {
        Clause::global([], [])
    }

    pub fn kind(&self) -> ClauseKind {
        self.kind
    }

    pub fn now(&self) -> &[Literal] {
        &self.now
    }

    pub fn next(&self) -> &[Literal] {
        &self.next
    }

    pub fn ev(&self) -> Option<Literal> {
        self.ev
    }

    pub fn is_initial(&self) -> bool {
        self.kind == ClauseKind::Initial
    }

    pub fn is_global(&self) -> bool {
        self.kind == ClauseKind::Global
    }

    pub fn is_eventuality(&self) -> bool {
        self.kind == ClauseKind::Eventuality
    }

    /// A global clause whose X part is empty.
    pub fn is_invariant(&self) -> bool {
        self.kind == ClauseKind::Global && self.next.is_empty()
    }

    /// A global clause with a non-empty X part.
    pub fn is_step(&self) -> bool {
        self.kind == ClauseKind::Global && !self.next.is_empty()
    }

    pub fn is_empty_clause(&self) -> bool {
        self.kind != ClauseKind::Eventuality && self.now.is_empty() && self.next.is_empty()
    }

    /// True iff the `now` part or the `next` part contains a complementary
    /// pair. A literal in `now` and its complement under `X` do not count.
    pub fn is_tautology(&self) -> bool {
        has_complementary_pair(&self.now) || has_complementary_pair(&self.next)
    }

    /// `G(P)` subsumes `G(Q)` iff `P ⊆ Q`. Only the `now` parts are compared.
    pub fn subsumes(&self, other: &Clause) -> bool {
        is_subset(&self.now, &other.now)
    }

    /// All atoms mentioned anywhere in the clause.
    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.now.iter().chain(&self.next).chain(&self.ev).map(|l| l.atom())
    }

    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> ClauseDisplay<'a> {
        ClauseDisplay {
            clause: self,
            atoms,
            style: Style::Text,
        }
    }

    /// Compact `I(..)`/`G(..)` rendering used for graph labels.
    pub fn label<'a>(&'a self, atoms: &'a AtomTable) -> ClauseDisplay<'a> {
        ClauseDisplay {
            clause: self,
            atoms,
            style: Style::Label,
        }
    }

    fn identity(&self) -> (ClauseKind, &[Literal], &[Literal], Option<Literal>) {
        let kind = if self.is_empty_clause() {
            ClauseKind::Global
        } else {
            self.kind
        };
        (kind, &self.now, &self.next, self.ev)
    }
}

impl PartialEq for Clause {
    fn eq(&self, other: &Clause) -> bool {
        self.identity() == other.identity()
    }
}

impl Eq for Clause {}

impl Hash for Clause {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.identity().hash(state)
    }
}

pub(crate) fn has_complementary_pair(lits: &[Literal]) -> bool {
    // sorted: a literal and its complement are adjacent
    lits.windows(2).any(|w| w[0].complement() == w[1])
}

/// Subset test on sorted literal slices.
pub(crate) fn is_subset(small: &[Literal], big: &[Literal]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut it = big.iter();
    'outer: for l in small {
        for m in it.by_ref() {
            if m == l {
                continue 'outer;
            }
            if m > l {
                return false;
            }
        }
        return false;
    }
    true
}

#[derive(Clone, Copy)]
enum Style {
    Text,
    Label,
}

pub struct ClauseDisplay<'a> {
    clause: &'a Clause,
    atoms: &'a AtomTable,
    style: Style,
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.clause;
        let mut parts: Vec<String> = c.now.iter().map(|l| l.display(self.atoms).to_string()).collect();
        let next: Vec<String> = c.next.iter().map(|l| l.display(self.atoms).to_string()).collect();
        match next.len() {
            0 => {}
            1 => parts.push(format!("X {}", next[0])),
            _ => parts.push(format!("X ({})", next.join(" | "))),
        }
        if let Some(l) = c.ev {
            parts.push(format!("F {}", l.display(self.atoms)));
        }
        let body = if parts.is_empty() {
            "false".to_string()
        } else {
            parts.join(" | ")
        };
        match self.style {
            Style::Text => {
                let prefix = match c.kind {
                    ClauseKind::Initial => "initial",
                    ClauseKind::Global => "global",
                    ClauseKind::Eventuality => "eventually",
                };
                write!(f, "{prefix}: {body}")
            }
            Style::Label => {
                if c.is_empty_clause() {
                    return f.write_str("□");
                }
                let prefix = if c.is_initial() { "I" } else { "G" };
                write!(f, "{prefix}({body})")
            }
        }
    }
}

/// Links the clauses of a translated problem back to the formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    /// Occurrence id of the formula's root.
    pub root: OccId,
    /// For every clause, the occurrence whose translation emitted it.
    pub clause_origin: Vec<OccId>,
    /// For every occurrence, the clauses that mention its proposition at a
    /// marked position (an operand reference inside its parent's clauses).
    pub marked: BTreeMap<OccId, BTreeSet<usize>>,
}

/// A starting clause set together with its atom table.
#[derive(Clone, Debug)]
pub struct SnfProblem {
    pub atoms: AtomTable,
    pub clauses: Vec<Clause>,
    /// Present for problems produced by [`translate`].
    pub provenance: Option<Provenance>,
}

impl SnfProblem {
    /// Clauses are deduplicated, keeping the first occurrence.
    pub fn new(atoms: AtomTable, clauses: impl IntoIterator<Item = Clause>) -> SnfProblem {
        let mut seen = std::collections::HashSet::new();
        let clauses = clauses.into_iter().filter(|c| seen.insert(c.clone())).collect();
        SnfProblem {
            atoms,
            clauses,
            provenance: None,
        }
    }

    pub fn eventuality_literals(&self) -> Vec<Literal> {
        let mut out: Vec<Literal> = Vec::new();
        for l in self.clauses.iter().filter_map(Clause::ev) {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }

    /// The problem restricted to the clauses at `indices` (in order). The
    /// atom table is shared; provenance is dropped.
    pub fn subproblem(&self, indices: &BTreeSet<usize>) -> SnfProblem {
        SnfProblem {
            atoms: self.atoms.clone(),
            clauses: indices.iter().map(|&i| self.clauses[i].clone()).collect(),
            provenance: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SnfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: eventuality clause needs exactly one F literal, found {count}")]
    EventualityCount { line: usize, count: usize },
}

/// Parse the line-based clause format (one clause per line, `#` comments).
pub fn parse_snf(text: &str) -> Result<SnfProblem, SnfError> {
    let mut atoms = AtomTable::new();
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        clauses.push(parse_clause_line(content, line, &mut atoms)?);
    }
    Ok(SnfProblem::new(atoms, clauses))
}

fn parse_clause_line(content: &str, line: usize, atoms: &mut AtomTable) -> Result<Clause, SnfError> {
    let err = |message: String| SnfError::Syntax { line, message };
    let (prefix, body) = content
        .split_once(':')
        .ok_or_else(|| err("missing `initial:`, `global:` or `eventually:` prefix".into()))?;
    let kind = match prefix.trim() {
        "initial" => ClauseKind::Initial,
        "global" => ClauseKind::Global,
        "eventually" => ClauseKind::Eventuality,
        other => return Err(err(format!("unknown clause kind `{other}`"))),
    };
    let tokens = snf_tokens(body).map_err(err)?;
    let mut now = Vec::new();
    let mut next = Vec::new();
    let mut evs = Vec::new();
    let mut pos = 0;
    let mut expect_item = true;
    while pos < tokens.len() {
        if !expect_item {
            if tokens[pos] != "|" {
                return Err(err(format!("expected `|`, found `{}`", tokens[pos])));
            }
            pos += 1;
            expect_item = true;
            continue;
        }
        match tokens[pos].as_str() {
            "false" => pos += 1,
            "X" => {
                pos += 1;
                if tokens.get(pos).map(String::as_str) == Some("(") {
                    pos += 1;
                    loop {
                        next.push(parse_literal(&tokens, &mut pos, atoms).map_err(err)?);
                        match tokens.get(pos).map(String::as_str) {
                            Some("|") => pos += 1,
                            Some(")") => {
                                pos += 1;
                                break;
                            }
                            _ => return Err(err("unterminated X (...) group".into())),
                        }
                    }
                } else {
                    next.push(parse_literal(&tokens, &mut pos, atoms).map_err(err)?);
                }
            }
            "F" => {
                pos += 1;
                evs.push(parse_literal(&tokens, &mut pos, atoms).map_err(err)?);
            }
            _ => now.push(parse_literal(&tokens, &mut pos, atoms).map_err(err)?),
        }
        expect_item = false;
    }
    if expect_item {
        return Err(err("empty clause body (write `false` for the empty clause)".into()));
    }
    match kind {
        ClauseKind::Initial if !next.is_empty() || !evs.is_empty() => {
            Err(err("initial clauses admit neither X nor F".into()))
        }
        ClauseKind::Initial => Ok(Clause::initial(now)),
        ClauseKind::Global if !evs.is_empty() => Err(err("F literal in a global clause (use `eventually:`)".into())),
        ClauseKind::Global => Ok(Clause::global(now, next)),
        ClauseKind::Eventuality => {
            if !next.is_empty() {
                return Err(err("eventuality clauses admit no X part".into()));
            }
            if evs.len() != 1 {
                return Err(SnfError::EventualityCount { line, count: evs.len() });
            }
            Ok(Clause::eventuality(now, evs[0]))
        }
    }
}

fn snf_tokens(body: &str) -> Result<Vec<String>, String> {
    let chars: Vec<char> = body.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if matches!(c, '~' | '|' | '(' | ')') {
            out.push(c.to_string());
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

fn parse_literal(tokens: &[String], pos: &mut usize, atoms: &mut AtomTable) -> Result<Literal, String> {
    let mut positive = true;
    if tokens.get(*pos).map(String::as_str) == Some("~") {
        positive = false;
        *pos += 1;
    }
    match tokens.get(*pos) {
        Some(t) if is_identifier(t) => {
            *pos += 1;
            Ok(Literal::new(atoms.input(t), positive))
        }
        Some(t) => Err(format!("expected a literal, found `{t}`")),
        None => Err("expected a literal, found end of line".into()),
    }
}

fn is_identifier(t: &str) -> bool {
    let mut chars = t.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && !matches!(t, "X" | "F" | "false")
}

/// Render clauses in the text format, one per line.
pub fn print_clauses<'a>(atoms: &AtomTable, clauses: impl IntoIterator<Item = &'a Clause>) -> String {
    let mut out = String::new();
    for c in clauses {
        out.push_str(&c.display(atoms).to_string());
        out.push('\n');
    }
    out
}

pub fn print_snf(problem: &SnfProblem) -> String {
    print_clauses(&problem.atoms, &problem.clauses)
}

/// How a subformula occurrence is referenced from its parent's clauses.
#[derive(Clone, Copy, Debug)]
enum Ref {
    Const(bool),
    Lit(Literal),
}

/// One disjunct of a clause template: a (possibly negated) reference, and
/// the occurrence it marks, if any.
#[derive(Clone, Copy)]
struct Item {
    r: Ref,
    negated: bool,
    marks: Option<OccId>,
}

impl Item {
    fn value(self) -> Result<Literal, bool> {
        match self.r {
            Ref::Const(v) => Err(v != self.negated),
            Ref::Lit(l) => Ok(if self.negated { l.complement() } else { l }),
        }
    }
}

#[derive(Default)]
struct Template {
    now: Vec<Item>,
    next: Vec<Item>,
    ev: Option<Item>,
}

struct Translator {
    atoms: AtomTable,
    clauses: Vec<Clause>,
    index: HashMap<Clause, usize>,
    origin: Vec<OccId>,
    marked: BTreeMap<OccId, BTreeSet<usize>>,
}

impl Translator {
    /// Fold constants and add the clause (if not trivially true).
    fn emit(&mut self, t: Template, global: bool, occ: OccId) {
        let mut marks = Vec::new();
        let mut resolve = |items: &[Item]| -> Option<Vec<Literal>> {
            let mut lits = Vec::new();
            for &it in items {
                match it.value() {
                    Ok(l) => lits.push(l),
                    Err(true) => return None,
                    Err(false) => {}
                }
                marks.extend(it.marks);
            }
            Some(lits)
        };
        let Some(now) = resolve(&t.now) else { return };
        let Some(next) = resolve(&t.next) else { return };
        let clause = match t.ev {
            None if global => Clause::global(now, next),
            None => Clause::initial(now),
            Some(ev) => {
                marks.extend(ev.marks);
                match ev.value() {
                    Ok(l) => Clause::eventuality(now, l),
                    Err(true) => return,
                    // F false is false: only the body remains
                    Err(false) => Clause::global(now, []),
                }
            }
        };
        let idx = match self.index.get(&clause) {
            Some(&i) => i,
            None => {
                let i = self.clauses.len();
                self.index.insert(clause.clone(), i);
                self.clauses.push(clause);
                self.origin.push(occ);
                i
            }
        };
        for m in marks {
            self.marked.entry(m).or_default().insert(idx);
        }
    }
}

fn fresh_prefix(f: &Formula) -> String {
    let names = f.atom_names();
    let mut prefix = "x".to_string();
    loop {
        let clash = names.iter().any(|n| {
            n.strip_prefix(prefix.as_str())
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        });
        if !clash {
            return prefix;
        }
        prefix.insert(0, '_');
    }
}

/// Structure-preserving translation of `f` into SNF: one fresh proposition
/// per non-atomic occurrence, clauses chosen by the occurrence's polarity,
/// plus the initial clause asserting the root.
pub fn translate(f: &Formula) -> SnfProblem {
    let mut atoms = AtomTable::new();
    for name in f.atom_names() {
        atoms.input(name);
    }
    let prefix = fresh_prefix(f);
    let nodes = f.nodes();
    let mut refs = Vec::with_capacity(nodes.len());
    let mut counter = 0;
    for n in &nodes {
        let r = match n.op() {
            Op::True => Ref::Const(true),
            Op::False => Ref::Const(false),
            Op::Atom(name) => Ref::Lit(Literal::pos(atoms.lookup(name).expect("atom collected"))),
            _ => {
                let id = atoms.fresh(&format!("{prefix}{counter}"), AtomOrigin::Occurrence(n.id()));
                counter += 1;
                Ref::Lit(Literal::pos(id))
            }
        };
        refs.push(r);
    }

    let mut tr = Translator {
        atoms,
        clauses: Vec::new(),
        index: HashMap::new(),
        origin: Vec::new(),
        marked: BTreeMap::new(),
    };
    let root = f.id();
    tr.emit(
        Template {
            now: vec![Item {
                r: refs[root],
                negated: false,
                marks: None,
            }],
            ..Template::default()
        },
        false,
        root,
    );

    for occ in f.occurrences() {
        if occ.op.arity() == 0 {
            continue;
        }
        let node = nodes[occ.id];
        let own = |negated| Item {
            r: refs[occ.id],
            negated,
            marks: None,
        };
        let child = |k: usize, negated| {
            let c = node.args()[k].id();
            Item {
                r: refs[c],
                negated,
                marks: Some(c),
            }
        };
        let g = |now: Vec<Item>, next: Vec<Item>| Template { now, next, ev: None };
        let e = |now: Vec<Item>, ev: Item| Template {
            now,
            next: Vec::new(),
            ev: Some(ev),
        };
        // clauses read "x -> body" (positive) or "~x -> body" (negative)
        let rows: Vec<Template> = match occ.polarity {
            Polarity::Positive => {
                let x = own(true);
                match occ.op {
                    Op::Not => vec![g(vec![x, child(0, true)], vec![])],
                    Op::And => vec![g(vec![x, child(0, false)], vec![]), g(vec![x, child(1, false)], vec![])],
                    Op::Or => vec![g(vec![x, child(0, false), child(1, false)], vec![])],
                    Op::Next => vec![g(vec![x], vec![child(0, false)])],
                    Op::Globally => vec![g(vec![x], vec![own(false)]), g(vec![x, child(0, false)], vec![])],
                    Op::Finally => vec![e(vec![x], child(0, false))],
                    Op::Until => vec![
                        g(vec![x, child(1, false), child(0, false)], vec![]),
                        g(vec![x, child(1, false)], vec![own(false)]),
                        e(vec![x], child(1, false)),
                    ],
                    Op::Releases => vec![
                        g(vec![x, child(1, false)], vec![]),
                        g(vec![x, child(0, false)], vec![own(false)]),
                    ],
                    Op::True | Op::False | Op::Atom(_) => unreachable!(),
                }
            }
            Polarity::Negative => {
                let x = own(false);
                match occ.op {
                    Op::Not => vec![g(vec![x, child(0, false)], vec![])],
                    Op::And => vec![g(vec![x, child(0, true), child(1, true)], vec![])],
                    Op::Or => vec![g(vec![x, child(0, true)], vec![]), g(vec![x, child(1, true)], vec![])],
                    Op::Next => vec![g(vec![x], vec![child(0, true)])],
                    Op::Globally => vec![e(vec![x], child(0, true))],
                    Op::Finally => vec![g(vec![x], vec![own(true)]), g(vec![x, child(0, true)], vec![])],
                    Op::Until => vec![
                        g(vec![x, child(1, true)], vec![]),
                        g(vec![x, child(0, true)], vec![own(true)]),
                    ],
                    Op::Releases => vec![
                        g(vec![x, child(1, true), child(0, true)], vec![]),
                        g(vec![x, child(1, true)], vec![own(true)]),
                        e(vec![x], child(1, true)),
                    ],
                    Op::True | Op::False | Op::Atom(_) => unreachable!(),
                }
            }
        };
        for t in rows {
            tr.emit(t, true, occ.id);
        }
    }

    SnfProblem {
        atoms: tr.atoms,
        clauses: tr.clauses,
        provenance: Some(Provenance {
            root,
            clause_origin: tr.origin,
            marked: tr.marked,
        }),
    }
}
