//! Propositional LTL formulas: syntax trees with occurrence ids, a parser
//! for the ASCII surface syntax, printing, and polarity bookkeeping.
//!
//! Every node of a [`Formula`] carries an occurrence id. Ids are assigned in
//! depth-first preorder starting at 0 for the root, so two trees of the same
//! shape always carry the same ids.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Occurrence id of a syntax-tree node (depth-first preorder index).
pub type OccId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    True,
    False,
    Atom(String),
    Not,
    And,
    Or,
    Next,
    Until,
    Releases,
    Finally,
    Globally,
}

impl Op {
    pub fn arity(&self) -> usize {
        match self {
            Op::True | Op::False | Op::Atom(_) => 0,
            Op::Not | Op::Next | Op::Finally | Op::Globally => 1,
            Op::And | Op::Or | Op::Until | Op::Releases => 2,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Op::True | Op::False)
    }

    /// Short lowercase name, used in diagnostics and occurrence listings.
    pub fn name(&self) -> &'static str {
        match self {
            Op::True => "true",
            Op::False => "false",
            Op::Atom(_) => "atom",
            Op::Not => "not",
            Op::And => "and",
            Op::Or => "or",
            Op::Next => "next",
            Op::Until => "until",
            Op::Releases => "releases",
            Op::Finally => "finally",
            Op::Globally => "globally",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "+",
            Polarity::Negative => "-",
        })
    }
}

/// An LTL syntax tree. Immutable once built; constructors renumber the
/// occurrence ids of the whole tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    op: Op,
    args: Vec<Formula>,
    id: OccId,
}

/// One row of [`Formula::occurrences`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub id: OccId,
    pub polarity: Polarity,
    pub op: Op,
    /// Occurrence id of the enclosing node, `None` for the root.
    pub parent: Option<OccId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtlError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown occurrence id {0}")]
    UnknownOccurrence(OccId),
}

impl Formula {
    fn build(op: Op, args: Vec<Formula>) -> Formula {
        debug_assert_eq!(op.arity(), args.len());
        let mut f = Formula { op, args, id: 0 };
        f.renumber();
        f
    }

    pub fn constant(value: bool) -> Formula {
        Formula::build(if value { Op::True } else { Op::False }, Vec::new())
    }

    pub fn tt() -> Formula {
        Formula::constant(true)
    }

    pub fn ff() -> Formula {
        Formula::constant(false)
    }

    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::build(Op::Atom(name.into()), Vec::new())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::build(Op::Not, vec![f])
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::build(Op::And, vec![l, r])
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::build(Op::Or, vec![l, r])
    }

    /// `l -> r`, expanded to `~l | r`.
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::or(Formula::not(l), r)
    }

    pub fn next(f: Formula) -> Formula {
        Formula::build(Op::Next, vec![f])
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::build(Op::Until, vec![l, r])
    }

    pub fn releases(l: Formula, r: Formula) -> Formula {
        Formula::build(Op::Releases, vec![l, r])
    }

    pub fn finally(f: Formula) -> Formula {
        Formula::build(Op::Finally, vec![f])
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::build(Op::Globally, vec![f])
    }

    /// Conjunction of all `parts`, left-associated; `True` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or_else(Formula::tt)
    }

    pub fn op(&self) -> &Op {
        &self.op
    }

    pub fn args(&self) -> &[Formula] {
        &self.args
    }

    pub fn id(&self) -> OccId {
        self.id
    }

    pub fn is_true(&self) -> bool {
        self.op == Op::True
    }

    pub fn is_false(&self) -> bool {
        self.op == Op::False
    }

    fn renumber(&mut self) {
        fn go(f: &mut Formula, next: &mut OccId) {
            f.id = *next;
            *next += 1;
            for a in &mut f.args {
                go(a, next);
            }
        }
        let mut next = 0;
        go(self, &mut next);
    }

    /// Number of syntax-tree nodes.
    pub fn tree_size(&self) -> usize {
        1 + self.args.iter().map(Formula::tree_size).sum::<usize>()
    }

    /// All nodes in depth-first preorder with their polarity.
    pub fn occurrences(&self) -> Vec<Occurrence> {
        fn go(f: &Formula, pol: Polarity, parent: Option<OccId>, out: &mut Vec<Occurrence>) {
            out.push(Occurrence {
                id: f.id,
                polarity: pol,
                op: f.op.clone(),
                parent,
            });
            let child_pol = if f.op == Op::Not { pol.flip() } else { pol };
            for a in &f.args {
                go(a, child_pol, Some(f.id), out);
            }
        }
        let mut out = Vec::with_capacity(self.tree_size());
        go(self, Polarity::Positive, None, &mut out);
        out
    }

    /// All nodes in depth-first preorder.
    pub fn nodes(&self) -> Vec<&Formula> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            out.push(f);
            for a in &f.args {
                go(a, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Atom names in order of first appearance.
    pub fn atom_names(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for n in self.nodes() {
            if let Op::Atom(name) = &n.op {
                if !seen.contains(&name.as_str()) {
                    seen.push(name.as_str());
                }
            }
        }
        seen
    }

    /// Replace the listed occurrences by truth constants. Descendants of a
    /// replaced occurrence disappear along with it. The result is renumbered.
    pub fn replace_occurrences(&self, replacements: &BTreeMap<OccId, bool>) -> Result<Formula, LtlError> {
        let size = self.tree_size();
        if let Some((&bad, _)) = replacements.iter().find(|(&id, _)| id >= size) {
            return Err(LtlError::UnknownOccurrence(bad));
        }
        fn go(f: &Formula, repl: &BTreeMap<OccId, bool>) -> Formula {
            if let Some(&value) = repl.get(&f.id) {
                return Formula {
                    op: if value { Op::True } else { Op::False },
                    args: Vec::new(),
                    id: 0,
                };
            }
            Formula {
                op: f.op.clone(),
                args: f.args.iter().map(|a| go(a, repl)).collect(),
                id: 0,
            }
        }
        let mut out = go(self, replacements);
        out.renumber();
        Ok(out)
    }

    /// Fold away truth constants with standard LTL identities. Used for
    /// presenting weakened formulas; the result is equivalent to `self`.
    pub fn fold_constants(&self) -> Formula {
        let args: Vec<Formula> = self.args.iter().map(Formula::fold_constants).collect();
        let c = |a: &Formula| match a.op {
            Op::True => Some(true),
            Op::False => Some(false),
            _ => None,
        };
        match (&self.op, args.as_slice()) {
            (Op::Not, [a]) => match c(a) {
                Some(v) => Formula::constant(!v),
                None => Formula::not(a.clone()),
            },
            (Op::Next | Op::Finally | Op::Globally, [a]) if c(a).is_some() => a.clone(),
            (Op::And, [a, b]) => match (c(a), c(b)) {
                (Some(false), _) | (_, Some(false)) => Formula::ff(),
                (Some(true), _) => b.clone(),
                (_, Some(true)) => a.clone(),
                _ => Formula::and(a.clone(), b.clone()),
            },
            (Op::Or, [a, b]) => match (c(a), c(b)) {
                (Some(true), _) | (_, Some(true)) => Formula::tt(),
                (Some(false), _) => b.clone(),
                (_, Some(false)) => a.clone(),
                _ => Formula::or(a.clone(), b.clone()),
            },
            (Op::Until, [a, b]) => match (c(a), c(b)) {
                (_, Some(v)) => Formula::constant(v),
                (Some(false), _) => b.clone(),
                (Some(true), _) => Formula::finally(b.clone()),
                _ => Formula::until(a.clone(), b.clone()),
            },
            (Op::Releases, [a, b]) => match (c(a), c(b)) {
                (_, Some(v)) => Formula::constant(v),
                (Some(true), _) => b.clone(),
                (Some(false), _) => Formula::globally(b.clone()),
                _ => Formula::releases(a.clone(), b.clone()),
            },
            _ => Formula::build(self.op.clone(), args),
        }
    }

    /// Operands of the top-level conjunction chain (the formula itself when
    /// it is not a conjunction).
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if f.op == Op::And {
                stack.push(&f.args[1]);
                stack.push(&f.args[0]);
            } else {
                out.push(f);
            }
        }
        out
    }

    /// Find the node with the given occurrence id.
    pub fn find(&self, id: OccId) -> Option<&Formula> {
        if self.id == id {
            return Some(self);
        }
        // children are numbered after their parent, in order
        let mut found = None;
        for a in &self.args {
            if a.id <= id {
                found = Some(a);
            } else {
                break;
            }
        }
        found.and_then(|a| a.find(id))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.op, self.args.as_slice()) {
            (Op::True, _) => f.write_str("True"),
            (Op::False, _) => f.write_str("False"),
            (Op::Atom(name), _) => f.write_str(name),
            (Op::Not, [a]) => write!(f, "~{a}"),
            (Op::Next, [a]) => write!(f, "X {a}"),
            (Op::Finally, [a]) => write!(f, "F {a}"),
            (Op::Globally, [a]) => write!(f, "G {a}"),
            (Op::And, [a, b]) => write!(f, "({a} & {b})"),
            (Op::Or, [a, b]) => write!(f, "({a} | {b})"),
            (Op::Until, [a, b]) => write!(f, "({a} U {b})"),
            (Op::Releases, [a, b]) => write!(f, "({a} R {b})"),
            _ => unreachable!("arity invariant violated"),
        }
    }
}

/// Parse the ASCII surface syntax. See the crate README for the grammar.
pub fn parse_ltl(text: &str) -> Result<Formula, LtlError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut f = p.formula()?;
    if let Some(t) = p.peek() {
        return Err(t.error(format!("unexpected {}", t.tok)));
    }
    f.renumber();
    Ok(f)
}

/// Inverse of [`parse_ltl`].
pub fn print_ltl(f: &Formula) -> String {
    f.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Finally,
    Globally,
    Until,
    Releases,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::True => f.write_str("`True`"),
            Tok::False => f.write_str("`False`"),
            Tok::Not => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Next => f.write_str("`X`"),
            Tok::Finally => f.write_str("`F`"),
            Tok::Globally => f.write_str("`G`"),
            Tok::Until => f.write_str("`U`"),
            Tok::Releases => f.write_str("`R`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

impl Token {
    fn error(&self, message: String) -> LtlError {
        LtlError::Syntax {
            line: self.line,
            column: self.column,
            message,
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, LtlError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (lineno + 1, i + 1);
            let single = match c {
                '~' => Some(Tok::Not),
                '&' => Some(Tok::And),
                '|' => Some(Tok::Or),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                _ => None,
            };
            if c.is_whitespace() {
                i += 1;
            } else if let Some(tok) = single {
                out.push(Token { tok, line, column });
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Implies,
                    line,
                    column,
                });
                i += 2;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "True" => Tok::True,
                    "False" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    "R" => Tok::Releases,
                    _ => Tok::Ident(word),
                };
                out.push(Token { tok, line, column });
            } else {
                return Err(LtlError::Syntax {
                    line,
                    column,
                    message: format!("unknown token `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eof_error(&self) -> LtlError {
        let (line, column) = self.tokens.last().map(|t| (t.line, t.column + 1)).unwrap_or((1, 1));
        LtlError::Syntax {
            line,
            column,
            message: "unexpected end of input".into(),
        }
    }

    fn formula(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Or) {
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.binary_temporal()?;
        while self.eat(&Tok::And) {
            f = Formula::and(f, self.binary_temporal()?);
        }
        Ok(f)
    }

    fn binary_temporal(&mut self) -> Result<Formula, LtlError> {
        let mut f = self.unary()?;
        loop {
            if self.eat(&Tok::Until) {
                f = Formula::until(f, self.unary()?);
            } else if self.eat(&Tok::Releases) {
                f = Formula::releases(f, self.unary()?);
            } else {
                return Ok(f);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.eof_error());
        };
        self.pos += 1;
        match t.tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Next => Ok(Formula::next(self.unary()?)),
            Tok::Finally => Ok(Formula::finally(self.unary()?)),
            Tok::Globally => Ok(Formula::globally(self.unary()?)),
            Tok::True => Ok(Formula::tt()),
            Tok::False => Ok(Formula::ff()),
            Tok::Ident(name) => Ok(Formula::atom(name)),
            Tok::LParen => {
                let f = self.formula()?;
                match self.peek() {
                    Some(t) if t.tok == Tok::RParen => {
                        self.pos += 1;
                        Ok(f)
                    }
                    Some(t) => Err(t.error(format!("expected `)`, found {}", t.tok))),
                    None => Err(self.eof_error()),
                }
            }
            ref other => Err(t.error(format!("unexpected {other}"))),
        }
    }
}
