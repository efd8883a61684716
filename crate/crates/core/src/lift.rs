//! Map an unsatisfiable core of the translated clause set back to the
//! formula: every occurrence none of whose marked clauses made it into the
//! core is replaced by a constant (`True` under positive polarity, `False`
//! under negative), leaving a weaker formula that is still unsatisfiable.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ltl::{Formula, OccId, Op, Polarity};
use crate::snf::SnfProblem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtlCore {
    /// The weakened formula, constants not folded.
    pub formula: Formula,
    /// Replaced occurrences of the original formula and their constants.
    pub replaced: BTreeMap<OccId, bool>,
}

impl LtlCore {
    /// The weakened formula with constants folded, for display.
    pub fn simplified(&self) -> Formula {
        self.formula.fold_constants()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("lifting unavailable: the clauses were not translated from a formula")]
    NoProvenance,
    #[error("core refers to clause {0}, which does not exist")]
    UnknownClause(usize),
}

/// Lift the core `core` (indices into `problem.clauses`) of
/// `problem = translate(f)` to a core of `f`.
pub fn lift_core(f: &Formula, problem: &SnfProblem, core: &BTreeSet<usize>) -> Result<LtlCore, LiftError> {
    let prov = problem.provenance.as_ref().ok_or(LiftError::NoProvenance)?;
    if let Some(&bad) = core.iter().find(|&&i| i >= problem.clauses.len()) {
        return Err(LiftError::UnknownClause(bad));
    }
    if f.is_false() {
        return Ok(LtlCore {
            formula: Formula::ff(),
            replaced: BTreeMap::new(),
        });
    }
    let empty = BTreeSet::new();
    let mut replaced = BTreeMap::new();
    for occ in f.occurrences() {
        if occ.parent.is_none() {
            continue;
        }
        let marked = prov.marked.get(&occ.id).unwrap_or(&empty);
        if marked.is_disjoint(core) {
            replaced.insert(occ.id, occ.polarity == Polarity::Positive);
        }
    }
    // descendants of a replaced occurrence go with it
    let mut outermost = BTreeMap::new();
    let mut gone = vec![false; f.tree_size()];
    for occ in f.occurrences() {
        if occ.parent.is_some_and(|p| gone[p]) {
            gone[occ.id] = true;
        } else if let Some(&v) = replaced.get(&occ.id) {
            gone[occ.id] = true;
            outermost.insert(occ.id, v);
        }
    }
    let formula = f
        .replace_occurrences(&outermost)
        .expect("occurrence ids come from the formula");
    Ok(LtlCore {
        formula,
        replaced: outermost,
    })
}

/// Number of top-level conjuncts of the folded formula that are not `True`,
/// with nested conjunctions flattened.
pub fn nontrivial_conjuncts(f: &Formula) -> usize {
    let folded = f.fold_constants();
    folded.conjuncts().into_iter().filter(|c| *c.op() != Op::True).count()
}
