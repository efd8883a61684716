// Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use trcore::ltl::Formula;
use trcore::snf::{AtomTable, Clause, Literal, SnfProblem};

/// A random clause set over at most `max_atoms` atoms with at most
/// `max_clauses` clauses and at most two distinct eventuality literals.
pub fn random_problem(rng: &mut impl Rng, max_atoms: usize, max_clauses: usize) -> SnfProblem {
    let mut atoms = AtomTable::new();
    let n = rng.gen_range(1..=max_atoms);
    let ids: Vec<_> = (0..n).map(|i| atoms.input(&format!("p{i}"))).collect();
    let lit = |rng: &mut dyn rand::RngCore| Literal::new(*ids.choose(rng).unwrap(), rng.gen_bool(0.5));
    let mut evs: Vec<Literal> = (0..rng.gen_range(0..=2)).map(|_| lit(rng)).collect();
    evs.dedup();
    let count = rng.gen_range(1..=max_clauses);
    let mut clauses = Vec::new();
    for _ in 0..count {
        let k = rng.gen_range(0..100);
        let now: Vec<Literal> = (0..rng.gen_range(0..=2)).map(|_| lit(rng)).collect();
        let c = if k < 20 {
            Clause::initial(now.into_iter().chain([lit(rng)]))
        } else if k < 45 {
            Clause::global(now.into_iter().chain([lit(rng)]), [])
        } else if k < 85 || evs.is_empty() {
            let next: Vec<Literal> = (0..rng.gen_range(1..=2)).map(|_| lit(rng)).collect();
            Clause::global(now, next)
        } else {
            Clause::eventuality(now, *evs.choose(rng).unwrap())
        };
        clauses.push(c);
    }
    SnfProblem::new(atoms, clauses)
}

/// A random formula over `atoms` atoms with operator nesting up to `depth`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, atoms: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return Formula::atom(format!("p{}", rng.gen_range(0..atoms)));
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => Formula::not(random_formula(rng, atoms, d)),
        1 => Formula::and(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        2 => Formula::or(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        3 => Formula::next(random_formula(rng, atoms, d)),
        4 => Formula::until(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        5 => Formula::releases(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        6 => Formula::finally(random_formula(rng, atoms, d)),
        7 => Formula::globally(random_formula(rng, atoms, d)),
        _ => Formula::globally(Formula::finally(random_formula(rng, atoms, d))),
    }
}
