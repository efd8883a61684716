//! LTL satisfiability by temporal resolution, with a recorded resolution
//! graph from which unsatisfiable cores are extracted and mapped back to
//! the input formula.

pub mod engine;
pub mod lift;
pub mod ltl;
pub mod oracle;
pub mod proofgraph;
pub mod snf;
