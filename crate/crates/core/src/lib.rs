//! Disjoint spanning branchings in temporal digraphs.
//!
//! The crate covers the four problem variants obtained by combining
//! temporal- or vertex-spanning with edge- or t-edge-disjointness:
//!
//! * [`model`]: temporal digraphs, snapshots and the time-expanded digraph.
//! * [`reach`]: temporal walks and the branching verifier.
//! * [`static_branchings`]: max-flow and Edmonds' branching packing.
//! * [`poly`]: the polynomial solvers and the variant dispatcher.
//! * [`exact`]: exponential search and a brute-force oracle.
//! * [`reductions`]: root normalizations and the NP-hardness gadgets.
//! * [`io`]: text formats for instances, solutions and CNF formulas.
//! * [`gen`]: seeded random instances.

pub mod exact;
pub mod gen;
pub mod io;
pub mod model;
pub mod poly;
pub mod reach;
pub mod reductions;
pub mod static_branchings;

pub use model::{
    expand, Disjointness, ExpandedDigraph, ProblemVariant, RootSet, Spanning, TemporalDigraph,
    TemporalEdge, TemporalVertex, Time,
};

pub use poly::{solve, Method, Outcome, SolveError};
pub use reach::TemporalBranching;
