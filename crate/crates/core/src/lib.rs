//! Forest augmentation with {0,1} edge costs.
//!
//! Given a 2-connected graph whose zero-cost edges form a forest, the solver
//! computes a cheap 2-connected spanning subgraph in two passes: a
//! reverse-delete over the unit-cost edges, then a stack-driven improvement
//! pass that trades edges around the side vertices of special segments.
//!
//! Alongside the solver the crate carries the pieces needed to check its
//! output at desk scale: an exact optimum oracle ([`oracle`]), an exact
//! rational checker for the dual of the cut LP ([`dual`]) and seeded
//! instance generators ([`instances`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the
//! experiment harness and the CLI live in the `fapkit` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod blocks;
pub mod connectivity;
pub mod dual;
pub mod graph;
pub mod instances;
pub mod oracle;
pub mod segments;
pub mod solver;

pub use connectivity::{articulation_points, bridges, is_feasible, EdgeView, Mode};
pub use graph::{Cost, Edge, EdgeId, EdgeSet, Instance, InstanceError, Solution, VertexId};
pub use segments::{Segment, SegmentCensus, Strength};
pub use solver::{solve, BlockTrace, Event, RunReport, SolveError, SolveOptions};
