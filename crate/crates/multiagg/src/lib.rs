//! Local multi-aggregation over shortest-path structures in the CONGEST
//! model, with applications to centrality approximation and routing-cost
//! trees.
//!
//! The crate simulates a synchronous message-passing network in which a set
//! `S` of root nodes concurrently build directed leveled graphs (the DAGs
//! of all shortest paths from each root) under an ID-priority delay
//! schedule, then aggregate values through them on the reversed schedule.
//! Everything is deterministic and validated against exact sequential
//! oracles; see the `book/` guide for a walk-through.

pub mod framework;
pub mod graph;
pub mod oracle;
pub mod sim;

pub use graph::{Graph, NodeId, Weight};
