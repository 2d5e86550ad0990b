//! Group connectivity of graphs over small finite abelian groups.
//!
//! A graph is Γ-connected when every forbidden mapping `h: E -> Γ` admits a
//! Γ-flow that differs from `h` on every edge. This crate decides the
//! property with three independent procedures (definitional, class
//! representatives, and the class-marking enumeration), emits exhaustively
//! checkable certificates for negative answers, and drives searches for
//! graphs that separate `Z4` from `Z2^2`.

pub mod classes;
pub mod error;
pub mod flows;
pub mod graph;
pub mod group;
pub mod search;
pub mod solver;

pub use classes::{ClassFunction, ClassKey};
pub use error::{Error, Result};
pub use flows::{EdgeVector, FlowSpace, SpanningStructure};
pub use graph::{Digraph, EdgeId, ThreadProfile, Vertex};
pub use group::{Element, Group};
pub use search::{discrepancy_search, SearchConfig, SearchSummary, Witness};
pub use solver::{decide, Algorithm, DecideOptions, Verdict};
