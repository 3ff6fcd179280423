//! Exact solvers for domination-type graph invariants.

pub mod domination;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod labeling;

pub use error::{Error, Result};
pub use graph::{cartesian_product, Graph, Product, ProductVertex, VertexSet};
