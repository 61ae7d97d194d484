//! Constructive, certified witnesses for large treewidth.
//!
//! The crate builds brambles, k-webs, grid-like minors and perfect brambles in
//! arbitrary undirected graphs, together with the tree decompositions that
//! certify the opposite side of each dichotomy. Every object produced here has
//! a validator that re-checks it from raw vertex data.
//!
//! Module map:
//! - [`graph`]: graph substrate, generators, I/O, vertex-disjoint paths.
//! - [`decomposition`]: tree decompositions, exact treewidth, approximation.
//! - [`separators`]: sparsity, sparse/balanced separators, the refinement loop.
//! - [`lp`]: exact rational simplex used by the flow and hitting-set LPs.
//! - [`bramble`]: brambles, order oracles, randomized and web-based constructions.
//! - [`web`]: k-webs and the web-or-decomposition dichotomy.
//! - [`gridlike`]: intersection graphs, topological clique minors, the LLL engine.
//! - [`perfect`]: perfect brambles and their structural checks.
//! - [`fpt`]: the dichotomy driver for subgraph-monotone parameters.
//! - [`witness`]: the certificate file format.

pub mod bramble;
pub mod config;
pub mod decomposition;
pub mod error;
pub mod fpt;
pub mod graph;
pub mod gridlike;
pub mod lp;
pub mod perfect;
pub mod separators;
pub mod web;
pub mod witness;

pub use config::Constants;
pub use error::{Error, Result};
pub use graph::{Graph, Path, VertexSet};
