//! Mapper-on-graphs: property-preserving topological summaries of weighted
//! undirected graphs.
//!
//! The pipeline is lens → cover → pullback → nerve → filter:
//!
//! 1. a scalar [`lens`] is computed on the nodes and min-max normalized to `[0, 1]`;
//! 2. the unit interval is covered by overlapping open intervals ([`cover`]);
//! 3. each interval's preimage is split into connected components, which become
//!    the summary nodes;
//! 4. two summary nodes are joined when their member sets intersect
//!    (the 1-skeleton of the nerve), see [`mapper`].
//!
//! [`layout`] places either graph in the plane and [`render`] writes SVG.

pub mod cover;
pub mod generators;
pub mod graph;
pub mod layout;
pub mod lens;
pub mod mapper;
pub mod render;
