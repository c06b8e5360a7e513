//! Exact arithmetic for definite rational quaternion algebras: orders and
//! ideals, Bruhat-Tits trees, classifying graphs of genera of orders, and
//! the endpoint-count bounds checked on them.

pub mod algebra;
pub mod arith;
pub mod bounds;
pub mod error;
pub mod graph;
pub mod ideal;
pub mod lattice;
pub mod locus;
pub mod order;
pub mod report;
pub mod tree;

pub use algebra::{algebra_for_ramification, QuatElement, QuaternionAlgebra, RamifiedPlaces};
pub use bounds::{
    bound_verdicts, check_bipartite_bound, check_endpoint_bound, nailfork_reduce, BoundReport,
    MultiGraph, Selectivity,
};
pub use error::{Error, Result};
pub use graph::{
    build_classifying_graph, maximal_order_graph, ClassVertex, ClassifyingGraph, QuotientEdge,
};
pub use ideal::{connecting_ideal, eichler_order, embed_quadratic, QuatIdeal};
pub use lattice::QuatLattice;
pub use locus::{
    containment_locus, count_maximal_superorders, shift_check, LocusReport, LocusShape,
};
pub use order::{maximal_order, maximalize, order_from_generators, QuatOrder};
pub use report::{AlgebraSpec, RunConfig};
pub use tree::{neighbor_orders, tree_distance};
