//! Planar domains standing for `Omega ∩ B_1`, with `0` on the boundary.

pub mod curve;
pub mod domain;
pub mod graph;
pub mod sampling;
pub mod segment;

pub use curve::{edge_intersection, segment_distance, BoundaryCurve, CurvePoint, Knot};
pub use domain::Domain;
pub use graph::{dmo_phi, make_graph_domain, GraphParametrization, GraphProfile, Smoothness};
pub use sampling::{boundary_sample, chord_arc_constant, dirichlet_sample, BoundarySample, ChordArc};
pub use segment::Segment;
