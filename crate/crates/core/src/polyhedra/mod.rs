//! Simplicial complexes over rational coordinates and the exact
//! linear-feasibility machinery behind every membership, intersection and
//! avoidance predicate.

mod complex;
pub mod lp;
pub mod polytope;

pub use complex::{
    CellId, Face, FaceId, Location, Simplex, SimplicialComplex, VertexId, Violation,
};
pub(crate) use complex::UnionFind;
pub use lp::{lp_feasible, Constraint, Feasibility, LinearSystem, Relation};
pub use polytope::{relint_meets_hull, 
    hull_dim, intersect_dim, interiors_overlap, overlap_outside_shared, point_in_hull,
    segment_avoids_sets, segment_hits, BoundingBox, OverlapWitness,
};
