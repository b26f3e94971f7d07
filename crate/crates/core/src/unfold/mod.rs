//! Unfold trees, their planar layouts and overlap detection.
//!
//! An [`UnfoldTree`] spans the dual graph; its hinge edges stay attached
//! and all other edges are cut. [`layout`] places the root canonically and
//! every child by rotating it about its hinge into the plane, copying the
//! hinge endpoints from the parent so shared points are bit-identical.

mod layout;
mod overlap;
mod steepest;
mod tree;

pub use layout::{
    hinges_coincide, layout, max_edge_length_error, place_child, place_root, place_subtree_into,
    tri_area, update_subtrees, Layout2D, Tri,
};
pub use overlap::{
    count_overlaps, count_overlaps_brute_force, overlaps_among, subtree_overlap_check,
    triangles_overlap, OverlapIndex, OverlapSet,
};
pub use steepest::{initial_unfold_tree, random_unit_vector, steepest_edge_tree, steepness};
pub use tree::UnfoldTree;
