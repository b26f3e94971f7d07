//! Progressive mesh unfolding: simplify, unfold, repair overlaps, refine.

pub mod decimate;
pub mod error;
pub mod mesh;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod tabu;
pub mod unfold;
