//! Weighted planar clusters bounded by circular arcs.
//!
//! The crate computes exact areas and weighted perimeters of arc-bounded
//! clusters, builds near-optimal clusters around tangent disk packings and the
//! weighted double bubble, checks curvature-deficit isoperimetric bounds and
//! searches for disk packings with many tangencies.

pub mod arc;
pub mod cluster;
pub mod error;
pub mod isoperimetry;
pub mod numeric;
pub mod point;
pub mod recovery;
pub mod render;
pub mod sticky;
pub mod sweep;

pub use arc::{ChordArc, RadialProfile};
pub use cluster::{Cluster, Segment, SegmentGeometry, WeightMatrix};
pub use error::{Error, Result};
pub use point::{Point, RigidMotion};
pub use sticky::{ContactGraph, DiskConfiguration};

