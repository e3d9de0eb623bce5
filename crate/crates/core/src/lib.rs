//! Weighted tubular neighbourhoods of curves in R^n.
//!
//! A scene is a set of disjoint curve components, each carrying a positive
//! weight `mu`. The crate evaluates the weighted normal exponential map and
//! its fibers, computes the focal, double-critical, local and upper radii of
//! the scene, locates the singular graph and the collapse arcs, and runs the
//! parameter sweeps and tube samplings exposed by the `muthick` binary.

// NaN must fall into the rejecting branch of every range guard, which `!(x > 0.0)` does by design.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod expmap;
pub mod export;
pub mod geometry;
pub mod numeric;
pub mod presets;
pub mod radii;
pub mod scene;
pub mod singular;
pub mod tolerance;
pub mod vector;
