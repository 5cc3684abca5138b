//! Desk-scale motion planning for planar arms with a learned clearance model.
//!
//! The library covers the full loop: exact signed-clearance geometry for
//! capsule-link arms among convex obstacles, dataset collection over an
//! extended configuration space (robot pose plus movable-obstacle
//! coordinates), a small fully-connected clearance regressor trained from
//! scratch, a threshold classifier with a time-adaptive schedule, a batched
//! sampling planner that screens whole edge bundles through the regressor
//! and repairs the result against the exact oracle, and an amortization
//! calculator that says how many queries a trained model must serve before
//! it pays for its own data collection and training.
//!
//! Modules mirror that pipeline:
//!
//! * [`geometry`] - kinematics, obstacles, and the signed clearance oracle
//! * [`cspace`] - extended configuration space, environments, seeded sampling
//! * [`dataset`] - labeled clearance samples and their on-disk format
//! * [`clearancenet`] - the regressor: training, inference, input gradients
//! * [`classifier`] - thresholding, adaptive schedules, confusion counts
//! * [`planner`] - batched planner, baseline planner, and path repair
//! * [`tradeoff`] - training-amortization arithmetic
//! * [`bench`] - paired-query benchmark harness used by the CLI
//!
//! Everything is deterministic under a fixed seed: sampling, training,
//! and planning in iteration-clock mode reproduce bit-identical artifacts
//! across runs and across the `parallel` feature toggle.

pub mod bench;
pub mod classifier;
pub mod clearancenet;
pub mod cspace;
pub mod dataset;
pub mod error;
mod exec;
pub mod geometry;
pub mod planner;
pub mod tradeoff;

pub use error::{Error, Result};
