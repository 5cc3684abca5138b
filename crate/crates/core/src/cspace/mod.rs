//! Extended configuration space.
//!
//! A configuration here is more than a joint vector: it is the robot pose
//! concatenated with the workspace parameters that position every movable
//! obstacle. Planning happens in a workspace *slice* (fixed `w`), but the
//! clearance model is trained over the whole extended space so one model
//! serves every obstacle placement.
//!
//! The module owns uniform seeded sampling, straight-line interpolation at
//! a fixed resolution, the robot-pose metric, and the [`Environment`]
//! bundle (arm + obstacles + bounds + clearance cap) together with its
//! JSON file format and the built-in environment catalog.

pub mod catalog;
mod env;
mod rng;

pub use catalog::{by_name, names, sealed_pocket};
pub use env::{load_environment, save_environment, Environment};
pub use rng::{derive_seed, mix64, Rng};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Robot pose plus workspace coordinates; the input of every clearance
/// query and of the learned model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedConfig {
    robot: Vec<f64>,
    workspace: Vec<f64>,
}

impl ExtendedConfig {
    pub fn new(robot: Vec<f64>, workspace: Vec<f64>) -> Self {
        ExtendedConfig { robot, workspace }
    }

    pub fn robot_only(robot: Vec<f64>) -> Self {
        ExtendedConfig {
            robot,
            workspace: Vec::new(),
        }
    }

    pub fn robot(&self) -> &[f64] {
        &self.robot
    }

    pub fn robot_mut(&mut self) -> &mut [f64] {
        &mut self.robot
    }

    pub fn workspace(&self) -> &[f64] {
        &self.workspace
    }

    pub fn dim(&self) -> usize {
        self.robot.len() + self.workspace.len()
    }

    /// Concatenated `[robot, workspace]` vector, the model input layout.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.robot);
        out.extend_from_slice(&self.workspace);
        out
    }

    /// Write the concatenated vector into `out`, which must have length
    /// `self.dim()`.
    pub fn flatten_into(&self, out: &mut [f64]) {
        let (r, w) = out.split_at_mut(self.robot.len());
        r.copy_from_slice(&self.robot);
        w.copy_from_slice(&self.workspace);
    }
}

/// Axis-aligned bounds for the extended space: robot intervals are the
/// joint limits, workspace intervals bound movable-obstacle anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedConfigSpace {
    robot_bounds: Vec<(f64, f64)>,
    workspace_bounds: Vec<(f64, f64)>,
}

impl ExtendedConfigSpace {
    /// Bounds must be finite with `lo <= hi`; a degenerate `lo == hi`
    /// interval pins that coordinate to a single value.
    pub fn new(
        robot_bounds: Vec<(f64, f64)>,
        workspace_bounds: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if robot_bounds.is_empty() {
            return Err(Error::InvalidConstruction(
                "extended space needs at least one robot dimension".into(),
            ));
        }
        for (what, bounds) in [("robot", &robot_bounds), ("workspace", &workspace_bounds)] {
            for (i, &(lo, hi)) in bounds.iter().enumerate() {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::InvalidConstruction(format!(
                        "{what} bound {i} [{lo}, {hi}] is not a finite increasing interval"
                    )));
                }
            }
        }
        Ok(ExtendedConfigSpace {
            robot_bounds,
            workspace_bounds,
        })
    }

    pub fn robot_bounds(&self) -> &[(f64, f64)] {
        &self.robot_bounds
    }

    pub fn workspace_bounds(&self) -> &[(f64, f64)] {
        &self.workspace_bounds
    }

    pub fn d_r(&self) -> usize {
        self.robot_bounds.len()
    }

    pub fn d_w(&self) -> usize {
        self.workspace_bounds.len()
    }

    pub fn d_e(&self) -> usize {
        self.d_r() + self.d_w()
    }

    /// Euclidean diameter of the robot block, used to scale minimum query
    /// separation.
    pub fn robot_diameter(&self) -> f64 {
        self.robot_bounds
            .iter()
            .map(|&(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Uniform draw over every dimension of the extended space.
    pub fn sample(&self, rng: &mut Rng) -> ExtendedConfig {
        let robot = self
            .robot_bounds
            .iter()
            .map(|&(lo, hi)| rng.uniform(lo, hi))
            .collect();
        let workspace = self
            .workspace_bounds
            .iter()
            .map(|&(lo, hi)| rng.uniform(lo, hi))
            .collect();
        ExtendedConfig { robot, workspace }
    }

    /// Uniform draw over the robot block with the workspace block pinned.
    pub fn sample_fixed_w(&self, rng: &mut Rng, w: &[f64]) -> Result<ExtendedConfig> {
        if w.len() != self.d_w() {
            return Err(Error::DimensionMismatch {
                context: "fixed workspace block",
                expected: self.d_w(),
                actual: w.len(),
            });
        }
        let robot = self
            .robot_bounds
            .iter()
            .map(|&(lo, hi)| rng.uniform(lo, hi))
            .collect();
        Ok(ExtendedConfig {
            robot,
            workspace: w.to_vec(),
        })
    }

    /// Convenience for workspace-free spaces.
    pub fn sample_robot(&self, rng: &mut Rng) -> ExtendedConfig {
        self.sample(rng)
    }
}

/// Euclidean distance over the robot pose block; workspace coordinates are
/// environment state, not something the planner moves.
pub fn config_distance(a: &ExtendedConfig, b: &ExtendedConfig) -> Result<f64> {
    if a.robot.len() != b.robot.len() {
        return Err(Error::DimensionMismatch {
            context: "config distance robot blocks",
            expected: a.robot.len(),
            actual: b.robot.len(),
        });
    }
    let sum: f64 = a
        .robot
        .iter()
        .zip(&b.robot)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum.sqrt())
}

/// Evenly spaced straight-line interpolation from `a` to `b` (inclusive)
/// with robot-pose spacing at most `step`.
///
/// Both endpoints are returned exactly; coincident endpoints give the
/// single point `[a]`. The two configurations must agree on the workspace
/// block, which is carried through unchanged.
pub fn interpolate(
    a: &ExtendedConfig,
    b: &ExtendedConfig,
    step: f64,
) -> Result<Vec<ExtendedConfig>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidConstruction(format!(
            "interpolation step {step} must be positive and finite"
        )));
    }
    if a.workspace != b.workspace {
        return Err(Error::WorkspaceMismatch);
    }
    let dist = config_distance(a, b)?;
    if dist == 0.0 {
        return Ok(vec![a.clone()]);
    }
    let intervals = (dist / step).ceil() as usize;
    let mut points = Vec::with_capacity(intervals + 1);
    points.push(a.clone());
    for k in 1..intervals {
        let t = k as f64 / intervals as f64;
        let robot = a
            .robot
            .iter()
            .zip(&b.robot)
            .map(|(&x, &y)| x + t * (y - x))
            .collect();
        points.push(ExtendedConfig {
            robot,
            workspace: a.workspace.clone(),
        });
    }
    points.push(b.clone());
    Ok(points)
}
