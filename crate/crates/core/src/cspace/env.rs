//! The environment bundle and its JSON file format.

use crate::classifier::ScheduleSpec;
use crate::cspace::{ExtendedConfig, ExtendedConfigSpace};
use crate::error::{Error, Result};
use crate::geometry::{self, ConvexObstacle, KinematicChain, Vec2, DEFAULT_PROXY_COUNT};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A planning world: one arm, static obstacles, movable obstacles whose
/// anchors are driven by the workspace block, the extended-space bounds,
/// and the clearance saturation cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    name: String,
    chain: KinematicChain,
    static_obstacles: Vec<ConvexObstacle>,
    movable_obstacles: Vec<ConvexObstacle>,
    space: ExtendedConfigSpace,
    d_cap: f64,
    schedule: Option<ScheduleSpec>,
}

impl Environment {
    pub fn new(
        name: impl Into<String>,
        chain: KinematicChain,
        static_obstacles: Vec<ConvexObstacle>,
        movable_obstacles: Vec<ConvexObstacle>,
        space: ExtendedConfigSpace,
        d_cap: f64,
        schedule: Option<ScheduleSpec>,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidConstruction("environment name is empty".into()));
        }
        if space.d_r() != chain.dof() || space.robot_bounds() != chain.joint_limits() {
            return Err(Error::InvalidConstruction(format!(
                "space robot bounds do not match the chain's {} joint limits",
                chain.dof()
            )));
        }
        if space.d_w() != 2 * movable_obstacles.len() {
            return Err(Error::DimensionMismatch {
                context: "workspace bounds (two per movable obstacle)",
                expected: 2 * movable_obstacles.len(),
                actual: space.d_w(),
            });
        }
        if !(d_cap > 0.0) || !d_cap.is_finite() {
            return Err(Error::InvalidConstruction(format!(
                "clearance cap {d_cap} must be positive and finite"
            )));
        }
        if let Some(s) = &schedule {
            s.validate()?;
        }
        Ok(Environment {
            name,
            chain,
            static_obstacles,
            movable_obstacles,
            space,
            d_cap,
            schedule,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chain(&self) -> &KinematicChain {
        &self.chain
    }

    pub fn static_obstacles(&self) -> &[ConvexObstacle] {
        &self.static_obstacles
    }

    pub fn movable_obstacles(&self) -> &[ConvexObstacle] {
        &self.movable_obstacles
    }

    pub fn space(&self) -> &ExtendedConfigSpace {
        &self.space
    }

    pub fn d_cap(&self) -> f64 {
        self.d_cap
    }

    pub fn d_r(&self) -> usize {
        self.space.d_r()
    }

    pub fn d_w(&self) -> usize {
        self.space.d_w()
    }

    pub fn d_e(&self) -> usize {
        self.space.d_e()
    }

    /// Threshold schedule to use for planning in this environment; the
    /// built-in default applies when the file or builder did not override it.
    pub fn schedule_spec(&self) -> ScheduleSpec {
        self.schedule.clone().unwrap_or_default()
    }

    /// Translation offsets that carry each movable obstacle's anchor onto
    /// its position in `w`.
    pub fn movable_offsets(&self, w: &[f64]) -> Result<Vec<Vec2>> {
        if w.len() != self.d_w() {
            return Err(Error::DimensionMismatch {
                context: "workspace block",
                expected: self.d_w(),
                actual: w.len(),
            });
        }
        Ok(self
            .movable_obstacles
            .iter()
            .enumerate()
            .map(|(k, ob)| ob.offset_to(Vec2::new(w[2 * k], w[2 * k + 1])))
            .collect())
    }

    /// Exact validity: clearance strictly positive.
    pub fn is_valid(&self, cfg: &ExtendedConfig) -> Result<bool> {
        Ok(geometry::clearance(self, cfg)?.is_valid())
    }

    /// Exact signed clearance; forwards to the geometry oracle.
    pub fn clearance(&self, cfg: &ExtendedConfig) -> Result<geometry::Clearance> {
        geometry::clearance(self, cfg)
    }
}

fn default_proxy_count() -> usize {
    DEFAULT_PROXY_COUNT
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    base: [f64; 2],
    link_lengths: Vec<f64>,
    link_radius: f64,
    joint_limits: Vec<[f64; 2]>,
    #[serde(default = "default_proxy_count")]
    proxy_count: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleFile {
    vertices: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvFile {
    name: String,
    chain: ChainFile,
    #[serde(default)]
    static_obstacles: Vec<ObstacleFile>,
    #[serde(default)]
    movable_obstacles: Vec<ObstacleFile>,
    #[serde(default)]
    workspace_bounds: Vec<[f64; 2]>,
    d_cap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schedule: Option<ScheduleSpec>,
}

fn obstacle_from_file(ob: ObstacleFile) -> Result<ConvexObstacle> {
    ConvexObstacle::from_vertices(ob.vertices.into_iter().map(|[x, y]| Vec2::new(x, y)).collect())
}

/// Load an environment from its JSON description.
///
/// Parse errors carry the line and column; semantic errors name the field
/// that failed validation. Movable obstacles are anchored at their vertex
/// centroid.
pub fn load_environment(path: impl AsRef<Path>) -> Result<Environment> {
    let text = std::fs::read_to_string(path)?;
    let file: EnvFile = serde_json::from_str(&text)?;
    environment_from_file(file)
}

fn environment_from_file(file: EnvFile) -> Result<Environment> {
    let chain = KinematicChain::new(
        Vec2::new(file.chain.base[0], file.chain.base[1]),
        file.chain.link_lengths,
        file.chain.link_radius,
        file.chain.joint_limits.iter().map(|&[lo, hi]| (lo, hi)).collect(),
        file.chain.proxy_count,
    )?;
    let static_obstacles = file
        .static_obstacles
        .into_iter()
        .map(obstacle_from_file)
        .collect::<Result<Vec<_>>>()?;
    let movable_obstacles = file
        .movable_obstacles
        .into_iter()
        .map(obstacle_from_file)
        .collect::<Result<Vec<_>>>()?;
    let space = ExtendedConfigSpace::new(
        chain.joint_limits().to_vec(),
        file.workspace_bounds.iter().map(|&[lo, hi]| (lo, hi)).collect(),
    )?;
    Environment::new(
        file.name,
        chain,
        static_obstacles,
        movable_obstacles,
        space,
        file.d_cap,
        file.schedule,
    )
}

/// Write an environment back to its JSON file form.
pub fn save_environment(path: impl AsRef<Path>, env: &Environment) -> Result<()> {
    let file = EnvFile {
        name: env.name.clone(),
        chain: ChainFile {
            base: [env.chain.base().x, env.chain.base().y],
            link_lengths: env.chain.link_lengths().to_vec(),
            link_radius: env.chain.link_radius(),
            joint_limits: env
                .chain
                .joint_limits()
                .iter()
                .map(|&(lo, hi)| [lo, hi])
                .collect(),
            proxy_count: env.chain.proxy_count(),
        },
        static_obstacles: env
            .static_obstacles
            .iter()
            .map(|ob| ObstacleFile {
                vertices: ob.vertices().iter().map(|v| [v.x, v.y]).collect(),
            })
            .collect(),
        movable_obstacles: env
            .movable_obstacles
            .iter()
            .map(|ob| ObstacleFile {
                vertices: ob.vertices().iter().map(|v| [v.x, v.y]).collect(),
            })
            .collect(),
        workspace_bounds: env
            .space
            .workspace_bounds()
            .iter()
            .map(|&(lo, hi)| [lo, hi])
            .collect(),
        d_cap: env.d_cap,
        schedule: env.schedule.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
