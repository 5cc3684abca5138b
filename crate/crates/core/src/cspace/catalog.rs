//! Built-in environment catalog.
//!
//! Four desk-scale worlds spanning the difficulty axes the stack cares
//! about: a narrow passage, scattered clutter, movable obstacles (extended
//! workspace dimensions), and a deep constrained reach. All arms are based
//! at the origin with symmetric joint limits and no joint wrapping.

use crate::cspace::{Environment, ExtendedConfigSpace};
use crate::geometry::{ConvexObstacle, KinematicChain, Vec2};
use std::f64::consts::PI;

/// Names of the shipped environments, in canonical order.
pub fn names() -> [&'static str; 4] {
    ["narrow-gap", "clutter", "movable-duo", "deep-shelf"]
}

/// Look up a shipped environment by name.
pub fn by_name(name: &str) -> Option<Environment> {
    match name {
        "narrow-gap" => Some(narrow_gap()),
        "clutter" => Some(clutter()),
        "movable-duo" => Some(movable_duo()),
        "deep-shelf" => Some(deep_shelf()),
        _ => None,
    }
}

fn arm(lengths: Vec<f64>, radius: f64) -> KinematicChain {
    let dof = lengths.len();
    KinematicChain::new(
        Vec2::new(0.0, 0.0),
        lengths,
        radius,
        vec![(-PI, PI); dof],
        8,
    )
    .expect("catalog chain parameters are valid")
}

fn build(
    name: &str,
    chain: KinematicChain,
    static_obstacles: Vec<ConvexObstacle>,
    movable_obstacles: Vec<ConvexObstacle>,
    workspace_bounds: Vec<(f64, f64)>,
    d_cap: f64,
) -> Environment {
    let space = ExtendedConfigSpace::new(chain.joint_limits().to_vec(), workspace_bounds)
        .expect("catalog bounds are valid");
    Environment::new(
        name,
        chain,
        static_obstacles,
        movable_obstacles,
        space,
        d_cap,
        None,
    )
    .expect("catalog environment is consistent")
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> ConvexObstacle {
    ConvexObstacle::rect(Vec2::new(x0, y0), Vec2::new(x1, y1))
        .expect("catalog rectangle is valid")
}

/// Three-link arm that must thread a slot between two tall boxes.
pub fn narrow_gap() -> Environment {
    let chain = arm(vec![1.0, 1.0, 1.0], 0.06);
    let obstacles = vec![
        rect(1.05, 0.22, 1.45, 1.9),
        rect(1.05, -1.9, 1.45, -0.22),
    ];
    build("narrow-gap", chain, obstacles, vec![], vec![], 0.5)
}

/// Five-link arm among five scattered convex obstacles.
pub fn clutter() -> Environment {
    let chain = arm(vec![0.35; 5], 0.04);
    let obstacles = vec![
        rect(0.75, 0.62, 0.95, 0.82),
        ConvexObstacle::from_vertices(vec![
            Vec2::new(-0.82, 0.48),
            Vec2::new(-0.62, 0.48),
            Vec2::new(-0.72, 0.72),
        ])
        .expect("catalog triangle is valid"),
        rect(-1.0, -0.82, -0.8, -0.62),
        ConvexObstacle::from_vertices(
            (0..5)
                .map(|k| {
                    let a = -PI / 2.0 + 2.0 * PI * k as f64 / 5.0;
                    Vec2::new(0.85 + 0.12 * a.cos(), -0.67 + 0.12 * a.sin())
                })
                .collect(),
        )
        .expect("catalog pentagon is valid"),
        rect(1.23, -0.12, 1.47, 0.12),
    ];
    build("clutter", chain, obstacles, vec![], vec![], 0.4)
}

/// Three-link arm with two movable obstacles; the workspace block holds
/// both anchor points, so the extended space has four extra dimensions.
pub fn movable_duo() -> Environment {
    let chain = arm(vec![0.8, 0.8, 0.8], 0.05);
    let square = ConvexObstacle::from_vertices(vec![
        Vec2::new(-0.15, -0.15),
        Vec2::new(0.15, -0.15),
        Vec2::new(0.15, 0.15),
        Vec2::new(-0.15, 0.15),
    ])
    .expect("catalog square is valid");
    let triangle = ConvexObstacle::from_vertices(vec![
        Vec2::new(-0.18, -0.12),
        Vec2::new(0.18, -0.12),
        Vec2::new(0.0, 0.2),
    ])
    .expect("catalog triangle is valid");
    let anchor_bounds = vec![
        (0.4, 1.8),
        (-1.2, 1.2),
        (0.4, 1.8),
        (-1.2, 1.2),
    ];
    build(
        "movable-duo",
        chain,
        vec![],
        vec![square, triangle],
        anchor_bounds,
        0.5,
    )
}

/// Five-link arm reaching into a shelf: two close parallel walls closed by
/// a back panel.
pub fn deep_shelf() -> Environment {
    let chain = arm(vec![0.35; 5], 0.035);
    let obstacles = vec![
        rect(0.8, 0.24, 1.55, 0.36),
        rect(0.8, -0.36, 1.55, -0.24),
        rect(1.55, -0.36, 1.67, 0.36),
    ];
    build("deep-shelf", chain, obstacles, vec![], vec![], 0.4)
}

/// Pathological single-link world whose free space is disconnected: two
/// blockers pin the link near the origin angle, so a goal beyond them is
/// individually valid but unreachable. Used by the test suites to exercise
/// honest failure reporting; not part of [`names`].
pub fn sealed_pocket() -> Environment {
    let chain = arm(vec![1.0], 0.05);
    let obstacles = vec![
        rect(0.172, 0.4346, 0.372, 0.6346),
        rect(0.172, -0.6346, 0.372, -0.4346),
    ];
    build("sealed-pocket", chain, obstacles, vec![], vec![], 0.5)
}
