//! Planar geometry: capsule-link arms, convex obstacles, and the exact
//! signed clearance oracle.
//!
//! An arm is a serial chain of capsules (segments with a radius) driven by
//! cumulative joint angles. Obstacles are convex CCW polygons, either static
//! or movable; a movable obstacle is repositioned by writing its anchor
//! point from the workspace block of an extended configuration.
//!
//! Clearance is the signed distance between the arm and everything it could
//! hit: positive when free, negative when penetrating, measured in meters
//! and clamped to `[-d_cap, +d_cap]`. Obstacle distance is evaluated at
//! evenly spaced proxy points along each link centerline, so the oracle
//! carries a known discretization error of half the proxy spacing.

use crate::cspace::{Environment, ExtendedConfig};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance below which consecutive-edge cross products count as collinear.
const CONVEXITY_TOL: f64 = 1e-9;

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product; positive when `other` is
    /// counter-clockwise from `self`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// A convex obstacle: CCW vertex loop plus a reference anchor used when the
/// obstacle is movable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexObstacle {
    vertices: Vec<Vec2>,
    anchor: Vec2,
}

impl ConvexObstacle {
    /// Build an obstacle, validating that the vertex loop is a strictly
    /// convex counter-clockwise polygon.
    pub fn new(vertices: Vec<Vec2>, anchor: Vec2) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        let mut area2 = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            area2 += a.cross(b);
        }
        if area2 <= 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "vertex loop is wound clockwise or degenerate (signed area {})",
                0.5 * area2
            )));
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let turn = (b - a).cross(c - b);
            if turn <= CONVEXITY_TOL {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {}..{} are reflex or collinear (turn {turn})",
                    i,
                    (i + 2) % n
                )));
            }
        }
        Ok(ConvexObstacle { vertices, anchor })
    }

    /// Build an obstacle whose anchor is the vertex centroid.
    pub fn from_vertices(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len().max(1) as f64;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for v in &vertices {
            cx += v.x;
            cy += v.y;
        }
        Self::new(vertices, Vec2::new(cx / n, cy / n))
    }

    /// Axis-aligned rectangle helper; corners given as opposite extremes.
    pub fn rect(lo: Vec2, hi: Vec2) -> Result<Self> {
        Self::from_vertices(vec![
            Vec2::new(lo.x, lo.y),
            Vec2::new(hi.x, lo.y),
            Vec2::new(hi.x, hi.y),
            Vec2::new(lo.x, hi.y),
        ])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn anchor(&self) -> Vec2 {
        self.anchor
    }

    /// Translation that carries the anchor onto `target`.
    pub fn offset_to(&self, target: Vec2) -> Vec2 {
        target - self.anchor
    }
}

/// One rigid capsule of an arm: centerline segment plus radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSegment {
    pub a: Vec2,
    pub b: Vec2,
    pub radius: f64,
}

/// A planar serial arm with capsule links and cumulative joint angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicChain {
    base: Vec2,
    link_lengths: Vec<f64>,
    link_radius: f64,
    joint_limits: Vec<(f64, f64)>,
    proxy_count: usize,
}

/// Default number of evenly spaced clearance proxy points per link.
pub const DEFAULT_PROXY_COUNT: usize = 8;

impl KinematicChain {
    pub fn new(
        base: Vec2,
        link_lengths: Vec<f64>,
        link_radius: f64,
        joint_limits: Vec<(f64, f64)>,
        proxy_count: usize,
    ) -> Result<Self> {
        if link_lengths.is_empty() {
            return Err(Error::InvalidConstruction("chain has no links".into()));
        }
        if link_lengths.len() != joint_limits.len() {
            return Err(Error::DimensionMismatch {
                context: "kinematic chain joint limits",
                expected: link_lengths.len(),
                actual: joint_limits.len(),
            });
        }
        for (i, &len) in link_lengths.iter().enumerate() {
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::InvalidConstruction(format!(
                    "link {i} length {len} is not positive and finite"
                )));
            }
        }
        if !(link_radius >= 0.0) || !link_radius.is_finite() {
            return Err(Error::InvalidConstruction(format!(
                "link radius {link_radius} is not a finite non-negative value"
            )));
        }
        for (i, &(lo, hi)) in joint_limits.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidConstruction(format!(
                    "joint {i} limits [{lo}, {hi}] are not an increasing interval"
                )));
            }
        }
        if proxy_count < 2 {
            return Err(Error::InvalidConstruction(format!(
                "proxy count {proxy_count} is below the minimum of 2"
            )));
        }
        Ok(KinematicChain {
            base,
            link_lengths,
            link_radius,
            joint_limits,
            proxy_count,
        })
    }

    pub fn dof(&self) -> usize {
        self.link_lengths.len()
    }

    pub fn base(&self) -> Vec2 {
        self.base
    }

    pub fn link_lengths(&self) -> &[f64] {
        &self.link_lengths
    }

    pub fn link_radius(&self) -> f64 {
        self.link_radius
    }

    pub fn joint_limits(&self) -> &[(f64, f64)] {
        &self.joint_limits
    }

    pub fn proxy_count(&self) -> usize {
        self.proxy_count
    }

    /// Total centerline length, the arm's reach from the base.
    pub fn reach(&self) -> f64 {
        self.link_lengths.iter().sum()
    }

    /// Largest centerline gap between adjacent proxy points over all links.
    /// The clearance oracle's discretization error is half this value.
    pub fn max_proxy_spacing(&self) -> f64 {
        let gaps = (self.proxy_count - 1) as f64;
        self.link_lengths.iter().fold(0.0, |m, &l| m.max(l / gaps))
    }

    /// Upper bound on how fast clearance can change per unit of extended
    /// configuration distance.
    pub fn clearance_lipschitz_bound(&self) -> f64 {
        self.reach() + 1.0
    }

    /// Clamp each joint of `joints` into its limit interval, in place.
    pub fn clamp_joints(&self, joints: &mut [f64]) {
        for (v, &(lo, hi)) in joints.iter_mut().zip(&self.joint_limits) {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Compute the capsule segments of `chain` at the given joint vector.
///
/// Joint `i` rotates everything from link `i` outward; absolute link
/// directions are the running sums of the joint angles.
pub fn forward_kinematics(chain: &KinematicChain, joints: &[f64]) -> Result<Vec<LinkSegment>> {
    if joints.len() != chain.dof() {
        return Err(Error::DimensionMismatch {
            context: "forward kinematics joint vector",
            expected: chain.dof(),
            actual: joints.len(),
        });
    }
    for (i, (&v, &(lo, hi))) in joints.iter().zip(&chain.joint_limits).enumerate() {
        if !(v >= lo && v <= hi) {
            return Err(Error::JointOutOfLimits {
                joint: i,
                value: v,
                lo,
                hi,
            });
        }
    }
    let mut segments = Vec::with_capacity(chain.dof());
    let mut angle = 0.0;
    let mut origin = chain.base;
    for (&theta, &len) in joints.iter().zip(&chain.link_lengths) {
        angle += theta;
        let tip = origin + Vec2::new(angle.cos(), angle.sin()) * len;
        segments.push(LinkSegment {
            a: origin,
            b: tip,
            radius: chain.link_radius,
        });
        origin = tip;
    }
    Ok(segments)
}

/// Distance from a point to a segment, zero when the point lies on it.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Signed distance from a point to a convex polygon: the distance to the
/// boundary, negated when the point lies inside. Exactly zero on the
/// boundary.
pub fn point_polygon_signed_distance(p: Vec2, poly: &ConvexObstacle) -> f64 {
    let verts = poly.vertices();
    let n = verts.len();
    let mut inside = true;
    let mut boundary = f64::INFINITY;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if (b - a).cross(p - a) < 0.0 {
            inside = false;
        }
        boundary = boundary.min(point_segment_distance(p, a, b));
    }
    if boundary == 0.0 {
        0.0
    } else if inside {
        -boundary
    } else {
        boundary
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// Whether two segments properly cross (interiors intersect transversally).
fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Minimum distance between two segments' centerlines, exactly zero when
/// they intersect.
///
/// In the plane the minimum for non-crossing segments is always realized at
/// an endpoint of one segment against the other, so four point-segment
/// distances cover every remaining case.
pub fn segment_segment_distance(s: &LinkSegment, t: &LinkSegment) -> f64 {
    if segments_cross(s.a, s.b, t.a, t.b) {
        return 0.0;
    }
    point_segment_distance(s.a, t.a, t.b)
        .min(point_segment_distance(s.b, t.a, t.b))
        .min(point_segment_distance(t.a, s.a, s.b))
        .min(point_segment_distance(t.b, s.a, s.b))
}

/// A signed clearance value in meters. Positive means collision-free.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Clearance(pub f64);

impl Clearance {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Strictly positive clearance; a configuration exactly on the contact
    /// boundary is treated as invalid.
    pub fn is_valid(self) -> bool {
        self.0 > 0.0
    }
}

/// Exact signed clearance of an extended configuration in `env`, clamped to
/// `[-d_cap, +d_cap]`.
///
/// The minimum runs over every link proxy point against every obstacle
/// (movable obstacles repositioned from the workspace block) and over every
/// non-adjacent link pair for self-collision. An environment with no
/// obstacles and no non-adjacent pairs saturates at `+d_cap`.
pub fn clearance(env: &Environment, cfg: &ExtendedConfig) -> Result<Clearance> {
    let chain = env.chain();
    let segments = forward_kinematics(chain, cfg.robot())?;
    let offsets = env.movable_offsets(cfg.workspace())?;
    let radius = chain.link_radius();
    let gaps = (chain.proxy_count() - 1) as f64;

    let mut d = f64::INFINITY;
    for seg in &segments {
        for k in 0..chain.proxy_count() {
            let t = k as f64 / gaps;
            let p = seg.a + (seg.b - seg.a) * t;
            for ob in env.static_obstacles() {
                d = d.min(point_polygon_signed_distance(p, ob) - radius);
            }
            for (ob, off) in env.movable_obstacles().iter().zip(&offsets) {
                d = d.min(point_polygon_signed_distance(p - *off, ob) - radius);
            }
        }
    }
    for i in 0..segments.len() {
        for j in (i + 2)..segments.len() {
            let center = segment_segment_distance(&segments[i], &segments[j]);
            d = d.min(center - 2.0 * radius);
        }
    }
    Ok(Clearance(d.clamp(-env.d_cap(), env.d_cap())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{Environment, ExtendedConfig, ExtendedConfigSpace, Rng};
    use approx::assert_relative_eq;

    fn unit_square() -> ConvexObstacle {
        ConvexObstacle::rect(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn polygon_rejects_too_few_vertices() {
        let r = ConvexObstacle::from_vertices(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::InvalidPolygon(_))));
    }

    #[test]
    fn polygon_rejects_clockwise_winding() {
        let r = ConvexObstacle::from_vertices(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0),
        ]);
        assert!(matches!(r, Err(Error::InvalidPolygon(_))));
    }

    #[test]
    fn polygon_rejects_collinear_vertices() {
        let r = ConvexObstacle::from_vertices(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 1.0),
        ]);
        assert!(matches!(r, Err(Error::InvalidPolygon(_))));
    }

    #[test]
    fn polygon_rejects_reflex_vertex() {
        let r = ConvexObstacle::from_vertices(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(0.2, 0.2),
            Vec2::new(0.0, 2.0),
        ]);
        assert!(matches!(r, Err(Error::InvalidPolygon(_))));
    }

    #[test]
    fn signed_distance_outside_inside_boundary() {
        let sq = unit_square();
        assert_relative_eq!(
            point_polygon_signed_distance(Vec2::new(2.0, 0.5), &sq),
            1.0
        );
        assert_relative_eq!(
            point_polygon_signed_distance(Vec2::new(0.5, 0.5), &sq),
            -0.5
        );
        assert_eq!(point_polygon_signed_distance(Vec2::new(1.0, 0.5), &sq), 0.0);
        assert_relative_eq!(
            point_polygon_signed_distance(Vec2::new(2.0, 2.0), &sq),
            std::f64::consts::SQRT_2
        );
        assert_relative_eq!(
            point_polygon_signed_distance(Vec2::new(0.1, 0.4), &sq),
            -0.1
        );
    }

    #[test]
    fn signed_distance_is_1_lipschitz() {
        let sq = unit_square();
        let mut rng = Rng::from_seed(7);
        for _ in 0..100_000 {
            let p = Vec2::new(rng.uniform(-2.0, 3.0), rng.uniform(-2.0, 3.0));
            let q = Vec2::new(rng.uniform(-2.0, 3.0), rng.uniform(-2.0, 3.0));
            let dp = point_polygon_signed_distance(p, &sq);
            let dq = point_polygon_signed_distance(q, &sq);
            let lhs = (dp - dq).abs();
            let rhs = p.dist(q);
            assert!(
                lhs <= rhs + 1e-12,
                "lipschitz violated: |{dp} - {dq}| > {rhs}"
            );
        }
    }

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> LinkSegment {
        LinkSegment {
            a: Vec2::new(ax, ay),
            b: Vec2::new(bx, by),
            radius: 0.0,
        }
    }

    #[test]
    fn segment_distance_crossing_is_exactly_zero() {
        let d = segment_segment_distance(&seg(-1.0, -1.0, 1.0, 1.0), &seg(-1.0, 1.0, 1.0, -1.0));
        assert_eq!(d, 0.0);
    }

    #[test]
    fn segment_distance_parallel() {
        let d = segment_segment_distance(&seg(0.0, 0.0, 1.0, 0.0), &seg(0.0, 0.5, 1.0, 0.5));
        assert_relative_eq!(d, 0.5);
    }

    #[test]
    fn segment_distance_offset_parallel_uses_endpoints() {
        let d = segment_segment_distance(&seg(0.0, 0.0, 1.0, 0.0), &seg(2.0, 1.0, 3.0, 1.0));
        assert_relative_eq!(d, std::f64::consts::SQRT_2);
    }

    #[test]
    fn segment_distance_degenerate_points() {
        let d = segment_segment_distance(&seg(0.0, 0.0, 0.0, 0.0), &seg(3.0, 4.0, 3.0, 4.0));
        assert_relative_eq!(d, 5.0);
    }

    #[test]
    fn segment_distance_is_symmetric_on_random_pairs() {
        let mut rng = Rng::from_seed(11);
        for _ in 0..10_000 {
            let s = seg(
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            );
            let t = seg(
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            );
            assert_eq!(
                segment_segment_distance(&s, &t),
                segment_segment_distance(&t, &s)
            );
        }
    }

    fn chain3() -> KinematicChain {
        KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0, 1.0, 1.0],
            0.05,
            vec![
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
            ],
            8,
        )
        .unwrap()
    }

    #[test]
    fn chain_rejects_zero_length_link() {
        let r = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0, 0.0],
            0.05,
            vec![(-1.0, 1.0), (-1.0, 1.0)],
            8,
        );
        assert!(matches!(r, Err(Error::InvalidConstruction(_))));
    }

    #[test]
    fn chain_rejects_inverted_limits() {
        let r = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0],
            0.05,
            vec![(1.0, -1.0)],
            8,
        );
        assert!(matches!(r, Err(Error::InvalidConstruction(_))));
    }

    #[test]
    fn fk_straight_chain_lies_on_x_axis() {
        let segs = forward_kinematics(&chain3(), &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(segs.len(), 3);
        assert_relative_eq!(segs[2].b.x, 3.0);
        assert_relative_eq!(segs[2].b.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fk_angles_are_cumulative() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let segs = forward_kinematics(&chain3(), &[half_pi, -half_pi, 0.0]).unwrap();
        // First link up, remaining two flat to the right of its tip.
        assert_relative_eq!(segs[0].b.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(segs[0].b.y, 1.0);
        assert_relative_eq!(segs[2].b.x, 2.0);
        assert_relative_eq!(segs[2].b.y, 1.0);
    }

    #[test]
    fn fk_rejects_out_of_limit_joint() {
        let r = forward_kinematics(&chain3(), &[0.0, 4.0, 0.0]);
        assert!(matches!(r, Err(Error::JointOutOfLimits { joint: 1, .. })));
    }

    #[test]
    fn fk_rejects_wrong_arity() {
        let r = forward_kinematics(&chain3(), &[0.0, 0.0]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    fn env_with(obstacles: Vec<ConvexObstacle>, chain: KinematicChain, d_cap: f64) -> Environment {
        let space = ExtendedConfigSpace::new(chain.joint_limits().to_vec(), vec![]).unwrap();
        Environment::new("test", chain, obstacles, vec![], space, d_cap, None).unwrap()
    }

    #[test]
    fn clearance_saturates_without_obstacles() {
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0],
            0.05,
            vec![(-3.0, 3.0)],
            8,
        )
        .unwrap();
        let env = env_with(vec![], chain, 0.5);
        let d = clearance(&env, &ExtendedConfig::robot_only(vec![0.0])).unwrap();
        assert_eq!(d.value(), 0.5);
        assert!(d.is_valid());
    }

    #[test]
    fn clearance_deep_penetration_clamps_to_minus_cap() {
        // Single link buried in a large box around the origin.
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0],
            0.05,
            vec![(-3.0, 3.0)],
            8,
        )
        .unwrap();
        let big = ConvexObstacle::rect(Vec2::new(-5.0, -5.0), Vec2::new(5.0, 5.0)).unwrap();
        let env = env_with(vec![big], chain, 0.5);
        let d = clearance(&env, &ExtendedConfig::robot_only(vec![0.0])).unwrap();
        assert_eq!(d.value(), -0.5);
        assert!(!d.is_valid());
    }

    #[test]
    fn clearance_zero_on_contact_is_invalid() {
        // Horizontal link of radius 0.05; box ceiling exactly 0.05 above it.
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0],
            0.05,
            vec![(-3.0, 3.0)],
            8,
        )
        .unwrap();
        let box_below = ConvexObstacle::rect(Vec2::new(-1.0, -1.0), Vec2::new(2.0, -0.05)).unwrap();
        let env = env_with(vec![box_below], chain, 1.0);
        let d = clearance(&env, &ExtendedConfig::robot_only(vec![0.0])).unwrap();
        assert_eq!(d.value(), 0.0);
        assert!(!d.is_valid());
    }

    #[test]
    fn clearance_detects_self_collision() {
        // Fold the chain back onto itself: link 3 lies on top of link 1.
        let pi = std::f64::consts::PI;
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0, 1.0, 1.0],
            0.05,
            vec![(-pi, pi), (-pi, pi), (-pi, pi)],
            8,
        )
        .unwrap();
        let env = env_with(vec![], chain, 1.0);
        let folded = ExtendedConfig::robot_only(vec![0.0, pi, 0.0]);
        let d = clearance(&env, &folded).unwrap();
        assert!(d.value() <= -0.1 + 1e-12, "folded clearance {}", d.value());

        let open = ExtendedConfig::robot_only(vec![0.0, 1.0, 0.0]);
        assert!(clearance(&env, &open).unwrap().is_valid());
    }

    #[test]
    fn clearance_touching_capsules_is_zero() {
        // Joints chosen so links 1 and 3 run parallel exactly 2r apart:
        // link 1 along x at y=0, link 3 along x at y=0.1 (r = 0.05).
        let pi = std::f64::consts::PI;
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0, 0.1, 1.0],
            0.05,
            vec![(-pi, pi), (-pi, pi), (-pi, pi)],
            8,
        )
        .unwrap();
        let cfg = ExtendedConfig::robot_only(vec![0.0, pi / 2.0, pi / 2.0]);
        let env = env_with(vec![], chain, 1.0);
        let d = clearance(&env, &cfg).unwrap();
        assert_relative_eq!(d.value(), 0.0, epsilon = 1e-12);
        assert!(!d.is_valid());
    }

    /// Independent dense-proxy reference oracle used to bound the
    /// discretization error of the production clearance.
    fn dense_clearance(env: &Environment, cfg: &ExtendedConfig, factor: usize) -> f64 {
        let chain = env.chain();
        let segs = forward_kinematics(chain, cfg.robot()).unwrap();
        let offs = env.movable_offsets(cfg.workspace()).unwrap();
        let count = (chain.proxy_count() - 1) * factor + 1;
        let mut d = f64::INFINITY;
        for s in &segs {
            for k in 0..count {
                let t = k as f64 / (count - 1) as f64;
                let p = s.a + (s.b - s.a) * t;
                for ob in env.static_obstacles() {
                    d = d.min(point_polygon_signed_distance(p, ob) - s.radius);
                }
                for (ob, off) in env.movable_obstacles().iter().zip(&offs) {
                    d = d.min(point_polygon_signed_distance(p - *off, ob) - s.radius);
                }
            }
        }
        for i in 0..segs.len() {
            for j in (i + 2)..segs.len() {
                d = d.min(segment_segment_distance(&segs[i], &segs[j]) - 2.0 * segs[i].radius);
            }
        }
        d.clamp(-env.d_cap(), env.d_cap())
    }

    #[test]
    fn clearance_close_to_dense_reference() {
        let pi = std::f64::consts::PI;
        let chain = chain3();
        let boxes = vec![
            ConvexObstacle::rect(Vec2::new(1.0, 0.3), Vec2::new(1.4, 2.0)).unwrap(),
            ConvexObstacle::rect(Vec2::new(1.0, -2.0), Vec2::new(1.4, -0.3)).unwrap(),
        ];
        let env = env_with(boxes, chain, 1.0);
        let tol = env.chain().max_proxy_spacing().max(1e-6);
        let mut rng = Rng::from_seed(42);
        let space = ExtendedConfigSpace::new(vec![(-pi, pi); 3], vec![]).unwrap();
        for _ in 0..300 {
            let cfg = space.sample_robot(&mut rng);
            let fast = clearance(&env, &cfg).unwrap().value();
            let dense = dense_clearance(&env, &cfg, 10);
            assert!(
                (fast - dense).abs() <= tol,
                "oracle gap {} exceeds tol {tol}",
                (fast - dense).abs()
            );
        }
    }

    #[test]
    fn clearance_movable_obstacle_follows_workspace_block() {
        let chain = KinematicChain::new(
            Vec2::new(0.0, 0.0),
            vec![1.0],
            0.05,
            vec![(-3.0, 3.0)],
            8,
        )
        .unwrap();
        let shape = ConvexObstacle::rect(Vec2::new(-0.1, -0.1), Vec2::new(0.1, 0.1)).unwrap();
        let space =
            ExtendedConfigSpace::new(vec![(-3.0, 3.0)], vec![(-2.0, 2.0), (-2.0, 2.0)]).unwrap();
        // d_cap well above the far distance so the raw value comes through.
        let env =
            Environment::new("movable-test", chain, vec![], vec![shape], space, 2.0, None).unwrap();

        // Obstacle far above the arm: clear. Obstacle on the arm: collision.
        let far = ExtendedConfig::new(vec![0.0], vec![0.5, 1.5]);
        let near = ExtendedConfig::new(vec![0.0], vec![0.5, 0.0]);
        assert!(clearance(&env, &far).unwrap().is_valid());
        assert!(!clearance(&env, &near).unwrap().is_valid());
        // Clearance to the far obstacle matches hand arithmetic:
        // box bottom at y=1.4, link centerline at y=0, radius 0.05.
        assert_relative_eq!(clearance(&env, &far).unwrap().value(), 1.4 - 0.05);
    }
}
