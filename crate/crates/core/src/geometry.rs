//! Scene geometry: the working domain, the pinned inclusion and the boundary
//! singularity data.
//!
//! A scene is a convex domain `Omega` containing a strictly interior convex
//! inclusion `omega`. The pinning weight is
//!
//! ```text
//!             b      inside the open inclusion,
//!   a(x)  =
//!             1      everywhere else (including the inclusion boundary).
//! ```
//!
//! Balls are the first-class body; polytopes are accepted for
//! experimentation and validated with a warning because a flat face breaks
//! the strict-convexity assumptions the geodesic classification relies on.

use crate::error::{Error, Result};
use crate::vec3::{vec3, Vec3};
use serde::{Deserialize, Serialize};

/// Closed halfspace `{ x : normal . x <= offset }` with a unit normal.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Halfspace {
    pub normal: Vec3,
    pub offset: f64,
}

impl From<[f64; 4]> for Halfspace {
    fn from(a: [f64; 4]) -> Self {
        Halfspace {
            normal: vec3(a[0], a[1], a[2]),
            offset: a[3],
        }
    }
}

impl From<Halfspace> for [f64; 4] {
    fn from(h: Halfspace) -> Self {
        [h.normal.x, h.normal.y, h.normal.z, h.offset]
    }
}

/// A bounded convex body.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConvexBody {
    Ball { center: Vec3, radius: f64 },
    Polytope { halfspaces: Vec<Halfspace> },
}

/// Interval of a parametrized segment, used when clipping against bodies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClipInterval {
    pub t0: f64,
    pub t1: f64,
}

const UNIT_NORMAL_TOL: f64 = 1e-12;
const MEMBERSHIP_TOL: f64 = 1e-9;

impl ConvexBody {
    pub fn ball(center: Vec3, radius: f64) -> ConvexBody {
        ConvexBody::Ball { center, radius }
    }

    /// Structural validation of the body on its own.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexBody::Ball { center, radius } => {
                if !center.is_finite() || !radius.is_finite() {
                    return Err(Error::InvalidScene("ball has non-finite data".into()));
                }
                if *radius <= 0.0 {
                    return Err(Error::InvalidScene(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                Ok(())
            }
            ConvexBody::Polytope { halfspaces } => {
                if halfspaces.len() < 4 {
                    return Err(Error::InvalidScene(format!(
                        "a solid polytope needs at least 4 halfspaces, got {}",
                        halfspaces.len()
                    )));
                }
                for (i, h) in halfspaces.iter().enumerate() {
                    if !h.normal.is_finite() || !h.offset.is_finite() {
                        return Err(Error::InvalidScene(format!(
                            "halfspace {i} has non-finite data"
                        )));
                    }
                    if (h.normal.norm() - 1.0).abs() > UNIT_NORMAL_TOL {
                        return Err(Error::InvalidScene(format!(
                            "halfspace {i} normal is not unit length (|n|={})",
                            h.normal.norm()
                        )));
                    }
                }
                if !self.is_bounded() {
                    return Err(Error::InvalidScene("polytope is unbounded".into()));
                }
                let (c, margin) = self.inner_point();
                if margin <= MEMBERSHIP_TOL {
                    return Err(Error::InvalidScene(format!(
                        "polytope has empty interior (best margin {margin:.3e} at {c:?})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Bounded iff the recession cone is trivial, i.e. every direction is
    /// blocked by some face. Checked on a direction sample plus local
    /// refinement of the worst direction.
    fn is_bounded(&self) -> bool {
        let ConvexBody::Polytope { halfspaces } = self else {
            return true;
        };
        let mut worst = f64::INFINITY;
        let mut worst_dir = vec3(1.0, 0.0, 0.0);
        for u in sphere_directions(200) {
            let block = halfspaces
                .iter()
                .map(|h| h.normal.dot(u))
                .fold(f64::NEG_INFINITY, f64::max);
            if block < worst {
                worst = block;
                worst_dir = u;
            }
        }
        // sharpen the candidate escape direction
        let f = |p: &[f64]| {
            let d = vec3(p[0], p[1], p[2]);
            let n = d.norm();
            if n < 1e-9 {
                return f64::INFINITY;
            }
            let d = d / n;
            halfspaces
                .iter()
                .map(|h| h.normal.dot(d))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let (_, refined) = crate::numerics::nelder_mead(
            f,
            &[worst_dir.x, worst_dir.y, worst_dir.z],
            0.3,
            1e-12,
            400,
        );
        refined.min(worst) > 1e-7
    }

    /// A point well inside the body together with its margin
    /// `min_j (offset_j - n_j . x)` (for balls: `radius - |x - center|`).
    pub fn inner_point(&self) -> (Vec3, f64) {
        match self {
            ConvexBody::Ball { center, radius } => (*center, *radius),
            ConvexBody::Polytope { halfspaces } => {
                let margin = |x: Vec3| {
                    halfspaces
                        .iter()
                        .map(|h| h.offset - h.normal.dot(x))
                        .fold(f64::INFINITY, f64::min)
                };
                // maximize the concave margin from a few starts
                let mut best = (Vec3::ZERO, margin(Vec3::ZERO));
                for start in [
                    Vec3::ZERO,
                    vec3(0.5, 0.5, 0.5),
                    vec3(-0.5, 0.3, 0.1),
                    vec3(1.0, -1.0, 0.5),
                ] {
                    let f = |p: &[f64]| -margin(vec3(p[0], p[1], p[2]));
                    let (p, neg) = crate::numerics::nelder_mead(
                        f,
                        &[start.x, start.y, start.z],
                        0.7,
                        1e-14,
                        2000,
                    );
                    if -neg > best.1 {
                        best = (vec3(p[0], p[1], p[2]), -neg);
                    }
                }
                best
            }
        }
    }

    pub fn contains_open(&self, x: Vec3) -> bool {
        match self {
            ConvexBody::Ball { center, radius } => x.dist(*center) < *radius,
            ConvexBody::Polytope { halfspaces } => {
                halfspaces.iter().all(|h| h.normal.dot(x) < h.offset)
            }
        }
    }

    pub fn contains_closed(&self, x: Vec3) -> bool {
        match self {
            ConvexBody::Ball { center, radius } => x.dist(*center) <= *radius + MEMBERSHIP_TOL,
            ConvexBody::Polytope { halfspaces } => halfspaces
                .iter()
                .all(|h| h.normal.dot(x) <= h.offset + MEMBERSHIP_TOL),
        }
    }

    /// Euclidean distance from `x` to the closure (0 inside).
    pub fn distance_to_closure(&self, x: Vec3) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => (x.dist(*center) - radius).max(0.0),
            ConvexBody::Polytope { .. } => {
                if self.contains_closed(x) {
                    0.0
                } else {
                    x.dist(self.project_closure(x))
                }
            }
        }
    }

    /// Signed distance to the boundary: negative inside, positive outside.
    pub fn signed_distance(&self, x: Vec3) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => x.dist(*center) - radius,
            ConvexBody::Polytope { halfspaces } => {
                let worst = halfspaces
                    .iter()
                    .map(|h| h.normal.dot(x) - h.offset)
                    .fold(f64::NEG_INFINITY, f64::max);
                if worst <= 0.0 {
                    worst // inside: min face slack (exact, the inscribed-ball argument)
                } else {
                    self.distance_to_closure(x)
                }
            }
        }
    }

    /// Nearest point of the closed body (projection). For interior points
    /// this is `x` itself.
    pub fn project_closure(&self, x: Vec3) -> Vec3 {
        match self {
            ConvexBody::Ball { center, radius } => {
                let d = x - *center;
                let n = d.norm();
                if n <= *radius {
                    x
                } else {
                    *center + d * (*radius / n)
                }
            }
            ConvexBody::Polytope { halfspaces } => {
                if self.contains_closed(x) {
                    return x;
                }
                // Dykstra's alternating projections onto the halfspaces.
                let m = halfspaces.len();
                let mut p = x;
                let mut corr = vec![Vec3::ZERO; m];
                for _ in 0..4000 {
                    let mut moved = 0.0;
                    for (j, h) in halfspaces.iter().enumerate() {
                        let y = p + corr[j];
                        let excess = h.normal.dot(y) - h.offset;
                        let q = if excess > 0.0 { y - h.normal * excess } else { y };
                        corr[j] = y - q;
                        moved += p.dist(q);
                        p = q;
                    }
                    if moved < 1e-14 {
                        break;
                    }
                }
                p
            }
        }
    }

    /// Nearest boundary point. Interior points project to the closest face
    /// (ball: radial). A point exactly at a ball center maps to `center +
    /// radius * e_x` by convention.
    pub fn project_boundary(&self, x: Vec3) -> Vec3 {
        match self {
            ConvexBody::Ball { center, radius } => {
                let d = x - *center;
                match d.try_normalize(1e-15) {
                    Some(u) => *center + u * *radius,
                    None => *center + vec3(*radius, 0.0, 0.0),
                }
            }
            ConvexBody::Polytope { halfspaces } => {
                if !self.contains_closed(x) {
                    return self.project_closure(x);
                }
                // interior: drop onto the face with the least slack; the
                // inscribed ball of radius min-slack guarantees the foot is
                // a genuine boundary point
                let mut best = (f64::INFINITY, x);
                for h in halfspaces {
                    let slack = h.offset - h.normal.dot(x);
                    if slack < best.0 {
                        best = (slack, x + h.normal * slack);
                    }
                }
                best.1
            }
        }
    }

    /// Parameter interval of `P + t (Q - P)`, `t` in `[0,1]`, lying inside
    /// the open body, or `None` when the segment misses it.
    pub fn clip_segment(&self, p: Vec3, q: Vec3) -> Option<ClipInterval> {
        match self {
            ConvexBody::Ball { center, radius } => {
                let d = q - p;
                let f = p - *center;
                let a = d.norm_sq();
                if a == 0.0 {
                    return None;
                }
                let b = 2.0 * f.dot(d);
                let c = f.norm_sq() - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc <= 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                let t0 = ((-b - s) / (2.0 * a)).max(0.0);
                let t1 = ((-b + s) / (2.0 * a)).min(1.0);
                (t1 > t0).then_some(ClipInterval { t0, t1 })
            }
            ConvexBody::Polytope { halfspaces } => {
                let d = q - p;
                let (mut t0, mut t1) = (0.0f64, 1.0f64);
                for h in halfspaces {
                    let nd = h.normal.dot(d);
                    let np = h.normal.dot(p) - h.offset;
                    if nd.abs() < 1e-300 {
                        if np > 0.0 {
                            return None;
                        }
                    } else {
                        let t = -np / nd;
                        if nd > 0.0 {
                            t1 = t1.min(t);
                        } else {
                            t0 = t0.max(t);
                        }
                    }
                    if t0 >= t1 {
                        return None;
                    }
                }
                Some(ClipInterval { t0, t1 })
            }
        }
    }

    /// Length of `[p, q]` inside the open body.
    pub fn segment_inside_length(&self, p: Vec3, q: Vec3) -> f64 {
        match self.clip_segment(p, q) {
            Some(iv) => (iv.t1 - iv.t0) * p.dist(q),
            None => 0.0,
        }
    }

    /// Exit parameter `t > 0` of the ray `origin + t dir` (origin strictly
    /// inside, `dir` unit).
    pub fn ray_exit(&self, origin: Vec3, dir: Vec3) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => {
                let f = origin - *center;
                let b = 2.0 * f.dot(dir);
                let c = f.norm_sq() - radius * radius;
                let disc = (b * b - 4.0 * c).max(0.0);
                (-b + disc.sqrt()) / 2.0
            }
            ConvexBody::Polytope { halfspaces } => {
                let mut t = f64::INFINITY;
                for h in halfspaces {
                    let nd = h.normal.dot(dir);
                    if nd > 1e-300 {
                        t = t.min((h.offset - h.normal.dot(origin)) / nd);
                    }
                }
                t
            }
        }
    }

    /// Support value `max { u . x : x in body }` (u unit). Exact for balls;
    /// projected ascent for polytopes.
    pub fn support(&self, u: Vec3) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => center.dot(u) + radius,
            ConvexBody::Polytope { .. } => {
                let (anchor, _) = self.inner_point();
                let mut x = anchor;
                let mut step = 1.0;
                for _ in 0..400 {
                    let y = self.project_closure(x + u * step);
                    if u.dot(y) <= u.dot(x) + 1e-15 {
                        step *= 0.5;
                        if step < 1e-13 {
                            break;
                        }
                    } else {
                        x = y;
                    }
                }
                u.dot(x)
            }
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        match self {
            ConvexBody::Ball { center, radius } => (
                *center - vec3(*radius, *radius, *radius),
                *center + vec3(*radius, *radius, *radius),
            ),
            ConvexBody::Polytope { .. } => {
                let axes = [
                    vec3(1.0, 0.0, 0.0),
                    vec3(0.0, 1.0, 0.0),
                    vec3(0.0, 0.0, 1.0),
                ];
                let hi = axes.map(|u| self.support(u));
                let lo = axes.map(|u| -self.support(-u));
                (vec3(lo[0], lo[1], lo[2]), vec3(hi[0], hi[1], hi[2]))
            }
        }
    }

    /// Largest euclidean distance from `x` to the body (ball exact,
    /// polytope via projected ascent of the distance).
    pub fn max_distance_from(&self, x: Vec3) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => x.dist(*center) + radius,
            ConvexBody::Polytope { .. } => {
                let mut best = 0.0f64;
                for u in sphere_directions(64) {
                    // support point in direction u is a candidate extreme point
                    let s = self.support(u);
                    let (anchor, _) = self.inner_point();
                    let p = self.project_closure(anchor + u * (s - u.dot(anchor) + 1.0));
                    best = best.max(x.dist(p));
                }
                best
            }
        }
    }

    /// Minkowski-style enlargement: balls grow by radius, polytopes by
    /// offsets. For polytopes this is the outer (face-pushed) enlargement;
    /// distance queries against it are exact up to corner rounding.
    pub fn dilate(&self, delta: f64) -> ConvexBody {
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball {
                center: *center,
                radius: radius + delta,
            },
            ConvexBody::Polytope { halfspaces } => ConvexBody::Polytope {
                halfspaces: halfspaces
                    .iter()
                    .map(|h| Halfspace {
                        normal: h.normal,
                        offset: h.offset + delta,
                    })
                    .collect(),
            },
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, ConvexBody::Ball { .. })
    }
}

/// Deterministic quasi-uniform unit directions (spherical Fibonacci).
pub fn sphere_directions(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            vec3(r * th.cos(), r * th.sin(), z)
        })
        .collect()
}

/// Signed boundary singularities of the boundary data; `positive` and
/// `negative` must be balanced and lie on the domain boundary.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SingularityData {
    pub positive: Vec<Vec3>,
    pub negative: Vec<Vec3>,
}

impl SingularityData {
    pub fn new(positive: Vec<Vec3>, negative: Vec<Vec3>) -> Self {
        SingularityData { positive, negative }
    }

    pub fn k(&self) -> usize {
        self.positive.len()
    }

    /// All 2k points, positives first.
    pub fn all_points(&self) -> Vec<Vec3> {
        self.positive
            .iter()
            .chain(self.negative.iter())
            .copied()
            .collect()
    }
}

/// A pinned-medium scene. `domain` is the ambient body (serialized as
/// `omega`), `inclusion` the pinned region, `b` the pinning value in (0,1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scene {
    #[serde(rename = "omega")]
    pub domain: ConvexBody,
    pub inclusion: ConvexBody,
    pub b: f64,
    #[serde(default)]
    pub singularities: SingularityData,
}

/// Output of `validate_scene`.
#[derive(Clone, Debug, Serialize)]
pub struct SceneReport {
    /// Euclidean gap between the inclusion boundary and the domain boundary.
    pub clearance: f64,
    /// Reference dilation scale: 1e-2 * min(1, clearance).
    pub delta0: f64,
    pub k: usize,
    pub warnings: Vec<String>,
}

impl Scene {
    /// The standard testbed: unit ball domain, concentric ball inclusion of
    /// radius `r0`, one singularity pair at the poles of the x axis.
    pub fn symmetric_pair(r0: f64, b: f64) -> Scene {
        Scene {
            domain: ConvexBody::ball(Vec3::ZERO, 1.0),
            inclusion: ConvexBody::ball(Vec3::ZERO, r0),
            b,
            singularities: SingularityData::new(vec![vec3(1.0, 0.0, 0.0)], vec![vec3(-1.0, 0.0, 0.0)]),
        }
    }

    /// Pinning weight, `a(x)`: `b` strictly inside the inclusion, else 1
    /// (the inclusion boundary counts as outside).
    pub fn pinning(&self, x: Vec3) -> f64 {
        if self.inclusion.contains_open(x) {
            self.b
        } else {
            1.0
        }
    }

    /// `a(x)^2`, the weight of the geodesic metric.
    pub fn weight(&self, x: Vec3) -> f64 {
        let a = self.pinning(x);
        a * a
    }

    pub fn b_sq(&self) -> f64 {
        self.b * self.b
    }

    /// Distance between the two boundaries (positive for valid scenes).
    pub fn clearance(&self) -> f64 {
        match (&self.domain, &self.inclusion) {
            (ConvexBody::Ball { center, radius }, inc) => radius - inc.max_distance_from(*center),
            (ConvexBody::Polytope { halfspaces }, inc) => halfspaces
                .iter()
                .map(|h| h.offset - inc.support(h.normal))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Reference dilation scale `1e-2 * min(1, clearance)`.
    pub fn delta0(&self) -> f64 {
        1e-2 * self.clearance().min(1.0)
    }

    /// Full validation; returns a report or the first hard failure.
    pub fn validate(&self) -> Result<SceneReport> {
        self.domain.validate()?;
        self.inclusion.validate()?;
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(Error::InvalidScene(format!(
                "pinning value b must lie in (0,1), got {}",
                self.b
            )));
        }
        let clearance = self.clearance();
        if clearance <= MEMBERSHIP_TOL {
            return Err(Error::InvalidScene(format!(
                "inclusion must be strictly inside the domain (clearance {clearance:.3e})"
            )));
        }
        let s = &self.singularities;
        if s.positive.len() != s.negative.len() {
            return Err(Error::InvalidScene(format!(
                "unbalanced singularities: {} positive vs {} negative",
                s.positive.len(),
                s.negative.len()
            )));
        }
        let pts = s.all_points();
        for (i, p) in pts.iter().enumerate() {
            if self.domain.signed_distance(*p).abs() > MEMBERSHIP_TOL {
                return Err(Error::InvalidScene(format!(
                    "singularity {i} at {p:?} is not on the domain boundary"
                )));
            }
            for (j, q) in pts.iter().enumerate().skip(i + 1) {
                if p.dist(*q) < MEMBERSHIP_TOL {
                    return Err(Error::InvalidScene(format!(
                        "singularities {i} and {j} coincide"
                    )));
                }
            }
        }
        let mut warnings = Vec::new();
        if !self.inclusion.is_ball() {
            warnings.push(
                "polytope inclusion: flat faces are not strictly convex; geodesic break points \
                 may be non-unique along a face"
                    .into(),
            );
        }
        if !self.domain.is_ball() {
            warnings.push(
                "polytope domain: geodesics touching a domain edge or vertex are flagged, not \
                 rejected"
                    .into(),
            );
        }
        Ok(SceneReport {
            clearance,
            delta0: 1e-2 * clearance.min(1.0),
            k: s.k(),
            warnings,
        })
    }

    /// Enlarged inclusion for the dilated metrics. Fails when the enlarged
    /// body is no longer strictly inside the domain.
    pub fn dilate_inclusion(&self, delta: f64) -> Result<ConvexBody> {
        if delta < 0.0 || !delta.is_finite() {
            return Err(Error::DeltaTooLarge(format!(
                "dilation must be a finite non-negative number, got {delta}"
            )));
        }
        if delta >= self.clearance() {
            return Err(Error::DeltaTooLarge(format!(
                "delta {delta} >= clearance {}",
                self.clearance()
            )));
        }
        Ok(self.inclusion.dilate(delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cube() -> ConvexBody {
        let mut hs = Vec::new();
        for (n, c) in [
            (vec3(1.0, 0.0, 0.0), 1.0),
            (vec3(-1.0, 0.0, 0.0), 0.0),
            (vec3(0.0, 1.0, 0.0), 1.0),
            (vec3(0.0, -1.0, 0.0), 0.0),
            (vec3(0.0, 0.0, 1.0), 1.0),
            (vec3(0.0, 0.0, -1.0), 0.0),
        ] {
            hs.push(Halfspace { normal: n, offset: c });
        }
        ConvexBody::Polytope { halfspaces: hs }
    }

    #[test]
    fn concentric_scene_validates() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let report = scene.validate().unwrap();
        assert!((report.clearance - 0.5).abs() < 1e-12);
        assert!((report.delta0 - 0.005).abs() < 1e-15);
        assert_eq!(report.k, 1);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn b_out_of_range_rejected() {
        for bad in [0.0, 1.0, -0.2, 1.5] {
            let scene = Scene::symmetric_pair(0.5, bad);
            assert!(matches!(scene.validate(), Err(Error::InvalidScene(_))));
        }
    }

    #[test]
    fn tangent_inclusion_rejected() {
        let mut scene = Scene::symmetric_pair(1.0, 0.5); // touches the boundary
        assert!(matches!(scene.validate(), Err(Error::InvalidScene(_))));
        scene.inclusion = ConvexBody::ball(vec3(0.6, 0.0, 0.0), 0.4); // internally tangent
        assert!(matches!(scene.validate(), Err(Error::InvalidScene(_))));
    }

    #[test]
    fn singularities_off_boundary_rejected() {
        let mut scene = Scene::symmetric_pair(0.3, 0.5);
        scene.singularities.positive[0] = vec3(0.5, 0.0, 0.0);
        assert!(matches!(scene.validate(), Err(Error::InvalidScene(_))));
    }

    #[test]
    fn pinning_convention_on_boundary() {
        let scene = Scene::symmetric_pair(0.3, 0.5);
        assert_eq!(scene.pinning(vec3(0.1, 0.0, 0.0)), 0.5);
        assert_eq!(scene.pinning(vec3(0.3, 0.0, 0.0)), 1.0); // boundary counts as outside
        assert_eq!(scene.pinning(vec3(0.7, 0.0, 0.0)), 1.0);
        assert_eq!(scene.weight(vec3(0.0, 0.0, 0.0)), 0.25);
    }

    #[test]
    fn dilate_ball_and_guard() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let d = scene.dilate_inclusion(0.01).unwrap();
        match d {
            ConvexBody::Ball { radius, .. } => assert!((radius - 0.51).abs() < 1e-15),
            _ => panic!("expected ball"),
        }
        assert!(matches!(
            scene.dilate_inclusion(0.5),
            Err(Error::DeltaTooLarge(_))
        ));
        assert!(matches!(
            scene.dilate_inclusion(-0.1),
            Err(Error::DeltaTooLarge(_))
        ));
    }

    #[test]
    fn ball_projection_cases() {
        let ball = ConvexBody::ball(Vec3::ZERO, 0.5);
        // outside: radial pull-in
        let p = ball.project_boundary(vec3(2.0, 0.0, 0.0));
        assert!(p.dist(vec3(0.5, 0.0, 0.0)) < 1e-12);
        // inside: radial push-out
        let p = ball.project_boundary(vec3(0.1, 0.0, 0.0));
        assert!(p.dist(vec3(0.5, 0.0, 0.0)) < 1e-12);
        // center: convention e_x
        let p = ball.project_boundary(Vec3::ZERO);
        assert!(p.dist(vec3(0.5, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn cube_projection_matches_face_brute_force() {
        let cube = unit_cube();
        cube.validate().unwrap();
        let x = vec3(2.0, 0.2, 0.2);
        let p = cube.project_boundary(x);
        // oracle: clamp to the box
        let clamp = vec3(
            x.x.clamp(0.0, 1.0),
            x.y.clamp(0.0, 1.0),
            x.z.clamp(0.0, 1.0),
        );
        assert!(p.dist(clamp) < 1e-9, "got {p:?}");
        // interior point projects to the nearest face
        let q = cube.project_boundary(vec3(0.9, 0.5, 0.5));
        assert!(q.dist(vec3(1.0, 0.5, 0.5)) < 1e-12);
    }

    #[test]
    fn projection_idempotent_on_boundary() {
        let ball = ConvexBody::ball(vec3(0.1, -0.2, 0.0), 0.7);
        for dir in sphere_directions(20) {
            let x = vec3(0.1, -0.2, 0.0) + dir * 0.7;
            assert!(ball.project_boundary(x).dist(x) < 1e-12);
        }
    }

    #[test]
    fn cube_clipping_and_support() {
        let cube = unit_cube();
        let iv = cube
            .clip_segment(vec3(-1.0, 0.5, 0.5), vec3(2.0, 0.5, 0.5))
            .unwrap();
        let len = (iv.t1 - iv.t0) * 3.0;
        assert!((len - 1.0).abs() < 1e-12);
        assert!((cube.support(vec3(1.0, 0.0, 0.0)) - 1.0).abs() < 1e-6);
        let (lo, hi) = cube.bounding_box();
        assert!(lo.dist(Vec3::ZERO) < 1e-6 && hi.dist(vec3(1.0, 1.0, 1.0)) < 1e-6);
    }

    #[test]
    fn unbounded_polytope_rejected() {
        // only 4 halfspaces forming an unbounded wedge
        let hs = vec![
            Halfspace { normal: vec3(1.0, 0.0, 0.0), offset: 1.0 },
            Halfspace { normal: vec3(-1.0, 0.0, 0.0), offset: 1.0 },
            Halfspace { normal: vec3(0.0, 1.0, 0.0), offset: 1.0 },
            Halfspace { normal: vec3(0.0, -1.0, 0.0), offset: 1.0 },
        ];
        let body = ConvexBody::Polytope { halfspaces: hs };
        assert!(matches!(body.validate(), Err(Error::InvalidScene(_))));
    }

    #[test]
    fn scene_json_round_trip() {
        let text = r#"{
            "omega": {"type": "ball", "center": [0,0,0], "radius": 1.0},
            "inclusion": {"type": "ball", "center": [0,0,0], "radius": 0.5},
            "b": 0.5,
            "singularities": {"positive": [[1,0,0]], "negative": [[-1,0,0]]}
        }"#;
        let scene: Scene = serde_json::from_str(text).unwrap();
        scene.validate().unwrap();
        let back = serde_json::to_string(&scene).unwrap();
        let again: Scene = serde_json::from_str(&back).unwrap();
        again.validate().unwrap();
        assert_eq!(again.b, 0.5);
    }

    #[test]
    fn polytope_scene_warns() {
        let mut scene = Scene::symmetric_pair(0.5, 0.5);
        scene.inclusion = unit_cube().dilate(-0.7); // small cube around origin-ish
        // shift to be inside: offsets now 0.3 / -0.7 makes empty; rebuild directly
        let mut hs = Vec::new();
        for (n, c) in [
            (vec3(1.0, 0.0, 0.0), 0.3),
            (vec3(-1.0, 0.0, 0.0), 0.3),
            (vec3(0.0, 1.0, 0.0), 0.3),
            (vec3(0.0, -1.0, 0.0), 0.3),
            (vec3(0.0, 0.0, 1.0), 0.3),
            (vec3(0.0, 0.0, -1.0), 0.3),
        ] {
            hs.push(Halfspace { normal: n, offset: c });
        }
        scene.inclusion = ConvexBody::Polytope { halfspaces: hs };
        let report = scene.validate().unwrap();
        assert_eq!(report.warnings.len(), 1);
        assert!((report.clearance - (1.0 - 0.3 * 3.0f64.sqrt())).abs() < 1e-6);
    }
}
