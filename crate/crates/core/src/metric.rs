//! The weighted path metric and its geodesics.
//!
//! Curve length is weighted by the squared pinning value,
//! `len(curve) = integral of a(curve(s))^2 ds`, and the distance between two
//! points is the infimum over Lipschitz arcs. Because the weight takes just
//! two values (`b^2` strictly inside the inclusion, 1 outside) and the
//! inclusion is convex, a minimizing arc is a union of at most three line
//! segments whose interior break points lie on the inclusion boundary, with
//! the middle segment a chord. The solver therefore minimizes over the
//! segment families
//!
//! ```text
//!   x --------------- y          straight
//!   x ----- B ------- y          break on the inclusion boundary
//!   x -- B1 ~~chord~~ B2 -- y    enter and leave the inclusion
//! ```
//!
//! plus a boundary-hugging polyline as a safety candidate for near-tangent
//! configurations (it can tie but never strictly win while `b < 1`, since a
//! chord under-runs any boundary arc).

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Scene};
use crate::numerics::{golden_min, nelder_mead};
use crate::vec3::{vec3, Vec3};
use serde::Serialize;

/// Tolerance below which two endpoints count as the same point.
pub const ENDPOINT_TOL: f64 = 1e-12;
/// Two candidate paths within this weighted length are treated as tied.
pub const TIE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Inside,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicKind {
    Straight,
    TwoSegment,
    ThreeSegment,
}

/// A minimizing (or candidate-minimal) path.
#[derive(Clone, Debug, Serialize)]
pub struct Geodesic {
    /// Path vertices, first is the source, last the target. Interior
    /// vertices lie on the (dilated) inclusion boundary. Boundary-hugging
    /// fallback chains may carry more than four vertices.
    pub vertices: Vec<Vec3>,
    /// One phase tag per segment.
    pub phases: Vec<Phase>,
    pub kind: GeodesicKind,
    /// Weighted length (the distance once minimal).
    pub length: f64,
    pub euclidean_length: f64,
    /// Set when a structurally different candidate ties within `TIE_TOL`.
    pub non_unique: bool,
    /// Set when the path touches the domain boundary away from endpoints
    /// (can happen for polytope domains; informational).
    pub touches_domain_boundary: bool,
}

impl Geodesic {
    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Scene plus a dilated inclusion, the environment all metric queries run in.
pub struct MetricContext<'a> {
    pub scene: &'a Scene,
    pub body: ConvexBody,
    pub delta: f64,
    b2: f64,
}

impl<'a> MetricContext<'a> {
    pub fn new(scene: &'a Scene, delta: f64) -> Result<Self> {
        let body = if delta == 0.0 {
            scene.inclusion.clone()
        } else {
            scene.dilate_inclusion(delta)?
        };
        Ok(MetricContext {
            scene,
            body,
            delta,
            b2: scene.b * scene.b,
        })
    }

    /// Weighted length of one segment: euclidean length minus the discount
    /// earned inside the inclusion.
    pub fn segment_length(&self, p: Vec3, q: Vec3) -> f64 {
        let total = p.dist(q);
        if total == 0.0 {
            return 0.0;
        }
        let inside = self.body.segment_inside_length(p, q);
        total - (1.0 - self.b2) * inside
    }

    /// Weighted length of a polyline.
    pub fn polyline_length(&self, pts: &[Vec3]) -> f64 {
        pts.windows(2).map(|w| self.segment_length(w[0], w[1])).sum()
    }

    pub fn b_sq(&self) -> f64 {
        self.b2
    }

    /// Warm-started point distance for ball inclusions; exact for pairs
    /// inside the inclusion, straight-line when the inclusion cannot help,
    /// otherwise a hinted break-point search. Falls back to the full
    /// candidate solver for polytopes.
    pub fn point_distance(&self, x: Vec3, y: Vec3, hint: &mut Option<[f64; 2]>) -> f64 {
        if x.dist(y) < ENDPOINT_TOL {
            return 0.0;
        }
        if !self.body.is_ball() {
            return geodesic_in_context(self, x, y).map(|g| g.length).unwrap_or(f64::NAN);
        }
        let ConvexBody::Ball { center, radius } = self.body else {
            unreachable!()
        };
        let b2 = self.b2;
        let in_x = x.dist(center) < radius;
        let in_y = y.dist(center) < radius;
        if in_x && in_y {
            *hint = None;
            return b2 * x.dist(y); // chord, exact
        }
        let straight = self.polyline_length(&[x, y]);
        if !in_x && !in_y {
            // cheap exclusion: if the euclidean detour to the inclusion
            // already exceeds the straight cost, no through-path can win
            let gap = (x.dist(center) - radius) + (y.dist(center) - radius);
            if gap >= straight {
                *hint = None;
                return straight;
            }
        }
        let plane = PlaneParam::new(&self.body, x, y);
        if in_x != in_y {
            // one endpoint inside: single break point
            let f = |t: f64| self.polyline_length(&[x, plane.at(t), y]);
            let outside = if in_x { y } else { x };
            let vo = outside - center;
            let radial_t = vo.dot(plane.e2).atan2(vo.dot(plane.e1));
            let start = match hint {
                Some(h) => h[0],
                None => coarse_circle_min(&f, 64).1,
            };
            let width = 0.25;
            let (t, v) = golden_min(f, start - width, start + width, 1e-12);
            // second start at the outside point's azimuth: warm hints can
            // track a stale basin across large query jumps
            let (tr, vr) = golden_min(f, radial_t - 0.6, radial_t + 0.6, 1e-12);
            let (t, v) = if vr < v { (tr, vr) } else { (t, v) };
            let (t, v) = if v > straight {
                // both starts missed the basin; rescan
                let best = coarse_circle_min(&f, 64);
                golden_min(f, best.1 - 0.2, best.1 + 0.2, 1e-12)
            } else {
                (t, v)
            };
            *hint = Some([t, t]);
            return v.min(straight);
        }
        // both outside: break pair
        let f = |p: &[f64]| self.polyline_length(&[x, plane.at(p[0]), plane.at(p[1]), y]);
        let vy = y - center;
        let radial = [0.0, vy.dot(plane.e2).atan2(vy.dot(plane.e1))];
        let start = match hint {
            Some(h) => *h,
            None => coarse_torus_min(&f, 24).1,
        };
        let (p, v) = nelder_mead(f, &start, 0.08, 1e-15, 300);
        // second start at the two radial azimuths (entry toward x, exit
        // toward y): position-continuous, so it cannot inherit a stale basin
        let (p, v) = {
            let (pr, vr) = nelder_mead(f, &radial, 0.2, 1e-15, 300);
            if vr < v {
                (pr, vr)
            } else {
                (p, v)
            }
        };
        let (p, v) = if v > straight + 1e-12 {
            let best = coarse_torus_min(&f, 24);
            nelder_mead(f, &best.1, 0.1, 1e-15, 400)
        } else {
            (p, v)
        };
        *hint = Some([p[0], p[1]]);
        v.min(straight)
    }
}

pub(crate) fn coarse_circle_min(f: &impl Fn(f64) -> f64, n: usize) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..n {
        let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let v = f(t);
        if v < best.0 {
            best = (v, t);
        }
    }
    best
}

fn coarse_torus_min(f: &impl Fn(&[f64]) -> f64, n: usize) -> (f64, [f64; 2]) {
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..n {
        for j in 0..n {
            let t1 = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let t2 = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let v = f(&[t1, t2]);
            if v < best.0 {
                best = (v, [t1, t2]);
            }
        }
    }
    best
}

/// Weighted length of a polyline under the metric dilated by `delta`.
pub fn weighted_length(scene: &Scene, polyline: &[Vec3], delta: f64) -> Result<f64> {
    if polyline.len() < 2 {
        return Err(Error::InvalidScene(
            "polyline needs at least two vertices".into(),
        ));
    }
    let ctx = MetricContext::new(scene, delta)?;
    Ok(ctx.polyline_length(polyline))
}

/// In-plane boundary parametrization for ball inclusions: the circle cut by
/// the plane through `x`, `y` and the ball center.
struct PlaneParam {
    center: Vec3,
    radius: f64,
    e1: Vec3,
    e2: Vec3,
}

impl PlaneParam {
    fn new(body: &ConvexBody, x: Vec3, y: Vec3) -> PlaneParam {
        let ConvexBody::Ball { center, radius } = body else {
            unreachable!("plane parametrization is for balls");
        };
        let u = x - *center;
        let v = y - *center;
        let n = u.cross(v);
        let n = if n.norm() > 1e-9 * (u.norm() * v.norm()).max(1e-30) {
            n.normalize()
        } else {
            // endpoints collinear with the center: any plane through the line
            let d = if u.norm() > v.norm() { u } else { v };
            match d.try_normalize(1e-12) {
                Some(d) => d.any_orthogonal(),
                None => vec3(0.0, 0.0, 1.0),
            }
        };
        let e1 = match (u - n * u.dot(n)).try_normalize(1e-12) {
            Some(e) => e,
            None => n.any_orthogonal(),
        };
        let e2 = n.cross(e1);
        PlaneParam {
            center: *center,
            radius: *radius,
            e1,
            e2,
        }
    }

    fn at(&self, theta: f64) -> Vec3 {
        self.center + (self.e1 * theta.cos() + self.e2 * theta.sin()) * self.radius
    }
}

/// Boundary point of a general body seen from an interior anchor along the
/// direction with spherical angles `(theta, phi)`.
fn anchor_param(body: &ConvexBody, anchor: Vec3, theta: f64, phi: f64) -> Vec3 {
    let dir = vec3(
        phi.sin() * theta.cos(),
        phi.sin() * theta.sin(),
        phi.cos(),
    );
    let t = body.ray_exit(anchor, dir);
    anchor + dir * t
}

struct Candidate {
    value: f64,
    vertices: Vec<Vec3>,
    hugging: bool,
}

fn ball_candidates(ctx: &MetricContext, x: Vec3, y: Vec3, out: &mut Vec<Candidate>) {
    let plane = PlaneParam::new(&ctx.body, x, y);

    // single break point
    {
        let f = |t: f64| ctx.polyline_length(&[x, plane.at(t), y]);
        let n = 128;
        let mut best: Vec<(f64, f64)> = Vec::new(); // (value, theta)
        for i in 0..n {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let v = f(t);
            best.push((v, t));
        }
        best.sort_by(|a, b| a.0.total_cmp(&b.0));
        let span = 2.0 * std::f64::consts::PI / n as f64;
        let mut taken: Vec<f64> = Vec::new();
        for &(_, t0) in best.iter().take(6) {
            if taken.iter().any(|t| angle_dist(*t, t0) < 2.5 * span) {
                continue;
            }
            taken.push(t0);
            let (t, v) = golden_min(f, t0 - span, t0 + span, 1e-13);
            out.push(Candidate {
                value: v,
                vertices: vec![x, plane.at(t), y],
                hugging: false,
            });
            if taken.len() >= 3 {
                break;
            }
        }
    }

    // enter/leave break pair
    {
        let f = |p: &[f64]| ctx.polyline_length(&[x, plane.at(p[0]), plane.at(p[1]), y]);
        let n = 48;
        let mut coarse: Vec<(f64, f64, f64)> = Vec::new();
        for i in 0..n {
            let t1 = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            for j in 0..n {
                let t2 = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                coarse.push((f(&[t1, t2]), t1, t2));
            }
        }
        coarse.sort_by(|a, b| a.0.total_cmp(&b.0));
        let span = 2.0 * std::f64::consts::PI / n as f64;
        let mut starts: Vec<(f64, f64)> = Vec::new();
        for &(_, t1, t2) in coarse.iter().take(24) {
            if starts
                .iter()
                .any(|s| angle_dist(s.0, t1) < 2.0 * span && angle_dist(s.1, t2) < 2.0 * span)
            {
                continue;
            }
            starts.push((t1, t2));
            if starts.len() >= 4 {
                break;
            }
        }
        // deterministic jittered restarts near the best cell
        if let Some(&(t1, t2)) = starts.first() {
            for k in 1..=8 {
                let a = 0.37 * k as f64;
                starts.push((t1 + span * a.sin(), t2 + span * a.cos()));
            }
        }
        for (t1, t2) in starts {
            let (p, v) = nelder_mead(f, &[t1, t2], 0.5 * span, 1e-15, 600);
            out.push(Candidate {
                value: v,
                vertices: vec![x, plane.at(p[0]), plane.at(p[1]), y],
                hugging: false,
            });
        }
    }

    // boundary-hugging safety candidate: tangent in, arc along the circle,
    // tangent out (only meaningful when both endpoints are outside)
    let c = plane.center;
    let r = plane.radius;
    if x.dist(c) > r && y.dist(c) > r {
        let ang = |p: Vec3| {
            let d = p - c;
            d.dot(plane.e2).atan2(d.dot(plane.e1))
        };
        let (ax, ay) = (ang(x), ang(y));
        let tx = (r / x.dist(c)).acos();
        let ty = (r / y.dist(c)).acos();
        for (sx, sy) in [(1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (-1.0, -1.0)] {
            let t1 = ax + sx * tx;
            let t2 = ay + sy * ty;
            let mut pts = vec![x];
            let steps = 64;
            let mut d = t2 - t1;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            for s in 0..=steps {
                pts.push(plane.at(t1 + d * s as f64 / steps as f64));
            }
            pts.push(y);
            out.push(Candidate {
                value: ctx.polyline_length(&pts),
                vertices: pts,
                hugging: true,
            });
        }
    }
}

fn polytope_candidates(ctx: &MetricContext, x: Vec3, y: Vec3, out: &mut Vec<Candidate>) {
    let (anchor, _) = ctx.body.inner_point();
    let bp = |t: f64, p: f64| anchor_param(&ctx.body, anchor, t, p);

    // single break point: 2 spherical angles
    {
        let f = |p: &[f64]| ctx.polyline_length(&[x, bp(p[0], p[1]), y]);
        let mut starts = coarse_sphere_starts(&f, 20);
        starts.truncate(4);
        for s in starts {
            let (p, v) = nelder_mead(f, &s, 0.25, 1e-15, 800);
            out.push(Candidate {
                value: v,
                vertices: vec![x, bp(p[0], p[1]), y],
                hugging: false,
            });
        }
    }
    // break pair: 4 angles
    {
        let f = |p: &[f64]| ctx.polyline_length(&[x, bp(p[0], p[1]), bp(p[2], p[3]), y]);
        let g = |p: &[f64]| f(p);
        let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
        let n = 8;
        for i in 0..n {
            for j in 1..n {
                for k in 0..n {
                    for l in 1..n {
                        let p = vec![
                            2.0 * std::f64::consts::PI * i as f64 / n as f64,
                            std::f64::consts::PI * j as f64 / n as f64,
                            2.0 * std::f64::consts::PI * k as f64 / n as f64,
                            std::f64::consts::PI * l as f64 / n as f64,
                        ];
                        starts.push((g(&p), p));
                    }
                }
            }
        }
        starts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, s) in starts.into_iter().take(6) {
            let (p, v) = nelder_mead(f, &s, 0.2, 1e-15, 1500);
            out.push(Candidate {
                value: v,
                vertices: vec![x, bp(p[0], p[1]), bp(p[2], p[3]), y],
                hugging: false,
            });
        }
    }
}

fn coarse_sphere_starts(f: &impl Fn(&[f64]) -> f64, n: usize) -> Vec<Vec<f64>> {
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 0..n {
        for j in 1..n {
            let p = vec![
                2.0 * std::f64::consts::PI * i as f64 / n as f64,
                std::f64::consts::PI * j as f64 / n as f64,
            ];
            scored.push((f(&p), p));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.into_iter().map(|(_, p)| p).collect()
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    if d > std::f64::consts::PI {
        d = 2.0 * std::f64::consts::PI - d;
    }
    d
}

/// Split every segment of `pts` at inclusion-boundary crossings so each
/// piece is single-phase, dropping degenerate pieces.
fn split_at_boundary(body: &ConvexBody, pts: &[Vec3]) -> Vec<Vec3> {
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p.dist(q) < ENDPOINT_TOL {
            continue;
        }
        if let Some(iv) = body.clip_segment(p, q) {
            let eps = 1e-12;
            if iv.t0 > eps {
                out.push(p.lerp(q, iv.t0));
            }
            if iv.t1 < 1.0 - eps {
                out.push(p.lerp(q, iv.t1));
            }
        }
        out.push(q);
    }
    // remove consecutive duplicates
    let mut dedup: Vec<Vec3> = Vec::with_capacity(out.len());
    for p in out {
        if dedup.last().map_or(true, |l| l.dist(p) > ENDPOINT_TOL) {
            dedup.push(p);
        }
    }
    dedup
}

/// Drop interior vertices that are collinear with their neighbours and in
/// the same phase region (artifacts of the optimizer converging onto a
/// straight configuration).
fn drop_collinear(body: &ConvexBody, pts: Vec<Vec3>) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(pts.len());
    for p in pts {
        out.push(p);
        while out.len() >= 3 {
            let n = out.len();
            let (a, m, b) = (out[n - 3], out[n - 2], out[n - 1]);
            let deviation = a.dist(m) + m.dist(b) - a.dist(b);
            // only merge when the middle vertex is not a phase change
            let mid_on_boundary = body.signed_distance(m).abs() < 1e-9;
            if deviation < 1e-13 && !mid_on_boundary {
                out.remove(n - 2);
            } else {
                break;
            }
        }
    }
    out
}

fn paths_equivalent(a: &[Vec3], b: &[Vec3]) -> bool {
    // compare by sampling; cheap and insensitive to vertex layout
    let sample = |pts: &[Vec3], t: f64| -> Vec3 {
        let total: f64 = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
        let mut target = t * total;
        for w in pts.windows(2) {
            let l = w[0].dist(w[1]);
            if target <= l || l == 0.0 {
                return w[0].lerp(w[1], if l > 0.0 { target / l } else { 0.0 });
            }
            target -= l;
        }
        *pts.last().unwrap()
    };
    (0..=16).all(|i| {
        let t = i as f64 / 16.0;
        sample(a, t).dist(sample(b, t)) < 1e-7
    })
}

/// Minimal weighted path from `x` to `y` under the metric dilated by `delta`.
pub fn geodesic(scene: &Scene, x: Vec3, y: Vec3, delta: f64) -> Result<Geodesic> {
    let ctx = MetricContext::new(scene, delta)?;
    geodesic_in_context(&ctx, x, y)
}

/// Same as [`geodesic`] but reusing a prepared context.
pub fn geodesic_in_context(ctx: &MetricContext, x: Vec3, y: Vec3) -> Result<Geodesic> {
    if x.dist(y) < ENDPOINT_TOL {
        return Err(Error::DegenerateEndpoints);
    }
    let scene = ctx.scene;
    let mut cands = vec![Candidate {
        value: ctx.polyline_length(&[x, y]),
        vertices: vec![x, y],
        hugging: false,
    }];
    if ctx.body.is_ball() {
        ball_candidates(ctx, x, y, &mut cands);
    } else {
        polytope_candidates(ctx, x, y, &mut cands);
    }

    // winner: best value, preferring the straight segment and non-hugging
    // representations on ties
    let best_val = cands
        .iter()
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    let winner_idx = {
        let tied: Vec<usize> = (0..cands.len())
            .filter(|&i| cands[i].value <= best_val + TIE_TOL)
            .collect();
        *tied
            .iter()
            .min_by_key(|&&i| {
                let c = &cands[i];
                (c.hugging as usize, c.vertices.len(), i)
            })
            .unwrap()
    };

    let non_unique = cands.iter().enumerate().any(|(i, c)| {
        i != winner_idx
            && c.value <= best_val + TIE_TOL
            && !paths_equivalent(&c.vertices, &cands[winner_idx].vertices)
    });

    let raw = cands.swap_remove(winner_idx);
    let hugging = raw.hugging;
    let mut pts = split_at_boundary(&ctx.body, &raw.vertices);
    if !hugging {
        pts = drop_collinear(&ctx.body, pts);
        // clean interior vertices onto the boundary when they are meant to
        // be break points
        for i in 1..pts.len() - 1 {
            if ctx.body.signed_distance(pts[i]).abs() < 1e-7 {
                pts[i] = ctx.body.project_boundary(pts[i]);
            }
        }
        pts = split_at_boundary(&ctx.body, &pts);
    }

    let phases: Vec<Phase> = pts
        .windows(2)
        .map(|w| {
            let mid = w[0].lerp(w[1], 0.5);
            if ctx.body.contains_open(mid) {
                Phase::Inside
            } else {
                Phase::Outside
            }
        })
        .collect();
    let kind = match pts.len() - 1 {
        1 => GeodesicKind::Straight,
        2 => GeodesicKind::TwoSegment,
        _ => GeodesicKind::ThreeSegment,
    };
    let kind = if hugging && pts.len() > 4 {
        GeodesicKind::TwoSegment // hug chains are reported as broken paths
    } else {
        kind
    };

    let touches_domain_boundary = pts[1..pts.len() - 1]
        .iter()
        .any(|p| scene.domain.signed_distance(*p).abs() < 1e-9);

    let length = ctx.polyline_length(&pts);
    let euclidean_length = pts.windows(2).map(|w| w[0].dist(w[1])).sum();
    Ok(Geodesic {
        vertices: pts,
        phases,
        kind,
        length,
        euclidean_length,
        non_unique,
        touches_domain_boundary,
    })
}

/// Distance under the dilated metric. `x == y` gives 0.
pub fn distance(scene: &Scene, x: Vec3, y: Vec3, delta: f64) -> Result<f64> {
    if x.dist(y) < ENDPOINT_TOL {
        return Ok(0.0);
    }
    Ok(geodesic(scene, x, y, delta)?.length)
}

/// Fast point-to-point distance for ball inclusions with a warm-started
/// break-pair search. `hint` carries the previous break angles; callers
/// iterating over nearby query points reuse it. Falls back to the full
/// solver for non-ball inclusions.
pub fn distance_with_hint(
    scene: &Scene,
    x: Vec3,
    y: Vec3,
    delta: f64,
    hint: &mut Option<[f64; 2]>,
) -> Result<f64> {
    let ctx = MetricContext::new(scene, delta)?;
    let v = ctx.point_distance(x, y, hint);
    if v.is_nan() {
        return distance(scene, x, y, delta);
    }
    Ok(v)
}

/// Two-sided bracket relating metrics at different dilations. With
/// `lo = min(delta, delta_prime)` and `hi = max(...)`:
/// `d_hi <= d_lo <= d_hi + 4 (hi - lo)`, the certified comparison constant
/// being 4.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceBracket {
    pub delta: f64,
    pub delta_prime: f64,
    pub d_delta: f64,
    pub d_delta_prime: f64,
    pub lower: f64,
    pub upper: f64,
    pub constant: f64,
}

pub fn dilated_distance_bracket(
    scene: &Scene,
    x: Vec3,
    y: Vec3,
    delta: f64,
    delta_prime: f64,
) -> Result<DistanceBracket> {
    let d_delta = distance(scene, x, y, delta)?;
    let d_delta_prime = distance(scene, x, y, delta_prime)?;
    let hi_val = d_delta.min(d_delta_prime); // larger dilation, smaller value
    let lo_val = d_delta.max(d_delta_prime);
    let gap = (delta - delta_prime).abs();
    let bracket = DistanceBracket {
        delta,
        delta_prime,
        d_delta,
        d_delta_prime,
        lower: hi_val,
        upper: hi_val + 4.0 * gap,
        constant: 4.0,
    };
    if lo_val > bracket.upper + 1e-9 {
        return Err(Error::InvalidScene(format!(
            "dilation bracket violated: {lo_val} > {}",
            bracket.upper
        )));
    }
    Ok(bracket)
}

/// Distance from `x` to the closed ball `K`, with the realizing point on
/// the ball boundary (or `x` itself when inside).
pub fn distance_to_ball(
    scene: &Scene,
    x: Vec3,
    k_center: Vec3,
    k_radius: f64,
    delta: f64,
) -> Result<(f64, Vec3)> {
    if x.dist(k_center) <= k_radius {
        return Ok((0.0, x));
    }
    let ctx = MetricContext::new(scene, delta)?;
    // minimizer lies in the plane through x, the ball center and the
    // inclusion center (reflection symmetry for ball inclusions); for
    // polytopes we fall back to a spherical search
    if ctx.body.is_ball() {
        let ConvexBody::Ball { center, .. } = ctx.body else {
            unreachable!()
        };
        let axis = match (x - k_center).try_normalize(1e-12) {
            Some(a) => a,
            None => vec3(1.0, 0.0, 0.0),
        };
        let n = (x - k_center).cross(center - k_center);
        let e2 = match n.try_normalize(1e-9) {
            Some(nn) => nn.cross(axis),
            None => axis.any_orthogonal(),
        };
        let point = |t: f64| k_center + (axis * t.cos() + e2 * t.sin()) * k_radius;
        let f = |t: f64| distance(scene, x, point(t), delta).unwrap_or(f64::INFINITY);
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..48 {
            let t = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / 48.0;
            let v = f(t);
            if v < best.0 {
                best = (v, t);
            }
        }
        let span = 2.0 * std::f64::consts::PI / 48.0;
        let (t, v) = golden_min(f, best.1 - span, best.1 + span, 1e-10);
        Ok((v, point(t)))
    } else {
        let f = |p: &[f64]| {
            let u = vec3(
                p[1].sin() * p[0].cos(),
                p[1].sin() * p[0].sin(),
                p[1].cos(),
            );
            distance(scene, x, k_center + u * k_radius, delta).unwrap_or(f64::INFINITY)
        };
        let starts = coarse_sphere_starts(&f, 12);
        let mut best = (f64::INFINITY, vec![0.0, 0.0]);
        for s in starts.into_iter().take(3) {
            let (p, v) = nelder_mead(&f, &s, 0.2, 1e-13, 400);
            if v < best.0 {
                best = (v, p);
            }
        }
        let u = vec3(
            best.1[1].sin() * best.1[0].cos(),
            best.1[1].sin() * best.1[0].sin(),
            best.1[1].cos(),
        );
        Ok((best.0, k_center + u * k_radius))
    }
}

/// A path realizing the pseudo-distance: either one geodesic, or two
/// geodesics meeting the compact set.
#[derive(Clone, Debug, Serialize)]
pub struct KCurve {
    pub components: Vec<Geodesic>,
    pub through_k: bool,
    pub value: f64,
}

/// Pseudo-distance `min(d(x,y), d(x,K) + d(y,K))` for a closed ball `K`,
/// with the realizing curve.
pub fn pseudo_distance(
    scene: &Scene,
    k_center: Vec3,
    k_radius: f64,
    x: Vec3,
    y: Vec3,
    delta: f64,
) -> Result<(f64, KCurve)> {
    let direct = distance(scene, x, y, delta)?;
    let (dx, px) = distance_to_ball(scene, x, k_center, k_radius, delta)?;
    let (dy, py) = distance_to_ball(scene, y, k_center, k_radius, delta)?;
    let through = dx + dy;
    if through < direct - 1e-12 {
        let mut components = Vec::new();
        if x.dist(px) >= ENDPOINT_TOL {
            components.push(geodesic(scene, x, px, delta)?);
        }
        if y.dist(py) >= ENDPOINT_TOL {
            components.push(geodesic(scene, y, py, delta)?);
        }
        Ok((
            through,
            KCurve {
                components,
                through_k: true,
                value: through,
            },
        ))
    } else {
        let g = if x.dist(y) < ENDPOINT_TOL {
            Vec::new()
        } else {
            vec![geodesic(scene, x, y, delta)?]
        };
        Ok((
            direct,
            KCurve {
                components: g,
                through_k: false,
                value: direct,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Scene;

    fn scene_ball03(b: f64) -> Scene {
        let mut s = Scene::symmetric_pair(0.3, b);
        s.singularities = Default::default();
        s
    }

    #[test]
    fn weighted_length_through_inclusion() {
        // crossing segment: 1.2 outside + 0.6 inside at weight 0.25
        let s = scene_ball03(0.5);
        let v = weighted_length(&s, &[vec3(-0.9, 0.0, 0.0), vec3(0.9, 0.0, 0.0)], 0.0).unwrap();
        assert!((v - 1.35).abs() < 1e-12, "v={v}");
    }

    #[test]
    fn weighted_length_inside_segment() {
        let s = Scene::symmetric_pair(0.5, 0.5);
        let v = weighted_length(&s, &[vec3(-0.1, 0.0, 0.0), vec3(0.1, 0.0, 0.0)], 0.0).unwrap();
        assert!((v - 0.05).abs() < 1e-15, "v={v}");
    }

    #[test]
    fn weighted_length_polyline_additive() {
        let s = scene_ball03(0.5);
        let a = vec3(-0.9, 0.0, 0.0);
        let m = vec3(0.0, 0.5, 0.0);
        let b = vec3(0.9, 0.0, 0.0);
        let direct: f64 = weighted_length(&s, &[a, m, b], 0.0).unwrap();
        let sum = weighted_length(&s, &[a, m], 0.0).unwrap()
            + weighted_length(&s, &[m, b], 0.0).unwrap();
        assert!((direct - sum).abs() < 1e-12);
    }

    #[test]
    fn distance_between_inside_points_is_scaled_euclid() {
        let s = Scene::symmetric_pair(0.5, 0.5);
        let x = vec3(-0.2, 0.05, 0.0);
        let y = vec3(0.3, -0.1, 0.1);
        let d = distance(&s, x, y, 0.0).unwrap();
        assert!((d - 0.25 * x.dist(y)).abs() < 1e-10, "d={d}");
    }

    #[test]
    fn distance_avoiding_pair_is_euclid() {
        let s = scene_ball03(0.5);
        let x = vec3(0.9, 0.0, 0.0);
        let y = vec3(0.0, 0.9, 0.0);
        let d = distance(&s, x, y, 0.0).unwrap();
        assert!((d - x.dist(y)).abs() < 1e-10, "d={d}");
        let g = geodesic(&s, x, y, 0.0).unwrap();
        assert_eq!(g.kind, GeodesicKind::Straight);
        assert_eq!(g.phases, vec![Phase::Outside]);
    }

    #[test]
    fn refraction_pair_takes_straight_through_path() {
        // weight 0.81 inside is cheap enough that the through path wins
        // against going around (1.686 vs 1.9009...)
        let s = scene_ball03(0.9);
        let x = vec3(-0.9, 0.0, 0.0);
        let y = vec3(0.9, 0.0, 0.0);
        let g = geodesic(&s, x, y, 0.0).unwrap();
        assert!((g.length - 1.686).abs() < 1e-9, "len={}", g.length);
        assert_eq!(g.kind, GeodesicKind::ThreeSegment);
        assert_eq!(g.phases, vec![Phase::Outside, Phase::Inside, Phase::Outside]);
        // break points are the axis crossings of the inclusion boundary
        assert!(g.vertices[1].dist(vec3(-0.3, 0.0, 0.0)) < 1e-6);
        assert!(g.vertices[2].dist(vec3(0.3, 0.0, 0.0)) < 1e-6);
    }

    #[test]
    fn two_segment_path_from_inside_to_outside() {
        let s = Scene::symmetric_pair(0.5, 0.5);
        let x = vec3(0.2, 0.0, 0.0);
        let y = vec3(0.9, 0.0, 0.0);
        let g = geodesic(&s, x, y, 0.0).unwrap();
        assert_eq!(g.kind, GeodesicKind::TwoSegment);
        assert_eq!(g.phases, vec![Phase::Inside, Phase::Outside]);
        let expect = 0.25 * 0.3 + 0.4;
        assert!((g.length - expect).abs() < 1e-10, "len={}", g.length);
    }

    #[test]
    fn refracted_geodesic_beats_straight_for_small_b() {
        // strong pinning pulls the path through the inclusion
        let s = scene_ball03(0.3);
        let x = vec3(-0.9, 0.05, 0.0);
        let y = vec3(0.9, 0.05, 0.0);
        let g = geodesic(&s, x, y, 0.0).unwrap();
        let straight = weighted_length(&s, &[x, y], 0.0).unwrap();
        assert!(g.length < straight - 1e-6, "{} vs {straight}", g.length);
        assert_eq!(g.kind, GeodesicKind::ThreeSegment);
        // interior vertices on the inclusion boundary
        for v in &g.vertices[1..g.vertices.len() - 1] {
            assert!(s.inclusion.signed_distance(*v).abs() < 1e-7);
        }
    }

    #[test]
    fn metric_bounds_hold_on_samples() {
        let s = scene_ball03(0.5);
        let b2 = 0.25;
        let pts = [
            vec3(-0.9, 0.0, 0.0),
            vec3(0.9, 0.0, 0.0),
            vec3(0.0, 0.8, 0.1),
            vec3(0.1, 0.0, 0.0),
            vec3(-0.2, -0.2, 0.1),
            vec3(0.5, 0.5, 0.5),
        ];
        for (i, &x) in pts.iter().enumerate() {
            for &y in pts.iter().skip(i + 1) {
                let d = distance(&s, x, y, 0.0).unwrap();
                let e = x.dist(y);
                assert!(d <= e + 1e-10, "upper bound violated");
                assert!(d >= b2 * e - 1e-10, "lower bound violated");
            }
        }
    }

    #[test]
    fn metric_symmetry_and_triangle_sampled() {
        let s = scene_ball03(0.4);
        let pts = [
            vec3(-0.8, 0.1, 0.0),
            vec3(0.7, -0.2, 0.3),
            vec3(0.0, 0.0, 0.0),
            vec3(0.2, 0.6, -0.4),
        ];
        for &x in &pts {
            for &y in &pts {
                let dxy = distance(&s, x, y, 0.0).unwrap();
                let dyx = distance(&s, y, x, 0.0).unwrap();
                assert!((dxy - dyx).abs() < 1e-9, "symmetry");
                for &z in &pts {
                    let dxz = distance(&s, x, z, 0.0).unwrap();
                    let dzy = distance(&s, z, y, 0.0).unwrap();
                    assert!(dxy <= dxz + dzy + 1e-9, "triangle");
                }
            }
        }
    }

    #[test]
    fn degenerate_endpoints_rejected() {
        let s = scene_ball03(0.5);
        let x = vec3(0.1, 0.2, 0.3);
        assert!(matches!(
            geodesic(&s, x, x, 0.0),
            Err(Error::DegenerateEndpoints)
        ));
        assert_eq!(distance(&s, x, x, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn dilation_monotone_and_bracketed() {
        let s = Scene::symmetric_pair(0.5, 0.5);
        let x = vec3(-1.0, 0.0, 0.0);
        let y = vec3(1.0, 0.0, 0.0);
        let br = dilated_distance_bracket(&s, x, y, 0.0, 0.05).unwrap();
        assert!(br.d_delta_prime <= br.d_delta + 1e-12);
        assert!(br.d_delta <= br.upper + 1e-12);
        // concentric through-pair: base 2 - 0.75*1 = 1.25, and the distance
        // drops at rate 2(1-b^2) per unit dilation
        let expect = 1.25 - 2.0 * (1.0 - 0.25) * 0.05;
        assert!((br.d_delta_prime - expect).abs() < 1e-9, "{}", br.d_delta_prime);
    }

    #[test]
    fn distance_with_hint_matches_full_solver() {
        let s = scene_ball03(0.3);
        let y = vec3(0.9, 0.0, 0.0);
        let mut hint = None;
        for i in 0..40 {
            let t = i as f64 / 39.0;
            let x = vec3(-0.9 + 0.02 * t, -0.5 + 1.0 * t, 0.3 * t);
            let fast = distance_with_hint(&s, x, y, 0.0, &mut hint).unwrap();
            let full = distance(&s, x, y, 0.0).unwrap();
            assert!(
                (fast - full).abs() < 1e-7,
                "hint path diverged: {fast} vs {full} at {x:?}"
            );
        }
    }

    #[test]
    fn ball_distance_identities() {
        let s = Scene::symmetric_pair(0.5, 0.5);
        // x on the axis outside the inclusion, K straddling the geodesic
        let x = vec3(0.9, 0.0, 0.0);
        let (d0, p0) = distance_to_ball(&s, x, vec3(0.7, 0.0, 0.0), 0.05, 0.0).unwrap();
        assert!((d0 - 0.15).abs() < 1e-8, "d0={d0}");
        assert!(p0.dist(vec3(0.75, 0.0, 0.0)) < 1e-5);
        // inside K
        let (di, pi) = distance_to_ball(&s, vec3(0.7, 0.01, 0.0), vec3(0.7, 0.0, 0.0), 0.05, 0.0)
            .unwrap();
        assert_eq!(di, 0.0);
        assert_eq!(pi, vec3(0.7, 0.01, 0.0));
    }

    #[test]
    fn pseudo_distance_identities() {
        let s = Scene::symmetric_pair(0.5, 0.5);
        let x = vec3(1.0, 0.0, 0.0);
        let y = vec3(-1.0, 0.0, 0.0);
        let d = distance(&s, x, y, 0.0).unwrap();
        // K off the geodesic: pseudo-distance equals the distance
        let (v, curve) =
            pseudo_distance(&s, vec3(0.0, 0.6, 0.0), 0.05, x, y, 0.0).unwrap();
        assert!(!curve.through_k);
        assert!((v - d).abs() < 1e-9);
        // K centered on the geodesic inside the inclusion: the through-K
        // value drops by 2 a^2(x0) r = 2 * 0.25 * 0.05
        let (v, curve) = pseudo_distance(&s, vec3(0.0, 0.0, 0.0), 0.05, x, y, 0.0).unwrap();
        assert!(curve.through_k);
        assert!((v - (d - 2.0 * 0.25 * 0.05)).abs() < 1e-6, "v={v}");
        assert_eq!(curve.components.len(), 2);
    }
}
