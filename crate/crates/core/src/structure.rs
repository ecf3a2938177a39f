//! Certified structure functions.
//!
//! A structure function is a scalar field whose signed sum over the
//! singularities nearly attains the minimal connection value while its
//! gradient respects the weighted metric. The pipeline:
//!
//! 1. tightened assignment duals on the singularities (dilation delta'),
//! 2. cone extension `xi1(x) = max_i { xi0(p_i) - d(x, p_i) }`,
//! 3. shrink-and-mollify `xi2 = (1-beta) xi1 * rho_t`,
//!
//! followed by three a posteriori certificates recorded on the grid:
//! metric-Lipschitz slack on random node pairs, the potential gap against
//! its target, and a per-edge finite-difference bound. The compact
//! variant adds a plateau branch that makes the field exactly constant on
//! a given ball by switching to the pseudo-distance around its fattening.
//!
//! The dumbbell function (explicit structure function of the symmetric
//! scene whose level sets are spheres) and the coarea degree bound live
//! here as well.

use crate::connection::{connection_avoiding, dual_potential, minimal_connection, DualPotential};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Scene};
use crate::grid::{Certificate, ScalarFieldGrid};
use crate::metric::{coarse_circle_min, distance, distance_to_ball, MetricContext};
use crate::numerics::{golden_min, nelder_mead};
use crate::profile::RadialProfile;
use crate::vec3::{vec3, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parameters of a structure-function build.
#[derive(Clone, Debug)]
pub struct StructureOptions {
    pub eta: f64,
    /// Grid spacing.
    pub h: f64,
    /// Certificate-level dilation; auto-chosen from the eta budget when
    /// absent.
    pub delta: Option<f64>,
    pub seed: u64,
    /// Random node pairs for the metric-Lipschitz certificate.
    pub lipschitz_pairs: usize,
}

impl StructureOptions {
    pub fn new(eta: f64, h: f64) -> StructureOptions {
        StructureOptions {
            eta,
            h,
            delta: None,
            seed: 7,
            lipschitz_pairs: 500,
        }
    }
}

/// Plateau branch of the compact variant: the field is clamped from
/// below by `level - d(x, K1)`.
struct PlateauBranch {
    center: Vec3,
    radius: f64,
    level: f64,
    /// Warm-start angle for the boundary-crossing search.
    hint: Option<f64>,
    /// Last query and its result, for the triangle-inequality guard.
    last: Option<(Vec3, f64)>,
}

struct Anchor {
    point: Vec3,
    value: f64,
    hint: Option<[f64; 2]>,
    last: Option<(Vec3, f64)>,
}

/// Warm-started distance with a staleness guard: every returned value is
/// the length of a concrete path, hence an upper bound, so a result
/// exceeding the previous one by more than the query displacement proves
/// the warm start landed in the wrong basin and forces a fresh scan.
fn anchored_distance(ctx: &MetricContext, a: &mut Anchor, x: Vec3) -> f64 {
    let mut v = ctx.point_distance(x, a.point, &mut a.hint);
    if let Some((lp, lv)) = a.last {
        if v > lv + x.dist(lp) + 1e-9 {
            a.hint = None;
            let fresh = ctx.point_distance(x, a.point, &mut a.hint);
            v = v.min(fresh);
        }
    }
    a.last = Some((x, v));
    v
}

/// Pointwise evaluator of the cone extension, with warm starts carried
/// across nearby queries (grid fills scan contiguously).
pub struct PotentialEvaluator<'a> {
    pub ctx: MetricContext<'a>,
    anchors: Vec<Anchor>,
    plateau: Option<PlateauBranch>,
}

impl<'a> PotentialEvaluator<'a> {
    pub fn eval(&mut self, x: Vec3) -> f64 {
        // a minimizing path crosses the convex inclusion in one chord, so
        // d >= max(b^2 |x-y|, |x-y| - (1-b^2) diam); branches whose cone
        // value cannot beat the running best under that bound are skipped
        let b2 = self.ctx.b_sq();
        let relief = (1.0 - b2) * body_diameter(&self.ctx.body);
        let dlb = |euclid: f64| (b2 * euclid).max(euclid - relief).max(0.0);
        let mut order: Vec<(f64, usize)> = self
            .anchors
            .iter()
            .enumerate()
            .map(|(i, a)| (a.value - dlb(x.dist(a.point)), i))
            .collect();
        if let Some(p) = &self.plateau {
            let reach = (x.dist(p.center) - p.radius).max(0.0);
            order.push((p.level - dlb(reach), usize::MAX));
        }
        order.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = f64::NEG_INFINITY;
        for (bound, i) in order {
            if bound <= best {
                break;
            }
            let v = if i == usize::MAX {
                let p = self.plateau.as_mut().unwrap();
                p.level - plateau_guarded_distance(&self.ctx, p, x)
            } else {
                let a = &mut self.anchors[i];
                a.value - anchored_distance(&self.ctx, a, x)
            };
            best = best.max(v);
        }
        best
    }

    /// Fast distance to the plateau ball, if one is attached.
    pub fn plateau_distance(&mut self, x: Vec3) -> Option<f64> {
        self.plateau
            .as_mut()
            .map(|p| plateau_guarded_distance(&self.ctx, p, x))
    }
}

/// Upper bound on the euclidean diameter of the inclusion; padded for
/// polytopes because their support is computed by an iterative ascent.
fn body_diameter(body: &crate::geometry::ConvexBody) -> f64 {
    match body {
        crate::geometry::ConvexBody::Ball { radius, .. } => 2.0 * radius,
        crate::geometry::ConvexBody::Polytope { .. } => {
            let (lo, hi) = body.bounding_box();
            (hi - lo).norm() * 1.01 + 1e-9
        }
    }
}

/// The same staleness guard around the plateau distance.
fn plateau_guarded_distance(ctx: &MetricContext, p: &mut PlateauBranch, x: Vec3) -> f64 {
    let mut v = ball_distance_fast(ctx, p.center, p.radius, x, &mut p.hint);
    if let Some((lp, lv)) = p.last {
        if v > lv + x.dist(lp) + 1e-9 {
            p.hint = None;
            let fresh = ball_distance_fast(ctx, p.center, p.radius, x, &mut p.hint);
            v = v.min(fresh);
        }
    }
    p.last = Some((x, v));
    v
}

/// Distance from `x` to the closed ball `K` under the evaluator's dilated
/// weight. Exact closed forms where the geometry allows, otherwise a
/// warm-started boundary-crossing search in the common symmetry plane.
fn ball_distance_fast(
    ctx: &MetricContext,
    kc: Vec3,
    kr: f64,
    x: Vec3,
    hint: &mut Option<f64>,
) -> f64 {
    let dxk = x.dist(kc);
    if dxk <= kr {
        return 0.0;
    }
    let b2 = ctx.b_sq();
    if let ConvexBody::Ball { center: oc, radius: orad } = ctx.body {
        let k_sep = kc.dist(oc);
        if k_sep + kr <= orad + 1e-12 {
            // the ball sits inside the dilated inclusion
            if x.dist(oc) <= orad {
                return b2 * (dxk - kr); // chord, exact
            }
            if k_sep < 1e-12 {
                // concentric: radial path, exact
                return (x.dist(oc) - orad) + b2 * (orad - kr);
            }
            // single crossing of the inclusion boundary, in the symmetry
            // plane through x, the ball center and the inclusion center
            let e1 = (x - oc).normalize();
            let raw2 = (kc - oc) - e1 * (kc - oc).dot(e1);
            let e2 = raw2
                .try_normalize(1e-12)
                .unwrap_or_else(|| e1.any_orthogonal());
            let f = |th: f64| {
                let bpt = oc + (e1 * th.cos() + e2 * th.sin()) * orad;
                x.dist(bpt) + b2 * ((bpt.dist(kc) - kr).max(0.0))
            };
            let start = match hint {
                Some(t) => *t,
                None => coarse_circle_min(&f, 96).1,
            };
            let (t, v) = golden_min(&f, start - 0.2, start + 0.2, 1e-12);
            let (t, v) = {
                let coarse = coarse_circle_min(&f, 16);
                if coarse.0 < v - 1e-9 {
                    // warm start missed the basin
                    let full = coarse_circle_min(&f, 96);
                    golden_min(&f, full.1 - 0.2, full.1 + 0.2, 1e-12)
                } else {
                    (t, v)
                }
            };
            *hint = Some(t);
            return v;
        }
        if k_sep - kr >= orad - 1e-12 && x.dist(oc) >= orad {
            // both outside: the straight approach is exact when a detour
            // through the inclusion cannot pay off
            let detour = (x.dist(oc) - orad) + (k_sep - kr - orad).max(0.0);
            if detour >= dxk - kr - 1e-12 {
                return dxk - kr;
            }
        }
    }
    // generic: minimize the point distance over the ball boundary circle
    // in the symmetry plane through x, the ball center and the inclusion
    let (lo, hi) = ctx.body.bounding_box();
    let body_center = (lo + hi) * 0.5;
    let e1 = (x - kc).normalize();
    let raw2 = (body_center - kc) - e1 * (body_center - kc).dot(e1);
    let e2 = raw2
        .try_normalize(1e-12)
        .unwrap_or_else(|| e1.any_orthogonal());
    let f = |th: f64| {
        let s = kc + (e1 * th.cos() + e2 * th.sin()) * kr;
        let mut h = None;
        ctx.point_distance(x, s, &mut h)
    };
    let coarse = coarse_circle_min(&f, 48);
    let (t, v) = golden_min(&f, coarse.1 - 0.2, coarse.1 + 0.2, 1e-12);
    *hint = Some(t);
    v.min(dxk - kr)
}

/// Extend boundary data to a pointwise field by metric cones from the
/// positive singularities.
pub fn extend_potential<'a>(
    scene: &'a Scene,
    xi0: &DualPotential,
    delta: f64,
) -> Result<PotentialEvaluator<'a>> {
    let ctx = MetricContext::new(scene, delta)?;
    let pos = &scene.singularities.positive;
    let neg = &scene.singularities.negative;
    if xi0.xi_pos.len() != pos.len() || xi0.xi_neg.len() != neg.len() {
        return Err(Error::InfeasiblePotential(format!(
            "boundary data carries {}+{} values for {}+{} singularities",
            xi0.xi_pos.len(),
            xi0.xi_neg.len(),
            pos.len(),
            neg.len()
        )));
    }
    // feasibility: 1-Lipschitz on all singularity pairs for this metric
    let all: Vec<(Vec3, f64)> = pos
        .iter()
        .copied()
        .zip(xi0.xi_pos.iter().copied())
        .chain(neg.iter().copied().zip(xi0.xi_neg.iter().copied()))
        .collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let mut hint = None;
            let d = ctx.point_distance(all[i].0, all[j].0, &mut hint);
            if (all[i].1 - all[j].1).abs() > d + 1e-9 {
                return Err(Error::InfeasiblePotential(format!(
                    "|xi({}) - xi({})| = {} exceeds distance {}",
                    i,
                    j,
                    (all[i].1 - all[j].1).abs(),
                    d
                )));
            }
        }
    }
    let mut eval = PotentialEvaluator {
        ctx,
        anchors: pos
            .iter()
            .zip(&xi0.xi_pos)
            .map(|(&p, &v)| Anchor {
                point: p,
                value: v,
                hint: None,
                last: None,
            })
            .collect(),
        plateau: None,
    };
    // the extension must reproduce the boundary data on the whole
    // singularity set (guaranteed for duals of an optimal assignment)
    for (p, want) in &all {
        let got = eval.eval(*p);
        if (got - want).abs() > 1e-9 {
            return Err(Error::InfeasiblePotential(format!(
                "extension restricts to {got} at a singularity carrying {want}"
            )));
        }
    }
    Ok(eval)
}

/// Number of kernel cells per side: largest `m` with `m h < t`.
fn kernel_cells(t: f64, h: f64) -> usize {
    let m = (t / h).ceil() as isize - 1;
    m.max(0) as usize
}

/// Discrete mollification with a quartic bump of radius `t`, then a
/// `(1-beta)` shrink. The output grid is cropped by the kernel radius so
/// every retained node has full support. `t <= h` degenerates to the
/// plain shrink.
pub fn mollify(field: &ScalarFieldGrid, t: f64, beta: f64) -> Result<ScalarFieldGrid> {
    if !(t > 0.0) || !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidScene(format!(
            "mollifier parameters out of range: t={t} beta={beta}"
        )));
    }
    let h = field.h;
    let m = kernel_cells(t, h);
    let min_dim = field.dims.iter().copied().min().unwrap();
    if 2 * m >= min_dim {
        return Err(Error::KernelWiderThanMargin {
            t,
            margin: (min_dim.saturating_sub(1)) as f64 * h / 2.0,
        });
    }
    // quartic bump weights on the cube of offsets, normalized to unit mass
    let mi = m as isize;
    let mut offsets = Vec::new();
    let mut total = 0.0f64;
    for dz in -mi..=mi {
        for dy in -mi..=mi {
            for dx in -mi..=mi {
                let r2 = (dx * dx + dy * dy + dz * dz) as f64 * h * h / (t * t);
                if r2 >= 1.0 {
                    continue;
                }
                let w = (1.0 - r2) * (1.0 - r2);
                offsets.push((dx, dy, dz, w));
                total += w;
            }
        }
    }
    for o in offsets.iter_mut() {
        o.3 /= total;
    }
    let dims = [
        field.dims[0] - 2 * m,
        field.dims[1] - 2 * m,
        field.dims[2] - 2 * m,
    ];
    let origin = field.origin + vec3(m as f64 * h, m as f64 * h, m as f64 * h);
    let mut out = ScalarFieldGrid::new(origin, h, dims);
    let (nx, ny) = (field.dims[0], field.dims[1]);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let (ci, cj, ck) = (i + m, j + m, k + m);
                let mut acc = 0.0;
                for (dx, dy, dz, w) in &offsets {
                    let src = ((ck as isize + dz) as usize * ny + (cj as isize + dy) as usize)
                        * nx
                        + (ci as isize + dx) as usize;
                    acc += w * field.values[src];
                }
                let dst = (k * dims[1] + j) * dims[0] + i;
                out.values[dst] = (1.0 - beta) * acc;
            }
        }
    }
    Ok(out)
}

/// Build a certified structure function for the scene.
pub fn structure_function(scene: &Scene, opts: &StructureOptions) -> Result<ScalarFieldGrid> {
    build_structure(scene, opts, None)
}

/// Compact variant: additionally exactly constant on the closed ball `K`.
pub fn structure_function_constant_on_k(
    scene: &Scene,
    k_center: Vec3,
    k_radius: f64,
    opts: &StructureOptions,
) -> Result<ScalarFieldGrid> {
    build_structure(scene, opts, Some((k_center, k_radius)))
}

fn build_structure(
    scene: &Scene,
    opts: &StructureOptions,
    kball: Option<(Vec3, f64)>,
) -> Result<ScalarFieldGrid> {
    let report = scene.validate()?;
    let k = scene.singularities.k();
    if k == 0 {
        return Err(Error::InvalidScene(
            "structure function needs at least one singularity pair".into(),
        ));
    }
    let (eta, h) = (opts.eta, opts.h);
    if !(eta > 0.0) || !(h > 0.0) {
        return Err(Error::InvalidScene(format!(
            "eta and h must be positive, got eta={eta} h={h}"
        )));
    }
    if let Some((kc, kr)) = kball {
        if !(kr > 0.0) {
            return Err(Error::InvalidScene("plateau ball needs positive radius".into()));
        }
        for s in scene.singularities.all_points() {
            if s.dist(kc) <= kr + 1e-12 {
                return Err(Error::KTouchesSingularity(format!(
                    "singularity {s:?} lies in the plateau ball"
                )));
            }
        }
        let (lo, hi) = scene.domain.bounding_box();
        let double_ok = (0..3).all(|a| {
            let (c, l, u) = match a {
                0 => (kc.x, lo.x, hi.x),
                1 => (kc.y, lo.y, hi.y),
                _ => (kc.z, lo.z, hi.z),
            };
            c - 2.0 * kr >= l - 1e-12 && c + 2.0 * kr <= u + 1e-12
        });
        if !double_ok {
            return Err(Error::InvalidScene(
                "doubled plateau ball leaves the domain bounding box".into(),
            ));
        }
    }

    // certificate-level dilation from the eta budget, capped by clearance
    let divisor = if kball.is_some() { 16.0 } else { 8.0 } * k as f64;
    let delta = opts
        .delta
        .unwrap_or_else(|| (eta / divisor).min(report.clearance / 3.0));
    if !(delta > 0.0) {
        return Err(Error::EtaBudgetInfeasible(format!(
            "no admissible dilation: eta={eta}, clearance={}",
            report.clearance
        )));
    }
    let delta_ext = 1.5 * delta; // extension-level dilation
    let t = 0.25 * delta; // mollifier radius, below delta_ext - delta
    let beta = 0.125 * delta;

    let l0 = minimal_connection(scene, 0.0)?.value();
    let conn = minimal_connection(scene, delta)?;
    if l0 - conn.value() > 0.5 * eta + 1e-12 {
        return Err(Error::EtaBudgetInfeasible(format!(
            "connection value drops by {} under dilation {delta}, over the eta/2 reserve {}",
            l0 - conn.value(),
            0.5 * eta
        )));
    }
    let conn_ext = minimal_connection(scene, delta_ext)?;
    let dual = dual_potential(scene, &conn_ext)?;
    let mut eval = extend_potential(scene, &dual, delta_ext)?;
    if let Some((kc, kr)) = kball {
        let k1 = kr + 2.0 * delta;
        let mut level = f64::NEG_INFINITY;
        for (p, v) in scene
            .singularities
            .positive
            .iter()
            .zip(&dual.xi_pos)
        {
            let (d, _) = distance_to_ball(scene, *p, kc, k1, delta_ext)?;
            level = level.max(v - d);
        }
        eval.plateau = Some(PlateauBranch {
            center: kc,
            radius: k1,
            level,
            hint: None,
            last: None,
        });
    }

    // expanded raw grid: two spacings of sampling margin plus the kernel
    let m = kernel_cells(t, h);
    let margin = (2 + m) as f64 * h;
    let (lo, hi) = scene.domain.bounding_box();
    let origin = vec3(
        ((lo.x - margin) / h).floor() * h,
        ((lo.y - margin) / h).floor() * h,
        ((lo.z - margin) / h).floor() * h,
    );
    let dims = [
        ((hi.x + margin - origin.x) / h).ceil() as usize + 1,
        ((hi.y + margin - origin.y) / h).ceil() as usize + 1,
        ((hi.z + margin - origin.z) / h).ceil() as usize + 1,
    ];
    let mut raw = ScalarFieldGrid::new(origin, h, dims);
    // nodes beyond kernel reach of the domain never feed an in-domain
    // value; mark them unset instead of paying a distance query each
    let fill_reach = (m + 3) as f64 * h;
    for kk in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let idx = (kk * dims[1] + j) * dims[0] + i;
                let p = raw.pos(i, j, kk);
                raw.values[idx] = if scene.domain.signed_distance(p) <= fill_reach {
                    eval.eval(p)
                } else {
                    f64::NAN
                };
            }
        }
    }

    let mut out = mollify(&raw, t, beta)?;
    if let Some((kc, kr)) = kball {
        // overwrite the inner plateau to its average: exact constancy
        let k2 = kr + delta;
        let mut idxs = Vec::new();
        let mut sum = 0.0;
        for kk in 0..out.dims[2] {
            for j in 0..out.dims[1] {
                for i in 0..out.dims[0] {
                    if out.pos(i, j, kk).dist(kc) <= k2 {
                        let idx = (kk * out.dims[1] + j) * out.dims[0] + i;
                        idxs.push(idx);
                        sum += out.values[idx];
                    }
                }
            }
        }
        if !idxs.is_empty() {
            let avg = sum / idxs.len() as f64;
            for idx in idxs {
                out.values[idx] = avg;
            }
        }
    }

    let cert = certify(scene, &mut eval, &out, opts, delta, delta_ext, t, beta, l0, kball)?;
    let passed = cert.passed;
    let summary = format!(
        "lipschitz slack {:.3e} (allow {:.3e}), gap {:.6} (target {:.6}), gradient ratio {:.6}",
        cert.lipschitz_metric_slack,
        cert.lipschitz_allowance,
        cert.gap,
        cert.gap_target,
        cert.gradient_worst_ratio
    );
    out.certificate = Some(cert);
    if !passed {
        return Err(Error::EtaBudgetInfeasible(format!(
            "certificate failed: {summary}"
        )));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn certify(
    scene: &Scene,
    eval: &mut PotentialEvaluator,
    out: &ScalarFieldGrid,
    opts: &StructureOptions,
    delta: f64,
    delta_ext: f64,
    t: f64,
    beta: f64,
    l0: f64,
    kball: Option<(Vec3, f64)>,
) -> Result<Certificate> {
    let h = out.h;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // nodes inside the closed domain
    let mut nodes = Vec::new();
    for k in 0..out.dims[2] {
        for j in 0..out.dims[1] {
            for i in 0..out.dims[0] {
                let p = out.pos(i, j, k);
                if scene.domain.contains_closed(p) {
                    nodes.push(((k * out.dims[1] + j) * out.dims[0] + i, p));
                }
            }
        }
    }
    if nodes.len() < 2 {
        return Err(Error::ShapeMismatch(
            "grid carries fewer than two nodes inside the domain".into(),
        ));
    }

    // (a) metric-Lipschitz on random node pairs
    let mut slack = 0.0f64;
    for _ in 0..opts.lipschitz_pairs {
        let a = nodes[rng.gen_range(0..nodes.len())];
        let b = nodes[rng.gen_range(0..nodes.len())];
        if a.0 == b.0 {
            continue;
        }
        let d = distance(scene, a.1, b.1, delta)?;
        let diff = (out.values[a.0] - out.values[b.0]).abs();
        slack = slack.max(diff - d);
    }
    let allowance = 2.0 * h;
    let lip_ok = slack <= allowance + 1e-9;

    // cross-check the fast plateau distance against the reference solver
    if let Some((kc, kr)) = kball {
        let k1 = kr + 2.0 * delta;
        for _ in 0..50 {
            let p = nodes[rng.gen_range(0..nodes.len())].1;
            let fast = eval.plateau_distance(p).unwrap();
            let (slow, _) = distance_to_ball(scene, p, kc, k1, delta_ext)?;
            if (fast - slow).abs() > 1e-6 * (1.0 + slow) {
                return Err(Error::NoConvergence(format!(
                    "plateau distance mismatch at {p:?}: fast {fast} vs reference {slow}"
                )));
            }
        }
    }

    // (b) gap against its target
    let mut gap = 0.0;
    for p in &scene.singularities.positive {
        gap += out.sample(*p)?;
    }
    for n in &scene.singularities.negative {
        gap -= out.sample(*n)?;
    }
    let gap_target = match kball {
        None => l0 - opts.eta,
        Some((kc, kr)) => connection_avoiding(scene, kc, kr, delta)?.base_value - opts.eta,
    };
    let gap_ok = gap >= gap_target - 1e-9;

    // (c) per-edge finite differences against the shifted-dilation weight
    let thin = MetricContext::new(scene, delta_ext - t)?;
    let mut worst_ratio = 0.0f64;
    let mut edges = 0usize;
    let (nx, ny, nz) = (out.dims[0], out.dims[1], out.dims[2]);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let idx = (k * ny + j) * nx + i;
                let p = out.pos(i, j, k);
                for (di, dj, dk) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
                    let (i2, j2, k2) = (i + di, j + dj, k + dk);
                    if i2 >= nx || j2 >= ny || k2 >= nz {
                        continue;
                    }
                    let idx2 = (k2 * ny + j2) * nx + i2;
                    if !out.values[idx].is_finite() || !out.values[idx2].is_finite() {
                        continue; // edge reaches past the filled shell
                    }
                    let q = out.pos(i2, j2, k2);
                    let df = (out.values[idx2] - out.values[idx]).abs();
                    let cap = (1.0 - beta) * thin.segment_length(p, q) + 1e-9;
                    worst_ratio = worst_ratio.max(df / cap);
                    edges += 1;
                }
            }
        }
    }
    let fd_ok = worst_ratio <= 1.0;

    Ok(Certificate {
        lipschitz_metric_slack: slack.max(0.0),
        lipschitz_pairs: opts.lipschitz_pairs,
        lipschitz_allowance: allowance,
        gap,
        gap_target,
        gradient_worst_ratio: worst_ratio,
        gradient_edges: edges,
        eta: opts.eta,
        delta,
        t,
        beta,
        passed: lip_ok && gap_ok && fd_ok,
    })
}

/// Worst excess of the per-edge finite difference over a pointwise floor:
/// `max over edges of |df|/h - max(floor(p), floor(q)) - 2h`. Negative
/// when the floor dominates the discrete gradient everywhere.
pub fn gradient_floor_excess(
    field: &ScalarFieldGrid,
    mut floor: impl FnMut(Vec3) -> f64,
) -> (f64, usize) {
    let h = field.h;
    let (nx, ny, nz) = (field.dims[0], field.dims[1], field.dims[2]);
    let mut worst = f64::NEG_INFINITY;
    let mut edges = 0usize;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let idx = (k * ny + j) * nx + i;
                let p = field.pos(i, j, k);
                let fp = floor(p);
                for (di, dj, dk) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
                    let (i2, j2, k2) = (i + di, j + dj, k + dk);
                    if i2 >= nx || j2 >= ny || k2 >= nz {
                        continue;
                    }
                    let idx2 = (k2 * ny + j2) * nx + i2;
                    if !field.values[idx].is_finite() || !field.values[idx2].is_finite() {
                        continue;
                    }
                    let q = field.pos(i2, j2, k2);
                    let df = (field.values[idx2] - field.values[idx]).abs() / h;
                    let excess = df - fp.max(floor(q)) - 2.0 * h;
                    worst = worst.max(excess);
                    edges += 1;
                }
            }
        }
    }
    (worst, edges)
}

/// Signed count of singularities whose shifted potential value exceeds
/// the level, integrated exactly over all levels with the negative part
/// clipped (a degree count is nonnegative).
///
/// Returns `(integral of max(S,0), sum of gaps - 2 k rho)`; the first is
/// never below the second.
pub fn coarea_degree_bound(
    positive: &[Vec3],
    negative: &[Vec3],
    field: &ScalarFieldGrid,
    rho: f64,
    eta: f64,
) -> Result<(f64, f64)> {
    if positive.len() != negative.len() {
        return Err(Error::InvalidScene(
            "signed singularities must balance".into(),
        ));
    }
    if !(rho > 0.0) || eta < 0.0 {
        return Err(Error::InvalidScene(format!(
            "need rho > 0 and eta >= 0, got rho={rho} eta={eta}"
        )));
    }
    let k = positive.len();
    // S(t) steps by +1 down at xi(p)-rho, -1 down at xi(n)+rho; sweep the
    // breakpoints from above
    let mut events = Vec::with_capacity(2 * k);
    for p in positive {
        events.push((field.sample(*p)? - rho, 1i32));
    }
    for n in negative {
        events.push((field.sample(*n)? + rho, -1i32));
    }
    events.sort_by(|a, b| b.0.total_cmp(&a.0));
    // the signed sweep telescopes to sum of gaps - 2 k rho; accumulating
    // both sums through the same terms keeps integral >= bound exact even
    // in floating point (the clipped sum only drops non-positive terms)
    let mut integral = 0.0;
    let mut bound = 0.0;
    let mut s = 0i32;
    let mut prev = events[0].0;
    for (level, step) in events {
        let term = s as f64 * (prev - level);
        if s > 0 {
            integral += term;
        }
        bound += term;
        s += step;
        prev = level;
    }
    Ok((integral, bound))
}

/// Axis weight of the dumbbell: the squared radial profile, or 1.
enum AxisWeight {
    One,
    Profile(RadialProfile),
}

impl AxisWeight {
    fn at_radius(&self, r: f64) -> f64 {
        match self {
            AxisWeight::One => 1.0,
            AxisWeight::Profile(p) => {
                let u = p.value(r);
                u * u
            }
        }
    }
}

/// The explicit structure function of the symmetric scene: level sets are
/// spheres about the doubled singularities, the value is the axis
/// integral of the squared profile, and the function vanishes on a
/// neighborhood of a marked point.
pub struct DumbbellFunction {
    pub p: Vec3,
    pub n: Vec3,
    pub m: Vec3,
    /// Abscissa of the tangent plane separating the two families.
    pub x0: f64,
    weight: AxisWeight,
    /// Integration knots of the axis weight on [-1, 1].
    knots: Vec<f64>,
    /// Cumulative integral of the weight from `x0` at each knot.
    cumulative: Vec<f64>,
}

impl DumbbellFunction {
    /// `xi0(s)`: axis integral of the squared profile from `x0` to `s`.
    pub fn xi0(&self, s: f64) -> f64 {
        let s = s.clamp(-1.0, 1.0);
        let i = match self
            .knots
            .binary_search_by(|k| k.total_cmp(&s))
        {
            Ok(i) => return self.cumulative[i],
            Err(i) => i,
        };
        // partial interval [knots[i-1], s]; Simpson is exact for the
        // piecewise-quadratic integrand
        let a = self.knots[i - 1];
        let base = self.cumulative[i - 1];
        let mid = 0.5 * (a + s);
        let quad = (s - a) / 6.0
            * (self.weight.at_radius(a.abs())
                + 4.0 * self.weight.at_radius(mid.abs())
                + self.weight.at_radius(s.abs()));
        base + quad
    }

    pub fn value_at_p(&self) -> f64 {
        self.xi0(1.0)
    }

    pub fn value_at_n(&self) -> f64 {
        self.xi0(-1.0)
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        let dp = x.dist(self.p * 2.0);
        if dp <= 1.0 {
            return self.xi0(1.0);
        }
        if dp < 2.0 - self.x0 {
            return self.xi0(2.0 - dp);
        }
        let dn = x.dist(self.n * 2.0);
        if dn <= 1.0 {
            return self.xi0(-1.0);
        }
        if dn < 2.0 + self.x0 {
            return self.xi0(dn - 2.0);
        }
        0.0
    }

    /// Center and radius of the level sphere for a regular value, or
    /// `None` when the level is not regular (0, the two plateau values,
    /// or out of range).
    pub fn level_radius(&self, t: f64) -> Option<(Vec3, f64)> {
        let (lo, hi) = (self.xi0(-1.0), self.xi0(1.0));
        if t <= lo + 1e-13 || t >= hi - 1e-13 || t.abs() < 1e-13 {
            return None;
        }
        // invert the strictly increasing xi0 by bisection
        let (mut a, mut b) = (-1.0f64, 1.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if self.xi0(mid) < t {
                a = mid;
            } else {
                b = mid;
            }
        }
        let s = 0.5 * (a + b);
        if t > 0.0 {
            Some((self.p * 2.0, 2.0 - s))
        } else {
            Some((self.n * 2.0, 2.0 + s))
        }
    }
}

/// Build the dumbbell function for a symmetric scene with antipodal
/// singularities. `profile = None` means unit weight.
pub fn dumbbell(
    scene: &Scene,
    profile: Option<&RadialProfile>,
    m: Vec3,
) -> Result<DumbbellFunction> {
    scene.validate()?;
    let sym_err = |msg: &str| Error::InvalidScene(format!("dumbbell needs the symmetric scene: {msg}"));
    let ConvexBody::Ball { center: dc, radius: dr } = scene.domain else {
        return Err(sym_err("domain is not a ball"));
    };
    if dc.norm() > 1e-12 || (dr - 1.0).abs() > 1e-12 {
        return Err(sym_err("domain is not the unit ball at the origin"));
    }
    let ConvexBody::Ball { center: ic, .. } = scene.inclusion else {
        return Err(sym_err("inclusion is not a ball"));
    };
    if ic.norm() > 1e-12 {
        return Err(sym_err("inclusion is not centered"));
    }
    if scene.singularities.k() != 1 {
        return Err(sym_err("need exactly one singularity pair"));
    }
    let p = scene.singularities.positive[0];
    let n = scene.singularities.negative[0];
    if (p + n).norm() > 1e-12 {
        return Err(sym_err("singularities are not antipodal"));
    }
    if !scene.domain.contains_closed(m) {
        return Err(Error::InvalidScene(
            "marked point must lie in the closed domain".into(),
        ));
    }
    let dp2 = m.dist(p * 2.0);
    let dn2 = m.dist(n * 2.0);
    if dp2 + dn2 <= 4.0 + 1e-12 {
        return Err(Error::MOnAxis(format!(
            "marked point {m:?} lies on the segment between the singularities"
        )));
    }
    // any abscissa in ((2 - |M-2p|), (|M-2n| - 2)) leaves M outside both
    // families; take the midpoint
    let x0 = 0.5 * ((2.0 - dp2) + (dn2 - 2.0));
    let weight = match profile {
        None => AxisWeight::One,
        Some(rp) => AxisWeight::Profile(rp.clone()),
    };
    // knots where the axis weight changes analytic form
    let mut knots = vec![-1.0, x0.clamp(-1.0, 1.0), 0.0, 1.0];
    if let AxisWeight::Profile(rp) = &weight {
        for &r in &rp.mesh {
            if r < 1.0 {
                knots.push(r);
                knots.push(-r);
            }
        }
    }
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    // cumulative Simpson (exact per piecewise-quadratic interval), then
    // shift so the x0 knot is the zero
    let mut cumulative = vec![0.0; knots.len()];
    for i in 1..knots.len() {
        let (a, b) = (knots[i - 1], knots[i]);
        let mid = 0.5 * (a + b);
        cumulative[i] = cumulative[i - 1]
            + (b - a) / 6.0
                * (weight.at_radius(a.abs())
                    + 4.0 * weight.at_radius(mid.abs())
                    + weight.at_radius(b.abs()));
    }
    let mut f = DumbbellFunction {
        p,
        n,
        m,
        x0,
        weight,
        knots,
        cumulative,
    };
    let shift = f.xi0_raw(x0);
    for c in f.cumulative.iter_mut() {
        *c -= shift;
    }
    Ok(f)
}

impl DumbbellFunction {
    /// xi0 before the zero-shift at x0 (used once during construction).
    fn xi0_raw(&self, s: f64) -> f64 {
        self.xi0(s)
    }
}

/// Weighted length of a polyline under the squared radial profile,
/// Gauss–Legendre per segment.
fn profile_polyline_length(weight: &dyn Fn(f64) -> f64, pts: &[Vec3]) -> f64 {
    // 16-point Gauss–Legendre nodes/weights on [0,1]
    const GL: [(f64, f64); 8] = [
        (0.09501250983763744, 0.18945061045506850),
        (0.28160355077925891, 0.18260341504492359),
        (0.45801677765722739, 0.16915651939500254),
        (0.61787624440264375, 0.14959598881657673),
        (0.75540440835500303, 0.12462897125553387),
        (0.86563120238783174, 0.09515851168249278),
        (0.94457502307323258, 0.06225352393864789),
        (0.98940093499164993, 0.02715245941175409),
    ];
    let mut total = 0.0;
    for w in pts.windows(2) {
        let len = w[0].dist(w[1]);
        if len == 0.0 {
            continue;
        }
        let mut acc = 0.0;
        for (x, gw) in GL {
            for s in [0.5 * (1.0 - x), 0.5 * (1.0 + x)] {
                let p = w[0] + (w[1] - w[0]) * s;
                acc += 0.5 * gw * weight(p.norm());
            }
        }
        total += len * acc;
    }
    total
}

/// Distance between two points under the squared-profile weight,
/// approximated from above by relaxing a three-segment polyline. Used to
/// test the dumbbell Lipschitz property (any upper bound is valid there).
pub fn profile_weighted_distance(
    profile: Option<&RadialProfile>,
    x: Vec3,
    y: Vec3,
) -> f64 {
    let weight: Box<dyn Fn(f64) -> f64> = match profile {
        None => Box::new(|_| 1.0),
        Some(rp) => {
            let rp = rp.clone();
            Box::new(move |r| {
                let u = rp.value(r);
                u * u
            })
        }
    };
    let straight = profile_polyline_length(&weight, &[x, y]);
    let f = |v: &[f64]| {
        profile_polyline_length(
            &weight,
            &[
                x,
                vec3(v[0], v[1], v[2]),
                vec3(v[3], v[4], v[5]),
                y,
            ],
        )
    };
    let a = x + (y - x) * (1.0 / 3.0);
    let b = x + (y - x) * (2.0 / 3.0);
    let start = [a.x, a.y, a.z, b.x, b.y, b.z];
    let (_, v) = nelder_mead(f, &start, 0.25, 1e-12, 1200);
    v.min(straight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_simpson;
    use crate::geometry::Scene;
    use crate::profile::solve_radial;

    fn k2_scene() -> Scene {
        let mut scene = Scene::symmetric_pair(0.3, 0.5);
        scene.singularities.positive = vec![vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0)];
        scene.singularities.negative = vec![vec3(-1.0, 0.0, 0.0), vec3(0.0, -1.0, 0.0)];
        scene
    }

    #[test]
    fn extension_restricts_to_boundary_data() {
        for scene in [Scene::symmetric_pair(0.5, 0.5), k2_scene()] {
            let delta = 0.05;
            let conn = minimal_connection(&scene, delta).unwrap();
            let dual = dual_potential(&scene, &conn).unwrap();
            let mut ext = extend_potential(&scene, &dual, delta).unwrap();
            for (p, want) in scene
                .singularities
                .positive
                .iter()
                .zip(&dual.xi_pos)
            {
                assert!((ext.eval(*p) - want).abs() < 1e-9);
            }
            for (n, want) in scene
                .singularities
                .negative
                .iter()
                .zip(&dual.xi_neg)
            {
                assert!((ext.eval(*n) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extension_is_metric_lipschitz() {
        let scene = k2_scene();
        let delta = 0.04;
        let conn = minimal_connection(&scene, delta).unwrap();
        let dual = dual_potential(&scene, &conn).unwrap();
        let mut ext = extend_potential(&scene, &dual, delta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let rand_pt = |rng: &mut ChaCha8Rng| loop {
                let p = vec3(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if p.norm() <= 1.0 {
                    return p;
                }
            };
            let x = rand_pt(&mut rng);
            let y = rand_pt(&mut rng);
            let d = distance(&scene, x, y, delta).unwrap();
            let diff = (ext.eval(x) - ext.eval(y)).abs();
            assert!(diff <= d + 1e-9, "diff {diff} > d {d}");
        }
    }

    #[test]
    fn infeasible_boundary_data_rejected() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let conn = minimal_connection(&scene, 0.05).unwrap();
        let mut dual = dual_potential(&scene, &conn).unwrap();
        dual.xi_pos[0] += 10.0;
        assert!(matches!(
            extend_potential(&scene, &dual, 0.05),
            Err(Error::InfeasiblePotential(_))
        ));
    }

    #[test]
    fn mollify_reproduces_affine_fields() {
        let h = 0.1;
        let mut f = ScalarFieldGrid::new(vec3(0.0, 0.0, 0.0), h, [15, 15, 15]);
        for k in 0..15 {
            for j in 0..15 {
                for i in 0..15 {
                    let p = f.pos(i, j, k);
                    f.values[(k * 15 + j) * 15 + i] = 1.5 * p.x - 0.5 * p.y + 2.0 * p.z + 0.25;
                }
            }
        }
        let beta = 0.125;
        let out = mollify(&f, 3.5 * h, beta).unwrap();
        assert_eq!(out.dims, [9, 9, 9]);
        for k in 0..9 {
            for j in 0..9 {
                for i in 0..9 {
                    let p = out.pos(i, j, k);
                    let want = (1.0 - beta) * (1.5 * p.x - 0.5 * p.y + 2.0 * p.z + 0.25);
                    let got = out.values[(k * 9 + j) * 9 + i];
                    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
                }
            }
        }
        assert!(matches!(
            mollify(&f, 10.0 * h, beta),
            Err(Error::KernelWiderThanMargin { .. })
        ));
    }

    #[test]
    fn structure_function_certificates_pass() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let mut opts = StructureOptions::new(0.3, 1.0 / 24.0);
        opts.lipschitz_pairs = 120;
        let field = structure_function(&scene, &opts).unwrap();
        let cert = field.certificate.as_ref().unwrap();
        assert!(cert.passed);
        assert!(cert.lipschitz_metric_slack <= cert.lipschitz_allowance);
        // the gap actually reaches its target: L - eta
        let l = minimal_connection(&scene, 0.0).unwrap().value();
        assert!(cert.gap >= l - 0.3 - 1e-9, "gap {} vs {}", cert.gap, l - 0.3);
        assert!(cert.gradient_worst_ratio <= 1.0);
    }

    #[test]
    fn compact_variant_constant_on_plateau() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let mut opts = StructureOptions::new(0.3, 1.0 / 24.0);
        opts.lipschitz_pairs = 120;
        let kc = vec3(0.0, 0.0, 0.0);
        let kr = 0.12;
        let field = structure_function_constant_on_k(&scene, kc, kr, &opts).unwrap();
        let cert = field.certificate.as_ref().unwrap();
        assert!(cert.passed);
        // all nodes of the inner plateau carry the same value, bitwise
        let mut vals = Vec::new();
        for k in 0..field.dims[2] {
            for j in 0..field.dims[1] {
                for i in 0..field.dims[0] {
                    if field.pos(i, j, k).dist(kc) <= kr + cert.delta {
                        vals.push(field.values[(k * field.dims[1] + j) * field.dims[0] + i]);
                    }
                }
            }
        }
        assert!(vals.len() > 10);
        assert!(vals.iter().all(|&v| v == vals[0]));
        // and the plateau drops the gap by about the pseudo-distance cut
        let l = minimal_connection(&scene, 0.0).unwrap().value();
        let drop = 2.0 * 0.25 * kr; // both passes through the plateau save b^2 r each
        assert!(
            cert.gap >= l - drop - 0.3 - 1e-9,
            "gap {} vs {}",
            cert.gap,
            l - drop - 0.3
        );
    }

    #[test]
    fn plateau_touching_singularity_rejected() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let opts = StructureOptions::new(0.3, 1.0 / 24.0);
        assert!(matches!(
            structure_function_constant_on_k(&scene, vec3(0.9, 0.0, 0.0), 0.2, &opts),
            Err(Error::KTouchesSingularity(_))
        ));
    }

    #[test]
    fn coarea_hand_value_and_inequality() {
        // linear field: xi(p)=1 at x=+1, xi(n)=0 at x=-1
        let h = 0.25;
        let mut f = ScalarFieldGrid::new(vec3(-1.0, -1.0, -1.0), h, [9, 9, 9]);
        for k in 0..9 {
            for j in 0..9 {
                for i in 0..9 {
                    let p = f.pos(i, j, k);
                    f.values[(k * 9 + j) * 9 + i] = 0.5 * (p.x + 1.0);
                }
            }
        }
        let p = [vec3(1.0, 0.0, 0.0)];
        let n = [vec3(-1.0, 0.0, 0.0)];
        let (integral, bound) = coarea_degree_bound(&p, &n, &f, 0.1, 0.0).unwrap();
        assert!((integral - 0.8).abs() < 1e-12);
        assert!((bound - 0.8).abs() < 1e-12);
        let (i2, b2) = coarea_degree_bound(&p, &n, &f, 0.01, 0.0).unwrap();
        assert!((i2 - 0.98).abs() < 1e-12 && (b2 - 0.98).abs() < 1e-12);
        // random multi-pair fields: integral of the clipped count is
        // never below the signed bound
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut g = ScalarFieldGrid::new(vec3(-1.0, -1.0, -1.0), 0.5, [5, 5, 5]);
            for v in g.values.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            let ps = [vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0), vec3(0.0, 0.0, 1.0)];
            let ns = [vec3(-1.0, 0.0, 0.0), vec3(0.0, -1.0, 0.0), vec3(0.0, 0.0, -1.0)];
            for rho in [0.1, 0.01] {
                let (integral, bound) = coarea_degree_bound(&ps, &ns, &g, rho, 0.0).unwrap();
                assert!(integral >= bound - 1e-12);
            }
        }
    }

    #[test]
    fn dumbbell_unit_weight_exact() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let m = vec3(0.0, 0.7, 0.0);
        let f = dumbbell(&scene, None, m).unwrap();
        assert!((f.value_at_p() - f.value_at_n() - 2.0).abs() < 1e-12);
        assert_eq!(f.eval(m), 0.0);
        // a neighborhood of M stays at zero
        for d in [
            vec3(0.05, 0.0, 0.0),
            vec3(0.0, 0.05, 0.0),
            vec3(0.0, 0.0, 0.05),
            vec3(-0.03, 0.04, 0.01),
        ] {
            assert_eq!(f.eval(m + d), 0.0);
        }
        // plateau values at the singularities
        assert!((f.eval(vec3(1.0, 0.0, 0.0)) - f.xi0(1.0)).abs() < 1e-12);
        assert!((f.eval(vec3(-1.0, 0.0, 0.0)) - f.xi0(-1.0)).abs() < 1e-12);
        // level radii at least 1 and monotone per side
        let mut prev = None;
        for i in 1..20 {
            let t = f.xi0(1.0) * i as f64 / 20.0;
            if let Some((c, r)) = f.level_radius(t) {
                assert_eq!(c, vec3(2.0, 0.0, 0.0));
                assert!(r >= 1.0);
                if let Some(pr) = prev {
                    assert!(r <= pr + 1e-12, "radii shrink as the level rises");
                }
                prev = Some(r);
            }
        }
    }

    #[test]
    fn dumbbell_on_axis_rejected() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        assert!(matches!(
            dumbbell(&scene, None, vec3(0.3, 0.0, 0.0)),
            Err(Error::MOnAxis(_))
        ));
    }

    #[test]
    fn dumbbell_profile_gap_matches_axis_quadrature() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let rp = solve_radial(0.5, 0.5, 1e-2, None).unwrap();
        let f = dumbbell(&scene, Some(&rp), vec3(0.0, 0.7, 0.0)).unwrap();
        let gap = f.value_at_p() - f.value_at_n();
        let mut integrand = |t: f64| {
            let u = rp.value(t.abs());
            u * u
        };
        let want = adaptive_simpson(&mut integrand, -1.0, 1.0, 1e-10);
        assert!((gap - want).abs() < 1e-6, "{gap} vs {want}");
    }

    #[test]
    fn dumbbell_is_profile_metric_lipschitz() {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let rp = solve_radial(0.5, 0.5, 2e-2, None).unwrap();
        let f = dumbbell(&scene, Some(&rp), vec3(0.0, 0.7, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rand_pt = |rng: &mut ChaCha8Rng| loop {
            let p = vec3(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if p.norm() <= 1.0 {
                return p;
            }
        };
        for _ in 0..200 {
            let x = rand_pt(&mut rng);
            let y = rand_pt(&mut rng);
            let d = profile_weighted_distance(Some(&rp), x, y);
            let diff = (f.eval(x) - f.eval(y)).abs();
            assert!(diff <= d + 1e-6, "diff {diff} exceeds weighted distance {d}");
        }
    }
}
