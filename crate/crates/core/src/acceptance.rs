//! End-to-end verification ladder. Each check pins its scene, tolerances,
//! and wall-clock budget in code, exercises one module-level guarantee
//! against an independent oracle or identity, and reports a single
//! pass/fail outcome with the measured quantities.

use crate::connection::{dual_potential, minimal_connection, solve_assignment};
use crate::energy::{asymptotic_slope, build_tube, StripPolicy};
use crate::error::Result;
use crate::geometry::{ConvexBody, Scene, SingularityData};
use crate::grid::ScalarFieldGrid;
use crate::lattice::{lattice_oracle_distance, Stencil};
use crate::metric::{distance, pseudo_distance, GeodesicKind};
use crate::numerics::adaptive_simpson;
use crate::profile::{
    decoupling_residual, exponential_fit, heteroclinic_cost_oracle, solve_radial, TestField,
};
use crate::structure::{
    coarea_degree_bound, dumbbell, structure_function, structure_function_constant_on_k,
    StructureOptions,
};
use crate::vec3::{vec3, Vec3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// Outcome of one ladder entry. `passed` already folds in the budget.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
    pub budget_millis: u128,
}

impl CriterionResult {
    /// The one-line report: index, verdict, measured detail, timing.
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {:<26} {}  [{} ms / {} ms]  {}",
            self.index,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.millis,
            self.budget_millis,
            self.detail
        )
    }
}

fn run(
    index: usize,
    name: &'static str,
    budget_millis: u128,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let t0 = Instant::now();
    let outcome = body();
    let millis = t0.elapsed().as_millis();
    let (ok, detail) = match outcome {
        Ok((ok, detail)) => (ok, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        index,
        name,
        passed: ok && millis <= budget_millis,
        detail,
        millis,
        budget_millis,
    }
}

fn sample_dir(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = vec3(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

fn sample_in_ball(rng: &mut ChaCha8Rng, center: Vec3, radius: f64) -> Vec3 {
    loop {
        let v = vec3(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm() <= 1.0 {
            return center + v * radius;
        }
    }
}

/// Unit ball domain with an off-center pinned ball, no boundary data.
fn offcenter_scene(b: f64) -> Scene {
    Scene {
        domain: ConvexBody::ball(Vec3::ZERO, 1.0),
        inclusion: ConvexBody::ball(vec3(0.1, 0.05, -0.08), 0.35),
        b,
        singularities: SingularityData::default(),
    }
}

/// Unit ball domain, centered pinned ball of radius 0.3, no boundary data.
fn centered_scene(b: f64) -> Scene {
    Scene {
        domain: ConvexBody::ball(Vec3::ZERO, 1.0),
        inclusion: ConvexBody::ball(Vec3::ZERO, 0.3),
        b,
        singularities: SingularityData::default(),
    }
}

fn on_sphere(x: f64, y: f64, z: f64) -> Vec3 {
    let v = vec3(x, y, z);
    v * (1.0 / v.norm())
}

/// Two signed pairs around an off-center pinned ball.
fn two_pair_scene() -> Scene {
    Scene {
        domain: ConvexBody::ball(Vec3::ZERO, 1.0),
        inclusion: ConvexBody::ball(vec3(0.2, 0.0, 0.0), 0.25),
        b: 0.6,
        singularities: SingularityData::new(
            vec![on_sphere(0.9, 0.3, 0.1), on_sphere(-0.5, 0.8, 0.2)],
            vec![on_sphere(-0.9, -0.2, 0.1), on_sphere(0.6, -0.7, 0.2)],
        ),
    }
}

/// Planar two-pair scene on a radius-2 ball whose optimal pairing refracts
/// one chord through the pinned ball, giving a genuinely curved link.
fn curved_link_scene() -> Scene {
    let at = |deg: f64| {
        let t = deg.to_radians();
        vec3(2.0 * t.cos(), 2.0 * t.sin(), 0.0)
    };
    Scene {
        domain: ConvexBody::ball(Vec3::ZERO, 2.0),
        inclusion: ConvexBody::ball(vec3(0.9, 0.35, 0.0), 0.25),
        b: 0.5,
        singularities: SingularityData::new(
            vec![at(0.0), at(175.0)],
            vec![at(80.0), at(255.0)],
        ),
    }
}

/// 1: inside the pinned region the metric is the euclidean metric scaled
/// by b^2; pairs whose connecting segment provably cannot benefit from the
/// region travel at unit weight.
pub fn criterion_01_metric_exactness(seed: u64) -> CriterionResult {
    run(1, "metric-exactness", 1_000, || {
        let scene = offcenter_scene(0.6);
        let (c, r) = (vec3(0.1, 0.05, -0.08), 0.35);
        let b2 = scene.b * scene.b;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_in = 0.0f64;
        for _ in 0..20 {
            let x = sample_in_ball(&mut rng, c, r * 0.999);
            let y = sample_in_ball(&mut rng, c, r * 0.999);
            let d = distance(&scene, x, y, 0.0)?;
            worst_in = worst_in.max((d - b2 * x.dist(y)).abs());
        }
        // a pair is kept only when every path touching the pinned ball is
        // already longer than the straight segment: dist(x, ball) +
        // dist(y, ball) >= |x - y|; then the straight unit-weight segment
        // is optimal and provably misses the ball
        let mut worst_out = 0.0f64;
        let mut kept = 0usize;
        let mut attempts = 0usize;
        while kept < 20 {
            attempts += 1;
            if attempts > 200_000 {
                return Ok((false, "sampler failed to find excluded pairs".into()));
            }
            let x = sample_in_ball(&mut rng, Vec3::ZERO, 0.97);
            let y = sample_in_ball(&mut rng, Vec3::ZERO, 0.97);
            let excess = (x.dist(c) - r) + (y.dist(c) - r);
            if excess < x.dist(y) + 1e-6 {
                continue;
            }
            kept += 1;
            let d = distance(&scene, x, y, 0.0)?;
            worst_out = worst_out.max((d - x.dist(y)).abs());
        }
        let ok = worst_in <= 1e-10 && worst_out <= 1e-10;
        Ok((
            ok,
            format!(
                "pinned-pair err {worst_in:.2e}, excluded-pair err {worst_out:.2e} (tol 1e-10, {attempts} draws)"
            ),
        ))
    })
}

/// 2: the analytic geodesic solver agrees with an independent lattice
/// shortest-path oracle (h = 1/64, extended stencil) within 2% on random
/// pairs across three pinning strengths.
pub fn criterion_02_lattice_oracle_agreement(seed: u64) -> CriterionResult {
    run(2, "lattice-oracle-agreement", 120_000, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72_61c1);
        let h = 1.0 / 64.0;
        let mut worst = 0.0f64;
        let mut pairs = 0usize;
        for (b, count) in [(0.3, 17usize), (0.6, 17), (0.9, 16)] {
            let scene = centered_scene(b);
            for _ in 0..count {
                let (x, y) = loop {
                    let x = sample_in_ball(&mut rng, Vec3::ZERO, 0.9);
                    let y = sample_in_ball(&mut rng, Vec3::ZERO, 0.9);
                    if x.dist(y) >= 0.6 {
                        break (x, y);
                    }
                };
                let analytic = distance(&scene, x, y, 0.0)?;
                let lat = lattice_oracle_distance(&scene, x, y, h, Stencil::Extended)?;
                worst = worst.max((lat.relaxed - analytic).abs() / analytic);
                pairs += 1;
            }
        }
        Ok((
            worst <= 0.02,
            format!("worst relative gap {worst:.4e} over {pairs} pairs (tol 2e-2)"),
        ))
    })
}

/// 3: making a small ball free to cross shortens the distance by exactly
/// the local weight: 2 a^2(x0) r when the ball sits inside the pinned
/// region on the minimizing path, (1 + b^2) r when it straddles the
/// interface crossing, and not at all off the path.
pub fn criterion_03_pseudometric_identities(_seed: u64) -> CriterionResult {
    run(3, "pseudometric-identities", 10_000, || {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let p = vec3(1.0, 0.0, 0.0);
        let n = vec3(-1.0, 0.0, 0.0);
        let d = distance(&scene, p, n, 0.0)?;
        let b2 = scene.b * scene.b;
        let mut worst = 0.0f64;
        for r in [1e-2, 5e-3] {
            let cases = [
                (vec3(0.0, 0.0, 0.0), d - 2.0 * b2 * r),
                (vec3(0.5, 0.0, 0.0), d - (1.0 + b2) * r),
                (vec3(0.0, 0.0, 0.8), d),
            ];
            for (center, want) in cases {
                let (got, _) = pseudo_distance(&scene, center, r, p, n, 0.0)?;
                worst = worst.max((got - want).abs());
            }
        }
        Ok((
            worst <= 1e-6,
            format!("worst identity error {worst:.2e} (tol 1e-6), base distance {d:.12}"),
        ))
    })
}

/// 4: the assignment solver matches exhaustive search on random matrices
/// and its duals are feasible with zero gap; the scene-level potential is
/// metric-Lipschitz with gap equal to the connection value.
pub fn criterion_04_assignment_duality(seed: u64) -> CriterionResult {
    run(4, "assignment-duality", 30_000, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa551_6e);
        let mut worst_val = 0.0f64;
        let mut worst_gap = 0.0f64;
        let mut worst_feas = f64::NEG_INFINITY;
        for _ in 0..100 {
            let k = rng.gen_range(1..=7usize);
            let cost: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..k).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let a = solve_assignment(&cost)?;
            worst_val = worst_val.max((a.value - brute_force_value(&cost)).abs());
            let dual_sum: f64 = a.u.iter().sum::<f64>() + a.v.iter().sum::<f64>();
            worst_gap = worst_gap.max((dual_sum - a.value).abs());
            for i in 0..k {
                for j in 0..k {
                    worst_feas = worst_feas.max(a.u[i] + a.v[j] - cost[i][j]);
                }
            }
        }
        let scene = Scene {
            domain: ConvexBody::ball(Vec3::ZERO, 1.0),
            inclusion: ConvexBody::ball(vec3(0.15, -0.1, 0.2), 0.3),
            b: 0.55,
            singularities: SingularityData::new(
                vec![
                    on_sphere(1.0, 0.2, 0.1),
                    on_sphere(-0.4, 0.9, 0.1),
                    on_sphere(0.1, -0.3, 1.0),
                    on_sphere(-0.8, -0.6, 0.3),
                ],
                vec![
                    on_sphere(-1.0, 0.1, 0.2),
                    on_sphere(0.5, 0.9, -0.2),
                    on_sphere(0.2, -0.9, -0.4),
                    on_sphere(0.7, 0.1, -0.8),
                ],
            ),
        };
        let conn = minimal_connection(&scene, 0.0)?;
        let dual = dual_potential(&scene, &conn)?;
        let scene_gap = (dual.gap - conn.value()).abs();
        let ok = worst_val <= 1e-9
            && worst_gap <= 1e-9
            && worst_feas <= 1e-9
            && scene_gap <= 1e-9
            && dual.lipschitz_slack <= 1e-9;
        Ok((
            ok,
            format!(
                "brute-force dev {worst_val:.2e}, dual gap {worst_gap:.2e}, feasibility {worst_feas:.2e}, scene gap dev {scene_gap:.2e}, scene slack {:.2e}",
                dual.lipschitz_slack
            ),
        ))
    })
}

fn brute_force_value(cost: &[Vec<f64>]) -> f64 {
    fn rec(cost: &[Vec<f64>], row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if row == cost.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..cost.len() {
            if !used[j] {
                used[j] = true;
                rec(cost, row + 1, used, acc + cost[row][j], best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(cost, 0, &mut vec![false; cost.len()], 0.0, &mut best);
    best
}

/// 5: certified potential construction at production resolution: metric
/// Lipschitz within two grid spacings on 500 node pairs, near-maximal gap,
/// and the plateau variant exactly constant on its ball with the gap
/// target matching the free-crossing identity for all three placements.
pub fn criterion_05_structure_certificates(seed: u64) -> CriterionResult {
    run(5, "structure-certificates", 300_000, || {
        let (eta, h) = (0.05, 1.0 / 64.0);
        let mut opts = StructureOptions::new(eta, h);
        opts.seed = seed;
        let mut details = Vec::new();
        let mut ok = true;

        let sym = Scene::symmetric_pair(0.5, 0.5);
        let l_sym = minimal_connection(&sym, 0.0)?.value();
        for (label, scene, l0) in [
            ("symmetric", sym.clone(), l_sym),
            ("two-pair", two_pair_scene(), f64::NAN),
        ] {
            let l0 = if l0.is_nan() {
                minimal_connection(&scene, 0.0)?.value()
            } else {
                l0
            };
            let f = structure_function(&scene, &opts)?;
            let c = f.certificate.as_ref().unwrap();
            let here = c.passed
                && c.lipschitz_metric_slack <= 2.0 * h + 1e-9
                && c.gap >= l0 - eta - 1e-9;
            ok &= here;
            details.push(format!(
                "{label}: slack {:.2e}, gap {:.6} >= {:.6}",
                c.lipschitz_metric_slack,
                c.gap,
                l0 - eta
            ));
        }

        // plateau placements on the symmetric scene: pinned interior of the
        // minimizing segment, interface crossing, off the segment
        let b2 = sym.b * sym.b;
        let r = 0.05;
        let placements = [
            ("interior", vec3(0.0, 0.0, 0.0), l_sym - 2.0 * b2 * r),
            ("interface", vec3(0.5, 0.0, 0.0), l_sym - (1.0 + b2) * r),
            ("off-path", vec3(0.0, 0.0, 0.8), l_sym),
        ];
        for (label, kc, lk) in placements {
            let f = structure_function_constant_on_k(&sym, kc, r, &opts)?;
            let c = f.certificate.as_ref().unwrap();
            let target_dev = (c.gap_target - (lk - eta)).abs();
            // exact plateau constancy at the grid nodes inside the ball
            let (mut lo_v, mut hi_v) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..f.dims[2] {
                for j in 0..f.dims[1] {
                    for i in 0..f.dims[0] {
                        let p = f.pos(i, j, k);
                        if p.dist(kc) <= r {
                            let v = f.values[f.idx(i, j, k)];
                            lo_v = lo_v.min(v);
                            hi_v = hi_v.max(v);
                        }
                    }
                }
            }
            let spread = hi_v - lo_v;
            let here = c.passed
                && c.lipschitz_metric_slack <= 2.0 * h + 1e-9
                && target_dev <= 1e-6
                && c.gap >= lk - eta - 1e-9
                && spread == 0.0;
            ok &= here;
            details.push(format!(
                "plateau {label}: gap {:.6} >= {:.6} (dev {target_dev:.1e}), spread {spread:.1e}",
                c.gap,
                lk - eta
            ));
        }
        Ok((ok, details.join("; ")))
    })
}

/// 6: the layer-cake count of levels separating the signed values is never
/// below the summed gaps minus 2 k rho, for every field this suite builds.
pub fn criterion_06_coarea_lower_bound(_seed: u64) -> CriterionResult {
    run(6, "coarea-lower-bound", 5_000, || {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let p = scene.singularities.positive.clone();
        let n = scene.singularities.negative.clone();

        let mut fields: Vec<(String, ScalarFieldGrid)> = Vec::new();
        let profile = solve_radial(0.5, 0.5, 4e-3, None)?;
        for (label, prof) in [("unit", None), ("profile", Some(&profile))] {
            let db = dumbbell(&scene, prof, vec3(0.0, 0.0, 1.0))?;
            let h = 1.0 / 16.0;
            let dims = [41, 41, 41];
            let mut g = ScalarFieldGrid::new(vec3(-1.25, -1.25, -1.25), h, dims);
            for k in 0..dims[2] {
                for j in 0..dims[1] {
                    for i in 0..dims[0] {
                        let idx = g.idx(i, j, k);
                        g.values[idx] = db.eval(g.pos(i, j, k));
                    }
                }
            }
            fields.push((format!("dumbbell-{label}"), g));
        }
        let coarse = StructureOptions::new(0.2, 0.1);
        fields.push(("potential".into(), structure_function(&scene, &coarse)?));

        let mut ok = true;
        let mut min_margin = f64::INFINITY;
        for (_, f) in &fields {
            for rho in [0.1, 0.01] {
                let (integral, bound) = coarea_degree_bound(&p, &n, f, rho, 0.0)?;
                if integral < bound {
                    ok = false;
                }
                min_margin = min_margin.min(integral - bound);
            }
        }
        Ok((
            ok,
            format!(
                "{} fields x 2 widths, min margin {min_margin:.3e} (must be >= 0)",
                fields.len()
            ),
        ))
    })
}

/// 7: the radial ground-state profile stays within its bounds, is
/// monotone, matches the 1D interface-cost oracle at order 1/eps, and has
/// a clean exponential boundary layer.
pub fn criterion_07_radial_profile(_seed: u64) -> CriterionResult {
    run(7, "radial-profile", 60_000, || {
        let (r0, b) = (0.5, 0.5);
        let target = heteroclinic_cost_oracle(b) * 4.0 * PI * r0 * r0;
        let mut ok = true;
        let mut details = Vec::new();
        for eps in [4e-3, 2e-3, 1e-3] {
            let prof = solve_radial(r0, b, eps, None)?;
            let min_u = prof.u.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_u = prof.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let monotone = prof.u.windows(2).all(|w| w[1] >= w[0] - 1e-12);
            let at_edge = (prof.value(1.0) - 1.0).abs();
            let scaled = eps * prof.energy;
            let rel = (scaled - target).abs() / target;
            let fit = exponential_fit(&prof)?;
            let here = min_u >= b - 1e-12
                && max_u <= 1.0 + 1e-12
                && monotone
                && at_edge <= 1e-12
                && rel <= 0.10
                && fit.gamma > 0.0
                && fit.r2 > 0.99;
            ok &= here;
            details.push(format!(
                "eps {eps:.0e}: eps*E {scaled:.5} vs {target:.5} (rel {rel:.3}), gamma {:.3}, r2 {:.4}",
                fit.gamma, fit.r2
            ));
        }
        Ok((ok, details.join("; ")))
    })
}

/// 8: the discrete energy split |E(Uv) - E(U) - F(v)| vanishes under grid
/// refinement at order >= 0.9 for a smooth phase and a vortex tube.
pub fn criterion_08_energy_decoupling(_seed: u64) -> CriterionResult {
    run(8, "energy-decoupling", 180_000, || {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let eps = 0.05;
        let profile = solve_radial(0.5, 0.5, eps, None)?;
        let hs = [1.0 / 32.0, 1.0 / 48.0, 1.0 / 64.0];
        let mut ok = true;
        let mut details = Vec::new();
        for (label, field) in [
            ("planar-phase", TestField::PlanarPhase { k: vec3(2.0, 1.0, 0.0) }),
            ("vortex-tube", TestField::VortexTube { core: 0.1 }),
        ] {
            let table = decoupling_residual(&scene, &profile, field, eps, &hs)?;
            ok &= table.order >= 0.9;
            details.push(format!(
                "{label}: order {:.3}, residuals {:.2e} -> {:.2e}",
                table.order,
                table.rows.first().unwrap().residual,
                table.rows.last().unwrap().residual
            ));
        }
        Ok((ok, details.join("; ")))
    })
}

/// 9: on the symmetric scene the tube upper bound grows like pi times the
/// weighted path length per |ln eps|, and the leftover term stays bounded.
pub fn criterion_09_symmetric_energy_slope(_seed: u64) -> CriterionResult {
    run(9, "symmetric-energy-slope", 10_000, || {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let r = asymptotic_slope(&scene, &[1e-2, 1e-3, 1e-4], 0.15)?;
        let want = PI * 1.25;
        let target_dev = (r.target - want).abs();
        let seq: Vec<f64> = r
            .rows
            .iter()
            .map(|row| row.breakdown.total_upper / row.abs_ln_eps - r.target)
            .collect();
        let range = seq.iter().cloned().fold(f64::MIN, f64::max)
            - seq.iter().cloned().fold(f64::MAX, f64::min);
        let bounded = range < 2.0 * (seq[0] - seq[1]).abs();
        let ok = target_dev <= 1e-9 && r.rel_err <= 0.05 && bounded;
        Ok((
            ok,
            format!(
                "slope {:.6} vs pi*1.25 = {want:.6} (rel {:.4}), leftover range {range:.3} < {:.3}",
                r.slope,
                r.rel_err,
                2.0 * (seq[0] - seq[1]).abs()
            ),
        ))
    })
}

/// 10: same growth law on a two-pair scene whose link genuinely refracts
/// through the pinned ball; the near-interface arclength of the link obeys
/// the sqrt(eps) strip bound with the measured constant reported.
pub fn criterion_10_curved_link_energy_slope(_seed: u64) -> CriterionResult {
    run(10, "curved-link-energy-slope", 60_000, || {
        let scene = curved_link_scene();
        let conn = minimal_connection(&scene, 0.0)?;
        let link = crate::connection::geodesic_link(&scene, 0.0)?;
        let curved = link
            .geodesics
            .iter()
            .any(|g| g.kind != GeodesicKind::Straight);
        let r = asymptotic_slope(&scene, &[1e-2, 1e-3, 1e-4], 0.12)?;
        let target_dev = (r.target - PI * conn.value()).abs();
        // strip constant at the smallest core size of the ladder
        let eps = 1e-4;
        let tube = build_tube(&scene, &link, 0.12, eps, StripPolicy::PinningWithStripBound)?;
        let strip_total: f64 = tube.strip_lengths.iter().sum();
        let c_measured = strip_total / eps.sqrt();
        let ok = curved && target_dev <= 1e-9 && r.rel_err <= 0.05;
        Ok((
            ok,
            format!(
                "slope {:.6} vs pi*L = {:.6} (rel {:.4}), curved {curved}, strip C = {c_measured:.3}",
                r.slope, r.target, r.rel_err
            ),
        ))
    })
}

/// 11: the explicit symmetric potential has the exact axis-integral gap,
/// vanishes identically near its marked point, and every regular level set
/// is a sphere of radius at least 1.
pub fn criterion_11_dumbbell_function(seed: u64) -> CriterionResult {
    run(11, "dumbbell-function", 5_000, || {
        let scene = Scene::symmetric_pair(0.5, 0.5);
        let profile = solve_radial(0.5, 0.5, 4e-3, None)?;
        let m = vec3(0.0, 0.0, 1.0);
        let db = dumbbell(&scene, Some(&profile), m)?;

        let gap = db.value_at_p() - db.value_at_n();
        let mut wsq = |s: f64| {
            let u = profile.value(s.abs());
            u * u
        };
        let axis = adaptive_simpson(&mut wsq, -1.0, 1.0, 1e-10);
        let gap_dev = (gap - axis).abs();

        // margin within which the function is identically zero around m
        let margin = 0.5 * (m.dist(db.p * 2.0) + m.dist(db.n * 2.0) - 4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd0b);
        let mut worst_near_m = 0.0f64;
        for _ in 0..50 {
            let q = m + sample_dir(&mut rng) * (0.9 * margin * rng.gen_range(0.0..1.0));
            worst_near_m = worst_near_m.max(db.eval(q).abs());
        }

        let (lo, hi) = (db.value_at_n(), db.value_at_p());
        let mut min_radius = f64::INFINITY;
        let mut regular = 0usize;
        for i in 0..400 {
            let t = lo + (hi - lo) * (i as f64 + 0.5) / 400.0;
            if let Some((_, rad)) = db.level_radius(t) {
                min_radius = min_radius.min(rad);
                regular += 1;
            }
        }
        let ok = gap_dev <= 1e-6 && worst_near_m == 0.0 && min_radius >= 1.0 - 1e-12;
        Ok((
            ok,
            format!(
                "gap dev {gap_dev:.2e} (tol 1e-6), max |value| near marked point {worst_near_m:.1e}, min level radius {min_radius:.6} over {regular} regular levels"
            ),
        ))
    })
}

/// Run the whole ladder in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        criterion_01_metric_exactness(seed),
        criterion_02_lattice_oracle_agreement(seed),
        criterion_03_pseudometric_identities(seed),
        criterion_04_assignment_duality(seed),
        criterion_05_structure_certificates(seed),
        criterion_06_coarea_lower_bound(seed),
        criterion_07_radial_profile(seed),
        criterion_08_energy_decoupling(seed),
        criterion_09_symmetric_energy_slope(seed),
        criterion_10_curved_link_energy_slope(seed),
        criterion_11_dumbbell_function(seed),
    ]
}

/// Indices for a named subset of the ladder.
pub fn suite_indices(suite: &str) -> Option<Vec<usize>> {
    match suite {
        "all" => Some((1..=11).collect()),
        // checks bound to the concentric symmetric scene
        "symmetric" => Some(vec![3, 5, 6, 7, 8, 9, 11]),
        // the fast subset: everything with a budget of 30 s or less
        "fast" => Some(vec![1, 3, 4, 6, 9, 11]),
        _ => None,
    }
}

/// Run one criterion by index.
pub fn run_criterion(index: usize, seed: u64) -> Option<CriterionResult> {
    match index {
        1 => Some(criterion_01_metric_exactness(seed)),
        2 => Some(criterion_02_lattice_oracle_agreement(seed)),
        3 => Some(criterion_03_pseudometric_identities(seed)),
        4 => Some(criterion_04_assignment_duality(seed)),
        5 => Some(criterion_05_structure_certificates(seed)),
        6 => Some(criterion_06_coarea_lower_bound(seed)),
        7 => Some(criterion_07_radial_profile(seed)),
        8 => Some(criterion_08_energy_decoupling(seed)),
        9 => Some(criterion_09_symmetric_energy_slope(seed)),
        10 => Some(criterion_10_curved_link_energy_slope(seed)),
        11 => Some(criterion_11_dumbbell_function(seed)),
        _ => None,
    }
}
