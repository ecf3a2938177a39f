use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vorlink_core::geometry::{ConvexBody, Scene, SingularityData};
use vorlink_core::lattice::{lattice_oracle_distance, Stencil};
use vorlink_core::metric::{distance, geodesic, MetricContext};
use vorlink_core::vec3::{vec3, Vec3};

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

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7u64 ^ 0x6f72_61c1);
    let h = 1.0 / 64.0;
    for (b, count) in [(0.3, 17usize), (0.6, 17), (0.9, 16)] {
        let scene = Scene {
            domain: ConvexBody::ball(Vec3::ZERO, 1.0),
            inclusion: ConvexBody::ball(Vec3::ZERO, 0.3),
            b,
            singularities: SingularityData::default(),
        };
        for i in 0..count {
            let (x, y) = loop {
                let x = sample_in_ball(&mut rng, Vec3::ZERO, 0.9);
                let y = sample_in_ball(&mut rng, Vec3::ZERO, 0.9);
                if x.dist(y) >= 0.6 {
                    break (x, y);
                }
            };
            let analytic = distance(&scene, x, y, 0.0).unwrap();
            let lat = lattice_oracle_distance(&scene, x, y, h, Stencil::Extended).unwrap();
            let rel = (lat.relaxed - analytic).abs() / analytic;
            if rel > 0.005 {
                println!(
                    "b={b} pair {i}: analytic {analytic:.6} raw {:.6} relaxed {:.6} rel {rel:.4} signed {:+.4}  x=({:.4},{:.4},{:.4}) y=({:.4},{:.4},{:.4})",
                    lat.raw,
                    lat.relaxed,
                    (lat.relaxed - analytic) / analytic,
                    x.x, x.y, x.z, y.x, y.y, y.z
                );
                let g = geodesic(&scene, x, y, 0.0).unwrap();
                let ctx = MetricContext::new(&scene, 0.0).unwrap();
                let replay = ctx.polyline_length(&g.vertices);
                println!(
                    "    kind {:?} claimed {:.9} replay {:.9} verts {:?}",
                    g.kind, g.length, replay, g.vertices
                );
            }
        }
    }
}
