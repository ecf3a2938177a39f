//! Command-line driver. Scenes come in as JSON files, results go out as
//! JSON on stdout plus optional file artifacts (JSON, CSV, OBJ, binary
//! fields). Every artifact embeds the library version and a hash of the
//! fully resolved configuration; equal config and seed give byte-identical
//! artifacts. Exit codes: 0 success, 2 rejected input, 3 numerical failure.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vorlink_core::acceptance;
use vorlink_core::grid::{write_obj_polylines_with_meta, ScalarFieldGrid};
use vorlink_core::profile::exponential_fit;
use vorlink_core::vec3::{vec3, Vec3};
use vorlink_core::{
    asymptotic_slope, distance, dual_potential, geodesic, geodesic_link,
    lattice_oracle_distance, minimal_connection, solve_assignment, solve_radial,
    structure_function, structure_function_constant_on_k, Error, Geodesic, Result, Scene,
    Stencil, StructureOptions,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "vorlink",
    version,
    about = "Weighted geodesics, minimal connections, certified potentials and \
             vortex-tube energy ladders for pinned-medium scenes"
)]
struct Cli {
    /// Seed driving every randomized check.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Directory receiving a JSON artifact per command (created if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check scene invariants and report clearance and warnings.
    Validate(SceneArg),
    /// Weighted distance between two points.
    Distance(PairArgs),
    /// Minimizing path between two points, with optional OBJ export.
    Geodesic(GeodesicArgs),
    /// Optimal signed pairing of the boundary singularities.
    Connection(ConnectionArgs),
    /// Geodesic realization of the minimal connection.
    Link(LinkArgs),
    /// Certified dual potential on the singularity set.
    Potential(DeltaSceneArgs),
    /// Certified scalar potential on a grid, with optional plateau ball.
    Structure(StructureArgs),
    /// Radial ground-state modulus profile and its boundary layer.
    Radial(RadialArgs),
    /// Tube upper-bound ladder against the pi * length law.
    TestfnEnergy(EnergyArgs),
    /// Run the verification ladder (all checks or a named subset).
    Acceptance(AcceptanceArgs),
    /// Re-export computed objects as OBJ / CSV files.
    Export(ExportArgs),
    /// Lattice shortest-path oracle for one pair (slow; for spot checks).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SceneArg {
    /// Scene JSON file.
    scene: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    scene: PathBuf,
    /// Source point "x,y,z".
    #[arg(long, value_parser = parse_vec3)]
    from: Vec3,
    /// Target point "x,y,z".
    #[arg(long, value_parser = parse_vec3)]
    to: Vec3,
    /// Inclusion dilation.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Write the path as an OBJ polyline.
    #[arg(long)]
    obj: Option<PathBuf>,
}

#[derive(Args)]
struct ConnectionArgs {
    /// Scene JSON file; ignored for the matrix mode except as config.
    scene: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// CSV cost matrix (rows = positives); metric-free assignment mode.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct LinkArgs {
    scene: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Write all link curves as OBJ polylines.
    #[arg(long)]
    obj: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaSceneArgs {
    scene: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

#[derive(Args)]
struct StructureArgs {
    scene: PathBuf,
    /// Gap budget: the construction concedes at most eta of the optimum.
    #[arg(long)]
    eta: f64,
    /// Grid spacing.
    #[arg(long)]
    grid: f64,
    /// Override the certificate-level dilation.
    #[arg(long)]
    delta: Option<f64>,
    /// Plateau ball "cx,cy,cz,r": the potential is exactly constant there.
    #[arg(long, value_parser = parse_ball)]
    compact_k: Option<(Vec3, f64)>,
    /// Write the grid as a binary field file.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Args)]
struct RadialArgs {
    /// Pinned-ball radius.
    #[arg(long)]
    r0: f64,
    /// Pinning value in (0,1).
    #[arg(long)]
    b: f64,
    /// Interface width.
    #[arg(long)]
    eps: f64,
    /// Uniform mesh size (default: graded mesh tuned to the layer).
    #[arg(long)]
    nodes: Option<usize>,
    /// Write the profile as CSV rows "r,u".
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct EnergyArgs {
    scene: PathBuf,
    /// Tube radius.
    #[arg(long)]
    eta: f64,
    /// Comma-separated core sizes, spanning at least two decades.
    #[arg(long, value_parser = parse_f64_list, default_value = "1e-2,1e-3,1e-4")]
    eps_ladder: std::vec::Vec<f64>,
    /// Write the per-epsilon breakdown as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AcceptanceArgs {
    /// Optional scene to validate up front (the checks pin their own).
    scene: Option<PathBuf>,
    /// Named subset: all, symmetric, fast.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Explicit check indices, e.g. "1,4,11" (overrides --suite).
    #[arg(long, value_parser = parse_usize_list)]
    criteria: Option<std::vec::Vec<usize>>,
}

#[derive(Args)]
struct ExportArgs {
    /// Scene JSON file (needed for link export).
    scene: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Write the geodesic link as OBJ polylines.
    #[arg(long)]
    link_obj: Option<PathBuf>,
    /// Binary field file to re-export.
    #[arg(long)]
    field: Option<PathBuf>,
    /// CSV destination for the field nodes "x,y,z,value".
    #[arg(long)]
    field_csv: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    scene: PathBuf,
    #[arg(long, value_parser = parse_vec3)]
    from: Vec3,
    #[arg(long, value_parser = parse_vec3)]
    to: Vec3,
    /// Lattice spacing.
    #[arg(long, default_value_t = 1.0 / 32.0)]
    grid: f64,
    /// Neighborhood stencil: 6, 18, 26 or extended.
    #[arg(long, default_value = "extended")]
    stencil: String,
}

fn parse_vec3(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    Ok(vec3(parts[0], parts[1], parts[2]))
}

fn parse_ball(s: &str) -> std::result::Result<(Vec3, f64), String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    if parts.len() != 4 {
        return Err(format!("expected cx,cy,cz,r, got {s:?}"));
    }
    Ok((vec3(parts[0], parts[1], parts[2]), parts[3]))
}

fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

/// Fully resolved configuration; hashing it (plus file contents) gives the
/// artifact fingerprint.
struct Config {
    command: &'static str,
    seed: u64,
    entries: BTreeMap<String, serde_json::Value>,
}

impl Config {
    fn new(command: &'static str, seed: u64) -> Config {
        Config {
            command,
            seed,
            entries: BTreeMap::new(),
        }
    }

    fn set(&mut self, key: &str, value: impl Serialize) {
        self.entries
            .insert(key.to_string(), serde_json::to_value(value).unwrap());
    }

    /// Record an input file by content, so the hash tracks what was read,
    /// not where it lived.
    fn set_file(&mut self, key: &str, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        let mut h = Sha256::new();
        h.update(&bytes);
        self.set(key, format!("{:x}", h.finalize()));
        Ok(())
    }

    fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update(self.seed.to_le_bytes());
        h.update(serde_json::to_string(&self.entries).unwrap().as_bytes());
        format!("{:x}", h.finalize())
    }
}

#[derive(Serialize)]
struct Artifact<T: Serialize> {
    version: &'static str,
    config_hash: String,
    command: &'static str,
    seed: u64,
    result: T,
}

/// Print the artifact JSON to stdout and, when an output directory is set,
/// write it as `<command>.json` there.
fn emit<T: Serialize>(cfg: &Config, out: &Option<PathBuf>, result: T) -> Result<()> {
    let artifact = Artifact {
        version: VERSION,
        config_hash: cfg.hash(),
        command: cfg.command,
        seed: cfg.seed,
        result,
    };
    let text = serde_json::to_string_pretty(&artifact)
        .map_err(|e| Error::Parse(format!("artifact serialization: {e}")))?;
    println!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", cfg.command)), text + "\n")?;
    }
    Ok(())
}

fn meta_lines(cfg: &Config) -> Vec<String> {
    vec![format!("vorlink {VERSION} config {}", cfg.hash())]
}

fn load_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    let scene: Scene =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("scene {path:?}: {e}")))?;
    Ok(scene)
}

fn read_cost_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{path:?} line {}: {e}", ln + 1)))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{path:?}: no rows")));
    }
    Ok(rows)
}

#[derive(Serialize)]
struct GeodesicOut<'a> {
    value: f64,
    kind: &'a str,
    vertices: &'a [Vec3],
    phases: Vec<&'static str>,
    euclidean_length: f64,
    non_unique: bool,
}

fn geodesic_out(g: &Geodesic) -> GeodesicOut<'_> {
    GeodesicOut {
        value: g.length,
        kind: match g.kind {
            vorlink_core::GeodesicKind::Straight => "straight",
            vorlink_core::GeodesicKind::TwoSegment => "two_segment",
            vorlink_core::GeodesicKind::ThreeSegment => "three_segment",
        },
        vertices: &g.vertices,
        phases: g
            .phases
            .iter()
            .map(|p| match p {
                vorlink_core::Phase::Inside => "inside",
                vorlink_core::Phase::Outside => "outside",
            })
            .collect(),
        euclidean_length: g.euclidean_length,
        non_unique: g.non_unique,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            let payload = serde_json::json!({
                "error": e.kind(),
                "message": e.to_string(),
                "exit_code": e.exit_code(),
            });
            eprintln!("{payload}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed;
    let out = cli.out.clone();
    match cli.command {
        Command::Validate(a) => {
            let mut cfg = Config::new("validate", seed);
            cfg.set_file("scene", &a.scene)?;
            let scene = load_scene(&a.scene)?;
            let report = scene.validate()?;
            emit(&cfg, &out, report)?;
        }
        Command::Distance(a) => {
            let mut cfg = Config::new("distance", seed);
            cfg.set_file("scene", &a.scene)?;
            cfg.set("from", a.from);
            cfg.set("to", a.to);
            cfg.set("delta", a.delta);
            let scene = load_scene(&a.scene)?;
            let g = geodesic(&scene, a.from, a.to, a.delta)?;
            emit(&cfg, &out, geodesic_out(&g))?;
        }
        Command::Geodesic(a) => {
            let mut cfg = Config::new("geodesic", seed);
            cfg.set_file("scene", &a.pair.scene)?;
            cfg.set("from", a.pair.from);
            cfg.set("to", a.pair.to);
            cfg.set("delta", a.pair.delta);
            let scene = load_scene(&a.pair.scene)?;
            let g = geodesic(&scene, a.pair.from, a.pair.to, a.pair.delta)?;
            if let Some(obj) = &a.obj {
                write_obj_polylines_with_meta(obj, &[g.vertices.clone()], &meta_lines(&cfg))?;
            }
            emit(&cfg, &out, geodesic_out(&g))?;
        }
        Command::Connection(a) => {
            let mut cfg = Config::new("connection", seed);
            cfg.set("delta", a.delta);
            if let Some(matrix) = &a.matrix {
                cfg.set_file("matrix", matrix)?;
                let cost = read_cost_matrix(matrix)?;
                let asg = solve_assignment(&cost)?;
                let pairs: Vec<(usize, usize)> =
                    asg.sigma.iter().copied().enumerate().collect();
                emit(
                    &cfg,
                    &out,
                    serde_json::json!({
                        "sigma": asg.sigma,
                        "length": asg.value,
                        "pairs": pairs,
                        "dual_u": asg.u,
                        "dual_v": asg.v,
                        "non_unique": asg.non_unique,
                    }),
                )?;
            } else {
                let scene_path = a.scene.as_ref().ok_or_else(|| {
                    Error::Parse("connection needs a scene or --matrix".into())
                })?;
                cfg.set_file("scene", scene_path)?;
                let scene = load_scene(scene_path)?;
                let conn = minimal_connection(&scene, a.delta)?;
                let pairs: Vec<(usize, usize)> =
                    conn.assignment.sigma.iter().copied().enumerate().collect();
                emit(
                    &cfg,
                    &out,
                    serde_json::json!({
                        "sigma": conn.assignment.sigma,
                        "length": conn.value(),
                        "pairs": pairs,
                        "non_unique": conn.assignment.non_unique,
                    }),
                )?;
            }
        }
        Command::Link(a) => {
            let mut cfg = Config::new("link", seed);
            cfg.set_file("scene", &a.scene)?;
            cfg.set("delta", a.delta);
            let scene = load_scene(&a.scene)?;
            let link = geodesic_link(&scene, a.delta)?;
            if let Some(obj) = &a.obj {
                let curves: Vec<Vec<Vec3>> =
                    link.geodesics.iter().map(|g| g.vertices.clone()).collect();
                write_obj_polylines_with_meta(obj, &curves, &meta_lines(&cfg))?;
            }
            let curves: Vec<GeodesicOut> = link.geodesics.iter().map(geodesic_out).collect();
            emit(
                &cfg,
                &out,
                serde_json::json!({
                    "sigma": link.pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
                    "length": link.total_length,
                    "pairs": link.pairs,
                    "curves": curves,
                    "separation": link.separation,
                    "disjoint": link.disjoint,
                    "non_unique": link.non_unique,
                }),
            )?;
        }
        Command::Potential(a) => {
            let mut cfg = Config::new("potential", seed);
            cfg.set_file("scene", &a.scene)?;
            cfg.set("delta", a.delta);
            let scene = load_scene(&a.scene)?;
            let conn = minimal_connection(&scene, a.delta)?;
            let dual = dual_potential(&scene, &conn)?;
            emit(&cfg, &out, dual)?;
        }
        Command::Structure(a) => {
            let mut cfg = Config::new("structure", seed);
            cfg.set_file("scene", &a.scene)?;
            cfg.set("eta", a.eta);
            cfg.set("grid", a.grid);
            cfg.set("delta", a.delta);
            cfg.set("compact_k", a.compact_k.map(|(c, r)| (c, r)));
            let scene = load_scene(&a.scene)?;
            let mut opts = StructureOptions::new(a.eta, a.grid);
            opts.delta = a.delta;
            opts.seed = seed;
            let field = match a.compact_k {
                Some((c, r)) => structure_function_constant_on_k(&scene, c, r, &opts)?,
                None => structure_function(&scene, &opts)?,
            };
            if let Some(path) = &a.field {
                field.write_binary_with_meta(path, &meta_lines(&cfg))?;
            }
            emit(
                &cfg,
                &out,
                serde_json::json!({
                    "origin": field.origin,
                    "h": field.h,
                    "dims": field.dims,
                    "certificate": field.certificate,
                }),
            )?;
        }
        Command::Radial(a) => {
            let mut cfg = Config::new("radial", seed);
            cfg.set("r0", a.r0);
            cfg.set("b", a.b);
            cfg.set("eps", a.eps);
            cfg.set("nodes", a.nodes);
            let mesh = a.nodes.map(|n| {
                let n = n.max(2);
                (0..n).map(|i| i as f64 / (n - 1) as f64).collect::<Vec<f64>>()
            });
            let prof = solve_radial(a.r0, a.b, a.eps, mesh)?;
            let fit = exponential_fit(&prof)?;
            if let Some(csv) = &a.csv {
                let mut text = format!("# vorlink {VERSION} config {}\nr,u\n", cfg.hash());
                for (r, u) in prof.mesh.iter().zip(&prof.u) {
                    text.push_str(&format!("{r:.17e},{u:.17e}\n"));
                }
                std::fs::write(csv, text)?;
            }
            emit(
                &cfg,
                &out,
                serde_json::json!({
                    "energy": prof.energy,
                    "eps_energy": a.eps * prof.energy,
                    "gamma": fit.gamma,
                    "C": fit.c,
                    "r2": fit.r2,
                    "newton_iters": prof.newton_iters,
                    "mesh_nodes": prof.mesh.len(),
                }),
            )?;
        }
        Command::TestfnEnergy(a) => {
            let mut cfg = Config::new("testfn-energy", seed);
            cfg.set_file("scene", &a.scene)?;
            cfg.set("eta", a.eta);
            cfg.set("eps_ladder", &a.eps_ladder);
            let scene = load_scene(&a.scene)?;
            let report = asymptotic_slope(&scene, &a.eps_ladder, a.eta)?;
            if let Some(csv) = &a.csv {
                let mut text = format!(
                    "# vorlink {VERSION} config {}\neps,ln_term,core,caps,strip,total\n",
                    cfg.hash()
                );
                for row in &report.rows {
                    let b = &row.breakdown;
                    text.push_str(&format!(
                        "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                        row.epsilon,
                        b.tube_log_term,
                        b.core_term,
                        b.cap_bound,
                        b.strip_correction,
                        b.total_upper
                    ));
                }
                std::fs::write(csv, text)?;
            }
            emit(
                &cfg,
                &out,
                serde_json::json!({
                    "slope": report.slope,
                    "target": report.target,
                    "rel_err": report.rel_err,
                    "r2": report.r2,
                    "intercept": report.intercept,
                    "rows": report.rows,
                }),
            )?;
        }
        Command::Acceptance(a) => {
            let mut cfg = Config::new("acceptance", seed);
            cfg.set("suite", &a.suite);
            cfg.set("criteria", &a.criteria);
            if let Some(scene_path) = &a.scene {
                cfg.set_file("scene", scene_path)?;
                let scene = load_scene(scene_path)?;
                scene.validate()?;
            }
            let indices = match &a.criteria {
                Some(list) => list.clone(),
                None => acceptance::suite_indices(&a.suite).ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown suite {:?} (use all, symmetric or fast)",
                        a.suite
                    ))
                })?,
            };
            let mut rows = Vec::new();
            let mut all_passed = true;
            for idx in indices {
                let r = acceptance::run_criterion(idx, seed)
                    .ok_or_else(|| Error::Parse(format!("no criterion {idx}")))?;
                println!("{}", r.line());
                all_passed &= r.passed;
                rows.push(serde_json::json!({
                    "index": r.index,
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                }));
            }
            if let Some(dir) = &out {
                let artifact = Artifact {
                    version: VERSION,
                    config_hash: cfg.hash(),
                    command: cfg.command,
                    seed,
                    result: serde_json::json!({ "passed": all_passed, "criteria": rows }),
                };
                std::fs::create_dir_all(dir)?;
                std::fs::write(
                    dir.join("acceptance.json"),
                    serde_json::to_string_pretty(&artifact)
                        .map_err(|e| Error::Parse(e.to_string()))?
                        + "\n",
                )?;
            }
            if !all_passed {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Export(a) => {
            let mut cfg = Config::new("export", seed);
            cfg.set("delta", a.delta);
            let mut actions = 0usize;
            if let Some(obj) = &a.link_obj {
                let scene_path = a.scene.as_ref().ok_or_else(|| {
                    Error::Parse("--link-obj needs a scene".into())
                })?;
                cfg.set_file("scene", scene_path)?;
                let scene = load_scene(scene_path)?;
                let link = geodesic_link(&scene, a.delta)?;
                let curves: Vec<Vec<Vec3>> =
                    link.geodesics.iter().map(|g| g.vertices.clone()).collect();
                write_obj_polylines_with_meta(obj, &curves, &meta_lines(&cfg))?;
                actions += 1;
            }
            if let Some(field_path) = &a.field {
                let csv = a.field_csv.as_ref().ok_or_else(|| {
                    Error::Parse("--field needs --field-csv".into())
                })?;
                cfg.set_file("field", field_path)?;
                let field = ScalarFieldGrid::read_binary(field_path)?;
                let mut text = format!("# vorlink {VERSION} config {}\nx,y,z,value\n", cfg.hash());
                for k in 0..field.dims[2] {
                    for j in 0..field.dims[1] {
                        for i in 0..field.dims[0] {
                            let p = field.pos(i, j, k);
                            let v = field.values[field.idx(i, j, k)];
                            text.push_str(&format!("{},{},{},{v:.17e}\n", p.x, p.y, p.z));
                        }
                    }
                }
                std::fs::write(csv, text)?;
                actions += 1;
            }
            if actions == 0 {
                return Err(Error::Parse(
                    "export needs --link-obj or --field/--field-csv".into(),
                ));
            }
            emit(&cfg, &out, serde_json::json!({ "exports": actions }))?;
        }
        Command::Oracle(a) => {
            let mut cfg = Config::new("oracle", seed);
            cfg.set_file("scene", &a.scene)?;
            cfg.set("from", a.from);
            cfg.set("to", a.to);
            cfg.set("grid", a.grid);
            cfg.set("stencil", &a.stencil);
            let stencil = match a.stencil.as_str() {
                "6" => Stencil::S6,
                "18" => Stencil::S18,
                "26" => Stencil::S26,
                "extended" => Stencil::Extended,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown stencil {other:?} (use 6, 18, 26 or extended)"
                    )))
                }
            };
            let scene = load_scene(&a.scene)?;
            let lat = lattice_oracle_distance(&scene, a.from, a.to, a.grid, stencil)?;
            let analytic = distance(&scene, a.from, a.to, 0.0)?;
            emit(
                &cfg,
                &out,
                serde_json::json!({
                    "raw": lat.raw,
                    "relaxed": lat.relaxed,
                    "analytic": analytic,
                    "relative_gap": (lat.relaxed - analytic).abs() / analytic.max(1e-300),
                    "nodes_expanded": lat.nodes_expanded,
                }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
