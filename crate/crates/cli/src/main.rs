mod verify;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tenttile::boundary::{build_boundary_graph, dimension_report, Variant};
use tenttile::geometry::{Mat, PointCloud, TentTile, DEFAULT_POINT_BUDGET};
use tenttile::numberfield::{registry, registry_lookup, FieldElement};
use tenttile::rauzy::{correspondence_check, RauzySetup, WALK_BUDGET};
use tenttile::substitution::substitution_for;
use tenttile::tiling::{tiling_spec, Membership, verify_tiling, CoverageConfig, DEFAULT_THRESHOLD, DEFAULT_WINDOW_SCALE};
use tenttile::Error;

pub const SCHEMA: u32 = 1;

/// Word length for spatial clouds when no depth is given (`2^20` points).
const AUTO_DEPTH_3D: u64 = 20;

#[derive(Parser, Debug)]
#[command(name = "tenttile", version, about = "Tent-tiles of the special Pisot units")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(clap::Args, Debug, Clone)]
pub struct RunConfig {
    /// Bits of precision for conjugates and eigenvalue isolation
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(16..=4096))]
    pub precision: u32,
    /// Render depth (words of this length); automatic from the resolution when absent
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub depth: Option<u64>,
    /// Raster resolution, or cells per tile diameter for `correspond`
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=65536))]
    pub resolution: Option<u64>,
    /// Tiling window side in tile diameters
    #[arg(long, global = true, default_value_t = DEFAULT_WINDOW_SCALE, value_parser = positive)]
    pub window_scale: f64,
    /// Tiling: boundary fraction threshold. Correspondence: Hausdorff tolerance
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    /// Output directory for files
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Pgm,
    Svg,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum What {
    Tent,
    Rauzy,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Sr,
    Lat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The eleven special Pisot numbers
    List,
    /// Registry data, matrices, substitution and tiling data of one record
    Info {
        #[arg(allow_negative_numbers = true, value_parser = index)]
        index: i32,
    },
    /// Write a point cloud, raster, SVG or voxel grid
    Render {
        #[arg(allow_negative_numbers = true, value_parser = index)]
        index: i32,
        #[arg(long, value_enum, default_value = "tent")]
        what: What,
    },
    /// Boundary dimension report
    Dimension {
        #[arg(allow_negative_numbers = true, value_parser = index)]
        index: i32,
    },
    /// Boundary graph summary (json) or adjacency matrix (csv)
    Boundary {
        #[arg(allow_negative_numbers = true, value_parser = index)]
        index: i32,
        #[arg(long, value_enum, default_value = "sr")]
        variant: VariantArg,
    },
    /// Rasterized lattice tiling check
    Tiling {
        #[arg(allow_negative_numbers = true, value_parser = index)]
        index: i32,
    },
    /// Compare Rauzy subtiles with transformed tent-tiles
    Correspond {
        #[arg(allow_negative_numbers = true, value_parser = index)]
        index: i32,
    },
    /// Run every check and report
    VerifyAll {
        /// Comma separated groups
        #[arg(long, value_delimiter = ',', value_enum)]
        only: Vec<verify::Group>,
    },
}

fn index(s: &str) -> Result<i32, String> {
    let i: i32 = s.parse().map_err(|e| format!("{e}"))?;
    if (-5..=5).contains(&i) {
        Ok(i)
    } else {
        Err(format!("index {i} is outside -5..=5"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

/// Verification result of a command that ran to completion.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<Error>().is_some_and(|e| {
                matches!(
                    e,
                    Error::IndexOutOfRange(_)
                        | Error::NoTentTile
                        | Error::UnknownTiling(_)
                        | Error::Unsupported(_)
                        | Error::FamilyParameter { .. }
                )
            }) || e.downcast_ref::<UsageError>().is_some();
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = cli.config;
    match cli.command {
        Command::List => cmd_list(&cfg),
        Command::Info { index } => cmd_info(index, &cfg),
        Command::Render { index, what } => cmd_render(index, what, &cfg),
        Command::Dimension { index } => {
            let r = dimension_report(index)?;
            emit(serde_json::to_value(r)?)?;
            Ok(Outcome::Pass)
        }
        Command::Boundary { index, variant } => cmd_boundary(index, variant, &cfg),
        Command::Tiling { index } => cmd_tiling(index, &cfg),
        Command::Correspond { index } => cmd_correspond(index, &cfg),
        Command::VerifyAll { only } => {
            let report = verify::run_all(&only, &cfg);
            let pass = report.pass;
            emit(serde_json::to_value(report)?)?;
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
    }
}

/// Pretty JSON on stdout, tagged with the schema version.
pub fn emit(v: Value) -> anyhow::Result<()> {
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), json!(SCHEMA));
    match v {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("data".into(), other);
        }
    }
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, &Value::Object(obj))?;
    writeln!(w)?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

fn poly_string(coeffs: &[i64]) -> String {
    tenttile::poly::IntPoly::from_i64(coeffs).to_string()
}

fn cmd_list(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let rows: Vec<Value> = registry()
        .iter()
        .map(|r| {
            json!({
                "index": r.index,
                "value": r.approx_value,
                "minpoly": poly_string(&r.minpoly.coeffs),
                "minpoly_coeffs": r.minpoly.coeffs,
                "exponent": r.exponent,
                "partner": r.partner,
                "tent_tile": r.has_tent_tile,
            })
        })
        .collect();
    match cfg.format {
        Some(Format::Json) => emit(json!({ "records": rows }))?,
        Some(Format::Csv) => {
            println!("index,value,minpoly,exponent,partner,tent_tile");
            for r in registry() {
                println!(
                    "{},{:.12},{},{},{},{}",
                    r.index,
                    r.approx_value,
                    poly_string(&r.minpoly.coeffs),
                    r.exponent,
                    r.partner,
                    r.has_tent_tile
                );
            }
        }
        None => {
            println!("{:>5}  {:>14}  {:<28} {:>3}  {:>7}", "index", "value", "minimal polynomial", "m", "partner");
            for r in registry() {
                let note = if r.has_tent_tile { "" } else { "  No tent-tile" };
                println!(
                    "{:>5}  {:>14.10}  {:<28} {:>3}  {:>7}{note}",
                    r.index,
                    r.approx_value,
                    poly_string(&r.minpoly.coeffs),
                    r.exponent,
                    r.partner
                );
            }
        }
        Some(f) => return Err(usage(format!("list does not support {f:?}"))),
    }
    Ok(Outcome::Pass)
}

fn mat_json(m: &Mat, dim: usize) -> Value {
    json!((0..dim).map(|r| (0..dim).map(|c| m[(r, c)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn cmd_info(index: i32, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let rec = registry_lookup(index)?;
    let mut out = serde_json::to_value(rec)?;
    let obj = out.as_object_mut().expect("record serializes to an object");
    obj.insert("minpoly_text".into(), json!(poly_string(&rec.minpoly.coeffs)));
    if rec.has_tent_tile {
        let conj: Vec<Value> = FieldElement::alpha(index)?
            .conjugates(cfg.precision)
            .iter()
            .map(|c| json!([c.value.re, c.value.im]))
            .collect();
        obj.insert("conjugates".into(), json!(conj));
        let tile = TentTile::new(rec)?;
        let d = tile.dim();
        obj.insert("dim".into(), json!(d));
        obj.insert("A".into(), mat_json(&tile.pair.a, d));
        obj.insert("B".into(), mat_json(&tile.pair.b, d));
        match substitution_for(rec) {
            Ok((s, c)) => {
                obj.insert("family".into(), json!(c.family.name()));
                obj.insert("substitution".into(), s.to_json());
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e.into()),
        }
        let spec = tiling_spec(index)?;
        obj.insert(
            "tiling".into(),
            json!({
                "status": spec.status,
                "protos": spec.protos,
                "lattice": spec.lattice.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
                "center": spec.center.as_ref().map(|c| c.to_string()),
            }),
        );
    }
    emit(out)?;
    Ok(Outcome::Pass)
}

fn cmd_render(index: i32, what: What, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let rec = registry_lookup(index)?;
    let tile = TentTile::new(rec)?;
    let dim = tile.dim();
    let format = cfg.format.unwrap_or(if dim == 1 { Format::Svg } else { Format::Pgm });
    let resolution = cfg
        .resolution
        .map(|r| r as usize)
        .unwrap_or(if dim == 3 { 64 } else { 512 });
    let voxels = dim == 3 && matches!(format, Format::Pgm | Format::Svg);
    if voxels && what == What::Tent && cfg.depth.is_none() {
        let (path, mut w) = create(&cfg.out, &format!("tent_{index}.vox"))?;
        Membership::new(&tile)?.write_voxels(&mut w, resolution)?;
        w.flush()?;
        println!("{}", path.display());
        return Ok(Outcome::Pass);
    }
    let cell = match dim {
        1 => 2e-6 * tile.radius,
        2 => tile.radius / resolution as f64,
        _ => 0.0,
    };
    let (clouds, tag) = match what {
        What::Tent => {
            let depth = cfg.depth.or((dim == 3).then_some(AUTO_DEPTH_3D));
            let c = match depth {
                Some(k) => tile.ifs.render_uniform(&Default::default(), k as usize, DEFAULT_POINT_BUDGET)?,
                None => tile.render(cell, DEFAULT_POINT_BUDGET)?,
            };
            (vec![c], "tent")
        }
        What::Rauzy => {
            let setup = RauzySetup::new(index)?;
            let cell = if dim == 3 { setup.tile_diameter()? / 10.0 } else { cell };
            let tiles = match cfg.depth {
                Some(k) => setup.gifs.render(k as usize, WALK_BUDGET)?,
                None => setup.gifs.render_cell(cell, WALK_BUDGET)?,
            };
            (tiles.clouds, "rauzy")
        }
    };
    let union = PointCloud::union(&clouds);
    let ext = match (format, dim) {
        (Format::Csv, _) => "csv",
        (Format::Json, _) => "json",
        (Format::Pgm | Format::Svg, 3) => "vox",
        (Format::Pgm, _) => "pgm",
        (Format::Svg, _) => "svg",
    };
    let (path, mut w) = create(&cfg.out, &format!("{tag}_{index}.{ext}"))?;
    match ext {
        "csv" => {
            for (a, c) in clouds.iter().enumerate() {
                c.write_csv(&mut w, (clouds.len() > 1).then_some(a))?;
            }
        }
        "json" => {
            let pts: Vec<Vec<Vec<f64>>> = clouds
                .iter()
                .map(|c| c.points.iter().map(|p| (0..dim).map(|k| p[k]).collect()).collect())
                .collect();
            let v = json!({
                "schema": SCHEMA,
                "record": index,
                "dim": dim,
                "cell_size": union.cell_size,
                "depth": union.depth,
                "clouds": pts,
            });
            serde_json::to_writer(&mut w, &v)?;
            writeln!(w)?;
        }
        "vox" => union.write_voxels(&mut w, resolution)?,
        "pgm" => union.write_pgm(&mut w, resolution)?,
        _ => union.write_svg(&mut w, resolution)?,
    }
    w.flush()?;
    println!("{}", path.display());
    Ok(Outcome::Pass)
}

fn cmd_boundary(index: i32, variant: VariantArg, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let v = match variant {
        VariantArg::Sr => Variant::Sr,
        VariantArg::Lat => Variant::Lat,
    };
    let g = build_boundary_graph(index, v)?;
    match cfg.format {
        Some(Format::Csv) => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            g.write_adjacency_csv(&mut w)?;
        }
        None | Some(Format::Json) => {
            let adj = g.adjacency();
            let mu = tenttile::spectral::dominant_eigenvalue(&adj, cfg.precision)?;
            let mut v = g.to_json();
            let obj = v.as_object_mut().expect("graph serializes to an object");
            obj.insert("mu".into(), json!(mu.value));
            obj.insert("mu_interval".into(), json!([mu.interval.lo_f64(), mu.interval.hi_f64()]));
            obj.insert("mu_poly".into(), json!(mu.poly.to_string()));
            obj.insert("char_poly".into(), json!(mu.char_poly.to_string()));
            emit(v)?;
        }
        Some(f) => return Err(usage(format!("boundary does not support {f:?}"))),
    }
    Ok(Outcome::Pass)
}

pub fn coverage_config(cfg: &RunConfig) -> CoverageConfig {
    CoverageConfig {
        window_scale: cfg.window_scale,
        resolution: cfg.resolution.map(|r| r as usize),
        threshold: cfg.tol.unwrap_or(DEFAULT_THRESHOLD),
        ..Default::default()
    }
}

fn cmd_tiling(index: i32, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let r = verify_tiling(index, &coverage_config(cfg))?;
    match cfg.format {
        None | Some(Format::Json) => {}
        Some(Format::Pgm) => {
            let (path, mut w) = create(&cfg.out, &format!("tiling_{index}.pgm"))?;
            r.histogram.write_pgm(&mut w)?;
            w.flush()?;
            eprintln!("{}", path.display());
        }
        Some(f) => return Err(usage(format!("tiling does not support {f:?}"))),
    }
    let pass = r.pass;
    emit(serde_json::to_value(r)?)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

/// Cells per tile diameter for correspondence checks.
pub fn correspond_resolution(dim: usize) -> u64 {
    if dim >= 3 {
        10
    } else {
        1000
    }
}

fn cmd_correspond(index: i32, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let setup = RauzySetup::new(index)?;
    let diam = setup.tile_diameter()?;
    let cells = cfg.resolution.unwrap_or_else(|| correspond_resolution(setup.tile.dim()));
    let cell = diam / cells as f64;
    let tol = cfg.tol.unwrap_or(5.0 * cell);
    let r = correspondence_check(index, cell, tol, WALK_BUDGET)?;
    let pass = r.pass;
    let mut v = serde_json::to_value(r)?;
    v.as_object_mut().expect("report serializes to an object").insert("diameter".into(), json!(diam));
    emit(v)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}
