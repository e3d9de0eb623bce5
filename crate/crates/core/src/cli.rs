//! Command-line front end. `main` only parses arguments and maps the result
//! to an exit code; everything else lives here so it can be tested.

use crate::error::{Error, ErrorKind, Result};
use crate::experiments::{fiber_trace, linspace, radii_sweep, tube_boundary};
use crate::expmap::{normal_frame, w_limit};
use crate::export::{self, Layer, SvgDrawing};
use crate::presets::{preset, PRESET_NAMES};
use crate::radii::radii_report;
use crate::scene::{FamilySpec, Scene, SceneConfig};
use crate::singular::{detect_collapse_arcs, singular_set, transversality_check};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "muthick",
    version,
    about = "Weighted thickness of curves: radii, fibers, tubes and singular sets"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Scene file (JSON).
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance override `KEY=VALUE`; may be repeated.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VALUE")]
    pub tol_override: Vec<String>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Focal radii, DCSD/2 and the injectivity radii with their witnesses.
    Report,
    /// Radii of the additive family `mu + t` over a grid of t.
    Sweep(SweepArgs),
    /// Fiber traces `R -> exp(gamma(s), R v)` along the principal normal.
    Fibers(FiberArgs),
    /// Samples of the tube boundary at one height.
    Tube(TubeArgs),
    /// The singular graph inside D(UR).
    Singular,
    /// Horizontally collapsing arcs.
    Collapse,
    /// Whether 0 is a regular value of mu'' + kappa^2 mu / 4.
    Check,
    /// Writes bundled scene files.
    GenScene(GenArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Family file (JSON); defaults to the scene's own family block.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Explicit parameter values, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_values: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FiberArgs {
    /// Foot arclengths, comma separated; seven evenly spaced feet when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    /// Largest height; clipped to 1/|mu'| at each foot.
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct TubeArgs {
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 400)]
    pub s_samples: usize,
    /// Directions per foot in dimension three and above.
    #[arg(long, default_value_t = 24)]
    pub v_samples: usize,
    /// Where to write overlap points; `<out>.overlap.csv` by default.
    #[arg(long)]
    pub overlap_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Preset name; every preset when absent.
    #[arg(long)]
    pub name: Option<String>,
    /// Target directory for the generated files.
    #[arg(long, default_value = "scenes")]
    pub dir: PathBuf,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Numeric => 3,
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io(e.to_string()))
        }
    }
}

fn load_scene(g: &GlobalOpts) -> Result<Scene> {
    let path = g
        .scene
        .as_ref()
        .ok_or_else(|| Error::InvalidScene("--scene is required".into()))?;
    Scene::load(path, &g.tol_override)
}

/// Writes CSV, plus an SVG when requested. A non-planar SVG request still
/// writes the CSV and then reports the error.
fn emit_tabular(g: &GlobalOpts, dim: usize, csv: String, draw: impl FnOnce(&mut SvgDrawing)) -> Result<()> {
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => write_out(g.out.as_deref(), &csv),
        Format::Json => Err(Error::InvalidScene("this command writes csv or svg".into())),
        Format::Svg => match SvgDrawing::new(dim) {
            Ok(mut d) => {
                draw(&mut d);
                write_out(g.out.as_deref(), &d.render())
            }
            Err(e) => {
                let csv_path = g.out.as_ref().map(|p| p.with_extension("csv"));
                write_out(csv_path.as_deref(), &csv)?;
                Err(e)
            }
        },
    }
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::GenScene(a) => gen_scene(a),
        Command::Report => {
            let scene = load_scene(g)?;
            let r = radii_report(&scene)?;
            eprint!("{}", export::report_table(&scene, &r));
            match g.format.unwrap_or(Format::Json) {
                Format::Json => write_out(g.out.as_deref(), &export::report_json(&scene, &r)),
                Format::Csv => write_out(g.out.as_deref(), &export::report_csv(&r)),
                Format::Svg => Err(Error::InvalidScene("report writes json or csv".into())),
            }
        }
        Command::Sweep(a) => {
            let scene = load_scene(g)?;
            let grid = sweep_grid(&scene, a)?;
            let rows = radii_sweep(&scene, &grid);
            for r in &rows {
                if let Some((code, msg)) = &r.failure {
                    eprintln!("t = {}: {code}: {msg}", r.t);
                }
            }
            if g.format.is_some_and(|f| f != Format::Csv) {
                return Err(Error::InvalidScene("sweep writes csv".into()));
            }
            write_out(g.out.as_deref(), &export::sweep_csv(&rows))
        }
        Command::Fibers(a) => {
            let scene = load_scene(g)?;
            let comp = scene.component(a.component)?;
            let feet = if a.s.is_empty() {
                let (lo, hi) = comp.curve.domain();
                if comp.curve.is_closed() {
                    (0..7).map(|k| lo + (hi - lo) * k as f64 / 7.0).collect()
                } else {
                    linspace(lo, hi, 7)
                }
            } else {
                a.s.clone()
            };
            let mut traces = Vec::new();
            for s in feet {
                let foot = comp.eval(s)?;
                let v = foot
                    .normal
                    .clone()
                    .unwrap_or_else(|| normal_frame(&foot.jet.d1).swap_remove(0));
                let r_max = a.r_max.min(w_limit(&foot));
                traces.push((a.component, fiber_trace(&scene, a.component, s, &v, r_max, a.samples)?));
            }
            let csv = export::trace_csv(scene.dim, &traces);
            emit_tabular(g, scene.dim, csv, |d| {
                d.add_scene_curves(&scene, 512);
                for (_, t) in &traces {
                    d.polyline(Layer::Fibers, t.iter().map(|p| [p.point[0], p.point[1]]).collect());
                }
            })
        }
        Command::Tube(a) => {
            let scene = load_scene(g)?;
            let tube = tube_boundary(&scene, a.radius, a.s_samples, a.v_samples)?;
            let overlap_path = a
                .overlap_out
                .clone()
                .or_else(|| g.out.as_ref().map(|p| p.with_extension("overlap.csv")));
            let overlap_csv = export::tube_csv(scene.dim, a.radius, &tube.overlap);
            match &overlap_path {
                Some(p) => write_out(Some(p), &overlap_csv)?,
                None if !tube.overlap.is_empty() => {
                    eprintln!(
                        "{} overlap points (pass --overlap-out to save them)",
                        tube.overlap.len()
                    )
                }
                None => {}
            }
            let csv = export::tube_csv(scene.dim, a.radius, &tube.boundary);
            emit_tabular(g, scene.dim, csv, |d| {
                d.add_scene_curves(&scene, 512);
                for p in &tube.boundary {
                    d.dot(Layer::Tube, [p.point[0], p.point[1]]);
                }
            })
        }
        Command::Singular => {
            let scene = load_scene(g)?;
            let r = radii_report(&scene)?;
            let pts = singular_set(&scene, r.ur);
            let csv = export::singular_csv(scene.dim, &pts);
            emit_tabular(g, scene.dim, csv, |d| {
                d.add_scene_curves(&scene, 512);
                for p in &pts {
                    d.dot(Layer::Singular, [p.location[0], p.location[1]]);
                }
            })
        }
        Command::Collapse => {
            let scene = load_scene(g)?;
            let r = radii_report(&scene)?;
            let arcs = detect_collapse_arcs(&scene, r.ur)?;
            let csv = export::collapse_csv(scene.dim, &arcs);
            emit_tabular(g, scene.dim, csv, |d| {
                d.add_scene_curves(&scene, 512);
                for arc in &arcs {
                    let comp = &scene.components[arc.comp];
                    let len = comp.curve.param_gap(arc.s1, arc.s2).abs();
                    let pts = (0..=64)
                        .map(|k| {
                            let p = comp
                                .eval_unchecked(crate::radii::clamp_wrap(comp, arc.s1 + len * k as f64 / 64.0))
                                .jet
                                .point;
                            [p[0], p[1]]
                        })
                        .collect();
                    d.polyline(Layer::Fibers, pts);
                    d.dot(Layer::Singular, [arc.p0[0], arc.p0[1]]);
                }
            })
        }
        Command::Check => {
            let scene = load_scene(g)?;
            let t = transversality_check(&scene);
            write_out(g.out.as_deref(), &export::check_json(&scene, &t))
        }
    }
}

fn sweep_grid(scene: &Scene, a: &SweepArgs) -> Result<Vec<f64>> {
    if !a.t_values.is_empty() {
        return Ok(a.t_values.clone());
    }
    if let (Some(lo), Some(hi), Some(n)) = (a.t_min, a.t_max, a.t_count) {
        return Ok(linspace(lo, hi, n));
    }
    if a.t_min.is_some() || a.t_max.is_some() || a.t_count.is_some() {
        return Err(Error::InvalidScene("--t-min, --t-max and --t-count go together".into()));
    }
    let family: Option<FamilySpec> = match &a.family {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidScene(format!("{}: {e}", p.display())))?;
            Some(serde_json::from_str(&text).map_err(|e| Error::InvalidScene(e.to_string()))?)
        }
        None => scene.family.clone(),
    };
    family
        .and_then(|f| f.t_values)
        .ok_or_else(|| Error::InvalidScene("no parameter grid: pass --t-values or a family with t_values".into()))
}

fn gen_scene(a: &GenArgs) -> Result<()> {
    let names: Vec<&str> = match &a.name {
        Some(n) => vec![n.as_str()],
        None => PRESET_NAMES.to_vec(),
    };
    std::fs::create_dir_all(&a.dir).map_err(|e| Error::Io(format!("{}: {e}", a.dir.display())))?;
    for n in names {
        let cfg: SceneConfig = preset(n).ok_or_else(|| Error::InvalidScene(format!("unknown preset `{n}`")))?;
        let path = a.dir.join(format!("{n}.json"));
        write_out(Some(&path), &cfg.to_json())?;
    }
    Ok(())
}
