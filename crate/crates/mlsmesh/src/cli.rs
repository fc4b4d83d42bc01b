//! Command-line interface of the `mlsmesh` binary.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlsmesh_core::metrics::{EvalReport, Evaluator, LabelKinds, ParamGrid};
use mlsmesh_core::synth::{simulate_with, BUILTIN_SCENES};
use mlsmesh_core::{reconstruct_with, Census, FilterParams, PulseGrid, Variant};

use crate::exec::Parallel;
use crate::scene::SceneConfig;
use crate::{export, pgrid, report};

#[derive(Debug, Parser)]
#[command(name = "mlsmesh", version, about = "Adaptive simplicial complexes from mobile laser scanning pulse grids")]
pub struct Cli {
    /// Worker threads; 0 uses one per core. Outputs do not depend on it.
    #[arg(long, global = true, env = "MLSMESH_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scan of a scene and write it as PGRID.
    Synth(SynthArgs),
    /// Reconstruct a simplicial complex from a PGRID file.
    Reconstruct(ReconstructArgs),
    /// Reconstruct and score against the ground-truth labels of a PGRID file.
    Eval(EvalArgs),
    /// Evaluate every combination of parameter lists and write a CSV table.
    Sweep(SweepArgs),
    /// List the built-in scenes.
    Scenes,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Built-in scene name (see `mlsmesh scenes`).
    #[arg(long, conflicts_with = "scene_config")]
    pub scene: Option<String>,
    /// TOML scene file.
    #[arg(long, value_name = "PATH")]
    pub scene_config: Option<PathBuf>,
}

impl SceneArgs {
    fn load(&self) -> anyhow::Result<Option<SceneConfig>> {
        match (&self.scene, &self.scene_config) {
            (Some(name), _) => SceneConfig::builtin(name).map(Some),
            (None, Some(path)) => SceneConfig::load(path).map(Some),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Random seed; defaults to the scene file's `seed`, else 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long, value_name = "PATH")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// C0 threshold: edges this close to orthogonal to the beam are kept.
    #[arg(long, default_value_t = FilterParams::default().alpha_m)]
    pub alpha_m: f64,
    /// Weight of C1 collinearity against large C0.
    #[arg(long, default_value_t = FilterParams::default().lambda)]
    pub lambda: f64,
    /// Alignment tolerance of the isolated-edge pass.
    #[arg(long, default_value_t = FilterParams::default().epsilon)]
    pub epsilon: f64,
    /// Wedge coplanarity tolerance.
    #[arg(long, default_value_t = FilterParams::default().omega)]
    pub omega: f64,
    /// Edge length threshold of the naive pipeline (m).
    #[arg(long, default_value_t = FilterParams::default().naive_length)]
    pub naive_length: f64,
    /// Pipeline: naive, edges or full.
    #[arg(long, default_value_t = FilterParams::default().variant)]
    pub variant: Variant,
}

impl FilterArgs {
    fn params(&self) -> anyhow::Result<FilterParams> {
        let p = FilterParams {
            alpha_m: self.alpha_m,
            lambda: self.lambda,
            epsilon: self.epsilon,
            omega: self.omega,
            naive_length: self.naive_length,
            variant: self.variant,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeshFormat {
    Ply,
    Obj,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Input PGRID file.
    pub input: PathBuf,
    /// Output mesh; the format follows the extension unless `--format` is given.
    #[arg(short, long, value_name = "PATH")]
    pub output: PathBuf,
    #[arg(long)]
    pub format: Option<MeshFormat>,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Also write a TOML report with the census and stage counters.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Mark a label as a scatter cloud of spheres with the given radius.
    #[arg(long, value_name = "LABEL:RADIUS", value_parser = parse_scatter)]
    pub scatter: Vec<(u32, f64)>,
}

impl LabelArgs {
    fn kinds(&self) -> anyhow::Result<LabelKinds> {
        let mut scatter = self.scatter.clone();
        if let Some(scene) = self.scene.load()? {
            scatter.extend(scene.scatter_labels());
        }
        Ok(LabelKinds::with_scatter(scatter))
    }
}

fn parse_scatter(s: &str) -> Result<(u32, f64), String> {
    let (label, radius) = s.split_once(':').ok_or("expected LABEL:RADIUS")?;
    let label = label.trim().parse().map_err(|e| format!("label: {e}"))?;
    let radius: f64 = radius.trim().parse().map_err(|e| format!("radius: {e}"))?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err("radius must be positive".into());
    }
    Ok((label, radius))
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Labelled input PGRID file.
    pub input: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// TOML report path; printed to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Also write the result as a one-row CSV table.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Labelled input PGRID file.
    pub input: PathBuf,
    /// Comma-separated values; each list defaults to the single default value.
    #[arg(long, value_name = "LIST")]
    pub alpha_m: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub lambda: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub epsilon: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub omega: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub naive_length: Option<String>,
    #[arg(long, value_name = "LIST")]
    pub variant: Option<String>,
    #[command(flatten)]
    pub labels: LabelArgs,
    /// CSV output; stdout when omitted.
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

fn parse_list<T: std::str::FromStr>(flag: &str, list: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("--{flag}: `{v}`: {e}")))
        .collect()
}

impl SweepArgs {
    fn param_grid(&self) -> anyhow::Result<ParamGrid> {
        let mut grid = ParamGrid::single(FilterParams::default());
        let reals = [
            ("alpha-m", &self.alpha_m, &mut grid.alpha_m),
            ("lambda", &self.lambda, &mut grid.lambda),
            ("epsilon", &self.epsilon, &mut grid.epsilon),
            ("omega", &self.omega, &mut grid.omega),
            ("naive-length", &self.naive_length, &mut grid.naive_length),
        ];
        for (flag, list, axis) in reals {
            if let Some(list) = list {
                *axis = parse_list(flag, list)?;
            }
        }
        if let Some(list) = &self.variant {
            grid.variant = parse_list("variant", list)?;
        }
        Ok(grid)
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let exec = Parallel::new(cli.threads).context("starting worker threads")?;
    match cli.command {
        Command::Synth(args) => synth(&args, &exec),
        Command::Reconstruct(args) => reconstruct(&args, &exec),
        Command::Eval(args) => eval(&args, &exec),
        Command::Sweep(args) => sweep(&args, &exec),
        Command::Scenes => {
            for name in BUILTIN_SCENES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_grid(path: &Path) -> anyhow::Result<PulseGrid> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    pgrid::read_pgrid(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn print_census(c: &Census) {
    println!(
        "vertices {} edges {} triangles {} free_vertices {} free_edges {}",
        c.vertices, c.edges, c.triangles, c.free_vertices, c.free_edges
    );
}

fn synth(args: &SynthArgs, exec: &Parallel) -> anyhow::Result<()> {
    let Some(scene) = args.scene.load()? else {
        bail!("one of --scene or --scene-config is required");
    };
    let seed = args.seed.or(scene.seed).unwrap_or(0);
    let grid = simulate_with(&scene.primitives, &scene.trajectory, seed, exec)?;
    let mut out = create(&args.output)?;
    pgrid::write_pgrid(&grid, &mut out).with_context(|| format!("writing {}", args.output.display()))?;
    out.flush()?;
    let empty = (0..grid.n_pulses()).filter(|&p| grid.echo_span(p).is_empty()).count();
    println!(
        "lines {} steps {} pulses {} echoes {} empty_pulses {}",
        grid.n_lines(),
        grid.n_steps(),
        grid.n_pulses(),
        grid.n_echoes(),
        empty
    );
    Ok(())
}

fn reconstruct(args: &ReconstructArgs, exec: &Parallel) -> anyhow::Result<()> {
    let params = args.filter.params()?;
    let format = match args.format {
        Some(f) => f,
        None => match args.output.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ply") => MeshFormat::Ply,
            Some(e) if e.eq_ignore_ascii_case("obj") => MeshFormat::Obj,
            _ => bail!("cannot infer mesh format of {}; use --format", args.output.display()),
        },
    };
    let grid = read_grid(&args.input)?;
    let start = Instant::now();
    let rec = reconstruct_with(&grid, &params, exec)?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut out = create(&args.output)?;
    match format {
        MeshFormat::Ply => export::write_ply(&rec.complex, &mut out),
        MeshFormat::Obj => export::write_obj(&rec.complex, &mut out),
    }
    .with_context(|| format!("writing {}", args.output.display()))?;
    out.flush()?;

    if let Some(path) = &args.report {
        write_text(path, &report::reconstruct_toml(&rec, args.timing.then_some(elapsed))?)?;
    }
    print_census(&rec.complex.census());
    Ok(())
}

fn eval(args: &EvalArgs, exec: &Parallel) -> anyhow::Result<()> {
    let params = args.filter.params()?;
    let kinds = args.labels.kinds()?;
    let grid = read_grid(&args.input)?;
    let evaluator = Evaluator::new(&grid, kinds, exec)?;
    let start = Instant::now();
    let rec = reconstruct_with(&grid, &params, exec)?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut result = evaluator.evaluate(&rec.complex)?;
    result.params = Some(params);
    result.runtime_seconds = args.timing.then_some(elapsed);

    let doc = report::eval_toml(&result)?;
    match &args.report {
        Some(path) => {
            write_text(path, &doc)?;
            print_summary(&result);
        }
        None => print!("{doc}"),
    }
    if let Some(path) = &args.csv {
        report::write_csv(std::slice::from_ref(&result), create(path)?)?;
    }
    Ok(())
}

fn print_summary(r: &EvalReport) {
    print_census(&r.census);
    println!(
        "edge precision {:.6} recall {:.6} triangle precision {:.6} recall {:.6} cross_label_edges {}",
        r.edges.precision, r.edges.recall, r.triangles.precision, r.triangles.recall, r.cross_label_edges
    );
}

fn sweep(args: &SweepArgs, exec: &Parallel) -> anyhow::Result<()> {
    let combos = args.param_grid()?.combinations()?;
    let kinds = args.labels.kinds()?;
    let grid = read_grid(&args.input)?;
    let evaluator = Evaluator::new(&grid, kinds, exec)?;
    let mut rows = Vec::with_capacity(combos.len());
    for params in combos {
        let start = Instant::now();
        let rec = reconstruct_with(&grid, &params, exec)?;
        let elapsed = start.elapsed().as_secs_f64();
        let mut r = evaluator.evaluate(&rec.complex)?;
        r.params = Some(params);
        r.runtime_seconds = args.timing.then_some(elapsed);
        rows.push(r);
    }
    match &args.output {
        Some(path) => report::write_csv(&rows, create(path)?)?,
        None => report::write_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}
