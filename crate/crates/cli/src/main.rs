mod manifest;
mod pipeline;
mod report;
mod stages;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sweeptopo::laplace::WeightScheme;
use sweeptopo::levelset::EpsilonPolicy;
use sweeptopo::sweepgen::SweepParams;

use crate::manifest::RunManifest;
use crate::report::RunReport;
use crate::stages::{GeneratorKind, Stage, StartsArg, Workspace};

#[derive(Parser)]
#[command(name = "sweeptopo", version, about = "Sweep fields on tetrahedral meshes and the topology of their level sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a structured box or the painted counterexample.
    Generate(GenerateArgs),
    /// Solve the sweep problem for a field.
    Solve(SolveArgs),
    /// Classify every vertex of a field.
    Classify(FieldArgs),
    /// Extract level sets and report their Betti numbers.
    Levelset(LevelsetArgs),
    /// Measure Betti changes across every interior critical value.
    Transitions(TransitionsArgs),
    /// Trace descent paths from the cap to the base.
    Trace(TraceArgs),
    /// Run the stages named in a TOML config.
    Pipeline(PipelineArgs),
    /// Render a run report as a plain-text summary.
    Report(ReportArgs),
}

#[derive(Args)]
struct Output {
    /// Where to write the JSON report; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Box,
    Counterexample,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Cells along x and y.
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Cells along z.
    #[arg(long, default_value_t = 16)]
    nz: usize,
    /// TOML file with counterexample parameters; overrides --n and --nz.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Mesh output, `.vtk` or native.
    #[arg(long)]
    mesh: PathBuf,
    /// Boundary-set output (JSON).
    #[arg(long)]
    boundary: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    boundary: PathBuf,
    #[arg(long, default_value = "uniform")]
    weights: WeightScheme,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Field output, one value per line.
    #[arg(long)]
    field: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct LevelsetArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    field: PathBuf,
    /// Level values; repeatable.
    #[arg(long = "value")]
    values: Vec<f64>,
    /// Also take the midpoint of every gap between critical values.
    #[arg(long)]
    mid_gap: bool,
    /// Directory for the surfaces.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "obj")]
    format: stages::SurfaceFormat,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct TransitionsArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    field: PathBuf,
    /// Fixed offset around each critical value; mid-gap when absent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Level samples inside every gap.
    #[arg(long, default_value_t = 3)]
    samples: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    boundary: PathBuf,
    /// `vertices` or `grid NxM`.
    #[arg(long, default_value = "grid 40x40")]
    starts: StartsArg,
    /// Polyline output (OBJ).
    #[arg(long)]
    paths: Option<PathBuf>,
    /// Report `(s, t, u)` per start; only meaningful on the structured box.
    #[arg(long)]
    box_parameters: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for every artifact; created if missing.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// A JSON run report.
    input: PathBuf,
    /// Recompute the digests recorded in the manifest.
    #[arg(long)]
    verify: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(err.downcast_ref::<Stage>().map_or(1, |s| s.exit_code()))
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate(a) => {
            let params = match a.params {
                Some(p) => Some(read_params(&p).context(Stage::Input)?),
                None => None,
            };
            let kind = match a.kind {
                Kind::Box => GeneratorKind::Box { size: [a.n, a.n, a.nz] },
                Kind::Counterexample => GeneratorKind::Counterexample(params.unwrap_or(SweepParams {
                    n: a.n,
                    nz: a.nz,
                    ..SweepParams::default()
                })),
            };
            let mut ws = Workspace::generate(&kind)?;
            let mut report = RunReport::new(RunManifest::new());
            report.mesh = Some(ws.mesh_section());
            ws.write_mesh(&a.mesh, &a.boundary, &mut report.manifest)?;
            emit(&report, a.out.report.as_deref())
        }
        Command::Solve(a) => {
            let mut ws = Workspace::load(&a.mesh, Some(&a.boundary), None)?;
            let mut report = RunReport::new(ws.manifest());
            report.mesh = Some(ws.mesh_section());
            report.solve = Some(ws.solve(a.weights, a.tolerance, &mut report.manifest)?);
            ws.write_field(&a.field, &mut report.manifest)?;
            emit(&report, a.out.report.as_deref())
        }
        Command::Classify(a) => {
            let mut ws = Workspace::load(&a.mesh, None, Some(&a.field))?;
            let mut report = RunReport::new(ws.manifest());
            report.classify = Some(ws.classify()?);
            emit(&report, a.out.report.as_deref())
        }
        Command::Levelset(a) => {
            if a.values.is_empty() && !a.mid_gap {
                bail!(anyhow::anyhow!("give at least one --value or --mid-gap").context(Stage::Config));
            }
            let mut ws = Workspace::load(&a.mesh, None, Some(&a.field))?;
            let mut report = RunReport::new(ws.manifest());
            if a.mid_gap {
                report.classify = Some(ws.classify()?);
            }
            let dir = a.out_dir.as_deref();
            report.level_sets = ws.level_sets(&a.values, a.mid_gap, dir.map(|d| (d, a.format)), &mut report.manifest)?;
            emit(&report, a.out.report.as_deref())
        }
        Command::Transitions(a) => {
            let mut ws = Workspace::load(&a.mesh, None, Some(&a.field))?;
            let mut report = RunReport::new(ws.manifest());
            report.classify = Some(ws.classify()?);
            let policy = a.epsilon.map_or(EpsilonPolicy::MidGap, EpsilonPolicy::Fixed);
            let analysis = ws.transitions(policy, a.samples)?;
            let matched = analysis.all_matched();
            report.transitions = Some(analysis);
            let code = emit(&report, a.out.report.as_deref())?;
            if !matched {
                bail!(anyhow::anyhow!("a transition matches no allowed pattern").context(Stage::Transitions));
            }
            Ok(code)
        }
        Command::Trace(a) => {
            let mut ws = Workspace::load(&a.mesh, Some(&a.boundary), Some(&a.field))?;
            let mut report = RunReport::new(ws.manifest());
            report.trace = Some(ws.trace(&a.starts, a.paths.as_deref(), a.box_parameters, &mut report.manifest)?);
            emit(&report, a.out.report.as_deref())
        }
        Command::Pipeline(a) => pipeline::run(&a.config, &a.out_dir),
        Command::Report(a) => {
            let text = std::fs::read_to_string(&a.input)
                .with_context(|| format!("reading {}", a.input.display()))
                .context(Stage::Input)?;
            let report: RunReport = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", a.input.display()))
                .context(Stage::Input)?;
            report.check_schema().context(Stage::Input)?;
            if a.verify {
                let base = a.input.parent().unwrap_or(Path::new("."));
                report.manifest.verify(base).context(Stage::Output)?;
            }
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_params(path: &Path) -> Result<SweepParams> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(report: &RunReport, path: Option<&Path>) -> Result<ExitCode> {
    let json = report.to_json();
    match path {
        Some(p) => std::fs::write(p, json)
            .with_context(|| format!("writing {}", p.display()))
            .context(Stage::Output)?,
        None => print!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}
