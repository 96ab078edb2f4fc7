//! `pipeline --config`: a TOML document naming a mesh source and stages.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use sweeptopo::laplace::WeightScheme;
use sweeptopo::levelset::EpsilonPolicy;
use sweeptopo::sweepgen::SweepParams;

use crate::report::RunReport;
use crate::stages::{GeneratorKind, Stage, StartsArg, SurfaceFormat, Workspace};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub mesh: MeshConfig,
    /// Stages to run after the mesh is ready. Prerequisites are added.
    #[serde(default = "all_stages")]
    pub stages: Vec<StageName>,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub transitions: TransitionsConfig,
    #[serde(default)]
    pub levelset: LevelSetConfig,
    #[serde(default)]
    pub trace: TraceConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageName {
    Solve,
    Classify,
    Transitions,
    Levelset,
    Trace,
}

impl StageName {
    fn name(self) -> &'static str {
        match self {
            StageName::Solve => "solve",
            StageName::Classify => "classify",
            StageName::Transitions => "transitions",
            StageName::Levelset => "levelset",
            StageName::Trace => "trace",
        }
    }
}

fn all_stages() -> Vec<StageName> {
    vec![
        StageName::Solve,
        StageName::Classify,
        StageName::Transitions,
        StageName::Levelset,
        StageName::Trace,
    ]
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Box,
    Counterexample,
}

/// Exactly one of `generate` and `file`. Relative paths resolve against
/// the config file's directory.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub generate: Option<Generator>,
    /// Box cells along x, y, z.
    pub size: Option<[usize; 3]>,
    /// Counterexample parameters; defaults apply to missing keys.
    pub params: Option<SweepParams>,
    pub file: Option<PathBuf>,
    pub boundary: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub weights: WeightScheme,
    pub tolerance: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            weights: WeightScheme::Uniform,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionsConfig {
    /// Fixed offset around each critical value; mid-gap when absent.
    pub epsilon: Option<f64>,
    pub samples: usize,
}

impl Default for TransitionsConfig {
    fn default() -> Self {
        Self { epsilon: None, samples: 3 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelSetConfig {
    pub values: Vec<f64>,
    pub mid_gaps: bool,
    pub format: SurfaceFormat,
}

impl Default for LevelSetConfig {
    fn default() -> Self {
        Self {
            values: vec![0.05, 0.95],
            mid_gaps: true,
            format: SurfaceFormat::Obj,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceConfig {
    /// `vertices` or `grid NxM`.
    pub starts: String,
    pub export_paths: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            starts: "grid 40x40".to_string(),
            export_paths: true,
        }
    }
}

pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_relative() {
        base.join(p)
    } else {
        p.to_path_buf()
    }
}

/// The requested stages plus their prerequisites, in execution order.
fn plan(requested: &[StageName], mid_gaps: bool) -> Vec<StageName> {
    let mut s: Vec<StageName> = requested.to_vec();
    let has = |s: &[StageName], x| s.contains(&x);
    if has(&s, StageName::Transitions) || (has(&s, StageName::Levelset) && mid_gaps) {
        s.push(StageName::Classify);
    }
    if !s.is_empty() {
        s.push(StageName::Solve);
    }
    s.sort();
    s.dedup();
    s
}

pub fn run(config: &Path, out_dir: &Path) -> Result<ExitCode> {
    let cfg = load_config(config).context(Stage::Config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let starts: StartsArg = cfg
        .trace
        .starts
        .parse()
        .map_err(|e: String| anyhow!(e).context(Stage::Config))?;

    let mut ws = match (&cfg.mesh.generate, &cfg.mesh.file) {
        (Some(kind), None) => {
            let kind = match kind {
                Generator::Box => GeneratorKind::Box {
                    size: cfg.mesh.size.unwrap_or([8, 8, 8]),
                },
                Generator::Counterexample => GeneratorKind::Counterexample(cfg.mesh.params.unwrap_or_default()),
            };
            Workspace::generate(&kind)?
        }
        (None, Some(file)) => {
            let boundary = cfg
                .mesh
                .boundary
                .as_ref()
                .ok_or_else(|| anyhow!("[mesh] file needs a boundary file").context(Stage::Config))?;
            Workspace::load(&resolve(base, file), Some(&resolve(base, boundary)), None)?
        }
        _ => bail!(anyhow!("[mesh] needs exactly one of `generate` and `file`").context(Stage::Config)),
    };

    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .context(Stage::Output)?;
    ws.relative_to = Some(out_dir.to_path_buf());
    let stages = plan(&cfg.stages, cfg.levelset.mid_gaps);

    let mut report = RunReport::new(ws.manifest());
    report.manifest.stages = stages.iter().map(|s| s.name().to_string()).collect();
    report.mesh = Some(ws.mesh_section());
    if cfg.mesh.generate.is_some() {
        ws.write_mesh(&out_dir.join("mesh.vtk"), &out_dir.join("boundary.json"), &mut report.manifest)?;
    }
    let mut mismatch = false;
    for stage in &stages {
        match stage {
            StageName::Solve => {
                report.solve = Some(ws.solve(cfg.solve.weights, cfg.solve.tolerance, &mut report.manifest)?);
                ws.write_field(&out_dir.join("field.txt"), &mut report.manifest)?;
            }
            StageName::Classify => report.classify = Some(ws.classify()?),
            StageName::Transitions => {
                let policy = cfg.transitions.epsilon.map_or(EpsilonPolicy::MidGap, EpsilonPolicy::Fixed);
                let t = ws.transitions(policy, cfg.transitions.samples)?;
                mismatch = !t.all_matched();
                report.transitions = Some(t);
            }
            StageName::Levelset => {
                report.level_sets = ws.level_sets(
                    &cfg.levelset.values,
                    cfg.levelset.mid_gaps,
                    Some((out_dir, cfg.levelset.format)),
                    &mut report.manifest,
                )?;
            }
            StageName::Trace => {
                let paths = cfg.trace.export_paths.then(|| out_dir.join("traces.obj"));
                report.trace = Some(ws.trace(&starts, paths.as_deref(), false, &mut report.manifest)?);
            }
        }
    }

    let write = |name: &str, text: String| {
        let p = out_dir.join(name);
        std::fs::write(&p, text)
            .with_context(|| format!("writing {}", p.display()))
            .context(Stage::Output)
    };
    write("summary.txt", report.render())?;
    write("run.json", report.to_json())?;
    if mismatch {
        bail!(anyhow!("a transition matches no allowed pattern; see run.json").context(Stage::Transitions));
    }
    Ok(ExitCode::SUCCESS)
}
