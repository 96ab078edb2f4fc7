//! The work behind each subcommand, shared with the pipeline.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use sweeptopo::io::{self, obj, vtk};
use sweeptopo::laplace::{check_max_principle, compute_weights, residual_check, solve_sweep_with_info, SweepBoundary, WeightScheme};
use sweeptopo::levelset::{analyze_transitions, extract_level_set, EpsilonPolicy, TransitionAnalysis};
use sweeptopo::morse::{classify_all, critical_values, CriticalReport, Location};
use sweeptopo::sweepgen::{generate_box, generate_counterexample, validate_sweep_topology, SweepParams};
use sweeptopo::tracer::{census_of, compute_gradients, trace_all, StartSpec, TraceOptions};
use sweeptopo::{ScalarField, TetMesh, TieBreakField};

use crate::manifest::{Artifact, RunManifest};
use crate::report::{ClassifySection, LevelSetRow, MeshSection, SolveSection, TraceSection};

/// Where an error arose. Attached as context; `main` maps it to the exit
/// status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Config,
    Input,
    Generate,
    Solve,
    Transitions,
    LevelSet,
    Trace,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Input => "input",
            Stage::Generate => "generate",
            Stage::Solve => "solve",
            Stage::Transitions => "transitions",
            Stage::LevelSet => "levelset",
            Stage::Trace => "trace",
            Stage::Output => "output",
        }
    }

    /// 2 for bad usage or unreadable input, 1 for everything else.
    pub fn exit_code(self) -> u8 {
        match self {
            Stage::Config | Stage::Input => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}", self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    Box { size: [usize; 3] },
    Counterexample(SweepParams),
}

impl GeneratorKind {
    fn describe(&self) -> String {
        match self {
            GeneratorKind::Box { size: [x, y, z] } => format!("generated box {x}x{y}x{z}"),
            GeneratorKind::Counterexample(p) => format!("generated counterexample n={} nz={}", p.n, p.nz),
        }
    }
}

/// `vertices`, or `grid NxM` (also `grid:NxM`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StartsArg(pub StartSpec);

impl FromStr for StartsArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "vertices" {
            return Ok(StartsArg(StartSpec::Gamma1Vertices));
        }
        let dims = s
            .strip_prefix("grid")
            .map(|r| r.trim_start_matches([' ', ':']))
            .ok_or_else(|| format!("expected `vertices` or `grid NxM`, found {s:?}"))?;
        let (a, b) = dims.split_once('x').ok_or_else(|| format!("expected NxM after `grid`, found {dims:?}"))?;
        let parse = |t: &str| t.trim().parse::<usize>().ok().filter(|&n| n > 0);
        match (parse(a), parse(b)) {
            (Some(nx), Some(ny)) => Ok(StartsArg(StartSpec::Grid { nx, ny })),
            _ => Err(format!("grid sizes must be positive integers, found {dims:?}")),
        }
    }
}

impl fmt::Display for StartsArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            StartSpec::Gamma1Vertices => f.write_str("vertices"),
            StartSpec::Grid { nx, ny } => write!(f, "grid {nx}x{ny}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceFormat {
    #[default]
    Obj,
    Vtk,
}

impl SurfaceFormat {
    fn ext(self) -> &'static str {
        match self {
            SurfaceFormat::Obj => "obj",
            SurfaceFormat::Vtk => "vtk",
        }
    }
}

#[derive(Deserialize)]
struct BoundaryFile {
    gamma0: Vec<usize>,
    gamma1: Vec<usize>,
}

/// A mesh with whatever has been computed on it so far.
pub struct Workspace {
    mesh: TetMesh,
    bc: Option<SweepBoundary>,
    field: Option<ScalarField>,
    origin: String,
    topology: Option<sweeptopo::sweepgen::SweepTopologyReport>,
    seed: RunManifest,
    critical: Option<CriticalReport>,
    /// Recorded output paths are made relative to this directory.
    pub relative_to: Option<PathBuf>,
}

impl Workspace {
    pub fn generate(kind: &GeneratorKind) -> Result<Self> {
        let (mesh, bc) = match kind {
            GeneratorKind::Box { size: [x, y, z] } => generate_box(*x, *y, *z),
            GeneratorKind::Counterexample(p) => generate_counterexample(p),
        }
        .context(Stage::Generate)?;
        let topology = validate_sweep_topology(&mesh, &bc).context(Stage::Generate)?;
        let mut seed = RunManifest::new();
        seed.boundary_source = Some(kind.describe());
        Ok(Self {
            mesh,
            bc: Some(bc),
            field: None,
            origin: kind.describe(),
            topology: Some(topology),
            seed,
            critical: None,
            relative_to: None,
        })
    }

    /// Reads a mesh, optionally a boundary file and a field. A VTK mesh's
    /// point scalars stand in for a missing field file.
    pub fn load(mesh_path: &Path, boundary: Option<&Path>, field: Option<&Path>) -> Result<Self> {
        let (mesh, scalars) = io::read_mesh(mesh_path)
            .with_context(|| format!("reading mesh {}", mesh_path.display()))
            .context(Stage::Input)?;
        let mut seed = RunManifest::new();
        seed.input_mesh = Some(Artifact::of(mesh_path, mesh_path.display().to_string()).context(Stage::Input)?);
        let bc = match boundary {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading boundary {}", p.display()))
                    .context(Stage::Input)?;
                let raw: BoundaryFile = serde_json::from_str(&text)
                    .with_context(|| format!("parsing boundary {}", p.display()))
                    .context(Stage::Input)?;
                let bc = SweepBoundary::checked(&mesh, raw.gamma0, raw.gamma1)
                    .with_context(|| format!("boundary {}", p.display()))
                    .context(Stage::Input)?;
                let a = Artifact::of(p, p.display().to_string()).context(Stage::Input)?;
                seed.boundary_source = Some(format!("{} sha256:{}", a.path, a.sha256));
                Some(bc)
            }
            None => None,
        };
        let field = match field {
            Some(p) => {
                let f = io::read_field(p)
                    .with_context(|| format!("reading field {}", p.display()))
                    .context(Stage::Input)?;
                seed.input_field = Some(Artifact::of(p, p.display().to_string()).context(Stage::Input)?);
                Some(f)
            }
            None => scalars,
        };
        if let Some(f) = &field {
            if f.len() != mesh.num_vertices() || !f.all_finite() {
                return Err(anyhow!(
                    "field has {} values for {} vertices, or is not finite",
                    f.len(),
                    mesh.num_vertices()
                )
                .context(Stage::Input));
            }
        }
        Ok(Self {
            mesh,
            bc,
            field,
            origin: format!("file {}", mesh_path.display()),
            topology: None,
            seed,
            critical: None,
            relative_to: None,
        })
    }

    pub fn manifest(&self) -> RunManifest {
        self.seed.clone()
    }

    pub fn mesh_section(&self) -> MeshSection {
        MeshSection {
            origin: self.origin.clone(),
            vertices: self.mesh.num_vertices(),
            edges: self.mesh.num_edges(),
            faces: self.mesh.num_faces(),
            tets: self.mesh.num_tets(),
            gamma0: self.bc.as_ref().map(|b| b.gamma0().len()),
            gamma1: self.bc.as_ref().map(|b| b.gamma1().len()),
            topology: self.topology.clone(),
        }
    }

    fn recorded(&self, path: &Path) -> String {
        let rel = match &self.relative_to {
            Some(base) => path.strip_prefix(base).unwrap_or(path),
            None => path,
        };
        rel.display().to_string()
    }

    fn record(&self, manifest: &mut RunManifest, role: &str, path: &Path) -> Result<()> {
        manifest.record(role, path, self.recorded(path)).context(Stage::Output)
    }

    fn field(&self) -> Result<&ScalarField> {
        self.field.as_ref().ok_or_else(|| anyhow!("no field: solve first or pass --field").context(Stage::Input))
    }

    fn boundary(&self) -> Result<&SweepBoundary> {
        self.bc.as_ref().ok_or_else(|| anyhow!("no boundary sets: pass --boundary").context(Stage::Input))
    }

    /// Writes the mesh (with the field as VTK scalars when present) and the
    /// boundary sets, and makes the mesh the run's input.
    pub fn write_mesh(&mut self, mesh: &Path, boundary: &Path, manifest: &mut RunManifest) -> Result<()> {
        io::write_mesh(mesh, &self.mesh, self.field.as_ref())
            .with_context(|| format!("writing {}", mesh.display()))
            .context(Stage::Output)?;
        let bc = self.boundary()?;
        let json = serde_json::to_string(bc)? + "\n";
        std::fs::write(boundary, json)
            .with_context(|| format!("writing {}", boundary.display()))
            .context(Stage::Output)?;
        manifest.input_mesh = Some(Artifact::of(mesh, self.recorded(mesh)).context(Stage::Output)?);
        self.record(manifest, "boundary", boundary)?;
        self.seed.input_mesh = manifest.input_mesh.clone();
        Ok(())
    }

    pub fn write_field(&self, path: &Path, manifest: &mut RunManifest) -> Result<()> {
        io::write_field(path, self.field()?)
            .with_context(|| format!("writing {}", path.display()))
            .context(Stage::Output)?;
        self.record(manifest, "field", path)
    }

    pub fn solve(&mut self, scheme: WeightScheme, tolerance: f64, manifest: &mut RunManifest) -> Result<SolveSection> {
        let bc = self.boundary()?.clone();
        let w = compute_weights(&self.mesh, scheme).context(Stage::Solve)?;
        let (f, info) = solve_sweep_with_info(&self.mesh, &w, &bc, tolerance).context(Stage::Solve)?;
        let residual = residual_check(&self.mesh, &w, &bc, &f);
        let max_principle = check_max_principle(&self.mesh, &f, &bc);
        let range = f.range().map(|(a, b)| [a, b]).unwrap_or([0.0, 0.0]);
        manifest.weight_scheme = Some(scheme.name().to_string());
        manifest.tolerance = Some(tolerance);
        self.field = Some(f);
        self.critical = None;
        Ok(SolveSection {
            scheme,
            tolerance,
            info,
            residual,
            negative_weights: w.values().iter().filter(|&&x| x < 0.0).count(),
            scheme_guarantees_positive: scheme.guarantees_positive(),
            max_principle,
            range,
        })
    }

    fn critical_report(&mut self) -> Result<&CriticalReport> {
        if self.critical.is_none() {
            let f: TieBreakField = self.field()?.clone().into();
            self.critical = Some(classify_all(&self.mesh, &f));
        }
        Ok(self.critical.as_ref().expect("just computed"))
    }

    pub fn classify(&mut self) -> Result<ClassifySection> {
        let r = self.critical_report()?;
        Ok(ClassifySection {
            interior: r.counts(Location::Interior),
            boundary: r.counts(Location::Boundary),
            interior_euler_sum: r.interior_euler_sum(),
            critical: critical_values(r),
        })
    }

    pub fn transitions(&mut self, policy: EpsilonPolicy, samples: usize) -> Result<TransitionAnalysis> {
        if samples == 0 {
            bail!(anyhow!("need at least one sample per interval").context(Stage::Config));
        }
        let f: TieBreakField = self.field()?.clone().into();
        self.critical_report()?;
        let report = self.critical.as_ref().expect("classified above");
        analyze_transitions(&self.mesh, &f, report, policy, samples).context(Stage::Transitions)
    }

    /// Level sets at `values`, plus the midpoint of every gap between
    /// consecutive interior critical values when `mid_gap` is set.
    pub fn level_sets(
        &mut self,
        values: &[f64],
        mid_gap: bool,
        export: Option<(&Path, SurfaceFormat)>,
        manifest: &mut RunManifest,
    ) -> Result<Vec<LevelSetRow>> {
        let mut wanted: Vec<(String, f64)> = values.iter().map(|&a| (format!("{a}"), a)).collect();
        if mid_gap {
            let cv: Vec<f64> = critical_values(self.critical_report()?).iter().map(|c| c.value).collect();
            let gaps: Vec<f64> = cv.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            for (i, &a) in gaps.iter().enumerate() {
                let label = if gaps.len() == 1 { "mid-gap".to_string() } else { format!("mid-gap {}", i + 1) };
                wanted.push((label, a));
            }
        }
        if let Some((dir, _)) = export {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))
                .context(Stage::Output)?;
        }
        let field = self.field()?;
        let mut rows = Vec::with_capacity(wanted.len());
        for (label, a) in wanted {
            let s = extract_level_set(&self.mesh, field, a)
                .with_context(|| format!("level {label}"))
                .context(Stage::LevelSet)?;
            let surface = match export {
                Some((dir, format)) => {
                    let path = dir.join(format!("levelset-{}.{}", label.replace(' ', "-"), format.ext()));
                    write_with(&path, |w| match format {
                        SurfaceFormat::Obj => obj::write_triangles(w, &s.points, &s.triangles),
                        SurfaceFormat::Vtk => vtk::write_polydata(w, &s.points, &s.triangles, &[]),
                    })?;
                    self.record(manifest, &format!("levelset {label}"), &path)?;
                    Some(self.recorded(&path))
                }
                None => None,
            };
            rows.push(LevelSetRow {
                betti: s.betti().surface_triple(),
                label,
                requested: a,
                level: s.level,
                nudged: s.nudged,
                points: s.points.len(),
                triangles: s.triangles.len(),
                surface,
            });
        }
        Ok(rows)
    }

    pub fn trace(
        &mut self,
        starts: &StartsArg,
        paths: Option<&Path>,
        box_parameters: bool,
        manifest: &mut RunManifest,
    ) -> Result<TraceSection> {
        let bc = self.boundary()?;
        let field = self.field()?;
        let grads = compute_gradients(&self.mesh, field).context(Stage::Trace)?;
        let opts = TraceOptions::default();
        let list = starts.0.starts(&self.mesh, bc);
        let traced = trace_all(&self.mesh, field, &grads, &list, opts);
        let census = census_of(&self.mesh, &traced, opts);
        if let Some(p) = paths {
            let lines: Vec<_> = traced.iter().map(|t| t.points.clone()).collect();
            write_with(p, |w| obj::write_polylines(w, &lines))?;
            self.record(manifest, "traces", p)?;
        }
        Ok(TraceSection {
            starts: starts.to_string(),
            census,
            box_parameters: box_parameters.then(|| traced.iter().map(|t| t.box_parameters()).collect()),
        })
    }
}

fn write_with(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let go = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        body(&mut w)?;
        w.flush()
    };
    go().with_context(|| format!("writing {}", path.display())).context(Stage::Output)
}
