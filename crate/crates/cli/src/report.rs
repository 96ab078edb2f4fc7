//! The run report and its plain-text rendering. The summary is computed
//! from the report alone.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use sweeptopo::laplace::{MaxPrincipleReport, ResidualCheck, SolveInfo, WeightScheme};
use sweeptopo::levelset::TransitionAnalysis;
use sweeptopo::morse::{CriticalValue, KindCounts};
use sweeptopo::sweepgen::SweepTopologyReport;
use sweeptopo::tracer::TraceCensus;

use crate::manifest::RunManifest;

pub const SCHEMA: &str = "sweeptopo.run/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub manifest: RunManifest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<TransitionAnalysis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub level_sets: Vec<LevelSetRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshSection {
    pub origin: String,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub tets: usize,
    pub gamma0: Option<usize>,
    pub gamma1: Option<usize>,
    pub topology: Option<SweepTopologyReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSection {
    pub scheme: WeightScheme,
    pub tolerance: f64,
    pub info: SolveInfo,
    pub residual: ResidualCheck,
    pub negative_weights: usize,
    pub scheme_guarantees_positive: bool,
    pub max_principle: MaxPrincipleReport,
    pub range: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifySection {
    pub interior: KindCounts,
    pub boundary: KindCounts,
    pub interior_euler_sum: i64,
    /// Interior critical vertices in ascending order.
    pub critical: Vec<CriticalValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetRow {
    pub label: String,
    pub requested: f64,
    /// The level actually cut, after nudging off vertex values.
    pub level: f64,
    pub nudged: bool,
    pub betti: [usize; 3],
    pub points: usize,
    pub triangles: usize,
    pub surface: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSection {
    pub starts: String,
    pub census: TraceCensus,
    /// `(s, t, u)` per start, `null` for traces that did not reach the base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_parameters: Option<Vec<Option<[f64; 3]>>>,
}

fn triple<T: std::fmt::Display>(t: [T; 3]) -> String {
    format!("({},{},{})", t[0], t[1], t[2])
}

fn signed(d: [i64; 3]) -> String {
    let s = |x: i64| if x > 0 { format!("+{x}") } else { x.to_string() };
    format!("({},{},{})", s(d[0]), s(d[1]), s(d[2]))
}

impl RunReport {
    pub fn new(manifest: RunManifest) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            manifest,
            mesh: None,
            solve: None,
            classify: None,
            transitions: None,
            level_sets: Vec::new(),
            trace: None,
        }
    }

    pub fn check_schema(&self) -> Result<()> {
        if self.schema != SCHEMA {
            bail!("unsupported report schema {:?} (expected {SCHEMA:?})", self.schema);
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise") + "\n"
    }

    fn max_principle_line(&self) -> Option<String> {
        let s = self.solve.as_ref()?;
        let verdict = if s.max_principle.holds() {
            "holds".to_string()
        } else {
            format!("violated at {} vertices", s.max_principle.violations.len())
        };
        let note = if !s.scheme_guarantees_positive && s.negative_weights > 0 {
            format!(" (scheme not guaranteed positive: {} negative weights)", s.negative_weights)
        } else if !s.scheme_guarantees_positive {
            " (scheme not guaranteed positive)".to_string()
        } else {
            String::new()
        };
        Some(format!("maximum principle: {verdict}{note}"))
    }

    pub fn render(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "sweeptopo {} report ({})", self.manifest.tool_version, self.schema);
        if let Some(a) = &self.manifest.input_mesh {
            let _ = writeln!(o, "input mesh: {} sha256:{}", a.path, a.sha256);
        }
        if let Some(m) = &self.mesh {
            let _ = writeln!(
                o,
                "mesh: {}; {} vertices, {} edges, {} faces, {} tets",
                m.origin, m.vertices, m.edges, m.faces, m.tets
            );
            if let (Some(g0), Some(g1)) = (m.gamma0, m.gamma1) {
                let _ = writeln!(o, "boundary sets: gamma0 {g0} vertices, gamma1 {g1} vertices");
            }
        }
        if let Some(s) = &self.solve {
            let _ = writeln!(
                o,
                "solve: {} weights, tolerance {:e}, {} iterations, relative residual {:e}, scaled residual {:e}",
                s.scheme, s.tolerance, s.info.iterations, s.info.relative_residual, s.residual.max_scaled_residual
            );
            let _ = writeln!(o, "field range: [{}, {}]", s.range[0], s.range[1]);
        }
        match (&self.classify, self.max_principle_line()) {
            (Some(c), mp) if c.critical.is_empty() => {
                let _ = match mp {
                    Some(mp) => writeln!(o, "no interior critical points; {mp}"),
                    None => writeln!(o, "no interior critical points"),
                };
            }
            (c, mp) => {
                if let Some(mp) = mp {
                    let _ = writeln!(o, "{mp}");
                }
                if let Some(c) = c {
                    render_census(&mut o, c);
                }
            }
        }
        if !self.level_sets.is_empty() {
            let _ = writeln!(o, "\nlevel sets");
            for r in &self.level_sets {
                let _ = writeln!(o, "  a={}: β={}  (level {}, {} triangles)", r.label, triple(r.betti), r.level, r.triangles);
            }
        }
        if let Some(t) = &self.transitions {
            render_transitions(&mut o, t);
        }
        if let Some(t) = &self.trace {
            let c = &t.census;
            let _ = writeln!(o, "\ntraces from {} ({} starts)", t.starts, c.starts);
            let _ = writeln!(
                o,
                "  reached base {}, stalled at vertex {}, stalled at saddle {}, left domain {}",
                c.counts.reached_base, c.counts.stalled_at_vertex, c.counts.stalled_at_saddle, c.counts.left_domain
            );
            let sep = c.min_separation.map_or("n/a".to_string(), |d| format!("{d:e}"));
            let _ = writeln!(
                o,
                "  merged pairs {} (weld tolerance {:e}); closest base points {sep}",
                c.merged_pairs.len(),
                c.weld_tolerance
            );
            let verdict = if c.shows_non_injectivity() { "not injective" } else { "no merges or saddle stalls" };
            let _ = writeln!(o, "  trace map: {verdict}");
        }
        o
    }
}

fn render_census(o: &mut String, c: &ClassifySection) {
    let _ = writeln!(o, "\ncritical census    interior  boundary");
    let rows = [
        ("minimum", c.interior.minimum, c.boundary.minimum),
        ("1-saddle", c.interior.saddle1, c.boundary.saddle1),
        ("2-saddle", c.interior.saddle2, c.boundary.saddle2),
        ("maximum", c.interior.maximum, c.boundary.maximum),
        ("degenerate", c.interior.degenerate, c.boundary.degenerate),
    ];
    for (name, i, b) in rows {
        let _ = writeln!(o, "  {name:<16} {i:>8}  {b:>8}");
    }
    let _ = writeln!(o, "  interior Euler sum {}", c.interior_euler_sum);
    if !c.critical.is_empty() {
        let _ = writeln!(o, "\ninterior critical values");
        for v in &c.critical {
            let _ = writeln!(o, "  vertex {:>8}  {:<10}  {}", v.vertex, v.kind.name(), v.value);
        }
    }
}

fn render_transitions(o: &mut String, t: &TransitionAnalysis) {
    let _ = writeln!(o, "\ntransitions");
    if t.transitions.is_empty() {
        let _ = writeln!(o, "  none");
    }
    for r in &t.transitions {
        let pattern = match r.pattern {
            Some(p) => serde_json::to_value(p).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            None => "PATTERN MISMATCH".to_string(),
        };
        let _ = writeln!(
            o,
            "  vertex {:>8}  {:<10}  at {}: β {} -> {}  Δβ={}  {pattern}",
            r.vertex,
            r.kind.name(),
            r.value,
            triple(r.betti_below),
            triple(r.betti_above),
            signed(r.delta)
        );
    }
    let _ = writeln!(o, "  net Δβ={}", signed(t.net_delta));
    let constant = if t.all_constant() { "constant" } else { "NOT constant" };
    let _ = writeln!(o, "  topology between critical values: {constant} over {} intervals", t.intervals.len());
}
