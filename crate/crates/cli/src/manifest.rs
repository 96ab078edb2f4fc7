use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A file and the SHA-256 of its bytes. Paths are stored as given, or
/// relative to the run directory for pipeline outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

impl Artifact {
    pub fn of(path: &Path, recorded: impl Into<String>) -> Result<Self> {
        Ok(Self {
            path: recorded.into(),
            sha256: digest_file(path)?,
        })
    }
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_mesh: Option<Artifact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_field: Option<Artifact>,
    /// `generated <kind>`, or the boundary file with its digest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<String>,
    /// Written artifacts keyed by role, e.g. `field` or `levelset mid-gap`.
    #[serde(default)]
    pub outputs: BTreeMap<String, Artifact>,
}

impl RunManifest {
    pub fn new() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    pub fn record(&mut self, role: impl Into<String>, path: &Path, recorded: impl Into<String>) -> Result<()> {
        self.outputs.insert(role.into(), Artifact::of(path, recorded)?);
        Ok(())
    }

    /// Recomputes every digest. Relative paths resolve against `base` first
    /// and the working directory second.
    pub fn verify(&self, base: &Path) -> Result<()> {
        let all = self
            .input_mesh
            .iter()
            .map(|a| ("input mesh", a))
            .chain(self.input_field.iter().map(|a| ("input field", a)))
            .chain(self.outputs.iter().map(|(k, a)| (k.as_str(), a)));
        for (role, a) in all {
            let p = Path::new(&a.path);
            let p = if p.is_relative() && base.join(p).exists() { base.join(p) } else { p.to_path_buf() };
            let now = digest_file(&p).with_context(|| format!("{role}"))?;
            if now != a.sha256 {
                bail!("{role}: {} has digest {now}, manifest records {}", a.path, a.sha256);
            }
        }
        Ok(())
    }
}
