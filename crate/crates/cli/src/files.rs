//! On-disk formats and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hpaqc_core::PseudoBooleanFunction as Pbf;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// `{"metadata": {...}, "num_vars": n, "terms": [{vars, coeff}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianFile {
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
    pub num_vars: usize,
    pub terms: Pbf,
}

impl HamiltonianFile {
    pub fn new(polynomial: Pbf, num_vars: usize, metadata: BTreeMap<String, Value>) -> Self {
        Self {
            metadata,
            num_vars,
            terms: polynomial,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let file: Self = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let max = file.terms.max_var() as usize;
        if max > file.num_vars {
            return Err(CliError::Invalid(format!(
                "{}: term mentions q{max} but num_vars is {}",
                path.display(),
                file.num_vars
            )));
        }
        Ok(file)
    }

    /// Variable blocks recorded by `build`, if any.
    pub fn residue_blocks(&self) -> Option<Vec<Vec<u32>>> {
        serde_json::from_value(self.metadata.get("residue_blocks")?.clone()).ok()
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // Round-tripping through `Value` sorts every object's keys.
    let v = serde_json::to_value(value).map_err(CliError::Encode)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(CliError::Encode)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &to_json(value)?)
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Written next to every output as `<output>.manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub input_hashes: BTreeMap<String, String>,
    pub output_hashes: BTreeMap<String, String>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[&Path]) -> Result<Self, CliError> {
        let input_hashes = inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
            .collect::<Result<_, CliError>>()?;
        Ok(Self {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            input_hashes,
            output_hashes: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }

    /// Hashes `outputs` and writes one manifest beside each of them.
    pub fn finish(mut self, outputs: &[&Path]) -> Result<(), CliError> {
        for p in outputs {
            self.output_hashes
                .insert(p.display().to_string(), sha256_file(p)?);
        }
        for p in outputs {
            write_json(&manifest_path(p), &self)?;
        }
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

/// `{:.16e}` gives 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}
