//! Flag and config-file merging.
//!
//! A config file is a JSON object. Top-level scalar keys apply to every
//! subcommand; an object under the subcommand's name (`"certify": {...}`)
//! overrides them; explicitly passed flags override both.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use hamlow::hamiltonian::WeightDist;
use hamlow::OracleCap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SECTIONS: [&str; 6] = ["gen", "certify", "optimize-depth", "simulate", "table", "sweep"];

pub fn load_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    anyhow::ensure!(value.is_object(), "config {} must be a JSON object", path.display());
    Ok(value)
}

fn strip_unset(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(map) => map.into_iter().filter(|(_, v)| !v.is_null() && *v != Value::Bool(false)).collect(),
        _ => Map::new(),
    }
}

/// Layers the file (shared keys, then the section) under the explicit flags.
pub fn resolve<A: Serialize, C: DeserializeOwned>(file: Option<&Value>, section: &str, flags: &A) -> Result<C> {
    let mut merged = Map::new();
    if let Some(Value::Object(root)) = file {
        for (k, v) in root {
            if !SECTIONS.contains(&k.as_str()) {
                merged.insert(k.clone(), v.clone());
            }
        }
        if let Some(Value::Object(sec)) = root.get(section) {
            merged.extend(sec.clone());
        }
    }
    merged.extend(strip_unset(serde_json::to_value(flags)?));
    serde_json::from_value(Value::Object(merged)).with_context(|| format!("invalid configuration for `{section}`"))
}

/// Where a command's Hamiltonian comes from: a file, or the generator.
#[derive(Debug, Clone, Args, Serialize)]
pub struct InstanceFlags {
    /// Hamiltonian JSON file; when absent an instance is generated from --n/--k/--m/--seed.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Seed for instance generation, optimizer restarts and sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight distribution: pm1 or uniform.
    #[arg(long)]
    pub weights: Option<WeightDist>,
    /// Largest qubit count for dense matrices (default: $HAMLOW_ORACLE_CAP or 14).
    #[arg(long)]
    pub oracle_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn oracle_cap(explicit: Option<usize>) -> Result<OracleCap> {
    match explicit {
        Some(c) => Ok(OracleCap(c)),
        None => Ok(OracleCap::from_env()?),
    }
}
