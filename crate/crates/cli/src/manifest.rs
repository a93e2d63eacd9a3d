//! The run manifest. It holds no timestamps or paths of the output directory,
//! so identical invocations produce identical bytes.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::Outcome;
use crate::Command;

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    config: &'a Command,
    /// SHA-256 of the compact JSON of `config`.
    config_hash: String,
    ok: bool,
    /// Output file name → SHA-256 of its contents.
    outputs: Vec<(String, String)>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every artifact of `outcome` and then manifest.json into `dir`.
pub fn emit(dir: &Path, cmd: &Command, outcome: Outcome) -> Result<Outcome> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut outputs = Vec::with_capacity(outcome.files.len());
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        outputs.push((name.clone(), sha256_hex(contents.as_bytes())));
    }
    let config = serde_json::to_string(cmd).expect("serializable");
    let manifest = Manifest {
        tool: "polarforge",
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        seed: cmd.seed(),
        config: cmd,
        config_hash: sha256_hex(config.as_bytes()),
        ok: outcome.ok,
        outputs,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, polarforge::io::to_json(&manifest)).with_context(|| format!("writing {}", path.display()))?;
    Ok(outcome)
}
