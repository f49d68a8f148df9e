//! Artifact layout, content digests and run manifests.
//!
//! Everything for one field size lives under `<root>/q<q>/`, where the root
//! comes from `OVALHERD_ARTIFACTS` (default `./artifacts`). Each command
//! writes `<command>.manifest.json` next to its outputs.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use ovalherd::{Fe, FieldCtx};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const ROOT_ENV: &str = "OVALHERD_ARTIFACTS";

pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn new(root: &Path, q: usize) -> io::Result<Self> {
        let dir = root.join(format!("q{q}"));
        fs::create_dir_all(&dir)?;
        Ok(Artifacts { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn manifest_path(&self, command: &str) -> PathBuf {
        self.path(&format!("{command}.manifest.json"))
    }

    pub fn checkpoint_dir(&self, command: &str) -> PathBuf {
        self.dir.join("checkpoints").join(command)
    }
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut f = File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

pub fn sha256_bytes(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// User plus system CPU seconds of this process, from /proc (Linux only).
fn cpu_seconds() -> Option<f64> {
    let stat = fs::read_to_string("/proc/self/stat").ok()?;
    // fields after the parenthesised command name; utime and stime are 14 and 15
    let rest = &stat[stat.rfind(')')? + 1..];
    let f: Vec<&str> = rest.split_whitespace().collect();
    let ticks: f64 = f.get(11)?.parse::<f64>().ok()? + f.get(12)?.parse::<f64>().ok()?;
    Some(ticks / 100.0)
}

pub struct RunManifest {
    command: String,
    q: usize,
    poly: u32,
    kappa: Option<Fe>,
    workers: usize,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
    counters: BTreeMap<String, u64>,
    started: Instant,
}

impl RunManifest {
    pub fn new(command: &str, ctx: &FieldCtx, workers: usize) -> Self {
        RunManifest {
            command: command.into(),
            q: ctx.q(),
            poly: ctx.reduction_poly(),
            kappa: None,
            workers,
            inputs: Vec::new(),
            outputs: Vec::new(),
            counters: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn kappa(&mut self, k: Fe) {
        self.kappa = Some(k);
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push((path.display().to_string(), sha256_file(path)?));
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<String, CliError> {
        let d = sha256_file(path)?;
        self.outputs.push((path.display().to_string(), d.clone()));
        Ok(d)
    }

    pub fn counter(&mut self, name: &str, v: u64) {
        self.counters.insert(name.into(), v);
    }

    pub fn to_json(&self) -> Value {
        let files = |v: &[(String, String)]| {
            v.iter()
                .map(|(p, d)| json!({ "path": p, "sha256": d }))
                .collect::<Vec<_>>()
        };
        json!({
            "command": self.command,
            "q": self.q,
            "reduction_poly": format!("{:x}", self.poly),
            "kappa": self.kappa.map(|k| format!("{k:x}")),
            "inputs": files(&self.inputs),
            "outputs": files(&self.outputs),
            "counters": self.counters,
            "workers": self.workers,
            "wall_seconds": self.started.elapsed().as_secs_f64(),
            "cpu_seconds": cpu_seconds(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("manifest serializes");
        fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// The first output path recorded in a manifest.
pub fn manifest_output(path: &Path) -> Result<PathBuf, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad manifest {}: {e}", path.display())))?;
    v["outputs"][0]["path"]
        .as_str()
        .map(PathBuf::from)
        .ok_or_else(|| CliError::Usage(format!("manifest {} lists no outputs", path.display())))
}
