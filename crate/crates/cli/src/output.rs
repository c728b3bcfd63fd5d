use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::json;

/// Collects the files of one run and writes the manifest last.
pub struct Output {
    dir: PathBuf,
    seed: u64,
    files: Vec<String>,
    summary: serde_json::Map<String, serde_json::Value>,
}

impl Output {
    pub fn new(dir: &Path, seed: u64) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            seed,
            files: Vec::new(),
            summary: Default::default(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn write(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
        self.files.push(name.to_string());
        Ok(())
    }

    /// CSV with a header row and a trailing seed comment.
    pub fn csv(&mut self, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
        let mut body = format!("{header}\n");
        for r in rows {
            body.push_str(&r);
            body.push('\n');
        }
        writeln!(body, "# seed={}", self.seed).unwrap();
        self.write(name, &body)
    }

    /// Adds a key to the manifest's `summary` object.
    pub fn note(&mut self, key: &str, value: serde_json::Value) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn finish(mut self, command: &str, params: serde_json::Value, started: Instant) -> Result<()> {
        let manifest = json!({
            "command": command,
            "params": params,
            "seed": self.seed,
            "outputs": self.files,
            "summary": self.summary,
            "version": env!("CARGO_PKG_VERSION"),
            "git_describe": env!("PERCOLAB_GIT_DESCRIBE"),
            "wall_time_secs": started.elapsed().as_secs_f64(),
        });
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        self.files.clear();
        self.write("manifest.json", &text)
    }
}
