use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::Failure;

/// Written beside every command's outputs. Contains no timestamps or
/// absolute output paths, so identical invocations give identical bytes.
#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub config: C,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    /// File names inside the output directory.
    pub outputs: Vec<String>,
}

/// Collects output files for one command run.
pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::Invariant(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn finish<C: Serialize>(
        mut self,
        command: &'static str,
        config: C,
        seed: Option<u64>,
        inputs: &[&Path],
    ) -> Result<(), Failure> {
        let manifest = RunManifest {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            seed,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            outputs: self.written.clone(),
        };
        self.write_json("manifest.json", &manifest)
    }
}
