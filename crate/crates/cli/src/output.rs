use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gridcast_core::nn::MODEL_FORMAT_VERSION;
use gridcast_core::strategies::ARTIFACT_FORMAT_VERSION;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Collects the files of one run under its output directory.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `name` through a temporary file and a rename.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let target = self.path(name);
        let tmp = self.path(&format!(".{name}.tmp{}", std::process::id()));
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        })();
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::io(&target, e));
        }
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn finish(mut self, command: &str, config: &RunConfig, inputs: &[PathBuf]) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            version: &'a str,
            artifact_format_version: u32,
            model_format_version: u32,
            seed: u64,
            config: &'a RunConfig,
            inputs: &'a [PathBuf],
            outputs: &'a [String],
        }
        let outputs = self.written.clone();
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            artifact_format_version: ARTIFACT_FORMAT_VERSION,
            model_format_version: MODEL_FORMAT_VERSION,
            seed: config.seed(),
            config,
            inputs,
            outputs: &outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Data(e.to_string()))?;
        text.push('\n');
        self.write("manifest.json", text.as_bytes())
    }
}
