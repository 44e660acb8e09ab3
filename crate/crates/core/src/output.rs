//! Output directories, atomic file writes and run manifests.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "BUOYLINK_OUT";
pub const DEFAULT_OUTPUT_DIR: &str = "buoylink-out";

/// A directory known to be writable.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    /// Creates `root` if needed and proves it is writable.
    pub fn prepare(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| io_context(e, &root, "cannot create output directory"))?;
        tempfile::NamedTempFile::new_in(&root).map_err(|e| io_context(e, &root, "output directory is not writable"))?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn join(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `name` via a temporary sibling and a rename.
    pub fn write(&self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let target = self.root.join(name);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        let dir = target.parent().unwrap_or(&self.root);
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(contents)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| io_context(e.error, &target, "rename failed"))?;
        Ok(target)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn io_context(e: std::io::Error, path: &Path, what: &str) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{what}: {}: {e}", path.display())))
}

/// Output directory: explicit flag, then the scenario's own, then the
/// environment, then `./buoylink-out`.
pub fn resolve_output_dir(flag: Option<&Path>, scenario: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| scenario.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Builds CSV text. Floats use Rust's shortest round-trip formatting.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[&dyn Display]) {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(&c.to_string());
        }
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Empty cell for undefined values.
pub struct Opt(pub Option<f64>);

impl Display for Opt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub wall_time_s: f64,
    pub finished_unix_s: u64,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config,
            files: Vec::new(),
            wall_time_s: 0.0,
            finished_unix_s: 0,
        }
    }

    pub fn finish(mut self, dir: &OutputDir, files: &[PathBuf], started: std::time::Instant) -> Result<PathBuf> {
        self.files = files
            .iter()
            .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()))
            .collect();
        self.wall_time_s = started.elapsed().as_secs_f64();
        self.finished_unix_s =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        dir.write_json("manifest.json", &self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temp_files() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = OutputDir::prepare(tmp.path().join("a/b")).unwrap();
        dir.write("x.txt", b"one").unwrap();
        dir.write("x.txt", b"two").unwrap();
        assert_eq!(fs::read_to_string(dir.join("x.txt")).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn csv_formatting() {
        let mut c = Csv::new(&["a", "b", "c"]);
        c.row(&[&0.1, &3u64, &Opt(None)]);
        c.row(&[&(0.1 + 0.2), &60.0, &Opt(Some(1.5))]);
        assert_eq!(c.as_str(), "a,b,c\n0.1,3,\n0.30000000000000004,60,1.5\n");
    }

    #[test]
    fn flag_beats_scenario() {
        let p = resolve_output_dir(Some(Path::new("x")), Some(Path::new("y")));
        assert_eq!(p, PathBuf::from("x"));
        assert_eq!(resolve_output_dir(None, Some(Path::new("y"))), PathBuf::from("y"));
    }
}
