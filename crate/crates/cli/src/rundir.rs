//! One writer per run directory. The config snapshot goes first.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::{RunConfig, CONFIG_FILE};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "MINPLUS_OUT";
const DEFAULT_ROOT: &str = "runs";
pub const LOG_FILE: &str = "run.log";

pub struct RunDir {
    path: PathBuf,
    log: Vec<String>,
}

/// `<root>/<label>-NNN`, the first number not taken.
fn fresh_dir(root: &Path, label: &str) -> PathBuf {
    (1..)
        .map(|i| root.join(format!("{label}-{i:03}")))
        .find(|p| !p.exists())
        .expect("unbounded counter")
}

pub fn default_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_ROOT))
}

impl RunDir {
    /// Creates the directory and writes `config.json` into it.
    pub fn create(out: Option<&Path>, cfg: &RunConfig) -> Result<Self> {
        let path = match out {
            Some(p) => p.to_path_buf(),
            None => fresh_dir(&default_root(), cfg.params.name()),
        };
        fs::create_dir_all(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut dir = Self { path, log: Vec::new() };
        dir.log(format!("minplus-cli {}", env!("CARGO_PKG_VERSION")));
        dir.write(CONFIG_FILE, cfg.to_json().as_bytes())?;
        Ok(dir)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.path.join(name);
        fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
        self.log(format!("wrote {name} ({} bytes)", bytes.len()));
        Ok(())
    }

    pub fn log(&mut self, line: impl Into<String>) {
        let line = line.into();
        log::info!("{line}");
        self.log.push(line);
    }

    pub fn finish(self) -> Result<PathBuf> {
        let mut text = self.log.join("\n");
        text.push('\n');
        let p = self.path.join(LOG_FILE);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        Ok(self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Params, TentMode, TentParams};

    #[test]
    fn config_first_then_numbered_dirs() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = RunConfig::new(Params::Tent(TentParams {
            mode: TentMode::Exact,
            seed: 0,
            steps: 10,
            denominator: 7,
        }));
        let a = fresh_dir(tmp.path(), "tent");
        let mut dir = RunDir::create(Some(&a), &cfg).unwrap();
        assert!(a.join(CONFIG_FILE).exists());
        dir.write("x.csv", b"a\n").unwrap();
        dir.finish().unwrap();
        let log = fs::read_to_string(a.join(LOG_FILE)).unwrap();
        assert!(log.starts_with("minplus-cli "));
        assert!(log.find("config.json").unwrap() < log.find("x.csv").unwrap());
        assert!(fresh_dir(tmp.path(), "tent").ends_with("tent-002"));
    }
}
