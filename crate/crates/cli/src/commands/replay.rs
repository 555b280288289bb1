use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::{RunConfig, CONFIG_FILE};
use crate::exit;

/// CSV files of a run directory, sorted by name.
fn csv_files(dir: &Path) -> Result<Vec<String>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    Ok(names)
}

/// Reruns `dir` into a fresh directory and lists the CSV files that differ.
pub fn replay(dir: &Path, out: Option<&Path>) -> Result<(Vec<String>, std::path::PathBuf)> {
    let path = dir.join(CONFIG_FILE);
    let text = fs::read_to_string(&path)
        .map_err(|e| exit::InputError(format!("{}: {e}", path.display())))?;
    let cfg = RunConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (_, new_dir) = super::execute_in(cfg.params, out)?;
    let mut differ = Vec::new();
    let old = csv_files(dir)?;
    if old != csv_files(&new_dir)? {
        differ.push("file set".to_string());
    }
    for name in old {
        let a = fs::read(dir.join(&name))?;
        let b = fs::read(new_dir.join(&name)).unwrap_or_default();
        if a != b {
            differ.push(name);
        }
    }
    Ok((differ, new_dir))
}

pub fn run(dir: &Path, out: Option<&Path>) -> Result<i32> {
    let (differ, new_dir) = replay(dir, out)?;
    println!("replayed into {}", new_dir.display());
    if differ.is_empty() {
        println!("all CSV outputs identical");
        Ok(exit::OK)
    } else {
        println!("differences: {}", differ.join(", "));
        Ok(exit::VERIFY)
    }
}
