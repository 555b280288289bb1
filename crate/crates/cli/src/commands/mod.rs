pub mod compose;
pub mod diagram;
pub mod eigen;
pub mod replay;
pub mod simulate;
pub mod tent;
pub mod verify;

use std::path::{Path, PathBuf};

use anyhow::Result;

use crate::config::{Params, RunConfig};
use crate::rundir::RunDir;

/// Writes the config snapshot, runs, and closes the log. Returns the exit
/// code and the run directory.
pub fn execute_in(params: Params, out: Option<&Path>) -> Result<(i32, PathBuf)> {
    let cfg = RunConfig::new(params);
    let mut dir = RunDir::create(out, &cfg)?;
    let code = match &cfg.params {
        Params::Diagram(p) => diagram::run(p, &mut dir),
        Params::Verify(p) => verify::run(p, &mut dir),
        Params::Simulate(p) => simulate::run(p, &mut dir),
        Params::Tent(p) => tent::run(p, &mut dir),
        Params::Compose(p) => compose::run(p, &mut dir),
    };
    match code {
        Ok(c) => {
            dir.log(format!("exit code {c}"));
            Ok((c, dir.finish()?))
        }
        Err(e) => {
            dir.log(format!("error: {e:#}"));
            dir.finish()?;
            Err(e)
        }
    }
}

pub fn execute(params: Params, out: Option<&Path>) -> Result<i32> {
    let (code, path) = execute_in(params, out)?;
    println!("run directory: {}", path.display());
    Ok(code)
}

/// Shortest roundtrip form; `-0` prints as `0`.
pub fn num(x: f64) -> String {
    format!("{}", x + 0.0)
}
