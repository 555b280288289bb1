use anyhow::Result;
use minplus::traffic::{diagram_sweep, to_csv, to_svg, SimParams};

use crate::config::DiagramParams;
use crate::exit;
use crate::rundir::RunDir;

pub fn run(p: &DiagramParams, dir: &mut RunDir) -> Result<i32> {
    let params = SimParams {
        k0: p.burn_in,
        k: p.horizon,
        seed: p.seed,
        placement: p.placement,
    };
    let points = diagram_sweep(p.n, p.m, &p.densities, params);
    let failed: Vec<_> = points.iter().filter(|pt| pt.error.is_some()).collect();
    for pt in &failed {
        dir.log(format!("d={}: {}", pt.d, pt.error.as_deref().unwrap_or_default()));
    }
    dir.write("diagram.csv", to_csv(&points).as_bytes())?;
    if p.svg {
        dir.write("diagram.svg", to_svg(&points).as_bytes())?;
    }
    println!("{} points, {} failed", points.len(), failed.len());
    // nonzero only when more than a tenth of the points fail
    Ok(if failed.len() * 10 > points.len() { exit::VERIFY } else { exit::OK })
}
