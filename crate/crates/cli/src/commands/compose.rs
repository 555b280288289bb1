use anyhow::{bail, Result};
use minplus::compose::SystemDyn;
use minplus::ExtendedReal;

use crate::config::{ComposeOp, ComposeParams};
use crate::exit;
use crate::rundir::RunDir;

pub fn composite(p: &ComposeParams) -> Result<SystemDyn> {
    let systems = p
        .systems
        .iter()
        .map(|t| SystemDyn::parse_text(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match (p.op, systems.as_slice()) {
        (ComposeOp::Series, [s1, s2]) => SystemDyn::series(s1, s2)?,
        (ComposeOp::Parallel, [s1, s2]) => SystemDyn::parallel(s1, s2)?,
        (ComposeOp::Feedback, [s]) => SystemDyn::feedback(s)?,
        (op, s) => bail!(crate::exit::InputError(format!("{op:?} takes {} system(s), got {}", if op == ComposeOp::Feedback { 1 } else { 2 }, s.len()))),
    })
}

pub fn run(p: &ComposeParams, dir: &mut RunDir) -> Result<i32> {
    let sys = composite(p)?;
    let inputs: Vec<Vec<ExtendedReal>> = p
        .inputs
        .iter()
        .map(|r| r.iter().map(|&x| ExtendedReal::from(x)).collect())
        .collect();
    let trace = sys.simulate(&inputs)?;
    let width = sys.output_kinds().len();
    let mut csv = String::from("k");
    for i in 1..=width {
        csv.push_str(&format!(",y{i}"));
    }
    csv.push('\n');
    for (k, y) in trace.outputs.iter().enumerate() {
        csv.push_str(&(k + 1).to_string());
        for v in y {
            csv.push_str(&format!(",{v}"));
        }
        csv.push('\n');
    }
    dir.write("composite.txt", sys.to_string().as_bytes())?;
    dir.write("outputs.csv", csv.as_bytes())?;
    println!(
        "{} states, {} inputs, {} outputs, {} steps, homogeneous: {}",
        sys.state_count(),
        sys.input_kinds().len(),
        width,
        trace.outputs.len(),
        sys.is_homogeneous()
    );
    Ok(exit::OK)
}
