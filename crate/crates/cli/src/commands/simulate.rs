use anyhow::{Context, Result};
use minplus::petri::models::{circular_road, junction};
use minplus::petri::{max_residual, NetState, PetriNet};
use minplus::traffic::{marking_from_density, occupancy, parse_word};

use super::num;
use crate::config::{Model, SimulateParams};
use crate::exit;
use crate::rundir::RunDir;

pub fn build(model: &Model) -> Result<PetriNet> {
    Ok(match model {
        Model::Net { spec } => PetriNet::from_spec(spec)?,
        Model::Road { word } => circular_road(&occupancy(&parse_word(word)?)),
        Model::Junction {
            n,
            m,
            density,
            placement,
            seed,
        } => {
            let cfg = marking_from_density(*n, *m, *density, *placement, *seed)?;
            junction(*n, *m, &cfg.a)?
        }
    })
}

/// `k, Q_1..Q_T, flow` where flow is the mean firing increment of the step.
pub fn trajectory_csv(net: &PetriNet, states: &[NetState]) -> String {
    let t = net.transition_count();
    let mut out = String::from("k");
    for name in net.transition_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",flow\n");
    for (k, s) in states.iter().enumerate() {
        out.push_str(&k.to_string());
        for q in &s.q {
            out.push(',');
            out.push_str(&num(*q));
        }
        out.push(',');
        if k > 0 {
            let inc: f64 = s.q.iter().zip(&states[k - 1].q).map(|(a, b)| a - b).sum();
            out.push_str(&num(inc / t as f64));
        }
        out.push('\n');
    }
    out
}

pub fn run(p: &SimulateParams, dir: &mut RunDir) -> Result<i32> {
    let net = build(&p.model)?;
    let states = net.simulate(&NetState::zero(&net), p.steps).context("simulating")?;
    let qs: Vec<Vec<f64>> = states.iter().map(|s| s.q.clone()).collect();
    let residual = max_residual(&net.constraint_residual(&qs));
    dir.write("trajectory.csv", trajectory_csv(&net, &states).as_bytes())?;
    dir.log(format!("constraint residual {residual:e}"));
    println!(
        "{} transitions, {} places, {} steps, constraint residual {residual:e}",
        net.transition_count(),
        net.place_count(),
        p.steps
    );
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn road_flow_column() {
        let net = build(&Model::Road { word: "1100".into() }).unwrap();
        let states = net.simulate(&NetState::zero(&net), 40).unwrap();
        let csv = trajectory_csv(&net, &states);
        let last = csv.lines().last().unwrap();
        assert!(last.ends_with(",0.5"), "{last}");
        assert!(csv.starts_with("k,q1,q2,q3,q4,flow\n0,0,0,0,0,\n"));
    }
}
