use anyhow::Result;
use minplus::traffic::{junction_lambda_exact, marking_from_density, table_pair, Phase};

use super::num;
use crate::config::VerifyParams;
use crate::exit;
use crate::rundir::RunDir;

const HEADER: &str = "d,phase,lambda,max_residual,worst_cell,verdict,recession_table,recession_alt";

struct Row {
    d: f64,
    phase: Phase,
    lambda: f64,
    residual: f64,
    worst: usize,
    pass: bool,
    recession: Option<(bool, bool)>,
}

fn rows(p: &VerifyParams) -> Result<Vec<Row>> {
    let mut out = Vec::new();
    for &d in &p.densities {
        let cfg = marking_from_density(p.n, p.m, d, p.placement, p.seed)?;
        let lam = junction_lambda_exact(&cfg)?;
        let rec = lam.recession.as_ref().map(|r| (r.table_pass, r.alt_pass));
        for &(phase, l) in &lam.candidates {
            let l = l + p.lambda_offset;
            let (residual, worst, lambda_ok) = match table_pair(&cfg, phase, l) {
                Ok(pair) => (pair.report.max_residual, pair.report.worst_cell, pair.report.lambda_ok),
                Err(_) => (f64::INFINITY, 0, false),
            };
            out.push(Row {
                d,
                phase,
                lambda: l,
                residual,
                worst,
                pass: lambda_ok && residual < p.tolerance,
                recession: if phase == Phase::Recession { rec } else { None },
            });
        }
    }
    Ok(out)
}

pub fn run(p: &VerifyParams, dir: &mut RunDir) -> Result<i32> {
    let rows = rows(p)?;
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut csv = format!("{HEADER}\n");
    println!("{:>8} {:>10} {:>12} {:>12} {:>4} verdict", "d", "phase", "lambda", "residual", "cell");
    for r in &rows {
        let (t, a) = match r.recession {
            Some((t, a)) => (verdict(t), verdict(a)),
            None => ("", ""),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{t},{a}\n",
            num(r.d),
            r.phase,
            num(r.lambda),
            num(r.residual),
            r.worst,
            verdict(r.pass)
        ));
        let extra = match r.recession {
            Some(_) => format!(" (table formula {t}, alternative {a})"),
            None => String::new(),
        };
        println!(
            "{:>8.4} {:>10} {:>12.6} {:>12.3e} {:>4} {}{extra}",
            r.d,
            r.phase.label(),
            r.lambda,
            r.residual,
            r.worst,
            verdict(r.pass)
        );
    }
    dir.write("verify.csv", csv.as_bytes())?;
    let failed: Vec<&Row> = rows.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL: n={} m={} d={} phase {} λ={} residual {:e}", p.n, p.m, r.d, r.phase, r.lambda, r.residual);
    }
    dir.log(format!("{} rows, {} failed", rows.len(), failed.len()));
    Ok(if failed.is_empty() { exit::OK } else { exit::VERIFY })
}
