use anyhow::Result;
use minplus::dynamics::tent::{tent_fixed_points, tent_growth_rate_exact, tent_monte_carlo};
use num_rational::Rational64;

use super::num;
use crate::config::{TentMode, TentParams};
use crate::exit;
use crate::rundir::RunDir;

pub fn run(p: &TentParams, dir: &mut RunDir) -> Result<i32> {
    let mut summary = String::from("quantity,value\n");
    let fp = tent_fixed_points();
    for pt in &fp.points {
        println!(
            "fixed point y = {} ({})",
            num(pt.y[0]),
            if pt.stable { "stable" } else { "unstable" }
        );
        summary.push_str(&format!("fixed_point,{}\n", num(pt.y[0])));
    }
    if matches!(p.mode, TentMode::Exact | TentMode::All) {
        let y0 = Rational64::new(2, 5);
        match tent_growth_rate_exact(y0, 1000) {
            Some(r) => {
                println!("period-2 growth rate from y0 = {y0}: {r}");
                summary.push_str(&format!("growth_rate_exact,{r}\n"));
            }
            None => println!("no period found from y0 = {y0}"),
        }
    }
    if matches!(p.mode, TentMode::MonteCarlo | TentMode::All) {
        let mc = tent_monte_carlo(p.seed, p.steps, p.denominator);
        println!(
            "Monte Carlo: y0 = {}, {} steps, chi = {}, Kolmogorov distance to uniform {}",
            mc.y0, mc.steps, mc.chi, mc.kolmogorov
        );
        summary.push_str(&format!(
            "y0,{}\nchi_monte_carlo,{}\nkolmogorov,{}\n",
            num(mc.y0),
            num(mc.chi),
            num(mc.kolmogorov)
        ));
        let mut sorted = mc.samples.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut csv = String::from("rank,y,uniform_quantile\n");
        for (i, y) in sorted.iter().enumerate() {
            csv.push_str(&format!("{i},{},{}\n", num(*y), num((i as f64 + 0.5) / n)));
        }
        dir.write("tent_sorted.csv", csv.as_bytes())?;
    }
    dir.write("tent.csv", summary.as_bytes())?;
    Ok(exit::OK)
}
