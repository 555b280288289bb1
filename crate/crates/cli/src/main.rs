mod commands;
mod config;
mod exit;
mod rundir;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use minplus::traffic::{density_grid, Placement, SimParams};

use config::{ComposeOp, ComposeParams, DiagramParams, Model, Params, SimulateParams, TentMode, TentParams, VerifyParams};
use exit::InputError;

/// Minplus eigenvalues, Petri net trajectories and junction traffic diagrams.
#[derive(Parser)]
#[command(name = "minplus", version)]
struct Cli {
    /// Run directory. Defaults to a fresh numbered directory under $MINPLUS_OUT (or ./runs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalue, witness cycle and eigenvector of a minplus matrix file.
    Eigen { file: PathBuf },
    /// Fundamental diagram sweep of the junction.
    Diagram(DiagramArgs),
    /// Eigenpair residual check over a density grid.
    Verify(VerifyArgs),
    /// Trajectory of a Petri net.
    Simulate(SimulateArgs),
    /// Fixed points and growth rates of the tent system.
    Tent(TentArgs),
    /// Compose systems and run them on an input stream.
    Compose(ComposeArgs),
    /// Rerun a run directory and compare its CSV outputs byte for byte.
    Replay { dir: PathBuf },
}

#[derive(Args)]
struct Junction {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Explicit densities, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "density_grid")]
    density: Vec<f64>,
    /// Number of evenly spaced densities on [0, 1].
    #[arg(long)]
    density_grid: Option<usize>,
    #[arg(long, default_value_t = Placement::Even)]
    placement: Placement,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Junction {
    fn densities(&self, default_points: usize) -> Vec<f64> {
        if !self.density.is_empty() {
            self.density.clone()
        } else {
            density_grid(self.density_grid.unwrap_or(default_points))
        }
    }
}

#[derive(Args)]
struct DiagramArgs {
    #[command(flatten)]
    junction: Junction,
    /// Burn-in K0; defaults to 200·N.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Horizon K; defaults to 2000·N.
    #[arg(long)]
    horizon: Option<usize>,
    /// Also write diagram.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    junction: Junction,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Shift added to every candidate λ (a deliberately wrong λ must fail).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda_offset: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Net description in JSON.
    #[arg(long, conflicts_with_all = ["road", "junction"])]
    net: Option<PathBuf>,
    /// Circular road given by an occupancy word such as 1101001001.
    #[arg(long, conflicts_with = "junction")]
    road: Option<String>,
    /// Junction net `n,m,d`.
    #[arg(long)]
    junction: Option<String>,
    #[arg(long, default_value_t = Placement::Even)]
    placement: Placement,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

#[derive(Args)]
struct TentArgs {
    #[arg(long, value_enum, default_value_t = TentMode::All)]
    mode: TentMode,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    steps: usize,
    /// Lattice denominator of the Monte Carlo start.
    #[arg(long, default_value_t = 1_000_003)]
    denominator: i64,
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(value_enum)]
    op: ComposeOp,
    /// System files; `series A B` runs A after B.
    #[arg(required = true, num_args = 1..=2)]
    systems: Vec<PathBuf>,
    /// Input stream CSV with a header row and one column per input.
    #[arg(long, conflicts_with = "steps")]
    inputs: Option<PathBuf>,
    /// Run this many steps with all inputs at 0.
    #[arg(long)]
    steps: Option<usize>,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
        .with_context(|| format!("reading {}", path.display()))
}

fn input_stream(path: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let text = read(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|t| t.trim().parse::<f64>().map_err(|e| InputError(format!("`{t}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{}", path.display()))?;
        rows.push(row);
    }
    Ok(rows)
}

fn params(cmd: Cmd) -> Result<Params> {
    Ok(match cmd {
        Cmd::Diagram(a) => {
            let j = &a.junction;
            let d = SimParams::defaults(j.n, j.m);
            Params::Diagram(DiagramParams {
                n: j.n,
                m: j.m,
                densities: j.densities(101),
                burn_in: a.burn_in.unwrap_or(d.k0),
                horizon: a.horizon.unwrap_or(d.k),
                seed: j.seed,
                placement: j.placement,
                svg: a.svg,
            })
        }
        Cmd::Verify(a) => {
            let j = &a.junction;
            Params::Verify(VerifyParams {
                n: j.n,
                m: j.m,
                densities: j.densities(21),
                placement: j.placement,
                seed: j.seed,
                tolerance: a.tolerance,
                lambda_offset: a.lambda_offset,
            })
        }
        Cmd::Simulate(a) => {
            let model = if let Some(p) = &a.net {
                Model::Net {
                    spec: minplus::petri::NetSpec::from_json(&read(p)?)?,
                }
            } else if let Some(w) = &a.road {
                Model::Road { word: w.clone() }
            } else if let Some(j) = &a.junction {
                let bad = || InputError(format!("--junction expects n,m,d, got `{j}`"));
                let parts: Vec<&str> = j.split(',').map(str::trim).collect();
                let [n, m, d] = parts[..] else { return Err(bad().into()) };
                let n = n.parse().map_err(|_| bad())?;
                let m = m.parse().map_err(|_| bad())?;
                let density = d.parse().map_err(|_| bad())?;
                Model::Junction {
                    n,
                    m,
                    density,
                    placement: a.placement,
                    seed: a.seed,
                }
            } else {
                return Err(InputError("one of --net, --road or --junction is required".into()).into());
            };
            Params::Simulate(SimulateParams { model, steps: a.steps })
        }
        Cmd::Tent(a) => Params::Tent(TentParams {
            mode: a.mode,
            seed: a.seed,
            steps: a.steps,
            denominator: a.denominator,
        }),
        Cmd::Compose(a) => {
            let systems = a.systems.iter().map(read).collect::<Result<Vec<_>>>()?;
            let inputs = match (&a.inputs, a.steps) {
                (Some(p), _) => input_stream(p)?,
                (None, steps) => {
                    let width = minplus::compose::SystemDyn::parse_text(&systems[systems.len() - 1])?
                        .input_kinds()
                        .len();
                    vec![vec![0.0; width]; steps.unwrap_or(10)]
                }
            };
            Params::Compose(ComposeParams {
                op: a.op,
                systems,
                inputs,
            })
        }
        Cmd::Eigen { .. } | Cmd::Replay { .. } => unreachable!("handled before"),
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Eigen { file } => commands::eigen::run(&read(&file)?),
        Cmd::Replay { dir } => commands::replay::run(&dir, cli.out.as_deref()),
        cmd => commands::execute(params(cmd)?, cli.out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_of(&e) as u8)
        }
    }
}
