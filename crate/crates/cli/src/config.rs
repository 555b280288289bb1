//! The persisted description of a run. Input files are embedded so a run
//! directory replays on its own.

use minplus::petri::NetSpec;
use minplus::traffic::Placement;
use serde::{Deserialize, Serialize};

pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool_version: String,
    #[serde(flatten)]
    pub params: Params,
}

impl RunConfig {
    pub fn new(params: Params) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            params,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Params {
    Diagram(DiagramParams),
    Verify(VerifyParams),
    Simulate(SimulateParams),
    Tent(TentParams),
    Compose(ComposeParams),
}

impl Params {
    pub fn name(&self) -> &'static str {
        match self {
            Params::Diagram(_) => "diagram",
            Params::Verify(_) => "verify",
            Params::Simulate(_) => "simulate",
            Params::Tent(_) => "tent",
            Params::Compose(_) => "compose",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramParams {
    pub n: usize,
    pub m: usize,
    pub densities: Vec<f64>,
    pub burn_in: usize,
    pub horizon: usize,
    pub seed: u64,
    pub placement: Placement,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub n: usize,
    pub m: usize,
    pub densities: Vec<f64>,
    pub placement: Placement,
    pub seed: u64,
    pub tolerance: f64,
    /// Added to every candidate `λ` before the check.
    pub lambda_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Net { spec: NetSpec },
    Road { word: String },
    Junction { n: usize, m: usize, density: f64, placement: Placement, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateParams {
    pub model: Model,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TentMode {
    Exact,
    MonteCarlo,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TentParams {
    pub mode: TentMode,
    pub seed: u64,
    pub steps: usize,
    pub denominator: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ComposeOp {
    Series,
    Parallel,
    Feedback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposeParams {
    pub op: ComposeOp,
    /// System texts; `series` reads `S1(S2(U))` from `[S1, S2]`.
    pub systems: Vec<String>,
    pub inputs: Vec<Vec<f64>>,
}
