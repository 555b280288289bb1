//! Traffic models: the circular road (exclusion process and event graph) and
//! the two-road junction with its closed-form eigenpairs and fundamental
//! diagram.

mod diagram;
mod eigen;
mod junction;
mod road;

use thiserror::Error;

pub use diagram::{density_grid, diagram_point, diagram_sweep, to_csv, to_svg, DiagramPoint, SimParams, CSV_HEADER};
pub use eigen::{
    expand_eigenvector, junction_eigenpairs, junction_eigvec_table, junction_lambda_approx, junction_lambda_exact,
    junction_reduced_map, recession_check, table_pair, verify_eigenpair, EigenPairJunction, LambdaExact, Phase,
    PhaseBoundaries, RecessionCheck, Reduced, VerifyReport, BOUNDARY_TOL, VERIFY_TOL,
};
pub use junction::{marking_from_density, JunctionConfig, JunctionDynamics, Placement};
pub use road::{exclusion_flow, exclusion_step, format_word, occupancy, parse_word, road_event_graph, FlowReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("junction needs n, m >= 2, got ({0}, {1})")]
    BadSize(usize, usize),
    #[error("invalid marking: {0}")]
    BadMarking(String),
    #[error("density {0} outside [0, 1]")]
    DensityOutOfRange(f64),
    #[error("eigenvector expansion needs λ < 1/2, got {0}")]
    LambdaTooLarge(f64),
    #[error("invalid character {0:?} in occupancy word")]
    BadWord(char),
    #[error("no periodic regime within {0} steps")]
    NoPeriod(usize),
}
