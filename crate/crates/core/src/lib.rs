//! Online covering LP and SDP solvers that take fractional advice.

pub mod apps;
pub mod baselines;
pub mod engine;
pub mod error;
pub mod harness;
pub mod instance;
pub mod linalg;
pub mod lp;
pub mod params;
pub mod sdp;

pub use error::{Error, ErrorKind, Result};
pub use instance::{
    parse_advice, parse_lp_instance, parse_sdp_instance, validate_advice, AdviceVector, ConstraintSource,
    CoveringLpInstance, CoveringSdpInstance, SparseRow,
};
pub use linalg::SymMatrix;
pub use lp::{LpSolver, StepReport, StopReason};
pub use params::SolverParams;
pub use sdp::{SdpSolver, SdpStepReport};
