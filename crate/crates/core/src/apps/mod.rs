//! Problem adapters built on the boxed LP solver.

pub mod flow;
pub mod gst;
pub mod set_cover;

pub use flow::{max_flow, FlowNetwork, MaxFlow};
pub use gst::{gst_oracle, parse_groups, parse_tree, solve_gst_online, GstOutcome, RootedTreeInstance};
pub use set_cover::{set_cover_stream, solve_set_cover, SetSystem};
