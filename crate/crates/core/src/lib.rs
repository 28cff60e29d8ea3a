//! Discrete and continuous location solvers.
//!
//! * [`pmedian`]: p-median with per-demand distance limits (exact, Lagrangian bound, GRASP,
//!   coverage feasibility).
//! * [`committee`]: approval-ballot committees under the k-centrum of Hamming distances.
//! * [`sensors`]: sensor placement on a rectangle.
//! * [`io`]: file formats, generators and the benchmark harness.

// `!(x > 0.0)` checks also reject NaN; index loops read closer to the maths.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod committee;
pub mod error;
pub mod io;
pub mod oracle;
pub mod pmedian;
pub mod primitives;
pub mod report;
pub mod selftest;
pub mod sensors;

pub use error::{Error, ParseError, Result};
pub use primitives::{
    closest_assignment, hamming, k_centrum_aggregate, ApprovalProfile, Committee, DistanceMatrix,
    OrderedWeights,
};
pub use report::SolverReport;
