//! Strategyproof reviewer assignment by partitioning the agents.
//!
//! Every agent both authors submissions and reviews others. Splitting the
//! agents into subsets that only review each other removes any incentive to
//! manipulate reviews. This crate computes such partitions together with the
//! best assignment that respects them, and measures what the restriction costs.

pub mod assignment;
pub mod coloring;
pub mod error;
pub mod general;
pub mod generators;
pub mod instance;
pub mod io;
pub mod metrics;
pub mod oracles;
pub mod partition;
pub mod score;
pub mod solver;
pub mod stats;

pub mod commands;

pub use assignment::{Assignment, Partition, PartitionKind};
pub use error::{Error, Result};
pub use instance::{Instance, Loads, Mode};
pub use metrics::{maxmin_value, total_similarity, validate, Report, Verdict, Violation};
pub use score::{Score, SCALE};
pub use solver::{solve_k1_matching, solve_max_similarity, AssignmentProblem};
