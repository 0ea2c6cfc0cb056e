//! Sparse principal component analysis: an exact branch-and-bound solver with
//! outer-approximation cuts, conic relaxations with rounding, and heuristics.

pub mod error;
pub mod instance;
pub mod linalg;
pub mod subproblem;
pub mod bounds;
pub mod heuristics;
pub mod oracle;
pub mod exact;
pub mod conic;
pub mod relax;
pub mod rounding;
pub mod spiked;
pub mod experiment;
pub mod report;
pub mod cli;

pub use error::{Result, SpcaError};
