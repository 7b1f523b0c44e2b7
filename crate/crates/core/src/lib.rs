//! Rank-based competing Brownian particles.
//!
//! * [`model`]: system descriptions, ranking permutations, validation.
//! * [`conditions`]: sufficient conditions for absence of multiple
//!   collisions, each reported with a numeric margin.
//! * [`simulate`]: Euler-Maruyama Monte Carlo with reproducible per-path
//!   streams and collision-proximity statistics.

pub mod conditions;
pub mod error;
pub mod model;
pub mod simulate;

pub use conditions::{ConditionReport, Criterion, TotalCriterion, WindowPair};
pub use error::{Error, Gate, Result};
pub use model::{FiniteSystemSpec, InfiniteSystemSpec, InitFamily, RankedState, RankingPermutation, SystemSpec};
pub use simulate::{Aggregate, PathStats, SimConfig, TrackedWindow};
