//! Revenue maximization for a multi-wavelength optical router node.
//!
//! `N` ports (stations) are polled by `K` wavelengths running fixed frames of
//! length `C`. Each wavelength serves a fixed set of stations; each station on
//! it gets a visit period preceded by a switchover. The crate provides
//!
//! * [`model`]: the per-cycle expected revenue of a station,
//! * [`allocator`]: separable concave budget allocation (water-filling),
//! * [`heuristic`]: the three-step assignment heuristic,
//! * [`exact`]: exhaustive enumeration, random baselines and sweeps,
//! * [`simulate`]: a packet-level Monte Carlo check of the revenue formula.

pub mod allocator;
pub mod error;
pub mod exact;
pub mod heuristic;
pub mod model;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use heuristic::{heuristic_solve, heuristic_solve_with, Assignment, Finalization, SolveResult, VisitPlan};
pub use model::{Instance, StationParams, TrafficClass};
