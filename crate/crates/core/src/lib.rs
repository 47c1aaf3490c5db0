//! Routing and scheduling toolkit for simultaneous vibroseis crews.
//!
//! Several vehicles each sweep a set of task points. Two sweeps served by
//! different vehicles must start far enough apart in time, with the required
//! gap shrinking linearly with their distance. The crate provides:
//!
//! - [`model`]: instances, route sets, schedules, the slip-time rule and a
//!   schedule validator,
//! - [`simulator`]: the event-driven scheduler that turns a route set into a
//!   timed schedule,
//! - [`ga`]: a genetic search over route sets that uses the scheduler as its
//!   fitness function,
//! - [`instances`]: benchmark generation, coordinate import and naming,
//! - [`exact`]: MILP export in CPLEX LP format and a brute-force optimum for
//!   tiny instances.

pub mod error;
pub mod exact;
pub mod ga;
pub mod instances;
pub mod model;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
pub use ga::{GaConfig, GaResult};

pub use model::{
    read_instance, slip_time, validate_schedule, write_instance, Instance, Params, Point, Schedule,
    Solution, ViolationReport,
};
pub use simulator::evaluate;
