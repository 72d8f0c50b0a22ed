//! Spatial-domain trajectory planning for automated vehicles.
//!
//! Steering and velocity are planned together in a road-aligned frame
//! `(s, e_y)` where the arc length `s` along the road centerline replaces
//! time as the independent variable. Travel time stays linear in the
//! decision variables through the substitution `q = 1/v`, so corridor
//! traversal, waypoint time scheduling and obstacle avoidance all fit in a
//! single linear program, solved twice (the second time with tire-friction
//! speed caps).
//!
//! The crate is `no_std` and only needs `alloc`:
//!
//! - [`geometry`]: centerline, Frenet conversions, spatial grid, obstacles.
//! - [`model`]: spatial kinematic bicycle model and its discretization.
//! - [`constraints`]: rate rows, vehicle-dimension margin, corridor rows,
//!   waypoint rows and friction speed profiles.
//! - [`lp`]: LP assembly in condensed control space and a bounded-variable
//!   simplex solver.
//! - [`planner`]: the two-pass planner and open-loop validation.
//! - [`baseline`]: a time-domain LTV-MPC tracking baseline.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod constraints;
mod error;
pub mod geometry;
pub mod integrate;
pub mod lp;
pub mod math;
pub mod model;
pub mod planner;
pub mod qp;

pub use error::{Error, Result};

/// Standard gravity in m/s².
pub const GRAVITY: f64 = 9.81;
