//! Joint UAV positioning and power control (JPPC) for a two-way
//! amplify-and-forward relay network.
//!
//! A single relay UAV at fixed altitude serves `K` ground UEs and one base
//! station over orthogonal bands. This crate holds the pure numerical core:
//!
//! - [`model`]: scenario data, exact SNR and sum-rate evaluation, the reduced
//!   feasible set and geometry helpers.
//! - [`surrogate`]: the proposed concave lower bound of the sum rate, the
//!   amplitude-domain baseline bound, their gradients and curvature diagnostics.
//! - [`sca`]: successive convex approximation with the surrogate problem solved
//!   by dual subgradient ascent.
//! - [`agp`]: the double-loop accelerated gradient projection solver.
//! - [`single_ue`]: the semi-analytical solver for one UE.
//!
//! The crate is `no_std` (it needs `alloc`). Timing, IO and file formats live
//! in the companion `jppc-bench` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod agp;
pub mod model;
pub mod sca;
pub mod single_ue;
pub mod surrogate;

pub use error::{Error, Result};
pub use model::{
    control_power, geometry_center, is_feasible, link_params, snr_downlink, snr_uplink, sum_rate,
    Decision, Feasibility, Iterate, LinkParams, RateUnit, Scenario, SolverReport, Status,
};
pub use surrogate::{SurrogateContext, SurrogateKind, SurrogateValue};
