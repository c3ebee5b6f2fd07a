//! Two-node tandem queue in which every job needs the same service time at
//! both stations.
//!
//! The crate covers three layers:
//!
//! * exact path algebra on piecewise-constant càdlàg paths ([`paths`]) and an
//!   exact simulator of the tandem queue ([`tandem`]) whose plateau process is
//!   computed through several independent representations;
//! * heavy-traffic families of models and their diffusion-scaled processes
//!   ([`scaling`]);
//! * the spectrally positive stable limit process with its reflection, local
//!   time and excursions ([`limitproc`]), and the explicit one-dimensional law of
//!   the time-changed limit plateau process ([`limitlaw`]).
//!
//! [`stats`] holds the empirical-distribution tools used to compare Monte
//! Carlo output with the analytic law.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod limitlaw;
pub mod limitproc;
pub mod paths;
pub mod randomgen;
pub mod scaling;
pub mod stats;
pub mod tandem;

pub use error::{Error, Result};
pub use paths::StepPath;
pub use randomgen::{DistSpec, SeededStream};
pub use tandem::{TandemInputs, TandemTrajectory};
