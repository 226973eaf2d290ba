// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Digital-analog counterdiabatic quantum optimization for trapped ions.
//!
//! Ising instances ([`problem`]) are annealed under a first-order
//! counterdiabatic drive ([`counterdiabatic`]), trotterized into Global
//! Mølmer–Sørensen blocks and single-qubit rotations ([`gates`],
//! [`synthesis`]), simulated under analog and depolarizing noise
//! ([`simulator`]) and costed on a device profile ([`hardware`]).
//! [`experiments`] drives the end-to-end studies behind the CLI.

pub mod counterdiabatic;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod hardware;
pub mod linalg;
pub mod par;
pub mod pauli;
pub mod problem;
pub mod simulator;
pub mod synthesis;

pub use error::{Error, Result};
pub use par::Execution;
