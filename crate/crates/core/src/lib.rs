//! Co-optimization of power and natural-gas networks with bidirectional
//! pipeline flows.
//!
//! [`network`] loads and validates system data, [`formulation`] turns it into
//! the unidirectional LP or the bidirectional MILP over the [`model`] IR,
//! [`solver`] solves and extracts schedules, [`horizon`] runs split horizons,
//! and [`analysis`] verifies and compares the results. [`sweep`] runs batches
//! of independent solves in parallel.

pub mod analysis;
pub mod formulation;
pub mod horizon;
pub mod model;
pub mod mps;
pub mod network;
pub mod solver;
pub mod sweep;
