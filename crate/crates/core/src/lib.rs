//! Simulation toolkit for a vehicle-mounted switched sector-antenna array
//! talking to roadside infrastructure.
//!
//! The crate is split along the signal chain:
//!
//! - [`geometry`]: local east/north/up positions, compass bearings and
//!   relative angles.
//! - [`antenna`]: the 8-element sector array plus omni sleeve antenna.
//! - [`linkbudget`]: received power, free-space loss and gain relations.
//! - [`propagation`]: simplified dominant-path loss over 2D obstacles and
//!   coverage grids.
//! - [`switching`]: geolocation-based beam selection and the RF switch model.
//! - [`scenario`]: rotation sweep, distance run and trajectory runners.
//! - [`config`], [`output`] and [`cli`]: scenario files, CSV/raster
//!   emission and the command-line front end.

pub mod antenna;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod output;
pub mod propagation;
pub mod scenario;
pub mod switching;

pub use error::{Error, Result};
