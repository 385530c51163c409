//! Darboux frames of curves in the three-dimensional space forms, their
//! magnetic and hierarchy flows, the Hasimoto correspondence and elastica.

pub mod cli;
pub mod elastica;
pub mod error;
pub mod frames;
pub mod grid;
pub mod hasimoto;
pub mod hierarchy;
pub mod io;
pub mod liealg;
pub mod magnetic;
pub mod ode;
pub mod samples;
pub mod symplectic;

pub use error::{Error, Result};
