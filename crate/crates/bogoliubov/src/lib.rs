//! Energy expansion of a dilute Bose gas on the unit torus.
//!
//! The pipeline solves the lattice scattering equation, builds the Bogoliubov
//! coefficient tables, assembles the second-order energy corrections and
//! cross-checks closed forms against truncated Fock-space computations.

pub mod config;
pub mod conv;
pub mod corrections;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod potential;
pub mod quadratic;
pub mod report;
pub mod scattering;
pub mod sum;
pub mod tail;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::LatticeBall;
pub use model::Model;
pub use potential::Potential;
