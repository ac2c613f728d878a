//! Phase-diagram toolkit for the self-dual Hofstadter model.
//!
//! At rational flux p/q the model has q magnetic Bloch bands; every
//! spectral gap carries an integer Hall conductance fixed by the
//! gap-labeling Diophantine equation p*k = j (mod q). This crate computes
//! exact band edges, labels the gaps, counts the components of each pure
//! phase, probes multi-phase coexistence along Bezout approximant
//! sequences, and renders the colored phase diagram to deterministic
//! rasters.

pub mod coexist;
pub mod combinatorics;
pub mod eigen;
pub mod error;
pub mod flux;
pub mod labels;
pub mod raster;
pub mod spectral;

pub use error::{Error, Result};
pub use flux::RationalFlux;
pub use labels::{GapRecord, PhaseAtlas};
pub use spectral::{Band, Spectrum};
