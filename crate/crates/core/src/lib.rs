//! Desk-scale simulation and analysis of a polarization-entangled photon-pair
//! experiment.
//!
//! The forward path runs from a chip state through fiber rotations and
//! QWP/HWP/PBS analyzers to Poisson-sampled delay histograms ([`sim`]). The
//! inverse path reduces histograms to coincidence counts ([`counting`]),
//! fits interference fringes, reconstructs the density matrix by maximum
//! likelihood and unfolds the fiber rotations ([`tomography`]), and
//! evaluates the CHSH inequality with a three-detector estimator ([`chsh`]).

pub mod chsh;
pub mod counting;
pub mod error;
pub mod optics;
pub mod optim;
pub mod pipeline;
pub mod sim;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};
