//! Characteristic-function analysis of Jaynes-Cummings inversion revivals.
//!
//! The crate simulates the atomic inversion of the Jaynes-Cummings model for
//! an arbitrary photon-number distribution, decomposes the resulting
//! collapse-revival trace into dispersive packets through the field's
//! characteristic function, retrieves the photon statistics from a single
//! packet's spectrum, and, when revivals overlap inside the measurement
//! window, recovers the base packet by solving a Fredholm integral equation
//! of the second kind.

pub mod charfn;
pub mod error;
pub mod inversion;
pub mod overlap;
pub mod packets;
pub mod quadrature;
pub mod retrieval;
pub mod states;

pub use charfn::CharacteristicFunction;
pub use error::{Error, Result};
pub use states::{CatMode, CatParams, PhotonDistribution};

/// Complex double, the scalar of every trace and spectrum in the crate.
pub type C64 = num_complex::Complex64;

/// Crate version, exposed so drivers can stamp it into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
