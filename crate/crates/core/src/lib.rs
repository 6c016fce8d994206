//! Characteristic length of dynamical reduction models from the decay rate
//! of cosmological vacuum energy.
//!
//! * [`units`]: natural-unit quantities and CGS conversions.
//! * [`cosmology`]: flat FRW background with a decaying vacuum.
//! * [`reduction`]: characteristic volume, length, energy gain and decoherence time.
//! * [`stochastic`]: Monte Carlo check of the velocity-diffusion energy gain law.

pub mod cosmology;
pub mod error;
pub mod ode;
pub mod reduction;
pub mod stochastic;
pub mod units;

pub use error::{Error, Result};
pub use units::Quantity;
