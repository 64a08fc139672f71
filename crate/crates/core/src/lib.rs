//! Analytical photon-fluence, temperature and damage solutions for pulsed interstitial
//! laser ablation in a two-tissue cylindrical domain.

pub mod bioheat;
pub mod damage;
pub mod error;
pub mod fluence;
pub mod numerics;
pub mod oracle;
pub mod params;
pub mod scenario;
pub mod source;
pub mod specfun;
pub mod tables;
pub mod validate;

pub use error::{Error, Result};
