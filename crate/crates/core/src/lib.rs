//! Numerical verification of shearfree Lorentzian metrics of Kähler-Sasaki
//! type: construction, connection and curvature by two independent routes,
//! and residual reports for the resulting geometric identities.

pub mod bundle;
pub mod einstein;
pub mod error;
pub mod kahler;
pub mod ode;
pub mod par;
pub mod report;
pub mod structures;
pub mod suite;
pub mod tensor;
pub mod tolerance;
pub mod wave;

pub use error::{GeoError, Result};
