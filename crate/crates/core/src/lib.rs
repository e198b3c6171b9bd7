//! Exact p-adic arithmetic for overconvergent functions and distributions on
//! saturated p-valued groups.
//!
//! Everything is computed over `Q` read inside `Q_p`; magnitudes are compared by
//! their rational exponents ([`LogMag`]), so every inequality the library checks is
//! decided exactly.

pub mod distributions;
pub mod error;
pub mod functions;
pub mod group;
pub mod mahler;
pub mod padic;
pub mod report;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use padic::{ExtRational, LogMag, MultiIndex, Prime, Scalar};
pub use group::{GroupPoint, ModelTag, NeighborhoodParams, PValuedGroup};
pub use report::{CheckRecord, Format, Report, Verdict};
pub use series::{NormValue, RadiusVector, Series};
