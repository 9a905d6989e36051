//! Special functions needed by the closed-form densities.

mod arc;
mod bessel;
mod expint;
mod gamma;
mod hyper;
pub mod mp;

pub use arc::arc_ratio;
pub use bessel::{airy_ai, bessel_k, bessel_k_scaled};
pub use expint::{gamma0_incomplete, gamma0_incomplete_scaled};
pub use gamma::gamma;
pub use hyper::{hyper_pfq, HyperParams, Ratio, SeriesResult, CANCELLATION_FALLBACK};
