//! Numerics for the Green's mapping of a real quadratic Julia set.
//!
//! The polynomial is `P(z) = z² − λ` with `λ ≥ 2`; its Julia set `E₀` is a
//! Cantor subset of `[−ξ, ξ]`. The crate evaluates the Green's function and
//! the logarithmic derivatives of the Böttcher map, traces external rays,
//! evaluates the Poincaré function of the repelling fixed point together with
//! its comb data, builds the run-length-limited good-direction sets and
//! integrates the radial variation `∫|T″|` scale by scale.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod angle;
pub mod boettcher;
pub mod dynamics;
pub mod error;
pub mod goodset;
pub mod poincare;
pub mod quadrature;
pub mod radvar;
pub mod ray;

pub use num_complex::Complex64;

pub use angle::DirectionAngle;
pub use boettcher::{compute_a, log_deriv_jet, ray_integrand, LogDerivData};
pub use dynamics::{
    critical_orbit, derive_params, greens_value, iterate_jet, julia_cover, preimages,
    IntervalCover, Jet2, PolyParams,
};
pub use error::{Error, Result};
pub use goodset::{dimension_bound, generate_cover, membership, BitWord, DyadicCoverLevel};
pub use poincare::{
    comb_height, invert_f_branch, landmarks, poincare_jet, selfsim_greens_residual, CombSlit,
    RealLandmarks,
};
pub use radvar::{pullback_check, radial_variation, scale_contribution, RadVarReport, ScaleContribution};
pub use ray::{angle_double_fold, trace_ray, ExternalRay, RaySample, Termination};
