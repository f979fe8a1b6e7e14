use alloc::boxed::Box;

use crate::goodset::DyadicCoverLevel;
use crate::ray::RaySample;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lambda = {lambda} is outside the admitted range (lambda >= 2 required)")]
    Domain { lambda: f64 },

    #[error("iteration overflowed after {depth} finite steps")]
    Overflow { depth: usize },

    #[error("orbit did not escape within {depth} iterations")]
    NonEscaping { depth: usize },

    #[error("limit did not stabilise by depth {depth}")]
    NoConvergence { depth: usize },

    #[error("Newton continuation diverged below h = {}", last.h)]
    NewtonDivergence { last: Box<RaySample> },

    #[error("consecutive ray samples at h = {h} jump by {jump}, above the arc bound")]
    ScheduleTooCoarse { h: f64, jump: f64 },

    #[error("|L| = {modulus} at h = {h} is too small to evaluate the density")]
    SingularSample { h: f64, modulus: f64 },

    #[error("angle {num}/{den} is dyadic")]
    DyadicAngle { num: u64, den: u64 },

    #[error("no sign change found while bracketing landmark {index}")]
    BracketFailure { index: usize },

    #[error("target {target} lies outside the branch range [{lo}, {hi}]")]
    TargetOutOfRange { target: f64, lo: f64, hi: f64 },

    #[error("|w| = {modulus} lies outside the evaluation disc of radius {radius}")]
    OutsideDisc { modulus: f64, radius: f64 },

    #[error("inverse branch is ambiguous at pullback step {step}")]
    AmbiguousBranch { step: usize },

    #[error("cover generation exceeded its resource cap at level {}", partial.level)]
    CapExceeded { partial: Box<DyadicCoverLevel> },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
