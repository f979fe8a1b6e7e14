//! Radial variation `∫|T″|` along a direction, split into dyadic scales.
//!
//! Scale `n` covers the heights `h ∈ (a/2ⁿ⁺¹, a/2ⁿ]` of the ray at angle
//! `ψ`; its contribution is `s_n = ∫ π e^{πh}|L′ + L²|/|L|³ dh`. A single
//! continuation walker advances through the scale boundaries while clones of
//! it sweep the quadrature nodes of each scale.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::angle::DirectionAngle;
use crate::boettcher::{density, log_deriv_jet};
use crate::dynamics::{preimage_near, PolyParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_descending, QuadSettings};
use crate::ray::{trace_ray_with, RayConfig, RayWalker};

/// Contribution of one dyadic height range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleContribution {
    pub n: u32,
    pub h_lo: f64,
    pub h_hi: f64,
    pub s_n: f64,
    pub samples_used: usize,
    pub quad_error_est: f64,
}

/// Controls for [`radial_variation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadVarSettings {
    pub quad: QuadSettings,
    pub ray: RayConfig,
    /// Relative size of the geometric tail estimate accepted as converged.
    pub tail_tol: f64,
}

impl Default for RadVarSettings {
    fn default() -> Self {
        RadVarSettings {
            quad: QuadSettings::default(),
            ray: RayConfig::default(),
            tail_tol: 1e-3,
        }
    }
}

/// Number of trailing ratios used for the tail fit and the convergence verdict.
pub const TAIL_WINDOW: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RadVarReport {
    pub params: PolyParams,
    pub angle: DirectionAngle,
    /// Smallest `N` with `ψ ∈ F_N`.
    pub goodset_level: Option<u32>,
    pub scales: Vec<ScaleContribution>,
    pub total: f64,
    /// `(s_last / s_{last−5})^{1/5}`, or NaN with fewer than six scales.
    pub tail_ratio: f64,
    pub converged: bool,
    /// Set when `λ ≤ 2 + √2`, where no decay is predicted.
    pub outside_theorem_range: bool,
    /// The error that stopped the computation before `n_max`, if any.
    pub failure: Option<Error>,
}

impl RadVarReport {
    /// `s_{n+1}/s_n` for consecutive computed scales.
    pub fn ratios(&self) -> Vec<f64> {
        self.scales.windows(2).map(|w| w[1].s_n / w[0].s_n).collect()
    }
}

fn scale_bounds(p: &PolyParams, n: u32) -> (f64, f64) {
    let hi = p.a * 0.5f64.powi(n as i32);
    (0.5 * hi, hi)
}

/// Integrates one scale starting from a walker positioned at its top.
fn integrate_scale(
    top: &RayWalker,
    n: u32,
    h_lo: f64,
    h_hi: f64,
    quad: &QuadSettings,
) -> Result<ScaleContribution> {
    let result = integrate_descending(h_lo, h_hi, quad, |heights| {
        let mut walker = top.clone();
        heights
            .iter()
            .map(|&h| {
                walker.advance_to(h)?;
                density(h, &walker.current().data)
            })
            .collect()
    })?;
    Ok(ScaleContribution {
        n,
        h_lo,
        h_hi,
        s_n: result.value,
        samples_used: result.evaluations,
        quad_error_est: result.error_estimate,
    })
}

fn start_walker(p: &PolyParams, angle: &DirectionAngle, settings: &RadVarSettings) -> Result<RayWalker> {
    if p.is_degenerate() {
        return Err(Error::Domain { lambda: p.lambda });
    }
    angle.require_non_dyadic()?;
    RayWalker::start(p, *angle, settings.ray)
}

/// `s_n` for one scale.
pub fn scale_contribution(
    p: &PolyParams,
    angle: &DirectionAngle,
    n: u32,
    quad: &QuadSettings,
) -> Result<ScaleContribution> {
    let settings = RadVarSettings {
        quad: *quad,
        ..RadVarSettings::default()
    };
    let mut walker = start_walker(p, angle, &settings)?;
    let (h_lo, h_hi) = scale_bounds(p, n);
    walker.advance_to(h_hi)?;
    integrate_scale(&walker, n, h_lo, h_hi, quad)
}

/// Smallest `N ≥ 1` with `ψ ∈ F_N`.
pub fn goodset_level(angle: &DirectionAngle) -> Option<u32> {
    let (prefix, period) = angle.expansion().ok()?;
    let mut bits = prefix;
    bits.extend_from_slice(&period);
    bits.extend_from_slice(&period);
    let longest = crate::goodset::BitWord(bits).max_run() as u32;
    Some(longest.saturating_sub(1).max(1))
}

/// `s_0, …, s_{n_max}` with a geometric tail verdict.
pub fn radial_variation(
    p: &PolyParams,
    angle: &DirectionAngle,
    n_max: u32,
    tol: f64,
) -> Result<RadVarReport> {
    let settings = RadVarSettings {
        tail_tol: tol,
        ..RadVarSettings::default()
    };
    radial_variation_with(p, angle, n_max, &settings)
}

pub fn radial_variation_with(
    p: &PolyParams,
    angle: &DirectionAngle,
    n_max: u32,
    settings: &RadVarSettings,
) -> Result<RadVarReport> {
    if !(settings.tail_tol > 0.0) {
        return Err(Error::InvalidArgument("tail tolerance must be positive"));
    }
    let mut spine = start_walker(p, angle, settings)?;
    let mut scales = Vec::with_capacity(n_max as usize + 1);
    let mut failure = None;
    for n in 0..=n_max {
        let (h_lo, h_hi) = scale_bounds(p, n);
        let step = spine
            .advance_to(h_hi)
            .and_then(|()| integrate_scale(&spine, n, h_lo, h_hi, &settings.quad));
        match step {
            Ok(scale) => scales.push(scale),
            Err(e) if n == 0 => return Err(e),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }

    let total = scales.iter().map(|s| s.s_n).sum::<f64>();
    let values: Vec<f64> = scales.iter().map(|s| s.s_n).collect();
    let (tail_ratio, converged) = tail_verdict(&values, total, settings.tail_tol);
    // A scale whose quadrature hit the panel cap reports an infinite estimate.
    let quadrature_ok = scales.iter().all(|s| s.quad_error_est.is_finite());
    Ok(RadVarReport {
        params: *p,
        angle: *angle,
        goodset_level: goodset_level(angle),
        scales,
        total,
        tail_ratio,
        converged: converged && quadrature_ok && failure.is_none(),
        outside_theorem_range: !p.theorem_range,
        failure,
    })
}

/// Geometric tail fit over the last [`TAIL_WINDOW`] scales.
///
/// The per-scale ratio is `(s_last / s_{last−W})^{1/W}`. Scale contributions
/// of periodic directions oscillate within a period, so the tail is
/// extrapolated block by block: the next `W` scales are taken to sum to
/// `ratio^W` times the last `W`.
fn tail_verdict(values: &[f64], total: f64, tol: f64) -> (f64, bool) {
    if values.len() <= TAIL_WINDOW {
        return (f64::NAN, false);
    }
    let last = values[values.len() - 1];
    let earlier = values[values.len() - 1 - TAIL_WINDOW];
    let ratio = (last / earlier).powf(1.0 / TAIL_WINDOW as f64);
    let block: f64 = values[values.len() - TAIL_WINDOW..].iter().sum();
    let shrink = ratio.powi(TAIL_WINDOW as i32);
    let converged = ratio < 1.0 && block * shrink / (1.0 - shrink) < tol * total;
    (ratio, converged)
}

/// One row of a multi-direction comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionRow {
    pub angle: DirectionAngle,
    pub outcome: core::result::Result<RadVarReport, Error>,
}

/// Reports for several angles; failures stay in their own rows.
///
/// Rows are sorted by total, with failed rows last.
pub fn compare_directions(
    p: &PolyParams,
    angles: &[DirectionAngle],
    n_max: u32,
    settings: &RadVarSettings,
) -> Vec<DirectionRow> {
    let rows = angles
        .iter()
        .map(|angle| DirectionRow {
            angle: *angle,
            outcome: radial_variation_with(p, angle, n_max, settings),
        })
        .collect();
    sort_rows(rows)
}

/// Sorts rows by total, failures last.
pub fn sort_rows(mut rows: Vec<DirectionRow>) -> Vec<DirectionRow> {
    rows.sort_by(|x, y| {
        let key = |r: &DirectionRow| r.outcome.as_ref().map(|rep| rep.total).unwrap_or(f64::INFINITY);
        key(x).total_cmp(&key(y))
    });
    rows
}

/// Tie threshold for choosing a preimage branch.
const BRANCH_TIE: f64 = 1e-6;

/// `Pⁿ` applied to a point, returning the whole forward chain `z, P(z), …, Pⁿ(z)`.
fn forward_chain(p: &PolyParams, z: Complex64, n: u32) -> Vec<Complex64> {
    let mut chain = Vec::with_capacity(n as usize + 1);
    let mut u = z;
    chain.push(u);
    for _ in 0..n {
        u = p.eval(u);
        chain.push(u);
    }
    chain
}

/// Pulls `w` back `n` times, matching at each level the branch closest to `reference[k]`.
fn pull_back(p: &PolyParams, w: Complex64, reference: &[Complex64]) -> Result<Complex64> {
    let n = reference.len() - 1;
    let mut t = w;
    for k in (0..n).rev() {
        t = preimage_near(p, t, reference[k], BRANCH_TIE).ok_or(Error::AmbiguousBranch { step: k })?;
    }
    Ok(t)
}

/// Angle `sⁿψ` and the sign `(−1)^{ε_n}` with `Pⁿ(γ_ψ(h)) = ±γ_{sⁿψ}(2ⁿh)`.
pub fn folded_angle(angle: &DirectionAngle, n: u32) -> Result<(DirectionAngle, f64)> {
    let folded = angle.shift_by(u64::from(n))?;
    let sign = if n > 0 && angle.bit(u64::from(n)) == 1 { -1.0 } else { 1.0 };
    Ok((folded, sign))
}

/// Heights per dyadic scale used by the pullback comparison.
pub const PULLBACK_SAMPLES: u32 = 16;

/// Largest distance between the ray at `ψ` on scale `n` and the pullback of
/// the top scale of the ray at the folded angle.
pub fn pullback_check(p: &PolyParams, angle: &DirectionAngle, n: u32) -> Result<f64> {
    angle.require_non_dyadic()?;
    if n > 30 {
        return Err(Error::InvalidArgument("pullback depth is limited to 30"));
    }
    let config = RayConfig::default();
    let (folded, sign) = folded_angle(angle, n)?;
    let top: Vec<f64> = (0..PULLBACK_SAMPLES)
        .map(|j| p.a * 0.5f64.powf(f64::from(j) / f64::from(PULLBACK_SAMPLES)))
        .collect();
    let scale = 0.5f64.powi(n as i32);
    let deep: Vec<f64> = top.iter().map(|h| h * scale).collect();
    let image = trace_ray_with(p, folded, &top, &config)?;
    let direct = trace_ray_with(p, *angle, &deep, &config)?;
    let mut worst = 0.0f64;
    for (far, near) in image.samples.iter().zip(&direct.samples) {
        let reference = forward_chain(p, near.z, n);
        let pulled = pull_back(p, far.z * sign, &reference)?;
        worst = worst.max((pulled - near.z).norm());
    }
    Ok(worst)
}

/// `s_n` evaluated on pullbacks of the folded ray's top scale.
///
/// Branches are followed by continuity from the direct ray's point at the top
/// of scale `n`, so the integrand never touches the ray at `ψ` below that point.
pub fn scale_contribution_via_pullback(
    p: &PolyParams,
    angle: &DirectionAngle,
    n: u32,
    quad: &QuadSettings,
) -> Result<ScaleContribution> {
    let settings = RadVarSettings {
        quad: *quad,
        ..RadVarSettings::default()
    };
    let (folded, sign) = folded_angle(angle, n)?;
    let (h_lo, h_hi) = scale_bounds(p, n);
    let mut anchor = start_walker(p, angle, &settings)?;
    anchor.advance_to(h_hi)?;
    let anchor_chain = forward_chain(p, anchor.current().z, n);
    let mut image_top = start_walker(p, &folded, &settings)?;
    image_top.advance_to(p.a)?;
    let factor = 2f64.powi(n as i32);
    let result = integrate_descending(h_lo, h_hi, quad, |heights| {
        let mut walker = image_top.clone();
        let mut reference = anchor_chain.clone();
        heights
            .iter()
            .map(|&h| {
                walker.advance_to((h * factor).min(p.a))?;
                let z = pull_back(p, walker.current().z * sign, &reference)?;
                reference = forward_chain(p, z, n);
                let data = log_deriv_jet(p, z, settings.ray.series_tol)?;
                density(h, &data)
            })
            .collect()
    })?;
    Ok(ScaleContribution {
        n,
        h_lo,
        h_hi,
        s_n: result.value,
        samples_used: result.evaluations,
        quad_error_est: result.error_estimate,
    })
}
