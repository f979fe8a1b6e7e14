//! External rays by Newton continuation in the height `h = g/π`.
//!
//! The Böttcher coordinate `φ = 1/G` behaves like `z` near ∞ and conjugates
//! `P` to squaring. The ray at angle `ψ ∈ (0, 1)` is the curve where
//! `φ = e^{πh} e^{iπψ}`; it lies in the upper half-plane. A point at height
//! `h` is found by choosing the depth `n` with `e^{2ⁿπh} > R²`, inverting `φ`
//! at `φ(Pⁿz)` with a convergent series, and solving `Pⁿ(z) = u*` by Newton
//! from the previous point on the ray.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::angle::DirectionAngle;
use crate::boettcher::{log_deriv_jet, LogDerivData};
use crate::dynamics::{greens_value, iterate_jet, PolyParams};
use crate::error::{Error, Result};

/// One accepted point on a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample {
    pub h: f64,
    pub z: Complex64,
    pub data: LogDerivData,
}

/// How a traced ray ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// The last scheduled height was reached.
    ReachedHMin,
    /// A dyadic ray ran into the precritical point at the tip of its slit.
    Tip { z: Complex64, h: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalRay {
    pub angle: DirectionAngle,
    pub samples: Vec<RaySample>,
    pub termination: Termination,
}

/// Continuation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayConfig {
    /// Largest ratio `h_next/h` of an unrefined continuation step.
    pub step_ratio: f64,
    /// Number of step halvings before giving up.
    pub max_halvings: u32,
    /// Tolerance passed to [`log_deriv_jet`].
    pub series_tol: f64,
    /// Allowed mismatch between the Green's height of a sample and its target.
    pub height_tol: f64,
    /// Optional bound on the distance between consecutive recorded samples.
    pub max_arc: Option<f64>,
}

impl Default for RayConfig {
    fn default() -> Self {
        RayConfig {
            step_ratio: 0.5f64.powf(1.0 / 16.0),
            max_halvings: 40,
            series_tol: 1e-14,
            height_tol: 1e-9,
            max_arc: None,
        }
    }
}

/// Geometric schedule `h_j = a·2^{−j/κ}` for `j = 0..=κ·scales`.
pub fn default_schedule(p: &PolyParams, scales: u32, per_scale: u32) -> Vec<f64> {
    let count = scales * per_scale;
    (0..=count)
        .map(|j| p.a * 0.5f64.powf(f64::from(j) / f64::from(per_scale)))
        .collect()
}

/// `φ(u)` and `φ′(u)/φ(u)` for `|u| > R`; `None` if the orbit of `u` does not escape.
fn boettcher_outer(p: &PolyParams, u0: Complex64) -> Option<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let mut u = u0;
    let mut log_sum = Complex64::new(0.0, 0.0);
    let mut dlog = one / u0;
    let mut weight = 0.5;
    for _ in 0..MAX_OUTER_TERMS {
        let t = p.lambda / (u * u);
        if !t.is_finite() {
            return None;
        }
        log_sum += weight * (one - t).ln();
        dlog /= one - t;
        if t.norm() < 1e-20 {
            return Some((u0 * log_sum.exp(), dlog));
        }
        u = u * u - p.lambda;
        weight *= 0.5;
    }
    None
}

const MAX_OUTER_TERMS: usize = 64;

/// Inverts `φ` at a target with `|target| > R²`.
fn boettcher_inverse(p: &PolyParams, target: Complex64) -> Result<Complex64> {
    let mut u = target;
    for _ in 0..60 {
        let (phi, dlog) = boettcher_outer(p, u).ok_or(Error::NoConvergence { depth: MAX_OUTER_TERMS })?;
        let step = (phi - target) / (phi * dlog);
        u -= step;
        if !u.is_finite() {
            break;
        }
        if step.norm() <= 4.0 * f64::EPSILON * u.norm() {
            return Ok(u);
        }
    }
    Err(Error::NoConvergence { depth: 60 })
}

/// Smallest `n` with `2ⁿπh > 2 ln R`.
fn depth_for(p: &PolyParams, h: f64) -> u32 {
    let threshold = 2.0 * p.escape_radius().ln();
    let mut n = 0u32;
    let mut level = PI * h;
    while level <= threshold {
        level *= 2.0;
        n += 1;
    }
    n
}

/// Target `φ(Pⁿz) = e^{2ⁿπh} e^{i2ⁿπψ}` with the argument reduced exactly.
fn outer_target(angle: &DirectionAngle, h: f64, n: u32) -> Complex64 {
    let residue = angle.doubled_residue(u64::from(n));
    let arg = PI * residue as f64 / angle.denominator() as f64;
    Complex64::from_polar((PI * h * 2f64.powi(n as i32)).exp(), arg)
}

/// Newton for `Pⁿ(z) = target` from `seed`.
///
/// Rounding in the orbit limits how small the final step can get, so once a
/// step drops below `1e-10` relative one more polishing step is taken and
/// the result accepted.
fn solve_iterate(p: &PolyParams, target: Complex64, n: u32, seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    let mut polishing = false;
    for _ in 0..60 {
        let jet = iterate_jet(p, z, n as usize).ok()?;
        if jet.d1.norm() == 0.0 {
            return None;
        }
        let step = (jet.value - target) / jet.d1;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if polishing {
            return Some(z);
        }
        polishing = step.norm() <= 1e-10 * z.norm().max(1e-3);
    }
    None
}

/// Sequential continuation state along one ray.
///
/// Cloning the walker is cheap, which lets quadrature restart a sweep from a
/// stored position.
#[derive(Debug, Clone)]
pub struct RayWalker {
    params: PolyParams,
    angle: DirectionAngle,
    config: RayConfig,
    current: RaySample,
}

impl RayWalker {
    /// Starts the ray at a height where no iteration is needed.
    pub fn start(p: &PolyParams, angle: DirectionAngle, config: RayConfig) -> Result<Self> {
        let h = 2.2 * p.escape_radius().ln() / PI;
        let target = outer_target(&angle, h, 0);
        let z = boettcher_inverse(p, target)?;
        let data = log_deriv_jet(p, z, config.series_tol)?;
        Ok(RayWalker {
            params: *p,
            angle,
            config,
            current: RaySample { h, z, data },
        })
    }

    pub fn current(&self) -> &RaySample {
        &self.current
    }

    pub fn angle(&self) -> DirectionAngle {
        self.angle
    }

    fn divergence(&self) -> Error {
        Error::NewtonDivergence {
            last: Box::new(self.current),
        }
    }

    /// One continuation step to `h_next`; `None` when the step must be refined.
    fn try_step(&self, h_next: f64) -> Option<RaySample> {
        let p = &self.params;
        let here = &self.current;
        let dh = h_next - here.h;
        let l = here.data.log_deriv;
        // dz/dh = −π/L along the ray.
        let predicted = if l.norm() > 0.0 {
            here.z - PI * dh / l
        } else {
            here.z
        };
        let n = depth_for(p, h_next);
        let outer = boettcher_inverse(p, outer_target(&self.angle, h_next, n)).ok()?;
        let z = solve_iterate(p, outer, n, predicted)?;
        // Newton resolves z only to rounding level, which dominates tiny steps.
        let arc_bound = (4.0 * PI * dh.abs() / l.norm()).max(1e-12 * here.z.norm().max(1.0));
        if (z - here.z).norm() > arc_bound {
            return None;
        }
        let data = log_deriv_jet(p, z, self.config.series_tol).ok()?;
        Some(RaySample { h: h_next, z, data })
    }

    /// Continues the ray down to `h_target`, which must not exceed the current height.
    pub fn advance_to(&mut self, h_target: f64) -> Result<()> {
        if !(h_target > 0.0) || h_target > self.current.h {
            return Err(Error::InvalidArgument("ray heights must decrease and stay positive"));
        }
        while self.current.h > h_target {
            let coarse = (self.current.h * self.config.step_ratio).max(h_target);
            let mut h_next = coarse;
            let mut halvings = 0;
            loop {
                if let Some(sample) = self.try_step(h_next) {
                    self.current = sample;
                    break;
                }
                halvings += 1;
                h_next = 0.5 * (self.current.h + h_next);
                if halvings > self.config.max_halvings || h_next >= self.current.h {
                    return Err(self.divergence());
                }
            }
        }
        Ok(())
    }

    /// Checks the current sample against the independent Green's series.
    fn verify_height(&self) -> Result<()> {
        let g = greens_value(&self.params, self.current.z)?;
        if (g / PI - self.current.h).abs() > self.config.height_tol * self.current.h.max(1.0) {
            return Err(self.divergence());
        }
        Ok(())
    }
}

/// Fractional part of `2ψ` and whether `2ψ > 1`.
///
/// When the flag is set, `P` maps the ray at `ψ` onto the negative of the ray
/// at the returned angle, which is the conjugate of the ray at its mirror.
pub fn angle_double_fold(angle: &DirectionAngle) -> Result<(DirectionAngle, bool)> {
    angle.double()
}

/// Traces the ray at `angle` through the given strictly decreasing heights.
pub fn trace_ray(p: &PolyParams, angle: DirectionAngle, schedule: &[f64]) -> Result<ExternalRay> {
    trace_ray_with(p, angle, schedule, &RayConfig::default())
}

/// The ray on the positive real axis beyond `ξ`.
pub fn trace_real_ray(p: &PolyParams, schedule: &[f64]) -> Result<ExternalRay> {
    trace_ray_with(p, DirectionAngle::zero(), schedule, &RayConfig::default())
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("height schedule is empty"));
    }
    if schedule.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(Error::InvalidArgument("heights must be positive and finite"));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("height schedule must strictly decrease"));
    }
    Ok(())
}

pub fn trace_ray_with(
    p: &PolyParams,
    angle: DirectionAngle,
    schedule: &[f64],
    config: &RayConfig,
) -> Result<ExternalRay> {
    validate_schedule(schedule)?;
    let tip_order = angle.dyadic_order().filter(|_| angle.numerator() > 0);
    // Continuation stops just above the tip, where the ray still has a
    // usable slope, and Newton on the precritical equation finishes the job.
    let stop = tip_order.map(|m| p.a * 0.5f64.powi(m as i32) * (1.0 + 1e-6));

    let mut walker = RayWalker::start(p, angle, *config)?;
    let mut samples: Vec<RaySample> = Vec::with_capacity(schedule.len());
    for &h in schedule {
        if stop.is_some_and(|s| h <= s) {
            break;
        }
        if h < walker.current().h {
            walker.advance_to(h)?;
        }
        walker.verify_height()?;
        let sample = *walker.current();
        if let (Some(limit), Some(prev)) = (config.max_arc, samples.last()) {
            let jump = (sample.z - prev.z).norm();
            if jump > limit {
                return Err(Error::ScheduleTooCoarse { h, jump });
            }
        }
        samples.push(sample);
    }

    let termination = match (tip_order, stop) {
        (Some(order), Some(h_stop)) if *schedule.last().unwrap_or(&0.0) <= h_stop => {
            walker.advance_to(h_stop.min(walker.current().h))?;
            let z = locate_tip(p, order, walker.current().z).ok_or_else(|| walker.divergence())?;
            let h = greens_value(p, z)? / PI;
            Termination::Tip { z, h }
        }
        _ => Termination::ReachedHMin,
    };
    Ok(ExternalRay {
        angle,
        samples,
        termination,
    })
}

/// Newton for `P^{m−1}(z) = 0` near the end of a dyadic ray of order `m`.
fn locate_tip(p: &PolyParams, order: u32, seed: Complex64) -> Option<Complex64> {
    solve_iterate(p, Complex64::new(0.0, 0.0), order - 1, seed).or_else(|| {
        // The order-one tip is the critical point itself.
        (order == 1).then_some(Complex64::new(0.0, 0.0))
    })
}
