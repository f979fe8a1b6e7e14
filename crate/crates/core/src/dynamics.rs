//! The real quadratic family `P(z) = z² − λ`.
//!
//! Everything here is a pure function of [`PolyParams`]: the derived
//! constants, forward iteration carrying second-order jets, the critical
//! orbit, preimage trees, the Green's function of the basin of infinity and
//! the interval covers `P^{-n}([−ξ, ξ])` of the Julia set `E₀`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Constants attached to a parameter `λ ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyParams {
    pub lambda: f64,
    /// Positive fixed point, `P(ξ) = ξ`.
    pub xi: f64,
    /// Positive solution of `P(η) = −ξ`.
    pub eta: f64,
    /// Multiplier at the fixed point, `2ξ`.
    pub rho: f64,
    pub nu: f64,
    /// Comb height `a = g(λ)/π`.
    pub a: f64,
    /// `λ > 2 + √2`, equivalently `η > 1`.
    pub theorem_range: bool,
}

impl PolyParams {
    /// Escape radius `R = max(2ξ, λ + 2)`.
    pub fn escape_radius(&self) -> f64 {
        (2.0 * self.xi).max(self.lambda + 2.0)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        z * z - self.lambda
    }

    /// `λ = 2`, the Chebyshev case where `E₀ = [−2, 2]`.
    pub fn is_degenerate(&self) -> bool {
        self.lambda == 2.0
    }
}

/// Builds [`PolyParams`] for `λ ≥ 2`.
pub fn derive_params(lambda: f64) -> Result<PolyParams> {
    if !(lambda >= 2.0) || !lambda.is_finite() {
        return Err(Error::Domain { lambda });
    }
    let xi = 0.5 * (1.0 + (1.0 + 4.0 * lambda).sqrt());
    let eta = (lambda - xi).max(0.0).sqrt();
    let mut p = PolyParams {
        lambda,
        xi,
        eta,
        rho: 2.0 * xi,
        nu: xi - 1.0,
        a: 0.0,
        theorem_range: lambda > 2.0 + SQRT_2,
    };
    p.a = crate::boettcher::compute_a(&p);
    Ok(p)
}

/// A value together with its first and second complex derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet2 {
    /// The identity jet `(z, 1, 0)`.
    pub fn variable(z: Complex64) -> Self {
        Jet2 {
            value: z,
            d1: Complex64::new(1.0, 0.0),
            d2: Complex64::new(0.0, 0.0),
        }
    }

    /// Chain rule: `outer` holds `(g(f), g′(f), g″(f))`, `self` holds
    /// `(f, f′, f″)`; returns the jet of `g ∘ f`.
    pub fn compose(self, outer: Jet2) -> Jet2 {
        Jet2 {
            value: outer.value,
            d1: outer.d1 * self.d1,
            d2: outer.d2 * self.d1 * self.d1 + outer.d1 * self.d2,
        }
    }

    /// One application of `P`.
    #[inline]
    pub fn step(self, lambda: f64) -> Jet2 {
        let u = self.value;
        Jet2 {
            value: u * u - lambda,
            d1: 2.0 * u * self.d1,
            d2: 2.0 * (self.d1 * self.d1 + u * self.d2),
        }
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// Jet of `P^{∘n}` at `z`.
pub fn iterate_jet(p: &PolyParams, z: Complex64, n: usize) -> Result<Jet2> {
    let mut jet = Jet2::variable(z);
    for depth in 0..n {
        let next = jet.step(p.lambda);
        if !next.is_finite() {
            return Err(Error::Overflow { depth });
        }
        jet = next;
    }
    Ok(jet)
}

/// First `m` points of the critical orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalOrbit {
    /// `P^{∘k}(0)` for `k = 1..`.
    pub values: Vec<f64>,
    /// Set when the orbit left the representable range before `m` entries.
    pub truncated: bool,
}

pub fn critical_orbit(p: &PolyParams, m: usize) -> CriticalOrbit {
    let mut values = Vec::with_capacity(m);
    let mut x = 0.0_f64;
    for _ in 0..m {
        x = x * x - p.lambda;
        if !x.is_finite() {
            return CriticalOrbit {
                values,
                truncated: true,
            };
        }
        values.push(x);
    }
    CriticalOrbit {
        values,
        truncated: false,
    }
}

/// Natural logarithm of `P^{∘k}(0)` for `k ≥ 2`, computed without overflow.
pub(crate) fn log_critical_value(p: &PolyParams, k: u32) -> f64 {
    debug_assert!(k >= 2);
    let lam = p.lambda;
    let mut lx = (lam * lam - lam).ln();
    for _ in 2..k {
        let inv_sq = lam * (-2.0 * lx).exp();
        lx = 2.0 * lx + (-inv_sq).ln_1p();
    }
    lx
}

/// The `2ⁿ` solutions of `P^{∘n}(y) = target`, built by repeated `±√(w + λ)`.
pub fn preimages(p: &PolyParams, target: Complex64, n: usize) -> Vec<Complex64> {
    let mut level = vec![target];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for w in &level {
            let r = (w + p.lambda).sqrt();
            next.push(r);
            next.push(-r);
        }
        level = next;
    }
    level
}

/// The preimage `±√(w + λ)` closest to `near`.
///
/// Returns `None` when both candidates are equidistant to within `rel_tie`.
pub fn preimage_near(
    p: &PolyParams,
    w: Complex64,
    near: Complex64,
    rel_tie: f64,
) -> Option<Complex64> {
    let r = (w + p.lambda).sqrt();
    let d_plus = (r - near).norm();
    let d_minus = (-r - near).norm();
    if (d_plus - d_minus).abs() <= rel_tie * d_plus.max(d_minus) {
        return None;
    }
    Some(if d_plus < d_minus { r } else { -r })
}

/// Truncation controls for the Green's series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenConfig {
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for GreenConfig {
    fn default() -> Self {
        GreenConfig {
            tol: 1e-12,
            max_depth: 64,
        }
    }
}

/// `ln|q|` for `q = 1 − λ/u²`, accurate when `q` is close to 1.
#[inline]
pub(crate) fn ln_abs_one_minus(lambda: f64, u: Complex64) -> f64 {
    let t = lambda / (u * u);
    // |1 − t|² − 1 = −2 Re t + |t|²
    0.5 * (-2.0 * t.re + t.norm_sqr()).ln_1p()
}

/// Green's function of the basin of infinity with pole at ∞.
pub fn greens_value(p: &PolyParams, z: Complex64) -> Result<f64> {
    greens_value_with(p, z, &GreenConfig::default())
}

pub fn greens_value_with(p: &PolyParams, z: Complex64, cfg: &GreenConfig) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::InvalidArgument("point must be finite"));
    }
    let radius = p.escape_radius();
    let mut u = z;
    let mut n = 0usize;
    while u.norm() <= radius {
        if n == cfg.max_depth {
            // g ≤ ln R + λ/R² on |u| ≤ R, and g(z) = 2^{-n} g(uₙ).
            let bound = (radius.ln() + p.lambda / (radius * radius)) * 0.5f64.powi(n as i32);
            if bound <= cfg.tol {
                return Ok(0.0);
            }
            return Err(Error::NonEscaping { depth: n });
        }
        u = u * u - p.lambda;
        n += 1;
    }
    let mut sum = u.norm().ln();
    let mut weight = 0.5;
    loop {
        let term = weight * ln_abs_one_minus(p.lambda, u);
        sum += term;
        if !(term.abs() >= 0.5 * cfg.tol) {
            break;
        }
        u = u * u - p.lambda;
        weight *= 0.5;
    }
    Ok(sum * 0.5f64.powi(n as i32))
}

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from a complex point to the interval.
    pub fn distance(&self, z: Complex64) -> f64 {
        let dx = if z.re < self.lo {
            self.lo - z.re
        } else if z.re > self.hi {
            z.re - self.hi
        } else {
            0.0
        };
        dx.hypot(z.im)
    }
}

/// The `2ⁿ` intervals of `P^{-n}([−ξ, ξ])`, sorted left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCover {
    pub level: usize,
    pub intervals: Vec<Interval>,
    /// `λ = 2`: the intervals abut and cover `[−2, 2]`.
    pub degenerate: bool,
}

impl IntervalCover {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn max_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).fold(0.0, f64::max)
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.distance(z))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn julia_cover(p: &PolyParams, n: usize) -> IntervalCover {
    let mut intervals = vec![Interval {
        lo: -p.xi,
        hi: p.xi,
    }];
    for _ in 0..n {
        let mut next = Vec::with_capacity(intervals.len() * 2);
        for iv in &intervals {
            // √ is increasing, so the positive branch keeps endpoint order.
            let lo = (iv.lo + p.lambda).max(0.0).sqrt();
            let hi = (iv.hi + p.lambda).max(0.0).sqrt();
            next.push(Interval { lo, hi });
            next.push(Interval { lo: -hi, hi: -lo });
        }
        next.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        intervals = next;
    }
    IntervalCover {
        level: n,
        intervals,
        degenerate: p.is_degenerate(),
    }
}

/// `2 + √2`, the lower end of the parameter range covered by the decay bound.
pub const THEOREM_LAMBDA: f64 = 2.0 + SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_at_six() {
        let p = derive_params(6.0).unwrap();
        assert_eq!(p.xi, 3.0);
        assert!((p.eta - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.rho, 6.0);
        assert_eq!(p.nu, 2.0);
        assert!(p.theorem_range);
        assert_eq!(p.escape_radius(), 8.0);
    }

    #[test]
    fn params_degenerate_and_errors() {
        let p = derive_params(2.0).unwrap();
        assert_eq!((p.xi, p.eta, p.nu, p.a), (2.0, 0.0, 1.0, 0.0));
        assert!(!p.theorem_range);
        assert!(matches!(derive_params(1.0), Err(Error::Domain { .. })));
        assert!(matches!(derive_params(f64::NAN), Err(Error::Domain { .. })));
        assert!(derive_params(3.5).unwrap().theorem_range);
        assert!(!derive_params(3.4).unwrap().theorem_range);
    }

    #[test]
    fn fixed_point_identities_on_grid() {
        for lam in [2.1, 3.5, 6.0, 10.0, 100.0] {
            let p = derive_params(lam).unwrap();
            assert!((p.xi * p.xi - lam - p.xi).abs() <= 1e-12 * p.xi);
            assert!((p.eta * p.eta - lam + p.xi).abs() <= 1e-12 * p.xi);
            assert!((p.nu * (p.nu + 1.0) - lam).abs() <= 1e-12 * lam);
            assert_eq!(p.theorem_range, p.eta > 1.0);
        }
    }

    #[test]
    fn jet_examples() {
        let p = derive_params(6.0).unwrap();
        assert_eq!(iterate_jet(&p, c(0.0, 0.0), 2).unwrap().value, c(30.0, 0.0));
        for k in 0..8 {
            let j = iterate_jet(&p, c(3.0, 0.0), k).unwrap();
            assert_eq!(j.value, c(3.0, 0.0));
            assert_eq!(j.d1, c(6f64.powi(k as i32), 0.0));
        }
    }

    #[test]
    fn jet_matches_product_formula() {
        let p = derive_params(6.0).unwrap();
        let z = c(0.7, 0.4);
        for n in 1..8 {
            let j = iterate_jet(&p, z, n).unwrap();
            let mut prod = c(2f64.powi(n as i32), 0.0);
            let mut u = z;
            for _ in 0..n {
                prod *= u;
                u = p.eval(u);
            }
            assert!((j.d1 - prod).norm() <= 1e-12 * prod.norm());
        }
    }

    #[test]
    fn jet_overflow_reports_depth() {
        let p = derive_params(6.0).unwrap();
        match iterate_jet(&p, c(10.0, 0.0), 40) {
            Err(Error::Overflow { depth }) => assert!(depth > 5 && depth < 40),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn critical_orbit_examples() {
        let p = derive_params(6.0).unwrap();
        assert_eq!(critical_orbit(&p, 3).values, [-6.0, 30.0, 894.0]);
        let o = critical_orbit(&p, 4);
        assert_eq!(o.values[3], 799230.0);
        let long = critical_orbit(&p, 40);
        assert!(long.truncated);
        for w in long.values.windows(2).skip(1) {
            assert!(w[1] > w[0] && w[0] > 0.0);
            assert_eq!(w[1], w[0] * w[0] - 6.0);
        }
        let lx = log_critical_value(&p, 4);
        assert!((lx - 799230f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn preimage_examples() {
        let p = derive_params(6.0).unwrap();
        let one = preimages(&p, c(3.0, 0.0), 1);
        assert_eq!(one, [c(3.0, 0.0), c(-3.0, 0.0)]);
        let ys = preimages(&p, c(3.0, 0.0), 2);
        for y in ys {
            assert!(y.im.abs() < 1e-15);
            assert!(y.re.abs() <= p.xi + 1e-15 && y.re.abs() >= p.eta - 1e-15);
        }
    }

    #[test]
    fn preimage_near_picks_closest_and_flags_ties() {
        let p = derive_params(6.0).unwrap();
        let w = c(-2.0, 0.5);
        let r = (w + 6.0).sqrt();
        assert_eq!(preimage_near(&p, w, r * 0.9, 1e-9), Some(r));
        assert_eq!(preimage_near(&p, w, -r * 0.9, 1e-9), Some(-r));
        let orth = Complex64::new(-r.im, r.re);
        assert_eq!(preimage_near(&p, w, orth, 1e-9), None);
    }

    #[test]
    fn greens_joukowski_and_julia_points() {
        let p = derive_params(2.0).unwrap();
        let g = greens_value(&p, c(3.0, 0.0)).unwrap();
        assert!((g - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
        // λ = ν(ν+1) with integer ν makes ξ exactly representable.
        for lam in [2.0, 6.0, 12.0, 20.0] {
            let p = derive_params(lam).unwrap();
            assert_eq!(greens_value(&p, c(p.xi, 0.0)).unwrap(), 0.0);
        }
        // Otherwise the rounded ξ sits 1e-16 off E₀ and g is Hölder-small.
        let p = derive_params(3.5).unwrap();
        assert!(greens_value(&p, c(p.xi, 0.0)).unwrap() < 1e-6);
    }

    #[test]
    fn greens_nonescaping_with_short_depth() {
        let p = derive_params(6.0).unwrap();
        let cfg = GreenConfig {
            tol: 1e-12,
            max_depth: 8,
        };
        assert!(matches!(
            greens_value_with(&p, c(3.0, 0.0), &cfg),
            Err(Error::NonEscaping { depth: 8 })
        ));
    }

    #[test]
    fn julia_cover_first_level() {
        let p = derive_params(6.0).unwrap();
        let cov = julia_cover(&p, 1);
        assert_eq!(cov.intervals.len(), 2);
        let r3 = 3f64.sqrt();
        assert_eq!(cov.intervals[1], Interval { lo: r3, hi: 3.0 });
        assert_eq!(cov.intervals[0], Interval { lo: -3.0, hi: -r3 });
        for iv in &cov.intervals {
            assert!(iv.hi <= -p.eta || iv.lo >= p.eta);
        }
    }

    #[test]
    fn julia_cover_nests_and_shrinks() {
        let p = derive_params(6.0).unwrap();
        let mut prev = julia_cover(&p, 0);
        for n in 1..=10 {
            let cov = julia_cover(&p, n);
            assert_eq!(cov.intervals.len(), 1 << n);
            for iv in &cov.intervals {
                assert!(iv.lo >= -p.xi && iv.hi <= p.xi);
                assert!(iv.hi <= -p.eta || iv.lo >= p.eta);
                assert!(prev
                    .intervals
                    .iter()
                    .any(|par| par.lo <= iv.lo && iv.hi <= par.hi));
            }
            assert!(cov.total_length() < prev.total_length());
            assert!(cov.max_length() < prev.max_length());
            prev = cov;
        }
        assert!(julia_cover(&derive_params(2.0).unwrap(), 3).degenerate);
    }
}
