//! Böttcher data with derivatives and the radial-variation density.
//!
//! Let `G` be the Böttcher function of the basin of infinity, normalised so
//! that `G(P(z)) = G(z)²` and `G(z) ≈ 1/z` near ∞, so `g = −ln|G|`. Every
//! quantity is expressed through the branch-free pair `(g, L)` with
//! `L = G′/G = −lim 2^{-n}(P^{∘n})′/P^{∘n}` and its derivative `L′`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{greens_value, ln_abs_one_minus, PolyParams};
use crate::error::{Error, Result};
use crate::ray::RaySample;

/// Green's value and logarithmic derivatives of `G` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDerivData {
    /// `g(z)`.
    pub green: f64,
    /// `L = G′/G`.
    pub log_deriv: Complex64,
    /// `L′`, so that `G″/G = L′ + L²`.
    pub log_deriv_prime: Complex64,
    /// Number of iterations before the orbit left the escape disc.
    pub depth: usize,
}

impl LogDerivData {
    /// `G″/G`.
    pub fn second_over_value(&self) -> Complex64 {
        self.log_deriv_prime + self.log_deriv * self.log_deriv
    }

    /// `|G′| = e^{−g}|L|`.
    pub fn abs_first_derivative(&self) -> f64 {
        (-self.green).exp() * self.log_deriv.norm()
    }
}

/// Comb height `a = g(λ)/π`.
pub fn compute_a(p: &PolyParams) -> f64 {
    // λ > ξ always escapes and λ = 2 is caught by the depth bound, so the
    // Green's series cannot fail here.
    greens_value(p, Complex64::new(p.lambda, 0.0)).unwrap_or(0.0) / PI
}

/// Depth cap for the forward phase of [`log_deriv_jet`].
pub const MAX_ESCAPE_DEPTH: usize = 64;

/// Evaluates `g`, `L` and `L′` at an escaping point.
///
/// `tol` bounds the size of the last series increment that is kept.
pub fn log_deriv_jet(p: &PolyParams, z: Complex64, tol: f64) -> Result<LogDerivData> {
    let radius = p.escape_radius();
    let lambda = p.lambda;
    let one = Complex64::new(1.0, 0.0);
    if !z.is_finite() {
        return Err(Error::InvalidArgument("point must be finite"));
    }

    // Forward phase: raw jets until the orbit leaves the escape disc. This
    // stays finite through critical points where u′ vanishes.
    let mut u = z;
    let mut du = one;
    let mut ddu = Complex64::new(0.0, 0.0);
    let mut depth = 0usize;
    while u.norm() <= radius {
        if depth == MAX_ESCAPE_DEPTH {
            return Err(Error::NonEscaping { depth });
        }
        ddu = 2.0 * (du * du + u * ddu);
        du = 2.0 * u * du;
        u = u * u - lambda;
        depth += 1;
    }

    let scale = 0.5f64.powi(depth as i32);
    let ratio = du / u;
    // A = 2^{-n} u′/u and B = A′.
    let mut first = ratio * scale;
    let mut second = (ddu / u - ratio * ratio) * scale;
    let mut green_sum = u.norm().ln();
    let mut weight = 0.5;
    let mut power = 2f64.powi(depth as i32 + 1);
    loop {
        let t = lambda / (u * u);
        let beta = one / (one - t);
        let green_term = weight * ln_abs_one_minus(lambda, u);
        green_sum += green_term;
        // β′ = −2λβ²u′/u³ with u′/u = 2^k A.
        let correction = first * first * beta * beta * t * power;
        second = second * beta - correction;
        first *= beta;
        // |u| grows doubly exponentially, so once |t| is tiny the next
        // increments are far below any requested tolerance.
        if !(t.norm() >= 1e-6 * tol.min(1e-10)) {
            break;
        }
        u = u * u - lambda;
        weight *= 0.5;
        power *= 2.0;
        if !u.is_finite() {
            break;
        }
    }

    Ok(LogDerivData {
        green: green_sum * scale,
        log_deriv: -first,
        log_deriv_prime: -second,
        depth,
    })
}

/// Threshold on `|L|` below which the density is reported as singular.
pub const SINGULAR_MODULUS: f64 = 1e-14;

/// Density of `∫|T″(w)||dw|` with respect to the height `h = g/π`:
/// `π e^{πh} |L′ + L²| / |L|³`.
pub fn ray_integrand(sample: &RaySample) -> Result<f64> {
    density(sample.h, &sample.data)
}

pub(crate) fn density(h: f64, data: &LogDerivData) -> Result<f64> {
    let modulus = data.log_deriv.norm();
    if modulus < SINGULAR_MODULUS {
        return Err(Error::SingularSample { h, modulus });
    }
    Ok(PI * (PI * h).exp() * data.second_over_value().norm() / (modulus * modulus * modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::derive_params;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Inverse Joukowski data at λ = 2 with the branch `√(z−2)√(z+2)`.
    fn joukowski(z: Complex64) -> (f64, Complex64, Complex64) {
        let root = (z - 2.0).sqrt() * (z + 2.0).sqrt();
        let big_g = (z - root) / 2.0;
        let l = -1.0 / root;
        let lp = z / (root * root * root);
        (-big_g.norm().ln(), l, lp)
    }

    #[test]
    fn a_values() {
        assert_eq!(compute_a(&derive_params(2.0).unwrap()), 0.0);
        let a6 = derive_params(6.0).unwrap().a;
        assert!((a6 - 0.5407847842564171).abs() < 1e-12);
        let a35 = derive_params(3.5).unwrap().a;
        assert!((a35 - 0.34146591744140975).abs() < 1e-12);
        let mut prev = 0.0;
        for lam in [3.0, 4.0, 5.0, 6.0] {
            let a = derive_params(lam).unwrap().a;
            assert!(a > prev);
            prev = a;
        }
    }

    #[test]
    fn green_at_lambda_matches_a() {
        let p = derive_params(6.0).unwrap();
        let g = greens_value(&p, c(6.0, 0.0)).unwrap();
        assert!((g - PI * p.a).abs() < 1e-14);
    }

    #[test]
    fn joukowski_oracle() {
        let p = derive_params(2.0).unwrap();
        for z in [c(3.0, 0.0), c(0.5, 1.0), c(-2.5, -0.3), c(0.0, 0.2), c(10.0, 5.0)] {
            let data = log_deriv_jet(&p, z, 1e-14).unwrap();
            let (g, l, lp) = joukowski(z);
            assert!((data.green - g).abs() < 1e-12, "{z}");
            assert!((data.log_deriv - l).norm() < 1e-10 * l.norm().max(1.0), "{z}");
            assert!((data.log_deriv_prime - lp).norm() < 1e-9 * lp.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn doubling_identity() {
        let p = derive_params(6.0).unwrap();
        for z in [c(4.0, 0.0), c(1.0, 0.3), c(-2.0, 0.05), c(0.0, 1.0)] {
            let here = log_deriv_jet(&p, z, 1e-14).unwrap();
            let there = log_deriv_jet(&p, p.eval(z), 1e-14).unwrap();
            let lhs = there.log_deriv * 2.0 * z;
            assert!((lhs - 2.0 * here.log_deriv).norm() < 1e-10 * here.log_deriv.norm().max(1.0));
            assert!((there.green - 2.0 * here.green).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = derive_params(6.0).unwrap();
        let z = c(0.8, 0.4);
        let step = 1e-6;
        let plus = log_deriv_jet(&p, z + step, 1e-14).unwrap().log_deriv;
        let minus = log_deriv_jet(&p, z - step, 1e-14).unwrap().log_deriv;
        let fd = (plus - minus) / (2.0 * step);
        let lp = log_deriv_jet(&p, z, 1e-14).unwrap().log_deriv_prime;
        assert!((fd - lp).norm() < 1e-5 * lp.norm());
    }

    #[test]
    fn real_axis_values_are_real_and_negative() {
        let p = derive_params(6.0).unwrap();
        for x in [3.01, 4.0, 7.5, 40.0] {
            let d = log_deriv_jet(&p, c(x, 0.0), 1e-14).unwrap();
            assert!(d.log_deriv.im.abs() < 1e-12);
            assert!(d.log_deriv.re < 0.0);
        }
    }

    #[test]
    fn critical_point_has_zero_log_derivative() {
        let p = derive_params(6.0).unwrap();
        let d = log_deriv_jet(&p, c(0.0, 0.0), 1e-14).unwrap();
        assert_eq!(d.log_deriv, c(0.0, 0.0));
        assert!((d.green - PI * p.a / 2.0).abs() < 1e-14);
        let sample = RaySample {
            h: p.a / 2.0,
            z: c(0.0, 0.0),
            data: d,
        };
        assert!(matches!(ray_integrand(&sample), Err(Error::SingularSample { .. })));
    }

    #[test]
    fn non_escaping_point_is_rejected() {
        let p = derive_params(6.0).unwrap();
        assert!(matches!(
            log_deriv_jet(&p, c(3.0, 0.0), 1e-12),
            Err(Error::NonEscaping { .. })
        ));
    }
}
