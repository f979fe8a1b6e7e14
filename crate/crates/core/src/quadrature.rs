//! Composite Gauss–Legendre quadrature with panel doubling.
//!
//! The integrand is supplied as a batch evaluator receiving abscissae in
//! strictly decreasing order, which suits integrands that are only available
//! through a sequential continuation from large to small arguments.

use alloc::vec::Vec;
use core::f64::consts::PI;


use crate::error::{Error, Result};

/// Nodes and weights of an `m`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on `P_m` from Chebyshev guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        let m = order as f64;
        for i in 0..order {
            let mut x = (PI * (i as f64 + 0.75) / (m + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            dp = if d != 0.0 { d } else { dp };
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        // Chebyshev guesses start at the right end, so nodes already descend.
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `(P_m(x), P_m′(x))` by the three-term recurrence.
fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if order == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let m = order as f64;
    (p1, m * (x * p1 - p0) / (x * x - 1.0))
}

/// Refinement controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub order: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings {
            order: 8,
            initial_panels: 2,
            max_panels: 1024,
            rel_tol: 1e-6,
            abs_tol: 1e-14,
        }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.initial_panels == 0 || self.max_panels < self.initial_panels {
            return Err(Error::InvalidArgument("quadrature panel settings are inconsistent"));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two refinements.
    pub error_estimate: f64,
    /// Total number of integrand evaluations.
    pub evaluations: usize,
    /// Panel count of the accepted estimate.
    pub panels: usize,
    pub converged: bool,
}

/// Abscissae of the composite rule over `[lo, hi]`, in decreasing order.
fn composite_nodes(rule: &GaussLegendre, lo: f64, hi: f64, panels: usize) -> Vec<f64> {
    let width = (hi - lo) / panels as f64;
    let mut xs = Vec::with_capacity(panels * rule.order());
    for k in (0..panels).rev() {
        let mid = lo + (k as f64 + 0.5) * width;
        for &t in rule.nodes() {
            xs.push(mid + 0.5 * width * t);
        }
    }
    xs
}

fn composite_sum(rule: &GaussLegendre, lo: f64, hi: f64, panels: usize, values: &[f64]) -> f64 {
    let width = (hi - lo) / panels as f64;
    let order = rule.order();
    values
        .chunks(order)
        .map(|chunk| {
            chunk
                .iter()
                .zip(rule.weights())
                .map(|(v, w)| v * w)
                .sum::<f64>()
        })
        .sum::<f64>()
        * 0.5
        * width
}

/// Integrates over `[lo, hi]`, doubling the panel count until two successive
/// estimates agree to `max(abs_tol, rel_tol·|I|)`.
///
/// `eval` receives the abscissae of one refinement level in decreasing order
/// and returns the integrand values in the same order.
pub fn integrate_descending<F>(lo: f64, hi: f64, settings: &QuadSettings, mut eval: F) -> Result<QuadResult>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    settings.validate()?;
    if !(hi > lo) {
        return Err(Error::InvalidArgument("integration interval must have hi > lo"));
    }
    let rule = GaussLegendre::new(settings.order);
    let mut panels = settings.initial_panels;
    let mut evaluations = 0usize;
    let estimate = |panels: usize, eval: &mut F, count: &mut usize| -> Result<f64> {
        let xs = composite_nodes(&rule, lo, hi, panels);
        let values = eval(&xs)?;
        if values.len() != xs.len() {
            return Err(Error::InvalidArgument("integrand returned the wrong number of values"));
        }
        *count += xs.len();
        Ok(composite_sum(&rule, lo, hi, panels, &values))
    };
    let mut previous = estimate(panels, &mut eval, &mut evaluations)?;
    loop {
        let next_panels = panels * 2;
        if next_panels > settings.max_panels {
            return Ok(QuadResult {
                value: previous,
                error_estimate: f64::INFINITY,
                evaluations,
                panels,
                converged: false,
            });
        }
        let current = estimate(next_panels, &mut eval, &mut evaluations)?;
        let diff = (current - previous).abs();
        panels = next_panels;
        if diff <= settings.abs_tol.max(settings.rel_tol * current.abs()) {
            return Ok(QuadResult {
                value: current,
                error_estimate: diff,
                evaluations,
                panels,
                converged: true,
            });
        }
        previous = current;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        let total: f64 = rule.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for degree in 0..16 {
            let got: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(x, w)| w * x.powi(degree))
                .sum();
            let exact = if degree % 2 == 1 { 0.0 } else { 2.0 / (degree as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-14, "degree {degree}");
        }
        assert!(rule.nodes().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn exponential_integral() {
        let result = integrate_descending(0.0, 1.0, &QuadSettings::default(), |xs| {
            assert!(xs.windows(2).all(|w| w[1] < w[0]));
            Ok(xs.iter().map(|x| x.exp()).collect())
        })
        .unwrap();
        assert!(result.converged);
        assert!((result.value - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn panel_cap_is_reported() {
        let settings = QuadSettings {
            max_panels: 2,
            ..QuadSettings::default()
        };
        let result = integrate_descending(0.0, 1.0, &settings, |xs| Ok(xs.to_vec())).unwrap();
        assert!(!result.converged);
    }

    #[test]
    fn invalid_settings() {
        let settings = QuadSettings {
            rel_tol: 0.0,
            ..QuadSettings::default()
        };
        assert!(integrate_descending(0.0, 1.0, &settings, |xs| Ok(xs.to_vec())).is_err());
        assert!(integrate_descending(1.0, 0.0, &QuadSettings::default(), |xs| Ok(xs.to_vec())).is_err());
    }
}
