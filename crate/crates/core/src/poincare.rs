//! The Poincaré function of the repelling fixed point `ξ`.
//!
//! With `P̂(u) = P(u + ξ) − ξ = u(u + ρ)`, the entire function
//! `F(w) = lim P̂^{∘n}(w/ρⁿ)` solves `F(ρw) = P̂(F(w))` with `F(0) = 0` and
//! `F′(0) = 1`. On the negative real axis `F + ξ` oscillates between the
//! critical values of `P`; its critical points `c_n`, the points `a_n`, `b_n`
//! where `F + ξ = ±ξ`, the slit heights of the comb and the monotone inverse
//! branches `f_n` are computed here.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{greens_value, log_critical_value, PolyParams};
use crate::error::{Error, Result};

/// Evaluation controls for [`poincare_jet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareConfig {
    /// Acceptance threshold for the change between two depths, relative to
    /// `max(1, |F|, |w·F′|)`.
    pub tol: f64,
    /// The evaluation disc is `|w| ≤ ρ^disc_power`.
    pub disc_power: i32,
    pub max_depth: u32,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        PoincareConfig {
            tol: 1e-13,
            disc_power: 8,
            max_depth: 64,
        }
    }
}

impl PoincareConfig {
    pub fn disc_radius(&self, p: &PolyParams) -> f64 {
        p.rho.powi(self.disc_power)
    }
}

/// `F`, `F′` and `F″` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareValue {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub depth: u32,
}

/// `P̂^{∘n}(w/ρⁿ)` with its first two derivatives in `w`.
fn scaled_iterate(p: &PolyParams, w: Complex64, n: u32) -> Result<(Complex64, Complex64, Complex64)> {
    let rho = p.rho;
    let shrink = rho.powi(-(n as i32));
    let mut u = w * shrink;
    let mut d = Complex64::new(shrink, 0.0);
    let mut dd = Complex64::new(0.0, 0.0);
    for depth in 0..n {
        let slope = 2.0 * u + rho;
        dd = dd * slope + 2.0 * d * d;
        d *= slope;
        u *= u + rho;
        if !(u.is_finite() && d.is_finite() && dd.is_finite()) {
            return Err(Error::Overflow { depth: depth as usize });
        }
    }
    Ok((u, d, dd))
}

/// Evaluates `F` and its derivatives with explicit controls.
pub fn poincare_eval(p: &PolyParams, w: Complex64, config: &PoincareConfig) -> Result<PoincareValue> {
    let radius = config.disc_radius(p);
    let modulus = w.norm();
    if modulus > radius {
        return Err(Error::OutsideDisc { modulus, radius });
    }
    if w == Complex64::new(0.0, 0.0) {
        return Ok(PoincareValue {
            value: w,
            d1: Complex64::new(1.0, 0.0),
            d2: Complex64::new(2.0 / (p.rho * (p.rho - 1.0)), 0.0),
            depth: 0,
        });
    }
    let start = 12 + modulus.max(1.0).log(p.rho).ceil() as u32;
    let mut depth = start.min(config.max_depth);
    let mut previous = scaled_iterate(p, w, depth)?;
    while depth < config.max_depth {
        let next_depth = (depth + 8).min(config.max_depth);
        let current = scaled_iterate(p, w, next_depth)?;
        // Rounding in the orbit contributes about ε·|w|·|F′| to F, so the
        // acceptance scale includes that conditioning term.
        let scale_v = current.0.norm().max(modulus * current.1.norm()).max(1.0);
        let scale_d = current.1.norm().max(modulus * current.2.norm()).max(1.0);
        if (current.0 - previous.0).norm() <= config.tol * scale_v
            && (current.1 - previous.1).norm() <= config.tol * scale_d
        {
            return Ok(PoincareValue {
                value: current.0,
                d1: current.1,
                d2: current.2,
                depth: next_depth,
            });
        }
        previous = current;
        depth = next_depth;
    }
    Err(Error::NoConvergence {
        depth: config.max_depth as usize,
    })
}

/// `(F(w), F′(w))` with the default disc `|w| ≤ ρ⁸` and the given tolerance.
pub fn poincare_jet(p: &PolyParams, w: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
    let config = PoincareConfig {
        tol,
        ..PoincareConfig::default()
    };
    poincare_eval(p, w, &config).map(|v| (v.value, v.d1))
}

/// A vertical slit of the comb at base point `−l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSlit {
    pub position: u64,
    pub height: f64,
}

/// `arccosh(e^{ln_x})` without forming `e^{ln_x}` when it is large.
fn arccosh_from_log(ln_x: f64) -> f64 {
    if ln_x < 20.0 {
        ln_x.exp().acosh()
    } else {
        // arccosh x = ln(2x) + ln(½ + ½√(1 − x⁻²))
        let inv_sq = (-2.0 * ln_x).exp();
        core::f64::consts::LN_2 + ln_x + (0.5 + 0.5 * (1.0 - inv_sq).sqrt()).ln()
    }
}

/// Height of the slit at `−l`: `ξ cosh(πh) = |P^{∘(m+1)}(0)|` for `l = k·2^m`, `k` odd.
pub fn comb_height(p: &PolyParams, l: u64) -> Result<CombSlit> {
    if l == 0 {
        return Err(Error::InvalidArgument("slit positions start at 1"));
    }
    let m = l.trailing_zeros();
    let ln_x = if m == 0 {
        (p.lambda / p.xi).ln()
    } else {
        log_critical_value(p, m + 1) - p.xi.ln()
    };
    Ok(CombSlit {
        position: l,
        height: arccosh_from_log(ln_x.max(0.0)) / PI,
    })
}

/// Real landmarks attached to index `n`: `a_n < c_n < b_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealLandmarks {
    pub index: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Which monotone piece of `F + ξ` next to `c_{2n+1}` to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `[c_{2n+2}, c_{2n+1}]`.
    Left,
    /// `[c_{2n+1}, c_{2n}]`, or `[c₁, ρ^k]` when `n = 0`.
    Right,
}

/// Critical points and level points of `F` on the negative axis.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkTable {
    params: PolyParams,
    config: PoincareConfig,
    /// `c_0 = 0, c_1, c_2, …`.
    critical: Vec<f64>,
    landmarks: Vec<RealLandmarks>,
}

fn real_eval(p: &PolyParams, x: f64, config: &PoincareConfig) -> Result<(f64, f64, f64)> {
    let v = poincare_eval(p, Complex64::new(x, 0.0), config)?;
    Ok((v.value.re, v.d1.re, v.d2.re))
}

/// Bisection on a sign change of `f` in `[lo, hi]`, finished by Newton steps.
fn refine_root<F>(mut lo: f64, mut hi: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (f_lo, _) = f(lo)?;
    let lo_sign = f_lo.is_sign_negative();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        let (f_mid, _) = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.is_sign_negative() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let (value, slope) = f(x)?;
        if slope == 0.0 {
            break;
        }
        let next = x - value / slope;
        if !(next >= lo.min(hi) && next <= lo.max(hi)) {
            break;
        }
        x = next;
    }
    Ok(x)
}

impl LandmarkTable {
    /// Locates `c_1, …, c_{k_max+1}` and the `a_n`, `b_n` for `n ≤ k_max`.
    pub fn build(p: &PolyParams, k_max: usize, config: &PoincareConfig) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("landmark count must be at least 1"));
        }
        let limit = config.disc_radius(p);
        let derivative = |x: f64| real_eval(p, x, config).map(|(_, d1, d2)| (d1, d2));
        let mut critical = alloc::vec![0.0f64];
        // c₁: geometric scan leftward from the origin, where F′ = 1.
        let mut x = -0.5;
        let mut prev_x = 0.0;
        loop {
            if -x > limit {
                return Err(Error::BracketFailure { index: 1 });
            }
            if derivative(x)?.0 <= 0.0 {
                break;
            }
            prev_x = x;
            x *= 1.05;
        }
        let first = refine_root(x, prev_x, derivative)?;
        // The critical points of F in [ρ^{j+1}c₁, 0) are ρ times the critical
        // points and the zeros of F + ξ in [ρʲc₁, 0). F is monotone between
        // consecutive critical points, so each zero is bracketed on its piece.
        let shifted = |x: f64| real_eval(p, x, config).map(|(v, d1, _)| (v + p.xi, d1));
        let mut found = alloc::vec![first];
        while found.len() < k_max + 1 {
            let mut next: Vec<f64> = found.iter().map(|c| c * p.rho).collect();
            let mut hi = 0.0;
            let mut f_hi = p.xi;
            for &lo in &found {
                if -lo > limit {
                    return Err(Error::BracketFailure { index: next.len() });
                }
                let f_lo = shifted(lo)?.0;
                if f_lo.is_sign_negative() != f_hi.is_sign_negative() {
                    next.push(p.rho * refine_root(lo, hi, shifted)?);
                }
                (hi, f_hi) = (lo, f_lo);
            }
            if next.len() != 2 * found.len() {
                return Err(Error::BracketFailure { index: found.len() + 1 });
            }
            next.sort_by(|x, y| y.total_cmp(x));
            found = next;
        }
        critical.extend_from_slice(&found[..k_max + 1]);

        let mut landmarks = Vec::with_capacity(k_max);
        for n in 1..=k_max {
            let c = critical[n];
            let (a, b) = if p.is_degenerate() {
                (c, c)
            } else {
                let level = if n % 2 == 0 { p.xi } else { -p.xi };
                let shifted = |x: f64| {
                    real_eval(p, x, config).map(|(v, d1, _)| (v + p.xi - level, d1))
                };
                let a = Self::bracketed(critical[n + 1], c, n, &shifted)?;
                let b = Self::bracketed(c, critical[n - 1], n, &shifted)?;
                (a, b)
            };
            landmarks.push(RealLandmarks { index: n, a, b, c });
        }
        Ok(LandmarkTable {
            params: *p,
            config: *config,
            critical,
            landmarks,
        })
    }

    fn bracketed<F>(lo: f64, hi: f64, index: usize, f: &F) -> Result<f64>
    where
        F: Fn(f64) -> Result<(f64, f64)>,
    {
        let (f_lo, _) = f(lo)?;
        let (f_hi, _) = f(hi)?;
        if f_lo.is_sign_negative() == f_hi.is_sign_negative() {
            return Err(Error::BracketFailure { index });
        }
        refine_root(lo, hi, f)
    }

    pub fn params(&self) -> &PolyParams {
        &self.params
    }

    pub fn config(&self) -> &PoincareConfig {
        &self.config
    }

    pub fn landmarks(&self) -> &[RealLandmarks] {
        &self.landmarks
    }

    /// `c_n` for `0 ≤ n ≤ k_max + 1`.
    pub fn critical(&self, n: usize) -> Option<f64> {
        self.critical.get(n).copied()
    }

    pub fn get(&self, n: usize) -> Option<&RealLandmarks> {
        n.checked_sub(1).and_then(|i| self.landmarks.get(i))
    }

    /// The `w` on the chosen monotone piece next to `c_{2n+1}` with `F(w) + ξ = target`.
    pub fn invert(&self, target: f64, n: usize, piece: Piece) -> Result<f64> {
        let p = &self.params;
        let missing = Error::InvalidArgument("landmark table too short for this branch");
        let centre = self.critical(2 * n + 1).ok_or(missing.clone())?;
        let level = |x: f64| real_eval(p, x, &self.config).map(|(v, d1, _)| (v + p.xi - target, d1));
        let outer = match (piece, n) {
            (Piece::Left, _) => self.critical(2 * n + 2).ok_or(missing)?,
            (Piece::Right, 0) => {
                // F + ξ increases without bound on [c₁, ∞): grow the bracket.
                let mut x = 1.0;
                while level(x)?.0 < 0.0 {
                    x *= 2.0;
                }
                x
            }
            (Piece::Right, _) => self.critical(2 * n).ok_or(missing)?,
        };
        let (lo, hi) = if outer < centre { (outer, centre) } else { (centre, outer) };
        let (f_lo, _) = level(lo)?;
        let (f_hi, _) = level(hi)?;
        let (v_lo, v_hi) = (f_lo + target, f_hi + target);
        let (range_lo, range_hi) = (v_lo.min(v_hi), v_lo.max(v_hi));
        if target < range_lo || target > range_hi {
            return Err(Error::TargetOutOfRange {
                target,
                lo: range_lo,
                hi: range_hi,
            });
        }
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        refine_root(lo, hi, level)
    }

    /// The branch `f_n(x)` solving `F(f_n(x)) + ξ = P(x)`, taking the right
    /// piece for `x ≥ 0` and the left piece for `x < 0`.
    pub fn branch_value(&self, x: f64, n: usize) -> Result<f64> {
        let target = x * x - self.params.lambda;
        let piece = if x >= 0.0 { Piece::Right } else { Piece::Left };
        self.invert(target, n, piece)
    }
}

/// `c_n`, `a_n`, `b_n` for `n = 1..=k_max` with the default disc.
pub fn landmarks(p: &PolyParams, k_max: usize) -> Result<Vec<RealLandmarks>> {
    LandmarkTable::build(p, k_max, &PoincareConfig::default()).map(|t| t.landmarks)
}

/// The unique `w ∈ [c_{2n+1}, c_{2n}]` with `F(w) + ξ = target`.
pub fn invert_f_branch(p: &PolyParams, target: f64, n: usize) -> Result<f64> {
    let table = LandmarkTable::build(p, 2 * n + 1, &PoincareConfig::default())?;
    table.invert(target, n, Piece::Right)
}

/// `|g(F(ρz) + ξ) − 2g(F(z) + ξ)|`.
pub fn selfsim_greens_residual(p: &PolyParams, z: Complex64) -> Result<f64> {
    selfsim_greens_residual_with(p, z, &PoincareConfig::default())
}

pub fn selfsim_greens_residual_with(
    p: &PolyParams,
    z: Complex64,
    config: &PoincareConfig,
) -> Result<f64> {
    let inner = poincare_eval(p, z, config)?.value + p.xi;
    let outer = poincare_eval(p, z * p.rho, config)?.value + p.xi;
    Ok((greens_value(p, outer)? - 2.0 * greens_value(p, inner)?).abs())
}
