//! Verification suites: the acceptance criteria, grouped by module.
//!
//! Each criterion is a self-contained numerical experiment with its own
//! tolerance and runtime budget. A criterion passes when its check succeeds
//! within the budget.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use juliagreen_core::goodset::{
    generate_cover, membership, shift, split_interval, total_length, DyadicInterval,
};
use juliagreen_core::poincare::{poincare_eval, LandmarkTable, PoincareConfig};
use juliagreen_core::radvar::RadVarReport;
use juliagreen_core::ray::RayConfig;
use juliagreen_core::{
    comb_height, derive_params, dimension_bound, greens_value, iterate_jet, log_deriv_jet,
    preimages, pullback_check, radial_variation, selfsim_greens_residual, BitWord, Complex64,
    DirectionAngle, Error, PolyParams, Termination,
};

use crate::error::CliError;

/// Module a criterion exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Dynamics,
    Boettcher,
    Poincare,
    Goodset,
    Radvar,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Dynamics,
        Suite::Boettcher,
        Suite::Poincare,
        Suite::Goodset,
        Suite::Radvar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dynamics => "dynamics",
            Suite::Boettcher => "boettcher",
            Suite::Poincare => "poincare",
            Suite::Goodset => "goodset",
            Suite::Radvar => "radvar",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Selection passed to `verify`: one suite or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    All,
    One(Suite),
}

impl FromStr for Selection {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "all" {
            return Ok(Selection::All);
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .map(Selection::One)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown suite `{s}` (known: all, dynamics, boettcher, poincare, goodset, radvar)"
                ))
            })
    }
}

type Check = fn() -> Result<String, String>;

pub struct Criterion {
    pub id: u8,
    pub suite: Suite,
    pub title: &'static str,
    pub budget: Duration,
    check: Check,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub suite: Suite,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {:<9} {} ({:.3} s of {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.suite.name(),
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

impl Criterion {
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let result = (self.check)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > self.budget {
            passed = false;
            detail = format!("over budget; {detail}");
        }
        Outcome {
            id: self.id,
            suite: self.suite,
            title: self.title,
            passed,
            detail,
            elapsed,
            budget: self.budget,
        }
    }
}

const fn criterion(id: u8, suite: Suite, title: &'static str, secs: u64, check: Check) -> Criterion {
    Criterion {
        id,
        suite,
        title,
        budget: Duration::from_secs(secs),
        check,
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        criterion(1, Suite::Dynamics, "parameter chain", 1, parameter_chain),
        criterion(2, Suite::Boettcher, "Chebyshev oracle", 1, chebyshev_oracle),
        criterion(3, Suite::Boettcher, "doubling identities", 5, doubling_identities),
        criterion(4, Suite::Poincare, "Poincaré oracle and functional equation", 10, poincare_oracle),
        criterion(5, Suite::Poincare, "comb heights", 1, comb_heights),
        criterion(6, Suite::Poincare, "critical point scaling", 5, critical_scaling),
        criterion(7, Suite::Dynamics, "derivative lower bound", 1, derivative_bound),
        criterion(8, Suite::Boettcher, "tip correspondence", 5, tip_correspondence),
        criterion(9, Suite::Goodset, "good-set machinery", 10, goodset_machinery),
        criterion(10, Suite::Goodset, "dimension", 5, dimension),
        criterion(11, Suite::Radvar, "radial variation", 60, radial_decay),
        criterion(12, Suite::Radvar, "scale and shift consistency", 30, shift_consistency),
        criterion(13, Suite::Poincare, "self-similarity residual", 10, self_similarity),
    ]
}

pub fn run(selection: Selection) -> Vec<Outcome> {
    criteria()
        .iter()
        .filter(|c| selection == Selection::All || selection == Selection::One(c.suite))
        .map(Criterion::run)
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn params(lambda: f64) -> Result<PolyParams, String> {
    derive_params(lambda).map_err(|e| e.to_string())
}

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn parameter_chain() -> Result<String, String> {
    let p = params(6.0)?;
    let expected = [(p.xi, 3.0), (p.eta, 3f64.sqrt()), (p.rho, 6.0), (p.nu, 2.0)];
    let worst = expected.iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-12, || format!("(ξ, η, ρ, ν) off by {worst:e}"))?;
    let flat = params(2.0)?;
    ensure(flat.a == 0.0, || format!("a(2) = {} is not 0", flat.a))?;
    let heights: Vec<f64> = [3.0, 4.0, 5.0, 6.0]
        .into_iter()
        .map(|l| params(l).map(|p| p.a))
        .collect::<Result<_, _>>()?;
    ensure(heights.windows(2).all(|w| w[1] > w[0]), || {
        format!("a(3..6) not increasing: {heights:?}")
    })?;
    Ok(format!("max deviation {worst:.1e}, a(3..6) = {heights:.6?}"))
}

fn chebyshev_oracle() -> Result<String, String> {
    let p = params(2.0)?;
    let (mut worst_g, mut worst_l) = (0.0f64, 0.0f64);
    for k in 0..20 {
        let t = 0.3 * f64::from(k);
        let z = c(2.5 * t.cos(), 0.7 + 1.3 * t.sin().abs()) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let root = (z - 2.0).sqrt() * (z + 2.0).sqrt();
        let exact = ((z + root) / 2.0).norm().ln();
        let g = greens_value(&p, z).map_err(|e| e.to_string())?;
        let data = log_deriv_jet(&p, z, 1e-14).map_err(|e| e.to_string())?;
        worst_g = worst_g.max((g - exact).abs());
        worst_l = worst_l.max((data.log_deriv + 1.0 / root).norm());
    }
    ensure(worst_g < 1e-9 && worst_l < 1e-8, || {
        format!("g error {worst_g:e}, log-derivative error {worst_l:e}")
    })?;
    Ok(format!("g error {worst_g:.1e}, log-derivative error {worst_l:.1e}"))
}

fn doubling_identities() -> Result<String, String> {
    let p = params(6.0)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let (mut worst_g, mut worst_l) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let z = c(rng.gen_range(-6.0..6.0), rng.gen_range(0.02..5.0));
        let z = if rng.gen_bool(0.5) { z.conj() } else { z };
        let image = p.eval(z);
        let g = greens_value(&p, z).map_err(|e| e.to_string())?;
        let g_image = greens_value(&p, image).map_err(|e| e.to_string())?;
        let here = log_deriv_jet(&p, z, 1e-14).map_err(|e| e.to_string())?;
        let there = log_deriv_jet(&p, image, 1e-14).map_err(|e| e.to_string())?;
        worst_g = worst_g.max((g_image - 2.0 * g).abs());
        worst_l = worst_l.max((there.log_deriv * 2.0 * z - 2.0 * here.log_deriv).norm());
    }
    ensure(worst_g < 1e-9 && worst_l < 1e-9, || {
        format!("g residual {worst_g:e}, L residual {worst_l:e}")
    })?;
    Ok(format!("g residual {worst_g:.1e}, L residual {worst_l:.1e} on 200 points"))
}

fn poincare_oracle() -> Result<String, String> {
    let config = PoincareConfig::default();
    let flat = params(2.0)?;
    let mut worst_oracle = 0.0f64;
    for k in 0..=40 {
        let w = c(-5.0 + 0.25 * f64::from(k), 0.0);
        let value = poincare_eval(&flat, w, &config).map_err(|e| e.to_string())?.value;
        let exact = 2.0 * w.sqrt().cosh() - 2.0;
        worst_oracle = worst_oracle.max((value - exact).norm());
    }
    let p = params(6.0)?;
    let mut worst_eq = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let w = c(-60.0 + 6.0 * f64::from(i), -30.0 + 3.0 * f64::from(j));
            let inner = poincare_eval(&p, w, &config).map_err(|e| e.to_string())?.value;
            let outer = poincare_eval(&p, w * p.rho, &config).map_err(|e| e.to_string())?.value;
            let residual = (outer - inner * (inner + p.rho)).norm() / outer.norm().max(1.0);
            worst_eq = worst_eq.max(residual);
        }
    }
    ensure(worst_oracle < 1e-8 && worst_eq < 1e-8, || {
        format!("oracle error {worst_oracle:e}, functional-equation residual {worst_eq:e}")
    })?;
    Ok(format!(
        "oracle error {worst_oracle:.1e}, functional-equation residual {worst_eq:.1e}"
    ))
}

fn comb_heights() -> Result<String, String> {
    let p = params(6.0)?;
    let height = |l: u64| comb_height(&p, l).map(|s| s.height).map_err(|e| e.to_string());
    let one = (height(1)? - 2f64.acosh() / PI).abs();
    let two = (height(2)? - 10f64.acosh() / PI).abs();
    ensure(one < 1e-12 && two < 1e-12, || format!("h(−1) off by {one:e}, h(−2) off by {two:e}"))?;
    let normalised: Vec<f64> = (0..=12)
        .map(|m| height(1 << m).map(|h| h / f64::from(1u32 << m)))
        .collect::<Result<_, _>>()?;
    ensure(normalised.windows(2).all(|w| w[1] > w[0]), || {
        "h(−2^m)/2^m is not monotone".to_owned()
    })?;
    let gap = (normalised[12] - p.a).abs();
    ensure(gap < 1e-3, || format!("|h(−2¹²)/2¹² − a| = {gap:e}"))?;
    Ok(format!("h(−1), h(−2) within {:.1e}; |h(−2¹²)/2¹² − a| = {gap:.1e}", one.max(two)))
}

/// Negative critical points of `F` found by scanning `F′` leftward from `start`.
fn scan_critical_points(p: &PolyParams, count: usize) -> Result<Vec<f64>, String> {
    let config = PoincareConfig::default();
    let slope = |x: f64| {
        poincare_eval(p, c(x, 0.0), &config)
            .map(|v| v.d1.re)
            .map_err(|e| e.to_string())
    };
    let mut found = Vec::with_capacity(count);
    let mut right = -0.5;
    let mut f_right = slope(right)?;
    while found.len() < count {
        let left = right * 1.001;
        let f_left = slope(left)?;
        if f_left.is_sign_negative() != f_right.is_sign_negative() {
            let (mut lo, mut hi) = (left, right);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if slope(mid)?.is_sign_negative() == f_left.is_sign_negative() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            found.push(0.5 * (lo + hi));
        }
        right = left;
        f_right = f_left;
    }
    Ok(found)
}

fn critical_scaling() -> Result<String, String> {
    let p = params(6.0)?;
    let scanned = scan_critical_points(&p, 2)?;
    let (c1, c2) = (scanned[0], scanned[1]);
    let scaling = (c2 - p.rho * c1).abs() / c2.abs();
    ensure(scaling < 1e-8, || format!("|c₂ − ρc₁|/|c₂| = {scaling:e}"))?;
    let table = LandmarkTable::build(&p, 2, &PoincareConfig::default()).map_err(|e| e.to_string())?;
    let recursive = table.critical(2).unwrap_or(f64::NAN);
    ensure((recursive - c2).abs() < 1e-8 * c2.abs(), || {
        format!("landmark table c₂ = {recursive} but scan gives {c2}")
    })?;
    let flat = params(2.0)?;
    let closed = scan_critical_points(&flat, 2)?;
    let exact = [-PI * PI, -4.0 * PI * PI];
    let worst = closed
        .iter()
        .zip(exact)
        .map(|(x, y)| (x - y).abs() / y.abs())
        .fold(0.0, f64::max);
    ensure(worst < 1e-10, || format!("λ=2 critical points off by {worst:e} relative"))?;
    Ok(format!(
        "c₁ = {c1:.10}, c₂ = {c2:.10}, scaling residual {scaling:.1e}; λ=2 closed forms within {worst:.1e}"
    ))
}

fn derivative_bound() -> Result<String, String> {
    let p = params(6.0)?;
    let target = c(p.xi, 0.0);
    let mut count = 0;
    let mut smallest = f64::INFINITY;
    for n in 1..=6usize {
        let rate = (2.0 * p.eta).powi(n as i32);
        for y in preimages(&p, target, n) {
            let jet = iterate_jet(&p, y, n).map_err(|e| e.to_string())?;
            smallest = smallest.min(jet.d1.norm() / rate);
            count += 1;
        }
    }
    ensure(count == 126, || format!("enumerated {count} preimages, expected 126"))?;
    ensure(smallest >= 1.0, || format!("smallest ratio {smallest}"))?;
    Ok(format!("min |(Pⁿ)′(y)|/(2η)ⁿ = {smallest:.4} over {count} preimages"))
}

fn tip_correspondence() -> Result<String, String> {
    let p = params(6.0)?;
    let angle = DirectionAngle::new(1, 2).map_err(|e| e.to_string())?;
    let schedule = juliagreen_core::ray::default_schedule(&p, 3, 16);
    let ray = juliagreen_core::ray::trace_ray_with(&p, angle, &schedule, &RayConfig::default())
        .map_err(|e| e.to_string())?;
    match ray.termination {
        Termination::Tip { z, h } => {
            let offset = (h - p.a / 2.0).abs();
            ensure(z.norm() < 1e-6 && offset < 1e-8, || {
                format!("tip at {z} with height offset {offset:e}")
            })?;
            Ok(format!("|z_tip| = {:.1e}, |h − a/2| = {offset:.1e}", z.norm()))
        }
        other => Err(format!("ray ended with {other:?} instead of a tip")),
    }
}

/// Random periodic word whose cyclic repetition has no run above `max_run`.
fn random_cyclic_word(rng: &mut impl Rng, len: usize, max_run: usize) -> Vec<u8> {
    loop {
        let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
        let doubled: Vec<u8> = bits.iter().chain(&bits).copied().collect();
        if BitWord(doubled).max_run() <= max_run {
            return bits;
        }
    }
}

/// Retention of at least half and shrinkage below `2^{−N}` for one split.
fn check_split(parent: &DyadicInterval, goodset: u32) -> Result<Vec<DyadicInterval>, String> {
    let kids = split_interval(parent, goodset + 1).map_err(|e| e.to_string())?.keep;
    let (num, log2den) = total_length(&kids);
    ensure(num << (parent.len + 1) >= 1u128 << log2den, || {
        format!("split of {} retains less than half", parent.word_string())
    })?;
    ensure(kids.iter().all(|k| k.is_within(parent) && k.len > parent.len + goodset), || {
        format!("split of {} does not shrink by 2^-{goodset}", parent.word_string())
    })?;
    Ok(kids)
}

fn goodset_machinery() -> Result<String, String> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(99);
    for trial in 0..10_000u32 {
        let level = 1 + trial % 3;
        let len = rng.gen_range(4..=24usize);
        let bits = random_cyclic_word(&mut rng, len, level as usize + 1);
        let num = bits.iter().fold(0u64, |acc, b| 2 * acc + u64::from(*b));
        let angle = DirectionAngle::new(num, (1 << len) - 1).map_err(|e| e.to_string())?;
        let shifted = shift(&angle).map_err(|e| e.to_string())?;
        let inside = membership(&angle, level).map_err(|e| e.to_string())?;
        let shifted_inside = membership(&shifted, level).map_err(|e| e.to_string())?;
        ensure(inside && shifted_inside, || format!("{angle} or its shift left F_{level}"))?;
    }
    let mut parents_checked = 0usize;
    for (goodset, enumerated) in [(2u32, 5u32), (3, 3)] {
        let mut level = generate_cover(goodset, 0).map_err(|e| e.to_string())?;
        for _ in 0..enumerated {
            let mut produced = Vec::new();
            for parent in &level.keep {
                produced.extend(check_split(parent, goodset)?);
                parents_checked += 1;
            }
            produced.sort();
            let next = generate_cover(goodset, level.level + 1).map_err(|e| e.to_string())?;
            ensure(produced == next.keep, || "cover levels disagree with their splits".to_owned())?;
            level = next;
        }
        for _ in 0..200 {
            let mut parent = level.keep[rng.gen_range(0..level.keep.len())];
            for _ in enumerated..5 {
                let kids = check_split(&parent, goodset)?;
                parents_checked += 1;
                parent = kids[rng.gen_range(0..kids.len())];
            }
        }
    }
    let base = generate_cover(1, 1).map_err(|e| e.to_string())?;
    let half = DyadicInterval::unit_half(1);
    let kids: Vec<DyadicInterval> = base.keep.iter().filter(|k| k.is_within(&half)).copied().collect();
    let eighths = total_length(&kids);
    ensure(eighths == (5, 4), || format!("base split keeps {eighths:?} instead of 5/16"))?;
    Ok(format!(
        "10⁴ periodic words shift-invariant; {parents_checked} splits exact; base split keeps 5/8"
    ))
}

fn dimension() -> Result<String, String> {
    let one = dimension_bound(1).transfer;
    let two = dimension_bound(2).transfer;
    ensure((one - 0.69424).abs() < 1e-5 && (two - 0.87915).abs() < 1e-5, || {
        format!("dimensions {one}, {two}")
    })?;
    for level in 1..=12 {
        let b = dimension_bound(level);
        ensure((b.transfer - b.word_count).abs() < 1e-3, || {
            format!("N={level}: transfer {} vs word count {}", b.transfer, b.word_count)
        })?;
        ensure(b.transfer >= 1.0 - 1.0 / f64::from(level), || {
            format!("N={level}: {} below 1 − 1/N", b.transfer)
        })?;
    }
    Ok(format!("dim F_1 = {one:.6}, dim F_2 = {two:.6}; bounds hold for N ≤ 12"))
}

fn radial_decay() -> Result<String, String> {
    let p = params(6.0)?;
    let angle = DirectionAngle::new(2, 3).map_err(|e| e.to_string())?;
    let report = radial_variation(&p, &angle, 16, 1e-3).map_err(|e| e.to_string())?;
    ensure(report.converged, || "report did not converge".to_owned())?;
    ensure(report.tail_ratio <= 0.75, || format!("tail ratio {}", report.tail_ratio))?;
    let ratios = report.ratios();
    let worst = ratios[5..].iter().copied().fold(0.0, f64::max);
    ensure(worst < 0.9, || format!("largest s_(n+1)/s_n for n ≥ 5 is {worst}"))?;
    let mirror = radial_variation(&p, &angle.mirror(), 16, 1e-3).map_err(|e| e.to_string())?;
    let asymmetry = symmetric_gap(&report, &mirror);
    ensure(asymmetry < 1e-10, || format!("ψ ↔ 1−ψ differ by {asymmetry:e}"))?;
    let dyadic = DirectionAngle::new(1, 2).map_err(|e| e.to_string())?;
    ensure(
        matches!(radial_variation(&p, &dyadic, 16, 1e-3), Err(Error::DyadicAngle { .. })),
        || "ψ = 1/2 was not rejected".to_owned(),
    )?;
    Ok(format!(
        "total {:.10}, tail ratio {:.4}, max ratio {worst:.4}, asymmetry {asymmetry:.1e}",
        report.total, report.tail_ratio
    ))
}

fn symmetric_gap(x: &RadVarReport, y: &RadVarReport) -> f64 {
    let per_scale = x
        .scales
        .iter()
        .zip(&y.scales)
        .map(|(s, t)| (s.s_n - t.s_n).abs() / s.s_n)
        .fold(0.0, f64::max);
    per_scale.max((x.total - y.total).abs() / x.total)
}

fn shift_consistency() -> Result<String, String> {
    let p = params(6.0)?;
    let angle = DirectionAngle::new(2, 3).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for n in 0..=6 {
        worst = worst.max(pullback_check(&p, &angle, n).map_err(|e| e.to_string())?);
    }
    ensure(worst < 1e-5, || format!("largest pullback deviation {worst:e}"))?;
    Ok(format!("largest pullback deviation {worst:.1e} for n ≤ 6"))
}

fn self_similarity() -> Result<String, String> {
    let p = params(6.0)?;
    let table = LandmarkTable::build(&p, 1, &PoincareConfig::default()).map_err(|e| e.to_string())?;
    let c1 = table.critical(1).ok_or("no first critical point")?;
    let mut worst = 0.0f64;
    for k in 0..50 {
        let t = f64::from(k) / 49.0;
        let z = c(c1 * (1.5 * t - 0.5), 0.05 + 2.0 * t * (1.0 - t));
        worst = worst.max(selfsim_greens_residual(&p, z).map_err(|e| e.to_string())?);
    }
    ensure(worst < 1e-7, || format!("largest residual {worst:e}"))?;
    Ok(format!("largest residual {worst:.1e} over 50 samples"))
}
