//! Good-direction sets `F_N`: angles whose binary digits never repeat more
//! than `N + 1` times in a row.
//!
//! Besides membership and the shift, the module builds the nested dyadic
//! covers of `F_N` in exact arithmetic and computes the Hausdorff dimension
//! of the run-length-limited subshift.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;


use crate::angle::DirectionAngle;
use crate::error::{Error, Result};

/// A finite binary word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord(pub Vec<u8>);

impl BitWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length of the longest block of equal consecutive digits.
    pub fn max_run(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        let mut last = None;
        for &b in &self.0 {
            run = if Some(b) == last { run + 1 } else { 1 };
            last = Some(b);
            best = best.max(run);
        }
        best
    }

    /// No run is longer than `level + 1`.
    pub fn is_admissible(&self, level: u32) -> bool {
        self.max_run() <= level as usize + 1
    }

    pub fn reversed(&self) -> Self {
        BitWord(self.0.iter().rev().copied().collect())
    }

    pub fn complemented(&self) -> Self {
        BitWord(self.0.iter().map(|b| 1 - b).collect())
    }

    /// Drops the first digit.
    pub fn shifted(&self) -> Self {
        BitWord(self.0.iter().skip(1).copied().collect())
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidArgument("bit words contain only 0 and 1")),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitWord)
    }
}

/// Whether a rational angle lies in `F_N`.
///
/// The expansion is scanned over its pre-period and two full periods, which
/// contains every block of equal digits up to its full length.
pub fn membership(angle: &DirectionAngle, level: u32) -> Result<bool> {
    let (prefix, period) = angle.expansion()?;
    let mut bits = prefix;
    bits.extend_from_slice(&period);
    bits.extend_from_slice(&period);
    Ok(BitWord(bits).is_admissible(level))
}

/// Membership of a word, read as a prefix of an expansion.
pub fn membership_word(word: &BitWord, level: u32) -> bool {
    word.is_admissible(level)
}

/// Fractional part of `2ψ`; the expansion shifts one place left.
pub fn shift(angle: &DirectionAngle) -> Result<DirectionAngle> {
    angle.shift_by(1)
}

/// Dyadic interval `[index/2^len, (index+1)/2^len]` named by its index word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    /// Binary digits of the left endpoint numerator.
    pub index: u128,
    /// Word length, so the length of the interval is `2^{−len}`.
    pub len: u32,
}

/// Longest index word the exact representation holds.
pub const MAX_WORD_LEN: u32 = 120;

impl Ord for DyadicInterval {
    /// Orders by left endpoint, then by length (longer first).
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        let key = |iv: &Self| (iv.index << (MAX_WORD_LEN - iv.len), iv.len);
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for DyadicInterval {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl DyadicInterval {
    pub fn unit_half(bit: u8) -> Self {
        DyadicInterval {
            index: u128::from(bit),
            len: 1,
        }
    }

    pub fn last_bit(&self) -> u8 {
        (self.index & 1) as u8
    }

    /// Last two digits, most significant first.
    fn tail2(&self) -> (u8, u8) {
        (((self.index >> 1) & 1) as u8, self.last_bit())
    }

    pub fn child(&self, bit: u8) -> Self {
        DyadicInterval {
            index: (self.index << 1) | u128::from(bit),
            len: self.len + 1,
        }
    }

    /// Appends `count` copies of `bit`.
    pub fn extend(&self, bit: u8, count: u32) -> Self {
        (0..count).fold(*self, |acc, _| acc.child(bit))
    }

    pub fn word(&self) -> BitWord {
        BitWord(
            (0..self.len)
                .rev()
                .map(|k| ((self.index >> k) & 1) as u8)
                .collect(),
        )
    }

    pub fn word_string(&self) -> String {
        use core::fmt::Write;
        let mut s = String::with_capacity(self.len as usize);
        for b in self.word().0 {
            let _ = write!(s, "{b}");
        }
        s
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &DyadicInterval) -> bool {
        self.len >= other.len && (self.index >> (self.len - other.len)) == other.index
    }

    /// Left endpoint and right endpoint as floats.
    pub fn bounds(&self) -> (f64, f64) {
        let scale = 0.5f64.powi(self.len as i32);
        (self.index as f64 * scale, (self.index + 1) as f64 * scale)
    }

    /// Whether the real number `x` lies in the closed interval.
    pub fn contains_value(&self, x: f64) -> bool {
        let (lo, hi) = self.bounds();
        lo <= x && x <= hi
    }

    /// Exact containment of a rational `num/den`.
    pub fn contains_rational(&self, num: u64, den: u64) -> bool {
        // index/2^len ≤ num/den ≤ (index+1)/2^len
        let exact = 1u128.checked_shl(self.len).and_then(|scale| {
            let lo = self.index.checked_mul(u128::from(den))?;
            let mid = u128::from(num).checked_mul(scale)?;
            Some(lo <= mid && mid <= lo.checked_add(u128::from(den))?)
        });
        exact.unwrap_or_else(|| self.contains_value(num as f64 / den as f64))
    }
}

/// Keep and drop children of one interval under an order-`m` split.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub keep: Vec<DyadicInterval>,
    pub drop: Vec<DyadicInterval>,
}

/// Splits an interval whose index word ends in a run of length one.
///
/// The order-`m` split keeps the subintervals on which the digits following
/// the word, read together with its last digit, have no run longer than `m`
/// before the pattern is resolved, and drops the subintervals that force a
/// run of length `m + 1`.
pub fn split_interval(parent: &DyadicInterval, order: u32) -> Result<Split> {
    if order < 2 {
        return Err(Error::InvalidArgument("split order must be at least 2"));
    }
    // Each order adds at most `order + 1` digits beyond the previous one.
    if parent.len + order * (order + 3) / 2 > MAX_WORD_LEN {
        return Err(Error::InvalidArgument("index word too long for exact storage"));
    }
    let b = parent.last_bit();
    let c = 1 - b;
    let mut split = Split {
        keep: alloc::vec![parent.child(0).child(1), parent.child(1).child(0)],
        drop: alloc::vec![parent.extend(b, 2), parent.extend(c, 3)],
    };
    split.keep.push(parent.extend(c, 2).child(b));
    for m in 2..order {
        let mut next = Split::default();
        for j in &split.drop {
            let t = j.last_bit();
            next.drop.push(j.child(t));
            next.keep.push(j.child(1 - t));
        }
        for j in &split.keep {
            let (_, t) = j.tail2();
            let other = 1 - t;
            // Keep J_{o}, J_{t o}, …, J_{t^m o} and drop J_{t^{m+1}}, where
            // t is the last digit of J.
            next.keep.push(j.child(other));
            for r in 1..=m {
                next.keep.push(j.extend(t, r).child(other));
            }
            next.drop.push(j.extend(t, m + 1));
        }
        split = next;
    }
    split.keep.sort();
    split.drop.sort();
    Ok(split)
}

/// One level of the nested cover of `F_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicCoverLevel {
    pub goodset_level: u32,
    pub level: u32,
    pub keep: Vec<DyadicInterval>,
    /// Intervals removed when this level was produced from the previous one.
    pub drop: Vec<DyadicInterval>,
}

/// Default cap on the number of intervals in one level.
pub const DEFAULT_INTERVAL_CAP: usize = 1 << 22;

/// The level-`k` cover of `F_N`, built from `{[0,½], [½,1]}` by `k` splits.
pub fn generate_cover(level: u32, k: u32) -> Result<DyadicCoverLevel> {
    generate_cover_capped(level, k, DEFAULT_INTERVAL_CAP)
}

pub fn generate_cover_capped(level: u32, k: u32, cap: usize) -> Result<DyadicCoverLevel> {
    if level == 0 {
        return Err(Error::InvalidArgument("good-set level must be at least 1"));
    }
    let order = level + 1;
    let mut current = DyadicCoverLevel {
        goodset_level: level,
        level: 0,
        keep: alloc::vec![DyadicInterval::unit_half(0), DyadicInterval::unit_half(1)],
        drop: Vec::new(),
    };
    for step in 1..=k {
        let mut keep = Vec::new();
        let mut drop = Vec::new();
        for parent in &current.keep {
            let split = match split_interval(parent, order) {
                Ok(s) => s,
                Err(_) => {
                    return Err(Error::CapExceeded {
                        partial: Box::new(current),
                    })
                }
            };
            keep.extend(split.keep);
            drop.extend(split.drop);
            if keep.len() > cap {
                return Err(Error::CapExceeded {
                    partial: Box::new(current),
                });
            }
        }
        current = DyadicCoverLevel {
            goodset_level: level,
            level: step,
            keep,
            drop,
        };
    }
    Ok(current)
}

/// Exact sum of `2^{−len}` over the intervals, as `numerator / 2^{denominator_log2}`.
pub fn total_length(intervals: &[DyadicInterval]) -> (u128, u32) {
    let Some(max_len) = intervals.iter().map(|iv| iv.len).max() else {
        return (0, 0);
    };
    let num = intervals
        .iter()
        .map(|iv| 1u128 << (max_len - iv.len))
        .sum();
    (num, max_len)
}

/// Hausdorff dimension of the run-limited subshift of `F_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionBound {
    pub level: u32,
    /// `log₂` of the spectral radius of the transfer matrix.
    pub transfer: f64,
    /// `log₂(#W(L)/#W(L−1))` with `W(L)` the admissible words of length `L`.
    pub word_count: f64,
    pub word_length: u32,
}

/// Spectral radius of the transfer matrix on states `(digit, run length)`.
fn transfer_radius(max_run: usize) -> f64 {
    // By the 0↔1 symmetry, the dominant eigenvector is symmetric and the
    // matrix reduces to one digit: from run r go to r + 1 (if r < max_run)
    // or back to run 1 with the other digit.
    let mut v = alloc::vec![1.0f64; max_run];
    let mut radius = 0.0;
    for _ in 0..10_000 {
        let mut next = alloc::vec![0.0f64; max_run];
        let total: f64 = v.iter().sum();
        next[0] = total;
        next[1..max_run].copy_from_slice(&v[..max_run - 1]);
        let norm = next.iter().copied().fold(0.0, f64::max);
        let estimate = next[0] / v[0];
        for x in &mut next {
            *x /= norm;
        }
        let done = (estimate - radius).abs() <= 1e-16 * estimate;
        radius = estimate;
        v = next;
        if done {
            break;
        }
    }
    radius
}

/// Number of binary words of length `len` with no run longer than `max_run`.
pub fn admissible_word_count(len: u32, max_run: usize) -> u128 {
    if len == 0 {
        return 1;
    }
    // counts[r] = words ending in a run of length r + 1 (per digit).
    let mut counts = alloc::vec![0u128; max_run];
    counts[0] = 1;
    for _ in 1..len {
        let total: u128 = counts.iter().sum();
        let mut next = alloc::vec![0u128; max_run];
        next[0] = total;
        next[1..max_run].copy_from_slice(&counts[..max_run - 1]);
        counts = next;
    }
    2 * counts.iter().sum::<u128>()
}

/// Length used for the word-count estimate.
pub const WORD_COUNT_LENGTH: u32 = 40;

pub fn dimension_bound(level: u32) -> DimensionBound {
    let max_run = level as usize + 1;
    let transfer = transfer_radius(max_run).log2();
    let top = admissible_word_count(WORD_COUNT_LENGTH, max_run) as f64;
    let below = admissible_word_count(WORD_COUNT_LENGTH - 1, max_run) as f64;
    DimensionBound {
        level,
        transfer,
        word_count: (top / below).log2(),
        word_length: WORD_COUNT_LENGTH,
    }
}
