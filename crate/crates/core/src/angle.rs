//! Exact rational direction angles `ψ = p/q ∈ (0, 1)`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Largest admitted denominator; keeps `2·q` and products in range.
pub const MAX_DENOMINATOR: u64 = 1 << 62;

/// A reduced fraction `num/den` with `0 < num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectionAngle {
    num: u64,
    den: u64,
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

/// `(2^e · base) mod modulus` by square-and-multiply.
pub(crate) fn mul_pow2_mod(base: u64, e: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc = base as u128 % m;
    let mut sq = 2u128 % m;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * sq % m;
        }
        sq = sq * sq % m;
        e >>= 1;
    }
    acc as u64
}

impl DirectionAngle {
    /// Builds `num/den`, reducing the fraction.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || den > MAX_DENOMINATOR {
            return Err(Error::InvalidArgument("angle denominator out of range"));
        }
        if num == 0 || num >= den {
            return Err(Error::InvalidArgument("angle must lie strictly between 0 and 1"));
        }
        let d = gcd(num, den);
        Ok(DirectionAngle {
            num: num / d,
            den: den / d,
        })
    }

    /// The real ray `ψ = 0`, used internally for the positive axis.
    pub(crate) const fn zero() -> Self {
        DirectionAngle { num: 0, den: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `den` is a power of two.
    pub fn is_dyadic(&self) -> bool {
        self.den.is_power_of_two()
    }

    /// Returns `Err(DyadicAngle)` for dyadic angles.
    pub fn require_non_dyadic(&self) -> Result<()> {
        if self.is_dyadic() {
            Err(Error::DyadicAngle {
                num: self.num,
                den: self.den,
            })
        } else {
            Ok(())
        }
    }

    /// For a dyadic angle `k/2^m` with `k` odd, returns `m`.
    pub fn dyadic_order(&self) -> Option<u32> {
        self.is_dyadic().then(|| self.den.trailing_zeros())
    }

    /// The `k`-th binary digit, `k ≥ 1`, of the terminating-free expansion.
    pub fn bit(&self, k: u64) -> u8 {
        debug_assert!(k >= 1);
        let r = mul_pow2_mod(self.num, k - 1, self.den);
        u8::from(2 * r >= self.den)
    }

    /// `2ⁿ·num mod 2·den`, so that `2ⁿπψ ≡ π·r/den (mod 2π)`.
    pub(crate) fn doubled_residue(&self, n: u64) -> u64 {
        mul_pow2_mod(self.num, n, 2 * self.den)
    }

    /// `1 − ψ`.
    pub fn mirror(&self) -> Self {
        if self.num == 0 {
            return *self;
        }
        DirectionAngle {
            num: self.den - self.num,
            den: self.den,
        }
    }

    /// Fractional part of `2ψ`, together with whether `2ψ > 1`.
    pub fn double(&self) -> Result<(Self, bool)> {
        self.require_non_dyadic()?;
        let twice = 2 * self.num;
        let mirrored = twice > self.den;
        let shifted = Self::new(twice % self.den, self.den)?;
        Ok((shifted, mirrored))
    }

    /// Fractional part of `2ⁿψ` for a non-dyadic angle.
    pub fn shift_by(&self, n: u64) -> Result<Self> {
        self.require_non_dyadic()?;
        Self::new(mul_pow2_mod(self.num, n, self.den), self.den)
    }

    /// Pre-period and period of the binary expansion.
    pub fn expansion(&self) -> Result<(Vec<u8>, Vec<u8>)> {
        self.require_non_dyadic()?;
        let pre = u64::from(self.den.trailing_zeros());
        let odd = self.den >> pre;
        let mut period = 1u64;
        let mut r = 2 % odd;
        while r != 1 {
            r = (r as u128 * 2 % odd as u128) as u64;
            period += 1;
        }
        let prefix = (1..=pre).map(|k| self.bit(k)).collect();
        let cycle = (pre + 1..=pre + period).map(|k| self.bit(k)).collect();
        Ok((prefix, cycle))
    }
}

impl fmt::Display for DirectionAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for DirectionAngle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .trim()
            .split_once('/')
            .ok_or(Error::InvalidArgument("angle must be written as p/q"))?;
        let num = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument("angle numerator is not an integer"))?;
        let den = q
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument("angle denominator is not an integer"))?;
        Self::new(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn ang(p: u64, q: u64) -> DirectionAngle {
        DirectionAngle::new(p, q).unwrap()
    }

    #[test]
    fn parse_and_reduce() {
        let a: DirectionAngle = "4/6".parse().unwrap();
        assert_eq!((a.numerator(), a.denominator()), (2, 3));
        assert!("1/1".parse::<DirectionAngle>().is_err());
        assert!("0/5".parse::<DirectionAngle>().is_err());
        assert!("3".parse::<DirectionAngle>().is_err());
        assert!("x/4".parse::<DirectionAngle>().is_err());
        assert_eq!(ang(5, 12).to_string(), "5/12");
    }

    #[test]
    fn dyadic_detection() {
        assert!(ang(1, 2).is_dyadic());
        assert_eq!(ang(3, 8).dyadic_order(), Some(3));
        assert!(!ang(2, 3).is_dyadic());
        assert!(matches!(
            ang(1, 2).double(),
            Err(Error::DyadicAngle { num: 1, den: 2 })
        ));
    }

    #[test]
    fn bits_of_two_thirds() {
        let a = ang(2, 3);
        let bits: Vec<u8> = (1..=6).map(|k| a.bit(k)).collect();
        assert_eq!(bits, [1, 0, 1, 0, 1, 0]);
        assert_eq!(a.expansion().unwrap(), (vec![], vec![1, 0]));
    }

    #[test]
    fn expansion_with_prefix() {
        // 5/12 = 0.01(10) in binary.
        let (pre, per) = ang(5, 12).expansion().unwrap();
        assert_eq!(pre, [0, 1]);
        assert_eq!(per, [1, 0]);
        let (pre, per) = ang(1, 7).expansion().unwrap();
        assert!(pre.is_empty());
        assert_eq!(per, [0, 0, 1]);
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(ang(2, 3).double().unwrap(), (ang(1, 3), true));
        assert_eq!(ang(5, 12).double().unwrap(), (ang(5, 6), false));
        assert_eq!(ang(2, 3).shift_by(3).unwrap(), ang(1, 3));
        assert_eq!(ang(2, 3).mirror(), ang(1, 3));
    }

    #[test]
    fn residue_is_exact_for_deep_shifts() {
        let a = ang(2, 3);
        // 2^n · 2 mod 6 alternates between 4 and 2.
        assert_eq!(a.doubled_residue(60), 2);
        assert_eq!(a.doubled_residue(61), 4);
        assert_eq!(mul_pow2_mod(1, 64, 1_000_000_007), 582344008);
    }

    proptest::proptest! {
        #[test]
        fn shift_drops_first_bit(p in 1u64..1000, q in 2u64..1000) {
            proptest::prop_assume!(p < q);
            let a = DirectionAngle::new(p, q).unwrap();
            proptest::prop_assume!(!a.is_dyadic());
            let s = a.shift_by(1).unwrap();
            for k in 1..30 {
                proptest::prop_assert_eq!(s.bit(k), a.bit(k + 1));
            }
            proptest::prop_assert_eq!(a.double().unwrap().1, a.bit(1) == 1);
        }

        #[test]
        fn mirror_complements_bits(p in 1u64..1000, q in 2u64..1000) {
            proptest::prop_assume!(p < q);
            let a = DirectionAngle::new(p, q).unwrap();
            proptest::prop_assume!(!a.is_dyadic());
            for k in 1..30 {
                proptest::prop_assert_eq!(a.mirror().bit(k), 1 - a.bit(k));
            }
        }
    }
}
