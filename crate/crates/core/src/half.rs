//! Software IEEE-754 binary16.
//!
//! Conversions round to nearest, ties to even. Subnormals are kept, values
//! past the largest finite half overflow to infinity, and every NaN maps to
//! the single quiet pattern [`Half::NAN`].

use std::fmt;
use std::ops::{Add, Neg};

/// A binary16 value stored as its raw bit pattern.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Half(u16);

impl Half {
    pub const ZERO: Half = Half(0x0000);
    pub const ONE: Half = Half(0x3C00);
    pub const INFINITY: Half = Half(0x7C00);
    pub const NEG_INFINITY: Half = Half(0xFC00);
    /// Canonical quiet NaN.
    pub const NAN: Half = Half(0x7E00);
    /// Largest finite value, 65504.
    pub const MAX: Half = Half(0x7BFF);
    /// Smallest positive subnormal, 2^-24.
    pub const MIN_POSITIVE_SUBNORMAL: Half = Half(0x0001);

    #[inline]
    pub const fn from_bits(bits: u16) -> Half {
        Half(bits)
    }

    #[inline]
    pub const fn to_bits(self) -> u16 {
        self.0
    }

    #[inline]
    pub fn from_f32(v: f32) -> Half {
        f32_to_half(v)
    }

    #[inline]
    pub fn to_f32(self) -> f32 {
        half_to_f32(self)
    }

    #[inline]
    pub fn is_nan(self) -> bool {
        self.0 & 0x7C00 == 0x7C00 && self.0 & 0x03FF != 0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0 & 0x7FFF == 0x7C00
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 & 0x7C00 != 0x7C00
    }

    /// Distance to the next representable value away from zero.
    pub fn ulp(self) -> f32 {
        let exp = ((self.0 >> 10) & 0x1F) as i32;
        // Subnormals and the smallest normal binade share a spacing of 2^-24.
        let e = exp.max(1);
        libm::ldexpf(1.0, e - 25)
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Half({:#06x} = {})", self.0, self.to_f32())
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f32(), f)
    }
}

impl From<Half> for f32 {
    fn from(h: Half) -> f32 {
        h.to_f32()
    }
}

impl Add for Half {
    type Output = Half;

    fn add(self, rhs: Half) -> Half {
        half_add(self, rhs)
    }
}

impl Neg for Half {
    type Output = Half;

    fn neg(self) -> Half {
        if self.is_nan() {
            self
        } else {
            Half(self.0 ^ 0x8000)
        }
    }
}

/// Rounds a binary32 value to binary16.
pub fn f32_to_half(v: f32) -> Half {
    let x = v.to_bits();
    let sign = ((x >> 16) & 0x8000) as u16;
    let exp = ((x >> 23) & 0xFF) as i32;
    let man = x & 0x007F_FFFF;

    if exp == 0xFF {
        return if man != 0 { Half::NAN } else { Half(sign | 0x7C00) };
    }
    // binary32 subnormals are far below half the smallest binary16 subnormal.
    if exp == 0 {
        return Half(sign);
    }

    // Re-biased exponent in binary16 terms.
    let e = exp - 127 + 15;
    if e >= 31 {
        return Half(sign | 0x7C00);
    }

    let sig = man | 0x0080_0000;
    // 13 for normal results, more for subnormal ones.
    let shift = (14 - e).max(13) as u32;
    if shift > 24 {
        return Half(sign);
    }
    let mut q = sig >> shift;
    let rem = sig & ((1 << shift) - 1);
    let halfway = 1 << (shift - 1);
    if rem > halfway || (rem == halfway && q & 1 == 1) {
        q += 1;
    }

    // A carry out of the mantissa bumps the exponent, up to infinity.
    let bits = if e <= 0 { q } else { (((e - 1) as u32) << 10) + q };
    Half(sign | bits as u16)
}

/// Widens a binary16 value to binary32. Exact for every input.
pub fn half_to_f32(h: Half) -> f32 {
    let bits = h.0 as u32;
    let sign = (bits & 0x8000) << 16;
    let exp = (bits >> 10) & 0x1F;
    let man = bits & 0x03FF;

    let out = match (exp, man) {
        (0, 0) => sign,
        (0, m) => {
            // Normalize the subnormal into a binary32 normal.
            let lead = 31 - m.leading_zeros(); // position of the top set bit, < 10
            let e32 = lead + 127 - 24;
            let m32 = (m << (23 - lead)) & 0x007F_FFFF;
            sign | (e32 << 23) | m32
        }
        (0x1F, 0) => sign | 0x7F80_0000,
        (0x1F, _) => 0x7FC0_0000,
        (e, m) => sign | ((e + 127 - 15) << 23) | (m << 13),
    };
    f32::from_bits(out)
}

/// Widen both operands, add once in binary32, round once back to binary16.
pub fn half_add(a: Half, b: Half) -> Half {
    f32_to_half(half_to_f32(a) + half_to_f32(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_examples() {
        assert_eq!(f32_to_half(1.0).to_bits(), 0x3C00);
        assert_eq!(f32_to_half(0.1).to_bits(), 0x2E66);
        assert_eq!(half_to_f32(Half::from_bits(0x2E66)) as f64, 0.099_975_585_937_5);
        assert_eq!(f32_to_half(65520.0), Half::INFINITY);
        assert_eq!(f32_to_half(-65520.0), Half::NEG_INFINITY);
        assert_eq!(f32_to_half(65504.0), Half::MAX);
        assert_eq!(half_to_f32(Half::from_bits(0x3C00)), 1.0);
        assert_eq!(half_to_f32(Half::from_bits(0xFC00)), f32::NEG_INFINITY);
    }

    #[test]
    fn largest_value_below_overflow_rounds_to_max() {
        // 65519.996 sits just below the tie point between 65504 and 65536.
        assert_eq!(f32_to_half(65519.996), Half::MAX);
    }

    #[test]
    fn nan_is_canonical() {
        assert_eq!(f32_to_half(f32::NAN), Half::NAN);
        assert_eq!(f32_to_half(-f32::NAN), Half::NAN);
        assert_eq!(f32_to_half(f32::from_bits(0x7F80_0001)), Half::NAN);
        assert!(half_to_f32(Half::from_bits(0xFE01)).is_nan());
        assert_eq!(half_to_f32(Half::from_bits(0xFE01)).to_bits(), 0x7FC0_0000);
    }

    #[test]
    fn subnormals_are_kept() {
        let tiny = libm::ldexpf(1.0, -24);
        assert_eq!(f32_to_half(tiny), Half::MIN_POSITIVE_SUBNORMAL);
        assert_eq!(half_to_f32(Half::MIN_POSITIVE_SUBNORMAL), tiny);
        // Exactly half of the smallest subnormal ties to even, which is zero.
        assert_eq!(f32_to_half(tiny / 2.0), Half::ZERO);
        assert_eq!(f32_to_half(tiny * 0.75), Half::MIN_POSITIVE_SUBNORMAL);
        assert_eq!(f32_to_half(-tiny * 1.5).to_bits(), 0x8002);
        assert_eq!(f32_to_half(f32::MIN_POSITIVE), Half::ZERO);
        // Largest subnormal rounds up into the smallest normal.
        assert_eq!(
            f32_to_half(libm::ldexpf(1.0, -14) - libm::ldexpf(1.0, -26)).to_bits(),
            0x0400
        );
    }

    #[test]
    fn signed_zero() {
        assert_eq!(f32_to_half(-0.0).to_bits(), 0x8000);
        assert_eq!(half_to_f32(Half::from_bits(0x8000)).to_bits(), 0x8000_0000);
    }

    #[test]
    fn add_examples() {
        let two = half_add(Half::ONE, Half::ONE);
        assert_eq!(two.to_f32(), 2.0);
        let big = half_add(f32_to_half(2048.0), Half::ONE);
        assert_eq!(big.to_f32(), 2048.0);
        let tenth = f32_to_half(0.1);
        assert_eq!((tenth + tenth).to_f32() as f64, 0.199_951_171_875);
        assert!(half_add(Half::INFINITY, Half::NEG_INFINITY).is_nan());
        assert_eq!(half_add(Half::INFINITY, Half::ONE), Half::INFINITY);
    }

    #[test]
    fn ulp_spacing() {
        assert_eq!(Half::ONE.ulp(), libm::ldexpf(1.0, -10));
        assert_eq!(f32_to_half(2048.0).ulp(), 2.0);
        assert_eq!(Half::MIN_POSITIVE_SUBNORMAL.ulp(), libm::ldexpf(1.0, -24));
    }

    #[test]
    fn integers_up_to_2048_are_exact() {
        for n in -2048..=2048 {
            assert_eq!(f32_to_half(n as f32).to_f32(), n as f32);
        }
        assert_eq!(f32_to_half(2049.0).to_f32(), 2048.0);
        assert_eq!(f32_to_half(2051.0).to_f32(), 2052.0);
    }
}
