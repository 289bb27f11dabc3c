//! Q2.30 signed fixed-point arithmetic.
//!
//! A value is a 32-bit signed integer `raw` read as `raw / 2^30`, giving the
//! representable range `[-2, 2 - 2^-30]` with 2 integer bits and 30
//! fractional bits. All rounding is round-to-nearest with ties away from
//! zero; results outside the range saturate at the bounds and set a sticky
//! per-thread overflow flag instead of wrapping or erroring.

use std::cell::Cell;

use thiserror::Error;

/// Fractional bits in the Q2.30 format.
pub const FRAC_BITS: u32 = 30;
const SCALE: f64 = (1u64 << FRAC_BITS) as f64;

thread_local! {
    static SATURATED: Cell<bool> = const { Cell::new(false) };
}

fn note_saturation() {
    SATURATED.with(|f| f.set(true));
}

/// Whether any fixed-point operation on this thread saturated since the
/// flag was last cleared.
pub fn saturation_seen() -> bool {
    SATURATED.with(Cell::get)
}

/// Clears this thread's sticky saturation flag.
pub fn clear_saturation() {
    SATURATED.with(|f| f.set(false));
}

/// Folds a flag captured on another thread into this thread's flag.
/// Worker pools call this after joining so saturation is never lost.
pub fn merge_saturation(seen: bool) {
    if seen {
        note_saturation();
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FixedPointError {
    #[error("value {0} outside the Q2.30 range [-2, 2)")]
    OutOfRange(f64),
}

/// Q2.30 fixed-point number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Q2_30(i32);

// The arithmetic deliberately uses named methods instead of operator
// traits: saturation and the single-rounding rule are part of the call
// site's meaning.
#[allow(clippy::should_implement_trait)]
impl Q2_30 {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1 << FRAC_BITS);
    pub const MAX: Self = Self(i32::MAX);
    pub const MIN: Self = Self(i32::MIN);

    pub const fn from_raw(raw: i32) -> Self {
        Self(raw)
    }

    pub const fn raw(self) -> i32 {
        self.0
    }

    /// Encodes a real value, rounding to the nearest representable Q2.30
    /// number (ties away from zero). Inputs outside `[-2, 2)` are rejected;
    /// the encoding error is at most `2^-31`.
    pub fn encode(x: f64) -> Result<Self, FixedPointError> {
        if !x.is_finite() || !(-2.0..2.0).contains(&x) {
            return Err(FixedPointError::OutOfRange(x));
        }
        // x * 2^30 is exact in f64; round() is ties-away-from-zero.
        // Only x >= 2 - 2^-31 rounds past i32::MAX, and the clamp keeps the
        // error within the promised 2^-31.
        let scaled = (x * SCALE).round() as i64;
        Ok(Self(scaled.clamp(i32::MIN as i64, i32::MAX as i64) as i32))
    }

    /// Like [`Q2_30::encode`] but saturates out-of-range input to the range
    /// bound and sets the sticky flag.
    pub fn encode_saturating(x: f64) -> Self {
        match Self::encode(x) {
            Ok(v) => v,
            Err(_) => {
                note_saturation();
                if x < 0.0 {
                    Self::MIN
                } else {
                    Self::MAX
                }
            }
        }
    }

    pub fn decode(self) -> f64 {
        f64::from(self.0) / SCALE
    }

    /// Fixed-point multiply: the exact 64-bit product is rescaled by `2^-30`
    /// with a single rounding, then saturated.
    pub fn mul(self, rhs: Self) -> Self {
        let product = i64::from(self.0) * i64::from(rhs.0);
        saturate(round_shift(product))
    }

    /// Saturating add.
    pub fn add(self, rhs: Self) -> Self {
        saturate(i64::from(self.0) + i64::from(rhs.0))
    }

    /// Saturating subtract.
    pub fn sub(self, rhs: Self) -> Self {
        saturate(i64::from(self.0) - i64::from(rhs.0))
    }

    pub fn neg(self) -> Self {
        saturate(-i64::from(self.0))
    }
}

/// Divides by `2^30` rounding to nearest, ties away from zero.
fn round_shift(p: i64) -> i64 {
    let half = 1i64 << (FRAC_BITS - 1);
    if p >= 0 {
        (p + half) >> FRAC_BITS
    } else {
        -((-p + half) >> FRAC_BITS)
    }
}

fn saturate(v: i64) -> Q2_30 {
    if v > i64::from(i32::MAX) {
        note_saturation();
        Q2_30::MAX
    } else if v < i64::from(i32::MIN) {
        note_saturation();
        Q2_30::MIN
    } else {
        Q2_30(v as i32)
    }
}

/// Complex number with Q2.30 real and imaginary parts, mirroring the
/// 128-bit tuple layout of the accelerator datapath (two 32-bit indices plus
/// this 64-bit value).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FixedComplex {
    pub re: Q2_30,
    pub im: Q2_30,
}

#[allow(clippy::should_implement_trait)]
impl FixedComplex {
    pub const ZERO: Self = Self {
        re: Q2_30::ZERO,
        im: Q2_30::ZERO,
    };
    pub const ONE: Self = Self {
        re: Q2_30::ONE,
        im: Q2_30::ZERO,
    };

    pub const fn new(re: Q2_30, im: Q2_30) -> Self {
        Self { re, im }
    }

    pub fn encode(re: f64, im: f64) -> Result<Self, FixedPointError> {
        Ok(Self {
            re: Q2_30::encode(re)?,
            im: Q2_30::encode(im)?,
        })
    }

    pub fn encode_saturating(re: f64, im: f64) -> Self {
        Self {
            re: Q2_30::encode_saturating(re),
            im: Q2_30::encode_saturating(im),
        }
    }

    pub fn decode(self) -> (f64, f64) {
        (self.re.decode(), self.im.decode())
    }

    /// Complex multiply from four real multiplies. Each product is rounded
    /// once by [`Q2_30::mul`]; the combining add/sub runs in 64 bits and
    /// saturates, so no second rounding occurs.
    pub fn mul(self, rhs: Self) -> Self {
        let rr = self.re.mul(rhs.re);
        let ii = self.im.mul(rhs.im);
        let ri = self.re.mul(rhs.im);
        let ir = self.im.mul(rhs.re);
        Self {
            re: saturate(i64::from(rr.raw()) - i64::from(ii.raw())),
            im: saturate(i64::from(ri.raw()) + i64::from(ir.raw())),
        }
    }

    /// Componentwise saturating add.
    pub fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re.add(rhs.re),
            im: self.im.add(rhs.im),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: self.im.neg(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.re.raw() == 0 && self.im.raw() == 0
    }
}
