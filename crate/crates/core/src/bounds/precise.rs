//! Outward-rounded interval evaluation of natural logarithms of positive
//! rationals.
//!
//! Values are carried as fixed-point integers scaled by `2^W`. Every
//! rounding step moves the lower end down and the upper end up, so the
//! returned interval always contains the true value.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Default working precision in bits (about 60 decimal digits).
pub const DEFAULT_PREC: u32 = 200;

/// A closed interval `[lo, hi]` of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `ceil` of the value if both ends agree.
    pub fn ceil(&self) -> Option<BigInt> {
        let (a, b) = (self.lo.ceil().to_integer(), self.hi.ceil().to_integer());
        (a == b).then_some(a)
    }

    pub fn midpoint_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(2.into())))
    }
}

/// Nearest-ish f64 of a rational, robust to huge numerators/denominators.
pub fn to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let neg = x.is_negative();
    let (num, den) = (x.numer().abs(), x.denom().clone());
    let shift = num.bits() as i64 - den.bits() as i64;
    // scale to ~64 significant bits before converting
    let scaled = if shift > 64 {
        num / (den << (shift - 64) as usize)
    } else {
        (num << (64 - shift) as usize) / den
    };
    let mant: f64 = scaled.to_string().parse().unwrap_or(f64::NAN);
    let v = mant * 2f64.powi((shift - 64) as i32);
    if neg {
        -v
    } else {
        v
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `floor(x * 2^w)` and `ceil(x * 2^w)`.
fn to_fixed(x: &BigRational, w: u32) -> (BigInt, BigInt) {
    let num = x.numer() << w as usize;
    (floor_div(&num, x.denom()), ceil_div(&num, x.denom()))
}

fn from_fixed(v: &BigInt, w: u32) -> BigRational {
    BigRational::new(v.clone(), BigInt::one() << w as usize)
}

/// Bounds on `atanh(z)` for fixed-point `z` in `[0, 1/3]`, one bound per
/// call depending on `up`.
fn atanh_fixed(z: &BigInt, w: u32, up: bool) -> BigInt {
    let scale = BigInt::one() << w as usize;
    let round = |a: &BigInt| -> BigInt {
        if up {
            ceil_div(a, &scale)
        } else {
            floor_div(a, &scale)
        }
    };
    let z2 = round(&(z * z));
    let mut power = z.clone();
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    // stop once z^(2j+1) < 2^-(w-8); the geometric tail is then below
    // (9/8) * 2^-(w-8) and is added to the upper bound
    let cutoff = BigInt::one() << 8usize;
    while power >= cutoff {
        let d = BigInt::from(2 * j + 1);
        sum += if up {
            ceil_div(&power, &d)
        } else {
            floor_div(&power, &d)
        };
        power = round(&(&power * &z2));
        j += 1;
    }
    if up {
        sum += BigInt::from(2) << 8usize;
    }
    sum
}

/// Interval for `ln 2 = 2 atanh(1/3)` at fixed point `w`.
fn ln2_fixed(w: u32) -> (BigInt, BigInt) {
    let third = BigRational::new(1.into(), 3.into());
    let (zl, zh) = to_fixed(&third, w);
    (
        atanh_fixed(&zl, w, false) * 2,
        atanh_fixed(&zh, w, true) * 2,
    )
}

/// Interval containing `ln(x)` for rational `x > 0`, with width about
/// `2^-prec` (times the binary exponent of `x`).
pub fn ln(x: &BigRational, prec: u32) -> Interval {
    assert!(x.is_positive(), "ln of non-positive value");
    let w = prec + 32;
    // x = 2^e * m with m in [1, 2)
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow2 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut m = x / pow2(e);
    let two = BigRational::from_integer(2.into());
    while m >= two {
        m /= &two;
        e += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        e -= 1;
    }
    // ln m = 2 atanh((m - 1)/(m + 1)), argument in [0, 1/3)
    let z = (&m - BigRational::one()) / (&m + BigRational::one());
    let (zl, zh) = to_fixed(&z, w);
    let (al, ah) = (
        atanh_fixed(&zl, w, false) * 2,
        atanh_fixed(&zh, w, true) * 2,
    );
    let (l2l, l2h) = ln2_fixed(w);
    let eb = BigInt::from(e);
    let (el, eh) = match eb.sign() {
        Sign::Minus => (&eb * &l2h, &eb * &l2l),
        _ => (&eb * &l2l, &eb * &l2h),
    };
    Interval {
        lo: from_fixed(&(al + el), w),
        hi: from_fixed(&(ah + eh), w),
    }
}
