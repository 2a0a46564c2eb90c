use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// An exact dyadic rational `num / 2^shift`.
///
/// Kept in lowest terms: when `shift > 0` the numerator is odd, and zero is
/// always `0 / 2^0`. Every cube corner and region volume in the crate is one
/// of these, so equality and ordering are exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "(i128, u32)", try_from = "(i128, u32)")]
pub struct Dyadic {
    num: i128,
    shift: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, shift: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, shift: 0 };

    pub fn new(num: i128, shift: u32) -> Self {
        Dyadic { num, shift }.normalized()
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic {
            num: v as i128,
            shift: 0,
        }
    }

    /// `2^e` for any integer `e`.
    pub fn pow2(e: i32) -> Self {
        if e >= 0 {
            Dyadic {
                num: 1i128
                    .checked_shl(e as u32)
                    .filter(|v| *v > 0)
                    .expect("dyadic overflow"),
                shift: 0,
            }
        } else {
            Dyadic {
                num: 1,
                shift: (-e) as u32,
            }
        }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn signum(&self) -> i32 {
        self.num.signum() as i32
    }

    pub fn half(self) -> Self {
        Dyadic::new(self.num, self.shift + 1)
    }

    /// Multiply by `2^e`.
    pub fn scale_pow2(self, e: i32) -> Self {
        if e >= 0 {
            let e = e as u32;
            if e <= self.shift {
                Dyadic::new(self.num, self.shift - e)
            } else {
                Dyadic::new(shl(self.num, e - self.shift), 0)
            }
        } else {
            Dyadic::new(self.num, self.shift + (-e) as u32)
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Exact when the numerator fits in 53 bits, which holds for every
    /// coordinate the crate produces at practical depths.
    pub fn to_f64(self) -> f64 {
        self.num as f64 * (-(self.shift as f64)).exp2()
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num),
            BigInt::from(1u8) << self.shift as usize,
        )
    }

    /// Floor of `self * 2^e` as an integer.
    pub fn floor_scaled(self, e: i32) -> i128 {
        let v = self.scale_pow2(e);
        if v.shift == 0 {
            v.num
        } else {
            v.num.div_euclid(1i128 << v.shift)
        }
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            self.shift = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().min(self.shift);
        self.num >>= tz;
        self.shift -= tz;
        self
    }

    fn aligned(a: Self, b: Self) -> (i128, i128, u32) {
        let s = a.shift.max(b.shift);
        (shl(a.num, s - a.shift), shl(b.num, s - b.shift), s)
    }
}

fn shl(v: i128, by: u32) -> i128 {
    if v == 0 {
        return 0;
    }
    let r = v.checked_shl(by).expect("dyadic overflow");
    assert_eq!(r >> by, v, "dyadic overflow");
    r
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<Dyadic> for (i128, u32) {
    fn from(d: Dyadic) -> Self {
        (d.num, d.shift)
    }
}

impl TryFrom<(i128, u32)> for Dyadic {
    type Error = std::convert::Infallible;
    fn try_from(v: (i128, u32)) -> Result<Self, Self::Error> {
        Ok(Dyadic::new(v.0, v.1))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, s) = Dyadic::aligned(self, rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), s)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            shift: self.shift,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        Dyadic::new(
            self.num.checked_mul(rhs.num).expect("dyadic overflow"),
            self.shift + rhs.shift,
        )
    }
}

impl Mul<i64> for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: i64) -> Dyadic {
        self * Dyadic::from_int(rhs)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(*self, *other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.shift)
        }
    }
}
