//! Minimal real-number abstraction so the Hermite and Chebyshev routines can
//! run in `f64` or in arbitrary precision.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode};

pub trait Real:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    fn pi() -> Self;
    fn exp(&self) -> Self;
    fn cos(&self) -> Self;
    fn sin(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool {
        *self == Self::from_i64(0)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Working precision of [`BigReal`] in bits.
pub const BIG_PRECISION: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Arbitrary-precision real with [`BIG_PRECISION`] bits of mantissa.
#[derive(Clone, Debug)]
pub struct BigReal(pub BigFloat);

impl BigReal {
    fn wrap(x: BigFloat) -> Self {
        debug_assert!(!x.is_nan(), "NaN in arbitrary-precision arithmetic");
        Self(x)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl Add for BigReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::wrap(self.0.add(&rhs.0, BIG_PRECISION, RM))
    }
}

impl Sub for BigReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::wrap(self.0.sub(&rhs.0, BIG_PRECISION, RM))
    }
}

impl Mul for BigReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::wrap(self.0.mul(&rhs.0, BIG_PRECISION, RM))
    }
}

impl Div for BigReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::wrap(self.0.div(&rhs.0, BIG_PRECISION, RM))
    }
}

impl Neg for BigReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.neg())
    }
}

impl Real for BigReal {
    fn from_f64(x: f64) -> Self {
        Self(BigFloat::from_f64(x, BIG_PRECISION))
    }
    fn from_i64(x: i64) -> Self {
        Self(BigFloat::from_i64(x, BIG_PRECISION))
    }
    fn pi() -> Self {
        CONSTS.with(|cc| Self(cc.borrow_mut().pi(BIG_PRECISION, RM)))
    }
    fn exp(&self) -> Self {
        CONSTS.with(|cc| Self::wrap(self.0.exp(BIG_PRECISION, RM, &mut cc.borrow_mut())))
    }
    fn cos(&self) -> Self {
        CONSTS.with(|cc| Self::wrap(self.0.cos(BIG_PRECISION, RM, &mut cc.borrow_mut())))
    }
    fn sin(&self) -> Self {
        CONSTS.with(|cc| Self::wrap(self.0.sin(BIG_PRECISION, RM, &mut cc.borrow_mut())))
    }
    fn sqrt(&self) -> Self {
        Self::wrap(self.0.sqrt(BIG_PRECISION, RM))
    }
    fn abs(&self) -> Self {
        Self(self.0.abs())
    }
    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        // Decimal rendering parses back to the nearest double.
        format!("{}", self.0).parse().unwrap_or(f64::NAN)
    }
}
