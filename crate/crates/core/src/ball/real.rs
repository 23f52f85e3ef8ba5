//! Real midpoint–radius balls.
//!
//! A ball `[m ± r]` stands for every real in `[m − r, m + r]`. Each operation
//! computes the exact result of the midpoints, rounds it to the working
//! precision, and adds both the propagated input radii and the exact rounding
//! error to the output radius, always rounding radii upward.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::exact::Rat;

/// Mantissa bits kept in radii.
const RAD_BITS: u32 = 30;

pub const DEFAULT_PREC: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBall {
    mid: Dyadic,
    rad: Dyadic,
    prec: u32,
}

fn up(x: &Dyadic) -> Dyadic {
    x.round(RAD_BITS, Round::Ceil)
}

/// Upper bound of `a / b` for `a ≥ 0`, `b > 0`.
fn div_up(a: &Dyadic, b: &Dyadic) -> Dyadic {
    if a.is_zero() {
        return Dyadic::zero();
    }
    Dyadic::from_rat(&(a.to_rat() / b.to_rat()), RAD_BITS, Round::Ceil)
}

impl RealBall {
    pub fn new(mid: Dyadic, rad: Dyadic, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        Self {
            mid: mid.round(prec, Round::Nearest),
            rad: up(&rad),
            prec,
        }
        .absorb_rounding_of(&mid)
    }

    /// Re-adds any error from rounding `exact` into the stored midpoint.
    fn absorb_rounding_of(mut self, exact: &Dyadic) -> Self {
        let err = exact.sub(&self.mid).abs();
        if !err.is_zero() {
            self.rad = up(&self.rad.add(&err));
        }
        self
    }

    fn from_exact(exact: Dyadic, extra_rad: Dyadic, prec: u32) -> Self {
        let mid = exact.round(prec, Round::Nearest);
        let err = exact.sub(&mid).abs();
        Self {
            mid,
            rad: up(&extra_rad.add(&err)),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self {
            mid: Dyadic::zero(),
            rad: Dyadic::zero(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_exact(Dyadic::from_i64(v), Dyadic::zero(), prec)
    }

    pub fn from_dyadic(v: Dyadic, prec: u32) -> Self {
        Self::from_exact(v, Dyadic::zero(), prec)
    }

    /// Exact `f64` value as a point ball (rounded to `prec` if needed).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        Self::from_exact(Dyadic::from_f64(v).expect("finite f64"), Dyadic::zero(), prec)
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let mid = Dyadic::from_rat(r, prec, Round::Nearest);
        let err = (r - mid.to_rat()).abs();
        let rad = if err.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::from_rat(&err, RAD_BITS, Round::Ceil)
        };
        Self { mid, rad, prec }
    }

    /// Smallest ball containing the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &Rat, hi: &Rat, prec: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        let two = Rat::from_integer(BigInt::from(2));
        let center = (lo + hi) / &two;
        let half = (hi - lo) / two;
        let c = Self::from_rat(&center, prec);
        let h = if half.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::from_rat(&half, RAD_BITS, Round::Ceil)
        };
        Self {
            rad: up(&c.rad.add(&h)),
            ..c
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same ball, computing further at precision `prec`.
    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.mid.clone(), self.rad.clone(), prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        // Radius is at most 30 bits, so this conversion is exact unless it
        // over/underflows; nudge up to stay an upper bound.
        let r = self.rad.to_f64();
        if r == 0.0 && !self.rad.is_zero() {
            f64::MIN_POSITIVE
        } else {
            r
        }
    }

    /// Exact lower endpoint `m − r`.
    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    /// Exact upper endpoint `m + r`.
    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.lower().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.upper().is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Certified sign: `Some(1)`, `Some(-1)`, or `None` if the ball meets 0.
    pub fn sign(&self) -> Option<i8> {
        if self.is_positive() {
            Some(1)
        } else if self.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn contains_rat(&self, x: &Rat) -> bool {
        let lo = self.lower().to_rat();
        let hi = self.upper().to_rat();
        &lo <= x && x <= &hi
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Convex hull of two balls.
    pub fn union(&self, other: &Self) -> Self {
        let lo = Dyadic::min(&self.lower(), &other.lower());
        let hi = Dyadic::max(&self.upper(), &other.upper());
        let prec = self.prec.max(other.prec);
        let center = lo.add(&hi).mul_2exp(-1);
        let half = hi.sub(&lo).mul_2exp(-1);
        Self::from_exact(center, half, prec)
    }

    pub fn neg(&self) -> Self {
        Self {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_exact(self.mid.add(&rhs.mid), self.rad.add(&rhs.rad), self.prec.max(rhs.prec))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_exact(self.mid.sub(&rhs.mid), self.rad.add(&rhs.rad), self.prec.max(rhs.prec))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        // |xy − ab| ≤ |a|·s + |b|·r + r·s for x ∈ [a ± r], y ∈ [b ± s]
        let prop = self
            .mid
            .abs()
            .mul(&rhs.rad)
            .add(&rhs.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&rhs.rad));
        Self::from_exact(self.mid.mul(&rhs.mid), up(&prop), self.prec.max(rhs.prec))
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        Self {
            mid: self.mid.mul_2exp(k),
            rad: self.rad.mul_2exp(k),
            prec: self.prec,
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k, self.prec))
    }

    pub fn div_i64(&self, k: i64) -> Result<Self> {
        self.div(&Self::from_i64(k, self.prec))
    }

    pub fn sqr(&self) -> Self {
        // Tighter than mul(self): the square of [a ± r] lies in
        // [max(0, |a| − r)², (|a| + r)²].
        let a = self.mid.abs();
        let hi = a.add(&self.rad);
        let lo = a.sub(&self.rad);
        let lo = if lo.is_negative() { Dyadic::zero() } else { lo };
        let lo2 = lo.mul(&lo);
        let hi2 = hi.mul(&hi);
        let center = lo2.add(&hi2).mul_2exp(-1);
        let half = hi2.sub(&lo2).mul_2exp(-1);
        Self::from_exact(center, half, self.prec)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let bm = rhs.mid.abs();
        if bm <= rhs.rad {
            return Err(Error::Domain(format!("division by a ball containing zero: {rhs}")));
        }
        let prec = self.prec.max(rhs.prec);
        // Midpoint quotient to nearest; its rounding error is computed exactly.
        let q = Dyadic::from_rat(&(self.mid.to_rat() / rhs.mid.to_rat()), prec, Round::Nearest);
        let q_err = (self.mid.to_rat() / rhs.mid.to_rat() - q.to_rat()).abs();
        let q_err = if q_err.is_zero() {
            Dyadic::zero()
        } else {
            Dyadic::from_rat(&q_err, RAD_BITS, Round::Ceil)
        };
        // |x/y − a/b| ≤ (|a|·s + |b|·r) / (|b|·(|b| − s))
        let num = self.mid.abs().mul(&rhs.rad).add(&bm.mul(&self.rad));
        let den = bm.mul(&bm.sub(&rhs.rad));
        let prop = div_up(&num, &den);
        Ok(Self {
            mid: q,
            rad: up(&prop.add(&q_err)),
            prec,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.prec).div(self)
    }

    /// Square root; the ball must not contain negative numbers only.
    ///
    /// If it straddles zero, the result encloses `[0, √(m + r)]`, the image of
    /// the nonnegative part.
    pub fn sqrt(&self) -> Result<Self> {
        let prec = self.prec;
        let hi = self.upper();
        if hi.is_negative() {
            return Err(Error::Domain(format!("sqrt of negative ball {self}")));
        }
        let lo = self.lower();
        if self.rad.is_zero() {
            let s = self.mid.sqrt(prec + 8, Round::Nearest);
            let s_lo = self.mid.sqrt(prec + 8, Round::Floor);
            let s_hi = self.mid.sqrt(prec + 8, Round::Ceil);
            let err = Dyadic::max(&s.sub(&s_lo), &s_hi.sub(&s));
            return Ok(Self::from_exact(s, err, prec));
        }
        let lo_sqrt = if lo.is_positive() {
            lo.sqrt(RAD_BITS, Round::Floor)
        } else {
            Dyadic::zero()
        };
        if lo_sqrt.is_zero() {
            let top = hi.sqrt(RAD_BITS + 2, Round::Ceil);
            let half = top.mul_2exp(-1);
            return Ok(Self::from_exact(half.clone(), half, prec));
        }
        // |√x − √m| = |x − m| / (√x + √m) ≤ r / (2·√(m − r))
        let s = self.mid.sqrt(prec + 8, Round::Nearest);
        let s_lo = self.mid.sqrt(prec + 8, Round::Floor);
        let s_hi = self.mid.sqrt(prec + 8, Round::Ceil);
        let err = Dyadic::max(&s.sub(&s_lo), &s_hi.sub(&s));
        let prop = div_up(&self.rad, &lo_sqrt.mul_2exp(1));
        Ok(Self::from_exact(s, prop.add(&err), prec))
    }

    pub fn abs(&self) -> Self {
        let a = self.mid.abs();
        if a > self.rad {
            return Self {
                mid: a,
                ..self.clone()
            };
        }
        let hi = a.add(&self.rad);
        Self::from_exact(hi.mul_2exp(-1), hi.mul_2exp(-1), self.prec)
    }

    /// Upper bound of `|x|` over the ball, as an exact dyadic.
    pub fn abs_upper(&self) -> Dyadic {
        self.mid.abs().add(&self.rad)
    }

    /// Adds `e ≥ 0` to the radius.
    pub fn add_error(&self, e: &Dyadic) -> Self {
        Self {
            rad: up(&self.rad.add(&e.abs())),
            ..self.clone()
        }
    }

    /// Midpoint and radius as decimal strings, the printed ball still
    /// enclosing this one.
    pub fn to_decimal_parts(&self, digits: usize) -> (String, String) {
        super::format::ball_decimal(&self.mid, &self.rad, digits)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let (mid, rad) = self.to_decimal_parts(default_digits(self.prec));
        serde_json::json!({ "mid": mid, "rad": rad })
    }
}

pub fn default_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(16);
        let (m, r) = self.to_decimal_parts(digits);
        write!(f, "[{m} ± {r}]")
    }
}

/// `{"mid": "...", "rad": "..."}` on the wire.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BallJson {
    pub mid: String,
    pub rad: String,
}

impl From<&RealBall> for BallJson {
    fn from(b: &RealBall) -> Self {
        let (mid, rad) = b.to_decimal_parts(default_digits(b.prec));
        Self { mid, rad }
    }
}

impl BallJson {
    /// Lower and upper endpoints as exact rationals.
    pub fn bounds(&self) -> Result<(Rat, Rat)> {
        let m = super::format::parse_decimal(&self.mid)?;
        let r = super::format::parse_decimal(&self.rad)?;
        Ok((&m - &r, &m + &r))
    }
}

impl Add for &RealBall {
    type Output = RealBall;
    fn add(self, rhs: &RealBall) -> RealBall {
        RealBall::add(self, rhs)
    }
}

impl Sub for &RealBall {
    type Output = RealBall;
    fn sub(self, rhs: &RealBall) -> RealBall {
        RealBall::sub(self, rhs)
    }
}

impl Mul for &RealBall {
    type Output = RealBall;
    fn mul(self, rhs: &RealBall) -> RealBall {
        RealBall::mul(self, rhs)
    }
}

impl Neg for &RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall::neg(self)
    }
}
