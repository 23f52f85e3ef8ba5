//! Dyadic numbers `m·2^e` with arbitrary-precision mantissa and directed
//! rounding to a given number of bits.
//!
//! Addition, subtraction and multiplication are exact; rounding is a separate,
//! explicit step. That is what lets the ball layer compute its rounding errors
//! exactly instead of estimating them.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    /// Toward −∞.
    Floor,
    /// Toward +∞.
    Ceil,
    Nearest,
}

/// `man · 2^exp`, normalized so that `man` is odd (or zero with `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Self { man, exp };
        d.normalize();
        d
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// Exact conversion; `None` for non-finite input.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Some(Self::new(BigInt::from(m) * sign, e))
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Self {
            man: BigInt::one(),
            exp: e,
        }
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.man.trailing_zeros() {
            if tz > 0 {
                self.man >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Exponent of the leading bit: `2^magnitude ≤ |x| < 2^(magnitude+1)`.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.man.bits() as i64 - 1)
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &rhs.man << (rhs.exp - e) as usize;
        Self::new(a + b, e)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(&self.man * &rhs.man, self.exp + rhs.exp)
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    pub fn to_rat(&self) -> Rat {
        if self.exp >= 0 {
            Rat::from_integer(&self.man << self.exp as usize)
        } else {
            Rat::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.round(53, Round::Nearest);
        let m = r.man.to_f64().unwrap_or(0.0);
        if r.exp > 1023 {
            return m * f64::INFINITY;
        }
        if r.exp < -1074 - 60 {
            return 0.0 * m;
        }
        // Split the scaling to avoid intermediate overflow/underflow.
        let half = r.exp / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((r.exp - half) as i32)
    }

    /// Rounds to at most `prec` mantissa bits.
    pub fn round(&self, prec: u32, mode: Round) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let negative = self.man.is_negative();
        let mag = self.man.magnitude();
        let q = round_magnitude(mag, shift, magnitude_mode(mode, negative));
        let man = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, q);
        Self::new(man, self.exp + shift as i64)
    }

    /// Rational rounded to `prec` bits.
    pub fn from_rat(r: &Rat, prec: u32, mode: Round) -> Self {
        let num = r.numer();
        let den = r.denom();
        if num.is_zero() {
            return Self::zero();
        }
        let negative = num.is_negative();
        let n = num.magnitude();
        let d = den.magnitude();
        // Scale so the integer quotient carries prec + 2 bits.
        let s = prec as i64 + 2 + d.bits() as i64 - n.bits() as i64;
        let (nn, dd) = if s >= 0 {
            (n << s as usize, d.clone())
        } else {
            (n.clone(), d << (-s) as usize)
        };
        let (q, rem) = nn.div_rem(&dd);
        // q·2^-s ≤ |r| < (q+1)·2^-s; fold the sticky remainder into an extra bit
        // so that a later rounding sees exactness correctly.
        let sticky = !rem.is_zero();
        let q2 = (q << 1usize) + if sticky { BigUint::one() } else { BigUint::zero() };
        let exact_mag = Self::new(BigInt::from(q2), -s - 1);
        let v = if negative { exact_mag.neg() } else { exact_mag };
        // v differs from r only below its last bit, which is set iff the
        // remainder was nonzero; rounding v to prec < bits(v) bits then gives the
        // same result as rounding r.
        v.round(prec, mode)
    }

    /// Square root rounded to `prec` bits. Panics on negative input.
    pub fn sqrt(&self, prec: u32, mode: Round) -> Self {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let mut shift = (2 * prec as i64 + 4 - self.man.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let n = self.man.magnitude() << shift as usize;
        let e = self.exp - shift;
        let r = n.sqrt();
        let exact = &r * &r == n;
        // Same sticky-bit trick as in from_rat.
        let r2 = (r << 1usize) + if exact { BigUint::zero() } else { BigUint::one() };
        Self::new(BigInt::from(r2), e / 2 - 1).round(prec, mode)
    }

    pub fn min(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

fn magnitude_mode(mode: Round, negative: bool) -> MagRound {
    match (mode, negative) {
        (Round::Nearest, _) => MagRound::Nearest,
        (Round::Floor, false) | (Round::Ceil, true) => MagRound::Down,
        (Round::Floor, true) | (Round::Ceil, false) => MagRound::Up,
    }
}

enum MagRound {
    Down,
    Up,
    Nearest,
}

fn round_magnitude(mag: &BigUint, shift: u64, mode: MagRound) -> BigUint {
    let q = mag >> shift as usize;
    let low_nonzero = || mag.trailing_zeros().is_some_and(|tz| tz < shift);
    match mode {
        MagRound::Down => q,
        MagRound::Up => {
            if low_nonzero() {
                q + 1u32
            } else {
                q
            }
        }
        MagRound::Nearest => {
            if mag.bit(shift - 1) {
                q + 1u32
            } else {
                q
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sub(other).man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    #[test]
    fn exact_ops() {
        let a = Dyadic::from_f64(0.75).unwrap();
        let b = Dyadic::from_f64(-2.5).unwrap();
        assert_eq!(a.add(&b).to_f64(), -1.75);
        assert_eq!(a.mul(&b).to_f64(), -1.875);
        assert_eq!(a.to_rat(), rat(3, 4));
        assert!(b < a);
        assert_eq!(Dyadic::from_i64(12), Dyadic::new(BigInt::from(3), 2));
    }

    #[test]
    fn directed_rounding_of_third() {
        let third = rat(1, 3);
        let lo = Dyadic::from_rat(&third, 20, Round::Floor);
        let hi = Dyadic::from_rat(&third, 20, Round::Ceil);
        assert!(lo.to_rat() < third && third < hi.to_rat());
        assert_eq!(hi.sub(&lo), Dyadic::pow2(lo.magnitude().unwrap() - 19));
        let nlo = Dyadic::from_rat(&-third.clone(), 20, Round::Floor);
        assert_eq!(nlo, hi.neg());
    }

    #[test]
    fn exact_values_survive_rounding() {
        let r = rat(5, 8);
        for mode in [Round::Floor, Round::Ceil, Round::Nearest] {
            assert_eq!(Dyadic::from_rat(&r, 10, mode).to_rat(), r);
        }
        let four = Dyadic::from_i64(4);
        assert_eq!(four.sqrt(64, Round::Floor), Dyadic::from_i64(2));
        assert_eq!(four.sqrt(64, Round::Ceil), Dyadic::from_i64(2));
    }

    #[test]
    fn sqrt_brackets() {
        let two = Dyadic::from_i64(2);
        let lo = two.sqrt(100, Round::Floor);
        let hi = two.sqrt(100, Round::Ceil);
        assert!(lo.mul(&lo) < two && two < hi.mul(&hi));
        assert!(hi.sub(&lo).magnitude().unwrap() <= -98);
    }

    #[test]
    fn rounding_of_negative_values() {
        let x = Dyadic::new(BigInt::from(-0b1011), 0);
        assert_eq!(x.round(2, Round::Floor).to_f64(), -12.0);
        assert_eq!(x.round(2, Round::Ceil).to_f64(), -8.0);
        assert_eq!(x.round(2, Round::Nearest).to_f64(), -12.0);
    }
}
