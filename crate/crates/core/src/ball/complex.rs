use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::dyadic::{Dyadic, Round};
use super::real::RealBall;
use crate::error::{Error, Result};
use crate::exact::Rat;

/// Rectangular complex ball: independent real and imaginary enclosures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: RealBall,
    pub im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: RealBall) -> Self {
        let im = RealBall::zero(re.prec());
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_real(RealBall::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_real(RealBall::one(prec))
    }

    pub fn from_rats(re: &Rat, im: &Rat, prec: u32) -> Self {
        Self::new(RealBall::from_rat(re, prec), RealBall::from_rat(im, prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        Self::new(re, im)
    }

    pub fn mul_real(&self, k: &RealBall) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    pub fn mul_2exp(&self, k: i64) -> Self {
        Self::new(self.re.mul_2exp(k), self.im.mul_2exp(k))
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self::new(self.im.neg(), self.re.clone())
    }

    pub fn sqr(&self) -> Self {
        let re = &self.re.sqr() - &self.im.sqr();
        let im = (&self.re * &self.im).mul_2exp(1);
        Self::new(re, im)
    }

    /// `|z|²` as a real ball.
    pub fn abs_sq(&self) -> RealBall {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Upper bound of `|z|` over the ball.
    pub fn abs_upper(&self) -> Dyadic {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        a.mul(&a).add(&b.mul(&b)).sqrt(64, Round::Ceil)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let den = rhs.abs_sq();
        let num = self.mul(&rhs.conj());
        Ok(Self::new(num.re.div(&den)?, num.im.div(&den)?))
    }

    pub fn div_real(&self, k: &RealBall) -> Result<Self> {
        Ok(Self::new(self.re.div(k)?, self.im.div(k)?))
    }

    /// Principal square root. The ball must stay off the branch cut
    /// `(−∞, 0]`: either its real part is certainly positive or its imaginary
    /// part has a certain sign.
    pub fn sqrt(&self) -> Result<Self> {
        let modulus = self.abs_sq().sqrt()?;
        if self.re.is_positive() {
            // re √z = √((|z| + a)/2), im √z = b / (2 re √z)
            let r = (&modulus + &self.re).mul_2exp(-1).sqrt()?;
            let i = self.im.div(&r.mul_2exp(1))?;
            return Ok(Self::new(r, i));
        }
        match self.im.sign() {
            Some(s) => {
                // im √z = sign(b) √((|z| − a)/2), re √z = b / (2 im √z)
                let mut i = (&modulus - &self.re).mul_2exp(-1).sqrt()?;
                if s < 0 {
                    i = i.neg();
                }
                let r = self.im.div(&i.mul_2exp(1))?;
                Ok(Self::new(r, i))
            }
            None => Err(Error::Domain(format!("sqrt: ball {self} meets the branch cut"))),
        }
    }

    pub fn contains_rats(&self, re: &Rat, im: &Rat) -> bool {
        self.re.contains_rat(re) && self.im.contains_rat(im)
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }

    /// Widens both parts by `e` (an error bound on `|z|`).
    pub fn add_error(&self, e: &Dyadic) -> Self {
        Self::new(self.re.add_error(e), self.im.add_error(e))
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({ "re": self.re.to_json_value(), "im": self.im.to_json_value() })
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(16);
        let (rm, rr) = self.re.to_decimal_parts(digits);
        let (im, ir) = self.im.to_decimal_parts(digits);
        write!(f, "[{rm} ± {rr}] + [{im} ± {ir}]*I")
    }
}

impl Add for &ComplexBall {
    type Output = ComplexBall;
    fn add(self, rhs: &ComplexBall) -> ComplexBall {
        ComplexBall::add(self, rhs)
    }
}

impl Sub for &ComplexBall {
    type Output = ComplexBall;
    fn sub(self, rhs: &ComplexBall) -> ComplexBall {
        ComplexBall::sub(self, rhs)
    }
}

impl Mul for &ComplexBall {
    type Output = ComplexBall;
    fn mul(self, rhs: &ComplexBall) -> ComplexBall {
        ComplexBall::mul(self, rhs)
    }
}

impl Neg for &ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        ComplexBall::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    const P: u32 = 128;

    #[test]
    fn sqrt_of_minus_one_half_plus() {
        // √(2i) = 1 + i
        let z = ComplexBall::from_rats(&int(0), &int(2), P);
        let s = z.sqrt().unwrap();
        assert!(s.contains_rats(&int(1), &int(1)));
        // √(−4 + 0i) sits on the cut and must be refused
        assert!(ComplexBall::from_rats(&int(-4), &int(0), P).sqrt().is_err());
        // √(3 − 4i) = 2 − i
        let s = ComplexBall::from_rats(&int(3), &int(-4), P).sqrt().unwrap();
        assert!(s.contains_rats(&int(2), &int(-1)));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = ComplexBall::from_rats(&rat(1, 3), &rat(-2, 7), P);
        let b = ComplexBall::from_rats(&rat(5, 2), &rat(1, 9), P);
        let q = a.mul(&b).div(&b).unwrap();
        assert!(q.overlaps(&a));
        assert!(q.re.rad_f64() < 1e-35);
    }

    #[test]
    fn modulus_bounds() {
        let z = ComplexBall::from_rats(&int(3), &int(4), P);
        assert!(z.abs_sq().contains_rat(&int(25)));
        let up = z.abs_upper().to_f64();
        assert!((5.0..5.000001).contains(&up));
    }
}
