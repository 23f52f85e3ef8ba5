//! Decimal rendering of balls. The printed `mid ± rad` always encloses the
//! binary ball: the decimal rounding error of the midpoint is folded into the
//! printed radius, which is itself rounded up.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exact::Rat;

fn pow10(k: i64) -> Rat {
    let p = num_traits::pow(BigInt::from(10), k.unsigned_abs() as usize);
    if k >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

/// `floor(log10 |x|)` for nonzero `x`.
fn decimal_exponent(x: &Rat) -> i64 {
    let x = x.abs();
    let approx = (x.numer().bits() as f64 - x.denom().bits() as f64) * std::f64::consts::LOG10_2;
    let mut e = approx.floor() as i64;
    while pow10(e) > x {
        e -= 1;
    }
    while pow10(e + 1) <= x {
        e += 1;
    }
    e
}

fn round_half_away(x: &Rat) -> BigInt {
    let two = BigInt::from(2);
    let n = x.numer() * &two + x.denom();
    let d = x.denom() * &two;
    if x.is_negative() {
        -((-x.numer() * &two + x.denom()).div_floor(&d))
    } else {
        n.div_floor(&d)
    }
}

fn fixed(n: &BigInt, frac_digits: i64) -> String {
    let sign = if n.is_negative() { "-" } else { "" };
    let digits = n.abs().to_string();
    if frac_digits <= 0 {
        let zeros = "0".repeat((-frac_digits) as usize);
        return format!("{sign}{digits}{zeros}");
    }
    let k = frac_digits as usize;
    let padded = if digits.len() <= k {
        format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - k);
    format!("{sign}{int_part}.{frac_part}")
}

/// Upper bound of `x ≥ 0` printed with three significant digits.
pub fn upper_scientific(x: &Rat) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let mut e = decimal_exponent(x);
    let scaled = x / pow10(e - 2);
    let mut mant = scaled.ceil().to_integer();
    if mant >= BigInt::from(1000) {
        mant = BigInt::from(100);
        e += 1;
    }
    let s = mant.to_string();
    format!("{}.{}e{}", &s[..1], &s[1..], e)
}

/// Decimal midpoint with about `digits` significant digits, and a radius that
/// covers both `rad` and the decimal rounding of the midpoint.
pub fn ball_decimal(mid: &Dyadic, rad: &Dyadic, digits: usize) -> (String, String) {
    let m = mid.to_rat();
    let r = rad.to_rat();
    if m.is_zero() {
        return ("0".to_string(), upper_scientific(&r));
    }
    let e10 = decimal_exponent(&m);
    let frac = digits as i64 - 1 - e10;
    let n = round_half_away(&(&m * pow10(frac)));
    let printed = Rat::from_integer(n.clone()) * pow10(-frac);
    let total = r + (&m - printed).abs();
    (fixed(&n, frac), upper_scientific(&total))
}

/// Parses `"-13.2083"`, `"4.16e-13"`, `"7"` or `"num/den"` exactly.
pub fn parse_decimal(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    Ok(crate::exact::rat::parse(mant)? * pow10(exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    #[test]
    fn scientific_rounds_up() {
        assert_eq!(upper_scientific(&rat(416, 100_000)), "4.16e-3");
        assert_eq!(upper_scientific(&rat(4161, 1_000_000)), "4.17e-3");
        assert_eq!(upper_scientific(&rat(9999, 1000)), "1.00e1");
        assert_eq!(upper_scientific(&rat(1, 1)), "1.00e0");
    }

    #[test]
    fn printed_ball_encloses() {
        let mid = Dyadic::from_rat(&rat(-13_208_370, 1_000_000), 128, super::super::dyadic::Round::Nearest);
        let rad = Dyadic::from_rat(&rat(1, 1_000_000_000_000), 30, super::super::dyadic::Round::Ceil);
        let (m, r) = ball_decimal(&mid, &rad, 8);
        assert_eq!(m, "-13.208370");
        let (pm, pr) = (parse_decimal(&m).unwrap(), parse_decimal(&r).unwrap());
        let exact = mid.to_rat();
        assert!((&exact - &pm).abs() + rad.to_rat() <= pr);
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed(&BigInt::from(5), 3), "0.005");
        assert_eq!(fixed(&BigInt::from(-12345), 2), "-123.45");
        assert_eq!(fixed(&BigInt::from(12), -2), "1200");
        assert_eq!(parse_decimal("4.16e-13").unwrap(), rat(416, 100) * pow10(-13));
    }
}
