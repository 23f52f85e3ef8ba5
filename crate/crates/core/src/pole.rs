//! Certified localization of the first positive zero `λ̃` of `d(λ)`, and a
//! check that the numerator of `C_λ(0)` keeps a definite sign around it.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::{BallJson, RealBall, DEFAULT_PREC};
use crate::bessel::{auto_terms, d_lambda, make_constants, numerator_product, Constants};
use crate::error::{Error, Result};
use crate::exact::rat::{self, rat};
use crate::exact::Rat;

/// Bisection starts from `(5/2, 3)`.
pub fn initial_bracket() -> (Rat, Rat) {
    (rat(5, 2), rat(3, 1))
}

/// Each precision escalation doubles the precision; at most this many.
pub const MAX_ESCALATIONS: u32 = 5;

/// Default subdivision budget for the numerator check.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 256;

fn d_at(lambda: &Rat, c: &Constants) -> Result<RealBall> {
    d_lambda(&RealBall::from_rat(lambda, c.prec()), c)
}

/// Certified enclosures of `d(lo)` and `d(hi)` with opposite signs.
#[derive(Clone, Debug)]
pub struct SignChange {
    pub d_lo: RealBall,
    pub d_hi: RealBall,
}

/// Checks that `d` has certified, opposite signs at `lo` and `hi`.
pub fn verify_sign_change(lo: &Rat, hi: &Rat, prec: u32) -> Result<SignChange> {
    if lo.is_negative() || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ lo < hi, got ({}, {})",
            rat::to_string(lo),
            rat::to_string(hi)
        )));
    }
    let c = make_constants(prec)?;
    let d_lo = d_at(lo, &c)?;
    let d_hi = d_at(hi, &c)?;
    match (d_lo.sign(), d_hi.sign()) {
        (Some(a), Some(b)) if a != b => Ok(SignChange { d_lo, d_hi }),
        (Some(a), Some(b)) => Err(Error::NoSignChange {
            lo: rat::to_string(lo),
            hi: rat::to_string(hi),
            sign_lo: a,
            sign_hi: b,
        }),
        _ => Err(Error::Inconclusive {
            precision: prec,
            detail: format!("d({}) = {d_lo:.20}, d({}) = {d_hi:.20}", rat::to_string(lo), rat::to_string(hi)),
        }),
    }
}

/// Enclosure of `Im(ᾱ J₁(λζ̄))` over `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct NumeratorBound {
    /// Hull of the piece enclosures; its upper endpoint is the bound.
    pub enclosure: RealBall,
    pub pieces: usize,
}

/// Encloses `Im(ᾱ J₁(λζ̄))` for all `λ ∈ [lo, hi]`, bisecting pieces whose
/// enclosure is not certainly negative. Fails once more than
/// `max_subdivisions` pieces have been split.
pub fn verify_numerator_nonvanishing(
    lo: &Rat,
    hi: &Rat,
    max_subdivisions: usize,
    prec: u32,
) -> Result<NumeratorBound> {
    bound_numerator(lo, hi, &Rat::zero(), max_subdivisions, prec)
}

/// Like [`verify_numerator_nonvanishing`], but bisects until every piece's
/// upper bound is below `below` (which must be ≤ 0).
pub fn bound_numerator(
    lo: &Rat,
    hi: &Rat,
    below: &Rat,
    max_subdivisions: usize,
    prec: u32,
) -> Result<NumeratorBound> {
    let (a, b) = initial_bracket();
    if lo > hi || *lo < a || *hi > b {
        return Err(Error::InvalidArgument(format!(
            "need [lo, hi] ⊆ [5/2, 3], got [{}, {}]",
            rat::to_string(lo),
            rat::to_string(hi)
        )));
    }
    if below.is_positive() {
        return Err(Error::InvalidArgument("the target bound must be ≤ 0".into()));
    }
    let target = crate::ball::Dyadic::from_rat(below, 64, crate::ball::Round::Floor);
    let c = make_constants(prec)?;
    let mut frontier = vec![(lo.clone(), hi.clone())];
    let mut accepted: Vec<RealBall> = Vec::new();
    let mut splits = 0usize;
    while !frontier.is_empty() {
        let evaluated = evaluate_pieces(&frontier, &c)?;
        let mut next = Vec::new();
        for ((l, h), enc) in frontier.into_iter().zip(evaluated) {
            if enc.upper() < target {
                accepted.push(enc);
            } else if enc.is_positive() {
                return Err(Error::CannotCertify(format!(
                    "numerator is positive on [{}, {}]",
                    rat::to_string(&l),
                    rat::to_string(&h)
                )));
            } else {
                splits += 1;
                if splits > max_subdivisions || l == h {
                    return Err(Error::CannotCertify(format!(
                        "subdivision budget of {max_subdivisions} exhausted near [{}, {}]",
                        rat::to_string(&l),
                        rat::to_string(&h)
                    )));
                }
                let m = (&l + &h) / Rat::from_integer(2.into());
                next.push((l, m.clone()));
                next.push((m, h));
            }
        }
        frontier = next;
    }
    let pieces = accepted.len();
    let enclosure = accepted
        .into_iter()
        .reduce(|x, y| x.union(&y))
        .expect("at least one piece");
    Ok(NumeratorBound { enclosure, pieces })
}

fn evaluate_pieces(pieces: &[(Rat, Rat)], c: &Constants) -> Result<Vec<RealBall>> {
    let eval = |(l, h): &(Rat, Rat)| -> Result<RealBall> {
        let lam = RealBall::from_interval(l, h, c.prec());
        Ok(numerator_product(&lam, c)?.im)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        pieces.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pieces.iter().map(eval).collect()
    }
}

/// Stored evidence that `d` changes sign on `[lo, hi]` while the numerator of
/// `C_λ(0)` stays negative there. [`PoleCertificate::verify`] re-checks it from
/// the stored decimal balls alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleCertificate {
    #[serde(with = "rat::serde_str")]
    pub lo: Rat,
    #[serde(with = "rat::serde_str")]
    pub hi: Rat,
    pub d_lo: BallJson,
    pub d_hi: BallJson,
    pub numerator_bound: BallJson,
    pub precision: u32,
    /// Series terms used for `J₀`/`J₁` at the upper endpoint.
    pub series_terms: u32,
    pub numerator_pieces: usize,
    pub bisection_steps: usize,
}

impl PoleCertificate {
    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Checks signs and bounds using only the stored data.
    pub fn verify(&self) -> Result<()> {
        let (a, b) = initial_bracket();
        let fail = |msg: String| Err(Error::CannotCertify(msg));
        if self.lo >= self.hi {
            return fail("empty bracket".into());
        }
        if self.lo < a || self.hi > b {
            return fail("bracket leaves [5/2, 3]".into());
        }
        let (_, d_lo_up) = self.d_lo.bounds()?;
        if !d_lo_up.is_negative() {
            return fail(format!("d(lo) upper bound {} is not negative", rat::to_f64(&d_lo_up)));
        }
        let (d_hi_low, _) = self.d_hi.bounds()?;
        if !d_hi_low.is_positive() {
            return fail(format!("d(hi) lower bound {} is not positive", rat::to_f64(&d_hi_low)));
        }
        let (_, num_up) = self.numerator_bound.bounds()?;
        if !num_up.is_negative() {
            return fail(format!("numerator upper bound {} is not negative", rat::to_f64(&num_up)));
        }
        Ok(())
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }
}

/// Sign of `d(lambda)` at `prec` bits, if the enclosure excludes 0.
fn certified_sign(lambda: &Rat, prec: u32, constants: &mut Constants) -> Result<Option<i8>> {
    if constants.prec() != prec {
        *constants = make_constants(prec)?;
    }
    Ok(d_at(lambda, constants)?.sign())
}

/// Bisects `(5/2, 3)` down to width at most `target_width`.
///
/// A midpoint whose sign is inconclusive is first shifted by 1/16 of the
/// bracket; if that is inconclusive too the precision is doubled, at most
/// [`MAX_ESCALATIONS`] times.
pub fn locate_pole(target_width: &Rat, prec: u32) -> Result<PoleCertificate> {
    if !target_width.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "target width must be positive, got {}",
            rat::to_string(target_width)
        )));
    }
    let (mut lo, mut hi) = initial_bracket();
    let mut prec = prec;
    let mut constants = make_constants(prec)?;
    let max_prec = prec << MAX_ESCALATIONS;
    let start = verify_sign_change(&lo, &hi, prec)?;
    if start.d_lo.sign() != Some(-1) {
        return Err(Error::CannotCertify("expected d(5/2) < 0".into()));
    }
    let sixteen = Rat::from_integer(16.into());
    let two = Rat::from_integer(2.into());
    let mut steps = 0usize;
    while &hi - &lo > *target_width {
        let mid = (&lo + &hi) / &two;
        let shifted = &mid + (&hi - &lo) / &sixteen;
        let (point, sign) = loop {
            if let Some(s) = certified_sign(&mid, prec, &mut constants)? {
                break (mid.clone(), s);
            }
            if let Some(s) = certified_sign(&shifted, prec, &mut constants)? {
                break (shifted.clone(), s);
            }
            if prec >= max_prec {
                return Err(Error::PrecisionCeiling {
                    precision: prec,
                    detail: format!("sign of d near {} stays inconclusive", rat::to_f64(&mid)),
                });
            }
            prec *= 2;
        };
        if sign < 0 {
            lo = point;
        } else {
            hi = point;
        }
        steps += 1;
    }
    if constants.prec() != prec {
        constants = make_constants(prec)?;
    }
    let d_lo = d_at(&lo, &constants)?;
    let d_hi = d_at(&hi, &constants)?;
    let numerator = verify_numerator_nonvanishing(&lo, &hi, DEFAULT_MAX_SUBDIVISIONS, prec)?;
    let x = constants.zeta.mul_real(&RealBall::from_rat(&hi, prec));
    let cert = PoleCertificate {
        lo,
        hi,
        d_lo: (&d_lo).into(),
        d_hi: (&d_hi).into(),
        numerator_bound: (&numerator.enclosure).into(),
        precision: prec,
        series_terms: auto_terms(&x, prec),
        numerator_pieces: numerator.pieces,
        bisection_steps: steps,
    };
    cert.verify()?;
    Ok(cert)
}

/// [`locate_pole`] at the default precision.
pub fn locate_pole_default(target_width: &Rat) -> Result<PoleCertificate> {
    locate_pole(target_width, DEFAULT_PREC)
}
