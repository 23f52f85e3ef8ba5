//! Rigorous enclosures of `J₀`, `J₁` at complex arguments, the constants
//! `ζ`, `α`, the function `d(λ)` and the closed-form radial profiles
//! `A_λ`, `B_λ`, `C_λ`.
//!
//! ```text
//! ζ = √((−1 + i√7)/2),   α = ζ³/2 + ζ,   d(λ) = Im(ᾱ J₀(λζ) J₁(λζ̄))
//! A_λ(r) = (|α|²/d) Im(J₁(λζ̄) J₁(λζr))
//! B_λ(r) = 0
//! C_λ(r) = (1/d) Im(ᾱ J₁(λζ̄) J₀(λζr))
//! ```

use num_bigint::BigInt;

use crate::ball::{ComplexBall, Dyadic, RealBall};
use crate::error::{Error, Result};
use crate::exact::Rat;

/// `ζ` and `α` at a fixed working precision.
#[derive(Clone, Debug)]
pub struct Constants {
    pub zeta: ComplexBall,
    pub alpha: ComplexBall,
    prec: u32,
}

impl Constants {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// The same constants for the other square root, `ζ ↦ −ζ` (so `α ↦ −α`).
    pub fn other_determination(&self) -> Self {
        Self {
            zeta: self.zeta.neg(),
            alpha: self.alpha.neg(),
            prec: self.prec,
        }
    }

    /// `ζ⁴ + ζ² + 2`, which must contain 0.
    pub fn defining_residual(&self) -> ComplexBall {
        let z2 = self.zeta.sqr();
        let two = ComplexBall::from_real(RealBall::from_i64(2, self.prec));
        &(&z2.sqr() + &z2) + &two
    }

    /// `α − (ζ³/2 + ζ)`, which must contain 0.
    pub fn alpha_residual(&self) -> ComplexBall {
        let z3 = &self.zeta.sqr() * &self.zeta;
        &self.alpha - &(&z3.mul_2exp(-1) + &self.zeta)
    }
}

/// Encloses `ζ` (principal square root) and `α` at `prec` bits.
pub fn make_constants(prec: u32) -> Result<Constants> {
    if prec < 53 {
        return Err(Error::InvalidArgument(format!(
            "precision must be at least 53 bits, got {prec}"
        )));
    }
    let sqrt7 = RealBall::from_i64(7, prec).sqrt()?;
    let w = ComplexBall::new(RealBall::from_i64(-1, prec).mul_2exp(-1), sqrt7.mul_2exp(-1));
    let zeta = w.sqrt()?;
    let z3 = &zeta.sqr() * &zeta;
    let alpha = &z3.mul_2exp(-1) + &zeta;
    Ok(Constants { zeta, alpha, prec })
}

/// `√2` as a ball; equals `|α|²` (and `|ζ|²`).
pub fn sqrt2(prec: u32) -> RealBall {
    RealBall::from_i64(2, prec).sqrt().expect("2 > 0")
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

/// Upper bound for the remainder, from index `n` on, of both the `J₀` and
/// `J₁` series at every point of `x`:
/// `(1 − |x|²/(2n+2)²)⁻¹ · |x/2|^{2n} / n!²`.
///
/// The returned ball's upper endpoint is the bound.
pub fn bessel_tail_bound(x: &ComplexBall, n: u32) -> Result<RealBall> {
    let prec = x.prec();
    let m = x.abs_upper();
    let limit = Dyadic::from_i64(2 * (n as i64 + 1));
    if m >= limit {
        return Err(Error::Domain(format!(
            "series tail bound needs |x| < 2(n+1) = {}, got |x| ≤ {:.6}",
            2 * (n + 1),
            m.to_f64()
        )));
    }
    if m.is_zero() && n >= 1 {
        return Ok(RealBall::zero(prec));
    }
    let half = RealBall::from_dyadic(m.mul_2exp(-1), prec);
    let mut power = RealBall::one(prec);
    for _ in 0..2 * n {
        power = &power * &half;
    }
    let fact = factorial(n);
    let fact2 = RealBall::from_rat(&Rat::from_integer(&fact * &fact), prec);
    let mb = RealBall::from_dyadic(m, prec);
    let q = mb.sqr().div_i64(4 * (n as i64 + 1) * (n as i64 + 1))?;
    let denom = &RealBall::one(prec) - &q;
    power.div(&fact2)?.div(&denom)
}

/// `J_ν(x)` for `ν ∈ {0, 1}` from the first `n_terms` series terms, widened by
/// [`bessel_tail_bound`].
pub fn bessel_j(nu: u32, x: &ComplexBall, n_terms: u32) -> Result<ComplexBall> {
    if nu > 1 {
        return Err(Error::InvalidArgument(format!("only J₀ and J₁ are available, got ν = {nu}")));
    }
    let tail = bessel_tail_bound(x, n_terms)?;
    let prec = x.prec();
    let half = x.mul_2exp(-1);
    let step = half.sqr().neg();
    let mut term = if nu == 0 { ComplexBall::one(prec) } else { half.clone() };
    let mut sum = ComplexBall::zero(prec);
    for k in 0..n_terms {
        sum = &sum + &term;
        let den = RealBall::from_i64(((k + 1) * (k + 1 + nu)) as i64, prec);
        term = (&term * &step).div_real(&den)?;
    }
    Ok(sum.add_error(&tail.upper()))
}

/// Number of series terms whose tail bound at `x` is below `2^(10 − prec)`.
pub fn auto_terms(x: &ComplexBall, prec: u32) -> u32 {
    let m = x.abs_upper().to_f64();
    let target = (10.0 - prec as f64) * std::f64::consts::LN_2;
    let mut n = (m / 2.0).ceil() as u32 + 1;
    loop {
        let q = m * m / (4.0 * (n as f64 + 1.0).powi(2));
        if q < 1.0 {
            let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
            let ln_tail = if m == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * n as f64 * (m / 2.0).ln() - 2.0 * ln_fact - (1.0 - q).ln()
            };
            if ln_tail < target - 1.0 || n > 100_000 {
                return n;
            }
        }
        n += 1;
    }
}

/// `J_ν(x)` with the term count chosen by [`auto_terms`].
pub fn bessel_j_auto(nu: u32, x: &ComplexBall) -> Result<ComplexBall> {
    bessel_j(nu, x, auto_terms(x, x.prec()))
}

fn check_lambda(lambda: &RealBall) -> Result<()> {
    if lambda.upper().is_negative() {
        return Err(Error::Domain(format!("λ must be nonnegative, got {lambda}")));
    }
    Ok(())
}

/// `ᾱ J₀(λζ) J₁(λζ̄)`; its imaginary part is `d(λ)`.
pub fn d_product(lambda: &RealBall, c: &Constants) -> Result<ComplexBall> {
    check_lambda(lambda)?;
    let x = c.zeta.mul_real(lambda);
    let j0 = bessel_j_auto(0, &x)?;
    let j1 = bessel_j_auto(1, &x.conj())?;
    Ok(&(&c.alpha.conj() * &j0) * &j1)
}

/// `d(λ) = Im(ᾱ J₀(λζ) J₁(λζ̄))`.
pub fn d_lambda(lambda: &RealBall, c: &Constants) -> Result<RealBall> {
    Ok(d_product(lambda, c)?.im)
}

/// `(ᾱ J₀(λζ) J₁(λζ̄) − α J₁(λζ) J₀(λζ̄)) / (2i)`, which equals `d(λ)`
/// (imaginary part 0). Every Bessel value is computed separately here.
pub fn d_lambda_determinant(lambda: &RealBall, c: &Constants) -> Result<ComplexBall> {
    check_lambda(lambda)?;
    let x = c.zeta.mul_real(lambda);
    let xb = x.conj();
    let first = &(&c.alpha.conj() * &bessel_j_auto(0, &x)?) * &bessel_j_auto(1, &xb)?;
    let second = &(&c.alpha * &bessel_j_auto(1, &x)?) * &bessel_j_auto(0, &xb)?;
    let diff = &first - &second;
    // z / (2i) = (Im z − i Re z) / 2
    Ok(ComplexBall::new(diff.im.mul_2exp(-1), diff.re.neg().mul_2exp(-1)))
}

/// `ᾱ J₁(λζ̄)`; its imaginary part is the numerator of `C_λ(0)`.
pub fn numerator_product(lambda: &RealBall, c: &Constants) -> Result<ComplexBall> {
    check_lambda(lambda)?;
    let xb = c.zeta.conj().mul_real(lambda);
    Ok(&c.alpha.conj() * &bessel_j_auto(1, &xb)?)
}

/// `Im(ᾱ J₁(λζ))`, the unconjugated-argument variant of the numerator.
pub fn numerator_unconjugated(lambda: &RealBall, c: &Constants) -> Result<RealBall> {
    check_lambda(lambda)?;
    let x = c.zeta.mul_real(lambda);
    Ok((&c.alpha.conj() * &bessel_j_auto(1, &x)?).im)
}

/// Closed-form radial profiles at one `(λ, r)`.
#[derive(Clone, Debug)]
pub struct Abc {
    pub a: RealBall,
    pub b: RealBall,
    pub c: RealBall,
}

impl Abc {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "A": self.a.to_json_value(),
            "B": self.b.to_json_value(),
            "C": self.c.to_json_value(),
        })
    }
}

/// `A_λ(r)`, `B_λ(r)`, `C_λ(r)`.
pub fn abc_closed_form(lambda: &RealBall, r: &RealBall, c: &Constants) -> Result<Abc> {
    check_lambda(lambda)?;
    if r.lower().is_negative() || r.upper() > Dyadic::from_i64(1) {
        return Err(Error::Domain(format!("r must lie in [0, 1], got {r}")));
    }
    let d = d_lambda(lambda, c)?;
    if d.contains_zero() {
        return Err(Error::PoleProximity(format!(
            "d(λ) = {d} contains 0 at λ = {lambda}; the closed form has a pole here"
        )));
    }
    let x = c.zeta.mul_real(lambda);
    let j1b = bessel_j_auto(1, &x.conj())?;
    let xr = x.mul_real(r);
    let a_num = (&j1b * &bessel_j_auto(1, &xr)?).im;
    let c_num = (&(&c.alpha.conj() * &j1b) * &bessel_j_auto(0, &xr)?).im;
    let prec = c.prec().max(lambda.prec());
    Ok(Abc {
        a: (&sqrt2(prec) * &a_num).div(&d)?,
        b: RealBall::zero(prec),
        c: c_num.div(&d)?,
    })
}

/// Finite-difference residuals of the radial ODE system at `r`.
#[derive(Clone, Debug)]
pub struct OdeResidual {
    /// `r²A″ + rA′ − A + λ²r²A + 2λr²C′`
    pub a_eq: RealBall,
    /// `r²B″ + rB′ − B + λ²r²B`
    pub b_eq: RealBall,
    /// `C′ + rC″ + 2λ²rC + 2λrA′ + 2λA`
    pub c_eq: RealBall,
}

impl OdeResidual {
    /// Largest upper bound of the three residual magnitudes.
    pub fn max_upper(&self) -> f64 {
        [&self.a_eq, &self.b_eq, &self.c_eq]
            .iter()
            .map(|b| b.abs_upper().to_f64())
            .fold(0.0, f64::max)
    }
}

/// Plugs five-point central differences of the closed form (samples at
/// `r`, `r ± h`, `r ± 2h`) into the ODE system.
pub fn ode_residual(lambda: &Rat, r: &Rat, h: &Rat, c: &Constants) -> Result<OdeResidual> {
    let prec = c.prec();
    let two = Rat::from_integer(2.into());
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    if *h <= zero || (r - &two * h) <= zero || (r + &two * h) >= one {
        return Err(Error::Domain("need h > 0 and r ± 2h inside (0, 1)".into()));
    }
    let lam = RealBall::from_rat(lambda, prec);
    let mut samples = Vec::with_capacity(5);
    for k in -2i64..=2 {
        let rk = r + h * Rat::from_integer(k.into());
        samples.push(abc_closed_form(&lam, &RealBall::from_rat(&rk, prec), c)?);
    }
    let hb = RealBall::from_rat(h, prec);
    let d1 = |f: &dyn Fn(&Abc) -> RealBall| -> Result<RealBall> {
        let v: Vec<RealBall> = samples.iter().map(f).collect();
        let num = &(&v[0] - &v[4]) + &(&v[3] - &v[1]).mul_i64(8);
        num.div(&hb.mul_i64(12))
    };
    let d2 = |f: &dyn Fn(&Abc) -> RealBall| -> Result<RealBall> {
        let v: Vec<RealBall> = samples.iter().map(f).collect();
        let num = &(&(&v[1] + &v[3]).mul_i64(16) - &(&v[0] + &v[4])) - &v[2].mul_i64(30);
        num.div(&hb.sqr().mul_i64(12))
    };
    let get_a = |s: &Abc| s.a.clone();
    let get_b = |s: &Abc| s.b.clone();
    let get_c = |s: &Abc| s.c.clone();
    let rb = RealBall::from_rat(r, prec);
    let r2 = rb.sqr();
    let lam2 = lam.sqr();
    let (a, b, cc) = (&samples[2].a, &samples[2].b, &samples[2].c);
    let (a1, a2) = (d1(&get_a)?, d2(&get_a)?);
    let (b1, b2) = (d1(&get_b)?, d2(&get_b)?);
    let (c1, c2) = (d1(&get_c)?, d2(&get_c)?);

    let a_eq = &(&(&(&r2 * &a2) + &(&rb * &a1)) - a) + &(&(&(&lam2 * &r2) * a) + &(&(&lam * &r2) * &c1).mul_i64(2));
    let b_eq = &(&(&(&r2 * &b2) + &(&rb * &b1)) - b) + &(&(&lam2 * &r2) * b);
    let c_eq = &(&(&c1 + &(&rb * &c2)) + &(&(&lam2 * &rb) * cc).mul_i64(2))
        + &(&(&(&lam * &rb) * &a1).mul_i64(2) + &(&lam * a).mul_i64(2));
    Ok(OdeResidual { a_eq, b_eq, c_eq })
}
