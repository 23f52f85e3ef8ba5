//! Trigonometric polynomials on the unit circle, and the two maps tying them
//! to [`Poly2`]: restriction to the circle and harmonic extension into the
//! disk.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly2;
use super::rat::{self, Rat};

/// `Σ_k cos_k cos(kθ) + Σ_{k≥1} sin_k sin(kθ)` with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrigPoly {
    #[serde(with = "rat::serde_map")]
    cos: BTreeMap<u32, Rat>,
    #[serde(with = "rat::serde_map")]
    sin: BTreeMap<u32, Rat>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut t = Self::zero();
        t.add_cos(0, c);
        t
    }

    pub fn cos_k(k: u32) -> Self {
        let mut t = Self::zero();
        t.add_cos(k, Rat::one());
        t
    }

    pub fn sin_k(k: u32) -> Self {
        let mut t = Self::zero();
        t.add_sin(k, Rat::one());
        t
    }

    pub fn add_cos(&mut self, k: u32, c: Rat) {
        add_into(&mut self.cos, k, c);
    }

    /// `sin(0·θ)` vanishes identically, so `k = 0` is ignored.
    pub fn add_sin(&mut self, k: u32, c: Rat) {
        if k > 0 {
            add_into(&mut self.sin, k, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cos.is_empty() && self.sin.is_empty()
    }

    pub fn cos_coeff(&self, k: u32) -> Rat {
        self.cos.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn sin_coeff(&self, k: u32) -> Rat {
        self.sin.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn cos_terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.cos.iter().map(|(&k, c)| (k, c))
    }

    pub fn sin_terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.sin.iter().map(|(&k, c)| (k, c))
    }

    pub fn max_frequency(&self) -> Option<u32> {
        self.cos.keys().chain(self.sin.keys()).copied().max()
    }

    /// Value at angle `θ`, in floating point (diagnostics only).
    pub fn eval_f64(&self, theta: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .map(|(&k, a)| rat::to_f64(a) * (k as f64 * theta).cos())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .map(|(&k, b)| rat::to_f64(b) * (k as f64 * theta).sin())
            .sum();
        c + s
    }
}

fn add_into(map: &mut BTreeMap<u32, Rat>, k: u32, c: Rat) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(k).or_insert_with(Rat::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&k);
    }
}

/// Dense working form used while restricting a polynomial to the circle.
struct DenseTrig {
    cos: Vec<Rat>,
    sin: Vec<Rat>,
}

impl DenseTrig {
    fn new(max_k: usize) -> Self {
        Self {
            cos: vec![Rat::zero(); max_k + 2],
            sin: vec![Rat::zero(); max_k + 2],
        }
    }

    fn clear(&mut self) {
        self.cos.iter_mut().for_each(|c| c.set_zero());
        self.sin.iter_mut().for_each(|c| c.set_zero());
    }

    /// Multiplies by `cos θ` using product-to-sum, for frequencies `< top`.
    fn mul_cos(&mut self, top: usize, scratch: &mut DenseTrig) {
        scratch.clear();
        let half = Rat::new(1.into(), 2.into());
        for k in 0..top {
            if !self.cos[k].is_zero() {
                let h = &self.cos[k] * &half;
                scratch.cos[k + 1] += &h;
                scratch.cos[k.abs_diff(1)] += h;
            }
            if k >= 1 && !self.sin[k].is_zero() {
                let h = &self.sin[k] * &half;
                scratch.sin[k + 1] += &h;
                if k >= 2 {
                    scratch.sin[k - 1] += h;
                }
            }
        }
        std::mem::swap(self, scratch);
    }

    fn mul_sin(&mut self, top: usize, scratch: &mut DenseTrig) {
        scratch.clear();
        let half = Rat::new(1.into(), 2.into());
        for k in 0..top {
            if !self.cos[k].is_zero() {
                let h = &self.cos[k] * &half;
                match k {
                    0 => scratch.sin[1] += &self.cos[0],
                    1 => scratch.sin[2] += h,
                    _ => {
                        scratch.sin[k + 1] += &h;
                        scratch.sin[k - 1] -= h;
                    }
                }
            }
            if k >= 1 && !self.sin[k].is_zero() {
                let h = &self.sin[k] * &half;
                scratch.cos[k - 1] += &h;
                scratch.cos[k + 1] -= h;
            }
        }
        std::mem::swap(self, scratch);
    }

    fn into_sparse(self) -> TrigPoly {
        let mut t = TrigPoly::zero();
        for (k, c) in self.cos.into_iter().enumerate() {
            t.add_cos(k as u32, c);
        }
        for (k, s) in self.sin.into_iter().enumerate() {
            t.add_sin(k as u32, s);
        }
        t
    }
}

/// Restriction of `p` to the unit circle, `x = cos θ`, `y = sin θ`.
///
/// Evaluated by nested Horner schemes (outer in `sin θ`, inner in `cos θ`),
/// each multiplication reduced with product-to-sum identities.
pub fn boundary_trace(p: &Poly2) -> TrigPoly {
    let Some(deg) = p.degree() else {
        return TrigPoly::zero();
    };
    let deg = deg as usize;
    let max_j = p.terms().map(|((_, j), _)| j).max().unwrap_or(0);

    let mut acc = DenseTrig::new(deg);
    let mut inner = DenseTrig::new(deg);
    let mut scratch = DenseTrig::new(deg);

    for j in (0..=max_j).rev() {
        // acc <- acc * sin θ + P_j(cos θ)
        if j < max_j {
            acc.mul_sin(deg + 1, &mut scratch);
        }
        let row: Vec<(u32, &Rat)> = p
            .terms()
            .filter(|((_, jj), _)| *jj == j)
            .map(|((i, _), c)| (i, c))
            .collect();
        if row.is_empty() {
            continue;
        }
        let max_i = row.iter().map(|(i, _)| *i).max().unwrap_or(0);
        inner.clear();
        let mut it = row.iter().rev().peekable();
        for i in (0..=max_i).rev() {
            if i < max_i {
                inner.mul_cos(deg + 1, &mut scratch);
            }
            if let Some((ii, c)) = it.peek() {
                if *ii == i {
                    inner.cos[0] += *c;
                    it.next();
                }
            }
        }
        for k in 0..acc.cos.len() {
            acc.cos[k] += &inner.cos[k];
            acc.sin[k] += &inner.sin[k];
        }
    }
    acc.into_sparse()
}

/// The harmonic polynomial whose restriction to the unit circle is `t`:
/// `cos kθ ↦ Re (x + iy)^k`, `sin kθ ↦ Im (x + iy)^k`.
pub fn harmonic_extension(t: &TrigPoly) -> Poly2 {
    let mut out = Poly2::zero();
    for (k, c) in t.cos_terms() {
        let (re, _) = complex_power(k);
        out = out + re.scale(c);
    }
    for (k, s) in t.sin_terms() {
        let (_, im) = complex_power(k);
        out = out + im.scale(s);
    }
    out
}

/// Real and imaginary parts of `(x + iy)^k` by the binomial theorem.
fn complex_power(k: u32) -> (Poly2, Poly2) {
    let mut re = Poly2::zero();
    let mut im = Poly2::zero();
    for m in 0..=k {
        let c = Rat::from_integer(rat::binomial(k, m));
        // i^m
        match m % 4 {
            0 => re.add_term(k - m, m, c),
            1 => im.add_term(k - m, m, c),
            2 => re.add_term(k - m, m, -c),
            _ => im.add_term(k - m, m, -c),
        }
    }
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    #[test]
    fn trace_of_x_is_cos() {
        assert_eq!(boundary_trace(&Poly2::x()), TrigPoly::cos_k(1));
        assert_eq!(boundary_trace(&Poly2::y()), TrigPoly::sin_k(1));
    }

    #[test]
    fn bubble_vanishes_on_circle() {
        let r2 = &Poly2::x() * &Poly2::x() + &Poly2::y() * &Poly2::y();
        assert!(boundary_trace(&(Poly2::one() - r2)).is_zero());
    }

    #[test]
    fn half_angle() {
        let t = boundary_trace(&Poly2::monomial(2, 0, int(1)));
        let mut expect = TrigPoly::constant(rat(1, 2));
        expect.add_cos(2, rat(1, 2));
        assert_eq!(t, expect);

        let t = boundary_trace(&Poly2::monomial(0, 2, int(1)));
        let mut expect = TrigPoly::constant(rat(1, 2));
        expect.add_cos(2, rat(-1, 2));
        assert_eq!(t, expect);

        // 2 sin cos = sin 2θ
        let t = boundary_trace(&Poly2::monomial(1, 1, int(2)));
        assert_eq!(t, TrigPoly::sin_k(2));
    }

    #[test]
    fn trace_matches_pointwise_values() {
        let p = Poly2::from_terms([
            ((5, 2), rat(3, 7)),
            ((0, 3), int(-2)),
            ((2, 2), rat(1, 5)),
            ((1, 0), int(4)),
            ((0, 0), rat(-1, 3)),
        ]);
        let t = boundary_trace(&p);
        for step in 0..17 {
            let th = step as f64 * 0.37;
            let (c, s) = (th.cos(), th.sin());
            let direct = 3.0 / 7.0 * c.powi(5) * s.powi(2) - 2.0 * s.powi(3) + 0.2 * c * c * s * s + 4.0 * c - 1.0 / 3.0;
            assert!((t.eval_f64(th) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_examples() {
        assert_eq!(harmonic_extension(&TrigPoly::cos_k(1)), Poly2::x());
        assert_eq!(harmonic_extension(&TrigPoly::constant(rat(5, 3))), Poly2::constant(rat(5, 3)));
        let x2_minus_y2 = Poly2::from_terms([((2, 0), int(1)), ((0, 2), int(-1))]);
        assert_eq!(harmonic_extension(&TrigPoly::cos_k(2)), x2_minus_y2);
        // Im (x+iy)^3 = 3x^2 y - y^3
        let im3 = Poly2::from_terms([((2, 1), int(3)), ((0, 3), int(-1))]);
        assert_eq!(harmonic_extension(&TrigPoly::sin_k(3)), im3);
    }

    #[test]
    fn sin_zero_never_stored() {
        let mut t = TrigPoly::zero();
        t.add_sin(0, int(3));
        assert!(t.is_zero());
    }
}
