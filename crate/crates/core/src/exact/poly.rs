//! Sparse bivariate polynomials over [`Rat`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::rat::{self, Rat};

/// Exponent pair `(i, j)` for the monomial `x^i y^j`.
pub type Exponent = (u32, u32);

/// Polynomial in `x`, `y` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<Exponent, Rat>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rat::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rat::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Adds `c x^i y^j` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, i: u32, j: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((i, j)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &Rat)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, _), _)| i > 0)
                .map(|(&(i, j), c)| ((i - 1, j), c * Rat::from_integer(i.into()))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&(_, j), _)| j > 0)
                .map(|(&(i, j), c)| ((i, j - 1), c * Rat::from_integer(j.into()))),
        )
    }

    /// `(∂/∂x, ∂/∂y)`.
    pub fn partials(&self) -> (Self, Self) {
        (self.dx(), self.dy())
    }

    /// Derivative along coordinate axis `axis` (0 for `x`, 1 for `y`).
    pub fn partial(&self, axis: usize) -> Self {
        match axis {
            0 => self.dx(),
            1 => self.dy(),
            _ => panic!("axis must be 0 or 1, got {axis}"),
        }
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            if i >= 2 {
                out.add_term(i - 2, j, c * Rat::from_integer((i * (i - 1)).into()));
            }
            if j >= 2 {
                out.add_term(i, j - 2, c * Rat::from_integer((j * (j - 1)).into()));
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize);
        }
        acc
    }

    /// Restriction to the line `y = 0`, as a polynomial in `x` alone.
    pub fn on_x_axis(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(_, j), _)| j == 0)
                .map(|(&e, c)| (e, c.clone()))
                .collect(),
        }
    }

    /// `q(x, y) = p(-y, x)`, i.e. `p ∘ R` for the quarter-turn `R`.
    pub fn compose_quarter_turn(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            let c = if i % 2 == 1 { -c.clone() } else { c.clone() };
            out.add_term(j, i, c);
        }
        out
    }

    /// Largest bit length among numerators and denominators.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest total degree first.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(&(i, j), _)| (std::cmp::Reverse(i + j), std::cmp::Reverse(i)));
        for (&(i, j), c) in terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "y")?,
                _ => write!(f, "y^{j}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, a * b);
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly2 {
            type Output = Poly2;
            fn $m(self, rhs: Poly2) -> Poly2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly2> for Poly2 {
            type Output = Poly2;
            fn $m(self, rhs: &Poly2) -> Poly2 {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        -&self
    }
}

// JSON form: [[i, j, "num/den"], ...] in exponent order.
impl Serialize for Poly2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (&(i, j), c) in &self.terms {
            seq.serialize_element(&(i, j, rat::to_string(c)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Poly2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct PolyVisitor;
        impl<'de> Visitor<'de> for PolyVisitor {
            type Value = Poly2;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of [i, j, \"num/den\"] triples")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Poly2, A::Error> {
                let mut p = Poly2::zero();
                while let Some((i, j, c)) = seq.next_element::<(u32, u32, String)>()? {
                    let c = rat::parse(&c).map_err(de::Error::custom)?;
                    p.add_term(i, j, c);
                }
                Ok(p)
            }
        }
        d.deserialize_seq(PolyVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    fn x() -> Poly2 {
        Poly2::x()
    }
    fn y() -> Poly2 {
        Poly2::y()
    }

    #[test]
    fn additive_inverse_is_zero() {
        assert!((x() + (-x())).is_zero());
        assert_eq!((x() - x()).len(), 0);
    }

    #[test]
    fn difference_of_squares() {
        let lhs = (x() + y()) * (x() - y());
        let rhs = &x() * &x() - &y() * &y();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn scale_by_zero_and_one() {
        let p = Poly2::from_terms([((3, 1), rat(2, 3)), ((0, 0), int(5))]);
        assert_eq!(p.scale(&int(1)), p);
        assert!(p.scale(&int(0)).is_zero());
        assert_eq!(&Poly2::one() * &p, p);
    }

    #[test]
    fn power_rule_partials() {
        let p = Poly2::monomial(2, 1, int(1));
        let (px, py) = p.partials();
        assert_eq!(px, Poly2::monomial(1, 1, int(2)));
        assert_eq!(py, Poly2::monomial(2, 0, int(1)));

        let (cx, cy) = Poly2::constant(int(7)).partials();
        assert!(cx.is_zero() && cy.is_zero());

        let (cx, cy) = Poly2::monomial(3, 0, int(1)).partials();
        assert_eq!(cx, Poly2::monomial(2, 0, int(3)));
        assert!(cy.is_zero());
    }

    #[test]
    fn laplacian_examples() {
        let r2 = &x() * &x() + &y() * &y();
        assert_eq!(r2.laplacian(), Poly2::constant(int(4)));
        assert_eq!(Poly2::monomial(3, 0, int(1)).laplacian(), Poly2::monomial(1, 0, int(6)));
        let bubble = (Poly2::one() - r2).scale(&rat(1, 4));
        assert_eq!(bubble.laplacian(), Poly2::constant(int(-1)));
    }

    #[test]
    fn degree_and_eval() {
        assert_eq!(Poly2::zero().degree(), None);
        let p = Poly2::from_terms([((2, 3), int(1)), ((1, 0), int(-2))]);
        assert_eq!(p.degree(), Some(5));
        // 1*1*8 - 2*1 = 6 at (1, 2)
        assert_eq!(p.eval(&int(1), &int(2)), int(6));
    }

    #[test]
    fn quarter_turn_composition() {
        // p = x, p(R z) = -y
        assert_eq!(x().compose_quarter_turn(), -y());
        assert_eq!(y().compose_quarter_turn(), x());
        // four quarter turns are the identity
        let p = Poly2::from_terms([((3, 2), rat(1, 7)), ((0, 1), int(3)), ((1, 1), int(-1))]);
        let p4 = p
            .compose_quarter_turn()
            .compose_quarter_turn()
            .compose_quarter_turn()
            .compose_quarter_turn();
        assert_eq!(p4, p);
    }

    #[test]
    fn json_triples() {
        let p = Poly2::from_terms([((1, 0), rat(-1, 8)), ((3, 0), rat(1, 8))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[1,0,"-1/8"],[3,0,"1/8"]]"#);
        let back: Poly2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert_eq!(serde_json::to_string(&Poly2::zero()).unwrap(), "[]");
    }
}
