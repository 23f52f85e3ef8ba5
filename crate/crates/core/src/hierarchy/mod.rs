//! Exact solution of the expected-signature PDE hierarchy on the unit disk.
//!
//! Level `n` of `Φ(z)` solves
//!
//! ```text
//! Δπₙ = −2 Σᵢ eᵢ ⊗ ∂ᵢπₙ₋₁ − (Σᵢ eᵢ⊗eᵢ) ⊗ πₙ₋₂,   πₙ = 0 on |z| = 1,
//! ```
//!
//! with `π₀ = 1`, `π₁ = 0`. Developing against `(0,0,1)` closes the
//! recursion on 3-vectors:
//!
//! ```text
//! ΔVₙ = −2 Σᵢ M(eᵢ) ∂ᵢVₙ₋₁ − diag(1, 1, 2) Vₙ₋₂,   Vₙ = 0 on |z| = 1 (n ≥ 1).
//! ```
//!
//! Every right-hand side is a polynomial, so each level is obtained by exact
//! polynomial Dirichlet solves.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::development::{fold_apply, Vec3, Vec3Poly};
use crate::error::{Error, Result};
use crate::exact::{boundary_trace, harmonic_extension, rat, Poly2, Rat, TensorPoly};

pub mod ball;

/// Default deepest full-tensor level (2ⁿ entries per level).
pub const TENSOR_LEVEL_DEFAULT_CAP: usize = 12;
/// Hard ceiling for full-tensor levels.
pub const TENSOR_LEVEL_HARD_CAP: usize = 16;
/// Default deepest developed level.
pub const DEVELOPED_LEVEL_DEFAULT_CAP: usize = 60;
/// Hard ceiling for developed levels.
pub const DEVELOPED_LEVEL_HARD_CAP: usize = 200;

/// A polynomial `u` with `Δu = f` (no boundary condition).
///
/// For a monomial, `x^{a+2} y^b / ((a+1)(a+2))` has Laplacian
/// `x^a y^b + b(b−1)/((a+1)(a+2)) · x^{a+2} y^{b−2}`; the second term is
/// removed by recursing on a monomial with smaller `y`-degree, so the
/// undetermined-coefficient system is solved by back substitution.
pub fn particular_solution(f: &Poly2) -> Poly2 {
    let mut u = Poly2::zero();
    for ((a0, b0), c0) in f.terms() {
        let (mut a, mut b, mut c) = (a0, b0, c0.clone());
        loop {
            let denom = Rat::from_integer(((a + 1) * (a + 2)).into());
            let coeff = &c / &denom;
            u.add_term(a + 2, b, coeff.clone());
            if b < 2 {
                break;
            }
            c = -coeff * Rat::from_integer((b * (b - 1)).into());
            a += 2;
            b -= 2;
        }
    }
    u
}

/// The unique polynomial `u` with `Δu = f` in the disk and `u = 0` on the
/// unit circle.
pub fn solve_poisson_zero_bd(f: &Poly2) -> Poly2 {
    if f.is_zero() {
        return Poly2::zero();
    }
    let up = particular_solution(f);
    let u = &up - &harmonic_extension(&boundary_trace(&up));
    debug_assert!(u.laplacian() == *f, "Poisson solve inconsistent");
    u
}

/// Right-hand side of the tensor PDE at level `n ≥ 2`, entry by entry.
pub fn tensor_rhs(prev: &TensorPoly, prev2: &TensorPoly) -> TensorPoly {
    let n = prev.level() + 1;
    assert_eq!(prev2.level() + 2, n, "levels must be consecutive");
    let tail_mask = (1usize << (n - 1)) - 1;
    let tail2_mask = if n >= 2 { (1usize << (n - 2)) - 1 } else { 0 };
    let entries = (0..1usize << n)
        .map(|idx| {
            let first = idx >> (n - 1);
            let mut rhs = prev.entry(idx & tail_mask).partial(first).scale(&Rat::from_integer((-2).into()));
            // (e₁⊗e₁ + e₂⊗e₂) ⊗ πₙ₋₂ only touches words starting 11 or 22.
            let head2 = idx >> (n - 2);
            if head2 == 0b00 || head2 == 0b11 {
                rhs = &rhs - prev2.entry(idx & tail2_mask);
            }
            rhs
        })
        .collect();
    TensorPoly::from_entries(n, entries).expect("2^n entries")
}

/// Right-hand side of the developed PDE at level `n ≥ 2`:
/// `−2 (∂ₓc, ∂ᵧc, ∂ₓa + ∂ᵧb)(Vₙ₋₁) − (a, b, 2c)(Vₙ₋₂)`.
pub fn developed_rhs(prev: &Vec3Poly, prev2: &Vec3Poly) -> Vec3Poly {
    let m2 = Rat::from_integer((-2).into());
    let [a1, b1, c1] = &prev.0;
    let [a2, b2, c2] = &prev2.0;
    let first = (c1.dx().scale(&m2)) - a2;
    let second = (c1.dy().scale(&m2)) - b2;
    let third = (a1.dx() + b1.dy()).scale(&m2) - c2.scale(&Rat::from_integer(2.into()));
    Vec3Poly([first, second, third])
}

fn solve_entries(rhs: Vec<Poly2>) -> Vec<Poly2> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        rhs.par_iter().map(solve_poisson_zero_bd).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        rhs.iter().map(solve_poisson_zero_bd).collect()
    }
}

/// Computed levels of both hierarchies, grown on demand.
///
/// Level `n` depends on levels `n − 1` and `n − 2` only; requests for a deep
/// level compute every missing level below it in order.
#[derive(Clone, Debug)]
pub struct HierarchyState {
    tensor_levels: Vec<TensorPoly>,
    developed_levels: Vec<Vec3Poly>,
    tensor_cap: usize,
    developed_cap: usize,
}

impl Default for HierarchyState {
    fn default() -> Self {
        Self::new()
    }
}

impl HierarchyState {
    pub fn new() -> Self {
        Self::with_caps(TENSOR_LEVEL_DEFAULT_CAP, DEVELOPED_LEVEL_DEFAULT_CAP)
            .expect("default caps are within hard caps")
    }

    pub fn with_caps(tensor_cap: usize, developed_cap: usize) -> Result<Self> {
        if tensor_cap > TENSOR_LEVEL_HARD_CAP {
            return Err(Error::LevelCap {
                what: "tensor levels",
                requested: tensor_cap,
                cap: TENSOR_LEVEL_HARD_CAP,
            });
        }
        if developed_cap > DEVELOPED_LEVEL_HARD_CAP {
            return Err(Error::LevelCap {
                what: "developed levels",
                requested: developed_cap,
                cap: DEVELOPED_LEVEL_HARD_CAP,
            });
        }
        let e3 = [Rat::zero(), Rat::zero(), Rat::one()];
        Ok(Self {
            tensor_levels: vec![TensorPoly::scalar(Poly2::one()), TensorPoly::zero(1)],
            developed_levels: vec![Vec3Poly::constant(&e3), Vec3Poly::zero()],
            tensor_cap,
            developed_cap,
        })
    }

    pub fn tensor_cap(&self) -> usize {
        self.tensor_cap
    }

    pub fn developed_cap(&self) -> usize {
        self.developed_cap
    }

    /// Highest tensor level computed so far.
    pub fn max_tensor_level(&self) -> usize {
        self.tensor_levels.len() - 1
    }

    pub fn max_developed_level(&self) -> usize {
        self.developed_levels.len() - 1
    }

    /// `πₙ(Φ(z))`.
    pub fn phi_level(&mut self, n: usize) -> Result<&TensorPoly> {
        if n > self.tensor_cap {
            return Err(Error::LevelCap {
                what: "tensor levels",
                requested: n,
                cap: self.tensor_cap,
            });
        }
        while self.tensor_levels.len() <= n {
            let k = self.tensor_levels.len();
            let rhs = tensor_rhs(&self.tensor_levels[k - 1], &self.tensor_levels[k - 2]);
            let solved = solve_entries(rhs.entries().to_vec());
            self.tensor_levels
                .push(TensorPoly::from_entries(k, solved).expect("2^n entries"));
        }
        Ok(&self.tensor_levels[n])
    }

    /// `Vₙ(z) = M(πₙ(Φ(z)))·(0,0,1)ᵀ`.
    pub fn developed_level(&mut self, n: usize) -> Result<&Vec3Poly> {
        if n > self.developed_cap {
            return Err(Error::LevelCap {
                what: "developed levels",
                requested: n,
                cap: self.developed_cap,
            });
        }
        while self.developed_levels.len() <= n {
            let k = self.developed_levels.len();
            let rhs = developed_rhs(&self.developed_levels[k - 1], &self.developed_levels[k - 2]);
            let solved = solve_entries(rhs.0.to_vec());
            let [a, b, c]: [Poly2; 3] = solved.try_into().expect("three components");
            self.developed_levels.push(Vec3Poly([a, b, c]));
        }
        Ok(&self.developed_levels[n])
    }

    /// Developed levels `0..=n`.
    pub fn developed_levels(&mut self, n: usize) -> Result<&[Vec3Poly]> {
        self.developed_level(n)?;
        Ok(&self.developed_levels[..=n])
    }

    pub fn tensor_levels(&mut self, n: usize) -> Result<&[TensorPoly]> {
        self.phi_level(n)?;
        Ok(&self.tensor_levels[..=n])
    }

    /// Exact value of `Vₙ` at a rational point.
    pub fn dev_coefficient(&mut self, n: usize, z: (&Rat, &Rat)) -> Result<Vec3<Rat>> {
        Ok(self.developed_level(n)?.eval(z.0, z.1))
    }

    /// `aₙ`, the third component of `Vₙ(0)`: the `λⁿ` coefficient of `C_λ(0)`.
    pub fn a_coefficient(&mut self, n: usize) -> Result<Rat> {
        Ok(self.developed_level(n)?.component(2).coeff(0, 0))
    }

    /// `a₀, …, a_N`.
    pub fn a_coefficients(&mut self, n_max: usize) -> Result<Vec<Rat>> {
        self.developed_level(n_max)?;
        Ok(self.developed_levels[..=n_max]
            .iter()
            .map(|v| v.component(2).coeff(0, 0))
            .collect())
    }

    /// ℓ¹ and squared ℓ² norms of `πₙ(Φ(0))`.
    pub fn level_norms(&mut self, n: usize) -> Result<LevelNorms> {
        let t = self.phi_level(n)?;
        let mut l1 = Rat::zero();
        let mut l2sq = Rat::zero();
        for p in t.entries() {
            let v = p.coeff(0, 0);
            l1 += v.abs();
            l2sq += &v * &v;
        }
        Ok(LevelNorms { n, l1, l2sq })
    }

    /// Exact checks on tensor level `n ≥ 1`.
    pub fn check_tensor_level(&mut self, n: usize) -> Result<LevelCheck> {
        self.phi_level(n)?;
        let t = &self.tensor_levels[n];
        let residual_zero = if n >= 2 {
            let rhs = tensor_rhs(&self.tensor_levels[n - 1], &self.tensor_levels[n - 2]);
            t.entries()
                .iter()
                .zip(rhs.entries())
                .all(|(u, f)| (&u.laplacian() - f).is_zero())
        } else {
            t.entries().iter().all(|u| u.laplacian().is_zero())
        };
        let boundary_zero = n == 0 || t.entries().iter().all(|u| boundary_trace(u).is_zero());
        let degree_ok = t
            .entries()
            .iter()
            .all(|u| u.degree().is_none_or(|d| d as usize <= n));
        Ok(LevelCheck {
            n,
            residual_zero,
            boundary_zero,
            degree_ok,
        })
    }

    /// Exact checks on developed level `n`.
    pub fn check_developed_level(&mut self, n: usize) -> Result<DevelopedCheck> {
        self.developed_level(n)?;
        let v = &self.developed_levels[n];
        let residual_zero = if n >= 2 {
            let rhs = developed_rhs(&self.developed_levels[n - 1], &self.developed_levels[n - 2]);
            v.0.iter().zip(rhs.0.iter()).all(|(u, f)| (&u.laplacian() - f).is_zero())
        } else {
            v.0.iter().all(|u| u.laplacian().is_zero())
        };
        let boundary_zero = n == 0 || v.0.iter().all(|u| boundary_trace(u).is_zero());
        let degree_ok = v.degree().is_none_or(|d| d as usize <= n);
        let reflection_zero = v.component(1).on_x_axis().is_zero();
        // Vₙ(Rz) = (R⊕1)Vₙ(z) with (R⊕1)(a, b, c) = (−b, a, c).
        let [a, b, c] = &v.0;
        let quarter_turn_equivariant = a.compose_quarter_turn() == -b
            && b.compose_quarter_turn() == *a
            && c.compose_quarter_turn() == *c;
        let a_n = v.component(2).coeff(0, 0);
        Ok(DevelopedCheck {
            n,
            residual_zero,
            boundary_zero,
            degree_ok,
            reflection_zero,
            quarter_turn_equivariant,
            odd_coefficient_zero: n.is_multiple_of(2) || a_n.is_zero(),
        })
    }

    /// Whether `M(πₙ)(0,0,1)ᵀ`, folded from the tensor level, equals `Vₙ`.
    pub fn check_fold_consistency(&mut self, n: usize) -> Result<bool> {
        self.phi_level(n)?;
        self.developed_level(n)?;
        let e3 = [Rat::zero(), Rat::zero(), Rat::one()];
        Ok(fold_apply(&self.tensor_levels[n], &e3) == self.developed_levels[n])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelNorms {
    pub n: usize,
    /// `Σ_w |π_w(0)|`, an upper bound for the projective norm.
    #[serde(with = "rat::serde_str")]
    pub l1: Rat,
    /// `Σ_w π_w(0)²`; its square root is a lower bound for the projective norm.
    #[serde(with = "rat::serde_str")]
    pub l2sq: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub n: usize,
    pub residual_zero: bool,
    pub boundary_zero: bool,
    pub degree_ok: bool,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.residual_zero && self.boundary_zero && self.degree_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevelopedCheck {
    pub n: usize,
    pub residual_zero: bool,
    pub boundary_zero: bool,
    pub degree_ok: bool,
    pub reflection_zero: bool,
    pub quarter_turn_equivariant: bool,
    pub odd_coefficient_zero: bool,
}

impl DevelopedCheck {
    pub fn passed(&self) -> bool {
        self.residual_zero
            && self.boundary_zero
            && self.degree_ok
            && self.reflection_zero
            && self.quarter_turn_equivariant
            && self.odd_coefficient_zero
    }
}

/// Ratio diagnostic `λ̂ₖ = √(a₂ₖ / a₂ₖ₊₂)` for the radius of convergence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `(k, λ̂ₖ)`; each value is the correctly rounded square root of an
    /// exact ratio, so relative error is below 1e-15.
    pub estimates: Vec<(usize, f64)>,
}

impl RadiusEstimate {
    pub fn last(&self) -> Option<f64> {
        self.estimates.last().map(|&(_, v)| v)
    }
}

/// Ratio estimates from coefficients `a₀..a_N` (odd entries are ignored).
pub fn radius_estimate(coeffs: &[Rat]) -> Result<RadiusEstimate> {
    let mut estimates = Vec::new();
    let mut k = 0;
    while 2 * k + 2 < coeffs.len() {
        let num = &coeffs[2 * k];
        let den = &coeffs[2 * k + 2];
        if den.is_zero() {
            return Err(Error::ZeroCoefficient { index: 2 * k + 2 });
        }
        let ratio = num / den;
        if ratio.is_negative() {
            return Err(Error::Domain(format!(
                "a_{}/a_{} is negative; no real ratio estimate",
                2 * k,
                2 * k + 2
            )));
        }
        estimates.push((k, rat::to_f64(&ratio).sqrt()));
        k += 1;
    }
    Ok(RadiusEstimate { estimates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};
    use crate::exact::TrigPoly;

    fn bubble(scale: Rat) -> Poly2 {
        Poly2::from_terms([((0, 0), int(1)), ((2, 0), int(-1)), ((0, 2), int(-1))]).scale(&scale)
    }

    #[test]
    fn poisson_examples() {
        assert!(solve_poisson_zero_bd(&Poly2::zero()).is_zero());
        assert_eq!(solve_poisson_zero_bd(&Poly2::constant(int(-1))), bubble(rat(1, 4)));
        // f = x  →  x(x² + y² − 1)/8
        let u = solve_poisson_zero_bd(&Poly2::x());
        let expect = Poly2::from_terms([((3, 0), rat(1, 8)), ((1, 2), rat(1, 8)), ((1, 0), rat(-1, 8))]);
        assert_eq!(u, expect);
        assert_eq!(u.laplacian(), Poly2::x());
        assert_eq!(boundary_trace(&u), TrigPoly::zero());
    }

    #[test]
    fn poisson_high_degree() {
        let f = Poly2::from_terms([((4, 3), rat(2, 3)), ((0, 6), int(-5)), ((1, 1), int(7))]);
        let u = solve_poisson_zero_bd(&f);
        assert_eq!(u.laplacian(), f);
        assert!(boundary_trace(&u).is_zero());
        assert!(u.degree().unwrap() <= 9);
    }

    #[test]
    fn first_tensor_levels() {
        let mut h = HierarchyState::new();
        assert_eq!(h.phi_level(0).unwrap(), &TensorPoly::scalar(Poly2::one()));
        assert!(h.phi_level(1).unwrap().is_zero());
        let t2 = h.phi_level(2).unwrap().clone();
        assert_eq!(t2.entry(0), &bubble(rat(1, 4)));
        assert!(t2.entry(1).is_zero());
        assert!(t2.entry(2).is_zero());
        assert_eq!(t2.entry(3), &bubble(rat(1, 4)));
    }

    #[test]
    fn first_developed_levels() {
        let mut h = HierarchyState::new();
        assert_eq!(h.developed_level(0).unwrap(), &Vec3Poly::constant(&[int(0), int(0), int(1)]));
        assert!(h.developed_level(1).unwrap().is_zero());
        let v2 = h.developed_level(2).unwrap().clone();
        assert_eq!(v2, Vec3Poly([Poly2::zero(), Poly2::zero(), bubble(rat(1, 2))]));
    }

    #[test]
    fn coefficients_at_origin() {
        let mut h = HierarchyState::new();
        let o = int(0);
        assert_eq!(h.dev_coefficient(0, (&o, &o)).unwrap(), [int(0), int(0), int(1)]);
        assert_eq!(h.dev_coefficient(2, (&o, &o)).unwrap(), [int(0), int(0), rat(1, 2)]);
        for n in [1, 3, 5, 7] {
            assert!(h.a_coefficient(n).unwrap().is_zero());
        }
        // Series of Im(ᾱJ₁(λζ̄))/d(λ) about 0: 1 + λ²/2 + λ⁴/16 + λ⁶/192 + …
        assert_eq!(h.a_coefficient(4).unwrap(), rat(1, 16));
        assert_eq!(h.a_coefficient(6).unwrap(), rat(1, 192));
    }

    #[test]
    fn norms() {
        let mut h = HierarchyState::new();
        let n0 = h.level_norms(0).unwrap();
        assert_eq!((n0.l1, n0.l2sq), (int(1), int(1)));
        let n2 = h.level_norms(2).unwrap();
        assert_eq!((n2.l1.clone(), n2.l2sq.clone()), (rat(1, 2), rat(1, 8)));
        let n3 = h.level_norms(3).unwrap();
        assert!(n3.l1.is_zero() && n3.l2sq.is_zero());
        let json = serde_json::to_value(&n2).unwrap();
        assert_eq!(json["l1"], "1/2");
    }

    #[test]
    fn caps_enforced() {
        let mut h = HierarchyState::with_caps(3, 4).unwrap();
        assert!(matches!(h.phi_level(4), Err(Error::LevelCap { .. })));
        assert!(matches!(h.developed_level(5), Err(Error::LevelCap { .. })));
        assert!(HierarchyState::with_caps(17, 10).is_err());
        assert!(HierarchyState::with_caps(10, 201).is_err());
    }

    #[test]
    fn radius_examples() {
        // a_n = 3^{-n} on even n
        let geo: Vec<Rat> = (0..12)
            .map(|n| if n % 2 == 0 { Rat::new(1.into(), num_traits::pow(num_bigint::BigInt::from(3), n)) } else { int(0) })
            .collect();
        let est = radius_estimate(&geo).unwrap();
        assert!(est.estimates.iter().all(|&(_, v)| (v - 3.0).abs() < 1e-14));

        let flat = vec![int(1); 9];
        let est = radius_estimate(&flat).unwrap();
        assert_eq!(est.estimates.len(), 4);
        assert!(est.estimates.iter().all(|&(_, v)| v == 1.0));

        let zero = vec![int(1), int(0), int(0)];
        assert_eq!(radius_estimate(&zero), Err(Error::ZeroCoefficient { index: 2 }));
    }

    #[test]
    fn low_levels_pass_checks() {
        let mut h = HierarchyState::new();
        for n in 0..=6 {
            assert!(h.check_tensor_level(n).unwrap().passed(), "tensor level {n}");
            assert!(h.check_developed_level(n).unwrap().passed(), "developed level {n}");
            assert!(h.check_fold_consistency(n).unwrap(), "fold level {n}");
        }
    }
}
