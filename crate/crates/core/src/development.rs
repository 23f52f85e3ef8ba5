//! The hyperbolic development `M : ℝ² → M₃(ℝ)`,
//!
//! ```text
//!            ⎛ 0  0  x₁ ⎞
//! M(x₁,x₂) = ⎜ 0  0  x₂ ⎟
//!            ⎝ x₁ x₂ 0  ⎠
//! ```
//!
//! extended multiplicatively to words, `M(e_{i₁}⊗…⊗e_{iₙ}) = M(e_{i₁})⋯M(e_{iₙ})`,
//! and linearly to tensors. Contractions against a fixed vector are done by a
//! right fold over word suffixes, so no 3×3 word products are ever formed.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::RealBall;
use crate::exact::{Poly2, Rat, TensorPoly};
use crate::exact::tensor::word_letters;

/// Scalar domain the development runs over: exact rationals, `f64`, or balls.
///
/// The `*_like` constructors take a sample value so that context (such as the
/// working precision of a ball) carries over.
pub trait Scalar: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rat_like(&self, r: &Rat) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
}

impl Scalar for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }
    fn one_like(&self) -> Self {
        Rat::one()
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        r.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        crate::exact::rat::to_f64(r)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for RealBall {
    fn zero_like(&self) -> Self {
        RealBall::zero(self.prec())
    }
    fn one_like(&self) -> Self {
        RealBall::one(self.prec())
    }
    fn from_rat_like(&self, r: &Rat) -> Self {
        RealBall::from_rat(r, self.prec())
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

pub type Matrix3<S> = [[S; 3]; 3];
pub type Vec3<S> = [S; 3];

/// `M(x)` for a vector `x = (x₁, x₂)`.
pub fn m_of_vector<S: Scalar>(x: &[S; 2]) -> Matrix3<S> {
    let z = x[0].zero_like();
    [
        [z.clone(), z.clone(), x[0].clone()],
        [z.clone(), z.clone(), x[1].clone()],
        [x[0].clone(), x[1].clone(), z],
    ]
}

pub fn identity<S: Scalar>(sample: &S) -> Matrix3<S> {
    let (z, o) = (sample.zero_like(), sample.one_like());
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { o.clone() } else { z.clone() }))
}

pub fn mat_mul<S: Scalar>(a: &Matrix3<S>, b: &Matrix3<S>) -> Matrix3<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = a[i][0].mul(&b[0][j]);
            for k in 1..3 {
                acc = acc.add(&a[i][k].mul(&b[k][j]));
            }
            acc
        })
    })
}

pub fn mat_vec<S: Scalar>(a: &Matrix3<S>, v: &Vec3<S>) -> Vec3<S> {
    std::array::from_fn(|i| {
        a[i][0]
            .mul(&v[0])
            .add(&a[i][1].mul(&v[1]))
            .add(&a[i][2].mul(&v[2]))
    })
}

/// `M(e_letter)` with `letter` 0 for `e₁`, 1 for `e₂`.
pub fn m_basis(letter: usize) -> Matrix3<Rat> {
    let (o, z) = (Rat::one(), Rat::zero());
    match letter {
        0 => m_of_vector(&[o, z]),
        1 => m_of_vector(&[z, o]),
        _ => panic!("letter must be 0 or 1, got {letter}"),
    }
}

/// Ordered product `M(e_{i₁})⋯M(e_{iₙ})`; the empty word gives the identity.
///
/// Letters are `0` for `e₁` and `1` for `e₂`.
pub fn m_word(letters: &[usize]) -> Matrix3<Rat> {
    letters
        .iter()
        .fold(identity(&Rat::zero()), |acc, &l| mat_mul(&acc, &m_basis(l)))
}

/// `M(e_letter)·v` written out: `M(e₁)(a,b,c) = (c,0,a)`, `M(e₂)(a,b,c) = (0,c,b)`.
fn apply_basis_poly(letter: usize, v: &Vec3Poly) -> Vec3Poly {
    let [a, b, c] = &v.0;
    match letter {
        0 => Vec3Poly([c.clone(), Poly2::zero(), a.clone()]),
        _ => Vec3Poly([Poly2::zero(), c.clone(), b.clone()]),
    }
}

/// Triple of polynomials; the developed level `Vₙ(z)` lives here.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vec3Poly(pub [Poly2; 3]);

impl Vec3Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(v: &Vec3<Rat>) -> Self {
        Self(std::array::from_fn(|i| Poly2::constant(v[i].clone())))
    }

    pub fn component(&self, i: usize) -> &Poly2 {
        &self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly2::is_zero)
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Vec3<Rat> {
        std::array::from_fn(|i| self.0[i].eval(x, y))
    }

    pub fn eval_scalar<S: Scalar>(&self, x: &S, y: &S) -> Vec3<S> {
        std::array::from_fn(|i| eval_poly(&self.0[i], x, y))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self(std::array::from_fn(|i| self.0[i].scale(c)))
    }

    pub fn map(&self, f: impl Fn(&Poly2) -> Poly2) -> Self {
        Self(std::array::from_fn(|i| f(&self.0[i])))
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.iter().filter_map(Poly2::degree).max()
    }
}

/// Evaluates `p` at `(x, y)` in any scalar domain.
pub fn eval_poly<S: Scalar>(p: &Poly2, x: &S, y: &S) -> S {
    let Some(deg) = p.degree() else {
        return x.zero_like();
    };
    let powers = |base: &S| {
        let mut out = vec![base.one_like()];
        for k in 1..=deg as usize {
            out.push(out[k - 1].mul(base));
        }
        out
    };
    let (px, py) = (powers(x), powers(y));
    let mut acc = x.zero_like();
    for ((i, j), c) in p.terms() {
        let term = x.from_rat_like(c).mul(&px[i as usize]).mul(&py[j as usize]);
        acc = acc.add(&term);
    }
    acc
}

/// `M(T)·v` by right fold over word suffixes.
///
/// Stage 0 holds `T_w · v` for every full word; each following stage consumes
/// the last letter, `W[u] = Σ_i M(e_i)·W[u·i]`, until only the empty word is
/// left. Cost is linear in the `2ⁿ` entries.
pub fn fold_apply(t: &TensorPoly, v: &Vec3<Rat>) -> Vec3Poly {
    let mut stage: Vec<Vec3Poly> = t
        .entries()
        .iter()
        .map(|p| Vec3Poly(std::array::from_fn(|c| p.scale(&v[c]))))
        .collect();
    for _ in 0..t.level() {
        stage = stage
            .chunks(2)
            .map(|pair| apply_basis_poly(0, &pair[0]).add(&apply_basis_poly(1, &pair[1])))
            .collect();
    }
    stage.pop().unwrap_or_default()
}

/// Left-fold variant of [`fold_apply`], used to cross-check it.
///
/// Stage `k` holds, for every suffix `s` of length `n − k`, the matrix
/// `Σ_{|u|=k} T_{us}·M(u)`; each stage consumes the first letter `i` of the
/// suffix by right-multiplying with `M(e_i)`.
pub fn fold_apply_left(t: &TensorPoly, v: &Vec3<Rat>) -> Vec3Poly {
    type PolyMat = [[Poly2; 3]; 3];
    let n = t.level();
    let mut stage: Vec<PolyMat> = t
        .entries()
        .iter()
        .map(|p| std::array::from_fn(|i| std::array::from_fn(|j| if i == j { p.clone() } else { Poly2::zero() })))
        .collect();
    for depth in 0..n {
        let rest = n - depth - 1;
        stage = (0..1usize << rest)
            .map(|suffix| {
                let mut acc: PolyMat = Default::default();
                for letter in 0..2 {
                    let src = &stage[(letter << rest) | suffix];
                    let m = m_basis(letter);
                    for i in 0..3 {
                        for j in 0..3 {
                            for k in 0..3 {
                                if !m[k][j].is_zero() {
                                    acc[i][j] = &acc[i][j] + &src[i][k].scale(&m[k][j]);
                                }
                            }
                        }
                    }
                }
                acc
            })
            .collect();
    }
    let m = stage.pop().unwrap_or_default();
    Vec3Poly(std::array::from_fn(|i| {
        (0..3).fold(Poly2::zero(), |acc, j| acc + m[i][j].scale(&v[j]))
    }))
}

/// Naive `Σ_w T_w · M(w) · v`, forming every word product. Test oracle.
pub fn fold_apply_naive(t: &TensorPoly, v: &Vec3<Rat>) -> Vec3Poly {
    let n = t.level();
    let mut out = Vec3Poly::zero();
    for (idx, p) in t.entries().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let letters: Vec<usize> = word_letters(n, idx).collect();
        let mv = mat_vec(&m_word(&letters), v);
        out = out.add(&Vec3Poly(std::array::from_fn(|c| p.scale(&mv[c]))));
    }
    out
}

/// `Σ_{n≤N} λⁿ Vₙ(z)` from precomputed developed levels.
pub fn partial_sum_f<S: Scalar>(lambda: &S, z: &[S; 2], n_max: usize, levels: &[Vec3Poly]) -> Vec3<S> {
    assert!(levels.len() > n_max, "levels 0..={n_max} required, have {}", levels.len());
    let zero = lambda.zero_like();
    let mut acc: Vec3<S> = [zero.clone(), zero.clone(), zero];
    let mut pow = lambda.one_like();
    for level in &levels[..=n_max] {
        let v = level.eval_scalar(&z[0], &z[1]);
        for c in 0..3 {
            acc[c] = acc[c].add(&pow.mul(&v[c]));
        }
        pow = pow.mul(lambda);
    }
    acc
}

/// Quarter-turn `R` extended by `1`: `(R⊕1)` as an exact matrix.
pub fn quarter_turn_plus_one() -> Matrix3<Rat> {
    let (o, z) = (Rat::one(), Rat::zero());
    [
        [z.clone(), -o.clone(), z.clone()],
        [o.clone(), z.clone(), z.clone()],
        [z.clone(), z, o],
    ]
}

pub fn transpose<S: Scalar>(a: &Matrix3<S>) -> Matrix3<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}
