//! Developed levels continued in ball arithmetic past the exact cap.
//!
//! The zero-boundary Dirichlet solve is linear, so `solve(Σ c_ab x^a y^b)` is
//! `Σ c_ab S_ab` with `S_ab = solve(x^a y^b)` computed exactly once and cached
//! as balls. Every coefficient stays a rigorous enclosure, but nothing here is
//! an exact rational.

use std::collections::{BTreeMap, HashMap};

use crate::ball::RealBall;
use crate::development::Vec3Poly;
use crate::exact::Poly2;

use super::solve_poisson_zero_bd;

/// Sparse bivariate polynomial with ball coefficients.
#[derive(Clone, Debug, Default)]
pub struct BallPoly(BTreeMap<(u32, u32), RealBall>);

impl BallPoly {
    pub fn from_exact(p: &Poly2, prec: u32) -> Self {
        Self(p.terms().map(|(e, c)| (e, RealBall::from_rat(c, prec))).collect())
    }

    pub fn coeff(&self, i: u32, j: u32, prec: u32) -> RealBall {
        self.0.get(&(i, j)).cloned().unwrap_or_else(|| RealBall::zero(prec))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn add_scaled(&mut self, other: &Self, k: i64) {
        for (e, c) in &other.0 {
            let t = c.mul_i64(k);
            match self.0.get_mut(e) {
                Some(v) => *v = &*v + &t,
                None => {
                    self.0.insert(*e, t);
                }
            }
        }
    }

    fn partial(&self, axis: usize) -> Self {
        let mut out = BTreeMap::new();
        for (&(i, j), c) in &self.0 {
            let (k, e) = if axis == 0 { (i, (i.wrapping_sub(1), j)) } else { (j, (i, j.wrapping_sub(1))) };
            if k > 0 {
                out.insert(e, c.mul_i64(k as i64));
            }
        }
        Self(out)
    }
}

type Basis = Vec<((u32, u32), RealBall)>;

/// Continues the developed recursion from two exact seed levels.
#[derive(Debug)]
pub struct BallHierarchy {
    prec: u32,
    first: usize,
    levels: Vec<[BallPoly; 3]>,
    cache: HashMap<(u32, u32), Basis>,
}

impl BallHierarchy {
    /// `seed_prev` and `seed` are the exact levels `n − 1` and `n`.
    pub fn new(seed_prev: &Vec3Poly, seed: &Vec3Poly, n: usize, prec: u32) -> Self {
        let conv = |v: &Vec3Poly| v.0.each_ref().map(|p| BallPoly::from_exact(p, prec));
        Self {
            prec,
            first: n - 1,
            levels: vec![conv(seed_prev), conv(seed)],
            cache: HashMap::new(),
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn max_level(&self) -> usize {
        self.first + self.levels.len() - 1
    }

    fn solve(&mut self, f: &BallPoly) -> BallPoly {
        let prec = self.prec;
        let mut out: BTreeMap<(u32, u32), RealBall> = BTreeMap::new();
        for (&(a, b), c) in &f.0 {
            let basis = self.cache.entry((a, b)).or_insert_with(|| {
                solve_poisson_zero_bd(&Poly2::monomial(a, b, crate::exact::rat::int(1)))
                    .terms()
                    .map(|(e, q)| (e, RealBall::from_rat(q, prec)))
                    .collect()
            });
            for (e, s) in basis.iter() {
                let t = c * s;
                match out.get_mut(e) {
                    Some(v) => *v = &*v + &t,
                    None => {
                        out.insert(*e, t);
                    }
                }
            }
        }
        BallPoly(out)
    }

    fn step(&mut self) {
        let k = self.levels.len();
        let [a1, b1, c1] = &self.levels[k - 1];
        let [a2, b2, c2] = &self.levels[k - 2];
        let mut f0 = BallPoly::default();
        f0.add_scaled(&c1.partial(0), -2);
        f0.add_scaled(a2, -1);
        let mut f1 = BallPoly::default();
        f1.add_scaled(&c1.partial(1), -2);
        f1.add_scaled(b2, -1);
        let mut f2 = BallPoly::default();
        f2.add_scaled(&a1.partial(0), -2);
        f2.add_scaled(&b1.partial(1), -2);
        f2.add_scaled(c2, -2);
        let next = [self.solve(&f0), self.solve(&f1), self.solve(&f2)];
        self.levels.push(next);
    }

    /// Enclosure of `aₙ`, extending the recursion as needed.
    pub fn a_coefficient(&mut self, n: usize) -> RealBall {
        assert!(n >= self.first, "level {n} precedes the seed");
        while self.max_level() < n {
            self.step();
        }
        self.levels[n - self.first][2].coeff(0, 0, self.prec)
    }
}
