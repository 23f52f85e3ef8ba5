#![allow(dead_code)]

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use expsig::ball::{ComplexBall, Dyadic, RealBall};
use expsig::bessel::{bessel_j_auto, d_lambda, make_constants, Constants};
use expsig::development::{fold_apply, fold_apply_left, fold_apply_naive, Vec3Poly};
use expsig::exact::rat::{rat, Rat};
use expsig::exact::{Poly2, TensorPoly};
use expsig::hierarchy::HierarchyState;
use expsig::montecarlo::{signature_of_path, Signature};

pub const CASES: u32 = 128;
pub const LEVELS: usize = 16;
pub const PREC: u32 = 128;

pub fn developed() -> &'static [Vec3Poly] {
    static CELL: OnceLock<Vec<Vec3Poly>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut h = HierarchyState::new();
        h.developed_levels(LEVELS).unwrap().to_vec()
    })
}

pub fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| make_constants(PREC).unwrap())
}

pub fn small_rat() -> impl Strategy<Value = Rat> {
    (-24i64..=24, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

pub fn poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = Poly2> {
    prop::collection::vec(((0..=max_deg, 0..=max_deg), small_rat()), 0..=max_terms)
        .prop_map(Poly2::from_terms)
}

pub fn tensor(max_level: usize) -> impl Strategy<Value = TensorPoly> {
    (0..=max_level).prop_flat_map(|n| {
        prop::collection::vec(poly(2, 3), 1 << n)
            .prop_map(move |entries| TensorPoly::from_entries(n, entries).unwrap())
    })
}

pub fn increments(max_len: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((-0.6f64..0.6, -0.6f64..0.6).prop_map(|(a, b)| [a, b]), 1..=max_len)
}

pub fn ball_around(x: f64, r: f64) -> RealBall {
    RealBall::from_f64(x, PREC).add_error(&Dyadic::from_f64(r).unwrap())
}

fn ensure(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

pub fn chen(path: &[[f64; 2]], cut: usize, level: usize) -> Result<(), TestCaseError> {
    let cut = cut.min(path.len());
    let whole = signature_of_path(path, level);
    let joined = signature_of_path(&path[..cut], level).chen(&signature_of_path(&path[cut..], level));
    ensure(whole.max_abs_diff(&joined) < 1e-12, "S(a·b) ≠ S(a) ⊗ S(b)")?;
    let mut streamed = Signature::identity(level);
    for d in path {
        streamed.extend(*d);
    }
    ensure(whole.max_abs_diff(&streamed) < 1e-12, "streaming differs")
}

pub fn fold(t: &TensorPoly, v: &[Rat; 3]) -> Result<(), TestCaseError> {
    let right = fold_apply(t, v);
    ensure(right == fold_apply_naive(t, v), "right fold ≠ brute force")?;
    ensure(right == fold_apply_left(t, v), "right fold ≠ left fold")
}

pub fn quarter_turn(n: usize, x: &Rat, y: &Rat) -> Result<(), TestCaseError> {
    let v = &developed()[n];
    let [a, b, c] = v.eval(x, y);
    let [ra, rb, rc] = v.eval(&-y.clone(), x);
    ensure(ra == -b && rb == a && rc == c, "Vₙ(Rz) ≠ (R⊕1)Vₙ(z)")
}

pub fn conjugate_symmetry(re: f64, im: f64, nu: u32) -> Result<(), TestCaseError> {
    let x = ComplexBall::new(RealBall::from_f64(re, PREC), RealBall::from_f64(im, PREC));
    let direct = bessel_j_auto(nu, &x.conj()).unwrap();
    let mirrored = bessel_j_auto(nu, &x).unwrap().conj();
    ensure(direct.overlaps(&mirrored), "J(x̄) and conj J(x) disjoint")
}

pub fn real_nesting(a: f64, b: f64, ra: f64, rb: f64) -> Result<(), TestCaseError> {
    let (ia, ib) = (RealBall::from_f64(a, PREC), RealBall::from_f64(b, PREC));
    let (oa, ob) = (ball_around(a, ra), ball_around(b, rb));
    ensure(oa.add(&ob).contains(&ia.add(&ib)), "add")?;
    ensure(oa.sub(&ob).contains(&ia.sub(&ib)), "sub")?;
    ensure(oa.mul(&ob).contains(&ia.mul(&ib)), "mul")?;
    if let Ok(q) = oa.div(&ob) {
        ensure(q.contains(&ia.div(&ib).unwrap()), "div")?;
    }
    if let Ok(s) = oa.abs().sqrt() {
        ensure(s.contains(&ia.abs().sqrt().unwrap()), "sqrt")?;
    }
    Ok(())
}

pub fn bessel_nesting(re: f64, im: f64, r: f64, nu: u32) -> Result<(), TestCaseError> {
    let inner = ComplexBall::new(RealBall::from_f64(re, PREC), RealBall::from_f64(im, PREC));
    let outer = ComplexBall::new(ball_around(re, r), ball_around(im, r));
    let ji = bessel_j_auto(nu, &inner).unwrap();
    let jo = bessel_j_auto(nu, &outer).unwrap();
    ensure(jo.contains(&ji), "J not nested")?;
    let di = d_lambda(&RealBall::from_f64(re.abs() / 2.0, PREC), constants()).unwrap();
    let dout = d_lambda(&ball_around(re.abs() / 2.0, r), constants()).unwrap();
    ensure(dout.contains(&di), "d not nested")
}

/// Runs the named suites with a fixed-seed runner; `(name, cases or failure)`.
pub fn run_named_suites() -> Vec<(&'static str, Result<u32, String>)> {
    fn go<S: Strategy>(
        s: S,
        f: impl Fn(S::Value) -> Result<(), TestCaseError>,
    ) -> Result<u32, String> {
        let mut runner = TestRunner::new(Config {
            cases: CASES,
            rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
            failure_persistence: None,
            ..Config::default()
        });
        runner.run(&s, f).map(|_| CASES).map_err(|e| e.to_string())
    }
    vec![
        (
            "chen identity",
            go((increments(24), 0usize..24, 1usize..=6), |(p, c, l)| chen(&p, c, l)),
        ),
        (
            "fold brute-force equivalence",
            go((tensor(6), [small_rat(), small_rat(), small_rat()]), |(t, v)| fold(&t, &v)),
        ),
        (
            "quarter-turn equivariance",
            go((0..=LEVELS, small_rat(), small_rat()), |(n, x, y)| quarter_turn(n, &x, &y)),
        ),
        (
            "conjugate symmetry of J",
            go((-9.0f64..9.0, -9.0f64..9.0, 0u32..=1), |(a, b, nu)| conjugate_symmetry(a, b, nu)),
        ),
        (
            "ball containment monotonicity",
            go(
                (-50.0f64..50.0, -50.0f64..50.0, 0.0f64..0.5, 0.0f64..0.5, 0.0f64..0.01, 0u32..=1),
                |(a, b, ra, rb, r, nu)| {
                    real_nesting(a, b, ra, rb)?;
                    bessel_nesting(a / 8.0, b / 8.0, r, nu)
                },
            ),
        ),
    ]
}
