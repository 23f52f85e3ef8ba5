//! One PASS/FAIL line per acceptance criterion.

mod support;

use std::io::Write;
use std::time::{Duration, Instant};

use expsig::ball::format::parse_decimal;
use expsig::ball::{Dyadic, RealBall};
use expsig::bessel::{abc_closed_form, d_product, make_constants};
use expsig::exact::rat::{self, int, rat, Rat};
use expsig::hierarchy::{radius_estimate, HierarchyState};
use expsig::montecarlo::{estimate_expected_sig, SimConfig};
use expsig::pole::{bound_numerator, locate_pole, verify_sign_change, PoleCertificate, DEFAULT_MAX_SUBDIVISIONS};

const PREC: u32 = 128;

/// λ̂ at the last ratio from a₀..a₆₀ (k = 29).
const RADIUS_FIXTURE: f64 = 2.823_887_056_253_575;
/// Midpoint of the 10⁻⁶ bracket.
const POLE_MIDPOINT_FIXTURE: f64 = 2.823_887_348;

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let took = t.elapsed();
    if took > limit {
        o.ok = false;
    }
    o.detail = format!("{} [{:.2?} / limit {:?}]", o.detail, took, limit);
    o
}

fn dec(s: &str) -> Rat {
    parse_decimal(s).unwrap()
}

/// Whether `b` meets `[t − tol, t + tol]` and its midpoint is within `gap` of `t`.
fn near(b: &RealBall, t: &str, tol: &str, gap: f64) -> bool {
    let (t, tol) = (dec(t), dec(tol));
    let band = RealBall::from_interval(&(&t - &tol), &(&t + &tol), PREC);
    b.overlaps(&band) && (b.mid_f64() - rat::to_f64(&t)).abs() < gap
}

fn products_near_the_pole() -> Outcome {
    let c = make_constants(PREC).unwrap();
    let cases = [
        ("2.82", "-13.208370024264", "-0.003639973760"),
        ("2.83", "-13.424373315124", "0.005782411521"),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (lam, re, im) in cases {
        let p = d_product(&RealBall::from_rat(&dec(lam), PREC), &c).unwrap();
        let hit = near(&p.re, re, "5e-13", 1e-9) && near(&p.im, im, "5e-13", 1e-9);
        ok &= hit;
        parts.push(format!("λ={lam}: {:.12} {:+.12}i", p.re.mid_f64(), p.im.mid_f64()));
    }
    outcome(ok, parts.join("; "))
}

fn endpoint_signs() -> Outcome {
    match verify_sign_change(&rat(5, 2), &int(3), PREC) {
        Ok(s) => {
            let ok = s.d_lo.upper() < Dyadic::from_f64(-0.06).unwrap()
                && s.d_hi.lower() > Dyadic::from_f64(0.03).unwrap();
            outcome(ok, format!("d(2.5) ≤ {:.6}, d(3) ≥ {:.6}", s.d_lo.upper().to_f64(), s.d_hi.lower().to_f64()))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn pole_localization() -> Outcome {
    let cert = match locate_pole(&rat(1, 1_000_000), PREC) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let inside = cert.lo >= rat(282, 100) && cert.hi <= rat(283, 100);
    let narrow = cert.width() <= rat(1, 1_000_000);
    let text = serde_json::to_string(&cert).unwrap();
    let reloaded: PoleCertificate = serde_json::from_str(&text).unwrap();
    let offline = reloaded.verify().is_ok();
    let mid = rat::to_f64(&cert.midpoint());
    let fixture = (mid - POLE_MIDPOINT_FIXTURE).abs() < 1e-6;
    outcome(
        inside && narrow && offline && fixture,
        format!(
            "[{}, {}] midpoint {mid:.9}, offline re-check {}",
            rat::to_string(&cert.lo),
            rat::to_string(&cert.hi),
            if offline { "ok" } else { "FAILED" }
        ),
    )
}

fn numerator_bound() -> Outcome {
    match bound_numerator(&rat(5, 2), &int(3), &rat(-13, 10), DEFAULT_MAX_SUBDIVISIONS, PREC) {
        Ok(n) => {
            let upper = n.enclosure.upper();
            let ok = upper <= Dyadic::from_f64(-1.3).unwrap() && upper.is_negative();
            outcome(ok, format!("max upper bound {:.4} over {} pieces", upper.to_f64(), n.pieces))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn exactness() -> Outcome {
    let mut h = HierarchyState::new();
    let mut bad = Vec::new();
    for n in 0..=12 {
        if !h.check_tensor_level(n).unwrap().passed() {
            bad.push(format!("tensor {n}"));
        }
        if n <= 10 && !h.check_fold_consistency(n).unwrap() {
            bad.push(format!("fold {n}"));
        }
    }
    for n in 0..=40 {
        let c = h.check_developed_level(n).unwrap();
        if !c.passed() {
            bad.push(format!("developed {n}: {c:?}"));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "tensor 0..=12, developed 0..=40, fold 0..=10 all exact".to_string()
        } else {
            bad.join(", ")
        },
    )
}

fn series_agreement() -> Outcome {
    let mut h = HierarchyState::new();
    let coeffs = h.a_coefficients(60).unwrap();
    let c = make_constants(PREC).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (lambda, n_max, tol) in [(int(1), 40, 1e-8), (int(2), 60, 1e-6)] {
        let mut sum = int(0);
        let mut pow = int(1);
        for a in &coeffs[..=n_max] {
            sum += &pow * a;
            pow *= &lambda;
        }
        let closed = abc_closed_form(&RealBall::from_rat(&lambda, PREC), &RealBall::zero(PREC), &c)
            .unwrap()
            .c;
        let widened = closed.add_error(&Dyadic::from_f64(tol).unwrap());
        let gap = closed.sub(&RealBall::from_rat(&sum, PREC)).abs_upper().to_f64();
        ok &= widened.contains_rat(&sum);
        parts.push(format!("λ={lambda}, N={n_max}: |gap| ≤ {gap:.2e} (tol {tol:.0e})"));
    }
    outcome(ok, parts.join("; "))
}

fn finite_radius() -> Outcome {
    let mut h = HierarchyState::new();
    let coeffs = h.a_coefficients(60).unwrap();
    let est = radius_estimate(&coeffs).unwrap();
    let k_max = est.estimates.last().unwrap().0;
    let top: Vec<_> = est.estimates.iter().filter(|(k, _)| 4 * k >= 3 * k_max).collect();
    let in_range = !top.is_empty() && top.iter().all(|(_, v)| *v > 2.5 && *v < 3.0);
    let last = est.last().unwrap();
    let fixture = (last - RADIUS_FIXTURE).abs() < 1e-12;
    outcome(
        in_range && fixture,
        format!(
            "k = {}..={k_max}: λ̂ in [{:.6}, {:.6}], final λ̂ = {last:.7}",
            top[0].0,
            top.iter().map(|t| t.1).fold(f64::INFINITY, f64::min),
            top.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max),
        ),
    )
}

fn monte_carlo() -> Outcome {
    let mut h = HierarchyState::new();
    let pi2 = h.phi_level(2).unwrap().clone();
    let mut ok = true;
    let mut parts = Vec::new();
    for (zx, zy) in [(int(0), int(0)), (rat(1, 2), int(0))] {
        let cfg = SimConfig {
            start: [rat::to_f64(&zx), rat::to_f64(&zy)],
            ..SimConfig::default()
        };
        let est = estimate_expected_sig(&cfg).unwrap();
        let mut worst: f64 = 0.0;
        for idx in 0..4 {
            let exact = rat::to_f64(&pi2.entry(idx).eval(&zx, &zy));
            worst = worst.max(est.component(2, idx).estimate.z_score(exact).abs());
        }
        let r2 = cfg.start[0].powi(2) + cfg.start[1].powi(2);
        let tau = est.exit_time.z_score((1.0 - r2) / 2.0).abs();
        ok &= worst < 3.0 && tau < 3.0;
        parts.push(format!("z=({},{}): max |z-score| level 2 {worst:.2}, τ {tau:.2}", rat::to_string(&zx), rat::to_string(&zy)));
    }
    outcome(ok, parts.join("; "))
}

fn property_suites() -> Outcome {
    let results = support::run_named_suites();
    let ok = results.iter().all(|(_, r)| r.is_ok());
    let parts: Vec<String> = results
        .iter()
        .map(|(name, r)| match r {
            Ok(n) => format!("{name} {n} cases"),
            Err(e) => format!("{name} FAILED: {e}"),
        })
        .collect();
    outcome(ok, parts.join("; "))
}

#[test]
fn acceptance() {
    let sec = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        ("Bessel product enclosures at 2.82 and 2.83", Box::new(move || timed(sec(1), products_near_the_pole))),
        ("certified d(2.5) < −0.06 and d(3) > 0.03", Box::new(move || timed(sec(1), endpoint_signs))),
        ("pole bracket of width 10⁻⁶ inside [2.82, 2.83]", Box::new(move || timed(sec(10), pole_localization))),
        ("numerator bounded by −1.3 on [2.5, 3]", Box::new(move || timed(sec(300), numerator_bound))),
        ("exact residuals, traces, fold and symmetries", Box::new(move || timed(sec(300), exactness))),
        ("partial sums against closed form", Box::new(move || timed(sec(300), series_agreement))),
        ("ratio estimates of the radius", Box::new(move || timed(sec(300), finite_radius))),
        ("Monte Carlo level 2 and exit time", Box::new(move || timed(sec(300), monte_carlo))),
        ("property suites", Box::new(move || timed(sec(300), property_suites))),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        let line = format!("{} {}. {name}: {}\n", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        if !o.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
