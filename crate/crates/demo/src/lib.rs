//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export takes plain numbers or strings and returns JSON text, so the
//! same functions run (and are tested) natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use expsig::ball::format::parse_decimal;
use expsig::ball::RealBall;
use expsig::bessel::{abc_closed_form, d_lambda, make_constants};
use expsig::exact::rat::{self, Rat};
use expsig::hierarchy::HierarchyState;
use expsig::montecarlo::{simulate_stopped_path, SimConfig};
use expsig::pole::locate_pole;

/// Levels the page may request for partial sums.
pub const MAX_DEMO_LEVELS: usize = 80;
/// Vertices returned per path; longer walks are thinned.
pub const MAX_PATH_POINTS: usize = 4000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Enclosures of d(λ) at `samples` equally spaced λ in `[lo, hi]`.
#[wasm_bindgen]
pub fn d_curve(lo: f64, hi: f64, samples: u32, prec: u32) -> Result<String, String> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || !(2..=2000).contains(&samples) {
        return Err("need finite lo < hi and 2 ≤ samples ≤ 2000".into());
    }
    let c = make_constants(prec).map_err(err)?;
    let mut points = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let lam = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let d = d_lambda(&RealBall::from_f64(lam, prec), &c).map_err(err)?;
        points.push(json!({
            "lambda": lam,
            "mid": d.mid_f64(),
            "rad": d.rad_f64(),
            "sign": d.sign(),
        }));
    }
    Ok(Value::Array(points).to_string())
}

/// Partial sums Σ_{n≤k} λⁿaₙ (exact, shown as decimals) next to the ball
/// enclosure of C_λ(0).
#[wasm_bindgen]
pub fn series_vs_closed(lambda: &str, levels: u32) -> Result<String, String> {
    let lam: Rat = parse_decimal(lambda).map_err(err)?;
    let levels = levels as usize;
    if levels > MAX_DEMO_LEVELS {
        return Err(format!("at most {MAX_DEMO_LEVELS} levels in the demo"));
    }
    if lam < rat::int(0) {
        return Err("λ must be nonnegative".into());
    }
    let prec = expsig::ball::DEFAULT_PREC;
    let cert = locate_pole(&rat::rat(1, 100), prec).map_err(err)?;
    if lam >= cert.lo {
        return Err(format!(
            "λ is at or above the pole, certified in [{:.6}, {:.6}]",
            rat::to_f64(&cert.lo),
            rat::to_f64(&cert.hi)
        ));
    }
    let mut h = HierarchyState::with_caps(2, levels.max(2)).map_err(err)?;
    let coeffs = h.a_coefficients(levels).map_err(err)?;
    let c = make_constants(prec).map_err(err)?;
    let closed = abc_closed_form(&RealBall::from_rat(&lam, prec), &RealBall::zero(prec), &c)
        .map_err(err)?
        .c;
    let mut sum = rat::int(0);
    let mut power = rat::int(1);
    let mut rows = Vec::new();
    for (k, a) in coeffs.iter().enumerate() {
        sum += &power * a;
        power *= &lam;
        let gap = closed.sub(&RealBall::from_rat(&sum, prec)).abs_upper().to_f64();
        rows.push(json!({
            "k": k,
            "a_k": rat::to_string(a),
            "partial_sum": rat::to_f64(&sum),
            "gap": gap,
        }));
    }
    Ok(json!({
        "closed_form": { "mid": closed.mid_f64(), "rad": closed.rad_f64() },
        "pole_bracket": [rat::to_f64(&cert.lo), rat::to_f64(&cert.hi)],
        "rows": rows,
    })
    .to_string())
}

/// One discretised Brownian path from `(x, y)` stopped on the unit circle.
#[wasm_bindgen]
pub fn stopped_path(x: f64, y: f64, h: f64, seed: u32, index: u32) -> Result<String, String> {
    let cfg = SimConfig {
        start: [x, y],
        h,
        seed: seed as u64,
        ..SimConfig::default()
    };
    let path = simulate_stopped_path(&cfg, index as u64).map_err(err)?;
    let stride = path.increments.len().div_ceil(MAX_PATH_POINTS).max(1);
    let mut p = [x, y];
    let mut points = vec![p];
    for (i, d) in path.increments.iter().enumerate() {
        p = [p[0] + d[0], p[1] + d[1]];
        if (i + 1) % stride == 0 || i + 1 == path.increments.len() {
            points.push(p);
        }
    }
    Ok(json!({
        "points": points,
        "steps": path.increments.len(),
        "exit_time": path.exit_time,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn d_changes_sign_on_the_default_range() {
        let v = parse(&d_curve(2.5, 3.0, 11, 128).unwrap());
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 11);
        assert_eq!(pts[0]["sign"], -1);
        assert_eq!(pts[10]["sign"], 1);
        assert!(d_curve(3.0, 2.0, 5, 128).is_err());
    }

    #[test]
    fn series_converges_to_closed_form() {
        let v = parse(&series_vs_closed("1", 40).unwrap());
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows[2]["a_k"], "1/2");
        assert!(rows[40]["gap"].as_f64().unwrap() < 1e-8);
        assert!(series_vs_closed("2.9", 10).is_err());
        assert!(series_vs_closed("1", 500).is_err());
    }

    #[test]
    fn path_ends_on_circle() {
        let v = parse(&stopped_path(0.0, 0.0, 1e-3, 1, 0).unwrap());
        let pts = v["points"].as_array().unwrap();
        let last = &pts[pts.len() - 1];
        let r = last[0].as_f64().unwrap().hypot(last[1].as_f64().unwrap());
        assert!((r - 1.0).abs() < 1e-12);
        assert!(pts.len() <= MAX_PATH_POINTS + 2);
        assert!(stopped_path(2.0, 0.0, 1e-3, 1, 0).is_err());
    }
}
