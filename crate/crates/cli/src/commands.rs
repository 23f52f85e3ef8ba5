use std::error::Error as StdError;
use std::fs;

use serde_json::{json, Value};

use expsig::ball::format::parse_decimal;
use expsig::ball::RealBall;
use expsig::bessel::{
    abc_closed_form, d_lambda_determinant, d_product, make_constants, ode_residual, sqrt2,
};
use expsig::development::partial_sum_f;
use expsig::exact::rat::{self, Rat};
use expsig::hierarchy::ball::BallHierarchy;
use expsig::hierarchy::{
    radius_estimate, HierarchyState, DEVELOPED_LEVEL_HARD_CAP, TENSOR_LEVEL_DEFAULT_CAP,
    TENSOR_LEVEL_HARD_CAP,
};
use expsig::montecarlo::{estimate_expected_sig, SimConfig};
use expsig::pole::{locate_pole, PoleCertificate};
use expsig::Error;

use crate::output::{csv_body, emit, json_body, RunManifest};
use crate::{
    BesselArgs, Command, CompareArgs, DevelopArgs, HierarchyArgs, McArgs, Mode, PoleArgs, RadiusArgs,
};

type CmdResult = Result<Vec<String>, Box<dyn StdError>>;

pub fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Hierarchy(a) => hierarchy(a),
        Command::Develop(a) => develop(a),
        Command::Bessel(a) => bessel(a),
        Command::Pole(a) => pole(a),
        Command::Compare(a) => compare(a),
        Command::Radius(a) => radius(a),
        Command::Mc(a) => mc(a),
    }
}

fn parse_rat(name: &str, s: &str) -> Result<Rat, Error> {
    parse_decimal(s).map_err(|_| Error::InvalidArgument(format!("--{name}: cannot read {s:?} as a rational")))
}

fn parse_point(name: &str, s: &str) -> Result<(Rat, Rat), Error> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument(format!("--{name}: expected \"x,y\", got {s:?}")))?;
    Ok((parse_rat(name, x)?, parse_rat(name, y)?))
}

fn rs(r: &Rat) -> String {
    rat::to_string(r)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "exact-pass"
    } else {
        "fail"
    }
}

fn hierarchy(a: HierarchyArgs) -> CmdResult {
    let n_max = a.levels;
    let mut failures = Vec::new();
    let mut records = Vec::new();
    let mut all_exact = true;
    match a.mode {
        Mode::Tensor => {
            if n_max > TENSOR_LEVEL_HARD_CAP {
                return Err(Error::LevelCap {
                    what: "tensor levels",
                    requested: n_max,
                    cap: TENSOR_LEVEL_HARD_CAP,
                }
                .into());
            }
            let mut h = HierarchyState::with_caps(n_max, n_max.max(2))?;
            for n in 0..=n_max {
                let norms = h.level_norms(n)?;
                let check = h.check_tensor_level(n)?;
                let fold = h.check_fold_consistency(n)?;
                let a_n = h.a_coefficient(n)?;
                if !check.passed() || !fold {
                    failures.push(format!("tensor level {n}: {check:?}, fold consistent = {fold}"));
                }
                let mut rec = json!({
                    "n": n,
                    "a_n": rs(&a_n),
                    "l1": rs(&norms.l1),
                    "l2sq": rs(&norms.l2sq),
                    "checks": {
                        "residual": verdict(check.residual_zero),
                        "boundary": verdict(check.boundary_zero),
                        "degree": verdict(check.degree_ok),
                        "fold": verdict(fold),
                    },
                });
                if a.dump_polys {
                    rec["tensor"] = serde_json::to_value(h.phi_level(n)?)?;
                }
                records.push(rec);
            }
        }
        Mode::Developed => {
            if n_max > DEVELOPED_LEVEL_HARD_CAP || a.exact_cap > DEVELOPED_LEVEL_HARD_CAP {
                return Err(Error::LevelCap {
                    what: "developed levels",
                    requested: n_max.max(a.exact_cap),
                    cap: DEVELOPED_LEVEL_HARD_CAP,
                }
                .into());
            }
            if n_max > a.exact_cap && !a.ball_fallback {
                return Err(Error::LevelCap {
                    what: "exact developed levels (pass --ball-fallback to continue in ball arithmetic)",
                    requested: n_max,
                    cap: a.exact_cap,
                }
                .into());
            }
            let exact_top = n_max.min(a.exact_cap);
            let norm_top = n_max.min(TENSOR_LEVEL_DEFAULT_CAP);
            let mut h = HierarchyState::with_caps(norm_top, exact_top.max(2))?;
            for n in 0..=exact_top {
                let check = h.check_developed_level(n)?;
                if !check.passed() {
                    failures.push(format!("developed level {n}: {check:?}"));
                }
                let mut rec = json!({
                    "n": n,
                    "exact": true,
                    "a_n": rs(&h.a_coefficient(n)?),
                    "checks": {
                        "residual": verdict(check.residual_zero),
                        "boundary": verdict(check.boundary_zero),
                        "degree": verdict(check.degree_ok),
                        "reflection": verdict(check.reflection_zero),
                        "quarter_turn": verdict(check.quarter_turn_equivariant),
                        "odd_vanishing": verdict(check.odd_coefficient_zero),
                    },
                });
                if n <= norm_top {
                    let norms = h.level_norms(n)?;
                    rec["l1"] = json!(rs(&norms.l1));
                    rec["l2sq"] = json!(rs(&norms.l2sq));
                }
                if a.dump_polys {
                    rec["vector"] = serde_json::to_value(h.developed_level(n)?)?;
                }
                records.push(rec);
            }
            if n_max > exact_top {
                all_exact = false;
                let seed_prev = h.developed_level(exact_top - 1)?.clone();
                let seed = h.developed_level(exact_top)?.clone();
                let mut b = BallHierarchy::new(&seed_prev, &seed, exact_top, a.precision);
                for n in exact_top + 1..=n_max {
                    let an = b.a_coefficient(n);
                    records.push(json!({ "n": n, "exact": false, "a_n": an.to_json_value() }));
                }
            }
        }
    }
    let mode = match a.mode {
        Mode::Tensor => "tensor",
        Mode::Developed => "developed",
    };
    let params = json!({
        "levels": n_max,
        "mode": mode,
        "dump_polys": a.dump_polys,
        "exact_cap": a.exact_cap,
        "ball_fallback": a.ball_fallback,
        "precision": a.precision,
    });
    let body = json!({
        "schema": "expsig.hierarchy/1",
        "parameters": params,
        "all_exact": all_exact,
        "checks_passed": failures.is_empty(),
        "levels": records,
    });
    emit(a.out.as_deref(), &json_body(&body), RunManifest::new("hierarchy", params))?;
    Ok(failures)
}

fn develop(a: DevelopArgs) -> CmdResult {
    let lambda = parse_rat("lambda", &a.lambda)?;
    let (x, y) = parse_point("point", &a.point)?;
    let mut h = HierarchyState::with_caps(2, a.levels.max(2))?;
    let levels = h.developed_levels(a.levels)?.to_vec();
    let vec_json = |v: &[Rat; 3]| json!([rs(&v[0]), rs(&v[1]), rs(&v[2])]);
    let values: Vec<Value> = levels
        .iter()
        .enumerate()
        .map(|(n, v)| json!({ "n": n, "value": vec_json(&v.eval(&x, &y)) }))
        .collect();
    let sums: Vec<Value> = (0..=a.levels)
        .map(|k| {
            let s = partial_sum_f(&lambda, &[x.clone(), y.clone()], k, &levels);
            json!({ "k": k, "value": vec_json(&s) })
        })
        .collect();
    let params = json!({
        "levels": a.levels,
        "lambda": rs(&lambda),
        "point": [rs(&x), rs(&y)],
    });
    let body = json!({
        "schema": "expsig.develop/1",
        "parameters": params,
        "levels": values,
        "partial_sums": sums,
    });
    emit(a.out.as_deref(), &json_body(&body), RunManifest::new("develop", params))?;
    Ok(Vec::new())
}

fn bessel(a: BesselArgs) -> CmdResult {
    let lambda = parse_rat("lambda", &a.lambda)?;
    let r = parse_rat("r", &a.r)?;
    let step = parse_rat("h", &a.h)?;
    let prec = a.precision;
    let c = make_constants(prec)?;
    let mut failures = Vec::new();
    let residual = c.defining_residual();
    let zero = Rat::from_integer(0.into());
    let residual_ok = residual.contains_rats(&zero, &zero);
    let alpha_ok = c.alpha_residual().contains_rats(&zero, &zero);
    let abs_alpha_sq = c.alpha.abs_sq();
    let modulus_ok = abs_alpha_sq.overlaps(&sqrt2(prec));
    for (ok, what) in [
        (residual_ok, "ζ⁴ + ζ² + 2 ∋ 0"),
        (alpha_ok, "α − (ζ³/2 + ζ) ∋ 0"),
        (modulus_ok, "|α|² ∋ √2"),
    ] {
        if !ok {
            failures.push(what.to_string());
        }
    }
    let lam = RealBall::from_rat(&lambda, prec);
    let product = d_product(&lam, &c)?;
    let det = d_lambda_determinant(&lam, &c)?;
    let routes_ok = det.re.overlaps(&product.im) && det.im.contains_rat(&zero);
    if !routes_ok {
        failures.push("d(λ) by Im(·) and by the determinant disagree".into());
    }
    let closed = match abc_closed_form(&lam, &RealBall::from_rat(&r, prec), &c) {
        Ok(abc) => abc.to_json_value(),
        Err(e @ Error::PoleProximity(_)) => json!({ "error": e.to_string() }),
        Err(e) => return Err(e.into()),
    };
    let ode = match ode_residual(&lambda, &r, &step, &c) {
        Ok(res) => {
            if !(res.b_eq.is_exact() && res.b_eq.contains_rat(&zero)) {
                failures.push("B equation residual is not exactly 0".into());
            }
            json!({
                "A": res.a_eq.to_json_value(),
                "B": res.b_eq.to_json_value(),
                "C": res.c_eq.to_json_value(),
                "max_abs_upper": format!("{:.3e}", res.max_upper()),
            })
        }
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    let params = json!({
        "lambda": rs(&lambda),
        "r": rs(&r),
        "h": rs(&step),
        "precision": prec,
    });
    let body = json!({
        "schema": "expsig.bessel/1",
        "parameters": params,
        "constants": {
            "zeta": c.zeta.to_json_value(),
            "alpha": c.alpha.to_json_value(),
            "abs_alpha_sq": abs_alpha_sq.to_json_value(),
            "defining_residual": residual.to_json_value(),
        },
        "product": product.to_json_value(),
        "d": product.im.to_json_value(),
        "d_determinant": det.to_json_value(),
        "closed_form": closed,
        "ode_residual": ode,
        "checks": {
            "defining_polynomial": residual_ok,
            "alpha_definition": alpha_ok,
            "abs_alpha_sq_is_sqrt2": modulus_ok,
            "determinant_route": routes_ok,
        },
    });
    emit(a.out.as_deref(), &json_body(&body), RunManifest::new("bessel", params))?;
    Ok(failures)
}

fn pole(a: PoleArgs) -> CmdResult {
    if let Some(path) = &a.verify {
        let text = fs::read_to_string(path)?;
        let cert: PoleCertificate = serde_json::from_str(&text)?;
        let result = cert.verify();
        let params = json!({ "verify": path });
        let body = json!({
            "schema": "expsig.pole-verify/1",
            "parameters": params,
            "valid": result.is_ok(),
            "detail": result.as_ref().err().map(|e| e.to_string()),
            "bracket": [rs(&cert.lo), rs(&cert.hi)],
        });
        emit(a.out.as_deref(), &json_body(&body), RunManifest::new("pole", params))?;
        return Ok(match result {
            Ok(()) => Vec::new(),
            Err(e) => vec![format!("certificate {}: {e}", path.display())],
        });
    }
    let width = parse_rat("width", &a.width)?;
    let cert = locate_pole(&width, a.precision)?;
    let params = json!({ "width": rs(&width), "precision": a.precision });
    let mut body = serde_json::to_value(&cert)?;
    let obj = body.as_object_mut().expect("certificate is an object");
    obj.insert("schema".into(), json!("expsig.pole/1"));
    obj.insert("parameters".into(), params.clone());
    obj.insert(
        "bracket_decimal".into(),
        json!([format!("{:.12}", rat::to_f64(&cert.lo)), format!("{:.12}", rat::to_f64(&cert.hi))]),
    );
    emit(a.out.as_deref(), &json_body(&body), RunManifest::new("pole", params))?;
    Ok(Vec::new())
}

fn compare(a: CompareArgs) -> CmdResult {
    let lambda = parse_rat("lambda", &a.lambda)?;
    if lambda < Rat::from_integer(0.into()) {
        return Err(Error::InvalidArgument("--lambda must be nonnegative".into()).into());
    }
    let prec = a.precision;
    let cert = locate_pole(&rat::rat(1, 100), prec)?;
    if lambda >= cert.lo {
        return Err(Error::InvalidArgument(format!(
            "λ = {} is at or above the certified pole bracket [{}, {}] (run `expsig pole` for the certificate)",
            rs(&lambda),
            rs(&cert.lo),
            rs(&cert.hi)
        ))
        .into());
    }
    let mut h = HierarchyState::with_caps(2, a.levels.max(2))?;
    let coeffs = h.a_coefficients(a.levels)?;
    let c = make_constants(prec)?;
    let closed = abc_closed_form(&RealBall::from_rat(&lambda, prec), &RealBall::zero(prec), &c)?.c;
    let (closed_mid, closed_rad) = closed.to_decimal_parts(expsig::ball::default_digits(prec));
    let mut rows = Vec::new();
    let mut sum = Rat::from_integer(0.into());
    let mut power = Rat::from_integer(1.into());
    for (k, ak) in coeffs.iter().enumerate() {
        sum += &power * ak;
        power *= &lambda;
        let s = RealBall::from_rat(&sum, prec);
        let gap = &closed - &s;
        let (gap_mid, _) = gap.to_decimal_parts(20);
        rows.push(vec![
            k.to_string(),
            s.to_decimal_parts(30).0,
            rs(&sum),
            closed_mid.clone(),
            closed_rad.clone(),
            gap_mid,
            format!("{:.3e}", gap.abs_upper().to_f64()),
        ]);
    }
    let params = json!({ "lambda": rs(&lambda), "levels": a.levels, "precision": prec });
    let header = json!({
        "schema": "expsig.compare/1",
        "parameters": params,
        "pole_bracket": [rs(&cert.lo), rs(&cert.hi)],
        "closed_form_c0": closed.to_json_value(),
    });
    let body = csv_body(
        &header,
        &["k", "partial_sum", "partial_sum_exact", "closed_mid", "closed_rad", "gap_mid", "gap_abs_upper"],
        &rows,
    );
    emit(a.out.as_deref(), &body, RunManifest::new("compare", params))?;
    Ok(Vec::new())
}

fn radius(a: RadiusArgs) -> CmdResult {
    let mut h = HierarchyState::with_caps(2, a.levels.max(2))?;
    let coeffs = h.a_coefficients(a.levels)?;
    let params = json!({ "levels": a.levels });
    let (rows, notice) = if a.levels < 4 {
        eprintln!("insufficient data: N = {} gives fewer than two ratio estimates (need N ≥ 4); no estimate reported", a.levels);
        (Vec::new(), Some("insufficient data"))
    } else {
        let est = radius_estimate(&coeffs)?;
        let rows = est
            .estimates
            .iter()
            .map(|(k, v)| vec![k.to_string(), format!("{v:.17}")])
            .collect();
        (rows, None)
    };
    let header = json!({
        "schema": "expsig.radius/1",
        "parameters": params,
        "notice": notice,
        "final": rows.last().map(|r: &Vec<String>| r[1].clone()),
    });
    let body = csv_body(&header, &["k", "lambda_hat"], &rows);
    emit(a.out.as_deref(), &body, RunManifest::new("radius", params))?;
    Ok(Vec::new())
}

fn mc(a: McArgs) -> CmdResult {
    let (x, y) = parse_point("start", &a.start)?;
    let config = SimConfig {
        start: [rat::to_f64(&x), rat::to_f64(&y)],
        h: a.h,
        level: a.level,
        paths: a.paths,
        seed: a.seed,
        bridge_correction: !a.no_bridge,
    };
    let est = estimate_expected_sig(&config)?;
    let mut rows: Vec<Vec<String>> = est
        .components
        .iter()
        .map(|c| {
            vec![
                c.level.to_string(),
                c.word.clone(),
                format!("{:e}", c.estimate.mean),
                format!("{:e}", c.estimate.std_error),
            ]
        })
        .collect();
    rows.push(vec![
        String::new(),
        "tau".into(),
        format!("{:e}", est.exit_time.mean),
        format!("{:e}", est.exit_time.std_error),
    ]);
    let params = json!({
        "start": [rs(&x), rs(&y)],
        "h": format!("{}", a.h),
        "level": a.level,
        "paths": a.paths,
        "seed": a.seed,
        "bridge_correction": !a.no_bridge,
    });
    let header = json!({
        "schema": "expsig.mc/1",
        "parameters": params,
        "immediate_exit_fraction": format!("{}", est.immediate_exit_fraction),
    });
    let body = csv_body(&header, &["level", "word", "mean", "stderr"], &rows);
    emit(a.out.as_deref(), &body, RunManifest::new("mc", params))?;
    Ok(Vec::new())
}
