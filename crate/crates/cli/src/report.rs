use serde_json::{json, Map, Value};

use planar_hodograph::critical::{CriticalSetReport, SmallGradientTable, Zero};
use planar_hodograph::hodograph::{ELocalization, HodographMap, InjectivityReport};
use planar_hodograph::Cplx;

use crate::pipeline::{Function, Mode, Run};

/// The schema every report is validated against.
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");
/// Collisions listed in the report; the count is always complete.
const MAX_LISTED: usize = 20;

/// Rounds to 15 significant digits so reports compare byte for byte.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn round_all(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round15(n.as_f64().unwrap_or(0.0));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_all),
        Value::Object(o) => o.values_mut().for_each(round_all),
        _ => {}
    }
}

fn pt(z: Cplx<f64>) -> Value {
    json!([z.re, z.im])
}

fn zeros(zs: &[Zero<f64>]) -> Value {
    zs.iter()
        .map(|z| json!({"x": z.point.re, "y": z.point.im, "multiplicity": z.multiplicity, "residual": z.residual}))
        .collect()
}

fn function(f: &Function) -> Value {
    let mut o = json!({
        "label": f.label,
        "kind": f.function.kind(),
        "source": if f.solve.is_some() { "solved" } else { "closed-form" },
        "residual": f.residual(),
    });
    if let Some(r) = &f.solve {
        let m = o.as_object_mut().unwrap();
        for (k, v) in [
            ("residual_rms", json!(r.residual_rms)),
            ("collocation_residual", json!(r.collocation_residual)),
            ("rank", json!(r.rank)),
            ("columns", json!(r.columns)),
            ("condition", json!(r.condition)),
            ("charges", json!(r.charges)),
            ("rows", json!(r.rows)),
            ("offset_min", json!(r.offset_min)),
            ("data_range", json!([r.data_min, r.data_max])),
            ("converged", json!(r.status == planar_hodograph::solver::SolveStatus::Converged)),
        ] {
            m.insert(k.into(), v);
        }
    }
    o
}

fn injectivity(r: &InjectivityReport<f64>) -> Value {
    json!({
        "levels": r.levels.iter().map(|l| json!({
            "level": l.level,
            "components": l.components,
            "nodes": l.nodes,
            "min_increment": l.min_increment,
        })).collect::<Vec<_>>(),
        "probes": r.probes,
        "collision_count": r.collisions.len(),
        "collisions": r.collisions.iter().take(MAX_LISTED).map(|c| json!({
            "first": pt(c.first),
            "second": pt(c.second),
            "gap": c.gap,
        })).collect::<Vec<_>>(),
        "monotone": r.monotone(),
        "min_increment": r.min_increment(),
        "passed": r.passed(),
    })
}

fn localization(e: &ELocalization<f64>) -> Value {
    json!({
        "a": e.a,
        "b": e.b,
        "inner": e.inner,
        "outer": e.outer,
        "coverage": e.coverage,
        "samples": e.samples,
        "shrinks": e.shrinks,
        "closure_gap": e.closure_gap,
        "boundary_points": e.boundary.len(),
        "bbox": [pt(e.bbox.0), pt(e.bbox.1)],
    })
}

fn hodograph(run: &Run, m: &HodographMap<f64>) -> Value {
    let d = m.diagnostics();
    json!({
        "anchor_offset": d.anchor_offset,
        "det_mismatch": d.det_mismatch,
        "det_samples": d.det_samples,
        "boundary_height": d.boundary_height,
        "boundary_tolerance": d.boundary_tolerance,
        "boundary_samples": d.boundary_samples,
        "failures": d.failures,
        "injectivity": run.injectivity.as_ref().map(injectivity),
        "localization": run.localization.as_ref().map(localization),
        "transformation_law": run.law.map(|l| json!({"samples": l.samples, "max_relative": l.max_relative})),
    })
}

/// `measure(ε/2) / measure(ε)` for every pair of thresholds in the table
/// that differ by exactly a factor two.
pub fn halving_ratios(t: &SmallGradientTable<f64>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(e, m) in &t.entries {
        if let Some(&(_, mh)) = t.entries.iter().find(|(h, _)| *h == e / 2.0) {
            if m > 0.0 {
                out.push((e, mh / m));
            }
        }
    }
    out
}

fn boundary(t: &SmallGradientTable<f64>) -> Value {
    json!({
        "boundary_length": t.boundary_length,
        "samples": t.samples.len(),
        "non_monotone": t.non_monotone,
        "rough": t.rough,
        "table": t.entries.iter().map(|(e, m)| json!({
            "epsilon": e,
            "measure": m,
            "fraction": m / t.boundary_length,
        })).collect::<Vec<_>>(),
        "halving_ratios": halving_ratios(t).iter().map(|(e, r)| json!({"epsilon": e, "ratio": r})).collect::<Vec<_>>(),
    })
}

fn ledger(l: &CriticalSetReport<f64>) -> Value {
    json!({
        "u": l.counts.u,
        "theta": l.counts.theta,
        "reflected": l.counts.reflected,
        "conclusive": l.is_conclusive(),
        "conclusive_parts": {"u": l.conclusive[0], "theta": l.conclusive[1], "reflected": l.conclusive[2]},
        "inequality_holds": l.inequality_holds(),
        "image_rect": [l.image_rect.0, l.image_rect.1],
        "inconclusive_cells": l.inconclusive.iter().map(|(k, r)| json!({
            "count": k,
            "lo": pt(r.lo),
            "hi": pt(r.hi),
        })).collect::<Vec<_>>(),
    })
}

fn critical(run: &Run) -> Value {
    let Some(t) = &run.table else {
        return Value::Null;
    };
    let mut boundary = boundary(t);
    let interior = match &run.ledger {
        Some(l) => {
            boundary.as_object_mut().unwrap().insert(
                "candidates".into(),
                l.boundary_candidates
                    .iter()
                    .map(|c| json!({"x": c.point.re, "y": c.point.im, "gradient": c.gradient, "arclength": c.arclength}))
                    .collect(),
            );
            json!({
                "u": zeros(&l.interior_points),
                "theta": zeros(&l.theta_points),
                "reflected": zeros(&l.reflected_points),
            })
        }
        None => Value::Null,
    };
    json!({
        "interior": interior,
        "boundary": boundary,
        "ledger": run.ledger.as_ref().map(ledger),
    })
}

/// The report as a JSON value, every float rounded to 15 digits. Timings
/// are left out so that reruns are byte-identical.
pub fn build(run: &Run) -> Value {
    let mut top = Map::new();
    top.insert("scenario".into(), json!(run.config.name));
    top.insert("seed".into(), json!(run.config.seed));
    top.insert("mode".into(), json!(if run.mode == Mode::Run { "run" } else { "verify" }));
    let mut config = serde_json::to_value(&run.config).unwrap_or(Value::Null);
    // the output location does not affect results
    if let Some(o) = config.as_object_mut() {
        o.remove("output");
    }
    top.insert("config".into(), config);
    top.insert(
        "status".into(),
        json!({
            "result": run.status(),
            "exit_code": run.exit_code(),
            "error": run.error.as_ref().map(|e| json!({"stage": e.stage, "message": e.message})),
            "checks": run.checks().iter().map(|c| json!({
                "name": c.name,
                "value": c.value,
                "limit": c.limit,
                "passed": c.passed,
            })).collect::<Vec<_>>(),
        }),
    );
    top.insert(
        "solver".into(),
        match &run.v {
            Some(v) => json!({"v": function(v), "u": run.u.as_ref().map(function)}),
            None => Value::Null,
        },
    );
    top.insert(
        "analytic".into(),
        match &run.map {
            Some(m) => {
                let c = m.completion();
                let d = c.diagnostics();
                json!({
                    "conjugate": c.conjugate().kind(),
                    "cr_residual": d.cr_residual,
                    "modulus_mismatch": d.modulus_mismatch,
                    "anchor_value": d.anchor_value,
                    "samples": d.samples,
                    "gradient_errors": run.gradients.iter().map(|(n, e)| json!({"function": n, "max_error": e})).collect::<Vec<_>>(),
                })
            }
            None => Value::Null,
        },
    );
    top.insert(
        "hodograph".into(),
        run.map.as_ref().map_or(Value::Null, |m| hodograph(run, m)),
    );
    top.insert("critical".into(), critical(run));
    let mut v = Value::Object(top);
    round_all(&mut v);
    v
}

/// Validates `report` against the bundled schema; the messages list every
/// violation.
pub fn validate(report: &Value) -> Result<(), Vec<String>> {
    let schema: Value = serde_json::from_str(SCHEMA).map_err(|e| vec![format!("schema does not parse: {e}")])?;
    let validator = jsonschema::validator_for(&schema).map_err(|e| vec![format!("schema is invalid: {e}")])?;
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| format!("{}: {e}", e.instance_path()))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

pub fn to_string(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("JSON values always serialize");
    s.push('\n');
    s
}
