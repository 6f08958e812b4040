use std::path::Path;

use crate::figure::{emit_figure, Figure};
use crate::pipeline::Run;
use crate::report;

pub const REPORT: &str = "report.json";
pub const POINTS: &str = "points.csv";
pub const CURVES: &str = "curves.csv";
pub const FIGURE: &str = "figure.svg";

fn csv_err(e: csv::Error) -> String {
    e.to_string()
}

/// Critical points with multiplicity. `set` is `u` and `theta` for points of
/// the domain, `boundary` for small-gradient candidates (multiplicity not
/// certified, reported as 1) and `reflected` for points of the image plane.
pub fn points_csv(run: &Run) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "multiplicity", "set"]).map_err(csv_err)?;
    if let Some(l) = &run.ledger {
        let sets = [("u", &l.interior_points), ("theta", &l.theta_points), ("reflected", &l.reflected_points)];
        for (set, zs) in sets {
            for z in zs.iter() {
                w.write_record([fmt(z.point.re), fmt(z.point.im), z.multiplicity.to_string(), set.into()])
                    .map_err(csv_err)?;
            }
        }
        for c in &l.boundary_candidates {
            w.write_record([fmt(c.point.re), fmt(c.point.im), "1".into(), "boundary".into()])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

/// Level curves and the preimage of the image rectangle, one segment id per
/// polyline.
pub fn curves_csv(run: &Run) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "segment-id", "kind"]).map_err(csv_err)?;
    let mut id = 0usize;
    let mut polylines: Vec<(&str, Vec<planar_hodograph::Cplx<f64>>)> = Vec::new();
    if let Some(inj) = &run.injectivity {
        polylines.extend(inj.curves.iter().map(|c| ("level", c.nodes.clone())));
    }
    if let Some(e) = &run.localization {
        polylines.push(("region", e.polyline()));
    }
    for (kind, pts) in polylines {
        for z in pts {
            w.write_record([fmt(z.re), fmt(z.im), id.to_string(), kind.into()]).map_err(csv_err)?;
        }
        id += 1;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, String> {
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

fn fmt(x: f64) -> String {
    serde_json::Number::from_f64(report::round15(x)).map_or_else(|| "nan".into(), |n| n.to_string())
}

/// Writes the four artifacts. The report is validated against the bundled
/// schema before anything is written.
pub fn write_all(run: &Run, dir: &Path) -> Result<(), String> {
    let rep = report::build(run);
    report::validate(&rep).map_err(|errs| format!("report fails the schema: {}", errs.join("; ")))?;
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))
    };
    write(REPORT, report::to_string(&rep))?;
    write(POINTS, points_csv(run)?)?;
    write(CURVES, curves_csv(run)?)?;
    write(FIGURE, emit_figure(&Figure::from_run(run)))?;
    Ok(())
}
