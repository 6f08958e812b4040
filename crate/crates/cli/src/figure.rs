use std::fmt::Write;

use planar_hodograph::Cplx;

use crate::pipeline::Run;

pub const SIZE: f64 = 1000.0;
const PAD: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Marker {
    pub point: Cplx<f64>,
    /// CSS class suffix: `u`, `theta` or `boundary`.
    pub kind: &'static str,
}

/// What goes into the SVG. Missing pieces are `None` or empty and produce a
/// line in the warning layer.
#[derive(Clone, Debug, Default)]
pub struct Figure {
    pub title: String,
    pub boundary: Option<Vec<Cplx<f64>>>,
    /// Preimage of the image rectangle.
    pub region: Option<Vec<Cplx<f64>>>,
    /// One entry per level, each a list of components.
    pub levels: Vec<Vec<Vec<Cplx<f64>>>>,
    pub markers: Vec<Marker>,
    pub warnings: Vec<String>,
}

impl Figure {
    pub fn from_run(run: &Run) -> Self {
        let mut fig = Figure {
            title: run.config.name.clone(),
            ..Default::default()
        };
        match &run.domain {
            Some(d) => fig.boundary = Some(d.boundary().polyline()),
            None => fig.warnings.push("domain boundary unavailable".into()),
        }
        match (&run.localization, run.map.is_some()) {
            (Some(e), true) => fig.region = Some(e.polyline()),
            _ => fig.warnings.push("image rectangle preimage unavailable".into()),
        }
        match &run.injectivity {
            Some(inj) => {
                for &l in &run.levels {
                    let comps: Vec<_> = inj.curves.iter().filter(|c| c.level == l).map(|c| c.nodes.clone()).collect();
                    if !comps.is_empty() {
                        fig.levels.push(comps);
                    }
                }
            }
            None => fig.warnings.push("level curves unavailable".into()),
        }
        match &run.ledger {
            Some(l) => {
                let pts = l.interior_points.iter().map(|z| (z.point, "u"));
                let th = l.theta_points.iter().map(|z| (z.point, "theta"));
                let bd = l.boundary_candidates.iter().map(|c| (c.point, "boundary"));
                fig.markers = pts.chain(th).chain(bd).map(|(point, kind)| Marker { point, kind }).collect();
            }
            None => fig.warnings.push("critical points unavailable".into()),
        }
        fig
    }
}

struct View {
    lo: Cplx<f64>,
    scale: f64,
    offset: (f64, f64),
}

impl View {
    fn fit(points: impl Iterator<Item = Cplx<f64>>) -> Self {
        let (mut lo, mut hi) = (Cplx::new(f64::INFINITY, f64::INFINITY), Cplx::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for z in points.filter(|z| z.re.is_finite() && z.im.is_finite()) {
            lo = Cplx::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Cplx::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        if !(lo.re <= hi.re) {
            lo = Cplx::new(-1.0, -1.0);
            hi = Cplx::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
        let scale = SIZE * (1.0 - 2.0 * PAD) / span;
        // centre the shorter direction
        let offset = (
            SIZE * PAD + 0.5 * (span - (hi.re - lo.re)) * scale,
            SIZE * PAD + 0.5 * (span - (hi.im - lo.im)) * scale,
        );
        Self { lo, scale, offset }
    }

    fn px(&self, z: Cplx<f64>) -> (f64, f64) {
        let x = self.offset.0 + (z.re - self.lo.re) * self.scale;
        let y = SIZE - (self.offset.1 + (z.im - self.lo.im) * self.scale);
        (x, y)
    }

    fn path(&self, pts: &[Cplx<f64>], closed: bool, out: &mut String) {
        for (i, &z) in pts.iter().enumerate() {
            let (x, y) = self.px(z);
            let _ = write!(out, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
        }
        if closed && !pts.is_empty() {
            out.push_str(" Z");
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Deterministic SVG with a fixed 1000×1000 viewbox. Layers from bottom to
/// top: domain boundary (one path), preimage of the image rectangle, one
/// path per level, one circle per critical point, warnings.
pub fn emit_figure(fig: &Figure) -> String {
    let all = fig
        .boundary
        .iter()
        .flatten()
        .chain(fig.region.iter().flatten())
        .chain(fig.levels.iter().flatten().flatten())
        .copied();
    let view = match &fig.boundary {
        Some(b) => View::fit(b.iter().copied()),
        None => View::fit(all),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">"
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&fig.title));
    s.push_str(
        "<style>.boundary{fill:#f4f4f4;stroke:#222;stroke-width:2}.region{fill:none;stroke:#1f77b4;stroke-width:2;stroke-dasharray:8 4}\
.level{fill:none;stroke:#888;stroke-width:1}.critical{stroke:#000;stroke-width:1}.u{fill:#d62728}.theta{fill:#2ca02c}\
.boundary-point{fill:#ff7f0e}.warning{font:16px sans-serif;fill:#b00}</style>\n",
    );

    s.push_str("<g id=\"domain\">");
    if let Some(b) = &fig.boundary {
        s.push_str("<path class=\"boundary\" d=\"");
        view.path(b, true, &mut s);
        s.push_str("\"/>");
    }
    s.push_str("</g>\n<g id=\"region\">");
    if let Some(r) = &fig.region {
        s.push_str("<path class=\"region\" d=\"");
        view.path(r, true, &mut s);
        s.push_str("\"/>");
    }
    s.push_str("</g>\n<g id=\"levels\">\n");
    for comps in &fig.levels {
        s.push_str("<path class=\"level\" d=\"");
        for (i, c) in comps.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            view.path(c, false, &mut s);
        }
        s.push_str("\"/>\n");
    }
    s.push_str("</g>\n<g id=\"critical\">\n");
    for m in &fig.markers {
        let (x, y) = view.px(m.point);
        let class = if m.kind == "boundary" { "boundary-point" } else { m.kind };
        let _ = writeln!(s, "<circle class=\"critical {class}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\"/>");
    }
    s.push_str("</g>\n");
    if !fig.warnings.is_empty() {
        s.push_str("<g id=\"warnings\">\n");
        for (i, w) in fig.warnings.iter().enumerate() {
            let _ = writeln!(s, "<text class=\"warning\" x=\"10\" y=\"{}\">{}</text>", 24 + 20 * i, escape(w));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
