//! Static SVG 1.1 drawings of instances and solutions.

use std::fmt::Write;

use crate::enclosure::{Enclosure, ObstacleSet};
use crate::error::Result;
use crate::instance::Instance;
use crate::scalar::Scalar;

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

/// Selected obstacles (if any) are highlighted. Points are classed
/// `enclosed` or `free` with respect to the selection, or to the whole
/// obstacle set when there is none.
pub fn render<S: Scalar>(inst: &Instance<S>, selected: Option<&[usize]>) -> Result<String> {
    let chosen: Vec<usize> = selected.map_or_else(|| (0..inst.obstacles.len()).collect(), <[usize]>::to_vec);
    let oracle = Enclosure::new(&inst.obstacles.subset(&chosen))?;
    let verdicts = inst.points.iter().map(|q| oracle.is_enclosed(q)).collect::<Result<Vec<bool>>>()?;
    let highlighted = |i: usize| selected.is_some_and(|s| s.contains(&i));

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut extend = |p: (f64, f64), r: f64| {
        xs.extend([p.0 - r, p.0 + r]);
        ys.extend([p.1 - r, p.1 + r]);
    };
    for q in &inst.points {
        extend(q.to_f64(), 0.0);
    }
    match &inst.obstacles {
        ObstacleSet::UnitDisks(d) => d.iter().for_each(|d| extend(d.center.to_f64(), 1.0)),
        ObstacleSet::Segments(s) => s.iter().for_each(|s| {
            extend(s.a.to_f64(), 0.0);
            extend(s.b.to_f64(), 0.0);
        }),
    }
    let fold = |v: &[f64], init: f64, f: fn(f64, f64) -> f64| v.iter().copied().fold(init, f);
    let (x0, x1) = if xs.is_empty() { (-1.0, 1.0) } else { (fold(&xs, f64::INFINITY, f64::min), fold(&xs, f64::NEG_INFINITY, f64::max)) };
    let (y0, y1) = if ys.is_empty() { (-1.0, 1.0) } else { (fold(&ys, f64::INFINITY, f64::min), fold(&ys, f64::NEG_INFINITY, f64::max)) };
    let margin = 0.5f64.max(0.05 * (x1 - x0).max(y1 - y0));
    let (w, h) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let pr = num(0.012 * w.max(h));
    let stroke = num(0.004 * w.max(h));

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="800" height="{}">"#,
        num(x0 - margin),
        num(-(y1 + margin)),
        num(w),
        num(h),
        (800.0 * h / w).round()
    );
    let _ = writeln!(
        out,
        "<style>.obstacle{{fill:#9ab;fill-opacity:0.35;stroke:#567;stroke-width:{stroke}}} .selected{{fill:#e83;stroke:#a40}} .point{{stroke:none}} .enclosed{{fill:#161}} .free{{fill:#c11}}</style>"
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    match &inst.obstacles {
        ObstacleSet::UnitDisks(d) => {
            for (i, d) in d.iter().enumerate() {
                let (x, y) = d.center.to_f64();
                let class = if highlighted(i) { "obstacle selected" } else { "obstacle" };
                let _ = writeln!(out, r#"<circle class="{class}" cx="{}" cy="{}" r="1"/>"#, num(x), num(y));
            }
        }
        ObstacleSet::Segments(s) => {
            for (i, s) in s.iter().enumerate() {
                let ((ax, ay), (bx, by)) = (s.a.to_f64(), s.b.to_f64());
                let class = if highlighted(i) { "obstacle selected" } else { "obstacle" };
                let _ = writeln!(out, r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#, num(ax), num(ay), num(bx), num(by));
            }
        }
    }
    for (q, enclosed) in inst.points.iter().zip(&verdicts) {
        let (x, y) = q.to_f64();
        let class = if *enclosed { "point enclosed" } else { "point free" };
        let _ = writeln!(out, r#"<circle class="{class}" cx="{}" cy="{}" r="{pr}"/>"#, num(x), num(y));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
