//! Deterministic SVG pictures: one-parameter graphics as strands over the
//! parameter axis (births and deaths as cusps, switches as crossings), and
//! polygon decompositions as labeled regular polygons with glued edges tied
//! together. Equal inputs yield byte-identical output.

use crate::family_one::{
    interval_type_of, validate_graphic, CerfGraphic1, ElementaryInterval, Event1, IntervalType,
};
use crate::family_two::{
    classify_polygon, validate_decomposition, Event2, PolygonDecomposition,
};
use crate::Result;
use std::fmt::Write as _;

const STYLE: &str = "\
.axis{stroke:#999;stroke-width:1}\
.strand{stroke:#333;stroke-width:1.5;fill:none}\
.cusp{fill:#26c}\
.crossing{fill:#c22}\
.t0{stroke:#777}\
.t1{stroke:#c22;stroke-width:2.5}\
.edge{stroke:#333;stroke-width:1.5;fill:none}\
.spoke{stroke:#ccc;stroke-width:0.75}\
.glue{stroke:#26c;stroke-width:1;stroke-dasharray:4 3;fill:none}\
.lbl{font:10px monospace;fill:#333}\
.big{font:12px monospace;fill:#111}";

fn px(v: f64) -> String {
    let v = if v.abs() < 0.005 { 0.0 } else { v };
    format!("{:.2}", v)
}

fn open_svg(out: &mut String, width: f64, height: f64) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<style>{style}</style>\n",
        w = px(width),
        h = px(height),
        style = STYLE,
    );
}

fn line(out: &mut String, class: &str, x1: f64, y1: f64, x2: f64, y2: f64) {
    let _ = writeln!(
        out,
        "<line class=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        class,
        px(x1),
        px(y1),
        px(x2),
        px(y2)
    );
}

fn dot(out: &mut String, class: &str, x: f64, y: f64, r: f64) {
    let _ = writeln!(
        out,
        "<circle class=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
        class,
        px(x),
        px(y),
        px(r)
    );
}

fn text(out: &mut String, class: &str, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(
        out,
        "<text class=\"{}\" x=\"{}\" y=\"{}\" text-anchor=\"{}\">{}</text>",
        class,
        px(x),
        px(y),
        anchor,
        s
    );
}

const MARGIN: f64 = 36.0;
const BAND: f64 = 72.0;
const ROW: f64 = 26.0;

/// Renders a validated one-parameter graphic. The x axis is the family
/// parameter, one band per elementary interval; the y axis is the event
/// index within each function.
pub fn render_graphic_svg(gr: &CerfGraphic1) -> Result<String> {
    validate_graphic(gr)?;
    let max_events = gr
        .segments
        .iter()
        .flat_map(|s| [s.start.events.len(), s.end.events.len()])
        .max()
        .unwrap_or(0);
    let width = 2.0 * MARGIN + (gr.segments.len().max(1) as f64) * BAND;
    let height = 2.0 * MARGIN + (max_events.max(1) as f64) * ROW;
    let y_of = |idx: usize| height - MARGIN - (idx as f64 + 0.5) * ROW;

    let mut out = String::new();
    open_svg(&mut out, width, height);
    // Axes: parameter along the bottom, height up the left side.
    line(&mut out, "axis", MARGIN, height - MARGIN, width - MARGIN * 0.5, height - MARGIN);
    line(&mut out, "axis", MARGIN, height - MARGIN, MARGIN, MARGIN * 0.5);
    if gr.cyclic {
        text(&mut out, "lbl", width / 2.0, MARGIN * 0.55, "middle", "cyclic");
    }

    for (i, seg) in gr.segments.iter().enumerate() {
        let x0 = MARGIN + i as f64 * BAND;
        let x1 = x0 + BAND;
        let xm = x0 + BAND / 2.0;
        draw_segment(&mut out, seg, x0, xm, x1, &y_of);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn draw_segment(
    out: &mut String,
    seg: &ElementaryInterval,
    x0: f64,
    xm: f64,
    x1: f64,
    y_of: &dyn Fn(usize) -> f64,
) {
    let n_start = seg.start.events.len();
    let label_y = y_of(0) + ROW * 0.45 + 12.0;
    match &seg.event {
        None => {
            for j in 0..n_start {
                line(out, "strand", x0, y_of(j), x1, y_of(j));
            }
            if seg.slide.is_some() {
                text(out, "lbl", xm, label_y, "middle", "slide");
            }
        }
        Some(Event1::Birth { slot }) => {
            let slot = *slot;
            for j in 0..n_start {
                let tgt = if j < slot { j } else { j + 2 };
                line(out, "strand", x0, y_of(j), x1, y_of(tgt));
            }
            // The new pair opens out of a cusp at mid-band.
            let yc = (y_of(slot) + y_of(slot + 1)) / 2.0;
            line(out, "strand", xm, yc, x1, y_of(slot));
            line(out, "strand", xm, yc, x1, y_of(slot + 1));
            dot(out, "cusp", xm, yc, 3.0);
            text(out, "lbl", xm, label_y, "middle", "birth");
        }
        Some(Event1::Death { slot }) => {
            let slot = *slot;
            for j in 0..n_start {
                if j < slot {
                    line(out, "strand", x0, y_of(j), x1, y_of(j));
                } else if j > slot + 1 {
                    line(out, "strand", x0, y_of(j), x1, y_of(j - 2));
                }
            }
            let yc = (y_of(slot) + y_of(slot + 1)) / 2.0;
            line(out, "strand", x0, y_of(slot), xm, yc);
            line(out, "strand", x0, y_of(slot + 1), xm, yc);
            dot(out, "cusp", xm, yc, 3.0);
            text(out, "lbl", xm, label_y, "middle", "death");
        }
        Some(Event1::Switch { first, second, .. }) => {
            let (first, second) = (*first, *second);
            for j in 0..n_start {
                let tgt = if j == first {
                    second
                } else if j == second {
                    first
                } else {
                    j
                };
                line(out, "strand", x0, y_of(j), x1, y_of(tgt));
            }
            let yc = (y_of(first) + y_of(second)) / 2.0;
            dot(out, "crossing", xm, yc, 3.0);
            let t = interval_type_of(seg);
            let tag = match t {
                IntervalType::Type0 => "T0",
                IntervalType::Type1 => "T1",
            };
            text(out, "lbl", xm, label_y, "middle", tag);
        }
    }
}

const POLY_R: f64 = 80.0;
const POLY_GAP: f64 = 48.0;

/// Renders a validated decomposition: one regular polygon per cell, edges
/// tinted by interval type, spokes cutting the cell into sectors, centers
/// labeled by their event, and glued edges joined by dashed arcs.
pub fn render_decomposition_svg(dec: &PolygonDecomposition) -> Result<String> {
    validate_decomposition(dec)?;
    let n = dec.polygons.len();
    let width = 2.0 * POLY_GAP + n as f64 * (2.0 * POLY_R) + (n.saturating_sub(1)) as f64 * POLY_GAP;
    let height = 2.0 * POLY_GAP + 2.0 * POLY_R + 24.0;
    let center_of = |p: usize| {
        (
            POLY_GAP + POLY_R + p as f64 * (2.0 * POLY_R + POLY_GAP),
            POLY_GAP + POLY_R,
        )
    };

    let mut out = String::new();
    open_svg(&mut out, width, height);

    let corner = |p: usize, v: usize, count: usize| {
        let (cx, cy) = center_of(p);
        let angle = -std::f64::consts::FRAC_PI_2 + (v as f64) * std::f64::consts::TAU / count as f64;
        (cx + POLY_R * angle.cos(), cy + POLY_R * angle.sin())
    };
    let edge_midpoint = |p: usize, e: usize, count: usize| {
        let (ax, ay) = corner(p, e, count);
        let (bx, by) = corner(p, e + 1, count);
        ((ax + bx) / 2.0, (ay + by) / 2.0)
    };

    for (pi, poly) in dec.polygons.iter().enumerate() {
        let count = poly.boundary.len();
        let (cx, cy) = center_of(pi);
        for v in 0..count {
            let (x, y) = corner(pi, v, count);
            line(&mut out, "spoke", cx, cy, x, y);
        }
        for (ei, edge) in poly.boundary.iter().enumerate() {
            let (ax, ay) = corner(pi, ei, count);
            let (bx, by) = corner(pi, ei + 1, count);
            let class = match interval_type_of(edge) {
                IntervalType::Type0 => "edge t0",
                IntervalType::Type1 => "edge t1",
            };
            line(&mut out, class, ax, ay, bx, by);
        }
        let center_label = match &poly.center {
            None => "plain".to_string(),
            Some(Event2::Swallowtail) => "swallowtail".to_string(),
            Some(Event2::BirthMorseCross) => "birth-morse".to_string(),
            Some(Event2::TripleSwitch { .. }) => "triple".to_string(),
        };
        text(&mut out, "big", cx, cy - 4.0, "middle", &center_label);
        if let Ok(t) = classify_polygon(poly) {
            text(&mut out, "lbl", cx, cy + 12.0, "middle", &t.to_string());
        }
    }

    for &((pa, ea), (pb, eb)) in &dec.gluings {
        let (ax, ay) = edge_midpoint(pa, ea, dec.polygons[pa].boundary.len());
        let (bx, by) = edge_midpoint(pb, eb, dec.polygons[pb].boundary.len());
        let _ = writeln!(
            out,
            "<path class=\"glue\" d=\"M {} {} Q {} {} {} {}\"/>",
            px(ax),
            px(ay),
            px((ax + bx) / 2.0),
            px(ay.max(by) + 40.0),
            px(bx),
            px(by)
        );
    }

    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::TrisectionDiagram;
    use crate::surface::CutSystem;

    #[test]
    fn empty_graphic_renders_fixed_axes() {
        let gr = CerfGraphic1 { genus: 0, cyclic: false, segments: vec![] };
        let svg = render_graphic_svg(&gr).unwrap();
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<line class=\"axis\"").count(), 2);
        assert_eq!(render_graphic_svg(&gr).unwrap(), svg);
    }

    #[test]
    fn compiled_projective_family_shows_three_crossings() {
        let t = TrisectionDiagram {
            genus: 1,
            k: 0,
            alpha: CutSystem::from_rows(1, &[vec![1, 0]]),
            beta: CutSystem::from_rows(1, &[vec![0, 1]]),
            gamma: CutSystem::from_rows(1, &[vec![1, 1]]),
        };
        let fam = crate::family_one::standard_family_from_trisection(&t).unwrap();
        let svg = render_graphic_svg(&fam.graphic).unwrap();
        assert_eq!(svg.matches("class=\"crossing\"").count(), 3);
        assert!(svg.contains(">cyclic<"));
        assert_eq!(svg.matches(">T1<").count(), 3);
        assert_eq!(render_graphic_svg(&fam.graphic).unwrap(), svg);
    }

    #[test]
    fn hexagon_decomposition_shows_six_sectors() {
        let dec = crate::catalog::projective_hexagon_decomposition();
        let svg = render_decomposition_svg(&dec).unwrap();
        assert_eq!(svg.matches("class=\"spoke\"").count(), 6);
        assert!(svg.contains(">triple<"));
        assert!(svg.contains(">type2(-1)<"));
        assert_eq!(render_decomposition_svg(&dec).unwrap(), svg);
    }
}
