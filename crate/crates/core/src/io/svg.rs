//! Planar SVG 1.1 figures: nested iterate polygons shrinking onto their
//! limit, or a dual sequence drawn against its family.

use std::fmt::Write as _;

use crate::affine::{AffinePoint, PointFamily};
use crate::barypolygonal::PolygonTrace;
use crate::dual::DualTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width: f64,
    pub height: f64,
    pub stroke_width: f64,
    /// Colour of the first iterate.
    pub start_color: [u8; 3],
    /// Colour of the last iterate.
    pub end_color: [u8; 3],
    pub marker_color: [u8; 3],
    pub marker_radius: f64,
    pub title: Option<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 600.0,
            height: 600.0,
            stroke_width: 1.0,
            start_color: [0x1f, 0x3a, 0x93],
            end_color: [0xe8, 0x6a, 0x10],
            marker_color: [0xc0, 0x10, 0x20],
            marker_radius: 3.0,
            title: None,
        }
    }
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn blend(a: [u8; 3], b: [u8; 3], s: f64) -> [u8; 3] {
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * s).round().clamp(0.0, 255.0) as u8;
    [mix(a[0], b[0]), mix(a[1], b[1]), mix(a[2], b[2])]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps data coordinates into the canvas: uniform scale, y up, fitted to a
/// bounding box grown by 5% on every side.
struct Viewport {
    min_x: f64,
    max_y: f64,
    scale: f64,
    off_x: f64,
    off_y: f64,
}

impl Viewport {
    fn fit(family: &PointFamily, style: &SvgStyle) -> Self {
        let (mut min_x, mut max_x, mut min_y, mut max_y) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for pt in family {
            let c = pt.coords();
            min_x = min_x.min(c[0]);
            max_x = max_x.max(c[0]);
            min_y = min_y.min(c[1]);
            max_y = max_y.max(c[1]);
        }
        let mut w = max_x - min_x;
        let mut h = max_y - min_y;
        if w == 0.0 && h == 0.0 {
            w = 1.0;
            h = 1.0;
        }
        let (mx, my) = (0.05 * w, 0.05 * h);
        min_x -= mx;
        max_y += my;
        let (w, h) = (w + 2.0 * mx, h + 2.0 * my);
        let scale = (style.width / w.max(f64::MIN_POSITIVE)).min(style.height / h.max(f64::MIN_POSITIVE));
        let off_x = 0.5 * (style.width - w * scale);
        let off_y = 0.5 * (style.height - h * scale);
        Self { min_x, max_y, scale, off_x, off_y }
    }

    fn map(&self, pt: &AffinePoint) -> (f64, f64) {
        let c = pt.coords();
        (self.off_x + (c[0] - self.min_x) * self.scale, self.off_y + (self.max_y - c[1]) * self.scale)
    }
}

fn require_planar(family: &PointFamily) -> Result<()> {
    if family.dim() != 2 {
        return Err(Error::NotPlanar(family.dim()));
    }
    Ok(())
}

fn header(out: &mut String, style: &SvgStyle) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    );
    if let Some(t) = &style.title {
        let _ = writeln!(out, "  <title>{}</title>", escape(t));
    }
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, style.width, style.height);
}

fn polygon(out: &mut String, vp: &Viewport, family: &PointFamily, color: [u8; 3], stroke: f64, index: usize) {
    let pts: Vec<String> = family
        .iter()
        .map(|pt| {
            let (x, y) = vp.map(pt);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"  <polygon data-iterate="{index}" points="{}" fill="none" stroke="{}" stroke-width="{stroke}"/>"#,
        pts.join(" "),
        hex(color)
    );
}

fn marker(out: &mut String, vp: &Viewport, pt: &AffinePoint, style: &SvgStyle, class: &str) {
    let (x, y) = vp.map(pt);
    let _ = writeln!(
        out,
        r#"  <circle class="{class}" cx="{x:.3}" cy="{y:.3}" r="{}" fill="{}"/>"#,
        style.marker_radius,
        hex(style.marker_color)
    );
}

/// One closed polygon per iterate, colour-graded from first to last, plus
/// an optional marker (typically the limit point).
pub fn polygon_svg(trace: &PolygonTrace, mark: Option<&AffinePoint>, style: &SvgStyle) -> Result<String> {
    let first = &trace.iterates[0];
    require_planar(first)?;
    if let Some(m) = mark {
        if m.dim() != 2 {
            return Err(Error::NotPlanar(m.dim()));
        }
    }
    let vp = Viewport::fit(first, style);
    let mut out = String::new();
    header(&mut out, style);
    let n = trace.iterates.len();
    for (i, fam) in trace.iterates.iter().enumerate() {
        let s = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        polygon(&mut out, &vp, fam, blend(style.start_color, style.end_color, s), style.stroke_width, i);
    }
    if let Some(m) = mark {
        marker(&mut out, &vp, m, style, "limit");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// The family outline, each dual point as a small dot and the centroid as
/// the marker.
pub fn dual_svg(family: &PointFamily, trace: &DualTrace, style: &SvgStyle) -> Result<String> {
    require_planar(family)?;
    let vp = Viewport::fit(family, style);
    let mut out = String::new();
    header(&mut out, style);
    polygon(&mut out, &vp, family, style.start_color, style.stroke_width, 0);
    let n = trace.points.len();
    for (m, g) in trace.points.iter().enumerate() {
        let s = if n > 1 { m as f64 / (n - 1) as f64 } else { 0.0 };
        let (x, y) = vp.map(g);
        let _ = writeln!(
            out,
            r#"  <circle class="dual" data-step="{m}" cx="{x:.3}" cy="{y:.3}" r="{}" fill="{}"/>"#,
            0.6 * style.marker_radius,
            hex(blend(style.start_color, style.end_color, s))
        );
    }
    marker(&mut out, &vp, &trace.centroid, style, "centroid");
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barypolygonal::{iterate_sequence, limit_point, ParamVector};

    #[test]
    fn single_triangle() {
        let tri = PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let tr = iterate_sequence(&tri, &ParamVector::regular(3, 0.5).unwrap(), 0).unwrap();
        let svg = polygon_svg(&tr, None, &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn nested_with_marker() {
        let tri = PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let t = ParamVector::new(vec![0.2, 0.5, 0.7]).unwrap();
        let tr = iterate_sequence(&tri, &t, 5).unwrap();
        let g = limit_point(&tri, &t).unwrap();
        let svg = polygon_svg(&tr, Some(&g), &SvgStyle::default()).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 6);
        assert_eq!(svg.matches(r#"class="limit""#).count(), 1);
    }

    #[test]
    fn bounding_box_margin() {
        let sq = PointFamily::from_rows(&[[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]]).unwrap();
        let vp = Viewport::fit(&sq, &SvgStyle::default());
        let (x0, y0) = vp.map(&sq.points()[3]);
        let (x1, y1) = vp.map(&sq.points()[1]);
        assert!((x0 - 600.0 / 22.0).abs() < 1e-9 && (y0 - 600.0 / 22.0).abs() < 1e-9);
        assert!((x1 - 600.0 * 21.0 / 22.0).abs() < 1e-9 && (y1 - 600.0 * 21.0 / 22.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_planar() {
        let seg = PointFamily::from_rows(&[[0.0], [1.0]]).unwrap();
        let tr = iterate_sequence(&seg, &ParamVector::regular(2, 0.5).unwrap(), 1).unwrap();
        assert_eq!(polygon_svg(&tr, None, &SvgStyle::default()), Err(Error::NotPlanar(1)));
    }
}
