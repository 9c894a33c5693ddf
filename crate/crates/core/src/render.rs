//! SVG output for clusters and disk packings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::cluster::{Cluster, Segment, SegmentGeometry};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::sticky::DiskConfiguration;

/// Radial pieces have no native SVG primitive and are drawn as polylines.
const RADIAL_PIECES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderStyle {
    /// Width of the canvas in pixels; the height follows the aspect ratio.
    pub width: f64,
    pub margin: f64,
    /// Stroke width of arcs against the exterior.
    pub outer_stroke: f64,
    /// Stroke width of interfaces between chambers.
    pub inner_stroke: f64,
    pub stroke_color: String,
    /// Chamber fills, cycled.
    pub palette: Vec<String>,
    /// Digits after the decimal point in coordinates.
    pub precision: usize,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 600.0,
            margin: 20.0,
            outer_stroke: 2.0,
            inner_stroke: 1.5,
            stroke_color: "#222222".into(),
            palette: ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            precision: 4,
        }
    }
}

impl RenderStyle {
    pub fn from_toml(s: &str) -> Result<Self> {
        let style: RenderStyle = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        style.check()?;
        Ok(style)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.width > 0.0) || !(self.margin >= 0.0) || 2.0 * self.margin >= self.width {
            return Err(Error::domain("canvas width must be positive and exceed twice the margin"));
        }
        if !(self.outer_stroke > 0.0 && self.inner_stroke > 0.0) {
            return Err(Error::domain("stroke widths must be positive"));
        }
        if self.palette.is_empty() {
            return Err(Error::domain("palette is empty"));
        }
        Ok(())
    }
}

/// Maps model coordinates to the canvas (y pointing down).
struct Canvas {
    lo: Point,
    hi: Point,
    scale: f64,
    margin: f64,
    width: f64,
    height: f64,
    precision: usize,
}

impl Canvas {
    fn new(lo: Point, hi: Point, style: &RenderStyle) -> Canvas {
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let scale = (style.width - 2.0 * style.margin) / span;
        Canvas {
            lo,
            hi,
            scale,
            margin: style.margin,
            width: style.width,
            height: (hi.y - lo.y) * scale + 2.0 * style.margin,
            precision: style.precision,
        }
    }

    fn num(&self, v: f64) -> String {
        let s = format!("{:.*}", self.precision, v);
        // avoid "-0.0000"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }

    fn xy(&self, p: Point) -> String {
        let x = (p.x - self.lo.x) * self.scale + self.margin;
        let y = (self.hi.y - p.y) * self.scale + self.margin;
        format!("{} {}", self.num(x), self.num(y))
    }

    /// Path commands drawing `s` from its start, assuming the pen is there.
    fn segment(&self, s: &Segment, out: &mut String) {
        match s.geometry {
            SegmentGeometry::Arc { curvature } if curvature != 0.0 => {
                let r = self.num(self.scale / curvature.abs());
                // positive curvature turns counterclockwise, which is clockwise
                // on the flipped canvas: SVG's positive sweep direction
                let sweep = u8::from(curvature > 0.0);
                let _ = write!(out, " A {r} {r} 0 0 {sweep} {}", self.xy(s.end));
            }
            SegmentGeometry::Arc { .. } => {
                let _ = write!(out, " L {}", self.xy(s.end));
            }
            SegmentGeometry::RadialLinear { .. } => {
                for p in &s.sample(RADIAL_PIECES)[1..] {
                    let _ = write!(out, " L {}", self.xy(*p));
                }
            }
        }
    }

    fn header(&self, out: &mut String) {
        let (w, h) = (self.num(self.width), self.num(self.height));
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
    }
}

/// Closed loops of chamber `i`, each a list of segments oriented with the
/// chamber on the left.
fn loops(c: &Cluster, i: usize) -> Vec<Vec<Segment>> {
    let mut pending: Vec<(Segment, usize, usize)> = c
        .segments()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.touches(i))
        .map(|(k, s)| {
            let (a, b) = c.segment_ends(k);
            if s.left == i {
                (*s, a, b)
            } else {
                (s.reversed(), b, a)
            }
        })
        .collect();
    let mut out = Vec::new();
    while !pending.is_empty() {
        let (first, start, mut at) = pending.remove(0);
        let mut lp = vec![first];
        while at != start {
            match pending.iter().position(|(_, a, _)| *a == at) {
                Some(k) => {
                    let (s, _, b) = pending.remove(k);
                    lp.push(s);
                    at = b;
                }
                None => break,
            }
        }
        out.push(lp);
    }
    out
}

/// SVG drawing of `c`: one even-odd filled path per chamber, then every
/// segment stroked once, arcs as native arc commands of radius 1/|κ|.
pub fn render_svg(c: &Cluster, style: &RenderStyle) -> Result<String> {
    style.check()?;
    let (lo, hi) = c.bounding_box();
    let canvas = Canvas::new(lo, hi, style);
    let mut out = String::new();
    canvas.header(&mut out);
    for i in 1..=c.n_chambers() {
        let mut d = String::new();
        for lp in loops(c, i) {
            let _ = write!(d, "M {}", canvas.xy(lp[0].start));
            for s in &lp {
                canvas.segment(s, &mut d);
            }
            d.push_str(" Z ");
        }
        let fill = &style.palette[(i - 1) % style.palette.len()];
        let _ = writeln!(
            out,
            r#"  <path class="chamber" data-chamber="{i}" d="{}" fill="{fill}" fill-rule="evenodd" stroke="none"/>"#,
            d.trim_end()
        );
    }
    for s in c.segments() {
        let mut d = format!("M {}", canvas.xy(s.start));
        canvas.segment(s, &mut d);
        let (class, width) = if s.touches(0) {
            ("outer", style.outer_stroke)
        } else {
            ("interface", style.inner_stroke)
        };
        let _ = writeln!(
            out,
            r#"  <path class="{class}" d="{d}" fill="none" stroke="{}" stroke-width="{}"/>"#,
            style.stroke_color,
            canvas.num(width)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// SVG drawing of a disk packing, with tangent pairs joined by center lines.
pub fn render_disks(d: &DiskConfiguration, contacts: &[(usize, usize)], style: &RenderStyle) -> Result<String> {
    style.check()?;
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (c, r) in d.centers.iter().zip(&d.radii) {
        lo = Point::new(lo.x.min(c.x - r), lo.y.min(c.y - r));
        hi = Point::new(hi.x.max(c.x + r), hi.y.max(c.y + r));
    }
    let canvas = Canvas::new(lo, hi, style);
    let mut out = String::new();
    canvas.header(&mut out);
    for (k, (c, r)) in d.centers.iter().zip(&d.radii).enumerate() {
        let xy = canvas.xy(*c);
        let (x, y) = xy.split_once(' ').expect("two coordinates");
        let _ = writeln!(
            out,
            r#"  <circle cx="{x}" cy="{y}" r="{}" fill="{}" stroke="{}" stroke-width="{}"/>"#,
            canvas.num(r * canvas.scale),
            style.palette[k % style.palette.len()],
            style.stroke_color,
            canvas.num(style.outer_stroke)
        );
    }
    for &(i, j) in contacts {
        let _ = writeln!(
            out,
            r#"  <path class="bond" d="M {} L {}" stroke="{}" stroke-width="{}"/>"#,
            canvas.xy(d.centers[i]),
            canvas.xy(d.centers[j]),
            style.stroke_color,
            canvas.num(style.inner_stroke)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
