//! Minimal SVG 1.1 figures: point clouds with hull overlays and line charts.

use std::fmt::Write as _;

use crate::geometry::Polygon2D;

pub const DATA_HULL: &str = "magenta";
pub const ARCHETYPE_HULL: &str = "red";

/// Data-space bounds `[xmin, xmax] × [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Bounds {
    pub fn of_points<'a>(pts: impl IntoIterator<Item = [f64; 2]> + 'a) -> Self {
        let mut b = Bounds {
            x: (f64::INFINITY, f64::NEG_INFINITY),
            y: (f64::INFINITY, f64::NEG_INFINITY),
        };
        for p in pts {
            b.x = (b.x.0.min(p[0]), b.x.1.max(p[0]));
            b.y = (b.y.0.min(p[1]), b.y.1.max(p[1]));
        }
        if !b.x.0.is_finite() {
            return Bounds { x: (0.0, 1.0), y: (0.0, 1.0) };
        }
        b.pad(0.05)
    }

    /// Grows each side by `frac` of its extent; degenerate extents get ±0.5.
    pub fn pad(self, frac: f64) -> Self {
        let grow = |(lo, hi): (f64, f64)| {
            let w = hi - lo;
            if w <= 0.0 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo - frac * w, hi + frac * w)
            }
        };
        Bounds { x: grow(self.x), y: grow(self.y) }
    }
}

/// A figure of fixed pixel size drawing into a data-space viewport.
pub struct Figure {
    width: f64,
    height: f64,
    margin: f64,
    bounds: Bounds,
    log_x: bool,
    equal_aspect: bool,
    body: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Figure {
    pub fn new(width: f64, height: f64, bounds: Bounds) -> Self {
        Self {
            width,
            height,
            margin: 40.0,
            bounds,
            log_x: false,
            equal_aspect: false,
            body: String::new(),
        }
    }

    /// Logarithmic horizontal axis; bounds must then be positive.
    pub fn log_x(mut self) -> Self {
        self.log_x = true;
        self
    }

    /// Same scale on both axes, for geometric plots.
    pub fn equal_aspect(mut self) -> Self {
        self.equal_aspect = true;
        self
    }

    fn scales(&self) -> (f64, f64, f64, f64) {
        let (mut x0, mut x1) = self.bounds.x;
        if self.log_x {
            x0 = x0.max(f64::MIN_POSITIVE).log10();
            x1 = x1.max(f64::MIN_POSITIVE).log10();
        }
        let (y0, y1) = self.bounds.y;
        let pw = self.width - 2.0 * self.margin;
        let ph = self.height - 2.0 * self.margin;
        let mut sx = pw / (x1 - x0);
        let mut sy = ph / (y1 - y0);
        if self.equal_aspect {
            let s = sx.min(sy);
            sx = s;
            sy = s;
        }
        (x0, y0, sx, sy)
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let (x0, y0, sx, sy) = self.scales();
        let x = if self.log_x { p[0].max(f64::MIN_POSITIVE).log10() } else { p[0] };
        (self.margin + (x - x0) * sx, self.height - self.margin - (p[1] - y0) * sy)
    }

    fn coords(&self, pts: &[[f64; 2]]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Small filled dots.
    pub fn points(&mut self, pts: &[[f64; 2]], color: &str, radius: f64) {
        let _ = writeln!(self.body, "<g fill=\"{}\" fill-opacity=\"0.5\">", escape(color));
        for &p in pts {
            let (x, y) = self.map(p);
            let _ = writeln!(self.body, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{radius}\"/>");
        }
        self.body.push_str("</g>\n");
    }

    /// Closed outline.
    pub fn polygon(&mut self, poly: &Polygon2D, color: &str, width: f64) {
        self.closed_outline(poly.vertices(), color, width);
    }

    pub fn closed_outline(&mut self, verts: &[[f64; 2]], color: &str, width: f64) {
        let _ = writeln!(
            self.body,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{width}\"/>",
            self.coords(verts),
            escape(color)
        );
    }

    /// One data curve.
    pub fn polyline(&mut self, pts: &[[f64; 2]], color: &str, label: &str) {
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"><title>{}</title></polyline>",
            self.coords(pts),
            escape(color),
            escape(label)
        );
    }

    /// Text placed in pixel coordinates.
    pub fn text(&mut self, x: f64, y: f64, s: &str) {
        let _ = writeln!(self.body, "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>", escape(s));
    }

    /// Axis box with the data-space range printed at the corners.
    pub fn frame(&mut self, xlabel: &str, ylabel: &str) {
        let (m, w, h) = (self.margin, self.width, self.height);
        let _ = writeln!(
            self.body,
            "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>",
            w - 2.0 * m,
            h - 2.0 * m
        );
        let b = self.bounds;
        self.text(m, h - m + 15.0, &format!("{:.3}", b.x.0));
        self.text(w - m - 40.0, h - m + 15.0, &format!("{:.3}", b.x.1));
        self.text(2.0, h - m, &format!("{:.3}", b.y.0));
        self.text(2.0, m + 4.0, &format!("{:.3}", b.y.1));
        self.text(0.5 * w - 20.0, h - 8.0, xlabel);
        self.text(2.0, 14.0, ylabel);
    }

    pub fn render(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Lays out several figures left to right, top to bottom.
pub fn grid(panels: &[(String, Figure)], columns: usize) -> String {
    let columns = columns.max(1);
    let (pw, ph) = panels.first().map_or((1.0, 1.0), |(_, f)| (f.width, f.height + 20.0));
    let rows = panels.len().div_ceil(columns);
    let (w, h) = (pw * columns as f64, ph * rows as f64);
    let mut s = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, (title, f)) in panels.iter().enumerate() {
        let (x, y) = ((i % columns) as f64 * pw, (i / columns) as f64 * ph);
        let _ = writeln!(
            s,
            "<g transform=\"translate({x},{y})\"><text x=\"10\" y=\"14\" font-size=\"12\" font-family=\"sans-serif\">{}</text><g transform=\"translate(0,20)\">\n{}</g></g>",
            escape(title),
            f.body
        );
    }
    s.push_str("</svg>\n");
    s
}
