//! Static SVG figures: rays over the Julia set cover, the comb of slit
//! heights and per-scale decay charts.

use std::fmt::Write as _;

use juliagreen_core::dynamics::Interval;

/// Axis-aligned region of the data plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    /// Smallest box holding all points, padded by 5% on every side.
    pub fn enclosing(points: impl IntoIterator<Item = (f64, f64)>) -> Option<Bounds> {
        let mut b: Option<Bounds> = None;
        for (x, y) in points.into_iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            b = Some(match b {
                None => Bounds { x_min: x, x_max: x, y_min: y, y_max: y },
                Some(b) => Bounds {
                    x_min: b.x_min.min(x),
                    x_max: b.x_max.max(x),
                    y_min: b.y_min.min(y),
                    y_max: b.y_max.max(y),
                },
            });
        }
        b.map(|b| {
            let pad_x = 0.05 * (b.x_max - b.x_min).max(1e-9);
            let pad_y = 0.05 * (b.y_max - b.y_min).max(1e-9);
            Bounds {
                x_min: b.x_min - pad_x,
                x_max: b.x_max + pad_x,
                y_min: b.y_min - pad_y,
                y_max: b.y_max + pad_y,
            }
        })
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;

/// Maps data coordinates to pixels with `y` pointing up.
struct Canvas {
    bounds: Bounds,
    body: String,
}

impl Canvas {
    fn new(bounds: Bounds) -> Self {
        Canvas {
            bounds,
            body: String::new(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let b = &self.bounds;
        let sx = (x - b.x_min) / (b.x_max - b.x_min) * WIDTH;
        let sy = HEIGHT - (y - b.y_min) / (b.y_max - b.y_min) * HEIGHT;
        (sx, sy)
    }

    fn line(&mut self, from: (f64, f64), to: (f64, f64), stroke: &str, width: f64) {
        let (x1, y1) = self.px(from.0, from.1);
        let (x2, y2) = self.px(to.0, to.1);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let coords: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (sx, sy) = self.px(x, y);
                format!("{sx:.2},{sy:.2}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    fn circle(&mut self, at: (f64, f64), radius: f64, fill: &str) {
        let (cx, cy) = self.px(at.0, at.1);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{radius}" fill="{fill}"/>"#
        );
    }

    fn text(&mut self, x_px: f64, y_px: f64, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x_px:.2}" y="{y_px:.2}" font-family="sans-serif" font-size="14">{}</text>"#,
            escape(content)
        );
    }

    fn finish(self, title: &str) -> String {
        format!(
            concat!(
                r#"<?xml version="1.0" encoding="UTF-8"?>"#,
                "\n",
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
                "\n<title>{title}</title>\n",
                r#"<rect width="100%" height="100%" fill="white"/>"#,
                "\n{body}</svg>\n"
            ),
            w = WIDTH,
            h = HEIGHT,
            title = escape(title),
            body = self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// A ray drawn as one polyline, with an optional tip marker.
#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub tip: Option<(f64, f64)>,
}

/// Rays in the `z`-plane over the intervals of a Julia set cover.
pub fn rays_figure(title: &str, cover: &[Interval], rays: &[RayPath]) -> String {
    let points = cover
        .iter()
        .flat_map(|iv| [(iv.lo, 0.0), (iv.hi, 0.0)])
        .chain(rays.iter().flat_map(|r| r.points.iter().copied().chain(r.tip)));
    let bounds = Bounds::enclosing(points).unwrap_or(Bounds {
        x_min: -1.0,
        x_max: 1.0,
        y_min: -1.0,
        y_max: 1.0,
    });
    let mut canvas = Canvas::new(bounds);
    canvas.line((bounds.x_min, 0.0), (bounds.x_max, 0.0), "#bbbbbb", 0.5);
    for iv in cover {
        canvas.line((iv.lo, 0.0), (iv.hi, 0.0), "black", 4.0);
    }
    for ray in rays {
        canvas.polyline(&ray.points, "#1f77b4");
        if let Some(tip) = ray.tip {
            canvas.circle(tip, 4.0, "#d62728");
        }
    }
    for (i, ray) in rays.iter().enumerate() {
        canvas.text(10.0, 20.0 + 18.0 * i as f64, &ray.label);
    }
    canvas.finish(title)
}

/// Vertical slits of heights `h` at base points `−l`.
pub fn comb_figure(title: &str, slits: &[(u64, f64)]) -> String {
    let points = slits
        .iter()
        .flat_map(|&(l, h)| [(-(l as f64), 0.0), (-(l as f64), h)])
        .chain([(0.0, 0.0)]);
    let bounds = Bounds::enclosing(points).expect("the origin is always present");
    let mut canvas = Canvas::new(bounds);
    canvas.line((bounds.x_min, 0.0), (bounds.x_max, 0.0), "black", 1.0);
    for &(l, h) in slits {
        let x = -(l as f64);
        canvas.line((x, 0.0), (x, h), "#1f77b4", 2.0);
    }
    canvas.finish(title)
}

/// `log₂ s_n` against `n`, one polyline per series.
pub fn decay_figure(title: &str, series: &[(String, Vec<(u32, f64)>)]) -> String {
    let data: Vec<(String, Vec<(f64, f64)>)> = series
        .iter()
        .map(|(label, values)| {
            let pts = values
                .iter()
                .filter(|(_, s)| *s > 0.0)
                .map(|&(n, s)| (f64::from(n), s.log2()))
                .collect();
            (label.clone(), pts)
        })
        .collect();
    let bounds = Bounds::enclosing(data.iter().flat_map(|(_, p)| p.iter().copied())).unwrap_or(Bounds {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
    });
    let mut canvas = Canvas::new(bounds);
    for (_, pts) in &data {
        canvas.polyline(pts, "#2ca02c");
        for &p in pts {
            canvas.circle(p, 2.5, "#2ca02c");
        }
    }
    for (i, (label, _)) in data.iter().enumerate() {
        canvas.text(10.0, 20.0 + 18.0 * i as f64, label);
    }
    canvas.finish(title)
}
