//! Minimal SVG writers for shapes and ratio plots.

use std::fmt::Write;

use spectra_lab::geometry::Point;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

fn bounds(points: impl Iterator<Item = Point>) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for [x, y] in points {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    b
}

/// Closed polygon scaled to fit the canvas, y axis pointing up.
pub fn polygon(vertices: &[Point], title: &str) -> String {
    let (x0, y0, x1, y1) = bounds(vertices.iter().copied());
    let scale = (SIZE - 2.0 * PAD) / (x1 - x0).max(y1 - y0).max(1e-300);
    let mut path = String::new();
    for (i, [x, y]) in vertices.iter().enumerate() {
        let px = PAD + (x - x0) * scale;
        let py = SIZE - PAD - (y - y0) * scale;
        let _ = write!(path, "{}{:.3},{:.3} ", if i == 0 { "M" } else { "L" }, px, py);
    }
    path.push('Z');
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n\
         <title>{t}</title>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <path d=\"{path}\" fill=\"#cfe0f3\" stroke=\"#1f4e79\" stroke-width=\"1.5\"/>\n\
         </svg>\n",
        s = SIZE,
        t = escape(title),
    )
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Line plot with log10 x axis and a dashed reference line at y = `reference`.
pub fn log_x_plot(series: &[Series], reference: Option<f64>, title: &str, y_label: &str) -> String {
    const COLORS: [&str; 4] = ["#1f4e79", "#c0392b", "#27ae60", "#8e44ad"];
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().map(|&(x, y)| (x.log10(), y))).collect();
    let (mut x0, mut y0, mut x1, mut y1) = bounds(all.iter().map(|&(x, y)| [x, y]).chain(reference.map(|r| [all[0].0, r])));
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 20.0, 30.0, 50.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <title>{}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title)
    );
    let _ = writeln!(
        out,
        "<path d=\"M{l},{t} L{l},{b} L{r},{b}\" fill=\"none\" stroke=\"black\"/>",
        l = left,
        t = top,
        b = h - bottom,
        r = w - right
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 k</text>", (w + left) / 2.0, h - 12.0);
    let _ = writeln!(out, "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>", h / 2.0, h / 2.0, escape(y_label));
    for (v, label) in [(y0, y0), (y1, y1)] {
        let _ = writeln!(out, "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{:.4}</text>", left - 4.0, py(v) + 4.0, label);
    }
    for v in [x0, x1] {
        let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">{:.2}</text>", px(v), h - bottom + 16.0, v);
    }
    if let Some(r) = reference {
        let _ = writeln!(
            out,
            "<line x1=\"{l}\" x2=\"{r}\" y1=\"{y:.2}\" y2=\"{y:.2}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>",
            l = left,
            r = w - right,
            y = py(r)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y))).collect();
        let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{c}\" stroke-width=\"1.5\"/>", pts.join(" "));
        for &(x, y) in &s.points {
            let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{c}\"/>", px(x.log10()), py(y));
        }
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" fill=\"{c}\">{}</text>", left + 10.0, top + 14.0 * (i as f64 + 1.0), escape(s.label));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_path_is_closed_and_fits() {
        let s = polygon(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]], "rect");
        assert!(s.contains("M24.000,456.000"));
        assert!(s.contains("L456.000,456.000"));
        assert!(s.contains("Z\""));
    }

    #[test]
    fn plot_has_one_polyline_per_series() {
        let a = Series { label: "a", points: vec![(10.0, 1.0), (100.0, 1.1)] };
        let b = Series { label: "b", points: vec![(10.0, 0.9), (100.0, 0.95)] };
        let s = log_x_plot(&[a, b], Some(1.0), "t", "ratio");
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("stroke-dasharray"));
    }
}
