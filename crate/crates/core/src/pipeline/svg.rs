//! Plain SVG charts: grouped boxplots, a correlation heatmap and line plots.

use std::fmt::Write as _;

use crate::stats::{min_max, quantile};

const PALETTE: [&str; 8] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" stroke="{stroke}"/>"#
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            p.join(" ")
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            esc(s)
        );
    }

    pub fn vtext(&mut self, x: f64, y: f64, size: f64, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" font-family="sans-serif" text-anchor="end" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            esc(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

fn y_axis(svg: &mut Svg, left: f64, top: f64, h: f64, lo: f64, hi: f64, to_y: &dyn Fn(f64) -> f64) {
    svg.line(left, top, left, top + h, "black", 1.0);
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let y = to_y(v);
        svg.line(left - 4.0, y, left, y, "black", 1.0);
        svg.text(left - 6.0, y + 4.0, 10.0, "end", &format!("{v:.2}"));
    }
}

/// A labelled group of `(series, values)` boxes.
pub type Category = (String, Vec<(String, Vec<f64>)>);

/// One box per series within each category.
pub fn grouped_boxplot(title: &str, y_label: &str, categories: &[Category]) -> String {
    let series: Vec<String> = {
        let mut s: Vec<String> = Vec::new();
        for (_, list) in categories {
            for (name, _) in list {
                if !s.contains(name) {
                    s.push(name.clone());
                }
            }
        }
        s
    };
    let all: Vec<f64> = categories
        .iter()
        .flat_map(|(_, l)| l.iter().flat_map(|(_, v)| v.iter().copied()))
        .filter(|v| v.is_finite())
        .collect();
    let (mut lo, mut hi) = if all.is_empty() { (0.0, 1.0) } else { min_max(&all) };
    if hi - lo < 1e-9 {
        lo -= 0.05;
        hi += 0.05;
    }
    let pad = (hi - lo) * 0.05;
    let (lo, hi) = (lo - pad, hi + pad);
    let box_w = 18.0;
    let cat_w = (series.len() as f64 * (box_w + 6.0)).max(60.0) + 20.0;
    let (left, top, plot_h) = (60.0, 40.0, 300.0);
    let width = left + cat_w * categories.len().max(1) as f64 + 160.0;
    let mut svg = Svg::new(width, top + plot_h + 60.0);
    svg.text(width / 2.0, 20.0, 14.0, "middle", title);
    let to_y = |v: f64| top + plot_h * (1.0 - (v - lo) / (hi - lo));
    y_axis(&mut svg, left, top, plot_h, lo, hi, &to_y);
    svg.vtext(15.0, top, 11.0, y_label);
    for (c, (label, list)) in categories.iter().enumerate() {
        let x0 = left + 10.0 + c as f64 * cat_w;
        svg.text(x0 + cat_w / 2.0 - 10.0, top + plot_h + 20.0, 11.0, "middle", label);
        for (name, values) in list {
            let s = series.iter().position(|n| n == name).unwrap_or(0);
            let vals: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
            if vals.is_empty() {
                continue;
            }
            let x = x0 + s as f64 * (box_w + 6.0);
            let color = PALETTE[s % PALETTE.len()];
            let (q1, q2, q3) = (quantile(&vals, 0.25), quantile(&vals, 0.5), quantile(&vals, 0.75));
            let (mn, mx) = min_max(&vals);
            let cx = x + box_w / 2.0;
            svg.line(cx, to_y(mn), cx, to_y(q1), "black", 1.0);
            svg.line(cx, to_y(q3), cx, to_y(mx), "black", 1.0);
            svg.rect(x, to_y(q3), box_w, (to_y(q1) - to_y(q3)).max(0.5), color, "black");
            svg.line(x, to_y(q2), x + box_w, to_y(q2), "black", 2.0);
        }
    }
    let lx = left + cat_w * categories.len().max(1) as f64 + 20.0;
    for (s, name) in series.iter().enumerate() {
        let y = top + 10.0 + s as f64 * 18.0;
        svg.rect(lx, y - 9.0, 12.0, 12.0, PALETTE[s % PALETTE.len()], "black");
        svg.text(lx + 18.0, y + 1.0, 11.0, "start", name);
    }
    svg.finish()
}

fn diverging(v: f64) -> String {
    let t = v.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!("rgb({},{},{})", r as u8, g as u8, b as u8)
}

/// Square heatmap of values in [-1, 1], rows and columns in `order`.
pub fn heatmap(title: &str, names: &[String], values: &[Vec<f64>], order: &[usize]) -> String {
    let n = order.len();
    let cell = (600.0 / n.max(1) as f64).clamp(3.0, 14.0);
    let label = cell >= 8.0;
    let margin = if label { 150.0 } else { 20.0 };
    let size = margin + cell * n as f64 + 20.0;
    let mut svg = Svg::new(size, size + 30.0);
    svg.text(size / 2.0, 18.0, 14.0, "middle", title);
    let top = 30.0 + margin;
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            let fill = diverging(values[i][j]);
            svg.rect(margin + c as f64 * cell, top + r as f64 * cell, cell, cell, &fill, "none");
        }
        if label {
            svg.text(margin - 4.0, top + (r as f64 + 0.8) * cell, cell * 0.8, "end", &names[i]);
            svg.vtext(margin + (r as f64 + 0.8) * cell, top - 4.0, cell * 0.8, &names[i]);
        }
    }
    svg.finish()
}

/// Line plot of several `(x, y)` series on shared axes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let xs: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).collect();
    let (x0, mut x1) = if xs.is_empty() { (0.0, 1.0) } else { min_max(&xs) };
    let (y0, mut y1) = if ys.is_empty() { (0.0, 1.0) } else { min_max(&ys) };
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y1 = y0 + 1.0;
    }
    let (left, top, w, h) = (60.0, 40.0, 420.0, 300.0);
    let mut svg = Svg::new(left + w + 150.0, top + h + 60.0);
    svg.text((left + w) / 2.0, 20.0, 14.0, "middle", title);
    let to_x = |v: f64| left + w * (v - x0) / (x1 - x0);
    let to_y = |v: f64| top + h * (1.0 - (v - y0) / (y1 - y0));
    y_axis(&mut svg, left, top, h, y0, y1, &to_y);
    svg.line(left, top + h, left + w, top + h, "black", 1.0);
    for k in 0..=4 {
        let v = x0 + (x1 - x0) * k as f64 / 4.0;
        svg.text(to_x(v), top + h + 15.0, 10.0, "middle", &format!("{v:.2}"));
    }
    svg.text(left + w / 2.0, top + h + 35.0, 11.0, "middle", x_label);
    svg.vtext(15.0, top, 11.0, y_label);
    for (s, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let mapped: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (to_x(*x), to_y(*y))).collect();
        svg.polyline(&mapped, color);
        let y = top + 10.0 + s as f64 * 18.0;
        svg.line(left + w + 20.0, y - 4.0, left + w + 32.0, y - 4.0, color, 2.0);
        svg.text(left + w + 38.0, y, 11.0, "start", name);
    }
    svg.finish()
}
