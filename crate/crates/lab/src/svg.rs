//! Minimal SVG charts: grouped bars or lines of measured values against bounds.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    Bars,
    Lines,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    pub title: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
    /// Horizontal reference lines `(label, y)`.
    pub guides: Vec<(String, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    pub fn new(kind: ChartKind, title: impl Into<String>, categories: Vec<String>) -> Self {
        Self {
            kind,
            title: title.into(),
            categories,
            series: Vec::new(),
            guides: Vec::new(),
        }
    }

    pub fn series(mut self, label: impl Into<String>, values: Vec<f64>) -> Self {
        self.series.push(Series {
            label: label.into(),
            values,
        });
        self
    }

    pub fn guide(mut self, label: impl Into<String>, y: f64) -> Self {
        self.guides.push((label.into(), y));
        self
    }

    fn y_max(&self) -> f64 {
        let top = self
            .series
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .chain(self.guides.iter().map(|g| g.1))
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        if top > 0.0 {
            top * 1.1
        } else {
            1.0
        }
    }

    pub fn render(&self) -> String {
        let plot_w = WIDTH - 2.0 * MARGIN;
        let plot_h = HEIGHT - 2.0 * MARGIN;
        let y_max = self.y_max();
        let y = |v: f64| MARGIN + plot_h * (1.0 - (v.max(0.0) / y_max).min(1.0));
        let slots = self.categories.len().max(1) as f64;
        let slot_w = plot_w / slots;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<path d="M{MARGIN} {MARGIN} V{} H{}" stroke="black" fill="none"/>"#,
            MARGIN + plot_h,
            MARGIN + plot_w
        );
        for tick in 0..=4 {
            let v = y_max * tick as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
                MARGIN - 4.0,
                y(v) + 4.0,
                format_tick(v)
            );
        }
        for (i, c) in self.categories.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
                MARGIN + slot_w * (i as f64 + 0.5),
                MARGIN + plot_h + 16.0,
                escape(c)
            );
        }
        let groups = self.series.len().max(1) as f64;
        for (si, s) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            match self.kind {
                ChartKind::Bars => {
                    let bar_w = slot_w * 0.8 / groups;
                    for (i, &v) in s.values.iter().enumerate() {
                        let x = MARGIN + slot_w * (i as f64 + 0.1) + bar_w * si as f64;
                        let _ = writeln!(
                            out,
                            r#"<rect x="{x:.1}" y="{:.1}" width="{bar_w:.1}" height="{:.1}" fill="{color}"/>"#,
                            y(v),
                            MARGIN + plot_h - y(v)
                        );
                    }
                }
                ChartKind::Lines => {
                    let points: Vec<String> = s
                        .values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| format!("{:.1},{:.1}", MARGIN + slot_w * (i as f64 + 0.5), y(v)))
                        .collect();
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                        points.join(" ")
                    );
                }
            }
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
                WIDTH - MARGIN - 120.0,
                MARGIN + 14.0 * si as f64,
                WIDTH - MARGIN - 106.0,
                MARGIN + 9.0 + 14.0 * si as f64,
                escape(&s.label)
            );
        }
        for (label, v) in &self.guides {
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN}" x2="{}" y1="{:.1}" y2="{:.1}" stroke="#555" stroke-dasharray="4 3"/><text x="{}" y="{:.1}" text-anchor="end" fill="#555">{}</text>"##,
                MARGIN + plot_w,
                y(*v),
                y(*v),
                MARGIN + plot_w,
                y(*v) - 3.0,
                escape(label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if !(1e-2..1e4).contains(&v.abs()) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}
