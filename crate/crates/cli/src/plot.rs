//! Self-contained SVG line plots.
//!
//! No plotting dependency: scenarios emit small deterministic SVG files
//! with linear or log10 y-axes, optional dashed threshold lines, and a
//! legend. Enough for the reproduction figures, nothing more.

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;

const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// One named curve.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line-plot description; `render` produces the SVG text.
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Log10 y-axis; values are clamped to a positive floor first.
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Dashed horizontal guides, e.g. regularity thresholds.
    pub h_lines: Vec<(f64, String)>,
}

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        LinePlot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            log_y: false,
            series: Vec::new(),
            h_lines: Vec::new(),
        }
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn with_series(mut self, label: &str, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series {
            label: label.to_string(),
            points,
        });
        self
    }

    pub fn with_h_line(mut self, y: f64, label: &str) -> Self {
        self.h_lines.push((y, label.to_string()));
        self
    }

    fn y_transform(&self, y: f64) -> f64 {
        if self.log_y {
            y.max(1e-16).log10()
        } else {
            y
        }
    }

    /// Render to SVG text.
    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                xs.push(x);
                ys.push(self.y_transform(y));
            }
        }
        for &(y, _) in &self.h_lines {
            ys.push(self.y_transform(y));
        }
        let (x_min, x_max) = span(&xs);
        let (y_min, y_max) = span(&ys);
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = move |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
        let sy = move |y: f64| MARGIN_T + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // Axes box.
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" \
fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n"
        ));

        // Ticks and grid.
        for (value, frac) in ticks(x_min, x_max) {
            let x = MARGIN_L + frac * plot_w;
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{MARGIN_T}\" x2=\"{x:.1}\" y2=\"{:.1}\" \
stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
                MARGIN_T + plot_h
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                MARGIN_T + plot_h + 18.0,
                tick_label(value)
            ));
        }
        for (value, frac) in ticks(y_min, y_max) {
            let y = MARGIN_T + (1.0 - frac) * plot_h;
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
                MARGIN_L + plot_w
            ));
            let label = if self.log_y {
                format!("1e{}", value.round() as i64)
            } else {
                tick_label(value)
            };
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{label}</text>\n",
                MARGIN_L - 6.0,
                y + 4.0
            ));
        }

        // Threshold guides.
        for (value, label) in &self.h_lines {
            let y = sy(self.y_transform(*value));
            if y.is_finite() && y >= MARGIN_T && y <= MARGIN_T + plot_h {
                svg.push_str(&format!(
                    "<line x1=\"{MARGIN_L}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
stroke=\"#888\" stroke-width=\"1.2\" stroke-dasharray=\"7,5\"/>\n",
                    MARGIN_L + plot_w
                ));
                svg.push_str(&format!(
                    "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#666\" \
text-anchor=\"end\">{}</text>\n",
                    MARGIN_L + plot_w - 6.0,
                    y - 5.0,
                    escape(label)
                ));
            }
        }

        // Curves.
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mut d = String::new();
            for (k, &(x, y)) in s.points.iter().enumerate() {
                let cmd = if k == 0 { 'M' } else { 'L' };
                d.push_str(&format!("{cmd}{:.2},{:.2} ", sx(x), sy(self.y_transform(y))));
            }
            svg.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                d.trim_end()
            ));
        }

        // Legend.
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let y = MARGIN_T + 16.0 + 18.0 * i as f64;
            let x = MARGIN_L + 12.0;
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
stroke=\"{color}\" stroke-width=\"2\"/>\n",
                x + 22.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>\n",
                x + 28.0,
                y + 4.0,
                escape(&s.label)
            ));
        }

        // Axis labels.
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"20\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
transform=\"rotate(-90 20 {:.1})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            escape(&self.y_label)
        ));
        svg.push_str("</svg>\n");
        svg
    }
}

fn span(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            min = min.min(v);
            max = max.max(v);
        }
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    if min == max {
        let pad = if min == 0.0 { 1.0 } else { min.abs() * 0.1 };
        return (min - pad, max + pad);
    }
    let pad = (max - min) * 0.04;
    (min - pad, max + pad)
}

/// Round tick positions at a 1-2-5 step, returned as (value, fraction).
fn ticks(min: f64, max: f64) -> Vec<(f64, f64)> {
    let range = max - min;
    let raw = range / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| range / s <= 7.0)
        .unwrap_or(mag * 10.0);
    let first = (min / step).ceil() * step;
    let mut out = Vec::new();
    let mut v = first;
    while v <= max + step * 1e-9 {
        out.push((v, (v - min) / range));
        v += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
