//! Hand-rolled SVG output for component plots. Strings are assembled in a
//! fixed order with fixed-precision coordinates, so the same dataset always
//! produces byte-identical files.

const ROW_HEIGHT: f64 = 280.0;
const WIDTH: f64 = 1200.0;
const PANEL_WIDTH: f64 = WIDTH / 3.0;
const MARGIN_LEFT: f64 = 52.0;
const MARGIN_RIGHT: f64 = 14.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 32.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];
const WINDOW_FILL: &str = "#f4b63f";
const PANEL_TITLES: [&str; 3] = ["signal", "feature", "sum"];

/// One plotted sample: per-channel series for each of the three panels,
/// plus the ground-truth windows to shade on the sum panel.
pub struct PanelRow {
    pub title: String,
    pub signal: Vec<Vec<f64>>,
    pub feature: Vec<Vec<f64>>,
    pub sum: Vec<Vec<f64>>,
    pub windows: Vec<(usize, usize)>,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Panel {
    x0: f64,
    y0: f64,
    plot_w: f64,
    plot_h: f64,
    t: usize,
    y_min: f64,
    y_max: f64,
}

impl Panel {
    fn new(row: usize, col: usize, series: &[Vec<f64>]) -> Panel {
        let t = series.first().map(|s| s.len()).unwrap_or(1);
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for channel in series {
            for &v in channel {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
        if !y_min.is_finite() || y_min == y_max {
            let center = if y_min.is_finite() { y_min } else { 0.0 };
            y_min = center - 1.0;
            y_max = center + 1.0;
        }
        Panel {
            x0: col as f64 * PANEL_WIDTH + MARGIN_LEFT,
            y0: row as f64 * ROW_HEIGHT + MARGIN_TOP,
            plot_w: PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            plot_h: ROW_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
            t,
            y_min,
            y_max,
        }
    }

    fn x(&self, timestep: f64) -> f64 {
        let span = (self.t.max(2) - 1) as f64;
        self.x0 + timestep / span * self.plot_w
    }

    fn y(&self, value: f64) -> f64 {
        let frac = (value - self.y_min) / (self.y_max - self.y_min);
        self.y0 + (1.0 - frac) * self.plot_h
    }

    fn frame(&self, out: &mut String, title: &str) {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#333333\">{}</text>\n",
            fmt(self.x0),
            fmt(self.y0 - 12.0),
            escape(title)
        ));
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
            fmt(self.x0),
            fmt(self.y0),
            fmt(self.plot_w),
            fmt(self.plot_h)
        ));
        // y ticks at min, midpoint, max
        for frac in [0.0, 0.5, 1.0] {
            let value = self.y_min + frac * (self.y_max - self.y_min);
            let y = self.y(value);
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
                fmt(self.x0 - 4.0),
                fmt(y),
                fmt(self.x0),
                fmt(y)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\" text-anchor=\"end\">{}</text>\n",
                fmt(self.x0 - 6.0),
                fmt(y + 3.5),
                fmt(value)
            ));
        }
        // x ticks at the first, middle, and last timestep
        for t in [0, (self.t - 1) / 2, self.t - 1] {
            let x = self.x(t as f64);
            let base = self.y0 + self.plot_h;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
                fmt(x),
                fmt(base),
                fmt(x),
                fmt(base + 4.0)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\" text-anchor=\"middle\">{t}</text>\n",
                fmt(x),
                fmt(base + 15.0)
            ));
        }
    }

    fn windows(&self, out: &mut String, windows: &[(usize, usize)]) {
        for &(start, len) in windows {
            let x0 = self.x(start as f64);
            let x1 = self.x((start + len - 1) as f64);
            out.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{WINDOW_FILL}\" fill-opacity=\"0.35\"/>\n",
                fmt(x0),
                fmt(self.y0),
                fmt((x1 - x0).max(1.0)),
                fmt(self.plot_h)
            ));
        }
    }

    fn series(&self, out: &mut String, series: &[Vec<f64>]) {
        for (channel, values) in series.iter().enumerate() {
            let color = PALETTE[channel % PALETTE.len()];
            let points: Vec<String> = values
                .iter()
                .enumerate()
                .map(|(t, &v)| format!("{},{}", fmt(self.x(t as f64)), fmt(self.y(v))))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                points.join(" ")
            ));
        }
    }
}

/// Renders one row per sample with three panels each: the background
/// signal, the localized feature, and their sum with the ground-truth
/// windows shaded.
pub fn render(rows: &[PanelRow]) -> String {
    let height = rows.len() as f64 * ROW_HEIGHT;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(WIDTH),
        fmt(height),
        fmt(WIDTH),
        fmt(height)
    );
    out.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        fmt(WIDTH),
        fmt(height)
    ));
    for (row_index, row) in rows.iter().enumerate() {
        let columns = [&row.signal, &row.feature, &row.sum];
        for (col, series) in columns.iter().enumerate() {
            let panel = Panel::new(row_index, col, series);
            let title = format!("{} \u{b7} {}", row.title, PANEL_TITLES[col]);
            panel.frame(&mut out, &title);
            if col == 2 {
                panel.windows(&mut out, &row.windows);
            }
            panel.series(&mut out, series);
        }
    }
    out.push_str("</svg>\n");
    out
}
