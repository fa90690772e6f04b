//! Standalone SVG emission: a multi-series line plot and a grid heat map.
//! Presentation only; no numeric result depends on anything here.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct LineSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn finite_bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        return None;
    }
    if lo == hi {
        // Degenerate span: open it up symmetrically.
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

fn axis_ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=5).map(|i| lo + (hi - lo) * i as f64 / 5.0).collect()
}

fn svg_header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    );
}

fn axes(out: &mut String, xlabel: &str, ylabel: &str, xb: (f64, f64), yb: (f64, f64)) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = write!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );
    for t in axis_ticks(xb.0, xb.1) {
        let px = x0 + (t - xb.0) / (xb.1 - xb.0) * (x1 - x0);
        let _ = write!(
            out,
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{px}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{t:.3e}</text>\n",
            y0 + 5.0,
            y0 + 20.0
        );
    }
    for t in axis_ticks(yb.0, yb.1) {
        let py = y0 - (t - yb.0) / (yb.1 - yb.0) * (y0 - y1);
        let _ = write!(
            out,
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{x0}\" y2=\"{py}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{t:.3e}</text>\n",
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        );
    }
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{xlabel}</text>\n\
         <text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{ylabel}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

/// Multi-series line plot.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[LineSeries]) -> Option<String> {
    let xb = finite_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)))?;
    let yb = finite_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)))?;
    let mut out = String::new();
    svg_header(&mut out, title);
    axes(&mut out, xlabel, ylabel, xb, yb);
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        let mut sorted = s.points.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (j, (x, y)) in sorted.iter().enumerate() {
            let px = x0 + (x - xb.0) / (xb.1 - xb.0) * (x1 - x0);
            let py = y0 - (y - yb.0) / (yb.1 - yb.0) * (y0 - y1);
            let _ = write!(path, "{}{px:.2},{py:.2}", if j == 0 { "" } else { " " });
        }
        let _ = write!(
            out,
            "<polyline points=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN_R - 150.0,
            MARGIN_T + 18.0 * (i + 1) as f64,
            s.label
        );
    }
    out.push_str("</svg>\n");
    Some(out)
}

/// Heat map of scattered cell values on a regular grid. `cells` are
/// (x, y, value) triples; cell size is inferred from the smallest spacing.
pub fn heat_map(title: &str, xlabel: &str, ylabel: &str, cells: &[(f64, f64, f64)]) -> Option<String> {
    if cells.is_empty() {
        return None;
    }
    let xb = finite_bounds(cells.iter().map(|c| c.0))?;
    let yb = finite_bounds(cells.iter().map(|c| c.1))?;
    let vb = finite_bounds(cells.iter().map(|c| c.2))?;
    let mut xs: Vec<f64> = cells.iter().map(|c| c.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut ys: Vec<f64> = cells.iter().map(|c| c.1).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let cw = ((x1 - x0) / xs.len() as f64).max(1.0);
    let ch = ((y0 - y1) / ys.len() as f64).max(1.0);

    let mut out = String::new();
    svg_header(&mut out, title);
    for &(x, y, v) in cells {
        if !v.is_finite() {
            continue;
        }
        let frac = if vb.1 > vb.0 { (v - vb.0) / (vb.1 - vb.0) } else { 0.0 };
        let px = x0 + (x - xb.0) / (xb.1 - xb.0) * (x1 - x0 - cw);
        let py = y0 - (y - yb.0) / (yb.1 - yb.0) * (y0 - y1 - ch) - ch;
        let _ = writeln!(
            out,
            "<rect x=\"{px:.2}\" y=\"{py:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" \
             fill=\"{}\"/>",
            ramp(frac)
        );
    }
    axes(&mut out, xlabel, ylabel, xb, yb);
    out.push_str("</svg>\n");
    Some(out)
}

/// Dark-blue to yellow color ramp.
fn ramp(frac: f64) -> String {
    let f = frac.clamp(0.0, 1.0);
    let stops: [(f64, f64, f64); 5] = [
        (13.0, 8.0, 135.0),
        (84.0, 2.0, 163.0),
        (156.0, 23.0, 158.0),
        (237.0, 121.0, 83.0),
        (240.0, 249.0, 33.0),
    ];
    let pos = f * (stops.len() - 1) as f64;
    let i = (pos.floor() as usize).min(stops.len() - 2);
    let t = pos - i as f64;
    let lerp = |a: f64, b: f64| a + (b - a) * t;
    format!(
        "rgb({},{},{})",
        lerp(stops[i].0, stops[i + 1].0) as u8,
        lerp(stops[i].1, stops[i + 1].1) as u8,
        lerp(stops[i].2, stops[i + 1].2) as u8
    )
}
