//! Standalone SVG rendering of traces and waves as stacked labeled lanes.
//! Output is deterministic: fixed float precision, fixed palette, no
//! timestamps or generated ids, so identical inputs give identical bytes.

use crate::signal::{Level, SignalTrace, SquareWave};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub enum PlotSeries<'a> {
    Trace(&'a SignalTrace),
    Wave(&'a SquareWave),
}

const WIDTH: f64 = 900.0;
const LANE_HEIGHT: f64 = 80.0;
const MARGIN_LEFT: f64 = 110.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

/// Step-rendered points for a wave over `[t0, t1]`: one point at each end
/// plus a vertical pair at every edge.
fn wave_points(wave: &SquareWave, t0: f64, t1: f64) -> Vec<(f64, f64)> {
    let lvl = |level: Level| match level {
        Level::High => 1.0,
        Level::Low => 0.0,
    };
    let mut pts = vec![(t0, lvl(wave.level_at(t0)))];
    for e in wave.edges.iter().filter(|e| e.time >= t0 && e.time <= t1) {
        let y_before = pts.last().map(|p| p.1).unwrap_or(0.0);
        pts.push((e.time, y_before));
        pts.push((e.time, 1.0 - y_before));
    }
    pts.push((t1, pts.last().map(|p| p.1).unwrap_or(0.0)));
    pts
}

/// Renders the series as stacked lanes into a standalone SVG file.
pub fn render_plot(series: &[PlotSeries<'_>], path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(series)?;
    std::fs::write(path, svg).map_err(|source| PlotError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Same as [`render_plot`] but returns the SVG text.
pub fn render_svg(series: &[PlotSeries<'_>]) -> Result<String, PlotError> {
    if series.is_empty() {
        return Err(PlotError::Empty);
    }
    // Common time range across all series.
    let mut t0 = f64::INFINITY;
    let mut t1 = f64::NEG_INFINITY;
    for s in series {
        let (a, b) = match s {
            PlotSeries::Trace(tr) => (
                tr.samples.first().unwrap().0,
                tr.samples.last().unwrap().0,
            ),
            PlotSeries::Wave(w) => {
                if w.edges.is_empty() {
                    continue;
                }
                (w.edges.first().unwrap().time, w.edges.last().unwrap().time)
            }
        };
        t0 = t0.min(a);
        t1 = t1.max(b);
    }
    if !(t1 > t0) {
        return Err(PlotError::Empty);
    }

    let height = MARGIN_TOP * 2.0 + LANE_HEIGHT * series.len() as f64;
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let x_of = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt(WIDTH),
        fmt(height),
        fmt(WIDTH),
        fmt(height)
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{}" height="{}" fill="white"/>"#,
        fmt(WIDTH),
        fmt(height)
    );

    for (lane, s) in series.iter().enumerate() {
        let color = PALETTE[lane % PALETTE.len()];
        let lane_top = MARGIN_TOP + LANE_HEIGHT * lane as f64;
        let lane_bottom = lane_top + LANE_HEIGHT * 0.8;
        let (label, pts): (&str, Vec<(f64, f64)>) = match s {
            PlotSeries::Trace(tr) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &(_, y) in &tr.samples {
                    lo = lo.min(y);
                    hi = hi.max(y);
                }
                let span = if hi > lo { hi - lo } else { 1.0 };
                (
                    tr.label.as_str(),
                    tr.samples
                        .iter()
                        .map(|&(t, y)| (t, (y - lo) / span))
                        .collect(),
                )
            }
            PlotSeries::Wave(w) => (w.label.as_str(), wave_points(w, t0, t1)),
        };
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#cccccc" stroke-width="1"/>"##,
            fmt(MARGIN_LEFT),
            fmt(lane_bottom),
            fmt(WIDTH - MARGIN_RIGHT),
            fmt(lane_bottom)
        );
        let _ = writeln!(
            svg,
            r##"<text x="8" y="{}" font-family="monospace" font-size="13" fill="#333333">{}</text>"##,
            fmt(lane_top + LANE_HEIGHT * 0.45),
            label
        );
        let points: Vec<String> = pts
            .iter()
            .map(|&(t, v)| {
                let y = lane_bottom - v * LANE_HEIGHT * 0.7;
                format!("{},{}", fmt(x_of(t)), fmt(y))
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.join(" "),
            color
        );
    }

    // Time axis labels at the extremes.
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" font-family="monospace" font-size="11" fill="#333333">{} s</text>"##,
        fmt(MARGIN_LEFT),
        fmt(height - 4.0),
        fmt(t0)
    );
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" font-family="monospace" font-size="11" fill="#333333" text-anchor="end">{} s</text>"##,
        fmt(WIDTH - MARGIN_RIGHT),
        fmt(height - 4.0),
        fmt(t1)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
