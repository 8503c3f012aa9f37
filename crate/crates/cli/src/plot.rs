//! Self-contained SVG line charts: output vs reference, tracking error and
//! control, stacked over a shared time axis.

use std::fmt::Write as _;

use lyapunov_clamp::StepRecord;

const WIDTH: f64 = 960.0;
const PANEL_HEIGHT: f64 = 200.0;
const PANEL_GAP: f64 = 56.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 44.0;

struct Series<'a> {
    name: &'a str,
    color: &'a str,
    width: f64,
    points: Vec<(f64, f64)>,
}

struct Panel<'a> {
    title: &'a str,
    series: Vec<Series<'a>>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Roughly `target` evenly spaced round numbers covering `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo || target == 0 {
        return vec![lo];
    }
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Keeps the first, minimum, maximum and last point of each of `buckets`
/// equal-width slices, preserving order. Noisy signals keep their envelope.
pub fn decimate(points: &[(f64, f64)], buckets: usize) -> Vec<(f64, f64)> {
    if points.len() <= buckets * 4 || buckets == 0 {
        return points.to_vec();
    }
    let chunk = points.len().div_ceil(buckets);
    let mut out = Vec::with_capacity(buckets * 4);
    for slice in points.chunks(chunk) {
        let mut idx = vec![0, slice.len() - 1];
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in slice.iter().enumerate() {
            if p.1 < slice[lo].1 {
                lo = i;
            }
            if p.1 > slice[hi].1 {
                hi = i;
            }
        }
        idx.push(lo);
        idx.push(hi);
        idx.sort_unstable();
        idx.dedup();
        out.extend(idx.into_iter().map(|i| slice[i]));
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

fn render_panel(svg: &mut String, panel: &Panel<'_>, top: f64, t_range: (f64, f64)) {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let (t0, t1) = t_range;

    let (mut lo, mut hi) = panel
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        lo -= pad;
        hi += pad;
    }
    let pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    let x = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w;
    let y = |v: f64| top + (hi - v) / (hi - lo) * PANEL_HEIGHT;

    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="14" font-weight="bold">{}</text>"##,
        MARGIN_LEFT,
        top - 10.0,
        escape(panel.title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN_LEFT:.1}" y="{top:.1}" width="{plot_w:.1}" height="{PANEL_HEIGHT:.1}" fill="#ffffff" stroke="#444444"/>"##
    );

    for tick in nice_ticks(lo, hi, 5) {
        let ty = y(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{ty:.2}" x2="{:.1}" y2="{ty:.2}" stroke="#e3e3e3"/><text x="{:.1}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"##,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            ty + 4.0,
            fmt_tick(tick)
        );
    }
    for tick in nice_ticks(t0, t1, 10) {
        let tx = x(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{tx:.2}" y1="{:.1}" x2="{tx:.2}" y2="{:.1}" stroke="#e3e3e3"/><text x="{tx:.2}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"##,
            top,
            top + PANEL_HEIGHT,
            top + PANEL_HEIGHT + 15.0,
            fmt_tick(tick)
        );
    }

    let buckets = plot_w as usize;
    for series in &panel.series {
        let mut path = String::new();
        for (t, v) in decimate(&series.points, buckets) {
            if v.is_finite() {
                let _ = write!(path, "{:.2},{:.2} ", x(t), y(v));
            }
        }
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="{}" stroke-width="{}" points="{}"/>"##,
            series.color,
            series.width,
            path.trim_end()
        );
    }

    let mut lx = MARGIN_LEFT + plot_w;
    for series in panel.series.iter().rev() {
        lx -= 12.0 + 7.0 * series.name.len() as f64 + 20.0;
        let ly = top - 14.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="12">{}</text>"##,
            lx + 16.0,
            series.color,
            lx + 20.0,
            ly + 4.0,
            escape(series.name)
        );
    }
}

/// Renders the trace as a standalone SVG document.
pub fn render_svg(records: &[StepRecord], title: &str) -> String {
    let pts = |f: fn(&StepRecord) -> f64| records.iter().map(|r| (r.t, f(r))).collect::<Vec<_>>();
    let panels = [
        Panel {
            title: "output y and reference y_r",
            series: vec![
                Series {
                    name: "y_r",
                    color: "#d62728",
                    width: 1.5,
                    points: pts(|r| r.y_r),
                },
                Series {
                    name: "y",
                    color: "#1f77b4",
                    width: 1.0,
                    points: pts(|r| r.x1),
                },
            ],
        },
        Panel {
            title: "tracking error e",
            series: vec![Series {
                name: "e",
                color: "#2ca02c",
                width: 1.0,
                points: pts(|r| r.e),
            }],
        },
        Panel {
            title: "control",
            series: vec![
                Series {
                    name: "u_b",
                    color: "#bbbbbb",
                    width: 0.6,
                    points: pts(|r| r.u_b),
                },
                Series {
                    name: "u",
                    color: "#9467bd",
                    width: 0.8,
                    points: pts(|r| r.u),
                },
            ],
        },
    ];

    let t0 = records.first().map_or(0.0, |r| r.t);
    let mut t1 = records.last().map_or(1.0, |r| r.t);
    if t1 <= t0 {
        t1 = t0 + 1.0;
    }

    let height = MARGIN_TOP + 3.0 * PANEL_HEIGHT + 2.0 * PANEL_GAP + MARGIN_BOTTOM;
    let mut svg = String::with_capacity(256 * 1024);
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"##
    );
    let _ = writeln!(svg, "<title>{}</title>", escape(title));
    let _ = writeln!(
        svg,
        r##"<rect width="100%" height="100%" fill="#fafafa"/>"##
    );
    for (i, panel) in panels.iter().enumerate() {
        let top = MARGIN_TOP + i as f64 * (PANEL_HEIGHT + PANEL_GAP);
        render_panel(&mut svg, panel, top, (t0, t1));
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">t [s]</text>"##,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        height - 8.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(
            nice_ticks(0.0, 60.0, 10),
            vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]
        );
        assert_eq!(
            nice_ticks(0.0, 10.0, 5),
            vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
        );
        assert_eq!(nice_ticks(-1.0, 1.0, 4), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(nice_ticks(1.0, 1.0, 4), vec![1.0]);
    }

    #[test]
    fn decimation_keeps_extremes() {
        let pts: Vec<_> = (0..10_000)
            .map(|i| (i as f64, if i == 4321 { 99.0 } else { (i % 7) as f64 }))
            .collect();
        let d = decimate(&pts, 100);
        assert!(d.len() <= 400);
        assert!(d.contains(&(4321.0, 99.0)));
        assert_eq!(d.first(), pts.first());
        assert_eq!(d.last(), pts.last());
        assert!(d.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn empty_trace_still_renders() {
        let svg = render_svg(&[], "empty");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
