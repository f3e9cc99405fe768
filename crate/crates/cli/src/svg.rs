//! Minimal hand-written SVG plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{m} {top} V{bot} H{right}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        top = MARGIN / 2.0 + 8.0,
        bot = HEIGHT - MARGIN,
        right = WIDTH - MARGIN / 2.0
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Bars of `log10(eigenvalue)` for the leading `max_bars` values; the
/// first `highlight` bars are drawn in a darker colour.
pub fn scree(eigenvalues: &[f64], highlight: usize, max_bars: usize) -> String {
    let vals: Vec<f64> = eigenvalues.iter().take(max_bars).map(|v| v.max(1e-300).log10()).collect();
    let mut s = header("Scree plot (log10 eigenvalue)");
    if vals.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min).floor().min(hi - 1.0);
    let plot_h = HEIGHT - 1.5 * MARGIN - 8.0;
    let top = MARGIN / 2.0 + 8.0;
    let y = |v: f64| top + (hi - v) / (hi - lo) * plot_h;
    let slot = (WIDTH - 1.5 * MARGIN) / vals.len() as f64;
    for (k, v) in vals.iter().enumerate() {
        let x = MARGIN + k as f64 * slot + 0.15 * slot;
        let colour = if k < highlight { "#1f4e79" } else { "#9dc3e6" };
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{colour}"/>"#,
            y(*v),
            0.7 * slot,
            (HEIGHT - MARGIN - y(*v)).max(0.0)
        );
    }
    for tick in [lo, hi] {
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{tick}</text>"#, MARGIN - 4.0, y(tick) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">component</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
    s.push_str("</svg>\n");
    s
}

/// One polyline per column of `series` against `x`.
pub fn lines(title: &str, x: &[f64], series: &[Vec<f64>], labels: &[String]) -> String {
    let mut s = header(title);
    let finite = |v: &&f64| v.is_finite();
    let ys: Vec<f64> = series.iter().flatten().copied().collect();
    if x.len() < 2 || ys.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let y0 = ys.iter().filter(finite).copied().fold(f64::INFINITY, f64::min);
    let mut y1 = ys.iter().filter(finite).copied().fold(f64::NEG_INFINITY, f64::max);
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let top = MARGIN / 2.0 + 8.0;
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (WIDTH - 1.5 * MARGIN);
    let py = |v: f64| top + (y1 - v) / (y1 - y0) * (HEIGHT - MARGIN - top);
    for (k, col) in series.iter().enumerate() {
        let pts: Vec<String> =
            x.iter().zip(col).filter(|(_, v)| v.is_finite()).map(|(a, b)| format!("{:.2},{:.2}", px(*a), py(*b))).collect();
        let colour = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, pts.join(" "));
        if let Some(label) = labels.get(k) {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
                MARGIN + 8.0 + 90.0 * k as f64,
                top + 12.0,
                escape(label)
            );
        }
    }
    let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{y1:.3}</text>"#, MARGIN - 4.0, py(y1) + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{y0:.3}</text>"#, MARGIN - 4.0, py(y0));
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{x0}</text>"#, HEIGHT - MARGIN + 14.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{x1}</text>"#, WIDTH - MARGIN / 2.0, HEIGHT - MARGIN + 14.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scree_has_one_bar_per_value() {
        let s = scree(&[10.0, 1.0, 0.1, 0.01], 2, 30);
        assert_eq!(s.matches("<rect x=").count(), 4);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn one_polyline_per_series() {
        let s = lines("t", &[1.0, 2.0, 3.0], &[vec![0.0, 1.0, 0.5], vec![1.0, 0.0, 2.0]], &["a".into(), "b".into()]);
        assert_eq!(s.matches("<polyline").count(), 2);
    }
}
