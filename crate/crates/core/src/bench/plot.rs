//! Self-contained SVG of benchmark records: time and memory against
//! resolution on log-log axes, one polyline per kernel.

use std::fmt::Write as _;

use super::record::BenchRecord;
use crate::attention::AttentionKind;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

fn color(kind: AttentionKind) -> &'static str {
    match kind {
        AttentionKind::Pam => "#1f77b4",
        AttentionKind::Pga => "#d62728",
        AttentionKind::Halo => "#2ca02c",
        AttentionKind::Global => "#9467bd",
    }
}

/// Log10 range padded out to whole decades; `[0, 1]` when there is no data.
fn decade_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| *v > 0.0)
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    if lo == hi {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

/// Log2 range of resolutions padded to whole octaves.
fn octave_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| *v > 0.0)
        .map(f64::log2)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return (3.0, 8.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

struct Panel<'a> {
    title: &'a str,
    y_label: &'a str,
    x_offset: f64,
    value: fn(&BenchRecord) -> f64,
}

fn draw_panel(out: &mut String, panel: &Panel, records: &[BenchRecord], kinds: &[AttentionKind]) {
    let (x0, y0) = (panel.x_offset + MARGIN_L, MARGIN_T);
    let (pw, ph) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (xlo, xhi) = octave_range(records.iter().map(|r| r.h as f64));
    let (ylo, yhi) = decade_range(records.iter().map(panel.value));
    let sx = |v: f64| x0 + (v.log2() - xlo) / (xhi - xlo) * pw;
    let sy = |v: f64| y0 + ph - (v.log10() - ylo) / (yhi - ylo) * ph;

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        x0 + pw / 2.0,
        panel.title
    );
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#000"/>"##
    );
    for e in xlo as i32..=xhi as i32 {
        let x = x0 + (e as f64 - xlo) / (xhi - xlo) * pw;
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#000"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"##,
            y0 + ph,
            y0 + ph + 5.0,
            y0 + ph + 17.0,
            1u64 << e.max(0)
        );
    }
    for e in ylo as i32..=yhi as i32 {
        let y = y0 + ph - (e as f64 - ylo) / (yhi - ylo) * ph;
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="#000"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">1e{e}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">resolution (pixels per side)</text>"#,
        x0 + pw / 2.0,
        y0 + ph + 38.0
    );
    let (lx, ly) = (panel.x_offset + 16.0, y0 + ph / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 {lx:.1} {ly:.1})">{}</text>"#,
        panel.y_label
    );

    for &kind in kinds {
        let mut pts: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.kernel == kind && r.h > 0 && (panel.value)(r) > 0.0)
            .map(|r| (sx(r.h as f64), sy((panel.value)(r))))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pts.is_empty() {
            continue;
        }
        let joined: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            joined.join(" "),
            color(kind)
        );
        for (x, y) in pts {
            let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{}"/>"#, color(kind));
        }
    }
}

/// Renders the two panels. Identical records give identical bytes.
pub fn render_svg(records: &[BenchRecord]) -> String {
    let kinds: Vec<AttentionKind> = AttentionKind::ALL
        .into_iter()
        .filter(|k| records.iter().any(|r| r.kernel == *k))
        .collect();
    let width = 2.0 * PANEL_W;
    let height = PANEL_H + 20.0 * kinds.len() as f64 + 10.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    let panels = [
        Panel {
            title: "time",
            y_label: "median wall time (ns)",
            x_offset: 0.0,
            value: |r| r.wall_ns_median as f64,
        },
        Panel {
            title: "memory",
            y_label: "peak intermediate bytes",
            x_offset: PANEL_W,
            value: |r| r.peak_bytes as f64,
        },
    ];
    for panel in &panels {
        draw_panel(&mut out, panel, records, &kinds);
    }
    for (i, kind) in kinds.iter().enumerate() {
        let y = PANEL_H + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="12">{kind}</text>"#,
            MARGIN_L,
            MARGIN_L + 24.0,
            color(*kind),
            MARGIN_L + 30.0,
            y + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(kernel: AttentionKind, h: usize, ns: u64, bytes: u64) -> BenchRecord {
        BenchRecord {
            kernel,
            b: 1,
            c: 4,
            h,
            w: h,
            k: 3,
            reps: 3,
            wall_ns_median: ns,
            peak_bytes: bytes,
            flops_est: 1,
        }
    }

    #[test]
    fn empty_data_draws_axes_only() {
        let svg = render_svg(&[]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect x=").count(), 2);
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn one_polyline_per_kernel_and_deterministic() {
        let records = vec![
            rec(AttentionKind::Pam, 16, 1000, 5000),
            rec(AttentionKind::Pam, 32, 4000, 20000),
            rec(AttentionKind::Global, 16, 9000, 90000),
        ];
        let svg = render_svg(&records);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains(">pam</text>") && svg.contains(">global</text>"));
        assert_eq!(svg, render_svg(&records));
    }
}
