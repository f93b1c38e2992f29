//! Static SVG line charts of a sweep table.
//!
//! Each threshold gets one `<path>`: a single curve for success, and two
//! subpaths (strong user, weak user) for rates and powers. Thresholds are
//! told apart by dash pattern; users by marker shape.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::report::{read_sweep_csv, CsvError};
use crate::experiment::SweepRow;

pub const RATES_FILE: &str = "rates_vs_disparity.svg";
pub const POWERS_FILE: &str = "powers_vs_disparity.svg";
pub const SUCCESS_FILE: &str = "success_vs_disparity.svg";

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 56.0;

/// Dashed, dash-dotted, solid, then dotted and long-dashed for extra curves.
const DASHES: [Option<&str>; 5] = [
    Some("7 4"),
    Some("9 3 2 3"),
    None,
    Some("2 3"),
    Some("14 4"),
];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("budget must be positive, got {0}")]
    InvalidBudget(f64),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One value per user for the two-user panels.
type Pick = fn(&SweepRow) -> [Option<f64>; 2];

struct Panel {
    file: &'static str,
    title: &'static str,
    y_label: &'static str,
    users: usize,
    pick: Pick,
    fixed_range: Option<(f64, f64)>,
}

const PANELS: [Panel; 3] = [
    Panel {
        file: RATES_FILE,
        title: "User rates",
        y_label: "Mean rate (nats)",
        users: 2,
        pick: |r| [r.mean_rate_strong, r.mean_rate_weak],
        fixed_range: None,
    },
    Panel {
        file: POWERS_FILE,
        title: "Allocated powers",
        y_label: "Mean power (fraction of budget)",
        users: 2,
        pick: |r| [r.mean_power_strong, r.mean_power_weak],
        fixed_range: None,
    },
    Panel {
        file: SUCCESS_FILE,
        title: "Successful transmissions",
        y_label: "Success (%)",
        users: 1,
        pick: |r| [Some(r.success_pct), None],
        fixed_range: Some((0.0, 100.0)),
    },
];

/// Writes the three charts for a sweep CSV whose powers are fractions of a
/// unit budget.
pub fn emit_plots(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    emit_plots_with_budget(csv_path, out_dir, 1.0)
}

/// Like [`emit_plots`], dividing powers by `budget`.
pub fn emit_plots_with_budget(
    csv_path: &Path,
    out_dir: &Path,
    budget: f64,
) -> Result<Vec<PathBuf>, PlotError> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(PlotError::InvalidBudget(budget));
    }
    let mut rows = read_sweep_csv(csv_path)?.rows;
    for row in &mut rows {
        row.mean_power_strong = row.mean_power_strong.map(|p| p / budget);
        row.mean_power_weak = row.mean_power_weak.map(|p| p / budget);
    }
    let series = group_by_theta(&rows);
    PANELS
        .iter()
        .map(|panel| {
            let path = out_dir.join(panel.file);
            std::fs::write(&path, render(panel, &series)).map_err(|source| PlotError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Ok(path)
        })
        .collect()
}

/// Rows grouped by threshold in first-seen order, each sorted by disparity.
fn group_by_theta(rows: &[SweepRow]) -> Vec<(f64, Vec<&SweepRow>)> {
    let mut groups: Vec<(f64, Vec<&SweepRow>)> = Vec::new();
    for row in rows {
        match groups.iter_mut().find(|(t, _)| *t == row.theta) {
            Some((_, members)) => members.push(row),
            None => groups.push((row.theta, vec![row])),
        }
    }
    for (_, members) in &mut groups {
        members.sort_by(|a, b| a.disparity.total_cmp(&b.disparity));
    }
    groups
}

/// Tick positions at 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let text = format!("{v:.3}");
    text.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn render(panel: &Panel, series: &[(f64, Vec<&SweepRow>)]) -> String {
    let xs = series
        .iter()
        .flat_map(|(_, rows)| rows.iter().map(|r| r.disparity));
    let (mut x_lo, mut x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    });
    if x_hi.partial_cmp(&x_lo) != Some(std::cmp::Ordering::Greater) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    let (y_lo, y_hi) = panel.fixed_range.unwrap_or_else(|| {
        let top = series
            .iter()
            .flat_map(|(_, rows)| rows.iter().flat_map(|r| (panel.pick)(r)))
            .flatten()
            .fold(0.0f64, f64::max);
        (0.0, if top > 0.0 { top * 1.05 } else { 1.0 })
    });
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        panel.title
    );

    // Axes, ticks and labels.
    let (x0, y0) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{x0:.1}" y1="{y0:.1}" x2="{:.1}" y2="{y0:.1}" stroke="black"/>"#,
        LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{TOP:.1}" stroke="black"/>"#
    );
    for x in ticks(x_lo, x_hi) {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick_label(x)
        );
    }
    for y in ticks(y_lo, y_hi) {
        let py = sy(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Channel disparity (weak-to-strong distance ratio)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + plot_h / 2.0,
        panel.y_label
    );

    // Curves.
    for (index, (theta, rows)) in series.iter().enumerate() {
        let dash = DASHES[index % DASHES.len()]
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let mut data = String::new();
        let mut markers = String::new();
        for user in 0..panel.users {
            let mut pen_down = false;
            for row in rows {
                match (panel.pick)(row)[user] {
                    Some(y) if y.is_finite() => {
                        let (px, py) = (sx(row.disparity), sy(y));
                        let _ =
                            write!(data, "{}{px:.2},{py:.2} ", if pen_down { "L" } else { "M" });
                        pen_down = true;
                        if panel.users == 2 {
                            markers.push_str(&marker(user, px, py));
                        }
                    }
                    _ => pen_down = false,
                }
            }
        }
        let _ = writeln!(
            svg,
            r#"<path class="theta-{index}" d="{}" fill="none" stroke="black" stroke-width="1.5"{dash}/>"#,
            data.trim_end()
        );
        svg.push_str(&markers);

        let ly = TOP + 14.0 + 20.0 * index as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="black" stroke-width="1.5"{dash}/><text x="{:.1}" y="{:.1}">θ = {}</text>"#,
            lx + 34.0,
            lx + 40.0,
            ly + 4.0,
            escape(&tick_label(*theta))
        );
    }
    if panel.users == 2 {
        let ly = TOP + 24.0 + 20.0 * series.len() as f64;
        let lx = WIDTH - RIGHT + 33.0;
        for (user, name) in ["strong user", "weak user"].iter().enumerate() {
            let y = ly + 18.0 * user as f64;
            svg.push_str(&marker(user, lx, y));
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}">{name}</text>"#,
                lx + 23.0,
                y + 4.0
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Filled circle for the strong user, open square for the weak user.
fn marker(user: usize, x: f64, y: f64) -> String {
    if user == 0 {
        format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="black"/>"#) + "\n"
    } else {
        format!(
            r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="white" stroke="black"/>"#,
            x - 3.0,
            y - 3.0
        ) + "\n"
    }
}
