//! Radar chart of a sheet: one spoke per record, one closed polygon per
//! numeric attribute.
//!
//! Attributes span many orders of magnitude (light-minutes next to
//! millihertz), so each is min-max normalised to [0, 1] on its own. Sentinel
//! cells sit at the centre and get a hollow marker.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::sheet::{LinkRecord, Sheet};
use super::AnalysisError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 560.0;
const CX: f64 = 270.0;
const CY: f64 = 280.0;
const RADIUS: f64 = 200.0;
const RINGS: usize = 4;

/// The charted attributes: (legend name, colour, accessor).
#[allow(clippy::type_complexity)]
const ATTRIBUTES: [(&str, &str, fn(&LinkRecord) -> Option<f64>); 4] = [
    ("epsilon (Lm)", "#1f77b4", |r| Some(r.epsilon_lm)),
    ("delta t (s)", "#ff7f0e", |r| Some(r.delta_t_s)),
    ("nu_dw (Hz)", "#2ca02c", |r| r.nu_delta_omega_hz.hz()),
    ("nu_dw,x (Hz)", "#d62728", |r| r.nu_displaced_hz.hz()),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RadarChart {
    pub svg: String,
    /// Attributes left out because every cell was a sentinel.
    pub warnings: Vec<String>,
    /// Number of attribute polygons drawn.
    pub series: usize,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

fn spoke_angle(i: usize, n: usize) -> f64 {
    // first spoke points straight up, then clockwise
    -FRAC_PI_2 + TAU * i as f64 / n as f64
}

fn point(i: usize, n: usize, r: f64) -> (f64, f64) {
    let a = spoke_angle(i, n);
    (CX + RADIUS * r * a.cos(), CY + RADIUS * r * a.sin())
}

/// Min-max normalisation; a constant series sits on the outer ring.
fn normalise(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let finite = values.iter().flatten();
    let lo = finite.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|v| {
            v.map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 1.0 })
        })
        .collect()
}

fn spoke_label(r: &LinkRecord, multi_target: bool) -> String {
    if multi_target {
        format!("{} {}", r.target_name, r.f_xy_label)
    } else {
        r.f_xy_label.clone()
    }
}

pub fn render_radar_chart(sheet: &Sheet) -> Result<RadarChart, AnalysisError> {
    let recs = &sheet.records;
    let n = recs.len();
    if n < 3 {
        return Err(AnalysisError::Chart(format!("a radar chart needs at least 3 records, got {n}")));
    }
    let multi_target = recs.iter().any(|r| r.target_name != recs[0].target_name);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // grid
    let _ = writeln!(svg, r##"<g class="grid" stroke="#cccccc" fill="none" stroke-width="1">"##);
    for k in 1..=RINGS {
        let r = RADIUS * k as f64 / RINGS as f64;
        let _ = writeln!(svg, r#"<circle cx="{CX}" cy="{CY}" r="{r:.2}"/>"#);
    }
    for i in 0..n {
        let (x, y) = point(i, n, 1.0);
        let _ = writeln!(svg, r#"<line x1="{CX}" y1="{CY}" x2="{x:.2}" y2="{y:.2}"/>"#);
    }
    let _ = writeln!(svg, "</g>");

    // spoke labels
    let _ = writeln!(svg, r##"<g class="labels" font-family="sans-serif" font-size="11" fill="#333333">"##);
    for (i, r) in recs.iter().enumerate() {
        let (x, y) = point(i, n, 1.08);
        let a = spoke_angle(i, n).cos();
        let anchor = if a > 0.2 {
            "start"
        } else if a < -0.2 {
            "end"
        } else {
            "middle"
        };
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="{anchor}">{}</text>"#,
            y + 4.0,
            escape(&spoke_label(r, multi_target))
        );
    }
    let _ = writeln!(svg, "</g>");

    let mut warnings = Vec::new();
    let mut drawn = Vec::new();
    for (name, colour, get) in ATTRIBUTES {
        let raw: Vec<Option<f64>> = recs.iter().map(get).collect();
        if raw.iter().all(Option::is_none) {
            warnings.push(format!("attribute '{name}' is all sentinels; omitted from chart"));
            continue;
        }
        let norm = normalise(&raw);
        let pts: Vec<String> = norm
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (x, y) = point(i, n, r.unwrap_or(0.0));
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="series" data-attribute="{}" points="{}" fill="{colour}" fill-opacity="0.12" stroke="{colour}" stroke-width="2"/>"#,
            escape(name),
            pts.join(" ")
        );
        for (i, v) in raw.iter().enumerate() {
            if v.is_none() {
                let (x, y) = point(i, n, 0.0);
                let _ = writeln!(
                    svg,
                    r#"<circle class="sentinel" cx="{x:.2}" cy="{y:.2}" r="5" fill="none" stroke="{colour}" stroke-width="1.5"><title>{}: #Div/0!</title></circle>"#,
                    escape(name)
                );
            }
        }
        drawn.push((name, colour));
    }

    // legend
    let lx = CX + RADIUS + 110.0;
    let _ = writeln!(svg, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    for (k, (name, colour)) in drawn.iter().enumerate() {
        let y = 60.0 + 22.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{:.1}" width="14" height="14" fill="{colour}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y - 11.0,
            lx + 20.0,
            y,
            escape(name)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");

    Ok(RadarChart {
        svg,
        warnings,
        series: drawn.len(),
    })
}

pub fn write_radar_chart(sheet: &Sheet, path: impl AsRef<Path>) -> Result<RadarChart, AnalysisError> {
    let chart = render_radar_chart(sheet)?;
    let path = path.as_ref();
    fs::write(path, &chart.svg).map_err(|e| AnalysisError::io(path, e))?;
    Ok(chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sheet::build_sheet;
    use crate::linkmodel::{Resolution, Target, Timestamp};

    fn base() -> Timestamp {
        "13:35:00".parse().unwrap()
    }

    fn sun_sheet(progress: &[f64]) -> Sheet {
        build_sheet(&[Target::new("Sun", 1.46e8, 8.3).unwrap()], progress, base()).unwrap()
    }

    #[test]
    fn needs_three_spokes() {
        assert!(matches!(
            render_radar_chart(&sun_sheet(&[8.0, 16.0])),
            Err(AnalysisError::Chart(_))
        ));
    }

    #[test]
    fn well_formed_with_one_polygon_per_attribute() {
        let chart = render_radar_chart(&sun_sheet(&[0.0, 8.0, 16.0, 24.0, 96.0])).unwrap();
        let doc = roxmltree::Document::parse(&chart.svg).unwrap();
        let n = doc.descendants().filter(|n| n.has_tag_name("polygon")).count();
        assert_eq!(n, 4);
        assert_eq!(chart.series, 4);
        // the 0 % row carries a sentinel for nu_dw
        let marks = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("sentinel"))
            .count();
        assert_eq!(marks, 1);
        assert!(chart.warnings.is_empty());
    }

    #[test]
    fn constant_series_is_a_regular_triangle() {
        let t = Target::new("Sun", 1.46e8, 8.3).unwrap();
        let mut s = build_sheet(&[t], &[8.0, 16.0, 24.0], base()).unwrap();
        for r in &mut s.records {
            r.epsilon_lm = 2.0;
        }
        let chart = render_radar_chart(&s).unwrap();
        let doc = roxmltree::Document::parse(&chart.svg).unwrap();
        let eps = doc
            .descendants()
            .find(|n| n.attribute("data-attribute") == Some("epsilon (Lm)"))
            .unwrap();
        let pts: Vec<(f64, f64)> = eps
            .attribute("points")
            .unwrap()
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        assert_eq!(pts.len(), 3);
        for (x, y) in &pts {
            assert!(((x - CX).hypot(y - CY) - RADIUS).abs() < 0.01);
        }
        let side = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
        let (a, b, c) = (side(pts[0], pts[1]), side(pts[1], pts[2]), side(pts[2], pts[0]));
        assert!((a - b).abs() < 0.02 && (b - c).abs() < 0.02);
    }

    #[test]
    fn all_sentinel_attribute_is_omitted() {
        let mut s = sun_sheet(&[8.0, 16.0, 24.0]);
        for r in &mut s.records {
            r.nu_delta_omega_hz = Resolution::DivByZero;
        }
        let chart = render_radar_chart(&s).unwrap();
        assert_eq!(chart.series, 3);
        assert_eq!(chart.warnings.len(), 1);
        let doc = roxmltree::Document::parse(&chart.svg).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polygon")).count(), 3);
    }

    #[test]
    fn output_is_deterministic_and_escaped() {
        let t = Target::new("A<&>B", 1.0e8, 5.0).unwrap();
        let u = Target::new("C", 2.0e8, 9.0).unwrap();
        let s = build_sheet(&[t, u], &[10.0, 50.0], base()).unwrap();
        let a = render_radar_chart(&s).unwrap();
        let b = render_radar_chart(&s).unwrap();
        assert_eq!(a.svg, b.svg);
        assert!(a.svg.contains("A&lt;&amp;&gt;B 10%"));
        roxmltree::Document::parse(&a.svg).unwrap();
    }
}
