use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, Emitted, ReportError};
use crate::eval::{BoxStats, ComparisonReport};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 70.0;
const MARGIN_LEFT: f64 = 70.0;
const PALETTE: [&str; 6] = ["#3b6ea8", "#e07b39", "#5a9e4b", "#b04a5a", "#7d5ba6", "#8c8c8c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// Grouped bars: one group per category, one bar per series.
    BarTrainTest,
    /// One box per series, drawn from the series values.
    BoxPerClass,
    /// Square grid: series `i` is row `i`, categories label both axes.
    HeatmapConfusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub title: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
    pub output: Option<PathBuf>,
}

impl ChartSpec {
    fn validate(&self) -> Result<(), ReportError> {
        let bad = |m: String| Err(ReportError::InvalidSpec(m));
        if self.series.is_empty() {
            return bad("no series".into());
        }
        for s in &self.series {
            if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
                return bad(format!("series {:?} holds non-finite value {v}", s.name));
            }
        }
        match self.kind {
            ChartKind::BarTrainTest => {
                if self.categories.is_empty() {
                    return bad("bar chart needs at least one category".into());
                }
                for s in &self.series {
                    if s.values.len() != self.categories.len() {
                        return bad(format!(
                            "series {:?} has {} values for {} categories",
                            s.name,
                            s.values.len(),
                            self.categories.len()
                        ));
                    }
                    if s.values.iter().any(|&v| v < 0.0) {
                        return bad(format!("series {:?} has negative bar heights", s.name));
                    }
                }
            }
            ChartKind::BoxPerClass => {
                if let Some(s) = self.series.iter().find(|s| s.values.is_empty()) {
                    return bad(format!("box {:?} has no values", s.name));
                }
            }
            ChartKind::HeatmapConfusion => {
                let k = self.categories.len();
                if self.series.len() != k || self.series.iter().any(|s| s.values.len() != k) {
                    return bad(format!("heatmap must be {k}x{k}"));
                }
                if self.series.iter().flat_map(|s| &s.values).any(|&v| v < 0.0) {
                    return bad("heatmap counts must be non-negative".into());
                }
            }
        }
        Ok(())
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
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

struct Canvas {
    buf: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut buf = String::new();
        let _ = write!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif">"#
        );
        buf.push('\n');
        let _ = writeln!(buf, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            buf,
            r#"<text x="{:.1}" y="30" text-anchor="middle" font-size="17" font-weight="bold">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Self { buf }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.buf,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, size: u32, s: &str) {
        let _ = writeln!(
            self.buf,
            r#"<text x="{x:.3}" y="{y:.3}" text-anchor="{anchor}" font-size="{size}">{}</text>"#,
            escape(s)
        );
    }

    /// Left axis from `y_min` to `y_max` with five ticks, plus the bottom axis.
    fn value_axes(&mut self, y_min: f64, y_max: f64, y_label: &str) {
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        for i in 0..=5 {
            let v = y_min + (y_max - y_min) * i as f64 / 5.0;
            let y = MARGIN_TOP + plot_h - plot_h * i as f64 / 5.0;
            self.line(MARGIN_LEFT, y, WIDTH - MARGIN_RIGHT, y, "#e5e5e5", 1.0);
            self.text(MARGIN_LEFT - 8.0, y + 4.0, "end", 11, &format!("{v:.2}"));
        }
        self.line(
            MARGIN_LEFT,
            MARGIN_TOP,
            MARGIN_LEFT,
            MARGIN_TOP + plot_h,
            "#333333",
            1.5,
        );
        self.line(
            MARGIN_LEFT,
            MARGIN_TOP + plot_h,
            WIDTH - MARGIN_RIGHT,
            MARGIN_TOP + plot_h,
            "#333333",
            1.5,
        );
        let _ = writeln!(
            self.buf,
            r#"<text x="18" y="{y:.3}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {y:.3})">{}</text>"#,
            escape(y_label),
            y = MARGIN_TOP + plot_h / 2.0
        );
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

fn bar_chart(spec: &ChartSpec) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let max_v = spec.series.iter().flat_map(|s| &s.values).copied().fold(0.0, f64::max);
    let y_max = max_v.max(1.0);
    let mut c = Canvas::new(&spec.title);
    c.value_axes(0.0, y_max, "accuracy");

    let groups = spec.categories.len() as f64;
    let group_w = plot_w / groups;
    let bar_w = group_w * 0.7 / spec.series.len() as f64;
    let base = MARGIN_TOP + plot_h;
    for (g, cat) in spec.categories.iter().enumerate() {
        let gx = MARGIN_LEFT + group_w * g as f64 + group_w * 0.15;
        for (s, series) in spec.series.iter().enumerate() {
            let v = series.values[g];
            let h = v / y_max * plot_h;
            let x = gx + bar_w * s as f64;
            let _ = writeln!(
                c.buf,
                r#"<rect class="bar" data-series="{}" data-category="{}" data-value="{v}" x="{x:.3}" y="{:.3}" width="{bar_w:.3}" height="{h:.6}" fill="{}"/>"#,
                escape(&series.name),
                escape(cat),
                base - h,
                PALETTE[s % PALETTE.len()]
            );
            c.text(x + bar_w / 2.0, base - h - 4.0, "middle", 10, &format!("{v:.3}"));
        }
        c.text(gx + group_w * 0.35, base + 18.0, "middle", 12, cat);
    }
    // legend
    for (s, series) in spec.series.iter().enumerate() {
        let x = MARGIN_LEFT + 10.0 + 120.0 * s as f64;
        let y = HEIGHT - 25.0;
        let _ = writeln!(
            c.buf,
            r#"<rect x="{x:.3}" y="{:.3}" width="12" height="12" fill="{}"/>"#,
            y - 10.0,
            PALETTE[s % PALETTE.len()]
        );
        c.text(x + 16.0, y, "start", 12, &series.name);
    }
    c.finish()
}

fn box_chart(spec: &ChartSpec) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let stats: Vec<BoxStats> = spec
        .series
        .iter()
        .map(|s| BoxStats::from_values(&s.values).expect("validated non-empty"))
        .collect();
    let y_max = stats.iter().map(|b| b.max).fold(1.0, f64::max);
    let y_min = stats.iter().map(|b| b.min).fold(0.0, f64::min);
    let span = y_max - y_min;
    let y_of = |v: f64| MARGIN_TOP + plot_h - (v - y_min) / span * plot_h;
    let mut c = Canvas::new(&spec.title);
    c.value_axes(y_min, y_max, "per-class recall");

    let slot = plot_w / spec.series.len() as f64;
    for (i, (series, b)) in spec.series.iter().zip(&stats).enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let half = slot * 0.2;
        let color = PALETTE[i % PALETTE.len()];
        c.line(cx, y_of(b.min), cx, y_of(b.q1), "#333333", 1.0);
        c.line(cx, y_of(b.q3), cx, y_of(b.max), "#333333", 1.0);
        c.line(
            cx - half / 2.0,
            y_of(b.min),
            cx + half / 2.0,
            y_of(b.min),
            "#333333",
            1.0,
        );
        c.line(
            cx - half / 2.0,
            y_of(b.max),
            cx + half / 2.0,
            y_of(b.max),
            "#333333",
            1.0,
        );
        let _ = writeln!(
            c.buf,
            r##"<rect class="box" data-series="{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.6}" fill="{color}" fill-opacity="0.6" stroke="#333333"/>"##,
            escape(&series.name),
            cx - half,
            y_of(b.q3),
            2.0 * half,
            y_of(b.q1) - y_of(b.q3)
        );
        c.line(cx - half, y_of(b.median), cx + half, y_of(b.median), "#111111", 2.0);
        for &v in &series.values {
            let _ = writeln!(
                c.buf,
                r##"<circle cx="{cx:.3}" cy="{:.3}" r="2.5" fill="#111111" fill-opacity="0.5"/>"##,
                y_of(v)
            );
        }
        c.text(cx, MARGIN_TOP + plot_h + 18.0, "middle", 12, &series.name);
    }
    c.finish()
}

fn heatmap(spec: &ChartSpec) -> String {
    let k = spec.categories.len();
    let left = 150.0;
    let top = MARGIN_TOP + 20.0;
    let size = (WIDTH - left - MARGIN_RIGHT).min(HEIGHT - top - 90.0);
    let cell = size / k as f64;
    let mut c = Canvas::new(&spec.title);
    for (i, row) in spec.series.iter().enumerate() {
        let total: f64 = row.values.iter().sum();
        for (j, &v) in row.values.iter().enumerate() {
            let frac = if total > 0.0 { v / total } else { 0.0 };
            // white → blue by row-normalized share
            let r = (255.0 - 196.0 * frac).round() as u8;
            let g = (255.0 - 145.0 * frac).round() as u8;
            let b = (255.0 - 87.0 * frac).round() as u8;
            let x = left + cell * j as f64;
            let y = top + cell * i as f64;
            let _ = writeln!(
                c.buf,
                r##"<rect class="cell" data-row="{i}" data-col="{j}" data-value="{v}" x="{x:.3}" y="{y:.3}" width="{cell:.3}" height="{cell:.3}" fill="#{r:02x}{g:02x}{b:02x}" stroke="#999999"/>"##
            );
            c.text(x + cell / 2.0, y + cell / 2.0 + 4.0, "middle", 11, &format!("{v}"));
        }
        c.text(
            left - 6.0,
            top + cell * (i as f64 + 0.5) + 4.0,
            "end",
            11,
            &spec.categories[i],
        );
    }
    for (j, name) in spec.categories.iter().enumerate() {
        let x = left + cell * (j as f64 + 0.5);
        let y = top + size + 14.0;
        let _ = writeln!(
            c.buf,
            r#"<text x="{x:.3}" y="{y:.3}" text-anchor="end" font-size="11" transform="rotate(-30 {x:.3} {y:.3})">{}</text>"#,
            escape(name)
        );
    }
    c.text(left + size / 2.0, HEIGHT - 10.0, "middle", 13, "predicted class");
    let _ = writeln!(
        c.buf,
        r#"<text x="16" y="{y:.3}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {y:.3})">true class</text>"#,
        y = top + size / 2.0
    );
    c.finish()
}

/// Renders a chart as a standalone SVG document.
pub fn emit_svg(spec: &ChartSpec) -> Result<String, ReportError> {
    spec.validate()?;
    Ok(match spec.kind {
        ChartKind::BarTrainTest => bar_chart(spec),
        ChartKind::BoxPerClass => box_chart(spec),
        ChartKind::HeatmapConfusion => heatmap(spec),
    })
}

/// Renders and writes to `spec.output`.
pub fn write_svg(spec: &ChartSpec) -> Result<PathBuf, ReportError> {
    let svg = emit_svg(spec)?;
    let path = spec
        .output
        .clone()
        .ok_or_else(|| ReportError::InvalidSpec("no output path".into()))?;
    fs::write(&path, svg).map_err(io_err(&path))?;
    Ok(path)
}

/// The chart set for a comparison: train/test accuracy bars, per-class recall
/// boxes, and one confusion heatmap per variant.
pub fn figure_specs(report: &ComparisonReport, out_dir: &Path) -> Vec<ChartSpec> {
    let names: Vec<String> = report.variants.iter().map(|r| r.variant.to_string()).collect();
    let mut specs = vec![ChartSpec {
        kind: ChartKind::BarTrainTest,
        title: "Train and test accuracy by variant".into(),
        categories: names,
        series: vec![
            Series {
                name: "train".into(),
                values: report.variants.iter().map(|r| r.train_accuracy).collect(),
            },
            Series {
                name: "test".into(),
                values: report.variants.iter().map(|r| r.test_accuracy).collect(),
            },
        ],
        output: Some(out_dir.join("fig_train_test.svg")),
    }];
    if report.provenance.class_names.len() >= 2 {
        specs.push(ChartSpec {
            kind: ChartKind::BoxPerClass,
            title: "Per-class test recall by variant".into(),
            categories: vec![],
            series: report
                .variants
                .iter()
                .map(|r| Series {
                    name: r.variant.to_string(),
                    values: r.per_class.iter().map(|m| m.recall).collect(),
                })
                .collect(),
            output: Some(out_dir.join("fig_box.svg")),
        });
        for r in &report.variants {
            specs.push(ChartSpec {
                kind: ChartKind::HeatmapConfusion,
                title: format!("Confusion matrix ({})", r.variant),
                categories: r.confusion.class_names.clone(),
                series: r
                    .confusion
                    .counts
                    .iter()
                    .zip(&r.confusion.class_names)
                    .map(|(row, name)| Series {
                        name: name.clone(),
                        values: row.iter().map(|&v| v as f64).collect(),
                    })
                    .collect(),
                output: Some(out_dir.join(format!("fig_confusion_{}.svg", r.variant))),
            });
        }
    }
    specs
}

/// Writes every chart from [`figure_specs`].
pub fn emit_figures(report: &ComparisonReport, out_dir: &Path) -> Result<Emitted, ReportError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut emitted = Emitted::default();
    for spec in figure_specs(report, out_dir) {
        emitted.files.push(write_svg(&spec)?);
    }
    Ok(emitted)
}
