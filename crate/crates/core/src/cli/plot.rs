//! Static SVG plots.

use std::path::Path;

use plotters::prelude::*;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn io_err(e: impl std::fmt::Display) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

const COLORS: [RGBColor; 5] = [BLUE, RED, GREEN, MAGENTA, BLACK];

/// Line plot; with `log_y` the values are drawn as `log10 |y|`.
pub fn line_plot(path: &Path, title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> std::io::Result<()> {
    let map = |y: f64| if log_y { y.abs().max(1e-300).log10() } else { y };
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().map(|&(x, y)| (x, map(y)))).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
        (x0, x1, y0, y1) = (x0.min(x), x1.max(x), y0.min(y), y1.max(y));
    }
    if x0 >= x1 {
        x1 = x0 + 1.0;
    }
    if y0 >= y1 {
        y1 = y0 + 1.0;
    }
    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(io_err)?;
    let y_desc = if log_y { format!("log10 {y_label}") } else { y_label.to_string() };
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(io_err)?;
    chart.configure_mesh().x_desc(x_label).y_desc(y_desc).draw().map_err(io_err)?;
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().map(|&(x, y)| (x, map(y))).collect();
        chart
            .draw_series(LineSeries::new(pts.clone(), color))
            .map_err(io_err)?
            .label(s.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
        chart.draw_series(pts.into_iter().map(|p| Circle::new(p, 2, color.filled()))).map_err(io_err)?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(io_err)?;
    root.present().map_err(io_err)
}

/// Heatmap of `values[i][j]` over a grid indexed by `axis1[i]` (x) and
/// `axis2[j]` (y), both on a log10 scale.
pub fn heatmap(path: &Path, title: &str, axis1: &[f64], axis2: &[f64], values: &[Vec<f64>]) -> std::io::Result<()> {
    let finite: Vec<f64> = values.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::MAX, f64::min);
    let hi = finite.iter().copied().fold(f64::MIN, f64::max).max(lo + 1e-12);
    let root = SVGBackend::new(path, (600, 520)).into_drawing_area();
    root.fill(&WHITE).map_err(io_err)?;
    let (n1, n2) = (axis1.len(), axis2.len());
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{title} [{lo:.2}, {hi:.2}]"), ("sans-serif", 18))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..n1 as f64, 0.0..n2 as f64)
        .map_err(io_err)?;
    let label = |axis: &[f64], v: f64| axis.get(v as usize).map_or(String::new(), |x| format!("{:.1}", x.log10()));
    chart
        .configure_mesh()
        .disable_mesh()
        .x_labels(n1)
        .y_labels(n2)
        .x_label_formatter(&|v| label(axis1, *v))
        .y_label_formatter(&|v| label(axis2, *v))
        .draw()
        .map_err(io_err)?;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = if v.is_finite() { (v - lo) / (hi - lo) } else { 0.0 };
            let color = HSLColor(0.66 * (1.0 - t), 0.8, 0.5);
            let rect = Rectangle::new([(i as f64, j as f64), (i as f64 + 1.0, j as f64 + 1.0)], color.filled());
            chart.draw_series(std::iter::once(rect)).map_err(io_err)?;
        }
    }
    root.present().map_err(io_err)
}
