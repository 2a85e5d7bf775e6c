//! In-process SVG line charts.
//!
//! Output depends only on the data: no timestamps, random ids or system
//! fonts enter the SVG, so identical inputs give byte-identical files.

use crate::error::{Error, Result};
use plotters::prelude::*;

/// One named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { name: name.into(), points }
    }
}

const PALETTE: [RGBColor; 6] = [
    RGBColor(0, 0, 0),
    RGBColor(213, 94, 0),
    RGBColor(0, 114, 178),
    RGBColor(0, 158, 115),
    RGBColor(204, 121, 167),
    RGBColor(230, 159, 0),
];

fn plot_error(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(format!("plot rendering failed: {e}")))
}

/// Bounding box of all finite points, padded by 5% (and widened when flat).
fn bounds(series: &[Series]) -> Result<((f64, f64), (f64, f64))> {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 <= x1) {
        return Err(Error::Precondition("a chart needs at least one finite point".into()));
    }
    let pad = |lo: f64, hi: f64| {
        let w = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
        (lo - 0.05 * w, hi + 0.05 * w)
    };
    Ok((pad(x0, x1), pad(y0, y1)))
}

/// Renders the series as an SVG line chart with a legend.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let ((x0, x1), (y0, y1)) = bounds(series)?;
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (800, 500)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_error)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 22))
            .margin(15)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(x0..x1, y0..y1)
            .map_err(plot_error)?;
        chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw().map_err(plot_error)?;
        for (i, s) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts = s.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite());
            chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                .map_err(plot_error)?
                .label(s.name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(plot_error)?;
        root.present().map_err(plot_error)?;
    }
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_deterministic_and_well_formed() {
        let s = [Series::new("a", vec![(0.0, 1.0), (1.0, 2.0)]), Series::new("b", vec![(0.0, 0.5), (1.0, f64::NAN)])];
        let one = line_chart_svg("t", "x", "y", &s).unwrap();
        let two = line_chart_svg("t", "x", "y", &s).unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with("<svg") && one.trim_end().ends_with("</svg>"));
        assert!(line_chart_svg("t", "x", "y", &[Series::new("e", vec![])]).is_err());
    }
}
